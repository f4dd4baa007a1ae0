//! Exact Laurent monomials and monomial maps: parsing, composition, and
//! evaluation on a stratum where some coordinates vanish.

use std::collections::BTreeSet;

use leveltree::monomial::{compose, Monomial, MonomialMap, Stratum, Symbol};

fn main() -> leveltree::Result<()> {
    let m: Monomial = "eps(-1) * eps(-2)^2 * u_c^-1".parse()?;
    let n: Monomial = "u_c * zeta_a".parse()?;
    println!("m = {m}\nn = {n}\nm * n = {}\nm / n = {}", m.mul(&n), m.div(&n)?);

    let x: Symbol = "eps(-1)".parse()?;
    let y: Symbol = "eps(-2)".parse()?;
    let source: BTreeSet<Symbol> = [x.clone(), y.clone()].into_iter().collect();
    // (x, y) -> (x y, y) and its inverse (x, y) -> (x / y, y)
    let f = MonomialMap::new(source.clone(), [(x.clone(), "eps(-1) * eps(-2)".parse()?), (y.clone(), Monomial::var(y.clone()))].into())?;
    let g = MonomialMap::new(source.clone(), [(x.clone(), "eps(-1) * eps(-2)^-1".parse()?), (y.clone(), Monomial::var(y.clone()))].into())?;
    let fg = compose(&f, &g)?;
    println!("f ∘ g is the identity: {}", fg == MonomialMap::identity(&source));

    let on_y0 = Stratum::new([y.clone()].into(), BTreeSet::new())?;
    println!("f*x on {{eps(-2) = 0}}: {}", f.get(&x).unwrap().on_stratum(&on_y0)?);
    match g.get(&x).unwrap().on_stratum(&on_y0) {
        Ok(v) => println!("g*x on {{eps(-2) = 0}}: {v}"),
        Err(e) => println!("g*x on {{eps(-2) = 0}}: {e}"),
    }
    Ok(())
}
