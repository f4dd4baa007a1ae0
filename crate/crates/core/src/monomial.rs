//! Exact Laurent monomials over named symbols, and coordinate maps built from
//! them.
//!
//! Text form: factors joined by ` * `, exponents written `^k`, numerator
//! factors first. Level-indexed symbols render as `eps(-2)`, edge- or
//! tag-indexed ones as `u_c`. A one-letter chart mark may follow the family
//! name (`epsp(-1)`, `ua_c`). `1` and `0` are the constants.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::level::{parse_level, Level};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Epsilon,
    Delta,
    EpsTilde,
    U,
    Z,
    W,
    Zeta,
    Sigma,
    Mu,
    Lambda,
    F,
    Rho,
    ZCheck,
    ZTilde,
    S,
    Generic,
}

const KINDS: &[(Kind, &str)] = &[
    (Kind::Epsilon, "eps"),
    (Kind::Delta, "delta"),
    (Kind::EpsTilde, "epst"),
    (Kind::U, "u"),
    (Kind::Z, "z"),
    (Kind::W, "w"),
    (Kind::Zeta, "zeta"),
    (Kind::Sigma, "sigma"),
    (Kind::Mu, "mu"),
    (Kind::Lambda, "lambda"),
    (Kind::F, "f"),
    (Kind::Rho, "rho"),
    (Kind::ZCheck, "zv"),
    (Kind::ZTilde, "zt"),
    (Kind::S, "s"),
    (Kind::Generic, "g"),
];

impl Kind {
    pub fn name(self) -> &'static str {
        KINDS.iter().find(|(k, _)| *k == self).unwrap().1
    }

    pub fn is_level_indexed(self) -> bool {
        matches!(self, Kind::Epsilon | Kind::Delta | Kind::EpsTilde)
    }
}

/// Distinguishes the coordinates of different charts sharing one tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mark {
    Plain,
    Alt,
    Hat,
    Prime,
}

impl Mark {
    fn suffix(self) -> &'static str {
        match self {
            Mark::Plain => "",
            Mark::Alt => "a",
            Mark::Hat => "h",
            Mark::Prime => "p",
        }
    }

    fn from_suffix(s: &str) -> Option<Mark> {
        match s {
            "" => Some(Mark::Plain),
            "a" => Some(Mark::Alt),
            "h" => Some(Mark::Hat),
            "p" => Some(Mark::Prime),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Key {
    Level(Level),
    Name(Arc<str>),
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            // higher levels first, matching how products are usually written
            (Key::Level(a), Key::Level(b)) => b.cmp(a),
            (Key::Name(a), Key::Name(b)) => a.cmp(b),
            (Key::Level(_), Key::Name(_)) => Ordering::Less,
            (Key::Name(_), Key::Level(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub kind: Kind,
    pub mark: Mark,
    pub key: Key,
}

impl Symbol {
    pub fn level(kind: Kind, mark: Mark, l: Level) -> Symbol {
        debug_assert!(kind.is_level_indexed());
        Symbol { kind, mark, key: Key::Level(l) }
    }

    pub fn named(kind: Kind, mark: Mark, name: &str) -> Symbol {
        debug_assert!(!kind.is_level_indexed());
        Symbol { kind, mark, key: Key::Name(Arc::from(name)) }
    }

    pub fn eps(l: Level) -> Symbol {
        Symbol::level(Kind::Epsilon, Mark::Plain, l)
    }

    pub fn u(e: &str) -> Symbol {
        Symbol::named(Kind::U, Mark::Plain, e)
    }

    pub fn z(e: &str) -> Symbol {
        Symbol::named(Kind::Z, Mark::Plain, e)
    }

    pub fn w(j: &str) -> Symbol {
        Symbol::named(Kind::W, Mark::Plain, j)
    }

    pub fn zeta(e: &str) -> Symbol {
        Symbol::named(Kind::Zeta, Mark::Plain, e)
    }

    pub fn sigma(j: &str) -> Symbol {
        Symbol::named(Kind::Sigma, Mark::Plain, j)
    }

    pub fn mu(e: &str) -> Symbol {
        Symbol::named(Kind::Mu, Mark::Plain, e)
    }

    pub fn with_mark(&self, mark: Mark) -> Symbol {
        Symbol { mark, ..self.clone() }
    }

    pub fn level_key(&self) -> Option<Level> {
        match &self.key {
            Key::Level(l) => Some(*l),
            Key::Name(_) => None,
        }
    }

    pub fn name_key(&self) -> Option<&str> {
        match &self.key {
            Key::Name(n) => Some(n),
            Key::Level(_) => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = format!("{}{}", self.kind.name(), self.mark.suffix());
        match &self.key {
            Key::Level(l) => write!(f, "{head}({l})"),
            Key::Name(n) => write!(f, "{head}_{n}"),
        }
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Symbol> {
        let s = s.trim();
        let split = s
            .find(['(', '_'])
            .ok_or_else(|| Error::Parse(format!("symbol `{s}` has no index")))?;
        let (head, rest) = s.split_at(split);
        let (kind, mark) = KINDS
            .iter()
            .filter_map(|(k, name)| {
                head.strip_prefix(name)
                    .and_then(Mark::from_suffix)
                    .map(|m| (*k, m))
            })
            .max_by_key(|(k, _)| k.name().len())
            .ok_or_else(|| Error::Parse(format!("unknown symbol family `{head}`")))?;
        if kind.is_level_indexed() {
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("`{s}` needs a level in parentheses")))?;
            Ok(Symbol::level(kind, mark, parse_level(inner)?))
        } else {
            let key = rest
                .strip_prefix('_')
                .ok_or_else(|| Error::Parse(format!("`{s}` needs `_name`")))?;
            crate::tree::check_id(key).map_err(|_| Error::Parse(format!("bad index in `{s}`")))?;
            Ok(Symbol::named(kind, mark, key))
        }
    }
}

/// A Laurent monomial with coefficient 1, or the constant 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: Vec<(Symbol, i32)>,
    zero: bool,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn zero() -> Monomial {
        Monomial { factors: vec![], zero: true }
    }

    pub fn var(s: Symbol) -> Monomial {
        Monomial { factors: vec![(s, 1)], zero: false }
    }

    pub fn power(s: Symbol, k: i32) -> Monomial {
        if k == 0 {
            Monomial::one()
        } else {
            Monomial { factors: vec![(s, k)], zero: false }
        }
    }

    pub fn from_factors<I: IntoIterator<Item = (Symbol, i32)>>(it: I) -> Monomial {
        let mut m: BTreeMap<Symbol, i32> = BTreeMap::new();
        for (s, k) in it {
            *m.entry(s).or_insert(0) += k;
        }
        Monomial { factors: m.into_iter().filter(|(_, k)| *k != 0).collect(), zero: false }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn is_one(&self) -> bool {
        !self.zero && self.factors.is_empty()
    }

    pub fn factors(&self) -> &[(Symbol, i32)] {
        &self.factors
    }

    pub fn exponent(&self, s: &Symbol) -> i32 {
        self.factors
            .binary_search_by(|(x, _)| x.cmp(s))
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.factors.iter().map(|(s, _)| s)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        if self.zero || other.zero {
            return Monomial::zero();
        }
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let k = a[i].1 + b[j].1;
                    if k != 0 {
                        out.push((a[i].0.clone(), k));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial { factors: out, zero: false }
    }

    pub fn pow(&self, k: i32) -> Result<Monomial> {
        if self.zero {
            return match k.cmp(&0) {
                Ordering::Greater => Ok(Monomial::zero()),
                Ordering::Equal => Ok(Monomial::one()),
                Ordering::Less => Err(Error::IllDefined("0^-k".into())),
            };
        }
        if k == 0 {
            return Ok(Monomial::one());
        }
        Ok(Monomial { factors: self.factors.iter().map(|(s, e)| (s.clone(), e * k)).collect(), zero: false })
    }

    pub fn inv(&self) -> Result<Monomial> {
        self.pow(-1)
    }

    pub fn div(&self, other: &Monomial) -> Result<Monomial> {
        Ok(self.mul(&other.inv()?))
    }

    /// Replaces every symbol by its image. Symbols without an image are an
    /// error; a negative power of a zero image is ill-defined.
    pub fn substitute<'a, F>(&self, image: F) -> Result<Monomial>
    where
        F: Fn(&Symbol) -> Option<&'a Monomial>,
    {
        if self.zero {
            return Ok(Monomial::zero());
        }
        let mut out = Monomial::one();
        let mut vanishes = false;
        for (s, k) in &self.factors {
            let m = image(s).ok_or_else(|| Error::Coordinates(format!("no image for `{s}`")))?;
            if m.zero {
                if *k < 0 {
                    return Err(Error::IllDefined(self.to_string()));
                }
                vanishes = true;
            } else {
                out = out.mul(&m.pow(*k)?);
            }
        }
        Ok(if vanishes { Monomial::zero() } else { out })
    }

    /// Value on a stratum: 0 if some zero symbol has positive exponent.
    pub fn on_stratum(&self, s: &Stratum) -> Result<Monomial> {
        if self.zero {
            return Ok(Monomial::zero());
        }
        let mut vanishes = false;
        for (x, k) in &self.factors {
            if s.zeros.contains(x) {
                if *k < 0 {
                    return Err(Error::IllDefined(self.to_string()));
                }
                vanishes = true;
            }
        }
        Ok(if vanishes { Monomial::zero() } else { self.clone() })
    }

    /// Whether the monomial is nowhere zero on the stratum: no zero symbol
    /// survives and every other symbol is a declared unit.
    pub fn is_unit_on(&self, s: &Stratum) -> bool {
        !self.zero && self.factors.iter().all(|(x, _)| s.units.contains(x))
    }
}

impl std::ops::Mul for &Monomial {
    type Output = Monomial;

    fn mul(self, rhs: &Monomial) -> Monomial {
        Monomial::mul(self, rhs)
    }
}

impl From<Symbol> for Monomial {
    fn from(s: Symbol) -> Monomial {
        Monomial::var(s)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            return f.write_str("0");
        }
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let mut parts = vec![];
        for (s, k) in self.factors.iter().filter(|(_, k)| *k > 0) {
            parts.push(if *k == 1 { s.to_string() } else { format!("{s}^{k}") });
        }
        for (s, k) in self.factors.iter().filter(|(_, k)| *k < 0) {
            parts.push(format!("{s}^{k}"));
        }
        f.write_str(&parts.join(" * "))
    }
}

impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Monomial> {
        let s = s.trim();
        if s == "0" {
            return Ok(Monomial::zero());
        }
        let mut factors = vec![];
        for part in s.split('*') {
            let part = part.trim();
            if part == "1" {
                continue;
            }
            let (atom, k) = match part.split_once('^') {
                Some((a, k)) => (a, k.trim().parse::<i32>().map_err(|e| Error::Parse(format!("exponent in `{part}`: {e}")))?),
                None => (part, 1),
            };
            factors.push((atom.parse::<Symbol>()?, k));
        }
        Ok(Monomial::from_factors(factors))
    }
}

/// Coordinates forced to vanish, and coordinates known to be nowhere zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stratum {
    pub zeros: BTreeSet<Symbol>,
    pub units: BTreeSet<Symbol>,
}

impl Stratum {
    pub fn new(zeros: BTreeSet<Symbol>, units: BTreeSet<Symbol>) -> Result<Stratum> {
        if let Some(s) = zeros.intersection(&units).next() {
            return Err(Error::Domain(format!("`{s}` is both zero and a unit")));
        }
        Ok(Stratum { zeros, units })
    }

    pub fn open() -> Stratum {
        Stratum::default()
    }
}

/// Assignment `target -> monomial in source symbols`, read as a pullback.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonomialMap {
    pub source: BTreeSet<Symbol>,
    pub assign: BTreeMap<Symbol, Monomial>,
}

impl MonomialMap {
    pub fn new(source: BTreeSet<Symbol>, assign: BTreeMap<Symbol, Monomial>) -> Result<MonomialMap> {
        for (t, m) in &assign {
            if let Some(s) = m.symbols().find(|s| !source.contains(s)) {
                return Err(Error::Coordinates(format!("`{t}` uses `{s}` outside the source coordinates")));
            }
        }
        Ok(MonomialMap { source, assign })
    }

    pub fn identity(coords: &BTreeSet<Symbol>) -> MonomialMap {
        MonomialMap {
            source: coords.clone(),
            assign: coords.iter().map(|s| (s.clone(), Monomial::var(s.clone()))).collect(),
        }
    }

    pub fn targets(&self) -> BTreeSet<Symbol> {
        self.assign.keys().cloned().collect()
    }

    pub fn get(&self, t: &Symbol) -> Option<&Monomial> {
        self.assign.get(t)
    }

    /// Restriction to a subset of target coordinates.
    pub fn restrict(&self, targets: &BTreeSet<Symbol>) -> MonomialMap {
        MonomialMap {
            source: self.source.clone(),
            assign: self.assign.iter().filter(|(t, _)| targets.contains(*t)).map(|(t, m)| (t.clone(), m.clone())).collect(),
        }
    }
}

/// `f ∘ g`: each target of `f` rewritten through `g`.
pub fn compose(f: &MonomialMap, g: &MonomialMap) -> Result<MonomialMap> {
    if g.targets() != f.source {
        return Err(Error::Coordinates("inner targets differ from outer sources".into()));
    }
    compose_loose(f, g)
}

/// Like [`compose`] but only requires `g` to cover the symbols `f` uses.
pub fn compose_loose(f: &MonomialMap, g: &MonomialMap) -> Result<MonomialMap> {
    let mut assign = BTreeMap::new();
    for (t, m) in &f.assign {
        assign.insert(t.clone(), m.substitute(|s| g.assign.get(s))?);
    }
    Ok(MonomialMap { source: g.source.clone(), assign })
}

/// Target coordinates on which `f` and `g` disagree after imposing `s`.
pub fn diff_on_stratum(f: &MonomialMap, g: &MonomialMap, s: &Stratum) -> Result<Vec<Symbol>> {
    if f.targets() != g.targets() {
        return Err(Error::Coordinates("maps have different target coordinates".into()));
    }
    let mut out = vec![];
    for (t, m) in &f.assign {
        if m.on_stratum(s)? != g.assign[t].on_stratum(s)? {
            out.push(t.clone());
        }
    }
    Ok(out)
}

pub fn equal_on_stratum(f: &MonomialMap, g: &MonomialMap, s: &Stratum) -> Result<bool> {
    Ok(diff_on_stratum(f, g, s)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level::lvl;

    fn m(s: &str) -> Monomial {
        s.parse().unwrap()
    }

    #[test]
    fn products() {
        let e1 = Monomial::var(Symbol::eps(lvl(-1)));
        let e2 = Monomial::var(Symbol::eps(lvl(-2)));
        assert_eq!((&e1 * &e2).to_string(), "eps(-1) * eps(-2)");
        assert_eq!(&e1 * &Monomial::one(), e1);
        assert_eq!(&m("u_c * u_b^-1") * &m("u_b"), m("u_c"));
        assert!((&e1 * &Monomial::zero()).is_zero());
    }

    #[test]
    fn text_round_trip() {
        for s in ["u_c * eps(-2) * u_b^-1", "1", "0", "epsp(-3/2)^2 * ua_x.1", "zeta_c * mu_d^-3", "epst(-1) * zv_a * zt_b * s_j"] {
            let x = m(s);
            assert_eq!(m(&x.to_string()), x, "{s}");
        }
        assert_eq!(m("u_c * eps(-2) * u_b^-1").to_string(), "eps(-2) * u_c * u_b^-1");
        assert!("q_x".parse::<Monomial>().is_err());
        assert!("eps_x".parse::<Monomial>().is_err());
        assert!("u(-1)".parse::<Monomial>().is_err());
    }

    #[test]
    fn stratum_evaluation() {
        let st = Stratum::new([Symbol::eps(lvl(-2))].into(), BTreeSet::new()).unwrap();
        let zc = Symbol::zeta("c");
        let f = MonomialMap { source: BTreeSet::new(), assign: [(zc.clone(), m("eps(-2) * u_c"))].into() };
        let g = MonomialMap { source: BTreeSet::new(), assign: [(zc.clone(), Monomial::zero())].into() };
        assert!(equal_on_stratum(&f, &g, &st).unwrap());
        let bad = MonomialMap { source: BTreeSet::new(), assign: [(zc, m("eps(-2)^-1"))].into() };
        assert!(matches!(equal_on_stratum(&bad, &g, &st), Err(Error::IllDefined(_))));
    }

    #[test]
    fn composition() {
        let coords: BTreeSet<Symbol> = [Symbol::u("a"), Symbol::u("b")].into();
        let f = MonomialMap::new(coords.clone(), [(Symbol::zeta("a"), m("u_a * u_b^-1"))].into()).unwrap();
        let id = MonomialMap::identity(&coords);
        assert_eq!(compose(&f, &id).unwrap(), f);
        let g = MonomialMap::new(coords.clone(), [(Symbol::u("a"), m("u_a^2")), (Symbol::u("b"), m("u_a"))].into()).unwrap();
        assert_eq!(compose(&f, &g).unwrap().assign[&Symbol::zeta("a")], m("u_a"));
        assert!(compose(&id, &f).is_err());
    }
}
