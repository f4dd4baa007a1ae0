//! Level data of the larger example tree: m, the index set 𝕀 = 𝕀₊ ⊔ 𝕀ₘ ⊔ 𝕀₋,
//! the cross sections 𝔈ᵢ, the successors i♯ and the ascent sequences.

use leveltree::fixtures::{fig1, fig1_special};
use leveltree::level::ascent_sequence;

fn main() -> leveltree::Result<()> {
    let t = fig1();
    let tree = t.tree();
    let ld = t.level_data()?;
    let part = ld.index_partition();
    let names = |es: &[usize]| es.iter().map(|e| tree.name(*e)).collect::<Vec<_>>().join(", ");
    println!("{t}");
    println!("m = {}", ld.m);
    println!("𝕀₊ = {:?}", part.plus.iter().map(|l| l.to_string()).collect::<Vec<_>>());
    println!("𝕀ₘ = {{{}}}", names(&part.m_edges));
    println!("𝕀₋ = {{{}}}", names(&part.minus));
    let special = fig1_special(&t);
    for i in ld.i_plus() {
        let ascent: Vec<String> = ascent_sequence(&t, &special, i)?.iter().map(|l| l.to_string()).collect();
        println!("i = {i}: i♯ = {}, 𝔈ᵢ = {{{}}}, ascent [{}]", ld.sharp(i)?, names(&ld.cross_section(i)?), ascent.join(", "));
    }
    println!("{} subsets I ⊆ 𝕀", 1u64 << part.len());
    Ok(())
}
