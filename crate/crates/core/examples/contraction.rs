//! Contracts the worked example along every I ⊆ 𝕀 and prints the local poset
//! of strata it generates.

use leveltree::contraction::{contract, index_identities};
use leveltree::enumerate::StrataPoset;
use leveltree::fixtures::fig2;

fn main() -> leveltree::Result<()> {
    let t = fig2();
    println!("t = {t}");
    let part = t.level_data()?.index_partition();
    for sub in part.subsets() {
        let res = contract(&t, &sub)?;
        let gone: Vec<&str> = res.contracted.iter().map(|e| t.tree().name(*e)).collect();
        let ids = index_identities(&t, &sub)?;
        println!(
            "I = {:<8} t_(I) = {}  contracted [{}]  identities hold: {}",
            sub.display(t.tree()),
            res.tree,
            gone.join(" "),
            ids.as_stated()
        );
    }
    let poset = StrataPoset::of(&t)?;
    println!("local poset: {} classes, {} arrows, transitive: {}", poset.nodes.len(), poset.arrows.len(), poset.is_transitive());
    for (a, b) in &poset.arrows {
        println!("  {} -> {}", poset.nodes[*a], poset.nodes[*b]);
    }
    Ok(())
}
