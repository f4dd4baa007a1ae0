//! Counts weighted trees and level-tree classes by number of edges.

use leveltree::enumerate::{gen_level_trees, gen_weighted_trees, EnumSpec};

fn main() -> leveltree::Result<()> {
    let max_edges = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let spec = EnumSpec::new(max_edges, 2);
    let mut trees = vec![0usize; max_edges + 1];
    let mut classes = vec![0usize; max_edges + 1];
    for base in gen_weighted_trees(&spec) {
        let e = base.tree.edge_count();
        trees[e] += 1;
        classes[e] += gen_level_trees(&base, &spec)?.len();
    }
    println!("edges  weighted trees  level classes");
    for e in 0..=max_edges {
        println!("{e:>5}  {:>14}  {:>13}", trees[e], classes[e]);
    }
    Ok(())
}
