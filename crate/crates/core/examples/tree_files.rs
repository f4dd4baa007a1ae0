//! Reads and writes tree files: JSON with exact rational levels, and DOT.
//!
//! `cargo run --example tree_files -- fig1` prints the larger example tree as
//! JSON; `-- fig1 dot` draws it with one dotted rail per level.

use leveltree::fixtures::{fig1, fig2};
use leveltree::io::{level_tree_dot, read_level_tree, TreeFile};

fn main() -> leveltree::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let t = match args.first().map(String::as_str) {
        Some("fig1") => fig1(),
        _ => fig2(),
    };
    if args.get(1).map(String::as_str) == Some("dot") {
        print!("{}", level_tree_dot(&t));
        return Ok(());
    }
    let text = TreeFile::from_level_tree(&t).to_json();
    assert_eq!(read_level_tree(&text)?, t);
    println!("{text}");
    Ok(())
}
