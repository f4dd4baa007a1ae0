//! The two trees drawn in the worked examples, transcribed by hand.
//!
//! `fig2` is the four-edge tree with a weighted leaf `a` at level −2 under the
//! root and a weight-zero vertex `b` at −1 carrying weighted leaves `c`, `d`.
//!
//! `fig1` is the larger illustration with `m = −3`. Drawing coordinates step by
//! 0.8 per level; the two rows drawn below the `m` rail (y = −2.8, −3.2) are
//! read as levels −7/2 and −4. The filled dot at (1.8, −2.4) sits on the
//! segment from `v2` to (1.8, −2.8) and is taken to be a vertex of that path.

use crate::level::{lvl, Level, LevelTree, Special};

pub fn fig2() -> LevelTree {
    LevelTree::build(
        "o",
        &[("a", "o", 1, -2), ("b", "o", 0, -1), ("c", "b", 1, -2), ("d", "b", 1, -2)],
        0,
    )
    .expect("fig2 is a valid level tree")
}

/// Special edges `𝖾₋₁ = b`, `𝖾₋₂ = a`.
pub fn fig2_special(t: &LevelTree) -> Special {
    let v = |s: &str| t.tree().vertex(s).unwrap();
    [(lvl(-1), v("b")), (lvl(-2), v("a"))].into_iter().collect()
}

pub fn fig1() -> LevelTree {
    use std::collections::BTreeMap;
    let rows: &[(&str, &str, u32, Level)] = &[
        ("v1", "o", 0, lvl(-1)),
        ("v2", "o", 0, lvl(-2)),
        ("x", "v2", 1, lvl(-3)),
        ("y", "v2", 1, lvl(-3)),
        ("y1", "y", 1, Level::new(-7, 2)),
        ("z", "v2", 1, Level::new(-7, 2)),
        ("v3p", "v1", 0, lvl(-2)),
        ("p", "v3p", 1, lvl(-3)),
        ("v3", "v3p", 1, lvl(-3)),
        ("w", "v1", 0, Level::new(-7, 2)),
        ("w1", "w", 1, lvl(-4)),
        ("w2", "w", 1, lvl(-4)),
    ];
    let parents: BTreeMap<String, String> = rows.iter().map(|r| (r.0.to_string(), r.1.to_string())).collect();
    let weights: BTreeMap<String, u32> = rows.iter().map(|r| (r.0.to_string(), r.2)).collect();
    let levels: BTreeMap<String, Level> = rows.iter().map(|r| (r.0.to_string(), r.3)).collect();
    LevelTree::from_maps("o", &parents, &weights, &levels).expect("fig1 is a valid level tree")
}

/// The marked vertices `𝗏₋₁ = v1`, `𝗏₋₂ = v2`, `𝗏₋₃ = v3`.
pub fn fig1_special(t: &LevelTree) -> Special {
    let v = |s: &str| t.tree().vertex(s).unwrap();
    [(lvl(-1), v("v1")), (lvl(-2), v("v2")), (lvl(-3), v("v3"))].into_iter().collect()
}
