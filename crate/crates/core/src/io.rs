//! Tree files: JSON in, JSON and DOT out.
//!
//! ```json
//! { "root": "o",
//!   "parents": { "a": "o", "b": "o" },
//!   "weights": { "a": 1 },
//!   "levels": { "a": "-1", "b": "-3/2" } }
//! ```
//!
//! Missing weights are 0; the root's level defaults to `0`. Levels are strings
//! holding exact rationals.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::level::{parse_level, LevelTree};
use crate::tree::WeightedTree;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeFile {
    pub root: String,
    #[serde(default)]
    pub parents: BTreeMap<String, String>,
    #[serde(default)]
    pub weights: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<BTreeMap<String, String>>,
}

impl TreeFile {
    pub fn parse(text: &str) -> Result<TreeFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn weighted(&self) -> Result<WeightedTree> {
        WeightedTree::from_maps(&self.root, &self.parents, &self.weights)
    }

    pub fn level_tree(&self) -> Result<LevelTree> {
        let raw = self
            .levels
            .as_ref()
            .ok_or_else(|| Error::Level("the file has no \"levels\"".into()))?;
        let mut levels = BTreeMap::new();
        for (v, s) in raw {
            levels.insert(v.clone(), parse_level(s)?);
        }
        LevelTree::from_maps(&self.root, &self.parents, &self.weights, &levels)
    }

    pub fn from_weighted(t: &WeightedTree) -> TreeFile {
        let tree = &t.tree;
        TreeFile {
            root: tree.name(tree.root()).to_string(),
            parents: tree.parent_map(),
            weights: tree.vertices().map(|v| (tree.name(v).to_string(), t.weight(v))).collect(),
            levels: None,
        }
    }

    pub fn from_level_tree(t: &LevelTree) -> TreeFile {
        let mut f = TreeFile::from_weighted(&t.base);
        f.levels = Some(t.tree().vertices().map(|v| (t.tree().name(v).to_string(), t.level(v).to_string())).collect());
        f
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree files serialize")
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("tree files serialize")
    }
}

pub fn read_level_tree(text: &str) -> Result<LevelTree> {
    TreeFile::parse(text)?.level_tree()
}

pub fn read_weighted_tree(text: &str) -> Result<WeightedTree> {
    TreeFile::parse(text)?.weighted()
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT drawing with one dotted horizontal rail per occupied level, labelled
/// on the left; vertices sit on their level's rank.
pub fn level_tree_dot(t: &LevelTree) -> String {
    let tree = t.tree();
    let levels: Vec<_> = t.occupied_levels().into_iter().rev().collect();
    let m = t.level_data().ok().map(|ld| ld.m);
    let mut out = String::new();
    writeln!(out, "digraph leveltree {{").unwrap();
    writeln!(out, "  rankdir=TB;").unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for (k, l) in levels.iter().enumerate() {
        let mark = if Some(*l) == m { " (m)" } else { "" };
        writeln!(out, "  subgraph level_{k} {{").unwrap();
        writeln!(out, "    rank=same;").unwrap();
        writeln!(out, "    rail_{k}_l [shape=plaintext, label={}];", quote(&format!("{l}{mark}"))).unwrap();
        writeln!(out, "    rail_{k}_r [shape=point, width=0.01];").unwrap();
        for v in t.vertices_at(*l) {
            let label = format!("{}\\nw={}", tree.name(v), t.weight(v));
            writeln!(out, "    {} [label=\"{label}\"];", quote(tree.name(v))).unwrap();
        }
        writeln!(out, "  }}").unwrap();
        writeln!(out, "  rail_{k}_l -> rail_{k}_r [style=dotted, arrowhead=none, constraint=false];").unwrap();
        if k > 0 {
            writeln!(out, "  rail_{}_l -> rail_{k}_l [style=invis];", k - 1).unwrap();
        }
    }
    for e in tree.edges() {
        writeln!(out, "  {} -> {} [arrowhead=none];", quote(tree.name(tree.upper(e))), quote(tree.name(e))).unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}

pub fn weighted_tree_dot(t: &WeightedTree) -> String {
    let tree = &t.tree;
    let mut out = String::new();
    writeln!(out, "digraph tree {{").unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for v in tree.vertices() {
        writeln!(out, "  {} [label=\"{}\\nw={}\"];", quote(tree.name(v)), tree.name(v), t.weight(v)).unwrap();
    }
    for e in tree.edges() {
        writeln!(out, "  {} -> {} [arrowhead=none];", quote(tree.name(tree.upper(e))), quote(tree.name(e))).unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fig1, fig2};

    #[test]
    fn json_round_trip() {
        for t in [fig1(), fig2()] {
            let text = TreeFile::from_level_tree(&t).to_json();
            assert_eq!(read_level_tree(&text).unwrap(), t);
        }
        let w = read_weighted_tree(r#"{"root": "o", "parents": {"a": "o"}, "weights": {"a": 2}}"#).unwrap();
        assert_eq!(w.total_weight(), 2);
    }

    #[test]
    fn rational_levels() {
        let t = read_level_tree(r#"{"root":"o","parents":{"a":"o","b":"a"},"weights":{"b":1},"levels":{"a":"-1/2","b":"-7/2"}}"#).unwrap();
        assert_eq!(t.level(t.tree().vertex("a").unwrap()).to_string(), "-1/2");
    }

    #[test]
    fn errors_name_the_problem() {
        let e = read_level_tree("{\"root\": \"o\",\n \"parents\": {\"a\": }}").unwrap_err();
        assert!(matches!(e, Error::Parse(ref s) if s.contains("line 2")), "{e}");
        let e = read_level_tree(r#"{"root":"o","parents":{"a":"o"},"weights":{"a":1},"levels":{"a":"1"}}"#).unwrap_err();
        assert!(matches!(e, Error::Level(_)), "{e}");
        let e = read_level_tree(r#"{"root":"o","parents":{"a":"o"},"colour":1}"#).unwrap_err();
        assert!(matches!(e, Error::Parse(_)), "{e}");
    }

    #[test]
    fn dot_has_a_rail_per_level() {
        let dot = level_tree_dot(&fig1());
        let rails = dot.lines().filter(|l| l.contains("style=dotted")).count();
        assert_eq!(rails, fig1().occupied_levels().len());
        assert!(dot.contains("(m)"));
    }
}
