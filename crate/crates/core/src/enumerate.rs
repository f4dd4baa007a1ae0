//! Exhaustive generation of small weighted trees and of one canonical level
//! tree per equivalence class.
//!
//! Trees are generated up to root-preserving isomorphism through a sorted
//! recursive encoding `(weight, sorted children)`. Vertices are then named in
//! preorder `a, b, c, …` with the root called `o`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::contraction::contract;
use crate::error::{Error, Result};
use crate::level::{canonical_form, equiv_key, lvl, EquivKey, Level, LevelTree};
use crate::tree::{RootedTree, Vertex, WeightedTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumSpec {
    pub max_edges: usize,
    pub max_weight: u32,
    /// Bound on the number of negative occupied levels of a representative.
    pub max_levels: usize,
    pub require_positive_weight: bool,
}

impl Default for EnumSpec {
    fn default() -> Self {
        EnumSpec { max_edges: 5, max_weight: 2, max_levels: 5, require_positive_weight: true }
    }
}

impl EnumSpec {
    pub fn new(max_edges: usize, max_weight: u32) -> EnumSpec {
        EnumSpec { max_edges, max_weight, max_levels: max_edges.max(1), ..EnumSpec::default() }
    }
}

/// Canonical encoding of a weighted rooted tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shape {
    pub weight: u32,
    pub children: Vec<Shape>,
}

impl Shape {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Shape::size).sum::<usize>()
    }

    fn has_positive(&self) -> bool {
        self.weight > 0 || self.children.iter().any(Shape::has_positive)
    }

    /// Canonical shape of a weighted tree.
    pub fn of(t: &WeightedTree) -> Shape {
        fn go(t: &WeightedTree, v: Vertex) -> Shape {
            let mut children: Vec<Shape> = t.tree.children(v).iter().map(|c| go(t, *c)).collect();
            children.sort();
            Shape { weight: t.weight(v), children }
        }
        go(t, t.tree.root())
    }

    /// The tree with preorder names.
    pub fn to_tree(&self) -> WeightedTree {
        let mut names = vec![];
        let mut parents = vec![];
        let mut weights = vec![];
        fn go(s: &Shape, parent: Option<usize>, names: &mut Vec<String>, parents: &mut Vec<Option<usize>>, weights: &mut Vec<u32>) {
            let me = names.len();
            names.push(if parent.is_none() { "o".to_string() } else { vertex_name(me - 1) });
            parents.push(parent);
            weights.push(s.weight);
            for c in &s.children {
                go(c, Some(me), names, parents, weights);
            }
        }
        go(self, None, &mut names, &mut parents, &mut weights);
        // `from_parts` sorts by name, so carry weights along by name
        let by_name: BTreeMap<String, u32> = names.iter().cloned().zip(weights).collect();
        let tree = RootedTree::from_parts(names, parents).expect("generated trees are well formed");
        let w = tree.names().iter().map(|n| by_name[n]).collect();
        WeightedTree::new(tree, w).expect("one weight per vertex")
    }
}

fn vertex_name(k: usize) -> String {
    const LETTERS: &[u8] = b"abcdefghijklmnpqrstuvwxyz";
    if k < LETTERS.len() {
        (LETTERS[k] as char).to_string()
    } else {
        format!("v{k}")
    }
}

fn shapes_up_to(max_vertices: usize, max_weight: u32) -> Vec<Vec<Shape>> {
    let mut by_size: Vec<Vec<Shape>> = vec![vec![]; max_vertices + 1];
    for n in 1..=max_vertices {
        let smaller: Vec<Shape> = by_size[1..n].iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let mut forests = vec![];
        forests_of(&smaller, n - 1, 0, &mut vec![], &mut forests);
        let mut out = BTreeSet::new();
        for w in 0..=max_weight {
            for f in &forests {
                let mut children = f.clone();
                children.sort();
                out.insert(Shape { weight: w, children });
            }
        }
        by_size[n] = out.into_iter().collect();
    }
    by_size
}

fn forests_of(pool: &[Shape], rem: usize, start: usize, cur: &mut Vec<Shape>, out: &mut Vec<Vec<Shape>>) {
    if rem == 0 {
        out.push(cur.clone());
        return;
    }
    for idx in start..pool.len() {
        let s = pool[idx].size();
        if s <= rem {
            cur.push(pool[idx].clone());
            forests_of(pool, rem - s, idx, cur, out);
            cur.pop();
        }
    }
}

/// All weighted rooted trees within the bounds, smallest first.
pub fn gen_weighted_trees(spec: &EnumSpec) -> Vec<WeightedTree> {
    shapes_up_to(spec.max_edges + 1, spec.max_weight)
        .into_iter()
        .flatten()
        .filter(|s| !spec.require_positive_weight || s.has_positive())
        .map(|s| s.to_tree())
        .collect()
}

/// One canonical representative per equivalence class of level maps on
/// `base`.
pub fn gen_level_trees(base: &WeightedTree, spec: &EnumSpec) -> Result<Vec<LevelTree>> {
    let tree = &base.tree;
    let n = tree.len();
    let root = tree.root();
    if !(0..n).any(|v| base.weight(v) > 0) {
        return Ok(vec![]);
    }
    let mut out = vec![];
    let mut emit = |ranks: &[Option<usize>]| -> Result<()> {
        let t = leveled(base, ranks)?;
        let c = canonical_form(&t)?;
        if c.occupied_levels().len() - 1 <= spec.max_levels {
            out.push(c);
        }
        Ok(())
    };
    if base.weight(root) > 0 {
        let mut ranks = vec![None; n];
        ranks[root] = Some(0);
        emit(&ranks)?;
        return Ok(out);
    }
    for mask in 0u64..1 << n {
        let in_a = |v: Vertex| mask >> v & 1 == 1;
        if !in_a(root) || mask.count_ones() < 2 {
            continue;
        }
        if (0..n).any(|v| in_a(v) && tree.parent(v).is_some_and(|p| !in_a(p))) {
            continue;
        }
        let mut ranks = vec![None; n];
        ranks[root] = Some(0);
        blocks(base, mask, 1, &mut ranks, &mut emit)?;
    }
    Ok(out)
}

/// Assigns ranks `k, k+1, …` to the unplaced vertices of `mask`, choosing each
/// block among the vertices whose parent is already placed.
fn blocks(base: &WeightedTree, mask: u64, k: usize, ranks: &mut Vec<Option<usize>>, emit: &mut dyn FnMut(&[Option<usize>]) -> Result<()>) -> Result<()> {
    let tree = &base.tree;
    let n = tree.len();
    let unplaced: Vec<Vertex> = (0..n).filter(|v| mask >> v & 1 == 1 && ranks[*v].is_none()).collect();
    let avail: Vec<Vertex> = unplaced
        .iter()
        .copied()
        .filter(|v| tree.parent(*v).is_some_and(|p| ranks[p].is_some_and(|r| r < k)))
        .collect();
    if avail.len() == unplaced.len() {
        // last block: all remaining vertices, which must hold some weight
        if unplaced.iter().any(|v| base.weight(*v) > 0) {
            for v in &unplaced {
                ranks[*v] = Some(k);
            }
            emit(ranks)?;
            for v in &unplaced {
                ranks[*v] = None;
            }
        }
    }
    // a non-final block is a proper non-empty subset of weight-zero vertices
    for sub in 1u64..1 << avail.len() {
        let chosen: Vec<Vertex> = (0..avail.len()).filter(|b| sub >> b & 1 == 1).map(|b| avail[b]).collect();
        if chosen.len() == unplaced.len() || chosen.iter().any(|v| base.weight(*v) > 0) {
            continue;
        }
        for v in &chosen {
            ranks[*v] = Some(k);
        }
        blocks(base, mask, k + 1, ranks, emit)?;
        for v in &chosen {
            ranks[*v] = None;
        }
    }
    Ok(())
}

/// A level map with the given ranks at or above `m` and every other vertex
/// pushed below.
fn leveled(base: &WeightedTree, ranks: &[Option<usize>]) -> Result<LevelTree> {
    let tree = &base.tree;
    let bottom = ranks.iter().flatten().max().copied().unwrap_or(0) as i64;
    let mut level = vec![Level::from_integer(0); tree.len()];
    let mut order: Vec<Vertex> = tree.vertices().collect();
    order.sort_by_key(|v| tree.depth(*v));
    for v in order {
        level[v] = match ranks[v] {
            Some(r) => lvl(-(r as i64)),
            None => {
                let p = tree.parent(v).ok_or_else(|| Error::Domain("root must be ranked".into()))?;
                level[p].min(lvl(-bottom)) - lvl(1)
            }
        };
    }
    LevelTree::new(base.clone(), level)
}

/// Every class over every weighted tree within the bounds.
pub fn gen_instances(spec: &EnumSpec) -> Result<Vec<LevelTree>> {
    let mut out = vec![];
    for base in gen_weighted_trees(spec) {
        out.extend(gen_level_trees(&base, spec)?);
    }
    Ok(out)
}

/// Brute-force oracle: classes met by every integer level map with levels in
/// `[-depth, 0]`, `depth` = number of non-root vertices.
pub fn brute_force_classes(base: &WeightedTree) -> Result<BTreeSet<EquivKey>> {
    let tree = &base.tree;
    let n = tree.len();
    let others: Vec<Vertex> = tree.vertices().filter(|v| *v != tree.root()).collect();
    let k = others.len() as u64;
    let mut out = BTreeSet::new();
    if !(0..n).any(|v| base.weight(v) > 0) {
        return Ok(out);
    }
    let total = (k.max(1)).pow(k as u32);
    for code in 0..total {
        let mut level = vec![Level::from_integer(0); n];
        let mut c = code;
        for v in &others {
            level[*v] = lvl(-((c % k) as i64) - 1);
            c /= k;
        }
        if let Ok(t) = LevelTree::new(base.clone(), level) {
            out.insert(equiv_key(&t)?);
        }
    }
    Ok(out)
}

/// Classes reachable by contraction, with an arrow `[t] → [t₍I₎]` for every
/// non-empty `I`.
#[derive(Clone, Debug, Default)]
pub struct StrataPoset {
    pub nodes: Vec<LevelTree>,
    pub arrows: BTreeSet<(usize, usize)>,
}

impl StrataPoset {
    /// Local poset of `t`, closed under further contraction.
    pub fn of(t: &LevelTree) -> Result<StrataPoset> {
        StrataPoset::closure(vec![t.clone()])
    }

    /// Every class over `base` together with all of their contractions.
    pub fn over(base: &WeightedTree, spec: &EnumSpec) -> Result<StrataPoset> {
        StrataPoset::closure(gen_level_trees(base, spec)?)
    }

    fn closure(start: Vec<LevelTree>) -> Result<StrataPoset> {
        let mut index: BTreeMap<EquivKey, usize> = BTreeMap::new();
        let mut p = StrataPoset::default();
        let mut queue = VecDeque::new();
        for t in start {
            let c = canonical_form(&t)?;
            let key = equiv_key(&c)?;
            if let std::collections::btree_map::Entry::Vacant(e) = index.entry(key) {
                e.insert(p.nodes.len());
                queue.push_back(p.nodes.len());
                p.nodes.push(c);
            }
        }
        while let Some(a) = queue.pop_front() {
            let t = p.nodes[a].clone();
            let part = t.level_data()?.index_partition();
            for sub in part.subsets().filter(|s| !s.is_empty()) {
                let c = canonical_form(&contract(&t, &sub)?.tree)?;
                let key = equiv_key(&c)?;
                let b = match index.get(&key) {
                    Some(b) => *b,
                    None => {
                        let b = p.nodes.len();
                        index.insert(key, b);
                        p.nodes.push(c);
                        queue.push_back(b);
                        b
                    }
                };
                p.arrows.insert((a, b));
            }
        }
        Ok(p)
    }

    /// Whether the arrows are already closed under composition.
    pub fn is_transitive(&self) -> bool {
        self.arrows
            .iter()
            .all(|(a, b)| self.arrows.range((*b, 0)..(*b + 1, 0)).all(|(_, c)| self.arrows.contains(&(*a, *c))))
    }
}
