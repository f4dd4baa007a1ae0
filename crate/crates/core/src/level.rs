//! Weighted level trees and their level data.
//!
//! Levels are exact rationals. `m` is the highest level carrying positive
//! weight, `Êdg` the edges whose upper vertex sits strictly above `m`, and the
//! index set `𝕀 = 𝕀₊ ⊔ 𝕀ₘ ⊔ 𝕀₋` splits into the occupied levels in `[m, 0)`,
//! the hat edges reaching below `m`, and the remaining edges.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::tree::{Edge, RootedTree, Vertex, WeightedTree};

pub type Level = Rational64;

pub fn lvl(n: i64) -> Level {
    Level::from_integer(n)
}

pub fn parse_level(s: &str) -> Result<Level> {
    s.trim().parse::<Level>().map_err(|e| Error::Parse(format!("level `{s}`: {e}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LevelTree {
    pub base: WeightedTree,
    level: Vec<Level>,
}

impl LevelTree {
    pub fn new(base: WeightedTree, level: Vec<Level>) -> Result<Self> {
        let t = &base.tree;
        if level.len() != t.len() {
            return Err(Error::Level("one level per vertex required".into()));
        }
        for v in t.vertices() {
            if level[v].is_positive() {
                return Err(Error::Level(format!("level of `{}` is positive", t.name(v))));
            }
            if level[v].is_zero() != (v == t.root()) {
                return Err(Error::Level(format!(
                    "only the root may sit at level 0 (vertex `{}`)",
                    t.name(v)
                )));
            }
            if let Some(p) = t.parent(v) {
                if level[p] <= level[v] {
                    return Err(Error::Level(format!(
                        "`{}` must sit strictly above its child `{}`",
                        t.name(p),
                        t.name(v)
                    )));
                }
            }
        }
        Ok(LevelTree { base, level })
    }

    pub fn from_maps(
        root: &str,
        parents: &BTreeMap<String, String>,
        weights: &BTreeMap<String, u32>,
        levels: &BTreeMap<String, Level>,
    ) -> Result<Self> {
        let base = WeightedTree::from_maps(root, parents, weights)?;
        for k in levels.keys() {
            base.tree.vertex(k)?;
        }
        let mut level = Vec::with_capacity(base.tree.len());
        for n in base.tree.names() {
            match levels.get(n) {
                Some(l) => level.push(*l),
                None if n == root => level.push(Level::zero()),
                None => return Err(Error::Level(format!("no level for `{n}`"))),
            }
        }
        Self::new(base, level)
    }

    /// Shorthand used by tests and examples: `(child, parent, weight, level)`.
    pub fn build(root: &str, rows: &[(&str, &str, u32, i64)], root_weight: u32) -> Result<Self> {
        let parents = rows.iter().map(|r| (r.0.to_string(), r.1.to_string())).collect();
        let mut weights: BTreeMap<String, u32> = rows.iter().map(|r| (r.0.to_string(), r.2)).collect();
        weights.insert(root.to_string(), root_weight);
        let levels = rows.iter().map(|r| (r.0.to_string(), lvl(r.3))).collect();
        Self::from_maps(root, &parents, &weights, &levels)
    }

    pub fn tree(&self) -> &RootedTree {
        &self.base.tree
    }

    pub fn level(&self, v: Vertex) -> Level {
        self.level[v]
    }

    pub fn levels(&self) -> &[Level] {
        &self.level
    }

    pub fn weight(&self, v: Vertex) -> u32 {
        self.base.weight(v)
    }

    /// `ℓ(Ver)`, ascending.
    pub fn occupied_levels(&self) -> Vec<Level> {
        let s: BTreeSet<Level> = self.level.iter().copied().collect();
        s.into_iter().collect()
    }

    pub fn level_data(&self) -> Result<LevelData> {
        LevelData::new(self)
    }

    pub fn with_levels(&self, level: Vec<Level>) -> Result<Self> {
        Self::new(self.base.clone(), level)
    }

    /// Vertices at level `i`, in id order.
    pub fn vertices_at(&self, i: Level) -> Vec<Vertex> {
        self.tree().vertices().filter(|v| self.level[*v] == i).collect()
    }
}

/// Derived level data of a weighted level tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelData {
    pub m: Level,
    /// Occupied levels, ascending.
    pub occupied: Vec<Level>,
    hat: Vec<bool>,
    edge_level: Vec<Option<Level>>,
    upper_level: Vec<Option<Level>>,
    lower_level: Vec<Level>,
}

impl LevelData {
    pub fn new(t: &LevelTree) -> Result<Self> {
        let tree = t.tree();
        let m = tree
            .vertices()
            .filter(|v| t.weight(*v) > 0)
            .map(|v| t.level(v))
            .max()
            .ok_or(Error::NoPositiveWeight)?;
        let occupied = t.occupied_levels();
        let mut hat = vec![false; tree.len()];
        let mut edge_level = vec![None; tree.len()];
        let mut upper_level = vec![None; tree.len()];
        for e in tree.edges() {
            let up = t.level(tree.upper(e));
            upper_level[e] = Some(up);
            if up > m {
                hat[e] = true;
                edge_level[e] = Some(t.level(e).max(m));
            }
        }
        Ok(LevelData { m, occupied, hat, edge_level, upper_level, lower_level: t.levels().to_vec() })
    }

    pub fn is_hat(&self, e: Edge) -> bool {
        self.hat[e]
    }

    /// `Êdg`, in id order.
    pub fn hat_edges(&self) -> Vec<Edge> {
        (0..self.hat.len()).filter(|e| self.hat[*e]).collect()
    }

    /// `ℓ(e) = max(ℓ(v_e⁻), m)` for hat edges.
    pub fn edge_level(&self, e: Edge) -> Option<Level> {
        self.edge_level[e]
    }

    /// `ℓ(e)` of a hat edge; panics otherwise.
    pub fn el(&self, e: Edge) -> Level {
        self.edge_level[e].expect("hat edge")
    }

    /// `ℓ(v_e⁺)`.
    pub fn upper_level(&self, e: Edge) -> Level {
        self.upper_level[e].expect("edge")
    }

    pub fn lower_level(&self, v: Vertex) -> Level {
        self.lower_level[v]
    }

    pub fn is_occupied(&self, i: Level) -> bool {
        self.occupied.binary_search(&i).is_ok()
    }

    /// `⦅a, b) = ℓ(Ver) ∩ [a, b)`, ascending.
    pub fn span(&self, a: Level, b: Level) -> Vec<Level> {
        self.occupied.iter().copied().filter(|l| *l >= a && *l < b).collect()
    }

    /// `(a, b) ∩ ℓ(Ver)`, ascending.
    pub fn open_span(&self, a: Level, b: Level) -> Vec<Level> {
        self.occupied.iter().copied().filter(|l| *l > a && *l < b).collect()
    }

    /// `⦅ℓ(e), ℓ(v_e⁺))` for a hat edge.
    pub fn edge_span(&self, e: Edge) -> Vec<Level> {
        self.span(self.el(e), self.upper_level(e))
    }

    /// `i♯`, the next occupied level above `i`.
    pub fn sharp(&self, i: Level) -> Result<Level> {
        let pos = self
            .occupied
            .binary_search(&i)
            .map_err(|_| Error::Domain(format!("level {i} is not occupied")))?;
        self.occupied
            .get(pos + 1)
            .copied()
            .ok_or_else(|| Error::Domain(format!("level {i} has no successor")))
    }

    /// `𝕀₊`, from the top level down.
    pub fn i_plus(&self) -> Vec<Level> {
        let mut v: Vec<Level> = self.occupied.iter().copied().filter(|l| *l >= self.m && l.is_negative()).collect();
        v.reverse();
        v
    }

    /// `𝔈ᵢ = {e ∈ Êdg : ℓ(e) ≤ i < ℓ(v_e⁺)}`.
    pub fn cross_section(&self, i: Level) -> Result<Vec<Edge>> {
        if i < self.m || !i.is_negative() || !self.is_occupied(i) {
            return Err(Error::Domain(format!("level {i} is not in 𝕀₊")));
        }
        Ok(self
            .hat_edges()
            .into_iter()
            .filter(|e| self.el(*e) <= i && i < self.upper_level(*e))
            .collect())
    }

    pub fn index_partition(&self) -> IndexPartition {
        let mut m_edges = vec![];
        let mut minus = vec![];
        for e in 0..self.hat.len() {
            let Some(_) = self.upper_level[e] else { continue };
            if self.hat[e] {
                if self.lower_level[e] < self.m {
                    m_edges.push(e);
                }
            } else {
                minus.push(e);
            }
        }
        IndexPartition { plus: self.i_plus(), m_edges, minus }
    }
}

/// `𝕀 = 𝕀₊ ⊔ 𝕀ₘ ⊔ 𝕀₋`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexPartition {
    /// Levels, from the top down.
    pub plus: Vec<Level>,
    pub m_edges: Vec<Edge>,
    pub minus: Vec<Edge>,
}

impl IndexPartition {
    pub fn len(&self) -> usize {
        self.plus.len() + self.m_edges.len() + self.minus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn full(&self) -> IndexSubset {
        IndexSubset {
            plus: self.plus.iter().copied().collect(),
            m_edges: self.m_edges.iter().copied().collect(),
            minus: self.minus.iter().copied().collect(),
        }
    }

    /// Subset selected by the bits of `mask`, in the order plus, m_edges, minus.
    pub fn subset(&self, mask: u64) -> IndexSubset {
        let mut s = IndexSubset::default();
        let mut bit = 0;
        for l in &self.plus {
            if mask >> bit & 1 == 1 {
                s.plus.insert(*l);
            }
            bit += 1;
        }
        for e in &self.m_edges {
            if mask >> bit & 1 == 1 {
                s.m_edges.insert(*e);
            }
            bit += 1;
        }
        for e in &self.minus {
            if mask >> bit & 1 == 1 {
                s.minus.insert(*e);
            }
            bit += 1;
        }
        s
    }

    /// Every subset of `𝕀`, ordered by bitmask.
    pub fn subsets(&self) -> impl Iterator<Item = IndexSubset> + '_ {
        assert!(self.len() < 63, "index set too large to enumerate");
        (0..1u64 << self.len()).map(move |mask| self.subset(mask))
    }

    pub fn contains(&self, s: &IndexSubset) -> bool {
        s.plus.iter().all(|l| self.plus.contains(l))
            && s.m_edges.iter().all(|e| self.m_edges.contains(e))
            && s.minus.iter().all(|e| self.minus.contains(e))
    }

    /// Sorts named levels and edges into a subset of this partition.
    pub fn subset_from(&self, tree: &RootedTree, levels: &[Level], edges: &[&str]) -> Result<IndexSubset> {
        let mut s = IndexSubset::default();
        for l in levels {
            if !self.plus.contains(l) {
                return Err(Error::Domain(format!("level {l} is not in 𝕀₊")));
            }
            s.plus.insert(*l);
        }
        for name in edges {
            let e = tree.edge(name)?;
            if self.m_edges.contains(&e) {
                s.m_edges.insert(e);
            } else if self.minus.contains(&e) {
                s.minus.insert(e);
            } else {
                return Err(Error::Domain(format!("edge `{name}` is not in 𝕀ₘ ⊔ 𝕀₋")));
            }
        }
        Ok(s)
    }
}

/// A subset `I ⊆ 𝕀` with its three parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSubset {
    pub plus: BTreeSet<Level>,
    pub m_edges: BTreeSet<Edge>,
    pub minus: BTreeSet<Edge>,
}

impl IndexSubset {
    pub fn is_empty(&self) -> bool {
        self.plus.is_empty() && self.m_edges.is_empty() && self.minus.is_empty()
    }

    pub fn len(&self) -> usize {
        self.plus.len() + self.m_edges.len() + self.minus.len()
    }

    pub fn union(&self, other: &IndexSubset) -> IndexSubset {
        IndexSubset {
            plus: self.plus.union(&other.plus).copied().collect(),
            m_edges: self.m_edges.union(&other.m_edges).copied().collect(),
            minus: self.minus.union(&other.minus).copied().collect(),
        }
    }

    pub fn is_disjoint(&self, other: &IndexSubset) -> bool {
        self.plus.is_disjoint(&other.plus)
            && self.m_edges.is_disjoint(&other.m_edges)
            && self.minus.is_disjoint(&other.minus)
    }

    /// `⦅…⦆ ⊆ I₊` for a list of levels.
    pub fn covers(&self, levels: &[Level]) -> bool {
        levels.iter().all(|l| self.plus.contains(l))
    }

    pub fn display(&self, tree: &RootedTree) -> String {
        let mut parts: Vec<String> = self.plus.iter().rev().map(|l| l.to_string()).collect();
        parts.extend(self.m_edges.iter().map(|e| format!("m:{}", tree.name(*e))));
        parts.extend(self.minus.iter().map(|e| format!("-:{}", tree.name(*e))));
        format!("{{{}}}", parts.join(","))
    }
}

/// Special vertices `𝗏ᵢ`, one per level of `𝕀₊`.
pub type Special = BTreeMap<Level, Vertex>;

/// The lexicographically smallest vertex at each level of `𝕀₊`.
pub fn default_special(t: &LevelTree, ld: &LevelData) -> Special {
    ld.i_plus()
        .into_iter()
        .map(|i| (i, t.vertices_at(i)[0]))
        .collect()
}

/// Every admissible choice of special vertices.
pub fn all_specials(t: &LevelTree, ld: &LevelData) -> Vec<Special> {
    let mut out = vec![Special::new()];
    for i in ld.i_plus() {
        let cands = t.vertices_at(i);
        let mut next = vec![];
        for s in &out {
            for v in &cands {
                let mut s2 = s.clone();
                s2.insert(i, *v);
                next.push(s2);
            }
        }
        out = next;
    }
    out
}

pub fn check_special(t: &LevelTree, ld: &LevelData, special: &Special) -> Result<()> {
    let plus = ld.i_plus();
    if special.len() != plus.len() || plus.iter().any(|i| !special.contains_key(i)) {
        return Err(Error::Domain("special vertices must be given for exactly the levels of 𝕀₊".into()));
    }
    for (i, v) in special {
        if t.level(*v) != *i {
            return Err(Error::Domain(format!(
                "special vertex `{}` is at level {}, not {i}",
                t.tree().name(*v),
                t.level(*v)
            )));
        }
    }
    Ok(())
}

/// `i[0] = i < i[1] = ℓ(𝗏ᵢ⁺) < … < 0`.
pub fn ascent_sequence(t: &LevelTree, special: &Special, i: Level) -> Result<Vec<Level>> {
    let mut out = vec![i];
    let mut cur = i;
    while !cur.is_zero() {
        let v = *special
            .get(&cur)
            .ok_or_else(|| Error::Domain(format!("no special vertex at level {cur}")))?;
        if t.level(v) != cur {
            return Err(Error::Domain(format!("special vertex at level {cur} has level {}", t.level(v))));
        }
        let p = t.tree().parent(v).ok_or_else(|| Error::Domain("special vertex is the root".into()))?;
        cur = t.level(p);
        out.push(cur);
    }
    Ok(out)
}

/// Key deciding equivalence: the weighted tree plus the dense rank (from the
/// root) of every vertex at or above `m`; vertices below `m` carry `None`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EquivKey {
    pub names: Vec<String>,
    pub parents: Vec<Option<Vertex>>,
    pub weights: Vec<u32>,
    pub ranks: Vec<Option<usize>>,
}

pub fn equiv_key(t: &LevelTree) -> Result<EquivKey> {
    let ld = t.level_data()?;
    let above: Vec<Level> = ld.occupied.iter().rev().copied().filter(|l| *l >= ld.m).collect();
    let ranks = t
        .levels()
        .iter()
        .map(|l| above.iter().position(|a| a == l))
        .collect();
    Ok(EquivKey {
        names: t.tree().names().to_vec(),
        parents: t.tree().parents().to_vec(),
        weights: t.base.weights().to_vec(),
        ranks,
    })
}

/// Conditions E1–E3, read literally.
pub fn is_equivalent(t: &LevelTree, t2: &LevelTree) -> bool {
    if t.base != t2.base {
        return false;
    }
    let Ok(ld) = t.level_data() else { return false };
    let n = t.tree().len();
    for v in 0..n {
        if t.level(v) < ld.m {
            continue;
        }
        for w in 0..n {
            if t.level(v) == t.level(w) && t2.level(v) != t2.level(w) {
                return false;
            }
            if t.level(v) > t.level(w) && t2.level(v) <= t2.level(w) {
                return false;
            }
        }
    }
    true
}

/// Representative with levels `0, −1, −2, …` at or above `m` and each vertex
/// below `m` placed one level under its parent's or under `m`, whichever is
/// lower, so strictness is kept along chains below `m`.
pub fn canonical_form(t: &LevelTree) -> Result<LevelTree> {
    let key = equiv_key(t)?;
    let tree = t.tree();
    let bottom = key.ranks.iter().flatten().max().copied().unwrap_or(0) as i64;
    let mut level = vec![Level::zero(); tree.len()];
    let mut order: Vec<Vertex> = tree.vertices().collect();
    order.sort_by_key(|v| tree.depth(*v));
    for v in order {
        level[v] = match key.ranks[v] {
            Some(r) => lvl(-(r as i64)),
            None => {
                let p = tree.parent(v).expect("below m is never the root");
                level[p].min(lvl(-bottom)) - lvl(1)
            }
        };
    }
    t.with_levels(level)
}

/// `φ(I) = ℓ′(ℓ⁻¹(I₊)) ⊔ Iₘ ⊔ I₋`.
pub fn phi_bijection(t: &LevelTree, t2: &LevelTree, i: &IndexSubset) -> Result<IndexSubset> {
    if !is_equivalent(t, t2) {
        return Err(Error::Domain("φ needs equivalent level trees".into()));
    }
    let part = t.level_data()?.index_partition();
    if !part.contains(i) {
        return Err(Error::Domain("I is not a subset of 𝕀".into()));
    }
    let mut out = i.clone();
    out.plus = i
        .plus
        .iter()
        .map(|l| t2.level(t.vertices_at(*l)[0]))
        .collect();
    Ok(out)
}

impl fmt::Display for LevelTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.tree();
        let rows: Vec<String> = t
            .vertices()
            .map(|v| {
                let p = t.parent(v).map(|p| t.name(p)).unwrap_or("-");
                format!("{}<{}:w{}@{}", t.name(v), p, self.weight(v), self.level(v))
            })
            .collect();
        write!(f, "[{}]", rows.join(" "))
    }
}
