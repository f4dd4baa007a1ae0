//! The contraction `t₍I₎` of a weighted level tree along `I ⊆ 𝕀`.
//!
//! Edges of `I₋` are contracted, edges of `Iₘ` are lifted to the lowest
//! surviving level, and the levels of `I₊` are collapsed upward.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::level::{canonical_form, is_equivalent, phi_bijection, Level, LevelData, LevelTree, IndexPartition, IndexSubset};
use crate::tree::{Edge, RootedTree, Vertex, WeightedTree};
use num_traits::Zero;

#[derive(Clone, Debug)]
pub struct ContractionResult {
    pub tree: LevelTree,
    /// `π₍I₎`, old vertex -> new vertex.
    pub projection: Vec<Vertex>,
    /// Contracted edges of the original tree.
    pub contracted: BTreeSet<Edge>,
}

impl ContractionResult {
    /// Index in the contracted tree of a surviving edge.
    pub fn surviving(&self, e: Edge) -> Option<Edge> {
        (!self.contracted.contains(&e)).then(|| self.projection[e])
    }
}

fn check_subset(part: &IndexPartition, i: &IndexSubset) -> Result<()> {
    if part.contains(i) {
        Ok(())
    } else {
        Err(Error::Domain("I is not a subset of 𝕀".into()))
    }
}

/// Edges removed in `t₍I₎`.
pub fn contracted_edges(t: &LevelTree, i: &IndexSubset) -> Result<BTreeSet<Edge>> {
    let ld = t.level_data()?;
    contracted_edges_with(t, &ld, i)
}

pub(crate) fn contracted_edges_with(t: &LevelTree, ld: &LevelData, i: &IndexSubset) -> Result<BTreeSet<Edge>> {
    let part = ld.index_partition();
    check_subset(&part, i)?;
    let mut out: BTreeSet<Edge> = i.minus.clone();
    for e in t.tree().edges() {
        let candidate = (ld.is_hat(e) && !part.m_edges.contains(&e)) || i.m_edges.contains(&e);
        if candidate && i.covers(&ld.edge_span(e)) {
            out.insert(e);
        }
    }
    Ok(out)
}

pub fn contract(t: &LevelTree, i: &IndexSubset) -> Result<ContractionResult> {
    let ld = t.level_data()?;
    contract_with(t, &ld, i)
}

pub(crate) fn contract_with(t: &LevelTree, ld: &LevelData, i: &IndexSubset) -> Result<ContractionResult> {
    let tree = t.tree();
    let part = ld.index_partition();
    let contracted = contracted_edges_with(t, ld, i)?;
    let remaining: Vec<Level> = part.plus.iter().copied().filter(|l| !i.plus.contains(l)).collect();

    // representative of each vertex: the top of its contracted cluster
    let mut order: Vec<Vertex> = tree.vertices().collect();
    order.sort_by_key(|v| tree.depth(*v));
    let mut rep: Vec<Vertex> = (0..tree.len()).collect();
    for &v in &order {
        if contracted.contains(&v) {
            rep[v] = rep[tree.upper(v)];
        }
    }
    let survivors: Vec<Vertex> = tree.vertices().filter(|v| rep[*v] == *v).collect();
    let mut new_index = vec![usize::MAX; tree.len()];
    for (k, v) in survivors.iter().enumerate() {
        new_index[*v] = k;
    }
    let projection: Vec<Vertex> = rep.iter().map(|r| new_index[*r]).collect();

    let names: Vec<String> = survivors.iter().map(|v| tree.name(*v).to_string()).collect();
    let parent: Vec<Option<Vertex>> = survivors
        .iter()
        .map(|v| tree.parent(*v).map(|p| projection[p]))
        .collect();
    let mut weight = vec![0u32; survivors.len()];
    let mut top = vec![Level::zero(); survivors.len()];
    let mut seen = vec![false; survivors.len()];
    for v in tree.vertices() {
        let k = projection[v];
        weight[k] += t.weight(v);
        if !seen[k] || t.level(v) > top[k] {
            top[k] = t.level(v);
            seen[k] = true;
        }
    }
    let mut level = vec![Level::zero(); survivors.len()];
    for (k, &v) in survivors.iter().enumerate() {
        if v == tree.root() {
            continue;
        }
        level[k] = if ld.is_hat(v) && !part.m_edges.contains(&v) {
            remaining
                .iter()
                .copied()
                .filter(|l| *l >= top[k])
                .min()
                .ok_or_else(|| Error::Domain(format!("no surviving level above `{}`", tree.name(v))))?
        } else if i.m_edges.contains(&v) {
            *remaining.iter().min().expect("an uncontracted edge of Iₘ spans a remaining level")
        } else {
            top[k]
        };
    }
    let new_tree = RootedTree::from_parts(names, parent)?;
    let base = WeightedTree::new(new_tree, weight)?;
    let tree_i = LevelTree::new(base, level)?;
    Ok(ContractionResult { tree: tree_i, projection, contracted })
}

/// The four identities relating `𝕀(t₍I₎)` to `𝕀(t)`, plus a completed form of
/// the last one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IndexIdentities {
    /// `m(t₍I₎) = min((𝕀₊∖I₊) ⊔ {0})`
    pub m: bool,
    /// `𝕀₊(t₍I₎) = 𝕀₊∖I₊`
    pub plus: bool,
    /// `𝕀ₘ(t₍I₎) = {e ∈ 𝕀ₘ∖Iₘ : ℓ(v_e⁺) > m(t₍I₎)}`
    pub m_edges: bool,
    /// `𝕀₋(t₍I₎) = 𝕀₋∖I₋`
    pub minus: bool,
    /// `𝕀₋(t₍I₎) = (𝕀₋∖I₋) ⊔ {e ∈ 𝕀ₘ∖Iₘ : ℓ(v_e⁺) ≤ m(t₍I₎)}`
    pub minus_completed: bool,
}

impl IndexIdentities {
    pub fn as_stated(&self) -> bool {
        self.m && self.plus && self.m_edges && self.minus
    }

    pub fn completed(&self) -> bool {
        self.m && self.plus && self.m_edges && self.minus_completed
    }
}

pub fn index_identities(t: &LevelTree, i: &IndexSubset) -> Result<IndexIdentities> {
    let ld = t.level_data()?;
    let part = ld.index_partition();
    let res = contract_with(t, &ld, i)?;
    let ld2 = res.tree.level_data()?;
    let part2 = ld2.index_partition();
    let remaining: Vec<Level> = part.plus.iter().copied().filter(|l| !i.plus.contains(l)).collect();
    let m2 = remaining.iter().copied().min().unwrap_or_else(Level::zero);
    let names2 = |es: &[Edge]| -> BTreeSet<String> { es.iter().map(|e| res.tree.tree().name(*e).to_string()).collect() };
    let names1 = |es: &mut dyn Iterator<Item = Edge>| -> BTreeSet<String> { es.map(|e| t.tree().name(e).to_string()).collect() };
    let m_expected = names1(&mut part.m_edges.iter().copied().filter(|e| !i.m_edges.contains(e) && ld.upper_level(*e) > m2));
    let minus_expected = names1(&mut part.minus.iter().copied().filter(|e| !i.minus.contains(e)));
    let lifted = names1(&mut part.m_edges.iter().copied().filter(|e| !i.m_edges.contains(e) && ld.upper_level(*e) <= m2));
    let minus_got = names2(&part2.minus);
    Ok(IndexIdentities {
        m: ld2.m == m2,
        plus: part2.plus == remaining,
        m_edges: names2(&part2.m_edges) == m_expected,
        minus: minus_got == minus_expected,
        minus_completed: minus_got == minus_expected.union(&lifted).cloned().collect(),
    })
}

/// True iff all four stated identities hold.
pub fn verify_index_identities(t: &LevelTree, i: &IndexSubset) -> Result<bool> {
    Ok(index_identities(t, i)?.as_stated())
}

/// `t₍I₎ ∼ t′₍φ(I)₎`.
pub fn verify_equivalence_compat(t: &LevelTree, t2: &LevelTree, i: &IndexSubset) -> Result<bool> {
    let j = phi_bijection(t, t2, i)?;
    let a = contract(t, i)?;
    let b = contract(t2, &j)?;
    Ok(is_equivalent(&a.tree, &b.tree))
}

/// Carries `I′ ⊆ 𝕀 ∖ I` over to a subset of `𝕀(t₍I₎)`, matching edges by id.
pub fn transport_subset(t: &LevelTree, res: &ContractionResult, j: &IndexSubset) -> Result<IndexSubset> {
    let part2 = res.tree.level_data()?.index_partition();
    let mut out = IndexSubset { plus: j.plus.clone(), ..Default::default() };
    for l in &j.plus {
        if !part2.plus.contains(l) {
            return Err(Error::Domain(format!("level {l} does not survive the contraction")));
        }
    }
    for e in j.m_edges.iter().chain(j.minus.iter()) {
        let e2 = res
            .surviving(*e)
            .ok_or_else(|| Error::Domain(format!("edge `{}` is contracted", t.tree().name(*e))))?;
        if part2.m_edges.contains(&e2) {
            out.m_edges.insert(e2);
        } else if part2.minus.contains(&e2) {
            out.minus.insert(e2);
        } else {
            return Err(Error::Domain(format!("edge `{}` is not indexed after contraction", t.tree().name(*e))));
        }
    }
    Ok(out)
}

/// `[t₍I₎₍I′₎] = [t₍I⊔I′₎]` for disjoint `I`, `I′`.
pub fn verify_nested(t: &LevelTree, i: &IndexSubset, j: &IndexSubset) -> Result<bool> {
    let first = contract(t, i)?;
    let j2 = transport_subset(t, &first, j)?;
    let twice = contract(&first.tree, &j2)?;
    let once = contract(t, &i.union(j))?;
    Ok(canonical_form(&twice.tree)? == canonical_form(&once.tree)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fig2;
    use crate::level::lvl;

    fn subset(t: &LevelTree, levels: &[i64]) -> IndexSubset {
        let part = t.level_data().unwrap().index_partition();
        let ls: Vec<Level> = levels.iter().map(|l| lvl(*l)).collect();
        part.subset_from(t.tree(), &ls, &[]).unwrap()
    }

    fn names(t: &LevelTree, es: &BTreeSet<Edge>) -> Vec<String> {
        es.iter().map(|e| t.tree().name(*e).to_string()).collect()
    }

    #[test]
    fn fig2_contracted_sets() {
        let t = fig2();
        assert_eq!(names(&t, &contracted_edges(&t, &subset(&t, &[-2])).unwrap()), vec!["c", "d"]);
        assert_eq!(names(&t, &contracted_edges(&t, &subset(&t, &[-1, -2])).unwrap()), vec!["a", "b", "c", "d"]);
        assert!(contracted_edges(&t, &subset(&t, &[])).unwrap().is_empty());
        assert_eq!(names(&t, &contracted_edges(&t, &subset(&t, &[-1])).unwrap()), vec!["b"]);
    }

    #[test]
    fn fig2_contractions() {
        let t = fig2();
        let r = contract(&t, &subset(&t, &[-2])).unwrap();
        let tt = &r.tree;
        assert_eq!(tt.tree().names(), &["a", "b", "o"]);
        assert_eq!(tt.level(tt.tree().vertex("a").unwrap()), lvl(-1));
        assert_eq!(tt.level(tt.tree().vertex("b").unwrap()), lvl(-1));
        assert_eq!(tt.weight(tt.tree().vertex("b").unwrap()), 2);

        let r = contract(&t, &subset(&t, &[-1])).unwrap();
        let tt = &r.tree;
        assert_eq!(tt.tree().names(), &["a", "c", "d", "o"]);
        for v in ["a", "c", "d"] {
            let x = tt.tree().vertex(v).unwrap();
            assert_eq!(tt.level(x), lvl(-2));
            assert_eq!(tt.tree().parent(x), Some(tt.tree().root()));
        }

        let r = contract(&t, &subset(&t, &[-1, -2])).unwrap();
        assert_eq!(r.tree.tree().len(), 1);
        assert_eq!(r.tree.weight(0), 3);

        let r = contract(&t, &subset(&t, &[])).unwrap();
        assert_eq!(r.tree, t);
    }

    #[test]
    fn fig2_identities() {
        let t = fig2();
        let part = t.level_data().unwrap().index_partition();
        for i in part.subsets() {
            assert!(verify_index_identities(&t, &i).unwrap());
        }
        let doubled = t.with_levels(t.levels().iter().map(|l| l * lvl(3)).collect()).unwrap();
        assert!(verify_equivalence_compat(&t, &doubled, &subset(&t, &[-1])).unwrap());
    }

    #[test]
    fn lifting_below_m() {
        // r weighted at -2 sets m; q hangs below m under p at -1
        let t = LevelTree::build("o", &[("p", "o", 0, -1), ("q", "p", 0, -3), ("r", "o", 1, -2)], 0).unwrap();
        let part = t.level_data().unwrap().index_partition();
        assert_eq!(part.m_edges, vec![t.tree().edge("q").unwrap()]);
        let mut i = subset(&t, &[-1]);
        i.m_edges.insert(t.tree().edge("q").unwrap());
        let r = contract(&t, &i).unwrap();
        let q = r.tree.tree().vertex("q").unwrap();
        assert_eq!(r.tree.level(q), lvl(-2));
    }

    #[test]
    fn full_subset_collapses_to_root() {
        let t = LevelTree::build("o", &[("p", "o", 0, -1), ("q", "p", 0, -3), ("r", "o", 1, -2)], 0).unwrap();
        let part = t.level_data().unwrap().index_partition();
        let res = contract(&t, &part.full()).unwrap();
        assert_eq!(res.tree.tree().len(), 1);
        assert_eq!(res.tree.weight(0), 1);
        assert_eq!(res.contracted.len(), 3);
    }
}
