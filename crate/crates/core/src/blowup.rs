//! Blowup bookkeeping: traverse sections, the loci `Y_k` and `Z_k` on a chart,
//! the reconstruction `ψ₂` of a level tree from blowup data, and the formal
//! line-bundle identities behind it.
//!
//! Loci cut out by monomials are handled through their radical: a monomial
//! ideal is kept as the minimal family of supports of its generators after
//! units are dropped.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::Serialize;

use crate::chart::{ChartFrame, TwistedChart};
use crate::error::{Error, Result};
use crate::level::{Level, LevelData, LevelTree};
use crate::monomial::{compose, Kind, Mark, Monomial, MonomialMap, Symbol};
use crate::tree::{Edge, Order, RootedTree, Vertex, WeightedTree};
use crate::verdict::Verdict;

pub type TraverseSection = BTreeSet<Edge>;

/// Edge sets meeting every root-to-minimal-vertex path exactly once. The
/// single-vertex tree has none.
pub fn traverse_sections(tree: &RootedTree) -> Vec<TraverseSection> {
    fn below(tree: &RootedTree, v: Vertex) -> Vec<TraverseSection> {
        let mut acc = vec![TraverseSection::new()];
        for &c in tree.children(v) {
            let mut options = vec![TraverseSection::from([c])];
            options.extend(below(tree, c));
            let mut next = vec![];
            for a in &acc {
                for o in &options {
                    next.push(a.union(o).copied().collect());
                }
            }
            acc = next;
        }
        if tree.children(v).is_empty() {
            vec![]
        } else {
            acc
        }
    }
    let mut out = below(tree, tree.root());
    out.sort();
    out
}

pub fn is_traverse_section(tree: &RootedTree, s: &TraverseSection) -> bool {
    tree.len() > 1
        && tree.minimal_vertices().into_iter().all(|v| {
            let path = tree.path_to_root(v);
            path.iter().filter(|w| **w != tree.root() && s.contains(w)).count() == 1
        })
}

/// `s1 ≻ s2` iff they differ and every edge of `s1` lies weakly above some
/// edge of `s2`.
pub fn section_compare(tree: &RootedTree, s1: &TraverseSection, s2: &TraverseSection) -> Order {
    if s1 == s2 {
        return Order::Equal;
    }
    let above = |a: &TraverseSection, b: &TraverseSection| {
        a.iter().all(|e| b.iter().any(|f| tree.compare_edges(*e, *f).is_geq()))
    };
    match (above(s1, s2), above(s2, s1)) {
        (true, _) => Order::Greater,
        (_, true) => Order::Less,
        _ => Order::Incomparable,
    }
}

/// `γ̄`: every edge whose upper vertex has a positively weighted vertex weakly
/// above it is contracted.
#[derive(Clone, Debug)]
pub struct GammaBar {
    pub tree: WeightedTree,
    /// Edge of `γ̄` -> edge of `γ`.
    pub origin: Vec<Edge>,
}

impl GammaBar {
    pub fn new(t: &WeightedTree) -> Result<GammaBar> {
        let tree = &t.tree;
        let clean: Vec<bool> = tree
            .vertices()
            .map(|v| tree.path_to_root(v).iter().all(|w| t.weight(*w) == 0))
            .collect();
        let kept = |v: Vertex| v == tree.root() || clean[tree.upper(v)];
        let keep: Vec<Vertex> = tree.vertices().filter(|v| kept(*v)).collect();
        let index: BTreeMap<Vertex, usize> = keep.iter().enumerate().map(|(k, v)| (*v, k)).collect();
        let mut weight = vec![0u32; keep.len()];
        for v in tree.vertices() {
            let top = tree.path_to_root(v).into_iter().find(|w| kept(*w)).expect("the root is kept");
            weight[index[&top]] += t.weight(v);
        }
        let names = keep.iter().map(|v| tree.name(*v).to_string()).collect();
        let parents = keep.iter().map(|v| tree.parent(*v).map(|p| index[&p])).collect();
        let bar = RootedTree::from_parts(names, parents)?;
        // `from_parts` sorts by name, which the kept vertices already are
        let bar = WeightedTree::new(bar, weight)?;
        Ok(GammaBar { tree: bar, origin: keep })
    }

    /// `Ξ(γ̄)`, with edges named as in `γ`.
    pub fn sections(&self) -> Vec<TraverseSection> {
        let mut out: Vec<TraverseSection> = traverse_sections(&self.tree.tree)
            .into_iter()
            .map(|s| s.into_iter().map(|e| self.origin[e]).collect())
            .collect();
        out.sort();
        out
    }
}

/// `Ξ(γ̄) = ⊔ Ξ_k` with `Ξ_k` the sections of size `k`.
#[derive(Clone, Debug)]
pub struct BlowupSchedule {
    pub gamma_bar: GammaBar,
    pub sections: Vec<(usize, TraverseSection)>,
}

impl BlowupSchedule {
    pub fn new(t: &WeightedTree) -> Result<BlowupSchedule> {
        let gamma_bar = GammaBar::new(t)?;
        let mut sections: Vec<(usize, TraverseSection)> = gamma_bar.sections().into_iter().map(|s| (s.len(), s)).collect();
        sections.sort();
        Ok(BlowupSchedule { gamma_bar, sections })
    }

    /// Order compatibility: `𝔖′ ≻ 𝔖″` forces an earlier step for `𝔖′`.
    pub fn is_order_compatible(&self, tree: &RootedTree) -> bool {
        self.sections.iter().all(|(k1, s1)| {
            self.sections
                .iter()
                .all(|(k2, s2)| section_compare(tree, s1, s2) != Order::Greater || k1 < k2)
        })
    }
}

/// Whether every non-root weight-zero vertex has at least three nodes.
pub fn is_stable(t: &WeightedTree) -> bool {
    t.tree
        .vertices()
        .all(|v| v == t.tree.root() || t.weight(v) > 0 || t.tree.children(v).len() >= 2)
}

/// The components `Y_{k,𝔖}` of `Y_k` through the chart.
pub fn zk_components(t: &LevelTree, k: usize) -> Result<Vec<TraverseSection>> {
    let ld = t.level_data()?;
    let part = ld.index_partition();
    Ok(GammaBar::new(&t.base)?
        .sections()
        .into_iter()
        .filter(|s| s.len() <= k && s.iter().any(|e| ld.is_hat(*e) && !part.m_edges.contains(e)))
        .collect())
}

/// A locus cut out by monomials, kept as the minimal supports of the
/// generators of its radical. `{∅}` is the empty locus, `{}` the whole chart.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Locus(BTreeSet<BTreeSet<Symbol>>);

impl Locus {
    pub fn whole() -> Locus {
        Locus::default()
    }

    pub fn empty() -> Locus {
        Locus(BTreeSet::from([BTreeSet::new()]))
    }

    /// Common zeros of `gens`, ignoring the symbols in `units`.
    pub fn cut(gens: &[Monomial], units: &BTreeSet<Symbol>) -> Result<Locus> {
        let mut out = BTreeSet::new();
        for g in gens {
            if g.is_zero() {
                continue;
            }
            let mut supp = BTreeSet::new();
            for (s, k) in g.factors() {
                if units.contains(s) {
                    continue;
                }
                if *k < 0 {
                    return Err(Error::Domain(format!("{g} is not regular")));
                }
                supp.insert(s.clone());
            }
            out.insert(supp);
        }
        Ok(Locus(minimal(out)))
    }

    pub fn supports(&self) -> &BTreeSet<BTreeSet<Symbol>> {
        &self.0
    }

    pub fn union(&self, other: &Locus) -> Locus {
        let mut out = BTreeSet::new();
        for a in &self.0 {
            for b in &other.0 {
                out.insert(a.union(b).cloned().collect());
            }
        }
        Locus(minimal(out))
    }

    pub fn intersection(&self, other: &Locus) -> Locus {
        Locus(minimal(self.0.union(&other.0).cloned().collect()))
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &Locus) -> bool {
        other.0.iter().all(|g| self.0.iter().any(|h| h.is_subset(g)))
    }
}

impl std::fmt::Display for Locus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let gens: Vec<String> = self
            .0
            .iter()
            .map(|g| if g.is_empty() { "1".into() } else { g.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" * ") })
            .collect();
        write!(f, "V({})", gens.join(", "))
    }
}

fn minimal(sets: BTreeSet<BTreeSet<Symbol>>) -> BTreeSet<BTreeSet<Symbol>> {
    sets.iter()
        .filter(|a| !sets.iter().any(|b| b != *a && b.is_subset(a)))
        .cloned()
        .collect()
}

fn product(syms: impl IntoIterator<Item = Symbol>) -> Monomial {
    syms.into_iter().fold(Monomial::one(), |m, s| m.mul(&Monomial::var(s)))
}

/// `|𝔈ᵢ|` for every `i ∈ 𝕀₊`.
pub fn section_sizes(ld: &LevelData) -> Result<BTreeMap<Level, usize>> {
    ld.i_plus().into_iter().map(|i| Ok((i, ld.cross_section(i)?.len()))).collect()
}

/// Units of a twisted chart: `u_e` off `𝕀ₘ`, and the `w_j`.
fn chart_units(frame: &ChartFrame) -> BTreeSet<Symbol> {
    let part = frame.partition();
    let mut units: BTreeSet<Symbol> = frame
        .level_data()
        .hat_edges()
        .into_iter()
        .filter(|e| !frame.is_special(*e) && !part.m_edges.contains(e))
        .map(|e| frame.u_sym(e))
        .collect();
    units.extend(frame.tags().iter().map(|j| frame.w_sym(j)));
    units
}

/// Generators of `ϖ⁻¹(Y_{k,𝔖})` as displayed: `∏ε` over the span of a hat
/// edge, times `u_e` on `𝕀ₘ`, and `z_e` on `𝕀₋`.
fn section_pullback(frame: &ChartFrame, s: &TraverseSection) -> Vec<Monomial> {
    let ld = frame.level_data();
    s.iter()
        .map(|&e| {
            if !ld.is_hat(e) {
                return Monomial::var(frame.z_sym(e));
            }
            let eps = product(ld.edge_span(e).into_iter().map(|h| frame.eps_sym(h)));
            if frame.partition().m_edges.contains(&e) {
                eps.mul(&Monomial::var(frame.u_sym(e)))
            } else {
                eps
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct YkReport {
    pub k: usize,
    pub divisor: String,
    pub components: Vec<Vec<String>>,
    pub verdict: Verdict,
}

/// `ϖ⁻¹(Y_k)` on the chart: returns `∏_{|𝔈ᵢ|≤k} εᵢ` and checks that the
/// displayed generators agree with `θ` up to units, that every component has
/// a witness edge, that every component lies in the divisor, and that the
/// components together fill it.
pub fn yk_pullback(chart: &TwistedChart, k: usize) -> Result<(Monomial, Verdict)> {
    let frame = &chart.frame;
    let t = frame.tree();
    let ld = frame.level_data();
    let sizes = section_sizes(ld)?;
    let divisor = product(sizes.iter().filter(|(_, n)| **n <= k).map(|(i, _)| frame.eps_sym(*i)));
    let units = chart_units(frame);
    let target = Locus::cut(std::slice::from_ref(&divisor), &units)?;
    let mut v = Verdict::default();
    let mut total = Locus::empty();
    let name = |e: &Edge| t.tree().name(*e).to_string();
    for s in zk_components(t, k)? {
        let label = || format!("k={k}, 𝔖={{{}}}", s.iter().map(name).collect::<Vec<_>>().join(","));
        let gens = section_pullback(frame, &s);
        for (e, g) in s.iter().zip(&gens) {
            let from_theta = Locus::cut(&[chart.theta.assign[&frame.zeta_sym(*e)].clone()], &units)?;
            v.record(from_theta == Locus::cut(std::slice::from_ref(g), &units)?, || {
                format!("{}: θ*ζ_{} = {} is not {g} up to units", label(), name(e), chart.theta.assign[&frame.zeta_sym(*e)])
            });
        }
        let witness = s.iter().any(|e| {
            ld.is_hat(*e)
                && !frame.partition().m_edges.contains(e)
                && ld.edge_span(*e).iter().all(|h| sizes.get(h).is_some_and(|n| *n <= s.len()))
        });
        v.record(witness, || format!("{}: no witness edge", label()));
        let locus = Locus::cut(&gens, &units)?;
        v.record(locus.is_subset(&target), || format!("{}: {locus} is not inside {target}", label()));
        total = total.union(&locus);
    }
    v.record(total == target, || format!("k={k}: components give {total}, divisor gives {target}"));
    Ok((divisor, v))
}

/// `ϖ⁻¹(Y_{k,𝔈ᵢ}) = {εᵢ = 0}` for every `i` with `|𝔈ᵢ| ≤ k`. This fails once
/// every edge of `𝔈ᵢ` spanning `i` alone lies in `𝕀ₘ`; see the tests.
pub fn cross_section_pullback(chart: &TwistedChart, k: usize) -> Result<Verdict> {
    let frame = &chart.frame;
    let ld = frame.level_data();
    let units = chart_units(frame);
    let mut v = Verdict::default();
    for (i, n) in section_sizes(ld)? {
        if n <= k {
            let s: TraverseSection = ld.cross_section(i)?.into_iter().collect();
            let locus = Locus::cut(&section_pullback(frame, &s), &units)?;
            let want = Locus::cut(&[Monomial::var(frame.eps_sym(i))], &units)?;
            v.record(locus == want, || format!("k={k}: pullback of Y_(k,𝔈_{i}) is {locus}"));
        }
    }
    Ok(v)
}

/// Data a blowup point carries: for each exceptional divisor through it, the
/// step `|𝔖|` and the section `𝔖`; and the edges whose `ž` vanish.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowupData {
    pub divisors: Vec<(usize, TraverseSection)>,
    pub vanishing: BTreeSet<Edge>,
}

/// Reads the blowup data of a level tree: one divisor per `i ∈ 𝕀₊`, ordered
/// by step, and `𝕀ₘ`.
pub fn blowup_data(t: &LevelTree) -> Result<BlowupData> {
    let ld = t.level_data()?;
    let mut divisors = vec![];
    for i in ld.i_plus() {
        let s: TraverseSection = ld.cross_section(i)?.into_iter().collect();
        divisors.push((s.len(), s));
    }
    divisors.sort();
    Ok(BlowupData { divisors, vanishing: ld.index_partition().m_edges.into_iter().collect() })
}

/// `ψ₂` on level trees: the weighted level tree over `τ` with
/// `𝕀₊ = {−i_k, …, −i₁}`, where the `i_j` are the divisor steps.
pub fn psi2_level_tree(tau: &WeightedTree, data: &BlowupData) -> Result<LevelTree> {
    let tree = &tau.tree;
    let steps: Vec<usize> = data.divisors.iter().map(|(k, _)| *k).collect();
    if steps.windows(2).any(|w| w[0] >= w[1]) || steps.first() == Some(&0) {
        return Err(Error::Domain("divisor steps must be positive and strictly increasing".into()));
    }
    for (k, s) in &data.divisors {
        if s.len() != *k {
            return Err(Error::Domain(format!("step {k} carries a section of size {}", s.len())));
        }
    }
    let infeasible = |why: String| Error::Domain(format!("no level tree realizes the blowup data: {why}"));
    let level_of_step = |k: usize| Level::from_integer(-(k as i64));
    let m = match steps.last() {
        Some(k) => level_of_step(*k),
        None => Level::zero(),
    };
    // lowest level crossed by each edge
    let mut lowest: BTreeMap<Edge, Level> = BTreeMap::new();
    for (k, s) in &data.divisors {
        for e in s {
            if *e == tree.root() || *e >= tree.len() {
                return Err(infeasible(format!("`{e}` is not an edge")));
            }
            let l = level_of_step(*k);
            let cur = lowest.entry(*e).or_insert(l);
            *cur = (*cur).min(l);
        }
    }
    let mut level = vec![Level::zero(); tree.len()];
    let mut order: Vec<Vertex> = tree.vertices().collect();
    order.sort_by_key(|v| tree.depth(*v));
    for v in order {
        if v == tree.root() {
            continue;
        }
        let p = tree.parent(v).expect("non-root");
        level[v] = match lowest.get(&v) {
            Some(l) if !data.vanishing.contains(&v) => *l,
            _ => level[p].min(m) - Level::from_integer(1),
        };
    }
    let t = LevelTree::new(tau.clone(), level).map_err(|e| infeasible(e.to_string()))?;
    let back = blowup_data(&t)?;
    if back != *data {
        return Err(infeasible("the levels read back differently".into()));
    }
    Ok(t)
}

/// Formal tensor combination of the line bundles `L_e`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FormalBundle(pub BTreeMap<Edge, i64>);

impl FormalBundle {
    pub fn basis(e: Edge) -> FormalBundle {
        FormalBundle(BTreeMap::from([(e, 1)]))
    }

    pub fn add(&self, other: &FormalBundle, sign: i64) -> FormalBundle {
        let mut out = self.0.clone();
        for (e, k) in &other.0 {
            *out.entry(*e).or_insert(0) += sign * k;
        }
        out.retain(|_, k| *k != 0);
        FormalBundle(out)
    }
}

/// `𝔏ᵢ` for `i ∈ 𝕀₊` and `𝔏_e` for `e ∈ Êdg`.
pub fn formal_bundles(frame: &ChartFrame) -> Result<(BTreeMap<Level, FormalBundle>, BTreeMap<Edge, FormalBundle>)> {
    let ld = frame.level_data();
    let t = frame.tree();
    let mut levels: BTreeMap<Level, FormalBundle> = BTreeMap::new();
    for i in ld.i_plus() {
        let e = frame.special_edge(i)?;
        let mut b = FormalBundle::basis(e);
        for j in ld.open_span(i, ld.upper_level(e)) {
            b = b.add(&levels[&j], -1);
        }
        levels.insert(i, b);
    }
    let mut edges = BTreeMap::new();
    for e in ld.hat_edges() {
        let mut b = FormalBundle::basis(e);
        for j in ld.open_span(ld.el(e), t.level(t.tree().upper(e))) {
            b = b.add(&levels[&j], -1);
        }
        edges.insert(e, b);
    }
    Ok((levels, edges))
}

/// `𝔏_e ⊗ ⨂_{e′≻e}(𝔏_{e′} ⊗ 𝔏_{ℓ(e′)}^∨) = L_e^⪰ ⊗ ⨂_{(ℓ(e),0)} 𝔏ⱼ^∨` on
/// every hat edge, and `𝔏_{𝖾ᵢ} = 𝔏ᵢ`.
pub fn bundle_identity(frame: &ChartFrame) -> Result<Verdict> {
    let ld = frame.level_data();
    let tree = frame.tree().tree();
    let (levels, edges) = formal_bundles(frame)?;
    let mut v = Verdict::default();
    for i in ld.i_plus() {
        let e = frame.special_edge(i)?;
        v.record(edges[&e] == levels[&i], || format!("𝔏 of the special edge at {i} differs from 𝔏_{i}"));
    }
    for e in ld.hat_edges() {
        let above = tree.descendants_geq(tree.upper(e));
        let mut lhs = edges[&e].clone();
        for f in &above {
            lhs = lhs.add(&edges[f], 1).add(&levels[&ld.el(*f)], -1);
        }
        let mut rhs = FormalBundle::basis(e);
        for f in &above {
            rhs = rhs.add(&FormalBundle::basis(*f), 1);
        }
        for j in ld.open_span(ld.el(e), Level::zero()) {
            rhs = rhs.add(&levels[&j], -1);
        }
        v.record(lhs == rhs, || format!("bundle identity fails at `{}`: {lhs:?} vs {rhs:?}", tree.name(e)));
    }
    Ok(v)
}

/// Coordinates of the blowup chart: `ε̃ᵢ`, `ρ_e`, `ž_e` on `𝕀ₘ`, `z̃_e` on
/// `𝕀₋`, `s_j`.
pub struct BlowupChart<'a> {
    frame: &'a ChartFrame,
}

impl<'a> BlowupChart<'a> {
    pub fn new(frame: &'a ChartFrame) -> Self {
        BlowupChart { frame }
    }

    fn name(&self, e: Edge) -> &str {
        self.frame.tree().tree().name(e)
    }

    pub fn eps(&self, i: Level) -> Symbol {
        Symbol::level(Kind::EpsTilde, Mark::Plain, i)
    }

    /// `ρ_e`, trivial on special edges.
    pub fn rho(&self, e: Edge) -> Monomial {
        if self.frame.is_special(e) {
            Monomial::one()
        } else {
            Monomial::var(Symbol::named(Kind::Rho, Mark::Plain, self.name(e)))
        }
    }

    pub fn zcheck(&self, e: Edge) -> Symbol {
        Symbol::named(Kind::ZCheck, Mark::Plain, self.name(e))
    }

    pub fn ztilde(&self, e: Edge) -> Symbol {
        Symbol::named(Kind::ZTilde, Mark::Plain, self.name(e))
    }

    pub fn s(&self, j: &str) -> Symbol {
        Symbol::named(Kind::S, Mark::Plain, j)
    }

    pub fn coords(&self) -> BTreeSet<Symbol> {
        let ld = self.frame.level_data();
        let part = self.frame.partition();
        let mut out: BTreeSet<Symbol> = part.plus.iter().map(|i| self.eps(*i)).collect();
        for e in ld.hat_edges() {
            if part.m_edges.contains(&e) {
                out.insert(self.zcheck(e));
            } else if !self.frame.is_special(e) {
                out.insert(Symbol::named(Kind::Rho, Mark::Plain, self.name(e)));
            }
        }
        out.extend(part.minus.iter().map(|e| self.ztilde(*e)));
        out.extend(self.frame.tags().iter().map(|j| self.s(j)));
        out
    }

    /// Units: every `ρ_e`.
    pub fn units(&self) -> BTreeSet<Symbol> {
        self.coords().into_iter().filter(|s| s.kind == Kind::Rho).collect()
    }

    fn eps_over(&self, levels: Vec<Level>) -> Monomial {
        product(levels.into_iter().map(|h| self.eps(h)))
    }

    /// `π*` on `ζ_e` and `ς_j`.
    pub fn pi(&self) -> Result<MonomialMap> {
        let f = self.frame;
        let ld = f.level_data();
        let part = f.partition();
        let mut assign = BTreeMap::new();
        for e in f.tree().tree().edges() {
            let value = if !ld.is_hat(e) {
                Monomial::var(self.ztilde(e))
            } else if part.m_edges.contains(&e) {
                Monomial::var(self.zcheck(e)).mul(&self.eps_over(ld.edge_span(e)))
            } else {
                self.rho(e).mul(&self.eps_over(ld.edge_span(e)))
            };
            assign.insert(f.zeta_sym(e), value);
        }
        for j in f.tags() {
            assign.insert(Symbol::sigma(j), Monomial::var(self.s(j)));
        }
        Ok(MonomialMap { source: self.coords(), assign })
    }

    fn rho_above(&self, e: Edge, strict: bool) -> Monomial {
        let tree = self.frame.tree().tree();
        let mut edges = tree.descendants_geq(tree.upper(e));
        if !strict {
            edges.push(e);
        }
        edges.into_iter().fold(Monomial::one(), |m, f| m.mul(&self.rho(f)))
    }

    /// `ψ₂*` on the twisted chart coordinates.
    pub fn psi2(&self) -> Result<MonomialMap> {
        let f = self.frame;
        let ld = f.level_data();
        let part = f.partition();
        let mut assign = BTreeMap::new();
        for &i in &part.plus {
            assign.insert(f.eps_sym(i), Monomial::var(self.eps(i)));
        }
        for e in ld.hat_edges() {
            if f.is_special(e) {
                continue;
            }
            let den = self.rho_above(f.special_edge(ld.el(e))?, false);
            let value = if part.m_edges.contains(&e) {
                Monomial::var(self.zcheck(e)).mul(&self.rho_above(e, true))
            } else {
                self.rho_above(e, false)
            };
            assign.insert(f.u_sym(e), value.div(&den)?);
        }
        for &e in &part.minus {
            assign.insert(f.z_sym(e), Monomial::var(self.ztilde(e)));
        }
        for j in f.tags() {
            assign.insert(f.w_sym(j), Monomial::var(self.s(j)));
        }
        Ok(MonomialMap { source: self.coords(), assign })
    }
}

/// `θ ∘ ψ₂ = π` as an exact identity.
pub fn psi2_chart_check(frame: &ChartFrame) -> Result<Verdict> {
    let b = BlowupChart::new(frame);
    let lhs = compose(&frame.theta(), &b.psi2()?)?;
    let rhs = b.pi()?;
    let mut v = Verdict::default();
    for (t, want) in &rhs.assign {
        let got = &lhs.assign[t];
        v.record(got == want, || format!("θ∘ψ₂ sends {t} to {got}, π to {want}"));
    }
    Ok(v)
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformStep {
    pub step: usize,
    pub factor: String,
    pub verdict: Verdict,
}

/// At step `k+1`, on the blowup chart: the total transform of
/// `Y_{k+1} = Z₁ ∪ … ∪ Z_{k+1}` is the proper transform of `Z_{k+1}` together
/// with `∏_{|𝔈ᵢ|≤k} ε̃ᵢ = 0`.
pub fn ideal_transform_check(frame: &ChartFrame, step: usize) -> Result<TransformStep> {
    if step == 0 {
        return Err(Error::Domain("steps start at 1".into()));
    }
    let k = step - 1;
    let b = BlowupChart::new(frame);
    let pi = b.pi()?;
    let units = b.units();
    let ld = frame.level_data();
    let sizes = section_sizes(ld)?;
    let earlier: BTreeSet<Symbol> = sizes.iter().filter(|(_, n)| **n <= k).map(|(i, _)| b.eps(*i)).collect();
    let factor = product(earlier.iter().cloned());
    let pullback = |s: &TraverseSection| -> Vec<Monomial> { s.iter().map(|e| pi.assign[&frame.zeta_sym(*e)].clone()).collect() };
    let sections = GammaBar::new(&frame.tree().base)?.sections();
    let mut total = Locus::empty();
    let mut proper = Locus::empty();
    for s in sections.iter().filter(|s| s.len() <= step) {
        let gens = pullback(s);
        total = total.union(&Locus::cut(&gens, &units)?);
        if s.len() == step {
            // saturation by the earlier exceptional divisors
            let mut saturated_units = units.clone();
            saturated_units.extend(earlier.iter().cloned());
            proper = proper.union(&Locus::cut(&gens, &saturated_units)?);
        }
    }
    let expected = proper.union(&Locus::cut(std::slice::from_ref(&factor), &units)?);
    let mut v = Verdict::default();
    v.record(total == expected, || format!("step {step}: total transform {total}, proper·factor {expected}"));
    Ok(TransformStep { step, factor: factor.to_string(), verdict: v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fig2, fig2_special};
    use crate::level::lvl;

    fn names(t: &RootedTree, s: &TraverseSection) -> Vec<String> {
        s.iter().map(|e| t.name(*e).to_string()).collect()
    }

    fn brute_sections(t: &RootedTree) -> Vec<TraverseSection> {
        let edges: Vec<Edge> = t.edges().collect();
        let mut out: Vec<TraverseSection> = (0u64..1 << edges.len())
            .map(|mask| (0..edges.len()).filter(|b| mask >> b & 1 == 1).map(|b| edges[b]).collect())
            .filter(|s| is_traverse_section(t, s))
            .collect();
        out.sort();
        out
    }

    fn frame() -> ChartFrame {
        let t = fig2();
        let sp = fig2_special(&t);
        ChartFrame::new(t, sp, vec![], Mark::Plain).unwrap()
    }

    #[test]
    fn fig2_sections() {
        let t = fig2();
        let secs = traverse_sections(t.tree());
        let got: Vec<Vec<String>> = secs.iter().map(|s| names(t.tree(), s)).collect();
        assert_eq!(got, vec![vec!["a", "b"], vec!["a", "c", "d"]]);
        assert_eq!(secs, brute_sections(t.tree()));
        assert_eq!(section_compare(t.tree(), &secs[0], &secs[1]), Order::Greater);
        assert_eq!(section_compare(t.tree(), &secs[1], &secs[0]), Order::Less);
        assert_eq!(section_compare(t.tree(), &secs[0], &secs[0]), Order::Equal);
    }

    #[test]
    fn small_sections() {
        let path = LevelTree::build("o", &[("v", "o", 1, -1)], 0).unwrap();
        assert_eq!(traverse_sections(path.tree()), vec![TraverseSection::from([1])]);
        let star = LevelTree::build("o", &[("a", "o", 1, -1), ("b", "o", 1, -1), ("c", "o", 1, -1)], 0).unwrap();
        assert_eq!(traverse_sections(star.tree()), vec![TraverseSection::from([0, 1, 2])]);
        assert!(traverse_sections(&RootedTree::point("o").unwrap()).is_empty());
        let two = LevelTree::build(
            "o",
            &[("a", "o", 0, -1), ("b", "o", 0, -1), ("c", "a", 1, -2), ("d", "a", 1, -2), ("e", "b", 1, -2), ("f", "b", 1, -2)],
            0,
        )
        .unwrap();
        let secs = traverse_sections(two.tree());
        assert_eq!(secs, brute_sections(two.tree()));
        let v = |s: &str| two.tree().vertex(s).unwrap();
        let left = TraverseSection::from([v("c"), v("d"), v("b")]);
        let right = TraverseSection::from([v("a"), v("e"), v("f")]);
        assert_eq!(section_compare(two.tree(), &left, &right), Order::Incomparable);
    }

    #[test]
    fn fig2_components_and_divisors() {
        let t = fig2();
        let chart = TwistedChart::new(frame());
        let comps: Vec<Vec<Vec<String>>> =
            (1..=3).map(|k| zk_components(&t, k).unwrap().iter().map(|s| names(t.tree(), s)).collect()).collect();
        assert!(comps[0].is_empty());
        assert_eq!(comps[1], vec![vec!["a", "b"]]);
        assert_eq!(comps[2], vec![vec!["a", "b"], vec!["a", "c", "d"]]);
        let want = ["1", "eps(-1)", "eps(-1) * eps(-2)"];
        for k in 1..=3 {
            let (d, v) = yk_pullback(&chart, k).unwrap();
            assert_eq!(d.to_string(), want[k - 1]);
            assert!(v.ok(), "{:?}", v.failures);
        }
    }

    #[test]
    fn fig2_bundles_and_psi2() {
        let f = frame();
        assert!(bundle_identity(&f).unwrap().ok());
        let v = psi2_chart_check(&f).unwrap();
        assert!(v.ok(), "{:?}", v.failures);
        let steps: Vec<String> = (1..=4).map(|s| ideal_transform_check(&f, s).unwrap().factor).collect();
        assert_eq!(steps, ["1", "1", "epst(-1)", "epst(-1) * epst(-2)"]);
        for s in 1..=4 {
            assert!(ideal_transform_check(&f, s).unwrap().verdict.ok());
        }
    }

    #[test]
    fn fig2_reconstruction() {
        let t = fig2();
        let data = blowup_data(&t).unwrap();
        assert_eq!(data.divisors.iter().map(|(k, _)| *k).collect::<Vec<_>>(), [2, 3]);
        let back = psi2_level_tree(&t.base, &data).unwrap();
        assert_eq!(back.level_data().unwrap().i_plus(), [lvl(-2), lvl(-3)]);
        assert!(crate::level::is_equivalent(&back, &t));
        let bad = BlowupData { divisors: vec![(1, TraverseSection::from([0]))], vanishing: BTreeSet::new() };
        assert!(psi2_level_tree(&t.base, &bad).is_err());
    }

    #[test]
    fn cross_section_pullback_can_pick_up_extra_branches() {
        // 𝔈₋₂ = {b, c, d}; b and c span −2 alone but both lie in 𝕀ₘ
        let t = LevelTree::build("o", &[("a", "o", 0, -1), ("b", "a", 2, -3), ("c", "a", 2, -3), ("d", "o", 1, -2)], 0).unwrap();
        let chart = TwistedChart::new(ChartFrame::with_default_special(t, vec![]).unwrap());
        let v = cross_section_pullback(&chart, 3).unwrap();
        assert_eq!(v.failures, ["k=3: pullback of Y_(k,𝔈_-2) is V(eps(-1) * eps(-2), eps(-2) * u_b, eps(-2) * u_c)"]);
        assert!(yk_pullback(&chart, 3).unwrap().1.ok());
        assert!(cross_section_pullback(&TwistedChart::new(frame()), 3).unwrap().ok());
    }

    #[test]
    fn root_weighted_tree_has_no_blowup() {
        let t = LevelTree::build("o", &[("a", "o", 1, -1)], 1).unwrap();
        let f = ChartFrame::with_default_special(t.clone(), vec!["j".into()]).unwrap();
        assert!(GammaBar::new(&t.base).unwrap().sections().is_empty());
        assert_eq!(yk_pullback(&TwistedChart::new(f.clone()), 1).unwrap().0, Monomial::one());
        assert!(psi2_chart_check(&f).unwrap().ok());
        let data = blowup_data(&t).unwrap();
        assert!(data.divisors.is_empty());
        assert!(crate::level::is_equivalent(&psi2_level_tree(&t.base, &data).unwrap(), &t));
    }
}
