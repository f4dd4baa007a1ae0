//! Twisted charts: the coordinate map `θ`, the functions `μ_{e;i;I}`, the
//! stratum maps `Φ_{(I)}` (as coordinate data), their inverses `Ψ_{(I)}`, and
//! the transition maps between charts.
//!
//! Chart coordinates are `ε_i` (`i ∈ 𝕀₊`), `u_e` (`e ∈ Êdg` not special),
//! `z_e` (`e ∈ 𝕀₋`) and `w_j` (`j ∈ J`). Base coordinates are `ζ_e` for every
//! edge and `ς_j`. All maps are pullbacks: a target symbol is sent to a
//! monomial in the source symbols.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::contraction::{contract_with, transport_subset, ContractionResult};
use crate::error::{Error, Result};
use crate::level::{check_special, default_special, IndexPartition, IndexSubset, Level, LevelData, LevelTree, Special};
use crate::monomial::{compose, diff_on_stratum, Kind, Mark, Monomial, MonomialMap, Stratum, Symbol};
use crate::tree::{check_id, Edge, Vertex};
use crate::verdict::Verdict;

type UFn<'a> = dyn Fn(Edge) -> Result<Monomial> + 'a;

/// A weighted level tree with special vertices and extra tags: everything a
/// chart needs apart from the coordinate values.
#[derive(Clone, Debug)]
pub struct ChartFrame {
    t: LevelTree,
    ld: LevelData,
    part: IndexPartition,
    special: Special,
    tags: Vec<String>,
    mark: Mark,
    theta_zeta: Vec<Monomial>,
}

impl ChartFrame {
    pub fn new(t: LevelTree, special: Special, tags: Vec<String>, mark: Mark) -> Result<Self> {
        let ld = t.level_data()?;
        check_special(&t, &ld, &special)?;
        let mut seen = BTreeSet::new();
        for j in &tags {
            check_id(j)?;
            if !seen.insert(j) {
                return Err(Error::Domain(format!("tag `{j}` repeated")));
            }
        }
        let part = ld.index_partition();
        let mut frame = ChartFrame { t, ld, part, special, tags, mark, theta_zeta: vec![] };
        frame.theta_zeta = frame.t.tree().vertices().map(|e| frame.compute_theta_zeta(e)).collect();
        Ok(frame)
    }

    /// Frame with the default special vertices and no mark.
    pub fn with_default_special(t: LevelTree, tags: Vec<String>) -> Result<Self> {
        let ld = t.level_data()?;
        let special = default_special(&t, &ld);
        ChartFrame::new(t, special, tags, Mark::Plain)
    }

    pub fn tree(&self) -> &LevelTree {
        &self.t
    }

    pub fn level_data(&self) -> &LevelData {
        &self.ld
    }

    pub fn partition(&self) -> &IndexPartition {
        &self.part
    }

    pub fn special(&self) -> &Special {
        &self.special
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn mark(&self) -> Mark {
        self.mark
    }

    fn name(&self, e: Edge) -> &str {
        self.t.tree().name(e)
    }

    pub fn eps_sym(&self, i: Level) -> Symbol {
        Symbol::level(Kind::Epsilon, self.mark, i)
    }

    pub fn u_sym(&self, e: Edge) -> Symbol {
        Symbol::named(Kind::U, self.mark, self.name(e))
    }

    pub fn z_sym(&self, e: Edge) -> Symbol {
        Symbol::named(Kind::Z, self.mark, self.name(e))
    }

    pub fn w_sym(&self, j: &str) -> Symbol {
        Symbol::named(Kind::W, self.mark, j)
    }

    pub fn zeta_sym(&self, e: Edge) -> Symbol {
        Symbol::zeta(self.name(e))
    }

    /// `𝖾ᵢ`.
    pub fn special_edge(&self, i: Level) -> Result<Edge> {
        self.special
            .get(&i)
            .copied()
            .ok_or_else(|| Error::Domain(format!("no special vertex at level {i}")))
    }

    pub fn is_special(&self, e: Edge) -> bool {
        self.special.get(&self.t.level(e)) == Some(&e)
    }

    /// `u_e`, with `u_{𝖾ᵢ} ≡ 1`.
    pub fn u(&self, e: Edge) -> Monomial {
        if self.is_special(e) {
            Monomial::one()
        } else {
            Monomial::var(self.u_sym(e))
        }
    }

    pub fn coords(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        out.extend(self.part.plus.iter().map(|i| self.eps_sym(*i)));
        out.extend(self.ld.hat_edges().into_iter().filter(|e| !self.is_special(*e)).map(|e| self.u_sym(e)));
        out.extend(self.part.minus.iter().map(|e| self.z_sym(*e)));
        out.extend(self.tags.iter().map(|j| self.w_sym(j)));
        out
    }

    pub fn base_coords(&self) -> BTreeSet<Symbol> {
        let mut out: BTreeSet<Symbol> = self.t.tree().edges().map(|e| self.zeta_sym(e)).collect();
        out.extend(self.tags.iter().map(|j| Symbol::sigma(j)));
        out
    }

    /// Parent of the special vertex at level `i`, or `None` at the root.
    fn special_parent(&self, i: Level) -> Result<Option<Vertex>> {
        let v = self.special_edge(i)?;
        let p = self.t.tree().upper(v);
        Ok((p != self.t.tree().root()).then_some(p))
    }

    /// `i[0], i[1], …` up to but excluding 0.
    pub fn ascent(&self, i: Level) -> Result<Vec<Level>> {
        let mut out = vec![];
        let mut cur = i;
        while cur < Level::zero() {
            out.push(cur);
            cur = match self.special_parent(cur)? {
                Some(p) => self.t.level(p),
                None => Level::zero(),
            };
        }
        Ok(out)
    }

    /// `u_{𝖾ᵢ⁺}·u_{𝖾_{i[1]}⁺}⋯` with the given values for `u`.
    fn chain_by(&self, i: Level, u: &UFn) -> Result<Monomial> {
        let mut out = Monomial::one();
        let mut cur = i;
        while cur < Level::zero() {
            match self.special_parent(cur)? {
                Some(p) => {
                    out = out.mul(&u(p)?);
                    cur = self.t.level(p);
                }
                None => break,
            }
        }
        Ok(out)
    }

    pub fn chain(&self, i: Level) -> Result<Monomial> {
        self.chain_by(i, &|e| Ok(self.u(e)))
    }

    /// `u_{e_v}`, trivial at the root.
    fn u_edge_of_by(&self, v: Vertex, u: &UFn) -> Result<Monomial> {
        if v == self.t.tree().root() {
            Ok(Monomial::one())
        } else {
            u(v)
        }
    }

    fn eps_prod_by(&self, levels: &[Level], eps: &dyn Fn(Level) -> Result<Monomial>) -> Result<Monomial> {
        let mut out = Monomial::one();
        for l in levels {
            out = out.mul(&eps(*l)?);
        }
        Ok(out)
    }

    /// Edges strictly above `e` whose span lies in `I₊`.
    fn contracted_above(&self, e: Edge, i: &IndexSubset) -> Vec<Edge> {
        self.t
            .tree()
            .descendants_geq(self.t.tree().upper(e))
            .into_iter()
            .filter(|f| i.covers(&self.ld.edge_span(*f)))
            .collect()
    }

    /// `chain(ℓ(e))/chain(k) · ∏_{𝔢≻𝖾ₖ, ⊆I} Z / ∏_{e′≻e, ⊆I} Z`.
    fn frame_ratio_by(&self, e: Edge, k: Level, i: &IndexSubset, u: &UFn, z: &dyn Fn(Edge) -> Result<Monomial>) -> Result<Monomial> {
        let mut out = self.chain_by(self.ld.el(e), u)?.div(&self.chain_by(k, u)?)?;
        for f in self.contracted_above(self.special_edge(k)?, i) {
            out = out.mul(&z(f)?);
        }
        for f in self.contracted_above(e, i) {
            out = out.div(&z(f)?)?;
        }
        Ok(out)
    }

    /// `chain(ℓ(e)) / (u_{e_{v⁺}}·chain(ℓ(v⁺))) · ∏_{⦅ℓ(e), ℓ(v⁺))} ε` for a hat edge.
    fn theta_ratio_by(&self, e: Edge, u: &UFn, eps: &dyn Fn(Level) -> Result<Monomial>) -> Result<Monomial> {
        let up = self.t.tree().upper(e);
        let num = self.chain_by(self.ld.el(e), u)?;
        let den = self.u_edge_of_by(up, u)?.mul(&self.chain_by(self.t.level(up), u)?);
        Ok(num.div(&den)?.mul(&self.eps_prod_by(&self.ld.edge_span(e), eps)?))
    }

    fn sym_u(&self) -> impl Fn(Edge) -> Result<Monomial> + '_ {
        move |e| Ok(self.u(e))
    }

    fn sym_eps(&self) -> impl Fn(Level) -> Result<Monomial> + '_ {
        move |i| Ok(Monomial::var(self.eps_sym(i)))
    }

    fn compute_theta_zeta(&self, e: Edge) -> Monomial {
        if e == self.t.tree().root() {
            return Monomial::one();
        }
        if !self.ld.is_hat(e) {
            return Monomial::var(self.z_sym(e));
        }
        let ratio = self
            .theta_ratio_by(e, &self.sym_u(), &self.sym_eps())
            .expect("special vertices were validated");
        self.u(e).mul(&ratio)
    }

    /// `θ*ζ_e`.
    pub fn theta_zeta(&self, e: Edge) -> &Monomial {
        &self.theta_zeta[e]
    }

    pub fn theta(&self) -> MonomialMap {
        let mut assign = BTreeMap::new();
        for e in self.t.tree().edges() {
            assign.insert(self.zeta_sym(e), self.theta_zeta[e].clone());
        }
        for j in &self.tags {
            assign.insert(Symbol::sigma(j), Monomial::var(self.w_sym(j)));
        }
        MonomialMap { source: self.coords(), assign }
    }

    /// `μ_{e;i;I}` for `i ∈ 𝕀₊∖I₊`, `e ∈ 𝔈ᵢ`.
    pub fn mu(&self, e: Edge, i: Level, sub: &IndexSubset) -> Result<Monomial> {
        if !self.part.plus.contains(&i) || sub.plus.contains(&i) {
            return Err(Error::Domain(format!("level {i} is not in 𝕀₊∖I₊")));
        }
        if !self.ld.is_hat(e) || self.ld.el(e) > i || i >= self.ld.upper_level(e) {
            return Err(Error::Domain(format!("edge `{}` is not in 𝔈_{i}", self.name(e))));
        }
        let z = |f: Edge| Ok(self.theta_zeta[f].clone());
        let ratio = self.frame_ratio_by(e, i, sub, &self.sym_u(), &z)?;
        let eps = self.eps_prod_by(&self.ld.span(self.ld.el(e), i), &self.sym_eps())?;
        Ok(self.u(e).mul(&ratio).mul(&eps))
    }

    /// Every `μ_{e;i;I}`, keyed by `(i, e)`.
    pub fn mu_table(&self, sub: &IndexSubset) -> Result<BTreeMap<(Level, Edge), Monomial>> {
        let mut out = BTreeMap::new();
        for &i in &self.part.plus {
            if sub.plus.contains(&i) {
                continue;
            }
            for e in self.ld.cross_section(i)? {
                out.insert((i, e), self.mu(e, i, sub)?);
            }
        }
        Ok(out)
    }

    fn units(&self, sub: &IndexSubset) -> BTreeSet<Symbol> {
        let mut units: BTreeSet<Symbol> = sub.plus.iter().map(|i| self.eps_sym(*i)).collect();
        units.extend(
            self.ld
                .hat_edges()
                .into_iter()
                .filter(|e| !self.is_special(*e) && (!self.part.m_edges.contains(e) || sub.m_edges.contains(e)))
                .map(|e| self.u_sym(e)),
        );
        units.extend(sub.minus.iter().map(|e| self.z_sym(*e)));
        units
    }

    /// `𝔘_{[t₍I₎]}`: the complementary coordinates vanish.
    pub fn stratum(&self, sub: &IndexSubset) -> Stratum {
        let mut zeros: BTreeSet<Symbol> = self.part.plus.iter().filter(|i| !sub.plus.contains(i)).map(|i| self.eps_sym(*i)).collect();
        zeros.extend(self.part.m_edges.iter().filter(|e| !sub.m_edges.contains(e)).map(|e| self.u_sym(*e)));
        zeros.extend(self.part.minus.iter().filter(|e| !sub.minus.contains(e)).map(|e| self.z_sym(*e)));
        Stratum { zeros, units: self.units(sub) }
    }

    /// `𝔘°_{(I)}`: the `I`-indexed coordinates are units, nothing vanishes.
    pub fn open_stratum(&self, sub: &IndexSubset) -> Stratum {
        Stratum { zeros: BTreeSet::new(), units: self.units(sub) }
    }

    pub fn stratum_info(&self, sub: &IndexSubset) -> Result<StratumInfo> {
        StratumInfo::new(self, sub)
    }

    fn mu_target(&self, e: Edge) -> Symbol {
        Symbol::mu(self.name(e))
    }

    /// Target coordinates of `Φ_{(I)}`.
    pub fn phi_targets(&self, info: &StratumInfo) -> BTreeSet<Symbol> {
        let mut out: BTreeSet<Symbol> = info.res.contracted.iter().map(|e| self.zeta_sym(*e)).collect();
        out.extend(self.tags.iter().map(|j| Symbol::sigma(j)));
        out.extend(info.e_bold.iter().map(|e| self.mu_target(*e)));
        out
    }

    /// `Φ_{(I)}` as coordinate data: `θ` on the contracted `ζ`, the `ς`, and
    /// `μ_{e;ℓ₍I₎(e);I}` for `e ∈ 𝐄[t₍I₎]`.
    pub fn phi(&self, info: &StratumInfo) -> Result<MonomialMap> {
        let mut assign = BTreeMap::new();
        for &e in &info.res.contracted {
            assign.insert(self.zeta_sym(e), self.theta_zeta[e].clone());
        }
        for j in &self.tags {
            assign.insert(Symbol::sigma(j), Monomial::var(self.w_sym(j)));
        }
        for &e in &info.e_bold {
            assign.insert(self.mu_target(e), self.mu(e, info.level_of(e), &info.subset)?);
        }
        Ok(MonomialMap { source: self.coords(), assign })
    }

    /// `Ψ_{(I)}`, built level by level from the top.
    pub fn psi(&self, info: &StratumInfo) -> Result<MonomialMap> {
        let sub = &info.subset;
        let zeta_src = |e: Edge| -> Result<Monomial> {
            Ok(if info.res.contracted.contains(&e) { Monomial::var(self.zeta_sym(e)) } else { Monomial::zero() })
        };
        let mu_src = |e: Edge| -> Result<Monomial> {
            if info.e_bold.contains(&e) {
                Ok(Monomial::var(self.mu_target(e)))
            } else if info.special.contains(&e) {
                Ok(Monomial::one())
            } else if info.m_edges.contains(&e) {
                Ok(Monomial::zero())
            } else {
                Err(Error::Domain(format!("no μ coordinate for `{}`", self.name(e))))
            }
        };
        let mut eps_val: BTreeMap<Level, Monomial> = BTreeMap::new();
        let mut u_val: BTreeMap<Edge, Monomial> = BTreeMap::new();

        for &i in &self.part.plus {
            let up = self.ld.upper_level(self.special_edge(i)?);
            let value = {
                let u = |e: Edge| self.lookup_u(&u_val, e);
                let eps = |l: Level| lookup(&eps_val, &l, "ε");
                if !sub.plus.contains(&i) {
                    Monomial::zero()
                } else {
                    let free: Vec<Level> = self.ld.span(i, up).into_iter().filter(|l| !sub.plus.contains(l)).collect();
                    match free.first() {
                        None => zeta_src(self.special_edge(i)?)?.div(&self.eps_prod_by(&self.ld.open_span(i, up), &eps)?)?,
                        Some(&hat_i) => {
                            let coeff = self
                                .frame_ratio_by(self.special_edge(i)?, hat_i, sub, &u, &zeta_src)?
                                .mul(&self.eps_prod_by(&self.ld.open_span(i, hat_i), &eps)?);
                            mu_src(self.special_edge(i)?)?.div(&coeff)?
                        }
                    }
                }
            };
            eps_val.insert(i, value);

            let at_level: Vec<Edge> = self
                .ld
                .hat_edges()
                .into_iter()
                .filter(|e| self.ld.el(*e) == i && !self.is_special(*e))
                .collect();
            for e in at_level {
                let value = {
                    let u = |f: Edge| self.lookup_u(&u_val, f);
                    let eps = |l: Level| lookup(&eps_val, &l, "ε");
                    let up_e = self.ld.upper_level(e);
                    let free: Vec<Level> = self.ld.span(i, up_e).into_iter().filter(|l| !sub.plus.contains(l)).collect();
                    match free.first() {
                        None => zeta_src(e)?.div(&self.theta_ratio_by(e, &u, &eps)?)?,
                        Some(&kappa) => {
                            let coeff = self
                                .frame_ratio_by(e, kappa, sub, &u, &zeta_src)?
                                .mul(&self.eps_prod_by(&self.ld.span(i, kappa), &eps)?);
                            mu_src(e)?.div(&coeff)?
                        }
                    }
                };
                u_val.insert(e, value);
            }
        }

        let mut assign = BTreeMap::new();
        for (i, v) in eps_val {
            assign.insert(self.eps_sym(i), v);
        }
        for (e, v) in u_val {
            assign.insert(self.u_sym(e), v);
        }
        for &e in &self.part.minus {
            assign.insert(self.z_sym(e), zeta_src(e)?);
        }
        for j in &self.tags {
            assign.insert(self.w_sym(j), Monomial::var(Symbol::sigma(j)));
        }
        Ok(MonomialMap { source: self.phi_targets(info), assign })
    }

    fn lookup_u(&self, vals: &BTreeMap<Edge, Monomial>, e: Edge) -> Result<Monomial> {
        if self.is_special(e) {
            Ok(Monomial::one())
        } else {
            lookup(vals, &e, "u")
        }
    }

    /// `Φ∘Ψ = id` exactly and `Ψ∘Φ = id` on the stratum.
    pub fn verify_round_trip(&self, sub: &IndexSubset) -> Result<Verdict> {
        let info = self.stratum_info(sub)?;
        let phi = self.phi(&info)?;
        let psi = self.psi(&info)?;
        let label = sub.display(self.t.tree());
        let mut v = Verdict::default();
        match compose(&phi, &psi) {
            Ok(a) => {
                for (t, m) in &a.assign {
                    v.record(*m == Monomial::var(t.clone()), || format!("I={label}: Φ∘Ψ sends {t} to {m}"));
                }
            }
            Err(e) => v.record(false, || format!("I={label}: Φ∘Ψ: {e}")),
        }
        let id = MonomialMap::identity(&self.coords());
        match compose(&psi, &phi).and_then(|b| diff_on_stratum(&b, &id, &self.stratum(sub)).map(|d| (b, d))) {
            Ok((b, diff)) => {
                v.checked += b.assign.len();
                for t in diff {
                    v.fail(format!("I={label}: Ψ∘Φ sends {t} to {}", b.assign[&t]));
                }
            }
            Err(e) => v.record(false, || format!("I={label}: Ψ∘Φ: {e}")),
        }
        Ok(v)
    }

    /// `μ_{e;i;I}` vanishes on the stratum iff `ℓ₍I₎(v_e⁻) < i` and is a unit
    /// iff `ℓ₍I₎(v_e⁻) = i`, with `ℓ₍I₎` read off the contracted tree.
    pub fn check_mu_vanishing(&self, sub: &IndexSubset) -> Result<Verdict> {
        let info = self.stratum_info(sub)?;
        let st = self.stratum(sub);
        let label = sub.display(self.t.tree());
        let mut v = Verdict::default();
        for ((i, e), mu) in self.mu_table(sub)? {
            let lower = info.level_of(e);
            let name = self.name(e);
            match mu.on_stratum(&st) {
                Ok(val) => {
                    if lower < i {
                        v.record(val.is_zero(), || format!("I={label}: μ_{{{name};{i}}} = {val} should vanish"));
                    } else if lower == i {
                        v.record(val.is_unit_on(&st), || format!("I={label}: μ_{{{name};{i}}} = {val} should be a unit"));
                    } else {
                        v.record(false, || format!("I={label}: ℓ₍I₎({name}) = {lower} lies above {i}"));
                    }
                }
                Err(err) => v.record(false, || format!("I={label}: μ_{{{name};{i}}}: {err}")),
            }
        }
        Ok(v)
    }

    /// On `𝔘_{[t₍I₎]}`, `θ*ζ_e` vanishes exactly for the surviving edges.
    pub fn check_stratum_image(&self, sub: &IndexSubset) -> Result<Verdict> {
        let info = self.stratum_info(sub)?;
        let st = self.stratum(sub);
        let label = sub.display(self.t.tree());
        let mut v = Verdict::default();
        for e in self.t.tree().edges() {
            let val = self.theta_zeta[e].on_stratum(&st)?;
            let survives = !info.res.contracted.contains(&e);
            v.record(val.is_zero() == survives, || {
                format!("I={label}: θ*ζ_{} = {val} on the stratum", self.name(e))
            });
            if !survives {
                v.record(val.is_unit_on(&st), || format!("I={label}: θ*ζ_{} = {val} is not a unit", self.name(e)));
            }
        }
        Ok(v)
    }

    /// At the centre (`ε = 0`), `μ_{e;i;∅}` reads off `u_e` when `ℓ(e) = i`
    /// and vanishes otherwise.
    pub fn check_base_point(&self) -> Result<Verdict> {
        let empty = IndexSubset::default();
        let st = self.stratum(&empty);
        let mut v = Verdict::default();
        for ((i, e), mu) in self.mu_table(&empty)? {
            let got = mu.on_stratum(&st)?;
            let want = if self.ld.el(e) == i { self.u(e).on_stratum(&st)? } else { Monomial::zero() };
            v.record(got == want, || format!("μ_{{{};{i};∅}} = {got}, expected {want}", self.name(e)));
        }
        Ok(v)
    }

    /// `∏_{e′⪰𝖾_m} θ*ζ = chain(m)·∏_{𝕀₊} ε` and, for `e ∈ 𝔈_m`,
    /// `∏_{e′⪰e} θ*ζ = u_e · ∏_{e′⪰𝖾_m} θ*ζ`.
    pub fn remark_identities(&self) -> Result<Verdict> {
        let mut v = Verdict::default();
        let Some(&m) = self.part.plus.last() else {
            return Err(Error::Domain("𝕀₊ is empty".into()));
        };
        let path = |e: Edge| {
            self.t
                .tree()
                .descendants_geq(e)
                .into_iter()
                .fold(Monomial::one(), |acc, f| acc.mul(&self.theta_zeta[f]))
        };
        let em = self.special_edge(m)?;
        let base = path(em);
        let want = self.chain(m)?.mul(&self.eps_prod_by(&self.part.plus, &self.sym_eps())?);
        v.record(base == want, || format!("∏ θ*ζ over 𝖾_m and above is {base}, expected {want}"));
        for e in self.ld.cross_section(m)? {
            let got = path(e);
            let want = self.u(e).mul(&base);
            v.record(got == want, || format!("∏ θ*ζ over {} and above is {got}, expected {want}", self.name(e)));
        }
        Ok(v)
    }
}

fn lookup<K: Ord + std::fmt::Display>(m: &BTreeMap<K, Monomial>, k: &K, what: &str) -> Result<Monomial> {
    m.get(k)
        .cloned()
        .ok_or_else(|| Error::Domain(format!("{what} at {k} used before it was constructed")))
}

/// A frame together with `θ`.
#[derive(Clone, Debug)]
pub struct TwistedChart {
    pub frame: ChartFrame,
    pub theta: MonomialMap,
}

impl TwistedChart {
    pub fn new(frame: ChartFrame) -> TwistedChart {
        let theta = frame.theta();
        TwistedChart { frame, theta }
    }

    pub fn mu(&self, sub: &IndexSubset) -> Result<BTreeMap<(Level, Edge), Monomial>> {
        self.frame.mu_table(sub)
    }
}

/// The contraction along `I` seen from the chart of `t`: edge ids are those
/// of `t`.
#[derive(Clone, Debug)]
pub struct StratumInfo {
    pub subset: IndexSubset,
    pub res: ContractionResult,
    pub ld: LevelData,
    /// Vertex of `t₍I₎` -> surviving vertex of `t`.
    pub origin: Vec<Vertex>,
    /// `𝐄[t₍I₎]`.
    pub e_bold: BTreeSet<Edge>,
    /// `𝕀ₘ(t₍I₎)`.
    pub m_edges: BTreeSet<Edge>,
    /// `𝖾ᵢ` for `i ∈ 𝕀₊∖I₊`.
    pub special: BTreeSet<Edge>,
}

impl StratumInfo {
    fn new(frame: &ChartFrame, sub: &IndexSubset) -> Result<StratumInfo> {
        let t = &frame.t;
        let res = contract_with(t, &frame.ld, sub)?;
        let ld2 = res.tree.level_data()?;
        let mut origin = vec![usize::MAX; res.tree.tree().len()];
        for v in t.tree().vertices() {
            if v == t.tree().root() || !res.contracted.contains(&v) {
                origin[res.projection[v]] = v;
            }
        }
        let mut special = BTreeSet::new();
        for &i in &frame.part.plus {
            if sub.plus.contains(&i) {
                continue;
            }
            let e = frame.special_edge(i)?;
            if res.tree.level(res.projection[e]) != i {
                return Err(Error::Verification(format!("special vertex at {i} moved under contraction")));
            }
            special.insert(e);
        }
        let part2 = ld2.index_partition();
        let m_edges: BTreeSet<Edge> = part2.m_edges.iter().map(|e| origin[*e]).collect();
        let e_bold = ld2
            .hat_edges()
            .into_iter()
            .map(|e| origin[e])
            .filter(|e| !special.contains(e) && !m_edges.contains(e))
            .collect();
        Ok(StratumInfo { subset: sub.clone(), res, ld: ld2, origin, e_bold, m_edges, special })
    }

    /// `ℓ₍I₎(v)` for a vertex of `t`.
    pub fn level_of(&self, v: Vertex) -> Level {
        self.res.tree.level(self.res.projection[v])
    }

    /// Index in `t₍I₎` of a surviving vertex of `t`.
    pub fn image(&self, v: Vertex) -> Vertex {
        self.res.projection[v]
    }
}

fn expect_equal(v: &mut Verdict, got: &Monomial, want: &Monomial, what: impl FnOnce() -> String) {
    v.record(got == want, || format!("{}: got {got}, expected {want}", what()));
}

fn check_theta(v: &mut Verdict, lhs: &MonomialMap, rhs: &BTreeMap<Symbol, Monomial>, what: &str) {
    for (t, want) in rhs {
        match lhs.assign.get(t) {
            Some(got) => expect_equal(v, got, want, || format!("{what} at {t}")),
            None => v.record(false, || format!("{what}: {t} missing")),
        }
    }
}

impl ChartFrame {
    /// The transition `g` to the chart built from other special vertices
    /// (coordinates marked `a`).
    pub fn special_vertex_transition(&self, other: &ChartFrame) -> Result<MonomialMap> {
        let u = self.sym_u();
        let along = |i: Level| -> Result<Monomial> {
            let mut out = Monomial::one();
            for k in other.ascent(i)? {
                out = out.mul(&self.u(other.special_edge(k)?));
            }
            Ok(out)
        };
        let mut assign = BTreeMap::new();
        for &i in &self.part.plus {
            let s = self.ld.sharp(i)?;
            let val = Monomial::var(self.eps_sym(i))
                .mul(&self.chain(i)?.div(&self.chain(s)?)?)
                .mul(&along(i)?.div(&along(s)?)?)
                .mul(&other.chain_by(s, &u)?.div(&other.chain_by(i, &u)?)?);
            assign.insert(other.eps_sym(i), val);
        }
        for e in self.ld.hat_edges() {
            if other.is_special(e) {
                continue;
            }
            let d = other.special_edge(self.ld.el(e))?;
            assign.insert(other.u_sym(e), self.u(e).div(&self.u(d))?);
        }
        for &e in &self.part.minus {
            assign.insert(other.z_sym(e), Monomial::var(self.z_sym(e)));
        }
        for j in &self.tags {
            assign.insert(other.w_sym(j), Monomial::var(self.w_sym(j)));
        }
        MonomialMap::new(self.coords(), assign)
    }

    /// `θ^a∘g = θ` and `g*μ^a_{e;i;I} = μ_{e;i;I}/μ_{𝖽ᵢ;i;I}` for all `I, i, e`.
    pub fn verify_special_vertex_transition(&self, special_b: &Special) -> Result<Verdict> {
        let other = ChartFrame::new(self.t.clone(), special_b.clone(), self.tags.clone(), Mark::Alt)?;
        let g = self.special_vertex_transition(&other)?;
        let mut v = Verdict::default();
        let pulled = compose(&other.theta(), &g)?;
        check_theta(&mut v, &pulled, &self.theta().assign, "θ^a∘g");
        for sub in self.part.subsets() {
            let label = sub.display(self.t.tree());
            for &i in &self.part.plus {
                if sub.plus.contains(&i) {
                    continue;
                }
                let d = other.special_edge(i)?;
                let mu_d = self.mu(d, i, &sub)?;
                for e in self.ld.cross_section(i)? {
                    let got = other.mu(e, i, &sub)?.substitute(|s| g.get(s))?;
                    let want = self.mu(e, i, &sub)?.div(&mu_d)?;
                    expect_equal(&mut v, &got, &want, || format!("I={label}: g*μ^a_{{{};{i}}}", self.name(e)));
                }
            }
        }
        Ok(v)
    }

    fn f_sym(&self, e: Edge) -> Symbol {
        Symbol::named(Kind::F, Mark::Plain, self.name(e))
    }

    /// The transition `g` to the chart built from rescaled parameters
    /// `ζ̂_e = f_e·ζ_e` (coordinates marked `h`). With `with_f = false` every
    /// `f_e` is 1.
    pub fn parameter_transition(&self, hat: &ChartFrame, with_f: bool) -> Result<MonomialMap> {
        let f = |e: Edge| if with_f { Monomial::var(self.f_sym(e)) } else { Monomial::one() };
        let f_geq = |e: Edge| {
            self.t
                .tree()
                .descendants_geq(e)
                .into_iter()
                .fold(Monomial::one(), |acc, x| acc.mul(&f(x)))
        };
        let f_chain = |i: Level| -> Result<Monomial> {
            let mut out = Monomial::one();
            for k in self.ascent(i)? {
                out = out.mul(&f(self.special_edge(k)?));
            }
            Ok(out)
        };
        let mut source = self.coords();
        if with_f {
            source.extend(self.t.tree().edges().map(|e| self.f_sym(e)));
        }
        let mut assign = BTreeMap::new();
        for &i in &self.part.plus {
            let s = self.ld.sharp(i)?;
            let val = Monomial::var(self.eps_sym(i)).mul(&f_chain(i)?.div(&f_chain(s)?)?);
            assign.insert(hat.eps_sym(i), val);
        }
        for e in self.ld.hat_edges() {
            if self.is_special(e) {
                continue;
            }
            let top = self.special_edge(self.ld.el(e))?;
            assign.insert(hat.u_sym(e), self.u(e).mul(&f_geq(e)).div(&f_geq(top))?);
        }
        for &e in &self.part.minus {
            // `ζ̂_e = f_e·ζ_e` forces the factor here as well
            assign.insert(hat.z_sym(e), f(e).mul(&Monomial::var(self.z_sym(e))));
        }
        for j in &self.tags {
            assign.insert(hat.w_sym(j), Monomial::var(self.w_sym(j)));
        }
        MonomialMap::new(source, assign)
    }

    /// `θ̂∘g = f·θ` and the rescaled `μ` identity, over symbolic `f_e`.
    pub fn verify_parameter_transition(&self, with_f: bool) -> Result<Verdict> {
        let hat = ChartFrame::new(self.t.clone(), self.special.clone(), self.tags.clone(), Mark::Hat)?;
        let g = self.parameter_transition(&hat, with_f)?;
        let f = |e: Edge| if with_f { Monomial::var(self.f_sym(e)) } else { Monomial::one() };
        let mut v = Verdict::default();
        let pulled = compose(&hat.theta(), &g)?;
        let mut want = self.theta().assign;
        for e in self.t.tree().edges() {
            let w = want.get_mut(&self.zeta_sym(e)).expect("every edge has a ζ");
            *w = f(e).mul(w);
        }
        check_theta(&mut v, &pulled, &want, "θ̂∘g");
        let free_f = |e: Edge, sub: &IndexSubset| {
            self.t
                .tree()
                .descendants_geq(e)
                .into_iter()
                .filter(|x| !sub.covers(&self.ld.edge_span(*x)))
                .fold(Monomial::one(), |acc, x| acc.mul(&f(x)))
        };
        for sub in self.part.subsets() {
            let label = sub.display(self.t.tree());
            for &i in &self.part.plus {
                if sub.plus.contains(&i) {
                    continue;
                }
                let ei = self.special_edge(i)?;
                for e in self.ld.cross_section(i)? {
                    let got = hat.mu(e, i, &sub)?.substitute(|s| g.get(s))?.div(&free_f(e, &sub))?;
                    let want = self.mu(e, i, &sub)?.div(&free_f(ei, &sub))?;
                    expect_equal(&mut v, &got, &want, || format!("I={label}: rescaled μ̂_{{{};{i}}}", self.name(e)));
                }
            }
        }
        Ok(v)
    }

    /// The chart centred on the stratum `[t₍I₎]`: same special vertices, and
    /// one extra tag per contracted edge. Returns the primed frame and the
    /// contracted edge behind each extra tag.
    pub fn recentered_frame(&self, info: &StratumInfo) -> Result<(ChartFrame, BTreeMap<String, Edge>)> {
        let special2: Special = info.special.iter().map(|e| (self.t.level(*e), info.image(*e))).collect();
        let mut tags = self.tags.clone();
        let mut taken: BTreeSet<String> = tags.iter().cloned().collect();
        let mut edge_tags = BTreeMap::new();
        for &e in &info.res.contracted {
            let mut tag = format!("{}.c", self.name(e));
            while taken.contains(&tag) {
                tag.push('c');
            }
            taken.insert(tag.clone());
            tags.push(tag.clone());
            edge_tags.insert(tag, e);
        }
        let frame = ChartFrame::new(info.res.tree.clone(), special2, tags, Mark::Prime)?;
        Ok((frame, edge_tags))
    }

    /// The transition `g` from this chart, restricted to `𝔘°_{(I)}`, to the
    /// chart centred on `[t₍I₎]`.
    pub fn stratum_transition(&self, info: &StratumInfo, primed: &ChartFrame, edge_tags: &BTreeMap<String, Edge>) -> Result<MonomialMap> {
        let sub = &info.subset;
        let t2 = &info.res.tree;
        let ld2 = &info.ld;
        let root2 = t2.tree().root();
        // ∏_k μ_{𝖾†_{i(k)}; i(k+1); I}
        let mu_chain = |i: Level| -> Result<Monomial> {
            let mut out = Monomial::one();
            let mut cur = i;
            while cur < Level::zero() {
                let v = primed.special_edge(cur)?;
                let p = t2.tree().upper(v);
                if p == root2 {
                    break;
                }
                let next = t2.level(p);
                out = out.mul(&self.mu(info.origin[p], next, sub)?);
                cur = next;
            }
            Ok(out)
        };
        let above = |k: Level| -> Result<Monomial> {
            if k.is_zero() {
                return Ok(Monomial::one());
            }
            Ok(self
                .contracted_above(self.special_edge(k)?, sub)
                .into_iter()
                .fold(Monomial::one(), |acc, f| acc.mul(&self.theta_zeta[f])))
        };
        let mut assign = BTreeMap::new();
        for &i in &ld2.index_partition().plus {
            let up = ld2.sharp(i)?;
            let val = Monomial::var(self.eps_sym(i))
                .mul(&self.eps_prod_by(&self.ld.open_span(i, up), &self.sym_eps())?)
                .mul(&above(up)?.div(&above(i)?)?)
                .mul(&self.chain(i)?.div(&self.chain(up)?)?)
                .mul(&mu_chain(up)?.div(&mu_chain(i)?)?);
            assign.insert(primed.eps_sym(i), val);
        }
        for e2 in ld2.hat_edges() {
            if primed.is_special(e2) {
                continue;
            }
            let e = info.origin[e2];
            assign.insert(primed.u_sym(e2), self.mu(e, ld2.el(e2), sub)?);
        }
        for e2 in ld2.index_partition().minus {
            assign.insert(primed.z_sym(e2), self.theta_zeta[info.origin[e2]].clone());
        }
        for j in primed.tags() {
            let val = match edge_tags.get(j) {
                Some(&e) => self.theta_zeta[e].clone(),
                None => Monomial::var(self.w_sym(j)),
            };
            assign.insert(primed.w_sym(j), val);
        }
        MonomialMap::new(self.coords(), assign)
    }

    /// `θ′∘g = θ` and `g*μ′_{e;i;I′} = μ_{e;i;I⊔I′}` for every `I′ ⊆ 𝕀∖I`.
    pub fn verify_stratum_transition(&self, sub: &IndexSubset) -> Result<Verdict> {
        let info = self.stratum_info(sub)?;
        let (primed, edge_tags) = self.recentered_frame(&info)?;
        let g = self.stratum_transition(&info, &primed, &edge_tags)?;
        let label = sub.display(self.t.tree());
        let mut v = Verdict::default();

        let mut pulled = compose(&primed.theta(), &g)?;
        let renamed: Vec<(Symbol, Symbol)> = edge_tags
            .iter()
            .map(|(tag, e)| (Symbol::sigma(tag), self.zeta_sym(*e)))
            .collect();
        for (from, to) in renamed {
            let m = pulled.assign.remove(&from).expect("tag present");
            pulled.assign.insert(to, m);
        }
        check_theta(&mut v, &pulled, &self.theta().assign, &format!("I={label}: θ′∘g"));

        let rest: Vec<IndexSubset> = self.part.subsets().filter(|s| s.is_disjoint(sub)).collect();
        for sub2 in rest {
            let moved = transport_subset(&self.t, &info.res, &sub2)?;
            let both = sub.union(&sub2);
            let label2 = sub2.display(self.t.tree());
            for &i in &self.part.plus {
                if both.plus.contains(&i) {
                    continue;
                }
                for e in self.ld.cross_section(i)? {
                    let got = primed.mu(info.image(e), i, &moved)?.substitute(|s| g.get(s))?;
                    let want = self.mu(e, i, &both)?;
                    expect_equal(&mut v, &got, &want, || format!("I={label}, I′={label2}: g*μ′_{{{};{i}}}", self.name(e)));
                }
            }
        }
        Ok(v)
    }
}

impl ChartFrame {
    /// Text rendering of `θ` and of the chart on every stratum: the `ζ`
    /// coordinates, then the field coefficients `μ_{e;i;I}` level by level,
    /// all evaluated on `𝔘_{[t₍I₎]}`.
    pub fn report(&self) -> Result<String> {
        let tree = self.t.tree();
        let mut out = String::new();
        let line = |out: &mut String, s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(&mut out, format!("tree {}", self.t));
        let special: Vec<String> = self.special.iter().rev().map(|(i, v)| format!("{i}={}", tree.name(*v))).collect();
        line(&mut out, format!("special {}", special.join(" ")));
        line(&mut out, "theta".into());
        for e in tree.edges() {
            line(&mut out, format!("  {} = {}", self.zeta_sym(e), self.theta_zeta[e]));
        }
        for j in &self.tags {
            line(&mut out, format!("  {} = {}", Symbol::sigma(j), self.w_sym(j)));
        }
        let mut subs: Vec<IndexSubset> = self.part.subsets().collect();
        subs.sort_by_key(|s| s.len());
        for sub in subs {
            let stratum = self.stratum(&sub);
            let info = self.stratum_info(&sub)?;
            line(&mut out, format!("I = {} -> {}", sub.display(tree), info.res.tree));
            let zeta: Vec<String> = tree
                .edges()
                .map(|e| {
                    let v = if info.res.contracted.contains(&e) { self.theta_zeta[e].on_stratum(&stratum)? } else { Monomial::zero() };
                    Ok(format!("{}={v}", self.zeta_sym(e)))
                })
                .collect::<Result<_>>()?;
            line(&mut out, format!("  zeta {}", zeta.join(", ")));
            let table = self.mu_table(&sub)?;
            for &i in self.part.plus.iter().filter(|i| !sub.plus.contains(i)) {
                let row: Vec<String> = table
                    .range((i, 0)..(i, usize::MAX))
                    .map(|((_, e), m)| Ok(format!("{}: {}", tree.name(*e), m.on_stratum(&stratum)?)))
                    .collect::<Result<_>>()?;
                line(&mut out, format!("  level {i}: [{}]", row.join(", ")));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fig1, fig1_special, fig2, fig2_special};
    use crate::level::{all_specials, lvl};

    fn fig2_frame(tags: &[&str]) -> ChartFrame {
        let t = fig2();
        let sp = fig2_special(&t);
        ChartFrame::new(t, sp, tags.iter().map(|s| s.to_string()).collect(), Mark::Plain).unwrap()
    }

    fn sub(f: &ChartFrame, levels: &[i64]) -> IndexSubset {
        let ls: Vec<Level> = levels.iter().map(|l| lvl(*l)).collect();
        f.partition().subset_from(f.tree().tree(), &ls, &[]).unwrap()
    }

    fn m(s: &str) -> Monomial {
        s.parse().unwrap()
    }

    #[test]
    fn fig2_theta() {
        let f = fig2_frame(&[]);
        let th = f.theta();
        assert_eq!(th.assign[&Symbol::zeta("a")], m("eps(-1) * eps(-2)"));
        assert_eq!(th.assign[&Symbol::zeta("b")], m("eps(-1)"));
        assert_eq!(th.assign[&Symbol::zeta("c")], m("eps(-2) * u_c"));
        assert_eq!(th.assign[&Symbol::zeta("d")], m("eps(-2) * u_d"));
    }

    #[test]
    fn fig2_mu_values() {
        let f = fig2_frame(&[]);
        let e = |n: &str| f.tree().tree().edge(n).unwrap();
        assert_eq!(f.mu(e("c"), lvl(-2), &sub(&f, &[-1])).unwrap(), m("u_c * eps(-1)^-1"));
        assert_eq!(f.mu(e("a"), lvl(-1), &sub(&f, &[-2])).unwrap(), m("eps(-2)"));
        assert_eq!(f.mu(e("c"), lvl(-2), &sub(&f, &[])).unwrap(), m("u_c"));
        assert!(f.mu(e("c"), lvl(-1), &sub(&f, &[])).is_err());
    }

    #[test]
    fn fig2_inverse_on_open_stratum() {
        let f = fig2_frame(&[]);
        let info = f.stratum_info(&sub(&f, &[-1, -2])).unwrap();
        let psi = f.psi(&info).unwrap();
        assert_eq!(psi.assign[&f.eps_sym(lvl(-1))], m("zeta_b"));
        assert_eq!(psi.assign[&f.eps_sym(lvl(-2))], m("zeta_a * zeta_b^-1"));
        assert_eq!(psi.assign[&Symbol::u("c")], m("zeta_b * zeta_c * zeta_a^-1"));
    }

    #[test]
    fn fig2_all_checks() {
        for tags in [&[][..], &["j0", "j1"][..]] {
            let f = fig2_frame(tags);
            for s in f.partition().subsets() {
                for v in [f.verify_round_trip(&s), f.check_mu_vanishing(&s), f.check_stratum_image(&s), f.verify_stratum_transition(&s)] {
                    let v = v.unwrap();
                    assert!(v.ok(), "{:?}", v.failures);
                }
            }
            assert!(f.check_base_point().unwrap().ok());
            assert!(f.remark_identities().unwrap().ok());
            assert!(f.verify_parameter_transition(true).unwrap().ok());
            assert!(f.verify_parameter_transition(false).unwrap().ok());
        }
    }

    #[test]
    fn fig1_all_checks() {
        let t = fig1();
        let sp = fig1_special(&t);
        let f = ChartFrame::new(t.clone(), sp, vec!["j".into()], Mark::Plain).unwrap();
        for s in f.partition().subsets() {
            for v in [f.verify_round_trip(&s), f.check_mu_vanishing(&s), f.check_stratum_image(&s)] {
                let v = v.unwrap();
                assert!(v.ok(), "{:?}", v.failures);
            }
        }
        assert!(f.remark_identities().unwrap().ok());
        let v = f.verify_parameter_transition(true).unwrap();
        assert!(v.ok(), "{:?}", v.failures);
        let ld = t.level_data().unwrap();
        for other in all_specials(&t, &ld) {
            let v = f.verify_special_vertex_transition(&other).unwrap();
            assert!(v.ok(), "{:?}", v.failures);
        }
    }
}
