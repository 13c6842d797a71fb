//! Nash and q-strong equilibria.
//!
//! A coalition `C` deviates strongly when it recolors every member (each to
//! a color different from its current one) and every member ends up with
//! strictly fewer same-colored neighbors. Coalitions are scanned by size,
//! then lexicographically; recolorings of a coalition are scanned
//! lexicographically by member color. The first hit in that order is the
//! reported certificate, so results do not depend on how work is split.
//!
//! The scan over recolorings is a depth-first search that rejects a partial
//! recoloring as soon as some member whose neighborhood inside `C` is fully
//! colored fails to improve. That rejection is exact; the optional pruning
//! levels restrict the candidate colors further:
//!
//! | level | candidate colors for member `v` |
//! |-------|---------------------------------|
//! | L0 | every color except `σ_v` |
//! | L1 | colors held in `σ` by some member of `C`, except `σ_v` |
//! | L2 | colors `σ_w` of neighbors `w ∈ C` with `σ_w ≠ σ_v` |
//! | L3 | as L2, and `C` must induce a connected subgraph |
//!
//! L1 to L3 preserve the existence answer only when `σ` is a Nash
//! equilibrium; the search records whether that held.

use std::collections::HashSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{EquilibriumError, GameError};
use crate::game::{self, ClassMasks, Color, Coloring};
use crate::graph::{Graph, VertexSet, MAX_VERTICES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Pruning {
    L0,
    L1,
    L2,
    L3,
}

impl Pruning {
    pub const ALL: [Pruning; 4] = [Pruning::L0, Pruning::L1, Pruning::L2, Pruning::L3];

    pub fn level(self) -> u8 {
        self as u8
    }

    pub fn from_level(level: u8) -> Option<Pruning> {
        Pruning::ALL.get(level as usize).copied()
    }

    /// Whether the existence answer relies on `σ` being a Nash equilibrium.
    pub fn requires_nash(self) -> bool {
        self != Pruning::L0
    }
}

impl From<Pruning> for u8 {
    fn from(p: Pruning) -> u8 {
        p.level()
    }
}

impl TryFrom<u8> for Pruning {
    type Error = String;

    fn try_from(level: u8) -> Result<Self, String> {
        Pruning::from_level(level).ok_or_else(|| format!("pruning level {level} outside 0..=3"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Minimality {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MemberGain {
    pub vertex: usize,
    pub before: usize,
    pub after: usize,
}

impl MemberGain {
    pub fn gain(&self) -> i64 {
        self.after as i64 - self.before as i64
    }
}

/// Witness of a strong deviation from some coloring `σ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviationCertificate {
    pub coalition: VertexSet,
    /// Full coloring after the deviation; equals `σ` off the coalition.
    pub target: Coloring,
    /// Payoffs of the members before and after, in vertex order.
    pub gains: Vec<MemberGain>,
    pub minimal: Minimality,
    pub delta_s: i64,
    pub pruning: Pruning,
    pub sigma_is_nash: bool,
}

impl DeviationCertificate {
    /// Recomputes every field from scratch with the payoff functions and
    /// reports whether the certificate is a genuine strong deviation.
    pub fn verify(&self, g: &Graph, sigma: &Coloring) -> Result<bool, GameError> {
        if game::deviating_set(sigma, &self.target)? != self.coalition || self.coalition.is_empty() {
            return Ok(false);
        }
        let mut gains = Vec::with_capacity(self.coalition.len());
        for v in self.coalition {
            gains.push(MemberGain {
                vertex: v,
                before: game::payoff(g, sigma, v)?,
                after: game::payoff(g, &self.target, v)?,
            });
        }
        Ok(gains == self.gains
            && gains.iter().all(|m| m.gain() >= 1)
            && game::cut_difference(g, sigma, &self.target)? == self.delta_s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsenceRecord {
    pub q: usize,
    pub pruning: Pruning,
    pub sigma_is_nash: bool,
    pub coalitions_examined: u64,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DeviationSearch {
    Found(DeviationCertificate),
    Absent(AbsenceRecord),
}

impl DeviationSearch {
    pub fn certificate(&self) -> Option<&DeviationCertificate> {
        match self {
            DeviationSearch::Found(c) => Some(c),
            DeviationSearch::Absent(_) => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, DeviationSearch::Found(_))
    }
}

/// Least crowded color for `v` (smallest index among ties) and how many
/// fewer same-colored neighbors it gives compared with `σ_v`.
pub fn best_response(g: &Graph, sigma: &Coloring, v: usize) -> Result<(Color, usize), GameError> {
    sigma.check_against(g)?;
    g.check_vertex(v)?;
    let masks = sigma.class_masks();
    Ok(best_response_unchecked(g, &masks, sigma.k(), sigma.color(v), v))
}

fn best_response_unchecked(g: &Graph, masks: &ClassMasks, k: usize, own: Color, v: usize) -> (Color, usize) {
    let row = g.neighbors(v).bits();
    let crowd = |a: usize| (row & masks[a]).count_ones() as usize;
    let (best, fewest) = (0..k).map(|a| (a, crowd(a))).min_by_key(|&(a, c)| (c, a)).expect("k >= 1");
    (best as Color + 1, crowd(own as usize - 1) - fewest)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NashCheck {
    pub is_nash: bool,
    /// First vertex (in index order) with an improving move, and its best
    /// response.
    pub witness: Option<(usize, Color)>,
}

pub fn is_nash(g: &Graph, sigma: &Coloring) -> Result<NashCheck, GameError> {
    sigma.check_against(g)?;
    let masks = sigma.class_masks();
    let witness = (0..g.n()).find_map(|v| {
        let (color, gain) = best_response_unchecked(g, &masks, sigma.k(), sigma.color(v), v);
        (gain > 0).then_some((v, color))
    });
    Ok(NashCheck { is_nash: witness.is_none(), witness })
}

/// Per-instance state shared by every coalition scan.
pub(crate) struct Searcher<'a> {
    g: &'a Graph,
    sigma: &'a Coloring,
    masks: ClassMasks,
    /// `δ(v, σ, σ_v)`.
    crowd: [u32; MAX_VERTICES],
    pub(crate) nodes: u64,
}

/// Candidate colors of each member, as bitmasks over `0..k` (bit `a - 1`).
type Candidates = [u16; MAX_VERTICES];

impl<'a> Searcher<'a> {
    pub(crate) fn new(g: &'a Graph, sigma: &'a Coloring) -> Self {
        let masks = sigma.class_masks();
        let mut crowd = [0; MAX_VERTICES];
        for v in 0..g.n() {
            crowd[v] = (g.neighbors(v).bits() & masks[sigma.color(v) as usize - 1]).count_ones();
        }
        Searcher { g, sigma, masks, crowd, nodes: 0 }
    }

    fn candidates(&self, coalition: VertexSet, pruning: Pruning) -> Option<Candidates> {
        if pruning == Pruning::L3 && !self.g.is_connected_within(coalition) {
            return None;
        }
        let all: u16 = ((1u32 << self.sigma.k()) - 1) as u16;
        let held: u16 = coalition.iter().fold(0, |acc, v| acc | 1 << (self.sigma.color(v) - 1));
        let mut out = [0u16; MAX_VERTICES];
        for v in coalition {
            let own = 1u16 << (self.sigma.color(v) - 1);
            let allowed = match pruning {
                Pruning::L0 => all,
                Pruning::L1 => held,
                Pruning::L2 | Pruning::L3 => self
                    .g
                    .neighbors(v)
                    .intersection(coalition)
                    .iter()
                    .fold(0, |acc, w| acc | 1 << (self.sigma.color(w) - 1)),
            } & !own;
            if allowed == 0 {
                return None;
            }
            out[v] = allowed;
        }
        Some(out)
    }

    /// Visits every strong recoloring of `coalition` in lexicographic order
    /// until `visit` breaks.
    fn scan_coalition<F>(&mut self, coalition: VertexSet, pruning: Pruning, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&mut Self, &[Color]) -> ControlFlow<()>,
    {
        let Some(cand) = self.candidates(coalition, pruning) else {
            return ControlFlow::Continue(());
        };
        let members: Vec<usize> = coalition.iter().collect();
        let mut position = [0usize; MAX_VERTICES];
        for (i, &v) in members.iter().enumerate() {
            position[v] = i;
        }
        // A member can be checked once it and all its coalition neighbors
        // are colored.
        let mut checks = vec![0u64; members.len()];
        for (i, &v) in members.iter().enumerate() {
            let ready = self.g.neighbors(v).intersection(coalition).iter().map(|w| position[w]).fold(i, usize::max);
            checks[ready] |= 1 << i;
        }
        let mut gmasks = self.masks;
        for v in coalition {
            gmasks[self.sigma.color(v) as usize - 1] &= !(1u64 << v);
        }
        let mut assignment = vec![0 as Color; members.len()];
        self.dfs(0, &members, &cand, &checks, &mut gmasks, &mut assignment, visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs<F>(
        &mut self,
        depth: usize,
        members: &[usize],
        cand: &Candidates,
        checks: &[u64],
        gmasks: &mut ClassMasks,
        assignment: &mut [Color],
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&mut Self, &[Color]) -> ControlFlow<()>,
    {
        if depth == members.len() {
            return visit(self, assignment);
        }
        let v = members[depth];
        let mut options = cand[v];
        while options != 0 {
            let a = options.trailing_zeros() as usize;
            options &= options - 1;
            self.nodes += 1;
            gmasks[a] |= 1 << v;
            assignment[depth] = a as Color + 1;
            let improves = VertexSet::from_bits(checks[depth]).iter().all(|i| {
                let w = members[i];
                let color = assignment[i] as usize - 1;
                (self.g.neighbors(w).bits() & gmasks[color]).count_ones() < self.crowd[w]
            });
            let flow = if improves {
                self.dfs(depth + 1, members, cand, checks, gmasks, assignment, visit)
            } else {
                ControlFlow::Continue(())
            };
            gmasks[a] &= !(1 << v);
            flow?;
        }
        ControlFlow::Continue(())
    }

    pub(crate) fn coalition_deviates(&mut self, coalition: VertexSet, pruning: Pruning) -> bool {
        self.scan_coalition(coalition, pruning, &mut |_, _| ControlFlow::Break(())).is_break()
    }

    fn certificate(&self, coalition: VertexSet, assignment: &[Color], pruning: Pruning, nash: bool) -> DeviationCertificate {
        let mut target = self.sigma.clone();
        for (v, &c) in coalition.iter().zip(assignment) {
            target.set(v, c);
        }
        let tmasks = target.class_masks();
        let gains = coalition
            .iter()
            .map(|v| {
                let row = self.g.neighbors(v).bits();
                let degree = row.count_ones() as usize;
                MemberGain {
                    vertex: v,
                    before: degree - self.crowd[v] as usize,
                    after: degree - (row & tmasks[target.color(v) as usize - 1]).count_ones() as usize,
                }
            })
            .collect();
        let k = self.sigma.k();
        let delta_s = game::cut_value_unchecked(self.g, &tmasks, k) as i64
            - game::cut_value_unchecked(self.g, &self.masks, k) as i64;
        DeviationCertificate {
            coalition,
            target,
            gains,
            minimal: Minimality::Unknown,
            delta_s,
            pruning,
            sigma_is_nash: nash,
        }
    }
}

/// Coalitions of `0..n` with exactly `size` members, in lexicographic order.
pub fn coalitions_of_size(n: usize, size: usize) -> impl Iterator<Item = VertexSet> {
    let mut idx: Option<Vec<usize>> = (size <= n).then(|| (0..size).collect());
    std::iter::from_fn(move || {
        let current = idx.as_mut()?;
        let set: VertexSet = current.iter().copied().collect();
        let mut i = size;
        loop {
            if i == 0 {
                idx = None;
                break;
            }
            i -= 1;
            if current[i] < n - size + i {
                current[i] += 1;
                for j in i + 1..size {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
        Some(set)
    })
}

fn check_q(g: &Graph, q: usize) -> Result<(), EquilibriumError> {
    if q == 0 || q > g.n().max(1) {
        return Err(EquilibriumError::QOutOfRange { q, n: g.n() });
    }
    Ok(())
}

/// First strong deviation by a coalition of at most `q` players, in scan
/// order, or a record of its absence.
///
/// At L0 the reported coalition has minimum size among all deviating
/// coalitions, so it is certified minimal.
pub fn find_strong_deviation(
    g: &Graph,
    sigma: &Coloring,
    q: usize,
    pruning: Pruning,
) -> Result<DeviationSearch, EquilibriumError> {
    sigma.check_against(g)?;
    check_q(g, q)?;
    let nash = is_nash(g, sigma)?.is_nash;
    let mut searcher = Searcher::new(g, sigma);
    let mut examined = 0u64;
    for size in 1..=q.min(g.n()) {
        for coalition in coalitions_of_size(g.n(), size) {
            examined += 1;
            let mut hit = None;
            let flow = searcher.scan_coalition(coalition, pruning, &mut |_, assignment| {
                hit = Some(assignment.to_vec());
                ControlFlow::Break(())
            });
            if flow.is_break() {
                let assignment = hit.expect("break carries an assignment");
                let mut cert = searcher.certificate(coalition, &assignment, pruning, nash);
                if pruning == Pruning::L0 {
                    cert.minimal = Minimality::Yes;
                }
                return Ok(DeviationSearch::Found(cert));
            }
        }
    }
    Ok(DeviationSearch::Absent(AbsenceRecord {
        q,
        pruning,
        sigma_is_nash: nash,
        coalitions_examined: examined,
        nodes: searcher.nodes,
    }))
}

/// True iff no coalition of at most `q` players can deviate strongly
/// (exhaustive, no pruning).
pub fn is_q_se(g: &Graph, sigma: &Coloring, q: usize) -> Result<bool, EquilibriumError> {
    Ok(!find_strong_deviation(g, sigma, q, Pruning::L0)?.is_found())
}

/// Every strong deviation by coalitions of at most `q` players, in scan
/// order, each with its minimality resolved.
pub fn all_strong_deviations(g: &Graph, sigma: &Coloring, q: usize) -> Result<Vec<DeviationCertificate>, EquilibriumError> {
    sigma.check_against(g)?;
    check_q(g, q)?;
    let nash = is_nash(g, sigma)?.is_nash;
    let mut searcher = Searcher::new(g, sigma);
    let mut found = Vec::new();
    for size in 1..=q.min(g.n()) {
        for coalition in coalitions_of_size(g.n(), size) {
            let _ = searcher.scan_coalition(coalition, Pruning::L0, &mut |s, assignment| {
                found.push(s.certificate(coalition, assignment, Pruning::L0, nash));
                ControlFlow::Continue(())
            });
        }
    }
    // Every proper subset of a scanned coalition was scanned too.
    let deviating: HashSet<u64> = found.iter().map(|c| c.coalition.bits()).collect();
    for cert in &mut found {
        let c = cert.coalition.bits();
        let mut sub = (c - 1) & c;
        let mut minimal = true;
        while sub != 0 {
            if deviating.contains(&sub) {
                minimal = false;
                break;
            }
            sub = (sub - 1) & c;
        }
        cert.minimal = if minimal { Minimality::Yes } else { Minimality::No };
    }
    Ok(found)
}

/// True iff no proper nonempty subset of the certificate's coalition admits
/// any strong deviation from `sigma`.
pub fn is_minimal(g: &Graph, sigma: &Coloring, cert: &DeviationCertificate) -> Result<bool, EquilibriumError> {
    sigma.check_against(g)?;
    g.check_set(cert.coalition)?;
    let mut searcher = Searcher::new(g, sigma);
    let c = cert.coalition.bits();
    let mut sub = c.wrapping_sub(1) & c;
    while sub != 0 {
        if searcher.coalition_deviates(VertexSet::from_bits(sub), Pruning::L0) {
            return Ok(false);
        }
        sub = (sub - 1) & c;
    }
    Ok(true)
}

/// Structural claims checked on a minimal strong deviation from a Nash
/// equilibrium.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    /// The coalition uses the same color set before and after.
    ColorsPreserved,
    /// Each member adopts the old color of a differently colored neighbor
    /// inside the coalition.
    NeighborColor,
    /// The coalition induces a connected subgraph.
    Connected,
    /// The coalition induces an isolated component of the graph: connected,
    /// with no edge leaving it.
    IsolatedComponent,
    /// The coalition has at least two members.
    SizeAtLeastTwo,
    /// `ΔS ≥ |C| - P_C(σ, γ)`.
    CutLowerBound,
    /// `ΔS > 0` when `|K_C(σ)| ∈ {|C| - 3, |C| - 2}`.
    CutIncreaseFewColors,
    /// `ΔS > 0` when `|C| ≤ 7`.
    CutIncreaseSmallCoalition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub sigma: Coloring,
    pub gamma: Coloring,
    pub coalition: VertexSet,
}

impl Instance {
    pub fn new(g: &Graph, sigma: &Coloring, gamma: &Coloring, coalition: VertexSet) -> Self {
        Instance { n: g.n(), edges: g.edges().collect(), sigma: sigma.clone(), gamma: gamma.clone(), coalition }
    }

    pub fn graph(&self) -> Result<Graph, crate::GraphError> {
        Graph::from_edges(self.n, self.edges.iter().copied())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub claim: Claim,
    pub detail: String,
    pub instance: Instance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub kc_preserved: bool,
    pub neighbor_color_ok: bool,
    pub connected_ok: bool,
    pub isolated_component_ok: bool,
    pub size_ge_2: bool,
    pub cut_lower_bound_ok: bool,
    /// `None` when the few-colors hypothesis does not apply.
    pub few_colors_increase_ok: Option<bool>,
    /// `None` when the coalition has more than seven members.
    pub small_coalition_increase_ok: Option<bool>,
    pub violations: Vec<Finding>,
}

impl AuditReport {
    pub fn all_hold(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn holds(&self, claim: Claim) -> bool {
        !self.violations.iter().any(|f| f.claim == claim)
    }
}

/// Checks the structural claims on a minimal strong deviation from a Nash
/// equilibrium. Refuses certificates that are not strong, not minimal, or
/// start from a coloring that is not a Nash equilibrium.
pub fn audit_minimal_deviation(
    g: &Graph,
    sigma: &Coloring,
    cert: &DeviationCertificate,
) -> Result<AuditReport, EquilibriumError> {
    let fail = |why: &str| Err(EquilibriumError::Precondition(why.to_string()));
    sigma.check_against(g)?;
    cert.target.check_against(g)?;
    let c = cert.coalition;
    let gamma = &cert.target;
    if c.is_empty() {
        return fail("empty coalition");
    }
    if game::deviating_set(sigma, gamma)? != c {
        return fail("target does not differ from sigma exactly on the coalition");
    }
    if !cert.verify(g, sigma)? {
        return fail("certificate is not a verified strong deviation");
    }
    if !is_nash(g, sigma)?.is_nash {
        return fail("sigma is not a Nash equilibrium");
    }
    if !is_minimal(g, sigma, cert)? {
        return fail("coalition is not minimal");
    }

    let mut violations = Vec::new();
    let mut record = |claim: Claim, ok: bool, detail: String| {
        if !ok {
            violations.push(Finding { claim, detail, instance: Instance::new(g, sigma, gamma, c) });
        }
        ok
    };

    let before = game::coalition_colors(sigma, c)?;
    let after = game::coalition_colors(gamma, c)?;
    let kc_preserved = record(
        Claim::ColorsPreserved,
        before == after,
        format!("K_C(sigma) = {before:?}, K_C(gamma) = {after:?}"),
    );

    let orphan = c.iter().find(|&v| {
        !g.neighbors(v).intersection(c).iter().any(|w| sigma.color(w) != sigma.color(v) && gamma.color(v) == sigma.color(w))
    });
    let neighbor_color_ok = record(
        Claim::NeighborColor,
        orphan.is_none(),
        format!("member {orphan:?} adopts no coalition neighbor's color"),
    );

    let connected = g.is_connected_within(c);
    let connected_ok = record(Claim::Connected, connected, "G(C) is disconnected".to_string());
    let leaving: usize = c.iter().map(|v| g.neighbors(v).difference(c).len()).sum();
    let isolated_component_ok = record(
        Claim::IsolatedComponent,
        g.is_isolated_component(c)?,
        format!("G(C) connected: {connected}, edges leaving C: {leaving}"),
    );

    let size_ge_2 = record(Claim::SizeAtLeastTwo, c.len() >= 2, format!("|C| = {}", c.len()));

    let pc = game::p_c(g, sigma, gamma, c)?;
    let delta = cert.delta_s;
    let cut_lower_bound_ok = record(
        Claim::CutLowerBound,
        delta >= c.len() as i64 - pc as i64,
        format!("delta_s = {delta}, |C| = {}, P_C = {pc}", c.len()),
    );

    let colors = before.len();
    let few_colors_increase_ok = (colors + 2 == c.len() || colors + 3 == c.len()).then(|| {
        record(Claim::CutIncreaseFewColors, delta > 0, format!("delta_s = {delta}, |K_C| = {colors}, |C| = {}", c.len()))
    });
    let small_coalition_increase_ok = (c.len() <= 7)
        .then(|| record(Claim::CutIncreaseSmallCoalition, delta > 0, format!("delta_s = {delta}, |C| = {}", c.len())));

    Ok(AuditReport {
        kc_preserved,
        neighbor_color_ok,
        connected_ok,
        isolated_component_ok,
        size_ge_2,
        cut_lower_bound_ok,
        few_colors_increase_ok,
        small_coalition_increase_ok,
        violations,
    })
}
