//! Orbit sets, the J₀ index of U-map curves, orbit scores and U-tower audits.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::rotation::{
    cz_index, partition_negative, partition_pair, partition_positive, Partition, Rotation, RotationError, DEFAULT_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrbitKind {
    Elliptic,
    PositiveHyperbolic,
    NegativeHyperbolic,
}

impl OrbitKind {
    pub fn is_hyperbolic(self) -> bool {
        self != OrbitKind::Elliptic
    }

    /// Integer θ is positive hyperbolic, θ ∈ ℤ + 1/2 negative hyperbolic, anything else elliptic.
    pub fn from_rotation(theta: &Rotation) -> OrbitKind {
        if theta.is_integral(DEFAULT_TOL) {
            OrbitKind::PositiveHyperbolic
        } else if theta.is_half_odd(DEFAULT_TOL) {
            OrbitKind::NegativeHyperbolic
        } else {
            OrbitKind::Elliptic
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OrbitError {
    NonPositiveAction {
        id: u32,
    },
    KindMismatch {
        id: u32,
    },
    DuplicateOrbit {
        id: u32,
    },
    ZeroMultiplicity {
        id: u32,
    },
    UnknownOrbit {
        id: u32,
    },
    /// C₁ ends at an orbit exceed its multiplicity in the endpoint set.
    EndsExceedMultiplicity {
        id: u32,
    },
    /// The C₀ flag disagrees with the multiplicity deficit at an orbit.
    CoverageMismatch {
        id: u32,
    },
    EmptyEndGroup {
        id: u32,
    },
    NegativeAction,
    /// Curve `index` does not start where curve `index − 1` ends.
    Adjacency {
        index: usize,
    },
    Rotation(RotationError),
}

impl From<RotationError> for OrbitError {
    fn from(e: RotationError) -> Self {
        OrbitError::Rotation(e)
    }
}

impl fmt::Display for OrbitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitError::NonPositiveAction { id } => write!(f, "orbit {id}: action must be positive"),
            OrbitError::KindMismatch { id } => write!(f, "orbit {id}: kind does not match rotation number"),
            OrbitError::DuplicateOrbit { id } => write!(f, "orbit {id} listed twice"),
            OrbitError::ZeroMultiplicity { id } => write!(f, "orbit {id}: multiplicity must be positive"),
            OrbitError::UnknownOrbit { id } => write!(f, "orbit {id} is not in the endpoint set"),
            OrbitError::EndsExceedMultiplicity { id } => write!(f, "orbit {id}: ends exceed multiplicity"),
            OrbitError::CoverageMismatch { id } => write!(f, "orbit {id}: trivial-cylinder flag inconsistent"),
            OrbitError::EmptyEndGroup { id } => write!(f, "orbit {id}: end group without ends"),
            OrbitError::NegativeAction => write!(f, "curve action must equal A(alpha) - A(beta) >= 0"),
            OrbitError::Adjacency { index } => write!(f, "tower adjacency broken at curve {index}"),
            OrbitError::Rotation(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimpleOrbit {
    pub id: u32,
    pub action: f64,
    pub theta: Rotation,
    pub kind: OrbitKind,
    /// Number of iterates of the map covered by the orbit (mapping-torus degree).
    pub period: u32,
}

impl SimpleOrbit {
    pub fn new(id: u32, action: f64, theta: Rotation) -> Result<Self, OrbitError> {
        let kind = OrbitKind::from_rotation(&theta);
        Self::with_kind(id, action, theta, kind)
    }

    pub fn with_kind(id: u32, action: f64, theta: Rotation, kind: OrbitKind) -> Result<Self, OrbitError> {
        if action.is_nan() || action <= 0.0 {
            return Err(OrbitError::NonPositiveAction { id });
        }
        if OrbitKind::from_rotation(&theta) != kind {
            return Err(OrbitError::KindMismatch { id });
        }
        Ok(SimpleOrbit { id, action, theta, kind, period: 1 })
    }

    pub fn with_period(mut self, period: u32) -> Self {
        self.period = period;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeContext {
    /// Σ mᵢ.
    Abstract,
    /// Σ qᵢ·mᵢ with qᵢ the orbit period.
    MappingTorus,
}

/// Finite set of (orbit, multiplicity) pairs, sorted by orbit id.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OrbitSet {
    entries: Vec<(SimpleOrbit, u32)>,
}

impl OrbitSet {
    pub fn empty() -> Self {
        OrbitSet { entries: Vec::new() }
    }

    pub fn new(mut entries: Vec<(SimpleOrbit, u32)>) -> Result<Self, OrbitError> {
        entries.sort_by_key(|(o, _)| o.id);
        for w in entries.windows(2) {
            if w[0].0.id == w[1].0.id {
                return Err(OrbitError::DuplicateOrbit { id: w[0].0.id });
            }
        }
        if let Some((o, _)) = entries.iter().find(|(_, m)| *m == 0) {
            return Err(OrbitError::ZeroMultiplicity { id: o.id });
        }
        Ok(OrbitSet { entries })
    }

    pub fn entries(&self) -> &[(SimpleOrbit, u32)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&(SimpleOrbit, u32)> {
        self.entries.binary_search_by_key(&id, |(o, _)| o.id).ok().map(|i| &self.entries[i])
    }

    pub fn multiplicity(&self, id: u32) -> u32 {
        self.get(id).map_or(0, |(_, m)| *m)
    }

    pub fn degree(&self, ctx: DegreeContext) -> u64 {
        self.entries
            .iter()
            .map(|(o, m)| match ctx {
                DegreeContext::Abstract => *m as u64,
                DegreeContext::MappingTorus => o.period as u64 * *m as u64,
            })
            .sum()
    }

    /// Action as integer coefficients over orbit ids.
    pub fn action_vector(&self) -> BTreeMap<u32, i64> {
        self.entries.iter().map(|(o, m)| (o.id, *m as i64)).collect()
    }

    /// Disjoint union; fails if an orbit id occurs in both.
    pub fn disjoint_union(&self, other: &OrbitSet) -> Result<OrbitSet, OrbitError> {
        let mut v = self.entries.clone();
        v.extend(other.entries.iter().cloned());
        OrbitSet::new(v)
    }
}

/// Σ mᵢ·𝒜(αᵢ).
pub fn orbit_set_action(alpha: &OrbitSet) -> f64 {
    alpha.entries.iter().map(|(o, m)| *m as f64 * o.action).sum()
}

/// Hyperbolic orbits may only appear with multiplicity one.
pub fn is_ech_generator(alpha: &OrbitSet) -> bool {
    alpha.entries.iter().all(|(o, m)| !o.kind.is_hyperbolic() || *m == 1)
}

pub fn cz_top(alpha: &OrbitSet) -> Result<i64, OrbitError> {
    let mut total = 0;
    for (o, m) in &alpha.entries {
        total += cz_index(&o.theta, *m as u64)?;
    }
    Ok(total)
}

/// Ends of the non-trivial component C₁ at one orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndGroup {
    pub orbit: u32,
    pub mults: Vec<u32>,
    /// Whether the trivial-cylinder part C₀ also covers this orbit.
    pub c0_present: bool,
}

impl EndGroup {
    pub fn total(&self) -> u32 {
        self.mults.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveData {
    pub genus: u32,
    pub positive_ends: Vec<EndGroup>,
    pub negative_ends: Vec<EndGroup>,
    pub c_tau: i64,
    pub alpha: OrbitSet,
    pub beta: OrbitSet,
    pub action: f64,
}

impl CurveData {
    /// Builds a curve and fills in its action from the endpoints.
    pub fn new(
        genus: u32,
        positive_ends: Vec<EndGroup>,
        negative_ends: Vec<EndGroup>,
        c_tau: i64,
        alpha: OrbitSet,
        beta: OrbitSet,
    ) -> Result<Self, OrbitError> {
        let action = orbit_set_action(&alpha) - orbit_set_action(&beta);
        let c = CurveData { genus, positive_ends, negative_ends, c_tau, alpha, beta, action };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), OrbitError> {
        check_ends(&self.positive_ends, &self.alpha)?;
        check_ends(&self.negative_ends, &self.beta)?;
        let expected = orbit_set_action(&self.alpha) - orbit_set_action(&self.beta);
        let scale = 1.0 + orbit_set_action(&self.alpha).abs();
        if expected < -1e-12 * scale || (self.action - expected).abs() > 1e-9 * scale {
            return Err(OrbitError::NegativeAction);
        }
        Ok(())
    }

    pub fn end_count(&self) -> usize {
        self.positive_ends.iter().chain(&self.negative_ends).map(|g| g.mults.len()).sum()
    }

    /// Genus zero with exactly one positive and one negative end.
    pub fn is_cylinder(&self) -> bool {
        let pos: usize = self.positive_ends.iter().map(|g| g.mults.len()).sum();
        let neg: usize = self.negative_ends.iter().map(|g| g.mults.len()).sum();
        self.genus == 0 && pos == 1 && neg == 1
    }

    /// Every orbit with C₁ ends is also covered by C₀.
    pub fn full_coverage(&self) -> bool {
        self.positive_ends.iter().chain(&self.negative_ends).all(|g| g.c0_present)
    }
}

fn check_ends(groups: &[EndGroup], set: &OrbitSet) -> Result<(), OrbitError> {
    let mut seen: Vec<u32> = Vec::new();
    for g in groups {
        if seen.contains(&g.orbit) {
            return Err(OrbitError::DuplicateOrbit { id: g.orbit });
        }
        seen.push(g.orbit);
        if g.mults.is_empty() || g.mults.contains(&0) {
            return Err(OrbitError::EmptyEndGroup { id: g.orbit });
        }
        let m = set.multiplicity(g.orbit);
        if m == 0 {
            return Err(OrbitError::UnknownOrbit { id: g.orbit });
        }
        let t = g.total();
        if t > m {
            return Err(OrbitError::EndsExceedMultiplicity { id: g.orbit });
        }
        if g.c0_present != (t < m) {
            return Err(OrbitError::CoverageMismatch { id: g.orbit });
        }
    }
    Ok(())
}

/// J₀ = −2 + 2g + Σ (2·#ends − [C₀ absent]) over orbits where C₁ has ends.
pub fn j0_of_curve(c: &CurveData) -> Result<i64, OrbitError> {
    check_ends(&c.positive_ends, &c.alpha)?;
    check_ends(&c.negative_ends, &c.beta)?;
    let e: i64 = c
        .positive_ends
        .iter()
        .chain(&c.negative_ends)
        .map(|g| 2 * g.mults.len() as i64 - if g.c0_present { 0 } else { 1 })
        .sum();
    Ok(-2 + 2 * c.genus as i64 + e)
}

/// I = J₀ + 2c_τ + CZ^top(α) − CZ^top(β).
pub fn ech_index_from_j0(c: &CurveData) -> Result<i64, OrbitError> {
    Ok(j0_of_curve(c)? + 2 * c.c_tau + cz_top(&c.alpha)? - cz_top(&c.beta)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Topology {
    pub genus: u32,
    pub ends: u32,
    /// Number of orbits where C₀ is absent.
    pub absent: u32,
}

/// All (genus, end count, absence count) consistent with a J₀ value, for
/// curves with at least one end of each sign.
pub fn forced_topology(j0: i64, full_coverage: bool) -> Vec<Topology> {
    let mut out = Vec::new();
    // −2 + 2g + 2E − A = j0 with 0 ≤ A ≤ E and E ≥ 2 bounds g and E.
    if j0 + 2 < 2 {
        return out;
    }
    let bound = (j0 + 2) as u32;
    for genus in 0..=bound / 2 {
        for ends in 2..=bound {
            let max_absent = if full_coverage { 0 } else { ends };
            for absent in 0..=max_absent {
                if -2 + 2 * genus as i64 + 2 * ends as i64 - absent as i64 == j0 {
                    out.push(Topology { genus, ends, absent });
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Components {
    pub is_p_plus: bool,
    pub is_p_minus: bool,
    pub is_special: bool,
}

pub fn component_classification(orbit: &SimpleOrbit, m: u32) -> Result<Components, OrbitError> {
    let (pp, pm) = partition_pair(&orbit.theta, m as u64)?;
    Ok(classify_partitions(&pp, &pm, m))
}

fn classify_partitions(pp: &Partition, pm: &Partition, m: u32) -> Components {
    Components { is_p_plus: pp.is_whole(), is_p_minus: pm.is_whole(), is_special: m > 1 && !pp.contains(1) }
}

/// S(α) = #p⁺-components + #special components − #p⁻-components.
pub fn orbit_set_score(alpha: &OrbitSet) -> Result<i64, OrbitError> {
    let mut s = 0;
    for (o, m) in alpha.entries() {
        let c = component_classification(o, *m)?;
        s += c.is_p_plus as i64 + c.is_special as i64 - c.is_p_minus as i64;
    }
    Ok(s)
}

/// Memoized per-component scores, keyed by orbit id and multiplicity.
///
/// An entry is reused only when the orbit's rotation number matches the one it was
/// computed with.
#[derive(Clone, Debug, Default)]
pub struct ScoreMemo {
    table: BTreeMap<(u32, u32), (Rotation, i64)>,
}

impl ScoreMemo {
    pub fn new() -> Self {
        Self::default()
    }

    fn component(&mut self, o: &SimpleOrbit, m: u32) -> Result<i64, OrbitError> {
        if let Some((theta, v)) = self.table.get(&(o.id, m)) {
            if *theta == o.theta {
                return Ok(*v);
            }
        }
        let c = component_classification(o, m)?;
        let v = c.is_p_plus as i64 + c.is_special as i64 - c.is_p_minus as i64;
        self.table.insert((o.id, m), (o.theta, v));
        Ok(v)
    }

    /// Same value as [`orbit_set_score`].
    pub fn set_score(&mut self, alpha: &OrbitSet) -> Result<i64, OrbitError> {
        let mut s = 0;
        for (o, m) in alpha.entries() {
            s += self.component(o, *m)?;
        }
        Ok(s)
    }

    /// Same value as [`total_score`].
    pub fn total_score(&mut self, c: &CurveData) -> Result<i64, OrbitError> {
        Ok(self.set_score(&c.alpha)? - self.set_score(&c.beta)? + 3 * y_of_curve(c)?)
    }
}

/// y(C) = J₀ − 2.
pub fn y_of_curve(c: &CurveData) -> Result<i64, OrbitError> {
    Ok(j0_of_curve(c)? - 2)
}

/// T(C) = S(α) − S(β) + 3y.
pub fn total_score(c: &CurveData) -> Result<i64, OrbitError> {
    Ok(orbit_set_score(&c.alpha)? - orbit_set_score(&c.beta)? + 3 * y_of_curve(c)?)
}

/// K(α) = −#components with multiplicity above one.
pub fn k_of_set(alpha: &OrbitSet) -> i64 {
    -(alpha.entries().iter().filter(|(_, m)| *m > 1).count() as i64)
}

/// K(C) = K(α) − K(β) + 2y.
pub fn k_invariant(c: &CurveData) -> Result<i64, OrbitError> {
    Ok(k_of_set(&c.alpha) - k_of_set(&c.beta) + 2 * y_of_curve(c)?)
}

/// A chain of curves where curve i runs from α(i) down to α(i−1).
#[derive(Clone, Debug, PartialEq)]
pub struct Tower {
    curves: Vec<CurveData>,
}

impl Tower {
    pub fn new(curves: Vec<CurveData>) -> Result<Self, OrbitError> {
        for (i, w) in curves.windows(2).enumerate() {
            if w[1].beta != w[0].alpha {
                return Err(OrbitError::Adjacency { index: i + 1 });
            }
        }
        Ok(Tower { curves })
    }

    pub fn curves(&self) -> &[CurveData] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// α(0): the bottom endpoint.
    pub fn bottom(&self) -> Option<&OrbitSet> {
        self.curves.first().map(|c| &c.beta)
    }

    /// α(N): the top endpoint.
    pub fn top(&self) -> Option<&OrbitSet> {
        self.curves.last().map(|c| &c.alpha)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditParams {
    /// Allowed |Σ I − 2N|.
    pub index_budget: f64,
    /// Threshold A₀ above which a curve counts as high-action.
    pub high_action: f64,
    /// Curves with action at most this are scanned for T < 0.
    pub low_action: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TowerAudit {
    pub n: usize,
    pub score_sum: i64,
    pub score_expected: i64,
    pub score_telescopes: bool,
    /// Σ 𝒜(C(i)) against 𝒜(α(N)) − 𝒜(α(0)), compared coefficient-wise over orbit ids.
    pub action_telescopes: bool,
    pub action_sum: f64,
    pub action_expected: f64,
    pub index_sum: i64,
    pub index_deviation: i64,
    pub index_within_budget: bool,
    pub high_action_count: usize,
    pub high_action_budget: f64,
    pub positive_score: usize,
    pub zero_score_j0_one: usize,
    pub zero_score_j0_two: usize,
    /// Indices of low-action non-cylinders with T < 0.
    pub negative_low_action: Vec<usize>,
}

impl TowerAudit {
    pub fn passes(&self) -> bool {
        self.score_telescopes
            && self.action_telescopes
            && self.high_action_count as f64 <= self.high_action_budget + 1e-9
            && self.negative_low_action.is_empty()
    }
}

pub fn tower_audit(t: &Tower, p: &AuditParams) -> Result<TowerAudit, OrbitError> {
    let n = t.len();
    let mut score_sum = 0i64;
    let mut y_sum = 0i64;
    let mut index_sum = 0i64;
    let mut action_sum = 0.0;
    let mut coeffs: BTreeMap<u32, i64> = BTreeMap::new();
    let mut high = 0usize;
    let mut positive = 0usize;
    let mut z1 = 0usize;
    let mut z2 = 0usize;
    let mut negative = Vec::new();
    let mut memo = ScoreMemo::new();
    for (i, c) in t.curves().iter().enumerate() {
        let j0 = j0_of_curve(c)?;
        let tc = memo.total_score(c)?;
        score_sum += tc;
        y_sum += j0 - 2;
        index_sum += ech_index_from_j0(c)?;
        action_sum += c.action;
        for (id, m) in c.alpha.action_vector() {
            *coeffs.entry(id).or_insert(0) += m;
        }
        for (id, m) in c.beta.action_vector() {
            *coeffs.entry(id).or_insert(0) -= m;
        }
        if c.action > p.high_action {
            high += 1;
        }
        match (tc, j0) {
            (t, _) if t > 0 => positive += 1,
            (0, 1) => z1 += 1,
            (0, 2) => z2 += 1,
            _ => {}
        }
        if tc < 0 && c.action <= p.low_action && !c.is_cylinder() {
            negative.push(i);
        }
    }
    let (top, bottom) = match (t.top(), t.bottom()) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => (OrbitSet::empty(), OrbitSet::empty()),
    };
    let score_expected = memo.set_score(&top)? - memo.set_score(&bottom)? + 3 * y_sum;
    let mut expected: BTreeMap<u32, i64> = top.action_vector();
    for (id, m) in bottom.action_vector() {
        *expected.entry(id).or_insert(0) -= m;
    }
    coeffs.retain(|_, v| *v != 0);
    expected.retain(|_, v| *v != 0);
    let index_deviation = index_sum - 2 * n as i64;
    Ok(TowerAudit {
        n,
        score_sum,
        score_expected,
        score_telescopes: score_sum == score_expected,
        action_telescopes: coeffs == expected,
        action_sum,
        action_expected: orbit_set_action(&top) - orbit_set_action(&bottom),
        index_sum,
        index_deviation,
        index_within_budget: (index_deviation.unsigned_abs() as f64) <= p.index_budget,
        high_action_count: high,
        high_action_budget: if p.high_action > 0.0 { action_sum / p.high_action } else { f64::INFINITY },
        positive_score: positive,
        zero_score_j0_one: z1,
        zero_score_j0_two: z2,
        negative_low_action: negative,
    })
}

/// Largest m ≤ bound with |p⁺_θ(m)| + |p⁻_θ(m)| < 4, or 0.
pub fn few_ends_threshold(theta: &Rotation, bound: u32) -> Result<u32, OrbitError> {
    let mut best = 0;
    for m in 1..=bound {
        let (pp, pm) = partition_pair(theta, m as u64)?;
        if pp.len() + pm.len() < 4 {
            best = m;
        }
    }
    Ok(best)
}

/// Lower bound on the multiplicity of an orbit set entry carrying C₁ ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndFloor {
    None,
    Fixed(u32),
    /// Above [`few_ends_threshold`] of that orbit, searched up to the given bound.
    FewEnds(u32),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanParams {
    pub max_mult: u32,
    pub max_genus: u32,
    pub index: i64,
    pub c_tau: i64,
    /// Curves need 0 < 𝒜(C) < low_action.
    pub low_action: f64,
    pub floor: EndFloor,
    /// Every k-th instance is rebuilt as a CurveData and rescored; 0 disables.
    pub recheck_every: usize,
}

impl Default for ScanParams {
    fn default() -> Self {
        ScanParams {
            max_mult: 10,
            max_genus: 3,
            index: 2,
            c_tau: 0,
            low_action: 0.5,
            floor: EndFloor::FewEnds(400),
            recheck_every: 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub instances: usize,
    pub t_histogram: BTreeMap<i64, usize>,
    /// Up to 16 witnesses with T < 0.
    pub negative: Vec<CurveData>,
    pub negative_count: usize,
    pub rechecked: usize,
    pub recheck_mismatches: usize,
    pub floors: Vec<u32>,
}

impl ScanReport {
    pub fn passes(&self) -> bool {
        self.negative_count == 0 && self.recheck_mismatches == 0
    }
}

#[derive(Clone, Debug)]
struct LocalOption {
    ma: u32,
    mb: u32,
    m0: u32,
    pos: Vec<u32>,
    neg: Vec<u32>,
    score: i64,
    cz: i64,
    ends: i64,
}

fn local_options(o: &SimpleOrbit, p: &ScanParams, floor: u32) -> Result<Vec<LocalOption>, OrbitError> {
    let cap = if o.kind.is_hyperbolic() { p.max_mult.min(1) } else { p.max_mult };
    let mut pp = Vec::new();
    let mut pm = Vec::new();
    let mut sc = Vec::new();
    let mut cz = Vec::new();
    for m in 0..=cap {
        if m == 0 {
            pp.push(Partition::from_parts(Vec::new()));
            pm.push(Partition::from_parts(Vec::new()));
            sc.push(0);
            cz.push(0);
            continue;
        }
        pp.push(partition_positive(&o.theta, m as u64)?);
        pm.push(partition_negative(&o.theta, m as u64)?);
        let c = classify_partitions(&pp[m as usize], &pm[m as usize], m);
        sc.push(c.is_p_plus as i64 + c.is_special as i64 - c.is_p_minus as i64);
        cz.push(cz_index(&o.theta, m as u64)?);
    }
    let mut out = Vec::new();
    for ma in 0..=cap {
        for npos in 0..=ma {
            let m0 = ma - npos;
            for mb in m0..=cap {
                let nneg = mb - m0;
                if npos + nneg == 0 || (npos > 0 && ma <= floor) || (nneg > 0 && mb <= floor) {
                    continue;
                }
                let mut ends = 0;
                let pos = if npos > 0 {
                    match pp[ma as usize].minus(&pp[m0 as usize]) {
                        Some(r) if r.total() == npos => {
                            ends += 2 * r.len() as i64 - (m0 == 0) as i64;
                            r.parts().to_vec()
                        }
                        _ => continue,
                    }
                } else {
                    Vec::new()
                };
                let neg = if nneg > 0 {
                    match pm[mb as usize].minus(&pm[m0 as usize]) {
                        Some(r) if r.total() == nneg => {
                            ends += 2 * r.len() as i64 - (m0 == 0) as i64;
                            r.parts().to_vec()
                        }
                        _ => continue,
                    }
                } else {
                    Vec::new()
                };
                out.push(LocalOption {
                    ma,
                    mb,
                    m0,
                    pos,
                    neg,
                    score: sc[ma as usize] - sc[mb as usize],
                    cz: cz[ma as usize] - cz[mb as usize],
                    ends,
                });
            }
        }
    }
    Ok(out)
}

fn assemble(
    orbits: &[SimpleOrbit],
    chosen: &[Option<&LocalOption>],
    genus: u32,
    c_tau: i64,
) -> Result<CurveData, OrbitError> {
    let (mut a, mut b, mut pos, mut neg) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (o, opt) in orbits.iter().zip(chosen) {
        let Some(x) = opt else { continue };
        if x.ma > 0 {
            a.push((o.clone(), x.ma));
        }
        if x.mb > 0 {
            b.push((o.clone(), x.mb));
        }
        if !x.pos.is_empty() {
            pos.push(EndGroup { orbit: o.id, mults: x.pos.clone(), c0_present: x.m0 > 0 });
        }
        if !x.neg.is_empty() {
            neg.push(EndGroup { orbit: o.id, mults: x.neg.clone(), c0_present: x.m0 > 0 });
        }
    }
    CurveData::new(genus, pos, neg, c_tau, OrbitSet::new(a)?, OrbitSet::new(b)?)
}

/// Searches the admissible low-action non-cylinders for T(C) < 0.
///
/// At each orbit the C₁ ends realize the partition conditions relative to
/// the trivial-cylinder multiplicity m₀: p⁺_θ(m_α) = p⁺_θ(m₀) ∪ {positive ends}
/// and likewise for p⁻ at m_β. C₁ has ends of both signs, I = index, and
/// 0 < 𝒜(C) < low_action.
pub fn score_scan(orbits: &[SimpleOrbit], p: &ScanParams) -> Result<ScanReport, OrbitError> {
    let mut floors = Vec::new();
    let mut options = Vec::new();
    for o in orbits {
        let floor = match p.floor {
            EndFloor::None => 0,
            EndFloor::Fixed(f) => f,
            EndFloor::FewEnds(bound) => few_ends_threshold(&o.theta, bound)?,
        };
        floors.push(floor);
        options.push(local_options(o, p, floor)?);
    }
    let mut report = ScanReport {
        instances: 0,
        t_histogram: BTreeMap::new(),
        negative: Vec::new(),
        negative_count: 0,
        rechecked: 0,
        recheck_mismatches: 0,
        floors,
    };
    let k = orbits.len();
    let mut idx = alloc::vec![0usize; k];
    // Index 0 at each orbit means "not involved".
    loop {
        let chosen: Vec<Option<&LocalOption>> =
            (0..k).map(|o| if idx[o] == 0 { None } else { Some(&options[o][idx[o] - 1]) }).collect();
        let (mut score, mut cz, mut ends, mut npos, mut nneg, mut action) = (0i64, 0i64, 0i64, 0usize, 0usize, 0.0f64);
        for (o, x) in chosen.iter().enumerate() {
            if let Some(x) = x {
                score += x.score;
                cz += x.cz;
                ends += x.ends;
                npos += x.pos.len();
                nneg += x.neg.len();
                action += orbits[o].action * (x.ma as f64 - x.mb as f64);
            }
        }
        if npos > 0 && nneg > 0 && action > 0.0 && action < p.low_action {
            for genus in 0..=p.max_genus {
                let j0 = -2 + 2 * genus as i64 + ends;
                if j0 + 2 * p.c_tau + cz != p.index || (genus == 0 && npos + nneg == 2) {
                    continue;
                }
                let t = score + 3 * (j0 - 2);
                report.instances += 1;
                *report.t_histogram.entry(t).or_insert(0) += 1;
                let recheck = p.recheck_every > 0 && report.instances % p.recheck_every == 1;
                if t < 0 || recheck {
                    let c = assemble(orbits, &chosen, genus, p.c_tau)?;
                    report.rechecked += 1;
                    let ok = total_score(&c)? == t
                        && ech_index_from_j0(&c)? == p.index
                        && !c.is_cylinder()
                        && is_ech_generator(&c.alpha)
                        && is_ech_generator(&c.beta);
                    report.recheck_mismatches += (!ok) as usize;
                    if t < 0 {
                        report.negative_count += 1;
                        if report.negative.len() < 16 {
                            report.negative.push(c);
                        }
                    }
                }
            }
        }
        let mut o = 0;
        loop {
            if o == k {
                return Ok(report);
            }
            idx[o] += 1;
            if idx[o] <= options[o].len() {
                break;
            }
            idx[o] = 0;
            o += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ell(id: u32, u: i64, v: i64) -> SimpleOrbit {
        SimpleOrbit::new(id, 1.0 + id as f64 * 0.25, Rotation::exact(u, v)).unwrap()
    }

    fn set(v: &[(SimpleOrbit, u32)]) -> OrbitSet {
        OrbitSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn kind_rules() {
        assert!(SimpleOrbit::with_kind(1, 1.0, Rotation::exact(2, 1), OrbitKind::PositiveHyperbolic).is_ok());
        assert!(SimpleOrbit::with_kind(1, 1.0, Rotation::exact(1, 2), OrbitKind::NegativeHyperbolic).is_ok());
        assert!(SimpleOrbit::with_kind(1, 1.0, Rotation::exact(1, 3), OrbitKind::PositiveHyperbolic).is_err());
        assert!(SimpleOrbit::new(1, 0.0, Rotation::exact(1, 3)).is_err());
    }

    #[test]
    fn generator_rule() {
        let h = SimpleOrbit::new(1, 1.0, Rotation::exact(0, 1)).unwrap();
        assert!(!is_ech_generator(&set(&[(h.clone(), 2)])));
        assert!(is_ech_generator(&set(&[(h, 1), (ell(2, 1, 5), 7)])));
        assert!(is_ech_generator(&OrbitSet::empty()));
    }

    #[test]
    fn cz_top_examples() {
        assert_eq!(cz_top(&set(&[(ell(1, 1, 5), 4)])), Ok(1));
        assert_eq!(cz_top(&set(&[(ell(1, 1, 5), 4), (ell(2, 7, 10), 2)])), Ok(4));
    }

    #[test]
    fn classification_examples() {
        let c = component_classification(&ell(1, 1, 5), 4).unwrap();
        assert_eq!((c.is_p_plus, c.is_p_minus, c.is_special), (false, true, false));
        let c = component_classification(&ell(1, 7, 10), 2).unwrap();
        assert_eq!((c.is_p_plus, c.is_p_minus, c.is_special), (true, false, true));
        let c = component_classification(&ell(1, 3, 7), 1).unwrap();
        assert_eq!((c.is_p_plus, c.is_p_minus, c.is_special), (true, true, false));
        assert_eq!(orbit_set_score(&set(&[(ell(1, 1, 5), 4)])), Ok(-1));
        assert_eq!(orbit_set_score(&set(&[(ell(1, 7, 10), 2)])), Ok(2));
    }

    fn cylinder(c0: bool) -> CurveData {
        let a = ell(1, 1, 5);
        let b = ell(2, 7, 10);
        let (ma, mb) = if c0 { (2, 2) } else { (1, 1) };
        let alpha = set(&[(b.clone(), ma)]);
        let beta = set(&[(a.clone(), mb)]);
        CurveData::new(
            0,
            vec![EndGroup { orbit: 2, mults: vec![1], c0_present: c0 }],
            vec![EndGroup { orbit: 1, mults: vec![1], c0_present: c0 }],
            0,
            alpha,
            beta,
        )
        .unwrap()
    }

    #[test]
    fn j0_examples() {
        assert_eq!(j0_of_curve(&cylinder(false)), Ok(0));
        assert_eq!(j0_of_curve(&cylinder(true)), Ok(2));
        let mut g1 = cylinder(false);
        g1.genus = 1;
        assert_eq!(j0_of_curve(&g1), Ok(2));
    }

    #[test]
    fn coverage_flag_checked() {
        let mut c = cylinder(false);
        c.positive_ends[0].c0_present = true;
        assert_eq!(j0_of_curve(&c), Err(OrbitError::CoverageMismatch { id: 2 }));
    }

    #[test]
    fn forced_topology_examples() {
        let t = |g, e| Topology { genus: g, ends: e, absent: 0 };
        assert_eq!(forced_topology(2, true), vec![t(0, 2)]);
        assert!(forced_topology(0, true).is_empty());
        assert_eq!(forced_topology(4, true), vec![t(0, 3), t(1, 2)]);
    }

    #[test]
    fn scores_and_k() {
        let a = ell(1, 1, 5);
        let b = ell(2, 7, 10);
        // α = {(b,2)}, β = {(a,1)}: a cylinder-free curve with J₀ = 2 from a genus-1 two-ended C₁.
        let c = CurveData::new(
            1,
            vec![EndGroup { orbit: 2, mults: vec![2], c0_present: false }],
            vec![EndGroup { orbit: 1, mults: vec![1], c0_present: false }],
            0,
            set(&[(b, 2)]),
            set(&[(a, 1)]),
        )
        .unwrap();
        assert_eq!(j0_of_curve(&c), Ok(2));
        assert_eq!(total_score(&c), Ok(2));
        assert_eq!(k_invariant(&c), Ok(-1));
    }
}
