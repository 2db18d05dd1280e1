//! Reeb dynamics on the boundary of E(a, b) = { π|z₁|²/a + π|z₂|²/b ≤ 1 }.
//!
//! The Reeb field is (2π/a)∂θ₁ + (2π/b)∂θ₂, so everything here is exact
//! linear flow. The ECH spectrum is modelled by the sorted lattice values
//! {m·a + n·b} with grading 2k.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};
use core::f64::consts::PI;
use core::fmt;

use num_integer::Integer;

use crate::quad;
use crate::rotation::{Rational, Rotation};

const TAU: f64 = 2.0 * PI;

#[derive(Clone, Debug, PartialEq)]
pub enum EllipsoidError {
    NonPositive,
    /// a/b is rational and the caller did not ask for the formal lattice spectrum.
    RationalRatio {
        p: i64,
        q: i64,
    },
    /// Entry count or heap size would exceed the configured cap.
    Cap {
        cap: usize,
    },
    PointOnBinding,
    NotTwoOrbit,
}

impl fmt::Display for EllipsoidError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EllipsoidError::NonPositive => write!(f, "a and b must be positive"),
            EllipsoidError::RationalRatio { p, q } => {
                write!(f, "a/b = {p}/{q} is rational; use formal mode for the lattice spectrum")
            }
            EllipsoidError::Cap { cap } => write!(f, "spectrum enumeration exceeds cap of {cap} entries"),
            EllipsoidError::PointOnBinding => write!(f, "point on binding orbit"),
            EllipsoidError::NotTwoOrbit => write!(f, "not a two-orbit flow"),
        }
    }
}

/// How floating inputs are tested for a rational ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RationalityGuard {
    pub tol: f64,
    pub max_den: i64,
}

impl Default for RationalityGuard {
    fn default() -> Self {
        RationalityGuard { tol: 1e-12, max_den: 100_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatioKind {
    Irrational,
    /// a/b = p/q in lowest terms.
    Rational {
        p: i64,
        q: i64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipsoid {
    pub a: f64,
    pub b: f64,
    pub ratio: RatioKind,
    /// True when the ratio came from exact rational inputs rather than detection.
    pub exact: bool,
}

impl Ellipsoid {
    pub fn new(a: f64, b: f64) -> Result<Self, EllipsoidError> {
        Self::with_guard(a, b, &RationalityGuard::default())
    }

    pub fn with_guard(a: f64, b: f64, guard: &RationalityGuard) -> Result<Self, EllipsoidError> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(EllipsoidError::NonPositive);
        }
        let ratio = match best_rational(a / b, guard) {
            Some((p, q)) => RatioKind::Rational { p, q },
            None => RatioKind::Irrational,
        };
        Ok(Ellipsoid { a, b, ratio, exact: false })
    }

    pub fn exact(a: Rational, b: Rational) -> Result<Self, EllipsoidError> {
        let zero = Rational::from_integer(0);
        if a <= zero || b <= zero {
            return Err(EllipsoidError::NonPositive);
        }
        let r = a / b;
        let f = |x: Rational| *x.numer() as f64 / *x.denom() as f64;
        Ok(Ellipsoid { a: f(a), b: f(b), ratio: RatioKind::Rational { p: *r.numer(), q: *r.denom() }, exact: true })
    }

    pub fn is_irrational(&self) -> bool {
        self.ratio == RatioKind::Irrational
    }
}

/// Continued-fraction search for p/q with q ≤ max_den and |x − p/q| ≤ tol.
pub fn best_rational(x: f64, guard: &RationalityGuard) -> Option<(i64, i64)> {
    if !x.is_finite() || x <= 0.0 {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let ai = libm::floor(r);
        if ai > 1e12 {
            break;
        }
        let ai = ai as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > guard.max_den {
            break;
        }
        if (x - h2 as f64 / k2 as f64).abs() <= guard.tol {
            let g = h2.gcd(&k2);
            return Some((h2 / g, k2 / g));
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = r - libm::floor(r);
        if frac < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowState {
    pub theta1: f64,
    pub theta2: f64,
    /// Fraction of the constraint carried by z₁: π|z₁|²/a = μ.
    pub mu: f64,
}

fn wrap(x: f64) -> f64 {
    let y = libm::fmod(x, TAU);
    if y < 0.0 {
        y + TAU
    } else {
        y
    }
}

pub fn reeb_flow(e: &Ellipsoid, s: &FlowState, t: f64) -> FlowState {
    FlowState { theta1: wrap(s.theta1 + TAU * t / e.a), theta2: wrap(s.theta2 + TAU * t / e.b), mu: s.mu }
}

/// Distance between two angles on the circle.
pub fn angle_gap(x: f64, y: f64) -> f64 {
    let d = wrap(x - y);
    d.min(TAU - d)
}

#[derive(Clone, Debug, PartialEq)]
pub enum CensusItem {
    /// γ₁ = {z₂ = 0} with action a, or γ₂ = {z₁ = 0} with action b.
    Core { index: u8, action: f64, theta: Rotation },
    /// Torus family of periodic orbits at the given action (Morse–Bott, degenerate).
    TorusFamily { action: f64, multiple: u64 },
}

impl CensusItem {
    pub fn action(&self) -> f64 {
        match self {
            CensusItem::Core { action, .. } | CensusItem::TorusFamily { action, .. } => *action,
        }
    }
}

/// Simple periodic orbits with action ≤ L.
pub fn simple_orbit_census(e: &Ellipsoid, l: f64) -> Vec<CensusItem> {
    let mut out = Vec::new();
    if e.a <= l {
        out.push(CensusItem::Core { index: 1, action: e.a, theta: Rotation::real(e.a / e.b) });
    }
    if e.b <= l {
        out.push(CensusItem::Core { index: 2, action: e.b, theta: Rotation::real(e.b / e.a) });
    }
    if let RatioKind::Rational { q, .. } = e.ratio {
        // a/b = p/q: the generic orbit closes at t = q·a = p·b.
        let period = q as f64 * e.a;
        let mut k = 1u64;
        while k as f64 * period <= l * (1.0 + 1e-12) {
            out.push(CensusItem::TorusFamily { action: k as f64 * period, multiple: k });
            k += 1;
        }
    }
    out.sort_by(|x, y| x.action().total_cmp(&y.action()));
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub k: u64,
    pub c: f64,
    pub grading: u64,
    pub m: u64,
    pub n: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumOptions {
    /// Allow rational a/b (ties are kept as separate entries).
    pub formal: bool,
    /// Maximum number of entries or heap slots.
    pub cap: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { formal: false, cap: 10_000_000 }
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    v: f64,
    m: u64,
    n: u64,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    fn cmp(&self, o: &Self) -> Ordering {
        self.v.total_cmp(&o.v).then(self.n.cmp(&o.n)).then(self.m.cmp(&o.m))
    }
}

/// Lazily enumerates {m·a + n·b} in nondecreasing order.
///
/// Each (m, n) is reached once: (m, n) → (m + 1, n) always, and (0, n) → (0, n + 1).
/// The heap holds at most one node per value of n, so it stays O(√k).
pub struct SpectrumIter {
    a: f64,
    b: f64,
    heap: BinaryHeap<Reverse<Node>>,
    k: u64,
    cap: usize,
    failed: bool,
}

impl SpectrumIter {
    pub fn new(e: &Ellipsoid, opts: &SpectrumOptions) -> Result<Self, EllipsoidError> {
        check_ratio(e, opts)?;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse(Node { v: 0.0, m: 0, n: 0 }));
        Ok(SpectrumIter { a: e.a, b: e.b, heap, k: 0, cap: opts.cap, failed: false })
    }

    pub fn peek_value(&self) -> Option<f64> {
        self.heap.peek().map(|r| r.0.v)
    }
}

impl Iterator for SpectrumIter {
    type Item = Result<SpectrumEntry, EllipsoidError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        if self.k as usize >= self.cap || self.heap.len() >= self.cap {
            self.failed = true;
            return Some(Err(EllipsoidError::Cap { cap: self.cap }));
        }
        let Reverse(node) = self.heap.pop()?;
        let (m, n) = (node.m, node.n);
        self.heap.push(Reverse(Node { v: (m + 1) as f64 * self.a + n as f64 * self.b, m: m + 1, n }));
        if m == 0 {
            self.heap.push(Reverse(Node { v: (n + 1) as f64 * self.b, m: 0, n: n + 1 }));
        }
        let entry = SpectrumEntry { k: self.k, c: node.v, grading: 2 * self.k, m, n };
        self.k += 1;
        Some(Ok(entry))
    }
}

fn check_ratio(e: &Ellipsoid, opts: &SpectrumOptions) -> Result<(), EllipsoidError> {
    match e.ratio {
        RatioKind::Rational { p, q } if !opts.formal => Err(EllipsoidError::RationalRatio { p, q }),
        _ => Ok(()),
    }
}

/// All entries with action ≤ L.
pub fn action_spectrum(e: &Ellipsoid, l: f64, opts: &SpectrumOptions) -> Result<Vec<SpectrumEntry>, EllipsoidError> {
    let mut it = SpectrumIter::new(e, opts)?;
    let mut out = Vec::new();
    while let Some(v) = it.peek_value() {
        if v > l * (1.0 + 1e-12) + 1e-300 {
            break;
        }
        match it.next() {
            Some(Ok(entry)) => out.push(entry),
            Some(Err(err)) => return Err(err),
            None => break,
        }
    }
    Ok(out)
}

/// The first `count` entries c₀, …, c_{count−1}.
pub fn spectrum_prefix(
    e: &Ellipsoid,
    count: usize,
    opts: &SpectrumOptions,
) -> Result<Vec<SpectrumEntry>, EllipsoidError> {
    if count > opts.cap {
        return Err(EllipsoidError::Cap { cap: opts.cap });
    }
    SpectrumIter::new(e, opts)?.take(count).collect()
}

pub fn spectral_invariant(e: &Ellipsoid, k: u64, opts: &SpectrumOptions) -> Result<SpectrumEntry, EllipsoidError> {
    let mut last = None;
    for entry in SpectrumIter::new(e, opts)?.take(k as usize + 1) {
        last = Some(entry?);
    }
    last.ok_or(EllipsoidError::Cap { cap: opts.cap })
}

/// ∫ λ∧dλ over ∂E(a, b) in closed form.
pub fn volume(e: &Ellipsoid) -> f64 {
    e.a * e.b
}

/// ∫ λ∧dλ over ∂E(a, b) by quadrature, with λ = ½Σ(xᵢdyᵢ − yᵢdxᵢ).
///
/// The surface is parametrized by (u, θ₁, θ₂) with μ = sin²(πu/2), and the
/// three tangent vectors are evaluated in ℝ⁴ rather than in action-angle form.
pub fn volume_numeric(e: &Ellipsoid, tol: f64) -> f64 {
    let (a, b) = (e.a, e.b);
    let integrand = |u: f64, t1: f64, t2: f64| -> f64 {
        let s = libm::sin(PI * u / 2.0);
        let c = libm::cos(PI * u / 2.0);
        // r₁ = √(aμ/π) = √(a/π)·s and r₂ = √(b/π)·c.
        let r1 = libm::sqrt(a / PI) * s;
        let r2 = libm::sqrt(b / PI) * c;
        let dr1 = libm::sqrt(a / PI) * (PI / 2.0) * c;
        let dr2 = -libm::sqrt(b / PI) * (PI / 2.0) * s;
        let (c1, s1, c2, s2) = (libm::cos(t1), libm::sin(t1), libm::cos(t2), libm::sin(t2));
        let p = [r1 * c1, r1 * s1, r2 * c2, r2 * s2];
        let tu = [dr1 * c1, dr1 * s1, dr2 * c2, dr2 * s2];
        let t1v = [-r1 * s1, r1 * c1, 0.0, 0.0];
        let t2v = [0.0, 0.0, -r2 * s2, r2 * c2];
        let lam = |v: &[f64; 4]| 0.5 * (p[0] * v[1] - p[1] * v[0] + p[2] * v[3] - p[3] * v[2]);
        let om = |v: &[f64; 4], w: &[f64; 4]| v[0] * w[1] - v[1] * w[0] + v[2] * w[3] - v[3] * w[2];
        lam(&tu) * om(&t1v, &t2v) - lam(&t1v) * om(&tu, &t2v) + lam(&t2v) * om(&tu, &t1v)
    };
    // Periodic trapezoid in the angles, adaptive Simpson in u.
    let na = 8;
    let h = TAU / na as f64;
    let mut total = 0.0;
    for i in 0..na {
        for j in 0..na {
            let (t1, t2) = (i as f64 * h, j as f64 * h);
            total += quad::adaptive_simpson(|u| integrand(u, t1, t2), 0.0, 1.0, tol * 1e-3, 40) * h * h;
        }
    }
    total.abs()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylRow {
    pub k: u64,
    pub c: f64,
    pub ratio: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeylTable {
    pub volume: f64,
    pub rows: Vec<WeylRow>,
    /// max |c_k²/(2k) − V| over k in the final decade (kmax/10, kmax].
    pub final_decade_max: f64,
}

fn is_sample_index(k: u64) -> bool {
    let mut p = 1u64;
    while p <= k {
        if k == p || k == 2 * p || k == 5 * p {
            return true;
        }
        p = p.saturating_mul(10);
    }
    false
}

pub fn weyl_table(e: &Ellipsoid, kmax: u64, opts: &SpectrumOptions) -> Result<WeylTable, EllipsoidError> {
    if !e.is_irrational() && !opts.formal {
        if let RatioKind::Rational { p, q } = e.ratio {
            return Err(EllipsoidError::RationalRatio { p, q });
        }
    }
    let v = volume(e);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    let lo = kmax / 10;
    for entry in SpectrumIter::new(e, opts)?.take(kmax as usize + 1) {
        let entry = entry?;
        if entry.k == 0 {
            continue;
        }
        let ratio = entry.c * entry.c / (2.0 * entry.k as f64);
        let dev = (ratio - v).abs();
        if entry.k > lo {
            worst = worst.max(dev);
        }
        if is_sample_index(entry.k) || entry.k == kmax {
            rows.push(WeylRow { k: entry.k, c: entry.c, ratio, deviation: dev });
        }
    }
    Ok(WeylTable { volume: v, rows, final_decade_max: worst })
}

/// max |c_k²/(2k) − V| over k ∈ [k0, k1].
pub fn weyl_window_max(e: &Ellipsoid, k0: u64, k1: u64, opts: &SpectrumOptions) -> Result<f64, EllipsoidError> {
    let v = volume(e);
    let mut worst: f64 = 0.0;
    for entry in SpectrumIter::new(e, opts)?.take(k1 as usize + 1) {
        let entry = entry?;
        if entry.k >= k0.max(1) {
            worst = worst.max((entry.c * entry.c / (2.0 * entry.k as f64) - v).abs());
        }
    }
    Ok(worst)
}

/// A point of the disk spanning γ₂ at θ₁ = 0, as (radius fraction, angle θ₂).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectionPoint {
    pub rho: f64,
    pub angle: f64,
}

/// First return to the section: time a, rotation by 2πa/b.
pub fn gss_return_map(e: &Ellipsoid, x: SectionPoint) -> Result<(SectionPoint, f64), EllipsoidError> {
    if !(0.0..1.0).contains(&x.rho) {
        return Err(EllipsoidError::PointOnBinding);
    }
    // On the section μ = 1 − ρ², so the z₁ factor is nonzero and θ₁ returns after t = a.
    let s = FlowState { theta1: 0.0, theta2: x.angle, mu: 1.0 - x.rho * x.rho };
    let t = e.a;
    let y = reeb_flow(e, &s, t);
    Ok((SectionPoint { rho: x.rho, angle: y.theta2 }, t))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductReport {
    pub product: f64,
    pub volume: f64,
    pub difference: f64,
}

/// Product of the two simple periods against the volume.
pub fn product_of_periods_check(e: &Ellipsoid) -> Result<ProductReport, EllipsoidError> {
    if !e.is_irrational() {
        return Err(EllipsoidError::NotTwoOrbit);
    }
    let cores: Vec<f64> = simple_orbit_census(e, e.a.max(e.b))
        .iter()
        .filter_map(|c| match c {
            CensusItem::Core { action, .. } => Some(*action),
            _ => None,
        })
        .collect();
    if cores.len() != 2 {
        return Err(EllipsoidError::NotTwoOrbit);
    }
    let product = cores[0] * cores[1];
    let vol = volume(e);
    Ok(ProductReport { product, volume: vol, difference: (product - vol).abs() })
}
