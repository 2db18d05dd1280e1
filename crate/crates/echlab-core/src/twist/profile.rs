//! Radial twist profiles f: (0, 1] → [0, ∞) and their generating Hamiltonians.
//!
//! A profile is a chain of pieces (lo, hi], each a finite Laurent polynomial
//! Σ c·s^k. Every integral used downstream has a closed form on such pieces.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::quad;

const TAU: f64 = 2.0 * PI;

#[derive(Clone, Debug, PartialEq)]
pub enum ProfileError {
    Empty,
    /// Pieces must tile (0, 1] in order.
    Gap {
        at: f64,
    },
    NotMonotone {
        at: f64,
    },
    Negative {
        at: f64,
    },
    BadSamples(&'static str),
}

impl fmt::Display for ProfileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileError::Empty => write!(f, "profile has no pieces"),
            ProfileError::Gap { at } => write!(f, "pieces do not tile (0, 1] near r = {at}"),
            ProfileError::NotMonotone { at } => write!(f, "profile increases near r = {at}"),
            ProfileError::Negative { at } => write!(f, "profile is negative at r = {at}"),
            ProfileError::BadSamples(why) => write!(f, "bad sample array: {why}"),
        }
    }
}

/// Σ c·s^k on (lo, hi].
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<(i32, f64)>,
}

fn powi(s: f64, k: i32) -> f64 {
    libm::pow(s, k as f64)
}

/// ∫ s^e ds from a to b, with a ≥ 0.
fn monomial_integral(e: i32, a: f64, b: f64) -> f64 {
    if e == -1 {
        if a == 0.0 {
            return f64::INFINITY;
        }
        return libm::log(b / a);
    }
    if e < -1 && a == 0.0 {
        return f64::INFINITY;
    }
    let k = (e + 1) as f64;
    (powi(b, e + 1) - powi(a, e + 1)) / k
}

impl Piece {
    pub fn new(lo: f64, hi: f64, terms: Vec<(i32, f64)>) -> Self {
        let terms = terms.into_iter().filter(|t| t.1 != 0.0).collect();
        Piece { lo, hi, terms }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.terms.iter().map(|&(k, c)| c * powi(s, k)).sum()
    }

    fn derivative(&self, s: f64) -> f64 {
        self.terms.iter().filter(|t| t.0 != 0).map(|&(k, c)| c * k as f64 * powi(s, k - 1)).sum()
    }

    fn singular_at_zero(&self) -> bool {
        self.lo == 0.0 && self.terms.iter().any(|&(k, c)| k < 0 && c != 0.0)
    }

    /// ∫ s^j f(s) ds over [a, b] ⊆ [lo, hi].
    pub fn moment(&self, j: i32, a: f64, b: f64) -> f64 {
        if a >= b {
            return 0.0;
        }
        self.terms.iter().map(|&(k, c)| c * monomial_integral(k + j, a, b)).sum()
    }

    fn restrict(&self, lo: f64, hi: f64) -> Piece {
        Piece { lo, hi, terms: self.terms.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwistProfile {
    pieces: Vec<Piece>,
    support_flag: bool,
}

const MONO_TOL: f64 = 1e-9;

impl TwistProfile {
    /// Validates tiling and certifies monotonicity: f′ ≤ 0 on a 257-point grid per
    /// piece (exact for linear pieces), no upward jumps at breakpoints, f(1) ≥ 0.
    pub fn new(pieces: Vec<Piece>) -> Result<Self, ProfileError> {
        if pieces.is_empty() {
            return Err(ProfileError::Empty);
        }
        if pieces[0].lo != 0.0 {
            return Err(ProfileError::Gap { at: 0.0 });
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(ProfileError::Gap { at: w[0].hi });
            }
        }
        for p in &pieces {
            if p.lo.is_nan() || p.hi.is_nan() || p.lo >= p.hi {
                return Err(ProfileError::Gap { at: p.lo });
            }
        }
        if pieces.last().unwrap().hi != 1.0 {
            return Err(ProfileError::Gap { at: 1.0 });
        }
        for p in &pieces {
            let scale = 1.0 + p.eval(p.hi).abs();
            for i in 0..=256 {
                let s = p.lo + (p.hi - p.lo) * (i as f64 / 256.0);
                if s <= 0.0 {
                    continue;
                }
                let d = p.derivative(s);
                if d > MONO_TOL * scale {
                    return Err(ProfileError::NotMonotone { at: s });
                }
            }
        }
        for w in pieces.windows(2) {
            let (left, right) = (w[0].eval(w[0].hi), w[1].eval(w[1].lo));
            if right > left + MONO_TOL * (1.0 + left.abs()) {
                return Err(ProfileError::NotMonotone { at: w[0].hi });
            }
        }
        let last = pieces.last().unwrap();
        if last.eval(1.0) < -MONO_TOL {
            return Err(ProfileError::Negative { at: 1.0 });
        }
        let support_flag = last.terms.is_empty();
        Ok(TwistProfile { pieces, support_flag })
    }

    pub fn zero() -> Self {
        TwistProfile::new(alloc::vec![Piece::new(0.0, 1.0, Vec::new())]).unwrap()
    }

    pub fn constant(c: f64) -> Result<Self, ProfileError> {
        TwistProfile::new(alloc::vec![Piece::new(0.0, 1.0, alloc::vec![(0, c)])])
    }

    /// c·s^k on (0, 1].
    pub fn power(c: f64, k: i32) -> Result<Self, ProfileError> {
        TwistProfile::new(alloc::vec![Piece::new(0.0, 1.0, alloc::vec![(k, c)])])
    }

    /// amplitude·(1 − r/r0)^k on (0, r0], zero on (r0, 1].
    pub fn ramp(amplitude: f64, r0: f64, k: u32) -> Result<Self, ProfileError> {
        if !(r0 > 0.0 && r0 <= 1.0) {
            return Err(ProfileError::Gap { at: r0 });
        }
        let mut terms = Vec::new();
        let mut binom = 1.0;
        for j in 0..=k {
            if j > 0 {
                binom = binom * (k - j + 1) as f64 / j as f64;
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            terms.push((j as i32, amplitude * binom * sign * powi(r0, -(j as i32))));
        }
        let mut pieces = alloc::vec![Piece::new(0.0, r0, terms)];
        if r0 < 1.0 {
            pieces.push(Piece::new(r0, 1.0, Vec::new()));
        }
        TwistProfile::new(pieces)
    }

    /// Linear interpolation through (r_i, f_i); constant extension outside the samples.
    pub fn from_samples(r: &[f64], f: &[f64]) -> Result<Self, ProfileError> {
        if r.len() != f.len() || r.is_empty() {
            return Err(ProfileError::BadSamples("r and f must be nonempty and the same length"));
        }
        if r.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(core::cmp::Ordering::Less)) {
            return Err(ProfileError::BadSamples("radii must be strictly increasing"));
        }
        if r[0] < 0.0 || *r.last().unwrap() > 1.0 {
            return Err(ProfileError::BadSamples("radii must lie in [0, 1]"));
        }
        let mut pieces = Vec::new();
        if r[0] > 0.0 {
            pieces.push(Piece::new(0.0, r[0], alloc::vec![(0, f[0])]));
        }
        for i in 0..r.len() - 1 {
            let slope = (f[i + 1] - f[i]) / (r[i + 1] - r[i]);
            let intercept = f[i] - slope * r[i];
            pieces.push(Piece::new(r[i], r[i + 1], alloc::vec![(0, intercept), (1, slope)]));
        }
        let last = *r.last().unwrap();
        if last < 1.0 {
            pieces.push(Piece::new(last, 1.0, alloc::vec![(0, *f.last().unwrap())]));
        }
        TwistProfile::new(pieces)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// True iff f vanishes identically on the last piece.
    pub fn support_flag(&self) -> bool {
        self.support_flag
    }

    fn piece_at(&self, r: f64) -> &Piece {
        let i = self.pieces.partition_point(|p| p.hi < r);
        &self.pieces[i.min(self.pieces.len() - 1)]
    }

    /// f(r) for r ∈ (0, 1]; at r = 0 the limit f(0⁺), possibly +∞.
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            let p = &self.pieces[0];
            if p.singular_at_zero() {
                return f64::INFINITY;
            }
            return p.eval(0.0);
        }
        self.piece_at(r).eval(r)
    }

    pub fn sup(&self) -> f64 {
        self.eval(0.0)
    }

    /// ∫_a^b s^j f(s) ds.
    pub fn moment(&self, j: i32, a: f64, b: f64) -> f64 {
        self.pieces.iter().map(|p| p.moment(j, a.max(p.lo), b.min(p.hi))).sum()
    }

    /// H(r) = ∫_r¹ s f(s) ds; +∞ at r = 0 when divergent.
    pub fn hamiltonian(&self, r: f64) -> f64 {
        self.moment(1, r.max(0.0), 1.0)
    }

    pub fn truncate(&self, i: u32) -> Result<TwistProfile, ProfileError> {
        assert!(i >= 1, "truncation index starts at 1");
        let cut = 1.0 / i as f64;
        let level = self.eval(cut);
        let mut pieces = alloc::vec![Piece::new(0.0, cut, alloc::vec![(0, level)])];
        for p in &self.pieces {
            if p.hi > cut {
                pieces.push(p.restrict(p.lo.max(cut), p.hi));
            }
        }
        TwistProfile::new(pieces)
    }

    /// Profile of the composed twist T_f ∘ T_g.
    pub fn add(&self, other: &TwistProfile) -> Result<TwistProfile, ProfileError> {
        let mut cuts: Vec<f64> = self.pieces.iter().chain(&other.pieces).map(|p| p.hi).collect();
        cuts.push(0.0);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let mut terms: Vec<(i32, f64)> = Vec::new();
            for &(k, c) in self.piece_at(mid).terms.iter().chain(&other.piece_at(mid).terms) {
                match terms.iter_mut().find(|t| t.0 == k) {
                    Some(t) => t.1 += c,
                    None => terms.push((k, c)),
                }
            }
            terms.sort_by_key(|t| t.0);
            pieces.push(Piece::new(w[0], w[1], terms));
        }
        TwistProfile::new(pieces)
    }

    /// Smallest r with f(r) ≤ 2πσ; 1 when f(1) > 2πσ, 0 when f(0⁺) ≤ 2πσ.
    pub fn level_radius(&self, sigma: f64) -> f64 {
        let t = TAU * sigma;
        if self.eval(1.0) > t {
            return 1.0;
        }
        if self.sup() <= t {
            return 0.0;
        }
        bisect(|r| self.eval(r) > t)
    }

    /// Largest r with f(r) ≥ 2πσ, or 0 when there is none.
    pub fn level_radius_upper(&self, sigma: f64) -> f64 {
        let t = TAU * sigma;
        if self.eval(1.0) >= t {
            return 1.0;
        }
        if self.sup() < t {
            return 0.0;
        }
        bisect(|r| self.eval(r) >= t)
    }

    /// Action density a(σ) = H(r_σ) − 2πσ·E(r_σ) with E(r) = (1 − r²)/2.
    ///
    /// r_σ minimizes H(r) − 2πσE(r), so a is concave in σ and monotone in H.
    pub fn action_density(&self, sigma: f64) -> f64 {
        if sigma == 0.0 {
            return 0.0;
        }
        let r = self.level_radius(sigma);
        self.hamiltonian(r) - TAU * sigma * energy(r)
    }
}

pub fn energy(r: f64) -> f64 {
    0.5 * (1.0 - r * r)
}

/// Boundary of {pred = true} on [0, 1], assuming pred(0⁺) and ¬pred(1).
fn bisect<P: Fn(f64) -> bool>(pred: P) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalabiReport {
    /// ∫₀¹ s² f(s) ds, the exchanged form of ∫₀¹ H(r) dr.
    pub value: f64,
    /// ∫₀¹ H(r) dr by quadrature; absent when H(0) = ∞.
    pub quadrature: Option<f64>,
    pub relative_gap: Option<f64>,
    /// ∫₀¹ s³ f(s) ds = 2∫₀¹ H(r) r dr, the area-weighted variant.
    pub area: f64,
}

impl CalabiReport {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    pub fn self_check(&self, rel: f64) -> bool {
        self.relative_gap.map_or(true, |g| g <= rel)
    }
}

pub fn calabi(f: &TwistProfile) -> CalabiReport {
    let value = f.moment(2, 0.0, 1.0);
    let area = f.moment(3, 0.0, 1.0);
    let quadrature = if f.hamiltonian(0.0).is_finite() {
        let mut total = 0.0;
        for p in f.pieces() {
            total += quad::adaptive_simpson(|r| f.hamiltonian(r), p.lo, p.hi, 1e-14, 50);
        }
        Some(total)
    } else {
        None
    };
    let relative_gap = quadrature.map(|q| (q - value).abs() / value.abs().max(1e-300).max(q.abs()).max(1e-12));
    CalabiReport { value, quadrature, relative_gap, area }
}

/// H(0) − H(1) = H(0).
pub fn hofer_norm_bound(f: &TwistProfile) -> f64 {
    f.hamiltonian(0.0)
}

/// max − min of H_f − H_g over [0, 1], sampled at breakpoints and a fine grid.
pub fn hamiltonian_oscillation(f: &TwistProfile, g: &TwistProfile) -> f64 {
    let mut pts: Vec<f64> = (0..=4096).map(|i| i as f64 / 4096.0).collect();
    pts.extend(f.pieces().iter().chain(g.pieces()).map(|p| p.hi));
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in pts {
        let v = f.hamiltonian(r) - g.hamiltonian(r);
        if v.is_nan() {
            return f64::INFINITY;
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo
}
