//! Rational level circles of a twist and their actions.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_integer::Integer;

use super::profile::{energy, TwistProfile};

const TAU: f64 = 2.0 * PI;

/// Calibration constants of the twist action model.
///
/// A circle at level p/q and radius r has action q·H(r) + κ·p·E(r). A generator
/// with lowest vertex height y₀ gets an extra y₀·offset_per_height, and a
/// grading-dependent ε·(grading − d) separates equal-action Morse–Bott partners.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub kappa: f64,
    pub reference_action: f64,
    pub offset_per_height: f64,
    pub epsilon: f64,
}

pub const CALIBRATION: Calibration =
    Calibration { kappa: -TAU, reference_action: 0.0, offset_per_height: -PI, epsilon: 1e-6 };

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicCircle {
    pub p: i64,
    pub q: i64,
    pub r: f64,
    /// Shared by the e and h partners.
    pub action: f64,
    /// The level is the limit value f(0⁺), realized only by the center.
    pub at_center: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CensusError {
    Plateau {
        p: i64,
        q: i64,
        lo: f64,
        hi: f64,
    },
    /// f(0⁺) = ∞ gives infinitely many levels; truncate first.
    Unbounded,
}

impl fmt::Display for CensusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CensusError::Plateau { p, q, lo, hi } => {
                write!(f, "plateau at level 2π·{p}/{q} on r ∈ [{lo}, {hi}]")
            }
            CensusError::Unbounded => write!(f, "profile is unbounded at the center; truncate it first"),
        }
    }
}

const PLATEAU_TOL: f64 = 1e-9;

/// q·H(r) + κ·p·E(r).
pub fn level_action(f: &TwistProfile, c: &PeriodicCircle) -> f64 {
    c.q as f64 * f.hamiltonian(c.r) + CALIBRATION.kappa * c.p as f64 * energy(c.r)
}

/// All positive levels 2πp/q with q ≤ d in [f(1), f(0⁺)], each with its radius.
pub fn periodic_census(f: &TwistProfile, d: u32) -> Result<Vec<PeriodicCircle>, CensusError> {
    let (bottom, top) = (f.eval(1.0), f.sup());
    if !top.is_finite() {
        return Err(CensusError::Unbounded);
    }
    let mut out = Vec::new();
    for q in 1..=d as i64 {
        let pmin = libm::ceil(bottom * q as f64 / TAU).max(1.0) as i64;
        let pmax = libm::floor(top * q as f64 / TAU) as i64;
        let mut p = pmin;
        while p <= pmax {
            if p.gcd(&q) == 1 {
                let sigma = p as f64 / q as f64;
                let t = TAU * sigma;
                if t >= bottom && t <= top {
                    let lo = f.level_radius(sigma);
                    let hi = f.level_radius_upper(sigma);
                    if hi - lo > PLATEAU_TOL {
                        return Err(CensusError::Plateau { p, q, lo, hi });
                    }
                    let mut c = PeriodicCircle { p, q, r: lo, action: 0.0, at_center: t == top };
                    c.action = level_action(f, &c);
                    out.push(c);
                }
            }
            p += 1;
        }
    }
    out.sort_by(|a, b| (b.p * a.q).cmp(&(a.p * b.q)).then(a.q.cmp(&b.q)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_profile_levels() {
        let f = TwistProfile::ramp(TAU * 1.5, 1.0, 1).unwrap();
        let c = periodic_census(&f, 2).unwrap();
        let levels: Vec<(i64, i64)> = c.iter().map(|x| (x.p, x.q)).collect();
        assert_eq!(levels, alloc::vec![(3, 2), (1, 1), (1, 2)]);
        assert!(c[0].at_center);
        assert!((c[1].r - 1.0 / 3.0).abs() < 1e-12);
        let c1 = periodic_census(&f, 1).unwrap();
        assert_eq!(c1.len(), 1);
    }

    #[test]
    fn zero_and_plateau() {
        assert!(periodic_census(&TwistProfile::zero(), 6).unwrap().is_empty());
        let f = TwistProfile::from_samples(&[0.0, 0.3, 0.6, 1.0], &[10.0, TAU, TAU, 0.0]).unwrap();
        match periodic_census(&f, 1) {
            Err(CensusError::Plateau { p: 1, q: 1, lo, hi }) => {
                assert!((lo - 0.3).abs() < 1e-9 && (hi - 0.6).abs() < 1e-9)
            }
            other => panic!("{other:?}"),
        }
    }
}
