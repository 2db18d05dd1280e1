//! PFH spectral invariants c_d.

use alloc::collections::BTreeMap;

use super::complex::{build_complex, slope_bound, slopes, ComplexError, ComplexOptions, FilteredComplex};
use super::profile::TwistProfile;
use crate::gf2::{self, Column};

/// Birth level of the grading-d class: the smallest action L such that some
/// cycle supported on generators of action ≤ L is not a boundary.
pub fn spectral_from_complex(c: &FilteredComplex) -> Result<f64, ComplexError> {
    let d = c.d;
    if !(c.window.0 < d && d < c.window.1) {
        return Err(ComplexError::Rank { grading: d, rank: 0 });
    }
    if let Some(&(g, r)) = c.homology_ranks().iter().find(|&&(g, _)| g == d) {
        if r != 1 {
            return Err(ComplexError::Rank { grading: g, rank: r });
        }
    }
    let mut here = c.indices_in(d);
    here.sort_by(|&a, &b| c.action[a].total_cmp(&c.action[b]).then(a.cmp(&b)));
    let local: BTreeMap<usize, usize> = here.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let to_local = |col: &Column| gf2::from_multiset(col.iter().filter_map(|i| local.get(i).copied()).collect());

    // Boundaries from grading d + 1, reduced once.
    let mut span: BTreeMap<usize, Column> = BTreeMap::new();
    for i in c.indices_in(d + 1) {
        insert_reduced(&mut span, to_local(&c.differential[i]));
    }
    // Reduction of ∂* on the filtered grading-d chains, tracking combinations.
    let mut pivots: BTreeMap<usize, (Column, Column)> = BTreeMap::new();
    for (k, &i) in here.iter().enumerate() {
        let mut col = c.differential[i].clone();
        let mut combo: Column = alloc::vec![k];
        while let Some(&low) = col.last() {
            match pivots.get(&low) {
                Some((pc, pk)) => {
                    col = gf2::add(&col, pc);
                    combo = gf2::add(&combo, pk);
                }
                None => break,
            }
        }
        match col.last() {
            Some(&low) => {
                pivots.insert(low, (col, combo));
            }
            None => {
                if insert_reduced(&mut span, combo) {
                    return Ok(c.action[i]);
                }
            }
        }
    }
    Err(ComplexError::Rank { grading: d, rank: 0 })
}

/// Adds a column to a pivot basis; true when it was independent.
fn insert_reduced(basis: &mut BTreeMap<usize, Column>, mut col: Column) -> bool {
    while let Some(&low) = col.last() {
        match basis.get(&low) {
            Some(b) => col = gf2::add(&col, b),
            None => {
                basis.insert(low, col);
                return true;
            }
        }
    }
    false
}

/// Largest action among all-elliptic generators of grading d.
pub fn elliptic_max(c: &FilteredComplex) -> Option<f64> {
    c.indices_in(c.d)
        .into_iter()
        .filter(|&i| c.generators[i].h_count() == 0)
        .map(|i| c.action[i])
        .max_by(f64::total_cmp)
}

/// c_d as the maximum over all-elliptic generators of grading d.
///
/// Every e-path of grading d has L = d + 1, hence y₀ = −S/(d + 1) with
/// S = Σ_{x≥1} ⌊Λ(x)⌋ computed from y₀ = 0. An edge (q, p) ending at column x₁
/// adds F = Σ_{j=1}^{q} ⌊pj/q⌋ to S plus p for each later column, so S depends
/// only on the x-positions. The state is (x, S mod (d + 1)); slopes are taken
/// steepest first with repeats allowed, which enumerates concave paths.
pub fn spectral_dp(f: &TwistProfile, d: u32) -> Result<f64, ComplexError> {
    let n = slope_bound(f).ok_or(ComplexError::Unbounded)?;
    let d = d as i64;
    let modulus = (d + 1) as usize;
    let lambda = -super::census::CALIBRATION.offset_per_height / (d + 1) as f64;
    let width = (d + 1) as usize;
    let mut v = alloc::vec![f64::NEG_INFINITY; width * modulus];
    v[0] = super::census::CALIBRATION.reference_action;
    for (p, q) in slopes(d, n) {
        let a = f.action_density(p as f64 / q as f64);
        let floor_sum = if p == 0 { 0 } else { (p - 1) * (q - 1) / 2 + p };
        for x in 0..=(d - q) {
            let x1 = x + q;
            let s_add = floor_sum + p * (d - x1);
            let gain = q as f64 * a + lambda * s_add as f64;
            let shift = (s_add % (d + 1)) as usize;
            let (src, dst) = (x as usize * modulus, x1 as usize * modulus);
            for s in 0..modulus {
                let cur = v[src + s];
                if cur == f64::NEG_INFINITY {
                    continue;
                }
                let t = dst + (s + shift) % modulus;
                let cand = cur + gain;
                if cand > v[t] {
                    v[t] = cand;
                }
            }
        }
    }
    Ok(v[d as usize * modulus])
}

/// Degree at or below which c_d comes from the full complex.
pub const COMPLEX_DEGREE_MAX: u32 = 8;

pub fn spectral_invariant_cd(f: &TwistProfile, d: u32) -> Result<f64, ComplexError> {
    if d <= COMPLEX_DEGREE_MAX && slope_bound(f).is_some_and(|n| n <= 4) {
        let c = build_complex(f, d, &ComplexOptions::default())?;
        spectral_from_complex(&c)
    } else {
        spectral_dp(f, d)
    }
}
