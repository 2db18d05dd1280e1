//! Rotation numbers, Conley–Zehnder indices and the partition conditions p±_θ(m).
//!
//! A rotation number is either an exact rational or a real number. Real values
//! go through a guard: anything within `tol` of an integer is treated as
//! integral, which is an error unless the caller opts in.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use num_rational::Ratio;

pub type Rational = Ratio<i64>;

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rotation {
    Exact(Rational),
    Real(f64),
}

impl Rotation {
    pub fn exact(num: i64, den: i64) -> Self {
        Rotation::Exact(Ratio::new(num, den))
    }

    pub fn real(value: f64) -> Self {
        Rotation::Real(value)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Rotation::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match *self {
            Rotation::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Rotation::Real(x) => x,
        }
    }

    /// Fractional part in [0, 1), also for negative values.
    pub fn fract(&self) -> Rotation {
        match *self {
            Rotation::Exact(r) => Rotation::Exact(r - r.floor()),
            Rotation::Real(x) => Rotation::Real(x - libm::floor(x)),
        }
    }

    pub fn is_integral(&self, tol: f64) -> bool {
        match *self {
            Rotation::Exact(r) => r.is_integer(),
            Rotation::Real(x) => (x - libm::round(x)).abs() <= tol,
        }
    }

    /// θ ∈ ℤ + 1/2.
    pub fn is_half_odd(&self, tol: f64) -> bool {
        match *self {
            Rotation::Exact(r) => (r * 2).is_integer() && !r.is_integer(),
            Rotation::Real(x) => {
                let t = 2.0 * x;
                (t - libm::round(t)).abs() <= tol && libm::fmod(libm::round(t), 2.0) != 0.0
            }
        }
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rotation::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Rotation::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Rotation::Real(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RotationError {
    ZeroMultiplicity,
    /// A real rotation number lands within tolerance of an integer.
    Degenerate {
        m: u64,
    },
    /// Exact arithmetic would overflow 64 bits.
    Overflow,
}

impl fmt::Display for RotationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RotationError::ZeroMultiplicity => write!(f, "multiplicity must be at least 1"),
            RotationError::Degenerate { m } => write!(f, "degenerate rotation at multiplicity {m}"),
            RotationError::Overflow => write!(f, "rotation arithmetic overflow"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Guard {
    pub tol: f64,
    pub allow_degenerate: bool,
}

impl Default for Guard {
    fn default() -> Self {
        Guard { tol: DEFAULT_TOL, allow_degenerate: false }
    }
}

/// Floor and ceiling of `m·θ`, plus whether a real value was snapped to an integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bracket {
    pub floor: i64,
    pub ceil: i64,
    pub snapped: bool,
}

pub fn bracket(theta: &Rotation, m: u64, guard: &Guard) -> Result<Bracket, RotationError> {
    match *theta {
        Rotation::Exact(r) => {
            let num = (*r.numer() as i128) * (m as i128);
            let den = *r.denom() as i128;
            let floor = Integer::div_floor(&num, &den);
            let ceil = -Integer::div_floor(&(-num), &den);
            let floor = i64::try_from(floor).map_err(|_| RotationError::Overflow)?;
            let ceil = i64::try_from(ceil).map_err(|_| RotationError::Overflow)?;
            Ok(Bracket { floor, ceil, snapped: false })
        }
        Rotation::Real(x) => {
            let v = x * m as f64;
            if v.is_nan() || v.abs() >= 9.0e18 {
                return Err(RotationError::Overflow);
            }
            // truncation toward zero, then corrected to the floor
            let mut floor = v as i64;
            if (floor as f64) > v {
                floor -= 1;
            }
            let frac = v - floor as f64;
            if frac <= guard.tol || 1.0 - frac <= guard.tol {
                if !guard.allow_degenerate {
                    return Err(RotationError::Degenerate { m });
                }
                let n = if frac <= guard.tol { floor } else { floor + 1 };
                Ok(Bracket { floor: n, ceil: n, snapped: true })
            } else {
                Ok(Bracket { floor, ceil: floor + 1, snapped: false })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cz {
    pub value: i64,
    /// Set when a real `mθ` was within tolerance of an integer and treated as one.
    pub flagged: bool,
}

/// CZ(θ, m) = ⌊mθ⌋ + ⌈mθ⌉ with the default guard.
pub fn cz_index(theta: &Rotation, m: u64) -> Result<i64, RotationError> {
    cz_index_guarded(theta, m, &Guard::default()).map(|c| c.value)
}

pub fn cz_index_guarded(theta: &Rotation, m: u64, guard: &Guard) -> Result<Cz, RotationError> {
    if m == 0 {
        return Err(RotationError::ZeroMultiplicity);
    }
    let b = bracket(theta, m, guard)?;
    Ok(Cz { value: b.floor + b.ceil, flagged: b.snapped })
}

/// A multiset of positive integers, kept sorted in descending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn from_parts(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn total(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, k: u32) -> bool {
        self.parts.contains(&k)
    }

    /// True when the partition is the single part `(m)`.
    pub fn is_whole(&self) -> bool {
        self.parts.len() == 1
    }

    /// Multiset difference `self − other`, or `None` if `other` is not contained.
    pub fn minus(&self, other: &Partition) -> Option<Partition> {
        let mut rest = self.parts.clone();
        for p in &other.parts {
            let i = rest.iter().position(|q| q == p)?;
            rest.remove(i);
        }
        Some(Partition { parts: rest })
    }

    pub fn union(&self, other: &Partition) -> Partition {
        let mut v = self.parts.clone();
        v.extend_from_slice(&other.parts);
        Partition::from_parts(v)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Upper,
    Lower,
}

/// An exact θ with {θ} ∉ {0, 1/2} names an elliptic orbit, read as the
/// nondegenerate limit θ − ε: lattice points on y = {θ}x leave the upper side.
fn elliptic_limit(theta: &Rotation) -> bool {
    match theta.fract() {
        Rotation::Exact(q) => *q.numer() != 0 && *q.denom() != 2,
        Rotation::Real(_) => false,
    }
}

/// Column heights for the upper and lower hulls, sharing one bracket per column.
fn columns(theta: &Rotation, m: u64, guard: &Guard) -> Result<(Vec<i64>, Vec<i64>), RotationError> {
    let t = theta.fract();
    let shift = elliptic_limit(theta);
    let mut up = Vec::with_capacity(m as usize + 1);
    let mut lo = Vec::with_capacity(m as usize + 1);
    up.push(0);
    lo.push(0);
    for x in 1..=m {
        let b = bracket(&t, x, guard)?;
        up.push(if shift && b.floor == b.ceil { b.floor - 1 } else { b.floor });
        lo.push(b.ceil);
    }
    Ok((up, lo))
}

/// Horizontal displacements of the hull through the column values `ys`,
/// counting every lattice point on the boundary as a vertex.
fn hull_parts(ys: &[i64], side: Side) -> Vec<u32> {
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(ys.len());
    // products of coordinates below 2³⁰ fit in i64
    let small = ys.len() < 1 << 30 && ys.iter().all(|y| y.unsigned_abs() < 1 << 30);
    for (x, &y) in ys.iter().enumerate() {
        let p = (x as i64, y);
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let sign = if small {
                ((x2 - x1) * (p.1 - y1) - (y2 - y1) * (p.0 - x1)).signum()
            } else {
                let cross = (x2 - x1) as i128 * (p.1 - y1) as i128 - (y2 - y1) as i128 * (p.0 - x1) as i128;
                cross.signum() as i64
            };
            let strictly_inside = match side {
                Side::Upper => sign > 0,
                Side::Lower => sign < 0,
            };
            if strictly_inside {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull.windows(2).map(|w| (w[1].0 - w[0].0) as u32).collect()
}

fn partition(theta: &Rotation, m: u64, side: Side, guard: &Guard) -> Result<Partition, RotationError> {
    let (pp, pm) = partition_pair_guarded(theta, m, guard)?;
    Ok(if side == Side::Upper { pp } else { pm })
}

/// (p⁺_θ(m), p⁻_θ(m)) in one pass over the columns.
pub fn partition_pair(theta: &Rotation, m: u64) -> Result<(Partition, Partition), RotationError> {
    partition_pair_guarded(theta, m, &Guard::default())
}

pub fn partition_pair_guarded(
    theta: &Rotation,
    m: u64,
    guard: &Guard,
) -> Result<(Partition, Partition), RotationError> {
    if m == 0 {
        return Err(RotationError::ZeroMultiplicity);
    }
    let (up, lo) = columns(theta, m, guard)?;
    Ok((Partition::from_parts(hull_parts(&up, Side::Upper)), Partition::from_parts(hull_parts(&lo, Side::Lower))))
}

/// p⁺_θ(m): upper hull of lattice points under y = {θ}x from (0,0) to (m, ⌊m{θ}⌋).
///
/// For exact elliptic θ (not in ½ℤ) the points on the line itself are excluded,
/// so p⁺ and p⁻ are those of θ − ε; at θ ∈ ½ℤ both hulls share the line.
pub fn partition_positive(theta: &Rotation, m: u64) -> Result<Partition, RotationError> {
    partition(theta, m, Side::Upper, &Guard::default())
}

/// p⁻_θ(m): lower hull of lattice points over y = {θ}x from (0,0) to (m, ⌈m{θ}⌉).
pub fn partition_negative(theta: &Rotation, m: u64) -> Result<Partition, RotationError> {
    partition(theta, m, Side::Lower, &Guard::default())
}

pub fn partition_positive_guarded(theta: &Rotation, m: u64, guard: &Guard) -> Result<Partition, RotationError> {
    partition(theta, m, Side::Upper, guard)
}

pub fn partition_negative_guarded(theta: &Rotation, m: u64, guard: &Guard) -> Result<Partition, RotationError> {
    partition(theta, m, Side::Lower, guard)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionProperties {
    pub p_plus: Partition,
    pub p_minus: Partition,
    /// No part value occurs in both partitions.
    pub disjoint: Check,
    /// 1 ∈ p⁺ exactly when 1 ∉ p⁻.
    pub unit_exclusive: Check,
    /// |p⁺| + |p⁻| ≤ 3 forces m{θ} < 2 or m(1 − {θ}) < 2.
    pub few_ends: Check,
}

impl PartitionProperties {
    pub fn all_hold(&self) -> bool {
        self.disjoint.holds && self.unit_exclusive.holds && self.few_ends.holds
    }
}

pub fn partition_properties(theta: &Rotation, m: u64) -> Result<PartitionProperties, RotationError> {
    partition_properties_guarded(theta, m, &Guard::default())
}

pub fn partition_properties_guarded(
    theta: &Rotation,
    m: u64,
    guard: &Guard,
) -> Result<PartitionProperties, RotationError> {
    let (p_plus, p_minus) = partition_pair_guarded(theta, m, guard)?;

    let common: Vec<u32> = p_plus.parts().iter().copied().filter(|k| p_minus.contains(*k)).collect();
    let disjoint = Check {
        holds: common.is_empty(),
        detail: if common.is_empty() { String::from("no shared part") } else { format!("shared part {}", common[0]) },
    };

    let one_plus = p_plus.contains(1);
    let one_minus = p_minus.contains(1);
    let unit_exclusive =
        Check { holds: one_plus != one_minus, detail: format!("1 in p+: {one_plus}, 1 in p-: {one_minus}") };

    let count = p_plus.len() + p_minus.len();
    let (low, high) = match theta.fract() {
        Rotation::Exact(t) => {
            let mt = t * (m as i64);
            let two = Rational::from_integer(2);
            (mt < two, Rational::from_integer(m as i64) - mt < two)
        }
        Rotation::Real(t) => {
            let mt = t * m as f64;
            (mt < 2.0, m as f64 - mt < 2.0)
        }
    };
    let few_ends = Check {
        holds: count > 3 || low || high,
        detail: format!("|p+| + |p-| = {count}, m{{θ}} < 2: {low}, m(1-{{θ}}) < 2: {high}"),
    };

    Ok(PartitionProperties { p_plus, p_minus, disjoint, unit_exclusive, few_ends })
}
