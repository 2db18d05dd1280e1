//! Concave lattice-path generators and the corner-rounding complex.
//!
//! A generator is a concave lattice path from x = 0 to x = d starting at height
//! y₀, built from primitive edges (q, p) of slope p/q ∈ [0, n] with multiplicity
//! m and an e/h label. Slopes 0 and n are elliptic only. With
//! L = Σ_{x=0}^{d} (⌊Λ(x)⌋ + 1) the grading is 3d + 2 − (2L − #h).
//!
//! Rounding a corner with an adjacent h edge gives the rounding map. The
//! differential used for spectral invariants is its transpose ∂*, which lowers
//! the grading by one and strictly lowers the action.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;

use super::census::{periodic_census, CensusError, CALIBRATION};
use super::profile::TwistProfile;
use crate::gf2::{self, Column};

const TAU: f64 = 2.0 * core::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub q: i64,
    pub p: i64,
    pub m: i64,
    pub h: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePathGenerator {
    pub y0: i64,
    pub edges: Vec<Edge>,
}

impl LatticePathGenerator {
    pub fn degree(&self) -> i64 {
        self.edges.iter().map(|e| e.q * e.m).sum()
    }

    pub fn h_count(&self) -> i64 {
        self.edges.iter().filter(|e| e.h).count() as i64
    }

    pub fn vertices(&self) -> Vec<(i64, i64)> {
        let mut v = alloc::vec![(0, self.y0)];
        for e in &self.edges {
            let (x, y) = *v.last().unwrap();
            v.push((x + e.q * e.m, y + e.p * e.m));
        }
        v
    }

    /// ⌊Λ(x)⌋ for x = 0, …, d.
    pub fn column_floors(&self) -> Vec<i64> {
        let mut out = alloc::vec![self.y0];
        let (mut y, mut x) = (self.y0, 0i64);
        for e in &self.edges {
            for j in 1..=e.q * e.m {
                out.push(y + Integer::div_floor(&(e.p * j), &e.q));
            }
            x += e.q * e.m;
            y += e.p * e.m;
        }
        debug_assert_eq!(out.len() as i64, x + 1);
        out
    }

    pub fn lattice_count(&self) -> i64 {
        self.column_floors().iter().map(|y| y + 1).sum()
    }

    pub fn grading(&self) -> i64 {
        let d = self.degree();
        3 * d + 2 - (2 * self.lattice_count() - self.h_count())
    }

    pub fn concave(&self) -> bool {
        self.edges.windows(2).all(|w| w[0].p * w[1].q > w[1].p * w[0].q)
    }
}

impl fmt::Display for LatticePathGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y0={}", self.y0)?;
        for e in &self.edges {
            write!(f, " {}{}/{}^{}", if e.h { 'h' } else { 'e' }, e.p, e.q, e.m)?;
        }
        Ok(())
    }
}

/// p/q ∈ [0, n] with q ≤ d in lowest terms, steepest first.
pub fn slopes(d: i64, n: i64) -> Vec<(i64, i64)> {
    let mut s = Vec::new();
    for q in 1..=d {
        for p in 0..=n * q {
            if p.gcd(&q) == 1 {
                s.push((p, q));
            }
        }
    }
    s.sort_by(|a, b| (b.0 * a.1).cmp(&(a.0 * b.1)));
    s
}

fn h_allowed(p: i64, q: i64, n: i64) -> bool {
    p != 0 && p != n * q
}

/// (q, p, multiplicity) of one edge run.
pub type Segment = (i64, i64, i64);

/// All unlabeled concave paths of width d with y₀ = 0.
pub fn enumerate_paths(d: i64, n: i64, cap: usize) -> Result<Vec<Vec<Segment>>, ComplexError> {
    let sl = slopes(d, n);
    let mut out = Vec::new();
    let mut stack = Vec::new();
    fn rec(
        sl: &[(i64, i64)],
        i: usize,
        x: i64,
        d: i64,
        stack: &mut Vec<(i64, i64, i64)>,
        out: &mut Vec<Vec<(i64, i64, i64)>>,
        cap: usize,
    ) -> Result<(), ComplexError> {
        if x == d {
            if out.len() >= cap {
                return Err(ComplexError::GeneratorCap { cap });
            }
            out.push(stack.clone());
            return Ok(());
        }
        for j in i..sl.len() {
            let (p, q) = sl[j];
            let mut m = 1;
            while x + q * m <= d {
                stack.push((q, p, m));
                rec(sl, j + 1, x + q * m, d, stack, out, cap)?;
                stack.pop();
                m += 1;
            }
        }
        Ok(())
    }
    rec(&sl, 0, 0, d, &mut stack, &mut out, cap)?;
    Ok(out)
}

/// Strict upper hull, collinear points dropped; returns primitive edges with multiplicity.
fn hull_edges(tops: &[(i64, i64)]) -> Vec<(i64, i64, i64)> {
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in tops {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            if (x2 - x1) * (pt.1 - y1) - (y2 - y1) * (pt.0 - x1) >= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull.windows(2)
        .map(|w| {
            let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            let g = dx.gcd(&dy);
            (dx / g, dy / g, g)
        })
        .collect()
}

/// Rounds vertex `vi`: drops that lattice point and takes the upper hull of the
/// highest remaining lattice point in each column.
pub fn round_corner(g: &LatticePathGenerator, vi: usize) -> Option<(i64, Vec<Segment>)> {
    let v = g.vertices();
    let corner = v[vi];
    let tops: Vec<(i64, i64)> = g
        .column_floors()
        .into_iter()
        .enumerate()
        .map(|(x, y)| {
            let x = x as i64;
            if x == corner.0 {
                (x, corner.1 - 1)
            } else {
                (x, y)
            }
        })
        .collect();
    let y0 = tops[0].1;
    let edges = hull_edges(&tops);
    if edges.iter().any(|e| e.1 < 0) {
        return None;
    }
    Some((y0, edges))
}

/// The rounding map ∂ as a list of targets, mod 2.
pub fn rounding_boundary(g: &LatticePathGenerator, n: i64) -> Vec<LatticePathGenerator> {
    let nn = g.edges.len();
    let mut counts: BTreeMap<LatticePathGenerator, u8> = BTreeMap::new();
    for vi in 0..=nn {
        let adj: Vec<usize> = [vi.wrapping_sub(1), vi].into_iter().filter(|&k| k < nn).collect();
        let hc = adj.iter().filter(|&&k| g.edges[k].h).count();
        if hc == 0 {
            continue;
        }
        let Some((y0, new_edges)) = round_corner(g, vi) else { continue };
        if new_edges.iter().any(|e| e.1 > n * e.0) {
            continue;
        }
        // Edges away from the corner keep their labels.
        let kept: Vec<&Edge> = (0..nn).filter(|k| !adj.contains(k)).map(|k| &g.edges[k]).collect();
        let mut layout: Vec<Edge> = Vec::with_capacity(new_edges.len());
        let mut local: Vec<usize> = Vec::new();
        for (i, &(q, p, m)) in new_edges.iter().enumerate() {
            match kept.iter().find(|e| e.p * q == p * e.q) {
                Some(e) => {
                    debug_assert_eq!(e.m, m);
                    layout.push(Edge { q, p, m, h: e.h });
                }
                None => {
                    layout.push(Edge { q, p, m, h: false });
                    if h_allowed(p, q, n) {
                        local.push(i);
                    }
                }
            }
        }
        let mut emit = |edges: Vec<Edge>| {
            *counts.entry(LatticePathGenerator { y0, edges }).or_insert(0) ^= 1;
        };
        if hc == 1 {
            emit(layout);
        } else {
            for &i in &local {
                let mut e = layout.clone();
                e[i].h = true;
                emit(e);
            }
        }
    }
    counts.into_iter().filter(|(_, c)| *c == 1).map(|(g, _)| g).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum ComplexError {
    DegreeCap { d: u32, cap: u32 },
    GeneratorCap { cap: usize },
    Unbounded,
    Census(CensusError),
    Rank { grading: i64, rank: usize },
}

impl fmt::Display for ComplexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexError::DegreeCap { d, cap } => write!(f, "degree {d} exceeds the complex cap {cap}"),
            ComplexError::GeneratorCap { cap } => write!(f, "generator count exceeds cap {cap}"),
            ComplexError::Unbounded => write!(f, "profile is unbounded at the center; truncate it first"),
            ComplexError::Census(e) => write!(f, "{e}"),
            ComplexError::Rank { grading, rank } => {
                write!(f, "calibration failure: homology rank {rank} in grading {grading}, expected 1")
            }
        }
    }
}

impl From<CensusError> for ComplexError {
    fn from(e: CensusError) -> Self {
        ComplexError::Census(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexOptions {
    pub degree_cap: u32,
    pub generator_cap: usize,
    /// Inclusive grading window; homology is reported strictly inside it.
    pub window: Option<(i64, i64)>,
}

impl Default for ComplexOptions {
    fn default() -> Self {
        ComplexOptions { degree_cap: 12, generator_cap: 2_000_000, window: None }
    }
}

/// Number of integer slopes; generators use slopes in [0, n].
pub fn slope_bound(f: &TwistProfile) -> Option<i64> {
    let top = f.sup();
    if !top.is_finite() {
        return None;
    }
    Some((libm::ceil(top / TAU) as i64).max(1))
}

#[derive(Clone, Debug)]
pub struct FilteredComplex {
    pub d: i64,
    pub n: i64,
    pub window: (i64, i64),
    pub generators: Vec<LatticePathGenerator>,
    pub grading: Vec<i64>,
    pub action: Vec<f64>,
    /// ∂* columns: indices of generators one grading lower.
    pub differential: Vec<Column>,
}

/// Action of a generator: Σ m·q·a(p/q) + offset·y₀ + ε·(grading − d).
pub fn generator_action(f: &TwistProfile, g: &LatticePathGenerator, density: &mut BTreeMap<(i64, i64), f64>) -> f64 {
    let mut a = CALIBRATION.reference_action;
    for e in &g.edges {
        let v = *density.entry((e.p, e.q)).or_insert_with(|| f.action_density(e.p as f64 / e.q as f64));
        a += (e.m * e.q) as f64 * v;
    }
    a + CALIBRATION.offset_per_height * g.y0 as f64 + CALIBRATION.epsilon * (g.grading() - g.degree()) as f64
}

pub fn build_complex(f: &TwistProfile, d: u32, opts: &ComplexOptions) -> Result<FilteredComplex, ComplexError> {
    if d > opts.degree_cap {
        return Err(ComplexError::DegreeCap { d, cap: opts.degree_cap });
    }
    let n = slope_bound(f).ok_or(ComplexError::Unbounded)?;
    periodic_census(f, d)?;
    let di = d as i64;
    let (lo, hi) = opts.window.unwrap_or((di - 1, di + 1));
    let (rlo, rhi) = (3 * di + 2 - hi, 3 * di + 2 - lo);
    let period = 2 * (di + 1);

    let mut generators = Vec::new();
    for path in enumerate_paths(di, n, opts.generator_cap)? {
        let free: Vec<usize> = (0..path.len()).filter(|&i| h_allowed(path[i].1, path[i].0, n)).collect();
        for mask in 0u64..(1u64 << free.len()) {
            let mut edges: Vec<Edge> = path.iter().map(|&(q, p, m)| Edge { q, p, m, h: false }).collect();
            for (bit, &i) in free.iter().enumerate() {
                edges[i].h = mask >> bit & 1 == 1;
            }
            let base = LatticePathGenerator { y0: 0, edges };
            let raw0 = 2 * base.lattice_count() - base.h_count();
            let ylo = Integer::div_ceil(&(rlo - raw0), &period);
            let yhi = Integer::div_floor(&(rhi - raw0), &period);
            for y0 in ylo..=yhi {
                if generators.len() >= opts.generator_cap {
                    return Err(ComplexError::GeneratorCap { cap: opts.generator_cap });
                }
                generators.push(LatticePathGenerator { y0, edges: base.edges.clone() });
            }
        }
    }
    generators.sort();
    let index: BTreeMap<&LatticePathGenerator, usize> = generators.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let grading: Vec<i64> = generators.iter().map(|g| g.grading()).collect();
    let mut density = BTreeMap::new();
    let action: Vec<f64> = generators.iter().map(|g| generator_action(f, g, &mut density)).collect();

    let mut differential: Vec<Vec<usize>> = alloc::vec![Vec::new(); generators.len()];
    for (i, g) in generators.iter().enumerate() {
        for t in rounding_boundary(g, n) {
            if let Some(&j) = index.get(&t) {
                differential[j].push(i);
            }
        }
    }
    let differential = differential.into_iter().map(gf2::from_multiset).collect();
    Ok(FilteredComplex { d: di, n, window: (lo, hi), generators, grading, action, differential })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexChecks {
    pub d_squared_zero: bool,
    pub grading_drop_one: bool,
    /// min action(source) − action(target) over nonzero entries; +∞ with no entries.
    pub filtration_floor: f64,
    pub entries: usize,
}

impl FilteredComplex {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn checks(&self) -> ComplexChecks {
        let (lo, _) = self.window;
        let mut grading_drop_one = true;
        let mut floor = f64::INFINITY;
        let mut entries = 0;
        for (i, col) in self.differential.iter().enumerate() {
            for &j in col {
                entries += 1;
                grading_drop_one &= self.grading[j] == self.grading[i] - 1;
                floor = floor.min(self.action[i] - self.action[j]);
            }
        }
        let squared = gf2::compose(&self.differential, &self.differential);
        let d_squared_zero = squared.iter().enumerate().all(|(i, c)| self.grading[i] < lo + 2 || c.is_empty());
        ComplexChecks { d_squared_zero, grading_drop_one, filtration_floor: floor, entries }
    }

    pub fn indices_in(&self, grading: i64) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.grading[i] == grading).collect()
    }

    fn rank_from(&self, grading: i64) -> usize {
        let cols: Vec<Column> = self.indices_in(grading).into_iter().map(|i| self.differential[i].clone()).collect();
        gf2::rank(&cols)
    }

    /// (grading, rank) for every grading strictly inside the window.
    pub fn homology_ranks(&self) -> Vec<(i64, usize)> {
        let (lo, hi) = self.window;
        (lo + 1..hi)
            .map(|g| {
                let dim = self.indices_in(g).len();
                (g, dim - self.rank_from(g) - self.rank_from(g + 1))
            })
            .collect()
    }

    /// Rank 1 in gradings ≡ d mod 2 and 0 otherwise, inside the window.
    pub fn rank_pattern_holds(&self) -> bool {
        self.homology_ranks().iter().all(|&(g, r)| r == if (g - self.d).rem_euclid(2) == 0 { 1 } else { 0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grading_of_flat_path() {
        let g = LatticePathGenerator { y0: 0, edges: alloc::vec![Edge { q: 1, p: 0, m: 3, h: false }] };
        assert_eq!(g.lattice_count(), 4);
        assert_eq!(g.grading(), 3);
    }

    #[test]
    fn floors_follow_edges() {
        let g = LatticePathGenerator {
            y0: 1,
            edges: alloc::vec![Edge { q: 2, p: 3, m: 1, h: true }, Edge { q: 1, p: 0, m: 1, h: false }],
        };
        assert_eq!(g.column_floors(), alloc::vec![1, 2, 4, 4]);
        assert!(g.concave());
    }

    #[test]
    fn degree_one_has_zero_differential() {
        let c =
            build_complex(&TwistProfile::zero(), 1, &ComplexOptions { window: Some((-3, 5)), ..Default::default() })
                .unwrap();
        assert!(c.differential.iter().all(|col| col.is_empty()));
    }

    #[test]
    fn small_complexes_are_valid() {
        let f = TwistProfile::ramp(TAU * 1.7, 0.9, 2).unwrap();
        for d in 1..=5 {
            let c = build_complex(
                &f,
                d,
                &ComplexOptions { window: Some((d as i64 - 4, d as i64 + 4)), ..Default::default() },
            )
            .unwrap();
            let chk = c.checks();
            assert!(chk.d_squared_zero && chk.grading_drop_one, "d = {d}");
            assert!(chk.filtration_floor > 0.0, "d = {d}: {}", chk.filtration_floor);
            assert!(c.rank_pattern_holds(), "d = {d}: {:?}", c.homology_ranks());
        }
    }
}
