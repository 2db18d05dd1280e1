//! Axiom checks, Weyl deviation tables and the infinite-twist experiment.

use alloc::vec::Vec;

use super::complex::ComplexError;
use super::profile::{calabi, hamiltonian_oscillation, hofer_norm_bound, TwistProfile};
use super::spectral::{spectral_dp, spectral_invariant_cd};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    /// Smallest slack observed; negative when violated.
    pub margin: f64,
}

impl Verdict {
    fn new() -> Self {
        Verdict { holds: true, margin: f64::INFINITY }
    }

    fn observe(&mut self, slack: f64) {
        self.margin = self.margin.min(slack);
        self.holds &= slack >= 0.0;
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylRow {
    pub d: u32,
    pub c_d: f64,
    pub ratio: f64,
    pub calabi: f64,
    pub calabi_area: f64,
    /// |c_d/d − Cal| / |Cal|.
    pub deviation: f64,
    pub deviation_area: f64,
}

fn rel(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        x.abs()
    } else {
        (x - y).abs() / y.abs()
    }
}

pub fn weyl_deviation_table(f: &TwistProfile, ds: &[u32]) -> Result<Vec<WeylRow>, ComplexError> {
    let cal = calabi(f);
    ds.iter()
        .map(|&d| {
            let c = spectral_invariant_cd(f, d)?;
            let ratio = c / d as f64;
            Ok(WeylRow {
                d,
                c_d: c,
                ratio,
                calabi: cal.value,
                calabi_area: cal.area,
                deviation: rel(ratio, cal.value),
                deviation_area: rel(ratio, cal.area),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    Below,
    Above,
    Equal,
    Incomparable,
}

/// Pointwise comparison of f and g on a grid plus breakpoints.
pub fn compare_profiles(f: &TwistProfile, g: &TwistProfile) -> Order {
    let mut pts: Vec<f64> = (1..=4096).map(|i| i as f64 / 4096.0).collect();
    pts.extend(f.pieces().iter().chain(g.pieces()).map(|p| p.hi));
    let (mut below, mut above) = (true, true);
    for r in pts {
        let (a, b) = (f.eval(r), g.eval(r));
        below &= a <= b;
        above &= a >= b;
    }
    match (below, above) {
        (true, true) => Order::Equal,
        (true, false) => Order::Below,
        (false, true) => Order::Above,
        _ => Order::Incomparable,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomsReport {
    pub identity: Verdict,
    /// None when f and g are not pointwise ordered.
    pub monotonicity: Option<Verdict>,
    pub hofer_lipschitz: Verdict,
    pub values: Vec<(u32, f64, f64)>,
    pub weyl_f: Vec<WeylRow>,
}

pub fn axioms_report(f: &TwistProfile, g: &TwistProfile, dmax: u32) -> Result<AxiomsReport, ComplexError> {
    let zero = TwistProfile::zero();
    let mut identity = Verdict::new();
    let order = compare_profiles(f, g);
    let mut mono = Verdict::new();
    let mut hofer = Verdict::new();
    let osc = hamiltonian_oscillation(f, g);
    let mut values = Vec::new();
    for d in 1..=dmax {
        let z = spectral_invariant_cd(&zero, d)?;
        identity.observe(if z == 0.0 { 0.0 } else { -z.abs() });
        let (cf, cg) = (spectral_invariant_cd(f, d)?, spectral_invariant_cd(g, d)?);
        match order {
            Order::Below | Order::Equal => mono.observe(cg - cf),
            Order::Above => mono.observe(cf - cg),
            Order::Incomparable => {}
        }
        hofer.observe(d as f64 * osc - (cf - cg).abs());
        values.push((d, cf, cg));
    }
    let ds: Vec<u32> = (1..=dmax).collect();
    Ok(AxiomsReport {
        identity,
        monotonicity: if order == Order::Incomparable { None } else { Some(mono) },
        hofer_lipschitz: hofer,
        values,
        weyl_f: weyl_deviation_table(f, &ds)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfiniteCell {
    pub i: u32,
    pub d: u32,
    pub c_d: f64,
    pub ratio: f64,
    /// c_d(f_i) ≤ c_d(f_{i+1}); absent on the last row.
    pub chain: Option<bool>,
    /// c_d(f_i) ≤ 2d·‖H_i‖.
    pub step2: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfiniteRow {
    pub i: u32,
    pub calabi: f64,
    pub calabi_area: f64,
    pub hofer: f64,
    pub sup_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfiniteReport {
    pub calabi_infinite: bool,
    pub rows: Vec<InfiniteRow>,
    pub cells: Vec<InfiniteCell>,
    pub calabi_increasing: bool,
    pub chain_holds: bool,
    pub step2_holds: bool,
    /// Smallest i with Cal(f_i) > target, if any.
    pub first_above: Option<u32>,
}

/// Truncates f at i = 1..=imax and tracks c_d(f_i) for each d in `ds`.
pub fn infinite_twist_experiment(
    f: &TwistProfile,
    imax: u32,
    ds: &[u32],
    target: f64,
) -> Result<InfiniteReport, ComplexError> {
    let calabi_infinite = !calabi(f).value.is_finite();
    let mut rows = Vec::new();
    let mut grid: Vec<Vec<f64>> = Vec::new();
    for i in 1..=imax {
        let fi = f.truncate(i).map_err(|_| ComplexError::Unbounded)?;
        let cal = calabi(&fi);
        let hofer = hofer_norm_bound(&fi);
        let cs: Vec<f64> = ds.iter().map(|&d| spectral_dp(&fi, d)).collect::<Result<_, _>>()?;
        let sup_ratio = ds.iter().zip(&cs).map(|(&d, c)| c / d as f64).fold(f64::NEG_INFINITY, f64::max);
        rows.push(InfiniteRow { i, calabi: cal.value, calabi_area: cal.area, hofer, sup_ratio });
        grid.push(cs);
    }
    let mut cells = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        for (j, &d) in ds.iter().enumerate() {
            let c = grid[k][j];
            cells.push(InfiniteCell {
                i: row.i,
                d,
                c_d: c,
                ratio: c / d as f64,
                chain: grid.get(k + 1).map(|next| c <= next[j]),
                step2: c <= 2.0 * d as f64 * row.hofer,
            });
        }
    }
    Ok(InfiniteReport {
        calabi_infinite,
        calabi_increasing: rows.windows(2).all(|w| w[0].calabi < w[1].calabi),
        chain_holds: cells.iter().all(|c| c.chain != Some(false)),
        step2_holds: cells.iter().all(|c| c.step2),
        first_above: rows.iter().find(|r| r.calabi > target).map(|r| r.i),
        rows,
        cells,
    })
}
