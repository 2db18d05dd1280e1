use std::f64::consts::TAU;

use echlab_core::ellipsoid::{
    angle_gap, gss_return_map, product_of_periods_check, simple_orbit_census, volume, volume_numeric, weyl_table,
    CensusItem, Ellipsoid, EllipsoidError, SectionPoint, SpectrumEntry, SpectrumOptions,
};
use serde_json::{json, Value as Json};

use crate::args::{EllipsoidCmd, AB};
use crate::num::{parse_value, Value};
use crate::report::{num_json, Table};
use crate::svg::PlotSpec;
use crate::{cache, gen, module, usage, Ctx, Out, RunError};

fn err(e: EllipsoidError) -> RunError {
    match e {
        EllipsoidError::NonPositive => usage(e),
        _ => module(e),
    }
}

pub fn parse_ab(ab: &AB) -> Result<Ellipsoid, RunError> {
    let a = parse_value(&ab.a).map_err(usage)?;
    let b = parse_value(&ab.b).map_err(usage)?;
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Ellipsoid::exact(x, y).map_err(err),
        _ => Ellipsoid::new(a.to_f64(), b.to_f64()).map_err(err),
    }
}

fn ellipsoid_json(e: &Ellipsoid) -> Json {
    json!({"a": num_json(e.a), "b": num_json(e.b), "irrational": e.is_irrational()})
}

pub fn run(c: &EllipsoidCmd, ctx: &Ctx, out: &mut Out) -> Result<(), RunError> {
    match c {
        EllipsoidCmd::Census { ab, l } => census(&parse_ab(ab)?, *l, out),
        EllipsoidCmd::Spectrum { ab, l, count, formal } => {
            let opts = SpectrumOptions { formal: *formal, cap: ctx.cap_or(SpectrumOptions::default().cap) };
            spectrum(&parse_ab(ab)?, *l, *count, &opts, out)
        }
        EllipsoidCmd::Weyl { ab, kmax, formal, max_rel_dev } => {
            let opts = SpectrumOptions { formal: *formal, cap: ctx.cap_or(SpectrumOptions::default().cap) };
            weyl(&parse_ab(ab)?, *kmax, ctx.tol.unwrap_or(*max_rel_dev), &opts, out)
        }
        EllipsoidCmd::ReturnMap { ab, points } => return_map(&parse_ab(ab)?, *points, ctx.seed, ctx.tol_or(1e-9), out),
        EllipsoidCmd::IdentityCheck { ab } => identity_check(&parse_ab(ab)?, ctx.tol_or(1e-6), out),
    }
}

pub fn census(e: &Ellipsoid, l: f64, out: &mut Out) -> Result<(), RunError> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(usage("--l must be a positive number"));
    }
    let items = simple_orbit_census(e, l);
    let mut t = Table::new("census", &["kind", "index", "action", "theta", "multiple"]);
    let mut list = Vec::new();
    let (mut cores, mut tori) = (0, 0);
    for it in &items {
        match it {
            CensusItem::Core { index, action, theta } => {
                cores += 1;
                t.push(vec![
                    "core".into(),
                    (*index as u32).into(),
                    (*action).into(),
                    theta.to_f64().into(),
                    1u32.into(),
                ]);
                list.push(json!({"kind": "core", "index": index, "action": num_json(*action), "theta": num_json(theta.to_f64())}));
            }
            CensusItem::TorusFamily { action, multiple } => {
                tori += 1;
                t.push(vec!["torus_family".into(), 0u32.into(), (*action).into(), f64::NAN.into(), (*multiple).into()]);
                list.push(json!({"kind": "torus_family", "action": num_json(*action), "multiple": multiple}));
            }
        }
    }
    out.put("ellipsoid", ellipsoid_json(e));
    out.put("census", Json::Array(list));
    out.table(t);
    if e.is_irrational() && l >= e.a.max(e.b) {
        out.verdict(
            "ellipsoid.census.two_orbits",
            cores == 2 && tori == 0,
            None,
            format!("{cores} core orbits, {tori} torus families"),
        );
    }
    Ok(())
}

fn spectrum_table(entries: &[SpectrumEntry]) -> Table {
    let mut t = Table::new("spectrum", &["k", "c_k", "grading", "m", "n"]);
    for s in entries {
        t.push(vec![s.k.into(), s.c.into(), s.grading.into(), s.m.into(), s.n.into()]);
    }
    t
}

pub fn spectrum(
    e: &Ellipsoid,
    l: Option<f64>,
    count: Option<usize>,
    opts: &SpectrumOptions,
    out: &mut Out,
) -> Result<(), RunError> {
    let entries = match (l, count) {
        (Some(l), None) => echlab_core::ellipsoid::action_spectrum(e, l, opts).map_err(err)?,
        (None, Some(n)) => cache::cached_prefix(e, n, opts, cache::cache_dir().as_deref()).map_err(err)?,
        _ => return Err(usage("give exactly one of --l or --count")),
    };
    out.put("ellipsoid", ellipsoid_json(e));
    out.put("entries", Json::from(entries.len()));
    out.table(spectrum_table(&entries));
    Ok(())
}

/// Window maxima of |c_k²/(2k) − V| over [K, 2K] for K = 10², 10³, … ≤ kmax.
pub fn weyl_windows(e: &Ellipsoid, kmax: u64, opts: &SpectrumOptions) -> Result<Vec<(u64, f64)>, RunError> {
    let mut ks = Vec::new();
    let mut k = 100u64;
    while k <= kmax {
        ks.push(k);
        k *= 10;
    }
    let Some(&last) = ks.last() else { return Ok(Vec::new()) };
    let prefix = cache::cached_prefix(e, 2 * last as usize + 1, opts, cache::cache_dir().as_deref()).map_err(err)?;
    let v = volume(e);
    Ok(ks
        .iter()
        .map(|&k0| {
            let worst = prefix[k0 as usize..=2 * k0 as usize]
                .iter()
                .map(|s| (s.c * s.c / (2.0 * s.k as f64) - v).abs())
                .fold(0.0, f64::max);
            (k0, worst)
        })
        .collect())
}

pub fn weyl(e: &Ellipsoid, kmax: u64, max_rel_dev: f64, opts: &SpectrumOptions, out: &mut Out) -> Result<(), RunError> {
    if kmax == 0 {
        return Err(usage("--kmax must be positive"));
    }
    let table = weyl_table(e, kmax, opts).map_err(err)?;
    let mut t = Table::new("weyl", &["k", "c_k", "ratio", "deviation"]);
    for r in &table.rows {
        t.push(vec![r.k.into(), r.c.into(), r.ratio.into(), r.deviation.into()]);
    }
    let last = table.rows.last().copied();
    out.put("ellipsoid", ellipsoid_json(e));
    out.put("volume", num_json(table.volume));
    out.put("final_decade_max", num_json(table.final_decade_max));
    out.table(t);
    out.plot(&PlotSpec {
        title: "Weyl deviation |c_k^2/(2k) - vol|".into(),
        x: "k".into(),
        y: vec!["deviation".into()],
        group_by: None,
        log_x: true,
        log_y: true,
    })?;
    if let Some(r) = last {
        let bound = max_rel_dev * table.volume;
        out.verdict(
            "ellipsoid.weyl.deviation",
            r.deviation <= bound,
            Some(bound - r.deviation),
            format!("k={} deviation={} bound={}", r.k, r.deviation, bound),
        );
    }
    let windows = weyl_windows(e, kmax, opts)?;
    let mut w = Table::new("weyl_windows", &["K", "window_max"]);
    for &(k, m) in &windows {
        w.push(vec![k.into(), m.into()]);
    }
    out.table(w);
    if windows.len() >= 2 {
        let margin = windows.windows(2).map(|p| p[0].1 - p[1].1).fold(f64::INFINITY, f64::min);
        out.verdict(
            "ellipsoid.weyl.windows_decrease",
            margin > 0.0,
            Some(margin),
            format!("{} windows [K, 2K]", windows.len()),
        );
    }
    Ok(())
}

pub fn return_map(e: &Ellipsoid, points: usize, seed: u64, tol: f64, out: &mut Out) -> Result<(), RunError> {
    let mut rng = gen::rng(seed);
    let shift = (TAU * e.a / e.b).rem_euclid(TAU);
    let mut t = Table::new("return_map", &["rho", "angle", "image_angle", "return_time", "angle_error", "time_error"]);
    let mut worst: f64 = 0.0;
    for (rho, angle) in gen::section_points(&mut rng, points) {
        let (y, time) = gss_return_map(e, SectionPoint { rho, angle }).map_err(err)?;
        let expected = (angle + shift).rem_euclid(TAU);
        let ea = angle_gap(y.angle, expected) + (y.rho - rho).abs();
        let et = (time - e.a).abs();
        worst = worst.max(ea).max(et);
        t.push(vec![rho.into(), angle.into(), y.angle.into(), time.into(), ea.into(), et.into()]);
    }
    out.put("ellipsoid", ellipsoid_json(e));
    out.put("rotation", num_json(shift));
    out.put("return_time", num_json(e.a));
    out.table(t);
    out.verdict("ellipsoid.return_map", worst <= tol, Some(tol - worst), format!("{points} points, max error {worst}"));
    Ok(())
}

pub fn identity_check(e: &Ellipsoid, tol: f64, out: &mut Out) -> Result<(), RunError> {
    let product = e.a * e.b;
    let numeric = volume_numeric(e, tol * 1e-2);
    let rel = (numeric - product).abs() / product;
    let periods = product_of_periods_check(e).ok();
    let mut t = Table::new("identity", &["a", "b", "product", "volume_numeric", "relative_error"]);
    t.push(vec![e.a.into(), e.b.into(), product.into(), numeric.into(), rel.into()]);
    out.put("ellipsoid", ellipsoid_json(e));
    out.put("period_product", periods.map(|p| num_json(p.product)).unwrap_or(Json::Null));
    out.put("volume_numeric", num_json(numeric));
    out.table(t);
    out.verdict("ellipsoid.identity", rel <= tol, Some(tol - rel), format!("relative error {rel}"));
    Ok(())
}
