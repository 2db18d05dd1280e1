use echlab_core::twist::complex::ComplexError;
use echlab_core::twist::experiments::{axioms_report, infinite_twist_experiment, weyl_deviation_table, Verdict};
use echlab_core::twist::{build_complex, calabi, hofer_norm_bound, periodic_census, ComplexOptions, TwistProfile};
use serde_json::{json, Value as Json};

use crate::args::TwistCmd;
use crate::profile_io::parse_profile;
use crate::report::{num_json, Table};
use crate::svg::PlotSpec;
use crate::{module, usage, Ctx, Out, RunError};

fn err(e: ComplexError) -> RunError {
    module(e)
}

/// A profile file path, or inline JSON when the argument starts with '{'.
pub fn load_profile(arg: &str) -> Result<TwistProfile, RunError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| usage(format!("{arg}: {e}")))?
    };
    parse_profile(&text).map_err(usage)
}

pub fn run(c: &TwistCmd, ctx: &Ctx, out: &mut Out) -> Result<(), RunError> {
    match c {
        TwistCmd::Calabi { profile } => calabi_cmd(&load_profile(profile)?, ctx.tol_or(1e-6), out),
        TwistCmd::Census { profile, d } => census(&load_profile(profile)?, *d, out),
        TwistCmd::Complex { profile, d, window } => {
            let opts = ComplexOptions {
                generator_cap: ctx.cap_or(ComplexOptions::default().generator_cap),
                window: window.as_ref().map(|w| (w[0], w[1])),
                ..ComplexOptions::default()
            };
            complex(&load_profile(profile)?, *d, &opts, out)
        }
        TwistCmd::Cd { profile, d } => cd(&load_profile(profile)?, d, out),
        TwistCmd::Axioms { profile, other, dmax } => axioms(&load_profile(profile)?, &load_profile(other)?, *dmax, out),
        TwistCmd::Infinite { profile, imax, d, target } => {
            infinite(&load_profile(profile)?, *imax, d, Some(*target), out)
        }
    }
}

pub fn calabi_cmd(f: &TwistProfile, tol: f64, out: &mut Out) -> Result<(), RunError> {
    let r = calabi(f);
    let hofer = hofer_norm_bound(f);
    let mut t = Table::new("calabi", &["calabi", "calabi_area", "quadrature", "hofer_bound"]);
    t.push(vec![r.value.into(), r.area.into(), r.quadrature.unwrap_or(f64::NAN).into(), hofer.into()]);
    out.put(
        "calabi",
        json!({
            "value": num_json(r.value),
            "area": num_json(r.area),
            "quadrature": r.quadrature.map(num_json),
            "relative_gap": r.relative_gap.map(num_json),
            "hofer_bound": num_json(hofer),
            // f vanishes on the outermost piece
            "support_flag": f.support_flag(),
        }),
    );
    out.table(t);
    if let Some(gap) = r.relative_gap {
        out.verdict("twist.calabi.quadrature", gap <= tol, Some(tol - gap), format!("relative gap {gap}"));
    }
    Ok(())
}

pub fn census(f: &TwistProfile, d: u32, out: &mut Out) -> Result<(), RunError> {
    let circles = periodic_census(f, d).map_err(module)?;
    let mut t = Table::new("twist_census", &["p", "q", "r", "action", "at_center"]);
    for c in &circles {
        t.push(vec![c.p.into(), c.q.into(), c.r.into(), c.action.into(), c.at_center.into()]);
    }
    out.put("circles", Json::from(circles.len()));
    out.table(t);
    Ok(())
}

pub fn complex(f: &TwistProfile, d: u32, opts: &ComplexOptions, out: &mut Out) -> Result<(), RunError> {
    let c = build_complex(f, d, opts).map_err(err)?;
    let checks = c.checks();
    let mut g = Table::new("generators", &["index", "path", "grading", "action"]);
    for (i, gen) in c.generators.iter().enumerate() {
        g.push(vec![i.into(), gen.to_string().into(), c.grading[i].into(), c.action[i].into()]);
    }
    let ranks = c.homology_ranks();
    let mut h = Table::new("homology", &["grading", "rank"]);
    for &(gr, r) in &ranks {
        h.push(vec![gr.into(), r.into()]);
    }
    out.put(
        "complex",
        json!({
            "d": c.d, "n": c.n, "window": [c.window.0, c.window.1],
            "generators": c.len(), "entries": checks.entries,
            "filtration_floor": num_json(checks.filtration_floor),
        }),
    );
    out.table(g);
    out.table(h);
    out.verdict("twist.complex.d_squared_zero", checks.d_squared_zero, None, format!("{} entries", checks.entries));
    out.verdict("twist.complex.grading_drop", checks.grading_drop_one, None, "");
    out.verdict(
        "twist.complex.action_decrease",
        checks.entries == 0 || checks.filtration_floor > 0.0,
        Some(checks.filtration_floor),
        "smallest action drop along the differential",
    );
    out.verdict(
        "twist.complex.rank_pattern",
        c.rank_pattern_holds(),
        None,
        ranks.iter().map(|(g, r)| format!("{g}:{r}")).collect::<Vec<_>>().join(" "),
    );
    Ok(())
}

pub fn cd(f: &TwistProfile, ds: &[u32], out: &mut Out) -> Result<(), RunError> {
    if ds.contains(&0) {
        return Err(usage("degrees must be positive"));
    }
    let rows = weyl_deviation_table(f, ds).map_err(err)?;
    let mut t = Table::new("cd", &["d", "c_d", "c_d_over_d", "calabi", "deviation", "calabi_area", "deviation_area"]);
    for r in &rows {
        t.push(vec![
            r.d.into(),
            r.c_d.into(),
            r.ratio.into(),
            r.calabi.into(),
            r.deviation.into(),
            r.calabi_area.into(),
            r.deviation_area.into(),
        ]);
    }
    out.table(t);
    out.plot(&PlotSpec {
        title: "c_d/d against d".into(),
        x: "d".into(),
        y: vec!["c_d_over_d".into(), "calabi".into(), "calabi_area".into()],
        group_by: None,
        log_x: true,
        log_y: false,
    })?;
    Ok(())
}

fn verdict(out: &mut Out, name: &str, v: &Verdict) {
    out.verdict(name, v.holds, Some(v.margin), "");
}

pub fn axioms(f: &TwistProfile, g: &TwistProfile, dmax: u32, out: &mut Out) -> Result<(), RunError> {
    if dmax == 0 {
        return Err(usage("--dmax must be positive"));
    }
    let r = axioms_report(f, g, dmax).map_err(err)?;
    let mut t = Table::new("axioms", &["d", "c_d_f", "c_d_g"]);
    for &(d, a, b) in &r.values {
        t.push(vec![d.into(), a.into(), b.into()]);
    }
    out.table(t);
    verdict(out, "twist.axioms.identity", &r.identity);
    match &r.monotonicity {
        Some(v) => verdict(out, "twist.axioms.monotonicity", v),
        None => out.put("monotonicity", Json::from("profiles are not ordered")),
    }
    verdict(out, "twist.axioms.hofer_lipschitz", &r.hofer_lipschitz);
    Ok(())
}

pub fn infinite(f: &TwistProfile, imax: u32, ds: &[u32], target: Option<f64>, out: &mut Out) -> Result<(), RunError> {
    if imax == 0 || ds.is_empty() || ds.contains(&0) {
        return Err(usage("--imax and every degree must be positive"));
    }
    let r = infinite_twist_experiment(f, imax, ds, target.unwrap_or(f64::INFINITY)).map_err(err)?;
    let mut rows = Table::new("truncations", &["i", "calabi", "calabi_area", "hofer_bound", "sup_ratio"]);
    for row in &r.rows {
        rows.push(vec![
            row.i.into(),
            row.calabi.into(),
            row.calabi_area.into(),
            row.hofer.into(),
            row.sup_ratio.into(),
        ]);
    }
    let mut cells = Table::new("cells", &["i", "d", "c_d", "ratio", "chain", "step2"]);
    for c in &r.cells {
        let chain = match c.chain {
            Some(b) => b.into(),
            None => "".into(),
        };
        cells.push(vec![c.i.into(), c.d.into(), c.c_d.into(), c.ratio.into(), chain, c.step2.into()]);
    }
    out.put("calabi_infinite", Json::from(r.calabi_infinite));
    out.put("first_above", r.first_above.map(Json::from).unwrap_or(Json::Null));
    out.table(rows);
    out.table(cells);
    out.plot(&PlotSpec {
        title: "c_d/d by truncation i".into(),
        x: "d".into(),
        y: vec!["ratio".into()],
        group_by: Some("i".into()),
        log_x: true,
        log_y: false,
    })?;
    out.verdict("twist.infinite.calabi_increasing", r.calabi_increasing, None, "");
    out.verdict("twist.infinite.chain", r.chain_holds, None, "c_d(f_i) <= c_d(f_i+1)");
    out.verdict("twist.infinite.step2", r.step2_holds, None, "c_d(f_i) <= 2d hofer(f_i)");
    if let Some(t) = target {
        let last = r.rows.last().map(|x| x.calabi).unwrap_or(f64::NAN);
        out.verdict(
            "twist.infinite.calabi_above_target",
            r.first_above.is_some(),
            Some(last - t),
            match r.first_above {
                Some(i) => format!("Cal(f_{i}) > {t}"),
                None => format!("Cal(f_{imax}) = {last} <= {t}"),
            },
        );
    }
    Ok(())
}
