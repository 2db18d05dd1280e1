//! A fixed, seeded battery of small runs across every module.
//!
//! Output depends only on the seed; no timings or paths are recorded.

use echlab_core::ellipsoid::{Ellipsoid, SpectrumOptions};
use echlab_core::orbit::{EndFloor, ScanParams};
use echlab_core::twist::{ComplexOptions, TwistProfile};
use rand::Rng;
use serde_json::json;

use crate::commands::{combinatorics, ellipsoid, twist};
use crate::{gen, module, Ctx, Out, RunError};

fn profile(r: Result<TwistProfile, echlab_core::twist::profile::ProfileError>) -> Result<TwistProfile, RunError> {
    r.map_err(module)
}

pub fn run(ctx: &Ctx, out: &mut Out) -> Result<(), RunError> {
    let mut rng = gen::rng(ctx.seed);
    let opts = SpectrumOptions::default();

    out.set_prefix("weyl");
    let e = Ellipsoid::new(1.0, 2f64.sqrt()).map_err(module)?;
    ellipsoid::weyl(&e, 20_000, 0.02, &opts, out)?;

    for i in 0..3 {
        let (a, b) = (rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0));
        let e = Ellipsoid::new(a, b).map_err(module)?;
        out.set_prefix(&format!("census{i}"));
        ellipsoid::census(&e, 100.0 * a.max(b), out)?;
        out.set_prefix(&format!("return_map{i}"));
        ellipsoid::return_map(&e, 20, rng.gen(), 1e-9, out)?;
    }
    out.set_prefix("identity");
    let e = Ellipsoid::new(rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0)).map_err(module)?;
    ellipsoid::identity_check(&e, 1e-6, out)?;

    out.set_prefix("partitions");
    let grid = combinatorics::partition_grid(20, 6, 50, rng.gen())?;
    out.put(
        "grid",
        json!({
            "cases": grid.cases,
            "hyperbolic_cases": grid.hyperbolic_cases,
            "elliptic_cases": grid.elliptic_cases,
        }),
    );
    let first = grid.first_failure.clone().unwrap_or_default();
    out.verdict("partition_lemmas", grid.partrev_failures == 0, None, first.clone());
    out.verdict("cz", grid.cz_failures == 0, None, first.clone());
    out.verdict("hyperbolic_clauses", grid.hyperbolic_failures == 0, None, first.clone());
    out.verdict("elliptic_clause", grid.elliptic_failures == 0, None, first);

    out.set_prefix("j0");
    let j0 = combinatorics::j0_exhaustive()?;
    out.put("curves", json!(j0.curves));
    out.put("forced", json!(j0.forced.iter().collect::<Vec<_>>()));
    out.put("one_sided", json!(j0.one_sided.iter().collect::<Vec<_>>()));
    out.verdict("cylinder_forced", j0.forced.iter().eq([(0u32, 2usize)].iter()), None, format!("{} curves", j0.curves));

    out.set_prefix("tower");
    let mut towers = Vec::new();
    for _ in 0..5 {
        let pool = gen::tower_pool(&mut rng);
        towers.push(gen::random_tower(&mut rng, &pool, 200).map_err(module)?);
    }
    combinatorics::audit_towers(&towers, 4.0, 1.0, 0.5, false, out)?;

    out.set_prefix("score");
    let orbits = gen::scan_orbits(&mut rng, 3);
    let params = ScanParams { max_mult: 8, floor: EndFloor::FewEnds(400), ..ScanParams::default() };
    combinatorics::score_with(&orbits, &params, out)?;

    let profiles = [
        ("ramp", profile(TwistProfile::ramp(3.0, 0.7, 1))?),
        ("constant", profile(TwistProfile::constant(8.0))?),
        ("steep", profile(TwistProfile::ramp(14.0, 0.9, 2))?),
    ];
    for (name, f) in &profiles {
        for d in 1..=4 {
            out.set_prefix(&format!("complex_{name}_{d}"));
            twist::complex(f, d, &ComplexOptions::default(), out)?;
        }
        out.set_prefix(&format!("calabi_{name}"));
        twist::calabi_cmd(f, 1e-6, out)?;
    }

    out.set_prefix("axioms");
    let f = profile(TwistProfile::ramp(2.0, 0.8, 1))?;
    let g = profile(TwistProfile::ramp(3.0, 0.8, 1))?;
    twist::axioms(&f, &g, 4, out)?;

    out.set_prefix("cd");
    twist::cd(&profiles[0].1, &[4, 8, 16, 32], out)?;

    out.set_prefix("infinite");
    let inv = profile(TwistProfile::power(1.0, -3))?;
    twist::infinite(&inv, 6, &[1, 2, 4], None, out)?;
    Ok(())
}
