use std::collections::BTreeSet;

use echlab_core::orbit::{
    j0_of_curve, score_scan, tower_audit, AuditParams, CurveData, EndFloor, EndGroup, OrbitSet, ScanParams,
    SimpleOrbit, Tower,
};
use echlab_core::rotation::{cz_index, partition_negative, partition_positive, partition_properties};
use echlab_core::{Rational, Rotation};
use rand::Rng;
use serde_json::{json, Value as Json};

use crate::args::{PartitionsArgs, ScoreArgs, TowerArgs};
use crate::num::parse_value;
use crate::orbit_io::{CurveSpec, Document};
use crate::report::Table;
use crate::{gen, module, usage, Ctx, Out, RunError};

pub fn partitions(a: &PartitionsArgs, out: &mut Out) -> Result<(), RunError> {
    if a.m == 0 {
        return Err(usage("--m must be positive"));
    }
    let theta = parse_value(&a.theta).map_err(usage)?.rotation();
    let props = partition_properties(&theta, a.m).map_err(module)?;
    let cz = cz_index(&theta, a.m).map_err(module)?;
    let pass = props.all_hold();
    out.put("theta", Json::from(theta.to_string()));
    out.put("m", Json::from(a.m));
    out.put("p_plus", json!(props.p_plus.parts()));
    out.put("p_minus", json!(props.p_minus.parts()));
    out.put("cz", Json::from(cz));
    out.put("properties", Json::from(if pass { "pass" } else { "fail" }));
    out.put(
        "checks",
        json!({
            "disjoint": {"holds": props.disjoint.holds, "detail": props.disjoint.detail},
            "unit_exclusive": {"holds": props.unit_exclusive.holds, "detail": props.unit_exclusive.detail},
            "few_ends": {"holds": props.few_ends.holds, "detail": props.few_ends.detail},
        }),
    );
    out.verdict("partitions.properties", pass, None, format!("p+={} p-={}", props.p_plus, props.p_minus));
    Ok(())
}

/// Outcome of the partition and CZ sweep.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GridReport {
    pub cases: usize,
    pub partrev_failures: usize,
    pub cz_failures: usize,
    pub hyperbolic_cases: usize,
    pub hyperbolic_failures: usize,
    pub elliptic_cases: usize,
    pub elliptic_failures: usize,
    pub first_failure: Option<String>,
}

fn note(first: &mut Option<String>, msg: impl FnOnce() -> String) {
    if first.is_none() {
        *first = Some(msg());
    }
}

fn cz_ok(theta: &Rotation, m: u64) -> Result<bool, RunError> {
    let cz = cz_index(theta, m).map_err(module)?;
    let integral = match theta {
        Rotation::Exact(q) => (q * Rational::from_integer(m as i64)).is_integer(),
        Rotation::Real(_) => false,
    };
    let parity = (cz.rem_euclid(2) == 1) == !integral;
    let bound = (cz as f64 / (2.0 * m as f64) - theta.to_f64()).abs() <= 1.0 / m as f64;
    Ok(parity && bound)
}

/// Lemma checks over m ∈ [2, mmax], rationals u/v ∉ ½ℤ with v ≤ vmax, and seeded irrationals;
/// hyperbolic clauses at integer and half-integer θ; the elliptic clause for {θ} < 1/m.
pub fn partition_grid(mmax: u64, vmax: i64, irrationals: usize, seed: u64) -> Result<GridReport, RunError> {
    let mut thetas: Vec<Rotation> = Vec::new();
    for v in 2..=vmax {
        for u in -v..=2 * v {
            let q = Rational::new(u, v);
            // half-integers are negative hyperbolic and covered by the hyperbolic clauses
            if *q.denom() == v && v != 2 {
                thetas.push(Rotation::Exact(q));
            }
        }
    }
    let mut rng = gen::rng(seed);
    for _ in 0..irrationals {
        thetas.push(Rotation::real(rng.gen_range(-1.0..2.0)));
    }
    let mut r = GridReport::default();
    for theta in &thetas {
        for m in 2..=mmax {
            r.cases += 1;
            let p = partition_properties(theta, m).map_err(module)?;
            if !p.all_hold() {
                r.partrev_failures += 1;
                note(&mut r.first_failure, || format!("partition lemma at theta={theta} m={m}"));
            }
            if !cz_ok(theta, m)? {
                r.cz_failures += 1;
                note(&mut r.first_failure, || format!("CZ at theta={theta} m={m}"));
            }
            let frac = theta.fract().to_f64();
            if frac < 1.0 / m as f64 {
                r.elliptic_cases += 1;
                if partition_positive(theta, m).map_err(module)?.parts() != vec![1; m as usize].as_slice() {
                    r.elliptic_failures += 1;
                    note(&mut r.first_failure, || format!("elliptic clause at theta={theta} m={m}"));
                }
            }
        }
    }
    for k in -2i64..=3 {
        for (theta, half) in [(Rotation::exact(k, 1), false), (Rotation::exact(2 * k + 1, 2), true)] {
            for m in 1..=mmax {
                r.hyperbolic_cases += 1;
                let mut want = vec![if half { 2 } else { 1 }; if half { m as usize / 2 } else { m as usize }];
                if half && m % 2 == 1 {
                    want.push(1);
                }
                let pp = partition_positive(&theta, m).map_err(module)?;
                let pm = partition_negative(&theta, m).map_err(module)?;
                if pp.parts() != want.as_slice() || pm.parts() != want.as_slice() {
                    r.hyperbolic_failures += 1;
                    note(&mut r.first_failure, || format!("hyperbolic clause at theta={theta} m={m}"));
                }
            }
        }
    }
    Ok(r)
}

/// J₀ over every curve shape with genus ≤ 3 and at most 6 ends spread over two orbits,
/// with each end group either covered by C₀ or not.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct J0Report {
    pub curves: usize,
    /// (genus, ends) reached with J₀ = 2 and full C₀ coverage.
    pub forced: BTreeSet<(u32, usize)>,
    /// (genus, ends) reached with J₀ = 2 when some group lacks C₀.
    pub partial: BTreeSet<(u32, usize)>,
    /// (genus, ends) reached with J₀ = 2 and full coverage but ends of one sign only;
    /// low action rules these out.
    pub one_sided: BTreeSet<(u32, usize)>,
}

fn groups(ends: usize, split: usize, covered: [bool; 2]) -> Vec<EndGroup> {
    [(1u32, split), (2u32, ends - split)]
        .into_iter()
        .zip(covered)
        .filter(|((_, k), _)| *k > 0)
        .map(|((orbit, k), c0)| EndGroup { orbit, mults: vec![1; k], c0_present: c0 })
        .collect()
}

fn set_for(orbits: &[SimpleOrbit], gs: &[EndGroup], filler: u32) -> Result<OrbitSet, RunError> {
    let mut entries = Vec::new();
    for o in orbits {
        let m = match gs.iter().find(|g| g.orbit == o.id) {
            Some(g) => g.total() + g.c0_present as u32,
            None if o.id == 3 => filler,
            None => 0,
        };
        if m > 0 {
            entries.push((o.clone(), m));
        }
    }
    OrbitSet::new(entries).map_err(module)
}

pub fn j0_exhaustive() -> Result<J0Report, RunError> {
    let orbits = [
        SimpleOrbit::new(1, 1.0, Rotation::real(2f64.sqrt() / 10.0)).map_err(module)?,
        SimpleOrbit::new(2, 1.0, Rotation::real(1.0 / std::f64::consts::E)).map_err(module)?,
        SimpleOrbit::new(3, 1.0, Rotation::real(0.5 + 3f64.sqrt() / 100.0)).map_err(module)?,
    ];
    let cover = [[true, true], [true, false], [false, true], [false, false]];
    let mut r = J0Report::default();
    for genus in 0..=3u32 {
        for e in 1..=6usize {
            for pos in 0..=e {
                let neg = e - pos;
                for ps in 0..=pos {
                    for ns in 0..=neg {
                        for pc in cover {
                            for nc in cover {
                                let pg = groups(pos, ps, pc);
                                let ng = groups(neg, ns, nc);
                                // orbit 3 carries no ends and only pads α so the action stays nonnegative
                                let alpha = set_for(&orbits, &pg, neg as u32 + 2)?;
                                let beta = set_for(&orbits, &ng, 0)?;
                                let Ok(c) = CurveData::new(genus, pg.clone(), ng.clone(), 0, alpha, beta) else {
                                    continue;
                                };
                                r.curves += 1;
                                if j0_of_curve(&c).map_err(module)? == 2 {
                                    if pos == 0 || neg == 0 {
                                        if c.full_coverage() {
                                            r.one_sided.insert((genus, e));
                                        }
                                    } else if c.full_coverage() {
                                        r.forced.insert((genus, e));
                                    } else {
                                        r.partial.insert((genus, e));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(r)
}

fn parse_floor(s: &str) -> Result<EndFloor, RunError> {
    match s {
        "few-ends" => Ok(EndFloor::FewEnds(400)),
        "none" => Ok(EndFloor::None),
        n => n.parse().map(EndFloor::Fixed).map_err(|_| usage(format!("bad --floor {n:?}"))),
    }
}

fn read_doc(path: &std::path::Path) -> Result<Document, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Document::parse(&text).map_err(usage)
}

pub fn score(a: &ScoreArgs, ctx: &Ctx, out: &mut Out) -> Result<(), RunError> {
    let orbits = match &a.orbits {
        Some(p) => read_doc(p)?.orbits().map_err(usage)?,
        None => gen::scan_orbits(&mut gen::rng(ctx.seed), a.count),
    };
    let params = ScanParams {
        max_mult: a.max_mult,
        max_genus: a.max_genus,
        low_action: a.low_action,
        floor: parse_floor(&a.floor)?,
        ..ScanParams::default()
    };
    score_with(&orbits, &params, out)
}

pub fn score_with(orbits: &[SimpleOrbit], params: &ScanParams, out: &mut Out) -> Result<(), RunError> {
    let r = score_scan(orbits, params).map_err(module)?;
    let mut t = Table::new("score_histogram", &["T", "count"]);
    for (k, v) in &r.t_histogram {
        t.push(vec![(*k).into(), (*v).into()]);
    }
    out.put("orbits", Json::from(orbits.len()));
    out.put("instances", Json::from(r.instances));
    out.put("floors", json!(r.floors));
    out.put("rechecked", Json::from(r.rechecked));
    out.put(
        "negative",
        Json::Array(r.negative.iter().map(|c| serde_json::to_value(CurveSpec::from_curve(c)).expect("spec")).collect()),
    );
    out.table(t);
    out.verdict(
        "score.no_negative",
        r.negative_count == 0,
        None,
        format!("{} instances, {} with T < 0", r.instances, r.negative_count),
    );
    out.verdict(
        "score.recheck",
        r.recheck_mismatches == 0,
        None,
        format!("{} rechecked, {} mismatches", r.rechecked, r.recheck_mismatches),
    );
    Ok(())
}

fn audit_row(
    t: &mut Table,
    i: usize,
    tower: &Tower,
    p: &AuditParams,
) -> Result<echlab_core::orbit::TowerAudit, RunError> {
    let a = tower_audit(tower, p).map_err(module)?;
    t.push(vec![
        i.into(),
        a.n.into(),
        a.score_sum.into(),
        a.score_expected.into(),
        a.action_sum.into(),
        a.action_expected.into(),
        a.index_sum.into(),
        a.index_deviation.into(),
        a.index_within_budget.into(),
        a.high_action_count.into(),
        a.high_action_budget.into(),
        a.negative_low_action.len().into(),
    ]);
    Ok(a)
}

const AUDIT_COLUMNS: [&str; 12] = [
    "tower",
    "n",
    "score_sum",
    "score_expected",
    "action_sum",
    "action_expected",
    "index_sum",
    "index_deviation",
    "index_within_budget",
    "high_action_count",
    "high_action_budget",
    "negative_low_action",
];

pub fn tower(a: &TowerArgs, ctx: &Ctx, out: &mut Out) -> Result<(), RunError> {
    let mut towers = Vec::new();
    let from_input = a.input.is_some();
    match &a.input {
        Some(p) => towers.push(read_doc(p)?.tower().map_err(usage)?),
        None => {
            if a.random == 0 || a.towers == 0 {
                return Err(usage("--random and --towers must be positive"));
            }
            let mut rng = gen::rng(ctx.seed);
            for _ in 0..a.towers {
                let pool = gen::tower_pool(&mut rng);
                towers.push(gen::random_tower(&mut rng, &pool, a.random).map_err(module)?);
            }
        }
    }
    if a.emit {
        if let Some(t) = towers.first() {
            out.put("tower", serde_json::to_value(Document::from_curves(t.curves())).expect("document"));
        }
    }
    audit_towers(&towers, a.index_budget, a.high_action, a.low_action, from_input, out)
}

/// Telescoping verdicts always; action budget and low-action sign verdicts only for
/// towers read from documents, since random towers carry arbitrary ends.
pub fn audit_towers(
    towers: &[Tower],
    index_budget: f64,
    high_action: f64,
    low_action: f64,
    strict: bool,
    out: &mut Out,
) -> Result<(), RunError> {
    let mut t = Table::new("tower_audit", &AUDIT_COLUMNS);
    let (mut score_ok, mut action_ok, mut high_ok, mut neg_ok) = (0, 0, 0, 0);
    for (i, tower) in towers.iter().enumerate() {
        let p = AuditParams { index_budget: index_budget * (tower.len() as f64).sqrt(), high_action, low_action };
        let a = audit_row(&mut t, i, tower, &p)?;
        score_ok += a.score_telescopes as usize;
        action_ok += a.action_telescopes as usize;
        high_ok += (a.high_action_count as f64 <= a.high_action_budget + 1e-9) as usize;
        neg_ok += a.negative_low_action.is_empty() as usize;
    }
    let n = towers.len();
    out.table(t);
    out.verdict("tower.score_telescopes", score_ok == n, None, format!("{score_ok}/{n} towers"));
    out.verdict("tower.action_telescopes", action_ok == n, None, format!("{action_ok}/{n} towers"));
    if strict {
        out.verdict("tower.high_action_budget", high_ok == n, None, format!("{high_ok}/{n} towers"));
        out.verdict("tower.no_negative_low_action", neg_ok == n, None, format!("{neg_ok}/{n} towers"));
    }
    Ok(())
}
