use std::collections::BTreeSet;

use echlab_core::orbit::{
    ech_index_from_j0, forced_topology, j0_of_curve, orbit_set_action, orbit_set_score, score_scan, total_score,
    tower_audit, AuditParams, CurveData, EndFloor, EndGroup, OrbitError, OrbitKind, OrbitSet, ScanParams, ScoreMemo,
    SimpleOrbit, Tower,
};
use echlab_core::rotation::{cz_index, partition_negative, partition_positive};
use echlab_core::Rotation;
use proptest::prelude::*;

fn orbit(id: u32, action: f64, theta: f64) -> SimpleOrbit {
    SimpleOrbit::new(id, action, Rotation::real(theta)).unwrap()
}

fn set(v: &[(&SimpleOrbit, u32)]) -> OrbitSet {
    OrbitSet::new(v.iter().map(|(o, m)| ((*o).clone(), *m)).collect()).unwrap()
}

fn j0_oracle(genus: u32, groups: &[(usize, bool)]) -> i64 {
    let mut j = -2 + 2 * genus as i64;
    for &(ends, c0) in groups {
        j += 2 * ends as i64;
        if !c0 {
            j -= 1;
        }
    }
    j
}

/// S(α) straight from the partitions, without the component helpers.
fn score_oracle(alpha: &OrbitSet) -> i64 {
    alpha
        .entries()
        .iter()
        .map(|(o, m)| {
            let pp = partition_positive(&o.theta, *m as u64).unwrap();
            let pm = partition_negative(&o.theta, *m as u64).unwrap();
            let plus = (pp.parts() == [*m]) as i64;
            let minus = (pm.parts() == [*m]) as i64;
            let special = (*m > 1 && !pp.parts().contains(&1)) as i64;
            plus + special - minus
        })
        .sum()
}

#[test]
fn orbit_kind_from_rotation() {
    assert_eq!(SimpleOrbit::new(1, 1.0, Rotation::exact(2, 1)).unwrap().kind, OrbitKind::PositiveHyperbolic);
    assert_eq!(SimpleOrbit::new(1, 1.0, Rotation::exact(3, 2)).unwrap().kind, OrbitKind::NegativeHyperbolic);
    assert_eq!(SimpleOrbit::new(1, 1.0, Rotation::exact(1, 3)).unwrap().kind, OrbitKind::Elliptic);
    assert!(SimpleOrbit::new(1, -1.0, Rotation::exact(1, 3)).is_err());
}

#[test]
fn j0_two_with_full_coverage_is_a_cylinder() {
    let a = orbit(1, 1.0, 0.3);
    let b = orbit(2, 1.0, 0.7);
    let pad = orbit(3, 1.0, 0.41);
    let mut forced = BTreeSet::new();
    for genus in 0..=3u32 {
        for pos in 1..=5usize {
            for neg in 1..=6 - pos {
                for ps in 0..=pos {
                    for ns in 0..=neg {
                        let mk = |n1: usize, n2: usize| {
                            let mut g = Vec::new();
                            if n1 > 0 {
                                g.push(EndGroup { orbit: 1, mults: vec![1; n1], c0_present: true });
                            }
                            if n2 > 0 {
                                g.push(EndGroup { orbit: 2, mults: vec![1; n2], c0_present: true });
                            }
                            g
                        };
                        let (pg, ng) = (mk(ps, pos - ps), mk(ns, neg - ns));
                        let with = |g: &[EndGroup], extra: u32| {
                            let mut v: Vec<(&SimpleOrbit, u32)> = Vec::new();
                            for x in g {
                                v.push((if x.orbit == 1 { &a } else { &b }, x.total() + 1));
                            }
                            if extra > 0 {
                                v.push((&pad, extra));
                            }
                            set(&v)
                        };
                        let c = CurveData::new(genus, pg.clone(), ng.clone(), 0, with(&pg, 10), with(&ng, 0)).unwrap();
                        let j = j0_of_curve(&c).unwrap();
                        let groups: Vec<(usize, bool)> =
                            pg.iter().chain(&ng).map(|g| (g.mults.len(), g.c0_present)).collect();
                        assert_eq!(j, j0_oracle(genus, &groups));
                        if j == 2 {
                            forced.insert((genus, pos + neg));
                        }
                    }
                }
            }
        }
    }
    assert_eq!(forced.into_iter().collect::<Vec<_>>(), vec![(0, 2)]);
    let t = forced_topology(2, true);
    assert_eq!(t.len(), 1);
    assert_eq!((t[0].genus, t[0].ends), (0, 2));
}

#[test]
fn coverage_flags_are_validated() {
    let a = orbit(1, 1.0, 0.3);
    let alpha = set(&[(&a, 2)]);
    let beta = OrbitSet::empty();
    let bad = CurveData::new(0, vec![EndGroup { orbit: 1, mults: vec![2], c0_present: true }], vec![], 0, alpha, beta);
    assert_eq!(bad.unwrap_err(), OrbitError::CoverageMismatch { id: 1 });
}

#[test]
fn index_difference_formula() {
    let a = orbit(1, 1.0, 0.3);
    let b = orbit(2, 0.5, 0.45);
    let c = CurveData::new(
        0,
        vec![EndGroup { orbit: 1, mults: vec![3], c0_present: false }],
        vec![EndGroup { orbit: 2, mults: vec![2], c0_present: false }],
        1,
        set(&[(&a, 3)]),
        set(&[(&b, 2)]),
    )
    .unwrap();
    let j = j0_of_curve(&c).unwrap();
    assert_eq!(j, 0);
    let cz = cz_index(&a.theta, 3).unwrap() - cz_index(&b.theta, 2).unwrap();
    assert_eq!(ech_index_from_j0(&c).unwrap(), j + 2 + cz);
}

fn multiplicities(n: usize) -> impl Strategy<Value = Vec<Vec<u32>>> {
    proptest::collection::vec(proptest::collection::vec(0u32..4, 3), n + 1)
}

fn pool() -> Vec<SimpleOrbit> {
    vec![
        orbit(1, 1.0, 0.3 + 2f64.sqrt() / 100.0),
        orbit(2, 1.7, 1.6 + 3f64.sqrt() / 100.0),
        orbit(3, 0.4, 0.5 + 5f64.sqrt() / 100.0),
        SimpleOrbit::new(4, 2.0, Rotation::exact(1, 1)).unwrap(),
    ]
}

fn build_tower(ms: &[Vec<u32>], genus: &[u32]) -> Tower {
    let p = pool();
    // add the previous set to keep every step action-nondecreasing
    let mut acc = vec![0u32; 4];
    let mut sets = Vec::new();
    for m in ms {
        for i in 0..3 {
            acc[i] += m[i];
        }
        acc[3] = 1;
        sets.push(acc.clone());
    }
    let to_set = |m: &[u32]| {
        OrbitSet::new(p.iter().zip(m).filter(|(_, k)| **k > 0).map(|(o, k)| (o.clone(), *k)).collect()).unwrap()
    };
    let curves = sets
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let ends = |m: &[u32], g: u32| {
                p.iter()
                    .zip(m)
                    .filter(|(_, k)| **k > 0)
                    .take(1 + (g as usize % 2))
                    .map(|(o, k)| EndGroup { orbit: o.id, mults: vec![1; *k as usize], c0_present: false })
                    .collect::<Vec<_>>()
            };
            CurveData::new(
                genus[i % genus.len()],
                ends(&w[1], genus[i % genus.len()]),
                ends(&w[0], 0),
                0,
                to_set(&w[1]),
                to_set(&w[0]),
            )
            .unwrap()
        })
        .collect();
    Tower::new(curves).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn score_matches_partition_oracle(m1 in 1u32..30, m2 in 1u32..30, m3 in 1u32..30) {
        let p = pool();
        let alpha = set(&[(&p[0], m1), (&p[1], m2), (&p[2], m3), (&p[3], 1)]);
        prop_assert_eq!(orbit_set_score(&alpha).unwrap(), score_oracle(&alpha));
    }

    #[test]
    fn towers_telescope(ms in multiplicities(40), genus in proptest::collection::vec(0u32..3, 1..5)) {
        let t = build_tower(&ms, &genus);
        let a = tower_audit(&t, &AuditParams { index_budget: 1e9, high_action: 1.0, low_action: 0.5 }).unwrap();
        prop_assert!(a.score_telescopes);
        prop_assert!(a.action_telescopes);
        let direct: i64 = t.curves().iter().map(|c| total_score(c).unwrap()).sum();
        let mut memo = ScoreMemo::new();
        let memoized: i64 = t.curves().iter().map(|c| memo.total_score(c).unwrap()).sum();
        prop_assert_eq!(direct, memoized);
        let y: i64 = t.curves().iter().map(|c| j0_of_curve(c).unwrap() - 2).sum();
        let top = t.top().unwrap();
        let bottom = t.bottom().unwrap();
        prop_assert_eq!(direct, score_oracle(top) - score_oracle(bottom) + 3 * y);
        let sum: f64 = t.curves().iter().map(|c| c.action).sum();
        prop_assert!((sum - (orbit_set_action(top) - orbit_set_action(bottom))).abs() < 1e-9 * (1.0 + sum.abs()));
    }
}

#[test]
fn tower_adjacency_is_enforced() {
    let p = pool();
    let c1 = CurveData::new(0, vec![], vec![], 0, set(&[(&p[0], 2)]), set(&[(&p[0], 1)])).unwrap();
    let c2 = CurveData::new(0, vec![], vec![], 0, set(&[(&p[1], 2)]), set(&[(&p[1], 1)])).unwrap();
    assert_eq!(Tower::new(vec![c1, c2]).unwrap_err(), OrbitError::Adjacency { index: 1 });
}

#[test]
fn score_scan_finds_no_negative_low_action_curve() {
    let orbits = vec![
        orbit(1, 1.0, 0.3 + 2f64.sqrt() / 100.0),
        orbit(2, 1.004, 0.6 + 3f64.sqrt() / 100.0),
        orbit(3, 1.007, 1.4 + 5f64.sqrt() / 100.0),
    ];
    let r = score_scan(&orbits, &ScanParams { max_mult: 9, floor: EndFloor::FewEnds(400), ..ScanParams::default() })
        .unwrap();
    assert!(r.instances > 0);
    assert_eq!(r.negative_count, 0);
    assert_eq!(r.recheck_mismatches, 0);
}
