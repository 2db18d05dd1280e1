use std::f64::consts::TAU;

use echlab_core::twist::complex::{build_complex, ComplexOptions};
use echlab_core::twist::experiments::axioms_report;
use echlab_core::twist::profile::{energy, hamiltonian_oscillation};
use echlab_core::twist::spectral::{spectral_dp, spectral_from_complex};
use echlab_core::twist::{calabi, hofer_norm_bound, periodic_census, spectral_invariant_cd, TwistProfile};
use proptest::prelude::*;

fn close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * y.abs().max(1.0)
}

fn profiles() -> Vec<(&'static str, TwistProfile)> {
    vec![
        ("constant", TwistProfile::constant(4.0).unwrap()),
        ("ramp", TwistProfile::ramp(9.0, 0.8, 1).unwrap()),
        ("quadratic", TwistProfile::ramp(12.0, 1.0, 2).unwrap()),
        ("steep", TwistProfile::ramp(20.0, 0.5, 1).unwrap()),
        ("samples", TwistProfile::from_samples(&[0.0, 0.3, 0.6, 1.0], &[14.0, 10.0, 3.0, 0.5]).unwrap()),
    ]
}

proptest! {
    #[test]
    fn power_moments_in_closed_form(c in 0.1f64..20.0, e in -2i32..=0) {
        // f = c·s^e: ∫s²f = c/(e+3), ∫s³f = c/(e+4), H(0) = ∫s f = c/(e+2).
        let f = if e == 0 { TwistProfile::constant(c) } else { TwistProfile::power(c, e) };
        let f = f.unwrap();
        let e = e as f64;
        let cal = calabi(&f);
        prop_assert!(close(cal.value, c / (e + 3.0), 1e-12));
        prop_assert!(close(cal.area, c / (e + 4.0), 1e-12));
        if e > -2.0 {
            prop_assert!(close(hofer_norm_bound(&f), c / (e + 2.0), 1e-12));
            prop_assert!(cal.self_check(1e-8));
        } else {
            prop_assert!(hofer_norm_bound(&f).is_infinite());
        }
    }

    #[test]
    fn calabi_is_additive(a in 0.0f64..10.0, r0 in 0.1f64..1.0, b in 0.0f64..10.0, r1 in 0.1f64..1.0) {
        let f = TwistProfile::ramp(a, r0, 1).unwrap();
        let g = TwistProfile::ramp(b, r1, 2).unwrap();
        let h = f.add(&g).unwrap();
        prop_assert!(close(calabi(&h).value, calabi(&f).value + calabi(&g).value, 1e-12));
        prop_assert!(close(hofer_norm_bound(&h), hofer_norm_bound(&f) + hofer_norm_bound(&g), 1e-12));
    }

    #[test]
    fn level_radius_inverts_power(c in 0.5f64..5.0, sigma in 1.0f64..10.0) {
        // f = c/s, so f(r) = 2πσ at r = c/(2πσ).
        let f = TwistProfile::power(c, -1).unwrap();
        let r = c / (TAU * sigma);
        prop_assume!(r < 1.0);
        prop_assert!((f.level_radius(sigma) - r).abs() < 1e-12);
    }

    #[test]
    fn action_density_is_a_minimum(a in 1.0f64..30.0, r0 in 0.2f64..1.0, sigma in 0.01f64..5.0) {
        let f = TwistProfile::ramp(a, r0, 1).unwrap();
        let grid = (0..=4000)
            .map(|i| i as f64 / 4000.0)
            .map(|r| f.hamiltonian(r) - TAU * sigma * energy(r))
            .fold(f64::INFINITY, f64::min);
        let v = f.action_density(sigma);
        prop_assert!(v <= grid + 1e-12);
        prop_assert!(v >= grid - 1e-3 * (1.0 + a));
    }
}

#[test]
fn census_circles_sit_on_their_level() {
    for (name, f) in profiles() {
        for c in periodic_census(&f, 6).unwrap() {
            if c.at_center {
                continue;
            }
            let level = TAU * c.p as f64 / c.q as f64;
            assert!((f.eval(c.r) - level).abs() < 1e-9 * (1.0 + level), "{name}: {c:?}");
        }
    }
}

#[test]
fn complexes_are_chain_complexes() {
    for (name, f) in profiles() {
        for d in 1..=5 {
            let c = build_complex(&f, d, &ComplexOptions::default()).unwrap();
            let k = c.checks();
            assert!(k.d_squared_zero, "{name} d = {d}");
            assert!(k.grading_drop_one, "{name} d = {d}");
            assert!(k.filtration_floor > 0.0, "{name} d = {d}: {}", k.filtration_floor);
            assert!(c.rank_pattern_holds(), "{name} d = {d}: {:?}", c.homology_ranks());
        }
    }
}

#[test]
fn wider_window_keeps_rank_pattern() {
    let f = TwistProfile::ramp(9.0, 0.8, 1).unwrap();
    let opts = ComplexOptions { window: Some((0, 8)), ..ComplexOptions::default() };
    let c = build_complex(&f, 4, &opts).unwrap();
    assert!(c.checks().d_squared_zero);
    assert!(c.rank_pattern_holds(), "{:?}", c.homology_ranks());
}

#[test]
fn dp_agrees_with_complex() {
    for (name, f) in profiles() {
        for d in 1..=6 {
            let c = build_complex(&f, d, &ComplexOptions::default()).unwrap();
            let x = spectral_from_complex(&c).unwrap();
            let y = spectral_dp(&f, d).unwrap();
            assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()), "{name} d = {d}: {x} vs {y}");
        }
    }
}

#[test]
fn zero_profile_has_zero_invariants() {
    let z = TwistProfile::zero();
    for d in 1..=12 {
        assert_eq!(spectral_invariant_cd(&z, d).unwrap(), 0.0);
    }
}

#[test]
fn monotone_and_hofer_lipschitz() {
    let pairs = [
        (TwistProfile::ramp(5.0, 0.8, 1).unwrap(), TwistProfile::ramp(9.0, 0.8, 1).unwrap()),
        (TwistProfile::constant(2.0).unwrap(), TwistProfile::constant(7.0).unwrap()),
        (TwistProfile::ramp(8.0, 0.5, 2).unwrap(), TwistProfile::ramp(8.0, 0.9, 2).unwrap()),
    ];
    for (f, g) in &pairs {
        let r = axioms_report(f, g, 5).unwrap();
        assert!(r.identity.holds);
        assert!(r.monotonicity.unwrap().holds, "{:?}", r.values);
        assert!(r.hofer_lipschitz.holds, "{:?}", r.values);
        for &(_, cf, cg) in &r.values {
            assert!(cf <= cg + 1e-12);
        }
    }
}

#[test]
fn oscillation_of_constants() {
    // H_c(r) = c(1 − r²)/2.
    let f = TwistProfile::constant(3.0).unwrap();
    let g = TwistProfile::constant(1.0).unwrap();
    assert!((hamiltonian_oscillation(&f, &g) - 1.0).abs() < 1e-12);
}

#[test]
fn truncations_increase_calabi() {
    let f = TwistProfile::power(1.0, -3).unwrap();
    let cals: Vec<f64> = (1..=20).map(|i| calabi(&f.truncate(i).unwrap()).value).collect();
    assert!(cals.windows(2).all(|w| w[0] < w[1]));
    // ∫₀^{1/i} s² i³ ds + ∫_{1/i}^1 s⁻¹ ds = 1/3 + ln i.
    assert!((cals[19] - (20f64.ln() + 1.0 / 3.0)).abs() < 1e-12);
}
