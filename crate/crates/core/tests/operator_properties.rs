//! Property tests for the eigenspace, the Berezin transform and the symbol.

use bergman::berezin::{berezin_apply, berezin_apply_m0, berezin_radial_at_origin, BerezinRule, ObservableFn};
use bergman::eigenspace::{cs_overlap_abs2, kernel_closed, normalization_factor, BasisIndex, Eigenspace};
use bergman::geometry::{weighted_rule, BallPoint, SphereRule};
use bergman::spectral::{
    constant_audit, reference_refinement, spherical_function, spherical_transform_quad, symbol_wilson, ConstantMode,
};
use bergman::SpaceParams;
use num_complex::Complex64;
use proptest::prelude::*;

const SETS: [(usize, f64, usize); 5] = [(2, 2.0, 0), (2, 3.5, 1), (2, 3.5, 2), (3, 4.25, 1), (4, 4.5, 1)];

fn point(parts: &[(f64, f64)], radius: f64) -> BallPoint {
    let norm = parts.iter().map(|(x, y)| x * x + y * y).sum::<f64>().sqrt().max(1e-3);
    BallPoint::new(parts.iter().map(|(x, y)| Complex64::new(*x, *y) * (radius / norm)).collect()).unwrap()
}

fn coords(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn admissibility_gate(n in 0usize..6, twice_nu in 0u32..20, m in 0usize..5) {
        let nu = twice_nu as f64 / 2.0 + 0.25 * (m % 2) as f64;
        let expect = n >= 2 && 2.0 * nu > n as f64 && 2.0 * (nu - m as f64) - n as f64 > 0.0;
        prop_assert_eq!(SpaceParams::new(n, nu, m).is_ok(), expect);
    }

    #[test]
    fn overlap_is_a_probability(idx in 0usize..5, z in coords(4), w in coords(4), rz in 0.0f64..0.97, rw in 0.0f64..0.97) {
        let (n, nu, m) = SETS[idx];
        let p = SpaceParams::new(n, nu, m).unwrap();
        let z = point(&z[..n], rz);
        let w = point(&w[..n], rw);
        let o = cs_overlap_abs2(&p, &z, &w);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&o));
        prop_assert!((o - cs_overlap_abs2(&p, &w, &z)).abs() < 1e-14);
        prop_assert!((cs_overlap_abs2(&p, &z, &z) - 1.0).abs() < 1e-12);
        let k = kernel_closed(&p, &z, &w);
        prop_assert!((k - kernel_closed(&p, &w, &z).conj()).norm() <= 1e-12 * normalization_factor(&p));
    }

    #[test]
    fn spherical_function_is_even(n in 2usize..=4, lambda in 0.0f64..6.0, z in coords(4), r in 0.0f64..0.9) {
        let z = point(&z[..n], r);
        let a = spherical_function(n, Complex64::new(lambda, 0.0), &z).unwrap();
        let b = spherical_function(n, Complex64::new(-lambda, 0.0), &z).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-3));
    }

    #[test]
    fn bottom_of_spectrum_is_fixed(n in 2usize..=4, quarter in 5u32..=24, m in 0usize..=2) {
        let Ok(p) = SpaceParams::new(n, quarter as f64 / 4.0, m) else { return Ok(()) };
        let v = symbol_wilson(&p, Complex64::new(0.0, -(n as f64)), ConstantMode::Audited).unwrap();
        prop_assert!((v - 1.0).abs() <= 1e-8, "{}", v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn symbol_even_and_positive(idx in 1usize..5, lambda in 0.1f64..8.0) {
        let (n, nu, m) = SETS[idx];
        let p = SpaceParams::new(n, nu, m).unwrap();
        let plus = spherical_transform_quad(&p, Complex64::new(lambda, 0.0), reference_refinement()).unwrap();
        let minus = spherical_transform_quad(&p, Complex64::new(-lambda, 0.0), reference_refinement()).unwrap();
        prop_assert!(plus.value > 0.0);
        prop_assert!((plus.value - minus.value).abs() <= 1e-11 * plus.value);
        let w1 = symbol_wilson(&p, Complex64::new(lambda, 0.0), ConstantMode::Audited).unwrap();
        let w2 = symbol_wilson(&p, Complex64::new(-lambda, 0.0), ConstantMode::Audited).unwrap();
        prop_assert!(w1 > 0.0);
        prop_assert!((w1 - w2).abs() <= 1e-13 * w1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn berezin_contracts(k in -4.0f64..4.0, l in -4.0f64..4.0, z in coords(2), r in 0.0f64..0.8) {
        let p = SpaceParams::new(2, 3.5, 1).unwrap();
        let phi = ObservableFn::bounded(move |w: &BallPoint| (k * w.coords()[0].re + l * w.coords()[1].im).cos());
        let v = berezin_apply(&p, &phi, &point(&z, r), &BerezinRule::for_dimension(2)).unwrap();
        prop_assert!(v.value.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn radial_reduction_at_origin(s in 0.1f64..5.0, idx in 1usize..4) {
        let (n, nu, m) = SETS[idx];
        let p = SpaceParams::new(n, nu, m).unwrap();
        let phi = ObservableFn::bounded(move |w: &BallPoint| (-s * w.norm_sq()).exp());
        let full = berezin_apply(&p, &phi, &BallPoint::origin(n), &BerezinRule::for_dimension(n)).unwrap();
        let reduced = berezin_radial_at_origin(&p, |t| (-s * t).exp(), 48).unwrap();
        prop_assert!((full.value - reduced).abs() <= 1e-10, "{} vs {}", full.value, reduced);
    }

    #[test]
    fn m0_forms_agree(nu in 1.5f64..5.0, z in coords(2), r in 0.0f64..0.7, k in -3.0f64..3.0) {
        let p = SpaceParams::new(2, nu, 0).unwrap();
        let phi = ObservableFn::bounded(move |w: &BallPoint| 1.0 / (1.0 + (k * w.coords()[0].re + w.coords()[1].im).powi(2)));
        let z = point(&z, r);
        let rule = BerezinRule::for_dimension(2);
        let a = berezin_apply(&p, &phi, &z, &rule).unwrap();
        let b = berezin_apply_m0(nu, 2, &phi, &z, &rule).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-9, "{} vs {}", a.value, b.value);
    }
}

#[test]
fn audit_is_idempotent() {
    for (n, nu, m) in [(2, 2.0, 0), (2, 3.5, 1), (3, 4.25, 1)] {
        let report = constant_audit(&SpaceParams::new(n, nu, m).unwrap(), &[0.5, 1.0, 2.0, 5.0]).unwrap();
        assert!((report.refit_scale - 1.0).abs() <= 1e-10, "{}", report.refit_scale);
        assert!(report.passed());
    }
}

/// ∫ K(z, w) f(w) dμ_n(w) = f(z) for basis elements f.
#[test]
fn kernel_reproduces_basis_elements() {
    let params = SpaceParams::new(2, 3.5, 1).unwrap();
    let n = params.n();
    let beta = params.beta();
    let space = Eigenspace::new(params.clone(), 2).unwrap();
    let radial = weighted_rule(n as f64 - 1.0, beta - 1.0, 40, None).unwrap();
    let sphere = SphereRule::new(n, 16, 24).unwrap();
    let z = BallPoint::from_reals(&[(0.2, -0.1), (0.1, 0.15)]).unwrap();
    for idx in [BasisIndex { p: 0, q: 0, j: 1 }, BasisIndex { p: 1, q: 1, j: 2 }, BasisIndex { p: 2, q: 0, j: 3 }] {
        let integral: Complex64 = radial.integrate(|t| {
            let r = t.sqrt();
            let ang: Complex64 = sphere.integrate(|theta: &[Complex64]| {
                let w = BallPoint::new(theta.iter().map(|c| c * r).collect()).unwrap();
                kernel_closed(&params, &z, &w) * space.phi(idx, &w).unwrap()
            });
            // dμ_n = (1 − t)^{−n−1} n t^{n−1} dt dσ, with the rule's weight divided out
            ang * (n as f64 * (1.0 - t).powf(-(n as f64) - beta))
        });
        let want = space.phi(idx, &z).unwrap();
        assert!((integral - want).norm() <= 1e-8 * want.norm().max(1e-3), "{idx:?}: {integral} vs {want}");
    }
}
