use bergman::eigenspace::{
    apply_h_fd, cs_overlap_abs2, eigenvalue, kernel_closed, normalization_factor, poisson_kernel, BasisIndex,
    BasisSet, Eigenspace, FD_STEP,
};
use bergman::geometry::BallPoint;
use bergman::SpaceParams;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_point(rng: &mut ChaCha8Rng, n: usize, rmax: f64) -> BallPoint {
    let v: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let r = rmax * rng.gen_range(0.05f64..1.0).sqrt();
    BallPoint::new(v.iter().map(|c| c * (r / norm)).collect()).unwrap()
}

#[test]
fn gram_identity_on_grid() {
    for n in [2usize, 3] {
        for nu in [3.5, 4.25] {
            for m in 0..=2 {
                let Ok(params) = SpaceParams::new(n, nu, m) else { continue };
                let space = Eigenspace::new(params, 3).unwrap();
                let (_, g) = space.gram(3).unwrap();
                for (i, row) in g.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        let target = if i == j { 1.0 } else { 0.0 };
                        assert!((v - target).abs() < 1e-10, "n={n} nu={nu} m={m} ({i},{j}) = {v}");
                    }
                }
                assert!(space.kappa_records().iter().all(|r| r.norm_deviation.abs() < 1e-10));
            }
        }
    }
}

#[test]
fn truncated_kernel_converges_to_closed_form() {
    let params = SpaceParams::new(2, 3.5, 1).unwrap();
    let space = Eigenspace::new(params.clone(), 40).unwrap();
    let z = BallPoint::on_axis(2, 0, 0.3).unwrap();
    let w = BallPoint::on_axis(2, 1, 0.2).unwrap();
    let t = space.kernel_truncated(&z, &w, 40).unwrap();
    let k = kernel_closed(&params, &z, &w);
    assert!((t.value - k).norm() < 1e-8, "{} vs {}", t.value, k);

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..4 {
        let z = random_point(&mut rng, 2, 0.6);
        let w = random_point(&mut rng, 2, 0.6);
        let k = kernel_closed(&params, &z, &w);
        let mut prev = f64::INFINITY;
        for pm in [10, 20, 30, 40] {
            let err = (space.kernel_truncated(&z, &w, pm).unwrap().value - k).norm();
            assert!(err <= prev + 1e-14);
            prev = err;
        }
        assert!(prev < 1e-8);
    }
}

#[test]
fn origin_partial_sum() {
    let params = SpaceParams::new(2, 3.5, 1).unwrap();
    let space = Eigenspace::new(params.clone(), 3).unwrap();
    let o = BallPoint::origin(2);
    let t = space.kernel_truncated(&o, &o, 3).unwrap();
    let phi = space.phi(BasisIndex { p: 0, q: 0, j: 1 }, &o).unwrap();
    assert!((t.value - phi.norm_sqr()).norm() < 1e-12);
    assert!((t.value.re - normalization_factor(&params)).abs() < 1e-10 * t.value.re);
}

#[test]
fn basis_independence() {
    let params = SpaceParams::new(2, 3.5, 1).unwrap();
    let space = Eigenspace::new(params.clone(), 8).unwrap();
    let mut bases = BasisSet::build(2, 8, 1).unwrap();
    for (p, q) in [(2, 1), (3, 0), (3, 1), (5, 1)] {
        let other = bases.get(p, q).unwrap().reorthogonalized(7 + p as u64);
        bases.replace(other).unwrap();
    }
    let alt = Eigenspace::with_bases(params, bases).unwrap();
    let z = BallPoint::from_reals(&[(0.2, 0.1), (-0.3, 0.15)]).unwrap();
    let w = BallPoint::from_reals(&[(-0.1, 0.25), (0.05, -0.2)]).unwrap();
    let a = space.kernel_truncated(&z, &w, 8).unwrap().value;
    let b = alt.kernel_truncated(&z, &w, 8).unwrap().value;
    assert!((a - b).norm() < 1e-12);
}

#[test]
fn closed_kernel_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, nu, m) in [(2, 2.0, 0), (2, 3.5, 1), (3, 4.25, 1)] {
        let params = SpaceParams::new(n, nu, m).unwrap();
        let big_n = normalization_factor(&params);
        for _ in 0..10 {
            let z = random_point(&mut rng, n, 0.9);
            let w = random_point(&mut rng, n, 0.9);
            let kzz = kernel_closed(&params, &z, &z);
            assert!((kzz.re - big_n).abs() < 1e-11 * big_n && kzz.im.abs() < 1e-10);
            let kzw = kernel_closed(&params, &z, &w);
            let kwz = kernel_closed(&params, &w, &z);
            assert!((kzw - kwz.conj()).norm() < 1e-12 * big_n);
            let ov = cs_overlap_abs2(&params, &z, &w);
            assert!((0.0..=1.0).contains(&ov));
            assert!((ov - kzw.norm_sqr() / (big_n * big_n)).abs() < 1e-12);
        }
    }
}

#[test]
fn fd_eigencheck_on_basis() {
    for (n, nu, m) in [(2, 3.5, 1), (2, 3.5, 0), (3, 4.25, 1)] {
        let params = SpaceParams::new(n, nu, m).unwrap();
        let eps = eigenvalue(&params);
        let space = Eigenspace::new(params.clone(), 2).unwrap();
        let z = if n == 2 {
            BallPoint::from_reals(&[(0.2, 0.0), (0.1, 0.05)]).unwrap()
        } else {
            BallPoint::from_reals(&[(0.2, 0.0), (0.1, 0.05), (-0.1, 0.15)]).unwrap()
        };
        for idx in space.indices(2).unwrap() {
            let f = |p: &BallPoint| space.phi(idx, p).unwrap();
            let v = f(&z);
            if v.norm() < 1e-3 {
                continue;
            }
            let hv = apply_h_fd(nu, &f, &z, FD_STEP).unwrap();
            assert!((hv - v * eps).norm() <= 1e-5 * (v * eps).norm(), "{idx:?}: {hv} vs {}", v * eps);
        }
    }
}

#[test]
fn fd_eigencheck_on_poisson_kernel() {
    let (nu, lambda) = (1.0, 1.3);
    let theta = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
    let z = BallPoint::from_reals(&[(0.2, 0.1), (-0.1, 0.05)]).unwrap();
    let f = |p: &BallPoint| poisson_kernel(nu, Complex64::new(lambda, 0.0), p, &theta).unwrap();
    let v = f(&z);
    let hv = apply_h_fd(nu, &f, &z, FD_STEP).unwrap();
    let expect = v * (lambda * lambda + 4.0 * nu * nu + 4.0);
    assert!((hv - expect).norm() <= 1e-5 * expect.norm());
}
