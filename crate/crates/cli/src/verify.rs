//! The verification suite behind `bergman verify`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use bergman::berezin::{berezin_apply, c_const, kernel_mass, BerezinRule, ObservableFn};
use bergman::eigenspace::{
    apply_h_fd, apply_laplacian_fd, cs_overlap_abs2, eigenvalue, kernel_closed, normalization_factor, Eigenspace,
    FD_STEP,
};
use bergman::geometry::{mobius_involution, BallPoint};
use bergman::orthopoly::{
    chebyshev_points, linearization_coeffs, linearization_coeffs_collocation, linearization_residual, rational_nodes,
};
use bergman::spectral::{
    constant_audit, i_k_closed, i_k_quad, koornwinder_integral_quad, koornwinder_rhs, reference_refinement, rel_gap,
    spherical_function, spherical_transform_quad, symbol_peetre, symbol_wilson, ConstantMode, KoornwinderParams,
};
use bergman::sphere::{addition_kernel_check, build_harmonic_basis, harmonic_dimension, harmonic_nullspace_dim};
use bergman::{Exact, Scalar, SpaceParams};
use num_complex::Complex64;

use crate::config::RunConfig;

type Checked = Result<String, String>;

pub struct CheckLine {
    pub name: &'static str,
    pub outcome: Checked,
    pub warnings: Vec<String>,
}

pub struct Report {
    pub lines: Vec<CheckLine>,
    pub audit_text: String,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.outcome.is_ok())
    }

    pub fn render(&self, cfg: &RunConfig) -> String {
        let p = &cfg.params;
        let mut s = String::new();
        let mode = match cfg.mode {
            ConstantMode::Audited => "audited",
            ConstantMode::Literal => "literal-constants",
        };
        let _ = writeln!(s, "verify n={} nu={} m={} mode={mode} tol={:e}", p.n(), p.nu(), p.m(), cfg.tol);
        for l in &self.lines {
            match &l.outcome {
                Ok(d) => {
                    let _ = writeln!(s, "PASS {}: {d}", l.name);
                }
                Err(d) => {
                    let _ = writeln!(s, "FAIL {}: {d}", l.name);
                }
            }
            for w in &l.warnings {
                let _ = writeln!(s, "WARN {}: {w}", l.name);
            }
        }
        s.push_str(&self.audit_text);
        let ok = self.lines.iter().filter(|l| l.outcome.is_ok()).count();
        let _ = writeln!(s, "summary: {ok}/{} checks passed", self.lines.len());
        s
    }
}

fn ensure(ok: bool, detail: String) -> Checked {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

/// Deterministic interior points of radius at most `rmax`.
fn sample_point(n: usize, k: usize, rmax: f64) -> BallPoint {
    let golden = 0.618_033_988_749_895;
    let mut v: Vec<Complex64> = (0..n)
        .map(|j| {
            let a = 2.0 * PI * ((k * (2 * j + 1)) as f64 * golden).fract();
            let b = ((k + 3 * j + 1) as f64 * golden).fract() + 0.1;
            Complex64::from_polar(b, a)
        })
        .collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let r = rmax * (0.2 + 0.8 * ((k + 1) as f64 * golden * golden).fract());
    for c in &mut v {
        *c *= r / norm;
    }
    BallPoint::new(v).expect("inside the ball")
}

fn quad_symbol(p: &SpaceParams, l: f64) -> Result<f64, String> {
    let q = spherical_transform_quad(p, Complex64::new(l, 0.0), reference_refinement()).map_err(err)?;
    Ok(c_const(p) * q.value)
}

fn symbol_check(cfg: &RunConfig, warnings: &mut Vec<String>) -> Checked {
    let p = &cfg.params;
    let mut worst: f64 = 0.0;
    let mut literal_worst: f64 = 0.0;
    for &l in &cfg.grid {
        let q = quad_symbol(p, l)?;
        let lam = Complex64::new(l, 0.0);
        let w = symbol_wilson(p, lam, ConstantMode::Audited).map_err(err)?;
        worst = worst.max(rel_gap(w, q));
        if cfg.mode == ConstantMode::Literal {
            let lit = symbol_wilson(p, lam, ConstantMode::Literal).map_err(err)?;
            literal_worst = literal_worst.max(rel_gap(lit, q));
        }
    }
    if cfg.mode == ConstantMode::Literal {
        warnings.push(format!(
            "literal constants miss the quadrature by up to {literal_worst:.3e}; the audited scale is applied for the check"
        ));
    }
    ensure(worst <= cfg.tol, format!("max rel gap {worst:.2e} over {} λ", cfg.grid.len()))
}

fn reduction_check(cfg: &RunConfig) -> Checked {
    let p0 = SpaceParams::new(cfg.params.n(), *cfg.params.nu(), 0).map_err(err)?;
    let (n, nu) = (p0.n(), *p0.nu());
    let anchor = (symbol_peetre(2.0, 2, Complex64::new(0.0, 0.0)).map_err(err)? - 2.0 / 3.0).abs();
    let mut worst: f64 = 0.0;
    for &l in &cfg.grid {
        let lam = Complex64::new(l, 0.0);
        let q = quad_symbol(&p0, l)?;
        let w = symbol_wilson(&p0, lam, ConstantMode::Audited).map_err(err)?;
        let pe = symbol_peetre(nu, n, lam).map_err(err)?;
        worst = worst.max(rel_gap(w, q)).max(rel_gap(pe, q)).max(rel_gap(w, pe));
    }
    ensure(
        worst <= cfg.tol && anchor <= 1e-12,
        format!("m=0 pairwise gap {worst:.2e}; peetre(2,2,0) off 2/3 by {anchor:.1e}"),
    )
}

fn koornwinder_check(cfg: &RunConfig) -> Checked {
    let p = &cfg.params;
    let kp = KoornwinderParams::for_space(p);
    let mut worst: f64 = 0.0;
    for k in 0..=2 {
        let q = koornwinder_integral_quad(&kp, k, 1.2, reference_refinement()).map_err(err)?;
        let r = koornwinder_rhs(&kp, k, 1.2, ConstantMode::Audited).map_err(err)?;
        worst = worst.max(rel_gap(q.value, r));
    }
    let mut stepwise: f64 = 0.0;
    for k in 0..=2 * p.m() {
        let q = i_k_quad(p, k, 1.0, reference_refinement()).map_err(err)?;
        let c = i_k_closed(p, k, Complex64::new(1.0, 0.0), ConstantMode::Audited).map_err(err)?;
        stepwise = stepwise.max((q.value - c).abs() / c.abs().max(q.value.abs()).max(1e-300));
    }
    ensure(
        worst <= 1e-7 && stepwise <= 1e-7,
        format!("identity gap {worst:.2e}; I_k gap {stepwise:.2e} for k<={}", 2 * p.m()),
    )
}

fn linearization_check(cfg: &RunConfig) -> Checked {
    let p = &cfg.params;
    let residual = linearization_residual(p, &chebyshev_points(15)).map_err(err)?;
    let exact = SpaceParams::new(p.n(), Exact::from_f64(*p.nu()), p.m()).map_err(err)?;
    let closed = linearization_coeffs(&exact).map_err(err)?;
    let oracle = linearization_coeffs_collocation(&exact, &rational_nodes(2 * p.m() + 1)).map_err(err)?;
    ensure(
        residual <= 1e-10 && closed == oracle,
        format!("residual {residual:.2e}; exact coefficients {}", if closed == oracle { "match" } else { "differ" }),
    )
}

fn gram_check(space: &Eigenspace) -> Checked {
    let (_, g) = space.gram(3).map_err(err)?;
    let (mut off, mut diag): (f64, f64) = (0.0, 0.0);
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i == j {
                diag = diag.max((v - 1.0).abs());
            } else {
                off = off.max(v.abs());
            }
        }
    }
    let renormalized = space.kappa_records().iter().filter(|r| r.literal != r.used).count();
    ensure(
        off <= 1e-10 && (diag <= 1e-10 || renormalized > 0),
        format!("{}x{} Gram: off-diagonal {off:.2e}, diagonal {diag:.2e}", g.len(), g.len()),
    )
}

/// Truncation order and sampling radius that keep the basis affordable.
pub fn kernel_budget(n: usize) -> (usize, f64) {
    match n {
        2 => (40, 0.6),
        3 => (20, 0.45),
        _ => (12, 0.3),
    }
}

fn kernel_check(cfg: &RunConfig) -> Checked {
    let p = &cfg.params;
    let (p_max, radius) = kernel_budget(p.n());
    let space = Eigenspace::new(p.clone(), p_max).map_err(err)?;
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let z = sample_point(p.n(), 2 * k, radius);
        let w = sample_point(p.n(), 2 * k + 1, radius);
        let t = space.kernel_truncated(&z, &w, p_max).map_err(err)?;
        worst = worst.max((t.value - kernel_closed(p, &z, &w)).norm());
    }
    let big_n = normalization_factor(p);
    let diag = (0..20)
        .map(|k| {
            let z = sample_point(p.n(), 100 + k, 0.9);
            (kernel_closed(p, &z, &z).re - big_n).abs() / big_n
        })
        .fold(0.0, f64::max);
    ensure(
        worst <= cfg.tol && diag <= 1e-11,
        format!("truncated gap {worst:.2e} at p_max={p_max}; diagonal deviation {diag:.1e}"),
    )
}

fn normalization_check(cfg: &RunConfig) -> Checked {
    let p = &cfg.params;
    let n = p.n();
    let overlap = (0..10)
        .map(|k| {
            let z = sample_point(n, k, 0.95);
            (cs_overlap_abs2(p, &z, &z) - 1.0).abs()
        })
        .fold(0.0, f64::max);
    let rule = BerezinRule::for_dimension(n);
    let one = ObservableFn::bounded(|_| 1.0);
    let mut b1: f64 = 0.0;
    let mut mass: f64 = 0.0;
    for (k, r) in [0.0, 0.3, 0.5].into_iter().enumerate() {
        let z = BallPoint::on_axis(n, k % n, r).map_err(err)?;
        b1 = b1.max((berezin_apply(p, &one, &z, &rule).map_err(err)?.value - 1.0).abs());
        mass = mass.max((kernel_mass(p, &z, &rule).map_err(err)?.value - 1.0).abs());
    }
    ensure(
        overlap <= 1e-12 && b1 <= cfg.tol && mass <= cfg.tol,
        format!("|overlap-1| {overlap:.1e}; |B[1]-1| {b1:.1e}; |mass-1| {mass:.1e}"),
    )
}

fn eigen_check(cfg: &RunConfig, space: &Eigenspace) -> Checked {
    let p = &cfg.params;
    let eps = eigenvalue(p);
    let z = sample_point(p.n(), 7, 0.35);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for idx in space.indices(2).map_err(err)? {
        let f = |x: &BallPoint| space.phi(idx, x).unwrap_or_default();
        let v = f(&z);
        if v.norm() < 1e-3 {
            continue;
        }
        let hv = apply_h_fd(*p.nu(), &f, &z, FD_STEP).map_err(err)?;
        worst = worst.max((hv - v * eps).norm() / (v * eps).norm());
        count += 1;
    }
    let lam = Complex64::new(0.7, 0.0);
    let n = p.n();
    let f = |x: &BallPoint| spherical_function(n, lam, x).unwrap_or_default();
    let v = f(&z);
    let lv = apply_laplacian_fd(&f, &z, FD_STEP).map_err(err)?;
    let expect = -v * (0.49 + (n * n) as f64);
    let sph = (lv - expect).norm() / expect.norm();
    ensure(
        worst <= 1e-5 && sph <= 1e-5,
        format!("H_nu = {eps} on {count} basis elements {worst:.1e}; spherical function {sph:.1e}"),
    )
}

fn invariance_check(cfg: &RunConfig) -> Checked {
    let p = &cfg.params;
    let n = p.n();
    let center: Vec<Complex64> = (0..n).map(|j| Complex64::new(0.3 - 0.2 * j as f64, 0.1 * j as f64)).collect();
    let phi_fn = move |w: &BallPoint| {
        let d: f64 = w.coords().iter().zip(&center).map(|(a, b)| (a - b).norm_sqr()).sum();
        (-d).exp() * (1.0 + 0.5 * (w.coords()[0] * w.coords()[1].conj()).re)
    };
    let phi = ObservableFn::bounded(phi_fn.clone());
    let rule = BerezinRule::for_dimension(n);
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        let a = sample_point(n, 40 + k, 0.5);
        let z = sample_point(n, 50 + k, 0.4);
        let a2 = a.clone();
        let f = phi_fn.clone();
        let moved = ObservableFn::bounded(move |w: &BallPoint| f(&mobius_involution(&a2, w)));
        let lhs = berezin_apply(p, &moved, &z, &rule).map_err(err)?;
        let rhs = berezin_apply(p, &phi, &mobius_involution(&a, &z), &rule).map_err(err)?;
        worst = worst.max((lhs.value - rhs.value).abs());
    }
    ensure(worst <= 1e-6, format!("max gap {worst:.1e} over 3 automorphisms"))
}

fn harmonic_check(cfg: &RunConfig) -> Checked {
    let n = cfg.params.n();
    let mut cases = 0;
    for deg in 0..=6 {
        for pp in 0..=deg {
            let q = deg - pp;
            let got = harmonic_nullspace_dim(n, pp, q).map_err(err)? as u64;
            let want = harmonic_dimension(n, pp, q).map_err(err)?;
            if got != want {
                return Err(format!("dim H({pp},{q}) = {got}, expected {want}"));
            }
            cases += 1;
        }
    }
    let mut worst: f64 = 0.0;
    for (pp, q) in [(1, 1), (2, 1), (2, 2)] {
        let basis = build_harmonic_basis(n, pp, q).map_err(err)?;
        for k in 0..4 {
            let z = sample_point(n, 60 + k, 0.5);
            let r = z.norm_sq().sqrt();
            let theta: Vec<Complex64> = z.coords().iter().map(|c| c / r).collect();
            let s = addition_kernel_check(&basis, &theta).map_err(err)?;
            worst = worst.max((s - basis.dim() as f64).abs() / basis.dim() as f64);
        }
    }
    ensure(worst <= 1e-12, format!("{cases} dimensions exact; addition kernel spread {worst:.1e}"))
}

fn audit_check(cfg: &RunConfig, text: &mut String, warnings: &mut Vec<String>) -> Checked {
    let p = &cfg.params;
    let grid = [0.5, 1.0, 2.0, 5.0];
    let mut targets = vec![SpaceParams::new(p.n(), *p.nu(), 0).map_err(err)?];
    if p.m() > 0 {
        targets.push(p.clone());
    }
    let mut worst: f64 = 0.0;
    let mut scales = Vec::new();
    for t in &targets {
        let report = constant_audit(t, &grid).map_err(err)?;
        let _ = writeln!(text, "{report}");
        worst = worst.max(report.audited_residual);
        scales.push(format!("m={} scale {:.12}", t.m(), report.fitted_scale));
        if cfg.mode == ConstantMode::Literal {
            warnings.push(format!(
                "literal constants at m={} need scale {:.12} (literal residual {:.3e})",
                t.m(),
                report.fitted_scale,
                report.literal_residual
            ));
        }
    }
    ensure(worst <= 1e-8, format!("{}; audited residual {worst:.1e}", scales.join(", ")))
}

pub fn run(cfg: &RunConfig) -> Report {
    let mut lines = Vec::new();
    let mut push = |name: &'static str, outcome: Checked, warnings: Vec<String>| {
        lines.push(CheckLine { name, outcome, warnings });
    };
    let mut w = Vec::new();
    push("symbol", symbol_check(cfg, &mut w), std::mem::take(&mut w));
    push("m0-reduction", reduction_check(cfg), vec![]);
    push("koornwinder", koornwinder_check(cfg), vec![]);
    push("linearization", linearization_check(cfg), vec![]);
    match Eigenspace::new(cfg.params.clone(), 3) {
        Ok(space) => {
            push("orthonormality", gram_check(&space), vec![]);
            push("eigenchecks", eigen_check(cfg, &space), vec![]);
        }
        Err(e) => {
            push("orthonormality", Err(e.to_string()), vec![]);
            push("eigenchecks", Err(e.to_string()), vec![]);
        }
    }
    push("kernel", kernel_check(cfg), vec![]);
    push("normalization", normalization_check(cfg), vec![]);
    push("invariance", invariance_check(cfg), vec![]);
    push("harmonic", harmonic_check(cfg), vec![]);
    let mut audit_text = String::new();
    push("audit", audit_check(cfg, &mut audit_text, &mut w), std::mem::take(&mut w));
    Report { lines, audit_text }
}
