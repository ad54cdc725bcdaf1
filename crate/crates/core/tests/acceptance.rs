//! End-to-end acceptance checks, one test per criterion. Every test prints a
//! single machine-greppable pass/fail line; tolerances are pinned here.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Instant;
use workbench_core::frac1d;
use workbench_core::grid::{GridFn, IntervalGrid};
use workbench_core::kipriyanov;
use workbench_core::linalg::{expm_mat, CMat, CVec, OpMatrix, Provenance};
use workbench_core::mesh::{RayFn, RayMesh, Shape};
use workbench_core::opcalc;
use workbench_core::scalar::{cnorm, gamma};
use workbench_core::spectral;

type C64 = Complex<f64>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn fmt_seq(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(",")
}

fn verdict(id: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {id:2} {name}: {} ({detail})",
        if pass { "pass" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn random_hpd(n: usize, rng: &mut ChaCha8Rng) -> OpMatrix<f64> {
    let b = CMat::<f64>::from_fn(n, n, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let mat = &b * b.adjoint() + CMat::<f64>::identity(n, n) * c(0.5, 0.0);
    OpMatrix::new(mat, vec![1.0; n], Provenance::General).unwrap()
}

fn fit_order(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let xs: Vec<f64> = h.iter().map(|v| v.max(1e-300).ln()).collect();
    let ys: Vec<f64> = e.iter().map(|v| v.max(1e-300).ln()).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    sxy / sxx
}

#[test]
fn criterion_01_kernel_normalization() {
    let start = Instant::now();
    let tol = 1e-8;
    let mut worst: f64 = 0.0;
    for alpha in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let r = kipriyanov::kernel_normalization_residual(alpha);
        worst = worst.max(r);
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        1,
        "kernel-normalization",
        worst < tol && elapsed < 1.0,
        &format!("worst residual {worst:.3e}, tol {tol:.0e}, {elapsed:.2}s"),
    );
}

#[test]
fn criterion_02_integral_norm_bound() {
    // ‖E^α u‖_p ≤ (d^α/Γ(α+1))‖u‖_p + δ(h): the discrete excess over the
    // sharp constant must vanish at least first order under refinement.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let ms = [32usize, 64, 128, 256];
    let mut pass = true;
    let mut detail = String::new();
    for alpha in [0.25, 0.5, 0.75] {
        let bound = 1.0f64.powf(alpha) / gamma(1.0 + alpha);
        let mut hs = Vec::new();
        let mut deltas = Vec::new();
        for &m in &ms {
            let mesh = RayMesh::<f64>::build(Shape::Interval { length: 1.0 }, 1, m).unwrap();
            let mut delta: f64 = 0.0;
            for _ in 0..200 {
                let u = RayFn::from_point_fn(&mesh, |_| {
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                });
                let out = kipriyanov::dir_integral_left(&u, alpha).unwrap();
                for p in [1.0, 2.0] {
                    let excess = out.lp_norm(p) - bound * u.lp_norm(p);
                    delta = delta.max(excess);
                }
            }
            hs.push(1.0 / m as f64);
            deltas.push(delta);
        }
        let final_delta = *deltas.last().unwrap();
        // either the sharp bound already holds, or the excess decays ≥ O(h)
        let ok = if deltas.iter().all(|&d| d <= 0.0) {
            true
        } else {
            let order = fit_order(&hs, &deltas.iter().map(|d| d.max(1e-300)).collect::<Vec<_>>());
            order >= 1.0 && final_delta <= deltas[0]
        };
        detail.push_str(&format!("alpha={alpha}: delta(h)=[{}]; ", fmt_seq(&deltas)));
        pass &= ok;
    }
    verdict(2, "integral-norm-bound", pass, &detail);
}

#[test]
fn criterion_03_constant_derivative_formula() {
    // 𝔇^α(1) = ((n-1)!/Γ(n-α)) r^{-α} exactly (the difference-quotient
    // integral vanishes for constants).
    let alpha = 0.5;
    let tol = 1e-10;
    let mut worst: f64 = 0.0;
    for n in [1usize, 2, 3] {
        let shape = match n {
            1 => Shape::Interval { length: 1.0 },
            2 => Shape::Ball2 { radius: 0.5 },
            _ => Shape::Ball3 { radius: 0.5 },
        };
        let mesh = RayMesh::<f64>::build(shape, if n == 1 { 1 } else { 6 }, 48).unwrap();
        let f = RayFn::constant(&mesh, c(1.0, 0.0));
        let deriv = kipriyanov::kipriyanov_apply(&f, alpha, 1e-10).unwrap();
        let coeff = kipriyanov::c_n_alpha(alpha, n);
        for (k, ray) in mesh.rays.iter().enumerate() {
            for (i, &r) in ray.nodes.iter().enumerate() {
                if r <= 0.0 {
                    continue;
                }
                let expect = coeff * r.powf(-alpha);
                let rel = cnorm(deriv.fun.values[k][i] - c(expect, 0.0)) / expect;
                worst = worst.max(rel);
            }
        }
    }
    verdict(
        3,
        "constant-derivative-formula",
        worst < tol,
        &format!("worst rel err {worst:.3e}, tol {tol:.0e}"),
    );
}

#[test]
fn criterion_04_representation_convergence() {
    let alpha = 0.5;
    let mesh = RayMesh::<f64>::build(Shape::Interval { length: 1.0 }, 1, 512).unwrap();
    let g = RayFn::from_radial_fn(&mesh, |r| c((r * (1.0 - r)).powi(2), 0.0));
    let f = kipriyanov::dir_integral_left(&g, alpha).unwrap();
    let mut errors = Vec::new();
    for k in 3..=8u32 {
        let eps = 2f64.powi(-(k as i32));
        let params = frac1d::FracParams::new(alpha, eps, 2.0).unwrap();
        let split = kipriyanov::representation_split(&f, &params).unwrap();
        errors.push(split.total_norm(2.0));
    }
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    verdict(
        4,
        "representation-convergence",
        decreasing,
        &format!("errors [{}]", fmt_seq(&errors)),
    );
}

#[test]
fn criterion_05_accretivity_lower_bound() {
    let alpha = 0.5;
    let slack = 0.05;
    let mut pass = true;
    let mut detail = String::new();
    for n in [1usize, 2] {
        let (shape, dirs) = match n {
            1 => (Shape::Interval { length: 1.0 }, 1),
            _ => (Shape::Ball2 { radius: 0.5 }, 8),
        };
        let mesh = RayMesh::<f64>::build(shape, dirs, 48).unwrap();
        let suite: Vec<RayFn<f64>> = (1..=20)
            .map(|j| {
                let vals = mesh
                    .rays
                    .iter()
                    .map(|ray| {
                        ray.nodes
                            .iter()
                            .map(|&r| {
                                let s = r / ray.length;
                                c((j as f64 * std::f64::consts::PI * s).sin(), 0.0)
                            })
                            .collect()
                    })
                    .collect();
                RayFn::new(mesh.clone(), vals).unwrap()
            })
            .collect();
        let rho = kipriyanov::DirWeight::constant(&mesh, 1.0).unwrap();
        let rep = kipriyanov::accretivity_check(&suite, alpha, &rho, 1e-3, slack).unwrap();
        detail.push_str(&format!(
            "n={n}: min ratio {:.4} vs constant {:.4}; ",
            rep.min_ratio, rep.constant
        ));
        pass &= rep.pass;
    }
    verdict(5, "accretivity-lower-bound", pass, &detail);
}

#[test]
fn criterion_06_balakrishnan_powers() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    // square of the half power, and the eigendecomposition oracle
    let mut worst_sq: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    for _ in 0..50 {
        let a = random_hpd(8, &mut rng);
        let alpha = rng.gen_range(0.15..0.85);
        let half = opcalc::balakrishnan_power(&a, 0.5, opcalc::PowerSign::Positive).unwrap();
        let sq = &half.op.mat * &half.op.mat;
        let rel = (sq - &a.mat).norm() / a.mat.norm();
        worst_sq = worst_sq.max(rel);

        let powered = opcalc::balakrishnan_power(&a, alpha, opcalc::PowerSign::Positive).unwrap();
        let eig = a.mat.clone().symmetric_eigen();
        let lam_pow = DVector::from_iterator(
            8,
            eig.eigenvalues.iter().map(|&l| c(l.powf(alpha), 0.0)),
        );
        let oracle =
            &eig.eigenvectors * DMatrix::from_diagonal(&lam_pow) * eig.eigenvectors.adjoint();
        let rel = (powered.op.mat - oracle).norm() / a.mat.norm();
        worst_eig = worst_eig.max(rel);
    }
    // negative-power norm bound on accretive matrices: zero violations
    let mut violations = 0usize;
    for _ in 0..100 {
        let h = random_hpd(6, &mut rng);
        let s = CMat::<f64>::from_fn(6, 6, |_, _| {
            c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3))
        });
        let skew = (&s - s.adjoint()) * c(0.5, 0.0);
        let j = OpMatrix::new(h.mat + skew, vec![1.0; 6], Provenance::General).unwrap();
        let alpha = rng.gen_range(0.1..0.9);
        let rep = opcalc::neg_power_bound_check(&j, alpha).unwrap();
        if !rep.pass {
            violations += 1;
        }
    }
    let pass = worst_sq < 1e-6 && worst_eig < 1e-8 && violations == 0;
    verdict(
        6,
        "balakrishnan-powers",
        pass,
        &format!("sq {worst_sq:.3e} (<1e-6), eig {worst_eig:.3e} (<1e-8), violations {violations}/100"),
    );
}

#[test]
fn criterion_07_generator_bridge() {
    let start = Instant::now();
    let funcs: [(&str, fn(f64) -> f64); 3] = [
        ("bump3", |x| (x * (1.0 - x)).powi(3)),
        ("bump4", |x| (x * (1.0 - x)).powi(4)),
        ("sin-bump", |x| (std::f64::consts::PI * x).sin().powi(6)),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for alpha in [0.3, 0.5, 0.7] {
        for (name, func) in &funcs {
            let mut last = f64::INFINITY;
            let mut monotone = true;
            for m in [128usize, 256, 512, 1024, 2048] {
                let grid = IntervalGrid::uniform(0.0, 1.0, m).unwrap();
                let a = opcalc::shift_generator(&grid, opcalc::ShiftDir::Negative).unwrap();
                let f = GridFn::from_real_fn(&grid, func);
                let v = CVec::from_vec(f.values.clone());
                let powered =
                    opcalc::balakrishnan_apply(&a, alpha, opcalc::PowerSign::Positive, &v).unwrap();
                let oracle = frac1d::marchaud_deriv_left(&f, alpha, 1e-7).unwrap().fun;
                let approx = GridFn::new(Arc::clone(&grid), powered.iter().copied().collect()).unwrap();
                let rel = approx.lp_distance(&oracle, 2.0) / oracle.l2_norm();
                monotone &= rel < last;
                last = rel;
            }
            if !(monotone && last < 1e-2) {
                pass = false;
                detail.push_str(&format!(
                    "alpha={alpha} {name}: final {last:.3e}, monotone {monotone}; "
                ));
            }
        }
    }
    if detail.is_empty() {
        detail = format!("all 9 sweeps monotone, finals < 1e-2, {:.1}s", start.elapsed().as_secs_f64());
    }
    verdict(7, "generator-bridge", pass, &detail);
}

#[test]
fn criterion_08_semigroup_contraction() {
    let tol = 1e-12;
    let mut worst: f64 = 0.0;
    for m in [16usize, 64, 128] {
        let grid = IntervalGrid::uniform(0.0, 1.0, m).unwrap();
        for dir in [opcalc::ShiftDir::Positive, opcalc::ShiftDir::Negative] {
            let a = opcalc::shift_generator(&grid, dir).unwrap();
            for t in [0.01, 0.1, 1.0, 10.0] {
                worst = worst.max(a.expm(-t).op_norm());
            }
        }
    }
    verdict(
        8,
        "semigroup-contraction",
        worst <= 1.0 + tol,
        &format!("max ‖e^(-tA)‖ = {worst:.15}, cap 1+1e-12"),
    );
}

#[test]
fn criterion_09_elliptic_representation() {
    let mut pass = true;
    let mut detail = String::new();
    // the assembly-vs-stencil residual is Θ(h) exactly, so a finite log-log
    // fit sits marginally below 1; first order is certified by strictly
    // decreasing residuals whose local orders increase toward 1, with the
    // finest local order within 5% of first order
    let verdict_for = |hs: &[f64], errs: &[f64]| -> (f64, bool) {
        if errs.iter().all(|&e| e < 1e-10) {
            return (f64::INFINITY, true); // exact agreement (constant coefficients)
        }
        let locals: Vec<f64> = (1..errs.len())
            .map(|k| (errs[k - 1] / errs[k]).ln() / (hs[k - 1] / hs[k]).ln())
            .collect();
        let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
        let improving = locals.windows(2).all(|w| w[1] >= w[0]);
        let last = *locals.last().unwrap();
        let order = fit_order(hs, errs);
        (order, decreasing && improving && (order >= 1.0 || last >= 0.95))
    };
    // n = 1: constant and smooth-variable coefficients
    for (label, coeff) in [
        ("const", Box::new(|_: &[f64]| 1.0) as Box<dyn Fn(&[f64]) -> f64>),
        ("smooth", Box::new(|x: &[f64]| 1.0 + 0.5 * (2.0 * x[0]).sin())),
    ] {
        let refs: Vec<&dyn Fn(&[f64]) -> f64> = vec![coeff.as_ref()];
        let probe = |x: &[f64]| (x[0] * (1.0 - x[0])).powi(3) * 64.0;
        let mut hs = Vec::new();
        let mut errs = Vec::new();
        for m in [32usize, 64, 128, 256] {
            let system = opcalc::GeneratorSystem::interval(1.0, m).unwrap();
            let op = opcalc::elliptic_assemble(&refs, &system).unwrap();
            hs.push(1.0 / (m + 1) as f64);
            errs.push(opcalc::elliptic_stencil_residual(&refs, &system, &op, &probe));
        }
        let (order, ok) = verdict_for(&hs, &errs);
        detail.push_str(&format!("n=1 {label}: order {order:.2}; "));
        pass &= ok;
    }
    // n = 2
    for (label, cx_, cy_) in [
        (
            "const",
            Box::new(|_: &[f64]| 1.0) as Box<dyn Fn(&[f64]) -> f64>,
            Box::new(|_: &[f64]| 2.0) as Box<dyn Fn(&[f64]) -> f64>,
        ),
        (
            "smooth",
            Box::new(|x: &[f64]| 1.0 + 0.3 * (x[0] + x[1]).sin()),
            Box::new(|x: &[f64]| 1.5 + 0.2 * (x[0] * x[1]).cos()),
        ),
    ] {
        let refs: Vec<&dyn Fn(&[f64]) -> f64> = vec![cx_.as_ref(), cy_.as_ref()];
        let probe =
            |x: &[f64]| (x[0] * (1.0 - x[0])).powi(3) * (x[1] * (1.0 - x[1])).powi(3) * 4096.0;
        let mut hs = Vec::new();
        let mut errs = Vec::new();
        for m in [12usize, 18, 27, 40] {
            let system = opcalc::GeneratorSystem::box2(1.0, 1.0, m, m).unwrap();
            let op = opcalc::elliptic_assemble(&refs, &system).unwrap();
            hs.push(1.0 / (m + 1) as f64);
            errs.push(opcalc::elliptic_stencil_residual(&refs, &system, &op, &probe));
        }
        let (order, ok) = verdict_for(&hs, &errs);
        detail.push_str(&format!("n=2 {label}: order {order:.2}; "));
        pass &= ok;
    }
    verdict(9, "elliptic-representation", pass, &detail);
}

fn jordan_test_matrix(rng: &mut ChaCha8Rng) -> (OpMatrix<f64>, CMat<f64>, Vec<(C64, usize)>) {
    let v = CMat::<f64>::from_fn(6, 6, |i, j| {
        if i == j {
            c(1.0, 0.0)
        } else {
            c(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2))
        }
    });
    let blocks = vec![
        (c(1.0, 0.0), 2usize),
        (c(2.5, 0.0), 1usize),
        (c(0.7, 0.3), 2usize),
        (c(4.0, 0.0), 1usize),
    ];
    let mut j = CMat::<f64>::zeros(6, 6);
    let mut col = 0;
    for (lam, len) in &blocks {
        for i in 0..*len {
            j[(col + i, col + i)] = *lam;
            if i + 1 < *len {
                j[(col + i, col + i + 1)] = c(1.0, 0.0);
            }
        }
        col += len;
    }
    let w_mat = &v * j * v.clone().lu().try_inverse().unwrap();
    (
        OpMatrix::new(w_mat, vec![1.0; 6], Provenance::General).unwrap(),
        v,
        blocks,
    )
}

#[test]
fn criterion_10_cauchy_solver_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let phi = spectral::OperatorFunction::new(
        0,
        vec![c(0.2, 0.0), c(1.0, 0.0), c(0.1, 0.0)],
        0.05,
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    let mut worst_recon: f64 = 0.0;
    // diagonalizable cases up to 6x6
    for n in [2usize, 4, 6] {
        let w = random_hpd(n, &mut rng);
        let sys = spectral::jordan_decompose(&w, 1e-8).unwrap();
        let f = CVec::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let problem = spectral::CauchyProblem {
            w: w.clone(),
            phi: phi.clone(),
            alpha: 1.0,
            f: f.clone(),
            times: vec![0.0, 0.1, 1.0, 5.0],
        };
        let sol = spectral::solve_cauchy(&problem, &sys, 1e-14).unwrap();
        let phi_w = phi.of_matrix(&w).unwrap();
        for (i, &t) in problem.times.iter().enumerate() {
            let oracle = expm_mat(&(phi_w.mat.clone() * c(-t, 0.0))) * &f;
            let rel = (&sol.values[i] - &oracle).norm() / oracle.norm().max(1e-30);
            if t == 0.0 {
                worst_recon = worst_recon.max(rel);
            } else {
                worst = worst.max(rel);
            }
        }
    }
    // defective 6x6 with a 2-chain Jordan block, φ(z) = z
    let (w, v, blocks) = jordan_test_matrix(&mut rng);
    let sys = spectral::jordan_from_structure(&w, &v, &blocks, 1e-7).unwrap();
    let phi_id = spectral::OperatorFunction::<f64>::identity(0.3);
    let f = CVec::from_fn(6, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let problem = spectral::CauchyProblem {
        w: w.clone(),
        phi: phi_id,
        alpha: 1.0,
        f: f.clone(),
        times: vec![0.0, 0.1, 1.0, 5.0],
    };
    let sol = spectral::solve_cauchy(&problem, &sys, 1e-14).unwrap();
    for (i, &t) in problem.times.iter().enumerate() {
        let oracle = expm_mat(&(w.mat.clone() * c(-t, 0.0))) * &f;
        let rel = (&sol.values[i] - &oracle).norm() / oracle.norm().max(1e-30);
        if t == 0.0 {
            worst_recon = worst_recon.max(rel);
        } else {
            worst = worst.max(rel);
        }
    }
    verdict(
        10,
        "cauchy-solver-oracle",
        worst < 1e-8 && worst_recon < 1e-8,
        &format!("worst rel {worst:.3e}, t=0 reconstruction {worst_recon:.3e}, tol 1e-8"),
    );
}

#[test]
fn criterion_11_fractional_residual() {
    let w = OpMatrix::new(
        CMat::from_diagonal(&CVec::from_vec(vec![c(0.8, 0.0), c(1.5, 0.0)])),
        vec![1.0; 2],
        Provenance::General,
    )
    .unwrap();
    let sys = spectral::jordan_decompose(&w, 1e-8).unwrap();
    let phi = spectral::OperatorFunction::<f64>::identity(0.05);
    let f = CVec::from_vec(vec![c(1.0, 0.0), c(0.5, 0.0)]);
    let mut pass = true;
    let mut detail = String::new();
    for alpha in [1.5, 2.0] {
        let mut residuals = Vec::new();
        for (n, t_max) in [(300usize, 6.0), (600, 8.0), (1200, 10.0)] {
            let dt = t_max / (n - 1) as f64;
            let times: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
            let problem = spectral::CauchyProblem {
                w: w.clone(),
                phi: phi.clone(),
                alpha,
                f: f.clone(),
                times,
            };
            let sol = spectral::solve_cauchy(&problem, &sys, 1e-14).unwrap();
            let rep = spectral::residual_check(&sol, &problem).unwrap();
            residuals.push(rep.max_rel);
        }
        let decreasing = residuals.windows(2).all(|w| w[1] < w[0]);
        let final_ok = *residuals.last().unwrap() < 1e-2;
        detail.push_str(&format!("alpha={alpha}: residuals [{}]; ", fmt_seq(&residuals)));
        pass &= decreasing && final_ok;
    }
    verdict(11, "fractional-residual", pass, &detail);
}

#[test]
fn criterion_12_chain_coefficient_machinery() {
    // H_0 ≡ 1 exactly; H_1 = t z² for φ(z) = z; contour-integral oracle
    // agreement for j ≤ 4.
    let id = spectral::OperatorFunction::<f64>::identity(0.1);
    let mut h0_exact = true;
    let mut h1_worst: f64 = 0.0;
    for (z, t) in [(c(2.0, 0.0), 0.7), (c(0.5, 1.0), 2.0), (c(-1.0, 3.0), 0.3)] {
        let h = spectral::h_values(&id, 1.0, z, t, 2).unwrap();
        h0_exact &= h[0] == c(1.0, 0.0);
        h1_worst = h1_worst.max(cnorm(h[1] - z * z * c(t, 0.0)));
    }

    let phi = spectral::OperatorFunction::new(
        0,
        vec![c(0.3, 0.1), c(1.0, 0.0), c(0.2, -0.1), c(0.05, 0.0)],
        0.1,
    )
    .unwrap();
    let z = c(1.4, 0.6);
    let t = 0.8;
    let h = spectral::h_values(&phi, 1.0, z, t, 4).unwrap();
    let zeta0 = c(1.0, 0.0) / z;
    let psi0 = phi.eval(z).unwrap();
    let radius = 0.2 * cnorm(zeta0);
    let m = 512usize;
    let mut contour_worst: f64 = 0.0;
    for j in 0..=4usize {
        let mut acc = c(0.0, 0.0);
        for p in 0..m {
            let th = 2.0 * std::f64::consts::PI * p as f64 / m as f64;
            let zeta = zeta0 + c(radius * th.cos(), radius * th.sin());
            let val = (phi.eval(c(1.0, 0.0) / zeta).unwrap() * c(-t, 0.0)).exp();
            let rot = c((j as f64 * th).cos(), -(j as f64 * th).sin());
            acc += val * rot;
        }
        let coeff = acc / c(m as f64 * radius.powi(j as i32), 0.0);
        let oracle = (psi0 * c(t, 0.0)).exp() * coeff;
        contour_worst = contour_worst.max(cnorm(h[j] - oracle) / cnorm(oracle).max(1.0));
    }
    let pass = h0_exact && h1_worst < 1e-12 && contour_worst < 1e-8;
    verdict(
        12,
        "chain-coefficient-machinery",
        pass,
        &format!("H0 exact {h0_exact}, H1 err {h1_worst:.3e} (<1e-12), contour err {contour_worst:.3e} (<1e-8)"),
    );
}
