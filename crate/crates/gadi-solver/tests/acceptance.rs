//! Acceptance suite: one test per pinned criterion, covering the embedded
//! reference tables, the operator identities and contraction bounds, the
//! regression pipeline, and the dense brute-force oracles. Each test prints
//! a single pass/fail line carrying every measured and expected value; a
//! missed band panics with the same detail rather than loosening the pin.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gadi_solver::gadi::{
    apply_gadi_iteration, apply_hss_iteration, gadi_hs_solve, hss_solve, GadiConfig,
    GadiIterationOperator,
};
use gadi_solver::gpr::{fit, GprModel};
use gadi_solver::inexact::{practical_gadi_hs, InexactConfig};
use gadi_solver::krylov::spectral_radius;
use gadi_solver::params::{
    gadi_hs_params, hss_alpha, spectral_radius_bound, summarize_spectrum,
};
use gadi_solver::problems::{conv_diff_3d, parabolic_2d, sylvester_family};
use gadi_solver::sparse::SparseMatrix;
use gadi_solver::sylvester::{banded_lu_factor, banded_lu_solve, gadi_ab_solve};
use gadi_solver::traverse::{build_training_set, traverse};
use gadi_solver::{GridSpec, ProblemFamily, TraversalMethod, TraversalSettings};

const SPECTRUM_TOL: f64 = 1e-8;

/// Sub-checks of one criterion accumulate here; `finish` prints the single
/// pass/fail line and panics if any check missed its band.
struct Criterion {
    label: &'static str,
    checks: usize,
    failures: Vec<String>,
}

impl Criterion {
    fn new(label: &'static str) -> Self {
        Criterion {
            label,
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.checks += 1;
        if !ok {
            self.failures.push(detail);
        }
    }

    fn within(&mut self, what: String, measured: f64, expected: f64, tol: f64) {
        self.check(
            (measured - expected).abs() <= tol,
            format!("{what}: measured {measured} wanted {expected} (tolerance {tol})"),
        );
    }

    fn within_it(&mut self, what: String, measured: usize, expected: usize, tol: usize) {
        self.check(
            measured.abs_diff(expected) <= tol,
            format!("{what}: measured {measured} sweeps wanted {expected} (tolerance {tol})"),
        );
    }

    fn budget(&mut self, started: Instant, seconds: u64) {
        let took = started.elapsed().as_secs_f64();
        self.check(
            took < seconds as f64,
            format!("runtime {took:.1}s over the {seconds}s budget"),
        );
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("{}: PASS ({} checks)", self.label, self.checks);
        } else {
            let detail = self.failures.join("; ");
            println!("{}: FAIL: {}", self.label, detail);
            panic!("{}: {}", self.label, detail);
        }
    }
}

fn exact_config(alpha: f64, omega: f64) -> GadiConfig {
    GadiConfig {
        alpha,
        omega,
        ..GadiConfig::default()
    }
}

fn inexact_config(alpha: f64, omega: f64) -> InexactConfig {
    InexactConfig {
        alpha,
        omega,
        delta_h: 2,
        delta_s: 2,
        outer_rel_tol: 1e-6,
        max_outer: 5000,
        inner_max_iter: None,
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn c01_conv_diff_theory_parameters_and_iteration_counts() {
    let started = Instant::now();
    let mut c = Criterion::new("c01 conv-diff theory parameters and iteration counts");
    let rows = [
        (8usize, 2.0521, 37usize, 0.6208, 29usize),
        (12, 1.4359, 52, 0.4468, 39),
        (16, 1.1025, 66, 0.3465, 48),
    ];
    for (n, hss_alpha_ref, hss_it_ref, gadi_alpha_ref, gadi_it_ref) in rows {
        let p = conv_diff_3d(n).unwrap();
        let s = summarize_spectrum(&p.a, SPECTRUM_TOL).unwrap();
        let plain_alpha = hss_alpha(&s);
        let (relaxed_alpha, relaxed_omega) = gadi_hs_params(&s).unwrap();
        c.within(format!("hss alpha at n={n}"), plain_alpha, hss_alpha_ref, 1e-3);
        c.within(
            format!("gadi-hs alpha at n={n}"),
            relaxed_alpha,
            gadi_alpha_ref,
            1e-3,
        );
        c.check(
            relaxed_omega == 1.0,
            format!("gadi-hs omega at n={n}: measured {relaxed_omega} wanted 1"),
        );
        let plain = hss_solve(&p.a, &p.b, &exact_config(plain_alpha, 0.0)).unwrap();
        c.within_it(format!("hss sweeps at n={n}"), plain.iterations, hss_it_ref, 2);
        let relaxed =
            gadi_hs_solve(&p.a, &p.b, &exact_config(relaxed_alpha, relaxed_omega)).unwrap();
        c.within_it(
            format!("gadi-hs sweeps at n={n}"),
            relaxed.iterations,
            gadi_it_ref,
            2,
        );
    }
    c.budget(started, 120);
    c.finish();
}

#[test]
fn c02_parabolic_reference_pairs() {
    let started = Instant::now();
    let mut c = Criterion::new("c02 parabolic reference pairs");
    let rows = [
        (16usize, 0.6156, 77usize, 0.1158, 37usize),
        (32, 0.3050, 140, 0.0603, 64),
    ];
    for (n, plain_alpha, hss_it_ref, relaxed_alpha, gadi_it_ref) in rows {
        let p = parabolic_2d(n).unwrap();
        let plain = hss_solve(&p.a, &p.b, &exact_config(plain_alpha, 0.0)).unwrap();
        c.within_it(format!("hss sweeps at n={n}"), plain.iterations, hss_it_ref, 2);
        let relaxed = gadi_hs_solve(&p.a, &p.b, &exact_config(relaxed_alpha, 1.0)).unwrap();
        c.within_it(
            format!("gadi-hs sweeps at n={n}"),
            relaxed.iterations,
            gadi_it_ref,
            2,
        );
    }
    c.budget(started, 60);
    c.finish();
}

#[test]
fn c03_practical_relaxed_sweeps_at_the_smallest_benchmark_row() {
    let started = Instant::now();
    let mut c = Criterion::new("c03 practical gadi-hs at n=32^3, (0.0699, 1.9)");
    let p = conv_diff_3d(32).unwrap();
    let rep = practical_gadi_hs(&p.a, &p.b, &inexact_config(0.0699, 1.9)).unwrap();
    c.within_it("outer sweeps".to_string(), rep.iterations, 23, 3);
    c.within(
        "mean inner cg count".to_string(),
        rep.inner_cg_mean,
        23.35,
        0.2 * 23.35,
    );
    c.budget(started, 60);
    c.finish();
}

#[test]
fn c04_inexact_splitting_traversal_window() {
    let started = Instant::now();
    let mut c = Criterion::new("c04 ihss traversal window at n=28^3");
    let p = conv_diff_3d(28).unwrap();
    // Competitive sweep counts sit near 130; points capped at 1000 are
    // marked non-converged and cannot win the grid search.
    let settings = TraversalSettings {
        outer_rel_tol: 1e-6,
        max_outer: 1000,
        delta_h: 2,
        delta_s: 2,
        omega: 0.0,
    };
    let grid = GridSpec::new(0.01, 3.0, 0.01).unwrap();
    let result = traverse(&p, TraversalMethod::Ihss, grid, None, &settings).unwrap();
    c.check(
        (0.93..=0.95).contains(&result.best_alpha),
        format!(
            "best alpha: measured {:.2} wanted within [0.93, 0.95]",
            result.best_alpha
        ),
    );
    c.within(
        "best sweep count".to_string(),
        result.best_it as f64,
        149.0,
        0.1 * 149.0,
    );
    c.budget(started, 1800);
    c.finish();
}

#[test]
fn c05_sylvester_alternation_at_pinned_pairs() {
    let started = Instant::now();
    let mut c = Criterion::new("c05 sylvester alternation at pinned parameter pairs");
    let rows = [
        (16usize, 0.01, 1.18, 0.0, 12usize),
        (16, 0.1, 1.18, 0.0, 12),
        (16, 1.0, 1.87, 0.0, 8),
        (32, 0.01, 0.62, 0.0, 22),
        (32, 0.1, 0.65, 0.0, 21),
        (32, 1.0, 1.28, 0.1, 12),
    ];
    for (n, r, alpha, omega, it_ref) in rows {
        let p = sylvester_family(n, r).unwrap();
        let rep = gadi_ab_solve(&p.a, &p.b, &p.c, alpha, omega, 1e-6, 5000).unwrap();
        c.within_it(format!("sweeps at n={n}, r={r}"), rep.iterations, it_ref, 2);
    }
    c.budget(started, 60);
    c.finish();
}

/// Tridiagonal fixture with positive definite symmetric part and a genuine
/// skew part, matching the library's random-system unit fixtures.
fn random_pd_system(n: usize, seed: u64) -> SparseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trip = Vec::new();
    for i in 0..n {
        trip.push((i, i, 4.0 + rng.gen_range(0.0..1.0)));
        if i + 1 < n {
            let sym = rng.gen_range(-0.5..0.5);
            let skew = rng.gen_range(-0.8..0.8);
            trip.push((i, i + 1, sym + skew));
            trip.push((i + 1, i, sym - skew));
        }
    }
    SparseMatrix::from_triplets(n, n, &trip).unwrap()
}

#[test]
fn c06_relaxed_sweep_operator_identity() {
    let mut c = Criterion::new("c06 relaxed sweep operator identity");
    let conv = conv_diff_3d(4).unwrap().a;
    let pd = random_pd_system(30, 7);
    for (tag, a) in [("conv-diff n=4", &conv), ("random pd order 30", &pd)] {
        let (h, s) = a.hs_split().unwrap();
        let dim = a.nrows();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let alpha = rng.gen_range(0.05..4.0);
            let omega = rng.gen_range(0.0..2.0);
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let relaxed = apply_gadi_iteration(&h, &s, a, alpha, omega, &x);
            let plain = apply_hss_iteration(&h, &s, alpha, &x);
            let defect: Vec<f64> = (0..dim)
                .map(|i| 2.0 * relaxed[i] - ((2.0 - omega) * plain[i] + omega * x[i]))
                .collect();
            worst = worst.max(norm2(&defect) / norm2(&x));
        }
        c.check(
            worst <= 1e-9,
            format!("{tag}: worst relative defect {worst:.3e} wanted <= 1e-9 over 100 draws"),
        );
    }
    c.finish();
}

#[test]
fn c07_contraction_and_bound_domination() {
    let mut c = Criterion::new("c07 contraction and bound domination");
    let alphas = [0.25, 0.5, 1.0, 2.0, 4.0];
    let omegas = [0.0, 0.5, 1.0, 1.5];
    for n in [4usize, 8] {
        let p = conv_diff_3d(n).unwrap();
        let (h, s) = p.a.hs_split().unwrap();
        let summary = summarize_spectrum(&p.a, SPECTRUM_TOL).unwrap();
        for alpha in alphas {
            for omega in omegas {
                let op = GadiIterationOperator::new(&h, &s, &p.a, alpha, omega);
                // Equal-modulus eigenvalue clusters can keep the stopping
                // window oscillating past any tolerance, so estimate validity
                // is certified by agreement across independent starts instead
                // of the converged flag.
                let est = spectral_radius(&op, 1e-6, 50_000, 3);
                let check = spectral_radius(&op, 1e-6, 50_000, 17);
                let bound = spectral_radius_bound(alpha, omega, &summary);
                let tag = format!("n={n}, alpha={alpha}, omega={omega}");
                c.check(
                    (est.value - check.value).abs() <= 1e-4 * est.value.max(check.value),
                    format!(
                        "{tag}: independent starts disagree, {:.6} vs {:.6}",
                        est.value, check.value
                    ),
                );
                c.check(
                    est.value < 1.0,
                    format!("{tag}: estimated radius {:.6} wanted < 1", est.value),
                );
                c.check(
                    est.value <= bound + 1e-6,
                    format!(
                        "{tag}: estimated radius {:.6} above the bound {bound:.6}",
                        est.value
                    ),
                );
            }
        }
    }
    c.finish();
}

#[test]
fn c08_bound_minimizer_grid_search() {
    let mut c = Criterion::new("c08 bound minimizer grid search");
    let p = conv_diff_3d(8).unwrap();
    let summary = summarize_spectrum(&p.a, SPECTRUM_TOL).unwrap();
    let (alpha_star, _) = gadi_hs_params(&summary).unwrap();
    let step = 0.001;
    let mut best_alpha = f64::NAN;
    let mut best_value = f64::INFINITY;
    let mut i = 0usize;
    loop {
        let alpha = 0.01 + i as f64 * step;
        if alpha > 10.0 + 1e-12 {
            break;
        }
        let value = spectral_radius_bound(alpha, 1.0, &summary);
        if value < best_value {
            best_value = value;
            best_alpha = alpha;
        }
        i += 1;
    }
    c.check(
        (best_alpha - alpha_star).abs() <= step + 1e-12,
        format!(
            "grid minimizer {best_alpha:.3} vs closed form {alpha_star:.4}: wanted within one {step} step"
        ),
    );
    c.finish();
}

#[test]
fn c09_regression_pipeline_at_held_out_sizes() {
    let mut c = Criterion::new("c09 regression pipeline at held-out sizes");
    let grid = GridSpec::new(0.05, 2.0, 0.05).unwrap();
    let settings = TraversalSettings {
        outer_rel_tol: 1e-6,
        max_outer: 2000,
        delta_h: 2,
        delta_s: 2,
        omega: 1.9,
    };
    let schedule = [2usize, 4, 6, 8, 10, 12, 16, 20];
    let pairs = build_training_set(
        ProblemFamily::ConvDiff3d,
        TraversalMethod::PracticalGadiHs,
        &schedule,
        0.0,
        grid,
        None,
        &settings,
    )
    .unwrap();
    let inputs: Vec<f64> = pairs.iter().map(|p| p.n as f64).collect();
    let targets: Vec<f64> = pairs.iter().map(|p| p.alpha).collect();
    let model = fit(&inputs, &targets, 1e-4, None, 8).unwrap();

    for (x, y) in inputs.iter().zip(&targets) {
        let mean = model.predict(*x).mean;
        c.check(
            (mean - y).abs() <= 1e-2 * y.abs(),
            format!("interpolation at n={x}: predicted {mean:.4} target {y} (1e-2 relative)"),
        );
    }

    for n in [14usize, 24] {
        let p = conv_diff_3d(n).unwrap();
        let sweep = traverse(&p, TraversalMethod::PracticalGadiHs, grid, None, &settings).unwrap();
        let predicted = model.predict(n as f64).mean;
        if predicted > 0.0 {
            let rep = practical_gadi_hs(&p.a, &p.b, &inexact_config(predicted, 1.9)).unwrap();
            c.check(
                (rep.iterations as f64 - sweep.best_it as f64).abs() <= 0.1 * sweep.best_it as f64,
                format!(
                    "held-out n={n}: predicted alpha {predicted:.4} took {} sweeps, traversal best {} at alpha {:.2}",
                    rep.iterations, sweep.best_it, sweep.best_alpha
                ),
            );
        } else {
            c.check(
                false,
                format!("held-out n={n}: predicted alpha {predicted} wanted positive"),
            );
        }
    }

    let retrained = model.retrain(&[14.0, 24.0]).unwrap();
    for x in [14.0f64, 24.0] {
        let before = model.predict(x);
        let after = retrained.predict(x);
        let width_before = before.ci_high - before.ci_low;
        let width_after = after.ci_high - after.ci_low;
        c.check(
            width_after <= width_before + 1e-12,
            format!(
                "confidence width at n={x}: {width_after:.3e} after retraining vs {width_before:.3e} before"
            ),
        );
    }
    c.finish();
}

/// Fills every entry independently with probability 0.3, returning both the
/// sparse matrix and its dense image.
fn random_sparse_with_dense(
    nrows: usize,
    ncols: usize,
    rng: &mut ChaCha8Rng,
) -> (SparseMatrix, Vec<Vec<f64>>) {
    let mut trip = Vec::new();
    let mut dense = vec![vec![0.0f64; ncols]; nrows];
    for (i, row) in dense.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            if rng.gen_bool(0.3) {
                let v = rng.gen_range(-2.0..2.0);
                trip.push((i, j, v));
                *entry = v;
            }
        }
    }
    (
        SparseMatrix::from_triplets(nrows, ncols, &trip).unwrap(),
        dense,
    )
}

/// Gaussian elimination with partial pivoting; the dense oracle for every
/// solve comparison in this suite.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        a.swap(k, pivot);
        b.swap(k, pivot);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

#[test]
fn c10_dense_brute_force_oracles() {
    let mut c = Criterion::new("c10 dense brute-force oracles");
    let mut rng = ChaCha8Rng::seed_from_u64(29);

    for (nr, nc) in [(50usize, 50usize), (37, 50), (50, 23)] {
        let (a, dense) = random_sparse_with_dense(nr, nc, &mut rng);
        let x: Vec<f64> = (0..nc).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y = a.spmv(&x).unwrap();
        let mut worst = 0.0f64;
        let mut scale = 1.0f64;
        for i in 0..nr {
            let want: f64 = (0..nc).map(|j| dense[i][j] * x[j]).sum();
            worst = worst.max((y[i] - want).abs());
            scale = scale.max(want.abs());
        }
        c.check(
            worst <= 1e-13 * scale,
            format!("spmv {nr}x{nc}: worst defect {worst:.3e} wanted <= 1e-13 relative"),
        );
    }

    {
        let (a, da) = random_sparse_with_dense(6, 5, &mut rng);
        let (b, db) = random_sparse_with_dense(7, 4, &mut rng);
        let k = a.kron(&b).unwrap().to_dense();
        let mut worst = 0.0f64;
        for i in 0..6 {
            for j in 0..5 {
                for p in 0..7 {
                    for q in 0..4 {
                        let want = da[i][j] * db[p][q];
                        worst = worst.max((k.get(i * 7 + p, j * 4 + q) - want).abs());
                    }
                }
            }
        }
        c.check(
            worst <= 1e-14,
            format!("kron 42x20: worst defect {worst:.3e} wanted <= 1e-14"),
        );
    }

    for (n, lower, upper) in [(50usize, 1usize, 1usize), (40, 2, 1)] {
        let mut trip = Vec::new();
        let mut dense = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in i.saturating_sub(lower)..(i + upper + 1).min(n) {
                let v = if i == j {
                    6.0 + rng.gen_range(0.0..1.0)
                } else {
                    rng.gen_range(-1.0..1.0)
                };
                trip.push((i, j, v));
                dense[i][j] = v;
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &trip).unwrap();
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = banded_lu_factor(&a, lower, upper).unwrap();
        let x = banded_lu_solve(&f, &rhs).unwrap();
        let want = dense_solve(dense, rhs);
        let scale = want.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let worst = x
            .iter()
            .zip(&want)
            .fold(0.0f64, |m, (xi, wi)| m.max((xi - wi).abs()));
        c.check(
            worst <= 1e-10 * scale,
            format!(
                "banded lu n={n} bands ({lower},{upper}): worst defect {worst:.3e} wanted <= 1e-10 relative"
            ),
        );
    }

    {
        let inputs = [1.0, 2.5, 4.0];
        let targets = [0.8, 0.5, 0.4];
        let (scale, iota, sigma_f, noise) = (4.0, 1.2, 0.9, 1e-3);
        let model =
            GprModel::with_hyperparameters(&inputs, &targets, scale, iota, sigma_f, noise)
                .unwrap();
        let kernel =
            |x: f64, y: f64| sigma_f * sigma_f * (-(x - y).abs() / (2.0 * iota * iota)).exp();
        let scaled: Vec<f64> = inputs.iter().map(|v| v / scale).collect();
        let mut worst = 0.0f64;
        for x_star in [1.7, 3.3, 5.0] {
            let xs = x_star / scale;
            let mut gram = vec![vec![0.0f64; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    gram[i][j] = kernel(scaled[i], scaled[j])
                        + if i == j { noise * noise } else { 0.0 };
                }
            }
            let k_star: Vec<f64> = scaled.iter().map(|&v| kernel(v, xs)).collect();
            let weights = dense_solve(gram.clone(), targets.to_vec());
            let mean: f64 = k_star.iter().zip(&weights).map(|(a, b)| a * b).sum();
            let back = dense_solve(gram, k_star.clone());
            let variance =
                kernel(xs, xs) - k_star.iter().zip(&back).map(|(a, b)| a * b).sum::<f64>();
            let got = model.predict(x_star);
            worst = worst
                .max((got.mean - mean).abs())
                .max((got.variance - variance).abs());
        }
        c.check(
            worst <= 1e-12,
            format!("regression posterior: worst defect {worst:.3e} wanted <= 1e-12"),
        );
    }
    c.finish();
}

#[test]
fn c11_relaxed_variants_beat_plain_splitting() {
    let mut c = Criterion::new("c11 relaxed variants beat plain splitting");
    for (n, plain_alpha, relaxed_alpha) in [
        (8usize, 2.0521, 0.6208),
        (12, 1.4359, 0.4468),
        (16, 1.1025, 0.3465),
    ] {
        let p = conv_diff_3d(n).unwrap();
        let plain = hss_solve(&p.a, &p.b, &exact_config(plain_alpha, 0.0)).unwrap();
        let relaxed = gadi_hs_solve(&p.a, &p.b, &exact_config(relaxed_alpha, 1.0)).unwrap();
        c.check(
            relaxed.iterations < plain.iterations,
            format!(
                "conv-diff n={n}: relaxed {} sweeps vs plain {}",
                relaxed.iterations, plain.iterations
            ),
        );
    }
    for (n, plain_alpha, relaxed_alpha) in [(16usize, 0.6156, 0.1158), (32, 0.3050, 0.0603)] {
        let p = parabolic_2d(n).unwrap();
        let plain = hss_solve(&p.a, &p.b, &exact_config(plain_alpha, 0.0)).unwrap();
        let relaxed = gadi_hs_solve(&p.a, &p.b, &exact_config(relaxed_alpha, 1.0)).unwrap();
        c.check(
            relaxed.iterations < plain.iterations,
            format!(
                "parabolic n={n}: relaxed {} sweeps vs plain {}",
                relaxed.iterations, plain.iterations
            ),
        );
    }
    // The toolkit has no plain-splitting Sylvester solver; the plain side of
    // these rows is the pinned reference count.
    for (n, r, alpha, omega, plain_it_ref) in [
        (16usize, 0.01, 1.18, 0.0, 23usize),
        (16, 0.1, 1.18, 0.0, 22),
        (16, 1.0, 1.87, 0.0, 14),
        (32, 0.01, 0.62, 0.0, 43),
        (32, 0.1, 0.65, 0.0, 41),
        (32, 1.0, 1.28, 0.1, 21),
    ] {
        let p = sylvester_family(n, r).unwrap();
        let rep = gadi_ab_solve(&p.a, &p.b, &p.c, alpha, omega, 1e-6, 5000).unwrap();
        c.check(
            rep.iterations < plain_it_ref,
            format!(
                "sylvester n={n}, r={r}: alternation {} sweeps vs plain reference {}",
                rep.iterations, plain_it_ref
            ),
        );
    }
    c.finish();
}
