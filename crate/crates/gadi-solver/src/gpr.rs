//! Gaussian process regression from problem size to splitting parameter.
//!
//! One-dimensional inputs, exponential kernel (unsquared distance), zero
//! prior mean, fixed observation noise. Hyperparameters are fitted by
//! maximizing the log marginal likelihood with a limited-memory
//! quasi-Newton ascent in log-parameter space, with seeded multistarts.
//! Inputs are rescaled by the largest training input before kernel
//! evaluation; the scale is stored in the model, so predictions are
//! expressed in raw sizes throughout.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{dot, norm2, DenseMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_NOISE: f64 = 1e-4;
pub const DEFAULT_RESTARTS: usize = 8;
const NOISE_RANGE: (f64, f64) = (1e-6, 1e-2);
const FD_RELATIVE_STEP: f64 = 1e-5;
const LBFGS_MEMORY: usize = 10;
const LBFGS_MAX_ITERS: usize = 200;
const GRAD_TOL: f64 = 1e-8;

/// Exponential kernel sigma_f^2 * exp(-|x - y| / (2 iota^2)).
///
/// The distance is unsquared: this is the exponential kernel, not the
/// squared-exponential one.
pub fn kernel(x: f64, y: f64, iota: f64, sigma_f: f64) -> f64 {
    sigma_f * sigma_f * (-(x - y).abs() / (2.0 * iota * iota)).exp()
}

fn gram(inputs: &[f64], iota: f64, sigma_f: f64, noise_sigma: f64) -> DenseMatrix {
    let n = inputs.len();
    DenseMatrix::from_fn(n, n, |i, j| {
        kernel(inputs[i], inputs[j], iota, sigma_f)
            + if i == j { noise_sigma * noise_sigma } else { 0.0 }
    })
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
fn cholesky(a: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.nrows();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            let v = l.get(j, k);
            d -= v * v;
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::GramNotPositiveDefinite(format!(
                "pivot {} at column {}",
                d, j
            )));
        }
        let dj = d.sqrt();
        l.set(j, j, dj);
        for i in j + 1..n {
            let mut v = a.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, v / dj);
        }
    }
    Ok(l)
}

/// Solves L x = b with L lower triangular.
fn solve_lower(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let xk = x[k];
            x[i] -= l.get(i, k) * xk;
        }
        x[i] /= l.get(i, i);
    }
    x
}

/// Solves L' x = b with L lower triangular.
fn solve_lower_transpose(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        for k in i + 1..n {
            let xk = x[k];
            x[i] -= l.get(k, i) * xk;
        }
        x[i] /= l.get(i, i);
    }
    x
}

/// Log marginal likelihood of the targets under the kernel hyperparameters,
/// evaluated on the inputs exactly as given:
///
///   -1/2 y' (K + sigma^2 I)^-1 y - 1/2 log det(K + sigma^2 I)
///   - (n/2) log 2 pi.
pub fn log_marginal_likelihood(
    inputs: &[f64],
    targets: &[f64],
    iota: f64,
    sigma_f: f64,
    noise_sigma: f64,
) -> Result<f64> {
    if inputs.len() != targets.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} inputs vs {} targets",
            inputs.len(),
            targets.len()
        )));
    }
    let l = cholesky(&gram(inputs, iota, sigma_f, noise_sigma))?;
    let half = solve_lower(&l, targets);
    let quad = dot(&half, &half);
    let logdet: f64 = (0..inputs.len()).map(|i| l.get(i, i).ln()).sum::<f64>() * 2.0;
    let n = inputs.len() as f64;
    Ok(-0.5 * quad - 0.5 * logdet - 0.5 * n * (2.0 * std::f64::consts::PI).ln())
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Fitted regression model; immutable once constructed.
#[derive(Debug, Clone)]
pub struct GprModel {
    train_inputs: Vec<f64>,
    train_targets: Vec<f64>,
    input_scale: f64,
    iota: f64,
    sigma_f: f64,
    noise_sigma: f64,
    chol: DenseMatrix,
    alpha_weights: Vec<f64>,
}

/// Persisted form: hyperparameters and data only; factors are recomputed
/// deterministically on load.
#[derive(Serialize, Deserialize)]
struct GprModelFile {
    train_inputs: Vec<f64>,
    train_targets: Vec<f64>,
    input_scale: f64,
    iota: f64,
    sigma_f: f64,
    noise_sigma: f64,
}

impl GprModel {
    /// Builds the model at fixed hyperparameters (no optimization).
    /// `input_scale` divides raw inputs before kernel evaluation.
    pub fn with_hyperparameters(
        inputs: &[f64],
        targets: &[f64],
        input_scale: f64,
        iota: f64,
        sigma_f: f64,
        noise_sigma: f64,
    ) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} inputs vs {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        if !(input_scale > 0.0) || !(iota > 0.0) || !(sigma_f > 0.0) {
            return Err(Error::GprFit(format!(
                "scale and hyperparameters must be positive, got scale={}, iota={}, sigma_f={}",
                input_scale, iota, sigma_f
            )));
        }
        check_noise(noise_sigma)?;
        check_distinct(inputs)?;
        let scaled: Vec<f64> = inputs.iter().map(|x| x / input_scale).collect();
        let chol = cholesky(&gram(&scaled, iota, sigma_f, noise_sigma))?;
        let half = solve_lower(&chol, targets);
        let alpha_weights = solve_lower_transpose(&chol, &half);
        Ok(GprModel {
            train_inputs: inputs.to_vec(),
            train_targets: targets.to_vec(),
            input_scale,
            iota,
            sigma_f,
            noise_sigma,
            chol,
            alpha_weights,
        })
    }

    pub fn train_inputs(&self) -> &[f64] {
        &self.train_inputs
    }

    pub fn train_targets(&self) -> &[f64] {
        &self.train_targets
    }

    pub fn hyperparameters(&self) -> (f64, f64) {
        (self.iota, self.sigma_f)
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn input_scale(&self) -> f64 {
        self.input_scale
    }

    /// Posterior at a raw input: mean k*' w, variance
    /// k(x*,x*) - k*' (K + sigma^2 I)^-1 k*, 95% interval at 1.96 sigma.
    pub fn predict(&self, x_star: f64) -> Prediction {
        let xs = x_star / self.input_scale;
        let k_star: Vec<f64> = self
            .train_inputs
            .iter()
            .map(|&x| kernel(x / self.input_scale, xs, self.iota, self.sigma_f))
            .collect();
        let mean = dot(&k_star, &self.alpha_weights);
        let v = solve_lower(&self.chol, &k_star);
        let variance =
            (kernel(xs, xs, self.iota, self.sigma_f) - dot(&v, &v)).max(0.0);
        let spread = 1.96 * variance.sqrt();
        Prediction {
            mean,
            variance,
            ci_low: mean - spread,
            ci_high: mean + spread,
        }
    }

    /// Predicts at each new input, appends the means as pseudo-observations,
    /// and refits from the current hyperparameters as the single warm start.
    /// Inputs that coincide with existing training points are skipped; an
    /// empty list returns the model unchanged.
    pub fn retrain(&self, new_inputs: &[f64]) -> Result<GprModel> {
        let mut inputs = self.train_inputs.clone();
        let mut targets = self.train_targets.clone();
        for &x in new_inputs {
            if inputs.iter().any(|&t| t == x) {
                continue;
            }
            inputs.push(x);
            targets.push(self.predict(x).mean);
        }
        if inputs.len() == self.train_inputs.len() {
            return Ok(self.clone());
        }
        fit_scaled(
            &inputs,
            &targets,
            self.input_scale,
            self.noise_sigma,
            Some((self.iota, self.sigma_f)),
            0,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GprModelFile {
            train_inputs: self.train_inputs.clone(),
            train_targets: self.train_targets.clone(),
            input_scale: self.input_scale,
            iota: self.iota,
            sigma_f: self.sigma_f,
            noise_sigma: self.noise_sigma,
        })
        .expect("plain numeric fields always serialize")
    }

    pub fn from_json(text: &str) -> Result<GprModel> {
        let file: GprModelFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        GprModel::with_hyperparameters(
            &file.train_inputs,
            &file.train_targets,
            file.input_scale,
            file.iota,
            file.sigma_f,
            file.noise_sigma,
        )
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<GprModel> {
        GprModel::from_json(&std::fs::read_to_string(path)?)
    }
}

fn check_noise(noise_sigma: f64) -> Result<()> {
    if !(NOISE_RANGE.0..=NOISE_RANGE.1).contains(&noise_sigma) {
        return Err(Error::GprFit(format!(
            "noise sigma must lie in [{}, {}], got {}",
            NOISE_RANGE.0, NOISE_RANGE.1, noise_sigma
        )));
    }
    Ok(())
}

fn check_distinct(inputs: &[f64]) -> Result<()> {
    let mut sorted = inputs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("inputs must not be NaN"));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::GprFit("training inputs must be distinct".to_string()));
    }
    Ok(())
}

/// Maximizes the marginal likelihood over (iota, sigma_f) and returns the
/// fitted model. `theta0` adds a deterministic warm start ahead of the
/// seeded log-uniform multistarts.
pub fn fit(
    inputs: &[f64],
    targets: &[f64],
    noise_sigma: f64,
    theta0: Option<(f64, f64)>,
    restarts: usize,
) -> Result<GprModel> {
    let scale = inputs
        .iter()
        .fold(0.0f64, |m, &x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    fit_scaled(inputs, targets, scale, noise_sigma, theta0, restarts)
}

fn fit_scaled(
    inputs: &[f64],
    targets: &[f64],
    input_scale: f64,
    noise_sigma: f64,
    theta0: Option<(f64, f64)>,
    restarts: usize,
) -> Result<GprModel> {
    if inputs.len() < 2 {
        return Err(Error::GprFit(format!(
            "need at least 2 training points, got {}",
            inputs.len()
        )));
    }
    if inputs.len() != targets.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} inputs vs {} targets",
            inputs.len(),
            targets.len()
        )));
    }
    check_noise(noise_sigma)?;
    check_distinct(inputs)?;
    let scaled: Vec<f64> = inputs.iter().map(|x| x / input_scale).collect();

    let objective = |z: &[f64; 2]| -> f64 {
        match log_marginal_likelihood(&scaled, targets, z[0].exp(), z[1].exp(), noise_sigma) {
            Ok(l) if l.is_finite() => -l,
            _ => f64::INFINITY,
        }
    };

    let mut starts: Vec<[f64; 2]> = Vec::new();
    if let Some((iota, sigma_f)) = theta0 {
        if !(iota > 0.0) || !(sigma_f > 0.0) {
            return Err(Error::GprFit(format!(
                "warm-start hyperparameters must be positive, got ({}, {})",
                iota, sigma_f
            )));
        }
        starts.push([iota.ln(), sigma_f.ln()]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x67707266);
    for _ in 0..restarts {
        let iota = 10f64.powf(rng.gen_range(-1.0..2.0));
        let sigma_f = 10f64.powf(rng.gen_range(-2.0..1.0));
        starts.push([iota.ln(), sigma_f.ln()]);
    }
    if starts.is_empty() {
        return Err(Error::GprFit(
            "no starting hyperparameters: pass theta0 or restarts > 0".to_string(),
        ));
    }

    let mut best: Option<([f64; 2], f64)> = None;
    for z0 in &starts {
        if let Some((z, f)) = lbfgs_minimize(&objective, *z0) {
            if best.map_or(true, |(_, fb)| f < fb) {
                best = Some((z, f));
            }
        }
    }
    let (z, _) = best.ok_or_else(|| {
        Error::GprFit(format!(
            "all {} starts failed to produce a finite likelihood; last start ({:.3e}, {:.3e})",
            starts.len(),
            starts.last().unwrap()[0].exp(),
            starts.last().unwrap()[1].exp(),
        ))
    })?;
    GprModel::with_hyperparameters(
        inputs,
        targets,
        input_scale,
        z[0].exp(),
        z[1].exp(),
        noise_sigma,
    )
}

fn fd_gradient(f: &dyn Fn(&[f64; 2]) -> f64, z: &[f64; 2]) -> Option<[f64; 2]> {
    let mut g = [0.0; 2];
    for i in 0..2 {
        let h = FD_RELATIVE_STEP * z[i].abs().max(1.0);
        let mut zp = *z;
        let mut zm = *z;
        zp[i] += h;
        zm[i] -= h;
        let (fp, fm) = (f(&zp), f(&zm));
        if !fp.is_finite() || !fm.is_finite() {
            return None;
        }
        g[i] = (fp - fm) / (2.0 * h);
    }
    Some(g)
}

/// Limited-memory BFGS descent with a weak-Wolfe bisection line search.
/// Returns the final point and value, or `None` when the start (or every
/// line search) fails to produce finite values.
fn lbfgs_minimize(f: &dyn Fn(&[f64; 2]) -> f64, z0: [f64; 2]) -> Option<([f64; 2], f64)> {
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;

    let mut z = z0;
    let mut fz = f(&z);
    if !fz.is_finite() {
        return None;
    }
    let mut g = fd_gradient(f, &z)?;
    let mut memory: Vec<([f64; 2], [f64; 2], f64)> = Vec::new(); // (s, y, 1/y's)

    for _ in 0..LBFGS_MAX_ITERS {
        if g[0].abs().max(g[1].abs()) <= GRAD_TOL * fz.abs().max(1.0) {
            break;
        }
        // two-loop recursion for d = -H g
        let mut q = g;
        let mut alphas = Vec::with_capacity(memory.len());
        for (s, y, rho) in memory.iter().rev() {
            let a = rho * (s[0] * q[0] + s[1] * q[1]);
            q[0] -= a * y[0];
            q[1] -= a * y[1];
            alphas.push(a);
        }
        if let Some((s, y, _)) = memory.last() {
            let ys = y[0] * s[0] + y[1] * s[1];
            let yy = y[0] * y[0] + y[1] * y[1];
            let gamma = ys / yy;
            q[0] *= gamma;
            q[1] *= gamma;
        }
        for ((s, y, rho), a) in memory.iter().zip(alphas.iter().rev()) {
            let b = rho * (y[0] * q[0] + y[1] * q[1]);
            q[0] += (a - b) * s[0];
            q[1] += (a - b) * s[1];
        }
        let d = [-q[0], -q[1]];
        let mut dg = d[0] * g[0] + d[1] * g[1];
        let mut dir = d;
        if !(dg < 0.0) {
            // fall back to steepest descent when curvature info is unusable
            dir = [-g[0], -g[1]];
            dg = -(g[0] * g[0] + g[1] * g[1]);
            if dg == 0.0 {
                break;
            }
        }

        // weak Wolfe by bisection
        let mut t = 1.0;
        let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
        let mut accepted: Option<([f64; 2], f64, [f64; 2])> = None;
        for _ in 0..50 {
            let zt = [z[0] + t * dir[0], z[1] + t * dir[1]];
            let ft = f(&zt);
            if !ft.is_finite() || ft > fz + C1 * t * dg {
                hi = t;
            } else {
                match fd_gradient(f, &zt) {
                    None => {
                        hi = t;
                    }
                    Some(gt) => {
                        if gt[0] * dir[0] + gt[1] * dir[1] < C2 * dg {
                            lo = t;
                        } else {
                            accepted = Some((zt, ft, gt));
                            break;
                        }
                    }
                }
            }
            t = if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                2.0 * t
            };
            if hi - lo < 1e-16 {
                break;
            }
        }
        let Some((zt, ft, gt)) = accepted else {
            break;
        };

        let s = [zt[0] - z[0], zt[1] - z[1]];
        let y = [gt[0] - g[0], gt[1] - g[1]];
        let ys = y[0] * s[0] + y[1] * s[1];
        let s_norm = norm2(&s);
        let y_norm = norm2(&y);
        if ys > 1e-10 * s_norm * y_norm {
            memory.push((s, y, 1.0 / ys));
            if memory.len() > LBFGS_MEMORY {
                memory.remove(0);
            }
        }
        if (fz - ft).abs() <= 1e-14 * fz.abs().max(1.0) {
            z = zt;
            fz = ft;
            break;
        }
        z = zt;
        fz = ft;
        g = gt;
    }
    Some((z, fz))
}
