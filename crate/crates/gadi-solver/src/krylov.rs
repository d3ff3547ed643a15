//! Inner iterative solvers and spectral estimators.
//!
//! CG handles the symmetric positive definite shifted systems, CGNE the
//! shifted skew systems (CG on the normal equations, with stopping measured
//! on the true residual). Power iteration supplies the dominant-eigenvalue,
//! eigenvalue-extreme and singular-value estimates the parameter formulas
//! consume.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::{axpy, dot, norm2, sub};
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

/// Operators that can also apply their transpose (needed by CGNE).
pub trait TransposableOperator: LinearOperator {
    fn apply_transpose(&self, x: &[f64]) -> Vec<f64>;
}

/// shift * I + scale * M
pub struct ShiftedOperator<'a> {
    matrix: &'a SparseMatrix,
    shift: f64,
    scale: f64,
}

impl<'a> ShiftedOperator<'a> {
    pub fn new(matrix: &'a SparseMatrix, shift: f64, scale: f64) -> Self {
        Self {
            matrix,
            shift,
            scale,
        }
    }

    /// shift * I + M
    pub fn plus(matrix: &'a SparseMatrix, shift: f64) -> Self {
        Self::new(matrix, shift, 1.0)
    }

    /// shift * I - M
    pub fn minus(matrix: &'a SparseMatrix, shift: f64) -> Self {
        Self::new(matrix, shift, -1.0)
    }
}

impl LinearOperator for ShiftedOperator<'_> {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.matrix.spmv(x).expect("operator dimension fixed at construction");
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = self.shift * xi + self.scale * *yi;
        }
        y
    }
}

impl TransposableOperator for ShiftedOperator<'_> {
    fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self
            .matrix
            .spmv_transpose(x)
            .expect("operator dimension fixed at construction");
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = self.shift * xi + self.scale * *yi;
        }
        y
    }
}

/// Plain wrapper around a square sparse matrix.
pub struct MatrixOperator<'a>(pub &'a SparseMatrix);

impl LinearOperator for MatrixOperator<'_> {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.0.spmv(x).expect("operator dimension fixed at construction")
    }
}

impl TransposableOperator for MatrixOperator<'_> {
    fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        self.0
            .spmv_transpose(x)
            .expect("operator dimension fixed at construction")
    }
}

/// A'A as an operator, for singular value estimation.
struct NormalOperator<'a, O: TransposableOperator>(&'a O);

impl<O: TransposableOperator> LinearOperator for NormalOperator<'_, O> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.0.apply_transpose(&self.0.apply(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSolveStats {
    pub iterations: usize,
    pub final_relative_residual: f64,
    pub converged: bool,
}

fn check_system(op_dim: usize, b: &[f64], x0: &[f64]) -> Result<()> {
    if op_dim == 0 {
        return Err(Error::InvalidDimension("zero-dimension system".into()));
    }
    if b.len() != op_dim || x0.len() != op_dim {
        return Err(Error::DimensionMismatch(format!(
            "operator dim {}, b has {}, x0 has {}",
            op_dim,
            b.len(),
            x0.len()
        )));
    }
    Ok(())
}

/// Conjugate gradients on a symmetric positive definite operator.
///
/// Returns x with ||b - op(x)|| <= rel_tol * ||b - op(x0)||, or
/// `converged = false` once `max_iter` is exhausted. A nonpositive direction
/// curvature is reported as a breakdown error.
pub fn cg<O: LinearOperator>(
    op: &O,
    b: &[f64],
    x0: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, InnerSolveStats)> {
    check_system(op.dim(), b, x0)?;
    let mut x = x0.to_vec();
    let mut r = sub(b, &op.apply(&x));
    let r0_norm = norm2(&r);
    if r0_norm == 0.0 {
        return Ok((
            x,
            InnerSolveStats {
                iterations: 0,
                final_relative_residual: 0.0,
                converged: true,
            },
        ));
    }
    let threshold = rel_tol * r0_norm;
    let mut iterations = 0;
    // the recursive residual drives the stopping test; the true residual is
    // re-checked at the end and iteration resumes if rounding drift left it
    // above the threshold
    loop {
        let mut p = r.clone();
        let mut rho = dot(&r, &r);
        while iterations < max_iter && rho.sqrt() > threshold {
            let ap = op.apply(&p);
            let curvature = dot(&p, &ap);
            if curvature <= 0.0 {
                return Err(Error::CgBreakdown {
                    iteration: iterations + 1,
                    curvature,
                });
            }
            let step = rho / curvature;
            axpy(step, &p, &mut x);
            axpy(-step, &ap, &mut r);
            let rho_next = dot(&r, &r);
            let beta = rho_next / rho;
            for (pi, ri) in p.iter_mut().zip(&r) {
                *pi = ri + beta * *pi;
            }
            rho = rho_next;
            iterations += 1;
        }
        r = sub(b, &op.apply(&x));
        let true_norm = norm2(&r);
        if true_norm <= threshold || iterations >= max_iter {
            return Ok((
                x,
                InnerSolveStats {
                    iterations,
                    final_relative_residual: true_norm / r0_norm,
                    converged: true_norm <= threshold,
                },
            ));
        }
    }
}

/// CG on the normal equations A'Ax = A'b.
///
/// Stopping is measured on the original residual ||b - Ax||, not the
/// normal-equations residual.
pub fn cgne<O: TransposableOperator>(
    op: &O,
    b: &[f64],
    x0: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, InnerSolveStats)> {
    check_system(op.dim(), b, x0)?;
    let mut x = x0.to_vec();
    let mut r = sub(b, &op.apply(&x));
    let r0_norm = norm2(&r);
    if r0_norm == 0.0 {
        return Ok((
            x,
            InnerSolveStats {
                iterations: 0,
                final_relative_residual: 0.0,
                converged: true,
            },
        ));
    }
    let threshold = rel_tol * r0_norm;
    let mut iterations = 0;
    loop {
        let mut s = op.apply_transpose(&r);
        let mut p = s.clone();
        let mut gamma = dot(&s, &s);
        while iterations < max_iter && norm2(&r) > threshold {
            let ap = op.apply(&p);
            let denom = dot(&ap, &ap);
            if denom <= 0.0 {
                return Err(Error::CgBreakdown {
                    iteration: iterations + 1,
                    curvature: denom,
                });
            }
            let step = gamma / denom;
            axpy(step, &p, &mut x);
            axpy(-step, &ap, &mut r);
            s = op.apply_transpose(&r);
            let gamma_next = dot(&s, &s);
            let beta = gamma_next / gamma;
            for (pi, si) in p.iter_mut().zip(&s) {
                *pi = si + beta * *pi;
            }
            gamma = gamma_next;
            iterations += 1;
        }
        r = sub(b, &op.apply(&x));
        let true_norm = norm2(&r);
        if true_norm <= threshold || iterations >= max_iter {
            return Ok((
                x,
                InnerSolveStats {
                    iterations,
                    final_relative_residual: true_norm / r0_norm,
                    converged: true_norm <= threshold,
                },
            ));
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Number of consecutive magnitude estimates that must agree before
/// convergence is declared. Single-step Rayleigh quotients are useless on
/// nonsymmetric operators (they vanish identically for pure rotations), and
/// several eigenvalues of equal dominant modulus keep the raw growth
/// factors oscillating indefinitely, so the estimate is the geometric mean
/// of the growth factors over the trailing half of the run (the leading
/// half absorbs the transient and the window keeps widening until the
/// oscillation averages out) and agreement is judged on that sequence.
const PATIENCE: usize = 20;

/// Dominant eigenvalue magnitude by power iteration with a seeded start.
pub fn spectral_radius<O: LinearOperator>(
    op: &O,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> SpectralEstimate {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nx = norm2(&x);
    for xi in &mut x {
        *xi /= nx;
    }
    // log_prefix[k] = sum of the first k log growth factors
    let mut log_prefix: Vec<f64> = Vec::with_capacity(max_iter.min(1 << 16) + 1);
    log_prefix.push(0.0);
    let tail_estimate = |log_prefix: &[f64]| {
        let k = log_prefix.len() - 1;
        let lo = k / 2;
        ((log_prefix[k] - log_prefix[lo]) / (k - lo) as f64).exp()
    };
    let mut estimates: Vec<f64> = Vec::with_capacity(PATIENCE);
    for k in 1..=max_iter {
        let y = op.apply(&x);
        let growth = norm2(&y);
        if growth == 0.0 {
            // x annihilated: dominant magnitude 0 on the explored subspace
            return SpectralEstimate {
                value: 0.0,
                converged: true,
                iterations: k,
            };
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / growth;
        }
        log_prefix.push(log_prefix[k - 1] + growth.ln());
        let est = tail_estimate(&log_prefix);
        if estimates.len() == PATIENCE {
            estimates.remove(0);
        }
        estimates.push(est);
        if estimates.len() == PATIENCE {
            let max = estimates.iter().cloned().fold(f64::MIN, f64::max);
            let min = estimates.iter().cloned().fold(f64::MAX, f64::min);
            if max - min <= tol * max.abs() {
                return SpectralEstimate {
                    value: est,
                    converged: true,
                    iterations: k,
                };
            }
        }
    }
    SpectralEstimate {
        value: tail_estimate(&log_prefix),
        converged: false,
        iterations: max_iter,
    }
}

/// Extreme eigenvalues of a symmetric positive definite matrix.
///
/// lambda_max comes from power iteration on H; lambda_min from the shifted
/// operator lambda_max*I - H, whose dominant eigenvalue is
/// lambda_max - lambda_min.
pub fn eigen_extremes_spd(
    h: &SparseMatrix,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let top = spectral_radius(&MatrixOperator(h), tol, max_iter, seed);
    if !top.converged {
        return Err(Error::PowerIterationStalled {
            max_iter,
            estimate: top.value,
        });
    }
    let lambda_max = top.value;
    let shifted = ShiftedOperator::minus(h, lambda_max);
    let spread = spectral_radius(&shifted, tol, max_iter, seed);
    if !spread.converged {
        return Err(Error::PowerIterationStalled {
            max_iter,
            estimate: spread.value,
        });
    }
    Ok((lambda_max - spread.value, lambda_max))
}

/// Largest singular value via power iteration on A'A.
pub fn largest_singular_value<O: TransposableOperator>(
    op: &O,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<f64> {
    let normal = NormalOperator(op);
    let est = spectral_radius(&normal, tol, max_iter, seed);
    if !est.converged {
        return Err(Error::PowerIterationStalled {
            max_iter,
            estimate: est.value.max(0.0).sqrt(),
        });
    }
    Ok(est.value.max(0.0).sqrt())
}

/// Two-norm of a sparse matrix (its largest singular value).
pub fn matrix_two_norm(a: &SparseMatrix, tol: f64, max_iter: usize, seed: u64) -> Result<f64> {
    largest_singular_value(&MatrixOperator(a), tol, max_iter, seed)
}
