//! Splitting-parameter selection from spectral summaries.
//!
//! A small record of spectral quantities (eigenvalue extremes of the
//! symmetric part, largest singular value of the skew part, two-norm of the
//! full matrix) feeds three closed forms: the classical HSS shift
//! sqrt(lambda_min * lambda_max), the two-parameter quasi-optimal pair for
//! the weighted scheme, and an upper bound on the spectral radius of the
//! sweep error operator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::krylov::{
    cgne, eigen_extremes_spd, largest_singular_value, matrix_two_norm, MatrixOperator,
};
use crate::sparse::SparseMatrix;

const POWER_MAX_ITERS: usize = 10_000;
const POWER_SEED: u64 = 1;
const CONDITION_SOLVE_TOL: f64 = 1e-10;
const CONDITION_MAX_WALKS: usize = 8;

/// Spectral quantities of one system matrix, cacheable as JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    /// Smallest eigenvalue of the symmetric part H.
    pub lambda_min: f64,
    /// Largest eigenvalue of the symmetric part H.
    pub lambda_max: f64,
    /// Largest singular value of the skew-symmetric part S.
    pub sigma_max: f64,
    /// Two-norm of the full matrix A.
    pub norm_a: f64,
}

impl SpectralSummary {
    pub fn validate(&self) -> Result<()> {
        let fields = [self.lambda_min, self.lambda_max, self.sigma_max, self.norm_a];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "spectral summary has non-finite fields".to_string(),
            ));
        }
        if !(self.lambda_min > 0.0) || self.lambda_max < self.lambda_min {
            return Err(Error::InvalidConfig(format!(
                "need 0 < lambda_min <= lambda_max, got ({}, {})",
                self.lambda_min, self.lambda_max
            )));
        }
        if self.sigma_max < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "sigma_max must be nonnegative, got {}",
                self.sigma_max
            )));
        }
        Ok(())
    }
}

/// Estimates the summary by power iteration on H, S'S and A'A.
pub fn summarize_spectrum(a: &SparseMatrix, tol: f64) -> Result<SpectralSummary> {
    let (h, s) = a.hs_split()?;
    let (lambda_min, lambda_max) = eigen_extremes_spd(&h, tol, POWER_MAX_ITERS, POWER_SEED)?;
    let sigma_max = largest_singular_value(&MatrixOperator(&s), tol, POWER_MAX_ITERS, POWER_SEED)?;
    let norm_a = matrix_two_norm(a, tol, POWER_MAX_ITERS, POWER_SEED)?;
    let summary = SpectralSummary {
        lambda_min,
        lambda_max,
        sigma_max,
        norm_a,
    };
    summary.validate()?;
    Ok(summary)
}

/// Quasi-optimal single shift for the symmetric/skew alternation,
/// sqrt(lambda_min * lambda_max).
pub fn hss_alpha(s: &SpectralSummary) -> f64 {
    (s.lambda_min * s.lambda_max).sqrt()
}

/// Quasi-optimal (alpha, omega) for the weighted two-parameter scheme with
/// p = lambda_max * sigma_max:
///
///   alpha = (p + sqrt(p^2 - lambda_min^2 p)) / lambda_max,  omega = 1.
///
/// When the skew part is so small that p < lambda_min^2 the square root's
/// argument is clamped to zero and alpha collapses to p / lambda_max.
/// A vanishing skew part is an error: the scheme degenerates to the
/// single-shift alternation and `hss_alpha` applies instead.
pub fn gadi_hs_params(s: &SpectralSummary) -> Result<(f64, f64)> {
    s.validate()?;
    if s.sigma_max == 0.0 {
        return Err(Error::DegenerateSkewPart);
    }
    let p = s.lambda_max * s.sigma_max;
    let disc = (p * p - s.lambda_min * s.lambda_min * p).max(0.0);
    Ok(((p + disc.sqrt()) / s.lambda_max, 1.0))
}

/// Upper bound on the spectral radius of the weighted sweep error operator:
///
///   (alpha^2 + alpha*|1-omega|*norm_a + lambda_max*sigma_max)
///   / (alpha * (alpha + lambda_min)).
pub fn spectral_radius_bound(alpha: f64, omega: f64, s: &SpectralSummary) -> f64 {
    let p = s.lambda_max * s.sigma_max;
    (alpha * alpha + alpha * (1.0 - omega).abs() * s.norm_a + p) / (alpha * (alpha + s.lambda_min))
}

/// Hager-style estimate of the one-norm condition number ‖A‖₁‖A⁻¹‖₁.
///
/// ‖A‖₁ is exact (largest absolute column sum); ‖A⁻¹‖₁ comes from the
/// classical gradient walk over unit-one-norm vectors, each step one solve
/// against A and one against Aᵀ (CGNE, so A only needs to be nonsingular).
/// The walk returns a lower bound on the exact value and lands on it for
/// all but adversarial matrices.
pub fn one_norm_condition_estimate(a: &SparseMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    let n = a.nrows();
    let at = a.transpose();
    let cap = 20 * n.max(50);
    let zero = vec![0.0; n];
    let solve = |m: &SparseMatrix, rhs: &[f64]| -> Result<Vec<f64>> {
        let (x, _) = cgne(&MatrixOperator(m), rhs, &zero, CONDITION_SOLVE_TOL, cap)?;
        Ok(x)
    };

    let mut x = vec![1.0 / n as f64; n];
    let mut inv_norm = 0.0f64;
    for _ in 0..CONDITION_MAX_WALKS {
        let y = solve(a, &x)?;
        inv_norm = y.iter().map(|v| v.abs()).sum();
        let sign: Vec<f64> = y
            .iter()
            .map(|v| if *v >= 0.0 { 1.0 } else { -1.0 })
            .collect();
        let z = solve(&at, &sign)?;
        let (j, z_max) = z
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.abs()))
            .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let z_dot_x: f64 = z.iter().zip(&x).map(|(zi, xi)| zi * xi).sum();
        // Stationarity of the walk: no coordinate direction improves on x.
        if z_max <= z_dot_x * (1.0 + 1e-12) {
            break;
        }
        x = vec![0.0; n];
        x[j] = 1.0;
    }
    Ok(a.one_norm() * inv_norm)
}
