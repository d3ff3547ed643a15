//! Practical GADI-HS with loose inner tolerances.
//!
//! Instead of solving the two shifted systems nearly exactly, each outer
//! step works on the current residual: CG reduces it through the symmetric
//! shift to a relative tolerance 10^-delta_H, CGNE pushes the resulting
//! increment through the skew shift to 10^-delta_S, and the sum updates the
//! iterate. With omega = 0 this is the inexact HSS method.

use std::time::Instant;

use crate::dense::{norm2, sub};
use crate::error::{Error, Result};
use crate::gadi::{SolveReport, Termination};
use crate::krylov::{cg, cgne, ShiftedOperator};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone)]
pub struct InexactConfig {
    pub alpha: f64,
    pub omega: f64,
    /// Inner CG tolerance exponent: relative tolerance 10^-delta_h.
    pub delta_h: u32,
    /// Inner CGNE tolerance exponent: relative tolerance 10^-delta_s.
    pub delta_s: u32,
    pub outer_rel_tol: f64,
    pub max_outer: usize,
    /// Cap on iterations per inner solve; `None` means 10 * sqrt(n),
    /// rounded up. Hitting the cap is counted in the report, not an error.
    pub inner_max_iter: Option<usize>,
}

impl InexactConfig {
    pub fn new(alpha: f64, omega: f64) -> Result<Self> {
        let cfg = InexactConfig {
            alpha,
            omega,
            delta_h: 2,
            delta_s: 2,
            outer_rel_tol: 1e-6,
            max_outer: 5000,
            inner_max_iter: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "alpha must be a positive finite real, got {}",
                self.alpha
            )));
        }
        if !(0.0..2.0).contains(&self.omega) {
            return Err(Error::InvalidConfig(format!(
                "omega must lie in [0, 2), got {}",
                self.omega
            )));
        }
        if self.delta_h < 1 || self.delta_s < 1 {
            return Err(Error::InvalidConfig(format!(
                "inner tolerance exponents must be at least 1, got ({}, {})",
                self.delta_h, self.delta_s
            )));
        }
        if self.max_outer == 0 {
            return Err(Error::InvalidConfig(
                "max_outer must be positive".to_string(),
            ));
        }
        if !(self.outer_rel_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "outer_rel_tol must be positive, got {}",
                self.outer_rel_tol
            )));
        }
        Ok(())
    }

    fn inner_cap(&self, dim: usize) -> usize {
        self.inner_max_iter
            .unwrap_or_else(|| (10.0 * (dim as f64).sqrt()).ceil() as usize)
            .max(1)
    }
}

/// One outer step per residual: CG-solve (alpha*I + H) z = r to
/// 10^-delta_h relative, CGNE-solve (alpha*I + S) y = alpha*(2-omega)*z to
/// 10^-delta_s relative, then x += y. Stops on the recomputed relative
/// residual of the full system or at `max_outer`.
pub fn practical_gadi_hs(
    a: &SparseMatrix,
    b: &[f64],
    cfg: &InexactConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    let (h, s) = a.hs_split()?;
    let dim = a.nrows();
    if b.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "system is {}x{}, b has length {}",
            dim,
            dim,
            b.len()
        )));
    }
    let start = Instant::now();
    let alpha = cfg.alpha;
    let lift = (2.0 - cfg.omega) * alpha;
    let eps_h = 10f64.powi(-(cfg.delta_h as i32));
    let eps_s = 10f64.powi(-(cfg.delta_s as i32));
    let cap = cfg.inner_cap(dim);
    let h_op = ShiftedOperator::plus(&h, alpha);
    let s_op = ShiftedOperator::plus(&s, alpha);
    let zero = vec![0.0; dim];

    let mut x = vec![0.0; dim];
    let mut r = b.to_vec();
    let mut res0 = norm2(b);
    if res0 == 0.0 {
        res0 = 1.0;
    }
    let mut history = vec![1.0];
    let mut cg_iters = 0usize;
    let mut cgne_iters = 0usize;
    let mut cap_hits = 0usize;
    let mut termination = Termination::MaxIter;
    let mut sweeps = 0usize;

    for k in 1..=cfg.max_outer {
        let (z, stats_h) = cg(&h_op, &r, &zero, eps_h, cap).map_err(|e| Error::InnerSolve {
            step: k,
            source: Box::new(e),
        })?;
        cg_iters += stats_h.iterations;
        cap_hits += usize::from(!stats_h.converged);

        let rhs: Vec<f64> = z.iter().map(|&zi| lift * zi).collect();
        let (y, stats_s) = cgne(&s_op, &rhs, &zero, eps_s, cap).map_err(|e| Error::InnerSolve {
            step: k,
            source: Box::new(e),
        })?;
        cgne_iters += stats_s.iterations;
        cap_hits += usize::from(!stats_s.converged);

        for i in 0..dim {
            x[i] += y[i];
        }
        sweeps = k;

        r = sub(b, &a.spmv(&x).expect("dimensions checked"));
        let res = norm2(&r) / res0;
        history.push(res);
        if res <= cfg.outer_rel_tol {
            termination = Termination::Converged;
            break;
        }
    }

    Ok(SolveReport {
        iterations: sweeps,
        residual_history: history,
        inner_cg_mean: mean(cg_iters, sweeps),
        inner_cgne_mean: mean(cgne_iters, sweeps),
        inner_cap_hits: cap_hits,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        termination,
        final_x: x,
    })
}

/// Inexact HSS: the practical method with omega forced to 0.
pub fn ihss_solve(a: &SparseMatrix, b: &[f64], cfg: &InexactConfig) -> Result<SolveReport> {
    let cfg = InexactConfig {
        omega: 0.0,
        ..cfg.clone()
    };
    practical_gadi_hs(a, b, &cfg)
}

fn mean(total: usize, count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        total as f64 / count as f64
    }
}
