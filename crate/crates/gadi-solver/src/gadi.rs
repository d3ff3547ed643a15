//! The two-parameter alternating-direction framework for Ax = b.
//!
//! One sweep solves against the two shifted splitting matrices in turn:
//!
//! ```text
//! (alpha*I + M) x_half = (alpha*I - N) x + b
//! (alpha*I + N) x_next = (N - (1 - omega)*alpha*I) x + (2 - omega)*alpha*x_half
//! ```
//!
//! With the symmetric/antisymmetric split M = H, N = S this is GADI-HS;
//! omega = 0 recovers HSS and omega = 1 the DRS scheme. Shifted subsystems
//! are driven to `exact_inner_tol` by CG (symmetric part) and CGNE (skew
//! part), which stands in for a direct factorization.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dense::{norm2, sub};
use crate::error::{Error, Result};
use crate::krylov::{cg, cgne, InnerSolveStats, LinearOperator, ShiftedOperator};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GadiConfig {
    pub alpha: f64,
    pub omega: f64,
    pub outer_rel_tol: f64,
    pub max_outer: usize,
    /// Tolerance at which an inner Krylov solve is treated as direct.
    pub exact_inner_tol: f64,
    /// Available to caller-supplied sub-solvers that randomize; the built-in
    /// paths start every solve from zero and ignore it.
    pub seed: u64,
}

impl GadiConfig {
    pub fn new(alpha: f64, omega: f64) -> Result<Self> {
        let cfg = Self {
            alpha,
            omega,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(0.0..2.0).contains(&self.omega) {
            return Err(Error::InvalidConfig(format!(
                "omega must lie in [0, 2), got {}",
                self.omega
            )));
        }
        for (name, tol) in [
            ("outer_rel_tol", self.outer_rel_tol),
            ("exact_inner_tol", self.exact_inner_tol),
        ] {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "{} must lie in (0, 1), got {}",
                    name, tol
                )));
            }
        }
        Ok(())
    }
}

impl Default for GadiConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            omega: 0.0,
            outer_rel_tol: 1e-6,
            max_outer: 5000,
            exact_inner_tol: 1e-12,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIter,
}

/// Outcome of an outer iteration, serializable as a JSON report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// Relative residual after each sweep; entry 0 is the starting value 1.
    pub residual_history: Vec<f64>,
    pub inner_cg_mean: f64,
    pub inner_cgne_mean: f64,
    /// Inner solves that stopped at their iteration cap short of tolerance.
    #[serde(default)]
    pub inner_cap_hits: usize,
    pub wall_time_seconds: f64,
    pub termination: Termination,
    pub final_x: Vec<f64>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().unwrap_or(&1.0)
    }
}

type SubSolver<'c> = dyn Fn(&[f64]) -> Result<(Vec<f64>, InnerSolveStats)> + 'c;

/// Runs the two-step framework with caller-supplied solvers for the two
/// shifted systems. `m` and `n` must sum to the system matrix.
pub fn gadi_solve(
    m: &SparseMatrix,
    n: &SparseMatrix,
    b: &[f64],
    cfg: &GadiConfig,
    solve_m: &SubSolver<'_>,
    solve_n: &SubSolver<'_>,
) -> Result<SolveReport> {
    cfg.validate()?;
    let a = m.add(n)?;
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
    let omega = cfg.omega;
    let mut x = vec![0.0; dim];
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
        // (alpha*I + M) x_half = (alpha*I - N) x + b
        let nx = n.spmv(&x).expect("dimensions checked");
        let mut rhs: Vec<f64> = (0..dim).map(|i| alpha * x[i] - nx[i] + b[i]).collect();
        let (x_half, stats_m) = solve_m(&rhs).map_err(|e| Error::InnerSolve {
            step: k,
            source: Box::new(e),
        })?;
        cg_iters += stats_m.iterations;
        cap_hits += usize::from(!stats_m.converged);

        // (alpha*I + N) x_next = (N - (1-omega)*alpha*I) x + (2-omega)*alpha*x_half
        rhs = nx;
        let shift = (1.0 - omega) * alpha;
        let lift = (2.0 - omega) * alpha;
        for i in 0..dim {
            rhs[i] += lift * x_half[i] - shift * x[i];
        }
        let (x_next, stats_n) = solve_n(&rhs).map_err(|e| Error::InnerSolve {
            step: k,
            source: Box::new(e),
        })?;
        cgne_iters += stats_n.iterations;
        cap_hits += usize::from(!stats_n.converged);
        x = x_next;
        sweeps = k;

        let r = sub(b, &a.spmv(&x).expect("dimensions checked"));
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

fn mean(total: usize, count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        total as f64 / count as f64
    }
}

fn inner_cap(dim: usize) -> usize {
    (4 * dim).max(200)
}

/// GADI with the symmetric/antisymmetric split of A: M = H solved by CG,
/// N = S solved by CGNE.
pub fn gadi_hs_solve(a: &SparseMatrix, b: &[f64], cfg: &GadiConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let (h, s) = a.hs_split()?;
    let dim = a.nrows();
    let cap = inner_cap(dim);
    let h_op = ShiftedOperator::plus(&h, cfg.alpha);
    let s_op = ShiftedOperator::plus(&s, cfg.alpha);
    let zero = vec![0.0; dim];
    let solve_m =
        |rhs: &[f64]| cg(&h_op, rhs, &zero, cfg.exact_inner_tol, cap);
    let solve_n =
        |rhs: &[f64]| cgne(&s_op, rhs, &zero, cfg.exact_inner_tol, cap);
    gadi_solve(&h, &s, b, cfg, &solve_m, &solve_n)
}

/// The omega = 0 scheme in its own two-step form:
/// (alpha*I + H) x_half = (alpha*I - S) x + b, then
/// (alpha*I + S) x_next = (alpha*I - H) x_half + b.
pub fn hss_solve(a: &SparseMatrix, b: &[f64], cfg: &GadiConfig) -> Result<SolveReport> {
    let cfg = GadiConfig {
        omega: 0.0,
        ..cfg.clone()
    };
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
    let cap = inner_cap(dim);
    let h_op = ShiftedOperator::plus(&h, alpha);
    let s_op = ShiftedOperator::plus(&s, alpha);
    let zero = vec![0.0; dim];

    let mut x = vec![0.0; dim];
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
        let sx = s.spmv(&x).expect("dimensions checked");
        let rhs1: Vec<f64> = (0..dim).map(|i| alpha * x[i] - sx[i] + b[i]).collect();
        let (x_half, stats_m) = cg(&h_op, &rhs1, &zero, cfg.exact_inner_tol, cap)
            .map_err(|e| Error::InnerSolve {
                step: k,
                source: Box::new(e),
            })?;
        cg_iters += stats_m.iterations;
        cap_hits += usize::from(!stats_m.converged);

        let hx = h.spmv(&x_half).expect("dimensions checked");
        let rhs2: Vec<f64> = (0..dim).map(|i| alpha * x_half[i] - hx[i] + b[i]).collect();
        let (x_next, stats_n) = cgne(&s_op, &rhs2, &zero, cfg.exact_inner_tol, cap)
            .map_err(|e| Error::InnerSolve {
                step: k,
                source: Box::new(e),
            })?;
        cgne_iters += stats_n.iterations;
        cap_hits += usize::from(!stats_n.converged);
        x = x_next;
        sweeps = k;

        let r = sub(b, &a.spmv(&x).expect("dimensions checked"));
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

/// omega = 1 specialization.
pub fn drs_solve(a: &SparseMatrix, b: &[f64], cfg: &GadiConfig) -> Result<SolveReport> {
    let cfg = GadiConfig {
        omega: 1.0,
        ..cfg.clone()
    };
    gadi_hs_solve(a, b, &cfg)
}

const OPERATOR_INNER_TOL: f64 = 1e-12;

/// Error-propagation operator of one HSS sweep,
/// (alpha*I+S)^-1 (alpha*I-H) (alpha*I+H)^-1 (alpha*I-S).
pub struct HssIterationOperator<'a> {
    h: &'a SparseMatrix,
    s: &'a SparseMatrix,
    alpha: f64,
    cap: usize,
}

impl<'a> HssIterationOperator<'a> {
    pub fn new(h: &'a SparseMatrix, s: &'a SparseMatrix, alpha: f64) -> Self {
        let cap = inner_cap(h.nrows());
        Self { h, s, alpha, cap }
    }
}

impl LinearOperator for HssIterationOperator<'_> {
    fn dim(&self) -> usize {
        self.h.nrows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        let zero = vec![0.0; dim];
        let v1 = ShiftedOperator::minus(self.s, self.alpha).apply(x);
        let h_op = ShiftedOperator::plus(self.h, self.alpha);
        let (v2, _) = cg(&h_op, &v1, &zero, OPERATOR_INNER_TOL, self.cap)
            .expect("shifted SPD solve cannot break down");
        let v3 = ShiftedOperator::minus(self.h, self.alpha).apply(&v2);
        let s_op = ShiftedOperator::plus(self.s, self.alpha);
        let (v4, _) = cgne(&s_op, &v3, &zero, OPERATOR_INNER_TOL, self.cap)
            .expect("shifted skew system is nonsingular");
        v4
    }
}

/// Error-propagation operator of one full two-parameter sweep,
/// (alpha*I+S)^-1 (alpha*I+H)^-1 (alpha^2*I + HS - (1-omega)*alpha*A).
pub struct GadiIterationOperator<'a> {
    h: &'a SparseMatrix,
    s: &'a SparseMatrix,
    a: &'a SparseMatrix,
    alpha: f64,
    omega: f64,
    cap: usize,
}

impl<'a> GadiIterationOperator<'a> {
    pub fn new(
        h: &'a SparseMatrix,
        s: &'a SparseMatrix,
        a: &'a SparseMatrix,
        alpha: f64,
        omega: f64,
    ) -> Self {
        let cap = inner_cap(h.nrows());
        Self {
            h,
            s,
            a,
            alpha,
            omega,
            cap,
        }
    }
}

impl LinearOperator for GadiIterationOperator<'_> {
    fn dim(&self) -> usize {
        self.h.nrows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        let zero = vec![0.0; dim];
        let sx = self.s.spmv(x).expect("dimensions fixed at construction");
        let hsx = self.h.spmv(&sx).expect("dimensions fixed at construction");
        let ax = self.a.spmv(x).expect("dimensions fixed at construction");
        let c = (1.0 - self.omega) * self.alpha;
        let mut w = hsx;
        for i in 0..dim {
            w[i] += self.alpha * self.alpha * x[i] - c * ax[i];
        }
        let h_op = ShiftedOperator::plus(self.h, self.alpha);
        let (u, _) = cg(&h_op, &w, &zero, OPERATOR_INNER_TOL, self.cap)
            .expect("shifted SPD solve cannot break down");
        let s_op = ShiftedOperator::plus(self.s, self.alpha);
        let (v, _) = cgne(&s_op, &u, &zero, OPERATOR_INNER_TOL, self.cap)
            .expect("shifted skew system is nonsingular");
        v
    }
}

/// Applies the HSS sweep operator once.
pub fn apply_hss_iteration(
    h: &SparseMatrix,
    s: &SparseMatrix,
    alpha: f64,
    x: &[f64],
) -> Vec<f64> {
    HssIterationOperator::new(h, s, alpha).apply(x)
}

/// Applies the full sweep operator once.
pub fn apply_gadi_iteration(
    h: &SparseMatrix,
    s: &SparseMatrix,
    a: &SparseMatrix,
    alpha: f64,
    omega: f64,
    x: &[f64],
) -> Vec<f64> {
    GadiIterationOperator::new(h, s, a, alpha, omega).apply(x)
}
