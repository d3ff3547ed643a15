//! Parameter grid search over the benchmark problems.
//!
//! Runs a chosen solver at every point of an (alpha, omega) grid, records
//! the sweep counts, and picks the converged point with the fewest sweeps
//! (ties broken toward smaller alpha, then smaller omega). Grid points are
//! independent and evaluated in parallel; results are gathered in grid
//! order, so a traversal is deterministic. Traversals over a schedule of
//! problem sizes produce the (n, alpha) training sets for the regression
//! model, stored as CSV.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadi::{drs_solve, gadi_hs_solve, hss_solve, GadiConfig};
use crate::inexact::{ihss_solve, practical_gadi_hs, InexactConfig};
use crate::problems::{conv_diff_3d, parabolic_2d, sylvester_family, LinearProblem,
    ProblemFamily, SylvesterProblem};
use crate::sylvester::gadi_ab_solve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraversalMethod {
    Hss,
    GadiHs,
    Drs,
    PracticalGadiHs,
    Ihss,
    GadiAb,
}

/// Inclusive arithmetic grid lo, lo+step, ..., up to hi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        let g = GridSpec { lo, hi, step };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "grid step must be positive, got {}",
                self.step
            )));
        }
        if !self.lo.is_finite() || !self.hi.is_finite() || self.hi < self.lo {
            return Err(Error::InvalidConfig(format!(
                "grid range [{}, {}] is empty or unbounded",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 0.5).floor() as usize;
        (0..=count)
            .map(|i| self.lo + i as f64 * self.step)
            .filter(|x| *x <= self.hi + 1e-9 * self.step)
            .collect()
    }
}

/// Shared solver configuration for every grid point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TraversalSettings {
    pub outer_rel_tol: f64,
    /// Per-point sweep cap; capped points count as non-converged.
    pub max_outer: usize,
    /// Inner tolerance exponents for the inexact methods.
    pub delta_h: u32,
    pub delta_s: u32,
    /// omega used when no omega grid is given.
    pub omega: f64,
}

impl Default for TraversalSettings {
    fn default() -> Self {
        TraversalSettings {
            outer_rel_tol: 1e-6,
            max_outer: 5000,
            delta_h: 2,
            delta_s: 2,
            omega: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub alpha: f64,
    pub omega: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraversalResult {
    pub grid: Vec<GridPoint>,
    pub best_alpha: f64,
    pub best_omega: f64,
    pub best_it: usize,
}

fn validate_grids(alpha_grid: &GridSpec, omega_grid: Option<&GridSpec>, omega: f64) -> Result<()> {
    alpha_grid.validate()?;
    if !(alpha_grid.lo > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha grid must start above zero, got {}",
            alpha_grid.lo
        )));
    }
    match omega_grid {
        Some(g) => {
            g.validate()?;
            if g.lo < 0.0 || g.hi >= 2.0 {
                return Err(Error::InvalidConfig(format!(
                    "omega grid [{}, {}] must lie within [0, 2)",
                    g.lo, g.hi
                )));
            }
        }
        None => {
            if !(0.0..2.0).contains(&omega) {
                return Err(Error::InvalidConfig(format!(
                    "fixed omega must lie in [0, 2), got {}",
                    omega
                )));
            }
        }
    }
    Ok(())
}

fn grid_pairs(alpha_grid: &GridSpec, omega_grid: Option<&GridSpec>, omega: f64) -> Vec<(f64, f64)> {
    let alphas = alpha_grid.points();
    let omegas = match omega_grid {
        Some(g) => g.points(),
        None => vec![omega],
    };
    let mut pairs = Vec::with_capacity(alphas.len() * omegas.len());
    for &a in &alphas {
        for &w in &omegas {
            pairs.push((a, w));
        }
    }
    pairs
}

/// First converged point with the minimal sweep count; grid order is
/// (alpha ascending, omega ascending), so ties resolve toward smaller
/// alpha, then smaller omega.
fn select_best(grid: &[GridPoint]) -> Option<&GridPoint> {
    grid.iter()
        .filter(|p| p.converged)
        .min_by_key(|p| p.iterations)
}

fn finish(grid: Vec<GridPoint>) -> Result<TraversalResult> {
    let best = select_best(&grid).ok_or(Error::TraversalFailed)?;
    let (best_alpha, best_omega, best_it) = (best.alpha, best.omega, best.iterations);
    Ok(TraversalResult {
        grid,
        best_alpha,
        best_omega,
        best_it,
    })
}

fn run_linear_point(
    problem: &LinearProblem,
    method: TraversalMethod,
    alpha: f64,
    omega: f64,
    st: &TraversalSettings,
) -> GridPoint {
    // the degenerate schemes pin omega regardless of the grid
    let omega = match method {
        TraversalMethod::Hss => 0.0,
        TraversalMethod::Drs => 1.0,
        _ => omega,
    };
    let outcome = match method {
        TraversalMethod::Hss | TraversalMethod::GadiHs | TraversalMethod::Drs => {
            let cfg = GadiConfig {
                alpha,
                omega,
                outer_rel_tol: st.outer_rel_tol,
                max_outer: st.max_outer,
                ..GadiConfig::default()
            };
            match method {
                TraversalMethod::Hss => hss_solve(&problem.a, &problem.b, &cfg),
                TraversalMethod::Drs => drs_solve(&problem.a, &problem.b, &cfg),
                _ => gadi_hs_solve(&problem.a, &problem.b, &cfg),
            }
        }
        TraversalMethod::PracticalGadiHs | TraversalMethod::Ihss => {
            let cfg = InexactConfig {
                alpha,
                omega,
                delta_h: st.delta_h,
                delta_s: st.delta_s,
                outer_rel_tol: st.outer_rel_tol,
                max_outer: st.max_outer,
                inner_max_iter: None,
            };
            if method == TraversalMethod::Ihss {
                ihss_solve(&problem.a, &problem.b, &cfg)
            } else {
                practical_gadi_hs(&problem.a, &problem.b, &cfg)
            }
        }
        TraversalMethod::GadiAb => Err(Error::InvalidConfig(
            "the Sylvester method needs a Sylvester instance".to_string(),
        )),
    };
    match outcome {
        Ok(rep) => GridPoint {
            alpha,
            omega: if method == TraversalMethod::Ihss { 0.0 } else { omega },
            iterations: rep.iterations,
            converged: rep.converged(),
        },
        Err(_) => GridPoint {
            alpha,
            omega,
            iterations: st.max_outer,
            converged: false,
        },
    }
}

/// Grid search over a linear-system solver.
pub fn traverse(
    problem: &LinearProblem,
    method: TraversalMethod,
    alpha_grid: GridSpec,
    omega_grid: Option<GridSpec>,
    settings: &TraversalSettings,
) -> Result<TraversalResult> {
    if method == TraversalMethod::GadiAb {
        return Err(Error::InvalidConfig(
            "the Sylvester method needs a Sylvester instance".to_string(),
        ));
    }
    validate_grids(&alpha_grid, omega_grid.as_ref(), settings.omega)?;
    let pairs = grid_pairs(&alpha_grid, omega_grid.as_ref(), settings.omega);
    let grid: Vec<GridPoint> = pairs
        .par_iter()
        .map(|&(a, w)| run_linear_point(problem, method, a, w, settings))
        .collect();
    finish(grid)
}

/// Grid search over the Sylvester alternation.
pub fn traverse_sylvester(
    problem: &SylvesterProblem,
    alpha_grid: GridSpec,
    omega_grid: Option<GridSpec>,
    settings: &TraversalSettings,
) -> Result<TraversalResult> {
    validate_grids(&alpha_grid, omega_grid.as_ref(), settings.omega)?;
    let pairs = grid_pairs(&alpha_grid, omega_grid.as_ref(), settings.omega);
    let grid: Vec<GridPoint> = pairs
        .par_iter()
        .map(|&(alpha, omega)| {
            match gadi_ab_solve(
                &problem.a,
                &problem.b,
                &problem.c,
                alpha,
                omega,
                settings.outer_rel_tol,
                settings.max_outer,
            ) {
                Ok(rep) => GridPoint {
                    alpha,
                    omega,
                    iterations: rep.iterations,
                    converged: rep.converged(),
                },
                Err(_) => GridPoint {
                    alpha,
                    omega,
                    iterations: settings.max_outer,
                    converged: false,
                },
            }
        })
        .collect();
    finish(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingPair {
    pub n: usize,
    pub alpha: f64,
}

/// Traverses each size in the schedule and records the best alpha,
/// producing the (n, alpha) training set for the regression model.
/// `r` is the dominance parameter for the Sylvester family and is ignored
/// by the linear families.
pub fn build_training_set(
    family: ProblemFamily,
    method: TraversalMethod,
    schedule: &[usize],
    r: f64,
    alpha_grid: GridSpec,
    omega_grid: Option<GridSpec>,
    settings: &TraversalSettings,
) -> Result<Vec<TrainingPair>> {
    if schedule.is_empty() {
        return Err(Error::InvalidConfig(
            "size schedule must be nonempty".to_string(),
        ));
    }
    let mut out = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let wrap = |source: Error| Error::TrainingSet {
            n,
            source: Box::new(source),
        };
        let result = match family {
            ProblemFamily::Sylvester => {
                let p = sylvester_family(n, r).map_err(wrap)?;
                traverse_sylvester(&p, alpha_grid, omega_grid, settings).map_err(wrap)?
            }
            ProblemFamily::ConvDiff3d => {
                let p = conv_diff_3d(n).map_err(wrap)?;
                traverse(&p, method, alpha_grid, omega_grid, settings).map_err(wrap)?
            }
            ProblemFamily::Parabolic2d => {
                let p = parabolic_2d(n).map_err(wrap)?;
                traverse(&p, method, alpha_grid, omega_grid, settings).map_err(wrap)?
            }
        };
        out.push(TrainingPair {
            n,
            alpha: result.best_alpha,
        });
    }
    Ok(out)
}

/// Writes `n,alpha` rows; floats in shortest round-trip form.
pub fn write_training_csv(path: &Path, pairs: &[TrainingPair]) -> Result<()> {
    let mut text = String::from("n,alpha\n");
    for p in pairs {
        writeln!(text, "{},{}", p.n, p.alpha).expect("string writes cannot fail");
    }
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_training_csv(path: &Path) -> Result<Vec<TrainingPair>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("n,alpha") => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header 'n,alpha', got {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let (n, alpha) = match (cols.next(), cols.next(), cols.next()) {
            (Some(n), Some(a), None) => (n, a),
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: expected two columns, got {:?}",
                    idx + 2,
                    line
                )))
            }
        };
        out.push(TrainingPair {
            n: n.trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {}", idx + 2, e)))?,
            alpha: alpha
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {}", idx + 2, e)))?,
        });
    }
    Ok(out)
}

/// Writes `alpha,omega,it,converged` rows for every grid point.
pub fn write_traversal_csv(path: &Path, result: &TraversalResult) -> Result<()> {
    let mut text = String::from("alpha,omega,it,converged\n");
    for p in &result.grid {
        writeln!(
            text,
            "{},{},{},{}",
            p.alpha, p.omega, p.iterations, p.converged
        )
        .expect("string writes cannot fail");
    }
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_traversal_csv(path: &Path) -> Result<Vec<GridPoint>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("alpha,omega,it,converged") => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header 'alpha,omega,it,converged', got {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(Error::Parse(format!(
                "line {}: expected four columns, got {:?}",
                idx + 2,
                line
            )));
        }
        let parse_err = |e: String| Error::Parse(format!("line {}: {}", idx + 2, e));
        out.push(GridPoint {
            alpha: cols[0].trim().parse().map_err(|e: std::num::ParseFloatError| parse_err(e.to_string()))?,
            omega: cols[1].trim().parse().map_err(|e: std::num::ParseFloatError| parse_err(e.to_string()))?,
            iterations: cols[2].trim().parse().map_err(|e: std::num::ParseIntError| parse_err(e.to_string()))?,
            converged: match cols[3].trim() {
                "true" => true,
                "false" => false,
                other => return Err(parse_err(format!("bad converged flag {:?}", other))),
            },
        });
    }
    Ok(out)
}
