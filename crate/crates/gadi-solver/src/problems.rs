//! Benchmark problem generators.
//!
//! Three families: a 3D convection-diffusion discretization (7-point
//! stencil, order n^3), a 2D parabolic discretization (order n^2), and a
//! tridiagonal continuous Sylvester family whose parameter r slides the
//! coefficient matrices between symmetric- and skew-dominated. All
//! right-hand sides are manufactured from a known exact solution.

use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemFamily {
    ConvDiff3d,
    Parabolic2d,
    Sylvester,
}

impl std::fmt::Display for ProblemFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ProblemFamily::ConvDiff3d => "convdiff3d",
            ProblemFamily::Parabolic2d => "parabolic2d",
            ProblemFamily::Sylvester => "sylvester",
        };
        write!(f, "{}", name)
    }
}

/// Generated linear system with its manufactured solution.
#[derive(Debug, Clone)]
pub struct LinearProblem {
    pub family: ProblemFamily,
    /// Size per spatial dimension; the system order is n^3 or n^2.
    pub n: usize,
    /// Discretization constant 1/(2n+2).
    pub beta: f64,
    pub a: SparseMatrix,
    pub b: Vec<f64>,
    pub x_exact: Vec<f64>,
}

/// Generated Sylvester instance AX + XB = C with known solution.
#[derive(Debug, Clone)]
pub struct SylvesterProblem {
    pub n: usize,
    pub r: f64,
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub c: DenseMatrix,
    pub x_exact: DenseMatrix,
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!(
            "problem size must be at least 2, got {}",
            n
        )));
    }
    Ok(())
}

/// 3D convection-diffusion system of order n^3:
/// A = T1 (x) I (x) I + I (x) T2 (x) I + I (x) I (x) T3 with
/// T1 = Tridiag(-1-beta, 6, -1+beta), T2 = T3 = Tridiag(-1-beta, 0, -1+beta),
/// beta = 1/(2n+2). Exact solution is the all-ones vector.
pub fn conv_diff_3d(n: usize) -> Result<LinearProblem> {
    check_size(n)?;
    let beta = 1.0 / (2.0 * n as f64 + 2.0);
    let t1 = SparseMatrix::tridiag(n, -1.0 - beta, 6.0, -1.0 + beta)?;
    let t2 = SparseMatrix::tridiag(n, -1.0 - beta, 0.0, -1.0 + beta)?;
    let eye = SparseMatrix::identity(n);

    let a = t1
        .kron(&eye)?
        .kron(&eye)?
        .add(&eye.kron(&t2)?.kron(&eye)?)?
        .add(&eye.kron(&eye)?.kron(&t2)?)?;
    let x_exact = vec![1.0; a.nrows()];
    let b = a.spmv(&x_exact)?;
    Ok(LinearProblem {
        family: ProblemFamily::ConvDiff3d,
        n,
        beta,
        a,
        b,
        x_exact,
    })
}

fn shift_up(n: usize) -> SparseMatrix {
    let trip: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    SparseMatrix::from_triplets(n, n, &trip).expect("n >= 2 checked by caller")
}

fn shift_down(n: usize) -> SparseMatrix {
    let trip: Vec<_> = (0..n - 1).map(|i| (i + 1, i, 1.0)).collect();
    SparseMatrix::from_triplets(n, n, &trip).expect("n >= 2 checked by caller")
}

/// 2D parabolic system of order n^2:
/// A = I (x) T1 + D1 (x) T2 + D2 (x) T3 with T1 = Tridiag(-1-beta, 4, -1+beta),
/// T2 = Tridiag(-1/2, -1, 1/2), T3 = Tridiag(1/2, -1, -1/2) and D1/D2 the
/// super/subdiagonal shift matrices. The exact solution samples
/// sin(pi x1) sin(pi x2) on the interior grid.
pub fn parabolic_2d(n: usize) -> Result<LinearProblem> {
    check_size(n)?;
    let beta = 1.0 / (2.0 * n as f64 + 2.0);
    let t1 = SparseMatrix::tridiag(n, -1.0 - beta, 4.0, -1.0 + beta)?;
    let t2 = SparseMatrix::tridiag(n, -0.5, -1.0, 0.5)?;
    let t3 = SparseMatrix::tridiag(n, 0.5, -1.0, -0.5)?;
    let eye = SparseMatrix::identity(n);

    let a = eye
        .kron(&t1)?
        .add(&shift_up(n).kron(&t2)?)?
        .add(&shift_down(n).kron(&t3)?)?;

    let h = 1.0 / (n as f64 + 1.0);
    let mut x_exact = vec![0.0; n * n];
    for i in 1..=n {
        for j in 1..=n {
            let u = (std::f64::consts::PI * i as f64 * h).sin()
                * (std::f64::consts::PI * j as f64 * h).sin();
            x_exact[(i - 1) * n + (j - 1)] = u;
        }
    }
    let b = a.spmv(&x_exact)?;
    Ok(LinearProblem {
        family: ProblemFamily::Parabolic2d,
        n,
        beta,
        a,
        b,
        x_exact,
    })
}

/// Sylvester family AX + XB = C with
/// A = B = Tridiag(-1,2,-1) + 2r*Tridiag(0.5,0,-0.5) + (100/(n+1)^2)*I.
/// r > 0 slides the pair from symmetric- to skew-dominated. The exact
/// solution is the all-ones matrix and C is manufactured from it.
pub fn sylvester_family(n: usize, r: f64) -> Result<SylvesterProblem> {
    check_size(n)?;
    if !(r >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "dominance parameter r must be nonnegative, got {}",
            r
        )));
    }
    let m = SparseMatrix::tridiag(n, -1.0, 2.0, -1.0)?;
    let skew = SparseMatrix::tridiag(n, 0.5, 0.0, -0.5)?;
    let shift = 100.0 / ((n as f64 + 1.0) * (n as f64 + 1.0));
    let a = m
        .linear_combination(1.0, 2.0 * r, &skew)?
        .add(&SparseMatrix::identity(n).scale(shift))?;
    let b = a.clone();
    let x_exact = DenseMatrix::ones(n, n);
    let c = a.mul_dense(&x_exact)?.add(&b.rmul_dense(&x_exact)?)?;
    Ok(SylvesterProblem {
        n,
        r,
        a,
        b,
        c,
        x_exact,
    })
}
