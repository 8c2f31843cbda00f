//! Dense LU factorization with row pivoting, over the reals and over the
//! complex field.
//!
//! A pivot whose magnitude falls below `1e−14 · ‖A‖_max` is declared
//! singular; this is the singularity rule the Newton solver and the
//! eigenvector inversion both rely on.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative pivot threshold below which a matrix is declared singular.
pub const PIVOT_RTOL: f64 = 1e-14;

/// Solve `A·x = b` by row-pivoted Gaussian elimination.
pub fn lu_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let mut lu = RealLu::factor(a)?;
    Ok(lu.solve_in_place(b.clone()))
}

/// Row-pivoted LU factors of a real square matrix.
pub struct RealLu {
    lu: DMatrix<f64>,
    perm: Vec<usize>,
}

impl RealLu {
    pub fn factor(a: &DMatrix<f64>) -> Result<Self> {
        let n = square_dim(a.nrows(), a.ncols())?;
        let mut lu = a.clone();
        let norm = lu.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let threshold = PIVOT_RTOL * norm;
        let mut perm = Vec::with_capacity(n);
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].abs();
            for i in k + 1..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= threshold {
                return Err(Error::SingularJacobian { step: k, pivot: best });
            }
            if p != k {
                lu.swap_rows(p, k);
            }
            perm.push(p);
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in k + 1..n {
                    let sub = factor * lu[(k, j)];
                    lu[(i, j)] -= sub;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&mut self, b: &DVector<f64>) -> DVector<f64> {
        self.solve_in_place(b.clone())
    }

    fn solve_in_place(&mut self, mut x: DVector<f64>) -> DVector<f64> {
        let n = self.perm.len();
        for k in 0..n {
            x.swap_rows(k, self.perm[k]);
        }
        for k in 0..n {
            for i in k + 1..n {
                let s = self.lu[(i, k)] * x[k];
                x[i] -= s;
            }
        }
        for k in (0..n).rev() {
            for j in k + 1..n {
                let s = self.lu[(k, j)] * x[j];
                x[k] -= s;
            }
            x[k] /= self.lu[(k, k)];
        }
        x
    }
}

/// Invert a complex square matrix: row-pivoted LU, triangular solves per
/// column, then Newton–Schulz refinement. The refinement matters for the
/// badly conditioned eigenvector matrices of large sinc integration
/// operators, where a single solve pass leaves `‖X·X⁻¹ − I‖` far from
/// roundoff; each refinement step squares that residual.
pub fn complex_inverse(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = square_dim(a.nrows(), a.ncols())?;
    let mut lu = a.clone();
    let norm = lu.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let threshold = PIVOT_RTOL * norm;
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    for k in 0..n {
        let mut p = k;
        let mut best = lu[(k, k)].norm();
        for i in k + 1..n {
            let v = lu[(i, k)].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= threshold {
            return Err(Error::SingularJacobian { step: k, pivot: best });
        }
        if p != k {
            lu.swap_rows(p, k);
        }
        perm.push(p);
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            for j in k + 1..n {
                let s = factor * lu[(k, j)];
                lu[(i, j)] -= s;
            }
        }
    }

    let mut inv = DMatrix::<Complex64>::identity(n, n);
    for col in 0..n {
        let mut x: Vec<Complex64> = (0..n).map(|i| inv[(i, col)]).collect();
        for k in 0..n {
            x.swap(k, perm[k]);
        }
        for k in 0..n {
            for i in k + 1..n {
                let s = lu[(i, k)] * x[k];
                x[i] -= s;
            }
        }
        for k in (0..n).rev() {
            for j in k + 1..n {
                let s = lu[(k, j)] * x[j];
                x[k] -= s;
            }
            x[k] /= lu[(k, k)];
        }
        for (i, v) in x.into_iter().enumerate() {
            inv[(i, col)] = v;
        }
    }

    // Newton–Schulz: inv <- inv + inv(I − a·inv) while it helps
    let residual_norm = |m: &DMatrix<Complex64>| -> f64 {
        let mut r = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                r = r.max((m[(i, j)] - want).norm());
            }
        }
        r
    };
    let mut res = residual_norm(&(a * &inv));
    for _ in 0..4 {
        if res <= 64.0 * n as f64 * f64::EPSILON {
            break;
        }
        let correction = &inv - &inv * (a * &inv);
        let refined = &inv + correction;
        let refined_res = residual_norm(&(a * &refined));
        if refined_res >= res {
            break;
        }
        inv = refined;
        res = refined_res;
    }
    Ok(inv)
}

fn square_dim(nrows: usize, ncols: usize) -> Result<usize> {
    if nrows != ncols || nrows == 0 {
        return Err(Error::InvalidParameter(format!(
            "expected a nonempty square matrix, got {nrows}x{ncols}"
        )));
    }
    Ok(nrows)
}
