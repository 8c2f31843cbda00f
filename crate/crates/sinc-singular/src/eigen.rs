//! Eigendecomposition of a general real square matrix.
//!
//! Classic EISPACK path: Householder reduction to upper Hessenberg form
//! (`orthes`) followed by the Francis double-shift QR iteration with
//! eigenvector accumulation and back-substitution (`hqr2`), as in the
//! Handbook/EISPACK/JAMA lineage. Eigenvalues and eigenvectors come out
//! complex; columns are deterministically ordered and normalized so that
//! repeated runs produce identical matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::complex_inverse;

/// Result of [`eigendecompose`]: `A = X · diag(values) · X⁻¹`.
#[derive(Clone, Debug)]
pub struct Eigendecomposition {
    /// Eigenvalues sorted by ascending real part, then ascending imaginary part.
    pub values: Vec<Complex64>,
    /// Eigenvector columns, same order as `values`; each column has unit
    /// max-magnitude entry and its first significant entry is real nonnegative.
    pub vectors: DMatrix<Complex64>,
    /// Inverse of `vectors`.
    pub inverse: DMatrix<Complex64>,
}

impl Eigendecomposition {
    /// `X · diag(f(s_k)) · X⁻¹` for a scalar spectral function `f`.
    pub fn apply_spectral(&self, f: impl Fn(Complex64) -> Complex64) -> DMatrix<Complex64> {
        let n = self.values.len();
        let mut scaled = DMatrix::<Complex64>::zeros(n, n);
        for k in 0..n {
            let fk = f(self.values[k]);
            for i in 0..n {
                scaled[(i, k)] = self.vectors[(i, k)] * fk;
            }
        }
        &scaled * &self.inverse
    }

    /// Max-norm residual of the reconstruction `X·diag(s)·X⁻¹ − A`.
    pub fn reconstruction_residual(&self, a: &DMatrix<f64>) -> f64 {
        let rec = self.apply_spectral(|s| s);
        let mut res = 0.0f64;
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                res = res.max((rec[(i, j)] - Complex64::new(a[(i, j)], 0.0)).norm());
            }
        }
        res
    }

    /// Decomposition of `J·A·J` (index reversal on both sides) derived from
    /// this one: `J·A·J = (J·X)·diag(s)·(X⁻¹·J)`. Exact, so it carries this
    /// decomposition's accuracy to the flipped matrix — which matters, since
    /// a direct QR pass on the flipped matrix can be orders of magnitude
    /// less accurate. Column conventions are re-established afterwards.
    pub fn flipped(&self) -> Self {
        let n = self.values.len();
        let mut vectors = DMatrix::<Complex64>::zeros(n, n);
        let mut inverse = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                vectors[(i, j)] = self.vectors[(n - 1 - i, j)];
                inverse[(i, j)] = self.inverse[(i, n - 1 - j)];
            }
        }
        // restore the first-significant-entry phase convention per column
        for col in 0..n {
            let mut phase = Complex64::new(1.0, 0.0);
            for i in 0..n {
                let entry = vectors[(i, col)];
                if entry.norm() > 1e-12 {
                    phase = entry / entry.norm();
                    break;
                }
            }
            let inv_phase = phase.conj();
            for i in 0..n {
                vectors[(i, col)] *= inv_phase;
                inverse[(col, i)] *= phase;
            }
        }
        Self {
            values: self.values.clone(),
            vectors,
            inverse,
        }
    }
}

/// Relative reconstruction residual above which the decomposition is rejected.
pub const RECONSTRUCTION_RTOL: f64 = 1e-8;

/// Decompose a general real square matrix as `X · diag(s) · X⁻¹`.
///
/// Fails with [`Error::DecompositionFailure`] when the QR iteration does not
/// converge or the reconstruction residual exceeds `1e−8` relative — the
/// symptom of a defective or too badly conditioned eigenbasis.
pub fn eigendecompose(a: &DMatrix<f64>) -> Result<Eigendecomposition> {
    let decomp = eigendecompose_unchecked(a)?;
    let anorm = a.amax();
    let residual = decomp.reconstruction_residual(a);
    if residual > RECONSTRUCTION_RTOL * anorm.max(f64::MIN_POSITIVE) {
        return Err(Error::DecompositionFailure(format!(
            "reconstruction residual {residual:.3e} exceeds {RECONSTRUCTION_RTOL:.1e} * {anorm:.3e}"
        )));
    }
    Ok(decomp)
}

/// [`eigendecompose`] without the reconstruction gate, for diagnostics.
pub fn eigendecompose_unchecked(a: &DMatrix<f64>) -> Result<Eigendecomposition> {
    let n = a.nrows();
    if n != a.ncols() || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "expected a nonempty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }

    let mut h = a.clone();
    let scale = balance(&mut h);
    let mut v = DMatrix::<f64>::zeros(n, n);
    orthes(&mut h, &mut v);
    let mut wr = vec![0.0f64; n];
    let mut wi = vec![0.0f64; n];
    hqr2(&mut h, &mut v, &mut wr, &mut wi)?;
    // undo the balancing similarity on the eigenvectors
    for i in 0..n {
        for j in 0..n {
            v[(i, j)] *= scale[i];
        }
    }

    // Unpack the real-packed eigenvectors into complex columns.
    let mut values = Vec::with_capacity(n);
    let mut x = DMatrix::<Complex64>::zeros(n, n);
    let mut j = 0usize;
    while j < n {
        if wi[j] == 0.0 {
            values.push(Complex64::new(wr[j], 0.0));
            for i in 0..n {
                x[(i, j)] = Complex64::new(v[(i, j)], 0.0);
            }
            j += 1;
        } else {
            // conjugate pair: columns j, j+1 hold (Re, Im) of the vector for
            // the eigenvalue with positive imaginary part
            values.push(Complex64::new(wr[j], wi[j]));
            values.push(Complex64::new(wr[j + 1], wi[j + 1]));
            for i in 0..n {
                let re = v[(i, j)];
                let im = v[(i, j + 1)];
                x[(i, j)] = Complex64::new(re, im);
                x[(i, j + 1)] = Complex64::new(re, -im);
            }
            j += 2;
        }
    }

    // Deterministic order: ascending real part, then ascending imaginary part.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| {
        values[p]
            .re
            .total_cmp(&values[q].re)
            .then(values[p].im.total_cmp(&values[q].im))
    });
    let sorted_values: Vec<Complex64> = order.iter().map(|&k| values[k]).collect();
    let mut sorted_x = DMatrix::<Complex64>::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            sorted_x[(i, col)] = x[(i, k)];
        }
    }

    // Deterministic scaling: unit max-magnitude entry, first significant
    // entry rotated onto the nonnegative real axis. Diagonal rescaling of X
    // leaves X·diag(s)·X⁻¹ unchanged.
    for col in 0..n {
        let mut maxmod = 0.0f64;
        for i in 0..n {
            maxmod = maxmod.max(sorted_x[(i, col)].norm());
        }
        if maxmod == 0.0 {
            return Err(Error::DecompositionFailure(format!(
                "zero eigenvector in column {col}"
            )));
        }
        let mut phase = Complex64::new(1.0, 0.0);
        for i in 0..n {
            let entry = sorted_x[(i, col)] / maxmod;
            if entry.norm() > 1e-12 {
                phase = entry / entry.norm();
                break;
            }
        }
        let scale = phase.conj() / maxmod;
        for i in 0..n {
            sorted_x[(i, col)] *= scale;
        }
    }

    let inverse = complex_inverse(&sorted_x).map_err(|e| {
        Error::DecompositionFailure(format!("eigenvector matrix is numerically singular: {e}"))
    })?;

    Ok(Eigendecomposition {
        values: sorted_values,
        vectors: sorted_x,
        inverse,
    })
}

/// Parlett–Reinsch balancing (Algol `balanc`, scaling phase): a diagonal
/// similarity with powers of two that equalizes row and column norms.
/// Essential here — the integration matrices carry diagonal weight factors
/// spanning many orders of magnitude, and the QR iteration loses most of its
/// accuracy on the unbalanced form.
fn balance(a: &mut DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut scale = vec![1.0f64; n];
    let radix: f64 = 2.0;
    let sq = radix * radix;
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let mut cc = c;
            let s = c + r;
            let mut g = r / radix;
            while cc < g {
                f *= radix;
                cc *= sq;
            }
            g = r * radix;
            while cc >= g {
                f /= radix;
                cc /= sq;
            }
            if (cc + r) / f < 0.95 * s {
                converged = false;
                scale[i] *= f;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= inv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
    scale
}

/// Householder reduction of `h` to upper Hessenberg form, accumulating the
/// orthogonal transformation into `v` (Algol `orthes`/`ortran`).
fn orthes(h: &mut DMatrix<f64>, v: &mut DMatrix<f64>) {
    let n = h.nrows();
    let low = 0usize;
    let high = n - 1;
    let mut ort = vec![0.0f64; n];

    if high >= 1 {
        for m in low + 1..high {
            let mut scale = 0.0;
            for i in m..=high {
                scale += h[(i, m - 1)].abs();
            }
            if scale != 0.0 {
                let mut hsum = 0.0;
                for i in (m..=high).rev() {
                    ort[i] = h[(i, m - 1)] / scale;
                    hsum += ort[i] * ort[i];
                }
                let mut g = hsum.sqrt();
                if ort[m] > 0.0 {
                    g = -g;
                }
                hsum -= ort[m] * g;
                ort[m] -= g;

                for j in m..n {
                    let mut f = 0.0;
                    for i in (m..=high).rev() {
                        f += ort[i] * h[(i, j)];
                    }
                    f /= hsum;
                    for i in m..=high {
                        let s = f * ort[i];
                        h[(i, j)] -= s;
                    }
                }
                for i in 0..=high {
                    let mut f = 0.0;
                    for j in (m..=high).rev() {
                        f += ort[j] * h[(i, j)];
                    }
                    f /= hsum;
                    for j in m..=high {
                        let s = f * ort[j];
                        h[(i, j)] -= s;
                    }
                }
                ort[m] *= scale;
                h[(m, m - 1)] = scale * g;
            }
        }
    }

    v.fill_with_identity();
    if high >= 2 {
        for m in (low + 1..=high - 1).rev() {
            if h[(m, m - 1)] != 0.0 {
                for (i, o) in ort.iter_mut().enumerate().take(high + 1).skip(m + 1) {
                    *o = h[(i, m - 1)];
                }
                for j in m..=high {
                    let mut g = 0.0;
                    for i in m..=high {
                        g += ort[i] * v[(i, j)];
                    }
                    // double division avoids possible underflow
                    g = (g / ort[m]) / h[(m, m - 1)];
                    for i in m..=high {
                        let s = g * ort[i];
                        v[(i, j)] += s;
                    }
                }
            }
        }
    }
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix with eigenvector
/// accumulation and back-substitution (Algol `hqr2`). On return `wr`/`wi`
/// hold the eigenvalues and the columns of `v` the real-packed eigenvectors.
#[allow(clippy::needless_range_loop)]
fn hqr2(h: &mut DMatrix<f64>, v: &mut DMatrix<f64>, wr: &mut [f64], wi: &mut [f64]) -> Result<()> {
    let nn = h.nrows() as i64;
    let mut n = nn - 1;
    let low: i64 = 0;
    let high: i64 = nn - 1;
    let eps = 2.0f64.powi(-52);
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut t, mut w, mut x, mut y): (f64, f64, f64, f64);

    let at = |h: &DMatrix<f64>, i: i64, j: i64| h[(i as usize, j as usize)];

    let mut norm = 0.0f64;
    for i in 0..nn {
        for j in (i - 1).max(0)..nn {
            norm += at(h, i, j).abs();
        }
    }

    let mut iter = 0i32;
    let mut total_iter = 0i64;
    let iter_budget = 50 * nn.max(10);

    while n >= low {
        // look for a single small sub-diagonal element
        let mut l = n;
        while l > low {
            s = at(h, l - 1, l - 1).abs() + at(h, l, l).abs();
            if s == 0.0 {
                s = norm;
            }
            if at(h, l, l - 1).abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // one root found
            h[(n as usize, n as usize)] += exshift;
            wr[n as usize] = at(h, n, n);
            wi[n as usize] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // two roots found
            w = at(h, n, n - 1) * at(h, n - 1, n);
            p = (at(h, n - 1, n - 1) - at(h, n, n)) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[(n as usize, n as usize)] += exshift;
            h[((n - 1) as usize, (n - 1) as usize)] += exshift;
            x = at(h, n, n);

            if q >= 0.0 {
                // real pair
                z = if p >= 0.0 { p + z } else { p - z };
                wr[(n - 1) as usize] = x + z;
                wr[n as usize] = wr[(n - 1) as usize];
                if z != 0.0 {
                    wr[n as usize] = x - w / z;
                }
                wi[(n - 1) as usize] = 0.0;
                wi[n as usize] = 0.0;
                x = at(h, n, n - 1);
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;

                for j in n - 1..nn {
                    z = at(h, n - 1, j);
                    h[((n - 1) as usize, j as usize)] = q * z + p * at(h, n, j);
                    h[(n as usize, j as usize)] = q * at(h, n, j) - p * z;
                }
                for i in 0..=n {
                    z = at(h, i, n - 1);
                    h[(i as usize, (n - 1) as usize)] = q * z + p * at(h, i, n);
                    h[(i as usize, n as usize)] = q * at(h, i, n) - p * z;
                }
                for i in low..=high {
                    z = v[(i as usize, (n - 1) as usize)];
                    v[(i as usize, (n - 1) as usize)] = q * z + p * v[(i as usize, n as usize)];
                    v[(i as usize, n as usize)] = q * v[(i as usize, n as usize)] - p * z;
                }
            } else {
                // complex pair
                wr[(n - 1) as usize] = x + p;
                wr[n as usize] = x + p;
                wi[(n - 1) as usize] = z;
                wi[n as usize] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // no convergence yet: form shift
            x = at(h, n, n);
            y = 0.0;
            w = 0.0;
            if l < n {
                y = at(h, n - 1, n - 1);
                w = at(h, n, n - 1) * at(h, n - 1, n);
            }

            // Wilkinson's original ad hoc shift
            if iter == 10 {
                exshift += x;
                for i in low..=n {
                    h[(i as usize, i as usize)] -= x;
                }
                s = at(h, n, n - 1).abs() + at(h, n - 1, n - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }

            // MATLAB's new ad hoc shift
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=n {
                        h[(i as usize, i as usize)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            total_iter += 1;
            if total_iter > iter_budget {
                return Err(Error::DecompositionFailure(format!(
                    "QR iteration did not converge within {iter_budget} sweeps"
                )));
            }

            // look for two consecutive small sub-diagonal elements
            let mut m = n - 2;
            while m >= l {
                z = at(h, m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / at(h, m + 1, m) + at(h, m, m + 1);
                q = at(h, m + 1, m + 1) - z - r - s;
                r = at(h, m + 2, m + 1);
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if at(h, m, m - 1).abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs()
                            * (at(h, m - 1, m - 1).abs() + z.abs() + at(h, m + 1, m + 1).abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in m + 2..=n {
                h[(i as usize, (i - 2) as usize)] = 0.0;
                if i > m + 2 {
                    h[(i as usize, (i - 3) as usize)] = 0.0;
                }
            }

            // double QR step on rows l..=n and columns m..=n
            for k in m..=n - 1 {
                let notlast = k != n - 1;
                if k != m {
                    p = at(h, k, k - 1);
                    q = at(h, k + 1, k - 1);
                    r = if notlast { at(h, k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[(k as usize, (k - 1) as usize)] = -s * x;
                    } else if l != m {
                        h[(k as usize, (k - 1) as usize)] = -at(h, k, k - 1);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = at(h, k, j) + q * at(h, k + 1, j);
                        if notlast {
                            p += r * at(h, k + 2, j);
                            h[((k + 2) as usize, j as usize)] -= p * z;
                        }
                        h[(k as usize, j as usize)] -= p * x;
                        h[((k + 1) as usize, j as usize)] -= p * y;
                    }
                    for i in 0..=n.min(k + 3) {
                        p = x * at(h, i, k) + y * at(h, i, k + 1);
                        if notlast {
                            p += z * at(h, i, k + 2);
                            h[(i as usize, (k + 2) as usize)] -= p * r;
                        }
                        h[(i as usize, k as usize)] -= p;
                        h[(i as usize, (k + 1) as usize)] -= p * q;
                    }
                    for i in low..=high {
                        p = x * v[(i as usize, k as usize)] + y * v[(i as usize, (k + 1) as usize)];
                        if notlast {
                            p += z * v[(i as usize, (k + 2) as usize)];
                            v[(i as usize, (k + 2) as usize)] -= p * r;
                        }
                        v[(i as usize, k as usize)] -= p;
                        v[(i as usize, (k + 1) as usize)] -= p * q;
                    }
                }
            }
        }
    }

    // back-substitution: eigenvectors of the triangular form
    if norm == 0.0 {
        return Ok(());
    }
    for n in (0..nn).rev() {
        p = wr[n as usize];
        q = wi[n as usize];

        if q == 0.0 {
            // real vector
            let mut l = n;
            h[(n as usize, n as usize)] = 1.0;
            for i in (0..n).rev() {
                w = at(h, i, i) - p;
                r = 0.0;
                for j in l..=n {
                    r += at(h, i, j) * at(h, j, n);
                }
                if wi[i as usize] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if wi[i as usize] == 0.0 {
                        if w != 0.0 {
                            h[(i as usize, n as usize)] = -r / w;
                        } else {
                            h[(i as usize, n as usize)] = -r / (eps * norm);
                        }
                    } else {
                        // solve the real 2x2 block
                        x = at(h, i, i + 1);
                        y = at(h, i + 1, i);
                        q = (wr[i as usize] - p) * (wr[i as usize] - p)
                            + wi[i as usize] * wi[i as usize];
                        t = (x * s - z * r) / q;
                        h[(i as usize, n as usize)] = t;
                        if x.abs() > z.abs() {
                            h[((i + 1) as usize, n as usize)] = (-r - w * t) / x;
                        } else {
                            h[((i + 1) as usize, n as usize)] = (-s - y * t) / z;
                        }
                    }

                    // overflow control
                    t = at(h, i, n).abs();
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            h[(j as usize, n as usize)] /= t;
                        }
                    }
                }
            }
        } else if q < 0.0 {
            // complex vector (paired columns n-1, n)
            let mut l = n - 1;

            // last vector component imaginary, so the matrix is triangular
            if at(h, n, n - 1).abs() > at(h, n - 1, n).abs() {
                h[((n - 1) as usize, (n - 1) as usize)] = q / at(h, n, n - 1);
                h[((n - 1) as usize, n as usize)] = -(at(h, n, n) - p) / at(h, n, n - 1);
            } else {
                let (re, im) = cdiv(0.0, -at(h, n - 1, n), at(h, n - 1, n - 1) - p, q);
                h[((n - 1) as usize, (n - 1) as usize)] = re;
                h[((n - 1) as usize, n as usize)] = im;
            }
            h[(n as usize, (n - 1) as usize)] = 0.0;
            h[(n as usize, n as usize)] = 1.0;
            for i in (0..n - 1).rev() {
                let mut ra = 0.0;
                let mut sa = 0.0;
                for j in l..=n {
                    ra += at(h, i, j) * at(h, j, n - 1);
                    sa += at(h, i, j) * at(h, j, n);
                }
                w = at(h, i, i) - p;

                if wi[i as usize] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if wi[i as usize] == 0.0 {
                        let (re, im) = cdiv(-ra, -sa, w, q);
                        h[(i as usize, (n - 1) as usize)] = re;
                        h[(i as usize, n as usize)] = im;
                    } else {
                        // solve the complex 2x2 block
                        x = at(h, i, i + 1);
                        y = at(h, i + 1, i);
                        let mut vr = (wr[i as usize] - p) * (wr[i as usize] - p)
                            + wi[i as usize] * wi[i as usize]
                            - q * q;
                        let vi = (wr[i as usize] - p) * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = eps * norm * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (re, im) =
                            cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        h[(i as usize, (n - 1) as usize)] = re;
                        h[(i as usize, n as usize)] = im;
                        if x.abs() > z.abs() + q.abs() {
                            h[((i + 1) as usize, (n - 1) as usize)] =
                                (-ra - w * at(h, i, n - 1) + q * at(h, i, n)) / x;
                            h[((i + 1) as usize, n as usize)] =
                                (-sa - w * at(h, i, n) - q * at(h, i, n - 1)) / x;
                        } else {
                            let (re, im) =
                                cdiv(-r - y * at(h, i, n - 1), -s - y * at(h, i, n), z, q);
                            h[((i + 1) as usize, (n - 1) as usize)] = re;
                            h[((i + 1) as usize, n as usize)] = im;
                        }
                    }

                    // overflow control
                    t = at(h, i, n - 1).abs().max(at(h, i, n).abs());
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            h[(j as usize, (n - 1) as usize)] /= t;
                            h[(j as usize, n as usize)] /= t;
                        }
                    }
                }
            }
        }
    }

    // back-transformation to eigenvectors of the original matrix
    for j in (low..nn).rev() {
        for i in low..=high {
            z = 0.0;
            for k in low..=j.min(high) {
                z += v[(i as usize, k as usize)] * at(h, k, j);
            }
            v[(i as usize, j as usize)] = z;
        }
    }

    Ok(())
}
