//! Sinc-convolution scheme: one-sided weakly singular convolutions
//! approximated through the Toeplitz indefinite-integration matrices and the
//! Laplace-type transform of the singular factor.
//!
//! With `I⁻¹ = [e_{i−j}]`, `A⁽¹⁾ = h·I⁻¹·D` and `A⁽²⁾ = h·(I⁻¹)ᵀ·D`
//! (`D` the diagonal of SE quadrature weights), the operators
//! `p(t) = ∫_a^t (t−s)^{−λ} v(s) ds` and `q(t) = ∫_t^b (s−t)^{−λ} v(s) ds`
//! evaluate at the interior sinc points as `B⁽¹⁾·V_N v` and `B⁽²⁾·V_N v`,
//! where `B⁽ⁱ⁾ = Re(X diag(F(s_k)) X⁻¹)` applies `F(s) = Γ(1−λ)·s^{1−λ}`
//! to the spectrum of `A⁽ⁱ⁾`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::eigen::{eigendecompose, Eigendecomposition};
use crate::error::{Error, Result};
use crate::interp::OmegaExpansion;
use crate::newton::{newton_solve, NewtonConfig, SolveReport};
use crate::problem::WeaklySingularProblem;
use crate::sinc::SincGrid;
use crate::special::{complex_principal_power, gamma_real, sigma_e};

/// Relative bound on the imaginary residue of the spectrally assembled
/// `B` matrices (they are real in exact arithmetic since `A` is real).
pub const IMAG_RESIDUE_RTOL: f64 = 1e-8;

/// Toeplitz indefinite-integration generator `[e_{i−j}]`, size `(2N+1)²`.
pub fn build_im1(n: usize) -> DMatrix<f64> {
    let size = 2 * n + 1;
    let mut e = Vec::with_capacity(2 * size - 1);
    for k in -(size as i64 - 1)..=(size as i64 - 1) {
        e.push(sigma_e(k).1);
    }
    DMatrix::from_fn(size, size, |i, j| e[(i as i64 - j as i64 + size as i64 - 1) as usize])
}

/// The pair `A⁽¹⁾ = h·I⁻¹·D`, `A⁽²⁾ = h·(I⁻¹)ᵀ·D` with
/// `D = diag((t_j−a)(b−t_j)/(b−a))` over the interior sinc points.
pub fn build_a_matrices(grid: &SincGrid) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = grid.n();
    let ni = n as i64;
    let im1 = build_im1(n);
    let iv = grid.interval();
    let weights: Vec<f64> =
        (-ni..=ni).map(|j| iv.length() * grid.sigma(j) * grid.sigma_complement(j)).collect();
    let size = 2 * n + 1;
    let mut a1 = im1.clone();
    let mut a2 = im1.transpose();
    for c in 0..size {
        let w = grid.h() * weights[c];
        for r in 0..size {
            a1[(r, c)] *= w;
            a2[(r, c)] *= w;
        }
    }
    (a1, a2)
}

/// Laplace-type transform of the singular factor: `F(s) = Γ(1−λ)·s^{1−λ}`
/// on the open right half-plane.
pub fn laplace_f(lambda: f64, s: Complex64) -> Result<Complex64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "singularity exponent must lie in (0,1), got {lambda}"
        )));
    }
    Ok(gamma_real(1.0 - lambda)? * complex_principal_power(s, 1.0 - lambda)?)
}

/// Real matrix `Re(X · diag(F(s_k)) · X⁻¹)` applying the transform to a
/// decomposed integration matrix. Errors if any eigenvalue leaves the right
/// half-plane or the imaginary residue is not roundoff-small.
pub fn build_b(eig: &Eigendecomposition, lambda: f64) -> Result<DMatrix<f64>> {
    for s in &eig.values {
        if !(s.re > 0.0) {
            return Err(Error::Domain(format!(
                "eigenvalue {s} outside the right half-plane; F(s) undefined"
            )));
        }
    }
    let gamma = gamma_real(1.0 - lambda)?;
    let complex_b =
        eig.apply_spectral(|s| gamma * complex_principal_power(s, 1.0 - lambda).expect("checked"));
    let mut max_re = 0.0f64;
    let mut max_im = 0.0f64;
    for v in complex_b.iter() {
        max_re = max_re.max(v.re.abs());
        max_im = max_im.max(v.im.abs());
    }
    if max_im > IMAG_RESIDUE_RTOL * max_re.max(f64::MIN_POSITIVE) {
        return Err(Error::ResidueError {
            residue: max_im,
            threshold: IMAG_RESIDUE_RTOL * max_re,
        });
    }
    Ok(complex_b.map(|v| v.re))
}

/// Everything the convolution scheme precomputes for one `(interval, λ, N)`:
/// the integration matrices, their eigendecompositions, and the transformed
/// matrices `B⁽¹⁾`, `B⁽²⁾`.
pub struct ConvolutionOperatorData {
    grid: SincGrid,
    im1: DMatrix<f64>,
    a1: DMatrix<f64>,
    a2: DMatrix<f64>,
    eig1: Eigendecomposition,
    eig2: Eigendecomposition,
    b1: DMatrix<f64>,
    b2: DMatrix<f64>,
    /// `B⁽¹⁾ + B⁽²⁾`, the matrix the solver actually applies.
    b_total: DMatrix<f64>,
}

impl ConvolutionOperatorData {
    pub fn new(grid: &SincGrid, lambda: f64) -> Result<Self> {
        let im1 = build_im1(grid.n());
        let (a1, a2) = build_a_matrices(grid);
        let eig1 = eigendecompose(&a1)?;
        // A2 = J·A1·J exactly (Toeplitz transpose + symmetric weights), so
        // its decomposition is the flip of A1's. A direct QR pass on A2
        // loses up to two orders of magnitude of reconstruction accuracy on
        // large grids; the flipped basis keeps A1's quality. Verified
        // against A2 itself below.
        let eig2 = eig1.flipped();
        let res2 = eig2.reconstruction_residual(&a2);
        if res2 > crate::eigen::RECONSTRUCTION_RTOL * a2.amax().max(f64::MIN_POSITIVE) {
            return Err(Error::DecompositionFailure(format!(
                "flipped A2 reconstruction residual {res2:.3e} too large"
            )));
        }
        let b1 = build_b(&eig1, lambda)?;
        let b2 = build_b(&eig2, lambda)?;
        let b_total = &b1 + &b2;
        Ok(Self {
            grid: grid.clone(),
            im1,
            a1,
            a2,
            eig1,
            eig2,
            b1,
            b2,
            b_total,
        })
    }

    pub fn grid(&self) -> &SincGrid {
        &self.grid
    }

    pub fn im1(&self) -> &DMatrix<f64> {
        &self.im1
    }

    pub fn a1(&self) -> &DMatrix<f64> {
        &self.a1
    }

    pub fn a2(&self) -> &DMatrix<f64> {
        &self.a2
    }

    pub fn eig1(&self) -> &Eigendecomposition {
        &self.eig1
    }

    pub fn eig2(&self) -> &Eigendecomposition {
        &self.eig2
    }

    pub fn b1(&self) -> &DMatrix<f64> {
        &self.b1
    }

    pub fn b2(&self) -> &DMatrix<f64> {
        &self.b2
    }

    /// Unknown count, `2N+1`.
    pub fn size(&self) -> usize {
        2 * self.grid.n() + 1
    }

    /// Interior sinc point `z_j` by vector offset.
    fn point(&self, offset: usize) -> f64 {
        self.grid.interior_points()[offset]
    }
}

/// Converged convolution solve.
#[derive(Clone, Debug)]
pub struct ConvolutionSolution {
    pub expansion: OmegaExpansion,
    pub report: SolveReport,
}

/// Residual of the nodal system: component `j` is
/// `c_j − Σ_l (B⁽¹⁾+B⁽²⁾)_{jl}·kernel(z_j, z_l, c_l) − g(z_j)`.
///
/// The kernel vector depends on the row through its first argument.
pub fn residual_conv(
    p: &WeaklySingularProblem,
    data: &ConvolutionOperatorData,
    c: &DVector<f64>,
) -> DVector<f64> {
    let size = data.size();
    debug_assert_eq!(c.len(), size);
    let mut r = DVector::zeros(size);
    for j in 0..size {
        let zj = data.point(j);
        let mut acc = 0.0;
        for l in 0..size {
            acc += data.b_total[(j, l)] * p.kernel(zj, data.point(l), c[l]);
        }
        r[j] = c[j] - acc - p.rhs(zj);
    }
    r
}

/// Analytic Jacobian of [`residual_conv`]:
/// `δ_{jl} − (B⁽¹⁾+B⁽²⁾)_{jl}·kernel_du(z_j, z_l, c_l)`.
pub fn jacobian_conv(
    p: &WeaklySingularProblem,
    data: &ConvolutionOperatorData,
    c: &DVector<f64>,
) -> DMatrix<f64> {
    let size = data.size();
    let mut jac = DMatrix::zeros(size, size);
    for j in 0..size {
        let zj = data.point(j);
        for l in 0..size {
            jac[(j, l)] = -data.b_total[(j, l)] * p.kernel_du(zj, data.point(l), c[l]);
        }
        jac[(j, j)] += 1.0;
    }
    jac
}

/// Build the operator data and solve the nodal system; the coefficients feed
/// an [`OmegaExpansion`] for evaluation between nodes.
pub fn solve_convolution(
    p: &WeaklySingularProblem,
    n: usize,
    alpha: f64,
    d: f64,
    cfg: &NewtonConfig,
    initial: Option<&(dyn Fn(f64) -> f64)>,
) -> Result<ConvolutionSolution> {
    let grid = SincGrid::new(p.interval(), n, alpha, d)?;
    let data = ConvolutionOperatorData::new(&grid, p.lambda())?;
    let size = data.size();
    let c0 = match initial {
        Some(u0) => DVector::from_fn(size, |j, _| u0(data.point(j))),
        None => DVector::from_fn(size, |j, _| p.rhs(data.point(j))),
    };
    let f = |c: &DVector<f64>| residual_conv(p, &data, c);
    let jac = |c: &DVector<f64>| jacobian_conv(p, &data, c);
    let (c, report) = newton_solve(&f, &jac, &c0, cfg)?;
    let expansion = OmegaExpansion::from_coeffs(grid, c.iter().copied().collect())?;
    Ok(ConvolutionSolution { expansion, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sinc::Interval;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn iv01() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn grid01(n: usize, alpha: f64) -> SincGrid {
        SincGrid::new(iv01(), n, alpha, 3.14).unwrap()
    }

    #[test]
    fn im1_small_matrix_entries() {
        let m = build_im1(1);
        assert_eq!(m.nrows(), 3);
        for i in 0..3 {
            assert_abs_diff_eq!(m[(i, i)], 0.5, epsilon = 1e-15);
        }
        // e_1 below the diagonal, e_{-1} above
        assert_abs_diff_eq!(m[(1, 0)], 1.089489872236083635, epsilon = 1e-13);
        assert_abs_diff_eq!(m[(0, 1)], -0.089489872236083635, epsilon = 1e-13);
    }

    #[test]
    fn im1_plus_transpose_is_ones() {
        let m = build_im1(6);
        let s = &m + m.transpose();
        for v in s.iter() {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn im1_is_toeplitz() {
        let m = build_im1(5);
        for i in 1..11 {
            for j in 1..11 {
                assert_eq!(m[(i, j)], m[(i - 1, j - 1)]);
            }
        }
    }

    #[test]
    fn a1_integrates_constants() {
        // A1·1 ≈ t_j − a, A2·1 ≈ b − t_j
        for (n, tol) in [(30usize, 1e-4), (60, 1e-6)] {
            let grid = grid01(n, 1.0);
            let (a1, a2) = build_a_matrices(&grid);
            let ones = DVector::from_element(2 * n + 1, 1.0);
            let left = &a1 * &ones;
            let right = &a2 * &ones;
            let mut worst = 0.0f64;
            for (off, &t) in grid.interior_points().iter().enumerate() {
                worst = worst.max((left[off] - t).abs());
                worst = worst.max((right[off] - (1.0 - t)).abs());
            }
            assert!(worst <= tol, "N={n}: worst {worst} > {tol}");
        }
    }

    #[test]
    fn a_matrices_spectra_in_right_half_plane() {
        for &n in &[5usize, 10, 20] {
            let grid = grid01(n, 0.5);
            let (a1, a2) = build_a_matrices(&grid);
            for (name, a) in [("A1", &a1), ("A2", &a2)] {
                let eig = eigendecompose(a).unwrap();
                for s in &eig.values {
                    assert!(s.re > 0.0, "{name} N={n}: eigenvalue {s} not in right half-plane");
                }
            }
        }
    }

    #[test]
    fn laplace_f_values() {
        let v = laplace_f(0.5, Complex64::new(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v.re, 1.772453850905516027, epsilon = 1e-13);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        let v = laplace_f(0.5, Complex64::new(4.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v.re, 3.544907701811032055, epsilon = 1e-13);
        // frozen: Gamma(0.75)·(1+i)^{0.75}
        let v = laplace_f(0.25, Complex64::new(1.0, 1.0)).unwrap();
        assert_abs_diff_eq!(v.re, 1.321345608163876400, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.882894908683586596, epsilon = 1e-12);
        assert!(laplace_f(0.5, Complex64::new(-1.0, 0.0)).is_err());
    }

    #[test]
    fn build_b_diagonal_cases() {
        let eye = eigendecompose(&DMatrix::identity(3, 3)).unwrap();
        let b = build_b(&eye, 0.5).unwrap();
        let sqrt_pi = core::f64::consts::PI.sqrt();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { sqrt_pi } else { 0.0 };
                assert_abs_diff_eq!(b[(i, j)], want, epsilon = 1e-10);
            }
        }
        let diag =
            eigendecompose(&DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0]))).unwrap();
        let b = build_b(&diag, 0.5).unwrap();
        assert_abs_diff_eq!(b[(0, 0)], sqrt_pi, epsilon = 1e-10);
        assert_abs_diff_eq!(b[(1, 1)], 2.0 * sqrt_pi, epsilon = 1e-10);
    }

    #[test]
    fn b1_applies_singular_antiderivative() {
        // B1·1 ≈ ∫_a^{t_j} (t_j−s)^{-1/2} ds = 2 sqrt(t_j − a)
        for (n, tol) in [(30usize, 1e-3), (60, 1e-5)] {
            let grid = grid01(n, 0.5);
            let data = ConvolutionOperatorData::new(&grid, 0.5).unwrap();
            let ones = DVector::from_element(2 * n + 1, 1.0);
            let p = data.b1() * &ones;
            let q = data.b2() * &ones;
            let mut worst = 0.0f64;
            for (off, &t) in grid.interior_points().iter().enumerate() {
                worst = worst.max((p[off] - 2.0 * t.sqrt()).abs());
                worst = worst.max((q[off] - 2.0 * (1.0 - t).sqrt()).abs());
            }
            assert!(worst <= tol, "N={n}: worst {worst} > {tol}");
        }
    }

    fn zero_kernel_problem() -> WeaklySingularProblem {
        WeaklySingularProblem::new(
            iv01(),
            0.5,
            Arc::new(|_, _, _| 0.0),
            Arc::new(|_, _, _| 0.0),
            Arc::new(|t: f64| (1.0 + t).cos()),
        )
        .unwrap()
    }

    #[test]
    fn residual_zero_kernel() {
        let p = zero_kernel_problem();
        let grid = grid01(8, 0.5);
        let data = ConvolutionOperatorData::new(&grid, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = DVector::from_fn(data.size(), |_, _| rng.gen_range(-1.0..1.0));
        let r = residual_conv(&p, &data, &c);
        for (j, &t) in grid.interior_points().iter().enumerate() {
            assert_abs_diff_eq!(r[j], c[j] - p.rhs(t), epsilon = 1e-14);
        }
    }

    #[test]
    fn residual_scales_linearly_in_kernel() {
        let mk = |scale: f64| {
            WeaklySingularProblem::new(
                iv01(),
                0.5,
                Arc::new(move |t: f64, s: f64, u: f64| scale * (t + s + u)),
                Arc::new(move |_, _, _| scale),
                Arc::new(|_| 0.0),
            )
            .unwrap()
        };
        let grid = grid01(6, 0.5);
        let data = ConvolutionOperatorData::new(&grid, 0.5).unwrap();
        let c = DVector::from_element(data.size(), 0.7);
        let r1 = residual_conv(&mk(1.0), &data, &c);
        let r2 = residual_conv(&mk(2.0), &data, &c);
        for j in 0..data.size() {
            let integral1 = c[j] - r1[j];
            let integral2 = c[j] - r2[j];
            assert_abs_diff_eq!(integral2, 2.0 * integral1, epsilon = 1e-12);
        }
    }

    #[test]
    fn jacobian_identity_when_derivative_vanishes() {
        let p = zero_kernel_problem();
        let grid = grid01(7, 0.5);
        let data = ConvolutionOperatorData::new(&grid, 0.5).unwrap();
        let c = DVector::from_element(data.size(), 0.2);
        let jac = jacobian_conv(&p, &data, &c);
        assert_eq!(jac, DMatrix::identity(data.size(), data.size()));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = WeaklySingularProblem::new(
            iv01(),
            0.5,
            Arc::new(|_, _, u: f64| u * u),
            Arc::new(|_, _, u: f64| 2.0 * u),
            Arc::new(|t: f64| t * (1.0 - t)),
        )
        .unwrap();
        let grid = grid01(10, 0.5);
        let data = ConvolutionOperatorData::new(&grid, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = DVector::from_fn(data.size(), |_, _| rng.gen_range(0.0..0.5));
        let jac = jacobian_conv(&p, &data, &c);
        let jnorm = jac.amax();
        let step = 1e-6;
        for _ in 0..50 {
            let m = rng.gen_range(0..data.size());
            let i = rng.gen_range(0..data.size());
            let mut cp = c.clone();
            cp[m] += step;
            let mut cm = c.clone();
            cm[m] -= step;
            let fd =
                (residual_conv(&p, &data, &cp)[i] - residual_conv(&p, &data, &cm)[i]) / (2.0 * step);
            assert!(
                (fd - jac[(i, m)]).abs() <= 1e-6 * jnorm.max(1.0),
                "entry ({i},{m}): fd {fd} vs analytic {}",
                jac[(i, m)]
            );
        }
    }

    #[test]
    fn constant_kernel_rows_share_structure() {
        // kernel independent of t: the integral part of every row applies
        // the same nodal vector
        let p = WeaklySingularProblem::new(
            iv01(),
            0.5,
            Arc::new(|_, s: f64, u: f64| s + u),
            Arc::new(|_, _, _| 1.0),
            Arc::new(|_| 0.0),
        )
        .unwrap();
        let grid = grid01(5, 0.5);
        let data = ConvolutionOperatorData::new(&grid, 0.5).unwrap();
        let c = DVector::from_element(data.size(), 0.3);
        let r = residual_conv(&p, &data, &c);
        let v = DVector::from_fn(data.size(), |l, _| data.point(l) + c[l]);
        let expected = &data.b_total * &v;
        for j in 0..data.size() {
            assert_abs_diff_eq!(r[j], c[j] - expected[j], epsilon = 1e-12);
        }
    }

    #[test]
    fn solve_zero_kernel_immediate() {
        let p = zero_kernel_problem();
        let sol = solve_convolution(&p, 10, 0.5, 3.14, &NewtonConfig::default(), None).unwrap();
        assert!(sol.report.converged);
        assert!(sol.report.iterations <= 1);
        let grid = grid01(10, 0.5);
        // nodal values are exactly g(z_j)
        for (off, &t) in grid.interior_points().iter().enumerate() {
            assert_abs_diff_eq!(sol.expansion.coeffs()[off], p.rhs(t), epsilon = 1e-12);
        }
        // evaluation reproduces them away from the extreme nodes, where the
        // omega tail deviates by an exponentially small amount
        for (off, &t) in grid.interior_points().iter().enumerate().skip(1).take(19) {
            let _ = off;
            assert_abs_diff_eq!(sol.expansion.eval(t).unwrap(), p.rhs(t), epsilon = 1e-10);
        }
    }

    #[test]
    fn solve_example1_like() {
        let p = WeaklySingularProblem::new(
            iv01(),
            0.5,
            Arc::new(|_, _, u: f64| u * u),
            Arc::new(|_, _, u: f64| 2.0 * u),
            Arc::new(|t: f64| {
                (t * (1.0 - t)).sqrt() + 16.0 / 15.0 * t.powf(2.5)
                    + 2.0 * t * t * (1.0 - t).sqrt()
                    + 4.0 / 3.0 * t * (1.0 - t).powf(1.5)
                    + 0.4 * (1.0 - t).powf(2.5)
                    - 4.0 / 3.0 * t.powf(1.5)
                    - 2.0 * t * (1.0 - t).sqrt()
                    - 2.0 / 3.0 * (1.0 - t).powf(1.5)
            }),
        )
        .unwrap();
        let exact = |t: f64| (t * (1.0 - t)).sqrt();
        let sol =
            solve_convolution(&p, 40, 0.5, 3.14, &NewtonConfig::default(), Some(&exact)).unwrap();
        assert!(sol.report.converged);
        let mut sup = 0.0f64;
        for i in 0..=1000 {
            let t = i as f64 / 1000.0;
            sup = sup.max((sol.expansion.eval(t).unwrap() - exact(t)).abs());
        }
        assert!(sup <= 1e-4, "sup error {sup} at N=40");
    }
}
