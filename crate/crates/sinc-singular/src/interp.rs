//! Sinc interpolation operators: the singularity-preserving collocation
//! expansion with endpoint exponents, and the ω basis of the convolution
//! scheme.

use crate::error::{Error, Result};
use crate::sinc::{cardinal, SincGrid};

/// Bound `(2/π)(3 + log N)` on the Lebesgue constant of the sinc family.
pub fn lebesgue_bound(n: usize) -> f64 {
    2.0 / core::f64::consts::PI * (3.0 + (n as f64).ln())
}

/// Exponents of the two boundary basis functions `((b−t)/(b−a))^left` and
/// `((t−a)/(b−a))^right`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndpointExponents {
    left: f64,
    right: f64,
}

impl EndpointExponents {
    pub fn new(left: f64, right: f64) -> Result<Self> {
        for (name, v) in [("left", left), ("right", right)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "endpoint exponent {name} must lie in (0, 1], got {v}"
                )));
            }
        }
        Ok(Self { left, right })
    }

    /// The pair `(λ, 1−λ)` the collocation scheme attaches to a problem with
    /// singularity exponent `λ`. The asymmetry is deliberate.
    pub fn for_lambda(lambda: f64) -> Result<Self> {
        Self::new(lambda, 1.0 - lambda)
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.right
    }
}

/// Singularity-preserving sinc expansion
///
/// ```text
/// u(t) = c_{−N−1}·((b−t)/(b−a))^left + Σ_{j=−N}^{N} c_j·S(j,h)(φ⁻¹(t)) + c_{N+1}·((t−a)/(b−a))^right
/// ```
///
/// with 2N+3 coefficients indexed `−N−1 ..= N+1`.
#[derive(Clone, Debug)]
pub struct SincExpansion {
    grid: SincGrid,
    exponents: EndpointExponents,
    coeffs: Vec<f64>,
}

impl SincExpansion {
    /// Wrap a coefficient vector; its length must be `2N+3`.
    pub fn from_coeffs(grid: SincGrid, exponents: EndpointExponents, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "coefficient count {} does not match grid size {}",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, exponents, coeffs })
    }

    /// Interpolate `f` at the sinc points: the boundary coefficients carry
    /// `f(a)` and `f(b)`, the sinc coefficients the remainder after the
    /// boundary interpolant is subtracted.
    pub fn interpolate(f: impl Fn(f64) -> f64, grid: &SincGrid, exponents: EndpointExponents) -> Self {
        let n = grid.n() as i64;
        let ca = f(grid.interval().a());
        let cb = f(grid.interval().b());
        let mut coeffs = Vec::with_capacity(grid.len());
        coeffs.push(ca);
        for j in -n..=n {
            let boundary = ca * grid.sigma_complement(j).powf(exponents.left)
                + cb * grid.sigma(j).powf(exponents.right);
            coeffs.push(f(grid.point(j)) - boundary);
        }
        coeffs.push(cb);
        Self {
            grid: grid.clone(),
            exponents,
            coeffs,
        }
    }

    pub fn grid(&self) -> &SincGrid {
        &self.grid
    }

    pub fn exponents(&self) -> EndpointExponents {
        self.exponents
    }

    /// Coefficients ordered `c_{−N−1}, c_{−N}, …, c_{N+1}`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Evaluate at `a ≤ t ≤ b`. Endpoints return the stored boundary
    /// coefficients directly (the sinc terms vanish there only in the limit).
    pub fn eval(&self, t: f64) -> Result<f64> {
        let iv = self.grid.interval();
        if !iv.contains(t) {
            return Err(Error::Domain(format!(
                "evaluation point {t} outside [{}, {}]",
                iv.a(),
                iv.b()
            )));
        }
        if t == iv.a() {
            return Ok(self.coeffs[0]);
        }
        if t == iv.b() {
            return Ok(self.coeffs[self.coeffs.len() - 1]);
        }
        let x = iv.se_inv(t)?;
        let ratio_right = (t - iv.a()) / iv.length();
        let ratio_left = (iv.b() - t) / iv.length();
        let n = self.grid.n() as i64;
        let mut sum = self.coeffs[0] * ratio_left.powf(self.exponents.left)
            + self.coeffs[self.coeffs.len() - 1] * ratio_right.powf(self.exponents.right);
        for j in -n..=n {
            sum += self.coeffs[self.grid.offset(j)] * cardinal(j, self.grid.h(), x);
        }
        Ok(sum)
    }

    /// Evaluate at the sinc point with index `j`, using the grid's
    /// full-precision endpoint ratios. Exact cardinality makes this
    ///
    /// ```text
    /// c_j + c_{−N−1}·((b−t_j)/(b−a))^left + c_{N+1}·((t_j−a)/(b−a))^right
    /// ```
    pub fn eval_at_node(&self, j: i64) -> f64 {
        let n = self.grid.n() as i64;
        if j == -n - 1 {
            return self.coeffs[0];
        }
        if j == n + 1 {
            return self.coeffs[self.coeffs.len() - 1];
        }
        self.coeffs[self.grid.offset(j)]
            + self.coeffs[0] * self.grid.sigma_complement(j).powf(self.exponents.left)
            + self.coeffs[self.coeffs.len() - 1] * self.grid.sigma(j).powf(self.exponents.right)
    }
}

/// Basis function `ω_j` of the convolution scheme, `−N ≤ j ≤ N`.
///
/// Interior indices are the transformed sinc functions
/// `γ_j(t) = S(j,h)(φ⁻¹(t))`; the two extremes are corrected with the linear
/// endpoint interpolants so that `ω_{−N}(a) = 1`, `ω_N(b) = 1` and every
/// other basis function vanishes at the endpoints.
pub fn omega_basis(j: i64, grid: &SincGrid, t: f64) -> Result<f64> {
    let n = grid.n() as i64;
    if j.abs() > n {
        return Err(Error::InvalidParameter(format!(
            "omega index {j} outside -{n}..={n}"
        )));
    }
    let iv = grid.interval();
    if !iv.contains(t) {
        return Err(Error::Domain(format!(
            "evaluation point {t} outside [{}, {}]",
            iv.a(),
            iv.b()
        )));
    }
    if t == iv.a() {
        return Ok(if j == -n { 1.0 } else { 0.0 });
    }
    if t == iv.b() {
        return Ok(if j == n { 1.0 } else { 0.0 });
    }
    let x = iv.se_inv(t)?;
    let h = grid.h();
    if j.abs() < n {
        return Ok(cardinal(j, h, x));
    }
    if j == -n {
        // (b−t)/(b−a) − Σ_{k=−N+1}^{N} γ_k(t)/(1+e^{kh})
        let mut sum = (iv.b() - t) / iv.length();
        for k in -n + 1..=n {
            sum -= grid.sigma(-k) * cardinal(k, h, x);
        }
        Ok(sum)
    } else {
        // (t−a)/(b−a) − Σ_{k=−N}^{N−1} γ_k(t)·e^{kh}/(1+e^{kh})
        let mut sum = (t - iv.a()) / iv.length();
        for k in -n..=n - 1 {
            sum -= grid.sigma(k) * cardinal(k, h, x);
        }
        Ok(sum)
    }
}

/// Expansion `Σ_{j=−N}^{N} c_j ω_j(t)` in the convolution basis.
#[derive(Clone, Debug)]
pub struct OmegaExpansion {
    grid: SincGrid,
    coeffs: Vec<f64>,
}

impl OmegaExpansion {
    pub fn from_coeffs(grid: SincGrid, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != 2 * grid.n() + 1 {
            return Err(Error::InvalidParameter(format!(
                "coefficient count {} does not match 2N+1 = {}",
                coeffs.len(),
                2 * grid.n() + 1
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &SincGrid {
        &self.grid
    }

    /// Coefficients ordered `c_{−N}, …, c_N`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Evaluate at `a ≤ t ≤ b`; at the endpoints the expansion collapses to
    /// `c_{−N}` and `c_N`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let iv = self.grid.interval();
        if !iv.contains(t) {
            return Err(Error::Domain(format!(
                "evaluation point {t} outside [{}, {}]",
                iv.a(),
                iv.b()
            )));
        }
        let n = self.grid.n() as i64;
        if t == iv.a() {
            return Ok(self.coeffs[0]);
        }
        if t == iv.b() {
            return Ok(self.coeffs[self.coeffs.len() - 1]);
        }
        let x = iv.se_inv(t)?;
        let h = self.grid.h();
        let c = |j: i64| self.coeffs[(j + n) as usize];

        // single pass: gamma values feed the interior sum and both
        // endpoint-correction sums
        let mut interior = 0.0;
        let mut s_left = 0.0; // Σ_{k=−N+1}^{N} sigmoid(−kh) γ_k
        let mut s_right = 0.0; // Σ_{k=−N}^{N−1} sigmoid(kh) γ_k
        for k in -n..=n {
            let gamma = cardinal(k, h, x);
            if k.abs() < n {
                interior += c(k) * gamma;
            }
            if k > -n {
                s_left += self.grid.sigma(-k) * gamma;
            }
            if k < n {
                s_right += self.grid.sigma(k) * gamma;
            }
        }
        let ratio_left = (iv.b() - t) / iv.length();
        let ratio_right = (t - iv.a()) / iv.length();
        Ok(interior + c(-n) * (ratio_left - s_left) + c(n) * (ratio_right - s_right))
    }
}
