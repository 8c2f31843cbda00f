//! Cardinal sinc functions, single-exponential variable transforms and sinc
//! point grids.
//!
//! The transform `se_map` carries the real line onto a finite interval
//! `(a, b)`; sinc points are its images of the equispaced grid `j·h`,
//! augmented with the two endpoints. All types here are immutable after
//! construction and cheap to share.

use crate::error::{Error, Result};

/// `sin(πx)/(πx)` with the removable singularity at the origin handled.
pub fn sinc(x: f64) -> f64 {
    let y = core::f64::consts::PI * x;
    if y.abs() < 1e-4 {
        // Taylor expansion of sin(y)/y; four terms keep full f64 accuracy
        // on |y| < 1e-4 without the cancellation of the direct quotient.
        let y2 = y * y;
        1.0 - y2 / 6.0 * (1.0 - y2 / 20.0 * (1.0 - y2 / 42.0))
    } else {
        y.sin() / y
    }
}

/// The `j`-th translated sinc basis function `S(j,h)(x) = sinc(x/h − j)`.
pub fn cardinal(j: i64, h: f64, x: f64) -> f64 {
    debug_assert!(h > 0.0);
    sinc(x / h - j as f64)
}

/// Logistic sigmoid `1/(1+e^{−x})`, evaluated without overflow.
///
/// This is the building block of the SE transform: `se_map(x) = a + (b−a)·sigmoid(x)`.
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// A finite interval `[a, b]` with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidParameter(format!(
                "interval endpoints must be finite with a < b, got [{a}, {b}]"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Whether `t` lies in the closed interval.
    pub fn contains(&self, t: f64) -> bool {
        self.a <= t && t <= self.b
    }

    /// Single-exponential transform `φ_{a,b}(x) = (b−a)/2·tanh(x/2) + (b+a)/2`,
    /// mapping the real line onto the open interval.
    pub fn se_map(&self, x: f64) -> f64 {
        self.a + self.length() * sigmoid(x)
    }

    /// Inverse transform `log((t−a)/(b−t))`, defined on the open interval.
    pub fn se_inv(&self, t: f64) -> Result<f64> {
        if t <= self.a || t >= self.b {
            return Err(Error::Domain(format!(
                "se_inv requires a < t < b, got t = {t} on [{}, {}]",
                self.a, self.b
            )));
        }
        Ok(((t - self.a) / (self.b - t)).ln())
    }

    /// Derivative `φ'_{a,b}(x) = (b−a)·e^x/(1+e^x)²`, the SE quadrature
    /// weight factor. At `t = se_map(x)` this equals `(t−a)(b−t)/(b−a)`.
    pub fn se_map_deriv(&self, x: f64) -> f64 {
        self.length() * sigmoid(x) * sigmoid(-x)
    }
}

/// Mesh size `h = sqrt(π·d/(α·N))` of the sinc schemes.
pub fn step_size(alpha: f64, d: f64, n: usize) -> Result<f64> {
    check_grid_params(alpha, d, n)?;
    Ok((core::f64::consts::PI * d / (alpha * n as f64)).sqrt())
}

fn check_grid_params(alpha: f64, d: f64, n: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "grading exponent alpha must lie in (0, 1], got {alpha}"
        )));
    }
    if !(d > 0.0 && d < core::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!(
            "strip height d must lie in (0, pi), got {d}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    Ok(())
}

/// Sinc points of an interval: `t_j = φ_{a,b}(j·h)` for `|j| ≤ N` plus the
/// endpoints stored at the indices `±(N+1)`.
///
/// The grid is immutable; solvers hold shared references to it.
#[derive(Clone, Debug)]
pub struct SincGrid {
    interval: Interval,
    n: usize,
    alpha: f64,
    d: f64,
    h: f64,
    /// 2N+3 points for indices −N−1 ..= N+1.
    points: Vec<f64>,
    /// sigmoid(j·h) = (t_j − a)/(b − a) for the interior indices −N ..= N.
    /// Kept separately: near the endpoints it carries far more relative
    /// accuracy than the difference of stored points.
    sig: Vec<f64>,
}

impl SincGrid {
    pub fn new(interval: Interval, n: usize, alpha: f64, d: f64) -> Result<Self> {
        let h = step_size(alpha, d, n)?;
        let ni = n as i64;
        let mut points = Vec::with_capacity(2 * n + 3);
        let mut sig = Vec::with_capacity(2 * n + 1);
        points.push(interval.a());
        for j in -ni..=ni {
            let s = sigmoid(j as f64 * h);
            sig.push(s);
            points.push(interval.a() + interval.length() * s);
        }
        points.push(interval.b());
        Ok(Self {
            interval,
            n,
            alpha,
            d,
            h,
            points,
            sig,
        })
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// All 2N+3 points in ascending order, endpoints included.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of stored points, `2N+3`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Point `t_j` for `−N−1 ≤ j ≤ N+1`.
    pub fn point(&self, j: i64) -> f64 {
        self.points[self.offset(j)]
    }

    /// The 2N+1 interior sinc points `t_{−N} .. t_N`.
    pub fn interior_points(&self) -> &[f64] {
        &self.points[1..self.points.len() - 1]
    }

    /// `(t_j − a)/(b − a)` for an interior index, accurate to full relative
    /// precision even where `t_j` is exponentially close to an endpoint.
    pub fn sigma(&self, j: i64) -> f64 {
        debug_assert!(j.unsigned_abs() as usize <= self.n);
        self.sig[(j + self.n as i64) as usize]
    }

    /// `(b − t_j)/(b − a)`, the mirror of [`SincGrid::sigma`].
    pub fn sigma_complement(&self, j: i64) -> f64 {
        self.sigma(-j)
    }

    /// Vec index of grid index `j ∈ −N−1 ..= N+1`.
    pub fn offset(&self, j: i64) -> usize {
        let ni = self.n as i64;
        debug_assert!(-ni - 1 <= j && j <= ni + 1);
        (j + ni + 1) as usize
    }

    /// Grid index of Vec offset.
    pub fn index(&self, offset: usize) -> i64 {
        offset as i64 - self.n as i64 - 1
    }
}
