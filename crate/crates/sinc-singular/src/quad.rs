//! Sinc quadrature over an interval and the split rule for weakly singular
//! integrands.
//!
//! The split rule substitutes `s = φ_{a,t}(x)` into `∫_a^t (t−s)^{−λ}·v(s) ds`
//! (and mirrored on `[t, b]`), which absorbs the singular factor into the
//! analytic weight
//!
//! ```text
//! ∫_a^t (t−s)^{−λ} v(s) ds = (t−a)^{1−λ} ∫_ℝ (1+e^x)^{λ−1} (1+e^{−x})^{−1} v(φ_{a,t}(x)) dx,
//! ```
//!
//! then truncates the trapezoid sum at `|j| ≤ N` with step `h`.

use crate::error::{Error, Result};
use crate::sinc::{sigmoid, step_size, Interval};

/// Plain SE-transformed sinc quadrature `h·Σ f(φ(jh))·φ'(jh)` over `(a, b)`.
///
/// Convergence requires the graded integrability the caller asserts by the
/// choice of `alpha`; nothing is detected at runtime.
pub fn sinc_quadrature(
    f: impl Fn(f64) -> f64,
    iv: Interval,
    n: usize,
    alpha: f64,
    d: f64,
) -> Result<f64> {
    let h = step_size(alpha, d, n)?;
    let ni = n as i64;
    // Distance below which a node is too close to an endpoint for f64 to
    // resolve it: f(node) would see a point displaced by a large relative
    // amount (or the endpoint itself, where graded integrands blow up).
    let tiny = 1024.0
        * f64::EPSILON
        * iv.a().abs().max(iv.b().abs()).max(iv.length());

    let term = |j: i64| -> f64 {
        let x = j as f64 * h;
        let mut value = f(iv.se_map(x));
        if !value.is_finite() {
            let node = if x > 0.0 { iv.b().next_down() } else { iv.a().next_up() };
            value = f(node);
            if !value.is_finite() {
                value = 0.0;
            }
        }
        value * iv.se_map_deriv(x)
    };

    let mut sum = term(0);
    for dir in [1i64, -1] {
        let mut prev2 = f64::NAN;
        let mut prev = sum; // term(0)
        for k in 1..=ni {
            let j = dir * k;
            let x = j as f64 * h;
            let dist = iv.length() * crate::sinc::sigmoid(-x.abs());
            if dist >= tiny {
                let t = term(j);
                sum += t;
                prev2 = prev;
                prev = t;
            } else {
                // Beyond the f64 resolution of the endpoint gap the summand
                // of a graded integrand is geometric to high accuracy;
                // continue it with the ratio measured inside the stable zone
                // rather than evaluating f at a node it cannot represent.
                let ratio = prev / prev2;
                if ratio.is_finite() && ratio > 0.0 && ratio < 0.97 && prev != 0.0 {
                    let remaining = (ni - k + 1) as f64;
                    sum += prev * ratio * (1.0 - ratio.powf(remaining)) / (1.0 - ratio);
                } else {
                    for kk in k..=ni {
                        sum += term(dir * kk);
                    }
                }
                break;
            }
        }
    }
    Ok(h * sum)
}

/// `ln(1+e^x)` without overflow.
fn ln_one_plus_exp(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Quadrature node positions and weights for one side of the singularity.
///
/// `apply(v)` evaluates `Σ weights[i]·v(nodes[i])`, approximating
/// `∫ (distance to t)^{−λ}·v` over the side. `phi` carries the nodes'
/// transform coordinates with respect to an enclosing interval `[a, b]`,
/// computed from exactly representable differences so that basis functions
/// can be evaluated accurately arbitrarily close to the endpoints.
pub(crate) struct SideRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub phi: Vec<f64>,
}

impl SideRule {
    pub fn apply(&self, v: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(|(&s, &w)| w * v(s))
            .sum()
    }
}

/// Rule for `∫_a^t (t−s)^{−λ}·v(s) ds`, with `phi` relative to `[a, b]`.
pub(crate) fn left_rule(iv: Interval, t: f64, lambda: f64, h: f64, n: usize) -> SideRule {
    let len = t - iv.a();
    let scale = h * len.powf(1.0 - lambda);
    build_rule(iv, h, n, |x| {
        // node s = a + (t−a)·sigmoid(x); distance t−s = (t−a)·sigmoid(−x)
        let s_minus_a = len * sigmoid(x);
        let w = ((lambda - 1.0) * ln_one_plus_exp(x) - ln_one_plus_exp(-x)).exp();
        (s_minus_a, scale * w)
    })
}

/// Rule for `∫_t^b (s−t)^{−λ}·v(s) ds`, with `phi` relative to `[a, b]`.
pub(crate) fn right_rule(iv: Interval, t: f64, lambda: f64, h: f64, n: usize) -> SideRule {
    let len = iv.b() - t;
    let t_minus_a = t - iv.a();
    let scale = h * len.powf(1.0 - lambda);
    build_rule(iv, h, n, |x| {
        // node s = t + (b−t)·sigmoid(x); weight mirrored from the left rule
        let s_minus_a = t_minus_a + len * sigmoid(x);
        let w = ((lambda - 1.0) * ln_one_plus_exp(-x) - ln_one_plus_exp(x)).exp();
        (s_minus_a, scale * w)
    })
}

fn build_rule(
    iv: Interval,
    h: f64,
    n: usize,
    node_weight: impl Fn(f64) -> (f64, f64),
) -> SideRule {
    let ni = n as i64;
    let count = 2 * n + 1;
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    let mut phi = Vec::with_capacity(count);
    let total = iv.length();
    for j in -ni..=ni {
        let (s_minus_a, w) = node_weight(j as f64 * h);
        let b_minus_s = total - s_minus_a;
        nodes.push(iv.a() + s_minus_a);
        weights.push(w);
        // a node can round onto an endpoint; clamp its coordinate to a large
        // finite value where every basis function has reached its limit
        let x = if s_minus_a > 0.0 && b_minus_s > 0.0 {
            (s_minus_a / b_minus_s).ln()
        } else if b_minus_s <= 0.0 {
            1e6
        } else {
            -1e6
        };
        phi.push(x);
    }
    SideRule {
        nodes,
        weights,
        phi,
    }
}

/// Split sinc approximation of `∫_a^b |t−s|^{−λ}·smooth(s) ds` for an
/// interior `t`, the singular quadrature the collocation scheme uses.
pub fn singular_split_quadrature(
    t: f64,
    lambda: f64,
    smooth: impl Fn(f64) -> f64,
    iv: Interval,
    n: usize,
    alpha: f64,
    d: f64,
) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "singularity exponent must lie in (0,1), got {lambda}"
        )));
    }
    if !(t > iv.a() && t < iv.b()) {
        return Err(Error::Domain(format!(
            "split quadrature needs an interior point, got t = {t} on [{}, {}]",
            iv.a(),
            iv.b()
        )));
    }
    let h = step_size(alpha, d, n)?;
    let left = left_rule(iv, t, lambda, h, n).apply(&smooth);
    let right = right_rule(iv, t, lambda, h, n).apply(&smooth);
    Ok(left + right)
}
