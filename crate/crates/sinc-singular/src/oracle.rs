//! Brute-force oracle for weakly singular integrals, independent of every
//! sinc-based path in this crate.
//!
//! `∫_a^b |t−s|^{−w} · smooth(s) ds` is split at the singularity and each
//! half is regularized by the substitution `s = t ± τ^{1/(1−w)}`, which turns
//! the integrand into `smooth(t ± τ^{1/(1−w)})/(1−w)` — bounded, with at
//! worst a mild fractional-power kink at `τ = 0` that adaptive bisection
//! resolves. The transformed halves go through adaptive Gauss–Kronrod
//! (G7/K15).

use crate::error::{Error, Result};
use crate::sinc::Interval;

/// Absolute accuracy target of [`singular_quadrature`].
pub const ORACLE_TARGET: f64 = 1e-12;

// 15-point Kronrod extension of 7-point Gauss (nodes symmetric about 0).
const KRONROD_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One G7/K15 panel on `[a, b]`: returns (Kronrod value, error estimate).
fn gauss_kronrod_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, (&x, &wk)) in KRONROD_NODES.iter().zip(KRONROD_WEIGHTS.iter()).enumerate() {
        let (fp, fm) = if x == 0.0 {
            (f(center), 0.0)
        } else {
            (f(center + half * x), f(center - half * x))
        };
        let pair = if x == 0.0 { fp } else { fp + fm };
        kronrod += wk * pair;
        // the embedded G7 nodes sit at the odd Kronrod indices plus center
        if i % 2 == 1 || i == 7 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    kronrod *= half;
    gauss *= half;
    // plain |K−G| as the error estimate: conservative, and the sharpened
    // QUADPACK variant underestimates on fractional-power kinks
    (kronrod, (kronrod - gauss).abs())
}

/// Adaptive bisection with a G7/K15 panel rule, absolute tolerance.
pub fn adaptive_quadrature(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    struct Panel {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
    }
    let (value, error) = gauss_kronrod_panel(f, a, b);
    let mut panels = vec![Panel { a, b, value, error }];
    for _ in 0..2000 {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        if total_err <= tol {
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(k, _)| k)
            .unwrap();
        let Panel { a, b, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // panel no longer splittable in f64
            return Err(Error::AccuracyNotReached {
                estimate: total_err,
                target: tol,
            });
        }
        let (v1, e1) = gauss_kronrod_panel(f, a, mid);
        let (v2, e2) = gauss_kronrod_panel(f, mid, b);
        panels.push(Panel { a, b: mid, value: v1, error: e1 });
        panels.push(Panel { a: mid, b, value: v2, error: e2 });
    }
    let total_err: f64 = panels.iter().map(|p| p.error).sum();
    if total_err <= tol {
        Ok(panels.iter().map(|p| p.value).sum())
    } else {
        Err(Error::AccuracyNotReached {
            estimate: total_err,
            target: tol,
        })
    }
}

/// Oracle value of `∫_a^b |t−s|^{−w} · smooth(s) ds` for `t ∈ [a, b]`,
/// `0 < w < 1`, to absolute accuracy [`ORACLE_TARGET`].
pub fn singular_quadrature(
    t: f64,
    w: f64,
    smooth: &dyn Fn(f64) -> f64,
    iv: Interval,
) -> Result<f64> {
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "singularity exponent must lie in (0,1), got {w}"
        )));
    }
    if !iv.contains(t) {
        return Err(Error::Domain(format!(
            "t = {t} outside [{}, {}]",
            iv.a(),
            iv.b()
        )));
    }
    let power = 1.0 / (1.0 - w);
    let scale = power; // Jacobian factor of the substitution
    let half_tol = 0.5 * ORACLE_TARGET;

    // left half: s = t - tau^{1/(1-w)}, tau in [0, (t-a)^{1-w}]
    let left = if t > iv.a() {
        let upper = (t - iv.a()).powf(1.0 - w);
        let f = |tau: f64| smooth((t - tau.powf(power)).max(iv.a()));
        scale * adaptive_quadrature(&f, 0.0, upper, half_tol / scale)?
    } else {
        0.0
    };

    // right half: s = t + tau^{1/(1-w)}, tau in [0, (b-t)^{1-w}]
    let right = if t < iv.b() {
        let upper = (iv.b() - t).powf(1.0 - w);
        let f = |tau: f64| smooth((t + tau.powf(power)).min(iv.b()));
        scale * adaptive_quadrature(&f, 0.0, upper, half_tol / scale)?
    } else {
        0.0
    };

    Ok(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn panel_exact_on_cubic() {
        let (v, _) = gauss_kronrod_panel(&|x| x * x * x + 2.0 * x + 1.0, 0.0, 2.0);
        assert_abs_diff_eq!(v, 4.0 + 4.0 + 2.0, epsilon = 1e-13);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let v = adaptive_quadrature(&|x: f64| (-(x * x) * 400.0).exp(), -1.0, 1.0, 1e-13).unwrap();
        // sqrt(pi)/20 (erf(20) = 1 to double precision)
        assert_abs_diff_eq!(v, core::f64::consts::PI.sqrt() / 20.0, epsilon = 1e-12);
    }

    #[test]
    fn oracle_constant_smooth() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        // smooth = 1, w = 1/2, t = 1/2: 2 sqrt(1/2) + 2 sqrt(1/2)
        let v = singular_quadrature(0.5, 0.5, &|_| 1.0, iv).unwrap();
        assert_abs_diff_eq!(v, 2.828427124746190098, epsilon = 1e-11);
    }

    #[test]
    fn oracle_zero_smooth() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let v = singular_quadrature(0.3, 0.5, &|_| 0.0, iv).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn oracle_power_at_endpoint() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        // t = 0: int_0^1 s^{-1/4} s^2 ds = 4/11
        let v = singular_quadrature(0.0, 0.25, &|s| s * s, iv).unwrap();
        assert_abs_diff_eq!(v, 4.0 / 11.0, epsilon = 1e-11);
    }

    #[test]
    fn oracle_power_family_closed_forms() {
        // |t-s|^{-w} s^m over [0,1] expands via s^m = ((s-t)+t)^m into
        // elementary power integrals on each side of t
        let iv = Interval::new(0.0, 1.0).unwrap();
        let binom: [[f64; 4]; 4] = [
            [1.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0],
            [1.0, 3.0, 3.0, 1.0],
        ];
        for &w in &[0.1, 0.25, 0.5, 0.75, 0.9] {
            for m in 0..=3usize {
                for &t in &[0.0, 0.17, 0.5, 0.83, 1.0_f64] {
                    let mut want = 0.0;
                    for k in 0..=m {
                        let c = binom[m][k] * t.powi((m - k) as i32) / (k as f64 + 1.0 - w);
                        let left = if t > 0.0 {
                            (-1.0f64).powi(k as i32) * t.powf(k as f64 + 1.0 - w)
                        } else {
                            0.0
                        };
                        let right = if t < 1.0 {
                            (1.0 - t).powf(k as f64 + 1.0 - w)
                        } else {
                            0.0
                        };
                        want += c * (left + right);
                    }
                    let got = singular_quadrature(t, w, &|s| s.powi(m as i32), iv).unwrap();
                    assert_abs_diff_eq!(got, want, epsilon = 1e-11);
                }
            }
        }
    }

    #[test]
    fn oracle_rejects_bad_inputs() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        assert!(singular_quadrature(0.5, 1.5, &|_| 1.0, iv).is_err());
        assert!(singular_quadrature(2.0, 0.5, &|_| 1.0, iv).is_err());
    }
}
