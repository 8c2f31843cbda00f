//! Problem data for a weakly singular Fredholm equation of the second kind
//!
//! ```text
//! u(t) = g(t) + ∫_a^b |t−s|^{−λ} k(t, s, u(s)) ds.
//! ```

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sinc::Interval;

/// Shared evaluable closure; problems are cloned across threads in studies.
pub type Kernel = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
/// Right-hand side `g`.
pub type Rhs = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The equation data: interval, singularity exponent and the smooth factor
/// of the kernel together with its `u`-derivative.
///
/// `kernel(t, s, u)` is the whole smooth part — `k(t,s)·ψ(s,u)` for a
/// Hammerstein problem, or a general Urysohn kernel. `kernel_du` is its
/// partial derivative in the third argument.
#[derive(Clone)]
pub struct WeaklySingularProblem {
    interval: Interval,
    lambda: f64,
    kernel: Kernel,
    kernel_du: Kernel,
    rhs: Rhs,
}

impl WeaklySingularProblem {
    pub fn new(
        interval: Interval,
        lambda: f64,
        kernel: Kernel,
        kernel_du: Kernel,
        rhs: Rhs,
    ) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "singularity exponent lambda must lie in (0, 1), got {lambda}"
            )));
        }
        Ok(Self {
            interval,
            lambda,
            kernel,
            kernel_du,
            rhs,
        })
    }

    /// Hammerstein form `k(t,s)·ψ(s,u)` from its two factors.
    pub fn hammerstein(
        interval: Interval,
        lambda: f64,
        k: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        psi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        psi_du: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        rhs: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let k = Arc::new(k);
        let k2 = Arc::clone(&k);
        Self::new(
            interval,
            lambda,
            Arc::new(move |t, s, u| k(t, s) * psi(s, u)),
            Arc::new(move |t, s, u| k2(t, s) * psi_du(s, u)),
            Arc::new(rhs),
        )
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kernel(&self, t: f64, s: f64, u: f64) -> f64 {
        (self.kernel)(t, s, u)
    }

    pub fn kernel_du(&self, t: f64, s: f64, u: f64) -> f64 {
        (self.kernel_du)(t, s, u)
    }

    pub fn rhs(&self, t: f64) -> f64 {
        (self.rhs)(t)
    }

    /// Check `kernel_du` against centered finite differences of `kernel` at
    /// the given sample triples; returns the worst relative deviation.
    pub fn kernel_derivative_deviation(&self, samples: &[(f64, f64, f64)]) -> f64 {
        let mut worst = 0.0f64;
        for &(t, s, u) in samples {
            let step = 1e-6 * u.abs().max(1.0);
            let fd = (self.kernel(t, s, u + step) - self.kernel(t, s, u - step)) / (2.0 * step);
            let du = self.kernel_du(t, s, u);
            let denom = du.abs().max(fd.abs()).max(1.0);
            worst = worst.max((fd - du).abs() / denom);
        }
        worst
    }
}

impl std::fmt::Debug for WeaklySingularProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeaklySingularProblem")
            .field("interval", &self.interval)
            .field("lambda", &self.lambda)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lambda() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let z: Kernel = Arc::new(|_, _, _| 0.0);
        let r: Rhs = Arc::new(|_| 0.0);
        assert!(WeaklySingularProblem::new(iv, 0.0, z.clone(), z.clone(), r.clone()).is_err());
        assert!(WeaklySingularProblem::new(iv, 1.0, z.clone(), z.clone(), r.clone()).is_err());
        assert!(WeaklySingularProblem::new(iv, 0.5, z.clone(), z, r).is_ok());
    }

    #[test]
    fn hammerstein_composition_and_derivative() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let p = WeaklySingularProblem::hammerstein(
            iv,
            0.5,
            |t, s| t + s,
            |_, u| u * u,
            |_, u| 2.0 * u,
            |_| 0.0,
        )
        .unwrap();
        assert_eq!(p.kernel(0.25, 0.5, 2.0), 0.75 * 4.0);
        assert_eq!(p.kernel_du(0.25, 0.5, 2.0), 0.75 * 4.0);
        let dev = p.kernel_derivative_deviation(&[(0.3, 0.7, 0.5), (0.1, 0.2, -1.0)]);
        assert!(dev <= 1e-6, "deviation {dev}");
    }
}
