//! Sinc-collocation scheme: the singularity-preserving expansion collocated
//! at all 2N+3 sinc points, with the weakly singular integral operator
//! discretized by the split SE quadrature on each side of the collocation
//! point. The resulting nonlinear system is solved by damped Newton with an
//! analytic Jacobian.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::interp::{EndpointExponents, SincExpansion};
use crate::newton::{newton_solve, NewtonConfig, SolveReport};
use crate::problem::WeaklySingularProblem;
use crate::quad::{left_rule, right_rule};
use crate::sinc::{cardinal, sigmoid, SincGrid};

/// Converged collocation solve: the expansion and the Newton report.
#[derive(Clone, Debug)]
pub struct CollocationSolution {
    pub expansion: SincExpansion,
    pub report: SolveReport,
}

/// Discrete weakly singular operator `(K_N u)(t)` for an arbitrary evaluable
/// `u`: split quadrature of `|t−s|^{−λ}·kernel(t, s, u(s))` over both sides
/// of `t`; at the endpoints only the nonempty side contributes.
pub fn apply_kn(
    p: &WeaklySingularProblem,
    u_eval: impl Fn(f64) -> f64,
    grid: &SincGrid,
    t: f64,
) -> Result<f64> {
    let iv = grid.interval();
    if !iv.contains(t) {
        return Err(Error::Domain(format!(
            "operator point {t} outside [{}, {}]",
            iv.a(),
            iv.b()
        )));
    }
    let smooth = |s: f64| p.kernel(t, s, u_eval(s));
    let mut value = 0.0;
    if t > iv.a() {
        value += left_rule(iv, t, p.lambda(), grid.h(), grid.n()).apply(&smooth);
    }
    if t < iv.b() {
        value += right_rule(iv, t, p.lambda(), grid.h(), grid.n()).apply(&smooth);
    }
    Ok(value)
}

/// Precomputed collocation system: basis values at the collocation points
/// and at every quadrature node, plus the singular quadrature weights.
///
/// Rebuilding residuals and Jacobians then costs matrix-vector work and one
/// kernel evaluation per quadrature node.
pub struct CollocationSystem {
    grid: SincGrid,
    problem: WeaklySingularProblem,
    exponents: EndpointExponents,
    /// `E[i][m]` = basis_m(t_i), the linear part of the residual.
    basis_at_points: DMatrix<f64>,
    /// basis_m at every quadrature node, rows grouped per collocation point.
    basis_at_nodes: DMatrix<f64>,
    /// row range of `basis_at_nodes` owned by collocation point i.
    node_ranges: Vec<(usize, usize)>,
    /// quadrature node positions (kernel's `s` argument).
    node_s: Vec<f64>,
    /// singular quadrature weights, premultiplied by h·len^{1−λ}.
    node_w: Vec<f64>,
    /// g(t_i).
    rhs: DVector<f64>,
}

impl CollocationSystem {
    pub fn new(p: &WeaklySingularProblem, grid: &SincGrid) -> Result<Self> {
        let iv = grid.interval();
        let n = grid.n();
        let ni = n as i64;
        let size = grid.len();
        let exponents = EndpointExponents::for_lambda(p.lambda())?;

        // linear part: basis values at the collocation points
        let mut basis_at_points = DMatrix::<f64>::zeros(size, size);
        basis_at_points[(0, 0)] = 1.0;
        basis_at_points[(size - 1, size - 1)] = 1.0;
        for gi in -ni..=ni {
            let row = grid.offset(gi);
            basis_at_points[(row, 0)] = grid.sigma_complement(gi).powf(exponents.left());
            basis_at_points[(row, size - 1)] = grid.sigma(gi).powf(exponents.right());
            basis_at_points[(row, row)] += 1.0;
        }

        // quadrature rules per collocation point, flattened
        let mut node_s = Vec::new();
        let mut node_w = Vec::new();
        let mut node_phi = Vec::new();
        let mut node_ranges = Vec::with_capacity(size);
        for i in 0..size {
            let t = grid.point(grid.index(i));
            let start = node_s.len();
            if t > iv.a() {
                let rule = left_rule(iv, t, p.lambda(), grid.h(), n);
                node_s.extend_from_slice(&rule.nodes);
                node_w.extend_from_slice(&rule.weights);
                node_phi.extend_from_slice(&rule.phi);
            }
            if t < iv.b() {
                let rule = right_rule(iv, t, p.lambda(), grid.h(), n);
                node_s.extend_from_slice(&rule.nodes);
                node_w.extend_from_slice(&rule.weights);
                node_phi.extend_from_slice(&rule.phi);
            }
            node_ranges.push((start, node_s.len()));
        }

        // basis values at every quadrature node
        let mut basis_at_nodes = DMatrix::<f64>::zeros(node_s.len(), size);
        for (r, &x) in node_phi.iter().enumerate() {
            basis_at_nodes[(r, 0)] = sigmoid(-x).powf(exponents.left());
            basis_at_nodes[(r, size - 1)] = sigmoid(x).powf(exponents.right());
            for j in -ni..=ni {
                basis_at_nodes[(r, grid.offset(j))] = cardinal(j, grid.h(), x);
            }
        }

        let rhs = DVector::from_fn(size, |i, _| p.rhs(grid.point(grid.index(i))));

        Ok(Self {
            grid: grid.clone(),
            problem: p.clone(),
            exponents,
            basis_at_points,
            basis_at_nodes,
            node_ranges,
            node_s,
            node_w,
            rhs,
        })
    }

    pub fn grid(&self) -> &SincGrid {
        &self.grid
    }

    pub fn exponents(&self) -> EndpointExponents {
        self.exponents
    }

    /// Unknown count, `2N+3`.
    pub fn size(&self) -> usize {
        self.grid.len()
    }

    /// Residual of the discrete equation at every collocation point:
    /// `u_N(t_i) − (K_N u_N)(t_i) − g(t_i)`.
    pub fn residual(&self, c: &DVector<f64>) -> DVector<f64> {
        let u_nodes = &self.basis_at_nodes * c;
        let mut r = &self.basis_at_points * c - &self.rhs;
        for (i, &(lo, hi)) in self.node_ranges.iter().enumerate() {
            let t = self.grid.point(self.grid.index(i));
            let mut integral = 0.0;
            for k in lo..hi {
                integral += self.node_w[k] * self.problem.kernel(t, self.node_s[k], u_nodes[k]);
            }
            r[i] -= integral;
        }
        r
    }

    /// Analytic Jacobian: the basis matrix minus the linearized operator
    /// `Σ_k W_k·∂kernel/∂u(t_i, s_k, u(s_k))·basis_m(s_k)`.
    pub fn jacobian(&self, c: &DVector<f64>) -> DMatrix<f64> {
        let size = self.size();
        let u_nodes = &self.basis_at_nodes * c;
        let mut jac = self.basis_at_points.clone();
        for (i, &(lo, hi)) in self.node_ranges.iter().enumerate() {
            let t = self.grid.point(self.grid.index(i));
            for k in lo..hi {
                let factor =
                    self.node_w[k] * self.problem.kernel_du(t, self.node_s[k], u_nodes[k]);
                if factor == 0.0 {
                    continue;
                }
                for m in 0..size {
                    jac[(i, m)] -= factor * self.basis_at_nodes[(k, m)];
                }
            }
        }
        jac
    }

    /// The interpolant of `g`, the kernel-free solution used as the default
    /// Newton starting point.
    pub fn initial_guess(&self) -> DVector<f64> {
        let e = SincExpansion::interpolate(
            |t| self.problem.rhs(t),
            &self.grid,
            self.exponents,
        );
        DVector::from_column_slice(e.coeffs())
    }

    pub fn into_solution(self, c: DVector<f64>, report: SolveReport) -> Result<CollocationSolution> {
        let expansion =
            SincExpansion::from_coeffs(self.grid, self.exponents, c.iter().copied().collect())?;
        Ok(CollocationSolution { expansion, report })
    }
}

/// Convenience wrappers matching the operator-level contracts.
pub fn residual(
    p: &WeaklySingularProblem,
    grid: &SincGrid,
    c: &DVector<f64>,
) -> Result<DVector<f64>> {
    Ok(CollocationSystem::new(p, grid)?.residual(c))
}

pub fn jacobian(
    p: &WeaklySingularProblem,
    grid: &SincGrid,
    c: &DVector<f64>,
) -> Result<DMatrix<f64>> {
    Ok(CollocationSystem::new(p, grid)?.jacobian(c))
}

/// Assemble and solve the collocation system for the given resolution.
///
/// `initial` seeds the Newton iteration with the interpolant of a given
/// profile; without it the kernel-free solution (the interpolant of `g`)
/// is used. Nonlinearities like `u²` admit several discrete solutions, so
/// callers reproducing a known benchmark should seed near the branch they
/// are after.
pub fn solve_collocation(
    p: &WeaklySingularProblem,
    n: usize,
    alpha: f64,
    d: f64,
    cfg: &NewtonConfig,
    initial: Option<&(dyn Fn(f64) -> f64)>,
) -> Result<CollocationSolution> {
    let grid = SincGrid::new(p.interval(), n, alpha, d)?;
    let system = CollocationSystem::new(p, &grid)?;
    let c0 = match initial {
        Some(u0) => DVector::from_column_slice(
            SincExpansion::interpolate(u0, &grid, system.exponents()).coeffs(),
        ),
        None => system.initial_guess(),
    };
    let f = |c: &DVector<f64>| system.residual(c);
    let j = |c: &DVector<f64>| system.jacobian(c);
    let (c, report) = newton_solve(&f, &j, &c0, cfg)?;
    system.into_solution(c, report)
}
