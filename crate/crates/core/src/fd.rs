//! Independent finite-difference method-of-lines solver for the reformulated
//! system, used to cross-validate the mild solver on smooth-boundary runs.
//!
//! Diffusion is advanced by a theta scheme on a tridiagonal system, the
//! advection term by first-order upwinding, the reaction explicitly; the
//! calcite update applies the exact exponential formula with the
//! concentration frozen over the step. The oracle is only trusted for
//! continuous (ideally C^1) boundary signals; rough Jacobi paths break its
//! accuracy claims and the CLI refuses to feed them here.

use crate::error::{Result, SulphError};
use crate::grid::{fd_derivative, Field, GridSpec};
use crate::heat::grid_samples;
use crate::jacobi::BoundaryPath;
use crate::solver::{energy_report, InitialData, ModelParams, SolutionPair, SolveDiagnostics};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    /// Implicitness weight of the diffusion step (0 explicit, 1 implicit).
    pub theta: f64,
    /// Safety factor for the explicit stability constraint.
    pub cfl_safety: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self { theta: 0.5, cfl_safety: 0.9 }
    }
}

impl FdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(SulphError::InvalidParameter(format!(
                "theta must lie in [0, 1], got {}",
                self.theta
            )));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(SulphError::InvalidParameter(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        Ok(())
    }

    fn check_cfl(&self, grid: &GridSpec) -> Result<()> {
        if self.theta < 0.5 {
            let dx = grid.dx();
            let limit = self.cfl_safety * dx * dx / 2.0;
            if grid.dt() > limit {
                return Err(SulphError::InvalidParameter(format!(
                    "CFL violation: dt = {} exceeds {} for theta = {}",
                    grid.dt(),
                    limit,
                    self.theta
                )));
            }
        }
        Ok(())
    }
}

/// Thomas solve of the constant-coefficient diffusion system
/// `(I - theta dt D2) s = rhs` with Dirichlet values already in `rhs[0]`
/// and `rhs[n-1]`.
fn diffusion_solve(rhs: &mut [f64], mu: f64) {
    let n = rhs.len();
    // rows 1..n-1: -mu s_{j-1} + (1 + 2 mu) s_j - mu s_{j+1} = rhs_j
    let diag = 1.0 + 2.0 * mu;
    let mut c_prime = vec![0.0; n];
    // row 0 is the identity
    c_prime[0] = 0.0;
    for j in 1..n - 1 {
        let m = diag - (-mu) * c_prime[j - 1];
        c_prime[j] = -mu / m;
        rhs[j] = (rhs[j] + mu * rhs[j - 1]) / m;
    }
    for j in (1..n - 1).rev() {
        rhs[j] -= c_prime[j] * rhs[j + 1];
    }
}

fn upwind_advection(s: &[f64], velocity: &[f64], dx: f64, out: &mut [f64]) {
    let n = s.len();
    for j in 1..n - 1 {
        let b = velocity[j];
        // the term is b ds/dx: information travels against -b
        out[j] = if b >= 0.0 {
            b * (s[j + 1] - s[j]) / dx
        } else {
            b * (s[j] - s[j - 1]) / dx
        };
    }
    out[0] = 0.0;
    out[n - 1] = 0.0;
}

/// March the full nonlinear system.
pub fn solve_fd(
    psi: &BoundaryPath,
    data: &InitialData,
    params: &ModelParams,
    grid: &GridSpec,
    fd: &FdConfig,
) -> Result<SolutionPair> {
    params.validate()?;
    fd.validate()?;
    fd.check_cfl(grid)?;
    data.validate(grid, params)?;
    let psi_vals = grid_samples(psi, grid)?;

    let n_x = grid.n_x;
    let dt = grid.dt();
    let dx = grid.dx();
    let mu = fd.theta * dt / (dx * dx);
    let lambda = params.lambda;
    let b_sign = params.b;
    let c_limit = 1.0 - params.phi_min() / 2.0;

    let mut s_rows: Vec<Vec<f64>> = Vec::with_capacity(grid.n_t);
    let mut c_rows: Vec<Vec<f64>> = Vec::with_capacity(grid.n_t);
    s_rows.push(data.s0.clone());
    c_rows.push(data.c0.clone());

    let mut advect = vec![0.0; n_x];
    for n in 0..grid.n_t - 1 {
        let s = &s_rows[n];
        let c = &c_rows[n];

        let dxc = fd_derivative(c, dx);
        let velocity: Vec<f64> = c
            .iter()
            .zip(&dxc)
            .map(|(&cv, &dcv)| b_sign * dcv / (1.0 + b_sign * cv))
            .collect();
        upwind_advection(s, &velocity, dx, &mut advect);

        let mut rhs = vec![0.0; n_x];
        for j in 1..n_x - 1 {
            let lap = (s[j - 1] - 2.0 * s[j] + s[j + 1]) / (dx * dx);
            let reaction = lambda * c[j] * s[j] * (b_sign * s[j] - 1.0);
            rhs[j] = s[j] + dt * ((1.0 - fd.theta) * lap + advect[j] + reaction);
        }
        rhs[0] = psi_vals[n + 1];
        rhs[n_x - 1] = 0.0;
        diffusion_solve(&mut rhs, mu);

        // exact exponential calcite update with s frozen over the step
        let mut c_next = vec![0.0; n_x];
        for j in 0..n_x {
            let phi = 1.0 + b_sign * c[j];
            let h = (lambda * s[j] * dt).exp();
            c_next[j] = c[j] / (phi * h - b_sign * c[j]);
        }
        if b_sign < 0.0 {
            let max_c = c_next.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max_c > c_limit {
                return Err(SulphError::PorosityDegeneracy(format!(
                    "calcite reached {max_c} > {c_limit} at step {n}"
                )));
            }
        }
        s_rows.push(rhs);
        c_rows.push(c_next);
    }

    let s = Field::from_rows(*grid, s_rows)?;
    let c = Field::from_rows(*grid, c_rows)?;
    let dxs = s.dx_field();

    let mut max_c_increase = f64::NEG_INFINITY;
    for k in 0..grid.n_t - 1 {
        for j in 0..n_x {
            max_c_increase = max_c_increase.max(c.get(k + 1, j) - c.get(k, j));
        }
    }
    let diagnostics = SolveDiagnostics {
        outer_iterations: 0,
        picard_iterations: Vec::new(),
        outer_distances: Vec::new(),
        contraction_rate: None,
        distances_monotone: true,
        bisections: 0,
        energy: energy_report(&s),
        min_s: s.min(),
        max_s: s.max(),
        min_c: c.min(),
        max_c: c.max(),
        max_c_increase,
    };
    Ok(SolutionPair { s, c, dxs, diagnostics })
}

/// March the linear equation `ds/dt = d2s/dx2 + b ds/dx + gamma s` with
/// prescribed coefficient fields; the linear-PDE cross-check for the mild
/// solver.
pub fn solve_fd_linear(
    psi: &BoundaryPath,
    s0: &[f64],
    advection: &Field,
    gamma: &Field,
    grid: &GridSpec,
    fd: &FdConfig,
) -> Result<Field> {
    fd.validate()?;
    fd.check_cfl(grid)?;
    if s0.len() != grid.n_x || advection.grid != *grid || gamma.grid != *grid {
        return Err(SulphError::GridMismatch(
            "linear fd inputs do not share the grid".into(),
        ));
    }
    let psi_vals = grid_samples(psi, grid)?;
    let n_x = grid.n_x;
    let dt = grid.dt();
    let dx = grid.dx();
    let mu = fd.theta * dt / (dx * dx);

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(grid.n_t);
    rows.push(s0.to_vec());
    let mut advect = vec![0.0; n_x];
    for n in 0..grid.n_t - 1 {
        let s = &rows[n];
        upwind_advection(s, advection.row(n), dx, &mut advect);
        let gamma_row = gamma.row(n);
        let mut rhs = vec![0.0; n_x];
        for j in 1..n_x - 1 {
            let lap = (s[j - 1] - 2.0 * s[j] + s[j + 1]) / (dx * dx);
            rhs[j] = s[j] + dt * ((1.0 - fd.theta) * lap + advect[j] + gamma_row[j] * s[j]);
        }
        rhs[0] = psi_vals[n + 1];
        rhs[n_x - 1] = 0.0;
        diffusion_solve(&mut rhs, mu);
        rows.push(rhs);
    }
    Field::from_rows(*grid, rows)
}
