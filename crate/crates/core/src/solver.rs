//! Coupled nonlinear solver for the sulphation system via the splitting
//! `s = u + v`.
//!
//! The outer fixed point linearizes the system around a driver `f`: the
//! calcite field `g` has a closed form in terms of `f`, the advection and
//! absorption coefficients follow from `g`, and `v` solves a linear mild
//! equation with zero boundary data by Picard iteration. The converged
//! driver is the solution `s`; the calcite density `c` is then recovered
//! from its exact exponential formula.
//!
//! If either fixed point stops contracting, the time interval is bisected
//! and the two halves are solved in sequence, restarting from the midpoint
//! state.

use rayon::prelude::*;

use crate::error::{Result, SulphError};
use crate::grid::{fd_derivative, l2_norm, trapz, Field, GridSpec};
use crate::heat::{grid_samples, solve_dxu, solve_u};
use crate::jacobi::BoundaryPath;
use crate::kernel::DirichletConvolver;
use crate::norms;

/// Maximum bisection depth before the solve is abandoned.
const MAX_BISECTION_DEPTH: usize = 8;

/// Reaction-diffusion model constants with the porosity `phi(c) = 1 + B c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Reaction rate (>= 0).
    pub lambda: f64,
    /// Porosity slope, +1 or -1 (-1 for marble sulphation).
    pub b: f64,
    /// Upper bound of the initial calcite density (C0).
    pub c0_max: f64,
    /// Lower bound of the initial calcite density (m > 0).
    pub c0_min: f64,
    /// Bound for the boundary signal and the initial concentration.
    pub eta: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(SulphError::InvalidParameter(format!(
                "lambda must be nonnegative, got {}",
                self.lambda
            )));
        }
        if self.b != 1.0 && self.b != -1.0 {
            return Err(SulphError::InvalidParameter(format!(
                "porosity slope B must be +1 or -1, got {}",
                self.b
            )));
        }
        if !(self.c0_min > 0.0 && self.c0_min <= self.c0_max) {
            return Err(SulphError::InvalidParameter(format!(
                "calcite bounds need 0 < m <= C0, got m={} C0={}",
                self.c0_min, self.c0_max
            )));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(SulphError::InvalidParameter(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        if self.b == -1.0 && !(self.c0_max < 1.0) {
            return Err(SulphError::PorosityDegeneracy(format!(
                "B = -1 requires C0 < 1 so that min phi > 0, got C0 = {}",
                self.c0_max
            )));
        }
        if self.b == 1.0 && !(self.eta < 1.0) {
            return Err(SulphError::InvalidParameter(format!(
                "B = +1 requires eta < 1, got eta = {}",
                self.eta
            )));
        }
        Ok(())
    }

    /// Minimum porosity over the admissible calcite range.
    pub fn phi_min(&self) -> f64 {
        if self.b < 0.0 {
            1.0 - self.c0_max
        } else {
            1.0
        }
    }
}

/// Initial profiles for `s` and `c` on the space grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub s0: Vec<f64>,
    pub c0: Vec<f64>,
}

impl InitialData {
    pub fn validate(&self, grid: &GridSpec, params: &ModelParams) -> Result<()> {
        if self.s0.len() != grid.n_x || self.c0.len() != grid.n_x {
            return Err(SulphError::GridMismatch(format!(
                "initial data length {}/{} does not match n_x = {}",
                self.s0.len(),
                self.c0.len(),
                grid.n_x
            )));
        }
        if self.s0.iter().chain(&self.c0).any(|v| !v.is_finite()) {
            return Err(SulphError::InvalidParameter("initial data must be finite".into()));
        }
        let tol = 1e-12 * params.eta.max(1.0);
        if self.s0.iter().any(|&v| v < -tol || v > params.eta + tol) {
            return Err(SulphError::InvalidParameter(
                "s0 must lie in [0, eta]".into(),
            ));
        }
        if self.s0[0].abs() > tol {
            return Err(SulphError::InvalidParameter(format!(
                "s0(0) must vanish, got {}",
                self.s0[0]
            )));
        }
        let ctol = 1e-12 * params.c0_max.max(1.0);
        if self.c0.iter().any(|&v| v < params.c0_min - ctol || v > params.c0_max + ctol) {
            return Err(SulphError::InvalidParameter(
                "c0 must lie in [m, C0]".into(),
            ));
        }
        // surrogate for W^{1,2} membership: both profiles flat at the truncation
        let tail_tol = 1e-5;
        if self.s0[grid.n_x - 1].abs() > tail_tol * params.eta {
            return Err(SulphError::InvalidParameter(
                "s0 must decay to 0 at the truncation boundary".into(),
            ));
        }
        if (params.c0_max - self.c0[grid.n_x - 1]).abs() > tail_tol * params.c0_max {
            return Err(SulphError::InvalidParameter(
                "C0 - c0 must decay to 0 at the truncation boundary".into(),
            ));
        }
        Ok(())
    }
}

/// Tolerances and iteration caps for the nested fixed points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Relative tolerance for the inner Picard iteration (L^inf_t W^{1,2}_x).
    pub picard_tol: f64,
    pub max_picard: usize,
    /// Relative tolerance for the outer driver map.
    pub outer_tol: f64,
    pub max_outer: usize,
    /// Retained for scenario compatibility: the mild solver integrates its
    /// singular kernels in closed form and spends no quadrature nodes.
    pub quad_nodes: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            picard_tol: 1e-8,
            max_picard: 80,
            outer_tol: 1e-6,
            max_outer: 30,
            quad_nodes: 32,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.picard_tol > 0.0) || !(self.outer_tol > 0.0) {
            return Err(SulphError::InvalidParameter(
                "solver tolerances must be positive".into(),
            ));
        }
        if self.max_picard == 0 || self.max_outer == 0 || self.quad_nodes == 0 {
            return Err(SulphError::InvalidParameter(
                "solver iteration caps must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Convergence bookkeeping and invariant margins of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveDiagnostics {
    pub outer_iterations: usize,
    pub picard_iterations: Vec<usize>,
    pub outer_distances: Vec<f64>,
    /// Geometric rate fitted to the outer distances (None below 2 samples).
    pub contraction_rate: Option<f64>,
    /// Whether the outer distances decreased monotonically after the first.
    pub distances_monotone: bool,
    pub bisections: usize,
    pub energy: f64,
    pub min_s: f64,
    pub max_s: f64,
    pub min_c: f64,
    pub max_c: f64,
    /// Largest increase of `c` between consecutive time nodes (monotonicity
    /// margin; nonpositive up to roundoff).
    pub max_c_increase: f64,
}

impl SolveDiagnostics {
    pub fn report(&self) -> Vec<(String, String)> {
        let mut rows = vec![
            ("outer_iterations".into(), self.outer_iterations.to_string()),
            (
                "picard_iterations".into(),
                self.picard_iterations
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
            (
                "outer_distances".into(),
                self.outer_distances
                    .iter()
                    .map(|d| format!("{d:e}"))
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
            ("distances_monotone".into(), self.distances_monotone.to_string()),
            ("bisections".into(), self.bisections.to_string()),
            ("energy".into(), format!("{}", self.energy)),
            ("min_s".into(), format!("{}", self.min_s)),
            ("max_s".into(), format!("{}", self.max_s)),
            ("min_c".into(), format!("{}", self.min_c)),
            ("max_c".into(), format!("{}", self.max_c)),
            ("max_c_increase".into(), format!("{}", self.max_c_increase)),
        ];
        if let Some(rate) = self.contraction_rate {
            rows.push(("contraction_rate".into(), format!("{rate}")));
        }
        rows
    }
}

/// The computed solution: `s` is the assembled splitting `u + v` (never
/// re-clamped), `c` the calcite density, `dxs` the carried derivative
/// (analytic for the boundary part, finite differences for `v`).
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPair {
    pub s: Field,
    pub c: Field,
    pub dxs: Field,
    pub diagnostics: SolveDiagnostics,
}

// ---------------------------------------------------------------------------
// Linearized pieces
// ---------------------------------------------------------------------------

/// Closed form of the calcite field driven by `f`:
/// `g = c0 / (phi(c0) exp(lambda int_0^t f) - B c0)`.
pub fn compute_g(f: &Field, c0: &[f64], params: &ModelParams) -> Result<Field> {
    params.validate()?;
    if c0.len() != f.grid.n_x {
        return Err(SulphError::GridMismatch("c0 length != n_x".into()));
    }
    if f.min() < -1e-12 * params.eta.max(1.0) {
        return Err(SulphError::InvalidParameter(format!(
            "compute_g needs f >= 0, got min {}",
            f.min()
        )));
    }
    if f.max() > params.eta * (1.0 + 1e-9) {
        return Err(SulphError::InvalidParameter(format!(
            "compute_g needs f <= eta, got max {}",
            f.max()
        )));
    }
    let b = params.b;
    let integral = f.cumtrapz_time();
    let mut g = Field::zeros(f.grid);
    for k in 0..f.grid.n_t {
        let row_i = integral.row(k);
        let row_g = g.row_mut(k);
        for j in 0..row_g.len() {
            let c = c0[j];
            let h = (params.lambda * row_i[j]).exp();
            row_g[j] = c / ((1.0 + b * c) * h - b * c);
        }
    }
    if params.b < 0.0 {
        let limit = 1.0 - params.phi_min() / 2.0;
        if g.max() > limit {
            return Err(SulphError::PorosityDegeneracy(format!(
                "calcite field reached {} > {limit}",
                g.max()
            )));
        }
    }
    Ok(g)
}

/// Spatial derivative of `g` by the chain rule through the closed form,
/// given the driver derivative `dxf` and the initial-profile derivative.
pub fn dx_g(
    f: &Field,
    dxf: &Field,
    c0: &[f64],
    dxc0: &[f64],
    params: &ModelParams,
) -> Result<Field> {
    params.validate()?;
    if c0.len() != f.grid.n_x || dxc0.len() != f.grid.n_x || dxf.grid != f.grid {
        return Err(SulphError::GridMismatch(
            "dx_g inputs do not share the grid".into(),
        ));
    }
    let b = params.b;
    let lambda = params.lambda;
    let int_f = f.cumtrapz_time();
    let int_dxf = dxf.cumtrapz_time();
    let mut out = Field::zeros(f.grid);
    for k in 0..f.grid.n_t {
        let row_if = int_f.row(k);
        let row_idxf = int_dxf.row(k);
        let row = out.row_mut(k);
        for j in 0..row.len() {
            let c = c0[j];
            let phi = 1.0 + b * c;
            let h = (lambda * row_if[j]).exp();
            let dxh = lambda * h * row_idxf[j];
            let den = phi * h - b * c;
            let drho_dx = -c * phi * dxh / (den * den);
            let drho_dc = 1.0 / den - b * (h - 1.0) * c / (den * den);
            row[j] = drho_dx + drho_dc * dxc0[j];
        }
    }
    Ok(out)
}

/// Advection and absorption coefficients of the linearized equation:
/// `b = B dxg / (1 + B g)`, `gamma_tilde = -lambda (1 - B f) g`.
pub fn assemble_coefficients(
    g: &Field,
    dxg: &Field,
    f: &Field,
    params: &ModelParams,
) -> Result<(Field, Field)> {
    params.validate()?;
    if g.grid != dxg.grid || g.grid != f.grid {
        return Err(SulphError::GridMismatch(
            "coefficient inputs do not share the grid".into(),
        ));
    }
    let b = params.b;
    let phi_floor = params.phi_min() / 2.0;
    let mut porosity_min = f64::INFINITY;
    let advection = g.zip_with(dxg, |gv, dgv| {
        let phi = 1.0 + b * gv;
        b * dgv / phi
    });
    for &gv in g.values() {
        porosity_min = porosity_min.min((1.0 + b * gv).abs());
    }
    if porosity_min < phi_floor {
        return Err(SulphError::PorosityDegeneracy(format!(
            "|1 + B g| fell to {porosity_min}, below {phi_floor}"
        )));
    }
    let lambda = params.lambda;
    let gamma_tilde = g.zip_with(f, |gv, fv| -lambda * (1.0 - b * fv) * gv);
    Ok((advection, gamma_tilde))
}

struct PicardOutcome {
    v: Field,
    iterations: usize,
}

/// Picard iteration for the mild zero-boundary problem
/// `v = Gbar * v0 + int Gbar * (b dx v + gamma v) + int Gbar * (b dxu + gamma u)`.
fn picard_v(
    conv: &DirichletConvolver,
    advection: &Field,
    gamma: &Field,
    u: &Field,
    dxu: &Field,
    v0: &[f64],
    cfg: &SolverConfig,
    warm: Option<Field>,
) -> Result<PicardOutcome> {
    let grid = advection.grid;
    let dx = grid.dx();

    let base_rows: Vec<Vec<f64>> = (0..grid.n_t)
        .into_par_iter()
        .map(|k| conv.convolve_node(k, v0))
        .collect();
    let base = Field::from_rows(grid, base_rows)?;
    let fixed_integrand = advection.zip_with(dxu, |a, d| a * d).zip_with(
        &gamma.zip_with(u, |c, uv| c * uv),
        |x, y| x + y,
    );
    let rhs0 = base.zip_with(&conv.volterra(&fixed_integrand), |a, b| a + b);

    let w12 = |field: &Field| -> f64 {
        (0..grid.n_t)
            .map(|k| {
                let row = field.row(k);
                let d = fd_derivative(row, dx);
                (l2_norm(row, dx).powi(2) + l2_norm(&d, dx).powi(2)).sqrt()
            })
            .fold(0.0f64, f64::max)
    };

    let mut h = warm.unwrap_or_else(|| rhs0.clone());
    let mut deltas: Vec<f64> = Vec::new();
    for iter in 0..cfg.max_picard {
        let dxh = h.dx_field();
        let integrand = advection
            .zip_with(&dxh, |a, d| a * d)
            .zip_with(&gamma.zip_with(&h, |c, hv| c * hv), |x, y| x + y);
        let h_new = rhs0.zip_with(&conv.volterra(&integrand), |a, b| a + b);

        let diff = h_new.zip_with(&h, |a, b| a - b);
        let scale = w12(&h_new).max(1e-300);
        let delta = w12(&diff) / scale;
        deltas.push(delta);
        h = h_new;
        if delta < cfg.picard_tol {
            return Ok(PicardOutcome { v: h, iterations: iter + 1 });
        }
        let n = deltas.len();
        if n >= 4 && (n - 3..n).all(|i| deltas[i] > deltas[i - 1]) {
            return Err(SulphError::NonContraction(format!(
                "picard distances rose for 3 consecutive iterations (last {delta:e})"
            )));
        }
    }
    Err(SulphError::NonContraction(format!(
        "picard cap {} exhausted (last delta {:e})",
        cfg.max_picard,
        deltas.last().copied().unwrap_or(f64::NAN)
    )))
}

/// Solve the linear mild equation for `v` with given coefficients and
/// boundary-layer fields. Public entry for manufactured-coefficient runs;
/// `v0(0) = 0` is required here.
pub fn solve_v_linear(
    advection: &Field,
    gamma: &Field,
    u: &Field,
    dxu: &Field,
    v0: &[f64],
    grid: &GridSpec,
    cfg: &SolverConfig,
) -> Result<Field> {
    cfg.validate()?;
    if v0.len() != grid.n_x {
        return Err(SulphError::GridMismatch("v0 length != n_x".into()));
    }
    if v0[0].abs() > 1e-12 {
        return Err(SulphError::InvalidParameter(format!(
            "solve_v_linear needs v0(0) = 0, got {}",
            v0[0]
        )));
    }
    let conv = DirichletConvolver::new(grid)?;
    picard_v(&conv, advection, gamma, u, dxu, v0, cfg, None).map(|o| o.v)
}

// ---------------------------------------------------------------------------
// Outer fixed point
// ---------------------------------------------------------------------------

struct WindowSolution {
    s: Field,
    dxs: Field,
    c: Field,
    picard_iterations: Vec<usize>,
    outer_distances: Vec<f64>,
    bisections: usize,
}

/// `sup_t ||row||_{L2} + (int_0^T ||dx row||_{L2}^2 dt)^{1/2}` of a
/// difference field, the metric of the outer driver map.
fn driver_metric(diff: &Field, diff_dx: &Field) -> f64 {
    let dx = diff.grid.dx();
    let dt = diff.grid.dt();
    let sup: f64 = (0..diff.grid.n_t)
        .map(|k| l2_norm(diff.row(k), dx))
        .fold(0.0, f64::max);
    let sq: Vec<f64> = (0..diff.grid.n_t)
        .map(|k| l2_norm(diff_dx.row(k), dx).powi(2))
        .collect();
    sup + trapz(&sq, dt).sqrt()
}

fn calcite_from_driver(f_clamped: &Field, c0: &[f64], params: &ModelParams) -> Result<Field> {
    compute_g(f_clamped, c0, params)
}

#[allow(clippy::too_many_arguments)]
fn solve_window(
    psi_vals: &[f64],
    s0: &[f64],
    c0: &[f64],
    grid: GridSpec,
    conv: &DirichletConvolver,
    params: &ModelParams,
    cfg: &SolverConfig,
    depth: usize,
) -> Result<WindowSolution> {
    let times: Vec<f64> = (0..grid.n_t).map(|k| k as f64 * grid.dt()).collect();
    let psi = BoundaryPath::new(times, psi_vals.to_vec())?;

    let u = solve_u(&psi, &grid)?;
    let dxu = solve_dxu(&psi, &grid)?;
    let dxc0 = fd_derivative(c0, grid.dx());

    let base_rows: Vec<Vec<f64>> = (0..grid.n_t)
        .into_par_iter()
        .map(|k| conv.convolve_node(k, s0))
        .collect();
    let base_v = Field::from_rows(grid, base_rows)?;

    let eta = params.eta;
    let mut f = u.zip_with(&base_v, |a, b| (a + b).clamp(0.0, eta));
    let mut dxf = dxu.zip_with(&base_v.dx_field(), |a, b| a + b);
    let mut v_warm: Option<Field> = None;
    let mut v_final: Option<Field> = None;

    let mut picard_iterations = Vec::new();
    let mut outer_distances = Vec::new();
    let mut converged = false;

    for _outer in 0..cfg.max_outer {
        let g = compute_g(&f, c0, params)?;
        let dxg = dx_g(&f, &dxf, c0, &dxc0, params)?;
        let (advection, gamma) = assemble_coefficients(&g, &dxg, &f, params)?;

        let picard = match picard_v(conv, &advection, &gamma, &u, &dxu, s0, cfg, v_warm.take()) {
            Ok(out) => out,
            Err(SulphError::NonContraction(_)) => {
                return bisect_window(psi_vals, s0, c0, grid, conv, params, cfg, depth);
            }
            Err(e) => return Err(e),
        };
        picard_iterations.push(picard.iterations);
        let v = picard.v;

        let f_new = u.zip_with(&v, |a, b| (a + b).clamp(0.0, eta));
        let dxf_new = dxu.zip_with(&v.dx_field(), |a, b| a + b);

        let diff = f_new.zip_with(&f, |a, b| a - b);
        let diff_dx = dxf_new.zip_with(&dxf, |a, b| a - b);
        let distance = driver_metric(&diff, &diff_dx);
        outer_distances.push(distance);

        let scale = driver_metric(&f_new, &dxf_new).max(1e-300);
        f = f_new;
        dxf = dxf_new;
        v_warm = Some(v.clone());
        v_final = Some(v);

        if distance < cfg.outer_tol * scale {
            converged = true;
            break;
        }
    }

    if !converged {
        return bisect_window(psi_vals, s0, c0, grid, conv, params, cfg, depth);
    }

    let v = v_final.expect("converged loop stores v");
    let s = u.zip_with(&v, |a, b| a + b);
    let dxs = dxu.zip_with(&v.dx_field(), |a, b| a + b);
    let c = calcite_from_driver(&f, c0, params)?;

    Ok(WindowSolution {
        s,
        dxs,
        c,
        picard_iterations,
        outer_distances,
        bisections: 0,
    })
}

#[allow(clippy::too_many_arguments)]
fn bisect_window(
    psi_vals: &[f64],
    s0: &[f64],
    c0: &[f64],
    grid: GridSpec,
    conv: &DirichletConvolver,
    params: &ModelParams,
    cfg: &SolverConfig,
    depth: usize,
) -> Result<WindowSolution> {
    if depth >= MAX_BISECTION_DEPTH {
        return Err(SulphError::NonConvergence(format!(
            "fixed point still diverging after {depth} bisections"
        )));
    }
    let n_t = grid.n_t;
    if n_t < 3 {
        return Err(SulphError::NonConvergence(
            "cannot bisect a window of fewer than 3 time nodes".into(),
        ));
    }
    let mid = (n_t - 1) / 2;
    let dt = grid.dt();

    let first_grid = GridSpec::new(mid as f64 * dt, mid + 1, grid.l, grid.n_x)?;
    let first = solve_window(&psi_vals[..=mid], s0, c0, first_grid, conv, params, cfg, depth + 1)?;

    // restart from the midpoint state; the trace there equals psi(t_mid),
    // so the second-half splitting sends the whole field into v0
    let eta = params.eta;
    let s_mid: Vec<f64> = first.s.row(mid).iter().map(|v| v.clamp(0.0, eta)).collect();
    let c_mid = first.c.row(mid).to_vec();
    let second_grid = GridSpec::new((n_t - 1 - mid) as f64 * dt, n_t - mid, grid.l, grid.n_x)?;
    let second = solve_window(
        &psi_vals[mid..],
        &s_mid,
        &c_mid,
        second_grid,
        conv,
        params,
        cfg,
        depth + 1,
    )?;

    let stitch = |a: &Field, b: &Field| -> Result<Field> {
        let mut rows: Vec<Vec<f64>> = (0..=mid).map(|k| a.row(k).to_vec()).collect();
        rows.extend((1..b.grid.n_t).map(|k| b.row(k).to_vec()));
        Field::from_rows(grid, rows)
    };

    Ok(WindowSolution {
        s: stitch(&first.s, &second.s)?,
        dxs: stitch(&first.dxs, &second.dxs)?,
        c: stitch(&first.c, &second.c)?,
        picard_iterations: [first.picard_iterations, second.picard_iterations].concat(),
        outer_distances: [first.outer_distances, second.outer_distances].concat(),
        bisections: 1 + first.bisections + second.bisections,
    })
}

/// Solve the coupled nonlinear system for boundary data satisfying the
/// well-posedness assumptions (`psi(0) = 0`, `0 <= psi <= eta`).
pub fn solve_nonlinear(
    psi: &BoundaryPath,
    data: &InitialData,
    params: &ModelParams,
    grid: &GridSpec,
    cfg: &SolverConfig,
) -> Result<SolutionPair> {
    let conv = DirichletConvolver::new(grid)?;
    solve_nonlinear_with(&conv, psi, data, params, grid, cfg)
}

/// Ensemble entry point: reuse one kernel bank across many solves on the
/// same grid.
pub fn solve_nonlinear_with(
    conv: &DirichletConvolver,
    psi: &BoundaryPath,
    data: &InitialData,
    params: &ModelParams,
    grid: &GridSpec,
    cfg: &SolverConfig,
) -> Result<SolutionPair> {
    params.validate()?;
    cfg.validate()?;
    data.validate(grid, params)?;
    if !conv.accepts(grid) {
        return Err(SulphError::GridMismatch(
            "convolver was built for a different grid".into(),
        ));
    }
    // midpoint kernels must be resolvable on the space grid
    let dx = grid.dx();
    if grid.dt() < 0.25 * dx * dx {
        return Err(SulphError::InvalidParameter(format!(
            "time step {} under-resolves the kernel on dx = {dx}; need dt >= dx^2/4",
            grid.dt()
        )));
    }

    let psi_vals = grid_samples(psi, grid)?;
    let tol = 1e-12 * params.eta.max(1.0);
    if psi_vals.iter().any(|&v| v < -tol || v > params.eta + tol) {
        return Err(SulphError::InvalidParameter(
            "boundary signal must lie in [0, eta]".into(),
        ));
    }
    if psi_vals[0].abs() > tol {
        return Err(SulphError::InvalidParameter(format!(
            "boundary signal must vanish at t = 0, got {}",
            psi_vals[0]
        )));
    }

    let window = solve_window(&psi_vals, &data.s0, &data.c0, *grid, conv, params, cfg, 0)?;
    Ok(finish(window))
}

fn finish(window: WindowSolution) -> SolutionPair {
    let WindowSolution {
        s,
        dxs,
        c,
        picard_iterations,
        outer_distances,
        bisections,
    } = window;

    let contraction_rate = fit_geometric_rate(&outer_distances);
    let distances_monotone = outer_distances.windows(2).skip(1).all(|w| w[1] <= w[0] * (1.0 + 1e-12));

    let mut max_c_increase = f64::NEG_INFINITY;
    for k in 0..c.grid.n_t - 1 {
        for j in 0..c.grid.n_x {
            max_c_increase = max_c_increase.max(c.get(k + 1, j) - c.get(k, j));
        }
    }

    let energy = energy_report(&s);
    let diagnostics = SolveDiagnostics {
        outer_iterations: picard_iterations.len(),
        picard_iterations,
        outer_distances,
        contraction_rate,
        distances_monotone,
        bisections,
        energy,
        min_s: s.min(),
        max_s: s.max(),
        min_c: c.min(),
        max_c: c.max(),
        max_c_increase,
    };
    SolutionPair { s, c, dxs, diagnostics }
}

/// Least-squares geometric rate of a distance sequence: exp(slope of
/// log d_k against k).
fn fit_geometric_rate(distances: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = distances
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0.0)
        .map(|(k, &d)| (k as f64, d.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some((cov / var).exp())
}

/// `sup_t ||s(t,.)||_{L2}^2 + int_0^T ||dx s(t,.)||_{L2}^2 dt` by trapezoid
/// quadrature and centered differences.
pub fn energy_report(s: &Field) -> f64 {
    let dx = s.grid.dx();
    let dt = s.grid.dt();
    let sup_sq = (0..s.grid.n_t)
        .map(|k| l2_norm(s.row(k), dx).powi(2))
        .fold(0.0f64, f64::max);
    let grad_sq: Vec<f64> = (0..s.grid.n_t)
        .map(|k| l2_norm(&fd_derivative(s.row(k), dx), dx).powi(2))
        .collect();
    sup_sq + trapz(&grad_sq, dt)
}

/// Sensitivity of the solution to the boundary signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    /// `[sup_t ||s1-s2||_{L2}^2 + 1/2 int ||dx(s1-s2)||_{L2}^2] / ||psi1-psi2||_{C^beta}^2`
    pub ratio: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub beta: f64,
}

/// Solve the system under both boundary signals and report the stability
/// ratio with `C^beta` normalization of the boundary gap.
#[allow(clippy::too_many_arguments)]
pub fn stability_check(
    psi1: &BoundaryPath,
    psi2: &BoundaryPath,
    data: &InitialData,
    params: &ModelParams,
    grid: &GridSpec,
    cfg: &SolverConfig,
    beta: f64,
) -> Result<StabilityReport> {
    let gap = psi1.difference(psi2)?;
    if gap.sup_norm() == 0.0 {
        return Err(SulphError::InvalidParameter(
            "stability check needs distinct boundary signals".into(),
        ));
    }
    let conv = DirichletConvolver::new(grid)?;
    let sol1 = solve_nonlinear_with(&conv, psi1, data, params, grid, cfg)?;
    let sol2 = solve_nonlinear_with(&conv, psi2, data, params, grid, cfg)?;
    stability_from_solutions(&sol1, &sol2, &gap, beta)
}

/// Stability ratio from already-computed solutions (ensemble reuse).
pub fn stability_from_solutions(
    sol1: &SolutionPair,
    sol2: &SolutionPair,
    psi_gap: &BoundaryPath,
    beta: f64,
) -> Result<StabilityReport> {
    let grid = sol1.s.grid;
    let dx = grid.dx();
    let dt = grid.dt();
    let diff = sol1.s.zip_with(&sol2.s, |a, b| a - b);
    let diff_dx = sol1.dxs.zip_with(&sol2.dxs, |a, b| a - b);
    let sup_sq = (0..grid.n_t)
        .map(|k| l2_norm(diff.row(k), dx).powi(2))
        .fold(0.0f64, f64::max);
    let grad_sq: Vec<f64> = (0..grid.n_t)
        .map(|k| l2_norm(diff_dx.row(k), dx).powi(2))
        .collect();
    let numerator = sup_sq + 0.5 * trapz(&grad_sq, dt);
    let denominator = norms::holder_norm(psi_gap, beta)?.value.powi(2);
    if denominator == 0.0 {
        return Err(SulphError::InvalidParameter(
            "stability check needs distinct boundary signals".into(),
        ));
    }
    Ok(StabilityReport { ratio: numerator / denominator, numerator, denominator, beta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::{sample_uniform, JacobiParams, Scheme};
    use crate::kernel::dirichlet_convolve;
    use approx::assert_relative_eq;

    fn marble_params() -> ModelParams {
        ModelParams { lambda: 1.0, b: -1.0, c0_max: 0.5, c0_min: 0.5, eta: 1.0 }
    }

    fn grid() -> GridSpec {
        GridSpec::new(1.0, 65, 20.0, 201).unwrap()
    }

    fn bump_data(grid: &GridSpec, params: &ModelParams) -> InitialData {
        let s0: Vec<f64> = grid
            .xs()
            .iter()
            .map(|&x| (params.eta * x * (1.0 - x).exp()).min(params.eta))
            .collect();
        let c0 = vec![0.5; grid.n_x];
        InitialData { s0, c0 }
    }

    fn jacobi_psi(seed: u64, n_t: usize, t_final: f64) -> BoundaryPath {
        let params = JacobiParams {
            alpha: 1.0,
            gamma_level: 0.5,
            sigma: 0.5f64.sqrt(),
            eta: 1.0,
            psi0: 0.0,
        };
        sample_uniform(&params, t_final, n_t, seed, Scheme::FullTruncationEuler).unwrap()
    }

    #[test]
    fn model_params_validation() {
        assert!(marble_params().validate().is_ok());
        let bad_b = ModelParams { b: 0.5, ..marble_params() };
        assert!(bad_b.validate().is_err());
        let degenerate = ModelParams { c0_max: 1.5, c0_min: 0.5, ..marble_params() };
        assert!(matches!(degenerate.validate(), Err(SulphError::PorosityDegeneracy(_))));
        let plus_b = ModelParams { b: 1.0, eta: 1.2, ..marble_params() };
        assert!(plus_b.validate().is_err());
    }

    #[test]
    fn g_is_identity_when_driver_vanishes() {
        let g = grid();
        let params = marble_params();
        let c0: Vec<f64> = vec![0.5; g.n_x];
        let f = Field::zeros(g);
        let out = compute_g(&f, &c0, &params).unwrap();
        for k in 0..g.n_t {
            for j in 0..g.n_x {
                assert_relative_eq!(out.get(k, j), c0[j], max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn g_closed_form_anchor() {
        // B=-1, c0=0.5, lambda=1, f==1, t=ln 2 -> g = 1/3.
        let t_final = 2.0f64.ln();
        let g = GridSpec::new(t_final, 129, 20.0, 11).unwrap();
        let params = marble_params();
        let c0 = vec![0.5; g.n_x];
        let f = Field::from_fn(g, |_, _| 1.0);
        let out = compute_g(&f, &c0, &params).unwrap();
        for j in 0..g.n_x {
            assert_relative_eq!(out.get(g.n_t - 1, j), 1.0 / 3.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn g_ignores_driver_when_lambda_zero() {
        let g = grid();
        let params = ModelParams { lambda: 0.0, ..marble_params() };
        let c0 = vec![0.5; g.n_x];
        let f = Field::from_fn(g, |t, x| 0.5 * (t + 1.0) * (-x).exp());
        let out = compute_g(&f, &c0, &params).unwrap();
        assert_relative_eq!(out.min(), 0.5, max_relative = 1e-14);
        assert_relative_eq!(out.max(), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn g_rejects_negative_driver() {
        let g = grid();
        let params = marble_params();
        let c0 = vec![0.5; g.n_x];
        let f = Field::from_fn(g, |_, _| -0.1);
        assert!(compute_g(&f, &c0, &params).is_err());
    }

    #[test]
    fn g_bounds_and_monotonicity() {
        let g = grid();
        let params = marble_params();
        let c0 = vec![0.5; g.n_x];
        let f = Field::from_fn(g, |t, x| (0.8 * (1.0 - (-t).exp()) * (-0.3 * x).exp()).min(1.0));
        let out = compute_g(&f, &c0, &params).unwrap();
        assert!(out.min() >= 0.0 && out.max() <= params.c0_max + 1e-12);
        for k in 0..g.n_t - 1 {
            for j in 0..g.n_x {
                assert!(out.get(k + 1, j) <= out.get(k, j) + 1e-14);
            }
        }
    }

    #[test]
    fn dx_g_constant_inputs_vanish() {
        let g = grid();
        let params = marble_params();
        let c0 = vec![0.5; g.n_x];
        let dxc0 = vec![0.0; g.n_x];
        let f = Field::from_fn(g, |t, _| 0.4 * t.min(1.0));
        let dxf = Field::zeros(g);
        let out = dx_g(&f, &dxf, &c0, &dxc0, &params).unwrap();
        assert!(out.min().abs() < 1e-14 && out.max().abs() < 1e-14);
    }

    #[test]
    fn dx_g_matches_finite_difference_of_compute_g() {
        let g = GridSpec::new(1.0, 33, 20.0, 801).unwrap();
        let params = marble_params();
        let c0: Vec<f64> = g.xs().iter().map(|x| 0.5 - 0.2 * (-(x - 4.0) * (x - 4.0)).exp()).collect();
        let dxc0 = fd_derivative(&c0, g.dx());
        let f = Field::from_fn(g, |t, x| 0.7 * (1.0 - (-t).exp()) * (-0.2 * x).exp());
        let dxf = Field::from_fn(g, |t, x| -0.2 * 0.7 * (1.0 - (-t).exp()) * (-0.2 * x).exp());

        // c0 dips to 0.3 < c0_min: loosen the box for this manufactured case
        let params = ModelParams { c0_min: 0.25, ..params };
        let analytic = dx_g(&f, &dxf, &c0, &dxc0, &params).unwrap();
        let gfield = compute_g(&f, &c0, &params).unwrap();
        let fd = gfield.dx_field();
        let k = g.n_t - 1;
        let diff: Vec<f64> = (0..g.n_x).map(|j| analytic.get(k, j) - fd.get(k, j)).collect();
        let rel = l2_norm(&diff, g.dx()) / l2_norm(fd.row(k), g.dx());
        assert!(rel < 1e-3, "relative l2 {rel}");
    }

    #[test]
    fn dx_g_l2_bound_in_terms_of_data() {
        // sup_t ||dx g||_{L2}^2 <= kappa (||dx c0||^2 + ||dx f||^2_{L2 L2})
        let g = grid();
        let params = marble_params();
        let c0: Vec<f64> = g.xs().iter().map(|x| 0.5 - 0.1 * (-(x - 3.0) * (x - 3.0)).exp()).collect();
        let params = ModelParams { c0_min: 0.35, ..params };
        let dxc0 = fd_derivative(&c0, g.dx());
        let f = Field::from_fn(g, |t, x| 0.9 * (1.0 - (-2.0 * t).exp()) * x * (-x).exp());
        let dxf = Field::from_fn(g, |t, x| 0.9 * (1.0 - (-2.0 * t).exp()) * (1.0 - x) * (-x).exp());
        let out = dx_g(&f, &dxf, &c0, &dxc0, &params).unwrap();

        let sup_sq = (0..g.n_t)
            .map(|k| l2_norm(out.row(k), g.dx()).powi(2))
            .fold(0.0f64, f64::max);
        let dxc0_sq = l2_norm(&dxc0, g.dx()).powi(2);
        let dxf_sq: Vec<f64> = (0..g.n_t).map(|k| l2_norm(dxf.row(k), g.dx()).powi(2)).collect();
        let kappa = sup_sq / (dxc0_sq + trapz(&dxf_sq, g.dt()));
        assert!(kappa.is_finite() && kappa < 50.0, "kappa {kappa}");
    }

    #[test]
    fn coefficients_anchor_values() {
        let g = grid();
        let params = marble_params();
        let gf = Field::from_fn(g, |_, _| 1.0 / 3.0);
        let dxg = Field::zeros(g);
        let f = Field::from_fn(g, |_, _| 1.0);
        let (advection, gamma) = assemble_coefficients(&gf, &dxg, &f, &params).unwrap();
        assert_eq!(advection.max(), 0.0);
        for v in gamma.values() {
            assert_relative_eq!(*v, -2.0 / 3.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn gamma_sign_for_plus_porosity_without_reaction_driver() {
        let g = grid();
        let params = ModelParams { b: 1.0, eta: 0.8, c0_max: 0.5, c0_min: 0.5, lambda: 1.3 };
        let gf = Field::from_fn(g, |_, x| 0.4 * (-0.1 * x).exp());
        let dxg = gf.dx_field();
        let f = Field::zeros(g);
        let (_, gamma) = assemble_coefficients(&gf, &dxg, &f, &params).unwrap();
        assert!(gamma.max() <= 0.0);
    }

    #[test]
    fn v_linear_pure_heat_matches_direct_convolution() {
        // b = gamma = 0, u = 0: a single Picard step is exact Dirichlet flow.
        let g = grid();
        let cfg = SolverConfig::default();
        let zero = Field::zeros(g);
        let v0: Vec<f64> = g.xs().iter().map(|x| x.sin() * (-x).exp()).collect();
        let v = solve_v_linear(&zero, &zero, &zero, &zero, &v0, &g, &cfg).unwrap();
        for k in [1usize, 8, 64] {
            let expected = dirichlet_convolve(g.time(k), &v0, g.dx()).unwrap();
            for j in 0..g.n_x {
                assert!(
                    (v.get(k, j) - expected[j]).abs() < 1e-10,
                    "({k},{j}): {} vs {}",
                    v.get(k, j),
                    expected[j]
                );
            }
        }
    }

    #[test]
    fn v_linear_zero_data_is_zero() {
        let g = grid();
        let cfg = SolverConfig::default();
        let zero = Field::zeros(g);
        let v0 = vec![0.0; g.n_x];
        let v = solve_v_linear(&zero, &zero, &zero, &zero, &v0, &g, &cfg).unwrap();
        assert_eq!(v.min(), 0.0);
        assert_eq!(v.max(), 0.0);
    }

    #[test]
    fn v_linear_rejects_nonzero_trace() {
        let g = grid();
        let cfg = SolverConfig::default();
        let zero = Field::zeros(g);
        let v0 = vec![0.5; g.n_x];
        assert!(solve_v_linear(&zero, &zero, &zero, &zero, &v0, &g, &cfg).is_err());
    }

    #[test]
    fn nonlinear_zero_data_gives_zero_s() {
        let g = grid();
        let params = marble_params();
        let data = InitialData { s0: vec![0.0; g.n_x], c0: vec![0.5; g.n_x] };
        let psi = BoundaryPath::from_fn(1.0, 65, |_| 0.0).unwrap();
        let sol = solve_nonlinear(&psi, &data, &params, &g, &SolverConfig::default()).unwrap();
        assert!(sol.s.max().abs() < 1e-14 && sol.s.min().abs() < 1e-14);
        for k in 0..g.n_t {
            for j in 0..g.n_x {
                assert_relative_eq!(sol.c.get(k, j), 0.5, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn lambda_zero_decouples_into_pure_heat() {
        // With lambda = 0 and spatially constant c0 the system is the heat
        // equation: s = u + Gbar *_D s0 and c == c0.
        let g = grid();
        let params = ModelParams { lambda: 0.0, ..marble_params() };
        let data = bump_data(&g, &params);
        let psi = jacobi_psi(7, 65, 1.0);
        let sol = solve_nonlinear(&psi, &data, &params, &g, &SolverConfig::default()).unwrap();

        let u = solve_u(&psi, &g).unwrap();
        let mut worst = 0.0f64;
        for k in 0..g.n_t {
            let heat = dirichlet_convolve(g.time(k).max(f64::MIN_POSITIVE), &data.s0, g.dx());
            let heat = if k == 0 { data.s0.clone() } else { heat.unwrap() };
            for j in 0..g.n_x {
                let expected = u.get(k, j) + heat[j];
                worst = worst.max((sol.s.get(k, j) - expected).abs());
            }
        }
        assert!(worst < 1e-9, "decoupling defect {worst}");
        assert_relative_eq!(sol.c.min(), 0.5, max_relative = 1e-12);
        assert_relative_eq!(sol.c.max(), 0.5, max_relative = 1e-12);
        assert_eq!(sol.diagnostics.outer_iterations, 1);
    }

    #[test]
    fn nonlinear_solve_respects_maximum_principle() {
        let g = grid();
        let params = marble_params();
        let data = bump_data(&g, &params);
        let psi = jacobi_psi(3, 65, 1.0);
        let sol = solve_nonlinear(&psi, &data, &params, &g, &SolverConfig::default()).unwrap();
        // the assembled splitting carries the boundary trace and the initial
        // data exactly: s(t, 0) = psi(t), s(0, .) = s0
        for k in 1..g.n_t {
            assert_eq!(sol.s.get(k, 0), psi.values()[k]);
        }
        for j in 0..g.n_x {
            assert_eq!(sol.s.get(0, j), data.s0[j]);
        }
        let d = &sol.diagnostics;
        assert!(d.min_s >= -1e-6, "min s {}", d.min_s);
        assert!(d.max_s <= 1.0 + 1e-6, "max s {}", d.max_s);
        assert!(d.min_c >= 0.0 && d.max_c <= 0.5 + 1e-6);
        assert!(d.max_c_increase <= 1e-12, "c increased by {}", d.max_c_increase);
        assert!(d.distances_monotone);
        if let Some(rate) = d.contraction_rate {
            assert!(rate < 1.0, "contraction rate {rate}");
        }
    }

    #[test]
    fn splitting_consistency_and_fixed_point_residual() {
        // Feeding the converged s back as the driver moves the output by
        // less than 2x the outer tolerance.
        let g = grid();
        let params = marble_params();
        let data = bump_data(&g, &params);
        let psi = jacobi_psi(5, 65, 1.0);
        let cfg = SolverConfig::default();
        let sol = solve_nonlinear(&psi, &data, &params, &g, &cfg).unwrap();

        let conv = DirichletConvolver::new(&g).unwrap();
        let u = solve_u(&psi, &g).unwrap();
        let dxu = solve_dxu(&psi, &g).unwrap();
        let eta = params.eta;
        let f = sol.s.map(|v| v.clamp(0.0, eta));
        let dxc0 = fd_derivative(&data.c0, g.dx());
        let gfield = compute_g(&f, &data.c0, &params).unwrap();
        let dxf = sol.dxs.clone();
        let dxg = dx_g(&f, &dxf, &data.c0, &dxc0, &params).unwrap();
        let (advection, gamma) = assemble_coefficients(&gfield, &dxg, &f, &params).unwrap();
        let picard = picard_v(&conv, &advection, &gamma, &u, &dxu, &data.s0, &cfg, None).unwrap();
        let s_again = u.zip_with(&picard.v, |a, b| a + b);

        let diff = s_again.zip_with(&sol.s, |a, b| a - b);
        let diff_dx = diff.dx_field();
        let dist = driver_metric(&diff, &diff_dx);
        let scale = driver_metric(&sol.s, &sol.dxs);
        assert!(dist < 2.0 * cfg.outer_tol * scale, "self-consistency {dist} vs scale {scale}");
    }

    #[test]
    fn strong_reaction_triggers_bisection_and_converges() {
        // At lambda = 16 the Picard map is expansive over the whole horizon;
        // the solver must split the interval until it contracts again.
        let g = grid();
        let params = ModelParams { lambda: 16.0, ..marble_params() };
        let data = bump_data(&g, &params);
        let psi = jacobi_psi(11, 65, 1.0);
        let cfg = SolverConfig::default();
        let sol = solve_nonlinear(&psi, &data, &params, &g, &cfg).unwrap();
        assert!(sol.diagnostics.bisections > 0, "expected at least one bisection");
        assert!(sol.diagnostics.min_s >= -1e-5, "min s {}", sol.diagnostics.min_s);
        assert!(sol.diagnostics.max_s <= 1.0 + 1e-5, "max s {}", sol.diagnostics.max_s);
        assert!(sol.diagnostics.max_c_increase <= 1e-12);
    }

    #[test]
    fn hopeless_caps_surface_as_nonconvergence() {
        let g = grid();
        let params = marble_params();
        let data = bump_data(&g, &params);
        let psi = jacobi_psi(11, 65, 1.0);
        let hopeless = SolverConfig { max_outer: 1, max_picard: 1, ..SolverConfig::default() };
        assert!(matches!(
            solve_nonlinear(&psi, &data, &params, &g, &hopeless),
            Err(SulphError::NonConvergence(_)) | Err(SulphError::NonContraction(_))
        ));
    }

    #[test]
    fn rejects_boundary_data_violating_assumptions() {
        let g = grid();
        let params = marble_params();
        let data = bump_data(&g, &params);
        let cfg = SolverConfig::default();
        // psi(0) != 0
        let bad0 = BoundaryPath::from_fn(1.0, 65, |_| 0.5).unwrap();
        assert!(solve_nonlinear(&bad0, &data, &params, &g, &cfg).is_err());
        // psi > eta
        let big = BoundaryPath::from_fn(1.0, 65, |t| 1.5 * t).unwrap();
        assert!(solve_nonlinear(&big, &data, &params, &g, &cfg).is_err());
    }

    #[test]
    fn energy_of_zero_field() {
        let g = grid();
        assert_eq!(energy_report(&Field::zeros(g)), 0.0);
    }

    #[test]
    fn energy_of_static_exponential() {
        // s(t,x) = e^{-x}: sup term 1/2, gradient term T/2.
        let g = GridSpec::new(2.0, 65, 20.0, 4001).unwrap();
        let s = Field::from_fn(g, |_, x| (-x).exp());
        let e = energy_report(&s);
        assert_relative_eq!(e, 0.5 + 1.0, max_relative = 1e-3);
    }

    #[test]
    fn stability_rejects_identical_paths() {
        let g = grid();
        let params = marble_params();
        let data = bump_data(&g, &params);
        let psi = jacobi_psi(13, 65, 1.0);
        let r = stability_check(&psi, &psi, &data, &params, &g, &SolverConfig::default(), 0.3);
        assert!(r.is_err());
    }

    #[test]
    fn stability_ratio_invariant_under_joint_scaling_when_linear() {
        // lambda = 0, constant c0: s_i = u_i + heat flow, so scaling both
        // signals by a power of two rescales numerator and denominator by
        // exactly the same binary factor.
        let g = grid();
        let params = ModelParams { lambda: 0.0, ..marble_params() };
        let data = bump_data(&g, &params);
        let psi1 = jacobi_psi(17, 65, 1.0);
        let psi2 = jacobi_psi(18, 65, 1.0);
        let cfg = SolverConfig::default();
        let r1 = stability_check(&psi1, &psi2, &data, &params, &g, &cfg, 0.3).unwrap();
        let r2 = stability_check(&psi1.scale(0.5), &psi2.scale(0.5), &data, &params, &g, &cfg, 0.3)
            .unwrap();
        // the shared additive heat-flow term cancels only to rounding, so
        // the ratio matches at machine precision rather than bitwise
        assert_relative_eq!(r1.ratio, r2.ratio, max_relative = 1e-12);
    }
}
