//! Heat equation on the half-line with zero initial datum and a (possibly
//! rough) Dirichlet boundary signal: `u(t, x) = -2 int_0^t dG/dx (t - tau, x)
//! psi(tau) dtau`, plus its spatial derivative and the norm-ratio diagnostics.
//!
//! The boundary integrals are evaluated by product integration: the signal is
//! interpolated piecewise-linearly between time nodes and integrated against
//! the kernel's closed-form antiderivatives cell by cell. The `t^{-3/2}`
//! endpoint concentration of the kernel is absorbed analytically, so no
//! quadrature nodes ever touch the singularity.

use rayon::prelude::*;

use crate::error::{Result, SulphError};
use crate::grid::{Field, GridSpec};
use crate::jacobi::BoundaryPath;
use crate::kernel::{anti_gi, anti_p, anti_q, anti_ri, anti_v, anti_w};
use crate::norms;

/// Boundary-path values on the grid's time nodes. The path must be sampled
/// on the grid nodes or a refinement of them.
pub(crate) fn grid_samples(psi: &BoundaryPath, grid: &GridSpec) -> Result<Vec<f64>> {
    let horizon_gap = (psi.t_final() - grid.t_final).abs();
    if horizon_gap > 1e-9 * grid.t_final.max(1.0) {
        return Err(SulphError::GridMismatch(format!(
            "path horizon {} does not match grid horizon {}",
            psi.t_final(),
            grid.t_final
        )));
    }
    psi.resample(grid.n_t)
}

/// Per-lag product-integration weights for one space node.
///
/// `anti0`/`anti1` are the antiderivatives of the kernel profile and of its
/// first time moment; `w_left[m]`/`w_right[m]` weight the boundary values at
/// the start and end of the cell whose lag from the evaluation time is `m`
/// steps.
fn cell_weights(
    grid: &GridSpec,
    x: f64,
    anti0: impl Fn(f64, f64) -> f64,
    anti1: impl Fn(f64, f64) -> f64,
    nonnegative: bool,
) -> (Vec<f64>, Vec<f64>) {
    let n_t = grid.n_t;
    let dt = grid.dt();
    let mut prev0 = 0.0;
    let mut prev1 = 0.0;
    let mut w_left = vec![0.0; n_t];
    let mut w_right = vec![0.0; n_t];
    for m in 1..n_t {
        let cur0 = anti0(m as f64 * dt, x);
        let cur1 = anti1(m as f64 * dt, x);
        let d0 = cur0 - prev0;
        let d1 = cur1 - prev1;
        let mf = m as f64;
        let mut wl = (1.0 - mf) * d0 + d1 / dt;
        let mut wr = mf * d0 - d1 / dt;
        if nonnegative {
            // analytically >= 0; clip roundoff so positivity of the data
            // transfers to the solution exactly
            wl = wl.max(0.0);
            wr = wr.max(0.0);
        }
        w_left[m] = wl;
        w_right[m] = wr;
        prev0 = cur0;
        prev1 = cur1;
    }
    (w_left, w_right)
}

fn product_integrate_column(
    psi: &[f64],
    w_left: &[f64],
    w_right: &[f64],
    out: &mut [f64],
) {
    let n_t = psi.len();
    for k in 1..n_t {
        let mut acc = 0.0;
        for m in 1..=k {
            acc += psi[k - m] * w_left[m] + psi[k - m + 1] * w_right[m];
        }
        out[k] = acc;
    }
}

fn solve_by_product_integration(
    psi: &BoundaryPath,
    grid: &GridSpec,
    anti0: impl Fn(f64, f64) -> f64 + Sync,
    anti1: impl Fn(f64, f64) -> f64 + Sync,
    nonnegative: bool,
) -> Result<Vec<Vec<f64>>> {
    let samples = grid_samples(psi, grid)?;
    let n_t = grid.n_t;
    let columns: Vec<Vec<f64>> = (1..grid.n_x)
        .into_par_iter()
        .map(|j| {
            let x = grid.x(j);
            let (wl, wr) = cell_weights(grid, x, &anti0, &anti1, nonnegative);
            let mut col = vec![0.0; n_t];
            product_integrate_column(&samples, &wl, &wr, &mut col);
            col
        })
        .collect();

    let mut rows = vec![vec![0.0; grid.n_x]; n_t];
    for (j, col) in columns.iter().enumerate() {
        for k in 0..n_t {
            rows[k][j + 1] = col[k];
        }
    }
    Ok(rows)
}

/// Solve the boundary-driven heat equation. The trace row `x = 0` carries
/// `psi` itself and the initial row is zero.
pub fn solve_u(psi: &BoundaryPath, grid: &GridSpec) -> Result<Field> {
    let samples = grid_samples(psi, grid)?;
    let mut rows = solve_by_product_integration(psi, grid, anti_w, anti_v, true)?;
    for (k, row) in rows.iter_mut().enumerate() {
        row[0] = samples[k];
    }
    rows[0].iter_mut().for_each(|v| *v = 0.0);
    Field::from_rows(*grid, rows)
}

/// Spatial derivative of `u` by differentiating under the integral. The
/// representation degenerates at `x = 0`; that column copies its neighbor.
pub fn solve_dxu(psi: &BoundaryPath, grid: &GridSpec) -> Result<Field> {
    let mut rows = solve_by_product_integration(psi, grid, anti_p, anti_q, false)?;
    for row in rows.iter_mut() {
        row[0] = row[1];
    }
    rows[0].iter_mut().for_each(|v| *v = 0.0);
    Field::from_rows(*grid, rows)
}

/// Alternative derivative route for differentiable boundary data:
/// `du/dx (t, x) = -2 int_0^t G(t - tau, x) psi'(tau) dtau`,
/// with `psi_dot` the sampled derivative of the boundary signal.
pub fn solve_dxu_smooth(psi_dot: &BoundaryPath, grid: &GridSpec) -> Result<Field> {
    let samples = grid_samples(psi_dot, grid)?;
    let n_t = grid.n_t;
    let columns: Vec<Vec<f64>> = (0..grid.n_x)
        .into_par_iter()
        .map(|j| {
            let x = grid.x(j);
            let (wl, wr) = cell_weights(
                grid,
                x,
                |s, x| -2.0 * anti_gi(s, x),
                |s, x| -2.0 * anti_ri(s, x),
                false,
            );
            let mut col = vec![0.0; n_t];
            product_integrate_column(&samples, &wl, &wr, &mut col);
            col
        })
        .collect();
    let mut rows = vec![vec![0.0; grid.n_x]; n_t];
    for (j, col) in columns.iter().enumerate() {
        for k in 0..n_t {
            rows[k][j] = col[k];
        }
    }
    Field::from_rows(*grid, rows)
}

/// Ratio `sup_t ||u(t, .)||_{W^{1,q}} / ||psi||_{C^beta}` for one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct W1qReport {
    pub beta: f64,
    pub q: f64,
    pub sup_w1q: f64,
    pub holder: f64,
    /// `0/0` (an identically zero path) is reported as NaN.
    pub ratio: f64,
}

/// Measure the boundary-to-solution control ratio for admissible `(beta, q)`:
/// `0 < beta < 1/2` and `1 <= q < 1/(1 - 2 beta)`.
pub fn verify_w1q_bound(
    psi: &BoundaryPath,
    beta: f64,
    q: f64,
    grid: &GridSpec,
) -> Result<W1qReport> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(SulphError::InvalidParameter(format!(
            "w1q bound needs 0 < beta < 1/2, got {beta}"
        )));
    }
    let q_max = 1.0 / (1.0 - 2.0 * beta);
    if !(1.0..q_max).contains(&q) {
        return Err(SulphError::InvalidParameter(format!(
            "w1q bound needs 1 <= q < {q_max}, got {q}"
        )));
    }
    let u = solve_u(psi, grid)?;
    let dx = grid.dx();
    let sup_w1q = (0..grid.n_t)
        .map(|k| norms::sobolev_norm(u.row(k), dx, q, 1).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);
    let holder = norms::holder_norm(psi, beta)?.value;
    let ratio = if sup_w1q == 0.0 && holder == 0.0 {
        f64::NAN
    } else {
        sup_w1q / holder
    };
    Ok(W1qReport { beta, q, sup_w1q, holder, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::l2_norm;
    use crate::jacobi::{sample_uniform, JacobiParams, Scheme};
    use approx::assert_relative_eq;

    fn grid() -> GridSpec {
        GridSpec::new(1.0, 65, 20.0, 201).unwrap()
    }

    fn jacobi_path(seed: u64, n_t: usize) -> BoundaryPath {
        let params = JacobiParams {
            alpha: 1.0,
            gamma_level: 0.5,
            sigma: 0.5f64.sqrt(),
            eta: 1.0,
            psi0: 0.5,
        };
        sample_uniform(&params, 1.0, n_t, seed, Scheme::FullTruncationEuler).unwrap()
    }

    #[test]
    fn zero_boundary_gives_zero_solution() {
        let g = grid();
        let psi = BoundaryPath::from_fn(1.0, 65, |_| 0.0).unwrap();
        let u = solve_u(&psi, &g).unwrap();
        assert_eq!(u.min(), 0.0);
        assert_eq!(u.max(), 0.0);
        let dxu = solve_dxu(&psi, &g).unwrap();
        assert_eq!(dxu.min(), 0.0);
        assert_eq!(dxu.max(), 0.0);
    }

    #[test]
    fn constant_boundary_matches_erfc() {
        // psi == 1: u(t, x) = erfc(x / (2 sqrt(t))). Product integration is
        // exact for constant data, so only special-function roundoff remains.
        let g = grid();
        let psi = BoundaryPath::from_fn(1.0, 65, |_| 1.0).unwrap();
        let u = solve_u(&psi, &g).unwrap();
        for k in [1usize, 16, 64] {
            let t = g.time(k);
            for j in 1..g.n_x {
                let expected = libm::erfc(g.x(j) / (2.0 * t.sqrt()));
                assert!(
                    (u.get(k, j) - expected).abs() < 1e-12,
                    "({k},{j}): {} vs {expected}",
                    u.get(k, j)
                );
            }
        }
        // spec anchor: (t, x) = (1, 1) gives erfc(0.5) ~ 0.4795
        let j_x1 = (1.0 / g.dx()).round() as usize;
        assert_relative_eq!(u.get(64, j_x1), libm::erfc(0.5), max_relative = 1e-12);
    }

    #[test]
    fn trace_row_carries_psi() {
        let g = grid();
        let psi = jacobi_path(3, 65);
        let u = solve_u(&psi, &g).unwrap();
        for k in 0..g.n_t {
            assert_eq!(u.get(k, 0), if k == 0 { 0.0 } else { psi.values()[k] });
        }
    }

    #[test]
    fn accepts_refined_path() {
        let g = grid();
        let fine = jacobi_path(9, 257);
        let coarse_values = fine.resample(65).unwrap();
        let coarse = BoundaryPath::new(
            (0..65).map(|i| i as f64 / 64.0).collect(),
            coarse_values,
        )
        .unwrap();
        let from_fine = solve_u(&fine, &g).unwrap();
        let from_coarse = solve_u(&coarse, &g).unwrap();
        assert_eq!(from_fine, from_coarse);
    }

    #[test]
    fn rejects_mismatched_horizon() {
        let g = grid();
        let psi = BoundaryPath::from_fn(2.0, 65, |_| 1.0).unwrap();
        assert!(matches!(solve_u(&psi, &g), Err(SulphError::GridMismatch(_))));
    }

    #[test]
    fn solution_is_linear_in_the_boundary_data() {
        let g = grid();
        let psi1 = jacobi_path(11, 65);
        let psi2 = jacobi_path(12, 65);
        let combo_vals: Vec<f64> = psi1
            .values()
            .iter()
            .zip(psi2.values())
            .map(|(a, b)| 1.75 * a - 0.4 * b)
            .collect();
        let combo = BoundaryPath::new(psi1.times().to_vec(), combo_vals).unwrap();
        let u1 = solve_u(&psi1, &g).unwrap();
        let u2 = solve_u(&psi2, &g).unwrap();
        let uc = solve_u(&combo, &g).unwrap();
        let mut worst = 0.0f64;
        for k in 0..g.n_t {
            for j in 0..g.n_x {
                let lin = 1.75 * u1.get(k, j) - 0.4 * u2.get(k, j);
                worst = worst.max((uc.get(k, j) - lin).abs());
            }
        }
        assert!(worst < 1e-13, "linearity defect {worst}");
    }

    #[test]
    fn positive_boundary_gives_positive_solution() {
        let g = grid();
        let psi = jacobi_path(21, 65);
        assert!(psi.min() >= 0.0);
        let u = solve_u(&psi, &g).unwrap();
        assert!(u.min() >= 0.0, "min {}", u.min());
    }

    #[test]
    fn tail_decays_exponentially() {
        let g = grid();
        let psi = jacobi_path(31, 65);
        let u = solve_u(&psi, &g).unwrap();
        let k = g.n_t - 1;
        // fit log|u| ~ a - c x on x in [1, 6]
        let j_lo = (1.0 / g.dx()).round() as usize;
        let j_hi = (6.0 / g.dx()).round() as usize;
        let pts: Vec<(f64, f64)> = (j_lo..=j_hi)
            .filter(|&j| u.get(k, j) > 0.0)
            .map(|j| (g.x(j), u.get(k, j).ln()))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let var: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let slope = cov / var;
        assert!(slope < -0.5, "tail decay rate {slope}");
        assert!(u.get(k, g.n_x - 1).abs() < 1e-10);
    }

    #[test]
    fn sup_bound_constant_for_constant_sign_boundary() {
        // |u| <= C sup |psi| with measured C <= 1 + 1e-3 for psi >= 0.
        let g = grid();
        for seed in [1u64, 2, 3] {
            let psi = jacobi_path(seed, 65);
            let u = solve_u(&psi, &g).unwrap();
            let c = u.max() / psi.sup_norm();
            assert!(c <= 1.0 + 1e-3, "sup ratio {c}");
        }
    }

    #[test]
    fn lp_bounds_uniform_in_time() {
        // sup_t ||u(t,.)||_{L^p} <= C sup|psi| for p in {1, 2, inf}.
        let g = grid();
        let psi = jacobi_path(17, 65);
        let u = solve_u(&psi, &g).unwrap();
        let sup_psi = psi.sup_norm();
        for p in [1.0, 2.0, f64::INFINITY] {
            let sup_norm = (1..g.n_t)
                .map(|k| norms::sobolev_norm(u.row(k), g.dx(), p, 0).unwrap().value)
                .fold(0.0f64, f64::max);
            let c = sup_norm / sup_psi;
            assert!(c.is_finite() && c < 5.0, "p={p}: C={c}");
        }
    }

    #[test]
    fn derivative_routes_agree_for_linear_boundary() {
        // psi(t) = t is its own piecewise-linear interpolant, so the
        // singular and the smooth route integrate the same object exactly.
        let g = grid();
        let psi = BoundaryPath::from_fn(1.0, 65, |t| t).unwrap();
        let psi_dot = BoundaryPath::from_fn(1.0, 65, |_| 1.0).unwrap();
        let singular = solve_dxu(&psi, &g).unwrap();
        let smooth = solve_dxu_smooth(&psi_dot, &g).unwrap();
        for k in 1..g.n_t {
            for j in 1..g.n_x {
                let a = singular.get(k, j);
                let b = smooth.get(k, j);
                assert!(
                    (a - b).abs() <= 1e-12 * (1.0 + a.abs()),
                    "({k},{j}): {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn derivative_routes_agree_for_smooth_boundary() {
        // A genuinely curved C^1 signal: the two routes now differ by their
        // respective interpolation errors only.
        let g = GridSpec::new(1.0, 257, 20.0, 201).unwrap();
        let psi = BoundaryPath::from_fn(1.0, 257, |t| (1.7 * t).sin()).unwrap();
        let psi_dot = BoundaryPath::from_fn(1.0, 257, |t| 1.7 * (1.7 * t).cos()).unwrap();
        let singular = solve_dxu(&psi, &g).unwrap();
        let smooth = solve_dxu_smooth(&psi_dot, &g).unwrap();
        let k = g.n_t - 1;
        let diff: Vec<f64> = (1..g.n_x)
            .map(|j| singular.get(k, j) - smooth.get(k, j))
            .collect();
        let reference: Vec<f64> = (1..g.n_x).map(|j| smooth.get(k, j)).collect();
        let rel = l2_norm(&diff, g.dx()) / l2_norm(&reference, g.dx());
        assert!(rel < 1e-3, "route disagreement {rel}");
    }

    #[test]
    fn near_boundary_derivative_growth_is_inverse_x() {
        // |du/dx (t, x)| <= C sup|psi| / x measured on log-spaced nodes.
        let g = GridSpec::new(1.0, 129, 20.0, 801).unwrap();
        let psi = jacobi_path(41, 129);
        let dxu = solve_dxu(&psi, &g).unwrap();
        let sup_psi = psi.sup_norm();
        let k = g.n_t - 1;
        let mut c_max = 0.0f64;
        let mut j = 1usize;
        while (j as f64) * g.dx() <= 1.0 {
            let x = g.x(j);
            c_max = c_max.max(dxu.get(k, j).abs() * x / sup_psi);
            j *= 2;
        }
        assert!(c_max.is_finite() && c_max < 3.0, "measured C {c_max}");
    }

    #[test]
    fn w1q_ratio_zero_path_is_nan_sentinel() {
        let g = grid();
        let psi = BoundaryPath::from_fn(1.0, 65, |_| 0.0).unwrap();
        let r = verify_w1q_bound(&psi, 0.3, 2.0, &g).unwrap();
        assert!(r.ratio.is_nan());
    }

    #[test]
    fn w1q_ratio_is_scale_invariant() {
        let g = grid();
        let psi = jacobi_path(51, 65);
        let r1 = verify_w1q_bound(&psi, 0.3, 2.0, &g).unwrap();
        let r2 = verify_w1q_bound(&psi.scale(2.0), 0.3, 2.0, &g).unwrap();
        assert_relative_eq!(r1.ratio, r2.ratio, max_relative = 1e-12);
    }

    #[test]
    fn w1q_rejects_inadmissible_exponents() {
        let g = grid();
        let psi = jacobi_path(61, 65);
        // q limit for beta = 0.3 is 2.5
        assert!(verify_w1q_bound(&psi, 0.3, 2.5, &g).is_err());
        assert!(verify_w1q_bound(&psi, 0.3, 3.0, &g).is_err());
        assert!(verify_w1q_bound(&psi, 0.6, 2.0, &g).is_err());
        assert!(verify_w1q_bound(&psi, 0.3, 2.0, &g).is_ok());
    }
}
