//! Grid-based estimators for the norms the analysis bounds are stated in:
//! Hölder `C^beta` in time, Lebesgue `L^p`, Sobolev `W^{1,p}` and the
//! Gagliardo fractional seminorm in space.
//!
//! Grid estimators are lower bounds of their continuum counterparts (the
//! sup over pairs only sees grid nodes, `p = inf` norms are grid maxima);
//! they appear only inside ratios and diagnostics, where that is enough.

use crate::error::{Result, SulphError};
use crate::grid::{fd_derivative, trapz};
use crate::jacobi::BoundaryPath;

/// Which norm a [`NormReport`] carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    Holder { beta: f64 },
    Lp { p: f64 },
    Sobolev { p: f64, order: u8 },
    Gagliardo { alpha: f64, p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub kind: NormKind,
    pub value: f64,
}

/// Node cap above which the Hölder pair scan switches to strided sampling.
const HOLDER_PAIR_CAP: usize = 10_000;

/// `sup |psi| + sup_{s<t} |psi(t) - psi(s)| / |t - s|^beta` over grid pairs.
///
/// Above [`HOLDER_PAIR_CAP`] nodes the pair scan runs on a deterministic
/// stride through the grid, which keeps every time scale represented.
pub fn holder_norm(path: &BoundaryPath, beta: f64) -> Result<NormReport> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(SulphError::InvalidParameter(format!(
            "holder exponent must lie in (0, 1], got {beta}"
        )));
    }
    let (times, values) = strided_view(path);
    let mut semi = 0.0f64;
    for i in 0..times.len() {
        for j in i + 1..times.len() {
            let dt = times[j] - times[i];
            let ratio = (values[j] - values[i]).abs() / dt.powf(beta);
            semi = semi.max(ratio);
        }
    }
    Ok(NormReport { kind: NormKind::Holder { beta }, value: path.sup_norm() + semi })
}

fn strided_view(path: &BoundaryPath) -> (Vec<f64>, Vec<f64>) {
    let n = path.len();
    if n <= HOLDER_PAIR_CAP {
        return (path.times().to_vec(), path.values().to_vec());
    }
    let stride = n.div_ceil(HOLDER_PAIR_CAP);
    let idx: Vec<usize> = (0..n).step_by(stride).chain(std::iter::once(n - 1)).collect();
    (
        idx.iter().map(|&i| path.times()[i]).collect(),
        idx.iter().map(|&i| path.values()[i]).collect(),
    )
}

/// Roughness exponent from the dyadic structure function: slope of
/// `log median |psi_{t+h} - psi_t|` against `log h`.
///
/// Lags run dyadically from one step up to an eighth of the horizon so the
/// estimate reads the diffusive scale rather than the mean-reverted one.
pub fn holder_exponent_estimate(path: &BoundaryPath) -> Result<f64> {
    if path.len() < 64 {
        return Err(SulphError::InvalidParameter(format!(
            "exponent estimate needs >= 64 nodes, got {}",
            path.len()
        )));
    }
    let n = path.len();
    let values = path.values();
    let dt = path.dt();
    let max_lag = (n - 1) / 8;

    let mut log_h = Vec::new();
    let mut log_med = Vec::new();
    let mut lag = 1usize;
    while lag <= max_lag {
        let mut incs: Vec<f64> = (0..n - lag)
            .map(|i| (values[i + lag] - values[i]).abs())
            .collect();
        incs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let med = if incs.len() % 2 == 1 {
            incs[incs.len() / 2]
        } else {
            0.5 * (incs[incs.len() / 2 - 1] + incs[incs.len() / 2])
        };
        if med > 0.0 {
            log_h.push((lag as f64 * dt).ln());
            log_med.push(med.ln());
        }
        lag *= 2;
    }
    if log_h.len() < 3 {
        return Err(SulphError::InvalidParameter(
            "degenerate path: too few nonzero increment medians".into(),
        ));
    }
    let n_pts = log_h.len() as f64;
    let mx = log_h.iter().sum::<f64>() / n_pts;
    let my = log_med.iter().sum::<f64>() / n_pts;
    let cov: f64 = log_h.iter().zip(&log_med).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = log_h.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(cov / var)
}

/// Trapezoid `L^p` norm of a space slice, optionally adding the
/// centered-difference derivative (order 1). `p = inf` is the grid max.
pub fn sobolev_norm(slice: &[f64], dx: f64, p: f64, order: u8) -> Result<NormReport> {
    if !(p >= 1.0) {
        return Err(SulphError::InvalidParameter(format!(
            "sobolev norm needs p >= 1, got {p}"
        )));
    }
    if order > 1 {
        return Err(SulphError::InvalidParameter(format!(
            "sobolev order must be 0 or 1, got {order}"
        )));
    }
    if slice.len() < 2 || slice.iter().any(|v| !v.is_finite()) {
        return Err(SulphError::InvalidParameter(
            "sobolev norm needs >= 2 finite samples".into(),
        ));
    }
    if order == 0 {
        return Ok(NormReport { kind: NormKind::Lp { p }, value: lp(slice, dx, p) });
    }
    let deriv = fd_derivative(slice, dx);
    let value = if p.is_infinite() {
        lp(slice, dx, p).max(lp(&deriv, dx, p))
    } else {
        (lp(slice, dx, p).powf(p) + lp(&deriv, dx, p).powf(p)).powf(1.0 / p)
    };
    Ok(NormReport { kind: NormKind::Sobolev { p, order }, value })
}

fn lp(slice: &[f64], dx: f64, p: f64) -> f64 {
    if p.is_infinite() {
        slice.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    } else {
        let powed: Vec<f64> = slice.iter().map(|v| v.abs().powf(p)).collect();
        trapz(&powed, dx).powf(1.0 / p)
    }
}

/// Double-trapezoid Gagliardo seminorm
/// `(iint |f(x)-f(y)|^p / |x-y|^{1+alpha p} dx dy)^{1/p}` over the truncated
/// square, with the singular diagonal band `|x - y| < dx` excluded.
pub fn gagliardo_seminorm(slice: &[f64], dx: f64, alpha: f64, p: f64) -> Result<NormReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SulphError::InvalidParameter(format!(
            "gagliardo seminorm needs 0 < alpha < 1, got {alpha}"
        )));
    }
    if !(p >= 1.0) || p.is_infinite() {
        return Err(SulphError::InvalidParameter(format!(
            "gagliardo seminorm needs finite p >= 1, got {p}"
        )));
    }
    if slice.len() < 3 {
        return Err(SulphError::InvalidParameter(
            "gagliardo seminorm needs >= 3 samples".into(),
        ));
    }
    let n = slice.len();
    let w = |i: usize| if i == 0 || i == n - 1 { 0.5 * dx } else { dx };
    let mut acc = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let sep = (j - i) as f64 * dx;
            let diff = (slice[i] - slice[j]).abs();
            acc += 2.0 * w(i) * w(j) * diff.powf(p) / sep.powf(1.0 + alpha * p);
        }
    }
    Ok(NormReport { kind: NormKind::Gagliardo { alpha, p }, value: acc.powf(1.0 / p) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn linear_path(n: usize) -> BoundaryPath {
        BoundaryPath::from_fn(1.0, n, |t| t).unwrap()
    }

    #[test]
    fn holder_norm_of_constant() {
        let path = BoundaryPath::from_fn(1.0, 65, |_| 0.7).unwrap();
        let r = holder_norm(&path, 0.5).unwrap();
        assert_relative_eq!(r.value, 0.7, max_relative = 1e-14);
    }

    #[test]
    fn holder_seminorm_of_linear_path() {
        // |t - s|^{1 - beta} peaks at the endpoint pair of [0, 1], so the
        // seminorm is exactly 1 for every exponent; the sup norm adds 1.
        for beta in [0.25, 0.5, 0.75, 1.0] {
            let r = holder_norm(&linear_path(129), beta).unwrap();
            assert_relative_eq!(r.value, 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn holder_rejects_bad_beta() {
        assert!(holder_norm(&linear_path(65), 0.0).is_err());
        assert!(holder_norm(&linear_path(65), 1.5).is_err());
    }

    #[test]
    fn holder_norm_capped_scan_stays_close() {
        let fine = BoundaryPath::from_fn(1.0, 40_001, |t| (8.0 * t).sin()).unwrap();
        let coarse = BoundaryPath::from_fn(1.0, 5_001, |t| (8.0 * t).sin()).unwrap();
        let a = holder_norm(&fine, 0.4).unwrap().value;
        let b = holder_norm(&coarse, 0.4).unwrap().value;
        assert!((a - b).abs() / b < 0.01, "cap noise too large: {a} vs {b}");
    }

    #[test]
    fn refining_grid_never_decreases_holder_norm() {
        let f = |t: f64| (6.0 * t).sin() * (1.0 - t) + 0.3 * (19.0 * t).cos();
        let mut prev = 0.0;
        for n in [65usize, 129, 257, 513] {
            let path = BoundaryPath::from_fn(1.0, n, f).unwrap();
            let v = holder_norm(&path, 0.45).unwrap().value;
            assert!(v >= prev - 1e-12, "norm decreased at n={n}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn exponent_of_linear_path_is_one() {
        let est = holder_exponent_estimate(&linear_path(1025)).unwrap();
        assert!((est - 1.0).abs() < 0.01, "estimate {est}");
    }

    #[test]
    fn exponent_of_constant_path_is_flagged() {
        let path = BoundaryPath::from_fn(1.0, 256, |_| 1.0).unwrap();
        assert!(holder_exponent_estimate(&path).is_err());
    }

    #[test]
    fn exponent_needs_enough_nodes() {
        assert!(holder_exponent_estimate(&linear_path(32)).is_err());
    }

    #[test]
    fn jacobi_seminorm_ratio_grows_toward_half() {
        // For beta near 1/2 the seminorm of a rough path keeps growing
        // under refinement while the beta = 0.25 one saturates.
        use crate::jacobi::{sample_uniform, JacobiParams, Scheme};
        let params = JacobiParams {
            alpha: 1.0,
            gamma_level: 0.5,
            sigma: 0.5f64.sqrt(),
            eta: 1.0,
            psi0: 0.5,
        };
        let ratio_at = |n: usize| -> f64 {
            let mut acc = 0.0;
            for seed in 0..8 {
                let p = sample_uniform(&params, 1.0, n, seed, Scheme::FullTruncationEuler).unwrap();
                let hi = holder_norm(&p, 0.49).unwrap().value;
                let lo = holder_norm(&p, 0.25).unwrap().value;
                acc += hi / lo;
            }
            acc / 8.0
        };
        let coarse = ratio_at(257);
        let fine = ratio_at(4097);
        assert!(fine > coarse, "beta=0.49/0.25 ratio should grow: {fine} vs {coarse}");
    }

    #[test]
    fn sobolev_l2_of_exponential() {
        // || e^{-x} ||_{L^2(0,L)} -> sqrt(1/2); truncating at L >= 20
        // contributes less than 1e-8, the rest is O(dx^2) quadrature error.
        let value = |l: f64, n: usize| -> f64 {
            let dx = l / (n - 1) as f64;
            let slice: Vec<f64> = (0..n).map(|i| (-(i as f64) * dx).exp()).collect();
            sobolev_norm(&slice, dx, 2.0, 0).unwrap().value
        };
        let truncation_effect = (value(40.0, 16_001) - value(20.0, 8_001)).abs();
        assert!(truncation_effect < 1e-8, "truncation effect {truncation_effect}");

        let e_coarse = (value(20.0, 2_001) - 0.5f64.sqrt()).abs();
        let e_fine = (value(20.0, 4_001) - 0.5f64.sqrt()).abs();
        assert!(e_fine < 5e-5);
        let order = (e_coarse / e_fine).log2();
        assert!((1.7..2.3).contains(&order), "quadrature order {order}");
    }

    #[test]
    fn sobolev_of_zero_slice() {
        let r = sobolev_norm(&vec![0.0; 100], 0.1, 2.0, 1).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn sobolev_w12_of_x_exp_matches_closed_form() {
        // f = x e^{-x}: ||f||^2 = 1/4, ||f'||^2 = 1/4, so the W^{1,2} norm
        // is sqrt(1/2).
        let n = 8001;
        let dx = 20.0 / (n - 1) as f64;
        let slice: Vec<f64> = (0..n)
            .map(|i| {
                let x = i as f64 * dx;
                x * (-x).exp()
            })
            .collect();
        let r = sobolev_norm(&slice, dx, 2.0, 1).unwrap();
        assert!((r.value - 0.5f64.sqrt()).abs() < 1e-4, "value {}", r.value);
    }

    #[test]
    fn gagliardo_of_constant_is_zero() {
        let r = gagliardo_seminorm(&vec![2.5; 200], 0.05, 0.5, 2.0).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn gagliardo_rejects_out_of_range_alpha() {
        let slice = vec![0.0, 1.0, 0.5, 0.2];
        assert!(gagliardo_seminorm(&slice, 0.1, 1.0, 2.0).is_err());
        assert!(gagliardo_seminorm(&slice, 0.1, 0.0, 2.0).is_err());
    }

    #[test]
    fn gagliardo_stable_under_refinement() {
        let value_at = |n: usize| -> f64 {
            let dx = 20.0 / (n - 1) as f64;
            let slice: Vec<f64> = (0..n).map(|i| (-(i as f64) * dx).exp()).collect();
            gagliardo_seminorm(&slice, dx, 0.5, 2.0).unwrap().value
        };
        let coarse = value_at(401);
        let fine = value_at(801);
        assert!(
            (fine - coarse).abs() / coarse < 0.05,
            "refinement drift {} vs {}",
            coarse,
            fine
        );
    }

    #[test]
    fn embedding_fractional_below_full_sobolev() {
        // || f ||_{W^{alpha,p}} <= C || f ||_{W^{1,p}} on a smooth test set;
        // the measured constant stays modest.
        let n = 801;
        let dx = 20.0 / (n - 1) as f64;
        let profiles: Vec<Vec<f64>> = vec![
            (0..n).map(|i| (-(i as f64) * dx).exp()).collect(),
            (0..n)
                .map(|i| {
                    let x = i as f64 * dx;
                    x * (-x).exp()
                })
                .collect(),
            (0..n)
                .map(|i| {
                    let x = i as f64 * dx;
                    (2.0 * x).sin() * (-x * x / 4.0).exp()
                })
                .collect(),
        ];
        for f in &profiles {
            let l2 = sobolev_norm(f, dx, 2.0, 0).unwrap().value;
            let semi = gagliardo_seminorm(f, dx, 0.5, 2.0).unwrap().value;
            let frac = (l2 * l2 + semi * semi).sqrt();
            let full = sobolev_norm(f, dx, 2.0, 1).unwrap().value;
            let c = frac / full;
            assert!(c.is_finite() && c < 10.0, "embedding constant {c}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        // All norms are homogeneous of degree one in the data.
        #[test]
        fn norms_are_homogeneous(a in 0.1f64..10.0) {
            let n = 201;
            let dx = 20.0 / (n - 1) as f64;
            let slice: Vec<f64> = (0..n)
                .map(|i| {
                    let x = i as f64 * dx;
                    (1.3 * x).sin() * (-x).exp()
                })
                .collect();
            let scaled: Vec<f64> = slice.iter().map(|v| a * v).collect();

            let s0 = sobolev_norm(&slice, dx, 2.0, 1).unwrap().value;
            let s1 = sobolev_norm(&scaled, dx, 2.0, 1).unwrap().value;
            prop_assert!((s1 - a * s0).abs() <= 1e-10 * s1.max(1.0));

            let g0 = gagliardo_seminorm(&slice, dx, 0.4, 2.0).unwrap().value;
            let g1 = gagliardo_seminorm(&scaled, dx, 0.4, 2.0).unwrap().value;
            prop_assert!((g1 - a * g0).abs() <= 1e-10 * g1.max(1.0));

            let path = BoundaryPath::from_fn(1.0, 129, |t| (5.0 * t).sin() * 0.3 + 0.4).unwrap();
            let h0 = holder_norm(&path, 0.3).unwrap().value;
            let h1 = holder_norm(&path.scale(a), 0.3).unwrap().value;
            prop_assert!((h1 - a * h0).abs() <= 1e-10 * h1.max(1.0));
        }
    }
}
