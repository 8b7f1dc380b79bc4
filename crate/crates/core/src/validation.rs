//! The acceptance suite: every empirically testable bound the analysis
//! promises, pinned to concrete grids, ensemble sizes and tolerances.
//!
//! Heavy artifacts (the big path ensemble, the 50-path nonlinear ensemble)
//! are computed once and shared by the criteria that read them; the CLI
//! `validate` subcommand and the `acceptance` test target both run through
//! these functions.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::Result;
use crate::grid::GridSpec;
use crate::heat::{solve_u, verify_w1q_bound};
use crate::jacobi::{sample_uniform, BoundaryPath, JacobiParams, Scheme};
use crate::kernel::DirichletConvolver;
use crate::norms::holder_exponent_estimate;
use crate::scenario::{Command, Scenario};
use crate::solver::{
    energy_report, solve_nonlinear_with, stability_from_solutions, InitialData, ModelParams,
    SolutionPair, SolverConfig,
};

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {:2} [{}] {} - {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

fn feller_reference() -> JacobiParams {
    JacobiParams { alpha: 1.0, gamma_level: 0.5, sigma: 0.5f64.sqrt(), eta: 1.0, psi0: 0.5 }
}

// ---------------------------------------------------------------------------
// Criteria 1-2: boundedness and stationarity of the Jacobi ensemble
// ---------------------------------------------------------------------------

const JACOBI_ENSEMBLE_PATHS: u64 = 10_000;
const JACOBI_ENSEMBLE_NT: usize = 2048;
const JACOBI_ENSEMBLE_T: f64 = 5.0;
const C1_RUNTIME_LIMIT_S: f64 = 10.0;
const C2_MEAN_TARGET: f64 = 0.5;
const C2_MEAN_TOL: f64 = 0.01;
const C2_VAR_TARGET: f64 = 0.05;
const C2_VAR_TOL: f64 = 0.005;

pub struct JacobiStats {
    pub min: f64,
    pub max: f64,
    pub pooled_mean: f64,
    pub pooled_var: f64,
    pub seconds: f64,
}

/// Sample the 10^4-path reference ensemble once; criteria 1 and 2 read it.
pub fn jacobi_ensemble_stats() -> JacobiStats {
    let params = feller_reference();
    let start = Instant::now();
    let per_path: Vec<(f64, f64, f64, f64)> = (0..JACOBI_ENSEMBLE_PATHS)
        .into_par_iter()
        .map(|seed| {
            let path = sample_uniform(
                &params,
                JACOBI_ENSEMBLE_T,
                JACOBI_ENSEMBLE_NT,
                seed,
                Scheme::FullTruncationEuler,
            )
            .expect("reference parameters are valid");
            let values = path.values();
            let half = values.len() / 2;
            let tail = &values[half..];
            let sum: f64 = tail.iter().sum();
            let sumsq: f64 = tail.iter().map(|v| v * v).sum();
            (path.min(), path.max(), sum, sumsq)
        })
        .collect();
    let seconds = start.elapsed().as_secs_f64();

    let min = per_path.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let max = per_path.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let tail_len = (JACOBI_ENSEMBLE_NT - JACOBI_ENSEMBLE_NT / 2) as f64;
    let n_samples = tail_len * JACOBI_ENSEMBLE_PATHS as f64;
    let total: f64 = per_path.iter().map(|p| p.2).sum();
    let total_sq: f64 = per_path.iter().map(|p| p.3).sum();
    let pooled_mean = total / n_samples;
    let pooled_var = total_sq / n_samples - pooled_mean * pooled_mean;
    JacobiStats { min, max, pooled_mean, pooled_var, seconds }
}

pub fn criterion_1(stats: &JacobiStats) -> CriterionReport {
    let in_barriers = stats.min >= 0.0 && stats.max <= 1.0;
    let fast_enough = stats.seconds < C1_RUNTIME_LIMIT_S;
    CriterionReport {
        id: 1,
        name: "jacobi boundedness",
        passed: in_barriers && fast_enough,
        detail: format!(
            "10^4 paths, n_t=2048, T=5: values in [{:.3e}, {}], sampled in {:.2}s (limit {C1_RUNTIME_LIMIT_S}s)",
            stats.min, stats.max, stats.seconds
        ),
    }
}

pub fn criterion_2(stats: &JacobiStats) -> CriterionReport {
    let mean_ok = (stats.pooled_mean - C2_MEAN_TARGET).abs() <= C2_MEAN_TOL;
    let var_ok = (stats.pooled_var - C2_VAR_TARGET).abs() <= C2_VAR_TOL;
    CriterionReport {
        id: 2,
        name: "jacobi stationarity",
        passed: mean_ok && var_ok,
        detail: format!(
            "last-half pooled mean {:.4} (target {C2_MEAN_TARGET} +- {C2_MEAN_TOL}), variance {:.4} (target {C2_VAR_TARGET} +- {C2_VAR_TOL})",
            stats.pooled_mean, stats.pooled_var
        ),
    }
}

// ---------------------------------------------------------------------------
// Criterion 3: roughness exponent of sampled paths
// ---------------------------------------------------------------------------

const C3_PATHS: u64 = 200;
const C3_NT: usize = 4096;
const C3_BAND: (f64, f64) = (0.40, 0.55);

pub fn criterion_3() -> CriterionReport {
    let params = feller_reference();
    let estimates: Vec<f64> = (0..C3_PATHS)
        .into_par_iter()
        .map(|i| {
            let path = sample_uniform(&params, 1.0, C3_NT, 20_000 + i, Scheme::FullTruncationEuler)
                .expect("valid parameters");
            holder_exponent_estimate(&path).expect("nondegenerate path")
        })
        .collect();
    let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
    let passed = (C3_BAND.0..=C3_BAND.1).contains(&mean);
    CriterionReport {
        id: 3,
        name: "holder exponent",
        passed,
        detail: format!(
            "ensemble mean exponent {:.3} over {} paths at n_t={} (band [{}, {}])",
            mean, C3_PATHS, C3_NT, C3_BAND.0, C3_BAND.1
        ),
    }
}

// ---------------------------------------------------------------------------
// Criterion 4: closed-form check of the heat solver
// ---------------------------------------------------------------------------

const C4_TOL: f64 = 1e-4;
const C4_RUNTIME_LIMIT_S: f64 = 30.0;

pub fn criterion_4() -> CriterionReport {
    let grid = GridSpec { t_final: 1.0, n_t: 256, l: 20.0, n_x: 400 };
    let psi = BoundaryPath::from_fn(1.0, 256, |_| 1.0).expect("valid path");
    let start = Instant::now();
    let u = solve_u(&psi, &grid).expect("valid grid");
    let seconds = start.elapsed().as_secs_f64();
    let mut worst = 0.0f64;
    for k in 1..grid.n_t {
        let t = grid.time(k);
        for j in 1..grid.n_x - 1 {
            let exact = libm::erfc(grid.x(j) / (2.0 * t.sqrt()));
            worst = worst.max((u.get(k, j) - exact).abs());
        }
    }
    CriterionReport {
        id: 4,
        name: "heat solver closed form",
        passed: worst < C4_TOL && seconds < C4_RUNTIME_LIMIT_S,
        detail: format!(
            "max interior |u - erfc| = {:.3e} (limit {C4_TOL}), solved in {:.2}s (limit {C4_RUNTIME_LIMIT_S}s)",
            worst, seconds
        ),
    }
}

// ---------------------------------------------------------------------------
// Criterion 5: W^{1,q} control by the C^beta norm, stable under refinement
// ---------------------------------------------------------------------------

const C5_PATHS: u64 = 100;
const C5_BETA: f64 = 0.3;
const C5_Q: f64 = 2.0;
const C5_DRIFT_LIMIT: f64 = 0.10;

pub fn criterion_5() -> CriterionReport {
    // psi(0) = 0: the control of ||u||_{W^{1,q}} by ||psi||_{C^beta} needs a
    // compatible start; an incompatible one puts a dt^{-1/4} layer at the
    // first node and the sup genuinely diverges under refinement.
    let params = JacobiParams { psi0: 0.0, ..feller_reference() };
    let base = GridSpec { t_final: 1.0, n_t: 257, l: 20.0, n_x: 201 };
    let fine = GridSpec { t_final: 1.0, n_t: 513, l: 20.0, n_x: 401 };

    let ratios: Vec<(f64, f64)> = (0..C5_PATHS)
        .into_par_iter()
        .map(|i| {
            // one piecewise-linear boundary signal per member; the doubled
            // run evaluates the same signal on the refined grid, so the
            // drift reads pure discretization error of the diagnostic
            let path = sample_uniform(&params, 1.0, 257, 30_000 + i, Scheme::FullTruncationEuler)
                .expect("valid parameters");
            let refined = path.refine(2).expect("refinement");
            let r_base = verify_w1q_bound(&path, C5_BETA, C5_Q, &base).expect("admissible");
            let r_fine = verify_w1q_bound(&refined, C5_BETA, C5_Q, &fine).expect("admissible");
            (r_base.ratio, r_fine.ratio)
        })
        .collect();

    let max_base = ratios.iter().map(|r| r.0).fold(0.0f64, f64::max);
    let max_fine = ratios.iter().map(|r| r.1).fold(0.0f64, f64::max);
    let drift = (max_fine - max_base).abs() / max_base;
    let passed = max_base.is_finite() && max_fine.is_finite() && drift < C5_DRIFT_LIMIT;
    CriterionReport {
        id: 5,
        name: "W^{1,q}-C^beta control",
        passed,
        detail: format!(
            "max ratio {:.3} at (257,201) vs {:.3} at (513,401): drift {:.1}% (limit {}%)",
            max_base,
            max_fine,
            100.0 * drift,
            100.0 * C5_DRIFT_LIMIT
        ),
    }
}

// ---------------------------------------------------------------------------
// Criteria 6, 7, 9, 10: the 50-path nonlinear ensemble
// ---------------------------------------------------------------------------

const ENSEMBLE_PATHS: u64 = 50;
const ENSEMBLE_SEED_BASE: u64 = 40_000;
const ENSEMBLE_SEED_PARTNER: u64 = 50_000;
const C6_BOUND_TOL: f64 = 1e-6;
const C6_MONOTONE_TOL: f64 = 1e-12;
const C7_MAX_OVER_MEDIAN: f64 = 10.0;
const C7_DRIFT_LIMIT: f64 = 0.10;
const C10_MAX_OVER_MEDIAN: f64 = 20.0;
const C10_BETA: f64 = 0.3;
const C10_SCALING_TOL: f64 = 1e-12;

fn ensemble_model() -> ModelParams {
    ModelParams { lambda: 1.0, b: -1.0, c0_max: 0.5, c0_min: 0.5, eta: 1.0 }
}

fn ensemble_jacobi() -> JacobiParams {
    JacobiParams { alpha: 1.0, gamma_level: 0.5, sigma: 0.5f64.sqrt(), eta: 1.0, psi0: 0.0 }
}

fn ensemble_data(grid: &GridSpec, eta: f64) -> InitialData {
    let s0 = grid
        .xs()
        .iter()
        .map(|&x| (eta * x * (1.0 - x).exp()).min(eta))
        .collect();
    InitialData { s0, c0: vec![0.5; grid.n_x] }
}

/// Fine-grid path restricted to the base grid.
fn restrict(path: &BoundaryPath, n_t: usize, t_final: f64) -> BoundaryPath {
    let vals = path.resample(n_t).expect("refinement");
    let times: Vec<f64> = (0..n_t).map(|k| k as f64 * t_final / (n_t - 1) as f64).collect();
    BoundaryPath::new(times, vals).expect("valid path")
}

pub struct NonlinearEnsemble {
    pub base_grid: GridSpec,
    pub fine_grid: GridSpec,
    pub base: Vec<SolutionPair>,
    pub partner: Vec<SolutionPair>,
    pub psi_base: Vec<BoundaryPath>,
    pub psi_partner: Vec<BoundaryPath>,
    pub fine_energies: Vec<f64>,
}

/// Solve the 50-path ensemble at the base grid, the re-seeded partner set,
/// and the grid-doubled runs (energies only).
pub fn nonlinear_ensemble() -> Result<NonlinearEnsemble> {
    let base_grid = GridSpec { t_final: 1.0, n_t: 129, l: 20.0, n_x: 201 };
    let fine_grid = GridSpec { t_final: 1.0, n_t: 257, l: 20.0, n_x: 401 };
    let jacobi = ensemble_jacobi();
    let model = ensemble_model();
    let cfg = SolverConfig::default();

    // one fine sampling per member; base/partner runs restrict it
    let fine_paths: Vec<BoundaryPath> = (0..ENSEMBLE_PATHS)
        .map(|i| {
            sample_uniform(&jacobi, 1.0, 257, ENSEMBLE_SEED_BASE + i, Scheme::FullTruncationEuler)
        })
        .collect::<Result<_>>()?;
    let partner_paths: Vec<BoundaryPath> = (0..ENSEMBLE_PATHS)
        .map(|i| {
            sample_uniform(
                &jacobi,
                1.0,
                257,
                ENSEMBLE_SEED_PARTNER + i,
                Scheme::FullTruncationEuler,
            )
        })
        .collect::<Result<_>>()?;

    let base_conv = DirichletConvolver::new(&base_grid)?;
    let base_data = ensemble_data(&base_grid, model.eta);
    let psi_base: Vec<BoundaryPath> =
        fine_paths.iter().map(|p| restrict(p, 129, 1.0)).collect();
    let psi_partner: Vec<BoundaryPath> =
        partner_paths.iter().map(|p| restrict(p, 129, 1.0)).collect();

    let base: Vec<SolutionPair> = psi_base
        .par_iter()
        .map(|psi| solve_nonlinear_with(&base_conv, psi, &base_data, &model, &base_grid, &cfg))
        .collect::<Result<_>>()?;
    let partner: Vec<SolutionPair> = psi_partner
        .par_iter()
        .map(|psi| solve_nonlinear_with(&base_conv, psi, &base_data, &model, &base_grid, &cfg))
        .collect::<Result<_>>()?;

    let fine_conv = DirichletConvolver::new(&fine_grid)?;
    let fine_data = ensemble_data(&fine_grid, model.eta);
    let fine_energies: Vec<f64> = fine_paths
        .par_iter()
        .map(|psi| {
            solve_nonlinear_with(&fine_conv, psi, &fine_data, &model, &fine_grid, &cfg)
                .map(|sol| energy_report(&sol.s))
        })
        .collect::<Result<_>>()?;

    Ok(NonlinearEnsemble {
        base_grid,
        fine_grid,
        base,
        partner,
        psi_base,
        psi_partner,
        fine_energies,
    })
}

pub fn criterion_6(ens: &NonlinearEnsemble) -> CriterionReport {
    let mut min_s = f64::INFINITY;
    let mut max_s = f64::NEG_INFINITY;
    let mut min_c = f64::INFINITY;
    let mut max_c = f64::NEG_INFINITY;
    let mut worst_increase = f64::NEG_INFINITY;
    for sol in &ens.base {
        let d = &sol.diagnostics;
        min_s = min_s.min(d.min_s);
        max_s = max_s.max(d.max_s);
        min_c = min_c.min(d.min_c);
        max_c = max_c.max(d.max_c);
        worst_increase = worst_increase.max(d.max_c_increase);
    }
    let passed = min_s >= -C6_BOUND_TOL
        && max_s <= 1.0 + C6_BOUND_TOL
        && min_c >= 0.0
        && max_c <= 0.5 + C6_BOUND_TOL
        && worst_increase <= C6_MONOTONE_TOL;
    CriterionReport {
        id: 6,
        name: "maximum principle",
        passed,
        detail: format!(
            "50 solves: s in [{:.2e}, 1+{:.2e}], c in [{:.3}, {:.3}], max c-increase {:.2e}",
            min_s,
            max_s - 1.0,
            min_c,
            max_c,
            worst_increase
        ),
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn criterion_7(ens: &NonlinearEnsemble) -> CriterionReport {
    let base: Vec<f64> = ens.base.iter().map(|s| s.diagnostics.energy).collect();
    let finite = base.iter().chain(&ens.fine_energies).all(|e| e.is_finite());
    let max = base.iter().copied().fold(0.0f64, f64::max);
    let med = median(&mut base.clone());
    let med_fine = median(&mut ens.fine_energies.clone());
    let drift = (med_fine - med).abs() / med;
    let passed =
        finite && max / med < C7_MAX_OVER_MEDIAN && drift < C7_DRIFT_LIMIT;
    CriterionReport {
        id: 7,
        name: "energy bound",
        passed,
        detail: format!(
            "energies finite, max/median {:.2} (limit {C7_MAX_OVER_MEDIAN}), median drift under doubling {:.1}% (limit {}%)",
            max / med,
            100.0 * drift,
            100.0 * C7_DRIFT_LIMIT
        ),
    }
}

pub fn criterion_9(ens: &NonlinearEnsemble) -> CriterionReport {
    let mut worst_rate = 0.0f64;
    let mut monotone_failures = 0usize;
    let mut bisected = 0usize;
    for sol in &ens.base {
        let d = &sol.diagnostics;
        if let Some(rate) = d.contraction_rate {
            worst_rate = worst_rate.max(rate);
        }
        if !d.distances_monotone {
            monotone_failures += 1;
        }
        if d.bisections > 0 {
            bisected += 1;
        }
    }
    let passed = worst_rate < 1.0 && monotone_failures == 0;
    CriterionReport {
        id: 9,
        name: "outer contraction",
        passed,
        detail: format!(
            "worst fitted rate {:.3} (< 1 required), non-monotone runs {}, runs needing bisection {} (all converged)",
            worst_rate, monotone_failures, bisected
        ),
    }
}

pub fn criterion_10(ens: &NonlinearEnsemble) -> CriterionReport {
    let ratios: Vec<f64> = (0..ens.base.len())
        .map(|i| {
            let gap = ens.psi_base[i].difference(&ens.psi_partner[i]).expect("same grid");
            stability_from_solutions(&ens.base[i], &ens.partner[i], &gap, C10_BETA)
                .expect("distinct paths")
                .ratio
        })
        .collect();
    let finite = ratios.iter().all(|r| r.is_finite());
    let max = ratios.iter().copied().fold(0.0f64, f64::max);
    let med = median(&mut ratios.clone());
    let spread_ok = max / med < C10_MAX_OVER_MEDIAN;

    // linear-regime scaling exactness on one pair with the reaction off
    let scaling = linear_scaling_gap().expect("linear scaling runs");
    let passed = finite && spread_ok && scaling < C10_SCALING_TOL;
    CriterionReport {
        id: 10,
        name: "stability in psi",
        passed,
        detail: format!(
            "50 pairs: ratios finite, max/median {:.2} (limit {C10_MAX_OVER_MEDIAN}); lambda=0 joint-scaling gap {:.2e} (limit {C10_SCALING_TOL})",
            max / med, scaling
        ),
    }
}

/// Relative change of the stability ratio when both signals are scaled by
/// a power of two in the linear (lambda = 0) regime.
fn linear_scaling_gap() -> Result<f64> {
    let grid = GridSpec { t_final: 1.0, n_t: 129, l: 20.0, n_x: 201 };
    let model = ModelParams { lambda: 0.0, ..ensemble_model() };
    let data = ensemble_data(&grid, model.eta);
    let jacobi = ensemble_jacobi();
    let cfg = SolverConfig::default();
    let conv = DirichletConvolver::new(&grid)?;

    let p1 = sample_uniform(&jacobi, 1.0, 129, 61_000, Scheme::FullTruncationEuler)?;
    let p2 = sample_uniform(&jacobi, 1.0, 129, 61_001, Scheme::FullTruncationEuler)?;
    let ratio_once = |a: f64| -> Result<f64> {
        let s1 = solve_nonlinear_with(&conv, &p1.scale(a), &data, &model, &grid, &cfg)?;
        let s2 = solve_nonlinear_with(&conv, &p2.scale(a), &data, &model, &grid, &cfg)?;
        let gap = p1.scale(a).difference(&p2.scale(a))?;
        Ok(stability_from_solutions(&s1, &s2, &gap, C10_BETA)?.ratio)
    };
    let r1 = ratio_once(1.0)?;
    let r2 = ratio_once(0.5)?;
    Ok((r1 - r2).abs() / r1)
}

// ---------------------------------------------------------------------------
// Criterion 8: mild solver against the finite-difference oracle
// ---------------------------------------------------------------------------

const C8_TOL_FINE: f64 = 2e-2;
const C8_MIN_RATIO: f64 = 1.5;

pub fn criterion_8() -> CriterionReport {
    // diffusive grid scaling: halving dx quarters dt, so both error
    // components shrink together and the ratio reads convergence
    let coarse = GridSpec { t_final: 1.0, n_t: 64, l: 20.0, n_x: 200 };
    let fine = GridSpec { t_final: 1.0, n_t: 256, l: 20.0, n_x: 400 };
    let cfg = SolverConfig::default();
    let fd_cfg = crate::fd::FdConfig::default();

    let mut details = Vec::new();
    let mut passed = true;
    for lambda in [0.0, 1.0] {
        let model = ModelParams { lambda, ..ensemble_model() };
        let err_on = |grid: &GridSpec| -> Result<f64> {
            let psi = BoundaryPath::from_fn(grid.t_final, grid.n_t, |t| {
                (std::f64::consts::PI * t / grid.t_final).sin().powi(2)
            })?;
            let data = ensemble_data(grid, model.eta);
            let conv = DirichletConvolver::new(grid)?;
            let mild = solve_nonlinear_with(&conv, &psi, &data, &model, grid, &cfg)?;
            let fd = crate::fd::solve_fd(&psi, &data, &model, grid, &fd_cfg)?;
            Ok(mild.s.relative_l2_distance(&fd.s))
        };
        match (err_on(&coarse), err_on(&fine)) {
            (Ok(e_coarse), Ok(e_fine)) => {
                let ratio = e_coarse / e_fine;
                let ok = e_fine < C8_TOL_FINE && ratio >= C8_MIN_RATIO;
                passed &= ok;
                details.push(format!(
                    "lambda={lambda}: err(200)={:.2e}, err(400)={:.2e} (limit {C8_TOL_FINE}), ratio {:.2} (>= {C8_MIN_RATIO})",
                    e_coarse, e_fine, ratio
                ));
            }
            (a, b) => {
                passed = false;
                details.push(format!("lambda={lambda}: solver error {:?} / {:?}", a.err(), b.err()));
            }
        }
    }
    CriterionReport {
        id: 8,
        name: "mild vs FD oracle",
        passed,
        detail: details.join("; "),
    }
}

// ---------------------------------------------------------------------------
// Criterion 11: byte-level determinism of scenario runs
// ---------------------------------------------------------------------------

pub fn criterion_11() -> CriterionReport {
    let stamp = format!(
        "sulph-determinism-{}-{:?}",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0)
    );
    let root = std::env::temp_dir().join(stamp);

    let run_into = |dir: &std::path::Path| -> Result<Vec<(std::path::PathBuf, Vec<u8>)>> {
        let mut sc = Scenario::default();
        sc.apply("grid.n_t", "65")?;
        sc.apply("grid.n_x", "201")?;
        sc.apply("seed", "4242")?;
        sc.out_dir = dir.to_path_buf();
        let artifacts = crate::scenario::run(&sc, Command::SolveSystem)?;
        let mut blobs = Vec::new();
        for f in artifacts.files {
            let bytes = std::fs::read(&f)?;
            let rel = f.strip_prefix(dir).unwrap_or(&f).to_path_buf();
            blobs.push((rel, bytes));
        }
        Ok(blobs)
    };

    let result = (|| -> Result<(bool, usize)> {
        let a = run_into(&root.join("a"))?;
        let b = run_into(&root.join("b"))?;
        let identical = a.len() == b.len()
            && a.iter().zip(&b).all(|((pa, ba), (pb, bb))| pa == pb && ba == bb);
        Ok((identical, a.len()))
    })();
    std::fs::remove_dir_all(&root).ok();

    match result {
        Ok((identical, n)) => CriterionReport {
            id: 11,
            name: "determinism",
            passed: identical,
            detail: format!("two seeded runs produced {} byte-identical files: {identical}", n),
        },
        Err(e) => CriterionReport {
            id: 11,
            name: "determinism",
            passed: false,
            detail: format!("run failed: {e}"),
        },
    }
}

/// Run the full suite in criterion order.
pub fn run_all() -> Vec<CriterionReport> {
    let mut reports = Vec::with_capacity(11);
    let stats = jacobi_ensemble_stats();
    reports.push(criterion_1(&stats));
    reports.push(criterion_2(&stats));
    reports.push(criterion_3());
    reports.push(criterion_4());
    reports.push(criterion_5());
    match nonlinear_ensemble() {
        Ok(ens) => {
            reports.push(criterion_6(&ens));
            reports.push(criterion_7(&ens));
            reports.push(criterion_8());
            reports.push(criterion_9(&ens));
            reports.push(criterion_10(&ens));
        }
        Err(e) => {
            for (id, name) in [
                (6, "maximum principle"),
                (7, "energy bound"),
                (8, "mild vs FD oracle"),
                (9, "outer contraction"),
                (10, "stability in psi"),
            ] {
                reports.push(CriterionReport {
                    id,
                    name,
                    passed: false,
                    detail: format!("ensemble solve failed: {e}"),
                });
            }
        }
    }
    reports.push(criterion_11());
    reports.sort_by_key(|r| r.id);
    reports
}
