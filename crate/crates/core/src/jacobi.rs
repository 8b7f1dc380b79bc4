//! The mean-reverting Jacobi diffusion used as a stochastic Dirichlet datum.
//!
//! The process solves
//! `d psi = alpha (gamma - psi) dt + sigma sqrt(psi (eta - psi)) dW`
//! on `[0, eta]`. Its stationary law is a Beta distribution stretched to
//! `[0, eta]` with shape parameters `p = 2 alpha gamma / (sigma^2 eta)` and
//! `q = 2 alpha (eta - gamma) / (sigma^2 eta)`; the endpoints are entrance
//! boundaries exactly when the respective shape is >= 1.

use crate::error::{Result, SulphError};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Parameters of the Jacobi SDE together with the initial value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    /// Mean-reversion rate (1/time).
    pub alpha: f64,
    /// Mean-reversion level (concentration).
    pub gamma_level: f64,
    /// Noise amplitude (1/sqrt(time)).
    pub sigma: f64,
    /// Upper barrier (concentration).
    pub eta: f64,
    /// Initial value in `[0, eta]`.
    pub psi0: f64,
}

impl JacobiParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(SulphError::InvalidParameter(format!(
                "jacobi alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.gamma_level > 0.0 && self.gamma_level.is_finite()) {
            return Err(SulphError::InvalidParameter(format!(
                "jacobi gamma must be positive, got {}",
                self.gamma_level
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(SulphError::InvalidParameter(format!(
                "jacobi sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(SulphError::InvalidParameter(format!(
                "jacobi eta must be positive, got {}",
                self.eta
            )));
        }
        if self.gamma_level > self.eta {
            return Err(SulphError::InvalidParameter(format!(
                "jacobi requires gamma <= eta, got gamma={} eta={}",
                self.gamma_level, self.eta
            )));
        }
        if !(0.0..=self.eta).contains(&self.psi0) {
            return Err(SulphError::InvalidParameter(format!(
                "jacobi psi0 must lie in [0, eta], got {}",
                self.psi0
            )));
        }
        Ok(())
    }

    /// Left Beta shape `p = 2 alpha gamma / (sigma^2 eta)`.
    pub fn shape_p(&self) -> f64 {
        2.0 * self.alpha * self.gamma_level / (self.sigma * self.sigma * self.eta)
    }

    /// Right Beta shape `q = 2 alpha (eta - gamma) / (sigma^2 eta)`.
    pub fn shape_q(&self) -> f64 {
        2.0 * self.alpha * (self.eta - self.gamma_level) / (self.sigma * self.sigma * self.eta)
    }
}

/// Feller classification of the two endpoints of `[0, eta]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryClassification {
    pub p: f64,
    pub q: f64,
    pub left_entrance: bool,
    pub right_entrance: bool,
}

impl BoundaryClassification {
    /// True when both endpoints are entrance boundaries, i.e. the drift
    /// dominates the noise at both ends and paths stay inside (0, eta).
    pub fn both_entrance(&self) -> bool {
        self.left_entrance && self.right_entrance
    }
}

/// Classify the endpoints via the Beta shape parameters.
pub fn feller_classify(params: &JacobiParams) -> Result<BoundaryClassification> {
    if !(params.sigma > 0.0) || !(params.eta > 0.0) {
        return Err(SulphError::InvalidParameter(
            "feller classification needs sigma > 0 and eta > 0".into(),
        ));
    }
    params.validate()?;
    let p = params.shape_p();
    let q = params.shape_q();
    Ok(BoundaryClassification {
        p,
        q,
        left_entrance: p >= 1.0,
        right_entrance: q >= 1.0,
    })
}

/// Mean and variance of the stationary (stretched Beta) distribution.
pub fn stationary_moments(params: &JacobiParams) -> Result<(f64, f64)> {
    params.validate()?;
    let p = params.shape_p();
    let q = params.shape_q();
    if !(p > 0.0 && q > 0.0) {
        return Err(SulphError::InvalidParameter(format!(
            "stationary moments need p > 0 and q > 0, got p={p} q={q}"
        )));
    }
    let s = p + q;
    let mean = params.eta * p / s;
    let variance = params.eta * params.eta * p * q / (s * s * (s + 1.0));
    Ok((mean, variance))
}

/// A sampled boundary signal on a uniform time grid starting at t = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPath {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl BoundaryPath {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(SulphError::InvalidParameter(
                "boundary path needs matching times/values with >= 2 nodes".into(),
            ));
        }
        if times[0] != 0.0 {
            return Err(SulphError::InvalidParameter(
                "boundary path must start at t = 0".into(),
            ));
        }
        check_uniform(&times)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SulphError::InvalidParameter(
                "boundary path values must be finite".into(),
            ));
        }
        Ok(Self { times, values })
    }

    /// Uniform sampling of an analytic signal; `f(0)` is kept as given.
    pub fn from_fn(t_final: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 || !(t_final > 0.0) {
            return Err(SulphError::InvalidParameter(
                "boundary path needs n >= 2 and T > 0".into(),
            ));
        }
        let dt = t_final / (n - 1) as f64;
        let times: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let values: Vec<f64> = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn t_final(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Node values of this path on a coarser grid with `n_t` nodes and the
    /// same horizon. The path must be a refinement of that grid.
    pub fn resample(&self, n_t: usize) -> Result<Vec<f64>> {
        if n_t < 2 {
            return Err(SulphError::GridMismatch("need at least 2 nodes".into()));
        }
        let fine = self.len() - 1;
        let coarse = n_t - 1;
        if fine % coarse != 0 {
            return Err(SulphError::GridMismatch(format!(
                "path with {} intervals is not a refinement of {} intervals",
                fine, coarse
            )));
        }
        let stride = fine / coarse;
        Ok((0..n_t).map(|i| self.values[i * stride]).collect())
    }

    /// The same piecewise-linear signal on a grid refined by `factor`:
    /// new nodes take the interpolated values, so the continuum object is
    /// unchanged.
    pub fn refine(&self, factor: usize) -> Result<BoundaryPath> {
        if factor == 0 {
            return Err(SulphError::InvalidParameter("refinement factor must be >= 1".into()));
        }
        let n_new = (self.len() - 1) * factor + 1;
        let dt_new = self.dt() / factor as f64;
        let times: Vec<f64> = (0..n_new).map(|i| i as f64 * dt_new).collect();
        let values: Vec<f64> = (0..n_new)
            .map(|i| {
                let cell = i / factor;
                let frac = (i % factor) as f64 / factor as f64;
                if cell + 1 < self.len() {
                    (1.0 - frac) * self.values[cell] + frac * self.values[cell + 1]
                } else {
                    self.values[cell]
                }
            })
            .collect();
        BoundaryPath::new(times, values)
    }

    /// Pointwise difference of two paths on the same grid.
    pub fn difference(&self, other: &BoundaryPath) -> Result<BoundaryPath> {
        if self.times != other.times {
            return Err(SulphError::GridMismatch(
                "paths live on different time grids".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        BoundaryPath::new(self.times.clone(), values)
    }

    pub fn scale(&self, a: f64) -> BoundaryPath {
        BoundaryPath {
            times: self.times.clone(),
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }
}

fn check_uniform(times: &[f64]) -> Result<()> {
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        return Err(SulphError::InvalidParameter(
            "time grid must be strictly increasing".into(),
        ));
    }
    for i in 1..times.len() {
        let step = times[i] - times[i - 1];
        if (step - dt).abs() > 1e-9 * dt.max(1.0) {
            return Err(SulphError::InvalidParameter(format!(
                "nonuniform time grid: step {i} is {step}, expected {dt}"
            )));
        }
    }
    Ok(())
}

/// Time integrator for the Jacobi SDE.
///
/// Both schemes consume the same Wiener stream; they differ in how the
/// square-root diffusion is kept well defined. Full truncation carries an
/// unclamped internal state and truncates only inside the coefficients;
/// the clamped scheme projects the state onto `[0, eta]` after every step.
/// Either way the emitted path values lie in `[0, eta]` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    FullTruncationEuler,
    ClampedEulerMaruyama,
}

/// Counter-based standard normal stream keyed by (seed, step index).
///
/// Each step consumes a fixed four 32-bit words of ChaCha12 output, so the
/// draw for step `i` is independent of how many earlier draws were made.
/// Refinement studies can therefore rebuild coarse increments as sums of
/// fine ones taken from the same stream.
pub struct WienerStream {
    rng: ChaCha12Rng,
}

impl WienerStream {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha12Rng::seed_from_u64(seed) }
    }

    /// Standard normal draw for the given step index (Box-Muller, fixed
    /// two-u64 consumption).
    pub fn standard_normal(&mut self, step: u64) -> f64 {
        self.rng.set_word_pos(step as u128 * 4);
        let u1 = ((self.rng.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64);
        let u2 = ((self.rng.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64);
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        r * (std::f64::consts::TAU * u2).cos()
    }

    /// Brownian increments over `n` uniform steps of width `dt`.
    pub fn increments(&mut self, n: usize, dt: f64) -> Vec<f64> {
        let sq = dt.sqrt();
        (0..n).map(|i| sq * self.standard_normal(i as u64)).collect()
    }
}

/// Sample one path of the Jacobi SDE on the given uniform time grid.
///
/// The result is a deterministic function of `(params, times, seed, scheme)`.
pub fn sample_path(
    params: &JacobiParams,
    times: &[f64],
    seed: u64,
    scheme: Scheme,
) -> Result<BoundaryPath> {
    params.validate()?;
    if times.len() < 2 || times[0] != 0.0 {
        return Err(SulphError::InvalidParameter(
            "sample grid must start at 0 and have >= 2 nodes".into(),
        ));
    }
    check_uniform(times)?;
    let dt = times[1] - times[0];
    let mut stream = WienerStream::new(seed);
    let increments = stream.increments(times.len() - 1, dt);
    sample_path_with_increments(params, times, &increments, scheme)
}

/// Convenience wrapper building the uniform grid in place.
pub fn sample_uniform(
    params: &JacobiParams,
    t_final: f64,
    n_t: usize,
    seed: u64,
    scheme: Scheme,
) -> Result<BoundaryPath> {
    if n_t < 2 || !(t_final > 0.0) {
        return Err(SulphError::InvalidParameter(
            "sample grid needs n_t >= 2 and T > 0".into(),
        ));
    }
    let dt = t_final / (n_t - 1) as f64;
    let times: Vec<f64> = (0..n_t).map(|i| i as f64 * dt).collect();
    sample_path(params, &times, seed, scheme)
}

/// Integrate the SDE against externally supplied Brownian increments.
///
/// Used directly by refinement studies that share increments between grids.
pub fn sample_path_with_increments(
    params: &JacobiParams,
    times: &[f64],
    increments: &[f64],
    scheme: Scheme,
) -> Result<BoundaryPath> {
    params.validate()?;
    check_uniform(times)?;
    if increments.len() != times.len() - 1 {
        return Err(SulphError::GridMismatch(format!(
            "{} increments for {} nodes",
            increments.len(),
            times.len()
        )));
    }
    let dt = times[1] - times[0];
    let (alpha, gamma, sigma, eta) = (params.alpha, params.gamma_level, params.sigma, params.eta);
    let mut values = Vec::with_capacity(times.len());
    values.push(params.psi0.clamp(0.0, eta));

    match scheme {
        Scheme::FullTruncationEuler => {
            let mut y = params.psi0;
            for &dw in increments {
                let ybar = y.clamp(0.0, eta);
                let diff = (ybar * (eta - ybar)).max(0.0).sqrt();
                y = y + alpha * (gamma - ybar) * dt + sigma * diff * dw;
                values.push(y.clamp(0.0, eta));
            }
        }
        Scheme::ClampedEulerMaruyama => {
            let mut y = params.psi0.clamp(0.0, eta);
            for &dw in increments {
                let diff = (y * (eta - y)).max(0.0).sqrt();
                y = (y + alpha * (gamma - y) * dt + sigma * diff * dw).clamp(0.0, eta);
                values.push(y);
            }
        }
    }

    BoundaryPath::new(times.to_vec(), values)
}
