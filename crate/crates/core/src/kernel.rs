//! Gaussian heat kernel on the line, its space derivatives, and the two
//! half-line convolution operators built from it.
//!
//! The Dirichlet kernel is `Gbar(t, x, y) = G(t, x-y) - G(t, x+y)`; its
//! convolution with `f` equals the full-line convolution of `G` with the odd
//! extension of `f`, which is how both the direct and the FFT paths realize
//! it. Closed-form antiderivatives of the kernel time profiles live here as
//! well; the boundary solvers integrate piecewise-linear data against them
//! exactly instead of chasing the `t^{-3/2}` endpoint singularity with
//! quadrature nodes.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, SulphError};
use crate::grid::GridSpec;
use crate::quad::adaptive_simpson;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Largest tolerated kernel mass beyond the truncation boundary.
pub const TRUNCATION_TOL: f64 = 1e-12;

fn require_positive_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(SulphError::InvalidParameter(format!(
            "heat kernel needs t > 0, got {t}"
        )));
    }
    Ok(())
}

/// Check the truncation policy `exp(-L^2 / 4t) < 1e-12` for a horizon `t`.
pub fn check_truncation(l: f64, t: f64) -> Result<()> {
    let tail = (-l * l / (4.0 * t)).exp();
    if tail >= TRUNCATION_TOL {
        return Err(SulphError::InvalidParameter(format!(
            "space truncation L={l} too small for horizon t={t}: kernel tail {tail:.3e}"
        )));
    }
    Ok(())
}

/// `G(t, x) = (4 pi t)^{-1/2} exp(-x^2 / 4t)`.
pub fn eval_g(t: f64, x: f64) -> Result<f64> {
    require_positive_time(t)?;
    Ok(gauss(t, x))
}

#[inline]
fn gauss(t: f64, x: f64) -> f64 {
    (4.0 * std::f64::consts::PI * t).sqrt().recip() * (-x * x / (4.0 * t)).exp()
}

/// `dG/dx = -(1/(4 sqrt(pi))) t^{-3/2} x exp(-x^2/4t)`.
pub fn eval_dxg(t: f64, x: f64) -> Result<f64> {
    require_positive_time(t)?;
    Ok(-0.25 / SQRT_PI * t.powf(-1.5) * x * (-x * x / (4.0 * t)).exp())
}

/// `d^2G/dx^2 = (1/(4 sqrt(pi))) (x^2/(2t) - 1) t^{-3/2} exp(-x^2/4t)`.
pub fn eval_dxxg(t: f64, x: f64) -> Result<f64> {
    require_positive_time(t)?;
    Ok(0.25 / SQRT_PI * (x * x / (2.0 * t) - 1.0) * t.powf(-1.5) * (-x * x / (4.0 * t)).exp())
}

/// `|| G(t, .) ||_{L^p(R_+)} = c_p t^{-(1-1/p)/2}`, with the constant taken
/// from adaptive quadrature of the t = 1 profile.
pub fn lp_norm_g(t: f64, p: f64) -> Result<f64> {
    require_positive_time(t)?;
    check_lp_exponent(p)?;
    let c_p = adaptive_simpson(&|x| gauss(1.0, x).powf(p), 0.0, 60.0, 1e-13, 30).powf(1.0 / p);
    Ok(c_p * t.powf(-(1.0 - 1.0 / p) / 2.0))
}

/// `|| dG/dx (t, .) ||_{L^p(R_+)} = c'_p t^{-(2-1/p)/2}`.
pub fn lp_norm_dxg(t: f64, p: f64) -> Result<f64> {
    require_positive_time(t)?;
    check_lp_exponent(p)?;
    let c_p = adaptive_simpson(&|x| eval_dxg(1.0, x).unwrap().abs().powf(p), 0.0, 60.0, 1e-13, 30)
        .powf(1.0 / p);
    Ok(c_p * t.powf(-(2.0 - 1.0 / p) / 2.0))
}

fn check_lp_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(SulphError::InvalidParameter(format!(
            "Lp norm needs 1 <= p < infinity, got {p}"
        )));
    }
    Ok(())
}

/// Dirichlet convolution `Gbar(t, .) *_D f` by trapezoid quadrature on the
/// truncated grid; the odd extension enters through the reflected kernel.
/// The result vanishes at x = 0 exactly.
pub fn dirichlet_convolve(t: f64, f: &[f64], dx: f64) -> Result<Vec<f64>> {
    require_positive_time(t)?;
    validate_gridded(f, dx)?;
    let n = f.len();
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate().skip(1) {
        let x = i as f64 * dx;
        let mut acc = 0.0;
        for (l, &fy) in f.iter().enumerate() {
            let y = l as f64 * dx;
            let w = if l == 0 || l == n - 1 { 0.5 * dx } else { dx };
            acc += w * (gauss(t, x - y) - gauss(t, x + y)) * fy;
        }
        *o = acc;
    }
    out[0] = 0.0;
    Ok(out)
}

/// `G(t, .) * (df)^{even}`, the spatial derivative of `Gbar(t,.) *_D f`
/// whenever `df` is the derivative of an `f` with `f(0) = 0`.
pub fn even_convolve_derivative(t: f64, df: &[f64], dx: f64) -> Result<Vec<f64>> {
    require_positive_time(t)?;
    validate_gridded(df, dx)?;
    let n = df.len();
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = i as f64 * dx;
        let mut acc = 0.0;
        for (l, &dfy) in df.iter().enumerate() {
            let y = l as f64 * dx;
            let w = if l == 0 || l == n - 1 { 0.5 * dx } else { dx };
            acc += w * (gauss(t, x - y) + gauss(t, x + y)) * dfy;
        }
        *o = acc;
    }
    Ok(out)
}

fn validate_gridded(f: &[f64], dx: f64) -> Result<()> {
    if f.len() < 2 || !(dx > 0.0) {
        return Err(SulphError::InvalidParameter(
            "gridded function needs >= 2 samples and dx > 0".into(),
        ));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(SulphError::InvalidParameter(
            "gridded function must be finite".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Closed-form antiderivatives in sigma of the kernel time profiles. All of
// them vanish as sigma -> 0+ for x > 0, which is exactly why product
// integration of the boundary integrals needs no singular quadrature.
// ---------------------------------------------------------------------------

/// `d/ds anti_w = -2 dG/dx (s, x)`; equals `erfc(x / (2 sqrt(s)))`.
pub(crate) fn anti_w(sigma: f64, x: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    libm::erfc(x / (2.0 * sigma.sqrt()))
}

/// `d/ds anti_v = s * (-2 dG/dx (s, x))`.
pub(crate) fn anti_v(sigma: f64, x: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    let rs = sigma.sqrt();
    let e = (-x * x / (4.0 * sigma)).exp();
    x / SQRT_PI * rs * e - 0.5 * x * x * libm::erfc(x / (2.0 * rs))
}

/// `d/ds anti_p = -2 d2G/dx2 (s, x)`; equals `-2 G(s, x)`.
pub(crate) fn anti_p(sigma: f64, x: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    -(std::f64::consts::PI * sigma).sqrt().recip() * (-x * x / (4.0 * sigma)).exp()
}

/// `d/ds anti_q = s * (-2 d2G/dx2 (s, x))`.
pub(crate) fn anti_q(sigma: f64, x: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    let rs = sigma.sqrt();
    let e = (-x * x / (4.0 * sigma)).exp();
    rs / SQRT_PI * e - x * libm::erfc(x / (2.0 * rs))
}

/// `d/ds anti_gi = G(s, x)`.
pub(crate) fn anti_gi(sigma: f64, x: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    let rs = sigma.sqrt();
    let e = (-x * x / (4.0 * sigma)).exp();
    rs / SQRT_PI * e - 0.5 * x * libm::erfc(x / (2.0 * rs))
}

/// `d/ds anti_ri = s * G(s, x)`.
pub(crate) fn anti_ri(sigma: f64, x: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    let rs = sigma.sqrt();
    let e = (-x * x / (4.0 * sigma)).exp();
    sigma * rs / (3.0 * SQRT_PI) * e - x * x * rs / (6.0 * SQRT_PI) * e
        + x * x * x / 12.0 * libm::erfc(x / (2.0 * rs))
}

// ---------------------------------------------------------------------------
// FFT-backed convolution engine shared by the mild solvers.
// ---------------------------------------------------------------------------

/// Precomputed spectra of the Dirichlet kernel at every grid-aligned time
/// lag, ready to apply to gridded functions via padded circular convolution.
///
/// Node lags `m dt` serve the initial-datum terms; midpoint lags
/// `(m + 1/2) dt` serve the Duhamel time integrals, whose quadrature
/// evaluates the kernel midway through each time cell.
pub struct DirichletConvolver {
    grid: GridSpec,
    n_fft: usize,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    node_spectra: Vec<Vec<Complex<f64>>>,
    mid_spectra: Vec<Vec<Complex<f64>>>,
}

impl DirichletConvolver {
    pub fn new(grid: &GridSpec) -> Result<Self> {
        check_truncation(grid.l, grid.t_final)?;
        let n_x = grid.n_x;
        let kernel_len = 3 * n_x - 2;
        let signal_len = 2 * n_x - 1;
        let n_fft = (kernel_len + signal_len - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n_fft);
        let ifft = planner.plan_fft_inverse(n_fft);

        let dt = grid.dt();
        let spectrum_at = |t: f64| -> Vec<Complex<f64>> {
            let mut buf = vec![Complex::new(0.0, 0.0); n_fft];
            for (idx, b) in buf.iter_mut().enumerate().take(kernel_len) {
                let m = idx as isize - (n_x as isize - 1);
                b.re = gauss(t, m as f64 * grid.dx());
            }
            fft.process(&mut buf);
            buf
        };

        let node_spectra = (1..grid.n_t).map(|m| spectrum_at(m as f64 * dt)).collect();
        let mid_spectra = (0..grid.n_t - 1)
            .map(|m| spectrum_at((m as f64 + 0.5) * dt))
            .collect();

        Ok(Self {
            grid: *grid,
            n_fft,
            fft,
            ifft,
            node_spectra,
            mid_spectra,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Forward FFT of the trapezoid-weighted odd extension of `f`.
    fn signal_spectrum(&self, f: &[f64]) -> Vec<Complex<f64>> {
        let n_x = self.grid.n_x;
        let dx = self.grid.dx();
        let mut buf = vec![Complex::new(0.0, 0.0); self.n_fft];
        for l in 0..2 * n_x - 1 {
            let rel = l as isize - (n_x as isize - 1);
            let mag = rel.unsigned_abs();
            let w = if mag == n_x - 1 { 0.5 * dx } else { dx };
            let val = match rel.signum() {
                1 => f[mag],
                -1 => -f[mag],
                _ => 0.0,
            };
            buf[l].re = w * val;
        }
        self.fft.process(&mut buf);
        buf
    }

    fn extract(&self, mut buf: Vec<Complex<f64>>) -> Vec<f64> {
        self.ifft.process(&mut buf);
        let n_x = self.grid.n_x;
        let scale = 1.0 / self.n_fft as f64;
        // position x_i sits at convolution index i + 2 (n_x - 1)
        let mut out: Vec<f64> = (0..n_x).map(|i| buf[i + 2 * (n_x - 1)].re * scale).collect();
        out[0] = 0.0;
        out
    }

    /// `Gbar(m dt, .) *_D f`; lag index 0 is the identity (the t -> 0 limit).
    pub fn convolve_node(&self, m: usize, f: &[f64]) -> Vec<f64> {
        assert!(m < self.grid.n_t, "lag index out of range");
        if m == 0 {
            return f.to_vec();
        }
        let fhat = self.signal_spectrum(f);
        let spec = &self.node_spectra[m - 1];
        let prod: Vec<Complex<f64>> = fhat.iter().zip(spec).map(|(a, b)| a * b).collect();
        self.extract(prod)
    }

    /// True when a field lives on this convolver's spatial grid with the
    /// same time step and no more time nodes (sub-windows qualify).
    pub fn accepts(&self, grid: &GridSpec) -> bool {
        grid.n_x == self.grid.n_x
            && grid.n_t <= self.grid.n_t
            && (grid.dt() - self.grid.dt()).abs() <= 1e-12 * self.grid.dt()
            && (grid.l - self.grid.l).abs() <= 1e-12 * self.grid.l
    }

    /// All Duhamel integrals `S_k = int_0^{t_k} Gbar(t_k - tau) *_D a(tau) dtau`
    /// by the product trapezoid rule: cell averages of `a` convolved with the
    /// kernel at the cell's midpoint lag. The field may live on a sub-window
    /// of the convolver's grid.
    pub fn volterra(&self, a: &crate::grid::Field) -> crate::grid::Field {
        use rayon::prelude::*;

        assert!(self.accepts(&a.grid), "field grid incompatible with convolver");
        let n_t = a.grid.n_t;
        let dt = self.grid.dt();
        let cell_spectra: Vec<Vec<Complex<f64>>> = (0..n_t - 1)
            .into_par_iter()
            .map(|i| {
                let mean: Vec<f64> = a
                    .row(i)
                    .iter()
                    .zip(a.row(i + 1))
                    .map(|(x, y)| 0.5 * (x + y))
                    .collect();
                self.signal_spectrum(&mean)
            })
            .collect();

        let rows: Vec<Vec<f64>> = (0..n_t)
            .into_par_iter()
            .map(|k| {
                if k == 0 {
                    return vec![0.0; self.grid.n_x];
                }
                let mut acc = vec![Complex::new(0.0, 0.0); self.n_fft];
                for i in 0..k {
                    let spec = &self.mid_spectra[k - 1 - i];
                    let cell = &cell_spectra[i];
                    for ((a, s), c) in acc.iter_mut().zip(spec).zip(cell) {
                        *a += s * c;
                    }
                }
                let mut out = self.extract(acc);
                for v in &mut out {
                    *v *= dt;
                }
                out
            })
            .collect();

        crate::grid::Field::from_rows(a.grid, rows).expect("rows match grid")
    }
}
