//! Space-time discretization of `[0, T] x [0, L]` and dense scalar fields on it.

use crate::error::{Result, SulphError};

/// Uniform tensor grid: `n_t` time nodes on `[0, T]`, `n_x` space nodes on `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub t_final: f64,
    pub n_t: usize,
    pub l: f64,
    pub n_x: usize,
}

impl GridSpec {
    pub fn new(t_final: f64, n_t: usize, l: f64, n_x: usize) -> Result<Self> {
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(SulphError::InvalidParameter(format!(
                "grid horizon T must be positive and finite, got {t_final}"
            )));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(SulphError::InvalidParameter(format!(
                "grid truncation L must be positive and finite, got {l}"
            )));
        }
        if n_t < 2 || n_x < 2 {
            return Err(SulphError::InvalidParameter(format!(
                "grid needs at least 2 nodes per axis, got n_t={n_t}, n_x={n_x}"
            )));
        }
        Ok(Self { t_final, n_t, l, n_x })
    }

    pub fn dt(&self) -> f64 {
        self.t_final / (self.n_t - 1) as f64
    }

    pub fn dx(&self) -> f64 {
        self.l / (self.n_x - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt()
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_t).map(|k| self.time(k)).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_x).map(|j| self.x(j)).collect()
    }
}

/// Scalar function sampled on a [`GridSpec`], stored row-major over (t, x).
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![0.0; grid.n_t * grid.n_x] }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(grid);
        for k in 0..grid.n_t {
            let t = grid.time(k);
            let row = out.row_mut(k);
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(t, j as f64 * grid.dx());
            }
        }
        out
    }

    pub fn from_rows(grid: GridSpec, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != grid.n_t || rows.iter().any(|r| r.len() != grid.n_x) {
            return Err(SulphError::GridMismatch(
                "row data does not match grid dimensions".into(),
            ));
        }
        let mut values = Vec::with_capacity(grid.n_t * grid.n_x);
        for row in rows {
            values.extend_from_slice(&row);
        }
        Ok(Self { grid, values })
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.grid.n_x..(k + 1) * self.grid.n_x]
    }

    pub fn row_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.values[k * self.grid.n_x..(k + 1) * self.grid.n_x]
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.values[k * self.grid.n_x + j]
    }

    pub fn set(&mut self, k: usize, j: usize, v: f64) {
        self.values[k * self.grid.n_x + j] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Elementwise combination with another field on the same grid.
    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        assert_eq!(self.grid, other.grid, "field grids differ");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Field { grid: self.grid, values }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Centered finite difference in x along every row; one-sided second
    /// order at the ends.
    pub fn dx_field(&self) -> Field {
        let mut out = Field::zeros(self.grid);
        let dx = self.grid.dx();
        for k in 0..self.grid.n_t {
            fd_derivative_into(self.row(k), dx, out.row_mut(k));
        }
        out
    }

    /// `L^2` norm over time and space by tensor trapezoid quadrature.
    pub fn l2_spacetime(&self) -> f64 {
        let dt = self.grid.dt();
        let row_sq: Vec<f64> = (0..self.grid.n_t)
            .map(|k| l2_norm(self.row(k), self.grid.dx()).powi(2))
            .collect();
        trapz(&row_sq, dt).sqrt()
    }

    /// `||self - reference||_{L^2(t,x)} / ||reference||_{L^2(t,x)}`.
    pub fn relative_l2_distance(&self, reference: &Field) -> f64 {
        let diff = self.zip_with(reference, |a, b| a - b);
        diff.l2_spacetime() / reference.l2_spacetime()
    }

    /// Cumulative trapezoid integral in time at every x: row k holds
    /// the integral of this field over `[0, t_k]`.
    pub fn cumtrapz_time(&self) -> Field {
        let mut out = Field::zeros(self.grid);
        let dt = self.grid.dt();
        for k in 1..self.grid.n_t {
            for j in 0..self.grid.n_x {
                let inc = 0.5 * dt * (self.get(k - 1, j) + self.get(k, j));
                let prev = out.get(k - 1, j);
                out.set(k, j, prev + inc);
            }
        }
        out
    }
}

/// Trapezoid quadrature of uniformly sampled values.
pub fn trapz(values: &[f64], h: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    h * (0.5 * values[0] + inner + 0.5 * values[values.len() - 1])
}

/// Discrete L2 norm by trapezoid quadrature.
pub fn l2_norm(values: &[f64], h: f64) -> f64 {
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    trapz(&sq, h).sqrt()
}

/// Second-order finite-difference derivative of a sampled function.
pub fn fd_derivative(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    fd_derivative_into(values, h, &mut out);
    out
}

fn fd_derivative_into(values: &[f64], h: f64, out: &mut [f64]) {
    let n = values.len();
    assert!(n >= 2, "need at least two samples to differentiate");
    if n == 2 {
        let d = (values[1] - values[0]) / h;
        out[0] = d;
        out[1] = d;
        return;
    }
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    for j in 1..n - 1 {
        out[j] = (values[j + 1] - values[j - 1]) / (2.0 * h);
    }
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
}
