//! Scenario files and run orchestration.
//!
//! A scenario is a line-oriented `key = value` file with dotted sections
//! (`jacobi.alpha = 1.0`, `grid.n_t = 129`, ...). Every key can also be
//! overridden from the command line, so runs are auditable from the file
//! alone. Outputs land in the scenario's `out` directory: the boundary
//! path, solution or field CSVs, and a key-value diagnostics report.

use std::path::{Path, PathBuf};

use crate::error::{Result, SulphError};
use crate::fd::{solve_fd, FdConfig};
use crate::grid::GridSpec;
use crate::heat::{solve_dxu, solve_u};
use crate::io;
use crate::jacobi::{sample_uniform, BoundaryPath, JacobiParams, Scheme};
use crate::norms;
use crate::solver::{
    solve_nonlinear, InitialData, ModelParams, SolutionPair, SolverConfig,
};

/// Where the boundary signal comes from; exactly one source per scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiSource {
    /// Sample the Jacobi SDE with the scenario seed.
    Jacobi,
    /// Load a path CSV (`t,psi`).
    File(PathBuf),
    /// A named analytic profile.
    Profile(PsiProfile),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsiProfile {
    Zero,
    /// Constant level (violates psi(0) = 0; accepted by the heat solver only).
    Constant(f64),
    /// `a sin^2(pi t / T)`.
    Sine2 { amplitude: f64 },
    /// `rate * t`, clipped at eta.
    Ramp { rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum S0Profile {
    Zero,
    /// `min(a x e^{1-x}, a)`.
    Bump { amplitude: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum C0Profile {
    Constant { value: f64 },
    /// `C0 - (C0 - min) exp(-(x/width)^2)`: a calcite-depleted layer at the
    /// surface that heals to C0 in the bulk.
    Dip { min: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub psi: PsiSource,
    pub jacobi: JacobiParams,
    pub model: ModelParams,
    pub s0: S0Profile,
    pub c0: C0Profile,
    pub grid: GridSpec,
    pub solver: SolverConfig,
    pub fd: FdConfig,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Treat a file-loaded boundary signal as smooth enough for the
    /// finite-difference oracle.
    pub assume_smooth: bool,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            psi: PsiSource::Jacobi,
            jacobi: JacobiParams {
                alpha: 1.0,
                gamma_level: 0.5,
                sigma: 0.5f64.sqrt(),
                eta: 1.0,
                psi0: 0.0,
            },
            model: ModelParams { lambda: 1.0, b: -1.0, c0_max: 0.5, c0_min: 0.5, eta: 1.0 },
            s0: S0Profile::Bump { amplitude: 1.0 },
            c0: C0Profile::Constant { value: 0.5 },
            grid: GridSpec { t_final: 1.0, n_t: 129, l: 20.0, n_x: 201 },
            solver: SolverConfig::default(),
            fd: FdConfig::default(),
            seed: 42,
            out_dir: PathBuf::from("out"),
            assume_smooth: false,
        }
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario> {
        let mut sc = Scenario::default();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SulphError::Parse(format!("line {}: expected 'key = value'", line_no + 1))
            })?;
            sc.apply(key.trim(), value.trim()).map_err(|e| {
                SulphError::Parse(format!("line {}: {e}", line_no + 1))
            })?;
        }
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)?;
        Scenario::parse(&text)
    }

    /// Apply one `key = value` override (the CLI flag layer reuses this).
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let f = || -> Result<f64> {
            value.parse::<f64>().map_err(|e| {
                SulphError::Parse(format!("key '{key}': bad float '{value}': {e}"))
            })
        };
        let n = || -> Result<usize> {
            value.parse::<usize>().map_err(|e| {
                SulphError::Parse(format!("key '{key}': bad integer '{value}': {e}"))
            })
        };
        match key {
            "psi.source" => {
                self.psi = match value {
                    "jacobi" => PsiSource::Jacobi,
                    "file" => PsiSource::File(PathBuf::new()),
                    "profile" => PsiSource::Profile(PsiProfile::Zero),
                    other => {
                        return Err(SulphError::Parse(format!(
                            "psi.source must be jacobi|file|profile, got '{other}'"
                        )))
                    }
                }
            }
            "psi.file" => self.psi = PsiSource::File(PathBuf::from(value)),
            "psi.profile" => {
                let current_amp = 1.0;
                self.psi = PsiSource::Profile(match value {
                    "zero" => PsiProfile::Zero,
                    "constant" => PsiProfile::Constant(current_amp),
                    "sine2" => PsiProfile::Sine2 { amplitude: current_amp },
                    "ramp" => PsiProfile::Ramp { rate: current_amp },
                    other => {
                        return Err(SulphError::Parse(format!(
                            "psi.profile must be zero|constant|sine2|ramp, got '{other}'"
                        )))
                    }
                });
            }
            "psi.value" | "psi.amplitude" | "psi.rate" => {
                let v = f()?;
                self.psi = match self.psi {
                    PsiSource::Profile(PsiProfile::Constant(_)) => {
                        PsiSource::Profile(PsiProfile::Constant(v))
                    }
                    PsiSource::Profile(PsiProfile::Sine2 { .. }) => {
                        PsiSource::Profile(PsiProfile::Sine2 { amplitude: v })
                    }
                    PsiSource::Profile(PsiProfile::Ramp { .. }) => {
                        PsiSource::Profile(PsiProfile::Ramp { rate: v })
                    }
                    _ => {
                        return Err(SulphError::Parse(format!(
                            "'{key}' needs psi.profile to be set first"
                        )))
                    }
                };
            }
            "jacobi.alpha" => self.jacobi.alpha = f()?,
            "jacobi.gamma" => self.jacobi.gamma_level = f()?,
            "jacobi.sigma" => self.jacobi.sigma = f()?,
            "jacobi.eta" => self.jacobi.eta = f()?,
            "jacobi.psi0" => self.jacobi.psi0 = f()?,
            "model.lambda" => self.model.lambda = f()?,
            "model.b" => self.model.b = f()?,
            "model.c0_max" => self.model.c0_max = f()?,
            "model.c0_min" => self.model.c0_min = f()?,
            "model.eta" => self.model.eta = f()?,
            "data.s0" => {
                self.s0 = match value {
                    "zero" => S0Profile::Zero,
                    "bump" => S0Profile::Bump { amplitude: 1.0 },
                    other => {
                        return Err(SulphError::Parse(format!(
                            "data.s0 must be zero|bump, got '{other}'"
                        )))
                    }
                }
            }
            "data.s0_amplitude" => {
                if let S0Profile::Bump { .. } = self.s0 {
                    self.s0 = S0Profile::Bump { amplitude: f()? };
                } else {
                    return Err(SulphError::Parse(
                        "data.s0_amplitude needs data.s0 = bump".into(),
                    ));
                }
            }
            "data.c0" => {
                self.c0 = match value {
                    "constant" => C0Profile::Constant { value: 0.5 },
                    "dip" => C0Profile::Dip { min: 0.3, width: 2.0 },
                    other => {
                        return Err(SulphError::Parse(format!(
                            "data.c0 must be constant|dip, got '{other}'"
                        )))
                    }
                }
            }
            "data.c0_value" => {
                if let C0Profile::Constant { .. } = self.c0 {
                    self.c0 = C0Profile::Constant { value: f()? };
                } else {
                    return Err(SulphError::Parse("data.c0_value needs data.c0 = constant".into()));
                }
            }
            "data.c0_min" => {
                if let C0Profile::Dip { width, .. } = self.c0 {
                    self.c0 = C0Profile::Dip { min: f()?, width };
                } else {
                    return Err(SulphError::Parse("data.c0_min needs data.c0 = dip".into()));
                }
            }
            "data.c0_width" => {
                if let C0Profile::Dip { min, .. } = self.c0 {
                    self.c0 = C0Profile::Dip { min, width: f()? };
                } else {
                    return Err(SulphError::Parse("data.c0_width needs data.c0 = dip".into()));
                }
            }
            "grid.t_final" => self.grid.t_final = f()?,
            "grid.n_t" => self.grid.n_t = n()?,
            "grid.l" => self.grid.l = f()?,
            "grid.n_x" => self.grid.n_x = n()?,
            "solver.picard_tol" => self.solver.picard_tol = f()?,
            "solver.max_picard" => self.solver.max_picard = n()?,
            "solver.outer_tol" => self.solver.outer_tol = f()?,
            "solver.max_outer" => self.solver.max_outer = n()?,
            "solver.quad_nodes" => self.solver.quad_nodes = n()?,
            "fd.theta" => self.fd.theta = f()?,
            "fd.cfl_safety" => self.fd.cfl_safety = f()?,
            "seed" => {
                self.seed = value.parse::<u64>().map_err(|e| {
                    SulphError::Parse(format!("key 'seed': bad integer '{value}': {e}"))
                })?
            }
            "out" => self.out_dir = PathBuf::from(value),
            other => {
                return Err(SulphError::Parse(format!("unknown key '{other}'")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        GridSpec::new(self.grid.t_final, self.grid.n_t, self.grid.l, self.grid.n_x)?;
        self.model.validate()?;
        self.solver.validate()?;
        self.fd.validate()?;
        if let PsiSource::Jacobi = self.psi {
            self.jacobi.validate()?;
        }
        if let PsiSource::File(p) = &self.psi {
            if p.as_os_str().is_empty() {
                return Err(SulphError::Parse(
                    "psi.source = file requires psi.file = PATH".into(),
                ));
            }
        }
        Ok(())
    }

    /// Materialize the boundary signal on the scenario grid.
    pub fn boundary_path(&self) -> Result<BoundaryPath> {
        let g = &self.grid;
        match &self.psi {
            PsiSource::Jacobi => sample_uniform(
                &self.jacobi,
                g.t_final,
                g.n_t,
                self.seed,
                Scheme::FullTruncationEuler,
            ),
            PsiSource::File(p) => io::read_path_csv(p),
            PsiSource::Profile(profile) => {
                let eta = self.model.eta;
                let t_final = g.t_final;
                let f: Box<dyn Fn(f64) -> f64> = match *profile {
                    PsiProfile::Zero => Box::new(|_| 0.0),
                    PsiProfile::Constant(v) => Box::new(move |_| v),
                    PsiProfile::Sine2 { amplitude } => Box::new(move |t| {
                        amplitude * (std::f64::consts::PI * t / t_final).sin().powi(2)
                    }),
                    PsiProfile::Ramp { rate } => Box::new(move |t| (rate * t).min(eta)),
                };
                BoundaryPath::from_fn(t_final, g.n_t, f)
            }
        }
    }

    /// True when the boundary signal is smooth enough for the FD oracle.
    pub fn psi_is_smooth(&self) -> bool {
        match &self.psi {
            PsiSource::Jacobi => false,
            PsiSource::File(_) => self.assume_smooth,
            PsiSource::Profile(_) => true,
        }
    }

    pub fn initial_data(&self) -> InitialData {
        let xs = self.grid.xs();
        let s0 = match self.s0 {
            S0Profile::Zero => vec![0.0; xs.len()],
            S0Profile::Bump { amplitude } => xs
                .iter()
                .map(|&x| (amplitude * x * (1.0 - x).exp()).min(amplitude))
                .collect(),
        };
        let c0 = match self.c0 {
            C0Profile::Constant { value } => vec![value; xs.len()],
            C0Profile::Dip { min, width } => {
                let c0_max = self.model.c0_max;
                xs.iter()
                    .map(|&x| c0_max - (c0_max - min) * (-(x / width) * (x / width)).exp())
                    .collect()
            }
        };
        InitialData { s0, c0 }
    }
}

/// Which operation a run performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SampleBoundary,
    SolveHeat,
    SolveSystem,
    SolveFd,
    Compare,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub files: Vec<PathBuf>,
    pub report: Vec<(String, String)>,
}

fn require_smooth(scenario: &Scenario) -> Result<()> {
    if !scenario.psi_is_smooth() {
        return Err(SulphError::InvalidParameter(
            "the finite-difference oracle needs a smooth boundary signal; \
             use a named profile or pass --assume-smooth for file input"
                .into(),
        ));
    }
    Ok(())
}

fn solution_report(tag: &str, sol: &SolutionPair) -> Vec<(String, String)> {
    sol.diagnostics
        .report()
        .into_iter()
        .map(|(k, v)| (format!("{tag}.{k}"), v))
        .collect()
}

/// Execute one scenario run; deterministic in `(scenario, seed)`.
pub fn run(scenario: &Scenario, cmd: Command) -> Result<RunArtifacts> {
    scenario.validate()?;
    let out = &scenario.out_dir;
    let grid = scenario.grid;
    let psi = scenario.boundary_path()?;
    let mut files = Vec::new();
    let mut report: Vec<(String, String)> = Vec::new();

    let psi_file = out.join("path.csv");
    io::write_path_csv(&psi_file, &psi)?;
    files.push(psi_file);
    report.push(("psi.min".into(), format!("{}", psi.min())));
    report.push(("psi.max".into(), format!("{}", psi.max())));
    if psi.len() >= 64 {
        if let Ok(est) = norms::holder_exponent_estimate(&psi) {
            report.push(("psi.holder_exponent".into(), format!("{est}")));
        }
    }

    match cmd {
        Command::SampleBoundary => {}
        Command::SolveHeat => {
            let u = solve_u(&psi, &grid)?;
            let dxu = solve_dxu(&psi, &grid)?;
            let u_file = out.join("field_u.csv");
            io::write_field_csv(&u_file, &u)?;
            files.push(u_file);
            let dxu_file = out.join("field_dxu.csv");
            io::write_field_csv(&dxu_file, &dxu)?;
            files.push(dxu_file);
            report.push(("u.min".into(), format!("{}", u.min())));
            report.push(("u.max".into(), format!("{}", u.max())));
        }
        Command::SolveSystem => {
            let data = scenario.initial_data();
            let sol = solve_nonlinear(&psi, &data, &scenario.model, &grid, &scenario.solver)?;
            let sol_file = out.join("solution.csv");
            io::write_solution_csv(&sol_file, &sol.s, &sol.c)?;
            files.push(sol_file);
            report.extend(solution_report("mild", &sol));
            let beta = 0.3;
            if let Ok(h) = norms::holder_norm(&psi, beta) {
                report.push((format!("norm.psi_holder_beta{beta}"), format!("{}", h.value)));
            }
            let last = sol.s.row(grid.n_t - 1);
            if let Ok(l2) = norms::sobolev_norm(last, grid.dx(), 2.0, 0) {
                report.push(("norm.s_final_l2".into(), format!("{}", l2.value)));
            }
            if let Ok(w12) = norms::sobolev_norm(last, grid.dx(), 2.0, 1) {
                report.push(("norm.s_final_w12".into(), format!("{}", w12.value)));
            }
        }
        Command::SolveFd => {
            require_smooth(scenario)?;
            let data = scenario.initial_data();
            let sol = solve_fd(&psi, &data, &scenario.model, &grid, &scenario.fd)?;
            let sol_file = out.join("solution_fd.csv");
            io::write_solution_csv(&sol_file, &sol.s, &sol.c)?;
            files.push(sol_file);
            report.extend(solution_report("fd", &sol));
        }
        Command::Compare => {
            require_smooth(scenario)?;
            let data = scenario.initial_data();
            let mild = solve_nonlinear(&psi, &data, &scenario.model, &grid, &scenario.solver)?;
            let fd = solve_fd(&psi, &data, &scenario.model, &grid, &scenario.fd)?;
            let mild_file = out.join("solution.csv");
            io::write_solution_csv(&mild_file, &mild.s, &mild.c)?;
            files.push(mild_file);
            let fd_file = out.join("solution_fd.csv");
            io::write_solution_csv(&fd_file, &fd.s, &fd.c)?;
            files.push(fd_file);
            // tensor-trapezoid L2(t,x) norms, normalized by the oracle
            report.push((
                "compare.rel_l2_s".into(),
                format!("{}", mild.s.relative_l2_distance(&fd.s)),
            ));
            report.push((
                "compare.rel_l2_c".into(),
                format!("{}", mild.c.relative_l2_distance(&fd.c)),
            ));
            report.extend(solution_report("mild", &mild));
            report.extend(solution_report("fd", &fd));
        }
    }

    let report_file = out.join("report.txt");
    io::write_report(&report_file, &report)?;
    files.push(report_file);
    Ok(RunArtifacts { files, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip_of_documented_keys() {
        let text = "\
# comment line
psi.source = profile
psi.profile = sine2
psi.amplitude = 0.8
model.lambda = 0.5
model.b = -1
grid.t_final = 2.0
grid.n_t = 65
grid.l = 25.0
grid.n_x = 101
solver.picard_tol = 1e-9
seed = 7
out = /tmp/somewhere
";
        let sc = Scenario::parse(text).unwrap();
        assert_eq!(sc.psi, PsiSource::Profile(PsiProfile::Sine2 { amplitude: 0.8 }));
        assert_eq!(sc.model.lambda, 0.5);
        assert_eq!(sc.grid.n_t, 65);
        assert_eq!(sc.grid.l, 25.0);
        assert_eq!(sc.solver.picard_tol, 1e-9);
        assert_eq!(sc.seed, 7);
        assert!(sc.validate().is_ok());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            Scenario::parse("jacobi.alhpa = 1.0"),
            Err(SulphError::Parse(_))
        ));
        assert!(matches!(Scenario::parse("nonsense"), Err(SulphError::Parse(_))));
    }

    #[test]
    fn porosity_degeneracy_is_a_validation_error() {
        let mut sc = Scenario::default();
        sc.apply("model.b", "-1").unwrap();
        sc.apply("model.c0_max", "1.5").unwrap();
        let err = sc.validate().unwrap_err();
        assert!(matches!(err, SulphError::PorosityDegeneracy(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn fd_refuses_rough_boundary_signals() {
        let mut sc = Scenario::default();
        sc.out_dir = std::env::temp_dir().join(format!("sulph-fd-rough-{}", std::process::id()));
        sc.apply("grid.n_t", "65").unwrap();
        let err = run(&sc, Command::SolveFd).unwrap_err();
        assert!(matches!(err, SulphError::InvalidParameter(_)));
        std::fs::remove_dir_all(&sc.out_dir).ok();
    }

    #[test]
    fn profile_data_construction() {
        let sc = Scenario::default();
        let data = sc.initial_data();
        assert_eq!(data.s0[0], 0.0);
        assert!(data.s0.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!(data.c0.iter().all(|&v| v == 0.5));
        let psi = Scenario {
            psi: PsiSource::Profile(PsiProfile::Sine2 { amplitude: 1.0 }),
            ..sc
        }
        .boundary_path()
        .unwrap();
        assert_eq!(psi.values()[0], 0.0);
        assert!(psi.max() <= 1.0 + 1e-12);
    }
}
