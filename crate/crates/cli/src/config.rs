//! Experiment configuration: TOML input, validation, and the resolved
//! echo that is embedded in every output artifact.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use twomode::{
    Grid1d, HamiltonianKind, ModelParams, Potential, PropagationConfig, Schedule, WellSpec,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Evolve,
    Meanfield,
    Compare,
    ExtractParams,
    Sweep,
    Verify,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Evolve => "evolve",
            Mode::Meanfield => "meanfield",
            Mode::Compare => "compare",
            Mode::ExtractParams => "extract-params",
            Mode::Sweep => "sweep",
            Mode::Verify => "verify",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Raw file contents; every section optional so one file can serve several
/// subcommands.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub mode: Option<Mode>,
    pub model: Option<ModelSection>,
    pub well: Option<WellSection>,
    pub initial: Option<InitialSection>,
    pub meanfield: Option<MeanfieldSection>,
    pub propagation: Option<PropagationSection>,
    pub sweep: Option<SweepSection>,
    pub verify: Option<VerifySection>,
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub n_particles: usize,
    #[serde(default)]
    pub u0: f64,
    #[serde(default)]
    pub ut: f64,
    #[serde(default)]
    pub utt: f64,
    #[serde(default = "default_kind")]
    pub hamiltonian: HamiltonianKind,
    #[serde(default = "zero_schedule")]
    pub epsilon: Schedule,
    pub omega: Schedule,
}

fn default_kind() -> HamiltonianKind {
    HamiltonianKind::OnSiteOnly
}

fn zero_schedule() -> Schedule {
    Schedule::constant(0.0)
}

impl ModelSection {
    pub fn to_params(&self) -> ModelParams {
        ModelParams {
            n_particles: self.n_particles,
            u0: self.u0,
            ut: self.ut,
            utt: self.utt,
            epsilon: self.epsilon.clone(),
            omega: self.omega.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WellPotentialSection {
    Quartic {
        beta: f64,
        a: f64,
    },
    DoubleGaussian {
        depth: f64,
        separation: f64,
        sigma: f64,
    },
    /// Two-column whitespace-separated text file of (x, V) samples.
    Tabulated {
        path: PathBuf,
    },
}

// no deny_unknown_fields here: it cannot coexist with the flattened
// potential enum
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellSection {
    #[serde(flatten)]
    pub potential: WellPotentialSection,
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default)]
    pub g_1d: f64,
    /// Needed when the well doubles as the model source.
    pub n_particles: Option<usize>,
    #[serde(default = "default_convergence")]
    pub convergence_tolerance: f64,
}

fn one() -> f64 {
    1.0
}

fn default_convergence() -> f64 {
    1e-5
}

impl WellSection {
    pub fn to_spec(&self) -> Result<WellSpec, CliError> {
        let potential = match &self.potential {
            WellPotentialSection::Quartic { beta, a } => Potential::Quartic { beta: *beta, a: *a },
            WellPotentialSection::DoubleGaussian {
                depth,
                separation,
                sigma,
            } => Potential::DoubleGaussian {
                depth: *depth,
                separation: *separation,
                sigma: *sigma,
            },
            WellPotentialSection::Tabulated { path } => Potential::Tabulated {
                points: read_table(path)?,
            },
        };
        Ok(WellSpec {
            potential,
            grid: Grid1d {
                x_min: self.x_min,
                x_max: self.x_max,
                n_points: self.n_points,
            },
            mass: self.mass,
            g_1d: self.g_1d,
        })
    }
}

fn read_table(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("well.path: cannot read {}: {e}", path.display())))?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        let x: f64 = cols
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad_table_line(path, lineno))?;
        let v: f64 = cols
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad_table_line(path, lineno))?;
        points.push((x, v));
    }
    Ok(points)
}

fn bad_table_line(path: &Path, lineno: usize) -> CliError {
    CliError::Config(format!(
        "well.path: {} line {}: expected two numeric columns",
        path.display(),
        lineno + 1
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// Mean-field starting point (u, v, w); the quantum side always starts
    /// in the all-left Dicke state.
    pub bloch: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    Bloch,
    Gp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanfieldSection {
    pub formulation: Formulation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationSection {
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    #[serde(default = "one_usize")]
    pub record_stride: usize,
    #[serde(default = "default_norm_tolerance")]
    pub norm_tolerance: f64,
    #[serde(default)]
    pub energy_shift: bool,
}

fn one_usize() -> usize {
    1
}

fn default_norm_tolerance() -> f64 {
    1e-9
}

impl PropagationSection {
    pub fn to_config(&self) -> PropagationConfig {
        let mut cfg = PropagationConfig::new(self.t_start, self.t_end, self.dt);
        cfg.record_stride = self.record_stride;
        cfg.norm_tolerance = self.norm_tolerance;
        cfg.energy_shift = self.energy_shift;
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    U0,
    Ut,
    Utt,
    Omega,
    Epsilon,
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SweepParameter::U0 => "u0",
            SweepParameter::Ut => "ut",
            SweepParameter::Utt => "utt",
            SweepParameter::Omega => "omega",
            SweepParameter::Epsilon => "epsilon",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default = "default_n_max_operators")]
    pub n_max_operators: usize,
    #[serde(default = "default_n_dynamics")]
    pub n_dynamics: usize,
    #[serde(default = "default_coupling_sets")]
    pub coupling_sets: usize,
}

fn default_n_max_operators() -> usize {
    12
}

fn default_n_dynamics() -> usize {
    6
}

fn default_coupling_sets() -> usize {
    25
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            n_max_operators: default_n_max_operators(),
            n_dynamics: default_n_dynamics(),
            coupling_sets: default_coupling_sets(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
    /// Significant decimal digits in CSV cells.
    #[serde(default = "default_precision")]
    pub precision: usize,
    /// Print floats as raw IEEE-754 bits for strict cross-platform byte
    /// stability.
    #[serde(default)]
    pub hex_floats: bool,
}

fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

fn default_precision() -> usize {
    12
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            path: None,
            format: default_format(),
            precision: default_precision(),
            hex_floats: false,
        }
    }
}

/// Fully resolved configuration: the mode is fixed, defaults are filled
/// in, and the whole value is serialized into every artifact so outputs
/// are self-describing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub well: Option<WellSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meanfield: Option<MeanfieldSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub propagation: Option<PropagationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
    pub output: OutputSection,
}

impl ExperimentConfig {
    /// Merge the file contents with command-line overrides and check that
    /// everything the mode needs is present.
    pub fn resolve(
        mode: Mode,
        file: FileConfig,
        out_override: Option<PathBuf>,
        format_override: Option<OutputFormat>,
    ) -> Result<Self, CliError> {
        if let Some(file_mode) = file.mode {
            if file_mode != mode {
                return Err(CliError::Config(format!(
                    "mode: config file says '{file_mode}' but the subcommand is '{mode}'"
                )));
            }
        }

        let mut output = file.output.unwrap_or_default();
        if let Some(path) = out_override {
            output.path = Some(path);
        }
        if let Some(format) = format_override {
            output.format = format;
        }

        let config = Self {
            mode,
            model: file.model,
            well: file.well,
            initial: file.initial,
            meanfield: file.meanfield,
            propagation: file.propagation,
            sweep: file.sweep,
            verify: file.verify,
            output,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let needs_model = matches!(
            self.mode,
            Mode::Evolve | Mode::Meanfield | Mode::Compare | Mode::Sweep
        );
        if needs_model && self.model.is_none() && self.well.is_none() {
            return Err(CliError::Config(format!(
                "model: mode '{}' needs a [model] section (or a [well] section with n_particles)",
                self.mode
            )));
        }
        if needs_model && self.propagation.is_none() {
            return Err(CliError::Config(format!(
                "propagation: mode '{}' needs a [propagation] section",
                self.mode
            )));
        }
        if self.mode == Mode::ExtractParams && self.well.is_none() {
            return Err(CliError::Config(
                "well: extract-params needs a [well] section".into(),
            ));
        }
        if self.mode == Mode::Sweep {
            let sweep = self.sweep.as_ref().ok_or_else(|| {
                CliError::Config("sweep: mode 'sweep' needs a [sweep] section".into())
            })?;
            if sweep.values.is_empty() {
                return Err(CliError::Config("sweep.values: must not be empty".into()));
            }
            if sweep.values.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Config(
                    "sweep.values: all values must be finite".into(),
                ));
            }
        }
        let needs_output = !matches!(self.mode, Mode::Verify);
        if needs_output && self.output.path.is_none() {
            return Err(CliError::Config(
                "output.path: no output path given (set output.path or pass --out)".into(),
            ));
        }
        if self.output.precision == 0 || self.output.precision > 17 {
            return Err(CliError::Config(format!(
                "output.precision: must be between 1 and 17, got {}",
                self.output.precision
            )));
        }
        if let Some(model) = &self.model {
            if model.n_particles == 0 {
                return Err(CliError::Config(
                    "model.n_particles: must be at least 1".into(),
                ));
            }
            model
                .epsilon
                .validate()
                .map_err(|e| CliError::Config(format!("model.epsilon: {e}")))?;
            model
                .omega
                .validate()
                .map_err(|e| CliError::Config(format!("model.omega: {e}")))?;
        }
        if let Some(prop) = &self.propagation {
            prop.to_config()
                .validate()
                .map_err(|e| CliError::Config(format!("propagation: {e}")))?;
        }
        if let Some(initial) = &self.initial {
            let [u, v, w] = initial.bloch;
            let norm = (u * u + v * v + w * w).sqrt();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(CliError::Config(format!(
                    "initial.bloch: must lie on the unit sphere, |(u,v,w)| = {norm}"
                )));
            }
        }
        if let Some(sweep) = &self.sweep {
            if matches!(sweep.parameter, SweepParameter::Omega)
                && !matches!(
                    self.model.as_ref().map(|m| &m.omega),
                    Some(Schedule::Constant { .. })
                )
            {
                return Err(CliError::Config(
                    "sweep.parameter: sweeping 'omega' requires a constant model.omega schedule"
                        .into(),
                ));
            }
            if matches!(sweep.parameter, SweepParameter::Epsilon)
                && !matches!(
                    self.model.as_ref().map(|m| &m.epsilon),
                    Some(Schedule::Constant { .. })
                )
            {
                return Err(CliError::Config(
                    "sweep.parameter: sweeping 'epsilon' requires a constant model.epsilon schedule"
                        .into(),
                ));
            }
        }
        Ok(())
    }

    /// Model parameters and Hamiltonian kind, extracting from the well
    /// when no explicit [model] section exists.
    pub fn model_params(&self) -> Result<(ModelParams, HamiltonianKind), CliError> {
        if let Some(model) = &self.model {
            return Ok((model.to_params(), model.hamiltonian));
        }
        let well = self.well.as_ref().ok_or_else(|| {
            CliError::Config("model: neither [model] nor [well] section present".into())
        })?;
        let n_particles = well.n_particles.ok_or_else(|| {
            CliError::Config(
                "well.n_particles: required when the well is used as the model source".into(),
            )
        })?;
        let spec = well.to_spec()?;
        let report = twomode::extract_parameters(&spec, well.convergence_tolerance)?;
        Ok((
            report.parameters.into_model(n_particles),
            HamiltonianKind::FullCorrections,
        ))
    }
}

pub fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("config parse error: {e}")))
}
