//! Flat TOML experiment configuration.
//!
//! Every key is optional and falls back to the reference setup: symmetric
//! baths with `s = 0.01`, `omega_c = 3`, `hbar omega0 = 25 meV`, and both
//! temperatures circling `200 +/- 100 K` a quarter period apart.

use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qheat::correlation::{reference_settings, TemperatureSetting};
use qheat::{
    BathParams, BathSide, DiscretizedSchedule, Junction, Modulation, ModulationProtocol,
    SamplingPoint, UnitSystem,
};

use crate::error::{CliError, Result};

/// Angular frequencies in the config are given in units of 1e12 rad/s.
pub const THZ: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    FluxSweep,
    Decompose,
    Phi0Profile,
    LambdaTrace,
    Geometric,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    #[default]
    Left,
    Midpoint,
}

impl From<Sampling> for SamplingPoint {
    fn from(s: Sampling) -> Self {
        match s {
            Sampling::Left => SamplingPoint::LeftEndpoint,
            Sampling::Midpoint => SamplingPoint::Midpoint,
        }
    }
}

/// Inclusive `(start, stop, count)` grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid(pub f64, pub f64, pub usize);

impl Grid {
    pub fn points(&self, field: &str) -> Result<Vec<f64>> {
        let Grid(start, stop, count) = *self;
        if !(start.is_finite() && stop.is_finite()) {
            return Err(CliError::field(field, "bounds must be finite"));
        }
        match count {
            0 => Err(CliError::field(field, "count must be at least 1")),
            1 if start != stop => Err(CliError::field(field, "a single point needs start == stop")),
            1 => Ok(vec![start]),
            _ => Ok((0..count)
                .map(|k| {
                    if k + 1 == count {
                        stop
                    } else {
                        start + (stop - start) * k as f64 / (count - 1) as f64
                    }
                })
                .collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingConfig {
    pub label: String,
    pub t_left_k: f64,
    pub t_right_k: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the subcommand when given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    pub hbar_omega0_mev: f64,
    pub s_left: f64,
    pub s_right: f64,
    pub omega_c_left: f64,
    pub omega_c_right: f64,
    pub offset_left_k: f64,
    pub amplitude_left_k: f64,
    pub phase_left_rad: f64,
    pub offset_right_k: f64,
    pub amplitude_right_k: f64,
    pub phase_right_rad: f64,
    /// Modulation angular frequency, 1e12 rad/s.
    pub omega_thz: f64,
    /// Frequency grid for `flux-sweep`; `omega_thz` alone when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_thz_sweep: Option<Grid>,
    pub n: usize,
    /// Scaled inverse temperatures of the initial Gibbs state.
    pub beta_s: Vec<f64>,
    /// Prepend the steady state of the first interval to `beta_s`.
    pub include_beta_initial: bool,
    pub sampling: Sampling,
    pub swap_baths: bool,
    pub period_count: usize,
    /// Scaled times for `lambda-trace`.
    pub t_grid: Grid,
    /// Temperatures replacing the sampled protocol, `j,T_L_K,T_R_K`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule_csv: Option<PathBuf>,
    /// Where `decompose` also writes the population trajectory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory_out: Option<PathBuf>,
    /// Temperature pairs for `lambda-trace`; the three reference pairs when empty.
    pub settings: Vec<SettingConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: None,
            hbar_omega0_mev: qheat::units::DEFAULT_HBAR_OMEGA0_MEV,
            s_left: 0.01,
            s_right: 0.01,
            omega_c_left: 3.0,
            omega_c_right: 3.0,
            offset_left_k: 200.0,
            amplitude_left_k: 100.0,
            phase_left_rad: FRAC_PI_4,
            offset_right_k: 200.0,
            amplitude_right_k: 100.0,
            phase_right_rad: -FRAC_PI_4,
            omega_thz: 5.0,
            omega_thz_sweep: None,
            n: 41,
            beta_s: Vec::new(),
            include_beta_initial: true,
            sampling: Sampling::Left,
            swap_baths: false,
            period_count: 1,
            t_grid: Grid(0.1, 50.0, 500),
            schedule_csv: None,
            trajectory_out: None,
            settings: Vec::new(),
        }
    }
}

/// Initial state of a run: either a Gibbs state at `beta`, or the steady
/// state of the first interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialState {
    Gibbs(f64),
    FirstSteady,
}

/// Everything a run needs, checked up front.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub junction: Junction,
    pub protocol: ModulationProtocol,
    pub omegas_rad_per_s: Vec<f64>,
    pub initial_states: Vec<InitialState>,
    pub sampling: SamplingPoint,
    pub imported: Option<Vec<(f64, f64)>>,
    pub t_grid: Vec<f64>,
    pub settings: Vec<TemperatureSetting>,
    pub swap_baths: bool,
    pub period_count: usize,
    pub n: usize,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Validates every field and builds the model objects.
    pub fn prepare(&self, kind: ExperimentKind) -> Result<Prepared> {
        if let Some(declared) = self.experiment {
            if declared != kind {
                return Err(CliError::field(
                    "experiment",
                    format!("config is for {declared:?}, subcommand is {kind:?}"),
                ));
            }
        }
        let units = UnitSystem::new(self.hbar_omega0_mev)
            .map_err(|e| CliError::field("hbar_omega0_mev", e))?;
        let left = BathParams::new(BathSide::Left, self.s_left, self.omega_c_left)
            .map_err(|e| CliError::field("s_left/omega_c_left", e))?;
        let right = BathParams::new(BathSide::Right, self.s_right, self.omega_c_right)
            .map_err(|e| CliError::field("s_right/omega_c_right", e))?;
        let junction =
            Junction::new(units, left, right).map_err(|e| CliError::field("baths", e))?;

        if !(self.omega_thz > 0.0 && self.omega_thz.is_finite()) {
            return Err(CliError::field("omega_thz", "must be positive and finite"));
        }
        let protocol = ModulationProtocol::new(
            Modulation::new(
                self.offset_left_k,
                self.amplitude_left_k,
                self.phase_left_rad,
            ),
            Modulation::new(
                self.offset_right_k,
                self.amplitude_right_k,
                self.phase_right_rad,
            ),
            self.omega_thz * THZ,
        )
        .map_err(|e| CliError::field("offset/amplitude/phase", e))?;

        let omegas_thz = match self.omega_thz_sweep {
            Some(grid) => grid.points("omega_thz_sweep")?,
            None => vec![self.omega_thz],
        };
        if omegas_thz.iter().any(|&w| !(w > 0.0)) {
            return Err(CliError::field(
                "omega_thz_sweep",
                "frequencies must be positive",
            ));
        }

        if self.n == 0 {
            return Err(CliError::field("n", "must be at least 1"));
        }
        if self.period_count == 0 {
            return Err(CliError::field("period_count", "must be at least 1"));
        }

        let mut initial_states = Vec::new();
        if self.include_beta_initial {
            initial_states.push(InitialState::FirstSteady);
        }
        for &beta in &self.beta_s {
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(CliError::field(
                    "beta_s",
                    format!("{beta} is not a positive finite value"),
                ));
            }
            initial_states.push(InitialState::Gibbs(beta));
        }
        if initial_states.is_empty() {
            return Err(CliError::field(
                "beta_s",
                "empty and include_beta_initial is false",
            ));
        }

        let imported = match &self.schedule_csv {
            Some(path) => {
                let file = std::fs::File::open(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                // the width is replaced per frequency later on
                let schedule = DiscretizedSchedule::read_csv(file, 1.0)
                    .map_err(|e| CliError::field("schedule_csv", e))?;
                if schedule.n() != self.n {
                    return Err(CliError::field(
                        "schedule_csv",
                        format!("has {} rows but n = {}", schedule.n(), self.n),
                    ));
                }
                for &(tl, tr) in schedule.entries() {
                    units
                        .beta_tilde(tl)
                        .map_err(|e| CliError::field("schedule_csv", e))?;
                    units
                        .beta_tilde(tr)
                        .map_err(|e| CliError::field("schedule_csv", e))?;
                }
                Some(schedule.entries().to_vec())
            }
            None => None,
        };

        let t_grid = self.t_grid.points("t_grid")?;
        if !(t_grid[0] > 0.0) || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CliError::field(
                "t_grid",
                "times must be positive and strictly increasing",
            ));
        }

        let settings = if self.settings.is_empty() {
            reference_settings()
        } else {
            self.settings
                .iter()
                .map(|s| TemperatureSetting::new(s.label.clone(), s.t_left_k, s.t_right_k))
                .collect()
        };
        for s in &settings {
            s.betas(&junction)
                .map_err(|e| CliError::field("settings", format!("{}: {e}", s.label)))?;
        }

        Ok(Prepared {
            junction,
            protocol,
            omegas_rad_per_s: omegas_thz.iter().map(|w| w * THZ).collect(),
            initial_states,
            sampling: self.sampling.into(),
            imported,
            t_grid,
            settings,
            swap_baths: self.swap_baths,
            period_count: self.period_count,
            n: self.n,
        })
    }
}

impl Prepared {
    /// The schedule actually simulated at angular frequency `omega`:
    /// sampled or imported temperatures, optionally swapped, repeated.
    pub fn schedule(&self, omega_rad_per_s: f64) -> Result<DiscretizedSchedule> {
        let protocol = self.protocol.with_omega(omega_rad_per_s)?;
        let sampled = protocol.discretize_with(self.n, self.sampling)?;
        let base = match &self.imported {
            Some(entries) => DiscretizedSchedule::new(entries.clone(), sampled.delta_t_s())?,
            None => sampled,
        };
        let base = if self.swap_baths {
            base.swap_baths()
        } else {
            base
        };
        Ok(base.repeated(self.period_count)?)
    }

    /// Initial ground population and the inverse temperature reported for it.
    pub fn initial_population(
        &self,
        state: InitialState,
        schedule: &DiscretizedSchedule,
    ) -> Result<(f64, f64)> {
        match state {
            InitialState::Gibbs(beta) => Ok((qheat::gibbs_ground_population(beta), beta)),
            InitialState::FirstSteady => {
                let (tl, tr) = schedule.entries()[0];
                let rho = self.junction.interval_rates(tl, tr)?.rho_s;
                let beta = if tl == tr {
                    self.junction.units.beta_tilde(tl)?
                } else {
                    // the inverse temperature whose Gibbs state is rho
                    (rho / (1.0 - rho)).ln()
                };
                Ok((rho, beta))
            }
        }
    }
}
