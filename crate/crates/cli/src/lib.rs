//! Experiment recipes behind the `qheat` command: each takes an
//! [`ExperimentConfig`], runs the model and returns rows ready for CSV.

// Validation is written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;

use std::io::Write;

use rayon::prelude::*;

use qheat::adiabatic::adiabatic_currents;
use qheat::correlation::{relative_error_trace, CorrelationTrace};
use qheat::decomposition::{decompose, net_geometric_current, FluxDecomposition};
use qheat::dynamics::{accumulate_flux, PopulationTrajectory};
use qheat::export::{self, AdiabaticRow, FluxRow};

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{CliError, Result};

use config::{Prepared, THZ};

/// Net current and its geometric reference for every frequency and initial
/// state. Rows are ordered frequency first, then initial state, whatever
/// order the pool finishes them in.
pub fn run_flux_sweep(config: &ExperimentConfig) -> Result<Vec<FluxRow>> {
    let prepared = config.prepare(ExperimentKind::FluxSweep)?;
    let jobs: Vec<(f64, config::InitialState)> = prepared
        .omegas_rad_per_s
        .iter()
        .flat_map(|&w| prepared.initial_states.iter().map(move |&s| (w, s)))
        .collect();
    jobs.par_iter()
        .map(|&(omega, state)| flux_point(&prepared, omega, state))
        .collect()
}

fn flux_point(prepared: &Prepared, omega: f64, state: config::InitialState) -> Result<FluxRow> {
    let schedule = prepared.schedule(omega)?;
    let (rho0, beta_s) = prepared.initial_population(state, &schedule)?;
    let flux = accumulate_flux(&prepared.junction, &schedule, rho0)?;
    Ok(FluxRow {
        omega_thz: omega / THZ,
        beta_s,
        j_hat_per_s: flux.net_current_per_s,
        j_hat_geo_per_s: net_geometric_current(&prepared.junction, &schedule)?,
    })
}

#[derive(Debug)]
pub struct DecomposeOutput {
    pub decomposition: FluxDecomposition,
    pub trajectory: PopulationTrajectory,
}

/// Decomposition at `omega_thz` for the first initial state.
pub fn run_decompose(config: &ExperimentConfig) -> Result<DecomposeOutput> {
    let prepared = config.prepare(ExperimentKind::Decompose)?;
    decompose_first(&prepared)
}

fn decompose_first(prepared: &Prepared) -> Result<DecomposeOutput> {
    let schedule = prepared.schedule(prepared.protocol.omega_rad_per_s())?;
    let (rho0, _) = prepared.initial_population(prepared.initial_states[0], &schedule)?;
    let decomposition = decompose(&prepared.junction, &schedule, rho0)?;
    let trajectory = accumulate_flux(&prepared.junction, &schedule, rho0)?.trajectory;
    Ok(DecomposeOutput {
        decomposition,
        trajectory,
    })
}

/// `phi0^R(j) - phi0^L(j)` at `omega_thz` for the first initial state.
pub fn run_phi0_profile(config: &ExperimentConfig) -> Result<Vec<f64>> {
    let prepared = config.prepare(ExperimentKind::Phi0Profile)?;
    Ok(decompose_first(&prepared)?.decomposition.phi0_profile())
}

pub fn run_lambda_trace(config: &ExperimentConfig) -> Result<Vec<CorrelationTrace>> {
    let prepared = config.prepare(ExperimentKind::LambdaTrace)?;
    Ok(relative_error_trace(
        &prepared.junction,
        &prepared.settings,
        &prepared.t_grid,
    )?)
}

/// Continuous adiabatic currents into the right bath at `omega_thz`.
pub fn run_geometric(config: &ExperimentConfig) -> Result<Vec<AdiabaticRow>> {
    let prepared = config.prepare(ExperimentKind::Geometric)?;
    let protocol = if prepared.swap_baths {
        let p = &prepared.protocol;
        qheat::ModulationProtocol::new(p.right, p.left, p.omega_rad_per_s())?
    } else {
        prepared.protocol
    };
    let result = adiabatic_currents(&prepared.junction, &protocol)?;
    Ok(AdiabaticRow::from_result(&result))
}

/// Runs one experiment and writes its CSV to `out`.
pub fn execute(kind: ExperimentKind, config: &ExperimentConfig, out: impl Write) -> Result<()> {
    match kind {
        ExperimentKind::FluxSweep => export::write_flux_sweep(out, &run_flux_sweep(config)?)?,
        ExperimentKind::Decompose => {
            let prepared = config.prepare(kind)?;
            let result = decompose_first(&prepared)?;
            if let Some(path) = &config.trajectory_out {
                let file = std::fs::File::create(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                export::write_trajectory(file, &result.trajectory, &prepared.junction.units)?;
            }
            export::write_decomposition(out, &result.decomposition)?
        }
        ExperimentKind::Phi0Profile => export::write_profile(out, &run_phi0_profile(config)?)?,
        ExperimentKind::LambdaTrace => {
            export::write_lambda_traces(out, &run_lambda_trace(config)?)?
        }
        ExperimentKind::Geometric => export::write_adiabatic(out, &run_geometric(config)?)?,
    }
    Ok(())
}
