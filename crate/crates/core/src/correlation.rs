//! Bath correlation functions beyond the Markovian limit and the
//! time-dependent population decay rate `Lambda(t)` they generate.
//!
//! Everything here is in scaled units (`omega0 = 1`). `Lambda(t)` tends to
//! the Markovian rate `-sum Gamma (1 + 2N)` once the bath correlations have
//! decayed. The relative gap tells how well the piecewise-Markovian
//! treatment holds for an interval of length `t`.

use std::cell::Cell;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bath::{BathParams, Junction, PerBath};
use crate::error::{Error, Result};
use crate::quadrature::{Estimate, Integrator};

/// Frequency integrals run over `[0, CUTOFF_MULTIPLE * omega_c]`.
pub const CUTOFF_MULTIPLE: f64 = 50.0;
pub const CORRELATION_REL_TOL: f64 = 1e-8;
pub const LAMBDA_REL_TOL: f64 = 1e-7;
/// `exp(-UNIFORM_SPAN)` is below the double-precision epsilon.
const UNIFORM_SPAN: f64 = 40.0;
/// Largest admissible ratio of the integrand at the cutoff to its peak.
const TAIL_BOUND: f64 = 1e-12;

/// `omega (1 + 2 n(omega)) = omega coth(beta omega / 2)`, finite at zero.
pub(crate) fn thermal_weight(omega: f64, beta: f64) -> f64 {
    let x = 0.5 * beta * omega;
    if x < 1e-6 {
        2.0 / beta * (1.0 + x * x / 3.0)
    } else {
        omega / x.tanh()
    }
}

/// Break points over `[0, upper]`: panels about one oscillation of
/// `cos(omega tau)` wide up to `UNIFORM_SPAN * omega_c`, where the
/// exponential cutoff has fallen below double precision, then a single
/// tail panel.
fn frequency_breaks(omega_c: f64, upper: f64, tau: f64) -> Vec<f64> {
    let span = (UNIFORM_SPAN * omega_c).min(upper);
    let panels = ((span * tau.abs() / TAU).ceil() as usize).max(16);
    let mut breaks: Vec<f64> = (0..=panels)
        .map(|k| span * k as f64 / panels as f64)
        .collect();
    if span < upper {
        breaks.push(upper);
    }
    breaks
}

fn check_tail(bath: &BathParams, beta: f64, upper: f64) -> Result<()> {
    let weight = |w: f64| (-w / bath.omega_c()).exp() * thermal_weight(w, beta);
    let peak = [0.0, 0.5, 1.0, 2.0]
        .into_iter()
        .map(|x| weight(x * bath.omega_c()))
        .fold(0.0, f64::max);
    if weight(upper) > TAIL_BOUND * peak {
        return Err(Error::domain(format!(
            "spectral tail at {upper} exceeds {TAIL_BOUND:e} of its peak"
        )));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::domain(format!(
            "scaled inverse temperature must be positive, got {beta}"
        )));
    }
    Ok(())
}

/// `Re Phi(tau) = int h(w) coth(beta w / 2) cos(w tau) dw`.
pub fn correlation_real(bath: &BathParams, beta_tilde: f64, tau: f64) -> Result<Estimate> {
    check_beta(beta_tilde)?;
    if bath.s() == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let upper = CUTOFF_MULTIPLE * bath.omega_c();
    check_tail(bath, beta_tilde, upper)?;
    let (s, wc) = (bath.s(), bath.omega_c());
    let f = |w: f64| s * (-w / wc).exp() * thermal_weight(w, beta_tilde) * (w * tau).cos();
    Integrator::with_rel_tol(CORRELATION_REL_TOL)
        .integrate_breaks(f, &frequency_breaks(bath.omega_c(), upper, tau))
}

/// `Im Phi(tau) = -int h(w) sin(w tau) dw`, which does not depend on temperature.
pub fn correlation_imag(bath: &BathParams, tau: f64) -> Result<Estimate> {
    if bath.s() == 0.0 || tau == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let upper = CUTOFF_MULTIPLE * bath.omega_c();
    let f = |w: f64| -bath.spectral_density(w) * (w * tau).sin();
    Integrator::with_rel_tol(CORRELATION_REL_TOL)
        .integrate_breaks(f, &frequency_breaks(bath.omega_c(), upper, tau))
}

/// `Phi(tau) = int h(w) [(1 + 2 n(w)) cos(w tau) - i sin(w tau)] dw`.
pub fn bath_correlation(bath: &BathParams, beta_tilde: f64, tau: f64) -> Result<Complex64> {
    // Phi(-tau) = conj(Phi(tau)); evaluating at |tau| keeps the symmetry exact.
    let re = correlation_real(bath, beta_tilde, tau.abs())?.value;
    let im = correlation_imag(bath, tau.abs())?.value;
    let phi = Complex64::new(re, im);
    Ok(if tau < 0.0 { phi.conj() } else { phi })
}

/// `V_pm(tau) = sum_nu [Phi_nu(tau) e^{-/+ i tau} + Phi_nu(-tau) e^{+/- i tau}]`,
/// returned as `(V_plus, V_minus)`.
pub fn v_kernels(junction: &Junction, betas: PerBath<f64>, tau: f64) -> Result<(f64, f64)> {
    let phase = Complex64::new(0.0, -tau).exp();
    let mut plus = 0.0;
    let mut minus = 0.0;
    for (bath, beta) in [
        (&junction.baths.left, betas.left),
        (&junction.baths.right, betas.right),
    ] {
        let phi = bath_correlation(bath, beta, tau)?;
        plus += 2.0 * (phi * phase).re;
        minus += 2.0 * (phi * phase.conj()).re;
    }
    Ok((plus, minus))
}

/// Markovian decay rate `Lambda_S = -sum Gamma (1 + 2N)`.
pub fn markov_lambda(junction: &Junction, betas: PerBath<f64>) -> Result<f64> {
    Ok(junction.rates_from_betas(betas)?.lambda)
}

/// `-int_{t0}^{t1} (V_plus + V_minus) dtau`, using
/// `V_plus + V_minus = 4 cos(tau) sum Re Phi(tau)`.
fn lambda_increment(
    junction: &Junction,
    betas: PerBath<f64>,
    t0: f64,
    t1: f64,
) -> Result<Estimate> {
    if t1 == t0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let failure: Cell<Option<Error>> = Cell::new(None);
    let inner_error = Cell::new(0.0_f64);
    let integrand = |tau: f64| {
        let mut sum = 0.0;
        for (bath, beta) in [
            (&junction.baths.left, betas.left),
            (&junction.baths.right, betas.right),
        ] {
            match correlation_real(bath, beta, tau) {
                Ok(est) => {
                    sum += est.value;
                    inner_error.set(inner_error.get().max(est.error));
                }
                Err(e) => {
                    failure.set(Some(e));
                    return f64::NAN;
                }
            }
        }
        -4.0 * tau.cos() * sum
    };
    let panels = ((t1 - t0) / 0.5).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=panels)
        .map(|k| t0 + (t1 - t0) * k as f64 / panels as f64)
        .collect();
    let est = Integrator::with_rel_tol(LAMBDA_REL_TOL).integrate_breaks(integrand, &breaks);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let est = est?;
    Ok(Estimate {
        value: est.value,
        error: est.error + 4.0 * (t1 - t0) * inner_error.get(),
    })
}

/// Non-Markovian decay rate `Lambda(t)`, `t` in units of `1/omega0`.
pub fn lambda_of_t(junction: &Junction, betas: PerBath<f64>, t: f64) -> Result<Estimate> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    lambda_increment(junction, betas, 0.0, t)
}

/// A fixed pair of bath temperatures.
#[derive(Clone, Debug, PartialEq)]
pub struct TemperatureSetting {
    pub label: String,
    pub t_left_k: f64,
    pub t_right_k: f64,
}

impl TemperatureSetting {
    pub fn new(label: impl Into<String>, t_left_k: f64, t_right_k: f64) -> Self {
        TemperatureSetting {
            label: label.into(),
            t_left_k,
            t_right_k,
        }
    }

    pub fn betas(&self, junction: &Junction) -> Result<PerBath<f64>> {
        Ok(PerBath::new(
            junction.units.beta_tilde(self.t_left_k)?,
            junction.units.beta_tilde(self.t_right_k)?,
        ))
    }
}

/// (100 K, 200 K), (200 K, 300 K) and the starting point of the reference
/// circle, `T_L = T_R = 200 + 100 cos(pi/4)`.
pub fn reference_settings() -> Vec<TemperatureSetting> {
    let t0 = 200.0 + 100.0 * std::f64::consts::FRAC_PI_4.cos();
    vec![
        TemperatureSetting::new("TL100_TR200", 100.0, 200.0),
        TemperatureSetting::new("TL200_TR300", 200.0, 300.0),
        TemperatureSetting::new("TL0_TR0", t0, t0),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationTrace {
    pub setting: TemperatureSetting,
    /// Scaled sample times.
    pub tau_grid: Vec<f64>,
    /// `Phi_nu(tau)` at each sample time.
    pub phi_values: Vec<PerBath<Complex64>>,
    pub lambda_values: Vec<f64>,
    pub lambda_errors: Vec<f64>,
    pub lambda_markov: f64,
    /// `(Lambda(t) - Lambda_S) / Lambda_S`.
    pub rel_error: Vec<f64>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::validation("time grid is empty"));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::validation("time grid must be finite"));
    }
    if !(grid[0] > 0.0) {
        return Err(Error::validation("time grid must start above zero"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::validation("time grid must be strictly increasing"));
    }
    Ok(())
}

fn trace_for(
    junction: &Junction,
    setting: &TemperatureSetting,
    grid: &[f64],
) -> Result<CorrelationTrace> {
    let betas = setting.betas(junction)?;
    let lambda_markov = markov_lambda(junction, betas)?;
    // increments between neighbouring grid points are independent
    let starts: Vec<f64> = std::iter::once(0.0).chain(grid.iter().copied()).collect();
    let steps = starts
        .par_windows(2)
        .map(|w| lambda_increment(junction, betas, w[0], w[1]))
        .collect::<Result<Vec<_>>>()?;
    let phi_values = grid
        .par_iter()
        .map(|&t| {
            Ok(PerBath::new(
                bath_correlation(&junction.baths.left, betas.left, t)?,
                bath_correlation(&junction.baths.right, betas.right, t)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut lambda_values = Vec::with_capacity(grid.len());
    let mut lambda_errors = Vec::with_capacity(grid.len());
    let (mut lambda, mut error) = (0.0, 0.0);
    for step in &steps {
        lambda += step.value;
        error += step.error;
        lambda_values.push(lambda);
        lambda_errors.push(error);
    }
    let rel_error = lambda_values
        .iter()
        .map(|l| (l - lambda_markov) / lambda_markov)
        .collect();
    Ok(CorrelationTrace {
        setting: setting.clone(),
        tau_grid: grid.to_vec(),
        phi_values,
        lambda_values,
        lambda_errors,
        lambda_markov,
        rel_error,
    })
}

/// `Lambda(t)` and its relative distance from the Markovian value on `grid`,
/// one trace per temperature setting.
pub fn relative_error_trace(
    junction: &Junction,
    settings: &[TemperatureSetting],
    grid: &[f64],
) -> Result<Vec<CorrelationTrace>> {
    check_grid(grid)?;
    settings
        .par_iter()
        .map(|s| trace_for(junction, s, grid))
        .collect()
}

/// First grid time at which `|rel_error|` is below `threshold`.
pub fn first_passage_time(trace: &CorrelationTrace, threshold: f64) -> Option<f64> {
    trace
        .rel_error
        .iter()
        .position(|e| e.abs() < threshold)
        .map(|k| trace.tau_grid[k])
}

/// First grid time after which `|rel_error|` stays below `threshold`.
pub fn settling_time(trace: &CorrelationTrace, threshold: f64) -> Option<f64> {
    match trace.rel_error.iter().rposition(|e| e.abs() >= threshold) {
        None => trace.tau_grid.first().copied(),
        Some(k) => trace.tau_grid.get(k + 1).copied(),
    }
}
