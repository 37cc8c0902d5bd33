//! Closed-form propagation of the ground-state population through a
//! piecewise-constant schedule, and the heat each bath absorbs on the way.
//!
//! Inside interval `j` the population relaxes exponentially,
//! `rho00(t) = rho_s(j) + exp(Lambda(j) t) (rho00(t_{j-1}) - rho_s(j))`,
//! so no time stepping is needed. Heat is counted positive when it flows
//! from the junction into a bath, in units of `hbar omega0`.

use crate::bath::{BathSide, IntervalRates, Junction, PerBath};
use crate::error::{Error, Result};
use crate::protocol::DiscretizedSchedule;

/// `(exp(lambda dt) - 1) / lambda`, continuous through `lambda = 0`.
pub fn relaxation_integral(lambda: f64, dt: f64) -> f64 {
    if lambda == 0.0 {
        dt
    } else {
        (lambda * dt).exp_m1() / lambda
    }
}

pub(crate) fn check_probability(rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::validation(format!(
            "initial ground population must lie in [0, 1], got {rho}"
        )));
    }
    Ok(())
}

/// Rates for every interval of a schedule, in order.
pub fn schedule_rates(
    junction: &Junction,
    schedule: &DiscretizedSchedule,
) -> Result<Vec<IntervalRates>> {
    schedule
        .entries()
        .iter()
        .map(|&(tl, tr)| junction.interval_rates(tl, tr))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PopulationTrajectory {
    /// Interval width in units of `1/omega0`.
    pub delta_t: f64,
    /// `rho00(t_j)` for `j = 0..=n`.
    pub rho00: Vec<f64>,
    /// Rates in force during interval `j`, stored at index `j - 1`.
    pub rates: Vec<IntervalRates>,
}

impl PopulationTrajectory {
    pub fn n(&self) -> usize {
        self.rates.len()
    }

    /// Ground population at time `t` (scaled) inside interval `j` (1-based).
    pub fn rho00_within(&self, j: usize, t: f64) -> f64 {
        let rates = &self.rates[j - 1];
        rates.rho_s + (rates.lambda * t).exp() * (self.rho00[j - 1] - rates.rho_s)
    }
}

fn propagate_rates(
    rates: Vec<IntervalRates>,
    delta_t: f64,
    rho00_initial: f64,
) -> PopulationTrajectory {
    let mut rho00 = Vec::with_capacity(rates.len() + 1);
    rho00.push(rho00_initial);
    let mut current = rho00_initial;
    for r in &rates {
        current = r.rho_s + (r.lambda * delta_t).exp() * (current - r.rho_s);
        rho00.push(current);
    }
    PopulationTrajectory {
        delta_t,
        rho00,
        rates,
    }
}

pub fn propagate_population(
    junction: &Junction,
    schedule: &DiscretizedSchedule,
    rho00_initial: f64,
) -> Result<PopulationTrajectory> {
    check_probability(rho00_initial)?;
    let rates = schedule_rates(junction, schedule)?;
    let delta_t = junction.units.scaled_time(schedule.delta_t_s());
    Ok(propagate_rates(rates, delta_t, rho00_initial))
}

/// Heat delivered to each bath during one interval of scaled width `delta_t`
/// that starts from ground population `rho00_start`.
pub fn interval_heat(rates: &IntervalRates, rho00_start: f64, delta_t: f64) -> PerBath<f64> {
    if rates.lambda == 0.0 {
        return PerBath::new(0.0, 0.0);
    }
    let population_integral = rates.rho_s * delta_t
        + (rho00_start - rates.rho_s) * relaxation_integral(rates.lambda, delta_t);
    rates
        .baths
        .map(|b| b.a * population_integral - b.b * delta_t)
}

/// Heat accumulated over a schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatRecord {
    /// Per-interval heat, interval `j` at index `j - 1`.
    pub per_interval: Vec<PerBath<f64>>,
    pub totals: PerBath<f64>,
    pub duration_s: f64,
    /// `(J^R - J^L) / (hbar omega0 * duration)` in 1/s.
    pub net_current_per_s: f64,
    pub trajectory: PopulationTrajectory,
}

impl HeatRecord {
    pub fn total(&self, side: BathSide) -> f64 {
        *self.totals.get(side)
    }
}

pub fn accumulate_flux(
    junction: &Junction,
    schedule: &DiscretizedSchedule,
    rho00_initial: f64,
) -> Result<HeatRecord> {
    let trajectory = propagate_population(junction, schedule, rho00_initial)?;
    let per_interval: Vec<PerBath<f64>> = trajectory
        .rates
        .iter()
        .zip(&trajectory.rho00)
        .map(|(r, &start)| interval_heat(r, start, trajectory.delta_t))
        .collect();
    let totals = per_interval.iter().fold(PerBath::new(0.0, 0.0), |acc, q| {
        PerBath::new(acc.left + q.left, acc.right + q.right)
    });
    let duration_s = schedule.period_s();
    Ok(HeatRecord {
        net_current_per_s: totals.net() / duration_s,
        per_interval,
        totals,
        duration_s,
        trajectory,
    })
}
