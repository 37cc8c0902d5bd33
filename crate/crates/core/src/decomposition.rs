//! Splits the heat accumulated over one cycle into a dynamical part `G1`
//! (bias-driven, survives static temperatures), a geometric part `G2`
//! (depends only on the sequence of steady states visited) and a
//! non-adiabatic part `G3` (memory of the initial state and of incomplete
//! relaxation within each interval).
//!
//! For every bath `hbar omega0 (G1 + G2 + G3)` equals the directly
//! accumulated heat from [`crate::dynamics::accumulate_flux`]; the two
//! routes share only the rate constants.

use rayon::prelude::*;

use crate::bath::{BathSide, IntervalRates, Junction, PerBath};
use crate::dynamics::{accumulate_flux, check_probability, schedule_rates};
use crate::error::Result;
use crate::protocol::DiscretizedSchedule;

// exp(x) underflows to zero below this.
const EXP_UNDERFLOW: f64 = -746.0;

/// Per-interval quantities shared by all three parts.
struct RateTable {
    rates: Vec<IntervalRates>,
    /// `Lambda(j) delta_t`.
    decay: Vec<f64>,
    /// `prefix[k] = sum_{i < k} decay[i]`, accumulated in the exponent.
    prefix: Vec<f64>,
    delta_t: f64,
}

impl RateTable {
    fn new(rates: Vec<IntervalRates>, delta_t: f64) -> Self {
        let decay: Vec<f64> = rates.iter().map(|r| r.lambda * delta_t).collect();
        let mut prefix = Vec::with_capacity(decay.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for d in &decay {
            acc += d;
            prefix.push(acc);
        }
        RateTable {
            rates,
            decay,
            prefix,
            delta_t,
        }
    }

    fn build(junction: &Junction, schedule: &DiscretizedSchedule) -> Result<Self> {
        Ok(RateTable::new(
            schedule_rates(junction, schedule)?,
            junction.units.scaled_time(schedule.delta_t_s()),
        ))
    }

    fn n(&self) -> usize {
        self.rates.len()
    }

    fn rho_s(&self, j: usize) -> f64 {
        self.rates[j - 1].rho_s
    }

    fn ratio(&self, side: BathSide, j: usize) -> f64 {
        self.rates[j - 1].a_over_lambda(side)
    }

    /// `f(p, q) = (A(q)/Lambda(q)) exp(sum_{k=p}^{q-1} Lambda(k) dt) (exp(Lambda(q) dt) - 1)`,
    /// 1-based, `p <= q`.
    fn f(&self, side: BathSide, p: usize, q: usize) -> f64 {
        let exponent = self.prefix[q - 1] - self.prefix[p - 1];
        if exponent < EXP_UNDERFLOW {
            return 0.0;
        }
        self.ratio(side, q) * exponent.exp() * self.decay[q - 1].exp_m1()
    }

    fn dynamical(&self, side: BathSide) -> f64 {
        self.rates
            .iter()
            .map(|r| r.steady_current(side) * self.delta_t)
            .sum()
    }

    fn geometric(&self, side: BathSide) -> f64 {
        (1..self.n())
            .map(|j| self.ratio(side, j + 1) * (self.rho_s(j + 1) - self.rho_s(j)))
            .sum()
    }

    fn phi0(&self, side: BathSide, rho00_initial: f64) -> Vec<f64> {
        let offset = rho00_initial - self.rho_s(1);
        (1..=self.n())
            .map(|j| offset * self.f(side, 1, j))
            .collect()
    }

    fn psi(&self, side: BathSide, j: usize) -> f64 {
        let n = self.n();
        let mut sum = self.ratio(side, j) * self.decay[j - 1].exp();
        for m in j..n {
            // prefix is non-increasing, so once a term underflows all later ones do
            if self.prefix[m] - self.prefix[j - 1] < EXP_UNDERFLOW {
                break;
            }
            sum += self.f(side, j, m + 1);
        }
        sum
    }

    fn nonadiabatic(&self, side: BathSide, rho00_initial: f64) -> NonAdiabaticPart {
        let n = self.n();
        let phi0 = self.phi0(side, rho00_initial);
        let psi: Vec<f64> = (1..=n).into_par_iter().map(|j| self.psi(side, j)).collect();
        let mut g3: f64 = phi0.iter().sum();
        if n >= 2 {
            for j in 2..n {
                g3 += (self.rho_s(j - 1) - self.rho_s(j)) * psi[j - 1];
            }
            g3 +=
                (self.rho_s(n - 1) - self.rho_s(n)) * self.ratio(side, n) * self.decay[n - 1].exp();
        }
        NonAdiabaticPart { g3, phi0, psi }
    }
}

/// `G3` for one bath with the traces it is built from.
#[derive(Clone, Debug, PartialEq)]
pub struct NonAdiabaticPart {
    pub g3: f64,
    /// `phi0(j)`, the relaxation away from the initial state, index `j - 1`.
    pub phi0: Vec<f64>,
    /// `psi(j)`, index `j - 1`.
    pub psi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BathDecomposition {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub phi0: Vec<f64>,
    pub psi: Vec<f64>,
    /// Heat from direct accumulation, units of `hbar omega0`.
    pub direct_total: f64,
}

impl BathDecomposition {
    pub fn adiabatic(&self) -> f64 {
        self.g1 + self.g2
    }

    pub fn total(&self) -> f64 {
        self.g1 + self.g2 + self.g3
    }

    /// `|direct - (G1 + G2 + G3)| / max(|direct|, floor)`.
    pub fn identity_residual(&self) -> f64 {
        (self.direct_total - self.total()).abs() / self.direct_total.abs().max(IDENTITY_FLOOR)
    }
}

/// Denominator floor for [`BathDecomposition::identity_residual`], in units
/// of `hbar omega0`.
pub const IDENTITY_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct FluxDecomposition {
    pub baths: PerBath<BathDecomposition>,
    pub period_s: f64,
}

impl FluxDecomposition {
    pub fn bath(&self, side: BathSide) -> &BathDecomposition {
        self.baths.get(side)
    }

    fn net(&self, part: impl Fn(&BathDecomposition) -> f64) -> f64 {
        (part(&self.baths.right) - part(&self.baths.left)) / self.period_s
    }

    pub fn net_dynamical_per_s(&self) -> f64 {
        self.net(|b| b.g1)
    }

    pub fn net_geometric_per_s(&self) -> f64 {
        self.net(|b| b.g2)
    }

    pub fn net_nonadiabatic_per_s(&self) -> f64 {
        self.net(|b| b.g3)
    }

    pub fn net_total_per_s(&self) -> f64 {
        self.net(|b| b.total())
    }

    pub fn net_direct_per_s(&self) -> f64 {
        self.net(|b| b.direct_total)
    }

    /// `phi0^R(j) - phi0^L(j)`.
    pub fn phi0_profile(&self) -> Vec<f64> {
        self.baths
            .right
            .phi0
            .iter()
            .zip(&self.baths.left.phi0)
            .map(|(r, l)| r - l)
            .collect()
    }

    pub fn max_identity_residual(&self) -> f64 {
        self.baths
            .left
            .identity_residual()
            .max(self.baths.right.identity_residual())
    }
}

pub fn dynamical_part(junction: &Junction, schedule: &DiscretizedSchedule) -> Result<PerBath<f64>> {
    let table = RateTable::build(junction, schedule)?;
    Ok(PerBath::new(
        table.dynamical(BathSide::Left),
        table.dynamical(BathSide::Right),
    ))
}

pub fn geometric_part(junction: &Junction, schedule: &DiscretizedSchedule) -> Result<PerBath<f64>> {
    let table = RateTable::build(junction, schedule)?;
    Ok(PerBath::new(
        table.geometric(BathSide::Left),
        table.geometric(BathSide::Right),
    ))
}

/// Net geometric current `(G2^R - G2^L) / period` in 1/s.
pub fn net_geometric_current(junction: &Junction, schedule: &DiscretizedSchedule) -> Result<f64> {
    Ok(geometric_part(junction, schedule)?.net() / schedule.period_s())
}

pub fn nonadiabatic_part(
    junction: &Junction,
    schedule: &DiscretizedSchedule,
    rho00_initial: f64,
) -> Result<PerBath<NonAdiabaticPart>> {
    check_probability(rho00_initial)?;
    let table = RateTable::build(junction, schedule)?;
    Ok(PerBath::new(
        table.nonadiabatic(BathSide::Left, rho00_initial),
        table.nonadiabatic(BathSide::Right, rho00_initial),
    ))
}

/// `phi0^R(j) - phi0^L(j)` for `j = 1..=n`.
pub fn phi0_profile(
    junction: &Junction,
    schedule: &DiscretizedSchedule,
    rho00_initial: f64,
) -> Result<Vec<f64>> {
    check_probability(rho00_initial)?;
    let table = RateTable::build(junction, schedule)?;
    let right = table.phi0(BathSide::Right, rho00_initial);
    let left = table.phi0(BathSide::Left, rho00_initial);
    Ok(right.iter().zip(&left).map(|(r, l)| r - l).collect())
}

/// All three parts for both baths, alongside the direct accumulation.
pub fn decompose(
    junction: &Junction,
    schedule: &DiscretizedSchedule,
    rho00_initial: f64,
) -> Result<FluxDecomposition> {
    let direct = accumulate_flux(junction, schedule, rho00_initial)?;
    let table = RateTable::new(direct.trajectory.rates.clone(), direct.trajectory.delta_t);
    let part = |side: BathSide| {
        let na = table.nonadiabatic(side, rho00_initial);
        BathDecomposition {
            g1: table.dynamical(side),
            g2: table.geometric(side),
            g3: na.g3,
            phi0: na.phi0,
            psi: na.psi,
            direct_total: direct.total(side),
        }
    };
    Ok(FluxDecomposition {
        baths: PerBath::new(part(BathSide::Left), part(BathSide::Right)),
        period_s: schedule.period_s(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::gibbs_ground_population;
    use crate::protocol::ModulationProtocol;

    fn reference() -> Junction {
        Junction::reference()
    }

    fn reference_schedule(omega: f64, n: usize) -> DiscretizedSchedule {
        ModulationProtocol::reference(omega)
            .unwrap()
            .discretize(n)
            .unwrap()
    }

    #[test]
    fn dynamical_part_two_closed_forms() {
        let j = reference();
        let units = j.units;
        let schedule =
            DiscretizedSchedule::constant(100.0, 200.0, 1, units.seconds_from_scaled(1.0)).unwrap();
        let g1 = dynamical_part(&j, &schedule).unwrap();
        let rates = j.interval_rates(100.0, 200.0).unwrap();
        let gamma = rates.baths.left.gamma;
        let (nl, nr) = (rates.baths.left.occupation, rates.baths.right.occupation);
        let closed = gamma * gamma * (nl - nr) / (gamma * (2.0 + 2.0 * nl + 2.0 * nr)) * 1.0;
        assert!(((g1.right - closed) / closed).abs() < 1e-12);
        assert!((g1.right + 0.004_092_846_386_424_791).abs() < 1e-12);
        assert!((g1.left + g1.right).abs() < 1e-17);
    }

    #[test]
    fn dynamical_part_vanishes_without_bias() {
        let j = reference();
        let p = ModulationProtocol::new(
            crate::protocol::Modulation::new(250.0, 80.0, 0.3),
            crate::protocol::Modulation::new(250.0, 80.0, 0.3),
            1e12,
        )
        .unwrap();
        let g1 = dynamical_part(&j, &p.discretize(33).unwrap()).unwrap();
        assert_eq!(g1.left, g1.right);
        assert!(g1.right.abs() < 1e-18);
        let g2 = geometric_part(&j, &p.discretize(33).unwrap()).unwrap();
        assert!((g2.right - g2.left).abs() < 1e-18);
    }

    #[test]
    fn constant_schedule_has_no_geometric_part() {
        let j = reference();
        let schedule = DiscretizedSchedule::constant(120.0, 310.0, 17, 2e-14).unwrap();
        let d = decompose(&j, &schedule, 0.6).unwrap();
        for side in BathSide::BOTH {
            let b = d.bath(side);
            assert_eq!(b.g2, 0.0);
            // phi0 decays geometrically
            let ratio =
                (j.interval_rates(120.0, 310.0).unwrap().lambda * j.units.scaled_time(2e-14)).exp();
            for w in b.phi0.windows(2) {
                assert!((w[1] / w[0] - ratio).abs() < 1e-13);
            }
            // G3 is exactly the phi0 sum
            let phi_sum: f64 = b.phi0.iter().sum();
            assert!((b.g3 - phi_sum).abs() <= 1e-15 * phi_sum.abs());
        }
    }

    #[test]
    fn single_interval() {
        let j = reference();
        let schedule = DiscretizedSchedule::constant(90.0, 400.0, 1, 5e-14).unwrap();
        let d = decompose(&j, &schedule, 0.2).unwrap();
        assert_eq!(d.bath(BathSide::Right).g2, 0.0);
        assert!(d.max_identity_residual() < 1e-12);
    }

    #[test]
    fn steady_start_has_no_memory() {
        let j = reference();
        let schedule = reference_schedule(5e12, 41);
        let rho_s1 = j
            .interval_rates(schedule.entries()[0].0, schedule.entries()[0].1)
            .unwrap()
            .rho_s;
        let profile = phi0_profile(&j, &schedule, rho_s1).unwrap();
        assert!(profile.iter().all(|&x| x == 0.0));
        let na = nonadiabatic_part(&j, &schedule, rho_s1).unwrap();
        assert!(na.left.phi0.iter().chain(&na.right.phi0).all(|&x| x == 0.0));
    }

    #[test]
    fn slow_relaxation_limit_kills_g3() {
        // |Lambda dt| ~ 1e3 per interval
        let j = reference();
        let p = ModulationProtocol::reference(1e12).unwrap();
        let schedule = p.discretize(41).unwrap().with_delta_t(1e-9).unwrap();
        let rho_s1 = j
            .interval_rates(schedule.entries()[0].0, schedule.entries()[0].1)
            .unwrap()
            .rho_s;
        let na = nonadiabatic_part(&j, &schedule, rho_s1).unwrap();
        assert!(na.left.g3.abs() < 1e-30 && na.right.g3.abs() < 1e-30);
    }

    #[test]
    fn identity_on_reference_protocol() {
        let j = reference();
        for omega in [1e12, 3e12, 5e12] {
            let schedule = reference_schedule(omega, 41);
            let d = decompose(&j, &schedule, gibbs_ground_population(0.5)).unwrap();
            for side in BathSide::BOTH {
                let b = d.bath(side);
                let rel = (b.direct_total - b.total()).abs() / b.direct_total.abs();
                assert!(rel < 1e-10, "omega {omega} side {side}: {rel}");
            }
        }
    }

    #[test]
    fn geometric_part_ignores_interval_width() {
        let j = reference();
        let a = geometric_part(&j, &reference_schedule(1e12, 41)).unwrap();
        let b = geometric_part(&j, &reference_schedule(7e12, 41)).unwrap();
        assert_eq!(a, b);
        let ja = net_geometric_current(&j, &reference_schedule(1e12, 41)).unwrap();
        let jb = net_geometric_current(&j, &reference_schedule(7e12, 41)).unwrap();
        assert!((jb / ja - 7.0).abs() < 1e-13);
    }

    #[test]
    fn geometric_bound() {
        let j = reference();
        let schedule = reference_schedule(1e12, 41);
        let rates = schedule_rates(&j, &schedule).unwrap();
        let variation: f64 = rates
            .windows(2)
            .map(|w| (w[1].rho_s - w[0].rho_s).abs())
            .sum();
        let g2 = geometric_part(&j, &schedule).unwrap();
        for side in BathSide::BOTH {
            let max_ratio = rates
                .iter()
                .map(|r| r.a_over_lambda(side).abs())
                .fold(0.0, f64::max);
            assert!(g2.get(side).abs() <= max_ratio * variation);
        }
    }

    #[test]
    fn colder_initial_state_gives_negative_memory() {
        let j = reference();
        let schedule = reference_schedule(5e12, 41);
        let profile = phi0_profile(&j, &schedule, gibbs_ground_population(3.0)).unwrap();
        // at t = 0 both baths share one temperature, so the first entry is
        // exactly zero and the memory shows up from the second interval on
        assert!(profile[0].abs() < 1e-18);
        assert!(profile[1] < 0.0);
        assert!(profile.iter().sum::<f64>() < 0.0);
        let hot = phi0_profile(&j, &schedule, gibbs_ground_population(0.1)).unwrap();
        assert!(hot[1] > 0.0);
    }
}
