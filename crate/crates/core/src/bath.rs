//! Ohmic heat baths and the Markovian rate constants they induce on the
//! two-level junction.
//!
//! Symbols follow the rate-equation literature: `k_u = Gamma (1 + N)` is the
//! emission rate that fills the ground state and `k_d = Gamma N` the
//! absorption rate that empties it. All rates are in units of `omega0`.

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};
use crate::units::UnitSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BathSide {
    Left,
    Right,
}

impl BathSide {
    pub const BOTH: [BathSide; 2] = [BathSide::Left, BathSide::Right];

    pub fn label(self) -> &'static str {
        match self {
            BathSide::Left => "L",
            BathSide::Right => "R",
        }
    }

    pub fn other(self) -> BathSide {
        match self {
            BathSide::Left => BathSide::Right,
            BathSide::Right => BathSide::Left,
        }
    }
}

impl fmt::Display for BathSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A value held separately for the left and right bath.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PerBath<T> {
    pub left: T,
    pub right: T,
}

impl<T> PerBath<T> {
    pub fn new(left: T, right: T) -> Self {
        PerBath { left, right }
    }

    pub fn get(&self, side: BathSide) -> &T {
        match side {
            BathSide::Left => &self.left,
            BathSide::Right => &self.right,
        }
    }

    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> PerBath<U> {
        PerBath {
            left: f(self.left),
            right: f(self.right),
        }
    }

    pub fn as_ref(&self) -> PerBath<&T> {
        PerBath {
            left: &self.left,
            right: &self.right,
        }
    }

    pub fn swapped(self) -> Self {
        PerBath {
            left: self.right,
            right: self.left,
        }
    }
}

impl PerBath<f64> {
    /// Right minus left.
    pub fn net(&self) -> f64 {
        self.right - self.left
    }
}

/// Ohmic bath `h(w) = s w exp(-w / omega_c)`, with `omega_c` in units of `omega0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathParams {
    pub side: BathSide,
    s: f64,
    omega_c: f64,
}

impl BathParams {
    pub fn new(side: BathSide, s: f64, omega_c: f64) -> Result<Self> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::validation(format!(
                "bath {side}: coupling strength must be non-negative, got {s}"
            )));
        }
        if !(omega_c.is_finite() && omega_c > 0.0) {
            return Err(Error::validation(format!(
                "bath {side}: cutoff must be positive, got {omega_c}"
            )));
        }
        Ok(BathParams { side, s, omega_c })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn spectral_density(&self, omega: f64) -> f64 {
        self.s * omega * (-omega / self.omega_c).exp()
    }

    /// `Gamma = 2 pi h(omega0)`, the on-shell coupling.
    pub fn coupling_gamma(&self) -> f64 {
        TAU * self.spectral_density(1.0)
    }
}

/// Mean boson number at the level splitting, `1 / (exp(beta) - 1)`.
pub fn bose_occupation(beta_tilde: f64) -> Result<f64> {
    if !(beta_tilde > 0.0) {
        return Err(Error::domain(format!(
            "scaled inverse temperature must be positive, got {beta_tilde}"
        )));
    }
    Ok(1.0 / beta_tilde.exp_m1())
}

/// Rate constants contributed by a single bath during one interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathRates {
    pub gamma: f64,
    pub occupation: f64,
    pub k_u: f64,
    pub k_d: f64,
    /// `-(k_d + k_u)`, the coefficient of the ground population in the heat flux.
    pub a: f64,
    /// `-k_u`.
    pub b: f64,
}

impl BathRates {
    pub fn new(gamma: f64, occupation: f64) -> Self {
        let k_u = gamma * (1.0 + occupation);
        let k_d = gamma * occupation;
        BathRates {
            gamma,
            occupation,
            k_u,
            k_d,
            a: -(k_d + k_u),
            b: -k_u,
        }
    }
}

/// The full rate bundle for one temperature setting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalRates {
    pub baths: PerBath<BathRates>,
    pub k_u: f64,
    pub k_d: f64,
    /// Decay rate of the ground population, `-(K_d + K_u)`.
    pub lambda: f64,
    /// Steady-state ground population `K_u / (K_d + K_u)`.
    pub rho_s: f64,
}

impl IntervalRates {
    pub fn from_bath_rates(baths: PerBath<BathRates>) -> Self {
        let k_u = baths.left.k_u + baths.right.k_u;
        let k_d = baths.left.k_d + baths.right.k_d;
        let total = k_u + k_d;
        // Fully decoupled junction: populations are frozen and any value is a
        // fixed point. One half keeps the field finite.
        let rho_s = if total > 0.0 { k_u / total } else { 0.5 };
        IntervalRates {
            baths,
            k_u,
            k_d,
            lambda: -total,
            rho_s,
        }
    }

    /// The `(A, B)` coefficients of the counting-field derivative for one bath.
    pub fn markov_generator(&self, side: BathSide) -> (f64, f64) {
        let bath = self.baths.get(side);
        (bath.a, bath.b)
    }

    /// `A_nu / Lambda`, zero for a decoupled junction.
    pub fn a_over_lambda(&self, side: BathSide) -> f64 {
        if self.lambda == 0.0 {
            0.0
        } else {
            self.baths.get(side).a / self.lambda
        }
    }

    /// Heat current into a bath when the junction sits at its steady state,
    /// `A rho_s - B`. Written as `Gamma_nu Gamma_mu (N_mu - N_nu) / K`, which
    /// vanishes exactly for equal temperatures.
    pub fn steady_current(&self, side: BathSide) -> f64 {
        if self.lambda == 0.0 {
            return 0.0;
        }
        let this = self.baths.get(side);
        let other = self.baths.get(side.other());
        this.gamma * other.gamma * (other.occupation - this.occupation) / -self.lambda
    }
}

/// Level splitting together with the two baths it couples to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Junction {
    pub units: UnitSystem,
    pub baths: PerBath<BathParams>,
}

impl Junction {
    pub fn new(units: UnitSystem, left: BathParams, right: BathParams) -> Result<Self> {
        if left.side != BathSide::Left || right.side != BathSide::Right {
            return Err(Error::validation("bath labels must be (L, R)"));
        }
        Ok(Junction {
            units,
            baths: PerBath::new(left, right),
        })
    }

    /// Identical Ohmic baths on both sides.
    pub fn symmetric(units: UnitSystem, s: f64, omega_c: f64) -> Result<Self> {
        Junction::new(
            units,
            BathParams::new(BathSide::Left, s, omega_c)?,
            BathParams::new(BathSide::Right, s, omega_c)?,
        )
    }

    /// `s = 0.01`, `omega_c = 3 omega0`, `hbar omega0 = 25 meV`.
    pub fn reference() -> Self {
        Junction::symmetric(UnitSystem::default(), 0.01, 3.0).expect("valid reference junction")
    }

    pub fn gammas(&self) -> PerBath<f64> {
        self.baths.map(|b| b.coupling_gamma())
    }

    /// Rates for bath temperatures given as scaled inverse temperatures.
    pub fn rates_from_betas(&self, betas: PerBath<f64>) -> Result<IntervalRates> {
        let left = BathRates::new(
            self.baths.left.coupling_gamma(),
            bose_occupation(betas.left)?,
        );
        let right = BathRates::new(
            self.baths.right.coupling_gamma(),
            bose_occupation(betas.right)?,
        );
        Ok(IntervalRates::from_bath_rates(PerBath::new(left, right)))
    }

    /// Rates for bath temperatures in kelvin.
    pub fn interval_rates(&self, t_left_k: f64, t_right_k: f64) -> Result<IntervalRates> {
        self.rates_from_betas(PerBath::new(
            self.units.beta_tilde(t_left_k)?,
            self.units.beta_tilde(t_right_k)?,
        ))
    }

    pub fn swapped(&self) -> Junction {
        let mut baths = self.baths.swapped();
        baths.left.side = BathSide::Left;
        baths.right.side = BathSide::Right;
        Junction {
            units: self.units,
            baths,
        }
    }
}

/// Two-level Gibbs ground population `e^beta / (e^beta + 1)`.
pub fn gibbs_ground_population(beta_tilde: f64) -> f64 {
    1.0 / (1.0 + (-beta_tilde).exp())
}
