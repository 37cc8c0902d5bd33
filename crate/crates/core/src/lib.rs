//! Heat transport through a two-level junction coupled to two Ohmic bosonic
//! baths whose temperatures are modulated cyclically in piecewise-constant
//! steps.
//!
//! The crate propagates the junction population in closed form, accumulates
//! the heat exchanged with each bath, and splits it exactly into dynamical,
//! geometric and non-adiabatic parts. It also evaluates the continuous
//! adiabatic limit and the non-Markovian decay rate used to judge when the
//! piecewise-Markovian description is adequate.

// Validation is written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adiabatic;
pub mod bath;
pub mod correlation;
pub mod decomposition;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod protocol;
pub mod quadrature;
pub mod units;

pub use bath::{gibbs_ground_population, BathParams, BathSide, IntervalRates, Junction, PerBath};
pub use error::{Error, Result};
pub use protocol::{DiscretizedSchedule, Modulation, ModulationProtocol, SamplingPoint};
pub use units::UnitSystem;
