//! Cyclic temperature protocols and their piecewise-constant discretization.

use std::f64::consts::{FRAC_PI_4, TAU};
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::units::interval_duration;

/// `T(t) = offset + amplitude * cos(omega t + phase)`, in kelvin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Modulation {
    pub offset_k: f64,
    pub amplitude_k: f64,
    pub phase_rad: f64,
}

impl Modulation {
    pub fn new(offset_k: f64, amplitude_k: f64, phase_rad: f64) -> Self {
        Modulation {
            offset_k,
            amplitude_k,
            phase_rad,
        }
    }

    pub fn constant(temperature_k: f64) -> Self {
        Modulation::new(temperature_k, 0.0, 0.0)
    }

    fn at_phase(&self, theta: f64) -> f64 {
        self.offset_k + self.amplitude_k * (theta + self.phase_rad).cos()
    }

    fn derivative_at_phase(&self, theta: f64) -> f64 {
        -self.amplitude_k * (theta + self.phase_rad).sin()
    }

    fn min_temperature(&self) -> f64 {
        self.offset_k - self.amplitude_k.abs()
    }
}

/// Sinusoidal modulation of both bath temperatures at a common angular
/// frequency `omega` (rad/s).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulationProtocol {
    pub left: Modulation,
    pub right: Modulation,
    omega_rad_per_s: f64,
}

impl ModulationProtocol {
    pub fn new(left: Modulation, right: Modulation, omega_rad_per_s: f64) -> Result<Self> {
        if !(omega_rad_per_s.is_finite() && omega_rad_per_s > 0.0) {
            return Err(Error::validation(format!(
                "modulation frequency must be positive, got {omega_rad_per_s} rad/s"
            )));
        }
        for (label, m) in [("L", &left), ("R", &right)] {
            let fields = [m.offset_k, m.amplitude_k, m.phase_rad];
            if fields.iter().any(|x| !x.is_finite()) {
                return Err(Error::validation(format!(
                    "bath {label}: protocol parameters must be finite"
                )));
            }
            if !(m.min_temperature() > 0.0) {
                return Err(Error::validation(format!(
                    "bath {label}: temperature reaches {} K during the cycle; it must stay positive",
                    m.min_temperature()
                )));
            }
        }
        Ok(ModulationProtocol {
            left,
            right,
            omega_rad_per_s,
        })
    }

    /// `T_L = 200 + 100 cos(omega t + pi/4)`, `T_R = 200 + 100 sin(omega t + pi/4)`.
    pub fn reference(omega_rad_per_s: f64) -> Result<Self> {
        ModulationProtocol::new(
            Modulation::new(200.0, 100.0, FRAC_PI_4),
            // sin(x + pi/4) = cos(x - pi/4)
            Modulation::new(200.0, 100.0, -FRAC_PI_4),
            omega_rad_per_s,
        )
    }

    pub fn constant(t_left_k: f64, t_right_k: f64, omega_rad_per_s: f64) -> Result<Self> {
        ModulationProtocol::new(
            Modulation::constant(t_left_k),
            Modulation::constant(t_right_k),
            omega_rad_per_s,
        )
    }

    pub fn omega_rad_per_s(&self) -> f64 {
        self.omega_rad_per_s
    }

    pub fn with_omega(&self, omega_rad_per_s: f64) -> Result<Self> {
        ModulationProtocol::new(self.left, self.right, omega_rad_per_s)
    }

    pub fn period_s(&self) -> f64 {
        TAU / self.omega_rad_per_s
    }

    /// Temperatures at cycle phase `theta = omega t`.
    pub fn at_phase(&self, theta: f64) -> (f64, f64) {
        (self.left.at_phase(theta), self.right.at_phase(theta))
    }

    /// `d(T_L, T_R)/d theta` at cycle phase `theta`.
    pub fn phase_derivative(&self, theta: f64) -> (f64, f64) {
        (
            self.left.derivative_at_phase(theta),
            self.right.derivative_at_phase(theta),
        )
    }

    /// Temperatures at time `t` seconds.
    pub fn sample(&self, t_s: f64) -> (f64, f64) {
        self.at_phase(self.omega_rad_per_s * t_s)
    }

    /// The same contour traversed backwards in time.
    pub fn reversed(&self) -> Self {
        let flip = |m: Modulation| Modulation::new(m.offset_k, m.amplitude_k, -m.phase_rad);
        ModulationProtocol {
            left: flip(self.left),
            right: flip(self.right),
            omega_rad_per_s: self.omega_rad_per_s,
        }
    }

    pub fn is_static(&self) -> bool {
        self.left.amplitude_k == 0.0 && self.right.amplitude_k == 0.0
    }

    /// Writes the contour as `center + M (cos theta, sin theta)` and returns
    /// `(center, M)` with `M` row-major. The enclosed region is the image of
    /// the unit disk; `det M > 0` means counter-clockwise traversal in the
    /// `(T_L, T_R)` plane.
    pub fn ellipse(&self) -> ((f64, f64), [[f64; 2]; 2]) {
        let row = |m: &Modulation| {
            [
                m.amplitude_k * m.phase_rad.cos(),
                -m.amplitude_k * m.phase_rad.sin(),
            ]
        };
        (
            (self.left.offset_k, self.right.offset_k),
            [row(&self.left), row(&self.right)],
        )
    }

    pub fn discretize(&self, n: usize) -> Result<DiscretizedSchedule> {
        self.discretize_with(n, SamplingPoint::LeftEndpoint)
    }

    pub fn discretize_with(
        &self,
        n: usize,
        sampling: SamplingPoint,
    ) -> Result<DiscretizedSchedule> {
        let delta_t = interval_duration(self.omega_rad_per_s, n)?;
        let shift = match sampling {
            SamplingPoint::LeftEndpoint => 0.0,
            SamplingPoint::Midpoint => 0.5,
        };
        // by phase, so the temperature sequence does not depend on Omega
        let entries = (0..n)
            .map(|j| self.at_phase(TAU * (j as f64 + shift) / n as f64))
            .collect();
        DiscretizedSchedule::new(entries, delta_t)
    }
}

/// Where inside each interval the protocol is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SamplingPoint {
    #[default]
    LeftEndpoint,
    Midpoint,
}

/// `n` intervals of equal width, each holding constant `(T_L, T_R)` in kelvin.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretizedSchedule {
    entries: Vec<(f64, f64)>,
    delta_t_s: f64,
}

impl DiscretizedSchedule {
    pub fn new(entries: Vec<(f64, f64)>, delta_t_s: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::validation("schedule needs at least one interval"));
        }
        if !(delta_t_s.is_finite() && delta_t_s > 0.0) {
            return Err(Error::validation(format!(
                "interval width must be positive, got {delta_t_s} s"
            )));
        }
        for (j, &(tl, tr)) in entries.iter().enumerate() {
            if !(tl > 0.0 && tr > 0.0 && tl.is_finite() && tr.is_finite()) {
                return Err(Error::validation(format!(
                    "interval {}: temperatures ({tl}, {tr}) K must be positive",
                    j + 1
                )));
            }
        }
        Ok(DiscretizedSchedule { entries, delta_t_s })
    }

    pub fn constant(t_left_k: f64, t_right_k: f64, n: usize, delta_t_s: f64) -> Result<Self> {
        DiscretizedSchedule::new(vec![(t_left_k, t_right_k); n], delta_t_s)
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn delta_t_s(&self) -> f64 {
        self.delta_t_s
    }

    pub fn period_s(&self) -> f64 {
        self.delta_t_s * self.entries.len() as f64
    }

    /// Temperature pairs, interval `j` at index `j - 1`.
    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    /// Same temperature sequence with a different interval width.
    pub fn with_delta_t(&self, delta_t_s: f64) -> Result<Self> {
        DiscretizedSchedule::new(self.entries.clone(), delta_t_s)
    }

    pub fn swap_baths(&self) -> Self {
        DiscretizedSchedule {
            entries: self.entries.iter().map(|&(l, r)| (r, l)).collect(),
            delta_t_s: self.delta_t_s,
        }
    }

    /// Concatenates `periods` copies of the schedule.
    pub fn repeated(&self, periods: usize) -> Result<Self> {
        if periods == 0 {
            return Err(Error::validation("period count must be at least 1"));
        }
        let entries = self
            .entries
            .iter()
            .copied()
            .cycle()
            .take(self.entries.len() * periods)
            .collect();
        Ok(DiscretizedSchedule {
            entries,
            delta_t_s: self.delta_t_s,
        })
    }

    /// Writes `j,T_L_K,T_R_K` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["j", "T_L_K", "T_R_K"])?;
        for (j, &(tl, tr)) in self.entries.iter().enumerate() {
            out.write_record([
                (j + 1).to_string(),
                crate::export::fmt_f64(tl),
                crate::export::fmt_f64(tr),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads `j,T_L_K,T_R_K` rows. The file carries no timing, so the
    /// interval width is supplied by the caller.
    pub fn read_csv<R: Read>(reader: R, delta_t_s: f64) -> Result<Self> {
        let mut input = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = input.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["j", "T_L_K", "T_R_K"] {
            return Err(Error::validation(format!(
                "schedule header must be `j,T_L_K,T_R_K`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = Vec::new();
        for (row, record) in input.records().enumerate() {
            let record = record?;
            let field = |i: usize| -> Result<&str> {
                record.get(i).ok_or_else(|| {
                    Error::validation(format!("schedule row {}: missing field", row + 1))
                })
            };
            let j: usize = field(0)?
                .parse()
                .map_err(|_| Error::validation(format!("schedule row {}: bad index", row + 1)))?;
            if j != row + 1 {
                return Err(Error::validation(format!(
                    "schedule row {}: expected index {}, found {j}",
                    row + 1,
                    row + 1
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse().map_err(|_| {
                    Error::validation(format!("schedule row {}: bad temperature `{s}`", row + 1))
                })
            };
            entries.push((parse(field(1)?)?, parse(field(2)?)?));
        }
        DiscretizedSchedule::new(entries, delta_t_s)
    }
}
