//! Continuous-driving adiabatic limit: the dynamical current and the
//! geometric pumping current, the latter both as a line integral along the
//! protocol and as a surface integral over the enclosed region of the
//! `(T_L, T_R)` plane.

use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::bath::{BathSide, IntervalRates, Junction};
use crate::decomposition::{dynamical_part, geometric_part};
use crate::error::{Error, Result};
use crate::protocol::ModulationProtocol;
use crate::quadrature::{Estimate, Integrator};

pub const DYNAMICAL_REL_TOL: f64 = 1e-9;
pub const LINE_REL_TOL: f64 = 1e-10;
pub const SURFACE_REL_TOL: f64 = 1e-8;

const QUARTERS: [f64; 5] = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2, TAU];

fn rates_at(junction: &Junction, protocol: &ModulationProtocol, theta: f64) -> IntervalRates {
    let (tl, tr) = protocol.at_phase(theta);
    junction
        .interval_rates(tl, tr)
        .expect("validated protocol keeps temperatures positive")
}

/// `dN/dT` in 1/K at temperature `t_k`.
fn occupation_slope(junction: &Junction, t_k: f64, occupation: f64) -> f64 {
    let beta = junction.units.hbar_omega0_over_kb_k() / t_k;
    beta * occupation * (1.0 + occupation) / t_k
}

/// Cycle-averaged steady-state heat current into bath `side`, in 1/s.
pub fn dynamical_current_continuous(
    junction: &Junction,
    protocol: &ModulationProtocol,
    side: BathSide,
) -> Result<Estimate> {
    let integrand = |theta: f64| rates_at(junction, protocol, theta).steady_current(side);
    let est = Integrator::with_rel_tol(DYNAMICAL_REL_TOL).integrate_breaks(integrand, &QUARTERS)?;
    let scale = junction.units.omega0_rad_per_s() / TAU;
    Ok(Estimate {
        value: est.value * scale,
        error: est.error * scale,
    })
}

/// `d rho_s / d theta` along the protocol, by the chain rule through `T_L`, `T_R`.
fn steady_population_slope(
    junction: &Junction,
    protocol: &ModulationProtocol,
    rates: &IntervalRates,
    theta: f64,
) -> f64 {
    let (tl, tr) = protocol.at_phase(theta);
    let (dtl, dtr) = protocol.phase_derivative(theta);
    let b = &rates.baths;
    let drive = b.left.gamma * occupation_slope(junction, tl, b.left.occupation) * dtl
        + b.right.gamma * occupation_slope(junction, tr, b.right.occupation) * dtr;
    let total_k = -rates.lambda;
    if total_k == 0.0 {
        return 0.0;
    }
    -(b.left.gamma + b.right.gamma) * drive / (total_k * total_k)
}

/// Geometric current into bath `side` as the contour integral of
/// `(A/Lambda) d rho_s` over one cycle, divided by the period. In 1/s.
pub fn geometric_current_line(
    junction: &Junction,
    protocol: &ModulationProtocol,
    side: BathSide,
) -> Result<Estimate> {
    if protocol.is_static() {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let integrand = |theta: f64| {
        let rates = rates_at(junction, protocol, theta);
        rates.a_over_lambda(side) * steady_population_slope(junction, protocol, &rates, theta)
    };
    let est = Integrator::with_rel_tol(LINE_REL_TOL).integrate_breaks(integrand, &QUARTERS)?;
    let per_cycle = protocol.omega_rad_per_s() / TAU;
    Ok(Estimate {
        value: est.value * per_cycle,
        error: est.error * per_cycle,
    })
}

/// Result of the area integral; `degenerate` is set when the protocol
/// encloses no area and the value is zero by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceEstimate {
    pub value: f64,
    pub error: f64,
    pub degenerate: bool,
}

/// Geometric current into bath `side` from the curvature
/// `2 Gamma_L Gamma_R (Gamma_L + Gamma_R) / K^3 * dN_L/dT_L * dN_R/dT_R`
/// integrated over the region enclosed by the protocol. In 1/s.
///
/// The protocol traces an ellipse `c + M (cos theta, sin theta)`, so the
/// region is parametrized by polar coordinates on the unit disk with
/// Jacobian `|det M| r`; the traversal sense is `sign(det M)`.
pub fn geometric_current_surface(
    junction: &Junction,
    protocol: &ModulationProtocol,
    side: BathSide,
) -> Result<SurfaceEstimate> {
    let (center, m) = protocol.ellipse();
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().map(|x| x * x).sum::<f64>();
    if det.abs() <= 1e-12 * scale || scale == 0.0 {
        return Ok(SurfaceEstimate {
            value: 0.0,
            error: 0.0,
            degenerate: true,
        });
    }
    let gammas = junction.gammas();
    let curvature = |tl: f64, tr: f64| {
        let rates = junction
            .interval_rates(tl, tr)
            .expect("enclosed region lies inside the positive quadrant");
        let k = -rates.lambda;
        if k == 0.0 {
            return 0.0;
        }
        let b = &rates.baths;
        2.0 * gammas.left * gammas.right * (gammas.left + gammas.right) / (k * k * k)
            * occupation_slope(junction, tl, b.left.occupation)
            * occupation_slope(junction, tr, b.right.occupation)
    };

    let inner_quad = Integrator::with_rel_tol(SURFACE_REL_TOL * 1e-2);
    let inner_error = Cell::new(0.0_f64);
    let inner_failure: Cell<Option<Error>> = Cell::new(None);
    let radial = |theta: f64| {
        let (c, s) = (theta.cos(), theta.sin());
        let f = |r: f64| {
            let tl = center.0 + r * (m[0][0] * c + m[0][1] * s);
            let tr = center.1 + r * (m[1][0] * c + m[1][1] * s);
            curvature(tl, tr) * r
        };
        match inner_quad.integrate(f, 0.0, 1.0) {
            Ok(est) => {
                inner_error.set(inner_error.get().max(est.error));
                est.value
            }
            Err(e) => {
                inner_failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let outer = Integrator::with_rel_tol(SURFACE_REL_TOL).integrate_breaks(radial, &QUARTERS);
    if let Some(e) = inner_failure.take() {
        return Err(e);
    }
    let outer = outer?;
    let sign = match side {
        BathSide::Right => 1.0,
        BathSide::Left => -1.0,
    };
    let factor = sign * det * protocol.omega_rad_per_s() / TAU;
    Ok(SurfaceEstimate {
        value: outer.value * factor,
        error: (outer.error + TAU * inner_error.get()) * factor.abs(),
        degenerate: false,
    })
}

/// Adiabatic currents into the right bath.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdiabaticResult {
    pub j1_right: Estimate,
    pub j2_right_line: Estimate,
    pub j2_right_surface: SurfaceEstimate,
}

pub fn adiabatic_currents(
    junction: &Junction,
    protocol: &ModulationProtocol,
) -> Result<AdiabaticResult> {
    Ok(AdiabaticResult {
        j1_right: dynamical_current_continuous(junction, protocol, BathSide::Right)?,
        j2_right_line: geometric_current_line(junction, protocol, BathSide::Right)?,
        j2_right_surface: geometric_current_surface(junction, protocol, BathSide::Right)?,
    })
}

/// `hbar omega0 G1(n) / period` and `hbar omega0 G2(n) / period` for bath
/// `side`, from an `n`-interval left-endpoint discretization. In 1/s.
pub fn riemann_currents(
    junction: &Junction,
    protocol: &ModulationProtocol,
    side: BathSide,
    n: usize,
) -> Result<(f64, f64)> {
    let schedule = protocol.discretize(n)?;
    let period = schedule.period_s();
    let g1 = dynamical_part(junction, &schedule)?;
    let g2 = geometric_part(junction, &schedule)?;
    Ok((*g1.get(side) / period, *g2.get(side) / period))
}
