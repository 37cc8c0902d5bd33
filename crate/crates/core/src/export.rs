//! CSV writers. Every float is printed with 17 significant digits in
//! scientific notation so identical inputs give byte-identical files.

use std::io::Write;

use crate::adiabatic::AdiabaticResult;
use crate::bath::BathSide;
use crate::correlation::CorrelationTrace;
use crate::decomposition::FluxDecomposition;
use crate::dynamics::PopulationTrajectory;
use crate::error::Result;
use crate::units::UnitSystem;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `j,t_ps,rho00,rho_s_j,Lambda_j_per_ps` for `j = 0..=n`. Row 0 reports the
/// rates of the first interval.
pub fn write_trajectory<W: Write>(
    writer: W,
    trajectory: &PopulationTrajectory,
    units: &UnitSystem,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["j", "t_ps", "rho00", "rho_s_j", "Lambda_j_per_ps"])?;
    let step_ps = units.seconds_from_scaled(trajectory.delta_t) * 1e12;
    for (j, rho) in trajectory.rho00.iter().enumerate() {
        let rates = &trajectory.rates[j.max(1) - 1];
        out.write_record([
            j.to_string(),
            fmt_f64(j as f64 * step_ps),
            fmt_f64(*rho),
            fmt_f64(rates.rho_s),
            fmt_f64(units.rate_per_ps(rates.lambda)),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `bath,G1,G2,G3,direct_total,identity_residual`, one row per bath, in
/// units of `hbar omega0`.
pub fn write_decomposition<W: Write>(writer: W, decomposition: &FluxDecomposition) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record([
        "bath",
        "G1",
        "G2",
        "G3",
        "direct_total",
        "identity_residual",
    ])?;
    for side in BathSide::BOTH {
        let b = decomposition.bath(side);
        out.write_record([
            side.label().to_string(),
            fmt_f64(b.g1),
            fmt_f64(b.g2),
            fmt_f64(b.g3),
            fmt_f64(b.direct_total),
            fmt_f64(b.identity_residual()),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `j,phi0_hat` for `j = 1..=n`.
pub fn write_profile<W: Write>(writer: W, profile: &[f64]) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["j", "phi0_hat"])?;
    for (j, value) in profile.iter().enumerate() {
        out.write_record([(j + 1).to_string(), fmt_f64(*value)])?;
    }
    out.flush()?;
    Ok(())
}

/// One row of the adiabatic-current table, currents in 1/s.
#[derive(Clone, Debug, PartialEq)]
pub struct AdiabaticRow {
    pub method: String,
    pub j1_right: f64,
    pub j2_right: f64,
    pub quad_err: f64,
}

impl AdiabaticRow {
    /// `line` and `surface` rows. The surface row shares the line
    /// evaluation of `J1`.
    pub fn from_result(result: &AdiabaticResult) -> Vec<AdiabaticRow> {
        vec![
            AdiabaticRow {
                method: "line".into(),
                j1_right: result.j1_right.value,
                j2_right: result.j2_right_line.value,
                quad_err: result.j1_right.error + result.j2_right_line.error,
            },
            AdiabaticRow {
                method: "surface".into(),
                j1_right: result.j1_right.value,
                j2_right: result.j2_right_surface.value,
                quad_err: result.j1_right.error + result.j2_right_surface.error,
            },
        ]
    }
}

/// `method,J1_R,J2_R,quad_err`.
pub fn write_adiabatic<W: Write>(writer: W, rows: &[AdiabaticRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["method", "J1_R", "J2_R", "quad_err"])?;
    for row in rows {
        out.write_record([
            row.method.clone(),
            fmt_f64(row.j1_right),
            fmt_f64(row.j2_right),
            fmt_f64(row.quad_err),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `t_scaled,lambda_t,lambda_markov,rel_error,setting_label`, traces in order.
pub fn write_lambda_traces<W: Write>(writer: W, traces: &[CorrelationTrace]) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record([
        "t_scaled",
        "lambda_t",
        "lambda_markov",
        "rel_error",
        "setting_label",
    ])?;
    for trace in traces {
        for k in 0..trace.tau_grid.len() {
            out.write_record([
                fmt_f64(trace.tau_grid[k]),
                fmt_f64(trace.lambda_values[k]),
                fmt_f64(trace.lambda_markov),
                fmt_f64(trace.rel_error[k]),
                trace.setting.label.clone(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// One point of a frequency sweep, currents in 1/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxRow {
    pub omega_thz: f64,
    pub beta_s: f64,
    pub j_hat_per_s: f64,
    pub j_hat_geo_per_s: f64,
}

/// `Omega_THz,beta_s,J_hat_per_s,J_hat_geo_per_s`.
pub fn write_flux_sweep<W: Write>(writer: W, rows: &[FluxRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["Omega_THz", "beta_s", "J_hat_per_s", "J_hat_geo_per_s"])?;
    for row in rows {
        out.write_record([
            fmt_f64(row.omega_thz),
            fmt_f64(row.beta_s),
            fmt_f64(row.j_hat_per_s),
            fmt_f64(row.j_hat_geo_per_s),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::Junction;
    use crate::dynamics::propagate_population;
    use crate::protocol::DiscretizedSchedule;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000e0");
        for x in [std::f64::consts::PI, 1e-300, -7.123456789e17] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn trajectory_rows() {
        let j = Junction::reference();
        let schedule = DiscretizedSchedule::constant(150.0, 250.0, 3, 1e-13).unwrap();
        let traj = propagate_population(&j, &schedule, 0.9).unwrap();
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &traj, &j.units).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "j,t_ps,rho00,rho_s_j,Lambda_j_per_ps");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,0.0000000000000000e0,9.0000000000000002e-1,"));
        let last: Vec<&str> = lines[4].split(',').collect();
        assert!((last[1].parse::<f64>().unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn profile_and_sweep_headers() {
        let mut buf = Vec::new();
        write_profile(&mut buf, &[0.0, -1.5]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "j,phi0_hat\n1,0.0000000000000000e0\n2,-1.5000000000000000e0\n"
        );
        let mut buf = Vec::new();
        write_flux_sweep(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "Omega_THz,beta_s,J_hat_per_s,J_hat_geo_per_s\n"
        );
    }
}
