use qheat::correlation::{
    first_passage_time, lambda_of_t, markov_lambda, reference_settings, relative_error_trace,
    settling_time, v_kernels,
};
use qheat::{BathParams, BathSide, Junction, UnitSystem};

// Evaluated with a separate quadrature package after swapping the order of
// the time and frequency integrals.
const LAMBDA_AT_INTERVAL: [f64; 3] = [
    -0.125_864_788_503_738_83,
    -0.179_581_484_502_792_1,
    -0.191_160_576_858_975_03,
];
const LAMBDA_MARKOV: [f64; 3] = [
    -0.122_852_121_152_663_97,
    -0.172_850_692_823_319_72,
    -0.183_823_151_408_787_94,
];
const INTERVAL: f64 = 1.164_126_619_739_015_4;

#[test]
fn reference_settings_match_independent_values() {
    let j = Junction::reference();
    for (k, setting) in reference_settings().iter().enumerate() {
        let betas = setting.betas(&j).unwrap();
        let markov = markov_lambda(&j, betas).unwrap();
        assert!(((markov - LAMBDA_MARKOV[k]) / LAMBDA_MARKOV[k]).abs() < 1e-13);
        let got = lambda_of_t(&j, betas, INTERVAL).unwrap().value;
        assert!(
            ((got - LAMBDA_AT_INTERVAL[k]) / LAMBDA_AT_INTERVAL[k]).abs() < 1e-6,
            "{}: {got}",
            setting.label
        );
    }
}

#[test]
fn early_times_deviate_more_than_one_interval() {
    let j = Junction::reference();
    let traces = relative_error_trace(&j, &reference_settings(), &[0.3, 1.164]).unwrap();
    for t in &traces {
        assert!(
            t.rel_error[0].abs() > t.rel_error[1].abs(),
            "{}",
            t.setting.label
        );
        assert!(t.rel_error[1].abs() <= 0.05);
    }
}

#[test]
fn incremental_trace_matches_direct_evaluation() {
    let j = Junction::reference();
    let settings = &reference_settings()[1..2];
    let grid: Vec<f64> = (1..=12).map(|k| 0.25 * k as f64).collect();
    let trace = &relative_error_trace(&j, settings, &grid).unwrap()[0];
    let betas = settings[0].betas(&j).unwrap();
    for (t, lam) in grid.iter().zip(&trace.lambda_values) {
        let direct = lambda_of_t(&j, betas, *t).unwrap().value;
        assert!((lam - direct).abs() < 1e-8 * direct.abs());
    }
    assert_eq!(trace.phi_values.len(), grid.len());
}

#[test]
fn kernels_at_unit_lag_match_direct_assembly() {
    let j = Junction::reference();
    let betas = reference_settings()[0].betas(&j).unwrap();
    let (plus, minus) = v_kernels(&j, betas, 1.0).unwrap();
    let direct = |sign: f64| {
        let mut total = 0.0;
        for (bath, beta) in [(&j.baths.left, betas.left), (&j.baths.right, betas.right)] {
            let fwd = qheat::correlation::bath_correlation(bath, beta, 1.0).unwrap();
            let bwd = qheat::correlation::bath_correlation(bath, beta, -1.0).unwrap();
            let e = num_complex::Complex64::new(0.0, -sign).exp();
            total += (fwd * e + bwd * e.conj()).re;
        }
        total
    };
    assert!((plus - direct(1.0)).abs() < 1e-10);
    assert!((minus - direct(-1.0)).abs() < 1e-10);
}

// A larger cutoff reaches the 5% band sooner, but it also overshoots more,
// so the time after which the error stays inside the band is not monotone.
#[test]
fn larger_cutoff_reaches_markov_band_no_later() {
    let grid: Vec<f64> = (1..=300).map(|k| 0.02 * k as f64).collect();
    for setting in reference_settings() {
        let mut times = Vec::new();
        let mut settled = Vec::new();
        for wc in [2.0, 3.0, 5.0] {
            let j = Junction::new(
                UnitSystem::default(),
                BathParams::new(BathSide::Left, 0.01, wc).unwrap(),
                BathParams::new(BathSide::Right, 0.01, wc).unwrap(),
            )
            .unwrap();
            let trace =
                &relative_error_trace(&j, std::slice::from_ref(&setting), &grid).unwrap()[0];
            times.push(first_passage_time(trace, 0.05).expect("enters the band within the grid"));
            settled.push(settling_time(trace, 0.05).expect("settles within the grid"));
        }
        assert!(
            times.windows(2).all(|w| w[1] <= w[0]),
            "{}: {times:?}",
            setting.label
        );
        assert!(settled.iter().zip(&times).all(|(s, t)| s >= t));
    }
}
