mod support;

use num_complex::Complex64;
use support::riccati_oracle::RiccatiOracle;
use washout::analysis::{
    fig2_experiment, fig3_sweep, markov_scan, washout_diagnostic, Fig2Config, GainTrend, MarkovConfig, SweepConfig,
};
use washout::dynamics::{FidelityConvention, SystemParams};
use washout::noise::{Kick, ShotNoiseParams, ShotTrain};

fn in_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn free_curves_follow_the_closed_form() {
    let cfg = Fig2Config {
        gammas: vec![0.2, 0.5],
        amplitudes: vec![8.0],
        rates_per_period: vec![200.0],
        n_trains: 4,
        horizon_periods: 10.0,
        ..Fig2Config::default()
    };
    let curves = fig2_experiment(&SystemParams::reference(), &cfg, 3).unwrap();
    assert_eq!(curves.len(), 4);
    for c in curves.iter().filter(|c| c.noise.is_none()) {
        let o = RiccatiOracle::new(1.0, 0.4, c.gamma);
        for (t, f) in c.curve.times.iter().zip(&c.curve.values) {
            assert!((f - o.fidelity(*t)).abs() < 1e-9, "gamma {} t {t}", c.gamma);
        }
        assert!(c.curve.stderr.as_ref().unwrap().iter().all(|&s| s == 0.0));
    }
}

#[test]
fn silent_rows_of_the_sweep_are_the_free_fidelity() {
    let cfg = SweepConfig {
        amplitudes: vec![0.0, 10.0],
        rates_per_period: vec![0.0, 300.0],
        probe_periods: vec![2.0, 4.0],
        n_traj: 6,
        ..SweepConfig::default()
    };
    let sys = SystemParams::reference();
    let grid = fig3_sweep(&sys, &cfg, 11).unwrap();
    let o = RiccatiOracle::new(1.0, 0.4, 0.2);
    for (t, &p) in cfg.probe_periods.iter().enumerate() {
        let free = o.fidelity(p * sys.period);
        // J = 0 for any W, and W = 0 for any J
        for (j, w) in [(0, 0), (0, 1), (1, 0)] {
            assert!((grid.fidelity_at(j, w, t) - free).abs() < 1e-9);
            assert_eq!(grid.stderr_at(j, w, t), 0.0);
        }
        assert!(grid.stderr_at(1, 1, t) > 0.0);
    }
    let again = in_pool(3, || fig3_sweep(&sys, &cfg, 11).unwrap());
    assert_eq!(grid, again);
}

#[test]
fn sweep_rejects_unsorted_axes() {
    let cfg = SweepConfig {
        amplitudes: vec![5.0, 1.0],
        ..SweepConfig::default()
    };
    assert!(fig3_sweep(&SystemParams::reference(), &cfg, 0).is_err());
}

#[test]
fn markov_free_fidelity_matches_the_oracle_for_each_gamma() {
    let sys = SystemParams::reference();
    let cfg = MarkovConfig {
        gammas: vec![0.2, 1.0, 5.0],
        noise: ShotNoiseParams::new(8.0, 40.0).unwrap(),
        probe_periods: 3.0,
        n_trains: 8,
        dt: 1e-3,
        convention: FidelityConvention::QExponent,
    };
    let scan = markov_scan(&sys, &cfg, 4).unwrap();
    for (k, &gamma) in scan.gammas.iter().enumerate() {
        let exact = RiccatiOracle::new(1.0, 0.4, gamma).fidelity(scan.probe_time);
        assert!((scan.f_free[k] - exact).abs() < 1e-9, "gamma {gamma}");
        assert_eq!(scan.gain[k], scan.f_noise[k] - scan.f_free[k]);
        assert_eq!(scan.gain_stderr[k], scan.f_noise_stderr[k]);
    }
}

#[test]
fn markov_scan_without_coupling_is_flat() {
    let sys = SystemParams::reference().with_g(0.0);
    let cfg = MarkovConfig {
        probe_periods: 1.0,
        n_trains: 4,
        ..MarkovConfig::reference(sys.period)
    };
    let scan = markov_scan(&sys, &cfg, 0).unwrap();
    assert_eq!(scan.trend, GainTrend::Flat);
    assert!(scan.f_noise.iter().chain(&scan.f_free).all(|&f| f == 1.0));
}

#[test]
fn washout_phase_carries_every_kick() {
    let sys = SystemParams::reference();
    let kicks = vec![
        Kick { time: 1.0, amplitude: 2.0 },
        Kick { time: 2.5, amplitude: 0.75 },
    ];
    let s = washout_diagnostic(&sys, &ShotTrain::new(4.0, kicks).unwrap(), 1e-3, 4.0, 10).unwrap();
    assert_eq!(s.kicks, 2);
    for (t, n) in s.times.iter().zip(&s.n) {
        // left limits: a kick at t only shows up after t
        let x = if *t > 2.5 { 2.75 } else if *t > 1.0 { 2.0 } else { 0.0 };
        assert!((n - Complex64::from_polar(1.0, -(t + x))).norm() < 1e-9, "t = {t}");
    }
}

#[test]
fn washout_integral_vanishes_without_coupling() {
    let sys = SystemParams::reference().with_g(0.0);
    let s = washout_diagnostic(&sys, &ShotTrain::empty(5.0), 1e-3, 5.0, 100).unwrap();
    assert!(s.partial_integral.iter().all(|i| i.norm() == 0.0));
    assert_eq!(s.final_magnitude(), 0.0);
    assert_eq!(s.len(), 51);
}
