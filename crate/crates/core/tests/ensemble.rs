mod support;

use washout::dynamics::{
    ensemble_density, fidelity_from_q, integrate_q_with, EnsembleSpec, EnvironmentNoise, StepConfig, SystemParams,
    TrainPolicy,
};
use washout::noise::{sample_shot_train, ShotNoiseParams, ShotTrain};
use washout::rng::RngStream;

fn in_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn spec(n_traj: usize, horizon: f64, dt: f64, stride: usize) -> EnsembleSpec {
    EnsembleSpec {
        n_traj,
        steps: StepConfig::new(dt, horizon).with_stride(stride),
        environment: EnvironmentNoise::OrnsteinUhlenbeck,
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let _g = support::serial();
    let sys = SystemParams::reference();
    let policy = TrainPolicy::Fresh(ShotNoiseParams::new(8.0, 40.0).unwrap());
    let s = spec(300, 10.0, 0.01, 50);
    let one = in_pool(1, || ensemble_density(&sys, &policy, &s, 77).unwrap());
    let four = in_pool(4, || ensemble_density(&sys, &policy, &s, 77).unwrap());
    assert_eq!(one, four);
    let other_seed = ensemble_density(&sys, &policy, &s, 78).unwrap();
    assert_ne!(one.ground, other_seed.ground);
}

#[test]
fn density_is_hermitian_and_starts_excited() {
    let sys = SystemParams::reference();
    let train: ShotTrain<f64> = sample_shot_train(
        &ShotNoiseParams::new(15.0, 200.0).unwrap(),
        5.0,
        &RngStream::new(3, 0),
    )
    .unwrap();
    let rho = ensemble_density(&sys, &TrainPolicy::Shared(train), &spec(20, 5.0, 1e-3, 100), 5).unwrap();
    let m0 = rho.matrix(0);
    assert_eq!(m0[0][0].re, 1.0);
    assert_eq!(m0[1][1].re, 0.0);
    assert_eq!(m0[0][1].norm(), 0.0);
    for k in 0..rho.len() {
        let m = rho.matrix(k);
        assert_eq!(m[0][1], m[1][0].conj());
        assert_eq!(m[0][0].im, 0.0);
        assert_eq!(m[1][1].im, 0.0);
    }
}

#[test]
fn uncoupled_ensemble_never_leaves_the_excited_state() {
    let sys = SystemParams::reference().with_g(0.0);
    let policy = TrainPolicy::Fresh(ShotNoiseParams::new(3.0, 40.0).unwrap());
    let rho = ensemble_density(&sys, &policy, &spec(16, 5.0, 1e-3, 500), 1).unwrap();
    assert!(rho.excited.iter().all(|&p| p == 1.0));
    assert!(rho.ground.iter().all(|&p| p == 0.0));
}

#[test]
fn survival_amplitude_relates_to_fidelity_by_the_coupling() {
    // |Ã|² does not depend on z*, so sqrt(ρ₁₁) = exp(-g ∫Re Q) = F^g for every trajectory
    let sys = SystemParams::reference();
    let steps = StepConfig::new(0.01, 50.0).with_stride(100);
    let rho = ensemble_density(
        &sys,
        &TrainPolicy::Shared(ShotTrain::empty(50.0)),
        &EnsembleSpec {
            n_traj: 64,
            steps,
            environment: EnvironmentNoise::OrnsteinUhlenbeck,
        },
        9,
    )
    .unwrap();
    let f = fidelity_from_q(&integrate_q_with(&sys, &ShotTrain::empty(50.0), &steps).unwrap());
    for (k, s) in rho.survival_amplitude().iter().enumerate().skip(1) {
        let ratio = s.ln() / f.values[k].ln();
        assert!((ratio - 0.4).abs() < 1e-6, "t = {}, ratio = {ratio}", rho.times[k]);
    }
    assert!(rho.ground.last().unwrap() > &0.0);
}

#[test]
fn standard_error_scales_as_inverse_root_n() {
    let _g = support::serial();
    let sys = SystemParams::reference();
    let policy = TrainPolicy::Fresh(ShotNoiseParams::new(8.0, 4.0).unwrap());
    let se: Vec<f64> = [100, 1_000, 10_000]
        .iter()
        .map(|&n| {
            let rho = ensemble_density(&sys, &policy, &spec(n, 10.0, 0.01, 1000), 2024).unwrap();
            rho.stderr.last().unwrap().excited
        })
        .collect();
    for w in se.windows(2) {
        let ratio = w[0] / w[1];
        let expected = 10f64.sqrt();
        assert!((ratio / expected - 1.0).abs() < 0.2, "stderr {se:?}");
    }
}

#[test]
fn divergence_budget_is_enforced() {
    let sys = SystemParams::new(1.0, 50.0, 0.2, 5.0).unwrap();
    let result = ensemble_density(&sys, &TrainPolicy::Shared(ShotTrain::empty(50.0)), &spec(4, 50.0, 0.005, 100), 0);
    assert!(matches!(
        result,
        Err(washout::dynamics::DynamicsError::DivergenceBudget { excluded: 4, total: 4 })
    ));
}
