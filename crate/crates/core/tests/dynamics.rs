mod common;

use berknash::bundles::{build, Params};
use berknash::dynamics::{drift, h1, lyapunov_derivative, lyapunov_weights, steady_state, AppFConfig, OdeState};
use berknash::equilibrium::{PerturbationFamily, PerturbationStructure};
use berknash::learning::{simulate, ConjugateNormalBelief, PlayerBelief, Policy, SimulationOptions};
use rand::Rng;

const SCALES: [f64; 4] = [0.1, 0.05, 0.01, 0.001];

fn configs() -> impl Iterator<Item = AppFConfig> {
    [PerturbationFamily::Logistic, PerturbationFamily::Normal]
        .into_iter()
        .flat_map(|family| SCALES.iter().map(move |&scale| AppFConfig { family, scale, ..AppFConfig::default() }))
}

#[test]
fn steady_states_are_roots() {
    for cfg in configs() {
        let st = steady_state(&cfg).unwrap();
        let (g1, g2) = drift(&cfg, st.state()).unwrap();
        assert!(g1.abs() <= 1e-9 && g2.abs() <= 1e-9, "{cfg:?}: ({g1}, {g2})");
    }
}

#[test]
fn h1_changes_sign_once() {
    for cfg in configs() {
        let (lo, hi) = cfg.bracket();
        let values: Vec<f64> = (0..=1000).map(|k| h1(&cfg, lo + (hi - lo) * k as f64 / 1000.0)).collect();
        let changes = values.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count();
        assert_eq!(changes, 1, "{cfg:?}");
    }
}

#[test]
fn drift_splits_into_h1_over_r() {
    let mut rng = common::rng(8);
    for cfg in configs() {
        for _ in 0..100 {
            let beta = OdeState { m: rng.random_range(3.0..3.8), r: rng.random_range(4.0..100.0) };
            let (g1, g2) = drift(&cfg, beta).unwrap();
            assert!((g1 - h1(&cfg, beta.m) / beta.r).abs() <= 1e-12);
            assert!((g2 - (cfg.rho(beta.m) - beta.r)).abs() <= 1e-12);
        }
    }
}

#[test]
fn lyapunov_sign_ignores_scaling() {
    let mut rng = common::rng(6);
    let cfg = AppFConfig::default();
    let st = steady_state(&cfg).unwrap().state();
    let w = lyapunov_weights(&cfg).unwrap();
    let (r_lo, r_hi) = cfg.r_bounds();
    for _ in 0..500 {
        let beta = OdeState { m: rng.random_range(3.0..3.8), r: rng.random_range(r_lo..r_hi) };
        let c = rng.random_range(0.01..100.0);
        for weights in [[1.0, 1.0], w] {
            let a = lyapunov_derivative(&cfg, beta, st, weights).unwrap();
            let b = lyapunov_derivative(&cfg, beta, st, [c * weights[0], c * weights[1]]).unwrap();
            assert_eq!(a > 0.0, b > 0.0);
        }
    }
}

#[test]
fn simulated_beliefs_settle_at_the_ode_steady_state() {
    let cfg = AppFConfig::default();
    let st = steady_state(&cfg).unwrap();
    let bundle = build("monopoly-slope", &Params::default()).unwrap();
    let shocks = PerturbationStructure::logistic(cfg.scale).unwrap();
    let prior = PlayerBelief::Conjugate(ConjugateNormalBelief::new(3.5, 1.0).unwrap());
    let horizon = 200_000;
    for seed in 0..3 {
        let h = simulate(&bundle.game, &bundle.models, &[prior.clone()], &[Policy::Myopic], Some(&shocks), horizon, seed, &SimulationOptions::default()).unwrap();
        let avg = (horizon / 2 + 1..=horizon).map(|t| h.players[0].beliefs.mean_at(t)[0]).sum::<f64>() / (horizon / 2) as f64;
        assert!((avg - st.m).abs() <= 0.05, "seed {seed}: {avg} vs {}", st.m);
    }
}
