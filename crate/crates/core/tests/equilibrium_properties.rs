mod common;

use berknash::bundles::matrix::two_player;
use berknash::bundles::{build, Params};
use berknash::equilibrium::{best_responses, solve, verify_berk_nash, EquilibriumConfig, PerturbationStructure};
use berknash::subjective::diagnose;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn correct_specification_gives_nash() {
    let mut rng = common::rng(2024);
    let cfg = EquilibriumConfig::default();
    for game_no in 0..100 {
        let a: Vec<Vec<f64>> = (0..2).map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let b: Vec<Vec<f64>> = (0..2).map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let (game, models) = two_player(&[a.clone(), b.clone()]);
        let out = solve(&game, &models, &cfg).unwrap();
        let mut found: Vec<(f64, f64)> = out.certificates.iter().map(|c| (c.strategy.0[0][0][0], c.strategy.0[1][0][0])).collect();
        let mut want = common::nash_2x2(&a, &b);
        let key = |v: &(f64, f64)| (v.0 * 1e6).round() as i64 * 10_000_000 + (v.1 * 1e6).round() as i64;
        found.sort_by_key(key);
        want.sort_by_key(key);
        assert_eq!(found.len(), want.len(), "game {game_no}: {a:?} {b:?} gave {found:?}, Nash {want:?}");
        for (f, w) in found.iter().zip(&want) {
            assert!((f.0 - w.0).abs() <= 1e-3 && (f.1 - w.1).abs() <= 1e-3, "game {game_no}: {f:?} vs {w:?}");
        }
        for c in &out.certificates {
            for i in 0..2 {
                let rep = diagnose(&game, &models[i], &c.strategy, i, &cfg.minimizer).unwrap();
                assert!(rep.correctly_specified && rep.strongly_identified);
            }
        }
    }
}

#[test]
fn certificates_pass_the_verifier() {
    let cfg = EquilibriumConfig::default();
    for name in ["monopoly", "coordination", "prisoners", "trading-ce", "trading-be", "trading-abee", "trading-bea"] {
        let bundle = build(name, &Params::default()).unwrap();
        let out = solve(&bundle.game, &bundle.models, &cfg).unwrap();
        assert!(!out.certificates.is_empty(), "{name}");
        for c in &out.certificates {
            let verdict = verify_berk_nash(&bundle.game, &bundle.models, &c.strategy, None, &cfg).unwrap();
            assert!(verdict.is_accepted(), "{name}: {:?}", c.strategy);
        }
    }
}

#[test]
fn nonexistence_has_no_certificate() {
    let bundle = build("nonexistence", &Params::default()).unwrap();
    let out = solve(&bundle.game, &bundle.models, &EquilibriumConfig::default()).unwrap();
    assert!(out.certificates.is_empty());
    assert!(!out.rejections.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn perturbed_response_approaches_best_response(payoffs in prop::collection::vec(-1.0..1.0f64, 2..5)) {
        let best = berknash::equilibrium::argmax(&payoffs);
        let gap = payoffs.iter().enumerate().filter(|(x, _)| *x != best).map(|(_, v)| payoffs[best] - v).fold(f64::INFINITY, f64::min);
        prop_assume!(gap > 1e-3);
        for scale in [1e-1, 1e-2, 1e-3] {
            let p = PerturbationStructure::logistic(scale).unwrap();
            let probs = p.choice_probabilities(&payoffs, 20_000);
            prop_assert!(probs[best] >= 1.0 - 10.0 * scale / gap);
        }
    }

    #[test]
    fn responses_ignore_shifts_and_common_rescaling(
        payoffs in prop::collection::vec(-1.0..1.0f64, 2..5),
        shift in -100.0..100.0f64,
        factor in 0.1..10.0f64,
    ) {
        let p = PerturbationStructure::logistic(0.05).unwrap();
        let base = p.choice_probabilities(&payoffs, 4096);
        let shifted: Vec<f64> = payoffs.iter().map(|v| v + shift).collect();
        let scaled: Vec<f64> = payoffs.iter().map(|v| v * factor).collect();
        let q = PerturbationStructure::logistic(0.05 * factor).unwrap();
        for (a, b) in base.iter().zip(p.choice_probabilities(&shifted, 4096)) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
        for (a, b) in base.iter().zip(q.choice_probabilities(&scaled, 4096)) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
        prop_assert_eq!(best_responses(&payoffs, 1e-9), best_responses(&scaled, 1e-9 * factor));
    }
}
