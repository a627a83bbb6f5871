mod common;

use berknash::game::{objective_distribution, validate_game, ObjectiveGame, StrategyProfile};
use proptest::prelude::*;
use rand::Rng;

/// Two players, two actions each, two states; each player observes a function of the
/// state and the opponent's action.
fn two_by_two(rng: &mut impl Rng) -> ObjectiveGame {
    let law = common::simplex(rng, 2, false);
    let feedback = (0..2)
        .map(|_| (0..2).map(|_| (0..4).map(|_| Some(rng.random_range(0..2))).collect()).collect())
        .collect();
    let payoff = (0..2)
        .map(|_| (0..2).map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect()).collect())
        .collect();
    let labels = |p: &str| vec![format!("{p}0"), format!("{p}1")];
    ObjectiveGame {
        players: vec!["p0".into(), "p1".into()],
        states: labels("w"),
        signals: vec![vec!["-".into()], vec!["-".into()]],
        law,
        actions: vec![labels("x"), labels("x")],
        consequences: vec![labels("y"), labels("y")],
        feedback,
        payoff,
    }
}

fn profile(p: f64, q: f64) -> StrategyProfile {
    StrategyProfile(vec![vec![vec![p, 1.0 - p]], vec![vec![q, 1.0 - q]]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rows_are_distributions(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let game = common::random_game(&mut rng);
        prop_assert!(validate_game(&game).is_empty());
        let sigma = common::random_strategy(&mut rng, &game, true);
        let q = objective_distribution(&game, &sigma, 0).unwrap();
        for row in q.probs.iter().flatten() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn relabeling_states_and_opponent_actions(seed in any::<u64>(), p in 0.0..=1.0f64, q in 0.0..=1.0f64) {
        let mut rng = common::rng(seed);
        let game = two_by_two(&mut rng);
        let base = objective_distribution(&game, &profile(p, q), 0).unwrap();

        let mut swapped = game.clone();
        swapped.law.reverse();
        for i in 0..2 {
            swapped.feedback[i].reverse();
        }
        prop_assert!(objective_distribution(&swapped, &profile(p, q), 0).unwrap().max_abs_diff(&base) <= 1e-12);

        // the opponent's actions swap labels, and their strategy with them
        let mut relabeled = game.clone();
        for w in 0..2 {
            let f = &game.feedback[0][w];
            relabeled.feedback[0][w] = vec![f[1], f[0], f[3], f[2]];
        }
        let q2 = objective_distribution(&relabeled, &profile(p, 1.0 - q), 0).unwrap();
        prop_assert!(q2.max_abs_diff(&base) <= 1e-12);
    }

    #[test]
    fn linear_in_opponent_strategy(seed in any::<u64>(), p in 0.0..=1.0f64, q1 in 0.0..=1.0f64, q2 in 0.0..=1.0f64, lam in 0.0..=1.0f64) {
        let mut rng = common::rng(seed);
        let game = two_by_two(&mut rng);
        let a = objective_distribution(&game, &profile(p, q1), 0).unwrap();
        let b = objective_distribution(&game, &profile(p, q2), 0).unwrap();
        let mix = objective_distribution(&game, &profile(p, lam * q1 + (1.0 - lam) * q2), 0).unwrap();
        for ((m, x), y) in mix.probs.iter().flatten().flatten().zip(a.probs.iter().flatten().flatten()).zip(b.probs.iter().flatten().flatten()) {
            prop_assert!((m - (lam * x + (1.0 - lam) * y)).abs() <= 1e-12);
        }
    }
}
