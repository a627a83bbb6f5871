mod common;

use berknash::bundles::{build, Params};
use berknash::game::objective_distribution;
use berknash::subjective::{minimizer_set, wkld, GaussianCell, GaussianMeanModel, MinimizerConfig, ParameterDomain, PlayerModel, SubjectiveModel, Wkld};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn nonnegative_and_zero_only_on_a_match(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let game = common::random_game(&mut rng);
        let sigma = common::random_strategy(&mut rng, &game, true);
        let q = objective_distribution(&game, &sigma, 0).unwrap();
        let with_truth = rng.random::<bool>();
        let model = common::random_table_model(&mut rng, &game, 3, with_truth.then_some(&q));
        let SubjectiveModel::Categorical(cm) = &model else { unreachable!() };
        let berknash::subjective::CategoricalKernel::Table { tables } = &cm.kernel else { unreachable!() };
        let marg = game.signal_marginal(0);
        for (k, table) in tables.iter().enumerate() {
            let value = wkld(&game, &model, &sigma, &[k as f64], 0).unwrap();
            prop_assert!(value >= -1e-10);
            if value.abs() <= 1e-12 {
                for s in 0..q.probs.len() {
                    for x in 0..q.probs[s].len() {
                        if marg[s] * sigma.0[0][s][x] > 0.0 {
                            for y in 0..q.probs[s][x].len() {
                                prop_assert!((q.probs[s][x][y] - table[s][x][y]).abs() <= 1e-8);
                            }
                        }
                    }
                }
            }
        }
        if with_truth {
            prop_assert!(wkld(&game, &model, &sigma, &[3.0], 0).unwrap().abs() <= 1e-12);
        }
    }

    #[test]
    fn minimizers_exist_when_some_k_is_finite(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let game = common::random_game(&mut rng);
        let sigma = common::random_strategy(&mut rng, &game, false);
        let model = common::random_table_model(&mut rng, &game, 4, None);
        let finite = (0..4).any(|k| wkld(&game, &model, &sigma, &[k as f64], 0).unwrap().is_finite());
        let ms = minimizer_set(&game, &model, &sigma, 0, &MinimizerConfig::default());
        prop_assert_eq!(finite, ms.is_ok());
        if let Ok(ms) = ms {
            prop_assert!(!ms.points.is_empty());
            for v in &ms.values {
                prop_assert!((v - ms.minimum).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn unused_consequence_changes_nothing(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let game = common::random_game(&mut rng);
        let sigma = common::random_strategy(&mut rng, &game, true);
        let model = common::random_table_model(&mut rng, &game, 2, None);
        let mut wider = game.clone();
        wider.consequences[0].push("never".into());
        for row in wider.payoff[0].iter_mut() {
            row.push(0.0);
        }
        let mut wide_model = model.clone();
        if let SubjectiveModel::Categorical(cm) = &mut wide_model {
            if let berknash::subjective::CategoricalKernel::Table { tables } = &mut cm.kernel {
                for row in tables.iter_mut().flatten().flatten() {
                    row.push(0.0);
                }
            }
        }
        for k in 0..2 {
            let a = wkld(&game, &model, &sigma, &[k as f64], 0).unwrap();
            let b = wkld(&wider, &wide_model, &sigma, &[k as f64], 0).unwrap();
            prop_assert!(a == b || (a - b).abs() <= 1e-12);
        }
    }
}

fn random_gaussian(rng: &mut impl Rng) -> (berknash::game::ObjectiveGame, SubjectiveModel) {
    let (n_x, n_y, d) = (rng.random_range(2..=3), rng.random_range(1..=3), 2);
    let cells: Vec<Vec<GaussianCell>> = (0..n_x)
        .map(|_| {
            (0..n_y)
                .map(|_| GaussianCell {
                    true_mean: rng.random_range(-5.0..5.0),
                    offset: rng.random_range(-1.0..1.0),
                    features: (0..d).map(|_| rng.random_range(-3.0..3.0)).collect(),
                    payoff: [0.0, 1.0, 0.0],
                })
                .collect()
        })
        .collect();
    let n_w = 3;
    let fb: Vec<Vec<usize>> = (0..n_x).map(|_| (0..n_w).map(|_| rng.random_range(0..n_y)).collect()).collect();
    let mut game = berknash::game::single_agent(
        (0..n_w).map(|w| format!("w{w}")).collect(),
        vec![1.0 / 3.0; 3],
        (0..n_x).map(|x| format!("x{x}")).collect(),
        (0..n_y).map(|y| format!("y{y}")).collect(),
        |x, w| fb[x][w],
        |x, y| cells[x][y].true_payoff(),
    );
    game.law = common::simplex(rng, n_w, false);
    let model = GaussianMeanModel { domain: ParameterDomain::Box { lower: vec![-10.0; d], upper: vec![10.0; d] }, cells };
    (game, SubjectiveModel::GaussianMean(model))
}

#[test]
fn gaussian_gradient_matches_differences() {
    let mut rng = common::rng(11);
    let mut checked = 0;
    while checked < 100 {
        let (game, model) = random_gaussian(&mut rng);
        let sigma = common::random_strategy(&mut rng, &game, false);
        let pm = PlayerModel::new(&game, &model, 0).unwrap();
        let w = Wkld::new(&pm, &sigma).unwrap();
        let theta: Vec<f64> = (0..2).map(|_| rng.random_range(-5.0..5.0)).collect();
        let grad = w.gradient(&theta).unwrap();
        let h = 1e-5;
        for i in 0..2 {
            let (mut up, mut down) = (theta.clone(), theta.clone());
            up[i] += h;
            down[i] -= h;
            let fd = (w.value(&up).unwrap() - w.value(&down).unwrap()) / (2.0 * h);
            let scale = grad[i].abs().max(1.0);
            assert!((fd - grad[i]).abs() <= 1e-6 * scale, "θ {theta:?}: {fd} vs {}", grad[i]);
        }
        checked += 1;
    }
}

#[test]
fn continuous_in_the_strategy() {
    let mut rng = common::rng(5);
    for _ in 0..50 {
        let game = common::random_game(&mut rng);
        let sigma = common::random_strategy(&mut rng, &game, false);
        let model = common::random_table_model(&mut rng, &game, 1, None);
        // strictly positive kernel
        let model = match model {
            SubjectiveModel::Categorical(mut cm) => {
                if let berknash::subjective::CategoricalKernel::Table { tables } = &mut cm.kernel {
                    for row in tables.iter_mut().flatten().flatten() {
                        let n = row.len() as f64;
                        for p in row.iter_mut() {
                            *p = 0.5 * *p + 0.5 / n;
                        }
                    }
                }
                SubjectiveModel::Categorical(cm)
            }
            m => m,
        };
        let base = wkld(&game, &model, &sigma, &[0.0], 0).unwrap();
        let other = common::random_strategy(&mut rng, &game, false);
        let mut last = f64::INFINITY;
        for delta in [1e-1, 1e-3, 1e-5, 1e-7] {
            let mut near = sigma.clone();
            for (row, o) in near.0[0].iter_mut().zip(&other.0[0]) {
                for (p, q) in row.iter_mut().zip(o) {
                    *p = (1.0 - delta) * *p + delta * q;
                }
            }
            let diff = (wkld(&game, &model, &near, &[0.0], 0).unwrap() - base).abs();
            assert!(diff <= last + 1e-15);
            last = diff;
        }
        assert!(last <= 1e-5);
    }
}

#[test]
fn monopoly_k_vanishes_only_off_the_model() {
    // the truth (42, 4) is outside the box, so K is bounded away from zero at every σ
    let bundle = build("monopoly", &Params::default()).unwrap();
    let sigma = berknash::game::StrategyProfile::single(vec![0.5, 0.5]);
    let ms = minimizer_set(&bundle.game, &bundle.models[0], &sigma, 0, &MinimizerConfig::default()).unwrap();
    assert!(ms.minimum > 0.1);
}
