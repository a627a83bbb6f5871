//! Acceptance run: one PASS/FAIL line per criterion. Criteria listed in `KNOWN_FAILURES`
//! are reported but do not fail the run.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use berknash::bundles::matrix::two_player;
use berknash::bundles::{
    build, oracle_monopoly_minimizer, oracle_regression_cutoff, oracle_regression_thetas, oracle_taxation_thetas,
    oracle_trading_equilibria, oracle_trading_pi, solve_monetary, trading_instance, MonetaryParams, Params, TaxSchedule,
    TradingVariant,
};
use berknash::dynamics::{h1, lyapunov_scan, lyapunov_weights, steady_state, AppFConfig};
use berknash::equilibrium::{solve, EquilibriumConfig, PerturbationStructure};
use berknash::game::{objective_distribution, true_expected_payoff, StrategyProfile};
use berknash::learning::{bayes_update, default_prior, simulate, GridBelief, Observation, Policy, SimulationOptions};
use berknash::subjective::{
    diagnose, minimizer_set, wkld, CategoricalKernel, GaussianCell, GaussianMeanModel, MinimizerConfig,
    ParameterDomain, PlayerModel, Predictive, SubjectiveModel, Wkld,
};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// Criteria that cannot be met as stated, with the reason.
const KNOWN_FAILURES: &[(usize, &str)] = &[(
    6,
    "θ_C(σ) − θ_P(σ) > σ for every σ (inverse Mills ratio), so σ = (θ_C − θ_P)/κ has no root when κ ≤ 1",
)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn monopoly_equilibrium() -> Outcome {
    let clock = Instant::now();
    let b = build("monopoly", &Params::default()).unwrap();
    let out = solve(&b.game, &b.models, &EquilibriumConfig::default()).unwrap();
    let elapsed = clock.elapsed();
    if out.certificates.len() != 1 {
        return outcome(false, format!("{} certificates", out.certificates.len()));
    }
    let c = &out.certificates[0];
    let s10 = c.strategy.0[0][0][1];
    let mean = c.players[0].belief.mean();
    let belief_err = (mean[0] - 40.0).abs().max((mean[1] - 10.0 / 3.0).abs());
    outcome(
        (s10 - 1.0 / 36.0).abs() <= 1e-3 && belief_err <= 1e-2 && within(elapsed, 60.0),
        format!("σ10 = {s10:.6}, belief ({:.4}, {:.4}), {:.2?}", mean[0], mean[1], elapsed),
    )
}

fn minimizer_sweep() -> Outcome {
    let b = build("monopoly", &Params::default()).unwrap();
    let mut grid: Vec<f64> = (1..20).map(|k| k as f64 * 0.05).collect();
    grid.extend([0.75, 7.0 / 8.0, 15.0 / 16.0, 35.0 / 36.0]);
    let mut worst: f64 = 0.0;
    for s2 in &grid {
        let ms = minimizer_set(&b.game, &b.models[0], &StrategyProfile::single(vec![*s2, 1.0 - s2]), 0, &MinimizerConfig::default()).unwrap();
        let want = oracle_monopoly_minimizer(*s2).unwrap();
        for (g, w) in ms.representative().iter().zip(want) {
            worst = worst.max((g - w).abs());
        }
    }
    outcome(worst <= 1e-4, format!("{} strategies, largest coordinate error {worst:.2e}", grid.len()))
}

fn mean_dynamics() -> Outcome {
    let clock = Instant::now();
    let base = AppFConfig::default();
    let mut ok = true;
    let mut last: Option<f64> = None;
    for scale in [1e-1, 1e-2, 1e-3] {
        let cfg = base.with_scale(scale);
        let st = steady_state(&cfg).unwrap();
        if let Some(prev) = last {
            ok &= (st.m - 10.0 / 3.0).abs() < (prev - 10.0 / 3.0).abs();
        }
        last = Some(st.m);
        // h1 decreasing: finite-difference slope at 100 points of [3, 19/5]
        for k in 0..100 {
            let m = 3.0 + 0.8 * (k as f64 + 0.5) / 100.0;
            ok &= h1(&cfg, m + 1e-6) - h1(&cfg, m - 1e-6) < 0.0;
        }
    }
    let fine = steady_state(&base.with_scale(1e-3)).unwrap();
    let w = lyapunov_weights(&base).unwrap();
    let scan = lyapunov_scan(&base, 1000, w).unwrap();
    let elapsed = clock.elapsed();
    let dm = (fine.m - 10.0 / 3.0).abs();
    let ds = (fine.sigma - 1.0 / 36.0).abs();
    outcome(
        ok && dm <= 1e-3 && ds <= 1e-3 && scan.violations == 0 && within(elapsed, 10.0),
        format!("|m* − 10/3| = {dm:.2e}, |σ* − 1/36| = {ds:.2e}, {} Lyapunov violations, {:.2?}", scan.violations, elapsed),
    )
}

fn learning_simulation() -> Outcome {
    let clock = Instant::now();
    let b = build("monopoly-slope", &Params::default()).unwrap();
    let prior = default_prior(&b.models[0]).unwrap();
    let shocks = PerturbationStructure::logistic(0.05).unwrap();
    let horizon = 200_000;
    let results: Vec<(f64, f64)> = (0..20u64)
        .into_par_iter()
        .map(|seed| {
            let h = simulate(&b.game, &b.models, &[prior.clone()], &[Policy::Myopic], Some(&shocks), horizon, seed, &SimulationOptions::default()).unwrap();
            let p = &h.players[0];
            let tail = &p.actions[horizon - 50_000..];
            let freq = tail.iter().filter(|&&x| x == 1).count() as f64 / tail.len() as f64;
            (p.beliefs.mean_at(horizon)[0], freq)
        })
        .collect();
    let elapsed = clock.elapsed();
    let good = results.iter().filter(|(m, f)| (m - 10.0 / 3.0).abs() <= 0.05 && (f - 1.0 / 36.0).abs() <= 0.01).count();
    outcome(good >= 18 && within(elapsed, 300.0), format!("{good}/20 seeds, {:.2?}", elapsed))
}

fn monetary_nash() -> Outcome {
    let p = MonetaryParams::from_params(&Params::default()).unwrap();
    let (x, cert) = solve_monetary(&p, &EquilibriumConfig::default()).unwrap();
    // best-response iteration on the true model
    let mut nash = 0.0;
    for _ in 0..1000 {
        nash = (p.lambda * p.u_star + p.lambda * p.lambda * nash) / (1.0 + p.lambda * p.lambda);
    }
    let b = build("monetary", &Params::default().with("x_public", x)).unwrap();
    let rep = diagnose(&b.game, &b.models[0], &cert.strategy, 0, &MinimizerConfig::default()).unwrap();
    outcome(
        (x - nash).abs() <= 1e-3 && rep.correctly_specified && rep.strongly_identified,
        format!(
            "policy {x:.4} vs Nash {nash:.4}, correctly specified {}, strongly identified {}",
            rep.correctly_specified, rep.strongly_identified
        ),
    )
}

fn regression_cutoffs() -> Outcome {
    let mut rng = common::rng(2);
    let mut notes = Vec::new();
    let mut ok = true;
    let mut cutoffs = Vec::new();
    for kappa in [0.5, 1.0, 2.0] {
        match oracle_regression_cutoff(kappa) {
            Ok(c) => {
                let (tc, tp) = oracle_regression_thetas(c);
                let resid = (c - (tc - tp) / kappa).abs();
                ok &= resid <= 1e-8;
                // Monte-Carlo conditional means of the change in performance
                let n = 10_000_000;
                let (mut acc_c, mut acc_p) = ([0.0f64; 2], [0.0f64; 2]);
                let (mut n_c, mut n_p) = (0usize, 0usize);
                for _ in 0..n {
                    let s: f64 = StandardNormal.sample(&mut rng);
                    let next: f64 = StandardNormal.sample(&mut rng);
                    let d = next - s;
                    if s < c {
                        acc_c[0] += d;
                        acc_c[1] += d * d;
                        n_c += 1;
                    } else {
                        acc_p[0] += d;
                        acc_p[1] += d * d;
                        n_p += 1;
                    }
                }
                for (acc, k, want) in [(acc_c, n_c, tc), (acc_p, n_p, tp)] {
                    let mean = acc[0] / k as f64;
                    let se = ((acc[1] / k as f64 - mean * mean) / k as f64).sqrt();
                    ok &= (mean - want).abs() <= 3.0 * se;
                }
                cutoffs.push(c);
                notes.push(format!("κ = {kappa}: σ* = {c:.6}, residual {resid:.1e}"));
            }
            Err(_) => {
                ok = false;
                notes.push(format!("κ = {kappa}: no fixed point"));
            }
        }
    }
    ok &= cutoffs.windows(2).all(|w| w[0] > w[1]);
    outcome(ok, notes.join("; "))
}

fn trading() -> Outcome {
    let clock = Instant::now();
    let cfg = EquilibriumConfig::default();
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, variant) in [("trading-ce", TradingVariant::Ce), ("trading-be", TradingVariant::Be), ("trading-abee", TradingVariant::Abee)] {
        let b = build(name, &Params::default()).unwrap();
        let inst = trading_instance(name).unwrap();
        let out = solve(&b.game, &b.models, &cfg).unwrap();
        let mut found: Vec<usize> = out
            .certificates
            .iter()
            .map(|c| c.strategy.0[0][0].iter().position(|p| *p > 1.0 - 1e-6).unwrap_or(usize::MAX))
            .collect();
        found.sort();
        found.dedup();
        let want = match variant {
            // argmax of the profit function
            TradingVariant::Ce | TradingVariant::Abee => {
                let pi: Vec<f64> = (0..inst.prices.len()).map(|x| oracle_trading_pi(&inst, variant, x, None).unwrap()).collect();
                let best = pi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (0..pi.len()).filter(|&x| pi[x] >= best - 1e-9).collect()
            }
            _ => oracle_trading_equilibria(&inst, variant, 1e-9).unwrap(),
        };
        ok &= found == want;
        notes.push(format!("{name} {found:?}/{want:?}"));
    }
    let elapsed = clock.elapsed();
    outcome(ok && within(elapsed, 5.0), format!("{}, {:.2?}", notes.join(", "), elapsed))
}

fn divergence_nonnegative() -> bool {
    (0..1000u64).all(|seed| {
        let mut rng = common::rng(seed);
        let game = common::random_game(&mut rng);
        let sigma = common::random_strategy(&mut rng, &game, true);
        let q = objective_distribution(&game, &sigma, 0).unwrap();
        let model = common::random_table_model(&mut rng, &game, 3, Some(&q));
        let SubjectiveModel::Categorical(cm) = &model else { return false };
        let CategoricalKernel::Table { tables } = &cm.kernel else { return false };
        let marg = game.signal_marginal(0);
        tables.iter().enumerate().all(|(k, t)| {
            let v = wkld(&game, &model, &sigma, &[k as f64], 0).unwrap();
            let matches = (0..q.probs.len()).all(|s| {
                (0..q.probs[s].len()).all(|x| {
                    marg[s] * sigma.0[0][s][x] == 0.0 || q.probs[s][x].iter().zip(&t[s][x]).all(|(a, b)| (a - b).abs() <= 1e-8)
                })
            });
            v >= -1e-10 && (v.abs() > 1e-12 || matches) && (!matches || v.abs() <= 1e-10)
        })
    })
}

fn martingale() -> bool {
    (0..200u64).all(|seed| {
        let mut rng = common::rng(10_000 + seed);
        let game = common::random_game(&mut rng);
        let model = common::random_table_model(&mut rng, &game, 5, None);
        let pm = PlayerModel::new(&game, &model, 0).unwrap();
        let prior = GridBelief::new((0..5).map(|k| vec![k as f64]).collect(), &common::simplex(&mut rng, 5, false)).unwrap();
        let Predictive::Categorical(pred) = pm.predictive(&prior.to_belief()).unwrap() else { return false };
        (0..pm.n_signals()).all(|s| {
            (0..pm.n_actions()).all(|x| {
                let mut avg = [0.0; 5];
                for (y, q) in pred.probs[s][x].iter().enumerate() {
                    if *q > 0.0 {
                        let post = bayes_update(&pm, &prior, s, x, &Observation { consequence: y, outcome: None }).unwrap();
                        for (a, w) in avg.iter_mut().zip(post.weights()) {
                            *a += q * w;
                        }
                    }
                }
                avg.iter().zip(prior.weights()).all(|(a, w)| (a - w).abs() <= 1e-12)
            })
        })
    })
}

fn gradient() -> bool {
    let mut rng = common::rng(99);
    (0..100).all(|_| {
        let cells: Vec<Vec<GaussianCell>> = (0..2)
            .map(|_| {
                (0..2)
                    .map(|_| GaussianCell {
                        true_mean: rng.random_range(-5.0..5.0),
                        offset: rng.random_range(-1.0..1.0),
                        features: (0..2).map(|_| rng.random_range(-3.0..3.0)).collect(),
                        payoff: [0.0, 1.0, 0.0],
                    })
                    .collect()
            })
            .collect();
        let mut game = berknash::game::single_agent(
            vec!["w0".into(), "w1".into()],
            vec![0.5, 0.5],
            vec!["x0".into(), "x1".into()],
            vec!["y0".into(), "y1".into()],
            |x, w| (x + w) % 2,
            |_, _| 0.0,
        );
        game.law = common::simplex(&mut rng, 2, false);
        let model = SubjectiveModel::GaussianMean(GaussianMeanModel { domain: ParameterDomain::Box { lower: vec![-10.0; 2], upper: vec![10.0; 2] }, cells });
        let sigma = common::random_strategy(&mut rng, &game, false);
        let pm = PlayerModel::new(&game, &model, 0).unwrap();
        let w = Wkld::new(&pm, &sigma).unwrap();
        let theta: Vec<f64> = (0..2).map(|_| rng.random_range(-5.0..5.0)).collect();
        let g = w.gradient(&theta).unwrap();
        (0..2).all(|i| {
            let (mut up, mut down) = (theta.clone(), theta.clone());
            up[i] += 1e-5;
            down[i] -= 1e-5;
            let fd = (w.value(&up).unwrap() - w.value(&down).unwrap()) / 2e-5;
            (fd - g[i]).abs() <= 1e-6 * g[i].abs().max(1.0)
        })
    })
}

fn nash_equivalence() -> bool {
    let cfg = EquilibriumConfig::default();
    (0..100u64).into_par_iter().all(|seed| {
        let mut rng = common::rng(50_000 + seed);
        let a: Vec<Vec<f64>> = (0..2).map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let b: Vec<Vec<f64>> = (0..2).map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let (game, models) = two_player(&[a.clone(), b.clone()]);
        let out = solve(&game, &models, &cfg).unwrap();
        let want = common::nash_2x2(&a, &b);
        out.certificates.len() == want.len()
            && out.certificates.iter().all(|c| {
                let (p, q) = (c.strategy.0[0][0][0], c.strategy.0[1][0][0]);
                want.iter().any(|w| (w.0 - p).abs() <= 1e-3 && (w.1 - q).abs() <= 1e-3)
            })
    })
}

fn nonexistence_exit_code() -> bool {
    Command::new(env!("CARGO_BIN_EXE_berknash"))
        .args(["solve", "--example", "nonexistence"])
        .output()
        .map(|o| o.status.code() == Some(2))
        .unwrap_or(false)
}

fn property_suites() -> Outcome {
    let checks = [
        ("wKLD nonnegativity and zero-iff-match", divergence_nonnegative()),
        ("Bayes martingale", martingale()),
        ("gradient", gradient()),
        ("Nash equivalence", nash_equivalence()),
        ("exit code 2", nonexistence_exit_code()),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(failed.is_empty(), if failed.is_empty() { "all suites".to_string() } else { format!("failed: {}", failed.join(", ")) })
}

fn taxation() -> Outcome {
    let schedule = TaxSchedule::quadratic(0.1);
    let stein = [0.7, 1.0, 1.3]
        .iter()
        .map(|&x| {
            let t = oracle_taxation_thetas(&schedule, x).unwrap();
            (t.theta_b2 - t.theta_b2_stein).abs()
        })
        .fold(0.0, f64::max);
    let cfg = EquilibriumConfig { tol_opt: 1e-9, ..EquilibriumConfig::default() };
    let effort = |name: &str| -> (f64, f64) {
        let b = build(name, &Params::default()).unwrap();
        let out = solve(&b.game, &b.models, &cfg).unwrap();
        let labels = &b.game.actions[0];
        let chosen = out.certificates[0].strategy.0[0][0].iter().position(|p| *p > 0.5).unwrap();
        // the effort on the grid with the highest true expected payoff
        let n = labels.len();
        let best = (0..n)
            .map(|k| {
                let mut row = vec![0.0; n];
                row[k] = 1.0;
                (k, true_expected_payoff(&b.game, &StrategyProfile::single(row), 0).unwrap())
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0;
        (labels[chosen].parse().unwrap(), labels[best].parse().unwrap())
    };
    let (xa, opt) = effort("taxation-a");
    let (xb, opt_b) = effort("taxation-b");
    outcome(
        stein <= 1e-6 && (xb - opt_b).abs() <= 1e-4 && xa - opt > 0.0,
        format!("Stein gap {stein:.1e}, x_B = {xb}, x_A = {xa}, optimum {opt}"),
    )
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome); 9] = [
        (1, "monopoly equilibrium", monopoly_equilibrium),
        (2, "minimizer sweep", minimizer_sweep),
        (3, "mean dynamics", mean_dynamics),
        (4, "learning simulation", learning_simulation),
        (5, "correct specification gives Nash", monetary_nash),
        (6, "regression cutoffs", regression_cutoffs),
        (7, "trading", trading),
        (8, "property suites", property_suites),
        (9, "taxation", taxation),
    ];
    let mut unexpected = 0;
    for (n, name, run) in criteria {
        let o = run();
        println!("{} criterion {n} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        match KNOWN_FAILURES.iter().find(|k| k.0 == n) {
            Some((_, why)) if !o.pass => println!("    known: {why}"),
            Some(_) => println!("    listed as a known failure but passed"),
            None if !o.pass => unexpected += 1,
            None => {}
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria failed");
        std::process::exit(1);
    }
}
