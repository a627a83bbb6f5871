mod common;

use berknash::bundles::{
    build, list, oracle_monopoly_minimizer, oracle_regression_cutoff, oracle_regression_thetas, oracle_taxation_efforts,
    oracle_taxation_thetas, oracle_trading_equilibria, oracle_trading_minimizer, solve_monetary, trading_instance,
    MonetaryParams, Params, TaxSchedule, TradingVariant,
};
use berknash::equilibrium::{cross_check, solve, CheckMode, EquilibriumConfig};
use berknash::game::{validate_game, StrategyProfile};
use berknash::subjective::{diagnose, minimizer_set, MinimizerConfig};
use rand_distr::{Distribution, StandardNormal};

#[test]
fn every_bundle_is_valid() {
    for name in list() {
        let b = build(name, &Params::default()).unwrap();
        assert!(validate_game(&b.game).is_empty(), "{name}");
        assert_eq!(b.models.len(), b.game.n_players(), "{name}");
    }
    assert!(build("nope", &Params::default()).is_err());
    assert!(build("monopoly", &Params::default().with("kappa", 1.0)).is_err());
}

#[test]
fn monopoly_minimizers_match_the_closed_form() {
    let b = build("monopoly", &Params::default()).unwrap();
    let mut grid: Vec<f64> = (1..20).map(|k| k as f64 * 0.05).collect();
    grid.extend([0.75, 7.0 / 8.0, 15.0 / 16.0, 35.0 / 36.0]);
    for s2 in grid {
        let sigma = StrategyProfile::single(vec![s2, 1.0 - s2]);
        let ms = minimizer_set(&b.game, &b.models[0], &sigma, 0, &MinimizerConfig::default()).unwrap();
        let want = oracle_monopoly_minimizer(s2).unwrap();
        for (got, want) in ms.representative().iter().zip(want) {
            assert!((got - want).abs() <= 1e-4, "σ₂ = {s2}: {got} vs {want}");
        }
    }
    assert!(oracle_monopoly_minimizer(1.0).is_err());
}

#[test]
fn monopoly_pure_price_ten_is_a_segment() {
    let b = build("monopoly", &Params::default()).unwrap();
    let ms = minimizer_set(&b.game, &b.models[0], &StrategyProfile::single(vec![0.0, 1.0]), 0, &MinimizerConfig::default()).unwrap();
    assert!(ms.segment);
    for p in &ms.points {
        // a − 10b = 2 along the segment
        assert!((p[0] - 10.0 * p[1] - 2.0).abs() <= 1e-4);
    }
}

fn price_index(inst: &berknash::bundles::TradingInstance, c: &berknash::equilibrium::EquilibriumCertificate) -> usize {
    let row = &c.strategy.0[0][0];
    let x = row.iter().position(|p| *p > 1.0 - 1e-6).expect("pure certificate");
    assert!(x < inst.prices.len());
    x
}

#[test]
fn trading_solver_matches_profit_functions() {
    let cfg = EquilibriumConfig::default();
    for (name, variant) in [
        ("trading-ce", TradingVariant::Ce),
        ("trading-be", TradingVariant::Be),
        ("trading-abee", TradingVariant::Abee),
        ("trading-bea", TradingVariant::Bea),
    ] {
        let b = build(name, &Params::default()).unwrap();
        let inst = trading_instance(name).unwrap();
        let out = solve(&b.game, &b.models, &cfg).unwrap();
        let mut found: Vec<usize> = out.certificates.iter().map(|c| price_index(&inst, c)).collect();
        found.sort();
        found.dedup();
        assert_eq!(found, oracle_trading_equilibria(&inst, variant, 1e-9).unwrap(), "{name}");
        if variant == TradingVariant::Abee {
            for c in &out.certificates {
                let rep = cross_check(&b.game, &b.models, c, CheckMode::Analogy, b.analogy.as_ref(), &cfg).unwrap();
                assert!(rep.passed);
            }
        }
    }
}

#[test]
fn trading_minimizers_match_closed_form() {
    let cfg = MinimizerConfig::default();
    for (name, variant) in [("trading-ce", TradingVariant::Ce), ("trading-abee", TradingVariant::Abee), ("trading-bea", TradingVariant::Bea)] {
        let b = build(name, &Params::default()).unwrap();
        let inst = trading_instance(name).unwrap();
        for x in 0..inst.prices.len() {
            let sigma = pure(&inst, x);
            let want = oracle_trading_minimizer(&inst, variant, x).unwrap();
            let ms = minimizer_set(&b.game, &b.models[0], &sigma, 0, &cfg).unwrap();
            // off-path coordinates are not pinned down, so compare the K value instead
            let k_at = berknash::subjective::wkld(&b.game, &b.models[0], &sigma, &want, 0).unwrap();
            assert!((k_at - ms.minimum).abs() <= 1e-6, "{name} price {x}: K(oracle) {k_at} vs {}", ms.minimum);
        }
    }
}

fn pure(inst: &berknash::bundles::TradingInstance, x: usize) -> StrategyProfile {
    let mut row = vec![0.0; inst.prices.len()];
    row[x] = 1.0;
    StrategyProfile::single(row)
}

#[test]
fn monetary_policy_is_nash() {
    let p = MonetaryParams::from_params(&Params::default()).unwrap();
    let (x, cert) = solve_monetary(&p, &EquilibriumConfig::default()).unwrap();
    let mut nash = 0.0;
    for _ in 0..500 {
        nash = (p.lambda * p.u_star + p.lambda * p.lambda * nash) / (1.0 + p.lambda * p.lambda);
    }
    assert!((x - nash).abs() <= 1e-3, "{x} vs {nash}");
    let b = build("monetary", &Params::default().with("x_public", x)).unwrap();
    let rep = diagnose(&b.game, &b.models[0], &cert.strategy, 0, &MinimizerConfig::default()).unwrap();
    assert!(rep.correctly_specified && rep.strongly_identified);
}

#[test]
fn regression_cutoffs() {
    let mut last = f64::INFINITY;
    for kappa in [2.0, 4.0, 8.0] {
        let c = oracle_regression_cutoff(kappa).unwrap();
        let (tc, tp) = oracle_regression_thetas(c);
        assert!((c - (tc - tp) / kappa).abs() <= 1e-8);
        assert!(c < last);
        last = c;
    }
    for kappa in [0.5, 1.0] {
        assert!(oracle_regression_cutoff(kappa).is_err());
    }
}

#[test]
fn regression_thetas_are_conditional_means() {
    let sigma = 0.8;
    let mut rng = common::rng(42);
    let (mut below, mut above) = ((0.0, 0.0, 0usize), (0.0, 0.0, 0usize));
    for _ in 0..2_000_000 {
        let s: f64 = StandardNormal.sample(&mut rng);
        let next: f64 = StandardNormal.sample(&mut rng);
        let d = next - s;
        let acc = if s < sigma { &mut below } else { &mut above };
        acc.0 += d;
        acc.1 += d * d;
        acc.2 += 1;
    }
    let (tc, tp) = oracle_regression_thetas(sigma);
    for ((sum, sq, n), want) in [(below, tc), (above, tp)] {
        let mean = sum / n as f64;
        let se = ((sq / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - want).abs() <= 3.0 * se, "{mean} vs {want} (se {se})");
    }
}

#[test]
fn regression_solver_finds_the_grid_cutoff() {
    let b = build("regression", &Params::default()).unwrap();
    let out = solve(&b.game, &b.models, &EquilibriumConfig::default()).unwrap();
    let c = oracle_regression_cutoff(2.0).unwrap();
    assert!(!out.certificates.is_empty());
    for cert in &out.certificates {
        let signals: Vec<f64> = b.game.signals[0].iter().map(|s| s.parse().unwrap()).collect();
        for (s, row) in signals.iter().zip(&cert.strategy.0[0]) {
            // praise above the cutoff, criticize below; the grid cell around it may go either way
            if (s - c).abs() > 0.05 {
                assert_eq!(row[1] > 0.5, *s > c, "signal {s}");
            }
        }
    }
}

#[test]
fn taxation_models() {
    let schedule = TaxSchedule::quadratic(0.1);
    for x in [0.7, 1.0, 1.3] {
        let th = oracle_taxation_thetas(&schedule, x).unwrap();
        assert!((th.theta_b2 - th.theta_b2_stein).abs() <= 1e-6);
    }
    let eff = oracle_taxation_efforts(&schedule).unwrap();
    assert!((eff.model_b - eff.optimal).abs() <= 1e-6);
    assert!(eff.model_a > eff.optimal);
}
