//! Bilateral trade with adverse selection under five belief structures: closed-form
//! profit functions against the generic equilibrium search.

use berknash::bundles::{build, oracle_trading_equilibria, oracle_trading_pi, trading_instance, Params, TradingVariant};
use berknash::equilibrium::{cross_check, solve, CheckMode, EquilibriumConfig};

fn main() -> berknash::Result<()> {
    let inst = trading_instance("trading-ce")?;
    println!("price   Π_NE    Π_CE    Π_ABEE  (canonical instance)");
    let abee = trading_instance("trading-abee")?;
    for x in 0..inst.prices.len() {
        println!(
            "{:>5} {:>7.4} {:>7.4} {:>7.4}",
            inst.prices[x],
            oracle_trading_pi(&inst, TradingVariant::Ne, x, None)?,
            oracle_trading_pi(&inst, TradingVariant::Ce, x, None)?,
            oracle_trading_pi(&abee, TradingVariant::Abee, x, None)?,
        );
    }
    let cfg = EquilibriumConfig::default();
    for (name, variant) in [
        ("trading-ce", TradingVariant::Ce),
        ("trading-be", TradingVariant::Be),
        ("trading-abee", TradingVariant::Abee),
        ("trading-bea", TradingVariant::Bea),
    ] {
        let bundle = build(name, &Params::default())?;
        let inst = trading_instance(name)?;
        let out = solve(&bundle.game, &bundle.models, &cfg)?;
        let mut found: Vec<f64> = out
            .certificates
            .iter()
            .map(|c| inst.prices[c.strategy.0[0][0].iter().position(|p| *p > 0.5).unwrap_or(0)])
            .collect();
        found.sort_by(f64::total_cmp);
        let oracle: Vec<f64> = oracle_trading_equilibria(&inst, variant, 1e-9)?.iter().map(|&x| inst.prices[x]).collect();
        println!("{name}: solver {found:?}, closed form {oracle:?}");
        if variant == TradingVariant::Abee {
            for c in &out.certificates {
                let rep = cross_check(&bundle.game, &bundle.models, c, CheckMode::Analogy, bundle.analogy.as_ref(), &cfg)?;
                println!("  analogy-based best response: {}", rep.passed);
            }
        }
    }
    Ok(())
}
