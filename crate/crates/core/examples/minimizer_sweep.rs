//! Closest parameters as the strategy varies: the generic minimizer of the weighted
//! Kullback-Leibler divergence against the piecewise closed form.

use berknash::bundles::{build, oracle_monopoly_minimizer, Params};
use berknash::game::StrategyProfile;
use berknash::subjective::{minimizer_set, MinimizerConfig};

fn main() -> berknash::Result<()> {
    let bundle = build("monopoly", &Params::default())?;
    let cfg = MinimizerConfig::default();
    println!("{:>8} {:>10} {:>10} {:>10} {:>10} {:>9}", "σ₂", "a", "b", "a oracle", "b oracle", "K min");
    let mut grid: Vec<f64> = (1..20).map(|k| k as f64 * 0.05).collect();
    grid.extend([7.0 / 8.0, 15.0 / 16.0, 35.0 / 36.0]);
    for s2 in grid {
        // σ₂ is the probability of the low price
        let sigma = StrategyProfile::single(vec![s2, 1.0 - s2]);
        let ms = minimizer_set(&bundle.game, &bundle.models[0], &sigma, 0, &cfg)?;
        let th = ms.representative();
        let want = oracle_monopoly_minimizer(s2)?;
        println!("{s2:>8.4} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>9.5}", th[0], th[1], want[0], want[1], ms.minimum);
    }
    Ok(())
}
