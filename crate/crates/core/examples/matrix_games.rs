//! Players who know the payoffs but not each other's strategies: Berk-Nash equilibria are
//! the Nash equilibria.

use berknash::bundles::{build, Params};
use berknash::equilibrium::{cross_check, solve, CheckMode, EquilibriumConfig};
use berknash::subjective::diagnose;

fn main() -> berknash::Result<()> {
    let cfg = EquilibriumConfig::default();
    for name in ["coordination", "prisoners"] {
        let bundle = build(name, &Params::default())?;
        let out = solve(&bundle.game, &bundle.models, &cfg)?;
        println!("{name}: {} equilibria", out.certificates.len());
        for c in &out.certificates {
            let nash = cross_check(&bundle.game, &bundle.models, c, CheckMode::Nash, None, &cfg)?;
            let diag = diagnose(&bundle.game, &bundle.models[0], &c.strategy, 0, &cfg.minimizer)?;
            let rows: Vec<String> = c.strategy.0.iter().map(|p| format!("{:.4?}", p[0])).collect();
            println!(
                "  {}  Nash: {}  correctly specified: {}  strongly identified: {}",
                rows.join(" / "),
                nash.passed,
                diag.correctly_specified,
                diag.strongly_identified
            );
        }
    }
    Ok(())
}
