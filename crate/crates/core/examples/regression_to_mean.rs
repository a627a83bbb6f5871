//! The manager who attributes regression to the mean to criticism: equilibrium cutoffs
//! from the closed form, and the generic solver on the discretized game.

use berknash::bundles::{build, oracle_regression_cutoff, oracle_regression_thetas, Params};
use berknash::equilibrium::{solve, EquilibriumConfig};

fn main() -> berknash::Result<()> {
    for kappa in [0.5, 1.0, 2.0, 4.0, 8.0] {
        match oracle_regression_cutoff(kappa) {
            Ok(c) => {
                let (tc, tp) = oracle_regression_thetas(c);
                println!("κ = {kappa}: cutoff {c:.8}, θ_C = {tc:.6}, θ_P = {tp:.6}");
            }
            Err(e) => println!("κ = {kappa}: no interior cutoff ({e}); criticizing every signal is the equilibrium"),
        }
    }
    let bundle = build("regression", &Params::parse(&["kappa=2".to_string()])?)?;
    let out = solve(&bundle.game, &bundle.models, &EquilibriumConfig::default())?;
    let signals = &bundle.game.signals[0];
    for cert in &out.certificates {
        let rows = &cert.strategy.0[0];
        let first_praise = rows.iter().position(|r| r[1] > 0.5).map(|s| &signals[s]);
        println!("solver: praise from signal {first_praise:?} on (grid step 0.05)");
    }
    Ok(())
}
