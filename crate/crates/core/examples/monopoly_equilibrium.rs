//! The monopolist who mis-specifies demand: solve for the Berk-Nash equilibrium and
//! compare with the closed form σ = (35/36, 1/36), belief (40, 10/3).

use berknash::bundles::{build, oracle_monopoly_minimizer, Params};
use berknash::equilibrium::{cross_check, solve, CheckMode, EquilibriumConfig};
use berknash::subjective::Belief;

fn main() -> berknash::Result<()> {
    let bundle = build("monopoly", &Params::default())?;
    let cfg = EquilibriumConfig::default();
    let start = std::time::Instant::now();
    let out = solve(&bundle.game, &bundle.models, &cfg)?;
    println!("solved in {:.2?}, {} candidates checked", start.elapsed(), out.candidates_checked);

    for cert in &out.certificates {
        let sigma = &cert.strategy.0[0][0];
        println!("σ(price 2) = {:.6}, σ(price 10) = {:.6}", sigma[0], sigma[1]);
        if let Belief::Atoms { points, .. } = &cert.players[0].belief {
            println!("belief on (a, b) = ({:.4}, {:.4})", points[0][0], points[0][1]);
        }
        // the agent's best response is not what a Nash player would pick
        let nash = cross_check(&bundle.game, &bundle.models, cert, CheckMode::Nash, None, &cfg)?;
        println!("also optimal against the true demand: {}", nash.passed);
    }
    let theta = oracle_monopoly_minimizer(35.0 / 36.0)?;
    println!("closed form: σ(price 10) = {:.6}, θ = ({}, {:.4})", 1.0 / 36.0, theta[0], theta[1]);
    Ok(())
}
