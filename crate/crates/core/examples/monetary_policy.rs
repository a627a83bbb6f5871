//! A correctly specified government: the Berk-Nash policy coincides with the Nash policy
//! and the model is strongly identified there.

use berknash::bundles::{build, solve_monetary, MonetaryParams, Params};
use berknash::equilibrium::EquilibriumConfig;
use berknash::subjective::{diagnose, MinimizerConfig};

fn main() -> berknash::Result<()> {
    let p = MonetaryParams::from_params(&Params::default())?;
    let (x, cert) = solve_monetary(&p, &EquilibriumConfig::default())?;
    println!("equilibrium policy x = {x:.4}, with the public expecting the same");

    // best-response iteration on the true model: x = (λu* + λ²x_P)/(1 + λ²)
    let mut xp = p.x_public;
    for _ in 0..200 {
        xp = (p.lambda * p.u_star + p.lambda * p.lambda * xp) / (1.0 + p.lambda * p.lambda);
    }
    println!("Nash policy λu* = {xp:.4}");

    let params = Params::parse(&[format!("x_public={x}")])?;
    let bundle = build("monetary", &params)?;
    let report = diagnose(&bundle.game, &bundle.models[0], &cert.strategy, 0, &MinimizerConfig::default())?;
    println!(
        "correctly specified: {}, strongly identified: {}, θ = {:?}",
        report.correctly_specified,
        report.strongly_identified,
        report.minimizers.representative()
    );
    Ok(())
}
