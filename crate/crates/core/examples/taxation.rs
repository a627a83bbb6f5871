//! Effort under a progressive tax, believed proportional (model A) or affine (model B).

use berknash::bundles::{build, oracle_taxation_efforts, oracle_taxation_thetas, Params, TaxSchedule};
use berknash::equilibrium::{solve, EquilibriumConfig};
use berknash::game::true_expected_payoff;

fn main() -> berknash::Result<()> {
    let schedule = TaxSchedule::quadratic(0.1);
    let th = oracle_taxation_thetas(&schedule, 2.0)?;
    println!("at x = 2: θ_A = {:.8}, θ_B2 = {:.10} (Stein form {:.10})", th.theta_a, th.theta_b2, th.theta_b2_stein);
    let eff = oracle_taxation_efforts(&schedule)?;
    println!("continuous: optimum {:.6}, model A {:.6}, model B {:.6}", eff.optimal, eff.model_a, eff.model_b);

    let cfg = EquilibriumConfig { tol_opt: 1e-9, ..EquilibriumConfig::default() };
    for name in ["taxation-a", "taxation-b"] {
        let bundle = build(name, &Params::default())?;
        let out = solve(&bundle.game, &bundle.models, &cfg)?;
        for cert in &out.certificates {
            let x = cert.strategy.0[0][0].iter().position(|p| *p > 0.5).map(|k| &bundle.game.actions[0][k]);
            let payoff = true_expected_payoff(&bundle.game, &cert.strategy, 0)?;
            println!("{name}: equilibrium effort {x:?}, true expected payoff {payoff:.8}");
        }
    }
    Ok(())
}
