//! A correctly specified two-armed bandit: the posterior on a grid of arm means
//! concentrates on the truth when both arms keep being tried.

use berknash::bundles::{build, Params};
use berknash::equilibrium::PerturbationStructure;
use berknash::learning::{default_prior, simulate, PlayerBelief, Policy, SimulationOptions};

fn main() -> berknash::Result<()> {
    let bundle = build("bandit", &Params::default())?;
    let prior = default_prior(&bundle.models[0])?;
    // large shocks keep both arms in play
    let shocks = PerturbationStructure::logistic(1.0)?;
    let truth = bundle.true_parameter.clone().expect("bandit truth");
    for seed in 0..5 {
        let h = simulate(&bundle.game, &bundle.models, &[prior.clone()], &[Policy::Myopic], Some(&shocks), 10_000, seed, &SimulationOptions::default())?;
        let PlayerBelief::Grid(post) = &h.players[0].final_belief else { unreachable!() };
        let mass = post.mass_within(&[truth.clone()], 1e-9);
        let left = h.players[0].actions.iter().filter(|&&x| x == 0).count();
        println!("seed {seed}: posterior mass on the true means {mass:.4}, left arm pulled {left} times");
    }
    Ok(())
}
