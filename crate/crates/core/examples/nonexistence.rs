//! A misspecified agent without a Berk-Nash equilibrium, and what learning does instead.

use berknash::bundles::{build, Params};
use berknash::equilibrium::{solve, EquilibriumConfig, PerturbationStructure};
use berknash::learning::{simulate, GridBelief, PlayerBelief, Policy, SimulationOptions};

fn main() -> berknash::Result<()> {
    let bundle = build("nonexistence", &Params::default())?;
    let out = solve(&bundle.game, &bundle.models, &EquilibriumConfig::default())?;
    println!("certificates: {} ({} candidates rejected)", out.certificates.len(), out.candidates_checked);
    if let Some(r) = out.rejections.iter().min_by(|a, b| a.violation.total_cmp(&b.violation)) {
        println!("  closest miss: action {} beats the candidate by {:.4}", r.action, r.violation);
    }

    let points = vec![vec![0.0, 0.75], vec![0.25, 0.25]];
    let prior = PlayerBelief::Grid(GridBelief::new(points.clone(), &[0.99, 0.01])?);
    let shocks = PerturbationStructure::logistic(0.01)?;
    let h = simulate(&bundle.game, &bundle.models, &[prior], &[Policy::Myopic], Some(&shocks), 200, 5, &SimulationOptions { weight_stride: 1, ..Default::default() })?;
    let p = &h.players[0];
    if let Some(t) = (0..h.horizon).find(|&t| p.actions[t] == 0 && p.consequences[t] == 1) {
        println!("period {}: A yields y = 1, mean belief jumps to {:?}", t + 1, p.beliefs.mean_at(t + 1));
    }

    let dogmatic = PlayerBelief::Grid(GridBelief::new(points, &[1.0, 0.0])?);
    let always_a = Policy::Fixed { strategy: vec![vec![1.0, 0.0]] };
    match simulate(&bundle.game, &bundle.models, &[dogmatic], &[always_a], None, 200, 5, &SimulationOptions::default()) {
        Err(e) => println!("dogmatic prior: {e}"),
        Ok(_) => println!("dogmatic prior survived"),
    }
    Ok(())
}
