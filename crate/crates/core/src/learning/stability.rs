use serde::{Deserialize, Serialize};

use super::simulate::{BeliefTrack, PlayerHistory, SimulationHistory};
use crate::equilibrium::{perturbed_equilibrium, verify_berk_nash, EquilibriumConfig, PerturbationStructure, Verdict};
use crate::error::{Error, Result};
use crate::game::{ObjectiveGame, StrategyProfile};
use crate::subjective::{minimizer_set, MinimizerConfig, MinimizerSet, SubjectiveModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    /// Trailing periods examined.
    pub window: usize,
    /// Largest tolerated sup-norm distance between intended strategies and the candidate.
    pub tol: f64,
    /// Radius around the minimizer set for the concentration statistic.
    pub radius: f64,
}

/// One seed's outcome against the candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    /// Largest sup-norm distance of σ_t from the candidate over the window.
    pub max_deviation: f64,
    pub stable: bool,
    /// Per player, average posterior mass within `radius` of Θ(σ) over the window.
    pub concentration: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub config: StabilityConfig,
    pub candidate: StrategyProfile,
    /// Θ^i(σ) per player, the centers of the concentration statistic.
    pub minimizers: Vec<MinimizerSet>,
    pub seeds: Vec<SeedOutcome>,
    /// Share of seeds whose intended strategies stayed within `tol` over the window.
    pub frequency: f64,
    pub mean_concentration: Vec<f64>,
}

fn deviation(h: &PlayerHistory, t: usize, target: &[Vec<f64>]) -> f64 {
    let block = h.n_signals * h.n_actions;
    let flat = &h.intended[t * block..(t + 1) * block];
    flat.iter().zip(target.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn concentration(h: &PlayerHistory, from: usize, to: usize, centers: &[Vec<f64>], radius: f64) -> f64 {
    use super::belief::{ConjugateNormalBelief, GridBelief};
    match (&h.beliefs, &h.final_belief) {
        (BeliefTrack::Conjugate { mean, variance }, _) => {
            let total: f64 = (from..=to)
                .map(|t| ConjugateNormalBelief { mean: mean[t], variance: variance[t] }.mass_within(centers, radius))
                .sum();
            total / (to - from + 1) as f64
        }
        (BeliefTrack::Grid { weight_periods, weights, .. }, super::PlayerBelief::Grid(last)) => {
            let masses: Vec<f64> = weight_periods
                .iter()
                .zip(weights)
                .filter(|(t, _)| (from..=to).contains(*t))
                .map(|(_, w)| {
                    let g = GridBelief::new(last.points.clone(), w).expect("recorded weights");
                    g.mass_within(centers, radius)
                })
                .collect();
            if masses.is_empty() {
                last.mass_within(centers, radius)
            } else {
                masses.iter().sum::<f64>() / masses.len() as f64
            }
        }
        _ => unreachable!("belief kind is fixed over a run"),
    }
}

/// Outcome of one history against `candidate`, with Θ(σ) already computed.
pub fn seed_outcome(
    history: &SimulationHistory,
    candidate: &StrategyProfile,
    minimizers: &[MinimizerSet],
    cfg: &StabilityConfig,
) -> Result<SeedOutcome> {
    if cfg.window == 0 || cfg.window > history.horizon {
        return Err(Error::InvalidWindow(format!("window {} for horizon {}", cfg.window, history.horizon)));
    }
    if candidate.0.len() != history.players.len() || minimizers.len() != history.players.len() {
        return Err(Error::InvalidProfile("candidate does not match the history's players".into()));
    }
    let (from, to) = (history.horizon + 1 - cfg.window, history.horizon);
    let mut max_deviation = 0.0f64;
    for (h, target) in history.players.iter().zip(&candidate.0) {
        if target.len() != h.n_signals || target.iter().any(|r| r.len() != h.n_actions) {
            return Err(Error::InvalidProfile(format!("candidate shape does not match player {}", h.player)));
        }
        for t in from..=to {
            max_deviation = max_deviation.max(deviation(h, t, target));
        }
    }
    let concentration = history
        .players
        .iter()
        .zip(minimizers)
        .map(|(h, m)| concentration(h, from, to, &m.points, cfg.radius))
        .collect();
    Ok(SeedOutcome { seed: history.seed, max_deviation, stable: max_deviation <= cfg.tol, concentration })
}

/// Empirical stability of `candidate` across seeds: the share of runs whose intended
/// strategies stay within `tol` of it over the trailing window, plus how much posterior
/// mass sits near Θ(σ) there.
pub fn stability_report(
    game: &ObjectiveGame,
    models: &[SubjectiveModel],
    histories: &[SimulationHistory],
    candidate: &StrategyProfile,
    cfg: &StabilityConfig,
    minimizer: &MinimizerConfig,
) -> Result<StabilityReport> {
    if histories.is_empty() {
        return Err(Error::MissingArgument("at least one history".into()));
    }
    candidate.validate(game)?;
    let minimizers = (0..game.n_players())
        .map(|i| minimizer_set(game, &models[i], candidate, i, minimizer))
        .collect::<Result<Vec<_>>>()?;
    let seeds = histories.iter().map(|h| seed_outcome(h, candidate, &minimizers, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(summarize(cfg.clone(), candidate.clone(), minimizers, seeds))
}

/// Assemble a report from outcomes computed one history at a time.
pub fn summarize(
    config: StabilityConfig,
    candidate: StrategyProfile,
    minimizers: Vec<MinimizerSet>,
    seeds: Vec<SeedOutcome>,
) -> StabilityReport {
    let n = seeds.len().max(1) as f64;
    let frequency = seeds.iter().filter(|s| s.stable).count() as f64 / n;
    let players = minimizers.len();
    let mean_concentration =
        (0..players).map(|i| seeds.iter().map(|s| s.concentration[i]).sum::<f64>() / n).collect();
    StabilityReport { config, candidate, minimizers, seeds, frequency, mean_concentration }
}

/// Check that a limit of intended strategies is an equilibrium of the perturbed game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCheck {
    /// Window-and-seed average of intended strategies.
    pub limit: StrategyProfile,
    /// Perturbed equilibrium reached from `limit`.
    pub fixed_point: StrategyProfile,
    pub distance: f64,
    pub verdict: Verdict,
}

/// Average the trailing intended strategies over all seeds and verify the average as an
/// equilibrium of the perturbed game. `distance` to the perturbed fixed point reached from
/// the average separates finite-sample noise from a genuine failure.
pub fn limit_check(
    game: &ObjectiveGame,
    models: &[SubjectiveModel],
    histories: &[SimulationHistory],
    window: usize,
    perturbation: &PerturbationStructure,
    cfg: &EquilibriumConfig,
) -> Result<LimitCheck> {
    let first = histories.first().ok_or_else(|| Error::MissingArgument("at least one history".into()))?;
    if window == 0 || histories.iter().any(|h| window > h.horizon) {
        return Err(Error::InvalidWindow(format!("window {window} for horizon {}", first.horizon)));
    }
    let mut limit: Vec<Vec<Vec<f64>>> =
        first.players.iter().map(|h| vec![vec![0.0; h.n_actions]; h.n_signals]).collect();
    let count = (histories.len() * window) as f64;
    for h in histories {
        for (p, ph) in h.players.iter().enumerate() {
            for t in h.horizon + 1 - window..=h.horizon {
                for (row, add) in limit[p].iter_mut().zip(ph.intended_at(t)) {
                    row.iter_mut().zip(add).for_each(|(a, b)| *a += b / count);
                }
            }
        }
    }
    let limit = StrategyProfile(limit);
    let (fixed_point, _) = perturbed_equilibrium(game, models, &limit, perturbation, cfg)?;
    let distance = limit.distance(&fixed_point);
    let verdict = verify_berk_nash(game, models, &limit, Some(perturbation), cfg)?;
    Ok(LimitCheck { limit, fixed_point, distance, verdict })
}
