use serde::{Deserialize, Serialize};

use super::certificate::EquilibriumCertificate;
use super::optimality::best_responses;
use super::verify::EquilibriumConfig;
use crate::error::{Error, Result};
use crate::game::{objective_distribution, ObjectiveGame, StrategyProfile};
use crate::subjective::{PlayerModel, SubjectiveModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Nash,
    SelfConfirming,
    Analogy,
}

/// Analogy partitions of the states, one per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalogyStructure {
    /// `cells[i][ω]` is the analogy class of state ω for player i.
    pub cells: Vec<Vec<usize>>,
    /// For single-agent games whose state is a pair (c, r) where the coordinate `c` plays
    /// the role of an opponent's action (an ask price chosen by a seller, say).
    pub nature_split: Option<NatureSplit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NatureSplit {
    /// `coordinate[ω]` and `rest[ω]` decompose each state.
    pub coordinate: Vec<usize>,
    pub rest: Vec<usize>,
}

impl AnalogyStructure {
    pub fn check(&self, game: &ObjectiveGame) -> Result<()> {
        if self.cells.len() != game.n_players() || self.cells.iter().any(|c| c.len() != game.states.len()) {
            return Err(Error::InvalidModel("one analogy class per player and state required".into()));
        }
        if let Some(n) = &self.nature_split {
            if game.n_players() != 1 || n.coordinate.len() != game.states.len() || n.rest.len() != game.states.len() {
                return Err(Error::InvalidModel("nature splits apply to single-agent games".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckLine {
    pub player: String,
    pub signal: usize,
    pub support: Vec<usize>,
    pub best_responses: Vec<usize>,
    /// Worst shortfall of a supported action against the check's benchmark.
    pub shortfall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub mode: CheckMode,
    pub passed: bool,
    pub lines: Vec<CrossCheckLine>,
}

/// True expected payoffs `[s][x]` against Q_σ.
fn true_payoffs(game: &ObjectiveGame, sigma: &StrategyProfile, i: usize) -> Result<Vec<Vec<f64>>> {
    let q = objective_distribution(game, sigma, i)?;
    Ok(q.probs
        .iter()
        .map(|rows| {
            rows.iter()
                .enumerate()
                .map(|(x, qy)| qy.iter().zip(&game.payoff[i][x]).map(|(p, v)| p * v).sum())
                .collect()
        })
        .collect())
}

/// Lowest payoff any belief about the consequences of an unplayed action can assign.
fn worst_case(pm: &PlayerModel<'_>, s: usize, x: usize) -> f64 {
    match pm.gaussian() {
        Some(g) => {
            let cov = pm.covariates().expect("covariates");
            cov.probs[s][x]
                .iter()
                .enumerate()
                .filter(|(_, p)| **p > 0.0)
                .map(|(y, p)| {
                    let [c0, c1, c2] = g.cells[x][y].payoff;
                    let inf = if c2 > 0.0 {
                        c0 - c1 * c1 / (4.0 * c2) + c2
                    } else if c2 < 0.0 || c1 != 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        c0
                    };
                    p * inf
                })
                .sum()
        }
        None => pm.game.payoff[pm.player][x].iter().fold(f64::INFINITY, |m, v| m.min(*v)),
    }
}

/// The signal profile of each state, when signals are functions of the state.
fn signals_of_states(game: &ObjectiveGame) -> Result<Vec<Vec<usize>>> {
    let np = game.n_signal_profiles();
    (0..game.states.len())
        .map(|w| {
            let hits: Vec<usize> = (0..np).filter(|k| game.law[w * np + k] > 0.0).collect();
            match hits.as_slice() {
                [k] => Ok(game.signal_profile(*k)),
                _ => Err(Error::InvalidGame(format!(
                    "signals are not a function of state {}; analogy checks need them to be",
                    game.states[w]
                ))),
            }
        })
        .collect()
}

/// Perceived payoffs `[s][x]` under analogy-based expectations.
fn analogy_payoffs(
    game: &ObjectiveGame,
    sigma: &StrategyProfile,
    i: usize,
    analogy: &AnalogyStructure,
) -> Result<Vec<Vec<f64>>> {
    let cells = &analogy.cells[i];
    let n_cells = cells.iter().max().map_or(0, |m| m + 1);
    let np = game.n_signal_profiles();
    let state_p = game.state_marginal();
    let mut cell_p = vec![0.0; n_cells];
    for (w, p) in state_p.iter().enumerate() {
        cell_p[cells[w]] += p;
    }
    let n_sig = game.signals[i].len();
    let n_act = game.actions[i].len();
    let marg = game.signal_marginal(i);
    let mut u = vec![vec![0.0; n_act]; n_sig];
    if let Some(split) = &analogy.nature_split {
        // the coordinate's distribution within each analogy class
        let n_coord = split.coordinate.iter().max().map_or(0, |m| m + 1);
        let mut coord_given_cell = vec![vec![0.0; n_coord]; n_cells];
        for (w, p) in state_p.iter().enumerate() {
            coord_given_cell[cells[w]][split.coordinate[w]] += p / cell_p[cells[w]];
        }
        let lookup = |c: usize, rest: usize| {
            (0..game.states.len()).find(|&w| split.coordinate[w] == c && split.rest[w] == rest)
        };
        for k in 0..game.law.len() {
            let weight = game.law[k];
            if weight == 0.0 {
                continue;
            }
            let w = k / np;
            let s = game.signal_profile(k % np)[i];
            for x in 0..n_act {
                for (c, pc) in coord_given_cell[cells[w]].iter().enumerate() {
                    if *pc == 0.0 {
                        continue;
                    }
                    let w2 = lookup(c, split.rest[w]).ok_or_else(|| {
                        Error::InvalidGame("state space is not a product of its coordinates".into())
                    })?;
                    let y = game.consequence(i, w2, &[x])?;
                    u[s][x] += weight / marg[s] * pc * game.payoff[i][x][y];
                }
            }
        }
        return Ok(u);
    }
    let sigs = signals_of_states(game)?;
    let sizes = game.action_sizes();
    let others: Vec<usize> = (0..game.n_players()).filter(|&j| j != i).collect();
    let n_other: usize = others.iter().map(|&j| sizes[j]).product();
    let other_profile = |op: usize| {
        let mut rem = op;
        let mut a = vec![0usize; game.n_players()];
        for &j in others.iter().rev() {
            a[j] = rem % sizes[j];
            rem /= sizes[j];
        }
        a
    };
    // σ̄(x^{-i} | class) averaged over the states of the class
    let mut avg = vec![vec![0.0; n_other]; n_cells];
    for (w, p) in state_p.iter().enumerate() {
        for (op, slot) in avg[cells[w]].iter_mut().enumerate() {
            let a = other_profile(op);
            let prob: f64 = others.iter().map(|&j| sigma.0[j][sigs[w][j]][a[j]]).product();
            *slot += p / cell_p[cells[w]] * prob;
        }
    }
    for k in 0..game.law.len() {
        let weight = game.law[k];
        if weight == 0.0 {
            continue;
        }
        let w = k / np;
        let s = game.signal_profile(k % np)[i];
        for x in 0..n_act {
            for (op, q) in avg[cells[w]].iter().enumerate() {
                if *q == 0.0 {
                    continue;
                }
                let mut a = other_profile(op);
                a[i] = x;
                let y = game.consequence(i, w, &a)?;
                u[s][x] += weight / marg[s] * q * game.payoff[i][x][y];
            }
        }
    }
    Ok(u)
}

/// Compares a certificate's strategy against Nash, self-confirming or analogy-based
/// optimality.
pub fn cross_check(
    game: &ObjectiveGame,
    models: &[SubjectiveModel],
    certificate: &EquilibriumCertificate,
    mode: CheckMode,
    analogy: Option<&AnalogyStructure>,
    cfg: &EquilibriumConfig,
) -> Result<CrossCheckReport> {
    let sigma = &certificate.strategy;
    sigma.validate(game)?;
    if mode == CheckMode::Analogy {
        analogy.ok_or(Error::MissingStructure)?.check(game)?;
    }
    let tol = cfg.tol_opt;
    let mut lines = Vec::new();
    for i in 0..game.n_players() {
        let pm = PlayerModel::new(game, &models[i], i)?;
        let truth = true_payoffs(game, sigma, i)?;
        let perceived = match mode {
            CheckMode::Analogy => analogy_payoffs(game, sigma, i, analogy.expect("checked"))?,
            _ => truth.clone(),
        };
        for (s, row) in sigma.0[i].iter().enumerate() {
            let support: Vec<usize> = (0..row.len()).filter(|&x| row[x] > cfg.support_tol).collect();
            let benchmark: Vec<f64> = match mode {
                CheckMode::SelfConfirming => (0..row.len())
                    .map(|x| if support.contains(&x) { truth[s][x] } else { worst_case(&pm, s, x) })
                    .collect(),
                _ => perceived[s].clone(),
            };
            let best = benchmark.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
            let shortfall = support.iter().map(|&x| best - benchmark[x]).fold(0.0, f64::max);
            lines.push(CrossCheckLine {
                player: game.players[i].clone(),
                signal: s,
                best_responses: best_responses(&benchmark, tol),
                support,
                shortfall,
            });
        }
    }
    let passed = lines.iter().all(|l| l.shortfall <= tol);
    Ok(CrossCheckReport { mode, passed, lines })
}
