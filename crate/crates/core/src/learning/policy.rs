use serde::{Deserialize, Serialize};

use crate::equilibrium::argmax;
use crate::error::{Error, Result};
use crate::subjective::{Belief, PlayerModel, Predictive};

/// Tolerances `ε_t`: `plateau` for `t ≤ plateau_len`, then `c / √(t − plateau_len)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub plateau: f64,
    pub plateau_len: usize,
    pub c: f64,
}

impl EpsilonSchedule {
    /// Plateau `3C` for 100 periods, then `c/√(t − 100)`.
    pub fn standard(payoff_bound: f64, c: f64) -> Self {
        Self { plateau: 3.0 * payoff_bound, plateau_len: 100, c }
    }

    pub fn check(&self) -> Result<()> {
        if self.plateau > 0.0 && self.c > 0.0 && self.plateau.is_finite() && self.c.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParams("tolerance schedule must be positive".into()))
        }
    }

    pub fn at(&self, t: usize) -> f64 {
        if t <= self.plateau_len {
            self.plateau
        } else {
            self.c / ((t - self.plateau_len) as f64).sqrt()
        }
    }
}

/// How a player picks actions given the current belief.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Policy {
    /// Best response to the current belief plus the period's payoff shocks.
    Myopic,
    /// Plays as if holding `target_belief` whenever the current predictive is within
    /// `ε_t / (2C)` of the target's, myopically otherwise.
    AsymptoticallyOptimal {
        target_strategy: Vec<Vec<f64>>,
        target_belief: Belief,
        schedule: EpsilonSchedule,
    },
    /// Samples a constant strategy `[s][x]`.
    Fixed { strategy: Vec<Vec<f64>> },
}

/// Payoff bound `C` linking predictive distance to payoff error: `#Y · sup|π|` for
/// categorical models, the largest `|c1| + |c2|` over cells for gaussian-mean models.
pub fn payoff_sensitivity(pm: &PlayerModel<'_>) -> f64 {
    match pm.gaussian() {
        Some(g) => g.cells.iter().flatten().map(|c| c.payoff[1].abs() + c.payoff[2].abs()).fold(0.0, f64::max),
        None => pm.game.consequences[pm.player].len() as f64 * pm.game.payoff_bound(pm.player),
    }
}

/// Max-norm distance between two predictives; gaussian moments are compared over cells
/// the player can reach.
pub fn predictive_distance(pm: &PlayerModel<'_>, a: &Predictive, b: &Predictive) -> f64 {
    match (a, b) {
        (Predictive::Categorical(p), Predictive::Categorical(q)) => p.max_abs_diff(q),
        (Predictive::GaussianMoments(p), Predictive::GaussianMoments(q)) => {
            let cov = pm.covariates().expect("gaussian covariates");
            let mut d: f64 = 0.0;
            for rows in &cov.probs {
                for (x, qy) in rows.iter().enumerate() {
                    for (y, w) in qy.iter().enumerate() {
                        if *w > 0.0 {
                            d = d.max((p[x][y].0 - q[x][y].0).abs()).max((p[x][y].1 - q[x][y].1).abs());
                        }
                    }
                }
            }
            d
        }
        _ => f64::INFINITY,
    }
}

impl Policy {
    pub fn check(&self, pm: &PlayerModel<'_>) -> Result<()> {
        let strategy_ok = |s: &Vec<Vec<f64>>| {
            s.len() == pm.n_signals()
                && s.iter().all(|r| {
                    r.len() == pm.n_actions() && r.iter().all(|p| *p >= 0.0) && (r.iter().sum::<f64>() - 1.0).abs() <= 1e-9
                })
        };
        match self {
            Self::Myopic => Ok(()),
            Self::Fixed { strategy } if strategy_ok(strategy) => Ok(()),
            Self::AsymptoticallyOptimal { target_strategy, target_belief, schedule } if strategy_ok(target_strategy) => {
                schedule.check()?;
                pm.check_belief(target_belief)
            }
            _ => Err(Error::InvalidProfile("policy strategy does not match the player's signals and actions".into())),
        }
    }
}

/// Whether an asymptotically optimal player at period `t` plays as if holding the target belief.
pub(crate) fn within_target(pm: &PlayerModel<'_>, current: &Predictive, target: &Predictive, schedule: &EpsilonSchedule, t: usize) -> bool {
    let c = payoff_sensitivity(pm);
    c == 0.0 || predictive_distance(pm, current, target) <= schedule.at(t) / (2.0 * c)
}

/// Perturbed argmax, or a draw from a fixed strategy row with the uniform `u`. Ties go to
/// the first action.
pub(crate) fn choose(policy: &Policy, payoffs: &[f64], s: usize, xi: &[f64], u: f64) -> usize {
    match policy {
        Policy::Fixed { strategy } => {
            let row = &strategy[s];
            let mut acc = 0.0;
            for (x, p) in row.iter().enumerate() {
                acc += p;
                if u < acc {
                    return x;
                }
            }
            row.len() - 1
        }
        _ => argmax(&payoffs.iter().zip(xi).map(|(a, b)| a + b).collect::<Vec<_>>()),
    }
}

/// Action of a player holding `belief` after signal `s` in period `t`, given the payoff
/// shocks `xi` and a uniform draw `u` (used only by fixed policies).
pub fn policy_action(pm: &PlayerModel<'_>, policy: &Policy, belief: &Belief, s: usize, t: usize, xi: &[f64], u: f64) -> Result<usize> {
    policy.check(pm)?;
    if s >= pm.n_signals() || xi.len() != pm.n_actions() {
        return Err(Error::InvalidProfile("signal or shock vector does not match the player".into()));
    }
    let current = pm.predictive(belief)?;
    let payoffs = match policy {
        Policy::AsymptoticallyOptimal { target_belief, schedule, .. } => {
            let target = pm.predictive(target_belief)?;
            if within_target(pm, &current, &target, schedule, t) {
                pm.payoffs_from_predictive(&target)
            } else {
                pm.payoffs_from_predictive(&current)
            }
        }
        _ => pm.payoffs_from_predictive(&current),
    };
    Ok(choose(policy, &payoffs[s], s, xi, u))
}
