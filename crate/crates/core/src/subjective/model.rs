use serde::{Deserialize, Serialize};

use super::belief::Belief;
use super::domain::ParameterDomain;
use super::trading::TradingKernel;
use crate::error::{Error, Result};
use crate::game::{objective_distribution, ObjectiveGame, OutcomeDistribution, StrategyProfile};

/// A player's parametric family of conditional outcome distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SubjectiveModel {
    Categorical(CategoricalModel),
    GaussianMean(GaussianMeanModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalModel {
    pub domain: ParameterDomain,
    pub kernel: CategoricalKernel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CategoricalKernel {
    /// One table `[s][x][y]` per point of a finite domain.
    Table { tables: Vec<Vec<Vec<Vec<f64>>>> },
    /// The player knows the game but not the opponents' strategies; θ lists them
    /// opponent by opponent, signal by signal.
    OpponentStrategies,
    Trading(TradingKernel),
}

/// Each consequence `y` is an observed covariate accompanied by a real outcome with unit
/// variance. The outcome's true mean is `true_mean`; the model's mean is
/// `offset + features · θ`. The payoff of the cell is `c0 + c1·r + c2·r²` in the outcome `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMeanModel {
    pub domain: ParameterDomain,
    /// `cells[x][y]`.
    pub cells: Vec<Vec<GaussianCell>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianCell {
    pub true_mean: f64,
    pub offset: f64,
    pub features: Vec<f64>,
    pub payoff: [f64; 3],
}

impl GaussianCell {
    pub fn mean(&self, theta: &[f64]) -> f64 {
        self.offset + self.features.iter().zip(theta).map(|(f, t)| f * t).sum::<f64>()
    }

    /// Expected payoff when the outcome has mean moments `E[m]`, `E[m²]` and unit noise.
    pub fn expected_payoff(&self, m1: f64, m2: f64) -> f64 {
        self.payoff[0] + self.payoff[1] * m1 + self.payoff[2] * (m2 + 1.0)
    }

    pub fn true_payoff(&self) -> f64 {
        self.expected_payoff(self.true_mean, self.true_mean * self.true_mean)
    }
}

impl GaussianMeanModel {
    /// Payoff table `[x][y]` at the true means, for the game's finite reduction.
    pub fn payoff_table(&self) -> Vec<Vec<f64>> {
        self.cells.iter().map(|row| row.iter().map(GaussianCell::true_payoff).collect()).collect()
    }
}

impl SubjectiveModel {
    pub fn domain(&self) -> &ParameterDomain {
        match self {
            Self::Categorical(m) => &m.domain,
            Self::GaussianMean(m) => &m.domain,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Categorical(_) => "categorical",
            Self::GaussianMean(_) => "gaussian_mean",
        }
    }
}

/// Expected outcomes of a belief: the mixture for categorical models, mean moments
/// `(E[m], E[m²])` per `[x][y]` cell for gaussian-mean models.
#[derive(Debug, Clone, PartialEq)]
pub enum Predictive {
    Categorical(OutcomeDistribution),
    GaussianMoments(Vec<Vec<(f64, f64)>>),
}

/// A model bound to a player of a game, with the pieces that do not depend on θ cached.
#[derive(Debug, Clone)]
pub struct PlayerModel<'a> {
    pub game: &'a ObjectiveGame,
    pub model: &'a SubjectiveModel,
    pub player: usize,
    /// Covariate law `Q(y | s, x)` for gaussian-mean models.
    covariates: Option<OutcomeDistribution>,
    opponent_blocks: Vec<(usize, usize)>,
}

impl<'a> PlayerModel<'a> {
    pub fn new(game: &'a ObjectiveGame, model: &'a SubjectiveModel, player: usize) -> Result<Self> {
        if player >= game.n_players() {
            return Err(Error::InvalidModel(format!("no player with index {player}")));
        }
        model.domain().check()?;
        let n_sig = game.signals[player].len();
        let n_act = game.actions[player].len();
        let n_y = game.consequences[player].len();
        let mut opponent_blocks = Vec::new();
        let mut covariates = None;
        match model {
            SubjectiveModel::Categorical(m) => match &m.kernel {
                CategoricalKernel::Table { tables } => {
                    let ParameterDomain::Points { points } = &m.domain else {
                        return Err(Error::InvalidModel("table kernels need a finite domain".into()));
                    };
                    if tables.len() != points.len() {
                        return Err(Error::InvalidModel("one table per parameter point required".into()));
                    }
                    for t in tables {
                        if t.len() != n_sig
                            || t.iter().any(|r| r.len() != n_act || r.iter().any(|q| q.len() != n_y))
                        {
                            return Err(Error::InvalidModel("table shape does not match the game".into()));
                        }
                        for q in t.iter().flatten() {
                            if q.iter().any(|v| *v < 0.0) || (q.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
                                return Err(Error::InvalidModel("table rows must be distributions".into()));
                            }
                        }
                    }
                }
                CategoricalKernel::OpponentStrategies => {
                    let mut sizes = Vec::new();
                    for j in (0..game.n_players()).filter(|&j| j != player) {
                        for s in 0..game.signals[j].len() {
                            opponent_blocks.push((j, s));
                            sizes.push(game.actions[j].len());
                        }
                    }
                    if m.domain != (ParameterDomain::Simplices { sizes }) {
                        return Err(Error::InvalidModel(
                            "opponent-strategy kernels need one simplex per opponent signal".into(),
                        ));
                    }
                }
                CategoricalKernel::Trading(k) => {
                    if n_sig != 1 || n_act != k.prices.len() || n_y != k.n_consequences() {
                        return Err(Error::InvalidModel("trading kernel does not match the game".into()));
                    }
                    if m.domain != (ParameterDomain::Simplices { sizes: k.simplex_sizes() }) {
                        return Err(Error::InvalidModel("trading kernel needs its simplex product domain".into()));
                    }
                }
            },
            SubjectiveModel::GaussianMean(m) => {
                if game.n_players() != 1 {
                    return Err(Error::InvalidModel("gaussian-mean models are single-agent".into()));
                }
                if matches!(m.domain, ParameterDomain::Simplices { .. }) {
                    return Err(Error::InvalidModel("gaussian-mean models take a box or finite domain".into()));
                }
                let d = m.domain.dim();
                if m.cells.len() != n_act || m.cells.iter().any(|r| r.len() != n_y) {
                    return Err(Error::InvalidModel("gaussian cells must be indexed [action][consequence]".into()));
                }
                if m.cells.iter().flatten().any(|c| c.features.len() != d) {
                    return Err(Error::InvalidModel("feature length differs from the domain dimension".into()));
                }
                covariates = Some(objective_distribution(game, &StrategyProfile::uniform(game), 0)?);
            }
        }
        Ok(Self { game, model, player, covariates, opponent_blocks })
    }

    pub fn domain(&self) -> &ParameterDomain {
        self.model.domain()
    }

    pub fn n_signals(&self) -> usize {
        self.game.signals[self.player].len()
    }

    pub fn n_actions(&self) -> usize {
        self.game.actions[self.player].len()
    }

    pub fn covariates(&self) -> Option<&OutcomeDistribution> {
        self.covariates.as_ref()
    }

    pub fn gaussian(&self) -> Option<&GaussianMeanModel> {
        match self.model {
            SubjectiveModel::GaussianMean(m) => Some(m),
            _ => None,
        }
    }

    /// `Q_θ(y | s, x)` for a categorical model.
    pub fn kernel_table(&self, theta: &[f64]) -> Result<OutcomeDistribution> {
        let SubjectiveModel::Categorical(m) = self.model else {
            return Err(Error::InvalidModel("kernel tables exist only for categorical models".into()));
        };
        m.domain.ensure_contains(theta)?;
        self.kernel_table_unchecked(theta)
    }

    /// Kernel evaluation without the domain check; multilinear kernels are also evaluated
    /// at coordinate substitutions outside the domain to obtain exact partial derivatives.
    pub(crate) fn kernel_table_unchecked(&self, theta: &[f64]) -> Result<OutcomeDistribution> {
        let SubjectiveModel::Categorical(m) = self.model else {
            return Err(Error::InvalidModel("kernel tables exist only for categorical models".into()));
        };
        match &m.kernel {
            CategoricalKernel::Table { tables } => {
                let k = m.domain.point_index(theta).ok_or_else(|| Error::OutsideDomain { theta: theta.to_vec() })?;
                Ok(OutcomeDistribution { probs: tables[k].clone() })
            }
            CategoricalKernel::OpponentStrategies => {
                let mut profile = StrategyProfile::uniform(self.game);
                let mut at = 0;
                for &(j, s) in &self.opponent_blocks {
                    let n = self.game.actions[j].len();
                    profile.0[j][s] = theta[at..at + n].to_vec();
                    at += n;
                }
                opponent_distribution(self.game, &profile, self.player)
            }
            CategoricalKernel::Trading(k) => Ok(OutcomeDistribution {
                probs: vec![(0..k.prices.len()).map(|x| k.row(theta, x)).collect()],
            }),
        }
    }

    pub fn check_belief(&self, belief: &Belief) -> Result<()> {
        belief.validate()?;
        match belief {
            Belief::Atoms { points, .. } => {
                for p in points {
                    self.domain().ensure_contains(p)?;
                }
            }
            Belief::Normal { .. } => {
                if self.gaussian().is_none() || self.domain().dim() != 1 {
                    return Err(Error::InvalidBelief(
                        "conjugate-normal beliefs need a scalar gaussian-mean model".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn predictive(&self, belief: &Belief) -> Result<Predictive> {
        self.check_belief(belief)?;
        match self.model {
            SubjectiveModel::Categorical(_) => {
                let Belief::Atoms { points, weights } = belief else { unreachable!() };
                let mut acc: Option<OutcomeDistribution> = None;
                for (p, w) in points.iter().zip(weights) {
                    if *w == 0.0 {
                        continue;
                    }
                    let t = self.kernel_table_unchecked(p)?;
                    match acc.as_mut() {
                        None => {
                            let mut t = t;
                            t.probs.iter_mut().flatten().flatten().for_each(|q| *q *= w);
                            acc = Some(t);
                        }
                        Some(a) => {
                            for (x, y) in a.probs.iter_mut().flatten().flatten().zip(t.probs.iter().flatten().flatten()) {
                                *x += w * y;
                            }
                        }
                    }
                }
                Ok(Predictive::Categorical(acc.expect("belief has positive mass")))
            }
            SubjectiveModel::GaussianMean(g) => Ok(Predictive::GaussianMoments(
                g.cells
                    .iter()
                    .map(|row| row.iter().map(|c| belief_moments(c, belief)).collect())
                    .collect(),
            )),
        }
    }

    /// Believed expected payoff of every action after every signal, `[s][x]`.
    pub fn payoff_table(&self, belief: &Belief) -> Result<Vec<Vec<f64>>> {
        let pred = self.predictive(belief)?;
        Ok(self.payoffs_from_predictive(&pred))
    }

    pub fn payoffs_from_predictive(&self, pred: &Predictive) -> Vec<Vec<f64>> {
        let pay = &self.game.payoff[self.player];
        match pred {
            Predictive::Categorical(q) => q
                .probs
                .iter()
                .map(|rows| {
                    rows.iter()
                        .enumerate()
                        .map(|(x, qy)| qy.iter().zip(&pay[x]).map(|(p, v)| p * v).sum())
                        .collect()
                })
                .collect(),
            Predictive::GaussianMoments(moments) => {
                let g = self.gaussian().expect("gaussian predictive");
                let cov = self.covariates.as_ref().expect("covariates cached");
                cov.probs
                    .iter()
                    .map(|rows| {
                        rows.iter()
                            .enumerate()
                            .map(|(x, qy)| {
                                qy.iter()
                                    .enumerate()
                                    .filter(|(_, p)| **p > 0.0)
                                    .map(|(y, p)| {
                                        let (m1, m2) = moments[x][y];
                                        p * g.cells[x][y].expected_payoff(m1, m2)
                                    })
                                    .sum()
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }

    /// Payoffs under the point belief on `theta`.
    pub fn payoff_table_at(&self, theta: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.payoff_table(&Belief::point(theta.to_vec()))
    }
}

fn belief_moments(cell: &GaussianCell, belief: &Belief) -> (f64, f64) {
    match belief {
        Belief::Atoms { points, weights } => {
            let mut m1 = 0.0;
            let mut m2 = 0.0;
            for (p, w) in points.iter().zip(weights) {
                let m = cell.mean(p);
                m1 += w * m;
                m2 += w * m * m;
            }
            (m1, m2)
        }
        Belief::Normal { mean, variance } => {
            let f = cell.features[0];
            let m1 = cell.offset + f * mean;
            (m1, m1 * m1 + f * f * variance)
        }
    }
}

/// Like `objective_distribution` but without validating the opponents' rows, which hold
/// arbitrary coordinates when differentiating multilinear kernels.
fn opponent_distribution(game: &ObjectiveGame, profile: &StrategyProfile, player: usize) -> Result<OutcomeDistribution> {
    let i = player;
    let n_y = game.consequences[i].len();
    let n_act = game.actions[i].len();
    let mut probs = vec![vec![vec![0.0; n_y]; n_act]; game.signals[i].len()];
    let marg = game.signal_marginal(i);
    let np = game.n_signal_profiles();
    let sizes = game.action_sizes();
    let others: Vec<usize> = (0..game.n_players()).filter(|&j| j != i).collect();
    let n_other: usize = others.iter().map(|&j| sizes[j]).product();
    for (k, &w) in game.law.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let state = k / np;
        let sig = game.signal_profile(k % np);
        let cond = w / marg[sig[i]];
        let mut actions = vec![0usize; game.n_players()];
        for op in 0..n_other {
            let mut rem = op;
            let mut prob = cond;
            for &j in others.iter().rev() {
                actions[j] = rem % sizes[j];
                rem /= sizes[j];
                prob *= profile.0[j][sig[j]][actions[j]];
            }
            if prob == 0.0 {
                continue;
            }
            for x in 0..n_act {
                actions[i] = x;
                let y = game.consequence(i, state, &actions)?;
                probs[sig[i]][x][y] += prob;
            }
        }
    }
    Ok(OutcomeDistribution { probs })
}
