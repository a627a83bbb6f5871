use super::model::{PlayerModel, SubjectiveModel};
use crate::error::Result;
use crate::game::{objective_distribution, ObjectiveGame, OutcomeDistribution, StrategyProfile};

/// `K(σ, ·)` for one player at a fixed strategy profile.
pub struct Wkld<'m, 'a> {
    pm: &'m PlayerModel<'a>,
    /// `p_S(s)·σ(x|s)`.
    weights: Vec<Vec<f64>>,
    objective: OutcomeDistribution,
    quadratic: Option<Quadratic>,
}

/// `½ θᵀHθ − bᵀθ + c` for gaussian-mean models.
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub h: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: f64,
}

impl Quadratic {
    pub fn value(&self, theta: &[f64]) -> f64 {
        let d = theta.len();
        let mut v = self.c;
        for i in 0..d {
            let hi: f64 = (0..d).map(|j| self.h[i][j] * theta[j]).sum();
            v += 0.5 * theta[i] * hi - self.b[i] * theta[i];
        }
        v
    }

    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        (0..theta.len())
            .map(|i| (0..theta.len()).map(|j| self.h[i][j] * theta[j]).sum::<f64>() - self.b[i])
            .collect()
    }
}

impl<'m, 'a> Wkld<'m, 'a> {
    pub fn new(pm: &'m PlayerModel<'a>, sigma: &StrategyProfile) -> Result<Self> {
        let objective = objective_distribution(pm.game, sigma, pm.player)?;
        let marg = pm.game.signal_marginal(pm.player);
        let weights: Vec<Vec<f64>> = sigma.0[pm.player]
            .iter()
            .zip(&marg)
            .map(|(row, ps)| row.iter().map(|p| p * ps).collect())
            .collect();
        let quadratic = pm.gaussian().map(|g| {
            let d = pm.domain().dim();
            let mut h = vec![vec![0.0; d]; d];
            let mut b = vec![0.0; d];
            let mut c = 0.0;
            for (s, row) in weights.iter().enumerate() {
                for (x, w) in row.iter().enumerate() {
                    if *w == 0.0 {
                        continue;
                    }
                    for (y, q) in objective.probs[s][x].iter().enumerate() {
                        if *q == 0.0 {
                            continue;
                        }
                        let cell = &g.cells[x][y];
                        let wq = w * q;
                        let r = cell.true_mean - cell.offset;
                        for i in 0..d {
                            b[i] += wq * r * cell.features[i];
                            for j in 0..d {
                                h[i][j] += wq * cell.features[i] * cell.features[j];
                            }
                        }
                        c += 0.5 * wq * r * r;
                    }
                }
            }
            Quadratic { h, b, c }
        });
        Ok(Self { pm, weights, objective, quadratic })
    }

    pub fn player_model(&self) -> &PlayerModel<'a> {
        self.pm
    }

    pub fn objective(&self) -> &OutcomeDistribution {
        &self.objective
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn quadratic(&self) -> Option<&Quadratic> {
        self.quadratic.as_ref()
    }

    /// K at θ, `+∞` when an on-path outcome gets zero subjective probability.
    pub fn value(&self, theta: &[f64]) -> Result<f64> {
        if let Some(q) = &self.quadratic {
            return Ok(q.value(theta).max(0.0));
        }
        let table = self.pm.kernel_table_unchecked(theta)?;
        Ok(self.value_of_table(&table))
    }

    pub(crate) fn value_of_table(&self, table: &OutcomeDistribution) -> f64 {
        let mut k = 0.0;
        for (s, row) in self.weights.iter().enumerate() {
            for (x, w) in row.iter().enumerate() {
                if *w == 0.0 {
                    continue;
                }
                let mut cell = 0.0;
                for (q, qt) in self.objective.probs[s][x].iter().zip(&table.probs[s][x]) {
                    if *q > 0.0 {
                        if *qt <= 0.0 {
                            return f64::INFINITY;
                        }
                        cell += q * (q / qt).ln();
                    }
                }
                k += w * cell;
            }
        }
        k
    }

    /// Exact gradient: analytic for gaussian-mean models, and for categorical kernels
    /// (multilinear in θ) the difference of the kernel at θ_j = 1 and θ_j = 0.
    pub fn gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        if let Some(q) = &self.quadratic {
            return Ok(q.gradient(theta));
        }
        let base = self.pm.kernel_table_unchecked(theta)?;
        let mut grad = vec![0.0; theta.len()];
        let mut probe = theta.to_vec();
        for j in 0..theta.len() {
            probe[j] = 1.0;
            let hi = self.pm.kernel_table_unchecked(&probe)?;
            probe[j] = 0.0;
            let lo = self.pm.kernel_table_unchecked(&probe)?;
            probe[j] = theta[j];
            let mut g = 0.0;
            for (s, row) in self.weights.iter().enumerate() {
                for (x, w) in row.iter().enumerate() {
                    if *w == 0.0 {
                        continue;
                    }
                    for (y, q) in self.objective.probs[s][x].iter().enumerate() {
                        if *q > 0.0 {
                            let d = hi.probs[s][x][y] - lo.probs[s][x][y];
                            if d != 0.0 {
                                g -= w * q * d / base.probs[s][x][y];
                            }
                        }
                    }
                }
            }
            grad[j] = g;
        }
        Ok(grad)
    }
}

/// Weighted Kullback-Leibler divergence of player `player` at (σ, θ).
pub fn wkld(
    game: &ObjectiveGame,
    model: &SubjectiveModel,
    sigma: &StrategyProfile,
    theta: &[f64],
    player: usize,
) -> Result<f64> {
    let pm = PlayerModel::new(game, model, player)?;
    pm.domain().ensure_contains(theta)?;
    Wkld::new(&pm, sigma)?.value(theta)
}
