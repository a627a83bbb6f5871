use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::euclid;
use crate::subjective::{Belief, PlayerModel, SubjectiveModel};

/// Log weights at or below this (relative to the largest) are floored to exact zero.
pub const LOG_FLOOR: f64 = -700.0;

/// Posterior over a fixed grid of parameter points, stored as log weights whose maximum is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridBelief {
    pub points: Vec<Vec<f64>>,
    pub log_weights: Vec<f64>,
}

/// Normal posterior about a scalar parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugateNormalBelief {
    pub mean: f64,
    pub variance: f64,
}

/// What a player sees after acting: the consequence and, for gaussian-mean models, the
/// real outcome attached to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub consequence: usize,
    pub outcome: Option<f64>,
}

impl GridBelief {
    pub fn new(points: Vec<Vec<f64>>, weights: &[f64]) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidBelief("grid points and weights must be nonempty and aligned".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) || weights.iter().all(|w| *w == 0.0) {
            return Err(Error::InvalidBelief("grid weights must be nonnegative with positive total".into()));
        }
        let mut b = Self { points, log_weights: weights.iter().map(|w| w.ln()).collect() };
        b.normalize();
        Ok(b)
    }

    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        Self::new(points, &vec![1.0; n])
    }

    fn normalize(&mut self) -> bool {
        let top = self.log_weights.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
        if top == f64::NEG_INFINITY || top.is_nan() {
            return false;
        }
        for lw in self.log_weights.iter_mut() {
            *lw -= top;
            if *lw <= LOG_FLOOR {
                *lw = f64::NEG_INFINITY;
            }
        }
        true
    }

    /// Adds log likelihoods; returns `false`, leaving the belief untouched, when every
    /// atom gives the observation zero likelihood.
    pub fn absorb(&mut self, log_likelihoods: &[f64]) -> bool {
        let next: Vec<f64> = self.log_weights.iter().zip(log_likelihoods).map(|(w, l)| w + l).collect();
        if next.iter().all(|v| *v == f64::NEG_INFINITY || v.is_nan()) {
            return false;
        }
        let saved = std::mem::replace(&mut self.log_weights, next);
        if !self.normalize() {
            self.log_weights = saved;
            return false;
        }
        true
    }

    pub fn weights(&self) -> Vec<f64> {
        let raw: Vec<f64> = self.log_weights.iter().map(|l| l.exp()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }

    pub fn to_belief(&self) -> Belief {
        Belief::Atoms { points: self.points.clone(), weights: self.weights() }
    }

    pub fn mean(&self) -> Vec<f64> {
        self.to_belief().mean()
    }

    /// Posterior mass within Euclidean distance `radius` of any of `centers`.
    pub fn mass_within(&self, centers: &[Vec<f64>], radius: f64) -> f64 {
        self.weights()
            .iter()
            .zip(&self.points)
            .filter(|(_, p)| centers.iter().any(|c| euclid(c, p) <= radius))
            .map(|(w, _)| w)
            .sum()
    }
}

impl ConjugateNormalBelief {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        let b = Self { mean, variance };
        b.to_belief().validate()?;
        Ok(b)
    }

    pub fn to_belief(&self) -> Belief {
        Belief::Normal { mean: self.mean, variance: self.variance }
    }

    /// Posterior after observing `r ~ N(offset + feature·θ, 1)`.
    pub fn observe(&self, offset: f64, feature: f64, r: f64) -> Self {
        let precision = 1.0 / self.variance + feature * feature;
        Self {
            mean: (self.mean / self.variance + feature * (r - offset)) / precision,
            variance: 1.0 / precision,
        }
    }

    /// Posterior mass within `radius` of any of `centers`.
    pub fn mass_within(&self, centers: &[Vec<f64>], radius: f64) -> f64 {
        let sd = self.variance.sqrt();
        let mut intervals: Vec<(f64, f64)> = centers.iter().map(|c| (c[0] - radius, c[0] + radius)).collect();
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut mass = 0.0;
        let mut covered = f64::NEG_INFINITY;
        for (lo, hi) in intervals {
            let lo = lo.max(covered);
            if hi > lo {
                mass += crate::numerics::normal_cdf((hi - self.mean) / sd) - crate::numerics::normal_cdf((lo - self.mean) / sd);
                covered = hi;
            }
        }
        mass
    }
}

/// Updates the demand-slope belief after selling `y` units at price `x` when the
/// intercept is known to be `a`: `y ~ N(a − xθ, 1)`.
pub fn conjugate_update(belief: &ConjugateNormalBelief, x: f64, y: f64, a: f64) -> Result<ConjugateNormalBelief> {
    if x == 0.0 {
        return Err(Error::InvalidAction("price zero carries no information about the slope".into()));
    }
    Ok(belief.observe(a, -x, y))
}

/// Log likelihood of the observation under every grid atom.
pub(crate) fn log_likelihoods(pm: &PlayerModel<'_>, points: &[Vec<f64>], s: usize, x: usize, obs: &Observation) -> Result<Vec<f64>> {
    match pm.model {
        SubjectiveModel::Categorical(_) => points
            .iter()
            .map(|p| Ok(pm.kernel_table(p)?.probs[s][x][obs.consequence].ln()))
            .collect(),
        SubjectiveModel::GaussianMean(g) => {
            let r = obs
                .outcome
                .ok_or_else(|| Error::InvalidBelief("gaussian-mean updates need the real outcome".into()))?;
            let cell = &g.cells[x][obs.consequence];
            Ok(points.iter().map(|p| -0.5 * (r - cell.mean(p)).powi(2)).collect())
        }
    }
}

/// Bayesian update of a grid belief.
pub fn bayes_update(pm: &PlayerModel<'_>, belief: &GridBelief, s: usize, x: usize, obs: &Observation) -> Result<GridBelief> {
    if s >= pm.n_signals() || x >= pm.n_actions() || obs.consequence >= pm.game.consequences[pm.player].len() {
        return Err(Error::InvalidProfile("signal, action or consequence out of range".into()));
    }
    let ll = log_likelihoods(pm, &belief.points, s, x, obs)?;
    let mut next = belief.clone();
    if !next.absorb(&ll) {
        return Err(Error::ImpossibleObservation { signal: s, action: x, period: None });
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_update_by_hand() {
        let b = ConjugateNormalBelief::new(3.0, 1.0).unwrap();
        let n = conjugate_update(&b, 10.0, 2.0, 40.0).unwrap();
        assert!((n.mean - (3.0 + 0.8 * 100.0 / 101.0)).abs() < 1e-12);
        assert!((n.variance - 1.0 / 101.0).abs() < 1e-15);
        assert!(matches!(conjugate_update(&b, 0.0, 2.0, 40.0), Err(Error::InvalidAction(_))));
    }

    #[test]
    fn dogmatic_prior_does_not_move() {
        let b = ConjugateNormalBelief::new(3.0, 1e-14).unwrap();
        let n = conjugate_update(&b, 10.0, -100.0, 40.0).unwrap();
        assert!((n.mean - 3.0).abs() < 1e-9);
    }

    #[test]
    fn floor_zeroes_tiny_weights() {
        let mut g = GridBelief::uniform(vec![vec![0.0], vec![1.0]]).unwrap();
        assert!(g.absorb(&[0.0, -800.0]));
        assert_eq!(g.weights(), vec![1.0, 0.0]);
        assert!(!g.absorb(&[f64::NEG_INFINITY, 0.0]));
        assert_eq!(g.weights(), vec![1.0, 0.0]);
    }
}
