use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A belief over a player's parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Belief {
    Atoms { points: Vec<Vec<f64>>, weights: Vec<f64> },
    /// Normal belief about a scalar parameter.
    Normal { mean: f64, variance: f64 },
}

impl Belief {
    pub fn point(theta: Vec<f64>) -> Self {
        Self::Atoms { points: vec![theta], weights: vec![1.0] }
    }

    pub fn uniform(points: Vec<Vec<f64>>) -> Self {
        let n = points.len();
        Self::Atoms { points, weights: vec![1.0 / n as f64; n] }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Atoms { points, weights } => {
                if points.is_empty() || points.len() != weights.len() {
                    return Err(Error::InvalidBelief("atoms and weights must be nonempty and aligned".into()));
                }
                if weights.iter().any(|w| !(*w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidBelief("weights must be a probability vector".into()));
                }
            }
            Self::Normal { mean, variance } => {
                if !mean.is_finite() || !(*variance > 0.0 && variance.is_finite()) {
                    return Err(Error::InvalidBelief("conjugate state needs a finite mean and positive variance".into()));
                }
            }
        }
        Ok(())
    }

    /// Posterior mean of the parameter.
    pub fn mean(&self) -> Vec<f64> {
        match self {
            Self::Atoms { points, weights } => {
                let mut out = vec![0.0; points[0].len()];
                for (p, w) in points.iter().zip(weights) {
                    for (o, v) in out.iter_mut().zip(p) {
                        *o += w * v;
                    }
                }
                out
            }
            Self::Normal { mean, .. } => vec![*mean],
        }
    }
}
