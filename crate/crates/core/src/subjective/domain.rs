use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::project_simplex;

/// Where a player's parameter lives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParameterDomain {
    Points { points: Vec<Vec<f64>> },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Product of probability simplices of the given sizes, concatenated.
    Simplices { sizes: Vec<usize> },
}

const MEMBERSHIP_TOL: f64 = 1e-9;

impl ParameterDomain {
    pub fn dim(&self) -> usize {
        match self {
            Self::Points { points } => points.first().map_or(0, Vec::len),
            Self::Box { lower, .. } => lower.len(),
            Self::Simplices { sizes } => sizes.iter().sum(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Points { .. })
    }

    pub fn check(&self) -> Result<()> {
        match self {
            Self::Points { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidModel("empty parameter set".into()));
                }
                let d = points[0].len();
                if points.iter().any(|p| p.len() != d || p.iter().any(|v| !v.is_finite())) {
                    return Err(Error::InvalidModel("parameter points have mixed dimension".into()));
                }
            }
            Self::Box { lower, upper } => {
                if lower.len() != upper.len() || lower.is_empty() {
                    return Err(Error::InvalidModel("box bounds have mismatched dimension".into()));
                }
                for (l, u) in lower.iter().zip(upper) {
                    if !(l.is_finite() && u.is_finite() && l <= u) {
                        return Err(Error::InvalidModel(format!("box axis [{l}, {u}] is not compact")));
                    }
                }
            }
            Self::Simplices { sizes } => {
                if sizes.is_empty() || sizes.contains(&0) {
                    return Err(Error::InvalidModel("simplex sizes must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// Index of a finite-domain point matching `theta`.
    pub fn point_index(&self, theta: &[f64]) -> Option<usize> {
        match self {
            Self::Points { points } => points.iter().position(|p| {
                p.len() == theta.len() && p.iter().zip(theta).all(|(a, b)| (a - b).abs() <= 1e-12)
            }),
            _ => None,
        }
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        if theta.len() != self.dim() {
            return false;
        }
        match self {
            Self::Points { .. } => self.point_index(theta).is_some(),
            Self::Box { lower, upper } => theta
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(t, (l, u))| *t >= l - MEMBERSHIP_TOL && *t <= u + MEMBERSHIP_TOL),
            Self::Simplices { sizes } => {
                let mut at = 0;
                for &n in sizes {
                    let block = &theta[at..at + n];
                    at += n;
                    if block.iter().any(|v| *v < -MEMBERSHIP_TOL)
                        || (block.iter().sum::<f64>() - 1.0).abs() > MEMBERSHIP_TOL
                    {
                        return false;
                    }
                }
                true
            }
        }
    }

    pub fn ensure_contains(&self, theta: &[f64]) -> Result<()> {
        if self.contains(theta) {
            Ok(())
        } else {
            Err(Error::OutsideDomain { theta: theta.to_vec() })
        }
    }

    pub fn project(&self, theta: &[f64]) -> Vec<f64> {
        match self {
            Self::Points { points } => points
                .iter()
                .min_by(|a, b| {
                    crate::numerics::euclid(a, theta).total_cmp(&crate::numerics::euclid(b, theta))
                })
                .cloned()
                .unwrap_or_default(),
            Self::Box { lower, upper } => theta
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(t, (l, u))| t.clamp(*l, *u))
                .collect(),
            Self::Simplices { sizes } => {
                let mut out = Vec::with_capacity(theta.len());
                let mut at = 0;
                for &n in sizes {
                    out.extend(project_simplex(&theta[at..at + n]));
                    at += n;
                }
                out
            }
        }
    }

    /// Starting points for multi-start minimization.
    pub fn seeds(&self, grid: usize, max_seeds: usize) -> Vec<Vec<f64>> {
        match self {
            Self::Points { points } => points.clone(),
            Self::Box { lower, upper } => {
                let d = lower.len();
                let g = grid.max(2);
                let total = (g as f64).powi(d as i32);
                if total <= max_seeds as f64 {
                    let n = g.pow(d as u32);
                    (0..n)
                        .map(|mut k| {
                            (0..d)
                                .map(|axis| {
                                    let step = k % g;
                                    k /= g;
                                    lower[axis] + (upper[axis] - lower[axis]) * step as f64 / (g - 1) as f64
                                })
                                .collect()
                        })
                        .collect()
                } else {
                    (1..=max_seeds as u64)
                        .map(|i| {
                            crate::numerics::halton(i, d)
                                .iter()
                                .enumerate()
                                .map(|(a, u)| lower[a] + (upper[a] - lower[a]) * u)
                                .collect()
                        })
                        .collect()
                }
            }
            Self::Simplices { sizes } => {
                // barycentre plus a point leaning towards each vertex, per block
                let blocks: Vec<Vec<Vec<f64>>> = sizes
                    .iter()
                    .map(|&n| {
                        let mut pts = vec![vec![1.0 / n as f64; n]];
                        if n > 1 {
                            let lean = 0.1 / (n - 1) as f64;
                            for v in 0..n {
                                let mut p = vec![lean; n];
                                p[v] = 0.9;
                                pts.push(p);
                            }
                        }
                        pts
                    })
                    .collect();
                let total: f64 = blocks.iter().map(|b| b.len() as f64).product();
                let count = if total <= max_seeds as f64 { total as usize } else { max_seeds };
                let stride = if total <= max_seeds as f64 { 1 } else { (total as usize / max_seeds).max(1) };
                (0..count)
                    .map(|c| {
                        let mut k = c * stride;
                        let mut out = Vec::new();
                        for b in &blocks {
                            out.extend_from_slice(&b[k % b.len()]);
                            k /= b.len();
                        }
                        out
                    })
                    .collect()
            }
        }
    }

    /// Whether `theta` sits on the boundary of the domain.
    pub fn on_boundary(&self, theta: &[f64]) -> bool {
        match self {
            Self::Points { .. } => true,
            Self::Box { lower, upper } => theta
                .iter()
                .zip(lower.iter().zip(upper))
                .any(|(t, (l, u))| (t - l).abs() <= 1e-9 || (t - u).abs() <= 1e-9),
            Self::Simplices { .. } => theta.iter().any(|t| t.abs() <= 1e-9),
        }
    }
}
