use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::domain::ParameterDomain;
use super::model::{PlayerModel, SubjectiveModel};
use super::wkld::{Quadratic, Wkld};
use crate::error::{Error, Result};
use crate::game::{ObjectiveGame, StrategyProfile};
use crate::numerics::{euclid, solve_linear};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizerConfig {
    /// Seeds per axis on box domains.
    pub grid: usize,
    pub max_seeds: usize,
    pub iterations: usize,
    pub tol_k: f64,
    pub tol_grad: f64,
    pub cluster_radius: f64,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        Self { grid: 21, max_seeds: 2048, iterations: 200, tol_k: 1e-9, tol_grad: 1e-7, cluster_radius: 1e-4 }
    }
}

/// Closest parameter values, clustered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizerSet {
    /// Cluster representatives, ordered by K then lexicographically.
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub minimum: f64,
    pub cluster_radius: f64,
    /// Set when the minimizers look like a continuum (the midpoint of the two farthest
    /// representatives also attains the minimum).
    pub segment: bool,
}

impl MinimizerSet {
    pub fn representative(&self) -> &[f64] {
        &self.points[0]
    }
}

struct Terminal {
    theta: Vec<f64>,
    k: f64,
}

fn projected_gradient_norm(domain: &ParameterDomain, theta: &[f64], grad: &[f64]) -> f64 {
    let stepped: Vec<f64> = theta.iter().zip(grad).map(|(t, g)| t - g).collect();
    let p = domain.project(&stepped);
    crate::numerics::max_abs_diff(&p, theta)
}

/// Spectral projected gradient with Armijo backtracking from one seed.
fn descend(w: &Wkld<'_, '_>, seed: &[f64], cfg: &MinimizerConfig) -> Result<Terminal> {
    let domain = w.player_model().domain();
    let mut x = domain.project(seed);
    let mut f = w.value(&x)?;
    if !f.is_finite() {
        return Ok(Terminal { theta: x, k: f });
    }
    let mut g = w.gradient(&x)?;
    let mut alpha = 1.0 / g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for _ in 0..cfg.iterations {
        if projected_gradient_norm(domain, &x, &g) <= cfg.tol_grad {
            break;
        }
        let trial: Vec<f64> = x.iter().zip(&g).map(|(t, gi)| t - alpha * gi).collect();
        let d: Vec<f64> = domain.project(&trial).iter().zip(&x).map(|(p, t)| p - t).collect();
        let slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        if slope >= 0.0 {
            break;
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let cand: Vec<f64> = x.iter().zip(&d).map(|(t, di)| t + lambda * di).collect();
            let fc = w.value(&cand)?;
            if fc.is_finite() && fc <= f + 1e-4 * lambda * slope {
                accepted = Some((cand, fc));
                break;
            }
            lambda *= 0.5;
        }
        let Some((xn, fnew)) = accepted else { break };
        let gn = w.gradient(&xn)?;
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&yv).map(|(a, b)| a * b).sum();
        let ss: f64 = s.iter().map(|a| a * a).sum();
        alpha = if sy > 1e-300 { (ss / sy).clamp(1e-12, 1e12) } else { 1e4 };
        x = xn;
        f = fnew;
        g = gn;
    }
    Ok(Terminal { theta: x, k: f })
}

/// Exact minimizer of a quadratic on a box given the active set at a nearby point.
fn polish_quadratic(q: &Quadratic, domain: &ParameterDomain, near: &[f64]) -> Option<Vec<f64>> {
    let ParameterDomain::Box { lower, upper } = domain else { return None };
    let d = near.len();
    let g = q.gradient(near);
    let mut fixed = vec![None; d];
    for i in 0..d {
        if (near[i] - lower[i]).abs() <= 1e-7 && g[i] >= 0.0 {
            fixed[i] = Some(lower[i]);
        } else if (near[i] - upper[i]).abs() <= 1e-7 && g[i] <= 0.0 {
            fixed[i] = Some(upper[i]);
        }
    }
    let free: Vec<usize> = (0..d).filter(|&i| fixed[i].is_none()).collect();
    let mut theta: Vec<f64> = (0..d).map(|i| fixed[i].unwrap_or(near[i])).collect();
    if !free.is_empty() {
        let a: Vec<Vec<f64>> = free.iter().map(|&i| free.iter().map(|&j| q.h[i][j]).collect()).collect();
        let rhs: Vec<f64> = free
            .iter()
            .map(|&i| q.b[i] - (0..d).filter_map(|j| fixed[j].map(|v| q.h[i][j] * v)).sum::<f64>())
            .collect();
        let sol = solve_linear(a, rhs)?;
        for (k, &i) in free.iter().enumerate() {
            theta[i] = sol[k];
        }
    }
    let inside = theta.iter().zip(lower.iter().zip(upper)).all(|(t, (l, u))| *t >= *l - 1e-12 && *t <= *u + 1e-12);
    if !inside {
        return None;
    }
    let theta = domain.project(&theta);
    let g = q.gradient(&theta);
    let kkt = (0..d).all(|i| {
        if (theta[i] - lower[i]).abs() <= 1e-12 {
            g[i] >= -1e-9
        } else if (theta[i] - upper[i]).abs() <= 1e-12 {
            g[i] <= 1e-9
        } else {
            g[i].abs() <= 1e-8 * (1.0 + q.b.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        }
    });
    kkt.then_some(theta)
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Minimizer set of a prepared divergence.
pub fn minimize(w: &Wkld<'_, '_>, cfg: &MinimizerConfig) -> Result<MinimizerSet> {
    minimize_seeded(w, cfg, None)
}

/// Like [`minimize`] on continuous domains but descending only from `seeds` and the
/// domain's first default seed. Suited to tracking minimizers along a path.
pub fn minimize_from(w: &Wkld<'_, '_>, cfg: &MinimizerConfig, seeds: &[Vec<f64>]) -> Result<MinimizerSet> {
    minimize_seeded(w, cfg, Some(seeds))
}

fn minimize_seeded(w: &Wkld<'_, '_>, cfg: &MinimizerConfig, warm: Option<&[Vec<f64>]>) -> Result<MinimizerSet> {
    let pm = w.player_model();
    let domain = pm.domain();
    let mut terminals: Vec<Terminal> = match domain {
        ParameterDomain::Points { points } => points
            .iter()
            .map(|p| Ok(Terminal { theta: p.clone(), k: w.value(p)? }))
            .collect::<Result<_>>()?,
        _ => {
            let seeds = match warm {
                Some(w) if !w.is_empty() => {
                    let mut s = w.to_vec();
                    s.extend(domain.seeds(cfg.grid, 1));
                    s
                }
                _ => domain.seeds(cfg.grid, cfg.max_seeds),
            };
            let mut ts: Vec<Terminal> = seeds
                .par_iter()
                .map(|s| descend(w, s, cfg))
                .collect::<Result<Vec<_>>>()?;
            if let Some(q) = w.quadratic() {
                for t in ts.iter_mut() {
                    if let Some(exact) = polish_quadratic(q, domain, &t.theta) {
                        let k = q.value(&exact).max(0.0);
                        if k <= t.k + 1e-12 {
                            t.theta = exact;
                            t.k = k;
                        }
                    }
                }
            }
            ts
        }
    };
    terminals.retain(|t| t.k.is_finite());
    if terminals.is_empty() {
        return Err(Error::InfeasibleModel { player: pm.player });
    }
    terminals.sort_by(|a, b| a.k.total_cmp(&b.k).then_with(|| lexicographic(&a.theta, &b.theta)));
    let best = terminals[0].k;
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut values = Vec::new();
    for t in terminals.iter().filter(|t| t.k <= best + cfg.tol_k) {
        if points.iter().all(|p| euclid(p, &t.theta) > cfg.cluster_radius) {
            points.push(t.theta.clone());
            values.push(t.k);
        }
    }
    let segment = if points.len() >= 2 && !domain.is_finite() {
        let mut far = (0, 1, 0.0);
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let d = euclid(&points[i], &points[j]);
                if d > far.2 {
                    far = (i, j, d);
                }
            }
        }
        let mid: Vec<f64> = points[far.0].iter().zip(&points[far.1]).map(|(a, b)| 0.5 * (a + b)).collect();
        w.value(&mid)? <= best + cfg.tol_k
    } else {
        false
    };
    Ok(MinimizerSet { points, values, minimum: best, cluster_radius: cfg.cluster_radius, segment })
}

pub fn minimizer_set(
    game: &ObjectiveGame,
    model: &SubjectiveModel,
    sigma: &StrategyProfile,
    player: usize,
    cfg: &MinimizerConfig,
) -> Result<MinimizerSet> {
    let pm = PlayerModel::new(game, model, player)?;
    let w = Wkld::new(&pm, sigma)?;
    minimize(&w, cfg)
}
