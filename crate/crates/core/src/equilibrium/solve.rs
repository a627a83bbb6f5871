use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certificate::{EquilibriumCertificate, Rejection, Verdict};
use super::perturbation::{argmax, PerturbationStructure};
use super::verify::{verify_berk_nash, EquilibriumConfig};
use crate::error::{Error, Result};
use crate::game::{ObjectiveGame, StrategyProfile};
use crate::numerics::{project_simplex, solve_linear};
use crate::subjective::{minimize, minimize_from, PlayerModel, SubjectiveModel, Wkld};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomotopyStep {
    pub scale: f64,
    pub residual: f64,
    pub iterations: usize,
    pub strategy: StrategyProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomotopyTrace {
    pub start: String,
    pub steps: Vec<HomotopyStep>,
    /// Richardson extrapolation of the last two scales to scale zero.
    pub extrapolated: StrategyProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub certificates: Vec<EquilibriumCertificate>,
    pub traces: Vec<HomotopyTrace>,
    pub candidates_checked: usize,
    /// Closest misses, smallest violation first.
    pub rejections: Vec<Rejection>,
}

/// Best responses of all players to the K-argmin representative of their minimizer sets.
pub(crate) struct Responder<'a> {
    pms: Vec<PlayerModel<'a>>,
    game: &'a ObjectiveGame,
    cfg: &'a EquilibriumConfig,
    /// Last minimizers per player, reused as seeds along one homotopy path.
    warm: Option<Mutex<Vec<Vec<Vec<f64>>>>>,
}

impl<'a> Responder<'a> {
    pub(crate) fn new(game: &'a ObjectiveGame, models: &'a [SubjectiveModel], cfg: &'a EquilibriumConfig) -> Result<Self> {
        if models.len() != game.n_players() {
            return Err(Error::InvalidModel(format!("{} models for {} players", models.len(), game.n_players())));
        }
        let pms = models
            .iter()
            .enumerate()
            .map(|(i, m)| PlayerModel::new(game, m, i))
            .collect::<Result<_>>()?;
        Ok(Self { pms, game, cfg, warm: None })
    }

    pub(crate) fn warm_started(&self) -> Self {
        Self {
            pms: self.pms.clone(),
            game: self.game,
            cfg: self.cfg,
            warm: Some(Mutex::new(vec![Vec::new(); self.pms.len()])),
        }
    }

    /// Payoff tables `[player][s][x]` under the selected minimizers.
    fn tables(&self, sigma: &StrategyProfile) -> Result<Vec<Vec<Vec<f64>>>> {
        self.pms
            .iter()
            .enumerate()
            .map(|(i, pm)| {
                let w = Wkld::new(pm, sigma)?;
                let ms = match &self.warm {
                    Some(cache) => {
                        let seeds = cache.lock().expect("warm-start cache")[i].clone();
                        let ms = minimize_from(&w, &self.cfg.minimizer, &seeds)?;
                        cache.lock().expect("warm-start cache")[i] = ms.points.clone();
                        ms
                    }
                    None => minimize(&w, &self.cfg.minimizer)?,
                };
                pm.payoff_table_at(ms.representative())
            })
            .collect()
    }

    fn respond(&self, sigma: &StrategyProfile, p: &PerturbationStructure) -> Result<StrategyProfile> {
        let tables = self.tables(sigma)?;
        Ok(StrategyProfile(
            tables
                .iter()
                .map(|t| t.iter().map(|row| p.choice_probabilities(row, self.cfg.n_mc)).collect())
                .collect(),
        ))
    }

    fn dims(&self) -> usize {
        (0..self.game.n_players())
            .map(|i| self.game.signals[i].len() * (self.game.actions[i].len() - 1))
            .sum()
    }
}

fn to_free(sigma: &StrategyProfile) -> Vec<f64> {
    sigma
        .0
        .iter()
        .flatten()
        .flat_map(|row| row[..row.len() - 1].iter().copied())
        .collect()
}

fn from_free(template: &StrategyProfile, v: &[f64]) -> StrategyProfile {
    let mut at = 0;
    StrategyProfile(
        template
            .0
            .iter()
            .map(|rows| {
                rows.iter()
                    .map(|row| {
                        let n = row.len();
                        let mut r: Vec<f64> = v[at..at + n - 1].to_vec();
                        at += n - 1;
                        r.push(1.0 - r.iter().sum::<f64>());
                        if r.iter().any(|x| *x < 0.0) {
                            r = project_simplex(&r);
                        }
                        r
                    })
                    .collect()
            })
            .collect(),
    )
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Perturbed-game fixed point near `start`: bisection in one dimension, otherwise Newton
/// steps with finite-difference Jacobians (small problems) and adaptively damped iteration.
pub(crate) fn perturbed_fixed_point(
    r: &Responder<'_>,
    start: &StrategyProfile,
    p: &PerturbationStructure,
) -> Result<(StrategyProfile, f64, usize)> {
    let cfg = r.cfg;
    let dims = r.dims();
    if dims == 0 {
        return Ok((start.clone(), 0.0, 0));
    }
    let residual = |v: &[f64]| -> Result<(StrategyProfile, Vec<f64>)> {
        let s = from_free(start, v);
        let t = r.respond(&s, p)?;
        let res: Vec<f64> = to_free(&t).iter().zip(to_free(&s)).map(|(a, b)| a - b).collect();
        Ok((s, res))
    };
    if dims == 1 {
        let f = |x: f64| -> Result<f64> { Ok(-residual(&[x])?.1[0]) };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut iterations = 0;
        while hi - lo > 1e-15 && iterations < 200 {
            let mid = 0.5 * (lo + hi);
            if f(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
        }
        let x = 0.5 * (lo + hi);
        let (s, res) = residual(&[x])?;
        return Ok((s, norm_inf(&res), iterations));
    }
    let mut v = to_free(start);
    let (_, mut res) = residual(&v)?;
    let mut damping = cfg.damping;
    let mut iterations = 0;
    while iterations < cfg.max_iterations && norm_inf(&res) > cfg.fixed_point_tol {
        iterations += 1;
        let current = norm_inf(&res);
        let mut moved = false;
        if dims <= cfg.max_polish_dims {
            let h = 1e-8;
            let mut jac = vec![vec![0.0; dims]; dims];
            for j in 0..dims {
                let mut vp = v.clone();
                vp[j] += h;
                let (_, rp) = residual(&vp)?;
                for i in 0..dims {
                    jac[i][j] = (rp[i] - res[i]) / h;
                }
            }
            let rhs: Vec<f64> = res.iter().map(|x| -x).collect();
            if let Some(step) = solve_linear(jac, rhs) {
                let mut lambda = 1.0;
                while lambda > 1e-3 {
                    let cand: Vec<f64> = v.iter().zip(&step).map(|(a, d)| a + lambda * d).collect();
                    let cand = to_free(&from_free(start, &cand));
                    let (_, rc) = residual(&cand)?;
                    if norm_inf(&rc) < current * (1.0 - 1e-4 * lambda) {
                        v = cand;
                        res = rc;
                        moved = true;
                        break;
                    }
                    lambda *= 0.5;
                }
            }
        }
        if !moved {
            while damping > 1e-9 {
                let cand: Vec<f64> = v.iter().zip(&res).map(|(a, d)| a + damping * d).collect();
                let cand = to_free(&from_free(start, &cand));
                let (_, rc) = residual(&cand)?;
                if norm_inf(&rc) < current {
                    v = cand;
                    res = rc;
                    moved = true;
                    damping = (damping * 1.5).min(1.0);
                    break;
                }
                damping *= 0.5;
            }
        }
        if !moved {
            break;
        }
    }
    Ok((from_free(start, &v), norm_inf(&res), iterations))
}

fn scale_ladder(cfg: &EquilibriumConfig) -> Vec<f64> {
    let mut out = Vec::new();
    let mut s = cfg.scale_start;
    while s > cfg.scale_min * (1.0 + 1e-12) {
        out.push(s);
        s /= cfg.scale_factor;
    }
    out.push(cfg.scale_min);
    out
}

fn homotopy(r: &Responder<'_>, name: &str, start: StrategyProfile) -> Result<HomotopyTrace> {
    let r = &r.warm_started();
    let mut sigma = start;
    let mut steps = Vec::new();
    for scale in scale_ladder(r.cfg) {
        let p = PerturbationStructure::new(r.cfg.family, scale)?;
        let (s, residual, iterations) = perturbed_fixed_point(r, &sigma, &p)?;
        sigma = s.clone();
        steps.push(HomotopyStep { scale, residual, iterations, strategy: s });
    }
    let extrapolated = match steps.as_slice() {
        [.., prev, last] => {
            let ratio = prev.scale / last.scale;
            StrategyProfile(
                last.strategy
                    .0
                    .iter()
                    .zip(&prev.strategy.0)
                    .map(|(a, b)| {
                        a.iter()
                            .zip(b)
                            .map(|(ra, rb)| {
                                let row: Vec<f64> = ra
                                    .iter()
                                    .zip(rb)
                                    .map(|(x, y)| ((ratio * x - y) / (ratio - 1.0)).max(0.0))
                                    .collect();
                                let z: f64 = row.iter().sum();
                                row.iter().map(|x| x / z).collect()
                            })
                            .collect()
                    })
                    .collect(),
            )
        }
        [only] => only.strategy.clone(),
        [] => sigma,
    };
    Ok(HomotopyTrace { start: name.to_string(), steps, extrapolated })
}

/// Newton polish of the indifference conditions among supported actions, keeping
/// unsupported actions at zero.
pub(crate) fn polish(r: &Responder<'_>, sigma: &StrategyProfile, support_tol: f64) -> Result<Option<StrategyProfile>> {
    let support: Vec<Vec<Vec<usize>>> = sigma
        .0
        .iter()
        .map(|rows| {
            rows.iter()
                .map(|row| (0..row.len()).filter(|&x| row[x] > support_tol).collect())
                .collect()
        })
        .collect();
    let dims: usize = support.iter().flatten().map(|s| s.len().saturating_sub(1)).sum();
    if dims == 0 {
        return Ok(Some(sigma.clone()));
    }
    if dims > r.cfg.max_polish_dims {
        return Ok(None);
    }
    let build = |v: &[f64]| -> Option<StrategyProfile> {
        let mut at = 0;
        let mut out = sigma.clone();
        for (i, rows) in support.iter().enumerate() {
            for (s, supp) in rows.iter().enumerate() {
                let row = &mut out.0[i][s];
                row.iter_mut().for_each(|x| *x = 0.0);
                let mut rest = 1.0;
                for &x in &supp[1..] {
                    row[x] = v[at];
                    rest -= v[at];
                    at += 1;
                }
                row[supp[0]] = rest;
                if row.iter().any(|x| *x < -1e-12) {
                    return None;
                }
                row.iter_mut().for_each(|x| *x = x.max(0.0));
            }
        }
        Some(out)
    };
    let residual = |v: &[f64]| -> Result<Option<Vec<f64>>> {
        let Some(s) = build(v) else { return Ok(None) };
        let tables = r.tables(&s)?;
        let mut res = Vec::with_capacity(dims);
        for (i, rows) in support.iter().enumerate() {
            for (sg, supp) in rows.iter().enumerate() {
                let u = &tables[i][sg];
                for &x in &supp[1..] {
                    res.push(u[x] - u[supp[0]]);
                }
            }
        }
        Ok(Some(res))
    };
    let mut v: Vec<f64> = support
        .iter()
        .enumerate()
        .flat_map(|(i, rows)| {
            rows.iter()
                .enumerate()
                .flat_map(move |(s, supp)| supp[1..].iter().map(move |&x| sigma.0[i][s][x]))
        })
        .collect();
    let Some(mut res) = residual(&v)? else { return Ok(None) };
    for _ in 0..60 {
        let current = norm_inf(&res);
        if current <= 1e-12 {
            break;
        }
        let h = 1e-7;
        let mut jac = vec![vec![0.0; dims]; dims];
        for j in 0..dims {
            let mut vp = v.clone();
            vp[j] += if vp[j] + h > 1.0 { -h } else { h };
            let step = vp[j] - v[j];
            let Some(rp) = residual(&vp)? else { return Ok(None) };
            for i in 0..dims {
                jac[i][j] = (rp[i] - res[i]) / step;
            }
        }
        let rhs: Vec<f64> = res.iter().map(|x| -x).collect();
        let Some(step) = solve_linear(jac, rhs) else { break };
        let mut lambda = 1.0;
        let mut moved = false;
        while lambda > 1e-4 {
            let cand: Vec<f64> = v.iter().zip(&step).map(|(a, d)| a + lambda * d).collect();
            if let Some(rc) = residual(&cand)? {
                if norm_inf(&rc) < current {
                    v = cand;
                    res = rc;
                    moved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !moved {
            break;
        }
    }
    Ok(build(&v))
}

fn purify(sigma: &StrategyProfile) -> StrategyProfile {
    StrategyProfile(
        sigma
            .0
            .iter()
            .map(|rows| {
                rows.iter()
                    .map(|row| {
                        let mut out = vec![0.0; row.len()];
                        out[argmax(row)] = 1.0;
                        out
                    })
                    .collect()
            })
            .collect(),
    )
}

/// Every combination of nonempty supports, uniform on each support.
fn support_starts(game: &ObjectiveGame, limit: usize) -> Option<Vec<StrategyProfile>> {
    let mut rows: Vec<(usize, usize, usize)> = Vec::new();
    let mut total: f64 = 1.0;
    for i in 0..game.n_players() {
        for s in 0..game.signals[i].len() {
            let n = game.actions[i].len();
            rows.push((i, s, n));
            total *= (2f64).powi(n as i32) - 1.0;
        }
    }
    if total > limit as f64 {
        return None;
    }
    let mut out = Vec::new();
    let template = StrategyProfile::uniform(game);
    for mut code in 0..total as usize {
        let mut sigma = template.clone();
        for &(i, s, n) in &rows {
            let m = (1usize << n) - 1;
            let mask = code % m + 1;
            code /= m;
            let k = mask.count_ones() as f64;
            sigma.0[i][s] = (0..n).map(|x| if mask >> x & 1 == 1 { 1.0 / k } else { 0.0 }).collect();
        }
        out.push(sigma);
    }
    Some(out)
}

/// Lattice over a single agent's strategies with at most three actions and one signal.
fn strategy_grid(game: &ObjectiveGame, points: usize, limit: usize) -> Vec<StrategyProfile> {
    if game.n_players() != 1 || game.signals[0].len() != 1 || game.actions[0].len() > 3 {
        return Vec::new();
    }
    let n = game.actions[0].len();
    let mut res = points.max(2) - 1;
    let count = |r: usize| if n == 2 { r + 1 } else { (r + 1) * (r + 2) / 2 };
    while res > 1 && count(res) > limit {
        res -= 1;
    }
    let mut out = Vec::new();
    if n == 2 {
        for k in 0..=res {
            let p = k as f64 / res as f64;
            out.push(StrategyProfile::single(vec![1.0 - p, p]));
        }
    } else if n == 3 {
        for a in 0..=res {
            for b in 0..=res - a {
                let (pa, pb) = (a as f64 / res as f64, b as f64 / res as f64);
                out.push(StrategyProfile::single(vec![pa, pb, (1.0 - pa - pb).max(0.0)]));
            }
        }
    }
    out
}

/// Searches for Berk-Nash equilibria: a homotopy along vanishing payoff perturbations
/// from several starts, support enumeration on small games and a direct strategy grid for
/// small single-agent problems; every candidate is polished and then verified.
pub fn solve(game: &ObjectiveGame, models: &[SubjectiveModel], cfg: &EquilibriumConfig) -> Result<SolveOutcome> {
    crate::game::ensure_valid(game)?;
    let r = Responder::new(game, models, cfg)?;
    let mut starts = vec![("uniform".to_string(), StrategyProfile::uniform(game))];
    if game.n_action_profiles() <= cfg.max_pure_profiles && game.n_action_profiles() > 1 {
        for k in 0..game.n_action_profiles() {
            let a = game.action_profile(k);
            let mut s = StrategyProfile::pure(game, &a);
            // lean towards the pure profile without leaving the interior
            for rows in s.0.iter_mut() {
                for row in rows.iter_mut() {
                    let n = row.len() as f64;
                    row.iter_mut().for_each(|x| *x = 0.8 * *x + 0.2 / n);
                }
            }
            starts.push((format!("near-pure {a:?}"), s));
        }
    }
    let traces: Vec<HomotopyTrace> = starts
        .into_par_iter()
        .map(|(name, s)| homotopy(&r, &name, s))
        .collect::<Result<_>>()?;

    let mut candidates: Vec<StrategyProfile> = Vec::new();
    for t in &traces {
        let limit = &t.extrapolated;
        let cleaned = StrategyProfile(
            limit
                .0
                .iter()
                .map(|rows| {
                    rows.iter()
                        .map(|row| {
                            let r: Vec<f64> = row.iter().map(|x| if *x < 1e-6 { 0.0 } else { *x }).collect();
                            let z: f64 = r.iter().sum();
                            r.iter().map(|x| x / z).collect()
                        })
                        .collect()
                })
                .collect(),
        );
        candidates.push(cleaned);
        candidates.push(purify(limit));
        if game.n_players() == 1 && game.signals[0].len() == 1 {
            // a few of the most likely pure actions
            let row = &limit.0[0][0];
            let mut order: Vec<usize> = (0..row.len()).collect();
            order.sort_by(|a, b| row[*b].total_cmp(&row[*a]));
            for &x in order.iter().take(3) {
                candidates.push(StrategyProfile::pure(game, &[x]));
            }
        }
    }
    if let Some(sup) = support_starts(game, cfg.max_pure_profiles) {
        candidates.extend(sup);
    }
    candidates.extend(strategy_grid(game, cfg.grid_points, cfg.max_grid_candidates));

    let verdicts: Vec<Verdict> = candidates
        .par_iter()
        .map(|c| -> Result<Verdict> {
            let polished = polish(&r.warm_started(), c, cfg.support_tol)?;
            let cand = polished.unwrap_or_else(|| c.clone());
            let v = verify_berk_nash(game, models, &cand, None, cfg)?;
            if !v.is_accepted() && cand != *c {
                return verify_berk_nash(game, models, c, None, cfg);
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;

    let mut certificates: Vec<EquilibriumCertificate> = Vec::new();
    let mut rejections = Vec::new();
    for v in verdicts {
        match v {
            Verdict::Accepted(c) => {
                if certificates.iter().all(|k| k.strategy.distance(&c.strategy) >= 1e-4) {
                    certificates.push(c);
                }
            }
            Verdict::Rejected(rj) => rejections.push(rj),
        }
    }
    rejections.sort_by(|a, b| a.violation.total_cmp(&b.violation));
    rejections.dedup();
    rejections.truncate(5);
    Ok(SolveOutcome { certificates, traces, candidates_checked: candidates.len(), rejections })
}

/// Fixed point of the perturbed game nearest to `start` (Newton or damped iteration).
pub fn perturbed_equilibrium(
    game: &ObjectiveGame,
    models: &[SubjectiveModel],
    start: &StrategyProfile,
    perturbation: &PerturbationStructure,
    cfg: &EquilibriumConfig,
) -> Result<(StrategyProfile, f64)> {
    start.validate(game)?;
    let r = Responder::new(game, models, cfg)?;
    let (s, res, _) = perturbed_fixed_point(&r, start, perturbation)?;
    Ok((s, res))
}
