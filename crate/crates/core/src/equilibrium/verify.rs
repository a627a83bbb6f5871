use serde::{Deserialize, Serialize};

use super::certificate::{EquilibriumCertificate, OptimalityGap, PlayerSupport, Rejection, Verdict};
use super::perturbation::{PerturbationFamily, PerturbationStructure};
use crate::error::Result;
use crate::game::{ObjectiveGame, StrategyProfile};
use crate::numerics::euclid;
use crate::subjective::{minimize, Belief, MinimizerConfig, PlayerModel, SubjectiveModel, Wkld};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumConfig {
    pub minimizer: MinimizerConfig,
    /// Largest tolerated optimality violation, in payoff units.
    pub tol_opt: f64,
    pub tie_tol: f64,
    /// Probabilities above this count as supported.
    pub support_tol: f64,
    /// Largest tolerated |σ − perturbed response| when verifying perturbed equilibria.
    pub tol_strategy: f64,
    pub n_mc: usize,
    pub family: PerturbationFamily,
    pub scale_start: f64,
    pub scale_min: f64,
    pub scale_factor: f64,
    pub damping: f64,
    pub max_iterations: usize,
    pub fixed_point_tol: f64,
    /// Points per axis of the direct grid over strategies.
    pub grid_points: usize,
    pub max_grid_candidates: usize,
    pub max_pure_profiles: usize,
    pub max_polish_dims: usize,
    pub max_belief_atoms: usize,
}

impl Default for EquilibriumConfig {
    fn default() -> Self {
        Self {
            minimizer: MinimizerConfig::default(),
            tol_opt: 1e-6,
            tie_tol: 1e-9,
            support_tol: 1e-9,
            tol_strategy: 1e-6,
            n_mc: 4096,
            family: PerturbationFamily::Logistic,
            scale_start: 0.05,
            scale_min: 1e-4,
            scale_factor: 4.0,
            damping: 0.5,
            max_iterations: 400,
            fixed_point_tol: 1e-11,
            grid_points: 21,
            max_grid_candidates: 500,
            max_pure_profiles: 64,
            max_polish_dims: 12,
            max_belief_atoms: 12,
        }
    }
}

/// What a belief must achieve for one player.
enum Target<'p> {
    /// Supported actions optimal.
    Optimal,
    /// σ equals the perturbed response.
    Perturbed(&'p PerturbationStructure, usize),
}

struct Search<'a> {
    tables: Vec<Vec<Vec<f64>>>,
    sigma: &'a [Vec<f64>],
    support_tol: f64,
    target: Target<'a>,
}

impl Search<'_> {
    fn mix(&self, w: &[f64]) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.sigma[0].len()]; self.sigma.len()];
        for (t, wk) in self.tables.iter().zip(w) {
            if *wk == 0.0 {
                continue;
            }
            for (o, r) in out.iter_mut().zip(t) {
                for (a, b) in o.iter_mut().zip(r) {
                    *a += wk * b;
                }
            }
        }
        out
    }

    /// Worst violation under weights `w` and its witness (signal, action).
    fn violation(&self, w: &[f64]) -> (f64, usize, usize) {
        let u = self.mix(w);
        let mut worst = (0.0, 0, 0);
        for (s, row) in u.iter().enumerate() {
            match &self.target {
                Target::Optimal => {
                    let best = row.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
                    for (x, v) in row.iter().enumerate() {
                        if self.sigma[s][x] > self.support_tol && best - v > worst.0 {
                            worst = (best - v, s, x);
                        }
                    }
                }
                Target::Perturbed(p, n_mc) => {
                    let psi = p.choice_probabilities(row, *n_mc);
                    for (x, q) in psi.iter().enumerate() {
                        let d = (self.sigma[s][x] - q).abs();
                        if d > worst.0 {
                            worst = (d, s, x);
                        }
                    }
                }
            }
        }
        worst
    }

    /// Exact minimum over the segment between atoms `k` (weight t) and `l` when the
    /// violation is a maximum of few affine functions of t.
    fn exact_pair(&self, k: usize, l: usize, limit: usize) -> Option<f64> {
        if !matches!(self.target, Target::Optimal) {
            return None;
        }
        let (uk, ul) = (&self.tables[k], &self.tables[l]);
        let mut lines = vec![(0.0, 0.0)];
        for (s, row) in self.sigma.iter().enumerate() {
            for (x, p) in row.iter().enumerate() {
                if *p <= self.support_tol {
                    continue;
                }
                for x2 in 0..row.len() {
                    if x2 == x {
                        continue;
                    }
                    let base = ul[s][x2] - ul[s][x];
                    let slope = (uk[s][x2] - uk[s][x]) - base;
                    lines.push((base, slope));
                    if lines.len() > limit {
                        return None;
                    }
                }
            }
        }
        let eval = |t: f64| lines.iter().fold(f64::NEG_INFINITY, |m, (a, b)| m.max(a + b * t));
        let mut best_t = 0.0;
        let mut best_v = eval(0.0);
        let mut consider = |t: f64| {
            if (0.0..=1.0).contains(&t) {
                let v = eval(t);
                if v < best_v {
                    best_v = v;
                    best_t = t;
                }
            }
        };
        consider(1.0);
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let ds = lines[i].1 - lines[j].1;
                if ds != 0.0 {
                    consider((lines[j].0 - lines[i].0) / ds);
                }
            }
        }
        Some(best_t)
    }

    /// Best point on `w + t·dir` for t in [lo, hi]: coarse grid then golden section.
    fn line_search(&self, w: &[f64], dir: &[f64], lo: f64, hi: f64) -> (f64, f64) {
        let at = |t: f64| {
            let p: Vec<f64> = w.iter().zip(dir).map(|(a, d)| (a + t * d).max(0.0)).collect();
            self.violation(&p).0
        };
        let n = 40;
        let mut best = (lo, at(lo));
        for i in 1..=n {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            let v = at(t);
            if v < best.1 {
                best = (t, v);
            }
        }
        let h = (hi - lo) / n as f64;
        let (mut a, mut b) = ((best.0 - h).max(lo), (best.0 + h).min(hi));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (at(c), at(d));
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = at(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = at(d);
            }
        }
        for (t, v) in [(c, fc), (d, fd)] {
            if v < best.1 {
                best = (t, v);
            }
        }
        best
    }

    /// Weights over the atoms minimising the worst violation.
    fn run(&self, exact_limit: usize) -> (Vec<f64>, (f64, usize, usize)) {
        let n = self.tables.len();
        let unit = |k: usize| {
            let mut w = vec![0.0; n];
            w[k] = 1.0;
            w
        };
        let mut best_w = unit(0);
        let mut best = self.violation(&best_w);
        let done = |v: f64| v <= 0.0;
        for k in 1..n {
            let w = unit(k);
            let v = self.violation(&w);
            if v.0 < best.0 {
                best = v;
                best_w = w;
            }
        }
        if done(best.0) || n == 1 {
            return (best_w, best);
        }
        for k in 0..n {
            for l in k + 1..n {
                let t = match self.exact_pair(k, l, exact_limit) {
                    Some(t) => t,
                    None => {
                        let mut w = unit(l);
                        let mut dir = vec![0.0; n];
                        dir[k] = 1.0;
                        dir[l] = -1.0;
                        w[l] = 1.0;
                        self.line_search(&w, &dir, 0.0, 1.0).0
                    }
                };
                let mut w = vec![0.0; n];
                w[k] = t;
                w[l] = 1.0 - t;
                let v = self.violation(&w);
                if v.0 < best.0 {
                    best = v;
                    best_w = w;
                }
            }
        }
        if n > 2 && !done(best.0) {
            for _ in 0..20 {
                let mut improved = false;
                for k in 0..n {
                    for l in 0..n {
                        if k == l || best_w[l] == 0.0 {
                            continue;
                        }
                        let mut dir = vec![0.0; n];
                        dir[k] = 1.0;
                        dir[l] = -1.0;
                        let (t, v) = self.line_search(&best_w, &dir, 0.0, best_w[l]);
                        if v < best.0 - 1e-15 {
                            for (wi, di) in best_w.iter_mut().zip(&dir) {
                                *wi = (*wi + t * di).max(0.0);
                            }
                            let z: f64 = best_w.iter().sum();
                            best_w.iter_mut().for_each(|x| *x /= z);
                            best = self.violation(&best_w);
                            improved = true;
                        }
                    }
                }
                if !improved || done(best.0) {
                    break;
                }
            }
        }
        (best_w, best)
    }
}

/// Keeps at most `limit` atoms, spread out in payoff space, starting from the K-argmin.
fn spread_atoms(tables: &[Vec<Vec<f64>>], limit: usize) -> Vec<usize> {
    if tables.len() <= limit {
        return (0..tables.len()).collect();
    }
    let flat: Vec<Vec<f64>> = tables.iter().map(|t| t.iter().flatten().copied().collect()).collect();
    let mut chosen = vec![0];
    let mut dist: Vec<f64> = flat.iter().map(|f| euclid(f, &flat[0])).collect();
    while chosen.len() < limit {
        let next = (0..flat.len()).max_by(|&a, &b| dist[a].total_cmp(&dist[b])).unwrap();
        if dist[next] == 0.0 {
            break;
        }
        chosen.push(next);
        for (k, f) in flat.iter().enumerate() {
            dist[k] = dist[k].min(euclid(f, &flat[next]));
        }
    }
    chosen.sort_unstable();
    chosen
}

fn verify_player(
    game: &ObjectiveGame,
    model: &SubjectiveModel,
    player: usize,
    sigma: &StrategyProfile,
    perturbation: Option<&PerturbationStructure>,
    cfg: &EquilibriumConfig,
) -> Result<std::result::Result<PlayerSupport, Rejection>> {
    let pm = PlayerModel::new(game, model, player)?;
    let w = Wkld::new(&pm, sigma)?;
    let ms = minimize(&w, &cfg.minimizer)?;
    let all_tables: Vec<Vec<Vec<f64>>> =
        ms.points.iter().map(|p| pm.payoff_table_at(p)).collect::<Result<_>>()?;
    let keep = spread_atoms(&all_tables, cfg.max_belief_atoms);
    let tables: Vec<Vec<Vec<f64>>> = keep.iter().map(|&k| all_tables[k].clone()).collect();
    let search = Search {
        tables,
        sigma: &sigma.0[player],
        support_tol: cfg.support_tol,
        target: match perturbation {
            None => Target::Optimal,
            Some(p) => Target::Perturbed(p, cfg.n_mc),
        },
    };
    let (weights, (violation, s, x)) = search.run(200);
    let tol = if perturbation.is_some() { cfg.tol_strategy } else { cfg.tol_opt };
    if violation > tol {
        return Ok(Err(Rejection {
            player: game.players[player].clone(),
            signal: s,
            action: x,
            violation,
            minimizer_clusters: ms.points.len(),
            segment: ms.segment,
        }));
    }
    let mut points = Vec::new();
    let mut atom_weights = Vec::new();
    let mut gaps = Vec::new();
    for (idx, wk) in keep.iter().zip(&weights) {
        if *wk > 0.0 {
            points.push(ms.points[*idx].clone());
            atom_weights.push(*wk);
            gaps.push(ms.values[*idx] - ms.minimum);
        }
    }
    let z: f64 = atom_weights.iter().sum();
    atom_weights.iter_mut().for_each(|v| *v /= z);
    let u = search.mix(&weights);
    let mut optimality_gaps = Vec::new();
    for (s, row) in u.iter().enumerate() {
        let best = row.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
        for (x, v) in row.iter().enumerate() {
            if sigma.0[player][s][x] > cfg.support_tol {
                optimality_gaps.push(OptimalityGap { signal: s, action: x, gap: v - best });
            }
        }
    }
    Ok(Ok(PlayerSupport {
        player: game.players[player].clone(),
        belief: Belief::Atoms { points, weights: atom_weights },
        minimum_k: ms.minimum,
        atom_k_gaps: gaps,
        segment: ms.segment,
        optimality_gaps,
        strategy_residual: perturbation.map(|_| violation),
    }))
}

/// Checks the equilibrium conditions for σ: each player's belief is supported on the
/// closest parameters and makes every supported action optimal (or, for a perturbed game,
/// reproduces σ as the perturbed response).
pub fn verify_berk_nash(
    game: &ObjectiveGame,
    models: &[SubjectiveModel],
    sigma: &StrategyProfile,
    perturbation: Option<&PerturbationStructure>,
    cfg: &EquilibriumConfig,
) -> Result<Verdict> {
    sigma.validate(game)?;
    if models.len() != game.n_players() {
        return Err(crate::Error::InvalidModel(format!(
            "{} models for {} players",
            models.len(),
            game.n_players()
        )));
    }
    let mut players = Vec::new();
    for (i, model) in models.iter().enumerate() {
        match verify_player(game, model, i, sigma, perturbation, cfg)? {
            Ok(p) => players.push(p),
            Err(r) => return Ok(Verdict::Rejected(r)),
        }
    }
    Ok(Verdict::Accepted(EquilibriumCertificate {
        strategy: sigma.clone(),
        scale: perturbation.map_or(0.0, |p| p.scale),
        players,
    }))
}
