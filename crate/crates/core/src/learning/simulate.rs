use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::belief::{ConjugateNormalBelief, GridBelief, Observation};
use super::policy::{choose, within_target, Policy};
use crate::equilibrium::{argmax, PerturbationStructure};
use crate::error::{Error, Result};
use crate::game::{ObjectiveGame, OutcomeDistribution};
use crate::subjective::{Belief, PlayerModel, Predictive, SubjectiveModel};

/// A player's running posterior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlayerBelief {
    Grid(GridBelief),
    Conjugate(ConjugateNormalBelief),
}

impl PlayerBelief {
    pub fn to_belief(&self) -> Belief {
        match self {
            Self::Grid(g) => g.to_belief(),
            Self::Conjugate(c) => c.to_belief(),
        }
    }

    pub fn mass_within(&self, centers: &[Vec<f64>], radius: f64) -> f64 {
        match self {
            Self::Grid(g) => g.mass_within(centers, radius),
            Self::Conjugate(c) => c.mass_within(centers, radius),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOptions {
    /// Draws for intended strategies with more than two actions under normal shocks.
    pub n_mc: usize,
    /// Grid weights are recorded every `weight_stride` periods (and at the horizon);
    /// zero picks about a thousand snapshots.
    pub weight_stride: usize,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self { n_mc: 4096, weight_stride: 0 }
    }
}

/// Posterior summaries for every period `0..=T` (period 0 is the prior).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BeliefTrack {
    Conjugate { mean: Vec<f64>, variance: Vec<f64> },
    Grid { mean: Vec<Vec<f64>>, weight_periods: Vec<usize>, weights: Vec<Vec<f64>> },
}

impl BeliefTrack {
    pub fn mean_at(&self, t: usize) -> Vec<f64> {
        match self {
            Self::Conjugate { mean, .. } => vec![mean[t]],
            Self::Grid { mean, .. } => mean[t].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerHistory {
    pub player: String,
    /// Per period `1..=T`.
    pub signals: Vec<usize>,
    /// Payoff shocks, `n_actions` per period.
    pub shocks: Vec<f64>,
    pub actions: Vec<usize>,
    pub consequences: Vec<usize>,
    pub outcomes: Vec<Option<f64>>,
    pub beliefs: BeliefTrack,
    /// Intended strategies `[s][x]` flattened, one block per period `0..=T`.
    pub intended: Vec<f64>,
    pub n_signals: usize,
    pub n_actions: usize,
    pub final_belief: PlayerBelief,
}

impl PlayerHistory {
    /// Intended strategy `[s][x]` at period `t` (0 = before any play).
    pub fn intended_at(&self, t: usize) -> Vec<Vec<f64>> {
        let block = self.n_signals * self.n_actions;
        self.intended[t * block..(t + 1) * block].chunks(self.n_actions).map(<[f64]>::to_vec).collect()
    }

    pub fn shocks_at(&self, t: usize) -> &[f64] {
        &self.shocks[(t - 1) * self.n_actions..t * self.n_actions]
    }
}

/// Columnar record of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationHistory {
    pub seed: u64,
    pub config_hash: String,
    pub horizon: usize,
    /// Index into the game's joint (state, signal profile) law, per period.
    pub states: Vec<usize>,
    pub players: Vec<PlayerHistory>,
}

#[derive(Serialize)]
struct RunConfig<'a> {
    game: &'a ObjectiveGame,
    models: &'a [SubjectiveModel],
    priors: &'a [PlayerBelief],
    policies: &'a [Policy],
    perturbation: Option<&'a PerturbationStructure>,
    horizon: usize,
    options: &'a SimulationOptions,
}

struct Runner<'a> {
    pm: PlayerModel<'a>,
    policy: &'a Policy,
    belief: PlayerBelief,
    atom_tables: Option<Vec<OutcomeDistribution>>,
    target: Option<Predictive>,
}

impl Runner<'_> {
    fn predictive(&self) -> Result<Predictive> {
        match (&self.belief, &self.atom_tables) {
            (PlayerBelief::Grid(g), Some(tables)) => {
                let mut acc = tables[0].clone();
                acc.probs.iter_mut().flatten().flatten().for_each(|q| *q = 0.0);
                for (w, t) in g.weights().iter().zip(tables) {
                    if *w == 0.0 {
                        continue;
                    }
                    for (a, b) in acc.probs.iter_mut().flatten().flatten().zip(t.probs.iter().flatten().flatten()) {
                        *a += w * b;
                    }
                }
                Ok(Predictive::Categorical(acc))
            }
            (b, _) => self.pm.predictive(&b.to_belief()),
        }
    }

    /// Payoff tables `[s][x]` the policy acts on in period `t`.
    fn acting_payoffs(&self, t: usize) -> Result<Vec<Vec<f64>>> {
        let current = self.predictive()?;
        if let (Policy::AsymptoticallyOptimal { schedule, .. }, Some(target)) = (self.policy, &self.target) {
            if within_target(&self.pm, &current, target, schedule, t) {
                return Ok(self.pm.payoffs_from_predictive(target));
            }
        }
        Ok(self.pm.payoffs_from_predictive(&current))
    }

    fn intended(&self, payoffs: &[Vec<f64>], p: Option<&PerturbationStructure>, n_mc: usize) -> Vec<f64> {
        if let Policy::Fixed { strategy } = self.policy {
            return strategy.iter().flatten().copied().collect();
        }
        payoffs
            .iter()
            .flat_map(|row| match p {
                Some(p) => p.choice_probabilities(row, n_mc),
                None => {
                    let mut r = vec![0.0; row.len()];
                    r[argmax(row)] = 1.0;
                    r
                }
            })
            .collect()
    }

    fn update(&mut self, s: usize, x: usize, obs: &Observation, t: usize) -> Result<()> {
        let impossible = Error::ImpossibleObservation { signal: s, action: x, period: Some(t) };
        match &mut self.belief {
            PlayerBelief::Conjugate(c) => {
                let g = self.pm.gaussian().expect("checked at setup");
                let cell = &g.cells[x][obs.consequence];
                *c = c.observe(cell.offset, cell.features[0], obs.outcome.expect("gaussian outcome"));
            }
            PlayerBelief::Grid(b) => {
                let ll: Vec<f64> = match &self.atom_tables {
                    Some(tables) => tables.iter().map(|q| q.probs[s][x][obs.consequence].ln()).collect(),
                    None => super::belief::log_likelihoods(&self.pm, &b.points, s, x, obs)?,
                };
                if !b.absorb(&ll) {
                    return Err(impossible);
                }
            }
        }
        Ok(())
    }
}

/// Key shared by all streams of a run; nature uses stream `t` in period `t`, player `i`
/// uses stream `2^63 + i` throughout.
fn run_key(seed: u64) -> <ChaCha8Rng as SeedableRng>::Seed {
    ChaCha8Rng::seed_from_u64(seed).get_seed()
}

fn stream(key: <ChaCha8Rng as SeedableRng>::Seed, id: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::from_seed(key);
    r.set_stream(id);
    r
}

/// Repeated play with Bayesian updating. Each period nature draws the state and signals,
/// every player acts through their policy on their own belief, observes their consequence
/// (plus a unit-variance outcome under gaussian-mean models) and updates.
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    game: &ObjectiveGame,
    models: &[SubjectiveModel],
    priors: &[PlayerBelief],
    policies: &[Policy],
    perturbation: Option<&PerturbationStructure>,
    horizon: usize,
    seed: u64,
    options: &SimulationOptions,
) -> Result<SimulationHistory> {
    crate::game::ensure_valid(game)?;
    let n = game.n_players();
    if models.len() != n || priors.len() != n || policies.len() != n {
        return Err(Error::InvalidModel("one model, prior and policy per player required".into()));
    }
    if let Some(p) = perturbation {
        p.check()?;
    }
    let config_hash = crate::manifest::config_hash(&RunConfig {
        game,
        models,
        priors,
        policies,
        perturbation,
        horizon,
        options,
    })?;
    let mut runners = Vec::with_capacity(n);
    for i in 0..n {
        let pm = PlayerModel::new(game, &models[i], i)?;
        policies[i].check(&pm)?;
        pm.check_belief(&priors[i].to_belief())?;
        let atom_tables = match (&priors[i], &models[i]) {
            (PlayerBelief::Grid(g), SubjectiveModel::Categorical(_)) => {
                Some(g.points.iter().map(|p| pm.kernel_table(p)).collect::<Result<Vec<_>>>()?)
            }
            _ => None,
        };
        let target = match &policies[i] {
            Policy::AsymptoticallyOptimal { target_belief, .. } => Some(pm.predictive(target_belief)?),
            _ => None,
        };
        runners.push(Runner { pm, policy: &policies[i], belief: priors[i].clone(), atom_tables, target });
    }
    let stride = if options.weight_stride == 0 { (horizon / 1000).max(1) } else { options.weight_stride };
    let key = run_key(seed);
    let mut player_rngs: Vec<ChaCha8Rng> = (0..n).map(|i| stream(key, (1u64 << 63) + i as u64)).collect();
    let mut cumulative = Vec::with_capacity(game.law.len());
    let mut acc = 0.0;
    for w in &game.law {
        acc += w;
        cumulative.push(acc);
    }
    let np = game.n_signal_profiles();

    let mut hist: Vec<PlayerHistory> = runners
        .iter()
        .map(|r| {
            let (ns, nx) = (r.pm.n_signals(), r.pm.n_actions());
            let beliefs = match &r.belief {
                PlayerBelief::Conjugate(_) => BeliefTrack::Conjugate {
                    mean: Vec::with_capacity(horizon + 1),
                    variance: Vec::with_capacity(horizon + 1),
                },
                PlayerBelief::Grid(_) => BeliefTrack::Grid { mean: Vec::with_capacity(horizon + 1), weight_periods: Vec::new(), weights: Vec::new() },
            };
            PlayerHistory {
                player: game.players[r.pm.player].clone(),
                signals: Vec::with_capacity(horizon),
                shocks: Vec::with_capacity(horizon * nx),
                actions: Vec::with_capacity(horizon),
                consequences: Vec::with_capacity(horizon),
                outcomes: Vec::with_capacity(horizon),
                beliefs,
                intended: Vec::with_capacity((horizon + 1) * ns * nx),
                n_signals: ns,
                n_actions: nx,
                final_belief: r.belief.clone(),
            }
        })
        .collect();
    let record_belief = |h: &mut PlayerHistory, b: &PlayerBelief, t: usize| match (&mut h.beliefs, b) {
        (BeliefTrack::Conjugate { mean, variance }, PlayerBelief::Conjugate(c)) => {
            mean.push(c.mean);
            variance.push(c.variance);
        }
        (BeliefTrack::Grid { mean, weight_periods, weights }, PlayerBelief::Grid(g)) => {
            mean.push(g.mean());
            if t % stride == 0 || t == horizon {
                weight_periods.push(t);
                weights.push(g.weights());
            }
        }
        _ => unreachable!("belief kind is fixed over a run"),
    };

    let mut states = Vec::with_capacity(horizon);
    let mut acting: Vec<Vec<Vec<f64>>> = Vec::with_capacity(n);
    for (r, h) in runners.iter().zip(hist.iter_mut()) {
        let pay = r.acting_payoffs(1)?;
        h.intended.extend(r.intended(&pay, perturbation, options.n_mc));
        record_belief(h, &r.belief, 0);
        acting.push(pay);
    }
    for t in 1..=horizon {
        let mut nature = stream(key, t as u64);
        let u: f64 = nature.random();
        let k = cumulative.partition_point(|c| *c <= u * acc).min(game.law.len() - 1);
        let k = (k..game.law.len()).chain((0..k).rev()).find(|&j| game.law[j] > 0.0).expect("law has positive mass");
        states.push(k);
        let state = k / np;
        let signals = game.signal_profile(k % np);
        let noise: Vec<f64> = (0..n).map(|_| nature.sample(StandardNormal)).collect();

        let mut actions = vec![0usize; n];
        for i in 0..n {
            let r = &runners[i];
            let nx = r.pm.n_actions();
            let xi = match perturbation {
                Some(p) => p.draw(nx, &mut player_rngs[i]),
                None => vec![0.0; nx],
            };
            let u: f64 = player_rngs[i].random();
            let s = signals[i];
            actions[i] = choose(r.policy, &acting[i][s], s, &xi, u);
            hist[i].signals.push(s);
            hist[i].shocks.extend_from_slice(&xi);
            hist[i].actions.push(actions[i]);
        }
        for i in 0..n {
            let y = game.consequence(i, state, &actions)?;
            let outcome = runners[i].pm.gaussian().map(|g| g.cells[actions[i]][y].true_mean + noise[i]);
            let obs = Observation { consequence: y, outcome };
            runners[i].update(signals[i], actions[i], &obs, t)?;
            let next = if t < horizon { t + 1 } else { t };
            let pay = runners[i].acting_payoffs(next)?;
            hist[i].consequences.push(y);
            hist[i].outcomes.push(outcome);
            hist[i].intended.extend(runners[i].intended(&pay, perturbation, options.n_mc));
            record_belief(&mut hist[i], &runners[i].belief, t);
            acting[i] = pay;
        }
    }
    for (h, r) in hist.iter_mut().zip(&runners) {
        h.final_belief = r.belief.clone();
    }
    Ok(SimulationHistory { seed, config_hash, horizon, states, players: hist })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::{build, Params};

    fn monopoly_run(horizon: usize, seed: u64) -> SimulationHistory {
        let b = build("monopoly-slope", &Params::default()).unwrap();
        let p = PerturbationStructure::logistic(0.05).unwrap();
        let prior = PlayerBelief::Conjugate(ConjugateNormalBelief::new(3.5, 1.0).unwrap());
        simulate(&b.game, &b.models, &[prior], &[Policy::Myopic], Some(&p), horizon, seed, &SimulationOptions::default())
            .unwrap()
    }

    #[test]
    fn zero_horizon_is_prior() {
        let h = monopoly_run(0, 7);
        assert!(h.states.is_empty());
        let ph = &h.players[0];
        assert!(ph.actions.is_empty());
        assert_eq!(ph.beliefs.mean_at(0), vec![3.5]);
        assert_eq!(ph.intended.len(), 2);
    }

    #[test]
    fn seeded_runs_repeat() {
        assert_eq!(monopoly_run(500, 3), monopoly_run(500, 3));
        assert_ne!(monopoly_run(500, 3).players[0].actions, monopoly_run(500, 4).players[0].actions);
    }

    #[test]
    fn consequences_follow_feedback() {
        let b = build("coordination", &Params::default()).unwrap();
        let priors: Vec<_> = b
            .models
            .iter()
            .map(|_| {
                let pts = vec![vec![0.2, 0.8], vec![0.5, 0.5], vec![0.8, 0.2]];
                PlayerBelief::Grid(GridBelief::uniform(pts).unwrap())
            })
            .collect();
        let p = PerturbationStructure::logistic(0.5).unwrap();
        let h = simulate(&b.game, &b.models, &priors, &[Policy::Myopic, Policy::Myopic], Some(&p), 200, 1, &Default::default())
            .unwrap();
        for t in 0..200 {
            assert_eq!(h.players[0].consequences[t], h.players[1].actions[t]);
            assert_eq!(h.players[1].consequences[t], h.players[0].actions[t]);
        }
    }

    #[test]
    fn dogmatic_prior_meets_impossible_observation() {
        let b = build("nonexistence", &Params::default()).unwrap();
        let pts = vec![vec![0.0, 0.75], vec![0.25, 0.25]];
        let prior = PlayerBelief::Grid(GridBelief::new(pts, &[1.0, 0.0]).unwrap());
        let always_a = Policy::Fixed { strategy: vec![vec![1.0, 0.0]] };
        let err = simulate(&b.game, &b.models, &[prior], &[always_a], None, 1000, 0, &Default::default()).unwrap_err();
        assert!(matches!(err, Error::ImpossibleObservation { action: 0, period: Some(_), .. }));
    }
}
