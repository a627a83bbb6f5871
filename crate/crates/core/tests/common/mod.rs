#![allow(dead_code)]

use berknash::game::{single_agent, ObjectiveGame, OutcomeDistribution, StrategyProfile};
use berknash::subjective::{CategoricalKernel, CategoricalModel, ParameterDomain, SubjectiveModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random probability vector; with `sparse`, each entry is zero with probability 1/4
/// (at least one entry stays positive).
pub fn simplex(rng: &mut impl Rng, n: usize, sparse: bool) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| if sparse && rng.random::<f64>() < 0.25 { 0.0 } else { rng.random::<f64>() + 1e-3 })
            .collect();
        let total: f64 = v.iter().sum();
        if total > 0.0 {
            return v.iter().map(|x| x / total).collect();
        }
    }
}

/// Single agent with random states, signals, feedback and payoffs; full-support law.
pub fn random_game(rng: &mut impl Rng) -> ObjectiveGame {
    let n_w = rng.random_range(2..=3);
    let n_s = rng.random_range(1..=2);
    let n_x = rng.random_range(2..=3);
    let n_y = rng.random_range(2..=3);
    let fb: Vec<Vec<usize>> = (0..n_x).map(|_| (0..n_w).map(|_| rng.random_range(0..n_y)).collect()).collect();
    let pay: Vec<Vec<f64>> = (0..n_x).map(|_| (0..n_y).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let mut game = single_agent(
        (0..n_w).map(|w| format!("w{w}")).collect(),
        vec![1.0 / n_w as f64; n_w],
        (0..n_x).map(|x| format!("x{x}")).collect(),
        (0..n_y).map(|y| format!("y{y}")).collect(),
        |x, w| fb[x][w],
        |x, y| pay[x][y],
    );
    game.signals = vec![(0..n_s).map(|s| format!("s{s}")).collect()];
    game.law = simplex(rng, n_w * n_s, false);
    game
}

pub fn random_strategy(rng: &mut impl Rng, game: &ObjectiveGame, sparse: bool) -> StrategyProfile {
    StrategyProfile(
        (0..game.n_players())
            .map(|i| (0..game.signals[i].len()).map(|_| simplex(rng, game.actions[i].len(), sparse)).collect())
            .collect(),
    )
}

/// Table model over `n` random points; `truth`, when given, is appended as the last point.
pub fn random_table_model(rng: &mut impl Rng, game: &ObjectiveGame, n: usize, truth: Option<&OutcomeDistribution>) -> SubjectiveModel {
    let (n_s, n_x, n_y) = (game.signals[0].len(), game.actions[0].len(), game.consequences[0].len());
    let mut tables: Vec<Vec<Vec<Vec<f64>>>> = (0..n)
        .map(|_| (0..n_s).map(|_| (0..n_x).map(|_| simplex(rng, n_y, true)).collect()).collect())
        .collect();
    if let Some(q) = truth {
        tables.push(q.probs.clone());
    }
    let points = (0..tables.len()).map(|k| vec![k as f64]).collect();
    SubjectiveModel::Categorical(CategoricalModel { domain: ParameterDomain::Points { points }, kernel: CategoricalKernel::Table { tables } })
}

/// Nash equilibria of a 2×2 game by enumeration: pure profiles, then the interior mixed
/// profile from the indifference conditions. `a[x0][x1]` and `b[x0][x1]` are the row and
/// column payoffs. Strategies are returned as (Pr row plays 0, Pr column plays 0).
pub fn nash_2x2(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for x0 in 0..2 {
        for x1 in 0..2 {
            if a[x0][x1] >= a[1 - x0][x1] && b[x0][x1] >= b[x0][1 - x1] {
                out.push((if x0 == 0 { 1.0 } else { 0.0 }, if x1 == 0 { 1.0 } else { 0.0 }));
            }
        }
    }
    // column mixes q to make row indifferent, row mixes p to make column indifferent
    let dq = a[0][0] - a[1][0] - a[0][1] + a[1][1];
    let dp = b[0][0] - b[0][1] - b[1][0] + b[1][1];
    if dq != 0.0 && dp != 0.0 {
        let q = (a[1][1] - a[0][1]) / dq;
        let p = (b[1][1] - b[1][0]) / dp;
        if q > 0.0 && q < 1.0 && p > 0.0 && p < 1.0 {
            out.push((p, q));
        }
    }
    out
}
