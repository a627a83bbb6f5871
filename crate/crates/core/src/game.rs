//! Finite objective games and the outcome distributions they induce.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonzero tolerance for the state-signal law at construction.
pub const LAW_TOL: f64 = 1e-12;

/// A finite simultaneous-move game: states, private signals, actions, consequences,
/// feedback maps and payoff tables. All tables are dense and indexed by label order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveGame {
    pub players: Vec<String>,
    pub states: Vec<String>,
    /// Signal labels per player.
    pub signals: Vec<Vec<String>>,
    /// Joint weights over (state, signal profile), indexed `state * n_profiles + profile`
    /// where signal profiles use mixed radix with player 0 slowest.
    pub law: Vec<f64>,
    pub actions: Vec<Vec<String>>,
    pub consequences: Vec<Vec<String>>,
    /// `feedback[i][state][action_profile]`, action profiles in mixed radix with player 0 slowest.
    pub feedback: Vec<Vec<Vec<Option<usize>>>>,
    /// `payoff[i][action][consequence]`.
    pub payoff: Vec<Vec<Vec<f64>>>,
}

fn radix_index(digits: &[usize], sizes: &[usize]) -> usize {
    digits.iter().zip(sizes).fold(0, |acc, (d, n)| acc * n + d)
}

fn radix_digits(mut index: usize, sizes: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; sizes.len()];
    for k in (0..sizes.len()).rev() {
        digits[k] = index % sizes[k];
        index /= sizes[k];
    }
    digits
}

impl ObjectiveGame {
    pub fn n_players(&self) -> usize {
        self.players.len()
    }

    pub fn signal_sizes(&self) -> Vec<usize> {
        self.signals.iter().map(Vec::len).collect()
    }

    pub fn action_sizes(&self) -> Vec<usize> {
        self.actions.iter().map(Vec::len).collect()
    }

    pub fn n_signal_profiles(&self) -> usize {
        self.signals.iter().map(Vec::len).product()
    }

    pub fn n_action_profiles(&self) -> usize {
        self.actions.iter().map(Vec::len).product()
    }

    pub fn signal_profile(&self, index: usize) -> Vec<usize> {
        radix_digits(index, &self.signal_sizes())
    }

    pub fn signal_profile_index(&self, signals: &[usize]) -> usize {
        radix_index(signals, &self.signal_sizes())
    }

    pub fn action_profile(&self, index: usize) -> Vec<usize> {
        radix_digits(index, &self.action_sizes())
    }

    pub fn action_profile_index(&self, actions: &[usize]) -> usize {
        radix_index(actions, &self.action_sizes())
    }

    pub fn player_index(&self, name: &str) -> Option<usize> {
        self.players.iter().position(|p| p == name)
    }

    pub fn law_weight(&self, state: usize, signals: &[usize]) -> f64 {
        self.law[state * self.n_signal_profiles() + self.signal_profile_index(signals)]
    }

    /// Marginal p_{S^i}.
    pub fn signal_marginal(&self, player: usize) -> Vec<f64> {
        let np = self.n_signal_profiles();
        let mut out = vec![0.0; self.signals[player].len()];
        for (k, &w) in self.law.iter().enumerate() {
            let prof = self.signal_profile(k % np);
            out[prof[player]] += w;
        }
        out
    }

    pub fn state_marginal(&self) -> Vec<f64> {
        let np = self.n_signal_profiles();
        let mut out = vec![0.0; self.states.len()];
        for (k, &w) in self.law.iter().enumerate() {
            out[k / np] += w;
        }
        out
    }

    pub fn consequence(&self, player: usize, state: usize, actions: &[usize]) -> Result<usize> {
        self.feedback[player][state][self.action_profile_index(actions)].ok_or_else(|| {
            Error::InvalidGame(format!(
                "feedback of player {} undefined at state {}, actions {:?}",
                self.players[player], self.states[state], actions
            ))
        })
    }

    /// Largest |π^i| over all players.
    pub fn payoff_bound(&self, player: usize) -> f64 {
        self.payoff[player]
            .iter()
            .flatten()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Per player, per signal, a probability vector over actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile(pub Vec<Vec<Vec<f64>>>);

impl StrategyProfile {
    pub fn uniform(game: &ObjectiveGame) -> Self {
        Self(
            (0..game.n_players())
                .map(|i| {
                    let n = game.actions[i].len();
                    vec![vec![1.0 / n as f64; n]; game.signals[i].len()]
                })
                .collect(),
        )
    }

    /// Every player plays `actions[i]` after every signal.
    pub fn pure(game: &ObjectiveGame, actions: &[usize]) -> Self {
        Self(
            (0..game.n_players())
                .map(|i| {
                    let mut row = vec![0.0; game.actions[i].len()];
                    row[actions[i]] = 1.0;
                    vec![row; game.signals[i].len()]
                })
                .collect(),
        )
    }

    /// Single-player, single-signal profile.
    pub fn single(probs: Vec<f64>) -> Self {
        Self(vec![vec![probs]])
    }

    pub fn player(&self, i: usize) -> &Vec<Vec<f64>> {
        &self.0[i]
    }

    pub fn flat(&self) -> Vec<f64> {
        self.0.iter().flatten().flatten().copied().collect()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        crate::numerics::max_abs_diff(&self.flat(), &other.flat())
    }

    pub fn validate(&self, game: &ObjectiveGame) -> Result<()> {
        if self.0.len() != game.n_players() {
            return Err(Error::InvalidProfile(format!(
                "{} players in profile, {} in game",
                self.0.len(),
                game.n_players()
            )));
        }
        for (i, rows) in self.0.iter().enumerate() {
            if rows.len() != game.signals[i].len() {
                return Err(Error::InvalidProfile(format!(
                    "player {} has {} signal rows, expected {}",
                    game.players[i],
                    rows.len(),
                    game.signals[i].len()
                )));
            }
            for (s, row) in rows.iter().enumerate() {
                if row.len() != game.actions[i].len() {
                    return Err(Error::InvalidProfile(format!(
                        "player {} signal {} has {} entries, expected {}",
                        game.players[i],
                        s,
                        row.len(),
                        game.actions[i].len()
                    )));
                }
                let total: f64 = row.iter().sum();
                if row.iter().any(|&p| !(p >= 0.0)) || (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidProfile(format!(
                        "player {} signal {} is not a probability vector",
                        game.players[i], s
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Q(y | s, x) for every own signal and action, `probs[s][x][y]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub probs: Vec<Vec<Vec<f64>>>,
}

impl OutcomeDistribution {
    pub fn get(&self, s: usize, x: usize) -> &[f64] {
        &self.probs[s][x]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.probs
            .iter()
            .flatten()
            .flatten()
            .zip(other.probs.iter().flatten().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// True conditional distribution over player `player`'s consequences.
pub fn objective_distribution(
    game: &ObjectiveGame,
    sigma: &StrategyProfile,
    player: usize,
) -> Result<OutcomeDistribution> {
    sigma.validate(game)?;
    let i = player;
    let n_sig = game.signals[i].len();
    let n_act = game.actions[i].len();
    let n_y = game.consequences[i].len();
    let mut probs = vec![vec![vec![0.0; n_y]; n_act]; n_sig];
    let marg = game.signal_marginal(i);
    let np = game.n_signal_profiles();
    let sizes = game.action_sizes();
    let others: Vec<usize> = (0..game.n_players()).filter(|&j| j != i).collect();
    let n_other_profiles: usize = others.iter().map(|&j| sizes[j]).product();
    for (k, &w) in game.law.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let state = k / np;
        let sig = game.signal_profile(k % np);
        let si = sig[i];
        let cond = w / marg[si];
        let mut actions = vec![0usize; game.n_players()];
        for op in 0..n_other_profiles {
            let mut rem = op;
            let mut prob = cond;
            for &j in others.iter().rev() {
                actions[j] = rem % sizes[j];
                rem /= sizes[j];
                prob *= sigma.0[j][sig[j]][actions[j]];
            }
            if prob == 0.0 {
                continue;
            }
            for x in 0..n_act {
                actions[i] = x;
                let y = game.consequence(i, state, &actions)?;
                probs[si][x][y] += prob;
            }
        }
    }
    Ok(OutcomeDistribution { probs })
}

pub fn true_expected_payoff(game: &ObjectiveGame, sigma: &StrategyProfile, player: usize) -> Result<f64> {
    let q = objective_distribution(game, sigma, player)?;
    let marg = game.signal_marginal(player);
    let mut total = 0.0;
    for (s, ps) in marg.iter().enumerate() {
        for (x, sx) in sigma.0[player][s].iter().enumerate() {
            if *sx == 0.0 {
                continue;
            }
            let u: f64 = q.probs[s][x]
                .iter()
                .zip(&game.payoff[player][x])
                .map(|(p, v)| p * v)
                .sum();
            total += ps * sx * u;
        }
    }
    Ok(total)
}

/// One violated invariant with its location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub location: String,
    pub message: String,
}

pub fn validate_game(game: &ObjectiveGame) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut flag = |location: String, message: String| out.push(Diagnostic { location, message });
    let n = game.n_players();
    if n == 0 {
        flag("players".into(), "no players".into());
    }
    for (name, len) in [
        ("signals", game.signals.len()),
        ("actions", game.actions.len()),
        ("consequences", game.consequences.len()),
        ("feedback", game.feedback.len()),
        ("payoff", game.payoff.len()),
    ] {
        if len != n {
            flag(name.into(), format!("{len} entries for {n} players"));
        }
    }
    if game.states.is_empty() {
        flag("states".into(), "no states".into());
    }
    let structurally_sound = game.signals.len() == n
        && game.actions.len() == n
        && game.consequences.len() == n
        && game.feedback.len() == n
        && game.payoff.len() == n;
    if !structurally_sound {
        return out;
    }
    for i in 0..n {
        let p = &game.players[i];
        if game.signals[i].is_empty() {
            flag(format!("signals.{p}"), "empty signal set".into());
        }
        if game.actions[i].is_empty() {
            flag(format!("actions.{p}"), "empty action set".into());
        }
        if game.consequences[i].is_empty() {
            flag(format!("consequences.{p}"), "empty consequence set".into());
        }
    }
    let expected_law = game.states.len() * game.n_signal_profiles();
    if game.law.len() != expected_law {
        flag("p".into(), format!("{} weights, expected {expected_law}", game.law.len()));
    } else {
        if let Some(k) = game.law.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            flag(format!("p[{k}]"), "weight is negative or not finite".into());
        }
        let total: f64 = game.law.iter().sum();
        if (total - 1.0).abs() > LAW_TOL {
            flag("p".into(), format!("weights sum to {total}, not 1"));
        }
        for (w, label) in game.state_marginal().iter().zip(&game.states) {
            if *w <= 0.0 {
                flag(format!("p.state.{label}"), "state has zero marginal probability".into());
            }
        }
        for i in 0..n {
            for (w, label) in game.signal_marginal(i).iter().zip(&game.signals[i]) {
                if *w <= 0.0 {
                    flag(
                        format!("p.signal.{}.{label}", game.players[i]),
                        "signal has zero marginal probability".into(),
                    );
                }
            }
        }
    }
    let n_prof = game.n_action_profiles();
    for i in 0..n {
        let p = &game.players[i];
        if game.feedback[i].len() != game.states.len() {
            flag(format!("feedback.{p}"), "one row per state required".into());
            continue;
        }
        for (w, row) in game.feedback[i].iter().enumerate() {
            if row.len() != n_prof {
                flag(
                    format!("feedback.{p}.{}", game.states[w]),
                    format!("{} action profiles, expected {n_prof}", row.len()),
                );
                continue;
            }
            for (k, cell) in row.iter().enumerate() {
                let loc = || {
                    let labels: Vec<&str> = game
                        .action_profile(k)
                        .iter()
                        .enumerate()
                        .map(|(j, &a)| game.actions[j][a].as_str())
                        .collect();
                    format!("feedback.{p}.{}.{}", game.states[w], labels.join(","))
                };
                match cell {
                    None => flag(loc(), "feedback undefined".into()),
                    Some(y) if *y >= game.consequences[i].len() => {
                        flag(loc(), format!("consequence index {y} out of range"))
                    }
                    _ => {}
                }
            }
        }
        if game.payoff[i].len() != game.actions[i].len() {
            flag(format!("payoff.{p}"), "one row per action required".into());
            continue;
        }
        for (x, row) in game.payoff[i].iter().enumerate() {
            if row.len() != game.consequences[i].len() {
                flag(
                    format!("payoff.{p}.{}", game.actions[i][x]),
                    "one entry per consequence required".into(),
                );
            } else if row.iter().any(|v| !v.is_finite()) {
                flag(format!("payoff.{p}.{}", game.actions[i][x]), "payoff not finite".into());
            }
        }
    }
    out
}

pub fn ensure_valid(game: &ObjectiveGame) -> Result<()> {
    let diags = validate_game(game);
    if diags.is_empty() {
        Ok(())
    } else {
        let msg: Vec<String> = diags.iter().map(|d| format!("{}: {}", d.location, d.message)).collect();
        Err(Error::InvalidGame(msg.join("; ")))
    }
}

/// Builder for single-player games without signals.
pub fn single_agent(
    states: Vec<String>,
    state_probs: Vec<f64>,
    actions: Vec<String>,
    consequences: Vec<String>,
    feedback: impl Fn(usize, usize) -> usize,
    payoff: impl Fn(usize, usize) -> f64,
) -> ObjectiveGame {
    let fb = (0..states.len())
        .map(|w| (0..actions.len()).map(|x| Some(feedback(x, w))).collect())
        .collect();
    let pay = (0..actions.len())
        .map(|x| (0..consequences.len()).map(|y| payoff(x, y)).collect())
        .collect();
    ObjectiveGame {
        players: vec!["agent".into()],
        states,
        signals: vec![vec!["none".into()]],
        law: state_probs,
        actions: vec![actions],
        consequences: vec![consequences],
        feedback: vec![fb],
        payoff: vec![pay],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> ObjectiveGame {
        // Two players, two states, player 0 has two signals correlated with the state.
        let law = vec![0.3, 0.1, 0.15, 0.45];
        let sizes = [2usize, 2];
        let feedback = (0..2)
            .map(|i| {
                (0..2)
                    .map(|w| {
                        (0..4)
                            .map(|k| {
                                let a = radix_digits(k, &sizes);
                                Some((a[1 - i] + w + i) % 2)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        ObjectiveGame {
            players: vec!["row".into(), "col".into()],
            states: vec!["w0".into(), "w1".into()],
            signals: vec![vec!["lo".into(), "hi".into()], vec!["none".into()]],
            law,
            actions: vec![vec!["a".into(), "b".into()], vec!["c".into(), "d".into()]],
            consequences: vec![vec!["y0".into(), "y1".into()], vec!["y0".into(), "y1".into()]],
            feedback,
            payoff: vec![vec![vec![1.0, 0.0], vec![0.0, 2.0]], vec![vec![3.0, 1.0], vec![0.5, 0.0]]],
        }
    }

    #[test]
    fn matches_enumeration() {
        let g = two_by_two();
        assert!(validate_game(&g).is_empty());
        let sigma = StrategyProfile(vec![
            vec![vec![0.2, 0.8], vec![0.6, 0.4]],
            vec![vec![0.5, 0.5]],
        ]);
        let q = objective_distribution(&g, &sigma, 0).unwrap();
        // brute force over (w, s0, s1, x1)
        let mut brute = vec![vec![vec![0.0; 2]; 2]; 2];
        let mut ps = [0.0; 2];
        for w in 0..2 {
            for s0 in 0..2 {
                ps[s0] += g.law_weight(w, &[s0, 0]);
            }
        }
        for w in 0..2 {
            for s0 in 0..2 {
                let pw = g.law_weight(w, &[s0, 0]);
                for x1 in 0..2 {
                    for x0 in 0..2 {
                        let y = g.feedback[0][w][x0 * 2 + x1].unwrap();
                        brute[s0][x0][y] += pw / ps[s0] * sigma.0[1][0][x1];
                    }
                }
            }
        }
        for s in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    assert!((q.probs[s][x][y] - brute[s][x][y]).abs() < 1e-15);
                }
                assert!((q.probs[s][x].iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn point_mass_state() {
        let g = single_agent(
            vec!["w".into()],
            vec![1.0],
            vec!["l".into(), "r".into()],
            vec!["u".into(), "v".into()],
            |x, _| x,
            |_, _| 0.0,
        );
        let q = objective_distribution(&g, &StrategyProfile::single(vec![0.5, 0.5]), 0).unwrap();
        assert_eq!(q.probs[0][0], vec![1.0, 0.0]);
        assert_eq!(q.probs[0][1], vec![0.0, 1.0]);
    }

    #[test]
    fn constant_payoff() {
        let mut g = two_by_two();
        g.payoff[1] = vec![vec![7.0, 7.0], vec![7.0, 7.0]];
        let sigma = StrategyProfile::uniform(&g);
        assert!((true_expected_payoff(&g, &sigma, 1).unwrap() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn diagnostics() {
        let mut g = two_by_two();
        for w in g.law.iter_mut() {
            *w *= 0.99;
        }
        let d = validate_game(&g);
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("sum"));

        let mut g = two_by_two();
        g.feedback[1][0][3] = None;
        let d = validate_game(&g);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].location, "feedback.col.w0.b,d");
    }

    #[test]
    fn dimension_mismatch() {
        let g = two_by_two();
        let bad = StrategyProfile(vec![vec![vec![1.0, 0.0]]]);
        assert!(matches!(objective_distribution(&g, &bad, 0), Err(Error::InvalidProfile(_))));
    }
}
