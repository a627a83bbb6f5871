use std::io::{BufRead, Write};

use serde_json::{json, Value};

use super::belief::{ConjugateNormalBelief, GridBelief};
use super::simulate::{BeliefTrack, PlayerBelief, PlayerHistory, SimulationHistory};
use crate::error::{Error, Result};
use crate::format::{round_json, sig12};

fn belief_summary(h: &PlayerHistory, t: usize) -> Value {
    match &h.beliefs {
        BeliefTrack::Conjugate { mean, variance } => json!({ "m": mean[t], "tau2": variance[t] }),
        BeliefTrack::Grid { mean, weight_periods, weights } => {
            let mut v = json!({ "mean": mean[t] });
            if let Ok(k) = weight_periods.binary_search(&t) {
                v["weights"] = json!(weights[k]);
            }
            if let (0, PlayerBelief::Grid(g)) = (t, &h.final_belief) {
                v["points"] = json!(g.points);
            }
            v
        }
    }
}

/// One JSON record per period `0..=T`; period 0 carries the prior, the run's seed, config
/// hash and player names, and no play.
pub fn write_jsonl<W: Write>(history: &SimulationHistory, mut out: W) -> Result<()> {
    for t in 0..=history.horizon {
        let players = &history.players;
        let play = |f: &dyn Fn(&PlayerHistory) -> Value| -> Value {
            if t == 0 {
                Value::Null
            } else {
                Value::Array(players.iter().map(f).collect())
            }
        };
        let mut record = json!({
            "t": t,
            "state": if t == 0 { Value::Null } else { json!(history.states[t - 1]) },
            "s": play(&|h| json!(h.signals[t - 1])),
            "xi": play(&|h| json!(h.shocks_at(t))),
            "x": play(&|h| json!(h.actions[t - 1])),
            "y": play(&|h| json!(h.consequences[t - 1])),
            "outcome": play(&|h| json!(h.outcomes[t - 1])),
            "belief": players.iter().map(|h| belief_summary(h, t)).collect::<Vec<_>>(),
            "sigma_t": players.iter().map(|h| h.intended_at(t)).collect::<Vec<_>>(),
        });
        if t == 0 {
            record["seed"] = json!(history.seed);
            record["config_hash"] = json!(history.config_hash);
            record["players"] = json!(players.iter().map(|h| &h.player).collect::<Vec<_>>());
        }
        serde_json::to_writer(&mut out, &round_json(record))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Plotting projection for one player: `t,m_t,tau2_t,freq_window`. `m_t` is the first
/// posterior-mean coordinate, `tau2_t` the posterior variance (empty for grid beliefs),
/// and `freq_window` the share of the last `window` periods in which `action` was played.
pub fn write_csv<W: Write>(history: &SimulationHistory, player: usize, action: usize, window: usize, mut out: W) -> Result<()> {
    let h = &history.players[player];
    writeln!(out, "t,m_t,tau2_t,freq_window")?;
    let mut hits = std::collections::VecDeque::with_capacity(window.max(1));
    let mut count = 0usize;
    for t in 0..=history.horizon {
        if t > 0 {
            let hit = h.actions[t - 1] == action;
            hits.push_back(hit);
            count += hit as usize;
            if hits.len() > window.max(1) {
                count -= hits.pop_front().expect("nonempty") as usize;
            }
        }
        let (m, tau2) = match &h.beliefs {
            BeliefTrack::Conjugate { mean, variance } => (mean[t], sig12(variance[t])),
            BeliefTrack::Grid { mean, .. } => (mean[t][0], String::new()),
        };
        let freq = if hits.is_empty() { String::new() } else { sig12(count as f64 / hits.len() as f64) };
        writeln!(out, "{t},{},{tau2},{freq}", sig12(m))?;
    }
    Ok(())
}

fn field<'a>(v: &'a Value, key: &str, t: usize) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Format(format!("record {t}: missing key {key:?}")))
}

fn parse<T: serde::de::DeserializeOwned>(v: &Value, what: &str, t: usize) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Format(format!("record {t}: {what}: {e}")))
}

/// Rebuild a history from [`write_jsonl`] output. Values carry 12 significant digits.
pub fn read_jsonl<R: BufRead>(reader: R) -> Result<SimulationHistory> {
    let mut lines = reader.lines().filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()));
    let first: Value = serde_json::from_str(&lines.next().ok_or_else(|| Error::Format("empty history".into()))??)?;
    let names: Vec<String> = parse(field(&first, "players", 0)?, "players", 0)?;
    let sigma0: Vec<Vec<Vec<f64>>> = parse(field(&first, "sigma_t", 0)?, "sigma_t", 0)?;
    let beliefs0 = field(&first, "belief", 0)?.as_array().cloned().unwrap_or_default();
    if sigma0.len() != names.len() || beliefs0.len() != names.len() {
        return Err(Error::Format("record 0: one belief and strategy per player required".into()));
    }
    let mut players: Vec<PlayerHistory> = Vec::new();
    let mut grid_points: Vec<Option<Vec<Vec<f64>>>> = Vec::new();
    for ((name, sigma), b) in names.iter().zip(&sigma0).zip(&beliefs0) {
        let (beliefs, points) = if b.get("m").is_some() {
            (BeliefTrack::Conjugate { mean: Vec::new(), variance: Vec::new() }, None)
        } else {
            let pts: Vec<Vec<f64>> = parse(field(b, "points", 0)?, "points", 0)?;
            (BeliefTrack::Grid { mean: Vec::new(), weight_periods: Vec::new(), weights: Vec::new() }, Some(pts))
        };
        grid_points.push(points);
        let n_actions = sigma.first().map_or(0, Vec::len);
        players.push(PlayerHistory {
            player: name.clone(),
            signals: Vec::new(),
            shocks: Vec::new(),
            actions: Vec::new(),
            consequences: Vec::new(),
            outcomes: Vec::new(),
            beliefs,
            intended: Vec::new(),
            n_signals: sigma.len(),
            n_actions,
            final_belief: PlayerBelief::Conjugate(ConjugateNormalBelief { mean: 0.0, variance: 1.0 }),
        });
    }
    let mut states = Vec::new();
    let mut horizon = 0;
    for (t, line) in std::iter::once(Ok(first.to_string())).chain(lines).enumerate() {
        let rec: Value = serde_json::from_str(&line?)?;
        let stamp: usize = parse(field(&rec, "t", t)?, "t", t)?;
        if stamp != t {
            return Err(Error::Format(format!("record {t}: out of order (t = {stamp})")));
        }
        horizon = t;
        let sigma: Vec<Vec<Vec<f64>>> = parse(field(&rec, "sigma_t", t)?, "sigma_t", t)?;
        let beliefs = field(&rec, "belief", t)?.as_array().cloned().unwrap_or_default();
        if t > 0 {
            states.push(parse(field(&rec, "state", t)?, "state", t)?);
        }
        for (i, h) in players.iter_mut().enumerate() {
            if t > 0 {
                let at = |key: &str| -> Result<Value> {
                    field(&rec, key, t)?.get(i).cloned().ok_or_else(|| Error::Format(format!("record {t}: {key} per player")))
                };
                h.signals.push(parse(&at("s")?, "s", t)?);
                h.shocks.extend(parse::<Vec<f64>>(&at("xi")?, "xi", t)?);
                h.actions.push(parse(&at("x")?, "x", t)?);
                h.consequences.push(parse(&at("y")?, "y", t)?);
                h.outcomes.push(parse(&at("outcome")?, "outcome", t)?);
            }
            let rows = sigma.get(i).ok_or_else(|| Error::Format(format!("record {t}: sigma_t per player")))?;
            h.intended.extend(rows.iter().flatten());
            let b = beliefs.get(i).ok_or_else(|| Error::Format(format!("record {t}: belief per player")))?;
            match &mut h.beliefs {
                BeliefTrack::Conjugate { mean, variance } => {
                    mean.push(parse(field(b, "m", t)?, "m", t)?);
                    variance.push(parse(field(b, "tau2", t)?, "tau2", t)?);
                }
                BeliefTrack::Grid { mean, weight_periods, weights } => {
                    mean.push(parse(field(b, "mean", t)?, "mean", t)?);
                    if let Some(w) = b.get("weights") {
                        weight_periods.push(t);
                        weights.push(parse(w, "weights", t)?);
                    }
                }
            }
        }
    }
    for (h, pts) in players.iter_mut().zip(grid_points) {
        h.final_belief = match (&h.beliefs, pts) {
            (BeliefTrack::Conjugate { mean, variance }, _) => {
                PlayerBelief::Conjugate(ConjugateNormalBelief { mean: mean[horizon], variance: variance[horizon] })
            }
            (BeliefTrack::Grid { weights, .. }, Some(points)) => {
                let w = weights.last().ok_or_else(|| Error::Format("grid history without weights".into()))?;
                PlayerBelief::Grid(GridBelief::new(points, w)?)
            }
            _ => unreachable!("grid tracks carry points"),
        };
    }
    Ok(SimulationHistory {
        seed: parse(field(&first, "seed", 0)?, "seed", 0)?,
        config_hash: parse(field(&first, "config_hash", 0)?, "config_hash", 0)?,
        horizon,
        states,
        players,
    })
}
