//! Ready-to-run games and models with closed-form oracles.

pub mod binary;
pub mod matrix;
pub mod monetary;
pub mod monopoly;
pub mod regression;
pub mod taxation;
pub mod trading;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::equilibrium::AnalogyStructure;
use crate::error::{Error, Result};
use crate::game::ObjectiveGame;
use crate::subjective::{GaussianMeanModel, SubjectiveModel};

pub use monetary::{solve_monetary, MonetaryParams};
pub use monopoly::oracle_monopoly_minimizer;
pub use regression::{oracle_regression_cutoff, oracle_regression_thetas};
pub use taxation::{oracle_taxation_efforts, oracle_taxation_thetas, TaxEfforts, TaxSchedule, TaxThetas};
pub use trading::{instance as trading_instance, oracle_trading_equilibria, oracle_trading_minimizer, oracle_trading_pi, TradingInstance, TradingVariant};

/// A documented expectation about a bundle and what it rests on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub statement: String,
    pub basis: String,
}

impl Expected {
    pub fn new(statement: &str, basis: &str) -> Self {
        Self { statement: statement.into(), basis: basis.into() }
    }
}

/// A game with its players' subjective models; also the on-disk game document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleBundle {
    #[serde(default)]
    pub name: String,
    pub game: ObjectiveGame,
    pub models: Vec<SubjectiveModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analogy: Option<AnalogyStructure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_parameter: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expected: Vec<Expected>,
}

/// Named numeric parameters, e.g. `kappa=0.5`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(pub BTreeMap<String, f64>);

impl Params {
    pub fn parse(pairs: &[String]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for p in pairs {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::InvalidParams(format!("expected key=value, got `{p}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParams(format!("`{v}` is not a number")))?;
            map.insert(k.trim().to_string(), v);
        }
        Ok(Self(map))
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.0.insert(key.into(), value);
        self
    }

    pub fn get(&self, key: &str, default: f64) -> f64 {
        self.0.get(key).copied().unwrap_or(default)
    }

    fn only(&self, allowed: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::InvalidParams(format!("unknown parameter `{k}`"))),
            None => Ok(()),
        }
    }
}

pub const NAMES: [&str; 14] = [
    "monopoly",
    "monopoly-slope",
    "taxation-a",
    "taxation-b",
    "regression",
    "monetary",
    "trading-ce",
    "trading-be",
    "trading-abee",
    "trading-bea",
    "nonexistence",
    "bandit",
    "coordination",
    "prisoners",
];

pub fn list() -> &'static [&'static str] {
    &NAMES
}

pub fn build(name: &str, params: &Params) -> Result<ExampleBundle> {
    let bundle = match name {
        "monopoly" => monopoly::build(params)?,
        "monopoly-slope" => monopoly::build_slope(params)?,
        "taxation-a" | "taxation-b" => taxation::build(name, params)?,
        "regression" => regression::build(params)?,
        "monetary" => monetary::build(params)?,
        "trading-ce" | "trading-be" | "trading-abee" | "trading-bea" => trading::build(name, params)?,
        "nonexistence" => binary::nonexistence(params)?,
        "bandit" => binary::bandit(params)?,
        "coordination" => matrix::coordination(params)?,
        "prisoners" => matrix::prisoners(params)?,
        _ => return Err(Error::UnknownExample(name.into())),
    };
    crate::game::ensure_valid(&bundle.game)?;
    Ok(bundle)
}

/// Single-agent game whose consequences are the covariates of a gaussian-mean model and
/// whose payoffs are the cells' expected payoffs at the true means.
pub(crate) fn reduced_single_agent(
    player: &str,
    states: Vec<String>,
    state_probs: Vec<f64>,
    actions: Vec<String>,
    consequences: Vec<String>,
    feedback: impl Fn(usize, usize) -> usize,
    model: &GaussianMeanModel,
) -> ObjectiveGame {
    let table = model.payoff_table();
    let mut game = crate::game::single_agent(states, state_probs, actions, consequences, feedback, |x, y| table[x][y]);
    game.players = vec![player.into()];
    game
}
