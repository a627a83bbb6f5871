//! Single-agent problems with a binary outcome per action: the non-existence example
//! and a two-armed bandit.

use super::{ExampleBundle, Expected, Params};
use crate::error::Result;
use crate::game::{single_agent, ObjectiveGame};
use crate::subjective::{CategoricalKernel, CategoricalModel, ParameterDomain, SubjectiveModel};

/// Each state fixes the outcome of every action; outcomes are independent across actions
/// with `Pr(y = 1 | x) = success[x]`.
pub fn binary_game(actions: &[&str], success: &[f64], payoff: impl Fn(usize, usize) -> f64) -> ObjectiveGame {
    let n = actions.len();
    let n_states = 1usize << n;
    let bit = |w: usize, x: usize| (w >> (n - 1 - x)) & 1;
    let states = (0..n_states)
        .map(|w| (0..n).map(|x| bit(w, x).to_string()).collect::<Vec<_>>().join(""))
        .collect();
    let probs = (0..n_states)
        .map(|w| (0..n).map(|x| if bit(w, x) == 1 { success[x] } else { 1.0 - success[x] }).product())
        .collect();
    single_agent(
        states,
        probs,
        actions.iter().map(|s| s.to_string()).collect(),
        vec!["0".into(), "1".into()],
        |x, w| bit(w, x),
        payoff,
    )
}

/// Table model whose point `θ` gives `Pr(y = 1 | x) = θ[x]`.
pub fn binary_model(points: Vec<Vec<f64>>) -> SubjectiveModel {
    let tables = points.iter().map(|p| vec![p.iter().map(|q| vec![1.0 - q, *q]).collect()]).collect();
    SubjectiveModel::Categorical(CategoricalModel {
        domain: ParameterDomain::Points { points },
        kernel: CategoricalKernel::Table { tables },
    })
}

pub fn nonexistence(params: &Params) -> Result<ExampleBundle> {
    params.only(&[])?;
    let payoff = |x: usize, y: usize| match (x, y) {
        (0, 0) => 1.0,
        (0, _) => -1.0,
        _ => 0.75,
    };
    let game = binary_game(&["A", "B"], &[0.25, 0.75], payoff);
    Ok(ExampleBundle {
        name: "nonexistence".into(),
        game,
        models: vec![binary_model(vec![vec![0.0, 0.75], vec![0.25, 0.25]])],
        analogy: None,
        true_parameter: Some(vec![0.25, 0.75]),
        expected: vec![
            Expected::new("no equilibrium exists", "A fits only the second point, which makes B optimal"),
            Expected::new("observing y = 1 after A moves all mass to the second point", "zero likelihood"),
        ],
    })
}

pub const BANDIT_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

pub fn bandit(params: &Params) -> Result<ExampleBundle> {
    params.only(&["p0", "p1"])?;
    let truth = [params.get("p0", 0.3), params.get("p1", 0.7)];
    if truth.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(crate::Error::InvalidParams("arm probabilities must lie in [0, 1]".into()));
    }
    let game = binary_game(&["left", "right"], &truth, |_, y| y as f64);
    let points = BANDIT_GRID.iter().flat_map(|a| BANDIT_GRID.iter().map(move |b| vec![*a, *b])).collect();
    Ok(ExampleBundle {
        name: "bandit".into(),
        game,
        models: vec![binary_model(points)],
        analogy: None,
        true_parameter: Some(truth.to_vec()),
        expected: vec![Expected::new("posterior concentrates on the true arm means", "correct specification")],
    })
}
