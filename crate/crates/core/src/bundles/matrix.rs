//! Two-player games in normal form where each player knows the payoffs but not the
//! opponent's strategy.

use super::{ExampleBundle, Expected, Params};
use crate::error::Result;
use crate::game::ObjectiveGame;
use crate::subjective::{CategoricalKernel, CategoricalModel, ParameterDomain, SubjectiveModel};

/// `payoffs[i][x0][x1]` for player i. Each player observes the other's action.
pub fn two_player(payoffs: &[Vec<Vec<f64>>; 2]) -> (ObjectiveGame, Vec<SubjectiveModel>) {
    let n0 = payoffs[0].len();
    let n1 = payoffs[0][0].len();
    let sizes = [n0, n1];
    let labels = |n: usize| (0..n).map(|k| format!("a{k}")).collect::<Vec<_>>();
    let feedback = (0..2)
        .map(|i| vec![(0..n0 * n1).map(|k| Some(if i == 0 { k % n1 } else { k / n1 })).collect()])
        .collect();
    let payoff = (0..2)
        .map(|i| {
            (0..sizes[i])
                .map(|x| {
                    (0..sizes[1 - i])
                        .map(|y| if i == 0 { payoffs[0][x][y] } else { payoffs[1][y][x] })
                        .collect()
                })
                .collect()
        })
        .collect();
    let game = ObjectiveGame {
        players: vec!["row".into(), "column".into()],
        states: vec!["w".into()],
        signals: vec![vec!["none".into()], vec!["none".into()]],
        law: vec![1.0],
        actions: vec![labels(n0), labels(n1)],
        consequences: vec![labels(n1), labels(n0)],
        feedback,
        payoff,
    };
    let models = (0..2)
        .map(|i| {
            SubjectiveModel::Categorical(CategoricalModel {
                domain: ParameterDomain::Simplices { sizes: vec![sizes[1 - i]] },
                kernel: CategoricalKernel::OpponentStrategies,
            })
        })
        .collect();
    (game, models)
}

pub fn coordination(params: &Params) -> Result<ExampleBundle> {
    params.only(&["high", "low"])?;
    let (h, l) = (params.get("high", 2.0), params.get("low", 1.0));
    let table = vec![vec![h, 0.0], vec![0.0, l]];
    let (game, models) = two_player(&[table.clone(), table]);
    Ok(ExampleBundle {
        name: "coordination".into(),
        game,
        models,
        analogy: None,
        true_parameter: None,
        expected: vec![Expected::new(
            "equilibria are the Nash equilibria: both pure coordinations and one mixed profile",
            "correct specification with strong identification",
        )],
    })
}

pub fn prisoners(params: &Params) -> Result<ExampleBundle> {
    params.only(&[])?;
    let row = vec![vec![3.0, 0.0], vec![4.0, 1.0]];
    let column = vec![vec![3.0, 4.0], vec![0.0, 1.0]];
    let (game, models) = two_player(&[row, column]);
    Ok(ExampleBundle {
        name: "prisoners".into(),
        game,
        models,
        analogy: None,
        true_parameter: None,
        expected: vec![Expected::new("unique equilibrium: both defect", "strictly dominant action")],
    })
}
