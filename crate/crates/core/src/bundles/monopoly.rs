//! Monopolist with unknown linear demand: prices {2, 10}, true demand 42 − 4x plus unit
//! noise, believed demand a − bx with (a, b) in [33, 40] × [3, 3.5].

use super::{reduced_single_agent, ExampleBundle, Expected, Params};
use crate::error::{Error, Result};
use crate::subjective::{GaussianCell, GaussianMeanModel, ParameterDomain, SubjectiveModel};

pub const PRICES: [f64; 2] = [2.0, 10.0];
pub const TRUE_INTERCEPT: f64 = 42.0;
pub const TRUE_SLOPE: f64 = 4.0;

fn demand_game(name: &str, model: GaussianMeanModel) -> (crate::game::ObjectiveGame, SubjectiveModel) {
    let game = reduced_single_agent(
        name,
        vec!["w".into()],
        vec![1.0],
        PRICES.iter().map(|p| format!("{p}")).collect(),
        vec!["demand".into()],
        |_, _| 0,
        &model,
    );
    (game, SubjectiveModel::GaussianMean(model))
}

pub fn build(params: &Params) -> Result<ExampleBundle> {
    params.only(&[])?;
    let cells = PRICES
        .iter()
        .map(|&x| {
            vec![GaussianCell {
                true_mean: TRUE_INTERCEPT - TRUE_SLOPE * x,
                offset: 0.0,
                features: vec![1.0, -x],
                payoff: [0.0, x, 0.0],
            }]
        })
        .collect();
    let model = GaussianMeanModel {
        domain: ParameterDomain::Box { lower: vec![33.0, 3.0], upper: vec![40.0, 3.5] },
        cells,
    };
    let (game, model) = demand_game("monopolist", model);
    Ok(ExampleBundle {
        name: "monopoly".into(),
        game,
        models: vec![model],
        analogy: None,
        true_parameter: Some(vec![TRUE_INTERCEPT, TRUE_SLOPE]),
        expected: vec![
            Expected::new("unique equilibrium σ = (35/36, 1/36)", "closed-form minimizer and indifference"),
            Expected::new("supporting belief (a, b) = (40, 10/3)", "closed-form minimizer"),
            Expected::new("pure price 10 is not an equilibrium", "minimizers on a segment make price 2 better"),
        ],
    })
}

/// The learning variant: the intercept is known (`a`, default 40) and only the slope
/// is learned.
pub fn build_slope(params: &Params) -> Result<ExampleBundle> {
    params.only(&["a"])?;
    let a = params.get("a", 40.0);
    let cells = PRICES
        .iter()
        .map(|&x| {
            vec![GaussianCell {
                true_mean: TRUE_INTERCEPT - TRUE_SLOPE * x,
                offset: a,
                features: vec![-x],
                payoff: [0.0, x, 0.0],
            }]
        })
        .collect();
    let model = GaussianMeanModel { domain: ParameterDomain::Box { lower: vec![0.0], upper: vec![10.0] }, cells };
    let (game, model) = demand_game("monopolist", model);
    Ok(ExampleBundle {
        name: "monopoly-slope".into(),
        game,
        models: vec![model],
        analogy: None,
        true_parameter: Some(vec![TRUE_SLOPE]),
        expected: vec![Expected::new(
            "posterior mean of the slope → 10/3 and price 10 frequency → 1/36 as the perturbation vanishes",
            "mean dynamics steady state",
        )],
    })
}

/// Closest (a, b) when price 2 is played with probability `sigma2`.
pub fn oracle_monopoly_minimizer(sigma2: f64) -> Result<[f64; 2]> {
    if !(sigma2 > 0.0 && sigma2 < 1.0) {
        return Err(Error::InvalidParams(format!(
            "price-2 probability must lie in (0, 1), got {sigma2}; pure strategies have a segment of minimizers"
        )));
    }
    Ok(if sigma2 <= 0.75 {
        [4.0 * sigma2 + 37.0, 3.5]
    } else if sigma2 <= 15.0 / 16.0 {
        [40.0, 3.5]
    } else {
        [40.0, (380.0 - 368.0 * sigma2) / (100.0 - 96.0 * sigma2)]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_branches_meet() {
        let a = oracle_monopoly_minimizer(0.5).unwrap();
        assert_eq!(a, [39.0, 3.5]);
        let knot = oracle_monopoly_minimizer(0.75).unwrap();
        assert_eq!(knot, [40.0, 3.5]);
        let eq = oracle_monopoly_minimizer(35.0 / 36.0).unwrap();
        assert!((eq[1] - 10.0 / 3.0).abs() < 1e-12);
        assert!(oracle_monopoly_minimizer(1.0).is_err());
        assert!(oracle_monopoly_minimizer(0.0).is_err());
    }
}
