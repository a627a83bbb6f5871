//! Instructor who praises or criticizes after a first performance and ignores regression
//! to the mean.

use super::{ExampleBundle, Expected, Params};
use crate::error::{Error, Result};
use crate::game::ObjectiveGame;
use crate::numerics::{bisect, normal_cdf, normal_pdf};
use crate::subjective::{GaussianCell, GaussianMeanModel, ParameterDomain, SubjectiveModel};

pub const SIGNAL_MIN: f64 = -4.0;
pub const SIGNAL_STEP: f64 = 0.05;
pub const SIGNAL_COUNT: usize = 161;

/// `(θ_C, θ_P)` fitted when the instructor criticizes exactly below `sigma`.
pub fn oracle_regression_thetas(sigma: f64) -> (f64, f64) {
    let (pdf, cdf) = (normal_pdf(sigma), normal_cdf(sigma));
    (pdf / cdf, -pdf / normal_cdf(-sigma))
}

/// Cutoff `σ` with `σ = (θ_C(σ) − θ_P(σ))/κ`.
///
/// `θ_C − θ_P` exceeds `σ` everywhere (the inverse Mills ratio bounds it), so a finite
/// cutoff exists only for `κ > 1`; otherwise the bracket error reports the search range.
pub fn oracle_regression_cutoff(kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidParams(format!("kappa must be positive, got {kappa}")));
    }
    let g = |s: f64| {
        let (c, p) = oracle_regression_thetas(s);
        s - (c - p) / kappa
    };
    bisect(g, 0.0, 30.0, 1e-13)
}

/// Signal grid and its normalized standard-normal weights.
pub fn signal_grid() -> (Vec<f64>, Vec<f64>) {
    let nodes: Vec<f64> = (0..SIGNAL_COUNT).map(|k| SIGNAL_MIN + SIGNAL_STEP * k as f64).collect();
    let raw: Vec<f64> = nodes.iter().map(|s| normal_pdf(*s)).collect();
    let total: f64 = raw.iter().sum();
    (nodes, raw.into_iter().map(|w| w / total).collect())
}

pub fn build(params: &Params) -> Result<ExampleBundle> {
    params.only(&["kappa"])?;
    let kappa = params.get("kappa", 2.0);
    if !(kappa > 0.0) {
        return Err(Error::InvalidParams(format!("kappa must be positive, got {kappa}")));
    }
    let (nodes, weights) = signal_grid();
    let n = nodes.len();
    let cost = |x: usize, s: f64| match x {
        0 if s > 0.0 => kappa * s,
        1 if s < 0.0 => -kappa * s,
        _ => 0.0,
    };
    let cells: Vec<Vec<GaussianCell>> = (0..2)
        .map(|x| {
            nodes
                .iter()
                .map(|&s| GaussianCell {
                    true_mean: 0.0,
                    offset: s,
                    features: if x == 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] },
                    payoff: [-cost(x, s), 1.0, 0.0],
                })
                .collect()
        })
        .collect();
    let model = GaussianMeanModel {
        domain: ParameterDomain::Box { lower: vec![-10.0; 2], upper: vec![10.0; 2] },
        cells,
    };
    let labels: Vec<String> = nodes.iter().map(|s| format!("{s:.2}")).collect();
    let mut law = vec![0.0; n * n];
    for k in 0..n {
        law[k * n + k] = weights[k];
    }
    let table = model.payoff_table();
    let game = ObjectiveGame {
        players: vec!["instructor".into()],
        states: labels.clone(),
        signals: vec![labels.clone()],
        law,
        actions: vec![vec!["criticize".into(), "praise".into()]],
        consequences: vec![labels],
        feedback: vec![(0..n).map(|w| vec![Some(w); 2]).collect()],
        payoff: vec![table],
    };
    let mut expected = vec![Expected::new("θ_C > 0 > θ_P at every cutoff", "conditional means of a truncated normal")];
    match oracle_regression_cutoff(kappa) {
        Ok(c) => expected.push(Expected::new(&format!("criticize below the cutoff {c:.6}"), "fixed point of the indifference condition")),
        Err(_) => expected.push(Expected::new("always criticize", "no finite cutoff when kappa ≤ 1")),
    }
    Ok(ExampleBundle {
        name: "regression".into(),
        game,
        models: vec![SubjectiveModel::GaussianMean(model)],
        analogy: None,
        true_parameter: None,
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thetas_at_zero() {
        let (c, p) = oracle_regression_thetas(0.0);
        let r = (2.0 / std::f64::consts::PI).sqrt();
        assert!((c - r).abs() < 1e-12 && (p + r).abs() < 1e-12);
    }

    #[test]
    fn cutoff_exists_only_above_one() {
        let s = oracle_regression_cutoff(2.0).unwrap();
        let (c, p) = oracle_regression_thetas(s);
        assert!((s - (c - p) / 2.0).abs() < 1e-10);
        assert!(matches!(oracle_regression_cutoff(1.0), Err(Error::Bracket { .. })));
        assert!(oracle_regression_cutoff(0.0).is_err());
    }
}
