//! A government sets inflation policy believing unemployment responds to actual rather
//! than surprise inflation; the public forecasts correctly.

use super::{ExampleBundle, Expected, Params};
use crate::equilibrium::{solve, EquilibriumCertificate, EquilibriumConfig};
use crate::error::{Error, Result};
use crate::numerics::gauss_hermite_normal_7;
use crate::subjective::{GaussianCell, GaussianMeanModel, ParameterDomain, SubjectiveModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonetaryParams {
    pub u_star: f64,
    pub lambda: f64,
    pub sd_e: f64,
    pub x_public: f64,
    pub x_max: f64,
    pub step: f64,
}

impl MonetaryParams {
    pub fn from_params(params: &Params) -> Result<Self> {
        params.only(&["u_star", "lambda", "sd_e", "x_public", "x_max", "step"])?;
        let p = Self {
            u_star: params.get("u_star", 5.0),
            lambda: params.get("lambda", 0.5),
            sd_e: params.get("sd_e", 1.0),
            x_public: params.get("x_public", 0.0),
            x_max: params.get("x_max", 5.0),
            step: params.get("step", 0.005),
        };
        if !(p.u_star > 0.0) {
            return Err(Error::InvalidParams("u_star must be positive".into()));
        }
        if !(p.lambda > 0.0 && p.lambda < 1.0) {
            return Err(Error::InvalidParams("lambda must lie in (0, 1)".into()));
        }
        if !(p.sd_e > 0.0 && p.step > 0.0 && p.x_max > 0.0) {
            return Err(Error::InvalidParams("sd_e, step and x_max must be positive".into()));
        }
        Ok(p)
    }

    pub fn policies(&self) -> Vec<f64> {
        let n = (self.x_max / self.step).round() as usize + 1;
        (0..n).map(|k| k as f64 * self.step).collect()
    }
}

pub fn build(params: &Params) -> Result<ExampleBundle> {
    build_with(&MonetaryParams::from_params(params)?)
}

pub fn build_with(p: &MonetaryParams) -> Result<ExampleBundle> {
    let (nodes, weights) = gauss_hermite_normal_7();
    let shocks: Vec<f64> = nodes.iter().map(|n| p.sd_e * n).collect();
    let policies = p.policies();
    let cells = policies
        .iter()
        .map(|&x| {
            shocks
                .iter()
                .map(|&s| {
                    let e = x + s;
                    GaussianCell {
                        true_mean: p.u_star - p.lambda * (e - p.x_public),
                        offset: 0.0,
                        features: vec![1.0, -e],
                        payoff: [-e * e, 0.0, -1.0],
                    }
                })
                .collect()
        })
        .collect();
    let model = GaussianMeanModel { domain: ParameterDomain::Box { lower: vec![-10.0; 2], upper: vec![10.0; 2] }, cells };
    let labels: Vec<String> = shocks.iter().map(|s| format!("{s:.6}")).collect();
    let game = super::reduced_single_agent(
        "government",
        labels.clone(),
        weights.to_vec(),
        policies.iter().map(|x| format!("{x:.3}")).collect(),
        labels,
        |_, w| w,
        &model,
    );
    Ok(ExampleBundle {
        name: "monetary".into(),
        game,
        models: vec![SubjectiveModel::GaussianMean(model)],
        analogy: None,
        true_parameter: Some(vec![p.u_star + p.lambda * p.x_public, p.lambda]),
        expected: vec![
            Expected::new("correctly specified and strongly identified at every public forecast", "θ = (u* + λx^P, λ) reproduces the truth"),
            Expected::new("equilibrium policy λu*", "equivalence with Nash under correct specification"),
        ],
    })
}

/// Government equilibrium with the public's forecast equal to the policy, found by
/// iterating the forecast on the government's equilibrium policy.
pub fn solve_monetary(p: &MonetaryParams, cfg: &EquilibriumConfig) -> Result<(f64, EquilibriumCertificate)> {
    let mut params = *p;
    let policies = p.policies();
    for _ in 0..60 {
        let bundle = build_with(&params)?;
        let out = solve(&bundle.game, &bundle.models, cfg)?;
        let cert = out
            .certificates
            .into_iter()
            .next()
            .ok_or_else(|| Error::InvalidModel("no government equilibrium at this forecast".into()))?;
        let row = &cert.strategy.0[0][0];
        let x: f64 = row.iter().zip(&policies).map(|(s, x)| s * x).sum();
        if (x - params.x_public).abs() <= 0.5 * p.step {
            return Ok((x, cert));
        }
        params.x_public = x;
    }
    Err(Error::InvalidModel("forecast iteration did not settle".into()))
}
