//! Effort choice under a nonlinear tax schedule, believed to be either a random
//! proportional rate (model A) or an affine schedule (model B).

use serde::{Deserialize, Serialize};

use super::{ExampleBundle, Expected, Params};
use crate::error::{Error, Result};
use crate::numerics::{bisect, integrate, normal_pdf};
use crate::subjective::{GaussianCell, GaussianMeanModel, ParameterDomain, SubjectiveModel};

pub const SHOCK_SD: f64 = 0.25;
pub const SHOCK_BOUND: f64 = 0.5;
pub const SHOCK_STEP: f64 = 0.02;
pub const EFFORT_MIN: f64 = 0.6;
pub const EFFORT_MAX: f64 = 1.2;
pub const EFFORT_STEP: f64 = 0.001;

/// Polynomial tax schedule `τ(z) = Σ coeffs[k] z^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxSchedule {
    pub coeffs: Vec<f64>,
}

impl TaxSchedule {
    pub fn linear(rate: f64) -> Self {
        Self { coeffs: vec![0.0, rate] }
    }

    pub fn quadratic(alpha: f64) -> Self {
        Self { coeffs: vec![0.0, 0.0, alpha] }
    }

    pub fn tax(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }

    pub fn marginal(&self, z: f64) -> f64 {
        self.coeffs.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, c)| acc * z + k as f64 * c)
    }

    /// Rejects schedules that decrease somewhere on `[lo, hi]`.
    pub fn check_increasing(&self, lo: f64, hi: f64) -> Result<()> {
        for k in 0..=400 {
            let z = lo + (hi - lo) * k as f64 / 400.0;
            if self.marginal(z) < 0.0 {
                return Err(Error::InvalidSchedule(format!("tax schedule decreases at z = {z}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaxThetas {
    /// Fitted proportional rate in model A.
    pub theta_a: f64,
    pub theta_b1: f64,
    /// Fitted marginal rate in model B, as the regression slope.
    pub theta_b2: f64,
    /// `E[τ'(x + W)]`, equal to `theta_b2` when Stein's identity applies.
    pub theta_b2_stein: f64,
}

fn shock_mass() -> f64 {
    integrate(|w| normal_pdf(w / SHOCK_SD) / SHOCK_SD, -SHOCK_BOUND, SHOCK_BOUND, 1e-14)
}

fn shock_mean(f: impl Fn(f64) -> f64, mass: f64) -> f64 {
    integrate(|w| f(w) * normal_pdf(w / SHOCK_SD) / SHOCK_SD, -SHOCK_BOUND, SHOCK_BOUND, 1e-14) / mass
}

/// Fitted parameters at effort `x`, with the shock normal with sd 0.25 truncated to ±0.5.
pub fn oracle_taxation_thetas(schedule: &TaxSchedule, x: f64) -> Result<TaxThetas> {
    if x - SHOCK_BOUND <= 0.0 {
        return Err(Error::InvalidParams(format!("effort {x} allows nonpositive income")));
    }
    schedule.check_increasing(x - SHOCK_BOUND, x + SHOCK_BOUND)?;
    let mass = shock_mass();
    let mean = |f: &dyn Fn(f64) -> f64| shock_mean(f, mass);
    let theta_a = mean(&|w| schedule.tax(x + w) / (x + w));
    let ez = x + mean(&|w| w);
    let et = mean(&|w| schedule.tax(x + w));
    let var = mean(&|w| (x + w - ez).powi(2));
    let cov = mean(&|w| (schedule.tax(x + w) - et) * (x + w - ez));
    let theta_b2 = cov / var;
    Ok(TaxThetas {
        theta_a,
        theta_b1: et - theta_b2 * ez,
        theta_b2,
        theta_b2_stein: mean(&|w| schedule.marginal(x + w)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaxEfforts {
    pub optimal: f64,
    pub model_a: f64,
    pub model_b: f64,
}

/// Efforts on the continuum with cost `x²/2`: the true optimum and the two equilibria.
pub fn oracle_taxation_efforts(schedule: &TaxSchedule) -> Result<TaxEfforts> {
    let (lo, hi) = (EFFORT_MIN, EFFORT_MAX);
    let mass = shock_mass();
    let optimal = bisect(|x| 1.0 - shock_mean(|w| schedule.marginal(x + w), mass) - x, lo, hi, 1e-12)?;
    let model_a = bisect(|x| 1.0 - oracle_taxation_thetas(schedule, x).map_or(f64::NAN, |t| t.theta_a) - x, lo, hi, 1e-12)?;
    let model_b = bisect(|x| 1.0 - oracle_taxation_thetas(schedule, x).map_or(f64::NAN, |t| t.theta_b2) - x, lo, hi, 1e-12)?;
    Ok(TaxEfforts { optimal, model_a, model_b })
}

/// Shock nodes every 0.02 on [−0.5, 0.5] with normalized normal weights.
pub fn shock_grid() -> (Vec<f64>, Vec<f64>) {
    let n = (2.0 * SHOCK_BOUND / SHOCK_STEP).round() as usize + 1;
    let nodes: Vec<f64> = (0..n).map(|k| -SHOCK_BOUND + SHOCK_STEP * k as f64).collect();
    let raw: Vec<f64> = nodes.iter().map(|w| normal_pdf(w / SHOCK_SD)).collect();
    let total: f64 = raw.iter().sum();
    (nodes, raw.into_iter().map(|w| w / total).collect())
}

pub fn effort_grid() -> Vec<f64> {
    let n = ((EFFORT_MAX - EFFORT_MIN) / EFFORT_STEP).round() as usize + 1;
    (0..n).map(|k| EFFORT_MIN + EFFORT_STEP * k as f64).collect()
}

pub fn build(name: &str, params: &Params) -> Result<ExampleBundle> {
    params.only(&["alpha"])?;
    let alpha = params.get("alpha", 0.1);
    if !(alpha >= 0.0) {
        return Err(Error::InvalidSchedule(format!("alpha must be nonnegative, got {alpha}")));
    }
    let schedule = TaxSchedule::quadratic(alpha);
    let model_a = match name {
        "taxation-a" => true,
        "taxation-b" => false,
        _ => return Err(Error::UnknownExample(name.into())),
    };
    let (nodes, weights) = shock_grid();
    let efforts = effort_grid();
    let cells = efforts
        .iter()
        .map(|&x| {
            nodes
                .iter()
                .map(|&w| {
                    let z = x + w;
                    let base = z - 0.5 * x * x;
                    if model_a {
                        GaussianCell { true_mean: schedule.tax(z) / z, offset: 0.0, features: vec![1.0], payoff: [base, -z, 0.0] }
                    } else {
                        GaussianCell { true_mean: schedule.tax(z), offset: 0.0, features: vec![1.0, z], payoff: [base, -1.0, 0.0] }
                    }
                })
                .collect()
        })
        .collect();
    let d = if model_a { 1 } else { 2 };
    let model = GaussianMeanModel { domain: ParameterDomain::Box { lower: vec![-10.0; d], upper: vec![10.0; d] }, cells };
    let game = super::reduced_single_agent(
        "agent",
        nodes.iter().map(|w| format!("{w:.2}")).collect(),
        weights,
        efforts.iter().map(|x| format!("{x:.3}")).collect(),
        nodes.iter().map(|w| format!("{w:.2}")).collect(),
        |_, w| w,
        &model,
    );
    let expected = if model_a {
        vec![Expected::new("effort 1/(1 + α) exceeds the optimum 1/(1 + 2α)", "average rate mistaken for the marginal rate")]
    } else {
        vec![Expected::new("effort equals the optimum 1/(1 + 2α)", "fitted slope equals the mean marginal rate")]
    };
    Ok(ExampleBundle {
        name: name.into(),
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
    fn linear_schedule_rates_agree() {
        let t = oracle_taxation_thetas(&TaxSchedule::linear(0.3), 0.9).unwrap();
        assert!((t.theta_a - 0.3).abs() < 1e-10);
        assert!((t.theta_b2 - 0.3).abs() < 1e-10);
    }

    #[test]
    fn decreasing_schedule_rejected() {
        let s = TaxSchedule { coeffs: vec![0.0, 1.0, -1.0] };
        assert!(matches!(oracle_taxation_thetas(&s, 0.9), Err(Error::InvalidSchedule(_))));
    }

    #[test]
    fn quadratic_efforts() {
        let e = oracle_taxation_efforts(&TaxSchedule::quadratic(0.1)).unwrap();
        assert!((e.optimal - 1.0 / 1.2).abs() < 1e-9);
        assert!((e.model_b - e.optimal).abs() < 1e-9);
        assert!((e.model_a - 1.0 / 1.1).abs() < 1e-9);
    }
}
