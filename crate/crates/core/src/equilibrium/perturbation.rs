use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{halton, logistic_cdf, normal_cdf, normal_quantile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationFamily {
    /// Independent Gumbel shocks per action; the gap between two shocks is logistic.
    Logistic,
    /// Independent normal shocks per action with standard deviation `scale/√2`, so the gap
    /// between two shocks has standard deviation `scale`.
    Normal,
}

/// Additive i.i.d. payoff shocks, one per action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationStructure {
    pub family: PerturbationFamily,
    pub scale: f64,
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

impl PerturbationStructure {
    pub fn new(family: PerturbationFamily, scale: f64) -> Result<Self> {
        let p = Self { family, scale };
        p.check()?;
        Ok(p)
    }

    pub fn logistic(scale: f64) -> Result<Self> {
        Self::new(PerturbationFamily::Logistic, scale)
    }

    pub fn check(&self) -> Result<()> {
        if self.scale > 0.0 && self.scale.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidPerturbation(format!("scale must be positive, got {}", self.scale)))
        }
    }

    /// Distribution function of the shock gap `ξ(x₂) − ξ(x₁)`: probability that an
    /// action ahead by `gap` is chosen in a two-action problem.
    pub fn gap_cdf(&self, gap: f64) -> f64 {
        match self.family {
            PerturbationFamily::Logistic => logistic_cdf(gap / self.scale),
            PerturbationFamily::Normal => normal_cdf(gap / self.scale),
        }
    }

    /// Probability of each action being the perturbed argmax. Two actions and the
    /// logistic family are closed form; the normal family with more actions uses `n_mc`
    /// quasi-Monte-Carlo draws.
    pub fn choice_probabilities(&self, payoffs: &[f64], n_mc: usize) -> Vec<f64> {
        let n = payoffs.len();
        if n == 1 {
            return vec![1.0];
        }
        if n == 2 {
            let p0 = self.gap_cdf(payoffs[0] - payoffs[1]);
            return vec![p0, 1.0 - p0];
        }
        match self.family {
            PerturbationFamily::Logistic => {
                let top = payoffs.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
                let e: Vec<f64> = payoffs.iter().map(|u| ((u - top) / self.scale).exp()).collect();
                let z: f64 = e.iter().sum();
                e.iter().map(|v| v / z).collect()
            }
            PerturbationFamily::Normal => {
                let sd = self.scale / std::f64::consts::SQRT_2;
                let mut counts = vec![0usize; n];
                let mut shocked = vec![0.0; n];
                for i in 1..=n_mc as u64 {
                    let u = halton(i, n);
                    for k in 0..n {
                        shocked[k] = payoffs[k] + sd * normal_quantile(u[k]);
                    }
                    counts[argmax(&shocked)] += 1;
                }
                counts.iter().map(|c| *c as f64 / n_mc as f64).collect()
            }
        }
    }

    /// One shock per action.
    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        match self.family {
            PerturbationFamily::Logistic => (0..n)
                .map(|_| {
                    let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
                    -self.scale * (-u.ln()).ln() - self.scale * EULER_GAMMA
                })
                .collect(),
            PerturbationFamily::Normal => {
                let d = Normal::new(0.0, self.scale / std::f64::consts::SQRT_2).expect("positive scale");
                (0..n).map(|_| d.sample(rng)).collect()
            }
        }
    }
}

/// First index attaining the maximum (ties broken by label order).
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = k;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn two_actions_closed_form() {
        let p = PerturbationStructure::logistic(0.05).unwrap();
        assert_eq!(p.choice_probabilities(&[1.0, 1.0], 0), vec![0.5, 0.5]);
        let q = p.choice_probabilities(&[2.0, 1.0], 0);
        assert!((q[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn three_action_normal_vs_quadrature() {
        let p = PerturbationStructure::new(PerturbationFamily::Normal, 0.8).unwrap();
        let u = [0.3, 0.0, -0.2];
        let n = 20_000;
        let mc = p.choice_probabilities(&u, n);
        let sd = 0.8 / std::f64::consts::SQRT_2;
        for k in 0..3 {
            let exact = crate::numerics::integrate(
                |t| {
                    let mut v = crate::numerics::normal_pdf(t);
                    for j in 0..3 {
                        if j != k {
                            v *= normal_cdf((u[k] - u[j]) / sd + t);
                        }
                    }
                    v
                },
                -9.0,
                9.0,
                1e-12,
            );
            let se = (exact * (1.0 - exact) / n as f64).sqrt();
            assert!((mc[k] - exact).abs() <= 3.0 * se, "{k}: {} vs {exact}", mc[k]);
        }
    }

    #[test]
    fn gumbel_draws_have_logistic_gaps() {
        let p = PerturbationStructure::logistic(0.5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let wins = (0..n)
            .filter(|_| {
                let xi = p.draw(2, &mut rng);
                0.2 + xi[0] > xi[1]
            })
            .count();
        let expect = p.gap_cdf(0.2);
        let se = (expect * (1.0 - expect) / n as f64).sqrt();
        assert!((wins as f64 / n as f64 - expect).abs() < 4.0 * se);
    }

    #[test]
    fn rejects_nonpositive_scale() {
        assert!(PerturbationStructure::logistic(0.0).is_err());
    }
}
