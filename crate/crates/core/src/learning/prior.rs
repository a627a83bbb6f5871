use super::belief::{ConjugateNormalBelief, GridBelief};
use super::simulate::PlayerBelief;
use crate::error::{Error, Result};
use crate::subjective::{ParameterDomain, SubjectiveModel};

/// Largest grid a default prior spreads over.
pub const MAX_PRIOR_ATOMS: usize = 4096;

/// Compositions of `k` into `n` nonnegative parts, scaled to the simplex.
fn simplex_lattice(n: usize, k: usize) -> Vec<Vec<f64>> {
    fn rec(n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=left {
            cur.push(v);
            rec(n, left - v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::new(), &mut out);
    out.into_iter().map(|c| c.into_iter().map(|v| v as f64 / k as f64).collect()).collect()
}

fn product(blocks: &[Vec<Vec<f64>>]) -> Vec<Vec<f64>> {
    blocks.iter().fold(vec![Vec::new()], |acc, block| {
        acc.iter()
            .flat_map(|a| block.iter().map(move |b| a.iter().chain(b).copied().collect()))
            .collect()
    })
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// A uniform prior over the model's parameter space: the finite domain itself, a normal
/// prior (mean at the centre, sd a quarter of the width) for scalar gaussian-mean models,
/// and otherwise the finest regular grid with at most [`MAX_PRIOR_ATOMS`] points.
pub fn default_prior(model: &SubjectiveModel) -> Result<PlayerBelief> {
    let domain = match model {
        SubjectiveModel::Categorical(m) => &m.domain,
        SubjectiveModel::GaussianMean(m) => &m.domain,
    };
    let points = match domain {
        ParameterDomain::Points { points } => points.clone(),
        ParameterDomain::Box { lower, upper } => {
            if let (SubjectiveModel::GaussianMean(_), 1) = (model, lower.len()) {
                let width = upper[0] - lower[0];
                return Ok(PlayerBelief::Conjugate(ConjugateNormalBelief::new(
                    0.5 * (lower[0] + upper[0]),
                    (width / 4.0).powi(2),
                )?));
            }
            let d = lower.len() as u32;
            let mut n = 2usize;
            while (n + 1).pow(d) <= MAX_PRIOR_ATOMS {
                n += 1;
            }
            let axes: Vec<Vec<Vec<f64>>> = lower
                .iter()
                .zip(upper)
                .map(|(l, u)| (0..n).map(|k| vec![l + (u - l) * k as f64 / (n - 1) as f64]).collect())
                .collect();
            product(&axes)
        }
        ParameterDomain::Simplices { sizes } => {
            let count = |k: usize| sizes.iter().map(|&s| binomial(k + s - 1, s - 1)).fold(1usize, usize::saturating_mul);
            let mut k = 1;
            while count(k + 1) <= MAX_PRIOR_ATOMS {
                k += 1;
            }
            let blocks: Vec<Vec<Vec<f64>>> = sizes.iter().map(|&s| simplex_lattice(s, k)).collect();
            product(&blocks)
        }
    };
    if points.is_empty() {
        return Err(Error::InvalidModel("empty parameter space".into()));
    }
    Ok(PlayerBelief::Grid(GridBelief::uniform(points)?))
}
