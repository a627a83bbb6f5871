use serde::{Deserialize, Serialize};

use super::minimize::{minimize, MinimizerConfig, MinimizerSet};
use super::model::{PlayerModel, SubjectiveModel};
use super::wkld::Wkld;
use crate::error::Result;
use crate::game::{ObjectiveGame, StrategyProfile};

const MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecificationReport {
    pub correctly_specified: bool,
    pub weakly_identified: bool,
    pub strongly_identified: bool,
    pub minimizers: MinimizerSet,
}

/// Per-cell subjective distributions of θ flattened to comparable numbers: outcome
/// probabilities for categorical models, outcome means for gaussian-mean models.
/// Returns `(values, on_path)` aligned entry by entry.
fn signature(w: &Wkld<'_, '_>, theta: &[f64]) -> Result<Vec<(f64, bool, f64)>> {
    let pm = w.player_model();
    let mut out = Vec::new();
    match pm.gaussian() {
        Some(g) => {
            let cov = pm.covariates().expect("covariates");
            for (s, rows) in cov.probs.iter().enumerate() {
                for (x, qy) in rows.iter().enumerate() {
                    let on = w.weights()[s][x] > 0.0;
                    for (y, q) in qy.iter().enumerate() {
                        if *q > 0.0 {
                            let cell = &g.cells[x][y];
                            out.push((cell.mean(theta), on, cell.true_mean));
                        }
                    }
                }
            }
        }
        None => {
            let table = pm.kernel_table_unchecked(theta)?;
            for (s, rows) in table.probs.iter().enumerate() {
                for (x, qy) in rows.iter().enumerate() {
                    let on = w.weights()[s][x] > 0.0;
                    for (y, q) in qy.iter().enumerate() {
                        out.push((*q, on, w.objective().probs[s][x][y]));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Correct specification and identification given σ.
pub fn diagnose(
    game: &ObjectiveGame,
    model: &SubjectiveModel,
    sigma: &StrategyProfile,
    player: usize,
    cfg: &MinimizerConfig,
) -> Result<SpecificationReport> {
    let pm = PlayerModel::new(game, model, player)?;
    let w = Wkld::new(&pm, sigma)?;
    let minimizers = minimize(&w, cfg)?;
    let sigs: Vec<Vec<(f64, bool, f64)>> =
        minimizers.points.iter().map(|p| signature(&w, p)).collect::<Result<_>>()?;
    let correctly_specified = sigs
        .iter()
        .any(|sig| sig.iter().all(|(v, _, truth)| (v - truth).abs() <= MATCH_TOL));
    let agree = |on_path_only: bool| {
        sigs.iter().skip(1).all(|sig| {
            sig.iter()
                .zip(&sigs[0])
                .filter(|(a, _)| a.1 || !on_path_only)
                .all(|(a, b)| (a.0 - b.0).abs() <= MATCH_TOL)
        })
    };
    Ok(SpecificationReport {
        correctly_specified,
        weakly_identified: agree(true),
        strongly_identified: agree(false),
        minimizers,
    })
}
