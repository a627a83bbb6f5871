//! Bilateral trade with adverse selection: a buyer bids against a random ask, and the
//! value is correlated with the ask.

use serde::{Deserialize, Serialize};

use super::{ExampleBundle, Expected, Params};
use crate::equilibrium::{AnalogyStructure, NatureSplit};
use crate::error::{Error, Result};
use crate::game::ObjectiveGame;
use crate::subjective::{CategoricalKernel, CategoricalModel, ParameterDomain, SubjectiveModel, TradingFeedback, TradingKernel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradingInstance {
    pub asks: Vec<f64>,
    pub values: Vec<f64>,
    /// `law[a][v]`.
    pub law: Vec<Vec<f64>>,
    pub prices: Vec<f64>,
    pub feedback: TradingFeedback,
    /// Analogy class of each value.
    pub classes: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TradingVariant {
    Ne,
    Ce,
    Be,
    Abee,
    Bea,
}

impl TradingInstance {
    /// The correlated 3×3 instance used throughout the tests and examples.
    pub fn canonical() -> Self {
        Self {
            asks: vec![1.0, 2.0, 3.0],
            values: vec![0.0, 2.0, 4.0],
            law: vec![vec![0.15, 0.10, 0.05], vec![0.10, 0.15, 0.10], vec![0.05, 0.10, 0.20]],
            prices: vec![0.0, 1.0, 2.0, 3.0],
            feedback: TradingFeedback::Full,
            classes: None,
        }
    }

    pub fn check(&self) -> Result<()> {
        let (na, nv) = (self.asks.len(), self.values.len());
        if na == 0 || nv == 0 || self.prices.is_empty() {
            return Err(Error::InvalidParams("asks, values and prices must be nonempty".into()));
        }
        if self.law.len() != na || self.law.iter().any(|r| r.len() != nv) {
            return Err(Error::InvalidParams("law must be asks × values".into()));
        }
        let total: f64 = self.law.iter().flatten().sum();
        if self.law.iter().flatten().any(|p| *p < 0.0 || !p.is_finite()) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParams(format!("law must be a distribution, sums to {total}")));
        }
        if let Some(c) = &self.classes {
            let k = c.iter().max().map_or(0, |m| m + 1);
            if c.len() != nv || (0..k).any(|j| !c.contains(&j)) {
                return Err(Error::InvalidParams("classes must label every value and leave none empty".into()));
            }
        }
        Ok(())
    }

    fn kernel(&self) -> TradingKernel {
        TradingKernel {
            asks: self.asks.clone(),
            values: self.values.clone(),
            prices: self.prices.clone(),
            feedback: self.feedback,
            classes: self.classes.clone(),
        }
    }

    fn class_list(&self) -> Vec<usize> {
        self.classes.clone().unwrap_or_else(|| vec![0; self.values.len()])
    }

    fn mass(&self, mut keep: impl FnMut(usize, usize) -> bool) -> f64 {
        let mut m = 0.0;
        for (a, row) in self.law.iter().enumerate() {
            for (v, p) in row.iter().enumerate() {
                if keep(a, v) {
                    m += p;
                }
            }
        }
        m
    }

    fn value_mass(&self, keep: impl Fn(usize, usize) -> bool) -> f64 {
        let mut m = 0.0;
        for (a, row) in self.law.iter().enumerate() {
            for (v, p) in row.iter().enumerate() {
                if keep(a, v) {
                    m += p * self.values[v];
                }
            }
        }
        m
    }

    fn conditional_value(&self, keep: impl Fn(usize, usize) -> bool + Copy) -> Result<f64> {
        let m = self.mass(keep);
        if m <= 0.0 {
            return Err(Error::NullEvent("no trade at the settled price".into()));
        }
        Ok(self.value_mass(keep) / m)
    }

    fn trades(&self, a: usize, x: usize) -> bool {
        self.asks[a] <= self.prices[x]
    }

    /// Single-agent game over states (a, v) with the instance's feedback.
    pub fn game(&self) -> Result<ObjectiveGame> {
        self.check()?;
        let kernel = self.kernel();
        let nv = self.values.len();
        let states: Vec<String> = (0..self.asks.len())
            .flat_map(|a| (0..nv).map(move |v| (a, v)))
            .map(|(a, v)| format!("a={},v={}", self.asks[a], self.values[v]))
            .collect();
        let probs: Vec<f64> = self.law.iter().flatten().copied().collect();
        let mut consequences = Vec::new();
        for a in &self.asks {
            for v in &self.values {
                consequences.push(format!("a={a},v={v}"));
            }
        }
        for a in &self.asks {
            consequences.push(format!("a={a},none"));
        }
        for a in &self.asks {
            for j in 0..kernel.label_classes() {
                consequences.push(format!("a={a},class={j}"));
            }
        }
        let mut game = crate::game::single_agent(
            states,
            probs,
            self.prices.iter().map(|p| format!("{p}")).collect(),
            consequences,
            |x, w| kernel.feedback_index(x, w / nv, w % nv),
            |x, y| kernel.payoff(x, y),
        );
        game.players = vec!["buyer".into()];
        Ok(game)
    }

    pub fn model(&self) -> SubjectiveModel {
        let kernel = self.kernel();
        SubjectiveModel::Categorical(CategoricalModel {
            domain: ParameterDomain::Simplices { sizes: kernel.simplex_sizes() },
            kernel: CategoricalKernel::Trading(kernel),
        })
    }

    /// Analogy partition of the states by value class, with the ask as the opponent-like coordinate.
    pub fn analogy(&self) -> AnalogyStructure {
        let nv = self.values.len();
        let classes = self.class_list();
        let n = self.asks.len() * nv;
        AnalogyStructure {
            cells: vec![(0..n).map(|w| classes[w % nv]).collect()],
            nature_split: Some(NatureSplit {
                coordinate: (0..n).map(|w| w / nv).collect(),
                rest: (0..n).map(|w| w % nv).collect(),
            }),
        }
    }

    pub fn bea_condition(&self) -> Result<()> {
        let classes = self.class_list();
        let k = classes.iter().max().map_or(0, |m| m + 1);
        for x in 0..self.prices.len() {
            for j in 0..k {
                if self.mass(|a, v| classes[v] == j && self.trades(a, x)) <= 0.0 {
                    return Err(Error::NullEvent(format!("Pr(V in class {j}, A ≤ {}) = 0", self.prices[x])));
                }
            }
        }
        Ok(())
    }
}

/// The believed expected profit from bidding price index `x` when play has settled on
/// price index `x_star`.
pub fn oracle_trading_pi(inst: &TradingInstance, variant: TradingVariant, x: usize, x_star: Option<usize>) -> Result<f64> {
    inst.check()?;
    let n = inst.prices.len();
    if x >= n || x_star.is_some_and(|s| s >= n) {
        return Err(Error::InvalidAction(format!("price index out of range (have {n} prices)")));
    }
    let price = inst.prices[x];
    let pr_trade = inst.mass(|a, _| inst.trades(a, x));
    let classes = inst.class_list();
    let k = classes.iter().max().map_or(0, |m| m + 1);
    Ok(match variant {
        TradingVariant::Ne => inst.value_mass(|a, _| inst.trades(a, x)) - pr_trade * price,
        TradingVariant::Ce => pr_trade * (inst.value_mass(|_, _| true) - price),
        TradingVariant::Be => {
            let s = x_star.ok_or(Error::MissingArgument("x_star".into()))?;
            if pr_trade == 0.0 {
                0.0
            } else {
                pr_trade * (inst.conditional_value(|a, _| inst.trades(a, s))? - price)
            }
        }
        TradingVariant::Abee => (0..k)
            .map(|j| {
                let pj = inst.mass(|_, v| classes[v] == j);
                let trade_j = inst.mass(|a, v| classes[v] == j && inst.trades(a, x));
                let ev = inst.value_mass(|_, v| classes[v] == j) / pj;
                trade_j * (ev - price)
            })
            .sum(),
        TradingVariant::Bea => {
            let s = x_star.ok_or(Error::MissingArgument("x_star".into()))?;
            let mut total = 0.0;
            for j in 0..k {
                let trade_j = inst.mass(|a, v| classes[v] == j && inst.trades(a, x));
                if trade_j == 0.0 {
                    continue;
                }
                let ev = inst.conditional_value(|a, v| classes[v] == j && inst.trades(a, s))?;
                total += trade_j * (ev - price);
            }
            total
        }
    })
}

/// Closed-form wKLD minimizer at pure price index `x`, in the model's parameter layout.
pub fn oracle_trading_minimizer(inst: &TradingInstance, variant: TradingVariant, x: usize) -> Result<Vec<f64>> {
    inst.check()?;
    if x >= inst.prices.len() {
        return Err(Error::InvalidAction(format!("price index {x} out of range")));
    }
    let (na, nv) = (inst.asks.len(), inst.values.len());
    let p_a: Vec<f64> = (0..na).map(|a| inst.law[a].iter().sum()).collect();
    let p_v: Vec<f64> = (0..nv).map(|v| inst.law.iter().map(|r| r[v]).sum()).collect();
    let classes = inst.class_list();
    let k = classes.iter().max().map_or(0, |m| m + 1);
    let asks_given_classes = || -> Vec<f64> {
        let mut out = Vec::with_capacity(k * na);
        for j in 0..k {
            let pj = inst.mass(|_, v| classes[v] == j);
            for a in 0..na {
                out.push((0..nv).filter(|&v| classes[v] == j).map(|v| inst.law[a][v]).sum::<f64>() / pj);
            }
        }
        out
    };
    match variant {
        TradingVariant::Ne => Err(Error::InvalidParams("the correct model has no minimizer to report".into())),
        TradingVariant::Ce => Ok([p_a, p_v].concat()),
        TradingVariant::Be => {
            let m = inst.mass(|a, _| inst.trades(a, x));
            if m <= 0.0 {
                return Err(Error::NullEvent(format!("Pr(A ≤ {}) = 0", inst.prices[x])));
            }
            let cond: Vec<f64> =
                (0..nv).map(|v| (0..na).filter(|&a| inst.trades(a, x)).map(|a| inst.law[a][v]).sum::<f64>() / m).collect();
            Ok([p_a, cond].concat())
        }
        TradingVariant::Abee => Ok([asks_given_classes(), p_v].concat()),
        TradingVariant::Bea => {
            let mut theta_v = vec![0.0; nv];
            for j in 0..k {
                let pj = inst.mass(|_, v| classes[v] == j);
                let m = inst.mass(|a, v| classes[v] == j && inst.trades(a, x));
                if m <= 0.0 {
                    return Err(Error::NullEvent(format!("Pr(V in class {j}, A ≤ {}) = 0", inst.prices[x])));
                }
                for v in (0..nv).filter(|&v| classes[v] == j) {
                    let traded: f64 = (0..na).filter(|&a| inst.trades(a, x)).map(|a| inst.law[a][v]).sum();
                    theta_v[v] = traded / m * pj;
                }
            }
            Ok([asks_given_classes(), theta_v].concat())
        }
    }
}

/// Price indices `x*` with `x*` ∈ argmax Π(·, x*) (or argmax Π for variants without `x*`).
pub fn oracle_trading_equilibria(inst: &TradingInstance, variant: TradingVariant, tol: f64) -> Result<Vec<usize>> {
    let n = inst.prices.len();
    let mut out = Vec::new();
    for s in 0..n {
        let star = matches!(variant, TradingVariant::Be | TradingVariant::Bea).then_some(s);
        let values = match (0..n).map(|x| oracle_trading_pi(inst, variant, x, star)).collect::<Result<Vec<_>>>() {
            Ok(v) => v,
            // nothing is learned about values at a price that never trades, so the most
            // pessimistic belief is admissible
            Err(Error::NullEvent(_)) if variant == TradingVariant::Be => {
                let low = inst.values.iter().copied().fold(f64::INFINITY, f64::min);
                (0..n).map(|x| inst.mass(|a, _| inst.trades(a, x)) * (low - inst.prices[x])).collect()
            }
            Err(e) => return Err(e),
        };
        let best = values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
        if values[s] >= best - tol {
            out.push(s);
        }
    }
    Ok(out)
}

fn bundle(name: &str, inst: TradingInstance, expected: Vec<Expected>) -> Result<ExampleBundle> {
    let game = inst.game()?;
    Ok(ExampleBundle {
        name: name.into(),
        game,
        models: vec![inst.model()],
        analogy: Some(inst.analogy()),
        true_parameter: None,
        expected,
    })
}

/// The instance behind each trading bundle.
pub fn instance(name: &str) -> Result<TradingInstance> {
    let mut inst = TradingInstance::canonical();
    match name {
        "trading-ce" => {}
        "trading-be" => inst.feedback = TradingFeedback::Partial,
        "trading-abee" => inst.classes = Some(vec![0, 1, 1]),
        "trading-bea" => {
            inst.classes = Some(vec![0, 1, 1]);
            inst.feedback = TradingFeedback::PartialWithClass;
            // price 0 never trades, which would leave the class conditionals undefined
            inst.prices = vec![1.0, 2.0, 3.0];
            inst.bea_condition()?;
        }
        _ => return Err(Error::UnknownExample(name.into())),
    }
    Ok(inst)
}

pub fn build(name: &str, params: &Params) -> Result<ExampleBundle> {
    params.only(&[])?;
    let inst = instance(name)?;
    let expected = match name {
        "trading-ce" => Expected::new("equilibrium prices maximize Pr(A ≤ x)(E[V] − x)", "fully cursed beliefs"),
        "trading-be" => Expected::new(
            "x* is an equilibrium iff it maximizes Pr(A ≤ x)(E[V | A ≤ x*] − x)",
            "naive behavioral equilibrium",
        ),
        "trading-abee" => {
            Expected::new("equilibrium supports equal the analogy-based best responses", "ABEE equivalence")
        }
        _ => Expected::new(
            "x* is an equilibrium iff it maximizes the class-wise behavioral profit",
            "closed-form minimizer under class feedback",
        ),
    };
    bundle(name, inst, vec![expected])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ce_minimizer_is_marginals() {
        let inst = TradingInstance::canonical();
        let th = oracle_trading_minimizer(&inst, TradingVariant::Ce, 2).unwrap();
        let want = [0.30, 0.35, 0.35, 0.30, 0.35, 0.35];
        for (a, b) in th.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn no_trade_price_has_zero_profit() {
        let inst = TradingInstance::canonical();
        for v in [TradingVariant::Ne, TradingVariant::Ce, TradingVariant::Abee] {
            assert_eq!(oracle_trading_pi(&inst, v, 0, None).unwrap(), 0.0);
        }
        assert!(matches!(oracle_trading_pi(&inst, TradingVariant::Be, 1, None), Err(Error::MissingArgument(_))));
        assert!(matches!(oracle_trading_minimizer(&inst, TradingVariant::Be, 0), Err(Error::NullEvent(_))));
    }

    #[test]
    fn independent_law_collapses_variants() {
        let pa = [0.2, 0.5, 0.3];
        let pv = [0.4, 0.35, 0.25];
        let mut inst = TradingInstance::canonical();
        inst.law = pa.iter().map(|a| pv.iter().map(|v| a * v).collect()).collect();
        inst.classes = Some(vec![0, 1, 1]);
        for x in 0..4 {
            let ne = oracle_trading_pi(&inst, TradingVariant::Ne, x, None).unwrap();
            for s in 1..4 {
                for v in [TradingVariant::Ce, TradingVariant::Abee] {
                    assert!((oracle_trading_pi(&inst, v, x, None).unwrap() - ne).abs() < 1e-12);
                }
                assert!((oracle_trading_pi(&inst, TradingVariant::Be, x, Some(s)).unwrap() - ne).abs() < 1e-12);
            }
            if x > 0 {
                let be = oracle_trading_minimizer(&inst, TradingVariant::Be, x).unwrap();
                let ce = oracle_trading_minimizer(&inst, TradingVariant::Ce, x).unwrap();
                assert!(be.iter().zip(&ce).all(|(a, b)| (a - b).abs() < 1e-12));
            }
        }
    }
}
