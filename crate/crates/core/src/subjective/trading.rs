//! Buyer models for the bilateral trade example: asks and values drawn jointly,
//! believed independent (possibly within analogy classes of values).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TradingFeedback {
    /// The buyer always sees (a, v).
    Full,
    /// The value is seen only when trade happens.
    Partial,
    /// Without trade the buyer still learns the analogy class of the value.
    PartialWithClass,
}

/// Consequence layout (used by the trading game builder):
/// `(a, v)` at `a * n_v + v`, `(a, none)` at `n_a * n_v + a`, `(a, class j)` at `n_a * n_v + n_a + a * k + j`.
///
/// Parameter layout: without classes `[θ_A | θ_V]`; with `k` classes `[θ_1 | … | θ_k | θ_V]`
/// where `θ_j` is the ask distribution believed to hold when the value lies in class `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradingKernel {
    pub asks: Vec<f64>,
    pub values: Vec<f64>,
    pub prices: Vec<f64>,
    pub feedback: TradingFeedback,
    /// Analogy class of each value; `None` for the independence model.
    pub classes: Option<Vec<usize>>,
}

impl TradingKernel {
    pub fn n_classes(&self) -> usize {
        self.classes.as_ref().map_or(0, |c| c.iter().max().map_or(0, |m| m + 1))
    }

    /// Number of analogy classes used for consequence labels (at least one).
    pub fn label_classes(&self) -> usize {
        self.n_classes().max(1)
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.classes.as_ref().map_or(0, |c| c[v])
    }

    pub fn n_consequences(&self) -> usize {
        let (na, nv) = (self.asks.len(), self.values.len());
        na * nv + na + na * self.label_classes()
    }

    pub fn simplex_sizes(&self) -> Vec<usize> {
        let na = self.asks.len();
        let mut sizes = vec![na; self.n_classes().max(1)];
        sizes.push(self.values.len());
        sizes
    }

    pub fn traded_index(&self, a: usize, v: usize) -> usize {
        a * self.values.len() + v
    }

    pub fn no_trade_index(&self, a: usize) -> usize {
        self.asks.len() * self.values.len() + a
    }

    pub fn class_index(&self, a: usize, j: usize) -> usize {
        self.asks.len() * self.values.len() + self.asks.len() + a * self.label_classes() + j
    }

    /// True consequence of bidding `x` when the state is (a, v).
    pub fn feedback_index(&self, x: usize, a: usize, v: usize) -> usize {
        let trade = self.asks[a] <= self.prices[x];
        match self.feedback {
            TradingFeedback::Full => self.traded_index(a, v),
            _ if trade => self.traded_index(a, v),
            TradingFeedback::Partial => self.no_trade_index(a),
            TradingFeedback::PartialWithClass => self.class_index(a, self.class_of(v)),
        }
    }

    pub fn payoff(&self, x: usize, y: usize) -> f64 {
        let (na, nv) = (self.asks.len(), self.values.len());
        if y < na * nv {
            let (a, v) = (y / nv, y % nv);
            if self.asks[a] <= self.prices[x] {
                return self.values[v] - self.prices[x];
            }
        }
        0.0
    }

    /// Believed probability that the ask is `a` and the value `v`.
    fn joint(&self, theta: &[f64], a: usize, v: usize) -> f64 {
        let na = self.asks.len();
        let v_block = na * self.n_classes().max(1);
        let ask_block = self.class_of(v) * na;
        theta[ask_block + a] * theta[v_block + v]
    }

    /// `Q_θ(· | x)` over all consequences.
    pub fn row(&self, theta: &[f64], x: usize) -> Vec<f64> {
        let (na, nv) = (self.asks.len(), self.values.len());
        let mut out = vec![0.0; self.n_consequences()];
        for a in 0..na {
            let trade = self.asks[a] <= self.prices[x];
            for v in 0..nv {
                let q = self.joint(theta, a, v);
                let y = match self.feedback {
                    TradingFeedback::Full => self.traded_index(a, v),
                    _ if trade => self.traded_index(a, v),
                    TradingFeedback::Partial => self.no_trade_index(a),
                    TradingFeedback::PartialWithClass => self.class_index(a, self.class_of(v)),
                };
                out[y] += q;
            }
        }
        out
    }
}
