//! Mean-field dynamics of the monopolist who learns only the demand slope: drift of the
//! (posterior mean, precision rate) pair, its steady state, orbits and a Lyapunov scan.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{PerturbationFamily, PerturbationStructure};
use crate::error::{Error, Result};
use crate::format::sig12;
use crate::numerics::{bisect, halton};

/// Default RK4 step. Near the steady state the mean equation has rate about
/// `H1'(m*)/r*` (roughly −370 at scale 0.05), which puts 0.01 outside RK4's stability region.
pub const DEFAULT_DT: f64 = 0.002;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppFConfig {
    /// Intercept the monopolist takes as known.
    pub a: f64,
    pub a0: f64,
    pub b0: f64,
    /// Low and high price.
    pub prices: [f64; 2],
    pub family: PerturbationFamily,
    pub scale: f64,
}

impl Default for AppFConfig {
    fn default() -> Self {
        Self { a: 40.0, a0: 42.0, b0: 4.0, prices: [2.0, 10.0], family: PerturbationFamily::Logistic, scale: 0.05 }
    }
}

/// `β = (m, r)`: posterior mean of the slope and precision rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeState {
    pub m: f64,
    pub r: f64,
}

impl AppFConfig {
    pub fn with_scale(&self, scale: f64) -> Self {
        Self { scale, ..self.clone() }
    }

    pub fn check(&self) -> Result<()> {
        let [lo, hi] = self.prices;
        if lo == hi || lo == 0.0 || hi == 0.0 || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParams("prices must be distinct and nonzero".into()));
        }
        PerturbationStructure::new(self.family, self.scale).map(|_| ())
    }

    /// Probability the high price wins when the believed slope is `m`.
    pub fn sigma_high(&self, m: f64) -> f64 {
        let [lo, hi] = self.prices;
        let gap = (hi - lo) * self.a - (hi * hi - lo * lo) * m;
        PerturbationStructure { family: self.family, scale: self.scale }.gap_cdf(gap)
    }

    /// `ρ(m)`, the precision rate the orbit is pulled toward.
    pub fn rho(&self, m: f64) -> f64 {
        let [lo, hi] = self.prices;
        lo * lo + (hi * hi - lo * lo) * self.sigma_high(m)
    }

    /// The interval `[b̲, b̄]` holding every steady-state mean.
    pub fn bracket(&self) -> (f64, f64) {
        let [lo, hi] = self.prices;
        let d = self.a0 - self.a;
        let (u, v) = (self.b0 - d / lo, self.b0 - d / hi);
        (u.min(v), u.max(v))
    }

    /// Precision-rate bounds `[r̲, r̄]` matching the mean bracket.
    pub fn r_bounds(&self) -> (f64, f64) {
        let (bl, bh) = self.bracket();
        let (u, v) = (self.rho(bh), self.rho(bl));
        (u.min(v), u.max(v))
    }

    /// The state box scanned for Lyapunov decrease.
    pub fn domain(&self) -> ([f64; 2], [f64; 2]) {
        let (bl, bh) = self.bracket();
        let (rl, rh) = self.r_bounds();
        ([bl, bh], [rl, rh])
    }
}

/// `H1(m)`, with `G1 = H1(m)/r`.
pub fn h1(cfg: &AppFConfig, m: f64) -> f64 {
    let [lo, hi] = cfg.prices;
    let f = cfg.sigma_high(m);
    let d = cfg.a0 - cfg.a;
    f * hi * (-d + (cfg.b0 - m) * hi) + (1.0 - f) * lo * (-d + (cfg.b0 - m) * lo)
}

pub fn drift(cfg: &AppFConfig, beta: OdeState) -> Result<(f64, f64)> {
    if beta.r <= 0.0 || !beta.r.is_finite() {
        return Err(Error::Domain(format!("precision rate {} must be positive", beta.r)));
    }
    Ok((h1(cfg, beta.m) / beta.r, cfg.rho(beta.m) - beta.r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub m: f64,
    pub r: f64,
    /// Probability of the high price at the steady state.
    pub sigma: f64,
    /// Max-norm of the drift there.
    pub residual: f64,
}

impl SteadyState {
    pub fn state(&self) -> OdeState {
        OdeState { m: self.m, r: self.r }
    }
}

/// The unique root of `H1` on the bracket, bisected to machine precision, with
/// `r* = ρ(m*)`.
pub fn steady_state(cfg: &AppFConfig) -> Result<SteadyState> {
    cfg.check()?;
    let (lo, hi) = cfg.bracket();
    let m = bisect(|m| h1(cfg, m), lo, hi, 0.0)?;
    let r = cfg.rho(m);
    let (g1, g2) = drift(cfg, OdeState { m, r })?;
    Ok(SteadyState { m, r, sigma: cfg.sigma_high(m), residual: g1.abs().max(g2.abs()) })
}

/// Limit of the steady state as the perturbation vanishes: the mean at which both prices
/// tie, and the mixing weight on the high price that zeroes `H1` there.
pub fn vanishing_limit(cfg: &AppFConfig) -> SteadyState {
    let [lo, hi] = cfg.prices;
    let m = cfg.a / (hi + lo);
    let d = cfg.a0 - cfg.a;
    let (h_hi, h_lo) = (hi * (-d + (cfg.b0 - m) * hi), lo * (-d + (cfg.b0 - m) * lo));
    let sigma = h_lo / (h_lo - h_hi);
    SteadyState { m, r: lo * lo + (hi * hi - lo * lo) * sigma, sigma, residual: 0.0 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// `(t, state)` after every step, starting at `t = 0`.
    pub points: Vec<(f64, OdeState)>,
    /// The orbit left `r > 0` and was stopped at the last valid state.
    pub aborted: bool,
}

impl Trajectory {
    pub fn last(&self) -> OdeState {
        self.points.last().expect("trajectory holds the start").1
    }
}

/// Fixed-step RK4 orbit from `beta0` to `t_end`.
pub fn integrate(cfg: &AppFConfig, beta0: OdeState, t_end: f64, dt: f64) -> Result<Trajectory> {
    cfg.check()?;
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidParams("dt must be positive and t_end nonnegative".into()));
    }
    drift(cfg, beta0)?;
    let steps = (t_end / dt).round() as usize;
    let mut points = Vec::with_capacity(steps + 1);
    points.push((0.0, beta0));
    let mut b = beta0;
    let shift = |b: OdeState, k: (f64, f64), h: f64| OdeState { m: b.m + h * k.0, r: b.r + h * k.1 };
    for n in 1..=steps {
        let step = (|| -> Result<OdeState> {
            let k1 = drift(cfg, b)?;
            let k2 = drift(cfg, shift(b, k1, dt / 2.0))?;
            let k3 = drift(cfg, shift(b, k2, dt / 2.0))?;
            let k4 = drift(cfg, shift(b, k3, dt))?;
            let next = OdeState {
                m: b.m + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
                r: b.r + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            };
            drift(cfg, next)?;
            Ok(next)
        })();
        match step {
            Ok(next) => {
                b = next;
                points.push((n as f64 * dt, b));
            }
            Err(_) => return Ok(Trajectory { points, aborted: true }),
        }
    }
    Ok(Trajectory { points, aborted: false })
}

/// `dL/dt` along the flow for `L(β) = (β−β*)ᵀ P (β−β*)` with diagonal `P`.
pub fn lyapunov_derivative(cfg: &AppFConfig, beta: OdeState, steady: OdeState, weights: [f64; 2]) -> Result<f64> {
    let (g1, g2) = drift(cfg, beta)?;
    Ok(2.0 * (weights[0] * (beta.m - steady.m) * g1 + weights[1] * (beta.r - steady.r) * g2))
}

/// Diagonal weights `(w, 1)` under which `dL/dt < 0` on the whole box.
///
/// At fixed `m` the precision term is at most `(ρ(m) − r*)²/2`, and the mean term is at
/// most `2w(m − m*)H1(m)/r̄`, so any `w` above `r̄(ρ(m) − r*)²/(4|(m − m*)H1(m)|)` for all
/// `m` works. The supremum is taken on a fine grid and doubled.
pub fn lyapunov_weights(cfg: &AppFConfig) -> Result<[f64; 2]> {
    let st = steady_state(cfg)?;
    let (bl, bh) = cfg.bracket();
    let (_, r_hi) = cfg.r_bounds();
    let n = 20_000;
    let mut w = 0.0f64;
    for k in 0..=n {
        let m = bl + (bh - bl) * k as f64 / n as f64;
        let pull = -(m - st.m) * h1(cfg, m);
        if pull <= 0.0 {
            continue;
        }
        let d = cfg.rho(m) - st.r;
        w = w.max(r_hi * d * d / (4.0 * pull));
    }
    Ok([2.0 * w.max(1.0), 1.0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub weights: [f64; 2],
    pub steady: SteadyState,
    pub samples: usize,
    pub violations: usize,
    /// Largest `dL/dt` seen and where.
    pub max_derivative: f64,
    pub worst: OdeState,
}

/// Evaluate `dL/dt` at `n_samples` Halton points of the box (skipping `β*`).
pub fn lyapunov_scan(cfg: &AppFConfig, n_samples: usize, weights: [f64; 2]) -> Result<LyapunovReport> {
    if !(weights[0] > 0.0 && weights[1] > 0.0) {
        return Err(Error::InvalidParams("Lyapunov weights must be positive".into()));
    }
    let steady = steady_state(cfg)?;
    let ([m0, m1], [r0, r1]) = cfg.domain();
    let values = (1..=n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let u = halton(i, 2);
            let beta = OdeState { m: m0 + (m1 - m0) * u[0], r: r0 + (r1 - r0) * u[1] };
            lyapunov_derivative(cfg, beta, steady.state(), weights).map(|d| (beta, d))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = LyapunovReport {
        weights,
        steady,
        samples: 0,
        violations: 0,
        max_derivative: f64::NEG_INFINITY,
        worst: steady.state(),
    };
    for (beta, d) in values {
        if (beta.m - steady.m).abs() + (beta.r - steady.r).abs() < 1e-12 {
            continue;
        }
        report.samples += 1;
        if d >= 0.0 {
            report.violations += 1;
        }
        if d > report.max_derivative {
            report.max_derivative = d;
            report.worst = beta;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scale: f64,
    pub m: f64,
    pub sigma: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub limit: SteadyState,
    /// `|m* − m_limit|` strictly decreases along the sweep.
    pub monotone: bool,
}

/// Steady states along a decreasing sequence of perturbation scales.
pub fn scale_sweep(cfg: &AppFConfig, scales: &[f64]) -> Result<SweepReport> {
    if scales.iter().any(|s| !(*s > 0.0)) || scales.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParams("scales must be positive and decreasing".into()));
    }
    let rows = scales
        .par_iter()
        .map(|&scale| {
            let st = steady_state(&cfg.with_scale(scale))?;
            Ok(SweepRow { scale, m: st.m, sigma: st.sigma, r: st.r })
        })
        .collect::<Result<Vec<_>>>()?;
    let limit = vanishing_limit(cfg);
    let monotone = rows.windows(2).all(|w| (w[1].m - limit.m).abs() < (w[0].m - limit.m).abs());
    Ok(SweepReport { rows, limit, monotone })
}

/// `scale,m,r,sigma10` per sweep row.
pub fn write_sweep_csv<W: Write>(report: &SweepReport, mut out: W) -> Result<()> {
    writeln!(out, "scale,m,r,sigma10")?;
    for row in &report.rows {
        writeln!(out, "{},{},{},{}", sig12(row.scale), sig12(row.m), sig12(row.r), sig12(row.sigma))?;
    }
    Ok(())
}

/// `t,m,r,sigma10` every `every` steps of an orbit (and at its end).
pub fn write_trajectory_csv<W: Write>(cfg: &AppFConfig, traj: &Trajectory, every: usize, mut out: W) -> Result<()> {
    writeln!(out, "t,m,r,sigma10")?;
    let last = traj.points.len() - 1;
    for (k, (t, b)) in traj.points.iter().enumerate() {
        if k % every.max(1) == 0 || k == last {
            writeln!(out, "{},{},{},{}", sig12(*t), sig12(b.m), sig12(b.r), sig12(cfg.sigma_high(b.m)))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drift_decomposes() {
        let cfg = AppFConfig::default();
        let b = OdeState { m: 10.0 / 3.0, r: 20.0 / 3.0 };
        let (g1, g2) = drift(&cfg, b).unwrap();
        assert!((g1 - h1(&cfg, b.m) / b.r).abs() < 1e-12);
        assert!((g2 - (4.0 + 48.0 - 20.0 / 3.0)).abs() < 1e-12);
        let (h1_, h2) = drift(&cfg, OdeState { m: b.m, r: 2.0 * b.r }).unwrap();
        assert!((h1_ - g1 / 2.0).abs() < 1e-12);
        assert!((h2 - (g2 - b.r)).abs() < 1e-12);
        assert!(drift(&cfg, OdeState { m: 3.0, r: 0.0 }).is_err());
    }

    #[test]
    fn box_and_limit() {
        let cfg = AppFConfig::default();
        let (lo, hi) = cfg.bracket();
        assert!((lo - 3.0).abs() < 1e-15 && (hi - 3.8).abs() < 1e-15);
        let lim = vanishing_limit(&cfg);
        assert!((lim.m - 10.0 / 3.0).abs() < 1e-14);
        assert!((lim.sigma - 1.0 / 36.0).abs() < 1e-14);
        assert!((lim.r - 20.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn identity_weights_fail_on_the_box() {
        let cfg = AppFConfig::default();
        let st = steady_state(&cfg).unwrap();
        let d = lyapunov_derivative(&cfg, OdeState { m: 3.0, r: 50.0 }, st.state(), [1.0, 1.0]).unwrap();
        assert!(d > 0.0);
        assert!(lyapunov_scan(&cfg, 1000, [1.0, 1.0]).unwrap().violations > 0);
    }

    #[test]
    fn weighted_scan_is_clean_and_scale_free() {
        let cfg = AppFConfig::default();
        let w = lyapunov_weights(&cfg).unwrap();
        let rep = lyapunov_scan(&cfg, 1000, w).unwrap();
        assert_eq!(rep.violations, 0);
        let scaled = lyapunov_scan(&cfg, 1000, [3.0 * w[0], 3.0 * w[1]]).unwrap();
        assert_eq!(scaled.violations, 0);
        assert!((scaled.max_derivative - 3.0 * rep.max_derivative).abs() < 1e-9 * rep.max_derivative.abs());
    }

    #[test]
    fn orbit_converges_and_refines() {
        let cfg = AppFConfig::default();
        let st = steady_state(&cfg).unwrap();
        assert!(st.residual < 1e-9);
        let still = integrate(&cfg, st.state(), 10.0, DEFAULT_DT).unwrap();
        assert!(still.points.iter().all(|(_, b)| (b.m - st.m).abs() < 1e-12 && (b.r - st.r).abs() < 1e-9));
        let start = OdeState { m: 3.0, r: 5.0 };
        let coarse = integrate(&cfg, start, 500.0, DEFAULT_DT).unwrap().last();
        let fine = integrate(&cfg, start, 500.0, DEFAULT_DT / 2.0).unwrap().last();
        assert!((coarse.m - st.m).abs() < 1e-6 && (coarse.r - st.r).abs() < 1e-6);
        assert!((coarse.m - fine.m).abs() < 1e-8 && (coarse.r - fine.r).abs() < 1e-8);
    }

    #[test]
    fn sweep_approaches_the_limit() {
        let rep = scale_sweep(&AppFConfig::default(), &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(rep.monotone);
        let last = rep.rows.last().unwrap();
        assert!((last.m - 10.0 / 3.0).abs() < 1e-3);
        assert!((last.sigma - 1.0 / 36.0).abs() < 1e-3);
        assert!((last.r - 20.0 / 3.0).abs() < 0.1);
        assert!(scale_sweep(&AppFConfig::default(), &[1e-2, 1e-1]).is_err());
        let wide = steady_state(&AppFConfig::default().with_scale(1e6)).unwrap();
        assert!((wide.sigma - 0.5).abs() < 1e-3);
    }
}
