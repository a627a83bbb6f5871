//! Mean-field dynamics of the slope-learning monopolist: steady states as the payoff
//! perturbation vanishes, an orbit from a corner of the box and a Lyapunov scan.

use berknash::dynamics::{
    integrate, lyapunov_scan, lyapunov_weights, scale_sweep, steady_state, AppFConfig, OdeState, DEFAULT_DT,
};

fn main() -> berknash::Result<()> {
    let cfg = AppFConfig::default();
    let sweep = scale_sweep(&cfg, &[1e-1, 1e-2, 1e-3, 1e-4])?;
    println!("{:>8} {:>14} {:>14} {:>12}", "scale", "m*", "σ*", "r*");
    for row in &sweep.rows {
        println!("{:>8} {:>14.10} {:>14.10} {:>12.8}", row.scale, row.m, row.sigma, row.r);
    }
    println!("limit: m = {:.10}, σ = {:.10}; monotone approach: {}", sweep.limit.m, sweep.limit.sigma, sweep.monotone);

    let st = steady_state(&cfg)?;
    let orbit = integrate(&cfg, OdeState { m: 3.0, r: 5.0 }, 500.0, DEFAULT_DT)?;
    let end = orbit.last();
    println!("orbit from (3, 5): ends at ({:.12}, {:.12}), steady state ({:.12}, {:.12})", end.m, end.r, st.m, st.r);

    let identity = lyapunov_scan(&cfg, 1000, [1.0, 1.0])?;
    println!(
        "P = I: {} of {} samples increase L (worst at m = {:.3}, r = {:.2})",
        identity.violations, identity.samples, identity.worst.m, identity.worst.r
    );
    let w = lyapunov_weights(&cfg)?;
    let weighted = lyapunov_scan(&cfg, 1000, w)?;
    println!("P = diag({:.3e}, 1): {} violations, max dL/dt = {:.3e}", w[0], weighted.violations, weighted.max_derivative);
    Ok(())
}
