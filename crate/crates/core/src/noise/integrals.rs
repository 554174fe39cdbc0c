use super::driver::DrivingPath;
use crate::error::{Error, Result};

fn check(g: &[f64], path: &dyn DrivingPath, channel: usize) -> Result<()> {
    let m = path.mesh().steps();
    if g.len() != m + 1 {
        return Err(Error::MeshMismatch(format!(
            "integrand has {} samples for {} steps",
            g.len(),
            m
        )));
    }
    if channel >= path.channels() {
        return Err(Error::Domain(format!("channel {channel} out of range")));
    }
    Ok(())
}

/// Left-point Itô sums `I(t_j) = Σ_{i<j} g(t_i) Δβ(i)`.
pub fn ito_integral<P: DrivingPath>(g: &[f64], driver: &P, channel: usize) -> Result<Vec<f64>> {
    check(g, driver, channel)?;
    let mut out = Vec::with_capacity(g.len());
    let mut acc = 0.0;
    out.push(acc);
    for (j, gj) in g[..g.len() - 1].iter().enumerate() {
        acc += gj * driver.increment(j, channel);
        out.push(acc);
    }
    Ok(out)
}

/// `∫ g dh` along a piecewise-linear path: trapezoid in `g` times the exact slope on each step.
pub fn pathwise_integral<P: DrivingPath>(g: &[f64], path: &P, channel: usize) -> Result<Vec<f64>> {
    check(g, path, channel)?;
    let mut out = Vec::with_capacity(g.len());
    let mut acc = 0.0;
    out.push(acc);
    for j in 0..g.len() - 1 {
        acc += 0.5 * (g[j] + g[j + 1]) * path.increment(j, channel);
        out.push(acc);
    }
    Ok(out)
}
