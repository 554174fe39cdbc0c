use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::Result;
use crate::real::Real;
use crate::spectral::norms::{gradient_spacetime_norm, v_exponent, v_norm, w_norm, ww_norm};
use crate::spectral::{
    exotic_norm, local_smoothing_norm, mixed_spacetime_norm, ExoticSpace, SpaceTimeSeries,
};

/// Space-time norms of one trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormProfile {
    pub v: f64,
    /// `W`, `𝕎` (present for `d ≥ 3`).
    pub w: Option<f64>,
    pub ww: Option<f64>,
    /// `(q, p, value)` for the sampled Strichartz pairs.
    pub s0_pairs: Vec<(f64, f64, f64)>,
    /// Their maximum.
    pub s0: f64,
    /// Local smoothing with weight `<x>^{-2}` and orders 1/2 and 3/2.
    pub local_half: f64,
    pub local_three_halves: f64,
    /// `X^0`, `𝕏`, `𝕐` (present for `d ≥ 3`).
    pub exotic: Option<[f64; 3]>,
}

/// `(q, p, value)` for each exponent pair of a sampled norm.
pub type PairNorms = Vec<(f64, f64, f64)>;

/// Sampled `S^0` norm: maximum over the pairs `(∞, 2)` and `(2+4/d, 2+4/d)`.
pub fn s0_norm<R: Real>(s: &SpaceTimeSeries<R>) -> Result<(f64, PairNorms)> {
    let dim = s.grid().map_or(1, |g| g.dim());
    let e = v_exponent(dim);
    let pairs = [(f64::INFINITY, 2.0), (e, e)];
    let mut out = Vec::new();
    for (q, p) in pairs {
        out.push((
            q,
            p,
            mixed_spacetime_norm(s, R::lit(q), R::lit(p))?.as_f64(),
        ));
    }
    let max = out.iter().fold(0.0, |m: f64, v| m.max(v.2));
    Ok((max, out))
}

/// Sampled `S^1` norm: the same pairs applied to `u` plus its gradient.
pub fn s1_norm<R: Real>(s: &SpaceTimeSeries<R>) -> Result<f64> {
    let dim = s.grid().map_or(1, |g| g.dim());
    let e = v_exponent(dim);
    let mut max: f64 = 0.0;
    for (q, p) in [(f64::INFINITY, 2.0), (e, e)] {
        let (q, p) = (R::lit(q), R::lit(p));
        let value = mixed_spacetime_norm(s, q, p)? + gradient_spacetime_norm(s, q, p)?;
        max = max.max(value.as_f64());
    }
    Ok(max)
}

pub fn norm_profile<R: Real>(traj: &Trajectory<R>) -> Result<NormProfile> {
    let s = &traj.series;
    let dim = traj.grid().dim();
    let (s0, s0_pairs) = s0_norm(s)?;
    let high = dim >= 3;
    let exotic = if high {
        Some([
            exotic_norm(s, ExoticSpace::X0)?.as_f64(),
            exotic_norm(s, ExoticSpace::XX)?.as_f64(),
            exotic_norm(s, ExoticSpace::YY)?.as_f64(),
        ])
    } else {
        None
    };
    Ok(NormProfile {
        v: v_norm(s)?.as_f64(),
        w: if high {
            Some(w_norm(s)?.as_f64())
        } else {
            None
        },
        ww: if high {
            Some(ww_norm(s)?.as_f64())
        } else {
            None
        },
        s0_pairs,
        s0,
        local_half: local_smoothing_norm(s, R::lit(0.5), -R::one())?.as_f64(),
        local_three_halves: local_smoothing_norm(s, R::lit(1.5), -R::one())?.as_f64(),
        exotic,
    })
}
