use super::driver::{BrownianDriver, DrivingPath};
use super::mesh::{integer_ratio, TimeMesh};
use crate::error::{Error, Result};

/// Adapted linear interpolation of a Brownian driver on the dyadic mesh `2^-level`.
///
/// On the cell `[k 2^-n, (k+1) 2^-n)` the path runs linearly from
/// `beta((k-1) 2^-n ∨ 0)` to `beta(k 2^-n)`, so it only looks at the past.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedInterpolation {
    mesh: TimeMesh,
    channels: usize,
    level: u32,
    cell_steps: usize,
    /// `slopes[cell * channels + k]`.
    slopes: Vec<f64>,
    /// Source values at cell nodes, `nodes[cell * channels + k] = beta_k(cell 2^-n)`.
    nodes: Vec<f64>,
    fingerprint: Option<(u64, u64)>,
}

pub fn interpolate_adapted(driver: &BrownianDriver, level: u32) -> Result<AdaptedInterpolation> {
    AdaptedInterpolation::new(driver, level)
}

impl AdaptedInterpolation {
    pub fn new<P: DrivingPath>(source: &P, level: u32) -> Result<Self> {
        let mesh = *source.mesh();
        if level == 0 || level > 52 {
            return Err(Error::Domain(format!(
                "interpolation level must be in 1..=52 (got {level})"
            )));
        }
        let cell = (-(level as f64)).exp2();
        let cell_steps = integer_ratio(cell, mesh.dt()).ok_or_else(|| {
            Error::Domain(format!(
                "dyadic cell 2^-{level} is not a multiple of dt = {}",
                mesh.dt()
            ))
        })?;
        let n = source.channels();
        let cells = mesh.steps().div_ceil(cell_steps);
        let paths: Vec<Vec<f64>> = (0..n).map(|k| source.path(k)).collect();
        let node = |c: usize, k: usize| paths[k][(c * cell_steps).min(mesh.steps())];
        let mut slopes = vec![0.0; cells * n];
        let mut nodes = vec![0.0; (cells + 1) * n];
        for c in 0..=cells {
            for k in 0..n {
                nodes[c * n + k] = node(c, k);
            }
        }
        for c in 0..cells {
            let back = c.saturating_sub(1);
            for k in 0..n {
                slopes[c * n + k] = (node(c, k) - node(back, k)) / cell;
            }
        }
        Ok(Self {
            mesh,
            channels: n,
            level,
            cell_steps,
            slopes,
            nodes,
            fingerprint: source.fingerprint(),
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Mesh steps per dyadic cell.
    pub fn cell_steps(&self) -> usize {
        self.cell_steps
    }

    /// Slope of channel `k` on the cell containing mesh step `step`.
    #[inline]
    pub fn slope(&self, step: usize, channel: usize) -> f64 {
        self.slopes[(step / self.cell_steps) * self.channels + channel]
    }

    /// Value at mesh time `t_step`, evaluated from the defining formula.
    pub fn value(&self, step: usize, channel: usize) -> f64 {
        let n = self.channels;
        let c = step / self.cell_steps;
        let r = step % self.cell_steps;
        if c * n + channel >= self.slopes.len() {
            // the final mesh point sits on a cell boundary
            let last = self.slopes.len() / n - 1;
            return self.nodes[last * n + channel];
        }
        let back = c.saturating_sub(1);
        let start = self.nodes[back * n + channel];
        let end = self.nodes[c * n + channel];
        start + (r as f64 / self.cell_steps as f64) * (end - start)
    }

    pub fn values(&self, channel: usize) -> Vec<f64> {
        (0..=self.mesh.steps())
            .map(|j| self.value(j, channel))
            .collect()
    }

    /// The same path viewed as a Cameron-Martin control.
    pub fn to_control(&self) -> super::CameronMartinControl {
        let m = self.mesh.steps();
        let n = self.channels;
        let mut hdot = vec![0.0; m * n];
        for j in 0..m {
            for k in 0..n {
                hdot[j * n + k] = self.slope(j, k);
            }
        }
        super::CameronMartinControl::new(self.mesh, n, hdot).expect("shape is consistent")
    }
}

impl DrivingPath for AdaptedInterpolation {
    fn mesh(&self) -> &TimeMesh {
        &self.mesh
    }

    fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    fn increment(&self, step: usize, channel: usize) -> f64 {
        self.slope(step, channel) * self.mesh.dt()
    }

    fn fingerprint(&self) -> Option<(u64, u64)> {
        self.fingerprint
    }
}
