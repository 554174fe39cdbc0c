use std::io::{Read, Write};

use super::driver::{csv_err, read_numeric_csv, DrivingPath};
use super::mesh::TimeMesh;
use crate::error::{Error, Result};

/// Piecewise-constant derivative `hdot` of a Cameron-Martin path with `h(t0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CameronMartinControl {
    mesh: TimeMesh,
    channels: usize,
    /// `hdot[j * channels + k]` on `[t_j, t_{j+1})`.
    hdot: Vec<f64>,
}

impl CameronMartinControl {
    pub fn new(mesh: TimeMesh, channels: usize, hdot: Vec<f64>) -> Result<Self> {
        if channels == 0 || hdot.len() != mesh.steps() * channels {
            return Err(Error::MeshMismatch(format!(
                "{} control values for {} steps x {channels} channels",
                hdot.len(),
                mesh.steps()
            )));
        }
        if hdot.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("control derivative must be finite".into()));
        }
        Ok(Self {
            mesh,
            channels,
            hdot,
        })
    }

    pub fn zero(mesh: TimeMesh, channels: usize) -> Self {
        Self {
            mesh,
            channels,
            hdot: vec![0.0; mesh.steps() * channels],
        }
    }

    /// Control with `hdot_k(t) = f(k, t)` sampled at left endpoints.
    pub fn from_fn(mesh: TimeMesh, channels: usize, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let mut hdot = Vec::with_capacity(mesh.steps() * channels);
        for j in 0..mesh.steps() {
            hdot.extend((0..channels).map(|k| f(k, mesh.time(j))));
        }
        Self::new(mesh, channels, hdot)
    }

    #[inline]
    pub fn hdot(&self, step: usize, channel: usize) -> f64 {
        self.hdot[step * self.channels + channel]
    }

    /// `∫ |hdot|^2 dt` summed over channels.
    pub fn energy(&self) -> f64 {
        self.hdot.iter().map(|v| v * v).sum::<f64>() * self.mesh.dt()
    }

    /// Reads rows `t, hdot_1, ..., hdot_N`; one row per mesh step (a trailing row at `T` is ignored).
    pub fn read_csv<Rd: Read>(r: Rd) -> Result<Self> {
        let rows = read_numeric_csv(r)?;
        if rows.len() < 2 {
            return Err(Error::Format("control CSV needs at least two rows".into()));
        }
        let channels = rows[0].len() - 1;
        let dt = rows[1][0] - rows[0][0];
        for (j, row) in rows.iter().enumerate() {
            let expect = rows[0][0] + j as f64 * dt;
            if (row[0] - expect).abs() > 1e-9 * dt.max(1.0) {
                return Err(Error::Format(format!(
                    "control CSV row {j}: non-uniform time {}",
                    row[0]
                )));
            }
        }
        let mesh = TimeMesh::new(rows[0][0], dt, rows.len() - 1)?;
        let hdot = rows[..rows.len() - 1]
            .iter()
            .flat_map(|r| r[1..].to_vec())
            .collect();
        Self::new(mesh, channels, hdot)
    }

    /// Writes one row per mesh time; the last row repeats the final slope.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.channels).map(|k| format!("hdot_{k}")));
        out.write_record(&header).map_err(csv_err)?;
        let m = self.mesh.steps();
        for j in 0..=m {
            let row_step = j.min(m - 1);
            let mut row = vec![format!("{:e}", self.mesh.time(j))];
            row.extend((0..self.channels).map(|k| format!("{:e}", self.hdot(row_step, k))));
            out.write_record(&row).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

impl DrivingPath for CameronMartinControl {
    fn mesh(&self) -> &TimeMesh {
        &self.mesh
    }

    fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    fn increment(&self, step: usize, channel: usize) -> f64 {
        self.hdot(step, channel) * self.mesh.dt()
    }
}
