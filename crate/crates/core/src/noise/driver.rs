use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::mesh::TimeMesh;
use crate::error::{domain, Error, Result};

/// Anything that supplies per-step increments of an `N`-channel driving path.
pub trait DrivingPath {
    fn mesh(&self) -> &TimeMesh;
    fn channels(&self) -> usize;
    /// Increment of channel `channel` over `[t_step, t_{step+1}]`.
    fn increment(&self, step: usize, channel: usize) -> f64;

    /// `(seed, sample)` when the path derives from a sampled Brownian motion.
    fn fingerprint(&self) -> Option<(u64, u64)> {
        None
    }

    fn increments_at(&self, step: usize) -> Vec<f64> {
        (0..self.channels())
            .map(|k| self.increment(step, k))
            .collect()
    }

    /// Path values at mesh times, starting from 0.
    fn path(&self, channel: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.mesh().steps() + 1);
        let mut acc = 0.0;
        out.push(acc);
        for j in 0..self.mesh().steps() {
            acc += self.increment(j, channel);
            out.push(acc);
        }
        out
    }
}

/// `N` independent Brownian motions on a uniform mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrownianDriver {
    mesh: TimeMesh,
    channels: usize,
    /// Step-major: `increments[j * channels + k]`.
    increments: Vec<f64>,
    seed: u64,
    sample: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of the counter-based stream for one `(sample, channel)` pair.
pub fn stream_key(seed: u64, sample: u64, channel: u64) -> u64 {
    seed ^ splitmix64(splitmix64(sample) ^ channel.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Samples `channels` Brownian paths; identical `(seed, sample)` reproduce
/// identical increments bit-for-bit, independently of sampling order.
pub fn sample_driver(
    mesh: TimeMesh,
    channels: usize,
    seed: u64,
    sample: u64,
) -> Result<BrownianDriver> {
    if channels == 0 {
        return domain("a driver needs at least one channel");
    }
    let m = mesh.steps();
    let scale = mesh.dt().sqrt();
    let mut increments = vec![0.0; m * channels];
    for k in 0..channels {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_key(seed, sample, k as u64));
        for j in 0..m {
            let z: f64 = StandardNormal.sample(&mut rng);
            increments[j * channels + k] = scale * z;
        }
    }
    Ok(BrownianDriver {
        mesh,
        channels,
        increments,
        seed,
        sample,
    })
}

impl BrownianDriver {
    /// Driver with explicit increments (step-major).
    pub fn from_increments(
        mesh: TimeMesh,
        channels: usize,
        increments: Vec<f64>,
        seed: u64,
        sample: u64,
    ) -> Result<Self> {
        if channels == 0 || increments.len() != mesh.steps() * channels {
            return Err(Error::MeshMismatch(format!(
                "{} increments for {} steps x {channels} channels",
                increments.len(),
                mesh.steps()
            )));
        }
        Ok(Self {
            mesh,
            channels,
            increments,
            seed,
            sample,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sample(&self) -> u64 {
        self.sample
    }

    pub fn raw_increments(&self) -> &[f64] {
        &self.increments
    }

    /// Same path observed on a mesh `factor` times coarser (increments summed).
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        let mesh = self.mesh.coarsen(factor)?;
        let n = self.channels;
        let mut increments = vec![0.0; mesh.steps() * n];
        for j in 0..mesh.steps() {
            for k in 0..n {
                increments[j * n + k] = (0..factor)
                    .map(|i| self.increments[(j * factor + i) * n + k])
                    .sum();
            }
        }
        Ok(Self {
            mesh,
            channels: n,
            increments,
            seed: self.seed,
            sample: self.sample,
        })
    }

    /// Writes `t, beta_1, ..., beta_N` rows for every mesh time.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.channels).map(|k| format!("beta_{k}")));
        out.write_record(&header).map_err(csv_err)?;
        let paths: Vec<Vec<f64>> = (0..self.channels).map(|k| self.path(k)).collect();
        for j in 0..=self.mesh.steps() {
            let mut row = vec![format!("{:e}", self.mesh.time(j))];
            row.extend(paths.iter().map(|p| format!("{:e}", p[j])));
            out.write_record(&row).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a path written by [`write_csv`](Self::write_csv); the mesh is inferred from the times.
    pub fn read_csv<Rd: Read>(r: Rd, seed: u64, sample: u64) -> Result<Self> {
        let rows = read_numeric_csv(r)?;
        if rows.len() < 2 {
            return Err(Error::Format("driver CSV needs at least two rows".into()));
        }
        let channels = rows[0].len() - 1;
        let dt = rows[1][0] - rows[0][0];
        let mesh = TimeMesh::new(rows[0][0], dt, rows.len() - 1)?;
        let mut increments = Vec::with_capacity(mesh.steps() * channels);
        for w in rows.windows(2) {
            increments.extend((1..=channels).map(|c| w[1][c] - w[0][c]));
        }
        Self::from_increments(mesh, channels, increments, seed, sample)
    }
}

impl DrivingPath for BrownianDriver {
    fn mesh(&self) -> &TimeMesh {
        &self.mesh
    }

    fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    fn increment(&self, step: usize, channel: usize) -> f64 {
        self.increments[step * self.channels + channel]
    }

    fn fingerprint(&self) -> Option<(u64, u64)> {
        Some((self.seed, self.sample))
    }
}

/// A driving path given by arbitrary per-step increments, e.g. `beta^n - beta + h`.
#[derive(Clone, Debug, PartialEq)]
pub struct IncrementPath {
    mesh: TimeMesh,
    channels: usize,
    increments: Vec<f64>,
}

impl IncrementPath {
    /// Linear combination `sum_i c_i * path_i` of paths on one mesh.
    pub fn combine(terms: &[(f64, &dyn DrivingPath)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return domain("empty path combination");
        };
        let mesh = *first.mesh();
        let channels = first.channels();
        for (_, p) in &terms[1..] {
            mesh.ensure_same(p.mesh(), "path combination")?;
            if p.channels() != channels {
                return Err(Error::MeshMismatch(
                    "path combination: channel counts differ".into(),
                ));
            }
        }
        let mut increments = vec![0.0; mesh.steps() * channels];
        for j in 0..mesh.steps() {
            for k in 0..channels {
                increments[j * channels + k] =
                    terms.iter().map(|(c, p)| c * p.increment(j, k)).sum();
            }
        }
        Ok(Self {
            mesh,
            channels,
            increments,
        })
    }
}

impl DrivingPath for IncrementPath {
    fn mesh(&self) -> &TimeMesh {
        &self.mesh
    }

    fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    fn increment(&self, step: usize, channel: usize) -> f64 {
        self.increments[step * self.channels + channel]
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Format(format!("csv: {e}"))
}

pub(crate) fn read_numeric_csv<Rd: Read>(r: Rd) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::Format(format!("csv value {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() < 2 {
            return Err(Error::Format(
                "csv rows need a time column and at least one channel".into(),
            ));
        }
        if let Some(first) = rows.first() {
            let first: &Vec<f64> = first;
            if first.len() != row.len() {
                return Err(Error::Format("ragged csv rows".into()));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}
