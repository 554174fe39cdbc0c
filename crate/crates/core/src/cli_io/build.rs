use std::fs::File;
use std::io::BufReader;

use num_complex::Complex;

use super::config::{AmplitudeSpec, ControlSpec, FieldSpec, ProfileSpec, RunConfig};
use crate::codec::{read_field, FIELD_MAGIC};
use crate::dynamics::ProblemSpec;
use crate::error::{Error, Result};
use crate::noise::{
    make_bump_profile, read_numeric_csv, CameronMartinControl, DrivingPath, NoiseChannel,
    NoiseModel, NoiseProfile, TimeAmplitude, TimeMesh,
};
use crate::spectral::{ComplexField, TorusGrid};

pub fn grid(cfg: &RunConfig) -> Result<TorusGrid<f64>> {
    TorusGrid::new(cfg.problem.dim, cfg.problem.points, cfg.problem.length)
}

fn read_binary(cfg: &RunConfig, path: &str, grid: &TorusGrid<f64>) -> Result<ComplexField<f64>> {
    let file = File::open(cfg.resolve(path))
        .map_err(|e| Error::Config(format!("cannot open field file {path}: {e}")))?;
    let f: ComplexField<f64> = read_field(&mut BufReader::new(file), FIELD_MAGIC)?;
    grid.ensure_same(f.grid(), "field file")?;
    Ok(f)
}

pub fn field(
    cfg: &RunConfig,
    spec: &FieldSpec,
    grid: &TorusGrid<f64>,
) -> Result<ComplexField<f64>> {
    Ok(match spec {
        FieldSpec::Zero => ComplexField::zeros(*grid),
        FieldSpec::Gaussian {
            amplitude,
            width,
            center,
        } => {
            let c = |a: usize| center.get(a).copied().unwrap_or(0.0);
            let d = grid.dim();
            ComplexField::from_fn(*grid, |x| {
                let r2: f64 = (0..d).map(|a| (x[a] - c(a)).powi(2)).sum();
                Complex::new(amplitude * (-r2 / (2.0 * width * width)).exp(), 0.0)
            })
        }
        FieldSpec::PlaneWave { amplitude, modes } => {
            let mut m = [0isize; 3];
            for (slot, v) in m.iter_mut().zip(modes) {
                *slot = *v as isize;
            }
            ComplexField::plane_wave(*grid, m, Complex::new(*amplitude, 0.0))
        }
        FieldSpec::File { path } => read_binary(cfg, path, grid)?,
    })
}

fn amplitude(cfg: &RunConfig, spec: &AmplitudeSpec) -> Result<TimeAmplitude> {
    match spec {
        AmplitudeSpec::Inline(a) => Ok(a.clone()),
        AmplitudeSpec::Csv { path } => {
            let file = File::open(cfg.resolve(path))
                .map_err(|e| Error::Config(format!("cannot open amplitude csv {path}: {e}")))?;
            let rows = read_numeric_csv(file)?;
            if rows.len() < 2 {
                return Err(Error::Config(format!(
                    "amplitude csv {path} needs at least two rows"
                )));
            }
            let (t0, dt) = (rows[0][0], rows[1][0] - rows[0][0]);
            for (j, r) in rows.iter().enumerate() {
                if (r[0] - (t0 + j as f64 * dt)).abs() > 1e-9 * dt.abs().max(1.0) {
                    return Err(Error::Config(format!(
                        "amplitude csv {path}: row {j} is off the uniform grid"
                    )));
                }
            }
            let a = TimeAmplitude::Samples {
                t0,
                dt,
                values: rows.iter().map(|r| r[1]).collect(),
            };
            a.validate()?;
            Ok(a)
        }
    }
}

pub fn noise(cfg: &RunConfig, grid: &TorusGrid<f64>) -> Result<Option<NoiseModel<f64>>> {
    let Some(block) = &cfg.noise else {
        return Ok(None);
    };
    let mut channels = Vec::with_capacity(block.channels.len());
    for (k, ch) in block.channels.iter().enumerate() {
        let profile = match &ch.profile {
            ProfileSpec::Bump {
                center,
                radius,
                amplitude,
                conservative,
            } => {
                let c: Vec<f64> = if center.is_empty() {
                    vec![0.0; grid.dim()]
                } else {
                    center.clone()
                };
                make_bump_profile(
                    grid,
                    &c,
                    *radius,
                    Complex::new(amplitude[0], amplitude[1]),
                    *conservative,
                )
                .map_err(|e| Error::Config(format!("/noise/channels/{k}/profile: {e}")))?
            }
            ProfileSpec::File { path } => NoiseProfile::from_field(read_binary(cfg, path, grid)?)?,
        };
        channels.push(NoiseChannel {
            profile,
            amplitude: amplitude(cfg, &ch.amplitude)?,
        });
    }
    NoiseModel::new(channels)
        .map(Some)
        .map_err(|e| Error::Config(format!("/noise: {e}")))
}

pub fn problem(cfg: &RunConfig) -> Result<ProblemSpec<f64>> {
    let g = grid(cfg)?;
    let initial = field(cfg, &cfg.problem.initial, &g)?;
    let noise = noise(cfg, &g)?;
    Ok(
        ProblemSpec::new(cfg.problem.criticality, cfg.problem.lambda, initial, noise)?
            .with_nonlinearity(cfg.problem.nonlinear),
    )
}

pub fn mesh(cfg: &RunConfig) -> Result<TimeMesh> {
    TimeMesh::covering(cfg.solver.horizon, cfg.solver.dt)
}

pub fn control(
    cfg: &RunConfig,
    spec: &ControlSpec,
    mesh: TimeMesh,
    channels: usize,
) -> Result<CameronMartinControl> {
    match spec {
        ControlSpec::Zero => Ok(CameronMartinControl::zero(mesh, channels)),
        ControlSpec::Csv { path } => {
            let file = File::open(cfg.resolve(path))
                .map_err(|e| Error::Config(format!("cannot open control csv {path}: {e}")))?;
            let h = CameronMartinControl::read_csv(file)?;
            mesh.ensure_same(h.mesh(), "control csv")?;
            if h.channels() != channels {
                return Err(Error::Config(format!(
                    "control csv {path} has {} channels, noise has {channels}",
                    h.channels()
                )));
            }
            Ok(h)
        }
    }
}
