use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{parse_config, RunConfig};
use super::{build, Check, CODE_VERSION};
use crate::codec::{read_field, write_field, FIELD_MAGIC};
use crate::dynamics::{Equation, ProblemInfo, RunStatus, SolverConfig, Trajectory};
use crate::error::{Error, Result};
use crate::noise::{read_numeric_csv, BrownianDriver};
use crate::observables::{ito_mass_residual, mass, ItoResidualReport};
use crate::spectral::{ComplexField, SpaceTimeSeries};

pub const TRAJECTORY_FORMAT: &str = "snls-trajectory/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub index: usize,
    pub time: f64,
    pub file: String,
    pub sha256: String,
}

/// `manifest.json` of a trajectory directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub format: String,
    pub code_version: String,
    pub config_hash: String,
    /// Echo of the run configuration (pretty JSON).
    pub config: serde_json::Value,
    pub seed: u64,
    pub sample: u64,
    pub equation: Equation,
    pub problem: ProblemInfo,
    pub solver: SolverConfig,
    pub t0: f64,
    pub status: RunStatus,
    pub snapshots: Vec<SnapshotEntry>,
    /// `t, mass` per solver step.
    pub mass_file: String,
    /// `t, beta_1..beta_N` of the driving path.
    pub driver_file: Option<String>,
    /// `t, residual` of the Itô mass formula.
    pub residual_file: Option<String>,
}

fn sha_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub(crate) fn csv_header(w: &mut impl Write, cfg_hash: &str, seed: u64) -> Result<()> {
    writeln!(
        w,
        "# snls {CODE_VERSION} config_hash={cfg_hash} seed={seed}"
    )?;
    Ok(())
}

fn write_columns(
    path: &Path,
    header: &str,
    rows: impl Iterator<Item = Vec<f64>>,
    cfg_hash: &str,
    seed: u64,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    csv_header(&mut w, cfg_hash, seed)?;
    writeln!(w, "{header}")?;
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn strip_comments(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

fn read_columns(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    read_numeric_csv(strip_comments(&text).as_bytes())
}

/// Writes `traj` (and optionally its driver and mass residual) as a trajectory directory.
pub fn write_trajectory(
    dir: &Path,
    cfg: &RunConfig,
    sample: u64,
    traj: &Trajectory<f64>,
    driver: Option<&BrownianDriver>,
    residual: Option<&ItoResidualReport>,
) -> Result<TrajectoryManifest> {
    fs::create_dir_all(dir)?;
    let hash = cfg.hash();
    let mut snapshots = Vec::with_capacity(traj.series.len());
    for (i, (t, f)) in traj
        .series
        .times()
        .iter()
        .zip(traj.series.fields())
        .enumerate()
    {
        let name = format!("snap_{i:06}.bin");
        let mut bytes = Vec::new();
        write_field(&mut bytes, f, FIELD_MAGIC)?;
        fs::write(dir.join(&name), &bytes)?;
        snapshots.push(SnapshotEntry {
            index: i,
            time: *t,
            file: name,
            sha256: sha_hex(&bytes),
        });
    }
    let times = traj.mass_times();
    write_columns(
        &dir.join("mass.csv"),
        "t,mass",
        times.iter().zip(&traj.mass).map(|(t, m)| vec![*t, *m]),
        &hash,
        cfg.seed,
    )?;
    let driver_file = match driver {
        Some(d) => {
            let mut w = BufWriter::new(File::create(dir.join("driver.csv"))?);
            csv_header(&mut w, &hash, cfg.seed)?;
            d.write_csv(&mut w)?;
            w.flush()?;
            Some("driver.csv".to_string())
        }
        None => None,
    };
    let residual_file = match residual {
        Some(r) => {
            write_columns(
                &dir.join("residual.csv"),
                "t,residual",
                r.times.iter().zip(&r.residual).map(|(t, v)| vec![*t, *v]),
                &hash,
                cfg.seed,
            )?;
            Some("residual.csv".to_string())
        }
        None => None,
    };
    let manifest = TrajectoryManifest {
        format: TRAJECTORY_FORMAT.into(),
        code_version: CODE_VERSION.into(),
        config_hash: hash,
        config: serde_json::to_value(cfg)?,
        seed: cfg.seed,
        sample,
        equation: traj.equation,
        problem: traj.problem.clone(),
        solver: traj.config.clone(),
        t0: traj.t0,
        status: traj.status,
        snapshots,
        mass_file: "mass.csv".into(),
        driver_file,
        residual_file,
    };
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(manifest)
}

/// A trajectory directory read back from disk.
pub struct StoredTrajectory {
    pub dir: PathBuf,
    pub manifest: TrajectoryManifest,
    pub series: SpaceTimeSeries<f64>,
    /// `(t, mass)` rows of the stored mass record.
    pub mass: Vec<(f64, f64)>,
}

pub fn read_trajectory(dir: &Path) -> Result<StoredTrajectory> {
    let text = fs::read_to_string(dir.join("manifest.json"))?;
    let manifest: TrajectoryManifest = serde_json::from_str(&text)?;
    if manifest.format != TRAJECTORY_FORMAT {
        return Err(Error::Format(format!(
            "unsupported trajectory format {:?}",
            manifest.format
        )));
    }
    let mut times = Vec::new();
    let mut fields = Vec::new();
    for s in &manifest.snapshots {
        let f: ComplexField<f64> = read_field(
            &mut BufReader::new(File::open(dir.join(&s.file))?),
            FIELD_MAGIC,
        )?;
        times.push(s.time);
        fields.push(f);
    }
    let series = SpaceTimeSeries::new(times, fields)?;
    let mass = read_columns(&dir.join(&manifest.mass_file))?
        .into_iter()
        .map(|r| (r[0], r[1]))
        .collect();
    Ok(StoredTrajectory {
        dir: dir.to_path_buf(),
        manifest,
        series,
        mass,
    })
}

impl StoredTrajectory {
    /// Rebuilds an in-memory trajectory (the mass record is the stored one).
    pub fn trajectory(&self) -> Trajectory<f64> {
        Trajectory {
            series: self.series.clone(),
            equation: self.manifest.equation,
            problem: self.manifest.problem.clone(),
            config: self.manifest.solver.clone(),
            fingerprint: Some((self.manifest.seed, self.manifest.sample)),
            t0: self.manifest.t0,
            mass: self.mass.iter().map(|r| r.1).collect(),
            status: self.manifest.status,
        }
    }
}

/// Relative tolerance of the recomputation checks.
pub const VERIFY_TOLERANCE: f64 = 1e-12;

/// Recomputes what a trajectory directory records: snapshot digests, the mass record at
/// stored snapshots and, when a driver is stored, the Itô mass residual.
pub fn verify_trajectory(dir: &Path) -> Result<Vec<Check>> {
    let stored = read_trajectory(dir)?;
    let m = &stored.manifest;
    let mut checks = Vec::new();

    let mut digest_ok = true;
    for s in &m.snapshots {
        let bytes = fs::read(dir.join(&s.file))?;
        digest_ok &= sha_hex(&bytes) == s.sha256;
    }
    checks.push(Check::boolean("snapshot_digests", digest_ok));

    // mass record against snapshots at matching steps
    let stride = m.solver.store_stride.max(1);
    let fields = stored.series.fields();
    let mut worst: f64 = 0.0;
    let mut aligned = true;
    for (i, f) in fields.iter().enumerate() {
        let step = if i + 1 == fields.len() {
            stored.mass.len().saturating_sub(1)
        } else {
            i * stride
        };
        let Some(&(t, recorded)) = stored.mass.get(step) else {
            aligned = false;
            break;
        };
        aligned &= (t - stored.series.times()[i]).abs() <= 1e-9 * t.abs().max(1.0);
        let fresh = mass(f);
        worst = worst.max((fresh - recorded).abs() / fresh.abs().max(f64::MIN_POSITIVE));
    }
    if !aligned {
        worst = f64::INFINITY;
    }
    checks.push(Check::at_most("mass_record", worst, VERIFY_TOLERANCE));

    if let (Some(driver_file), Some(residual_file)) = (&m.driver_file, &m.residual_file) {
        let text = fs::read_to_string(dir.join(driver_file))?;
        let driver = BrownianDriver::read_csv(strip_comments(&text).as_bytes(), m.seed, m.sample)?;
        let mut cfg = parse_config(&serde_json::to_string(&m.config)?)?;
        cfg.base_dir = Some(dir.to_path_buf());
        let grid = build::grid(&cfg)?;
        let noise = build::noise(&cfg, &grid)?
            .ok_or_else(|| Error::Format("stored residual without a noise block".into()))?;
        let report = ito_mass_residual(&stored.trajectory(), &noise, &driver)?;
        let rows = read_columns(&dir.join(residual_file))?;
        let scale = stored
            .mass
            .first()
            .map_or(1.0, |r| r.1.abs().max(f64::MIN_POSITIVE));
        let mut worst: f64 = if rows.len() == report.residual.len() {
            0.0
        } else {
            f64::INFINITY
        };
        for (row, fresh) in rows.iter().zip(&report.residual) {
            worst = worst.max((row[1] - fresh).abs() / scale);
        }
        checks.push(Check::at_most("mass_residual", worst, VERIFY_TOLERANCE));
    }
    Ok(checks)
}
