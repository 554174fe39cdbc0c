use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::dynamics::{Criticality, Scheme, SolverConfig};
use crate::experiments::ForcingKind;
use crate::noise::TimeAmplitude;

/// One validation failure with a JSON-pointer-like path into the document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Every issue found in a configuration document.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid configuration:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl From<ConfigErrors> for crate::Error {
    fn from(e: ConfigErrors) -> Self {
        crate::Error::Config(e.to_string())
    }
}

/// Initial data and perturbation directions.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    /// `amplitude · exp(-|x - center|^2 / (2 width^2))`
    Gaussian {
        amplitude: f64,
        width: f64,
        center: Vec<f64>,
    },
    /// `amplitude · e^{i k·x}` with integer mode numbers.
    PlaneWave {
        amplitude: f64,
        modes: Vec<i64>,
    },
    Zero,
    /// Binary field file.
    File {
        path: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProblemBlock {
    pub criticality: Criticality,
    pub lambda: f64,
    pub dim: usize,
    pub points: usize,
    pub length: f64,
    pub nonlinear: bool,
    pub initial: FieldSpec,
    /// Derived from the criticality and dimension.
    #[serde(skip)]
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverBlock {
    pub dt: f64,
    pub horizon: f64,
    pub scheme: Scheme,
    pub dealias: Option<bool>,
    pub store_stride: usize,
    pub blowup_factor: f64,
}

impl SolverBlock {
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            dt: self.dt,
            scheme: self.scheme,
            dealias: self.dealias,
            store_stride: self.store_stride,
            blowup_factor: self.blowup_factor,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Bump {
        center: Vec<f64>,
        radius: f64,
        amplitude: [f64; 2],
        conservative: bool,
    },
    /// Binary field file; derivatives are taken spectrally.
    File { path: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum AmplitudeSpec {
    Inline(TimeAmplitude),
    /// CSV with columns `(t, g)` on a uniform grid.
    Csv {
        path: String,
    },
}

impl Serialize for AmplitudeSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Inline(a) => a.serialize(s),
            Self::Csv { path } => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("kind", "csv")?;
                m.serialize_entry("path", path)?;
                m.end()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelSpec {
    pub profile: ProfileSpec,
    pub amplitude: AmplitudeSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoiseBlock {
    pub channels: Vec<ChannelSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ControlSpec {
    Zero,
    /// CSV with columns `(t, ḣ_1..ḣ_N)`.
    Csv {
        path: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentSpec {
    Simulate {
        /// Number of leading samples whose trajectories are written to disk.
        persist: usize,
    },
    Stability {
        epsilons: Vec<f64>,
        forcing: ForcingKind,
        direction: FieldSpec,
        slope_range: [f64; 2],
    },
    Scatter {
        horizon: f64,
        checkpoints: Vec<f64>,
    },
    Support {
        levels: Vec<u32>,
        control: Option<ControlSpec>,
    },
    Norms,
}

impl ExperimentSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Simulate { .. } => "simulate",
            Self::Stability { .. } => "stability",
            Self::Scatter { .. } => "scatter",
            Self::Support { .. } => "support",
            Self::Norms => "norms",
        }
    }

    /// Parameters used when a subcommand runs a config without an experiment block.
    pub fn default_for(name: &str) -> Option<Self> {
        Some(match name {
            "simulate" => Self::Simulate { persist: 1 },
            "stability" => Self::Stability {
                epsilons: vec![0.0, 1e-4, 1e-3, 1e-2],
                forcing: ForcingKind::InitialDatum,
                direction: FieldSpec::Gaussian {
                    amplitude: 1.0,
                    width: 1.0,
                    center: Vec::new(),
                },
                slope_range: [0.9, 1.1],
            },
            "scatter" => Self::Scatter {
                horizon: 0.0,
                checkpoints: Vec::new(),
            },
            "support" => Self::Support {
                levels: vec![3, 4, 5, 6],
                control: None,
            },
            "norms" => Self::Norms,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub problem: ProblemBlock,
    pub solver: SolverBlock,
    pub noise: Option<NoiseBlock>,
    pub experiment: Option<ExperimentSpec>,
    pub seed: u64,
    pub samples: usize,
    pub output: Option<String>,
    /// Directory that relative file paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Hex SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }
}

/// Reads and validates a configuration file; relative paths inside resolve against its directory.
pub fn load_config(path: &Path) -> crate::Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = parse_config(&text)?;
    cfg.base_dir = path.parent().map(Path::to_path_buf);
    Ok(cfg)
}

/// Parses and validates a JSON configuration, reporting every problem found.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        ConfigErrors(vec![ConfigIssue {
            path: "/".into(),
            message: format!("not valid JSON: {e}"),
        }])
    })?;
    let mut w = Walker::default();
    let cfg = w.run_config(&value);
    match cfg {
        Some(c) if w.issues.is_empty() => Ok(c),
        _ => Err(ConfigErrors(w.issues)),
    }
}

#[derive(Default)]
struct Walker {
    issues: Vec<ConfigIssue>,
}

fn join(path: &str, key: &str) -> String {
    format!("{}/{key}", path.trim_end_matches('/'))
}

impl Walker {
    fn err(&mut self, path: &str, message: impl Into<String>) {
        self.issues.push(ConfigIssue {
            path: if path.is_empty() {
                "/".into()
            } else {
                path.into()
            },
            message: message.into(),
        });
    }

    fn object<'v>(
        &mut self,
        v: &'v Value,
        path: &str,
        allowed: &[&str],
    ) -> Option<&'v Map<String, Value>> {
        let Some(obj) = v.as_object() else {
            self.err(path, "expected an object");
            return None;
        };
        for key in obj.keys() {
            if !allowed.contains(&key.as_str()) {
                self.err(
                    &join(path, key),
                    format!("unknown key (allowed: {})", allowed.join(", ")),
                );
            }
        }
        Some(obj)
    }

    fn req<T: DeserializeOwned>(
        &mut self,
        obj: &Map<String, Value>,
        path: &str,
        key: &str,
    ) -> Option<T> {
        match obj.get(key) {
            None => {
                self.err(&join(path, key), "missing required key");
                None
            }
            Some(v) => self.value(v, &join(path, key)),
        }
    }

    fn opt<T: DeserializeOwned>(
        &mut self,
        obj: &Map<String, Value>,
        path: &str,
        key: &str,
        default: T,
    ) -> Option<T> {
        match obj.get(key) {
            None | Some(Value::Null) => Some(default),
            Some(v) => self.value(v, &join(path, key)),
        }
    }

    fn value<T: DeserializeOwned>(&mut self, v: &Value, path: &str) -> Option<T> {
        match T::deserialize(v) {
            Ok(t) => Some(t),
            Err(e) => {
                self.err(path, e.to_string());
                None
            }
        }
    }

    fn ensure(&mut self, ok: bool, path: &str, message: impl Into<String>) -> bool {
        if !ok {
            self.err(path, message);
        }
        ok
    }

    fn run_config(&mut self, v: &Value) -> Option<RunConfig> {
        let keys = [
            "problem",
            "solver",
            "noise",
            "experiment",
            "seed",
            "samples",
            "output",
        ];
        let obj = self.object(v, "", &keys)?;
        let problem = match obj.get("problem") {
            Some(p) => self.problem(p, "/problem"),
            None => {
                self.err("/problem", "missing required key");
                None
            }
        };
        let solver = match obj.get("solver") {
            Some(s) => self.solver(s, "/solver"),
            None => {
                self.err("/solver", "missing required key");
                None
            }
        };
        let dim = problem.as_ref().map(|p| p.dim);
        let noise = match obj.get("noise") {
            None | Some(Value::Null) => Some(None),
            Some(n) => self.noise(n, "/noise", dim).map(Some),
        };
        let experiment = match obj.get("experiment") {
            None | Some(Value::Null) => Some(None),
            Some(e) => self.experiment(e, "/experiment", dim).map(Some),
        };
        let seed = self.opt(obj, "", "seed", 0u64);
        let samples = self.opt(obj, "", "samples", 1usize);
        let output = self.opt(obj, "", "output", None::<String>);
        Some(RunConfig {
            problem: problem?,
            solver: solver?,
            noise: noise?,
            experiment: experiment?,
            seed: seed?,
            samples: samples?,
            output: output?,
            base_dir: None,
        })
    }

    fn problem(&mut self, v: &Value, path: &str) -> Option<ProblemBlock> {
        let keys = [
            "criticality",
            "lambda",
            "dim",
            "points",
            "length",
            "nonlinear",
            "initial",
        ];
        let obj = self.object(v, path, &keys)?;
        let criticality: Option<Criticality> = self.req(obj, path, "criticality");
        let lambda: Option<f64> = self.req(obj, path, "lambda");
        let dim: Option<usize> = self.req(obj, path, "dim");
        let points: Option<usize> = self.req(obj, path, "points");
        let length: Option<f64> = self.req(obj, path, "length");
        let nonlinear = self.opt(obj, path, "nonlinear", true);
        if let Some(l) = lambda {
            self.ensure(
                l == 1.0 || l == -1.0,
                &join(path, "lambda"),
                "must be +1 (focusing) or -1 (defocusing)",
            );
        }
        if let Some(d) = dim {
            self.ensure(
                (1..=3).contains(&d),
                &join(path, "dim"),
                "must be 1, 2 or 3",
            );
        }
        if let Some(n) = points {
            self.ensure(
                n >= 4 && n % 2 == 0,
                &join(path, "points"),
                "must be an even number >= 4",
            );
        }
        if let Some(l) = length {
            self.ensure(
                l.is_finite() && l > 0.0,
                &join(path, "length"),
                "must be positive",
            );
        }
        let mut alpha = None;
        if let (Some(c), Some(d)) = (criticality, dim) {
            match c.alpha(d) {
                Ok(a) => alpha = Some(a),
                Err(_) => self.err(
                    &join(path, "criticality"),
                    format!("energy-critical runs need d >= 3 (got d = {d})"),
                ),
            }
        }
        let initial = match obj.get("initial") {
            Some(i) => self.field_spec(i, &join(path, "initial"), dim),
            None => {
                self.err(&join(path, "initial"), "missing required key");
                None
            }
        };
        Some(ProblemBlock {
            criticality: criticality?,
            lambda: lambda?,
            dim: dim?,
            points: points?,
            length: length?,
            nonlinear: nonlinear?,
            initial: initial?,
            alpha: alpha?,
        })
    }

    fn center(&mut self, c: Option<Vec<f64>>, path: &str, dim: Option<usize>) {
        if let (Some(c), Some(d)) = (c, dim) {
            self.ensure(
                c.is_empty() || c.len() == d,
                path,
                format!("needs {d} coordinates (or none for the origin)"),
            );
        }
    }

    fn field_spec(&mut self, v: &Value, path: &str, dim: Option<usize>) -> Option<FieldSpec> {
        let kind: String = match v.get("kind") {
            Some(k) => self.value(k, &join(path, "kind"))?,
            None => {
                self.object(v, path, &["kind"]);
                self.err(&join(path, "kind"), "missing required key");
                return None;
            }
        };
        match kind.as_str() {
            "gaussian" => {
                let obj = self.object(v, path, &["kind", "amplitude", "width", "center"])?;
                let amplitude: Option<f64> = self.req(obj, path, "amplitude");
                let width: Option<f64> = self.opt(obj, path, "width", 1.0);
                let center: Option<Vec<f64>> = self.opt(obj, path, "center", Vec::new());
                if let Some(w) = width {
                    self.ensure(
                        w > 0.0 && w.is_finite(),
                        &join(path, "width"),
                        "must be positive",
                    );
                }
                self.center(center.clone(), &join(path, "center"), dim);
                Some(FieldSpec::Gaussian {
                    amplitude: amplitude?,
                    width: width?,
                    center: center?,
                })
            }
            "plane_wave" => {
                let obj = self.object(v, path, &["kind", "amplitude", "modes"])?;
                let amplitude: Option<f64> = self.req(obj, path, "amplitude");
                let modes: Option<Vec<i64>> = self.req(obj, path, "modes");
                if let (Some(m), Some(d)) = (&modes, dim) {
                    self.ensure(
                        m.len() == d,
                        &join(path, "modes"),
                        format!("needs {d} mode numbers"),
                    );
                }
                Some(FieldSpec::PlaneWave {
                    amplitude: amplitude?,
                    modes: modes?,
                })
            }
            "zero" => {
                self.object(v, path, &["kind"])?;
                Some(FieldSpec::Zero)
            }
            "file" => {
                let obj = self.object(v, path, &["kind", "path"])?;
                Some(FieldSpec::File {
                    path: self.req(obj, path, "path")?,
                })
            }
            other => {
                self.err(
                    &join(path, "kind"),
                    format!("unknown field kind {other:?} (gaussian, plane_wave, zero, file)"),
                );
                None
            }
        }
    }

    fn solver(&mut self, v: &Value, path: &str) -> Option<SolverBlock> {
        let keys = [
            "dt",
            "horizon",
            "scheme",
            "dealias",
            "store_stride",
            "blowup_factor",
        ];
        let obj = self.object(v, path, &keys)?;
        let dt: Option<f64> = self.req(obj, path, "dt");
        let horizon: Option<f64> = self.req(obj, path, "horizon");
        let scheme = self.opt(obj, path, "scheme", Scheme::Lie);
        let dealias = self.opt(obj, path, "dealias", None::<bool>);
        let store_stride = self.opt(obj, path, "store_stride", 1usize);
        let blowup_factor = self.opt(obj, path, "blowup_factor", 1e6);
        if let Some(dt) = dt {
            self.ensure(
                dt > 0.0 && dt.is_finite(),
                &join(path, "dt"),
                "must be positive",
            );
        }
        if let Some(h) = horizon {
            self.ensure(
                h > 0.0 && h.is_finite(),
                &join(path, "horizon"),
                "must be positive",
            );
        }
        if let (Some(dt), Some(h)) = (dt, horizon) {
            if dt > 0.0 && h > 0.0 {
                let steps = h / dt;
                self.ensure(
                    (steps - steps.round()).abs() <= 1e-9 * steps.max(1.0),
                    &join(path, "horizon"),
                    "must be an integer multiple of dt",
                );
            }
        }
        if let Some(s) = store_stride {
            self.ensure(s >= 1, &join(path, "store_stride"), "must be at least 1");
        }
        if let Some(b) = blowup_factor {
            self.ensure(b > 1.0, &join(path, "blowup_factor"), "must exceed 1");
        }
        Some(SolverBlock {
            dt: dt?,
            horizon: horizon?,
            scheme: scheme?,
            dealias: dealias?,
            store_stride: store_stride?,
            blowup_factor: blowup_factor?,
        })
    }

    fn noise(&mut self, v: &Value, path: &str, dim: Option<usize>) -> Option<NoiseBlock> {
        let obj = self.object(v, path, &["channels"])?;
        let Some(list) = obj.get("channels") else {
            self.err(&join(path, "channels"), "missing required key");
            return None;
        };
        let Some(items) = list.as_array() else {
            self.err(&join(path, "channels"), "expected an array");
            return None;
        };
        self.ensure(
            !items.is_empty(),
            &join(path, "channels"),
            "needs at least one channel",
        );
        let channels: Vec<Option<ChannelSpec>> = items
            .iter()
            .enumerate()
            .map(|(k, c)| self.channel(c, &format!("{path}/channels/{k}"), dim))
            .collect();
        Some(NoiseBlock {
            channels: channels.into_iter().collect::<Option<Vec<_>>>()?,
        })
    }

    fn channel(&mut self, v: &Value, path: &str, dim: Option<usize>) -> Option<ChannelSpec> {
        let obj = self.object(v, path, &["profile", "amplitude"])?;
        let profile = match obj.get("profile") {
            Some(p) => self.profile(p, &join(path, "profile"), dim),
            None => {
                self.err(&join(path, "profile"), "missing required key");
                None
            }
        };
        let amplitude = match obj.get("amplitude") {
            Some(a) => self.amplitude(a, &join(path, "amplitude")),
            None => {
                self.err(&join(path, "amplitude"), "missing required key");
                None
            }
        };
        Some(ChannelSpec {
            profile: profile?,
            amplitude: amplitude?,
        })
    }

    fn profile(&mut self, v: &Value, path: &str, dim: Option<usize>) -> Option<ProfileSpec> {
        let kind: String = match v.get("kind") {
            Some(k) => self.value(k, &join(path, "kind"))?,
            None => {
                self.err(&join(path, "kind"), "missing required key");
                return None;
            }
        };
        match kind.as_str() {
            "bump" => {
                let obj = self.object(
                    v,
                    path,
                    &["kind", "center", "radius", "amplitude", "conservative"],
                )?;
                let center: Option<Vec<f64>> = self.opt(obj, path, "center", Vec::new());
                let radius: Option<f64> = self.req(obj, path, "radius");
                let amplitude: Option<[f64; 2]> = self.req(obj, path, "amplitude");
                let conservative: Option<bool> = self.opt(obj, path, "conservative", false);
                self.center(center.clone(), &join(path, "center"), dim);
                if let Some(r) = radius {
                    self.ensure(
                        r > 0.0 && r.is_finite(),
                        &join(path, "radius"),
                        "must be positive",
                    );
                }
                if let (Some(a), Some(true)) = (amplitude, conservative) {
                    self.ensure(
                        a[0] == 0.0,
                        &join(path, "amplitude"),
                        "a conservative profile needs a zero real part",
                    );
                }
                Some(ProfileSpec::Bump {
                    center: center?,
                    radius: radius?,
                    amplitude: amplitude?,
                    conservative: conservative?,
                })
            }
            "file" => {
                let obj = self.object(v, path, &["kind", "path"])?;
                Some(ProfileSpec::File {
                    path: self.req(obj, path, "path")?,
                })
            }
            other => {
                self.err(
                    &join(path, "kind"),
                    format!("unknown profile kind {other:?} (bump, file)"),
                );
                None
            }
        }
    }

    fn amplitude(&mut self, v: &Value, path: &str) -> Option<AmplitudeSpec> {
        if v.get("kind").and_then(Value::as_str) == Some("csv") {
            let obj = self.object(v, path, &["kind", "path"])?;
            return Some(AmplitudeSpec::Csv {
                path: self.req(obj, path, "path")?,
            });
        }
        let a: TimeAmplitude = self.value(v, path)?;
        if let Err(e) = a.validate() {
            self.err(path, e.to_string());
            return None;
        }
        Some(AmplitudeSpec::Inline(a))
    }

    fn experiment(&mut self, v: &Value, path: &str, dim: Option<usize>) -> Option<ExperimentSpec> {
        let kind: String = match v.get("kind") {
            Some(k) => self.value(k, &join(path, "kind"))?,
            None => {
                self.err(&join(path, "kind"), "missing required key");
                return None;
            }
        };
        match kind.as_str() {
            "simulate" => {
                let obj = self.object(v, path, &["kind", "persist"])?;
                Some(ExperimentSpec::Simulate {
                    persist: self.opt(obj, path, "persist", 1usize)?,
                })
            }
            "stability" => {
                let obj = self.object(
                    v,
                    path,
                    &["kind", "epsilons", "forcing", "direction", "slope_range"],
                )?;
                let epsilons: Option<Vec<f64>> = self.req(obj, path, "epsilons");
                let forcing = self.opt(obj, path, "forcing", ForcingKind::InitialDatum);
                let direction = match obj.get("direction") {
                    Some(d) => self.field_spec(d, &join(path, "direction"), dim),
                    None => Some(FieldSpec::Gaussian {
                        amplitude: 1.0,
                        width: 1.0,
                        center: Vec::new(),
                    }),
                };
                let slope_range = self.opt(obj, path, "slope_range", [0.9, 1.1]);
                if let Some(e) = &epsilons {
                    self.ensure(
                        e.iter().all(|x| x.is_finite() && *x >= 0.0),
                        &join(path, "epsilons"),
                        "must be finite and nonnegative",
                    );
                }
                if let Some(r) = slope_range {
                    self.ensure(
                        r[0] <= r[1],
                        &join(path, "slope_range"),
                        "lower bound exceeds upper bound",
                    );
                }
                Some(ExperimentSpec::Stability {
                    epsilons: epsilons?,
                    forcing: forcing?,
                    direction: direction?,
                    slope_range: slope_range?,
                })
            }
            "scatter" => {
                let obj = self.object(v, path, &["kind", "horizon", "checkpoints"])?;
                let horizon: Option<f64> = self.req(obj, path, "horizon");
                let checkpoints: Option<Vec<f64>> = self.req(obj, path, "checkpoints");
                if let Some(c) = &checkpoints {
                    self.ensure(
                        c.windows(2).all(|w| w[1] > w[0]) && c.iter().all(|t| *t >= 0.0),
                        &join(path, "checkpoints"),
                        "must be nonnegative and strictly increasing",
                    );
                }
                Some(ExperimentSpec::Scatter {
                    horizon: horizon?,
                    checkpoints: checkpoints?,
                })
            }
            "support" => {
                let obj = self.object(v, path, &["kind", "levels", "control"])?;
                let levels: Option<Vec<u32>> = self.req(obj, path, "levels");
                if let Some(l) = &levels {
                    self.ensure(
                        !l.is_empty() && l.iter().all(|n| (1..=30).contains(n)),
                        &join(path, "levels"),
                        "needs at least one level in 1..=30",
                    );
                }
                let control = match obj.get("control") {
                    None | Some(Value::Null) => Some(None),
                    Some(c) => self.control(c, &join(path, "control")).map(Some),
                };
                Some(ExperimentSpec::Support {
                    levels: levels?,
                    control: control?,
                })
            }
            "norms" => {
                self.object(v, path, &["kind"])?;
                Some(ExperimentSpec::Norms)
            }
            other => {
                self.err(
                    &join(path, "kind"),
                    format!("unknown experiment {other:?} (simulate, stability, scatter, support, norms)"),
                );
                None
            }
        }
    }

    fn control(&mut self, v: &Value, path: &str) -> Option<ControlSpec> {
        match v.get("kind").and_then(Value::as_str) {
            Some("zero") => {
                self.object(v, path, &["kind"])?;
                Some(ControlSpec::Zero)
            }
            Some("csv") => {
                let obj = self.object(v, path, &["kind", "path"])?;
                Some(ControlSpec::Csv {
                    path: self.req(obj, path, "path")?,
                })
            }
            _ => {
                self.err(&join(path, "kind"), "expected \"zero\" or \"csv\"");
                None
            }
        }
    }
}
