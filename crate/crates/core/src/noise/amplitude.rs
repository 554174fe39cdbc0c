use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Time amplitude `g_k(t)` of one noise channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeAmplitude {
    Constant {
        value: f64,
    },
    /// Samples on a uniform mesh, linearly interpolated and held constant outside it.
    Samples {
        t0: f64,
        dt: f64,
        values: Vec<f64>,
    },
    /// Smooth bump with peak `amplitude` at the midpoint, zero outside `(start, end)`.
    SmoothPulse {
        amplitude: f64,
        start: f64,
        end: f64,
    },
    /// `mean + amplitude cos(2π frequency t)`.
    Harmonic {
        mean: f64,
        amplitude: f64,
        frequency: f64,
    },
}

impl TimeAmplitude {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        match self {
            Self::Constant { value } if !finite(*value) => {
                domain("constant amplitude must be finite")
            }
            Self::Samples { t0, dt, values } => {
                if values.is_empty()
                    || !(*dt > 0.0)
                    || !finite(*t0)
                    || !values.iter().all(|v| finite(*v))
                {
                    domain("sampled amplitude needs dt > 0 and finite values")
                } else {
                    Ok(())
                }
            }
            Self::SmoothPulse {
                amplitude,
                start,
                end,
            } => {
                if !(start < end) || !finite(*amplitude) || !finite(*start) || !finite(*end) {
                    domain("pulse needs start < end and finite values")
                } else {
                    Ok(())
                }
            }
            Self::Harmonic {
                mean,
                amplitude,
                frequency,
            } => {
                if [mean, amplitude, frequency].iter().all(|v| finite(**v)) {
                    Ok(())
                } else {
                    domain("harmonic amplitude must be finite")
                }
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Samples { t0, dt, values } => {
                let s = (t - t0) / dt;
                if s <= 0.0 {
                    return values[0];
                }
                let i = s.floor() as usize;
                if i + 1 >= values.len() {
                    return values[values.len() - 1];
                }
                let w = s - i as f64;
                values[i] * (1.0 - w) + values[i + 1] * w
            }
            Self::SmoothPulse {
                amplitude,
                start,
                end,
            } => {
                if t <= *start || t >= *end {
                    return 0.0;
                }
                let half = 0.5 * (end - start);
                let u = (t - 0.5 * (start + end)) / half;
                amplitude * (1.0 - 1.0 / (1.0 - u * u)).exp()
            }
            Self::Harmonic {
                mean,
                amplitude,
                frequency,
            } => mean + amplitude * (std::f64::consts::TAU * frequency * t).cos(),
        }
    }

    /// Time after which the amplitude vanishes identically, if any.
    pub fn support_end(&self) -> Option<f64> {
        match self {
            Self::SmoothPulse { end, .. } => Some(*end),
            Self::Constant { value } if *value == 0.0 => Some(f64::NEG_INFINITY),
            Self::Samples { t0, dt, values } => {
                if *values.last().expect("validated non-empty") != 0.0 {
                    return None;
                }
                let last_nonzero = values.iter().rposition(|v| *v != 0.0);
                Some(match last_nonzero {
                    None => f64::NEG_INFINITY,
                    Some(i) => t0 + (i + 1) as f64 * dt,
                })
            }
            _ => None,
        }
    }
}
