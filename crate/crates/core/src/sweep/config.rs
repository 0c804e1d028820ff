//! Line-based `key = value` configuration format for runs and sweeps.
//!
//! Recognized keys: `model`, the four parameters `J`, `Omega`, `kappa`, `T`,
//! `omega_ratio`, the stop-policy fields `n_max`, `eps_settle`,
//! `settle_window`, the grid axes `axis1` / `axis2`
//! (`axisN = <param> <lo> <hi> <steps>`, or just `axisN = <param>` for the
//! default grid), and `outputs`. `#` starts a comment.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::gates::{SwapStrength, ThermalSpec, DEFAULT_OMEGA_RATIO};
use crate::model::{DirectConfig, IndirectConfig, ModelConfig, ModelKind, Param, StopPolicy};

/// Default 1-D grid used when an axis names a parameter without a range.
const DEFAULT_STRENGTH_AXIS: (f64, f64, usize) = (0.0, FRAC_PI_2, 100);
const DEFAULT_TEMPERATURE_AXIS: (f64, f64, usize) = (0.0, 10.0, 101);

/// One `key = value` assignment together with where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub location: String,
}

/// A swept parameter range; `steps` points, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub param: Param,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let span = self.hi - self.lo;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.hi
                } else {
                    // Clamp: rounding must not push a point past a range edge.
                    (self.lo + span * (i as f64 / (self.steps - 1) as f64)).clamp(self.lo, self.hi)
                }
            })
            .collect()
    }
}

/// Observable families a spec declares it wants exported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    /// The accumulated backflow measure per grid point (`N`).
    Measure,
    /// Activation-threshold traces.
    Thresholds,
    /// Full per-collision trajectories.
    Trajectory,
    /// System/ancilla coherence columns.
    Coherences,
}

impl OutputKind {
    pub fn name(self) -> &'static str {
        match self {
            OutputKind::Measure => "N",
            OutputKind::Thresholds => "thresholds",
            OutputKind::Trajectory => "trajectory",
            OutputKind::Coherences => "coherences",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        match name {
            "N" => Some(OutputKind::Measure),
            "thresholds" => Some(OutputKind::Thresholds),
            "trajectory" => Some(OutputKind::Trajectory),
            "coherences" => Some(OutputKind::Coherences),
            _ => None,
        }
    }
}

/// A validated run/sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub model: ModelKind,
    pub fixed: BTreeMap<Param, f64>,
    pub omega_ratio: f64,
    pub stop: StopPolicy,
    pub axis1: Option<Axis>,
    pub axis2: Option<Axis>,
    pub outputs: Option<Vec<OutputKind>>,
}

impl SweepSpec {
    /// Build the model config at one grid point. `overrides` supply the axis
    /// values (and may override fixed parameters).
    pub fn model_config_at(&self, overrides: &[(Param, f64)]) -> Result<ModelConfig> {
        let mut values = self.fixed.clone();
        for &(param, value) in overrides {
            values.insert(param, value);
        }
        let fetch = |param: Param| -> Result<f64> {
            values.get(&param).copied().ok_or_else(|| {
                Error::invalid(format!(
                    "the {} model requires parameter {} (fixed value or axis)",
                    self.model.name(),
                    param.key()
                ))
            })
        };
        let thermal = ThermalSpec::new(fetch(Param::Temperature)?, self.omega_ratio)?;
        let cfg = match self.model {
            ModelKind::Direct => ModelConfig::Direct(DirectConfig {
                coupling: SwapStrength::new(fetch(Param::Coupling)?)?,
                intra: SwapStrength::new(fetch(Param::Intra)?)?,
                thermal,
                stop: self.stop,
            }),
            ModelKind::Indirect => ModelConfig::Indirect(IndirectConfig {
                memory_coupling: SwapStrength::new(fetch(Param::MemoryCoupling)?)?,
                coupling: SwapStrength::new(fetch(Param::Coupling)?)?,
                intra: SwapStrength::new(fetch(Param::Intra)?)?,
                thermal,
                stop: self.stop,
            }),
        };
        Ok(cfg)
    }

    /// Errors unless the declared outputs (when present) include `kind`.
    pub fn require_output(&self, kind: OutputKind) -> Result<()> {
        match &self.outputs {
            Some(kinds) if !kinds.contains(&kind) => Err(Error::invalid(format!(
                "declared outputs do not include '{}' required by this command",
                kind.name()
            ))),
            _ => Ok(()),
        }
    }

    /// Config echo for provenance headers; parseable back by [`parse_config`].
    pub fn echo_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("model = {}", self.model.name())];
        for (param, value) in &self.fixed {
            lines.push(format!("{} = {}", param.key(), super::format_float(*value)));
        }
        lines.push(format!(
            "omega_ratio = {}",
            super::format_float(self.omega_ratio)
        ));
        lines.push(format!("n_max = {}", self.stop.n_max()));
        lines.push(format!(
            "eps_settle = {}",
            super::format_float(self.stop.eps_settle())
        ));
        lines.push(format!("settle_window = {}", self.stop.settle_window()));
        for (name, axis) in [("axis1", &self.axis1), ("axis2", &self.axis2)] {
            if let Some(axis) = axis {
                lines.push(format!(
                    "{name} = {} {} {} {}",
                    axis.param.key(),
                    super::format_float(axis.lo),
                    super::format_float(axis.hi),
                    axis.steps
                ));
            }
        }
        if let Some(outputs) = &self.outputs {
            let names: Vec<&str> = outputs.iter().map(|o| o.name()).collect();
            lines.push(format!("outputs = {}", names.join(" ")));
        }
        lines
    }
}

/// Split raw config text into entries, tracking line numbers for messages.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let stripped = stripped.trim();
        if stripped.is_empty() {
            continue;
        }
        let Some((key, value)) = stripped.split_once('=') else {
            return Err(Error::config_line(
                line_no,
                format!("expected 'key = value', got '{stripped}'"),
            ));
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(Error::config_line(line_no, "empty key or value"));
        }
        entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            location: format!("line {line_no}"),
        });
    }
    Ok(entries)
}

/// Turn `--set KEY=VALUE` strings into entries.
pub fn parse_overrides(sets: &[String]) -> Result<Vec<Entry>> {
    sets.iter()
        .map(|raw| {
            let Some((key, value)) = raw.split_once('=') else {
                return Err(Error::invalid(format!(
                    "--set expects KEY=VALUE, got '{raw}'"
                )));
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(Error::invalid(format!(
                    "--set expects KEY=VALUE, got '{raw}'"
                )));
            }
            Ok(Entry {
                key: key.to_string(),
                value: value.to_string(),
                location: format!("--set {key}"),
            })
        })
        .collect()
}

/// Overlay `overrides` onto `base`: a later assignment to the same key wins.
pub fn merge_entries(base: Vec<Entry>, overrides: Vec<Entry>) -> Vec<Entry> {
    let mut merged = base;
    for entry in overrides {
        merged.retain(|e| e.key != entry.key);
        merged.push(entry);
    }
    merged
}

fn parse_f64(entry: &Entry) -> Result<f64> {
    entry.value.parse::<f64>().map_err(|_| {
        Error::config_at(
            entry.location.clone(),
            format!("expected a number for {}, got '{}'", entry.key, entry.value),
        )
    })
}

fn parse_usize(entry: &Entry) -> Result<usize> {
    entry.value.parse::<usize>().map_err(|_| {
        Error::config_at(
            entry.location.clone(),
            format!(
                "expected a non-negative integer for {}, got '{}'",
                entry.key, entry.value
            ),
        )
    })
}

fn parse_axis(entry: &Entry) -> Result<Axis> {
    let tokens: Vec<&str> = entry.value.split_whitespace().collect();
    let param = Param::from_key(tokens[0]).ok_or_else(|| {
        Error::config_at(
            entry.location.clone(),
            format!(
                "unknown axis parameter '{}'; expected one of J, Omega, kappa, T",
                tokens[0]
            ),
        )
    })?;
    let (lo, hi, steps) = match tokens.len() {
        1 => match param {
            Param::Temperature => DEFAULT_TEMPERATURE_AXIS,
            _ => DEFAULT_STRENGTH_AXIS,
        },
        4 => {
            let parse = |text: &str, what: &str| -> Result<f64> {
                text.parse::<f64>().map_err(|_| {
                    Error::config_at(
                        entry.location.clone(),
                        format!("expected a number for axis {what}, got '{text}'"),
                    )
                })
            };
            let lo = parse(tokens[1], "lo")?;
            let hi = parse(tokens[2], "hi")?;
            let steps = tokens[3].parse::<usize>().map_err(|_| {
                Error::config_at(
                    entry.location.clone(),
                    format!("expected an integer for axis steps, got '{}'", tokens[3]),
                )
            })?;
            (lo, hi, steps)
        }
        _ => {
            return Err(Error::config_at(
                entry.location.clone(),
                "axis syntax is '<param> <lo> <hi> <steps>' or just '<param>'",
            ))
        }
    };
    if lo >= hi {
        return Err(Error::config_at(
            entry.location.clone(),
            format!("axis lo must be below hi, got {lo} >= {hi}"),
        ));
    }
    if steps < 2 {
        return Err(Error::config_at(
            entry.location.clone(),
            format!("axis needs at least 2 steps, got {steps}"),
        ));
    }
    param.validate(lo)?;
    param.validate(hi)?;
    Ok(Axis {
        param,
        lo,
        hi,
        steps,
    })
}

/// Validate merged entries into a [`SweepSpec`]. Unknown and duplicate keys
/// are rejected with their location.
pub fn build_spec(entries: &[Entry]) -> Result<SweepSpec> {
    let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
    for entry in entries {
        if seen
            .insert(entry.key.as_str(), entry.location.as_str())
            .is_some()
        {
            return Err(Error::config_at(
                entry.location.clone(),
                format!("duplicate key '{}'", entry.key),
            ));
        }
    }

    let mut model = None;
    let mut fixed = BTreeMap::new();
    let mut omega_ratio = DEFAULT_OMEGA_RATIO;
    let mut n_max = None;
    let mut eps_settle = None;
    let mut settle_window = None;
    let mut axis1 = None;
    let mut axis2 = None;
    let mut outputs: Option<Vec<OutputKind>> = None;

    for entry in entries {
        match entry.key.as_str() {
            "model" => {
                model = Some(ModelKind::from_name(&entry.value).ok_or_else(|| {
                    Error::config_at(
                        entry.location.clone(),
                        format!(
                            "unknown model '{}'; expected direct or indirect",
                            entry.value
                        ),
                    )
                })?);
            }
            "J" | "Omega" | "kappa" | "T" => {
                let param = Param::from_key(&entry.key).expect("key matched above");
                fixed.insert(param, param.validate(parse_f64(entry)?)?);
            }
            "omega_ratio" => omega_ratio = parse_f64(entry)?,
            "n_max" => n_max = Some(parse_usize(entry)?),
            "eps_settle" => eps_settle = Some(parse_f64(entry)?),
            "settle_window" => settle_window = Some(parse_usize(entry)?),
            "axis1" => axis1 = Some(parse_axis(entry)?),
            "axis2" => axis2 = Some(parse_axis(entry)?),
            "outputs" => {
                let mut kinds = Vec::new();
                for token in entry.value.split_whitespace() {
                    let kind = OutputKind::from_name(token).ok_or_else(|| {
                        Error::config_at(
                            entry.location.clone(),
                            format!(
                                "unknown output '{token}'; expected N, thresholds, trajectory or coherences"
                            ),
                        )
                    })?;
                    if !kinds.contains(&kind) {
                        kinds.push(kind);
                    }
                }
                outputs = Some(kinds);
            }
            other => {
                return Err(Error::config_at(
                    entry.location.clone(),
                    format!("unknown key '{other}'"),
                ));
            }
        }
    }

    let model =
        model.ok_or_else(|| Error::invalid("config is missing the required key 'model'"))?;
    let stop = StopPolicy::new(
        n_max.unwrap_or(crate::model::DEFAULT_N_MAX),
        eps_settle.unwrap_or(crate::model::DEFAULT_EPS_SETTLE),
        settle_window.unwrap_or(crate::model::DEFAULT_SETTLE_WINDOW),
    )?;
    if !(omega_ratio.is_finite() && omega_ratio > 0.0) {
        return Err(Error::Domain {
            name: "omega_ratio".into(),
            value: omega_ratio,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }

    if axis1.is_none() && axis2.is_some() {
        return Err(Error::invalid("axis2 given without axis1"));
    }
    let axes: Vec<Axis> = [axis1, axis2].into_iter().flatten().collect();
    if axes.len() == 2 && axes[0].param == axes[1].param {
        return Err(Error::invalid(format!(
            "axis1 and axis2 both sweep {}",
            axes[0].param.key()
        )));
    }
    for axis in &axes {
        if fixed.contains_key(&axis.param) {
            return Err(Error::invalid(format!(
                "{} is both fixed and swept by an axis",
                axis.param.key()
            )));
        }
    }
    for param in fixed.keys().copied().chain(axes.iter().map(|a| a.param)) {
        if !model.accepts(param) {
            return Err(Error::invalid(format!(
                "the {} model has no parameter {}",
                model.name(),
                param.key()
            )));
        }
    }

    Ok(SweepSpec {
        model,
        fixed,
        omega_ratio,
        stop,
        axis1,
        axis2,
        outputs,
    })
}

/// Parse a whole configuration document.
pub fn parse_config(text: &str) -> Result<SweepSpec> {
    build_spec(&parse_entries(text)?)
}
