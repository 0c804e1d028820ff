//! The two iterative collision engines (direct and indirect) that evolve the
//! optimal state pair in lockstep, plus a brute-force oracle that keeps the
//! whole ancilla chain alive and never traces mid-run.
//!
//! Direct model, one step: tensor the fresh ancilla onto (S, R_n), apply the
//! system-ancilla partial swap on (S, R_n), then the ancilla-ancilla partial
//! swap on (R_n, R_{n+1}), trace out R_n. The indirect model inserts a memory
//! qubit between the system and the chain: partial swaps on (S, S'),
//! (S', R_n), (R_n, R_{n+1}), then trace out R_n.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::{optimal_pair, partial_swap, thermal_state, SwapStrength, ThermalSpec};
use crate::measure::{coherence, trace_distance};
use crate::qstate::{apply_two_qubit, reduced_qubit_raw, DensityMatrix, MAX_DIM, MAX_QUBITS};

pub const DEFAULT_N_MAX: usize = 3000;
pub const DEFAULT_EPS_SETTLE: f64 = 1e-7;
pub const DEFAULT_SETTLE_WINDOW: usize = 50;

/// The tunable model parameters, named by role. `key` gives the external
/// spelling used by config files and CSV headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    /// System-chain coupling (key `J`; memory-chain coupling in the indirect model).
    Coupling,
    /// Ancilla-ancilla intracollision strength (key `Omega`).
    Intra,
    /// System-memory coupling of the indirect model (key `kappa`).
    MemoryCoupling,
    /// Dimensionless environment temperature (key `T`).
    Temperature,
}

impl Param {
    pub const ALL: [Param; 4] = [
        Param::Coupling,
        Param::Intra,
        Param::MemoryCoupling,
        Param::Temperature,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Param::Coupling => "J",
            Param::Intra => "Omega",
            Param::MemoryCoupling => "kappa",
            Param::Temperature => "T",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Param::ALL.into_iter().find(|p| p.key() == key)
    }

    /// Legal closed range of values.
    pub fn range(self) -> (f64, f64) {
        match self {
            Param::Temperature => (0.0, f64::INFINITY),
            _ => (0.0, FRAC_PI_2),
        }
    }

    pub fn validate(self, value: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !value.is_finite() || value < lo || value > hi {
            return Err(Error::Domain {
                name: self.key().into(),
                value,
                lo,
                hi,
            });
        }
        Ok(value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Direct,
    Indirect,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Direct => "direct",
            ModelKind::Indirect => "indirect",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "direct" => Some(ModelKind::Direct),
            "indirect" => Some(ModelKind::Indirect),
            _ => None,
        }
    }

    /// Parameters a config of this kind must provide.
    pub fn required_params(self) -> &'static [Param] {
        match self {
            ModelKind::Direct => &[Param::Coupling, Param::Intra, Param::Temperature],
            ModelKind::Indirect => &[
                Param::Coupling,
                Param::Intra,
                Param::MemoryCoupling,
                Param::Temperature,
            ],
        }
    }

    pub fn accepts(self, param: Param) -> bool {
        self.required_params().contains(&param)
    }
}

/// When to stop iterating: after `n_max` collisions, or once the trace
/// distance and its increment have both stayed below `eps_settle` for
/// `settle_window` consecutive steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopPolicy {
    n_max: usize,
    eps_settle: f64,
    settle_window: usize,
}

impl StopPolicy {
    pub fn new(n_max: usize, eps_settle: f64, settle_window: usize) -> Result<Self> {
        if settle_window < 1 || n_max < settle_window {
            return Err(Error::invalid(format!(
                "stop policy requires n_max >= settle_window >= 1, got {n_max} and {settle_window}"
            )));
        }
        if !eps_settle.is_finite() || eps_settle <= 0.0 {
            return Err(Error::Domain {
                name: "eps_settle".into(),
                value: eps_settle,
                lo: f64::MIN_POSITIVE,
                hi: f64::INFINITY,
            });
        }
        Ok(Self {
            n_max,
            eps_settle,
            settle_window,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn eps_settle(&self) -> f64 {
        self.eps_settle
    }

    pub fn settle_window(&self) -> usize {
        self.settle_window
    }
}

impl Default for StopPolicy {
    fn default() -> Self {
        Self {
            n_max: DEFAULT_N_MAX,
            eps_settle: DEFAULT_EPS_SETTLE,
            settle_window: DEFAULT_SETTLE_WINDOW,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectConfig {
    /// System-ancilla coupling (J).
    pub coupling: SwapStrength,
    /// Ancilla-ancilla intracollision strength (Omega).
    pub intra: SwapStrength,
    pub thermal: ThermalSpec,
    pub stop: StopPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndirectConfig {
    /// System-memory coupling (kappa).
    pub memory_coupling: SwapStrength,
    /// Memory-ancilla coupling (J).
    pub coupling: SwapStrength,
    /// Ancilla-ancilla intracollision strength (Omega).
    pub intra: SwapStrength,
    pub thermal: ThermalSpec,
    pub stop: StopPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelConfig {
    Direct(DirectConfig),
    Indirect(IndirectConfig),
}

impl ModelConfig {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelConfig::Direct(_) => ModelKind::Direct,
            ModelConfig::Indirect(_) => ModelKind::Indirect,
        }
    }

    pub fn thermal(&self) -> ThermalSpec {
        match self {
            ModelConfig::Direct(c) => c.thermal,
            ModelConfig::Indirect(c) => c.thermal,
        }
    }

    pub fn stop(&self) -> StopPolicy {
        match self {
            ModelConfig::Direct(c) => c.stop,
            ModelConfig::Indirect(c) => c.stop,
        }
    }

    pub fn param(&self, param: Param) -> Option<f64> {
        match (self, param) {
            (ModelConfig::Direct(c), Param::Coupling) => Some(c.coupling.value()),
            (ModelConfig::Direct(c), Param::Intra) => Some(c.intra.value()),
            (ModelConfig::Direct(_), Param::MemoryCoupling) => None,
            (ModelConfig::Indirect(c), Param::Coupling) => Some(c.coupling.value()),
            (ModelConfig::Indirect(c), Param::Intra) => Some(c.intra.value()),
            (ModelConfig::Indirect(c), Param::MemoryCoupling) => Some(c.memory_coupling.value()),
            (_, Param::Temperature) => Some(self.thermal().temperature()),
        }
    }

    /// A copy of this config with one parameter replaced.
    pub fn with_param(&self, param: Param, value: f64) -> Result<Self> {
        if !self.kind().accepts(param) {
            return Err(Error::invalid(format!(
                "the {} model has no parameter {}",
                self.kind().name(),
                param.key()
            )));
        }
        let mut out = *self;
        match (&mut out, param) {
            (ModelConfig::Direct(c), Param::Coupling) => c.coupling = SwapStrength::new(value)?,
            (ModelConfig::Direct(c), Param::Intra) => c.intra = SwapStrength::new(value)?,
            (ModelConfig::Indirect(c), Param::Coupling) => c.coupling = SwapStrength::new(value)?,
            (ModelConfig::Indirect(c), Param::Intra) => c.intra = SwapStrength::new(value)?,
            (ModelConfig::Indirect(c), Param::MemoryCoupling) => {
                c.memory_coupling = SwapStrength::new(value)?
            }
            (ModelConfig::Direct(c), Param::Temperature) => {
                c.thermal = ThermalSpec::new(value, c.thermal.omega_ratio())?
            }
            (ModelConfig::Indirect(c), Param::Temperature) => {
                c.thermal = ThermalSpec::new(value, c.thermal.omega_ratio())?
            }
            (ModelConfig::Direct(_), Param::MemoryCoupling) => unreachable!(),
        }
        Ok(out)
    }

    /// `key = value` lines describing this config, suitable for CSV provenance
    /// headers and for re-parsing by the config reader.
    pub fn echo_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("model = {}", self.kind().name())];
        for param in Param::ALL {
            if let Some(value) = self.param(param) {
                lines.push(format!(
                    "{} = {}",
                    param.key(),
                    crate::sweep::format_float(value)
                ));
            }
        }
        let thermal = self.thermal();
        let stop = self.stop();
        lines.push(format!(
            "omega_ratio = {}",
            crate::sweep::format_float(thermal.omega_ratio())
        ));
        lines.push(format!("n_max = {}", stop.n_max()));
        lines.push(format!(
            "eps_settle = {}",
            crate::sweep::format_float(stop.eps_settle())
        ));
        lines.push(format!("settle_window = {}", stop.settle_window()));
        lines
    }
}

/// Per-collision observables, all taken after the full step (collision plus
/// intracollision plus trace-out).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    /// Collision index; 0 is the pre-collision baseline.
    pub n: usize,
    /// Trace distance between the two pair members' system states.
    pub dist: f64,
    /// Increment of `dist` over the previous step; 0 at the baseline.
    pub d_dist: f64,
    /// Coherence |<0|ρ_S|1>| of the system.
    pub sys_coherence: f64,
    /// Coherence of the next ancilla in line (R_{n+1}), after this step.
    pub env_coherence: f64,
    /// Excited-state population <1|ρ_S|1> of the system.
    pub sys_excited: f64,
}

/// The two evolving pair members. Both see identical environments; the
/// difference of their reduced system states carries the distinguishability.
#[derive(Debug, Clone)]
pub struct StatePair {
    pub a: DensityMatrix,
    pub b: DensityMatrix,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: ModelConfig,
    /// The first record is the pre-collision baseline; the record at index n
    /// follows collision n.
    pub records: Vec<StepRecord>,
    /// True when the settle window was reached before `n_max`.
    pub converged: bool,
    /// Number of collisions performed (= records.len() - 1).
    pub steps_run: usize,
}

fn integrity(state: &DensityMatrix, step: usize) -> Result<()> {
    state.validate().map_err(|e| Error::Integrity {
        step,
        detail: e.to_string(),
    })
}

fn observe_reduced(
    sys_a: &DensityMatrix,
    sys_b: &DensityMatrix,
    env_a: &DensityMatrix,
    n: usize,
    prev_dist: f64,
) -> Result<StepRecord> {
    let dist = trace_distance(sys_a, sys_b)?;
    Ok(StepRecord {
        n,
        dist,
        d_dist: if n == 0 { 0.0 } else { dist - prev_dist },
        sys_coherence: coherence(sys_a)?,
        env_coherence: coherence(env_a)?,
        sys_excited: sys_a.entry(1, 1).re,
    })
}

/// Observables of a pair state whose system sits on `sys_qubit` and whose
/// next-ancilla sits on `env_qubit`. The environment coherence is read from
/// the first pair member; pair symmetry makes the choice irrelevant.
fn observe(
    pair: &StatePair,
    sys_qubit: usize,
    env_qubit: usize,
    n: usize,
    prev_dist: f64,
) -> Result<StepRecord> {
    observe_reduced(
        &pair.a.reduced_qubit(sys_qubit)?,
        &pair.b.reduced_qubit(sys_qubit)?,
        &pair.a.reduced_qubit(env_qubit)?,
        n,
        prev_dist,
    )
}

/// One direct-model collision. `pair` holds the 4x4 states of (S, R_n),
/// `fresh` the incoming thermal ancilla; returns the 4x4 states of
/// (S, R_{n+1}) and the record for step `n`.
pub fn step_direct(
    pair: &StatePair,
    fresh: &DensityMatrix,
    cfg: &DirectConfig,
    n: usize,
    prev_dist: f64,
) -> Result<(StatePair, StepRecord)> {
    let collide = partial_swap(cfg.coupling).embed_two_qubit(3, 0, 1)?;
    let intra = partial_swap(cfg.intra).embed_two_qubit(3, 1, 2)?;
    let advance = |state: &DensityMatrix| -> Result<DensityMatrix> {
        let joint = state.tensor(fresh)?;
        let joint = joint.conjugate(&collide)?;
        let joint = joint.conjugate(&intra)?;
        integrity(&joint, n)?;
        let out = joint.partial_trace(1)?;
        integrity(&out, n)?;
        Ok(out)
    };
    let next = StatePair {
        a: advance(&pair.a)?,
        b: advance(&pair.b)?,
    };
    let record = observe(&next, 0, 1, n, prev_dist)?;
    Ok((next, record))
}

/// One indirect-model collision. `pair` holds the 8x8 states of (S, S', R_n);
/// returns the 8x8 states of (S, S', R_{n+1}) and the record for step `n`.
pub fn step_indirect(
    pair: &StatePair,
    fresh: &DensityMatrix,
    cfg: &IndirectConfig,
    n: usize,
    prev_dist: f64,
) -> Result<(StatePair, StepRecord)> {
    let memory = partial_swap(cfg.memory_coupling).embed_two_qubit(4, 0, 1)?;
    let collide = partial_swap(cfg.coupling).embed_two_qubit(4, 1, 2)?;
    let intra = partial_swap(cfg.intra).embed_two_qubit(4, 2, 3)?;
    let advance = |state: &DensityMatrix| -> Result<DensityMatrix> {
        let joint = state.tensor(fresh)?;
        let joint = joint.conjugate(&memory)?;
        let joint = joint.conjugate(&collide)?;
        let joint = joint.conjugate(&intra)?;
        integrity(&joint, n)?;
        let out = joint.partial_trace(2)?;
        integrity(&out, n)?;
        Ok(out)
    };
    let next = StatePair {
        a: advance(&pair.a)?,
        b: advance(&pair.b)?,
    };
    let record = observe(&next, 0, 2, n, prev_dist)?;
    Ok((next, record))
}

/// Iterate a model until its stop policy fires, evolving both members of the
/// optimal pair against identical environments.
pub fn run_model(cfg: &ModelConfig) -> Result<Trajectory> {
    let stop = cfg.stop();
    let fresh = thermal_state(&cfg.thermal());
    let (plus, minus) = optimal_pair();
    let (mut pair, sys_qubit, env_qubit) = match cfg {
        ModelConfig::Direct(_) => (
            StatePair {
                a: plus.tensor(&fresh)?,
                b: minus.tensor(&fresh)?,
            },
            0,
            1,
        ),
        // The memory qubit S' starts in the same thermal state as the chain.
        ModelConfig::Indirect(_) => (
            StatePair {
                a: plus.tensor(&fresh)?.tensor(&fresh)?,
                b: minus.tensor(&fresh)?.tensor(&fresh)?,
            },
            0,
            2,
        ),
    };

    let first = observe(&pair, sys_qubit, env_qubit, 0, 0.0)?;
    let mut prev_dist = first.dist;
    let mut records = vec![first];
    let mut quiet = 0usize;
    let mut converged = false;
    for n in 1..=stop.n_max() {
        let (next, record) = match cfg {
            ModelConfig::Direct(c) => step_direct(&pair, &fresh, c, n, prev_dist)?,
            ModelConfig::Indirect(c) => step_indirect(&pair, &fresh, c, n, prev_dist)?,
        };
        pair = next;
        prev_dist = record.dist;
        quiet = if record.dist < stop.eps_settle() && record.d_dist.abs() < stop.eps_settle() {
            quiet + 1
        } else {
            0
        };
        records.push(record);
        if quiet >= stop.settle_window() {
            converged = true;
            break;
        }
    }
    let steps_run = records.len() - 1;
    Ok(Trajectory {
        config: *cfg,
        records,
        converged,
        steps_run,
    })
}

/// Brute-force validation route: evolve the joint state of the system (plus
/// memory qubit, for the indirect model) and the whole ancilla chain, with no
/// intermediate partial trace. Exact because a traced-out ancilla never
/// interacts again; observables must match [`run_model`] step for step.
///
/// Runs exactly `n_collisions` collisions; the register cap limits these to
/// 8 (direct) or 7 (indirect).
pub fn full_chain_oracle(cfg: &ModelConfig, n_collisions: usize) -> Result<Trajectory> {
    if n_collisions == 0 {
        return Err(Error::invalid("the oracle needs at least one collision"));
    }
    let head_qubits = match cfg.kind() {
        ModelKind::Direct => 1,
        ModelKind::Indirect => 2,
    };
    // Collisions 1..=n touch ancillas R_1..=R_{n+1}.
    let num_qubits = head_qubits + n_collisions + 1;
    if num_qubits > MAX_QUBITS {
        return Err(Error::Capacity {
            requested: 1usize << num_qubits,
            max: MAX_DIM,
        });
    }

    let fresh = thermal_state(&cfg.thermal());
    let (plus, minus) = optimal_pair();
    let build_joint = |head: &DensityMatrix| {
        let mut joint = head.amps().clone();
        if cfg.kind() == ModelKind::Indirect {
            joint = joint.kronecker(fresh.amps());
        }
        for _ in 0..=n_collisions {
            joint = joint.kronecker(fresh.amps());
        }
        joint
    };
    let mut joint_a: DMatrix<Complex64> = build_joint(&plus);
    let mut joint_b: DMatrix<Complex64> = build_joint(&minus);

    let reduced = |joint: &DMatrix<Complex64>, qubit: usize| -> Result<DensityMatrix> {
        DensityMatrix::new(reduced_qubit_raw(joint, num_qubits, qubit))
    };

    // Qubit layout: S [S'] R_1 .. R_{n+1}; ancilla R_m sits at head_qubits + m - 1.
    let ancilla = |m: usize| head_qubits + m - 1;

    let mut records = Vec::with_capacity(n_collisions + 1);
    let first = observe_reduced(
        &reduced(&joint_a, 0)?,
        &reduced(&joint_b, 0)?,
        &reduced(&joint_a, ancilla(1))?,
        0,
        0.0,
    )?;
    let mut prev_dist = first.dist;
    records.push(first);

    for n in 1..=n_collisions {
        match cfg {
            ModelConfig::Direct(c) => {
                let collide = partial_swap(c.coupling);
                let intra = partial_swap(c.intra);
                for joint in [&mut joint_a, &mut joint_b] {
                    apply_two_qubit(joint, collide.amps(), num_qubits, 0, ancilla(n));
                    apply_two_qubit(joint, intra.amps(), num_qubits, ancilla(n), ancilla(n + 1));
                }
            }
            ModelConfig::Indirect(c) => {
                let memory = partial_swap(c.memory_coupling);
                let collide = partial_swap(c.coupling);
                let intra = partial_swap(c.intra);
                for joint in [&mut joint_a, &mut joint_b] {
                    apply_two_qubit(joint, memory.amps(), num_qubits, 0, 1);
                    apply_two_qubit(joint, collide.amps(), num_qubits, 1, ancilla(n));
                    apply_two_qubit(joint, intra.amps(), num_qubits, ancilla(n), ancilla(n + 1));
                }
            }
        }
        let record = observe_reduced(
            &reduced(&joint_a, 0)?,
            &reduced(&joint_b, 0)?,
            &reduced(&joint_a, ancilla(n + 1))?,
            n,
            prev_dist,
        )?;
        prev_dist = record.dist;
        records.push(record);
    }

    Ok(Trajectory {
        config: *cfg,
        records,
        converged: false,
        steps_run: n_collisions,
    })
}
