//! C ABI over the collision-model simulator: opaque config and trajectory
//! handles, plain status codes, and a flat per-collision record struct.
//!
//! Ownership: `qc_config_*_new` and `qc_run` hand out heap handles that the
//! caller must release with the matching `qc_*_free`. All other functions
//! only borrow. Handles are not thread-safe to mutate concurrently, but
//! distinct handles are independent.

use std::ffi::{c_char, CStr};

use qcollide::gates::{SwapStrength, ThermalSpec};
use qcollide::measure::blp_measure;
use qcollide::model::{
    full_chain_oracle, run_model, DirectConfig, IndirectConfig, ModelConfig, StopPolicy, Trajectory,
};
use qcollide::Error;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A parameter was outside its legal range or otherwise malformed.
    InvalidArgument = 2,
    /// The requested register exceeds the 10-qubit cap.
    CapacityExceeded = 3,
    /// A state stopped satisfying the density-matrix invariants mid-run.
    IntegrityError = 4,
}

fn status_of(err: &Error) -> QcStatus {
    match err {
        Error::Capacity { .. } => QcStatus::CapacityExceeded,
        Error::Integrity { .. } => QcStatus::IntegrityError,
        _ => QcStatus::InvalidArgument,
    }
}

/// Opaque simulation configuration handle.
pub struct QcConfig {
    inner: ModelConfig,
}

/// Opaque trajectory handle.
pub struct QcTrajectory {
    inner: Trajectory,
}

/// Observables of one collision step.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcStepRecord {
    /// Collision index; 0 is the pre-collision baseline.
    pub n: u64,
    /// Trace distance between the evolving pair members.
    pub d: f64,
    /// Increment of the trace distance against the previous step.
    pub dd: f64,
    /// System coherence |<0|rho_S|1>|.
    pub c_s: f64,
    /// Coherence of the next ancilla in line.
    pub c_r: f64,
    /// Excited-state population of the system.
    pub pop_s: f64,
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qc_version() -> *const c_char {
    static VERSION: &CStr = {
        const BYTES: &[u8] = concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes();
        match CStr::from_bytes_with_nul(BYTES) {
            Ok(s) => s,
            Err(_) => unreachable!(),
        }
    };
    VERSION.as_ptr()
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn qc_status_message(status: QcStatus) -> *const c_char {
    let msg: &CStr = match status {
        QcStatus::Ok => c"ok",
        QcStatus::NullArgument => c"a required pointer argument was null",
        QcStatus::InvalidArgument => c"a parameter was outside its legal range",
        QcStatus::CapacityExceeded => c"the register cap of 10 qubits was exceeded",
        QcStatus::IntegrityError => c"a state violated the density-matrix invariants",
    };
    msg.as_ptr()
}

fn new_direct(
    coupling: f64,
    intra: f64,
    temperature: f64,
    omega_ratio: f64,
) -> Result<ModelConfig, Error> {
    Ok(ModelConfig::Direct(DirectConfig {
        coupling: SwapStrength::new(coupling)?,
        intra: SwapStrength::new(intra)?,
        thermal: ThermalSpec::new(temperature, omega_ratio)?,
        stop: StopPolicy::default(),
    }))
}

fn new_indirect(
    memory_coupling: f64,
    coupling: f64,
    intra: f64,
    temperature: f64,
    omega_ratio: f64,
) -> Result<ModelConfig, Error> {
    Ok(ModelConfig::Indirect(IndirectConfig {
        memory_coupling: SwapStrength::new(memory_coupling)?,
        coupling: SwapStrength::new(coupling)?,
        intra: SwapStrength::new(intra)?,
        thermal: ThermalSpec::new(temperature, omega_ratio)?,
        stop: StopPolicy::default(),
    }))
}

unsafe fn deliver<T>(out: *mut *mut T, value: T) -> QcStatus {
    if out.is_null() {
        return QcStatus::NullArgument;
    }
    unsafe { out.write(Box::into_raw(Box::new(value))) };
    QcStatus::Ok
}

/// Create a direct-model config: system-ancilla coupling `j`, intracollision
/// strength `omega`, dimensionless temperature `t`, frequency ratio
/// `omega_ratio` (5.0 is the conventional choice). Stop policy defaults to
/// 3000 collisions with a 50-step settle window at 1e-7.
///
/// # Safety
/// `out` must be a valid pointer to a `QcConfig*` slot.
#[no_mangle]
pub unsafe extern "C" fn qc_config_direct_new(
    j: f64,
    omega: f64,
    t: f64,
    omega_ratio: f64,
    out: *mut *mut QcConfig,
) -> QcStatus {
    match new_direct(j, omega, t, omega_ratio) {
        Ok(inner) => unsafe { deliver(out, QcConfig { inner }) },
        Err(e) => status_of(&e),
    }
}

/// Create an indirect-model config; `kappa` couples the system to the
/// intermediate memory qubit, `j` the memory qubit to the chain.
///
/// # Safety
/// `out` must be a valid pointer to a `QcConfig*` slot.
#[no_mangle]
pub unsafe extern "C" fn qc_config_indirect_new(
    kappa: f64,
    j: f64,
    omega: f64,
    t: f64,
    omega_ratio: f64,
    out: *mut *mut QcConfig,
) -> QcStatus {
    match new_indirect(kappa, j, omega, t, omega_ratio) {
        Ok(inner) => unsafe { deliver(out, QcConfig { inner }) },
        Err(e) => status_of(&e),
    }
}

/// Replace the stop policy of a config. Requires
/// `n_max >= settle_window >= 1` and `eps_settle > 0`.
///
/// # Safety
/// `config` must be a live handle from one of the constructors.
#[no_mangle]
pub unsafe extern "C" fn qc_config_set_stop(
    config: *mut QcConfig,
    n_max: u64,
    eps_settle: f64,
    settle_window: u64,
) -> QcStatus {
    let Some(config) = (unsafe { config.as_mut() }) else {
        return QcStatus::NullArgument;
    };
    let stop = match StopPolicy::new(n_max as usize, eps_settle, settle_window as usize) {
        Ok(stop) => stop,
        Err(e) => return status_of(&e),
    };
    match &mut config.inner {
        ModelConfig::Direct(c) => c.stop = stop,
        ModelConfig::Indirect(c) => c.stop = stop,
    }
    QcStatus::Ok
}

/// Release a config handle. Null is a no-op.
///
/// # Safety
/// `config` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qc_config_free(config: *mut QcConfig) {
    if !config.is_null() {
        drop(unsafe { Box::from_raw(config) });
    }
}

/// Evolve the optimal state pair under the configured model until the stop
/// policy fires, delivering a trajectory handle.
///
/// # Safety
/// `config` must be a live handle; `out` a valid `QcTrajectory*` slot.
#[no_mangle]
pub unsafe extern "C" fn qc_run(config: *const QcConfig, out: *mut *mut QcTrajectory) -> QcStatus {
    let Some(config) = (unsafe { config.as_ref() }) else {
        return QcStatus::NullArgument;
    };
    match run_model(&config.inner) {
        Ok(inner) => unsafe { deliver(out, QcTrajectory { inner }) },
        Err(e) => status_of(&e),
    }
}

/// Replay `collisions` steps through the iterative engine and the full-chain
/// reference route, writing the worst per-record deviation to `out_deviation`.
/// The register cap limits `collisions` to 8 (direct) or 7 (indirect).
///
/// # Safety
/// `config` must be a live handle; `out_deviation` a valid double slot.
#[no_mangle]
pub unsafe extern "C" fn qc_oracle_deviation(
    config: *const QcConfig,
    collisions: u64,
    out_deviation: *mut f64,
) -> QcStatus {
    let Some(config) = (unsafe { config.as_ref() }) else {
        return QcStatus::NullArgument;
    };
    if out_deviation.is_null() {
        return QcStatus::NullArgument;
    }
    let collisions = collisions as usize;
    let stop = config.inner.stop();
    let pinned = match StopPolicy::new(collisions, stop.eps_settle(), collisions) {
        Ok(stop) => stop,
        Err(e) => return status_of(&e),
    };
    let mut cfg = config.inner;
    match &mut cfg {
        ModelConfig::Direct(c) => c.stop = pinned,
        ModelConfig::Indirect(c) => c.stop = pinned,
    }
    let outcome = run_model(&cfg).and_then(|iterated| {
        let oracle = full_chain_oracle(&cfg, collisions)?;
        let mut worst = 0.0f64;
        for (a, b) in iterated.records.iter().zip(oracle.records.iter()) {
            worst = worst.max((a.dist - b.dist).abs());
            worst = worst.max((a.d_dist - b.d_dist).abs());
            worst = worst.max((a.sys_coherence - b.sys_coherence).abs());
            worst = worst.max((a.env_coherence - b.env_coherence).abs());
            worst = worst.max((a.sys_excited - b.sys_excited).abs());
        }
        Ok(worst)
    });
    match outcome {
        Ok(worst) => {
            unsafe { out_deviation.write(worst) };
            QcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Number of records in a trajectory (collisions + 1 baseline); 0 for null.
///
/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_trajectory_len(trajectory: *const QcTrajectory) -> u64 {
    unsafe { trajectory.as_ref() }.map_or(0, |t| t.inner.records.len() as u64)
}

/// Whether the run settled before hitting its step cap; false for null.
///
/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_trajectory_converged(trajectory: *const QcTrajectory) -> bool {
    unsafe { trajectory.as_ref() }.is_some_and(|t| t.inner.converged)
}

/// Copy record `index` into `out`.
///
/// # Safety
/// `trajectory` must be a live handle; `out` a valid record slot.
#[no_mangle]
pub unsafe extern "C" fn qc_trajectory_record(
    trajectory: *const QcTrajectory,
    index: u64,
    out: *mut QcStepRecord,
) -> QcStatus {
    let Some(trajectory) = (unsafe { trajectory.as_ref() }) else {
        return QcStatus::NullArgument;
    };
    if out.is_null() {
        return QcStatus::NullArgument;
    }
    let Some(rec) = trajectory.inner.records.get(index as usize) else {
        return QcStatus::InvalidArgument;
    };
    unsafe {
        out.write(QcStepRecord {
            n: rec.n as u64,
            d: rec.dist,
            dd: rec.d_dist,
            c_s: rec.sys_coherence,
            c_r: rec.env_coherence,
            pop_s: rec.sys_excited,
        })
    };
    QcStatus::Ok
}

/// Sum the positive trace-distance increments of a trajectory into `out`.
///
/// # Safety
/// `trajectory` must be a live handle; `out` a valid double slot.
#[no_mangle]
pub unsafe extern "C" fn qc_trajectory_backflow(
    trajectory: *const QcTrajectory,
    out: *mut f64,
) -> QcStatus {
    let Some(trajectory) = (unsafe { trajectory.as_ref() }) else {
        return QcStatus::NullArgument;
    };
    if out.is_null() {
        return QcStatus::NullArgument;
    }
    unsafe { out.write(blp_measure(&trajectory.inner).total) };
    QcStatus::Ok
}

/// Release a trajectory handle. Null is a no-op.
///
/// # Safety
/// `trajectory` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qc_trajectory_free(trajectory: *mut QcTrajectory) {
    if !trajectory.is_null() {
        drop(unsafe { Box::from_raw(trajectory) });
    }
}
