//! Trace distance, qubit coherence, the discrete information-backflow
//! accumulator, and the derived detectors (activation thresholds, revival
//! gaps).

use crate::error::{Error, Result};
use crate::model::{run_model, ModelConfig, Param, Trajectory};
use crate::qstate::{hermitian_eigenvalues, DensityMatrix};

/// Increments below this floor are treated as roundoff, not backflow;
/// thousands of ~1e-16 noise terms would otherwise fabricate a measure of
/// ~1e-13 on exactly Markovian runs.
pub const POSITIVE_INCREMENT_FLOOR: f64 = 1e-12;

/// A run counts as non-Markovian for thresholds and revival gaps when its
/// accumulated measure exceeds this; far below every physical scale of the
/// models (~1e-2..1) and far above noise.
pub const NM_ACTIVE_FLOOR: f64 = 1e-6;

/// Default bracket width for threshold bisection, in strength units.
pub const DEFAULT_THRESHOLD_RESOLUTION: f64 = 1e-3;

/// Trace distance D(a, b) = ½ Tr|a - b|, computed from the eigenvalues of the
/// Hermitian difference. Always in [0, 1] for valid states.
///
/// The arguments are put in a canonical order before subtracting, so the
/// result is bitwise symmetric in its inputs.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let (first, second) = if entrywise_le(a, b) { (a, b) } else { (b, a) };
    let diff = first.amps() - second.amps();
    let eigenvalues = hermitian_eigenvalues(&diff)?;
    let d = 0.5 * eigenvalues.iter().map(|v| v.abs()).sum::<f64>();
    Ok(d.clamp(0.0, 1.0))
}

fn entrywise_le(a: &DensityMatrix, b: &DensityMatrix) -> bool {
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let (x, y) = (a.entry(i, j), b.entry(i, j));
            for (u, v) in [(x.re, y.re), (x.im, y.im)] {
                if u < v {
                    return true;
                }
                if u > v {
                    return false;
                }
            }
        }
    }
    true
}

/// Qubit coherence |<0|ρ|1>| (half the l1-norm measure); at most ½.
pub fn coherence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::DimMismatch {
            left: rho.dim(),
            right: 2,
        });
    }
    Ok(rho.entry(0, 1).norm())
}

/// Accumulated backflow measure of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct NmResult {
    /// Sum of all positive trace-distance increments.
    pub total: f64,
    /// Collisions the trajectory ran for.
    pub n_used: usize,
    /// Whether the trajectory settled before its step cap.
    pub converged: bool,
    /// Maximal contiguous step ranges (inclusive) with positive increments.
    pub positive_intervals: Vec<(usize, usize)>,
}

/// Sum the positive trace-distance increments of a trajectory, recording the
/// contiguous step intervals they came from.
pub fn blp_measure(traj: &Trajectory) -> NmResult {
    let mut total = 0.0;
    let mut intervals: Vec<(usize, usize)> = Vec::new();
    for rec in &traj.records {
        if rec.n == 0 {
            continue;
        }
        if rec.d_dist > POSITIVE_INCREMENT_FLOOR {
            total += rec.d_dist;
            match intervals.last_mut() {
                Some(last) if last.1 + 1 == rec.n => last.1 = rec.n,
                _ => intervals.push((rec.n, rec.n)),
            }
        }
    }
    NmResult {
        total,
        n_used: traj.steps_run,
        converged: traj.converged,
        positive_intervals: intervals,
    }
}

/// Outcome of a threshold search over one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    pub param: Param,
    /// Midpoint of the final bracket.
    pub threshold: f64,
    pub bracket: (f64, f64),
    /// False when the bracket was degenerate or did not actually straddle
    /// the activation boundary.
    pub resolved: bool,
}

/// Bisect for the parameter value where the backflow measure first exceeds
/// [`NM_ACTIVE_FLOOR`], assuming the indicator is monotone inside the bracket.
///
/// Requires an inactive lower end and an active upper end; otherwise the
/// result comes back unresolved with the original bracket.
pub fn find_threshold(
    base: &ModelConfig,
    param: Param,
    lo: f64,
    hi: f64,
    resolution: f64,
) -> Result<ThresholdResult> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::invalid(format!(
            "invalid threshold bracket [{lo}, {hi}]"
        )));
    }
    if !resolution.is_finite() || resolution <= 0.0 {
        return Err(Error::Domain {
            name: "resolution".into(),
            value: resolution,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }
    let unresolved = ThresholdResult {
        param,
        threshold: 0.5 * (lo + hi),
        bracket: (lo, hi),
        resolved: false,
    };
    if lo == hi {
        return Ok(unresolved);
    }
    let active = |value: f64| -> Result<bool> {
        let cfg = base.with_param(param, value)?;
        Ok(blp_measure(&run_model(&cfg)?).total > NM_ACTIVE_FLOOR)
    };
    if active(lo)? || !active(hi)? {
        return Ok(unresolved);
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket exhausted at float resolution
        }
        if active(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdResult {
        param,
        threshold: 0.5 * (lo + hi),
        bracket: (lo, hi),
        resolved: true,
    })
}

/// Find the gaps of a sampled measure curve: maximal parameter intervals
/// where the measure is inactive, bounded on both sides by active points.
/// Input must be sorted by parameter value.
pub fn detect_revivals(curve: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut gaps = Vec::new();
    let mut last_active: Option<usize> = None;
    for (idx, &(_, value)) in curve.iter().enumerate() {
        if value > NM_ACTIVE_FLOOR {
            if let Some(prev) = last_active {
                if idx - prev > 1 {
                    gaps.push((curve[prev + 1].0, curve[idx - 1].0));
                }
            }
            last_active = Some(idx);
        }
    }
    gaps
}
