//! Grid evaluation over model parameters: 1-D sweeps, 2-D contour grids and
//! threshold-curve tracing, with deterministic row order under any degree of
//! parallelism.

mod config;
mod csv;

pub use config::{
    build_spec, merge_entries, parse_config, parse_entries, parse_overrides, Axis, Entry,
    OutputKind, SweepSpec,
};
pub use csv::{export_csv, format_float, write_csv, CsvPayload};

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{blp_measure, find_threshold, ThresholdResult};
use crate::model::{run_model, Param};

/// What happened at one grid point. Integrity failures are recorded here
/// instead of aborting the whole sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum PointOutcome {
    Measured {
        total: f64,
        n_used: usize,
        converged: bool,
    },
    Failed {
        detail: String,
    },
}

/// One long-format output row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub coord1: f64,
    pub coord2: Option<f64>,
    pub outcome: PointOutcome,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

/// Evaluate the backflow measure at every grid point of the spec.
///
/// Points are independent and evaluated in parallel on the current rayon
/// pool; rows come back in row-major axis order regardless of scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    let axis1 = spec
        .axis1
        .ok_or_else(|| Error::invalid("a sweep requires axis1"))?;
    // Surface incomplete or incompatible specs before burning grid time.
    let mut probe = vec![(axis1.param, axis1.lo)];
    if let Some(axis2) = spec.axis2 {
        probe.push((axis2.param, axis2.lo));
    }
    spec.model_config_at(&probe)?;

    let values1 = axis1.values();
    let mut grid: Vec<(f64, Option<f64>)> = Vec::new();
    match spec.axis2 {
        Some(axis2) => {
            for &v1 in &values1 {
                for v2 in axis2.values() {
                    grid.push((v1, Some(v2)));
                }
            }
        }
        None => grid.extend(values1.into_iter().map(|v| (v, None))),
    }

    let axis2_param = spec.axis2.map(|a| a.param);
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&(coord1, coord2)| {
            let mut overrides = vec![(axis1.param, coord1)];
            if let (Some(param), Some(value)) = (axis2_param, coord2) {
                overrides.push((param, value));
            }
            let outcome = match spec
                .model_config_at(&overrides)
                .and_then(|cfg| run_model(&cfg))
            {
                Ok(traj) => {
                    let nm = blp_measure(&traj);
                    PointOutcome::Measured {
                        total: nm.total,
                        n_used: nm.n_used,
                        converged: nm.converged,
                    }
                }
                Err(e) => PointOutcome::Failed {
                    detail: e.to_string(),
                },
            };
            SweepRow {
                coord1,
                coord2,
                outcome,
            }
        })
        .collect();

    Ok(SweepResult {
        spec: spec.clone(),
        rows,
    })
}

/// One point of a threshold curve: the intracollision strength that first
/// activates backflow at temperature `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPoint {
    pub t: f64,
    pub result: ThresholdResult,
}

/// Trace the activation threshold of the intracollision strength across a
/// temperature grid. The spec must sweep T on axis1 and fix everything else;
/// points where no threshold exists come back flagged unresolved.
pub fn trace_threshold_curve(spec: &SweepSpec, resolution: f64) -> Result<Vec<ThresholdPoint>> {
    let axis = spec
        .axis1
        .ok_or_else(|| Error::invalid("threshold tracing requires axis1 = T"))?;
    if axis.param != Param::Temperature {
        return Err(Error::invalid("threshold tracing requires axis1 = T"));
    }
    if spec.axis2.is_some() {
        return Err(Error::invalid("threshold tracing takes a single axis"));
    }
    if spec.fixed.contains_key(&Param::Intra) {
        return Err(Error::invalid(
            "Omega is the parameter searched by threshold tracing; leave it free",
        ));
    }
    axis.values()
        .par_iter()
        .map(|&t| {
            let base = spec.model_config_at(&[(Param::Temperature, t), (Param::Intra, 0.0)])?;
            let result = find_threshold(&base, Param::Intra, 0.0, FRAC_PI_2, resolution)?;
            Ok(ThresholdPoint { t, result })
        })
        .collect()
}
