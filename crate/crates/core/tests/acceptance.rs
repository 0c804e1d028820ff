//! Acceptance suite: one test per criterion, each printing a PASS line when
//! its assertions hold (run with `--nocapture` to see them).

use std::f64::consts::FRAC_PI_2;
use std::process::Command;
use std::sync::OnceLock;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qcollide::gates::{partial_swap, thermal_state, SwapStrength, ThermalSpec};
use qcollide::measure::{
    blp_measure, detect_revivals, find_threshold, NM_ACTIVE_FLOOR, POSITIVE_INCREMENT_FLOOR,
};
use qcollide::model::{
    full_chain_oracle, run_model, DirectConfig, IndirectConfig, ModelConfig, Param, StopPolicy,
};
use qcollide::sweep::{run_sweep, Axis, PointOutcome, SweepSpec};

fn direct(coupling: f64, intra: f64, temperature: f64) -> ModelConfig {
    ModelConfig::Direct(DirectConfig {
        coupling: SwapStrength::new(coupling).unwrap(),
        intra: SwapStrength::new(intra).unwrap(),
        thermal: ThermalSpec::with_default_ratio(temperature).unwrap(),
        stop: StopPolicy::default(),
    })
}

fn indirect(memory: f64, coupling: f64, intra: f64, temperature: f64) -> ModelConfig {
    ModelConfig::Indirect(IndirectConfig {
        memory_coupling: SwapStrength::new(memory).unwrap(),
        coupling: SwapStrength::new(coupling).unwrap(),
        intra: SwapStrength::new(intra).unwrap(),
        thermal: ThermalSpec::with_default_ratio(temperature).unwrap(),
        stop: StopPolicy::default(),
    })
}

fn with_stop(cfg: ModelConfig, stop: StopPolicy) -> ModelConfig {
    match cfg {
        ModelConfig::Direct(mut c) => {
            c.stop = stop;
            ModelConfig::Direct(c)
        }
        ModelConfig::Indirect(mut c) => {
            c.stop = stop;
            ModelConfig::Indirect(c)
        }
    }
}

fn spec_with_axis(base: ModelConfig, axis: Axis) -> SweepSpec {
    let mut fixed = std::collections::BTreeMap::new();
    for param in Param::ALL {
        if param != axis.param {
            if let Some(value) = base.param(param) {
                fixed.insert(param, value);
            }
        }
    }
    SweepSpec {
        model: base.kind(),
        fixed,
        omega_ratio: base.thermal().omega_ratio(),
        stop: base.stop(),
        axis1: Some(axis),
        axis2: None,
        outputs: None,
    }
}

fn measured_curve(spec: &SweepSpec) -> Vec<(f64, f64)> {
    run_sweep(spec)
        .unwrap()
        .rows
        .iter()
        .map(|row| match &row.outcome {
            PointOutcome::Measured { total, .. } => (row.coord1, *total),
            PointOutcome::Failed { detail } => {
                panic!("grid point {} failed: {detail}", row.coord1)
            }
        })
        .collect()
}

#[test]
fn criterion_01_oracle_equivalence() {
    let mut rng = StdRng::seed_from_u64(0xC0FFEE);
    let collisions = 6;
    let stop = StopPolicy::new(collisions, 1e-7, collisions).unwrap();
    let mut configs = Vec::new();
    for _ in 0..5 {
        configs.push(with_stop(
            direct(
                rng.gen_range(0.1..1.4),
                rng.gen_range(0.0..1.5),
                rng.gen_range(0.0..10.0),
            ),
            stop,
        ));
    }
    for _ in 0..5 {
        configs.push(with_stop(
            indirect(
                rng.gen_range(0.1..1.4),
                rng.gen_range(0.1..1.4),
                rng.gen_range(0.0..1.5),
                rng.gen_range(0.0..10.0),
            ),
            stop,
        ));
    }
    let mut worst = 0.0f64;
    for cfg in &configs {
        let iterated = run_model(cfg).unwrap();
        let oracle = full_chain_oracle(cfg, collisions).unwrap();
        assert_eq!(iterated.records.len(), collisions + 1);
        assert_eq!(oracle.records.len(), collisions + 1);
        for (a, b) in iterated.records.iter().zip(oracle.records.iter()) {
            for (x, y) in [
                (a.dist, b.dist),
                (a.sys_coherence, b.sys_coherence),
                (a.env_coherence, b.env_coherence),
                (a.d_dist, b.d_dist),
                (a.sys_excited, b.sys_excited),
            ] {
                let dev = (x - y).abs();
                worst = worst.max(dev);
                assert!(dev < 1e-10, "step {}: {x} vs {y}", a.n);
            }
        }
    }
    println!(
        "criterion 01 (oracle equivalence, 5+5 configs x 6 steps, worst dev {worst:.2e}): PASS"
    );
}

#[test]
fn criterion_02_markovian_baseline() {
    for &coupling in &[0.1, 0.375, 0.65, 0.925, 1.2] {
        for &temperature in &[0.0, 10.0] {
            let traj = run_model(&direct(coupling, 0.0, temperature)).unwrap();
            assert!(
                traj.records
                    .iter()
                    .all(|r| r.d_dist <= POSITIVE_INCREMENT_FLOOR),
                "backflow at J = {coupling}, T = {temperature}"
            );
            let nm = blp_measure(&traj);
            assert_eq!(nm.total, 0.0, "J = {coupling}, T = {temperature}");
            assert!(nm.positive_intervals.is_empty());
        }
    }
    println!("criterion 02 (Markovian baseline N = 0 on 10-point (J, T) grid): PASS");
}

#[test]
fn criterion_03_distance_coherence_identity() {
    for &temperature in &[0.0, 1.0, 5.0] {
        let traj = run_model(&direct(0.3, 0.95, temperature)).unwrap();
        for rec in &traj.records {
            assert!(
                (rec.dist - 2.0 * rec.sys_coherence).abs() < 1e-12,
                "T = {temperature}, step {}: D = {}, C_S = {}",
                rec.n,
                rec.dist,
                rec.sys_coherence
            );
        }
    }
    println!("criterion 03 (D = 2 C_S within 1e-12 at every step, T in {{0, 1, 5}}): PASS");
}

#[test]
fn criterion_04_homogenization() {
    for &temperature in &[0.5, 1.0, 5.0] {
        let traj = run_model(&direct(0.3, 0.0, temperature)).unwrap();
        assert!(traj.converged, "run did not settle at T = {temperature}");
        let thermal = ThermalSpec::with_default_ratio(temperature).unwrap();
        let expected_excited = 1.0 - thermal.ground_population();
        let final_excited = traj.records.last().unwrap().sys_excited;
        assert!(
            (final_excited - expected_excited).abs() < 1e-6,
            "T = {temperature}: settled population {final_excited} vs thermal {expected_excited}"
        );
    }
    println!("criterion 04 (homogenization to the thermal populations within 1e-6): PASS");
}

#[test]
fn criterion_05_threshold_activation() {
    let base = direct(0.3, 0.0, 0.0);
    let th = find_threshold(&base, Param::Intra, 0.0, FRAC_PI_2, 1e-3).unwrap();
    assert!(th.resolved);
    assert!(th.threshold > 0.0 && th.threshold < FRAC_PI_2);
    assert!(th.bracket.1 - th.bracket.0 <= 1e-3);

    // Above the threshold the measure must not decrease along a 50-point grid.
    let spec = spec_with_axis(
        base,
        Axis {
            param: Param::Intra,
            lo: th.bracket.1,
            hi: FRAC_PI_2,
            steps: 50,
        },
    );
    let curve = measured_curve(&spec);
    for window in curve.windows(2) {
        assert!(
            window[1].1 >= window[0].1 - 1e-9,
            "measure decreases from {:?} to {:?}",
            window[0],
            window[1]
        );
    }
    println!(
        "criterion 05 (activation threshold Omega* = {:.4} +- {:.1e}, nondecreasing above): PASS",
        th.threshold,
        (th.bracket.1 - th.bracket.0) / 2.0
    );
}

/// Shared by criteria 6 and 7: measure-vs-temperature curve for the
/// strong-intracollision direct model, T = 0..10 in 0.1 steps.
fn revival_curve() -> &'static Vec<(f64, f64)> {
    static CURVE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    CURVE.get_or_init(|| {
        let spec = spec_with_axis(
            direct(0.3, 0.95, 0.0),
            Axis {
                param: Param::Temperature,
                lo: 0.0,
                hi: 10.0,
                steps: 101,
            },
        );
        measured_curve(&spec)
    })
}

#[test]
fn criterion_06_temperature_revival() {
    let gaps = detect_revivals(revival_curve());
    assert!(
        !gaps.is_empty(),
        "no revival gap found on the 0..10 temperature grid"
    );
    for (lo, hi) in &gaps {
        assert!(lo <= hi);
    }
    println!("criterion 06 (temperature revival, gaps at {gaps:?}): PASS");
}

#[test]
fn criterion_07_coherence_crossing() {
    let curve = revival_curve();
    let gaps = detect_revivals(curve);
    let (_, gap_end) = *gaps.first().expect("criterion 6 guarantees a gap");
    // Representative active point of the revival: the strongest revived T.
    let revived_t = curve
        .iter()
        .filter(|&&(t, n)| t > gap_end && n > NM_ACTIVE_FLOOR)
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .map(|&(t, _)| t)
        .expect("a revived point exists past the gap");

    // Where the measure has revived, the ancilla coherence must overtake the
    // system coherence at some collision.
    let revived = run_model(&direct(0.3, 0.95, revived_t)).unwrap();
    assert!(
        revived
            .records
            .iter()
            .any(|r| r.env_coherence > r.sys_coherence + 1e-9),
        "no crossing found at T = {revived_t}"
    );

    // At T = 1 no crossing happens while the system retains coherence.
    let low_t = run_model(&direct(0.3, 0.95, 1.0)).unwrap();
    for rec in &low_t.records {
        if rec.sys_coherence < 1e-4 {
            break;
        }
        assert!(
            rec.env_coherence <= rec.sys_coherence + 1e-9,
            "unexpected crossing at T = 1, step {}",
            rec.n
        );
    }
    println!("criterion 07 (coherence crossing at revived T = {revived_t}, none at T = 1): PASS");
}

#[test]
fn criterion_08_indirect_threshold_ordering() {
    let mut thresholds = Vec::new();
    for &coupling in &[0.3, 0.6, 0.9] {
        let base = indirect(0.0, coupling, 0.0, 1.0);
        let th = find_threshold(&base, Param::MemoryCoupling, 0.0, FRAC_PI_2, 1e-3).unwrap();
        assert!(th.resolved, "no threshold for J = {coupling}");
        assert!(th.bracket.1 - th.bracket.0 <= 1e-3);
        thresholds.push((coupling, th.threshold));
    }
    assert!(
        thresholds[0].1 < thresholds[1].1 && thresholds[1].1 < thresholds[2].1,
        "thresholds not ordered: {thresholds:?}"
    );
    println!(
        "criterion 08 (kappa thresholds grow with J: {:.4} < {:.4} < {:.4}): PASS",
        thresholds[0].1, thresholds[1].1, thresholds[2].1
    );
}

#[test]
fn criterion_09_indirect_decoupling() {
    let traj = run_model(&indirect(0.0, 0.6, 0.9, 1.0)).unwrap();
    assert!(!traj.converged);
    assert_eq!(traj.steps_run, traj.config.stop().n_max());
    for rec in &traj.records {
        assert!(
            (rec.dist - 1.0).abs() < 1e-12,
            "step {}: D = {}",
            rec.n,
            rec.dist
        );
    }
    let nm = blp_measure(&traj);
    assert_eq!(nm.total, 0.0);
    println!("criterion 09 (kappa = 0 decouples: D = 1 throughout, N = 0): PASS");
}

#[test]
fn criterion_10_gate_and_state_correctness() {
    let mut worst = 0.0f64;
    for k in 0..100 {
        let theta = FRAC_PI_2 * (k as f64 / 99.0);
        let u = partial_swap(SwapStrength::new(theta).unwrap());
        let product = u.amps() * u.amps().adjoint();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst =
                    worst.max((product[(i, j)] - num_complex::Complex64::new(expect, 0.0)).norm());
            }
        }
    }
    assert!(worst < 1e-12, "unitarity deviation {worst:.3e}");

    let rho = thermal_state(&ThermalSpec::new(1.0, 5.0).unwrap());
    assert!((rho.entry(0, 0).re - 0.993_307_149_075_715_3).abs() < 1e-12);
    println!(
        "criterion 10 (partial-swap unitarity {worst:.2e} over 100 thetas; Gibbs weight exact): PASS"
    );
}

#[test]
fn criterion_11_determinism_and_parallel_soundness() {
    let bin = env!("CARGO_BIN_EXE_qcollide");
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.cfg");
    std::fs::write(
        &config,
        "model = direct\nJ = 0.3\nT = 1\naxis1 = Omega 0 1.5 8\nn_max = 500\n",
    )
    .unwrap();

    let mut bodies = Vec::new();
    for jobs in ["1", "8"] {
        let out = dir.path().join(format!("sweep_{jobs}.csv"));
        let status = Command::new(bin)
            .args(["sweep", "--config"])
            .arg(&config)
            .args(["--jobs", jobs, "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success(), "sweep --jobs {jobs} failed");
        let text = std::fs::read_to_string(&out).unwrap();
        let body: String = text
            .lines()
            .filter(|line| !line.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n");
        bodies.push(body);
    }
    assert_eq!(
        bodies[0], bodies[1],
        "CSV bodies differ between --jobs 1 and --jobs 8"
    );
    assert!(!bodies[0].is_empty());
    println!("criterion 11 (byte-identical sweep bodies for --jobs 1 vs --jobs 8): PASS");
}

#[test]
fn criterion_12_non_reproducibility_note() {
    // The reference curves exist only as plots; no numeric equality with them
    // is claimed anywhere in this suite. Criteria 5-8 pin the qualitative
    // shapes (activation, monotonicity, revival, threshold ordering) instead.
    let qualitative_criteria = [5, 6, 7, 8];
    assert_eq!(qualitative_criteria.len(), 4);
    println!(
        "criterion 12 (no numeric figure equality claimed; shape criteria {qualitative_criteria:?} stand in): PASS"
    );
}
