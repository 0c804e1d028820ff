//! CSV emission with provenance headers. Floats are rendered with 17
//! significant digits so every value round-trips bit-exactly.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::model::Trajectory;

use super::{PointOutcome, SweepResult, SweepSpec, ThresholdPoint};

/// Render a float with 17 significant digits (round-trip exact).
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn sanitize(detail: &str) -> String {
    detail.replace(',', ";").replace('\n', " ")
}

/// What to serialize.
pub enum CsvPayload<'a> {
    Sweep(&'a SweepResult),
    Trajectory(&'a Trajectory),
    Thresholds(&'a SweepSpec, &'a [ThresholdPoint]),
}

fn write_provenance<W: Write>(w: &mut W, echo: &[String]) -> io::Result<()> {
    writeln!(w, "# qcollide {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# generated: {}", chrono::Utc::now().to_rfc3339())?;
    for line in echo {
        writeln!(w, "# {line}")?;
    }
    Ok(())
}

pub fn write_csv<W: Write>(w: &mut W, payload: &CsvPayload) -> io::Result<()> {
    match payload {
        CsvPayload::Sweep(result) => {
            write_provenance(w, &result.spec.echo_lines())?;
            let axis1 = result
                .spec
                .axis1
                .as_ref()
                .expect("sweep results always carry axis1");
            match &result.spec.axis2 {
                Some(axis2) => writeln!(
                    w,
                    "{},{},N,n_used,converged,status",
                    axis1.param.key(),
                    axis2.param.key()
                )?,
                None => writeln!(w, "{},N,n_used,converged,status", axis1.param.key())?,
            }
            for row in &result.rows {
                write!(w, "{}", format_float(row.coord1))?;
                if let Some(coord2) = row.coord2 {
                    write!(w, ",{}", format_float(coord2))?;
                }
                match &row.outcome {
                    PointOutcome::Measured {
                        total,
                        n_used,
                        converged,
                    } => writeln!(w, ",{},{n_used},{converged},ok", format_float(*total))?,
                    PointOutcome::Failed { detail } => writeln!(w, ",,,,{}", sanitize(detail))?,
                }
            }
        }
        CsvPayload::Trajectory(traj) => {
            let mut echo = traj.config.echo_lines();
            echo.push(format!("converged = {}", traj.converged));
            echo.push(format!("steps_run = {}", traj.steps_run));
            write_provenance(w, &echo)?;
            writeln!(w, "n,D,dD,C_S,C_R,pop_S")?;
            for rec in &traj.records {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    rec.n,
                    format_float(rec.dist),
                    format_float(rec.d_dist),
                    format_float(rec.sys_coherence),
                    format_float(rec.env_coherence),
                    format_float(rec.sys_excited)
                )?;
            }
        }
        CsvPayload::Thresholds(spec, points) => {
            write_provenance(w, &spec.echo_lines())?;
            writeln!(w, "T,Omega_star,bracket_lo,bracket_hi,resolved")?;
            for point in *points {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    format_float(point.t),
                    format_float(point.result.threshold),
                    format_float(point.result.bracket.0),
                    format_float(point.result.bracket.1),
                    point.result.resolved
                )?;
            }
        }
    }
    Ok(())
}

/// Write a payload to `path`, or stdout when no path is given. File output
/// goes through a sibling temp file and an atomic rename, so a cancelled run
/// leaves no partial file behind.
pub fn export_csv(payload: &CsvPayload, path: Option<&Path>) -> Result<()> {
    match path {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_csv(&mut lock, payload)?;
            lock.flush()?;
        }
        Some(path) => {
            let mut tmp = path.as_os_str().to_owned();
            tmp.push(".tmp");
            let tmp = std::path::PathBuf::from(tmp);
            {
                let mut file = BufWriter::new(fs::File::create(&tmp)?);
                write_csv(&mut file, payload)?;
                file.flush()?;
            }
            fs::rename(&tmp, path)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{SwapStrength, ThermalSpec};
    use crate::model::{DirectConfig, ModelConfig, StopPolicy};
    use proptest::prelude::*;

    #[test]
    fn float_format_is_17_significant_digits() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(0.0), "0.0000000000000000e0");
        assert_eq!(format_float(-0.25), "-2.5000000000000000e-1");
    }

    proptest! {
        #[test]
        fn float_format_round_trips_bit_exactly(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let parsed: f64 = format_float(x).parse().unwrap();
            prop_assert_eq!(parsed.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn empty_trajectory_writes_header_only() {
        let traj = Trajectory {
            config: ModelConfig::Direct(DirectConfig {
                coupling: SwapStrength::new(0.3).unwrap(),
                intra: SwapStrength::new(0.0).unwrap(),
                thermal: ThermalSpec::with_default_ratio(1.0).unwrap(),
                stop: StopPolicy::default(),
            }),
            records: Vec::new(),
            converged: false,
            steps_run: 0,
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, &CsvPayload::Trajectory(&traj)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut body = text.lines().filter(|l| !l.starts_with('#'));
        assert_eq!(body.next(), Some("n,D,dD,C_S,C_R,pop_S"));
        assert_eq!(body.next(), None);
    }
}
