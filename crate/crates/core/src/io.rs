//! CSV readers and writers for traces, sweeps and experiment records.
//!
//! All files have a header row, comma separators and LF line endings.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::Result;
use crate::experiments::{DensityRecord, ScalingRecord, SweepRow};

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Writes serializable rows under their field-name header.
pub fn write_rows<W: Write, R: Serialize>(out: W, rows: &[R]) -> Result<()> {
    let mut w = writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read, T: DeserializeOwned>(input: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Into::into))
        .collect()
}

/// Streams `step,probability` rows.
pub struct TraceWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(out: W) -> Result<Self> {
        let mut inner = writer(out);
        inner.write_record(["step", "probability"])?;
        Ok(Self { inner })
    }

    pub fn row(&mut self, step: usize, probability: f64) -> Result<()> {
        self.inner
            .write_record([step.to_string(), probability.to_string()])?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// Whole trace as `step,probability`.
pub fn write_trace<W: Write>(out: W, trace: &[f64]) -> Result<()> {
    let mut w = TraceWriter::new(out)?;
    for (t, &p) in trace.iter().enumerate() {
        w.row(t, p)?;
    }
    w.finish()
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<f64>> {
    #[derive(serde::Deserialize)]
    struct Row {
        step: usize,
        probability: f64,
    }
    let rows: Vec<Row> = read_rows(input)?;
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            if r.step == i {
                Ok(r.probability)
            } else {
                Err(crate::Error::domain(format!(
                    "trace row {i} has step {}",
                    r.step
                )))
            }
        })
        .collect()
}

/// Sweep table as `na,peak_step,peak_probability,optimal`.
pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    write_rows(out, rows)
}

pub fn write_scaling_records<W: Write>(out: W, records: &[ScalingRecord]) -> Result<()> {
    write_rows(out, records)
}

pub fn read_scaling_records<R: Read>(input: R) -> Result<Vec<ScalingRecord>> {
    read_rows(input)
}

/// Density records: the scaling columns plus `fraction`, `fixed_step` and
/// `fixed_step_probability`.
pub fn write_density_records<W: Write>(out: W, records: &[DensityRecord]) -> Result<()> {
    write_rows(out, records)
}

pub fn read_density_records<R: Read>(input: R) -> Result<Vec<DensityRecord>> {
    read_rows(input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EdgeMode;

    fn record(side: usize, trial: usize) -> ScalingRecord {
        ScalingRecord {
            side,
            n_elements: side * side,
            m: 1,
            na: 8.5,
            mode: EdgeMode::Hn4,
            seed: 17,
            trial,
            peak_step: 114,
            peak_probability: 0.873_125,
            amplified_cost: 122.0,
        }
    }

    #[test]
    fn scaling_header_and_round_trip() {
        let recs = vec![record(64, 0), record(128, 1)];
        let mut buf = Vec::new();
        write_scaling_records(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "side,n_elements,m,na,mode,seed,trial,peak_step,peak_probability,amplified_cost\n"
        ));
        assert!(text.contains("\n64,4096,1,8.5,hn4,17,0,114,0.873125,122.0\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_scaling_records(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn trace_round_trip() {
        let trace = vec![1.0 / 256.0, 0.1, 0.25];
        let mut buf = Vec::new();
        write_trace(&mut buf, &trace).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "step,probability\n0,0.00390625\n1,0.1\n2,0.25\n");
        assert_eq!(read_trace(buf.as_slice()).unwrap(), trace);
    }

    #[test]
    fn trace_with_gap_is_rejected() {
        let text = "step,probability\n0,0.1\n2,0.2\n";
        assert!(read_trace(text.as_bytes()).is_err());
    }

    #[test]
    fn sweep_columns() {
        let rows = [
            SweepRow {
                na: 8.0,
                peak_step: 110,
                peak_probability: 0.8,
                optimal: false,
            },
            SweepRow {
                na: 8.5,
                peak_step: 114,
                peak_probability: 0.9,
                optimal: true,
            },
        ];
        let mut buf = Vec::new();
        write_sweep(&mut buf, &rows).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "na,peak_step,peak_probability,optimal\n8.0,110,0.8,false\n8.5,114,0.9,true\n"
        );
    }
}
