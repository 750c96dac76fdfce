//! CSV interchange: per-round regret traces and sweep aggregates.

use std::io::{Read, Write};

use anyhow::{anyhow, bail, Context, Result};
use netband_core::harness::{RegretTrace, SweepResult};

pub const TRACE_HEADER: [&str; 12] =
    ["run_id", "policy", "N", "A", "s", "T", "rep", "seed", "t", "inst_regret", "cum_regret", "phase"];

pub const SWEEP_HEADER: [&str; 4] = ["axis_value", "policy", "mean_final_regret", "std_final_regret"];

const SIGNIFICANT: usize = 12;

/// Positional decimal with 12 significant digits and no trailing zeros.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_owned();
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();

    let (int_part, frac_part) = if exp >= 0 {
        let split = exp as usize + 1;
        if split >= digits.len() {
            (format!("{digits}{}", "0".repeat(split - digits.len())), String::new())
        } else {
            (digits[..split].to_owned(), digits[split..].to_owned())
        }
    } else {
        ("0".to_owned(), format!("{}{digits}", "0".repeat((-exp - 1) as usize)))
    };
    let frac = frac_part.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac}")
    }
}

/// One trace row as written.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub run_id: usize,
    pub policy: String,
    pub units: usize,
    pub arms: u32,
    pub sparsity: usize,
    pub horizon: usize,
    pub rep: usize,
    pub seed: u64,
    pub t: usize,
    pub inst_regret: f64,
    pub cum_regret: f64,
    pub phase: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: String,
    pub policy: String,
    pub mean_final_regret: f64,
    pub std_final_regret: f64,
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

/// Writes the header and every recorded round of every trace. `run_id`
/// counts traces in the given order.
pub fn write_traces<W: Write>(out: W, traces: &[RegretTrace]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(TRACE_HEADER)?;
    for (run_id, trace) in traces.iter().enumerate() {
        let m = &trace.meta;
        let fixed = [
            run_id.to_string(),
            m.policy.to_owned(),
            m.units.to_string(),
            m.arms.to_string(),
            m.sparsity.to_string(),
            m.horizon.to_string(),
            m.rep.to_string(),
            m.seed.to_string(),
        ];
        for k in 0..trace.rounds.len() {
            let mut record = fixed.to_vec();
            record.push(trace.rounds[k].to_string());
            record.push(format_sig(trace.inst[k]));
            record.push(format_sig(trace.cum[k]));
            record.push(trace.phases[k].to_string());
            w.write_record(&record)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes one row per successful sweep point, in sweep order.
pub fn write_sweep<W: Write>(out: W, result: &SweepResult) -> Result<()> {
    let mut w = writer(out);
    w.write_record(SWEEP_HEADER)?;
    for point in &result.points {
        if let Ok((mean, std)) = point.outcome {
            w.write_record([point.value.label(), point.policy.to_owned(), format_sig(mean), format_sig(std)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Contents of a CSV written by `simulate` or `sweep`.
#[derive(Debug, Clone, PartialEq)]
pub enum Records {
    Traces(Vec<TraceRow>),
    Sweep(Vec<SweepRow>),
}

impl Records {
    pub fn is_empty(&self) -> bool {
        match self {
            Records::Traces(rows) => rows.is_empty(),
            Records::Sweep(rows) => rows.is_empty(),
        }
    }
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize, name: &str, line: u64) -> Result<T> {
    let raw = record.get(i).ok_or_else(|| anyhow!("line {line}: missing field '{name}'"))?;
    raw.parse().map_err(|_| anyhow!("line {line}: cannot parse '{raw}' as {name}"))
}

/// Reads either CSV flavour, recognised by its header.
pub fn read_records<R: Read>(input: R) -> Result<Records> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers().context("line 1: unreadable header")?.clone();
    let names: Vec<&str> = header.iter().collect();
    let traces = if names == TRACE_HEADER {
        true
    } else if names == SWEEP_HEADER {
        false
    } else {
        bail!("line 1: header is neither a trace nor a sweep header");
    };

    let mut trace_rows = Vec::new();
    let mut sweep_rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, csv::Position::line);
            anyhow!("line {line}: {e}")
        })?;
        let line = record.position().map_or(0, csv::Position::line);
        if traces {
            trace_rows.push(TraceRow {
                run_id: field(&record, 0, "run_id", line)?,
                policy: field(&record, 1, "policy", line)?,
                units: field(&record, 2, "N", line)?,
                arms: field(&record, 3, "A", line)?,
                sparsity: field(&record, 4, "s", line)?,
                horizon: field(&record, 5, "T", line)?,
                rep: field(&record, 6, "rep", line)?,
                seed: field(&record, 7, "seed", line)?,
                t: field(&record, 8, "t", line)?,
                inst_regret: field(&record, 9, "inst_regret", line)?,
                cum_regret: field(&record, 10, "cum_regret", line)?,
                phase: field(&record, 11, "phase", line)?,
            });
        } else {
            sweep_rows.push(SweepRow {
                axis_value: field(&record, 0, "axis_value", line)?,
                policy: field(&record, 1, "policy", line)?,
                mean_final_regret: field(&record, 2, "mean_final_regret", line)?,
                std_final_regret: field(&record, 3, "std_final_regret", line)?,
            });
        }
    }
    Ok(if traces { Records::Traces(trace_rows) } else { Records::Sweep(sweep_rows) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use netband_core::harness::{run_once, ExperimentConfig, PolicySpec};
    use proptest::prelude::*;

    #[test]
    fn sig_digits() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(-0.0), "0");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(0.7000000000000001), "0.7");
        assert_eq!(format_sig(123456.789), "123456.789");
        assert_eq!(format_sig(1234567890123456.0), "1234567890120000");
        assert_eq!(format_sig(-2.5e-5), "-0.000025");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
    }

    proptest! {
        #[test]
        fn parses_back_within_twelve_digits(x in -1e6f64..1e6) {
            let back: f64 = format_sig(x).parse().unwrap();
            let rounded: f64 = format!("{:.11e}", x).parse().unwrap();
            prop_assert_eq!(back, rounded);
        }
    }

    #[test]
    fn trace_round_trip() {
        let mut config = ExperimentConfig::new(3, 2, 1, PolicySpec::Ucb);
        config.horizon = Some(8);
        let traces = vec![run_once(&config, 0).unwrap(), run_once(&config, 1).unwrap()];
        let mut buf = Vec::new();
        write_traces(&mut buf, &traces).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("run_id,policy,N,A,s,T,rep,seed,t,inst_regret,cum_regret,phase\n"));
        assert!(!text.contains('\r'));
        let Records::Traces(rows) = read_records(buf.as_slice()).unwrap() else { panic!("wrong flavour") };
        assert_eq!(rows.len(), 16);
        assert_eq!(rows[8].run_id, 1);
        assert!(rows.iter().all(|r| r.phase == "explore"));
        let cum: Vec<f64> = rows[..8].iter().map(|r| r.cum_regret).collect();
        for (a, b) in cum.iter().zip(&traces[0].cum) {
            assert_eq!(*a, format_sig(*b).parse::<f64>().unwrap());
        }
    }

    #[test]
    fn bad_rows_name_their_line() {
        let text = "axis_value,policy,mean_final_regret,std_final_regret\n5,ucb,1.5,0.1\n6,ucb,oops,0.2\n";
        let err = read_records(text.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        let err = read_records("a,b\n1,2\n".as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
        let err = read_records("axis_value,policy,mean_final_regret,std_final_regret\n5,ucb\n".as_bytes())
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
    }
}
