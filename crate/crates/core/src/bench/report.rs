//! CSV output, parsing and per-cell summaries.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::{BenchRecord, OptimizerKind, RunMetrics};
use crate::{Error, Result};

pub const RECORD_HEADER: [&str; 11] = [
    "optimizer",
    "n",
    "instance_seed",
    "run_seed",
    "best_energy",
    "R",
    "R_minus_1",
    "opt_gap",
    "evals",
    "samples",
    "wall_time_s",
];

pub const SUMMARY_HEADER: [&str; 6] = [
    "optimizer",
    "n",
    "runs",
    "mean_R_minus_1",
    "mean_wall_time_s",
    "mean_evals",
];

/// Formats with 12 significant digits in the shortest of plain or
/// scientific notation, e.g. `0.0123456789012`, `1.5e-13`, `42`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else { format!("{x}") };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn write_records<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        let seed = r.instance_seed.map(|s| s.to_string()).unwrap_or_default();
        let mut row = vec![r.optimizer.clone(), r.n.to_string(), seed, r.run_seed.to_string()];
        match &r.outcome {
            Ok(m) => row.extend([
                m.best_energy.to_string(),
                format_float(m.ratio),
                format_float(m.r_minus_1),
                m.opt_gap.to_string(),
                m.evals.to_string(),
                m.samples.to_string(),
                format_float(m.wall_time_s),
            ]),
            Err(_) => row.extend(std::iter::repeat_n(String::new(), 7)),
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse().map_err(|_| {
        Error::Parse(format!(
            "line {line}: column {} has invalid value {raw:?}",
            RECORD_HEADER.get(i).copied().unwrap_or("?")
        ))
    })
}

fn check_header(reader: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse(format!(
            "unexpected header {:?}, want {}",
            header.iter().collect::<Vec<_>>(),
            expected.join(",")
        )));
    }
    Ok(())
}

/// Reads records written by [`write_records`]. Rows with empty metric
/// fields become error rows whose message is lost.
pub fn read_records<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &RECORD_HEADER)?;
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let instance_seed = match row.get(2).unwrap_or("") {
            "" => None,
            _ => Some(field(&row, 2, line)?),
        };
        let outcome = if row.get(4).unwrap_or("").is_empty() {
            Err("error".to_string())
        } else {
            Ok(RunMetrics {
                best_energy: field(&row, 4, line)?,
                ratio: field(&row, 5, line)?,
                r_minus_1: field(&row, 6, line)?,
                opt_gap: field(&row, 7, line)?,
                evals: field(&row, 8, line)?,
                samples: field(&row, 9, line)?,
                wall_time_s: field(&row, 10, line)?,
            })
        };
        records.push(BenchRecord {
            optimizer: field(&row, 0, line)?,
            n: field(&row, 1, line)?,
            instance_seed,
            run_seed: field(&row, 3, line)?,
            outcome,
        });
    }
    Ok(records)
}

/// Means over the successful runs of one `(optimizer, n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub optimizer: String,
    pub n: usize,
    pub runs: usize,
    pub mean_r_minus_1: f64,
    pub mean_wall_time_s: f64,
    pub mean_evals: f64,
}

/// Optimizers in canonical order first, unknown names after, by name.
fn optimizer_rank(name: &str) -> (u64, String) {
    match name.parse::<OptimizerKind>() {
        Ok(k) => (k.code(), String::new()),
        Err(_) => (u64::MAX, name.to_string()),
    }
}

type Groups<'a> = BTreeMap<((u64, String), usize), (String, Vec<&'a RunMetrics>)>;

/// Groups successful rows by `(optimizer, n)`. Error rows are skipped.
pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    let mut groups: Groups<'_> = BTreeMap::new();
    for r in records {
        if let Ok(m) = &r.outcome {
            groups
                .entry((optimizer_rank(&r.optimizer), r.n))
                .or_insert_with(|| (r.optimizer.clone(), Vec::new()))
                .1
                .push(m);
        }
    }
    groups
        .into_iter()
        .map(|((_, n), (optimizer, ms))| {
            let k = ms.len() as f64;
            SummaryRow {
                optimizer,
                n,
                runs: ms.len(),
                mean_r_minus_1: ms.iter().map(|m| m.r_minus_1).sum::<f64>() / k,
                mean_wall_time_s: ms.iter().map(|m| m.wall_time_s).sum::<f64>() / k,
                mean_evals: ms.iter().map(|m| m.evals as f64).sum::<f64>() / k,
            }
        })
        .collect()
}

/// Mean `R - 1` per optimizer over every successful row, in canonical order.
pub fn mean_by_optimizer(records: &[BenchRecord]) -> Vec<(String, f64)> {
    let mut groups: BTreeMap<(u64, String), (String, f64, usize)> = BTreeMap::new();
    for r in records {
        if let Ok(m) = &r.outcome {
            let g = groups
                .entry(optimizer_rank(&r.optimizer))
                .or_insert_with(|| (r.optimizer.clone(), 0.0, 0));
            g.1 += m.r_minus_1;
            g.2 += 1;
        }
    }
    groups
        .into_values()
        .map(|(name, sum, k)| (name, sum / k as f64))
        .collect()
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.optimizer.clone(),
            r.n.to_string(),
            r.runs.to_string(),
            format_float(r.mean_r_minus_1),
            format_float(r.mean_wall_time_s),
            format_float(r.mean_evals),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &SUMMARY_HEADER)?;
    let parse = |row: &csv::StringRecord, i: usize| -> Result<f64> {
        let raw = row.get(i).unwrap_or("");
        raw.parse()
            .map_err(|_| Error::Parse(format!("column {} has invalid value {raw:?}", SUMMARY_HEADER[i])))
    };
    let mut rows = Vec::new();
    for row in reader.records() {
        let row = row?;
        rows.push(SummaryRow {
            optimizer: row.get(0).unwrap_or("").to_string(),
            n: parse(&row, 1)? as usize,
            runs: parse(&row, 2)? as usize,
            mean_r_minus_1: parse(&row, 3)?,
            mean_wall_time_s: parse(&row, 4)?,
            mean_evals: parse(&row, 5)?,
        });
    }
    Ok(rows)
}
