use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::aggregate::{AggregateRow, Stat};
use crate::engine::{QueryMetrics, Setup};
use crate::query::QueryClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
    Latex,
}

impl FromStr for TableFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            "latex" | "tex" => Ok(TableFormat::Latex),
            _ => Err(format!("unknown format {s:?}; expected csv, markdown or latex")),
        }
    }
}

/// `x` rounded half-up to two decimals, always with two digits.
pub fn fixed2(x: f64) -> String {
    let s = format!("{:.6}", x.abs());
    let (int, frac) = s.split_once('.').expect("fixed-point formatting has a dot");
    let digits = frac.as_bytes();
    let mut cents: u64 = int.parse::<u64>().expect("integer part") * 100 + u64::from((digits[0] - b'0') * 10 + (digits[1] - b'0'));
    if digits[2] >= b'5' {
        cents += 1;
    }
    let sign = if x < 0.0 && cents > 0 { "-" } else { "" };
    format!("{sign}{}.{:02}", cents / 100, cents % 100)
}

/// Rounded to two decimals with trailing zeros dropped: `10.20` → `10.2`,
/// `35.00` → `35`.
pub fn trimmed(x: f64) -> String {
    let s = fixed2(x);
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

/// Thousands columns keep two decimals, except that zero prints as `0`.
pub fn thousands(x: f64) -> String {
    match fixed2(x).as_str() {
        "0.00" => "0".to_owned(),
        s => s.to_owned(),
    }
}

fn latex_setup(setup: Setup) -> &'static str {
    match setup {
        Setup::RhoDf => "$\\rho$DF",
        other => other.name(),
    }
}

fn latex_class(class: QueryClass) -> String {
    match class {
        QueryClass::EntityS => "entity-{s}".to_owned(),
        QueryClass::EntitySO => "entity-{so}".to_owned(),
        other => other.name().to_owned(),
    }
}

const LATEX_HEADER: &str = "\\textbf{Setup} & \\multicolumn{2}{c}{\\textbf{Results}}& \\multicolumn{2}{c}{\\textbf{ Time (sec)}}& \\multicolumn{2}{c}{\\textbf{ First (sec)}}& \\multicolumn{2}{c}{\\textbf{HTTP}}& \\multicolumn{2}{c}{\\textbf{Retrieved (k)}}& \\multicolumn{2}{c}{\\textbf{Inferred (k)}}\\\\ \\hline\\hline";

/// The twelve numeric cells of a row, as rendered in every format.
fn cells(row: &AggregateRow) -> [(String, String); 6] {
    let plain = |s: Stat| (trimmed(s.mean), trimmed(s.sd));
    let k = |s: Stat| (thousands(s.mean), thousands(s.sd));
    [
        plain(row.results),
        plain(row.time_s),
        plain(row.first_s.unwrap_or_default()),
        plain(row.http),
        k(row.retrieved_k),
        k(row.inferred_k),
    ]
}

pub fn latex_row(row: &AggregateRow) -> String {
    let mut line = format!("{{\\tt {}}}", latex_setup(row.setup));
    for (mean, sd) in cells(row) {
        write!(line, "& {mean}&($\\pm${sd})").unwrap();
    }
    line.push_str("\\\\");
    line
}

fn blocks(rows: &[AggregateRow]) -> Vec<&[AggregateRow]> {
    rows.chunk_by(|a, b| a.class == b.class).collect()
}

fn emit_latex(rows: &[AggregateRow]) -> String {
    let mut out = String::from(LATEX_HEADER);
    out.push('\n');
    for block in blocks(rows) {
        let first = &block[0];
        writeln!(
            out,
            "\\multicolumn{{13}}{{|l|}}{{Query class \\textbf{{{}}} with {} queries}}\\\\\\hline",
            latex_class(first.class),
            first.class_queries
        )
        .unwrap();
        for row in block {
            out.push_str(&latex_row(row));
            out.push('\n');
        }
        out.push_str("\\hline\n\\hline\n");
    }
    out
}

fn emit_markdown(rows: &[AggregateRow]) -> String {
    let mut out = String::from(
        "| Class | Queries | Setup | Results | Time (sec) | First (sec) | HTTP | Retrieved (k) | Inferred (k) |\n\
         |---|---:|---|---:|---:|---:|---:|---:|---:|\n",
    );
    for row in rows {
        write!(out, "| {} | {} | {} |", row.class, row.class_queries, row.setup).unwrap();
        for (mean, sd) in cells(row) {
            write!(out, " {mean} (±{sd}) |").unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    class: QueryClass,
    queries: usize,
    setup: Setup,
    rows: usize,
    results_mean: String,
    results_sd: String,
    time_mean: String,
    time_sd: String,
    first_mean: String,
    first_sd: String,
    http_mean: String,
    http_sd: String,
    retrieved_k_mean: String,
    retrieved_k_sd: String,
    inferred_k_mean: String,
    inferred_k_sd: String,
    truncated: usize,
}

const CSV_HEADER: &str = "class,queries,setup,rows,results_mean,results_sd,time_mean,time_sd,first_mean,first_sd,http_mean,http_sd,retrieved_k_mean,retrieved_k_sd,inferred_k_mean,inferred_k_sd,truncated\n";

fn emit_csv(rows: &[AggregateRow]) -> String {
    if rows.is_empty() {
        return CSV_HEADER.to_owned();
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        let first = row.first_s.map(|s| (fixed2(s.mean), fixed2(s.sd)));
        w.serialize(CsvRow {
            class: row.class,
            queries: row.class_queries,
            setup: row.setup,
            rows: row.rows,
            results_mean: fixed2(row.results.mean),
            results_sd: fixed2(row.results.sd),
            time_mean: fixed2(row.time_s.mean),
            time_sd: fixed2(row.time_s.sd),
            first_mean: first.clone().map(|f| f.0).unwrap_or_default(),
            first_sd: first.map(|f| f.1).unwrap_or_default(),
            http_mean: fixed2(row.http.mean),
            http_sd: fixed2(row.http.sd),
            retrieved_k_mean: fixed2(row.retrieved_k.mean),
            retrieved_k_sd: fixed2(row.retrieved_k.sd),
            inferred_k_mean: fixed2(row.inferred_k.mean),
            inferred_k_sd: fixed2(row.inferred_k.sd),
            truncated: row.truncated,
        })
        .expect("in-memory CSV writes cannot fail");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV output is UTF-8")
}

pub fn emit_table(rows: &[AggregateRow], format: TableFormat) -> String {
    match format {
        TableFormat::Csv => emit_csv(rows),
        TableFormat::Markdown => emit_markdown(rows),
        TableFormat::Latex => emit_latex(rows),
    }
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("bad number {0:?}")]
    Number(String),
}

/// Reads a table written by `emit_table(.., TableFormat::Csv)`.
pub fn parse_csv_table(text: &str) -> Result<Vec<AggregateRow>, TableError> {
    let num = |s: &str| s.parse::<f64>().map_err(|_| TableError::Number(s.to_owned()));
    let stat = |m: &str, s: &str| -> Result<Stat, TableError> { Ok(Stat { mean: num(m)?, sd: num(s)? }) };
    let mut out = Vec::new();
    for rec in csv::Reader::from_reader(text.as_bytes()).deserialize::<CsvRow>() {
        let r = rec?;
        out.push(AggregateRow {
            class: r.class,
            class_queries: r.queries,
            setup: r.setup,
            rows: r.rows,
            results: stat(&r.results_mean, &r.results_sd)?,
            time_s: stat(&r.time_mean, &r.time_sd)?,
            first_s: if r.first_mean.is_empty() {
                None
            } else {
                Some(stat(&r.first_mean, &r.first_sd)?)
            },
            http: stat(&r.http_mean, &r.http_sd)?,
            retrieved_k: stat(&r.retrieved_k_mean, &r.retrieved_k_sd)?,
            inferred_k: stat(&r.inferred_k_mean, &r.inferred_k_sd)?,
            truncated: r.truncated,
        });
    }
    Ok(out)
}

/// Per-query raw metrics as CSV.
pub fn metrics_csv(rows: &[QueryMetrics]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory CSV writes cannot fail");
    }
    if rows.is_empty() {
        return "query_id,class,setup,results,time_s,first_s,http,retrieved,inferred,truncated\n".to_owned();
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV output is UTF-8")
}

pub fn parse_metrics_csv(text: &str) -> Result<Vec<QueryMetrics>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_and_trimming() {
        assert_eq!(fixed2(10.675), "10.68");
        assert_eq!(fixed2(0.005), "0.01");
        assert_eq!(fixed2(2.0), "2.00");
        assert_eq!(trimmed(10.2), "10.2");
        assert_eq!(trimmed(35.0), "35");
        assert_eq!(trimmed(0.0), "0");
        assert_eq!(thousands(10.3), "10.30");
        assert_eq!(thousands(0.0), "0");
        assert_eq!(fixed2(-0.001), "0.00");
    }

    #[test]
    fn single_value_cell() {
        let s = Stat::of(&[10.68]).unwrap();
        assert_eq!(format!("{} (±{})", trimmed(s.mean), trimmed(s.sd)), "10.68 (±0)");
    }

    #[test]
    fn empty_tables_are_header_only() {
        assert_eq!(emit_table(&[], TableFormat::Csv).lines().count(), 1);
        assert_eq!(emit_table(&[], TableFormat::Latex).lines().count(), 1);
        assert_eq!(emit_table(&[], TableFormat::Markdown).lines().count(), 2);
        assert_eq!(metrics_csv(&[]).lines().count(), 1);
    }
}
