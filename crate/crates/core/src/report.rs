//! Ranked score tables and plot-ready series built from run logs.
//!
//! Rows carry both the raw FI and the mean responsiveness. FI is 0 for perfect
//! tracking but also for an agent whose under- and overcorrections cancel, so
//! rankings sort on responsiveness (higher first), then on `|fi|` (lower
//! first), then on agent name and source label.

use std::cmp::Ordering;

use serde::Serialize;

use crate::economy::{Current, FluidityOrder, FluidityRegime};
use crate::harness::RunLog;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub rank: usize,
    pub source: String,
    pub agent_name: String,
    pub fi_value: f64,
    pub mean_responsiveness: f64,
    pub order: FluidityOrder,
    pub regime: FluidityRegime,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub nc: u64,
    pub truncated: bool,
}

impl ReportRow {
    pub fn from_log(source: impl Into<String>, log: &RunLog) -> Self {
        Self {
            rank: 0,
            source: source.into(),
            agent_name: log.agent_name.clone(),
            fi_value: log.summary.fi_value,
            mean_responsiveness: log.summary.mean_responsiveness,
            order: log.order,
            regime: log.regime,
            i1: log.integrals.i1,
            i2: log.integrals.i2,
            i3: log.integrals.i3,
            nc: log.summary.nc,
            truncated: log.truncated,
        }
    }
}

fn ranking(a: &ReportRow, b: &ReportRow) -> Ordering {
    b.mean_responsiveness
        .total_cmp(&a.mean_responsiveness)
        .then_with(|| a.fi_value.abs().total_cmp(&b.fi_value.abs()))
        .then_with(|| a.agent_name.cmp(&b.agent_name))
        .then_with(|| a.source.cmp(&b.source))
}

/// Sorts rows into rank order and numbers them from 1. Rows equal on every
/// key keep their input order.
pub fn rank_rows(mut rows: Vec<ReportRow>) -> Vec<ReportRow> {
    rows.sort_by(ranking);
    for (i, row) in rows.iter_mut().enumerate() {
        row.rank = i + 1;
    }
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub snapshot: u64,
    pub time: f64,
    pub prefix_fi: f64,
    pub reserve: Current,
}

pub fn series(log: &RunLog) -> Vec<SeriesPoint> {
    log.snapshots
        .iter()
        .map(|s| SeriesPoint {
            snapshot: s.index,
            time: s.time,
            prefix_fi: s.prefix_fi,
            reserve: s.ledger.reserve,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

const HEADER: [&str; 12] = [
    "rank",
    "agent",
    "fi",
    "mean_responsiveness",
    "order",
    "regime",
    "i1",
    "i2",
    "i3",
    "nc",
    "truncated",
    "source",
];

fn cells(row: &ReportRow) -> [String; 12] {
    [
        row.rank.to_string(),
        row.agent_name.clone(),
        row.fi_value.to_string(),
        row.mean_responsiveness.to_string(),
        row.order.to_string(),
        row.regime.to_string(),
        row.i1.to_string(),
        row.i2.to_string(),
        row.i3.to_string(),
        row.nc.to_string(),
        row.truncated.to_string(),
        row.source.clone(),
    ]
}

fn csv_text<I, R>(records: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    for record in records {
        w.write_record(record).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is utf-8")
}

fn table_text(rows: &[ReportRow]) -> String {
    let body: Vec<[String; 12]> = rows.iter().map(cells).collect();
    let mut widths = HEADER.map(str::len);
    for r in &body {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cols: Vec<&str>| {
        let padded: Vec<String> = cols
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(HEADER.to_vec());
    for r in &body {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

fn series_csv(points: &[SeriesPoint]) -> String {
    let header = vec![
        "snapshot".to_string(),
        "time".to_string(),
        "prefix_fi".to_string(),
        "reserve".to_string(),
    ];
    let rows = points.iter().map(|p| {
        vec![
            p.snapshot.to_string(),
            p.time.to_string(),
            p.prefix_fi.to_string(),
            p.reserve.to_string(),
        ]
    });
    csv_text(std::iter::once(header).chain(rows))
}

pub fn render_rows(rows: &[ReportRow], format: Format) -> String {
    match format {
        Format::Table => table_text(rows),
        Format::Csv => csv_text(
            std::iter::once(
                HEADER
                    .to_vec()
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>(),
            )
            .chain(rows.iter().map(|r| cells(r).to_vec())),
        ),
        Format::Json => serde_json::to_string_pretty(rows).expect("rows serialize") + "\n",
    }
}

/// Per-run series as CSV text, suitable for writing to a file.
pub fn render_series(log: &RunLog) -> String {
    series_csv(&series(log))
}

#[derive(Serialize)]
struct JsonReport<'a> {
    rows: &'a [ReportRow],
    series: Vec<JsonSeries<'a>>,
}

#[derive(Serialize)]
struct JsonSeries<'a> {
    source: &'a str,
    points: Vec<SeriesPoint>,
}

/// The full score output: the ranked table followed by one series block per
/// run, in input order.
pub fn render_report(runs: &[(String, RunLog)], format: Format) -> String {
    let rows = rank_rows(
        runs.iter()
            .map(|(source, log)| ReportRow::from_log(source.clone(), log))
            .collect(),
    );
    match format {
        Format::Json => {
            let report = JsonReport {
                rows: &rows,
                series: runs
                    .iter()
                    .map(|(source, log)| JsonSeries {
                        source,
                        points: series(log),
                    })
                    .collect(),
            };
            serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
        }
        _ => {
            let mut out = render_rows(&rows, format);
            for (source, log) in runs {
                out.push_str(&format!("\n# series: {source}\n"));
                out.push_str(&render_series(log));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(name: &str, resp: f64, fi: f64) -> ReportRow {
        ReportRow {
            rank: 0,
            source: format!("{name}.json"),
            agent_name: name.into(),
            fi_value: fi,
            mean_responsiveness: resp,
            order: FluidityOrder::First,
            regime: FluidityRegime::SubOptimal,
            i1: 0.0,
            i2: 0.0,
            i3: 0.0,
            nc: 1,
            truncated: false,
        }
    }

    #[test]
    fn ranking_keys() {
        let ranked = rank_rows(vec![
            row("static", 0.0, 1.0),
            row("b", 0.5, -0.5),
            row("a", 0.5, 0.5),
            row("tracker", 1.0, 0.0),
            row("c", 0.5, 0.25),
        ]);
        let names: Vec<&str> = ranked.iter().map(|r| r.agent_name.as_str()).collect();
        assert_eq!(names, vec!["tracker", "c", "a", "b", "static"]);
        assert_eq!(
            ranked.iter().map(|r| r.rank).collect::<Vec<_>>(),
            vec![1, 2, 3, 4, 5]
        );
    }

    #[test]
    fn csv_and_table_have_a_header_and_one_line_per_row() {
        let rows = rank_rows(vec![row("x,y", 1.0, 0.0), row("z", 0.0, 1.0)]);
        let csv = render_rows(&rows, Format::Csv);
        assert!(csv.starts_with("rank,agent,fi,"));
        assert!(csv.contains("\"x,y\""));
        assert_eq!(csv.lines().count(), 3);
        let table = render_rows(&rows, Format::Table);
        assert_eq!(table.lines().count(), 3);
        assert!(table.lines().next().unwrap().starts_with("rank  agent"));
    }
}
