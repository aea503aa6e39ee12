//! Closed-loop trace CSV and per-frame decision export.
//!
//! A trace starts with two comment lines, `# mapless trace v1` and
//! `# scenario=<name> config=<hash>`, followed by a header row and one row
//! per tick in the column order of [`TRACE_COLUMNS`]. Empty cells mean
//! "none"; events are `;`-joined labels.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::planner::PlannerDecision;
use crate::simulator::{EventKind, SimRun, TraceRow};

pub const TRACE_FORMAT_VERSION: u32 = 1;

pub const TRACE_COLUMNS: [&str; 17] = [
    "step", "t", "x", "y", "heading", "v", "a", "phi", "station", "lateral", "source", "maneuver", "chosen", "cost",
    "candidates", "fallback", "events",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn trace_to_csv(scenario: &str, config_hash: &str, rows: &[TraceRow]) -> String {
    let mut out = format!("# mapless trace v{TRACE_FORMAT_VERSION}\n# scenario={scenario} config={config_hash}\n");
    out.push_str(&TRACE_COLUMNS.join(","));
    out.push('\n');
    for r in rows {
        let events: Vec<String> = r.events.iter().map(EventKind::label).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.step,
            r.t,
            r.x,
            r.y,
            r.heading,
            r.v,
            r.a,
            r.phi,
            r.station,
            r.lateral,
            r.source,
            r.maneuver,
            opt(r.chosen),
            opt(r.cost),
            r.candidates,
            r.fallback,
            events.join(";")
        );
    }
    out
}

/// Header fields of a parsed trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub scenario: String,
    pub config_hash: String,
    pub rows: Vec<TraceRow>,
}

fn field<T: std::str::FromStr>(cells: &[&str], i: usize, line: usize) -> Result<T> {
    cells[i]
        .parse()
        .map_err(|_| Error::Format(format!("trace line {line}: bad {} value {:?}", TRACE_COLUMNS[i], cells[i])))
}

fn opt_field<T: std::str::FromStr>(cells: &[&str], i: usize, line: usize) -> Result<Option<T>> {
    if cells[i].is_empty() { Ok(None) } else { field(cells, i, line).map(Some) }
}

pub fn trace_from_csv(text: &str) -> Result<TraceFile> {
    let mut lines = text.lines().enumerate();
    let version = lines.next().map(|(_, l)| l).unwrap_or_default();
    if version != format!("# mapless trace v{TRACE_FORMAT_VERSION}") {
        return Err(Error::Format(format!("unsupported trace header {version:?}")));
    }
    let meta = lines.next().map(|(_, l)| l).unwrap_or_default();
    let mut scenario = String::new();
    let mut config_hash = String::new();
    for kv in meta.trim_start_matches('#').split_whitespace() {
        match kv.split_once('=') {
            Some(("scenario", v)) => scenario = v.into(),
            Some(("config", v)) => config_hash = v.into(),
            _ => {}
        }
    }
    let header = lines.next().map(|(_, l)| l).unwrap_or_default();
    if header != TRACE_COLUMNS.join(",") {
        return Err(Error::Format(format!("unexpected trace columns {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, l) in lines {
        let n = i + 1;
        let c: Vec<&str> = l.split(',').collect();
        if c.len() != TRACE_COLUMNS.len() {
            return Err(Error::Format(format!("trace line {n}: expected {} cells, found {}", TRACE_COLUMNS.len(), c.len())));
        }
        let events = if c[16].is_empty() {
            Vec::new()
        } else {
            c[16]
                .split(';')
                .map(|e| EventKind::parse(e).ok_or_else(|| Error::Format(format!("trace line {n}: unknown event {e:?}"))))
                .collect::<Result<_>>()?
        };
        rows.push(TraceRow {
            step: field(&c, 0, n)?,
            t: field(&c, 1, n)?,
            x: field(&c, 2, n)?,
            y: field(&c, 3, n)?,
            heading: field(&c, 4, n)?,
            v: field(&c, 5, n)?,
            a: field(&c, 6, n)?,
            phi: field(&c, 7, n)?,
            station: field(&c, 8, n)?,
            lateral: field(&c, 9, n)?,
            source: c[10].into(),
            maneuver: c[11].into(),
            chosen: opt_field(&c, 12, n)?,
            cost: opt_field(&c, 13, n)?,
            candidates: field(&c, 14, n)?,
            fallback: field(&c, 15, n)?,
            events,
        });
    }
    Ok(TraceFile { scenario, config_hash, rows })
}

#[derive(Serialize)]
struct DecisionLine<'a> {
    scenario: &'a str,
    config: &'a str,
    frame: usize,
    t: f64,
    #[serde(flatten)]
    decision: &'a PlannerDecision,
}

/// One JSON object per planning frame: the ranked candidates with their
/// costs and safety verdicts, the chosen rank and the fallback flag.
pub fn decisions_to_jsonl(run: &SimRun, config_hash: &str) -> Result<String> {
    let mut out = String::new();
    for (k, d) in run.decisions.iter().enumerate() {
        let line = DecisionLine {
            scenario: &run.scenario,
            config: config_hash,
            frame: k,
            t: run.rows.get(k).map_or(0.0, |r| r.t),
            decision: d,
        };
        out.push_str(&serde_json::to_string(&line)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(step: usize) -> TraceRow {
        TraceRow {
            step,
            t: step as f64 * 0.1,
            x: 0.1 + step as f64 / 3.0,
            y: -1e-17,
            heading: std::f64::consts::PI / 7.0,
            v: 9.999999999,
            a: -0.5,
            phi: 0.01,
            station: 2.0,
            lateral: 0.0,
            source: if step == 0 { String::new() } else { "lattice".into() },
            maneuver: "lane_keep".into(),
            chosen: (step > 0).then_some(3),
            cost: (step > 0).then_some(12.25),
            candidates: 40,
            fallback: step == 2,
            events: if step == 2 { vec![EventKind::Fallback, EventKind::Collision("lead".into())] } else { vec![] },
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rows: Vec<_> = (0..4).map(row).collect();
        let text = trace_to_csv("demo", "0123abcd", &rows);
        let back = trace_from_csv(&text).unwrap();
        assert_eq!(back.rows, rows);
        assert_eq!(back.scenario, "demo");
        assert_eq!(back.config_hash, "0123abcd");
    }

    #[test]
    fn column_order_is_fixed() {
        let text = trace_to_csv("demo", "h", &[]);
        assert_eq!(text.lines().nth(2).unwrap(), "step,t,x,y,heading,v,a,phi,station,lateral,source,maneuver,chosen,cost,candidates,fallback,events");
    }

    #[test]
    fn unknown_version_is_rejected() {
        assert!(matches!(trace_from_csv("# mapless trace v9\n"), Err(Error::Format(_))));
    }
}
