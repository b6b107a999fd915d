//! Markdown and CSV renderings of [`Metrics`] rows.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::Metrics;

/// Accuracy per depth bucket plus an "All" column, one row per run.
pub fn metrics_to_markdown(rows: &[Metrics]) -> String {
    let depths: BTreeSet<u32> = rows.iter().flat_map(|m| m.per_bucket.keys().copied()).collect();
    let mut out = String::from("| run | domain | algorithm |");
    for d in &depths {
        out.push_str(&format!(" depth {d} |"));
    }
    out.push_str(" All | mean expansions | mean plan length | faults |\n|---|---|---|");
    for _ in &depths {
        out.push_str("---|");
    }
    out.push_str("---|---|---|---|\n");
    for m in rows {
        out.push_str(&format!("| {} | {} | {} |", m.label, m.domain, m.algorithm));
        for d in &depths {
            match m.per_bucket.get(d) {
                Some(a) => out.push_str(&format!(" {:.1} |", a * 100.0)),
                None => out.push_str(" - |"),
            }
        }
        out.push_str(&format!(
            " {:.1} | {:.1} | {:.2} | {} |\n",
            m.accuracy * 100.0,
            m.mean_expansions,
            m.mean_plan_length,
            m.heuristic_faults
        ));
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    label: String,
    domain: String,
    algorithm: String,
    instances: usize,
    accuracy: f64,
    per_bucket: String,
    bucket_counts: String,
    mean_expansions: f64,
    mean_plan_length: f64,
    heuristic_faults: usize,
    wall_time_ms: f64,
}

fn join_map<V: ToString>(m: &BTreeMap<u32, V>) -> String {
    m.iter().map(|(k, v)| format!("{k}:{}", v.to_string())).collect::<Vec<_>>().join(";")
}

fn split_map<V: std::str::FromStr>(s: &str) -> Result<BTreeMap<u32, V>, String> {
    if s.is_empty() {
        return Ok(BTreeMap::new());
    }
    s.split(';')
        .map(|kv| {
            let (k, v) = kv.split_once(':').ok_or_else(|| format!("bad bucket entry {kv:?}"))?;
            let k = k.parse().map_err(|_| format!("bad bucket depth {k:?}"))?;
            let v = v.parse().map_err(|_| format!("bad bucket value {v:?}"))?;
            Ok((k, v))
        })
        .collect()
}

pub fn metrics_to_csv(rows: &[Metrics]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for m in rows {
        w.serialize(CsvRow {
            label: m.label.clone(),
            domain: m.domain.to_string(),
            algorithm: m.algorithm.to_string(),
            instances: m.instances,
            accuracy: m.accuracy,
            per_bucket: join_map(&m.per_bucket),
            bucket_counts: join_map(&m.bucket_counts),
            mean_expansions: m.mean_expansions,
            mean_plan_length: m.mean_plan_length,
            heuristic_faults: m.heuristic_faults,
            wall_time_ms: m.wall_time_ms,
        })
        .expect("writing to memory cannot fail");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

pub fn metrics_from_csv(text: &str) -> Result<Vec<Metrics>, String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in r.deserialize::<CsvRow>() {
        let row = row.map_err(|e| e.to_string())?;
        out.push(Metrics {
            label: row.label,
            domain: row.domain.parse().map_err(|e| format!("{e}"))?,
            algorithm: row.algorithm.parse()?,
            instances: row.instances,
            accuracy: row.accuracy,
            per_bucket: split_map(&row.per_bucket)?,
            bucket_counts: split_map(&row.bucket_counts)?,
            mean_expansions: row.mean_expansions,
            mean_plan_length: row.mean_plan_length,
            heuristic_faults: row.heuristic_faults,
            wall_time_ms: row.wall_time_ms,
        });
    }
    Ok(out)
}
