//! Writers and readers for every file the CLI emits.
//!
//! `skr` writes one table. `capacity` writes the per-bin table followed by a
//! two-column summary table. `chain` and `route` write a `key,value` table;
//! `route` appends a per-hop table. Each table starts with its header row.

use cvqkd_core::netgraph::Objective;

use crate::commands::{CapacityReport, CapacityRow, ChainReport, RouteOutcome, RouteReport, SkrRow};
use crate::error::{CliError, Result};
use crate::format::{flag, num};

pub const SKR_HEADER: [&str; 6] = ["x", "transmittance", "snr_db", "beta", "fer", "skr_bps"];
pub const CAPACITY_HEADER: [&str; 4] = ["bin_deg", "dwell_s", "skr_bps", "capacity_bits"];
pub const SUMMARY_HEADER: [&str; 2] = ["total_bits", "usable_fraction"];
pub const REPORT_HEADER: [&str; 2] = ["key", "value"];
pub const HOP_HEADER: [&str; 4] = ["hop", "from", "to", "capacity_bits"];

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .flexible(true)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory writer");
    String::from_utf8(bytes).expect("fields are UTF-8")
}

fn records(text: &str) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    Ok(r.records().collect::<std::result::Result<_, _>>()?)
}

fn is_header(rec: &csv::StringRecord, header: &[&str]) -> bool {
    rec.iter().eq(header.iter().copied())
}

fn field(rec: &csv::StringRecord, i: usize) -> Result<&str> {
    rec.get(i)
        .ok_or_else(|| CliError::Csv(format!("line {}: missing column {}", line(rec), i + 1)))
}

fn float(rec: &csv::StringRecord, i: usize) -> Result<f64> {
    let s = field(rec, i)?;
    s.parse()
        .map_err(|_| CliError::Csv(format!("line {}: `{s}` is not a number", line(rec))))
}

fn line(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn expect_width(rec: &csv::StringRecord, n: usize) -> Result<()> {
    if rec.len() != n {
        return Err(CliError::Csv(format!(
            "line {}: expected {n} columns, found {}",
            line(rec),
            rec.len()
        )));
    }
    Ok(())
}

fn expect_header(rec: Option<&csv::StringRecord>, header: &[&str]) -> Result<()> {
    match rec {
        Some(r) if is_header(r, header) => Ok(()),
        _ => Err(CliError::Csv(format!("expected header `{}`", header.join(",")))),
    }
}

pub fn write_skr(rows: &[SkrRow]) -> Result<String> {
    let mut w = writer();
    w.write_record(SKR_HEADER)?;
    for r in rows {
        w.write_record([
            num(r.x),
            num(r.transmittance),
            num(r.snr_db),
            num(r.beta),
            num(r.fer),
            num(r.skr_bps),
        ])?;
    }
    Ok(finish(w))
}

pub fn read_skr(text: &str) -> Result<Vec<SkrRow>> {
    let recs = records(text)?;
    expect_header(recs.first(), &SKR_HEADER)?;
    recs[1..]
        .iter()
        .map(|r| {
            expect_width(r, 6)?;
            Ok(SkrRow {
                x: float(r, 0)?,
                transmittance: float(r, 1)?,
                snr_db: float(r, 2)?,
                beta: float(r, 3)?,
                fer: float(r, 4)?,
                skr_bps: float(r, 5)?,
            })
        })
        .collect()
}

pub fn write_capacity(report: &CapacityReport) -> Result<String> {
    let mut w = writer();
    w.write_record(CAPACITY_HEADER)?;
    for b in &report.bins {
        w.write_record([num(b.bin_deg), num(b.dwell_s), num(b.skr_bps), num(b.capacity_bits)])?;
    }
    w.write_record(SUMMARY_HEADER)?;
    w.write_record([num(report.total_bits), num(report.usable_fraction)])?;
    Ok(finish(w))
}

pub fn read_capacity(text: &str) -> Result<CapacityReport> {
    let recs = records(text)?;
    expect_header(recs.first(), &CAPACITY_HEADER)?;
    let split = recs
        .iter()
        .position(|r| is_header(r, &SUMMARY_HEADER))
        .ok_or_else(|| CliError::Csv("missing summary table".into()))?;
    let bins = recs[1..split]
        .iter()
        .map(|r| {
            expect_width(r, 4)?;
            Ok(CapacityRow {
                bin_deg: float(r, 0)?,
                dwell_s: float(r, 1)?,
                skr_bps: float(r, 2)?,
                capacity_bits: float(r, 3)?,
            })
        })
        .collect::<Result<_>>()?;
    let [summary] = &recs[split + 1..] else {
        return Err(CliError::Csv("the summary table needs exactly one row".into()));
    };
    expect_width(summary, 2)?;
    Ok(CapacityReport {
        bins,
        total_bits: float(summary, 0)?,
        usable_fraction: float(summary, 1)?,
    })
}

pub fn write_chain(report: &ChainReport) -> Result<String> {
    let p = &report.plan;
    let mut w = writer();
    w.write_record(REPORT_HEADER)?;
    let rows = [
        ("ground_angle_deg", num(p.ground_angle_deg)),
        ("altitude_km", num(p.altitude_km)),
        ("link_km", num(p.link_km)),
        ("link_skr_bps", num(report.link_skr_bps)),
        ("central_angle_deg", num(p.central_angle_deg)),
        ("min_links", p.min_links.to_string()),
        ("max_links", p.max_links.to_string()),
        ("min_satellites", p.min_satellites.to_string()),
        ("max_satellites", p.max_satellites.to_string()),
        ("min_dwell_s", num(p.min_dwell_s)),
        ("min_chord_altitude_km", num(p.min_chord_altitude_km)),
        ("valid", flag(p.valid).to_string()),
    ];
    for (k, v) in rows {
        w.write_record([k, v.as_str()])?;
    }
    Ok(finish(w))
}

fn objective_name(o: Objective) -> &'static str {
    match o {
        Objective::WidestPath => "widest_path",
        Objective::FewestHops => "fewest_hops",
    }
}

fn opt_index(i: Option<usize>) -> String {
    i.map_or_else(|| "none".to_string(), |i| (i + 1).to_string())
}

/// Hop numbers in the report are 1-based.
pub fn write_route(report: &RouteReport) -> Result<String> {
    let mut w = writer();
    w.write_record(REPORT_HEADER)?;
    let mut kv = |k: &str, v: String| w.write_record([k, v.as_str()]);
    kv("targets", report.targets.join(";"))?;
    kv("objective", objective_name(report.objective).to_string())?;
    kv("key_size_bits", num(report.key_size_bits))?;
    let mut hops = Vec::new();
    match &report.outcome {
        RouteOutcome::Routed(plan) => {
            let v = &plan.verdict;
            let failed: Vec<&str> = [(!v.no_bottleneck, "condition_1"), (!v.exceeds_key, "condition_2")]
                .into_iter()
                .filter_map(|(f, name)| f.then_some(name))
                .collect();
            kv("status", if v.feasible { "feasible" } else { "infeasible" }.to_string())?;
            kv("hops", plan.route.hops().to_string())?;
            kv(
                "bottleneck_bits",
                plan.route.bottleneck().map_or_else(|| "none".to_string(), num),
            )?;
            kv("condition_1_no_bottleneck", flag(v.no_bottleneck).to_string())?;
            kv("condition_2_exceeds_key", flag(v.exceeds_key).to_string())?;
            kv(
                "failed_conditions",
                if failed.is_empty() {
                    "none".to_string()
                } else {
                    failed.join(";")
                },
            )?;
            kv("first_bottleneck_hop", opt_index(v.first_bottleneck_hop))?;
            kv("first_short_hop", opt_index(v.first_short_hop))?;
            kv(
                "target_positions",
                plan.target_positions
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(";"),
            )?;
            for (i, c) in plan.route.hop_capacities.iter().enumerate() {
                hops.push([
                    (i + 1).to_string(),
                    plan.route.nodes[i].clone(),
                    plan.route.nodes[i + 1].clone(),
                    num(*c),
                ]);
            }
        }
        RouteOutcome::Unreachable { from, to } => {
            kv("status", "unreachable".to_string())?;
            kv("unreachable_from", from.clone())?;
            kv("unreachable_to", to.clone())?;
        }
        RouteOutcome::UntrustedRelay { from, to, node } => {
            kv("status", "untrusted_relay".to_string())?;
            kv("unreachable_from", from.clone())?;
            kv("unreachable_to", to.clone())?;
            kv("untrusted_node", node.clone())?;
        }
    }
    if !hops.is_empty() {
        w.write_record(HOP_HEADER)?;
        for h in hops {
            w.write_record(h)?;
        }
    }
    Ok(finish(w))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HopRow {
    pub hop: usize,
    pub from: String,
    pub to: String,
    pub capacity_bits: f64,
}

/// A `key,value` report with an optional hop table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub entries: Vec<(String, String)>,
    pub hops: Vec<HopRow>,
}

impl Report {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn number(&self, key: &str) -> Result<f64> {
        let v = self
            .get(key)
            .ok_or_else(|| CliError::Csv(format!("missing key `{key}`")))?;
        v.parse()
            .map_err(|_| CliError::Csv(format!("`{key}` = `{v}` is not a number")))
    }
}

pub fn read_report(text: &str) -> Result<Report> {
    let recs = records(text)?;
    expect_header(recs.first(), &REPORT_HEADER)?;
    let split = recs
        .iter()
        .position(|r| is_header(r, &HOP_HEADER))
        .unwrap_or(recs.len());
    let entries = recs[1..split]
        .iter()
        .map(|r| {
            expect_width(r, 2)?;
            Ok((field(r, 0)?.to_string(), field(r, 1)?.to_string()))
        })
        .collect::<Result<_>>()?;
    let hops = recs[(split + 1).min(recs.len())..]
        .iter()
        .map(|r| {
            expect_width(r, 4)?;
            Ok(HopRow {
                hop: field(r, 0)?
                    .parse()
                    .map_err(|_| CliError::Csv(format!("line {}: bad hop number", line(r))))?,
                from: field(r, 1)?.to_string(),
                to: field(r, 2)?.to_string(),
                capacity_bits: float(r, 3)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Report { entries, hops })
}
