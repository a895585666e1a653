//! Frozen CLI outputs. Each golden file must be reproduced byte for byte,
//! and its numbers must agree with a recomputation that does not go through
//! the CLI. Set `CVQKD_UPDATE_GOLDEN=1` to rewrite the files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use cvqkd_core::channels::{satground_transmittance, SatGroundLink};
use cvqkd_core::netgraph::{brute_force_widest_path, snapshot_capacities};
use cvqkd_core::passes::PassProfile;
use cvqkd_core::skr::{skr_finite, ProtocolParams, SecurityParams};
use cvqkd_sim::csvio;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn scenario(name: &str) -> PathBuf {
    crate_dir().join("fixtures/scenarios").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_cvqkd")).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn check_golden(file: &str, actual: &str) {
    let path = crate_dir().join("tests/golden").join(file);
    if std::env::var_os("CVQKD_UPDATE_GOLDEN").is_some() {
        fs::write(&path, actual).unwrap();
    }
    let expected = fs::read_to_string(&path).unwrap();
    assert!(expected == actual, "{file} differs from the CLI output");
}

/// Printed values carry 9 significant digits.
fn close(printed: f64, exact: f64) -> bool {
    printed == exact || (printed - exact).abs() <= 6e-9 * exact.abs()
}

fn reference_protocol() -> ProtocolParams {
    ProtocolParams {
        modulation_variance: 5.0,
        excess_noise: 0.03,
        ..ProtocolParams::default()
    }
}

#[test]
fn fibre_sweep_golden() {
    let out = run(&["skr", "--scenario", scenario("fibre_md").to_str().unwrap()]);
    check_golden("skr_fibre_md.csv", &out);
    let rows = csvio::read_skr(&out).unwrap();
    assert_eq!(rows.len(), 301);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.x, i as f64);
        let t = 10f64.powf(-0.02 * i as f64);
        assert!(close(r.transmittance, t), "x = {i}");
        let k = skr_finite(&reference_protocol(), &SecurityParams::default(), t, None).unwrap();
        assert!(close(r.skr_bps, k.skr), "x = {i}: {} vs {}", r.skr_bps, k.skr);
        assert!(close(r.snr_db, k.snr_db) && close(r.beta, k.beta) && close(r.fer, k.fer));
    }
    // The MD efficiency fit rises from 0 to 1 as the SNR falls, so the rate
    // climbs over the first tens of km. Once the efficiency saturates and
    // until the frame error cliff, more fibre never helps.
    let climbing = rows.windows(2).filter(|w| w[1].skr_bps > w[0].skr_bps).count();
    assert!(climbing > 0);
    let saturated: Vec<_> = rows.iter().filter(|r| r.beta == 1.0 && r.fer < 1.0).collect();
    assert!(saturated.len() > 10);
    for w in saturated.windows(2) {
        assert!(w[1].skr_bps <= w[0].skr_bps, "x = {}", w[1].x);
    }
}

/// Key bits over the pass, integrating each sample interval at the
/// elevation its midpoint falls in.
fn pass_oracle(pass: &Path, link: fn(f64, f64) -> SatGroundLink) -> (f64, f64) {
    let profile = PassProfile::parse_csv(&fs::read_to_string(pass).unwrap(), 408.0, "g").unwrap();
    let (mut bits, mut usable, mut total) = (0.0, 0.0, 0.0);
    for w in profile.samples().windows(2) {
        let dt = w[1].time_s - w[0].time_s;
        let mid = 0.5 * (w[0].elevation_deg + w[1].elevation_deg);
        let center = (mid.floor().min(89.0) + 0.5).min(90.0);
        let t = satground_transmittance(&link(center, 408.0), 1550e-9)
            .unwrap()
            .transmittance;
        let skr = skr_finite(&reference_protocol(), &SecurityParams::default(), t, None)
            .unwrap()
            .skr;
        total += dt;
        if skr > 0.0 {
            bits += skr * dt;
            usable += dt;
        }
    }
    (bits, usable / total)
}

fn check_capacity(name: &str, pass: &str, link: fn(f64, f64) -> SatGroundLink) -> f64 {
    let out = run(&["capacity", "--scenario", scenario(name).to_str().unwrap()]);
    check_golden(&format!("capacity_{name}.csv"), &out);
    let report = csvio::read_capacity(&out).unwrap();
    let (bits, usable) = pass_oracle(&crate_dir().join("fixtures/passes").join(pass), link);
    assert!(
        (report.total_bits - bits).abs() <= 1e-8 * bits.max(1.0),
        "{name}: {} vs {bits}",
        report.total_bits
    );
    assert!(close(report.usable_fraction, usable), "{name}");
    let summed: f64 = report.bins.iter().map(|b| b.capacity_bits).sum();
    assert!((summed - report.total_bits).abs() <= 1e-8 * report.total_bits.max(1.0));
    report.total_bits
}

#[test]
fn iss_pass_golden() {
    let bits = check_capacity("iss_downlink", "iss_like.csv", SatGroundLink::downlink);
    assert!(bits > 0.0);
}

#[test]
fn dsn_pass_goldens_keep_their_ordering() {
    let up = check_capacity("dsn_madrid_uplink", "madrid_uplink.csv", SatGroundLink::uplink);
    let canberra = check_capacity(
        "dsn_canberra_downlink",
        "canberra_downlink.csv",
        SatGroundLink::downlink,
    );
    let goldstone = check_capacity(
        "dsn_goldstone_downlink",
        "goldstone_downlink.csv",
        SatGroundLink::downlink,
    );
    assert!(
        0.0 < up && up < canberra && canberra < goldstone,
        "{up} {canberra} {goldstone}"
    );
}

#[test]
fn chain_golden() {
    let out = run(&[
        "chain",
        "--scenario",
        scenario("chain_madrid_goldstone").to_str().unwrap(),
    ]);
    check_golden("chain_madrid_goldstone.csv", &out);
    let r = csvio::read_report(&out).unwrap();
    let phi = 2.0 * (1000.0f64 / (2.0 * (6371.0 + 408.0))).asin().to_degrees();
    assert!(close(r.number("central_angle_deg").unwrap(), phi));
    assert_eq!(r.get("min_links"), Some("9"));
    assert_eq!(r.get("max_links"), Some("10"));
}

#[test]
fn route_golden() {
    let out = run(&["route", "--scenario", scenario("six_node_route").to_str().unwrap()]);
    check_golden("route_six_node.csv", &out);
    let r = csvio::read_report(&out).unwrap();
    let path: Vec<&str> = std::iter::once(r.hops[0].from.as_str())
        .chain(r.hops.iter().map(|h| h.to.as_str()))
        .collect();
    assert_eq!(path, ["1", "4", "3", "6", "5"]);
    assert_eq!(r.number("bottleneck_bits").unwrap(), 30.0);

    // Exhaustive search over every simple path, per segment.
    let sc = cvqkd_sim::scenario::load(&scenario("six_node_route")).unwrap();
    let route = sc.route.as_ref().unwrap();
    let net = route.build_network(0).unwrap();
    let g = snapshot_capacities(&net, route.window.start_s, route.window.end_s).unwrap();
    let first = brute_force_widest_path(&g, "1", "3").unwrap().unwrap();
    let second = brute_force_widest_path(&g, "3", "5").unwrap().unwrap();
    let mut oracle = first.nodes.clone();
    oracle.extend(second.nodes[1..].iter().cloned());
    assert_eq!(path, oracle);
    let caps: Vec<f64> = first
        .hop_capacities
        .iter()
        .chain(&second.hop_capacities)
        .copied()
        .collect();
    assert_eq!(r.hops.iter().map(|h| h.capacity_bits).collect::<Vec<_>>(), caps);
}
