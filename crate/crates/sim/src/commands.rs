//! The four verbs, as library functions returning in-memory reports.

use std::fs;
use std::path::Path;

use cvqkd_core::channels::{
    fibre_transmittance, intersat_transmittance, satground_transmittance, FibreLink, InterSatelliteLink, UnderwaterLink,
};
use cvqkd_core::netgraph::{
    multi_target_route, snapshot_capacities, CapacityFn, Link, MultiRouteOutcome, Network, Node, NodeKind, Objective,
    PlannedRoute,
};
use cvqkd_core::passes::{
    ground_central_angle, link_capacity_pass_binned, plan_intersat_chain, ChainPlan, PassProfile,
};
use cvqkd_core::skr::skr_finite;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};
use crate::scenario::{RandomNetwork, Scenario, SweepChannel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkrRow {
    pub x: f64,
    pub transmittance: f64,
    pub snr_db: f64,
    pub beta: f64,
    pub fer: f64,
    pub skr_bps: f64,
}

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T> {
    s.as_ref()
        .ok_or_else(|| CliError::Invalid(format!("the scenario has no `{name}` section")))
}

pub fn transmittance_at(channel: &SweepChannel, x: f64) -> cvqkd_core::Result<f64> {
    match channel {
        SweepChannel::Fibre { attenuation_db_per_km } => fibre_transmittance(&FibreLink {
            length_km: x,
            attenuation_db_per_km: *attenuation_db_per_km,
        }),
        SweepChannel::Underwater { water } => UnderwaterLink {
            length_m: x,
            extinction: water.extinction(),
        }
        .transmittance(),
        SweepChannel::InterSatellite {
            receiver_radius_m,
            beam_waist_m,
            wavelength_m,
        } => intersat_transmittance(&InterSatelliteLink {
            distance_m: x * 1e3,
            receiver_radius_m: *receiver_radius_m,
            beam_waist_m: *beam_waist_m,
            wavelength_m: *wavelength_m,
        }),
        SweepChannel::SatelliteGround(spec) => {
            Ok(satground_transmittance(&spec.link(x), spec.wavelength_m)?.transmittance)
        }
    }
}

pub fn run_skr(scenario: &Scenario) -> Result<Vec<SkrRow>> {
    let skr = section(&scenario.skr, "skr")?;
    skr.grid
        .points()?
        .into_iter()
        .map(|x| {
            let ctx = || format!("skr at x = {x}");
            let t = transmittance_at(&skr.channel, x).map_err(CliError::compute(ctx()))?;
            let r = skr_finite(&scenario.protocol, &scenario.security, t, None).map_err(CliError::compute(ctx()))?;
            Ok(SkrRow {
                x,
                transmittance: t,
                snr_db: r.snr_db,
                beta: r.beta,
                fer: r.fer,
                skr_bps: r.skr,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityRow {
    /// Bin centre, where the key rate is evaluated.
    pub bin_deg: f64,
    pub dwell_s: f64,
    pub skr_bps: f64,
    pub capacity_bits: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport {
    pub bins: Vec<CapacityRow>,
    pub total_bits: f64,
    pub usable_fraction: f64,
}

pub fn load_pass(path: &Path, altitude_km: f64, ground_node: &str) -> Result<PassProfile> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    PassProfile::parse_csv(&text, altitude_km, ground_node).map_err(CliError::invalid(path.display().to_string()))
}

/// `pass_override` is taken relative to the working directory, the
/// scenario's own reference relative to the scenario file.
pub fn run_capacity(scenario: &Scenario, pass_override: Option<&Path>) -> Result<CapacityReport> {
    let cap = section(&scenario.capacity, "capacity")?;
    let path = match (pass_override, &cap.pass) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => scenario.base_dir.join(p),
        (None, None) => {
            return Err(CliError::Invalid(
                "capacity: no pass file, set capacity.pass or --pass".into(),
            ))
        }
    };
    let profile = load_pass(&path, cap.link.satellite_altitude_km, &cap.ground_node)?;
    let result = link_capacity_pass_binned(
        &profile,
        &cap.link.link(90.0),
        cap.link.wavelength_m,
        &scenario.protocol,
        &scenario.security,
        cap.bin_deg,
    )
    .map_err(CliError::compute(format!("capacity over {}", path.display())))?;
    Ok(CapacityReport {
        bins: result
            .bins
            .iter()
            .map(|b| CapacityRow {
                bin_deg: b.center_deg,
                dwell_s: b.dwell_s,
                skr_bps: b.skr_bps,
                capacity_bits: b.capacity_bits,
            })
            .collect(),
        total_bits: result.total_bits,
        usable_fraction: result.usable_fraction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainReport {
    pub plan: ChainPlan,
    pub link_skr_bps: f64,
}

pub fn run_chain(scenario: &Scenario) -> Result<ChainReport> {
    let chain = section(&scenario.chain, "chain")?;
    let theta = match (chain.ground_angle_deg, chain.endpoints) {
        (Some(t), _) => t,
        (None, Some([a, b])) => ground_central_angle(a.lat_deg, a.lon_deg, b.lat_deg, b.lon_deg)
            .map_err(CliError::invalid("chain.endpoints"))?,
        (None, None) => unreachable!("validated"),
    };
    let link_skr_bps = match (chain.link_skr_bps, &chain.link_optics) {
        (Some(r), _) => r,
        (None, Some(optics)) => {
            let link: InterSatelliteLink = chain.intersat_link(optics);
            let t = intersat_transmittance(&link).map_err(CliError::compute("inter-satellite link"))?;
            skr_finite(&scenario.protocol, &scenario.security, t, None)
                .map_err(CliError::compute("inter-satellite link"))?
                .skr
        }
        (None, None) => unreachable!("validated"),
    };
    let plan = plan_intersat_chain(
        theta,
        chain.altitude_km,
        chain.link_km,
        chain.required_capacity_bits,
        link_skr_bps,
    )
    .map_err(CliError::compute("chain"))?;
    Ok(ChainReport { plan, link_skr_bps })
}

#[derive(Debug, Clone, PartialEq)]
pub enum RouteOutcome {
    Routed(PlannedRoute),
    Unreachable { from: String, to: String },
    UntrustedRelay { from: String, to: String, node: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteReport {
    /// Source followed by the targets, in visiting order.
    pub targets: Vec<String>,
    pub key_size_bits: f64,
    pub objective: Objective,
    pub outcome: RouteOutcome,
}

impl RouteReport {
    pub fn succeeded(&self) -> bool {
        matches!(&self.outcome, RouteOutcome::Routed(p) if p.verdict.feasible)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RouteArgs {
    pub source: Option<String>,
    pub targets: Option<Vec<String>>,
    pub key_size_bits: Option<f64>,
    pub seed: u64,
}

pub fn run_route(scenario: &Scenario, args: &RouteArgs) -> Result<RouteReport> {
    let route = section(&scenario.route, "route")?;
    let source = args
        .source
        .clone()
        .or_else(|| route.source.clone())
        .ok_or_else(|| CliError::Invalid("route: no source, set route.source or --source".into()))?;
    let targets = args
        .targets
        .clone()
        .or_else(|| route.targets.clone())
        .filter(|t| !t.is_empty())
        .ok_or_else(|| CliError::Invalid("route: no targets, set route.targets or --targets".into()))?;
    let key_size_bits = args
        .key_size_bits
        .or(route.key_size_bits)
        .ok_or_else(|| CliError::Invalid("route: no key size, set route.key_size_bits or --key-size".into()))?;
    if !(key_size_bits > 0.0) {
        return Err(CliError::Invalid(format!("key size {key_size_bits} must be positive")));
    }
    let network = route.build_network(args.seed)?;
    let mut all = vec![source];
    all.extend(targets);
    for id in &all {
        if !network.nodes().iter().any(|n| &n.id == id) {
            return Err(CliError::Invalid(format!("route: unknown node `{id}`")));
        }
    }
    let graph = snapshot_capacities(&network, route.window.start_s, route.window.end_s)
        .map_err(CliError::compute("snapshot"))?;
    let refs: Vec<&str> = all.iter().map(String::as_str).collect();
    let outcome = match multi_target_route(&graph, &refs, key_size_bits, route.objective) {
        Ok(MultiRouteOutcome::Routed(p)) => RouteOutcome::Routed(p),
        Ok(MultiRouteOutcome::Unreachable { from, to }) => RouteOutcome::Unreachable { from, to },
        Err(cvqkd_core::Error::UntrustedRelay { from, to, node }) => RouteOutcome::UntrustedRelay { from, to, node },
        Err(e) => return Err(CliError::compute("route")(e)),
    };
    Ok(RouteReport {
        targets: all,
        key_size_bits,
        objective: route.objective,
        outcome,
    })
}

/// Ground stations `n0`, `n1`, … joined by fibre links of random constant
/// capacity.
pub fn random_network(spec: &RandomNetwork, seed: u64) -> Result<Network> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes: Vec<Node> = (0..spec.nodes)
        .map(|i| {
            let mut n = Node::fixed(format!("n{i}"), NodeKind::Ogs, 0.0, i as f64, 0.0);
            n.trusted = !rng.gen_bool(spec.untrusted_probability);
            n
        })
        .collect();
    let mut links = Vec::new();
    for i in 0..spec.nodes {
        for j in i + 1..spec.nodes {
            if rng.gen_bool(spec.edge_probability) {
                let bits = rng.gen_range(0.0..spec.max_bits);
                links.push(Link::new(
                    format!("n{i}-n{j}"),
                    format!("n{i}"),
                    format!("n{j}"),
                    CapacityFn::Constant { bits },
                ));
            }
        }
    }
    Network::new(nodes, links).map_err(CliError::invalid("route.random_network"))
}
