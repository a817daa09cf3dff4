use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use capwave::analytic::{triad_elliptic_params, TriadInvariants};
use capwave::clustering::{build_clusters, ClusterGraph};
use capwave::dispersion::FluidParams;
use capwave::dynamics::{
    build_system, from_polar, integrate_opts, measure_period, IntegrateOptions,
};
use capwave::search::{enumerate_triads, Triad};
use capwave::Complex64;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output;
use crate::validate::{self, Fault};

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => match io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Io {
                path: "<stdout>".into(),
                source: e,
            }),
            _ => Ok(()),
        },
    }
}

fn triads(cfg: &RunConfig) -> Result<Vec<Triad>, CliError> {
    let ts = enumerate_triads(cfg.kmax, FluidParams::new(cfg.sigma)?)?;
    log::info!("{} triads for kmax = {}", ts.len(), cfg.kmax);
    Ok(ts)
}

/// Triad table, sorted by generating vorticity.
pub fn run_search(cfg: &RunConfig) -> Result<(), CliError> {
    let ts = triads(cfg)?;
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => output::triad_table(&ts, &cfg.header_lines()),
        Format::Json => output::triads_json(&ts, cfg.sigma, cfg.kmax),
        Format::Dot => return Err(CliError::Usage("search writes csv or json".into())),
    };
    emit(cfg.out.as_deref(), &text)
}

/// Cluster JSON or DOT, plus one summary line per multi-triad cluster on `report`.
pub fn run_cluster(cfg: &RunConfig, report: &mut dyn Write) -> Result<(), CliError> {
    let ts = triads(cfg)?;
    let cs = build_clusters(&ts, cfg.epsilon)?;
    let io_err = |source| CliError::Io {
        path: "<report>".into(),
        source,
    };
    for (id, c) in cs.iter().enumerate().filter(|(_, c)| !c.is_isolated()) {
        writeln!(report, "{}", output::cluster_summary(id, c)).map_err(io_err)?;
    }
    let isolated = cs.iter().filter(|c| c.is_isolated()).count();
    writeln!(report, "{isolated} isolated triads").map_err(io_err)?;
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => output::clusters_json(&cs, cfg.epsilon, cfg.sigma, cfg.kmax),
        Format::Dot => match cfg.cluster_id {
            Some(id) => output::clusters_dot([select(&cs, id)?], &cfg.header_lines()),
            None => {
                output::clusters_dot(cs.iter().filter(|c| !c.is_isolated()), &cfg.header_lines())
            }
        },
        Format::Csv => return Err(CliError::Usage("cluster writes json or dot".into())),
    };
    emit(cfg.out.as_deref(), &text)
}

fn select(cs: &[ClusterGraph], id: usize) -> Result<&ClusterGraph, CliError> {
    cs.get(id).ok_or(CliError::NoSuchCluster {
        id,
        count: cs.len(),
    })
}

/// The cluster to simulate: explicit `(k1, k2)` pairs, or `cluster_id` at the configured ε.
pub fn select_cluster(cfg: &RunConfig, pairs: &[(i64, i64)]) -> Result<ClusterGraph, CliError> {
    let p = FluidParams::new(cfg.sigma)?;
    if !pairs.is_empty() {
        let ts = pairs
            .iter()
            .map(|&(a, b)| Triad::new(a, b, p))
            .collect::<capwave::Result<Vec<_>>>()?;
        return Ok(ClusterGraph::from_triads(&ts)?);
    }
    let id = cfg
        .cluster_id
        .ok_or_else(|| CliError::Usage("select a cluster with --cluster-id or --triad".into()))?;
    let ts = triads(cfg)?;
    let cs = build_clusters(&ts, cfg.epsilon)?;
    Ok(select(&cs, id)?.clone())
}

/// Integrate the selected cluster and write its trajectory; drift, phase and
/// period go to `report`.
pub fn run_simulate(
    cfg: &RunConfig,
    pairs: &[(i64, i64)],
    report: &mut dyn Write,
) -> Result<(), CliError> {
    let cluster = select_cluster(cfg, pairs)?;
    let system = build_system(&cluster)?;
    let given: BTreeMap<i64, Complex64> = cfg
        .initial
        .iter()
        .map(|m| (m.k, from_polar(m.amplitude, m.phase)))
        .collect();
    let mut missing: Vec<i64> = system
        .modes()
        .iter()
        .copied()
        .filter(|k| !given.contains_key(k))
        .collect();
    missing.sort_unstable();
    missing.dedup();
    if !missing.is_empty() {
        return Err(CliError::MissingInitial(missing));
    }
    let unknown: Vec<i64> = given
        .keys()
        .copied()
        .filter(|k| !system.modes().contains(k))
        .collect();
    if !unknown.is_empty() {
        return Err(CliError::UnknownInitial(unknown));
    }
    let b0: Vec<Complex64> = system.modes().iter().map(|k| given[k]).collect();
    let tc = system.characteristic_time(&b0)?;
    let t_end = cfg.t_end * tc;
    let opts = IntegrateOptions {
        tol: cfg.tol,
        samples: cfg.samples,
        ..IntegrateOptions::default()
    };
    let tr = integrate_opts(&system, &b0, t_end, &opts)?;

    let mut header = cfg.header_lines();
    header.push(format!("characteristic_time = {tc:?}"));
    header.push(format!(
        "triads = {}",
        cluster
            .triads
            .iter()
            .map(|t| format!("{:?}", t.modes()))
            .collect::<Vec<_>>()
            .join(" ")
    ));
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => output::trajectory_csv(&system, &tr, &header),
        Format::Json => output::trajectory_json(&system, &tr),
        Format::Dot => output::clusters_dot([&cluster], &header),
    };
    emit(cfg.out.as_deref(), &text)?;

    let max_phi = tr
        .samples
        .iter()
        .flat_map(|s| s.phases.iter().flatten())
        .fold(0.0f64, |a, p| a.max(p.abs()));
    let period = measure_period(&system, 0, &b0, t_end, cfg.tol)?;
    let io_err = |source| CliError::Io {
        path: "<report>".into(),
        source,
    };
    writeln!(
        report,
        "N={} modes={} invariants={} t_end={t_end:.6e} steps={}",
        system.triad_count(),
        system.mode_count(),
        tr.basis.len(),
        tr.stats.accepted
    )
    .map_err(io_err)?;
    writeln!(
        report,
        "drift: hamiltonian {:.3e}, invariants {:.3e}",
        tr.drift.hamiltonian,
        tr.drift.invariants.iter().fold(0.0f64, |a, &b| a.max(b))
    )
    .map_err(io_err)?;
    writeln!(report, "max |phi| {max_phi:.3e}").map_err(io_err)?;
    match period {
        Some(p) => writeln!(report, "detected period (triad 0) {p:.9e}"),
        None => writeln!(report, "detected period (triad 0) none"),
    }
    .map_err(io_err)?;
    if system.triad_count() == 1 {
        let inv = TriadInvariants::from_state(system.terms()[0].z, [b0[0], b0[1], b0[2]]);
        if let Ok(ep) = triad_elliptic_params(&inv) {
            writeln!(report, "analytic period {:.9e}", ep.tau).map_err(io_err)?;
        }
    }
    Ok(())
}

/// Run the acceptance suite; `Ok(true)` when every check passes.
pub fn run_validate(fault: Option<Fault>, report: &mut dyn Write) -> Result<bool, CliError> {
    let checks = validate::run_all(fault);
    let io_err = |source| CliError::Io {
        path: "<report>".into(),
        source,
    };
    for c in &checks {
        writeln!(report, "{}", c.line()).map_err(io_err)?;
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    writeln!(
        report,
        "{} of {} checks passed",
        checks.len() - failed,
        checks.len()
    )
    .map_err(io_err)?;
    Ok(failed == 0)
}
