use std::fmt::Write as _;

use capwave::clustering::{conservation_count, export_nr_diagram, ClusterGraph};
use capwave::dynamics::{ClusterSystem, Trajectory};
use capwave::search::Triad;
use serde::Serialize;

#[derive(Serialize)]
struct TriadRow {
    k1: i64,
    k2: i64,
    k3: i64,
    omega_gen: f64,
    z: f64,
}

impl From<&Triad> for TriadRow {
    fn from(t: &Triad) -> Self {
        Self {
            k1: t.k1,
            k2: t.k2,
            k3: t.k3,
            omega_gen: t.omega_gen.0,
            z: t.z,
        }
    }
}

fn comment(out: &mut String, prefix: &str, header: &[String]) {
    for h in header {
        let _ = writeln!(out, "{prefix} {h}");
    }
}

pub fn triad_table(triads: &[Triad], header: &[String]) -> String {
    let mut s = String::new();
    comment(&mut s, "#", header);
    s.push_str("k1,k2,k3,omega_gen,z\n");
    for t in triads {
        let _ = writeln!(
            s,
            "{},{},{},{:?},{:?}",
            t.k1, t.k2, t.k3, t.omega_gen.0, t.z
        );
    }
    s
}

#[derive(Serialize)]
struct TriadDoc {
    sigma: f64,
    kmax: u32,
    triads: Vec<TriadRow>,
}

pub fn triads_json(triads: &[Triad], sigma: f64, kmax: u32) -> String {
    let doc = TriadDoc {
        sigma,
        kmax,
        triads: triads.iter().map(TriadRow::from).collect(),
    };
    json(&doc)
}

#[derive(Serialize)]
struct ConnectionDoc {
    a: usize,
    b: usize,
    shared_k: i64,
    kind: &'static str,
}

#[derive(Serialize)]
struct ClusterDoc {
    id: usize,
    triads: Vec<[i64; 3]>,
    vorticities: Vec<f64>,
    spread: f64,
    identifications: usize,
    conservation_laws: usize,
    connections: Vec<ConnectionDoc>,
}

#[derive(Serialize)]
struct ClustersDoc {
    epsilon: f64,
    sigma: f64,
    kmax: u32,
    isolated_triads: usize,
    clusters: Vec<ClusterDoc>,
}

/// Multi-triad clusters in full; isolated triads only counted.
pub fn clusters_json(clusters: &[ClusterGraph], epsilon: f64, sigma: f64, kmax: u32) -> String {
    let docs = clusters
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_isolated())
        .map(|(id, c)| ClusterDoc {
            id,
            triads: c.triads.iter().map(|t| t.modes()).collect(),
            vorticities: c.triads.iter().map(|t| t.omega_gen.0).collect(),
            spread: c.spread,
            identifications: c.identifications(),
            conservation_laws: conservation_count(c).unwrap_or(0),
            connections: c
                .connections
                .iter()
                .map(|e| ConnectionDoc {
                    a: e.a,
                    b: e.b,
                    shared_k: e.shared_k,
                    kind: e.kind.as_str(),
                })
                .collect(),
        })
        .collect::<Vec<_>>();
    let isolated = clusters.iter().filter(|c| c.is_isolated()).count();
    json(&ClustersDoc {
        epsilon,
        sigma,
        kmax,
        isolated_triads: isolated,
        clusters: docs,
    })
}

pub fn clusters_dot<'a>(
    clusters: impl IntoIterator<Item = &'a ClusterGraph>,
    header: &[String],
) -> String {
    let mut s = String::new();
    comment(&mut s, "//", header);
    for c in clusters {
        s.push_str(&export_nr_diagram(c));
    }
    s
}

/// One line per multi-triad cluster: size, identifications, invariants,
/// spread and the AA/AP/PP histogram.
pub fn cluster_summary(id: usize, c: &ClusterGraph) -> String {
    let [aa, ap, pp] = c.kind_histogram();
    format!(
        "cluster {id}: N={} n={} 2N-n={} spread={:.3e} AA={aa} AP={ap} PP={pp}",
        c.len(),
        c.identifications(),
        conservation_count(c).map_or_else(|e| e.to_string(), |v| v.to_string()),
        c.spread,
    )
}

/// `t`, per mode `re_k, im_k, abs2_k`, then `H`, invariants `I0..`, and per triad `phi0..`.
pub fn trajectory_csv(system: &ClusterSystem, tr: &Trajectory, header: &[String]) -> String {
    let mut s = String::new();
    comment(&mut s, "#", header);
    for (i, c) in tr.basis.iter().enumerate() {
        let _ = writeln!(s, "# I{i} = {c:?}");
    }
    s.push('t');
    for k in system.modes() {
        let _ = write!(s, ",re_{k},im_{k},abs2_{k}");
    }
    s.push_str(",H");
    for i in 0..tr.basis.len() {
        let _ = write!(s, ",I{i}");
    }
    for j in 0..system.triad_count() {
        let _ = write!(s, ",phi{j}");
    }
    s.push('\n');
    for smp in &tr.samples {
        let _ = write!(s, "{:?}", smp.t);
        for b in &smp.state {
            let _ = write!(s, ",{:?},{:?},{:?}", b.re, b.im, b.norm_sqr());
        }
        let _ = write!(s, ",{:?}", smp.hamiltonian);
        for q in &smp.invariants {
            let _ = write!(s, ",{q:?}");
        }
        for p in &smp.phases {
            match p {
                Some(p) => {
                    let _ = write!(s, ",{p:?}");
                }
                None => s.push_str(",nan"),
            }
        }
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct SampleDoc<'a> {
    t: f64,
    re: Vec<f64>,
    im: Vec<f64>,
    hamiltonian: f64,
    invariants: &'a [f64],
    phases: &'a [Option<f64>],
}

#[derive(Serialize)]
struct TrajectoryDoc<'a> {
    modes: &'a [i64],
    basis: &'a [Vec<i64>],
    drift_hamiltonian: f64,
    drift_invariants: &'a [f64],
    samples: Vec<SampleDoc<'a>>,
}

pub fn trajectory_json(system: &ClusterSystem, tr: &Trajectory) -> String {
    let doc = TrajectoryDoc {
        modes: system.modes(),
        basis: &tr.basis,
        drift_hamiltonian: tr.drift.hamiltonian,
        drift_invariants: &tr.drift.invariants,
        samples: tr
            .samples
            .iter()
            .map(|s| SampleDoc {
                t: s.t,
                re: s.state.iter().map(|b| b.re).collect(),
                im: s.state.iter().map(|b| b.im).collect(),
                hamiltonian: s.hamiltonian,
                invariants: &s.invariants,
                phases: &s.phases,
            })
            .collect(),
    };
    json(&doc)
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}
