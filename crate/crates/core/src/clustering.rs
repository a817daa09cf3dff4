//! ε-accuracy resonance clusters and their NR-diagrams.
//!
//! Two triads are linked when they share a wavenumber and their generating
//! vorticities differ relatively by less than ε. Clusters are the connected
//! components of that relation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::dispersion::Vorticity;
use crate::search::{Role, Triad};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConnectionKind {
    AA,
    AP,
    PP,
}

impl ConnectionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConnectionKind::AA => "AA",
            ConnectionKind::AP => "AP",
            ConnectionKind::PP => "PP",
        }
    }
}

impl fmt::Display for ConnectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Edge of an NR-diagram. `a` and `b` index the owning cluster's triads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Connection {
    pub a: usize,
    pub b: usize,
    pub shared_k: i64,
    pub kind: ConnectionKind,
}

/// Kind of the connection between two triads through `shared_k`.
pub fn connection_type(ta: &Triad, tb: &Triad, shared_k: i64) -> Result<ConnectionKind> {
    let ra = ta
        .role(shared_k)
        .ok_or(Error::ModeNotInTriad { k: shared_k })?;
    let rb = tb
        .role(shared_k)
        .ok_or(Error::ModeNotInTriad { k: shared_k })?;
    Ok(match (ra, rb) {
        (Role::Active, Role::Active) => ConnectionKind::AA,
        (Role::Passive, Role::Passive) => ConnectionKind::PP,
        _ => ConnectionKind::AP,
    })
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// A resonance cluster: triads as vertices, shared modes as typed edges.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterGraph {
    pub triads: Vec<Triad>,
    pub connections: Vec<Connection>,
    pub omega_min: Vorticity,
    pub omega_max: Vorticity,
    /// `(omega_max − omega_min) / omega_max`.
    pub spread: f64,
    /// Accuracy used to build the cluster, `None` for hand-assembled clusters.
    pub epsilon: Option<f64>,
}

/// Coupling-ratio hint for a connected pair with `Z_a / Z_b` in {1, 2, 1/2}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioHint {
    pub a: usize,
    pub b: usize,
    pub ratio: f64,
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == 0.0 {
        0.0
    } else {
        libm::fabs(a - b) / m
    }
}

fn holders(triads: &[Triad]) -> BTreeMap<i64, Vec<usize>> {
    let mut map: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, t) in triads.iter().enumerate() {
        let mut ks = t.modes();
        ks.sort_unstable();
        for (j, k) in ks.iter().enumerate() {
            if j > 0 && ks[j - 1] == *k {
                continue;
            }
            map.entry(*k).or_default().push(i);
        }
    }
    map
}

fn emit_connections(triads: &[Triad]) -> Vec<Connection> {
    let mut out = Vec::new();
    for (k, idx) in holders(triads) {
        if idx.len() < 2 {
            continue;
        }
        let (act, pas): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| triads[i].role(k) == Some(Role::Active));
        for (group, kind) in [(&act, ConnectionKind::AA), (&pas, ConnectionKind::PP)] {
            for (x, &a) in group.iter().enumerate() {
                for &b in &group[x + 1..] {
                    out.push(Connection {
                        a,
                        b,
                        shared_k: k,
                        kind,
                    });
                }
            }
        }
        if let (Some(&a), Some(&p)) = (act.first(), pas.first()) {
            let (a, b) = if a < p { (a, p) } else { (p, a) };
            out.push(Connection {
                a,
                b,
                shared_k: k,
                kind: ConnectionKind::AP,
            });
        }
    }
    out.sort_by_key(|c| (c.a, c.b, c.shared_k));
    out
}

impl ClusterGraph {
    fn assemble(mut triads: Vec<Triad>, epsilon: Option<f64>) -> Self {
        triads.sort_by(|a, b| {
            a.reduced_vorticity()
                .total_cmp(&b.reduced_vorticity())
                .then(a.k1.cmp(&b.k1))
                .then(a.k2.cmp(&b.k2))
        });
        let connections = emit_connections(&triads);
        let lo = triads.first().map_or(0.0, |t| t.omega_gen.0);
        let hi = triads.last().map_or(0.0, |t| t.omega_gen.0);
        let spread = match (triads.first(), triads.last()) {
            (Some(a), Some(b)) => relative_gap(a.reduced_vorticity(), b.reduced_vorticity()),
            _ => 0.0,
        };
        Self {
            triads,
            connections,
            omega_min: Vorticity(lo),
            omega_max: Vorticity(hi),
            spread,
            epsilon,
        }
    }

    /// Cluster of arbitrary triads connected through shared wavenumbers,
    /// regardless of their vorticities.
    pub fn from_triads(triads: &[Triad]) -> Result<Self> {
        if triads.is_empty() {
            return Err(Error::DisconnectedCluster);
        }
        let mut uf = UnionFind::new(triads.len());
        for idx in holders(triads).values() {
            for w in idx.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let root = uf.find(0);
        if (1..triads.len()).any(|i| uf.find(i) != root) {
            return Err(Error::DisconnectedCluster);
        }
        let mut g = Self::assemble(triads.to_vec(), None);
        g.epsilon = None;
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.triads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triads.is_empty()
    }

    pub fn is_isolated(&self) -> bool {
        self.triads.len() == 1
    }

    /// Number of mode identifications `n`: over every wavenumber, the number
    /// of triads holding it minus one.
    pub fn identifications(&self) -> usize {
        holders(&self.triads).values().map(|v| v.len() - 1).sum()
    }

    /// Distinct modes `M = 3N − n`, counting the doubled mode of `(k, k, 2k)` twice.
    pub fn mode_count(&self) -> usize {
        3 * self.triads.len() - self.identifications()
    }

    /// Number of connections of each kind, in the order AA, AP, PP.
    pub fn kind_histogram(&self) -> [usize; 3] {
        let mut h = [0; 3];
        for c in &self.connections {
            h[c.kind as usize] += 1;
        }
        h
    }

    /// `true` when the total spread exceeds the accuracy used to build the cluster.
    pub fn exceeds_epsilon(&self) -> bool {
        self.epsilon.is_some_and(|e| self.spread > e)
    }

    /// Connected pairs whose coupling ratio is 1, 2 or 1/2 to `tol` relative.
    pub fn coupling_ratio_hints(&self, tol: f64) -> Vec<RatioHint> {
        let mut out: Vec<RatioHint> = Vec::new();
        for c in &self.connections {
            if out.iter().any(|h| h.a == c.a && h.b == c.b) {
                continue;
            }
            let ratio = self.triads[c.a].z / self.triads[c.b].z;
            if [1.0, 2.0, 0.5]
                .iter()
                .any(|r| libm::fabs(ratio - r) <= tol * r)
            {
                out.push(RatioHint {
                    a: c.a,
                    b: c.b,
                    ratio,
                });
            }
        }
        out
    }
}

/// Partition `triads` into ε-clusters. Returns every component, largest first,
/// ties broken by ascending vorticity; singletons are isolated triads.
pub fn build_clusters(triads: &[Triad], epsilon: f64) -> Result<Vec<ClusterGraph>> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let mut uf = UnionFind::new(triads.len());
    for idx in holders(triads).values() {
        for (x, &i) in idx.iter().enumerate() {
            for &j in &idx[x + 1..] {
                let g = relative_gap(triads[i].reduced_vorticity(), triads[j].reduced_vorticity());
                if g < epsilon {
                    uf.union(i, j);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Triad>> = BTreeMap::new();
    for (i, t) in triads.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(*t);
    }
    let mut out: Vec<ClusterGraph> = groups
        .into_values()
        .map(|ts| ClusterGraph::assemble(ts, Some(epsilon)))
        .collect();
    out.sort_by(|a, b| {
        b.len().cmp(&a.len()).then_with(|| {
            let (ta, tb) = (&a.triads[0], &b.triads[0]);
            ta.reduced_vorticity()
                .total_cmp(&tb.reduced_vorticity())
                .then(ta.k1.cmp(&tb.k1))
                .then(ta.k2.cmp(&tb.k2))
        })
    });
    Ok(out)
}

/// `2N − n` independent quadratic conservation laws.
pub fn conservation_count(cluster: &ClusterGraph) -> Result<usize> {
    let n = cluster.identifications();
    let two_n = 2 * cluster.triads.len();
    if two_n <= n {
        return Err(Error::OverConnected {
            triads: cluster.triads.len(),
            identifications: n,
        });
    }
    Ok(two_n - n)
}

/// NR-diagram in DOT: one node per triad, one labelled edge per connection.
pub fn export_nr_diagram(cluster: &ClusterGraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "graph nr {{");
    let _ = writeln!(s, "  node [shape=triangle];");
    for (i, t) in cluster.triads.iter().enumerate() {
        let _ = writeln!(s, "  t{i} [label=\"({}, {}, {})\"];", t.k1, t.k2, t.k3);
    }
    for c in &cluster.connections {
        let _ = writeln!(
            s,
            "  t{} -- t{} [label=\"{} k={}\"];",
            c.a, c.b, c.kind, c.shared_k
        );
    }
    s.push_str("}\n");
    s
}
