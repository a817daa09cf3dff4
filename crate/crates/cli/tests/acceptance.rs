use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::Instant;

use capwave::dispersion::{FluidParams, SIGMA_WATER_25C};
use capwave::search::enumerate_triads;
use capwave_cli::validate::{self, Check};
use serde_json::Value;

fn cluster_json(eps: f64) -> (Value, f64) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_capwave"))
        .args([
            "cluster",
            "--kmax",
            "100",
            "--format",
            "json",
            "--epsilon",
            &eps.to_string(),
        ])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    (
        serde_json::from_slice(&out.stdout).expect("valid json"),
        start.elapsed().as_secs_f64(),
    )
}

fn triad_sets(doc: &Value) -> BTreeSet<BTreeSet<[i64; 3]>> {
    doc["clusters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            c["triads"]
                .as_array()
                .unwrap()
                .iter()
                .map(|t| {
                    let v: Vec<i64> = t
                        .as_array()
                        .unwrap()
                        .iter()
                        .map(|x| x.as_i64().unwrap())
                        .collect();
                    [v[0], v[1], v[2]]
                })
                .collect()
        })
        .collect()
}

fn kinds_of(doc: &Value, member: [i64; 3]) -> Option<[usize; 3]> {
    let c = doc["clusters"].as_array()?.iter().find(|c| {
        c["triads"].as_array().unwrap().iter().any(|t| {
            t.as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_i64().unwrap())
                .eq(member)
        })
    })?;
    let mut h = [0; 3];
    for e in c["connections"].as_array()? {
        match e["kind"].as_str()? {
            "AA" => h[0] += 1,
            "AP" => h[1] += 1,
            "PP" => h[2] += 1,
            _ => return None,
        }
    }
    Some(h)
}

/// Reference pairs, read back from the command-line JSON.
fn criterion_1() -> Check {
    let mut c = validate::reference_pairs();
    let (doc, secs) = cluster_json(1e-4);
    let want: BTreeSet<BTreeSet<[i64; 3]>> = [
        [[20, 94, 114], [24, 70, 94]],
        [[17, 71, 88], [15, 88, 103]],
        [[11, 83, 94], [12, 71, 83]],
        [[10, 47, 57], [12, 35, 47]],
    ]
    .iter()
    .map(|p| p.iter().copied().collect())
    .collect();
    let cli_ok = triad_sets(&doc) == want && secs < 10.0;
    c.pass &= cli_ok;
    c.measured += &format!("; command line: set equal {cli_ok} in {secs:.2} s");
    c
}

fn criterion_2() -> Check {
    let mut c = validate::aa_pairs_and_stars();
    let (doc, _) = cluster_json(1e-3);
    let s3 = kinds_of(&doc, [79, 80, 159]);
    let s4 = kinds_of(&doc, [28, 96, 124]);
    let cli_ok = s3 == Some([3, 0, 0]) && s4 == Some([3, 1, 0]);
    c.pass &= cli_ok;
    c.measured += &format!("; command line: 3-star {s3:?}, 4-star {s4:?}");
    c
}

fn criterion_3() -> Check {
    let mut c = validate::two_triad_count();
    let (doc, _) = cluster_json(1e-3);
    let pairs = triad_sets(&doc).iter().filter(|s| s.len() == 2).count();
    c.pass &= pairs.to_string() == c.measured;
    c.measured += &format!("; command line: {pairs}");
    c
}

fn criterion_4() -> Check {
    let mut c = validate::small_epsilon_isolated();
    let counts: Vec<usize> = [1e-8, 1e-5]
        .iter()
        .map(|&e| triad_sets(&cluster_json(e).0).len())
        .collect();
    c.pass &= counts.iter().all(|&n| n == 0);
    c.measured += &format!("; command line at 1e-8 and 1e-5: {counts:?}");
    c
}

/// Bisection on `ω(k1) + ω(k2) = ω(k1 + k2)` for the vorticity magnitude `w`,
/// with the resonance taken at vorticity `−w`.
fn bisect_vorticity(k1: f64, k2: f64, sigma: f64) -> f64 {
    let s = |k: f64, w: f64| (sigma * k * k * k + w * w / 4.0).sqrt();
    let g = |w: f64| s(k1 + k2, w) - s(k1, w) - s(k2, w) - w / 2.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_6() -> Check {
    let mut c = validate::resonance_closure();
    let ts = enumerate_triads(100, FluidParams::default()).unwrap();
    let worst = ts
        .iter()
        .map(|t| {
            let w = bisect_vorticity(t.k1 as f64, t.k2 as f64, SIGMA_WATER_25C);
            ((t.omega_gen.0 - w) / w).abs()
        })
        .fold(0.0, f64::max);
    c.pass &= worst < 1e-9;
    c.measured += &format!("; closed form vs bisection {worst:.1e}");
    c
}

fn criterion_7() -> Check {
    let mut c = validate::irrotational_control();
    let mut best = f64::INFINITY;
    for a in 1..=100 {
        for b in a..=100 {
            let p = |k: i64| (k as f64).powf(1.5);
            best = best.min((p(a) + p(b) - p(a + b)).abs());
        }
    }
    c.pass &= best > 1e-6;
    c.measured += &format!("; direct scan {best:.4e}");
    c
}

fn main() -> ExitCode {
    let checks: Vec<(u8, fn() -> Check)> = vec![
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, validate::large_cluster),
        (6, criterion_6),
        (7, criterion_7),
        (8, validate::sigma_scaling),
        (9, || validate::conservation(None)),
        (10, validate::analytic_oracle),
        (11, validate::phase_behavior),
    ];
    let mut failed = 0;
    for (id, f) in checks {
        let c = f();
        assert_eq!(c.id, id);
        println!("{}", c.line());
        failed += usize::from(!c.pass);
    }
    let fault = validate::conservation(Some(validate::Fault::CouplingSign));
    println!(
        "{} injected coupling-sign fault is caught: {}",
        if fault.pass { "FAIL" } else { "PASS" },
        fault.measured
    );
    failed += usize::from(fault.pass);
    println!("acceptance: {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
