//! One line per acceptance criterion, then a single assertion over all of them.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use warpdef::models::{aharonov_bohm, flux_equivalent, gravito_constant, landau};
use warpdef::opalg::scalar::rat;
use warpdef::opalg::Convention;
use warpdef::spectra::{discretize, eigenvalues, holonomy, interference_phase, landau_degeneracy, GridSpec, Loop};
use warpdef::verify::{run_suite, CheckResult};

const SEED: u64 = 0x5eed;

/// Wall-clock budget for the symbolic lemma group.
const LEMMA_SECONDS: f64 = 10.0;
/// Relative tolerance on Landau and gravitomagnetic spacings.
const SPACING_TOL: f64 = 0.02;
/// Wall-clock budget for the Landau spectrum.
const LANDAU_SECONDS: f64 = 60.0;
/// Relative tolerance on the flux-line holonomy.
const HOLONOMY_TOL: f64 = 0.005;
/// Bound on a loop that does not encircle the flux line, relative to the flux.
const OFF_AXIS_TOL: f64 = 1e-3;

const GRID_POINTS: usize = 128;
/// Twelve magnetic lengths at unit field.
const GRID_EXTENT: f64 = 12.0;
const LEVEL_COUNT: usize = 64;
const CLUSTER_TOL: f64 = 1e-3;
const MIN_CLUSTER: usize = 3;

struct Outcome {
    id: usize,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn report(id: usize, title: &'static str, passed: bool, detail: String) -> Outcome {
    println!("criterion {}: {} [{}] {}", id, if passed { "PASS" } else { "FAIL" }, title, detail);
    Outcome { id, title, passed, detail }
}

fn group(name: &str) -> (Vec<CheckResult>, f64) {
    let start = Instant::now();
    let results = run_suite(Convention::C1, SEED, Some(&[name.to_string()])).results;
    (results, start.elapsed().as_secs_f64())
}

fn summary(results: &[CheckResult]) -> (bool, String) {
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    let text = if failed.is_empty() {
        format!("{} checks", results.len())
    } else {
        format!("{} of {} failed: {}", failed.len(), results.len(), failed.join("; "))
    };
    (failed.is_empty() && !results.is_empty(), text)
}

fn constants(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Lowest three clustered levels and their two spacings.
fn spacings(preset: &warpdef::models::ModelPreset, c: &BTreeMap<String, f64>) -> Result<(Vec<f64>, f64), String> {
    let start = Instant::now();
    let grid = GridSpec::new(GRID_POINTS, GRID_EXTENT, 0).map_err(|e| e.to_string())?;
    let d = discretize(preset, &grid, c).map_err(|e| e.to_string())?;
    let r = eigenvalues(&d.matrix, LEVEL_COUNT).map_err(|e| e.to_string())?;
    let levels = landau_degeneracy(&r, CLUSTER_TOL).levels(MIN_CLUSTER);
    if levels.len() < 3 {
        return Err(format!("only {} clustered levels: {:?}", levels.len(), levels));
    }
    Ok((vec![levels[1] - levels[0], levels[2] - levels[1]], start.elapsed().as_secs_f64()))
}

fn lemmas() -> Outcome {
    let (results, secs) = group("lemmas");
    let (ok, text) = summary(&results);
    report(1, "symbolic lemma suite", ok && secs < LEMMA_SECONDS, format!("{}, {:.2} s", text, secs))
}

fn coefficients() -> Outcome {
    let (ok, text) = summary(&group("coefficients").0);
    report(2, "coefficient identities", ok, text)
}

fn models() -> Outcome {
    let (ok, text) = summary(&group("models").0);
    report(3, "model equivalences", ok, text)
}

fn moyal() -> Outcome {
    let (ok, text) = summary(&group("moyal").0);
    report(4, "Moyal-Weyl and guiding center", ok, text)
}

fn gauge() -> Outcome {
    let (ok, text) = summary(&group("gauge").0);
    report(5, "gauge structure", ok, text)
}

fn landau_levels() -> Outcome {
    let (e, m, b): (f64, f64, f64) = (1.0, 1.0, 1.0);
    let oracle = (e * b).abs() / m;
    match spacings(&landau(), &constants(&[("e", e), ("m", m), ("B", b)])) {
        Ok((s, secs)) => {
            let ok = s.iter().all(|x| (x / oracle - 1.0).abs() < SPACING_TOL) && secs < LANDAU_SECONDS;
            report(6, "Landau level spacing", ok, format!("spacings {:?} vs {}, {:.1} s", s, oracle, secs))
        }
        Err(err) => report(6, "Landau level spacing", false, err),
    }
}

fn gravito_levels() -> Outcome {
    let c = constants(&[("m", 1.0), ("G", 1.0), ("M", 1.0), ("omega", 1.0), ("r_hs", 4.0)]);
    let omega = 2.0 * 1.0 * 1.0 * 1.0 / 4.0;
    match spacings(&gravito_constant(), &c) {
        Ok((s, secs)) => {
            let ratios: Vec<f64> = s.iter().map(|x| x / omega).collect();
            let ok = ratios.iter().all(|r| (r / 2.0 - 1.0).abs() < SPACING_TOL);
            report(7, "gravitomagnetic spacing", ok, format!("spacing/Omega {:?}, {:.1} s", ratios, secs))
        }
        Err(err) => report(7, "gravitomagnetic spacing", false, err),
    }
}

/// `e (a - b) / 2` is an integer, by cross-multiplication.
fn equivalent_by_hand(a: (i64, i64), b: (i64, i64), e: (i64, i64)) -> bool {
    let num = e.0 * (a.0 * b.1 - b.0 * a.1);
    let den = 2 * e.1 * a.1 * b.1;
    num % den == 0
}

fn aharonov_bohm_holonomy() -> Outcome {
    let phi = 0.8;
    let c = constants(&[("e", 1.0), ("phi_M", phi)]);
    let field = &aharonov_bohm().gauge_fields().unwrap()[0];
    let mut notes = Vec::new();
    let mut ok = true;
    for radius in [0.5, 1.0, 2.0] {
        let value = holonomy(field, &Loop::around_axis(radius, 0), 512, &c).unwrap();
        ok &= (value / phi - 1.0).abs() < HOLONOMY_TOL;
        notes.push(format!("r={} {:.6}", radius, value));
    }
    let outside = Loop { center: [0.0, 3.0, 0.0], ..Loop::around_axis(1.0, 0) };
    let off = holonomy(field, &outside, 512, &c).unwrap();
    ok &= off.abs() < OFF_AXIS_TOL * phi;
    notes.push(format!("off-axis {:.2e}", off));

    let cases: [((i64, i64), (i64, i64), (i64, i64)); 20] = [
        ((2, 1), (0, 1), (1, 1)),
        ((1, 1), (0, 1), (1, 1)),
        ((4, 1), (0, 1), (1, 1)),
        ((3, 1), (1, 1), (1, 1)),
        ((1, 2), (0, 1), (4, 1)),
        ((1, 2), (0, 1), (2, 1)),
        ((1, 3), (1, 3), (5, 7)),
        ((5, 3), (1, 3), (3, 2)),
        ((5, 3), (1, 3), (1, 2)),
        ((7, 4), (-1, 4), (1, 1)),
        ((7, 4), (1, 4), (1, 1)),
        ((0, 1), (6, 1), (1, 3)),
        ((0, 1), (6, 1), (1, 2)),
        ((2, 5), (-8, 5), (1, 1)),
        ((2, 5), (-8, 5), (2, 1)),
        ((9, 7), (2, 7), (2, 1)),
        ((-3, 1), (3, 1), (1, 3)),
        ((-3, 1), (3, 1), (2, 3)),
        ((1, 6), (1, 6), (9, 1)),
        ((11, 6), (-1, 6), (3, 1)),
    ];
    let mut mismatches = 0;
    for (a, b, e) in cases {
        let by_hand = equivalent_by_hand(a, b, e);
        let got = flux_equivalent(&rat(a.0, a.1), &rat(b.0, b.1), &rat(e.0, e.1));
        let pi = std::f64::consts::PI;
        let ef = e.0 as f64 / e.1 as f64;
        let pa = interference_phase(ef, pi * a.0 as f64 / a.1 as f64);
        let pb = interference_phase(ef, pi * b.0 as f64 / b.1 as f64);
        let phases_equal = (pa - pb).norm() < 1e-9;
        if got != by_hand || phases_equal != by_hand {
            mismatches += 1;
        }
    }
    ok &= mismatches == 0;
    notes.push(format!("flux table {} mismatches in {}", mismatches, cases.len()));
    report(8, "flux-line holonomy", ok, notes.join(", "))
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_warpdef")).args(args).output().expect("binary runs");
    assert!(out.status.success(), "{:?}: {}", args, String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn properties() -> Outcome {
    let (ok, text) = summary(&group("ring").0);
    let spectrum = ["spectrum", "--model", "landau", "--grid", "64,12", "--k", "12", "--constants", "e=1,m=1,B=1", "--seed", "11"];
    let verify = ["verify", "--only", "ring,moyal", "--seed", "11"];
    let same = run_cli(&spectrum) == run_cli(&spectrum) && run_cli(&verify) == run_cli(&verify);
    report(9, "property suite and determinism", ok && same, format!("{}, identical output {}", text, same))
}

#[test]
fn acceptance() {
    let outcomes = vec![
        lemmas(),
        coefficients(),
        models(),
        moyal(),
        gauge(),
        landau_levels(),
        gravito_levels(),
        aharonov_bohm_holonomy(),
        properties(),
    ];
    let failed: Vec<String> =
        outcomes.iter().filter(|o| !o.passed).map(|o| format!("{} ({}): {}", o.id, o.title, o.detail)).collect();
    println!("{} of {} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    assert!(failed.is_empty(), "failed criteria: {:?}", failed);
}
