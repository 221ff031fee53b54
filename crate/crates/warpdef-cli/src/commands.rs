use std::collections::BTreeMap;
use std::io::Write;

use serde_json::{json, Value};
use warpdef::deform::{deform_operator_in, DeformError};
use warpdef::gauge::{bianchi_holds, curl, extract_gauge_field, field_strength_in, jacobi_maxwell_report_in, FieldStrength, GaugeError};
use warpdef::models::{ModelPreset, HOLLOW_SPHERE_OMEGA};
use warpdef::opalg::{
    commutator_in, parse, to_json, Convention, CoordFunction, EvalError, OperatorExpr, Scalar, ScalarError,
};
use warpdef::spectra::{
    discretize, eigenvalues_with, holonomy as loop_integral, interference_phase, landau_degeneracy, EigenOptions, GridSpec,
    Loop, SpectraError,
};
use warpdef::verify::run_suite;

use crate::config::{scalar, RunConfig};
use crate::CliError;

fn convention(cfg: &RunConfig) -> Result<Convention, CliError> {
    Ok(if cfg.flip()? { Convention::FlippedSign } else { Convention::C1 })
}

fn require_preset(cfg: &RunConfig, command: &str) -> Result<ModelPreset, CliError> {
    cfg.preset()?
        .ok_or_else(|| CliError::Config(format!("{} needs --model or an inline specification (--B, --Q, --strength)", command)))
}

fn deform_err(e: DeformError) -> CliError {
    match e {
        DeformError::Matrix(m) => CliError::Config(m.to_string()),
        other => CliError::Unsupported(other.to_string()),
    }
}

fn gauge_err(e: GaugeError) -> CliError {
    match e {
        GaugeError::Deform(d) => deform_err(d),
        other => CliError::Config(other.to_string()),
    }
}

fn spectra_err(e: SpectraError) -> CliError {
    match e {
        SpectraError::Grid(_) | SpectraError::TooManyEigenvalues { .. } => CliError::Config(e.to_string()),
        SpectraError::Eval(EvalError::Scalar(ScalarError::Unbound(_))) => CliError::Config(e.to_string()),
        other => CliError::Numeric(other.to_string()),
    }
}

fn emit(cfg: &RunConfig, report: &Value, csv: Option<String>) -> Result<(), CliError> {
    let text = if cfg.csv()? {
        csv.ok_or_else(|| CliError::Config("csv output is only available for spectrum".into()))?
    } else {
        let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
        s.push('\n');
        s
    };
    match cfg.get("out") {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Config(format!("{}: {}", path, e))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Config(e.to_string()))
        }
    }
}

fn expr_text(f: &CoordFunction) -> String {
    OperatorExpr::from_coord(f.clone()).to_string()
}

fn strength_text(f: &FieldStrength) -> Vec<Vec<String>> {
    (0..3).map(|i| (0..3).map(|j| expr_text(f.get(i, j))).collect()).collect()
}

fn specs_json(preset: &ModelPreset) -> Value {
    preset.to_json()["specs"].clone()
}

pub fn deform(cfg: &RunConfig) -> Result<(), CliError> {
    let preset = require_preset(cfg, "deform")?;
    let conv = convention(cfg)?;
    let operator = match cfg.get("operator") {
        Some(text) => parse(text).map_err(|e| CliError::Config(format!("operator: {}", e)))?,
        None => preset.base_hamiltonian(),
    };
    let mut h = operator.clone();
    for spec in &preset.specs {
        h = deform_operator_in(conv, &h, spec).map_err(deform_err)?;
    }
    for (name, value) in cfg.constants()? {
        h = h.substitute(&name, &Scalar::from_rational(value)).map_err(|e| CliError::Config(e.to_string()))?;
    }
    let report = json!({
        "command": "deform",
        "model": preset.name,
        "convention": format!("{:?}", conv),
        "specs": specs_json(&preset),
        "operator": operator.to_string(),
        "deformed": h.to_string(),
        "terms": to_json(&h),
    });
    emit(cfg, &report, None)
}

pub fn verify(cfg: &RunConfig) -> Result<(), CliError> {
    let conv = convention(cfg)?;
    let only = cfg.only()?;
    let report = run_suite(conv, cfg.seed()?, only.as_deref());
    let value = serde_json::to_value(&report).expect("reports serialize");
    emit(cfg, &json!({ "command": "verify", "report": value }), None)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Failure)
    }
}

fn omega_for(preset: &ModelPreset, constants: &BTreeMap<String, f64>) -> Option<f64> {
    match preset.name {
        "gravito_constant" | "gravito_zeeman" => scalar(HOLLOW_SPHERE_OMEGA).ok()?.eval_f64(constants).ok().map(|z| z.re),
        _ => None,
    }
}

pub fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let preset = require_preset(cfg, "spectrum")?;
    let constants = cfg.constants_f64()?;
    let (n, l) = cfg.grid()?;
    let axis = if cfg.has("axis") { cfg.axis()? } else { 0 };
    let grid = GridSpec::new(n, l, axis).map_err(spectra_err)?;
    let disc = discretize(&preset, &grid, &constants).map_err(spectra_err)?;
    for w in &disc.warnings {
        eprintln!("warpdef: warning: {}", w);
    }
    let opts = EigenOptions { seed: cfg.seed()?, ..EigenOptions::default() };
    let result = eigenvalues_with(&disc.matrix, cfg.k()?, &opts).map_err(spectra_err)?;
    let report = landau_degeneracy(&result, cfg.tol()?);
    let levels = report.levels(cfg.min_cluster()?);
    let spacings: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
    let mass = constants.get("m").copied().unwrap_or(1.0);
    let cyclotron = disc.central_field / mass;
    let mut value = json!({
        "command": "spectrum",
        "model": preset.name,
        "grid": {"points": grid.points, "extent": grid.extent, "axis": grid.axis + 1, "spacing": grid.spacing()},
        "constants": constants,
        "seed": opts.seed,
        "k": result.count,
        "method": result.method,
        "cycles": result.cycles,
        "eigenvalues": result.eigenvalues,
        "residuals": result.residuals,
        "hermiticity_defect": disc.hermiticity_defect,
        "magnetic_length": disc.magnetic_length,
        "too_coarse": disc.too_coarse(),
        "warnings": disc.warnings,
        "clusters": report.clusters,
        "levels": levels,
        "spacings": spacings,
        "cyclotron_frequency": cyclotron,
        "spacing_over_cyclotron": spacings.iter().map(|s| s / cyclotron).collect::<Vec<_>>(),
    });
    if let Some(omega) = omega_for(&preset, &constants) {
        value["Omega"] = json!(omega);
        value["spacing_over_Omega"] = json!(spacings.iter().map(|s| s / omega).collect::<Vec<_>>());
    }
    let mut csv = String::from("index,eigenvalue,residual\n");
    for (i, (e, r)) in result.eigenvalues.iter().zip(&result.residuals).enumerate() {
        csv.push_str(&format!("{},{},{}\n", i, e, r));
    }
    emit(cfg, &value, Some(csv))
}

pub fn holonomy(cfg: &RunConfig) -> Result<(), CliError> {
    let preset = cfg.preset()?.unwrap_or_else(warpdef::models::aharonov_bohm);
    let constants = cfg.constants_f64()?;
    let fields = preset.gauge_fields().map_err(gauge_err)?;
    let axis = cfg.axis()?;
    let radii = cfg.floats("radius", "0.5,1,2")?;
    let center: Vec<f64> = cfg.floats("center", "0,0,0")?;
    if center.len() != 3 {
        return Err(CliError::Config("center takes three coordinates".into()));
    }
    let points = cfg.points()?;
    let mut loops = Vec::new();
    for (index, field) in fields.iter().enumerate() {
        let g = field.coupling.eval_f64(&constants).ok().filter(|z| z.im == 0.0).map(|z| z.re);
        for &radius in &radii {
            let lp = Loop { center: [center[0], center[1], center[2]], ..Loop::around_axis(radius, axis) };
            let value = loop_integral(field, &lp, points, &constants).map_err(spectra_err)?;
            let phase = g.map(|g| {
                let z = interference_phase(g, value);
                [z.re, z.im]
            });
            loops.push(json!({
                "field": index,
                "radius": radius,
                "center": lp.center,
                "encircles_axis": lp.encircles_axis(),
                "holonomy": value,
                "phase": phase,
            }));
        }
    }
    let report = json!({
        "command": "holonomy",
        "model": preset.name,
        "axis": axis + 1,
        "orientation": "clockwise in the ordered plane of the two remaining axes",
        "points": points,
        "constants": constants,
        "loops": loops,
    });
    emit(cfg, &report, None)
}

pub fn gauge(cfg: &RunConfig) -> Result<(), CliError> {
    let preset = require_preset(cfg, "gauge")?;
    let conv = convention(cfg)?;
    let mut entries = Vec::new();
    let mut passed = true;
    for (spec, coupling) in preset.specs.iter().zip(&preset.couplings) {
        let field = extract_gauge_field(spec, coupling).map_err(gauge_err)?;
        let by_commutator = field_strength_in(conv, spec, coupling).map_err(gauge_err)?;
        let by_curl = curl(&field);
        let potential = match coupling.inverse() {
            Ok(inv) if preset.specs.len() == 1 => preset.potential.scale(&inv),
            _ => CoordFunction::zero(),
        };
        let jacobi = jacobi_maxwell_report_in(conv, spec, coupling, &potential).map_err(gauge_err)?;
        let agree = by_commutator.agrees_with(&by_curl);
        let bianchi = bianchi_holds(&by_commutator);
        passed &= agree && bianchi && jacobi.all_zero();
        entries.push(json!({
            "coupling": coupling.to_string(),
            "potential_A": field.a.iter().map(expr_text).collect::<Vec<_>>(),
            "field_strength_commutators": strength_text(&by_commutator),
            "field_strength_curl": strength_text(&by_curl),
            "routes_agree": agree,
            "bianchi": bianchi,
            "jacobi_maxwell": jacobi,
        }));
    }
    let report = json!({
        "command": "gauge",
        "model": preset.name,
        "convention": format!("{:?}", conv),
        "fields": entries,
        "passed": passed,
    });
    emit(cfg, &report, None)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Failure)
    }
}

pub fn commutator(cfg: &RunConfig, lhs: &str, rhs: &str) -> Result<(), CliError> {
    let conv = convention(cfg)?;
    let a = parse(lhs).map_err(|e| CliError::Config(format!("lhs: {}", e)))?;
    let b = parse(rhs).map_err(|e| CliError::Config(format!("rhs: {}", e)))?;
    let c = commutator_in(conv, &a, &b);
    let report = json!({
        "command": "commutator",
        "convention": format!("{:?}", conv),
        "lhs": a.to_string(),
        "rhs": b.to_string(),
        "commutator": c.to_string(),
        "terms": to_json(&c),
    });
    emit(cfg, &report, None)
}
