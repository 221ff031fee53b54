//! Run configuration: a flat `key = value` file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use warpdef::models::{by_name, ModelPreset};
use warpdef::opalg::{parse_scalar, CoordFunction, DeformationMatrix, QSpec, Rational, Scalar, KNOWN_CONSTANTS};
use warpdef::deform::DeformationSpec;

use crate::CliError;

pub const KEYS: &[&str] = &[
    "model", "B", "Q", "axis", "strength", "coupling", "potential", "operator", "constants", "grid", "k", "seed",
    "out", "format", "only", "inject_sign_flip", "radius", "points", "center", "tol", "min_cluster",
];

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {}", path.display(), e)))?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {}: expected key = value", lineno + 1)))?;
            let key = k.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(config_err(format!("line {}: unknown key `{}`", lineno + 1, key)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(RunConfig { values })
    }

    /// Flags win over file entries.
    pub fn overlay(&mut self, flags: BTreeMap<String, String>) {
        self.values.extend(flags);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| config_err(format!("bad value for {}: `{}`", key, v))),
        }
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.parsed("seed", 0x5eed)
    }

    pub fn k(&self) -> Result<usize, CliError> {
        self.parsed("k", 16)
    }

    pub fn points(&self) -> Result<usize, CliError> {
        self.parsed("points", 256)
    }

    pub fn tol(&self) -> Result<f64, CliError> {
        self.parsed("tol", 1e-3)
    }

    pub fn min_cluster(&self) -> Result<usize, CliError> {
        self.parsed("min_cluster", 3)
    }

    pub fn flip(&self) -> Result<bool, CliError> {
        self.parsed("inject_sign_flip", false)
    }

    pub fn csv(&self) -> Result<bool, CliError> {
        match self.get("format").unwrap_or("json") {
            "json" => Ok(false),
            "csv" => Ok(true),
            other => Err(config_err(format!("unknown format `{}`", other))),
        }
    }

    /// Field axis, given 1-based on the command line.
    pub fn axis(&self) -> Result<usize, CliError> {
        let a: usize = self.parsed("axis", 1)?;
        if !(1..=3).contains(&a) {
            return Err(config_err(format!("axis must be 1, 2 or 3, got {}", a)));
        }
        Ok(a - 1)
    }

    pub fn grid(&self) -> Result<(usize, f64), CliError> {
        let text = self.get("grid").unwrap_or("128,12");
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [n, l] => {
                let n = n.parse().map_err(|_| config_err(format!("bad grid size `{}`", n)))?;
                let l = parse_f64(l)?;
                Ok((n, l))
            }
            _ => Err(config_err(format!("grid must be N,L, got `{}`", text))),
        }
    }

    pub fn floats(&self, key: &str, default: &str) -> Result<Vec<f64>, CliError> {
        self.get(key).unwrap_or(default).split(',').map(|s| parse_f64(s.trim())).collect()
    }

    /// `None` runs every group; an empty value selects none.
    pub fn only(&self) -> Result<Option<Vec<String>>, CliError> {
        let Some(text) = self.get("only") else { return Ok(None) };
        let groups: Vec<String> = text.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        for g in &groups {
            if !warpdef::verify::GROUPS.contains(&g.as_str()) {
                return Err(config_err(format!("unknown group `{}`; known: {}", g, warpdef::verify::GROUPS.join(","))));
            }
        }
        Ok(Some(groups))
    }

    pub fn constants(&self) -> Result<BTreeMap<String, Rational>, CliError> {
        let mut out = BTreeMap::new();
        let Some(text) = self.get("constants") else { return Ok(out) };
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| config_err(format!("constant `{}` is not k=v", item)))?;
            let name = warpdef::opalg::canonical_constant(k.trim()).to_string();
            if !KNOWN_CONSTANTS.contains(&name.as_str()) {
                return Err(config_err(format!("unknown constant `{}`", k.trim())));
            }
            out.insert(name, parse_rational(v.trim())?);
        }
        Ok(out)
    }

    pub fn constants_f64(&self) -> Result<BTreeMap<String, f64>, CliError> {
        Ok(self.constants()?.iter().map(|(k, v)| (k.clone(), rational_f64(v))).collect())
    }

    /// Preset by name, or an inline specification assembled from `B`, `Q`, `axis` and `strength`.
    pub fn preset(&self) -> Result<Option<ModelPreset>, CliError> {
        let inline = ["B", "Q", "strength", "coupling", "potential"].iter().any(|k| self.has(k));
        if let Some(name) = self.get("model") {
            if inline {
                return Err(config_err("--model cannot be combined with an inline specification"));
            }
            return by_name(name).map(Some).ok_or_else(|| config_err(format!("unknown model `{}`", name)));
        }
        if !inline && !self.has("axis") {
            return Ok(None);
        }
        let axis = self.axis()?;
        let generator = self.generator()?;
        let textbook = match (self.get("B"), self.get("strength")) {
            (Some(_), Some(_)) => return Err(config_err("give either --B or --strength")),
            (Some(b), None) => matrix_entries(b)?,
            (None, s) => DeformationMatrix::along_axis(axis, scalar(s.unwrap_or("m*Omega"))?),
        };
        textbook.check_skew().map_err(|e| config_err(e.to_string()))?;
        let coupling = scalar(self.get("coupling").unwrap_or("-m"))?;
        if coupling.is_zero() {
            return Err(config_err("coupling must be nonzero"));
        }
        let potential = match self.get("potential") {
            Some(p) => warpdef::opalg::parse_coord(p, &[]).map_err(|e| config_err(e.to_string()))?,
            None => CoordFunction::zero(),
        };
        Ok(Some(ModelPreset {
            name: "inline",
            specs: vec![DeformationSpec::new(-&textbook, generator)],
            couplings: vec![coupling],
            potential,
            reference: warpdef::opalg::OperatorExpr::zero(),
            linear_reference: None,
            sign_note: "inline matrices are textbook matrices and are stored negated",
        }))
    }

    fn generator(&self) -> Result<QSpec, CliError> {
        let text = self.get("Q").unwrap_or("coordinate");
        let (name, param) = match text.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (text.trim(), None),
        };
        match (name, param) {
            ("coordinate" | "x", None) => Ok(QSpec::coordinate()),
            ("radial", Some(n)) => Ok(QSpec::radial_power(parse_rational(n)?)),
            ("transverse", None) => Ok(QSpec::transverse_radial()),
            _ => Err(config_err(format!("unknown Q preset `{}`; use coordinate, radial:n or transverse", text))),
        }
    }
}

pub fn scalar(text: &str) -> Result<Scalar, CliError> {
    parse_scalar(text, &[]).map_err(|e| config_err(format!("`{}`: {}", text, e)))
}

/// Nine row-major entries, or an axial triple `b` with `B_ij = ε_ijk b_k`.
fn matrix_entries(text: &str) -> Result<DeformationMatrix, CliError> {
    let parts: Vec<Scalar> = text.split(',').map(|s| scalar(s.trim())).collect::<Result<_, _>>()?;
    match parts.len() {
        1 if parts[0].is_zero() => Ok(DeformationMatrix::zero()),
        3 => Ok(DeformationMatrix::axial([parts[0].clone(), parts[1].clone(), parts[2].clone()])),
        9 => {
            let e = |i: usize| parts[i].clone();
            Ok(DeformationMatrix::from_entries([[e(0), e(1), e(2)], [e(3), e(4), e(5)], [e(6), e(7), e(8)]]))
        }
        n => Err(config_err(format!("--B takes 9 entries or an axial triple, got {}", n))),
    }
}

/// Integers, decimals and fractions, exactly.
pub fn parse_rational(text: &str) -> Result<Rational, CliError> {
    let bad = || config_err(format!("bad number `{}`", text));
    if let Some((n, d)) = text.split_once('/') {
        let n = parse_rational(n.trim())?;
        let d = parse_rational(d.trim())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(n / d);
    }
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{}{}", int, frac).parse().map_err(|_| bad())?;
    let mut den = BigInt::one();
    for _ in 0..frac.len() {
        den *= 10;
    }
    let r = Rational::new(digits, den);
    Ok(if neg { -r } else { r })
}

pub fn parse_f64(text: &str) -> Result<f64, CliError> {
    parse_rational(text).map(|r| rational_f64(&r))
}

pub fn rational_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}
