//! Finite-difference discretization of deformed Hamiltonians on a transverse plane.
//!
//! The kinetic term `(P + s)^2 / 2m` becomes a five-point stencil whose links
//! carry the Peierls phase `exp(i ∫ s·dl)`. Nodes sit at `-L/2 + (i+1) h` with
//! `h = L/(N+1)` and Dirichlet walls at `±L/2`; for even `N` no node lies on the axis.

use std::collections::BTreeMap;

use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;

use super::SpectraError;
use crate::deform::{inverse_two_m, momentum_shift};
use crate::models::ModelPreset;
use crate::opalg::{CoordFunction, NumericCoord};

/// Points per axis below which a warning is attached.
pub const MIN_POINTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub points: usize,
    pub extent: f64,
    /// Field axis; the grid spans the two remaining axes at zero height.
    pub axis: usize,
}

impl GridSpec {
    pub fn new(points: usize, extent: f64, axis: usize) -> Result<Self, SpectraError> {
        if points < 2 {
            return Err(SpectraError::Grid(format!("need at least 2 points per axis, got {}", points)));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(SpectraError::Grid(format!("extent must be positive, got {}", extent)));
        }
        if axis > 2 {
            return Err(SpectraError::Grid(format!("axis {} out of range", axis)));
        }
        Ok(GridSpec { points, extent, axis })
    }

    pub fn spacing(&self) -> f64 {
        self.extent / (self.points as f64 + 1.0)
    }

    pub fn node(&self, i: usize) -> f64 {
        -0.5 * self.extent + (i as f64 + 1.0) * self.spacing()
    }

    pub fn plane(&self) -> [usize; 2] {
        match self.axis {
            0 => [1, 2],
            1 => [2, 0],
            _ => [0, 1],
        }
    }

    pub fn unknowns(&self) -> usize {
        self.points * self.points
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.points + b
    }

    pub fn position(&self, a: usize, b: usize) -> [f64; 3] {
        let [pa, pb] = self.plane();
        let mut x = [0.0; 3];
        x[pa] = self.node(a);
        x[pb] = self.node(b);
        x
    }
}

/// Sparse hermitian matrix stored by rows, columns ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl HermitianMatrix {
    pub fn from_rows(rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        let n = rows.len();
        let rows = rows
            .into_iter()
            .map(|mut r| {
                r.sort_by_key(|e| e.0);
                r
            })
            .collect();
        HermitianMatrix { n, rows }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[(usize, Complex64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match self.rows[i].binary_search_by_key(&j, |e| e.0) {
            Ok(pos) => self.rows[i][pos].1,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in row {
                acc += v * x[*j];
            }
            y[i] = acc;
        }
    }

    /// `max |H_ij - conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                worst = worst.max((v - self.get(*j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn bandwidth(&self) -> usize {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(j, _)| i.abs_diff(*j)))
            .max()
            .unwrap_or(0)
    }

    pub fn is_real(&self) -> bool {
        self.rows.iter().flatten().all(|(_, v)| v.im == 0.0)
    }

    /// Row-sum bound on the spectrum, `[min, max]`.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, row) in self.rows.iter().enumerate() {
            let mut d = 0.0;
            let mut off = 0.0;
            for (j, v) in row {
                if *j == i {
                    d = v.re;
                } else {
                    off += v.norm();
                }
            }
            lo = lo.min(d - off);
            hi = hi.max(d + off);
        }
        (lo, hi)
    }

    pub fn to_dense(&self) -> Mat<Complex64> {
        let mut m = Mat::zeros(self.n, self.n);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                m[(i, *j)] = *v;
            }
        }
        m
    }
}

#[derive(Clone, Debug)]
pub struct Discretization {
    pub matrix: HermitianMatrix,
    pub grid: GridSpec,
    pub hermiticity_defect: f64,
    /// `1/sqrt(max |b|)` with `b` the field strength of the shift, when nonzero.
    pub magnetic_length: Option<f64>,
    /// `|b|` at the node nearest the center.
    pub central_field: f64,
    pub potential_min: f64,
    pub warnings: Vec<String>,
}

impl Discretization {
    pub fn too_coarse(&self) -> bool {
        !self.warnings.is_empty()
    }
}

/// Total momentum shift of a preset.
pub fn preset_shift(preset: &ModelPreset) -> [CoordFunction; 3] {
    let mut total = [CoordFunction::zero(), CoordFunction::zero(), CoordFunction::zero()];
    for spec in &preset.specs {
        for (t, s) in total.iter_mut().zip(momentum_shift(spec)) {
            t.add_assign_ref(&s);
        }
    }
    total
}

pub fn discretize(
    preset: &ModelPreset,
    grid: &GridSpec,
    constants: &BTreeMap<String, f64>,
) -> Result<Discretization, SpectraError> {
    discretize_fields(&preset_shift(preset), &preset.potential, grid, constants)
}

fn real_value(f: &NumericCoord, x: [f64; 3], what: &'static str) -> Result<f64, SpectraError> {
    let v = f.eval(x)?;
    if v.im.abs() > 1e-12 * (1.0 + v.re.abs()) {
        return Err(SpectraError::NotReal(what));
    }
    Ok(v.re)
}

/// Discretizes `(P + s)^2 / 2m + V` on the grid.
pub fn discretize_fields(
    shift: &[CoordFunction; 3],
    potential: &CoordFunction,
    grid: &GridSpec,
    constants: &BTreeMap<String, f64>,
) -> Result<Discretization, SpectraError> {
    let inv2m = inverse_two_m().eval_f64(constants).map_err(crate::opalg::EvalError::from)?;
    if inv2m.im != 0.0 || !(inv2m.re > 0.0) || !inv2m.re.is_finite() {
        return Err(SpectraError::NotReal("mass"));
    }
    let [pa, pb] = grid.plane();
    let s = [NumericCoord::new(&shift[pa], constants)?, NumericCoord::new(&shift[pb], constants)?];
    let v = NumericCoord::new(potential, constants)?;
    let b_sym = &shift[pb].partial_derivative(pa) - &shift[pa].partial_derivative(pb);
    let b = NumericCoord::new(&b_sym, constants)?;

    let n = grid.points;
    let h = grid.spacing();
    let hop = inv2m.re / (h * h);
    let mut rows = vec![Vec::with_capacity(5); grid.unknowns()];
    let mut potential_min = f64::INFINITY;
    let mut b_max: f64 = 0.0;
    for a in 0..n {
        for c in 0..n {
            let u = grid.index(a, c);
            let x = grid.position(a, c);
            let vx = real_value(&v, x, "potential")?;
            potential_min = potential_min.min(vx);
            b_max = b_max.max(real_value(&b, x, "field strength")?.abs());
            rows[u].push((u, Complex64::new(4.0 * hop + vx, 0.0)));
            for (dir, (da, dc)) in [(0usize, (1i64, 0i64)), (0, (-1, 0)), (1, (0, 1)), (1, (0, -1))] {
                let (na, nc) = (a as i64 + da, c as i64 + dc);
                if na < 0 || nc < 0 || na >= n as i64 || nc >= n as i64 {
                    continue;
                }
                let y = grid.position(na as usize, nc as usize);
                let phase = link_integral(&s[dir], x, y)?;
                rows[u].push((grid.index(na as usize, nc as usize), -hop * Complex64::from_polar(1.0, phase)));
            }
        }
    }
    let central_field = real_value(&b, grid.position(n / 2, n / 2), "field strength")?.abs();
    let matrix = HermitianMatrix::from_rows(rows);
    let hermiticity_defect = matrix.hermiticity_defect();
    let magnetic_length = (b_max > 0.0).then(|| 1.0 / b_max.sqrt());
    let mut warnings = Vec::new();
    if n < MIN_POINTS {
        warnings.push(format!("grid has {} points per axis, fewer than {}", n, MIN_POINTS));
    }
    if let Some(l) = magnetic_length {
        if l < 4.0 * h {
            warnings.push(format!("grid too coarse: magnetic length {:.4} is below 4 spacings ({:.4})", l, 4.0 * h));
        }
    }
    Ok(Discretization { matrix, grid: *grid, hermiticity_defect, magnetic_length, central_field, potential_min, warnings })
}

/// `∫_x^y s·dl` along a straight grid link, Simpson's rule.
fn link_integral(s: &NumericCoord, x: [f64; 3], y: [f64; 3]) -> Result<f64, SpectraError> {
    if s.is_zero() {
        return Ok(0.0);
    }
    let mid = [0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1]), 0.5 * (x[2] + y[2])];
    let len = ((y[0] - x[0]).powi(2) + (y[1] - x[1]).powi(2) + (y[2] - x[2]).powi(2)).sqrt();
    let sign = if y.iter().zip(&x).map(|(a, b)| a - b).sum::<f64>() > 0.0 { 1.0 } else { -1.0 };
    let total = real_value(s, x, "shift")? + 4.0 * real_value(s, mid, "shift")? + real_value(s, y, "shift")?;
    Ok(sign * len * total / 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{aharonov_bohm, free_particle, landau};

    fn constants(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn free_preset_is_the_laplacian() {
        let grid = GridSpec::new(4, 5.0, 0).unwrap();
        let d = discretize(&free_particle(), &grid, &constants(&[("m", 2.0)])).unwrap();
        let h = grid.spacing();
        assert!(d.matrix.is_real());
        assert!((d.matrix.get(0, 0).re - 1.0 / h / h).abs() < 1e-12);
        assert!((d.matrix.get(0, 1).re + 0.25 / h / h).abs() < 1e-12);
        assert!((d.matrix.get(0, 4).re + 0.25 / h / h).abs() < 1e-12);
        assert_eq!(d.matrix.get(0, 5), Complex64::new(0.0, 0.0));
        assert_eq!(d.matrix.bandwidth(), 4);
        assert!(d.too_coarse());
    }

    #[test]
    fn landau_is_hermitian() {
        let grid = GridSpec::new(24, 4.0, 0).unwrap();
        let d = discretize(&landau(), &grid, &constants(&[("m", 1.0), ("e", 1.0), ("B", 1.0)])).unwrap();
        assert!(!d.matrix.is_real());
        assert!(d.hermiticity_defect < 1e-12);
        assert!((d.magnetic_length.unwrap() - 1.0).abs() < 1e-12);
        assert!(d.warnings.is_empty());
    }

    #[test]
    fn coarse_grid_is_flagged() {
        let grid = GridSpec::new(16, 40.0, 0).unwrap();
        let d = discretize(&landau(), &grid, &constants(&[("m", 1.0), ("e", 1.0), ("B", 1.0)])).unwrap();
        assert!(d.too_coarse());
    }

    #[test]
    fn aharonov_bohm_entries_are_finite() {
        let grid = GridSpec::new(16, 4.0, 0).unwrap();
        let c = constants(&[("m", 1.0), ("e", 1.0), ("phi_M", 0.7)]);
        let d = discretize(&aharonov_bohm(), &grid, &c).unwrap();
        assert!(d.matrix.rows.iter().flatten().all(|(_, v)| v.re.is_finite() && v.im.is_finite()));
        assert!(d.hermiticity_defect < 1e-12);
        assert!(d.magnetic_length.map_or(true, |l| l > 1e3));
        let odd = GridSpec::new(17, 4.0, 0).unwrap();
        assert!(discretize(&aharonov_bohm(), &odd, &c).is_err());
    }

    #[test]
    fn unbound_constant_is_an_error() {
        let grid = GridSpec::new(16, 4.0, 0).unwrap();
        assert!(matches!(
            discretize(&landau(), &grid, &constants(&[("m", 1.0)])),
            Err(SpectraError::Eval(_))
        ));
        assert!(GridSpec::new(1, 1.0, 0).is_err());
        assert!(GridSpec::new(16, -1.0, 0).is_err());
    }
}
