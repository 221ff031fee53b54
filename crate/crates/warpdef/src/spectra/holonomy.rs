//! Line integrals of gauge potentials around circular loops.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::SpectraError;
use crate::gauge::GaugeField;
use crate::opalg::NumericCoord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Orientation {
    /// Counterclockwise in the ordered plane `(a, b)` returned by [`Loop::plane`].
    Counterclockwise,
    Clockwise,
}

/// A circle in the plane orthogonal to `axis`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Loop {
    pub center: [f64; 3],
    pub radius: f64,
    pub axis: usize,
    pub orientation: Orientation,
}

impl Loop {
    /// Clockwise circle around the axis, the orientation in which the preset potentials carry positive flux.
    pub fn around_axis(radius: f64, axis: usize) -> Self {
        Loop { center: [0.0; 3], radius, axis, orientation: Orientation::Clockwise }
    }

    pub fn plane(&self) -> [usize; 2] {
        match self.axis {
            0 => [1, 2],
            1 => [2, 0],
            _ => [0, 1],
        }
    }

    /// Distance from the center to the field axis, measured in the loop plane.
    pub fn offset(&self) -> f64 {
        let [a, b] = self.plane();
        self.center[a].hypot(self.center[b])
    }

    pub fn encircles_axis(&self) -> bool {
        self.offset() < self.radius
    }
}

/// `∮ A·dl` by the trapezoidal rule with `points` nodes.
pub fn holonomy(
    field: &GaugeField,
    lp: &Loop,
    points: usize,
    constants: &BTreeMap<String, f64>,
) -> Result<f64, SpectraError> {
    if !(lp.radius > 0.0) || points < 3 {
        return Err(SpectraError::SingularLoop(format!("radius {} with {} points", lp.radius, points)));
    }
    if (lp.offset() - lp.radius).abs() <= 1e-12 * lp.radius {
        return Err(SpectraError::SingularLoop("loop passes through the axis".into()));
    }
    let [pa, pb] = lp.plane();
    let aa = NumericCoord::new(&field.a[pa], constants)?;
    let ab = NumericCoord::new(&field.a[pb], constants)?;
    let sense = match lp.orientation {
        Orientation::Counterclockwise => 1.0,
        Orientation::Clockwise => -1.0,
    };
    let dt = std::f64::consts::TAU / points as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..points {
        let t = sense * i as f64 * dt;
        let (s, c) = t.sin_cos();
        let mut x = lp.center;
        x[pa] += lp.radius * c;
        x[pb] += lp.radius * s;
        let tangent = [-lp.radius * s * sense, lp.radius * c * sense];
        total += aa.eval(x)? * tangent[0] + ab.eval(x)? * tangent[1];
    }
    if total.im.abs() > 1e-9 * (1.0 + total.re.abs()) {
        return Err(SpectraError::NotReal("holonomy"));
    }
    Ok(total.re * dt)
}

/// `exp(i e φ)`.
pub fn interference_phase(e: f64, phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, e * phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{aharonov_bohm, flux_equivalent, landau};
    use crate::opalg::scalar::{rat, rational_to_f64};
    use std::f64::consts::PI;

    fn constants(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn aharonov_bohm_flux() {
        let field = &aharonov_bohm().gauge_fields().unwrap()[0];
        let c = constants(&[("e", 1.3), ("phi_M", 0.8)]);
        for r in [0.5, 1.0, 2.0] {
            let h = holonomy(field, &Loop::around_axis(r, 0), 256, &c).unwrap();
            assert!((h - 0.8).abs() < 0.8 * 5e-3, "{}", h);
        }
        let off = Loop { center: [0.0, 3.0, 0.0], radius: 1.0, axis: 0, orientation: Orientation::Clockwise };
        assert!(!off.encircles_axis());
        assert!(holonomy(field, &off, 256, &c).unwrap().abs() < 1e-3 * 0.8);
        let through = Loop { center: [0.0, 1.0, 0.0], ..off };
        assert!(matches!(holonomy(field, &through, 256, &c), Err(SpectraError::SingularLoop(_))));
    }

    #[test]
    fn constant_field_flux() {
        let field = &landau().gauge_fields().unwrap()[0];
        let c = constants(&[("e", 1.0), ("B", 0.7)]);
        let mut lp = Loop::around_axis(1.5, 0);
        let cw = holonomy(field, &lp, 256, &c).unwrap();
        assert!((cw - 0.7 * PI * 1.5 * 1.5).abs() < 1e-10);
        lp.orientation = Orientation::Counterclockwise;
        assert!((holonomy(field, &lp, 256, &c).unwrap() + cw).abs() < 1e-10);
    }

    #[test]
    fn phases() {
        assert!((interference_phase(1.0, 2.0 * PI) - 1.0).norm() < 1e-12);
        assert!((interference_phase(3.0, 0.0) - 1.0).norm() < 1e-15);
        assert!((interference_phase(1.0, PI) + 1.0).norm() < 1e-12);
        for (a, b, e) in [(rat(1, 1), rat(3, 1), rat(1, 1)), (rat(1, 2), rat(0, 1), rat(2, 1)), (rat(1, 3), rat(0, 1), rat(1, 1))] {
            let same = (interference_phase(rational_to_f64(&e), rational_to_f64(&a) * PI)
                - interference_phase(rational_to_f64(&e), rational_to_f64(&b) * PI))
            .norm()
                < 1e-9;
            assert_eq!(same, flux_equivalent(&a, &b, &e));
        }
    }
}
