//! Catalog of physical systems obtained by deforming a free or hydrogen-like Hamiltonian.
//!
//! Every preset stores its matrix in the form used by [`crate::deform`], where
//! the momentum shift is `-(BQ)_k ∂_j Q_k`. The textbook matrices are therefore
//! stored with the opposite sign, which makes the deformed momenta read
//! `P_j + (B Q)_k ∂_j Q_k` with the textbook `B`.

use num_traits::Signed;
use serde::Serialize;

use crate::deform::{deform_operator_in, free_hamiltonian, guiding_center, DeformError, DeformationSpec};
use crate::gauge::{extract_gauge_field, GaugeError, GaugeField};
use crate::opalg::scalar::{rat, rational_to_f64, Rational};
use crate::opalg::{
    commutator, equals, parse, parse_coord, parse_scalar, to_json, Convention, CoordFunction, DeformationMatrix,
    MatrixError, OperatorExpr, QSpec, Scalar,
};

/// `Ω = 2 G M ω / r_hs`, field inside a hollow spinning sphere.
pub const HOLLOW_SPHERE_OMEGA: &str = "(2*G*M*r_hs^-1*omega)";
/// `Ω = 2 G I ω`, Lense–Thirring strength.
pub const LENSE_THIRRING_OMEGA: &str = "(2*G*I*omega)";

#[derive(Clone, Debug)]
pub struct ModelPreset {
    pub name: &'static str,
    /// Applied in order.
    pub specs: Vec<DeformationSpec>,
    /// One coupling per spec.
    pub couplings: Vec<Scalar>,
    /// Added to the free Hamiltonian before deformation.
    pub potential: CoordFunction,
    pub reference: OperatorExpr,
    /// Reference linearized in `G`, compared after dropping `G^2` and higher.
    pub linear_reference: Option<OperatorExpr>,
    pub sign_note: &'static str,
}

/// Outcome of comparing a preset with its references.
#[derive(Clone, Debug, Serialize)]
pub struct ModelCheck {
    pub name: String,
    pub exact: bool,
    pub linearized: Option<bool>,
    pub order_independent: Option<bool>,
}

impl ModelCheck {
    pub fn passed(&self) -> bool {
        self.exact && self.linearized.unwrap_or(true) && self.order_independent.unwrap_or(true)
    }
}

/// Constant whose degree is truncated in linearized comparisons.
pub const SMALL_CONSTANT: &str = "G";

impl ModelPreset {
    pub fn base_hamiltonian(&self) -> OperatorExpr {
        &free_hamiltonian() + &OperatorExpr::from_coord(self.potential.clone())
    }

    pub fn deformed_in(&self, conv: Convention) -> Result<OperatorExpr, DeformError> {
        let mut h = self.base_hamiltonian();
        for spec in &self.specs {
            h = deform_operator_in(conv, &h, spec)?;
        }
        Ok(h)
    }

    pub fn deformed(&self) -> Result<OperatorExpr, DeformError> {
        self.deformed_in(Convention::C1)
    }

    pub fn check_in(&self, conv: Convention) -> Result<ModelCheck, DeformError> {
        let h = self.deformed_in(conv)?;
        let exact = equals(&h, &self.reference);
        let linearized = self.linear_reference.as_ref().map(|lin| {
            equals(&h.truncate(SMALL_CONSTANT, 1), &lin.truncate(SMALL_CONSTANT, 1))
        });
        let order_independent = if self.specs.len() == 2 {
            let mut swapped = self.base_hamiltonian();
            for spec in self.specs.iter().rev() {
                swapped = deform_operator_in(conv, &swapped, spec)?;
            }
            Some(equals(&h, &swapped))
        } else {
            None
        };
        Ok(ModelCheck { name: self.name.to_string(), exact, linearized, order_independent })
    }

    pub fn check(&self) -> Result<ModelCheck, DeformError> {
        self.check_in(Convention::C1)
    }

    pub fn gauge_fields(&self) -> Result<Vec<GaugeField>, GaugeError> {
        self.specs.iter().zip(&self.couplings).map(|(s, g)| extract_gauge_field(s, g)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let specs: Vec<_> = self
            .specs
            .iter()
            .zip(&self.couplings)
            .map(|(s, g)| {
                serde_json::json!({
                    "matrix": s.matrix.to_string(),
                    "generator": s.generator.preset.to_string(),
                    "Q": s.generator.components.iter().map(|c| OperatorExpr::from_coord(c.clone()).to_string()).collect::<Vec<_>>(),
                    "coupling": g.to_string(),
                })
            })
            .collect();
        serde_json::json!({
            "name": self.name,
            "specs": specs,
            "potential": OperatorExpr::from_coord(self.potential.clone()).to_string(),
            "reference": self.reference.to_string(),
            "reference_terms": to_json(&self.reference),
            "linearized_in": self.linear_reference.as_ref().map(|_| SMALL_CONSTANT),
            "sign_note": self.sign_note,
        })
    }
}

fn expr(text: &str) -> OperatorExpr {
    parse(text).unwrap_or_else(|e| panic!("preset expression `{}`: {}", text, e))
}

fn scalar(text: &str) -> Scalar {
    parse_scalar(text, &[]).unwrap_or_else(|e| panic!("preset scalar `{}`: {}", text, e))
}

/// Stored matrix for a textbook matrix `B_ij = c ε_ij1`.
fn along_x1(textbook_strength: &str) -> DeformationMatrix {
    DeformationMatrix::along_axis(0, -&scalar(textbook_strength))
}

const LANDAU_NOTE: &str = "textbook B_ij = -(e/2) eps_ijk B^k is stored negated; the induced potential is read with P - gA, so A = -(symmetric gauge A) and F_23 = -B";

fn landau_reference() -> OperatorExpr {
    expr("(P1^2 + (P2 - e*B*X3/2)^2 + (P3 + e*B*X2/2)^2)/(2*m)")
}

/// Undeformed `H₀`; not part of [`catalog`].
pub fn free_particle() -> ModelPreset {
    ModelPreset {
        name: "free",
        specs: Vec::new(),
        couplings: Vec::new(),
        potential: CoordFunction::zero(),
        reference: free_hamiltonian(),
        linear_reference: None,
        sign_note: "no deformation",
    }
}

pub fn landau() -> ModelPreset {
    ModelPreset {
        name: "landau",
        specs: vec![DeformationSpec::new(along_x1("-e*B/2"), QSpec::coordinate())],
        couplings: vec![scalar("e")],
        potential: CoordFunction::zero(),
        reference: landau_reference(),
        linear_reference: None,
        sign_note: LANDAU_NOTE,
    }
}

pub fn zeeman() -> ModelPreset {
    ModelPreset {
        name: "zeeman",
        potential: parse_coord("e^2*r^-1", &[]).unwrap(),
        reference: &landau_reference() + &expr("e^2*r^-1"),
        ..landau()
    }
}

pub fn aharonov_bohm() -> ModelPreset {
    ModelPreset {
        name: "aharonov_bohm",
        specs: vec![DeformationSpec::new(along_x1("-e*phi_M/(2*pi)"), QSpec::transverse_radial())],
        couplings: vec![scalar("e")],
        potential: CoordFunction::zero(),
        reference: expr(
            "(P1^2 + (P2 - e*phi_M*X3*rho^-2/(2*pi))^2 + (P3 + e*phi_M*X2*rho^-2/(2*pi))^2)/(2*m)",
        ),
        linear_reference: None,
        sign_note: "textbook B_ij = -(e phi_M/2 pi) eps_ij1 is stored negated; the induced potential equals the flux-line potential with P - eA",
    }
}

const GRAVITO_NOTE: &str = "textbook B_ij = m eps_ijk Omega^k is stored negated; with coupling -m the induced potential is h, and the linear term reads +h.P";

fn gravito_reference(omega: &str, radial: &str) -> (OperatorExpr, OperatorExpr) {
    let h2 = format!("{}*X3{}", omega, radial);
    let h3 = format!("(-{}*X2{})", omega, radial);
    let exact = expr(&format!("(P1^2 + (P2 + m*{h2})^2 + (P3 + m*{h3})^2)/(2*m)"));
    let linear = expr(&format!("(P1^2 + P2^2 + P3^2)/(2*m) + {h2}*P2 + {h3}*P3"));
    (exact, linear)
}

pub fn gravito_constant() -> ModelPreset {
    let (reference, linear) = gravito_reference(HOLLOW_SPHERE_OMEGA, "");
    ModelPreset {
        name: "gravito_constant",
        specs: vec![DeformationSpec::new(along_x1(&format!("m*{}", HOLLOW_SPHERE_OMEGA)), QSpec::coordinate())],
        couplings: vec![scalar("-m")],
        potential: CoordFunction::zero(),
        reference,
        linear_reference: Some(linear),
        sign_note: GRAVITO_NOTE,
    }
}

pub fn lense_thirring() -> ModelPreset {
    let (reference, linear) = gravito_reference(LENSE_THIRRING_OMEGA, "*r^-3");
    ModelPreset {
        name: "lense_thirring",
        specs: vec![DeformationSpec::new(
            along_x1(&format!("m*{}", LENSE_THIRRING_OMEGA)),
            QSpec::radial_power(rat(3, 2)),
        )],
        couplings: vec![scalar("-m")],
        potential: CoordFunction::zero(),
        reference,
        linear_reference: Some(linear),
        sign_note: "textbook B_ij = m eps_ijk Omega^k with Omega = 2 G I omega is stored negated; Q = X r^(-3/2) turns BQ.dQ into (BX)/r^3",
    }
}

pub fn gravito_zeeman() -> ModelPreset {
    let base = gravito_constant();
    ModelPreset {
        name: "gravito_zeeman",
        potential: parse_coord("e^2*r^-1", &[]).unwrap(),
        reference: &base.reference + &expr("e^2*r^-1"),
        linear_reference: base.linear_reference.as_ref().map(|l| l + &expr("e^2*r^-1")),
        ..base
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombinedKind {
    /// Constant magnetic and constant gravitomagnetic field, both with `Q = X`.
    Constant,
    /// Constant magnetic field with `Q = X` and Lense–Thirring field with `Q = X r^(-3/2)`.
    LenseThirring,
}

pub fn combined_em_gem(kind: CombinedKind) -> ModelPreset {
    let (omega, radial, gem) = match kind {
        CombinedKind::Constant => (HOLLOW_SPHERE_OMEGA, "", gravito_constant()),
        CombinedKind::LenseThirring => (LENSE_THIRRING_OMEGA, "*r^-3", lense_thirring()),
    };
    let pi2 = "(P2 - e*B*X3/2)";
    let pi3 = "(P3 + e*B*X2/2)";
    let h2 = format!("{}*X3{}", omega, radial);
    let h3 = format!("(-{}*X2{})", omega, radial);
    let reference = expr(&format!("(P1^2 + ({pi2} + m*{h2})^2 + ({pi3} + m*{h3})^2)/(2*m)"));
    let linear = expr(&format!("(P1^2 + {pi2}^2 + {pi3}^2)/(2*m) + {h2}*{pi2} + {h3}*{pi3}"));
    let landau = landau();
    ModelPreset {
        name: match kind {
            CombinedKind::Constant => "combined_constant",
            CombinedKind::LenseThirring => "combined_lense_thirring",
        },
        specs: vec![landau.specs[0].clone(), gem.specs[0].clone()],
        couplings: vec![scalar("e"), scalar("-m")],
        potential: CoordFunction::zero(),
        reference,
        linear_reference: Some(linear),
        sign_note: "magnetic part as in landau, gravitomagnetic part as in the single-field preset; the deformations are applied magnetic first",
    }
}

/// All presets by name.
pub fn catalog() -> Vec<ModelPreset> {
    vec![
        landau(),
        zeeman(),
        aharonov_bohm(),
        gravito_constant(),
        lense_thirring(),
        gravito_zeeman(),
        combined_em_gem(CombinedKind::Constant),
        combined_em_gem(CombinedKind::LenseThirring),
    ]
}

pub fn by_name(name: &str) -> Option<ModelPreset> {
    let canon = match name {
        "ab" | "aharonov-bohm" => "aharonov_bohm",
        "gravito" => "gravito_constant",
        "lt" | "lense-thirring" => "lense_thirring",
        "combined" => "combined_constant",
        "free" | "zero" => return Some(free_particle()),
        other => other,
    };
    catalog().into_iter().find(|p| p.name == canon)
}

/// `e (φ1 - φ2) / 2π ∈ ℤ`, with both fluxes given in units of `π`.
pub fn flux_equivalent(phi1_over_pi: &Rational, phi2_over_pi: &Rational, e: &Rational) -> bool {
    (e * (phi1_over_pi - phi2_over_pi) / Rational::from_integer(2.into())).is_integer()
}

/// Paramagnetic part of the Landau Hamiltonian: `(e B / 2m)(X2 P3 - X3 P2)`.
pub fn paramagnetic_term() -> OperatorExpr {
    expr("e*B*(X2*P3 - X3*P2)/(2*m)")
}

/// Substitutes `e = -2 m Ω / B` into the Landau preset; the result should be the constant gravitomagnetic preset.
pub fn landau_as_gravito() -> Result<(DeformationMatrix, OperatorExpr), crate::opalg::ScalarError> {
    let e_value = scalar(&format!("-2*m*{}/B", HOLLOW_SPHERE_OMEGA));
    let l = landau();
    Ok((l.specs[0].matrix.substitute("e", &e_value)?, l.reference.substitute("e", &e_value)?))
}

#[derive(Clone, Debug)]
pub struct GuidingCenter {
    pub coordinates: [OperatorExpr; 3],
    pub commutators: [[OperatorExpr; 3]; 3],
    /// `i (B⁻¹)_ij` on the transverse plane.
    pub expected: [[OperatorExpr; 3]; 3],
}

impl GuidingCenter {
    pub fn holds(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| self.commutators[i][j] == self.expected[i][j]))
    }
}

pub fn guiding_center_coordinates(b: &DeformationMatrix, axis: usize) -> Result<GuidingCenter, DeformError> {
    let coordinates = guiding_center(b, axis)?;
    let inv = b.transverse_inverse(axis).map_err(DeformError::from)?;
    let commutators = [0, 1, 2].map(|i| [0, 1, 2].map(|j| commutator(&coordinates[i], &coordinates[j])));
    let expected = [0, 1, 2].map(|i| [0, 1, 2].map(|j| OperatorExpr::scalar(&Scalar::i() * inv.entry(i, j))));
    Ok(GuidingCenter { coordinates, commutators, expected })
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BoundError {
    #[error("mass and field strength must be positive")]
    NonPositive,
}

#[derive(Clone, Debug, Serialize)]
pub struct UncertaintyBound {
    pub bound_symbolic: String,
    pub area_symbolic: String,
    pub bound: f64,
    pub area: f64,
    pub bound_exact: Option<String>,
}

/// Resolution limit `ħ/(mΩ)` and the corresponding area `2πħ/(mΩ)`.
pub fn uncertainty_bound(m: &Rational, omega: &Rational, hbar: &Rational) -> Result<UncertaintyBound, BoundError> {
    if !m.is_positive() || !omega.is_positive() || !hbar.is_positive() {
        return Err(BoundError::NonPositive);
    }
    let exact = hbar / (m * omega);
    let bound = rational_to_f64(&exact);
    Ok(UncertaintyBound {
        bound_symbolic: uncertainty_symbols().0.to_string(),
        area_symbolic: uncertainty_symbols().1.to_string(),
        bound,
        area: 2.0 * std::f64::consts::PI * bound,
        bound_exact: Some(crate::opalg::scalar::fmt_rational(&exact)),
    })
}

/// Floating-point variant for physical values that are not convenient as rationals.
pub fn uncertainty_bound_f64(m: f64, omega: f64, hbar: f64) -> Result<UncertaintyBound, BoundError> {
    if !(m > 0.0 && omega > 0.0 && hbar > 0.0) {
        return Err(BoundError::NonPositive);
    }
    let bound = hbar / (m * omega);
    Ok(UncertaintyBound {
        bound_symbolic: uncertainty_symbols().0.to_string(),
        area_symbolic: uncertainty_symbols().1.to_string(),
        bound,
        area: 2.0 * std::f64::consts::PI * bound,
        bound_exact: None,
    })
}

/// `ħ/(mΩ)` and `2πħ/(mΩ)` as symbolic scalars.
pub fn uncertainty_symbols() -> (Scalar, Scalar) {
    (scalar("hbar/(m*Omega)"), scalar("2*pi*hbar/(m*Omega)"))
}

/// Checks that the transverse block is invertible before asking for guiding centers.
pub fn check_transverse(b: &DeformationMatrix, axis: usize) -> Result<(), MatrixError> {
    b.transverse_inverse(axis).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{curl, field_strength};
    use crate::opalg::scalar::rat_int;
    use crate::opalg::coord_equals;

    #[test]
    fn every_preset_matches_its_reference() {
        for p in catalog() {
            let c = p.check().unwrap();
            assert!(c.passed(), "{:?}", c);
        }
    }

    #[test]
    fn gauge_fields_agree_with_field_strength() {
        for p in catalog() {
            for (spec, g) in p.specs.iter().zip(&p.couplings) {
                let by_curl = curl(&extract_gauge_field(spec, g).unwrap());
                assert!(field_strength(spec, g).unwrap().agrees_with(&by_curl), "{}", p.name);
            }
        }
    }

    #[test]
    fn landau_potential_and_field() {
        let a = &landau().gauge_fields().unwrap()[0];
        assert!(coord_equals(&a.a[1], &parse_coord("B*X3/2", &[]).unwrap()));
        assert!(coord_equals(&a.a[2], &parse_coord("-B*X2/2", &[]).unwrap()));
        let f = field_strength(&landau().specs[0], &scalar("e")).unwrap();
        assert!(coord_equals(f.get(1, 2), &parse_coord("-B", &[]).unwrap()));
        assert!(coord_equals(f.get(0, 1), &CoordFunction::zero()));
    }

    #[test]
    fn aharonov_bohm_potential_is_the_flux_line() {
        let a = &aharonov_bohm().gauge_fields().unwrap()[0];
        assert!(coord_equals(&a.a[1], &parse_coord("phi_M*X3*rho^-2/(2*pi)", &[]).unwrap()));
        assert!(coord_equals(&a.a[2], &parse_coord("-phi_M*X2*rho^-2/(2*pi)", &[]).unwrap()));
        let f = field_strength(&aharonov_bohm().specs[0], &scalar("e")).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn gravitomagnetic_potentials() {
        let h = &gravito_constant().gauge_fields().unwrap()[0];
        assert!(coord_equals(&h.a[1], &parse_coord(&format!("{}*X3", HOLLOW_SPHERE_OMEGA), &[]).unwrap()));
        let lt = &lense_thirring().gauge_fields().unwrap()[0];
        assert!(coord_equals(&lt.a[2], &parse_coord(&format!("-{}*X2*r^-3", LENSE_THIRRING_OMEGA), &[]).unwrap()));
    }

    #[test]
    fn vanishing_strength_gives_free_hamiltonian() {
        let l = landau();
        let h = l.deformed().unwrap().substitute("B", &Scalar::zero());
        // B enters only with positive powers in the deformed Hamiltonian
        assert!(equals(&h.unwrap(), &free_hamiltonian()));
        let g = gravito_constant().deformed().unwrap().truncate("G", 0);
        assert!(equals(&g, &free_hamiltonian()));
    }

    #[test]
    fn potential_is_not_deformed() {
        let z = zeeman().deformed().unwrap();
        let l = landau().deformed().unwrap();
        assert!(equals(&(&z - &l), &expr("e^2*r^-1")));
    }

    #[test]
    fn paramagnetic_part() {
        let h = landau().deformed().unwrap();
        assert!(equals(&h.homogeneous_part(1), &paramagnetic_term()));
    }

    #[test]
    fn structural_map_to_gravity() {
        let (matrix, reference) = landau_as_gravito().unwrap();
        let g = gravito_constant();
        assert_eq!(matrix, g.specs[0].matrix);
        assert!(equals(&reference, &g.reference));
    }

    #[test]
    fn flux_truth_table() {
        let one = rat_int(1);
        assert!(flux_equivalent(&rat_int(2), &rat_int(0), &one));
        assert!(flux_equivalent(&rat(3, 7), &rat(3, 7), &one));
        assert!(!flux_equivalent(&rat_int(1), &rat_int(0), &one));
        assert!(flux_equivalent(&rat_int(1), &rat_int(0), &rat_int(2)));
    }

    #[test]
    fn guiding_center_commutator() {
        let b = landau().specs[0].matrix.clone();
        let gc = guiding_center_coordinates(&b, 0).unwrap();
        assert!(gc.holds());
        assert!(matches!(guiding_center_coordinates(&DeformationMatrix::zero(), 0), Err(DeformError::Matrix(MatrixError::Singular))));
    }

    #[test]
    fn uncertainty_examples() {
        let u = uncertainty_bound(&rat_int(1), &rat_int(1), &rat_int(1)).unwrap();
        assert_eq!(u.bound, 1.0);
        assert!((u.area - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        let half = uncertainty_bound(&rat_int(1), &rat_int(2), &rat_int(1)).unwrap();
        assert_eq!(half.bound, 0.5);
        assert_eq!(uncertainty_bound(&rat_int(0), &rat_int(1), &rat_int(1)).unwrap_err(), BoundError::NonPositive);
        assert!(uncertainty_bound_f64(9.1e-31, 1.0, 1.0).unwrap().bound > 1e30);
    }
}
