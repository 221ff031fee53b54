//! Gauge fields read off from deformed momenta, their field strength, the
//! Lorentz force and the homogeneous field equations.
//!
//! Deformed momenta are written as minimal substitution `P^B = P - g A`, so
//! `g A_r = (BQ)_k ∂_r Q_k` and `[P^B_i, P^B_j] = i g F_ij` with `F = curl A`.

use serde::Serialize;

use crate::deform::{deform_momentum, deform_operator_in, free_hamiltonian, momentum_shift, DeformError, DeformationSpec};
use crate::opalg::scalar::{c_i, c_int};
use crate::opalg::{coord_equals, commutator_in, equals, Convention, CoordFunction, OperatorExpr, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GaugeError {
    #[error("coupling must be a nonzero single-term scalar")]
    BadCoupling,
    #[error("commutator of deformed momenta has a momentum-dependent part at ({0}, {1})")]
    Inconsistent(usize, usize),
    #[error(transparent)]
    Deform(#[from] DeformError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeField {
    pub a: [CoordFunction; 3],
    pub coupling: Scalar,
}

/// Antisymmetric matrix of coordinate functions.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FieldStrength {
    pub f: [[CoordFunction; 3]; 3],
}

impl FieldStrength {
    pub fn zero() -> Self {
        FieldStrength::default()
    }

    pub fn get(&self, i: usize, j: usize) -> &CoordFunction {
        &self.f[i][j]
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| (&self.f[i][j] + &self.f[j][i]).is_zero()))
    }

    /// Entry-wise comparison under the equality oracle.
    pub fn agrees_with(&self, other: &FieldStrength) -> bool {
        (0..3).all(|i| (0..3).all(|j| coord_equals(&self.f[i][j], &other.f[i][j])))
    }

    pub fn is_zero(&self) -> bool {
        self.f.iter().flatten().all(|c| coord_equals(c, &CoordFunction::zero()))
    }

    /// `B_k = ½ ε_kij F_ij`.
    pub fn magnetic_vector(&self) -> [CoordFunction; 3] {
        [self.f[1][2].clone(), self.f[2][0].clone(), self.f[0][1].clone()]
    }
}

fn coupling_inverse(g: &Scalar) -> Result<Scalar, GaugeError> {
    if g.is_zero() {
        return Err(GaugeError::BadCoupling);
    }
    g.inverse().map_err(|_| GaugeError::BadCoupling)
}

/// `A_r = (BQ)_k ∂_r Q_k / g`.
pub fn extract_gauge_field(spec: &DeformationSpec, coupling: &Scalar) -> Result<GaugeField, GaugeError> {
    let inv = coupling_inverse(coupling)?;
    spec.matrix.check_skew().map_err(DeformError::from)?;
    let factor = -&inv;
    Ok(GaugeField { a: momentum_shift(spec).map(|sj| sj.scale(&factor)), coupling: coupling.clone() })
}

/// `F_ij = ∂_i A_j - ∂_j A_i`.
pub fn curl(field: &GaugeField) -> FieldStrength {
    let mut out = FieldStrength::zero();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                out.f[i][j] = &field.a[j].partial_derivative(i) - &field.a[i].partial_derivative(j);
            }
        }
    }
    out
}

pub fn field_strength_in(conv: Convention, spec: &DeformationSpec, coupling: &Scalar) -> Result<FieldStrength, GaugeError> {
    let inv = coupling_inverse(coupling)?;
    let p = deform_momentum(spec)?;
    // 1/(i g) = -i/g
    let factor = inv.scale(&-c_i());
    let mut out = FieldStrength::zero();
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let c = commutator_in(conv, &p[i], &p[j]);
            if c.momentum_degree() > 0 {
                return Err(GaugeError::Inconsistent(i, j));
            }
            out.f[i][j] = c.coordinate_part().scale(&factor);
        }
    }
    Ok(out)
}

/// Field strength from commutators of deformed momenta, `F_ij = [P^B_i, P^B_j] / (i g)`.
pub fn field_strength(spec: &DeformationSpec, coupling: &Scalar) -> Result<FieldStrength, GaugeError> {
    field_strength_in(Convention::C1, spec, coupling)
}

/// `∂_k F_ij + ∂_i F_jk + ∂_j F_ki = 0` for all index triples.
pub fn bianchi_holds(f: &FieldStrength) -> bool {
    bianchi_residuals(f).iter().all(|r| coord_equals(r, &CoordFunction::zero()))
}

fn bianchi_residuals(f: &FieldStrength) -> Vec<CoordFunction> {
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let sum = &(&f.f[i][j].partial_derivative(k) + &f.f[j][k].partial_derivative(i)) + &f.f[k][i].partial_derivative(j);
                out.push(sum);
            }
        }
    }
    out
}

pub fn bianchi_check(spec: &DeformationSpec, coupling: &Scalar) -> Result<bool, GaugeError> {
    Ok(bianchi_holds(&field_strength(spec, coupling)?))
}

#[derive(Clone, Debug)]
pub struct LorentzForce {
    /// `[H^B + gφ, P^B_j]`.
    pub commutators: [OperatorExpr; 3],
    /// `i g [ (P^B_k F_kj + F_kj P^B_k)/2m - E_j ]` with `E = -∇φ`.
    pub expected: [OperatorExpr; 3],
    pub holds: bool,
}

pub fn lorentz_force_in(
    conv: Convention,
    spec: &DeformationSpec,
    coupling: &Scalar,
    potential: &CoordFunction,
) -> Result<LorentzForce, GaugeError> {
    let f = field_strength_in(Convention::C1, spec, coupling)?;
    let p = deform_momentum(spec)?;
    let h = &deform_operator_in(conv, &free_hamiltonian(), spec)? + &OperatorExpr::from_coord(potential.scale(coupling));
    let inv_two_m = crate::deform::inverse_two_m();
    let ig = coupling.scale(&c_i());
    let commutators = [0, 1, 2].map(|j| commutator_in(conv, &h, &p[j]));
    let expected = [0, 1, 2].map(|j| {
        let mut acc = OperatorExpr::zero();
        for k in 0..3 {
            let fkj = OperatorExpr::from_coord(f.f[k][j].clone());
            acc.add_assign_ref(&(&(&p[k] * &fkj) + &(&fkj * &p[k])));
        }
        let acc = acc.scale(&inv_two_m);
        // -E_j = ∂_j φ
        let minus_e = OperatorExpr::from_coord(potential.partial_derivative(j));
        (&acc + &minus_e).scale(&ig)
    });
    let holds = (0..3).all(|j| equals(&commutators[j], &expected[j]));
    Ok(LorentzForce { commutators, expected, holds })
}

pub fn lorentz_force(spec: &DeformationSpec, coupling: &Scalar, potential: &CoordFunction) -> Result<LorentzForce, GaugeError> {
    lorentz_force_in(Convention::C1, spec, coupling, potential)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResult {
    pub identity: String,
    pub zero: bool,
    pub residual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiReport {
    pub static_fields: bool,
    pub note: String,
    pub identities: Vec<IdentityResult>,
}

impl JacobiReport {
    pub fn all_zero(&self) -> bool {
        self.identities.iter().all(|r| r.zero)
    }
}

fn jacobi(conv: Convention, a: &OperatorExpr, b: &OperatorExpr, c: &OperatorExpr) -> OperatorExpr {
    let t1 = commutator_in(conv, a, &commutator_in(conv, b, c));
    let t2 = commutator_in(conv, b, &commutator_in(conv, c, a));
    let t3 = commutator_in(conv, c, &commutator_in(conv, a, b));
    &(&t1 + &t2) + &t3
}

fn identity_entry(name: String, residual: OperatorExpr) -> IdentityResult {
    let zero = equals(&residual, &OperatorExpr::zero());
    IdentityResult { identity: name, zero, residual: residual.to_string() }
}

/// Jacobi identities of `{H^B + gφ, P^B_i, P^B_j}` and the homogeneous field equations they encode.
pub fn jacobi_maxwell_report_in(
    conv: Convention,
    spec: &DeformationSpec,
    coupling: &Scalar,
    potential: &CoordFunction,
) -> Result<JacobiReport, GaugeError> {
    let p = deform_momentum(spec)?;
    let h = &deform_operator_in(conv, &free_hamiltonian(), spec)? + &OperatorExpr::from_coord(potential.scale(coupling));
    let mut identities = Vec::new();
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        identities.push(identity_entry(format!("jacobi(H, P{}, P{})", i + 1, j + 1), jacobi(conv, &h, &p[i], &p[j])));
    }
    identities.push(identity_entry("jacobi(P1, P2, P3)".into(), jacobi(conv, &p[0], &p[1], &p[2])));
    let f = field_strength_in(conv, spec, coupling)?;
    let bianchi = bianchi_residuals(&f)[5].clone(); // (i, j, k) = (0, 1, 2)
    identities.push(identity_entry("d1 F23 + d2 F31 + d3 F12".into(), OperatorExpr::from_coord(bianchi)));
    let e = [0, 1, 2].map(|j| potential.partial_derivative(j).scale(&Scalar::from_complex(-c_int(1))));
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        let curl_e = &e[j].partial_derivative(i) - &e[i].partial_derivative(j);
        identities.push(identity_entry(format!("d{} E{} - d{} E{}", i + 1, j + 1, j + 1, i + 1), OperatorExpr::from_coord(curl_e)));
    }
    Ok(JacobiReport {
        static_fields: true,
        note: "fields are time independent, so the time derivative of F drops out".into(),
        identities,
    })
}

pub fn jacobi_maxwell_report(spec: &DeformationSpec, coupling: &Scalar, potential: &CoordFunction) -> Result<JacobiReport, GaugeError> {
    jacobi_maxwell_report_in(Convention::C1, spec, coupling, potential)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::scalar::rat_int;
    use crate::opalg::{parse_coord, DeformationMatrix, QSpec};

    fn constant_field(b: &str) -> DeformationSpec {
        DeformationSpec::new(DeformationMatrix::along_axis(0, Scalar::constant(b)), QSpec::coordinate())
    }

    #[test]
    fn constant_matrix_gives_linear_potential() {
        let g = Scalar::constant("e");
        let field = extract_gauge_field(&constant_field("b"), &g).unwrap();
        // g A = (B X)_r: A_2 = b X3 / e, A_3 = -b X2 / e
        assert!(field.a[0].is_zero());
        assert!(coord_equals(&field.a[1], &parse_coord("b*X3/e", &["b"]).unwrap()));
        assert!(coord_equals(&field.a[2], &parse_coord("-b*X2/e", &["b"]).unwrap()));
        let f = field_strength(&constant_field("b"), &g).unwrap();
        assert!(f.agrees_with(&curl(&field)));
        assert!(coord_equals(f.get(1, 2), &parse_coord("-2*b/e", &["b"]).unwrap()));
        assert!(f.is_antisymmetric());
    }

    #[test]
    fn zero_coupling_is_rejected() {
        assert_eq!(extract_gauge_field(&constant_field("b"), &Scalar::zero()), Err(GaugeError::BadCoupling));
    }

    #[test]
    fn zero_spec_has_no_field() {
        let spec = DeformationSpec::new(DeformationMatrix::zero(), QSpec::radial_power(rat_int(2)));
        let f = field_strength(&spec, &Scalar::one()).unwrap();
        assert!(f.is_zero());
        let lf = lorentz_force(&spec, &Scalar::one(), &CoordFunction::zero()).unwrap();
        assert!(lf.commutators.iter().all(OperatorExpr::is_zero));
    }

    #[test]
    fn coulomb_force() {
        let spec = DeformationSpec::new(DeformationMatrix::zero(), QSpec::coordinate());
        let phi = parse_coord("e^2*r^-1", &[]).unwrap();
        let g = Scalar::constant("e");
        let lf = lorentz_force(&spec, &g, &phi).unwrap();
        assert!(lf.holds);
        // [g φ, P_j] = i g ∂_j φ = -i g e^2 x_j r^-3
        let expected = crate::opalg::parse("-i*e^3*X1*r^-3").unwrap();
        assert!(equals(&lf.commutators[0], &expected));
    }

    #[test]
    fn magnetic_lorentz_force_and_jacobi() {
        let spec = constant_field("b");
        let g = Scalar::constant("e");
        assert!(lorentz_force(&spec, &g, &CoordFunction::zero()).unwrap().holds);
        let report = jacobi_maxwell_report(&spec, &g, &CoordFunction::zero()).unwrap();
        assert!(report.all_zero());
        assert!(bianchi_check(&spec, &g).unwrap());
    }

    #[test]
    fn flipped_convention_breaks_the_two_routes() {
        let spec = constant_field("b");
        let g = Scalar::constant("e");
        let by_commutator = field_strength_in(Convention::FlippedSign, &spec, &g).unwrap();
        let by_curl = curl(&extract_gauge_field(&spec, &g).unwrap());
        assert!(!by_commutator.agrees_with(&by_curl));
    }
}
