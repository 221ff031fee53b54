//! Closed-form warped convolutions of operators of momentum degree at most two.
//!
//! Deformation with a skew matrix `B` and generator `Q` shifts every momentum
//! component, `P_j ↦ P_j + s_j` with `s_j = i (BQ)_k [Q_k, P_j]`. Coordinate
//! functions are left untouched.

use crate::opalg::{
    anticommutator, equals, multiply_in, Convention, CoordFunction, DeformationMatrix, MatrixError, OperatorExpr, QSpec,
    Scalar,
};
use crate::opalg::scalar::rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeformError {
    #[error("momentum degree {0} is outside the supported class (at most 2)")]
    UnsupportedDegree(u32),
    #[error("Rieffel product is only evaluated for operands of momentum degree at most 1")]
    NotMomentumLinear,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// The pair `(B, Q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationSpec {
    pub matrix: DeformationMatrix,
    pub generator: QSpec,
}

impl DeformationSpec {
    pub fn new(matrix: DeformationMatrix, generator: QSpec) -> Self {
        DeformationSpec { matrix, generator }
    }

    /// Same generator, matrix `B1 + B2`.
    pub fn sum(&self, other: &DeformationSpec) -> DeformationSpec {
        DeformationSpec { matrix: &self.matrix + &other.matrix, generator: self.generator.clone() }
    }
}

/// `H₀ = (P1² + P2² + P3²) / 2m`.
pub fn free_hamiltonian() -> OperatorExpr {
    let mut h = OperatorExpr::zero();
    for j in 0..3 {
        let mut k = [0; 3];
        k[j] = 2;
        h.add_assign_ref(&OperatorExpr::term(CoordFunction::one(), k));
    }
    h.scale(&inverse_two_m())
}

pub(crate) fn inverse_two_m() -> Scalar {
    Scalar::constant("m").pow(-1).unwrap().scale(&crate::opalg::scalar::c_real(rat(1, 2)))
}

/// `s_j = i (BQ)_k [Q_k, P_j] = -(BQ)_k ∂_j Q_k`.
pub fn momentum_shift(spec: &DeformationSpec) -> [CoordFunction; 3] {
    let bq = spec.matrix.apply(&spec.generator.components);
    [0, 1, 2].map(|j| {
        let mut acc = CoordFunction::zero();
        for (k, bqk) in bq.iter().enumerate() {
            if bqk.is_zero() {
                continue;
            }
            acc.add_assign_ref(&(bqk * &spec.generator.jacobian(k, j)));
        }
        -&acc
    })
}

fn shifted_momenta(spec: &DeformationSpec) -> [OperatorExpr; 3] {
    let s = momentum_shift(spec);
    [0, 1, 2].map(|j| &OperatorExpr::momentum(j) + &OperatorExpr::from_coord(s[j].clone()))
}

pub fn deform_operator_in(conv: Convention, a: &OperatorExpr, spec: &DeformationSpec) -> Result<OperatorExpr, DeformError> {
    spec.matrix.check_skew()?;
    let degree = a.momentum_degree();
    if degree > 2 {
        return Err(DeformError::UnsupportedDegree(degree));
    }
    let shifted = shifted_momenta(spec);
    let half = Scalar::from_rational(rat(1, 2));
    let mut out = OperatorExpr::zero();
    for (k, f) in a.terms() {
        let axes: Vec<usize> = (0..3).flat_map(|j| std::iter::repeat(j).take(k[j] as usize)).collect();
        let replaced = match axes.as_slice() {
            [] => OperatorExpr::identity(),
            [j] => shifted[*j].clone(),
            [j, l] if j == l => multiply_in(conv, &shifted[*j], &shifted[*l]),
            [j, l] => (&multiply_in(conv, &shifted[*j], &shifted[*l]) + &multiply_in(conv, &shifted[*l], &shifted[*j]))
                .scale(&half),
            _ => unreachable!("degree checked above"),
        };
        out.add_assign_ref(&replaced.left_mul_coord(f));
    }
    Ok(out)
}

/// Deforms an operator of momentum degree at most two.
pub fn deform_operator(a: &OperatorExpr, spec: &DeformationSpec) -> Result<OperatorExpr, DeformError> {
    deform_operator_in(Convention::C1, a, spec)
}

/// Deformed momentum components `P_j + s_j`.
pub fn deform_momentum(spec: &DeformationSpec) -> Result<[OperatorExpr; 3], DeformError> {
    spec.matrix.check_skew()?;
    Ok(shifted_momenta(spec))
}

/// Deformed coordinates `X_j + θ_jk P_k`, with `[X_θ^i, X_θ^j] = -2i θ_ij`.
pub fn deform_coordinate(theta: &DeformationMatrix) -> Result<[OperatorExpr; 3], DeformError> {
    theta.check_skew()?;
    Ok([0, 1, 2].map(|j| {
        let mut x = OperatorExpr::coordinate(j);
        for k in 0..3 {
            let t = theta.entry(j, k);
            if !t.is_zero() {
                x.add_assign_ref(&OperatorExpr::momentum(k).scale(t));
            }
        }
        x
    }))
}

/// Guiding-center coordinates: deformed coordinates with `θ = -½ B⁻¹` on the plane orthogonal to `axis`.
pub fn guiding_center(b: &DeformationMatrix, axis: usize) -> Result<[OperatorExpr; 3], DeformError> {
    let inv = b.transverse_inverse(axis)?;
    deform_coordinate(&inv.scale(&Scalar::from_rational(rat(-1, 2))))
}

fn split_linear(a: &OperatorExpr) -> Result<(CoordFunction, [CoordFunction; 3]), DeformError> {
    if a.momentum_degree() > 1 {
        return Err(DeformError::NotMomentumLinear);
    }
    let lin = [0, 1, 2].map(|j| {
        let mut k = [0; 3];
        k[j] = 1;
        a.coefficient(&k)
    });
    Ok((a.coordinate_part(), lin))
}

pub fn rieffel_product_in(
    conv: Convention,
    a: &OperatorExpr,
    b: &OperatorExpr,
    spec: &DeformationSpec,
) -> Result<OperatorExpr, DeformError> {
    spec.matrix.check_skew()?;
    let (_, fa) = split_linear(a)?;
    let (_, gb) = split_linear(b)?;
    let q = &spec.generator;
    let mut correction = CoordFunction::zero();
    for k in 0..3 {
        for j in 0..3 {
            if fa[k].is_zero() || gb[j].is_zero() {
                continue;
            }
            // T_kj = B_ls ∂_k Q^l ∂_j Q^s
            let mut t = CoordFunction::zero();
            for l in 0..3 {
                for s in 0..3 {
                    let bls = spec.matrix.entry(l, s);
                    if !bls.is_zero() {
                        t.add_assign_ref(&(&q.jacobian(l, k) * &q.jacobian(s, j)).scale(bls));
                    }
                }
            }
            correction.add_assign_ref(&(&(&fa[k] * &gb[j]) * &t));
        }
    }
    let correction = correction.scale(&Scalar::from_complex(conv.commutator_factor()));
    Ok(&multiply_in(conv, a, b) + &OperatorExpr::from_coord(correction))
}

/// Rieffel product of two momentum-linear operators.
pub fn rieffel_product(a: &OperatorExpr, b: &OperatorExpr, spec: &DeformationSpec) -> Result<OperatorExpr, DeformError> {
    rieffel_product_in(Convention::C1, a, b, spec)
}

/// Checks `(A_{B1})_{B2} = A_{B1+B2}` for a shared generator, or order independence otherwise.
pub fn check_additivity(a: &OperatorExpr, spec1: &DeformationSpec, spec2: &DeformationSpec) -> Result<bool, DeformError> {
    let twice = deform_operator(&deform_operator(a, spec1)?, spec2)?;
    if spec1.generator == spec2.generator {
        let once = deform_operator(a, &spec1.sum(spec2))?;
        Ok(equals(&twice, &once))
    } else {
        let swapped = deform_operator(&deform_operator(a, spec2)?, spec1)?;
        Ok(equals(&twice, &swapped))
    }
}

/// Checks that the deformed free Hamiltonian is the square of the deformed momentum over `2m`.
pub fn factorization_check(spec: &DeformationSpec) -> Result<bool, DeformError> {
    let lhs = deform_operator(&free_hamiltonian(), spec)?;
    let p = deform_momentum(spec)?;
    let mut rhs = OperatorExpr::zero();
    for pj in &p {
        rhs.add_assign_ref(&anticommutator(pj, pj).scale(&Scalar::from_rational(rat(1, 2))));
    }
    Ok(equals(&lhs, &rhs.scale(&inverse_two_m())))
}
