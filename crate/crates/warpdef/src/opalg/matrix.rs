//! Skew matrices of symbolic scalars and the generators `Q(X)` they act through.

use std::fmt;

use num_traits::Zero;

use super::coord::CoordFunction;
use super::scalar::{fmt_rational, Rational, Scalar, ScalarError};

/// Levi-Civita symbol on 0-based indices.
pub fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix is not skew-symmetric at entry ({0}, {1})")]
    NotSkew(usize, usize),
    #[error("transverse block is singular or its determinant is not a single-term scalar")]
    Singular,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DeformationMatrix {
    entries: [[Scalar; 3]; 3],
}

impl DeformationMatrix {
    pub fn zero() -> Self {
        DeformationMatrix::default()
    }

    pub fn from_entries(entries: [[Scalar; 3]; 3]) -> Self {
        DeformationMatrix { entries }
    }

    /// `B_ij = ε_ijk b_k`.
    pub fn axial(b: [Scalar; 3]) -> Self {
        let mut m = DeformationMatrix::zero();
        for i in 0..3 {
            for j in 0..3 {
                for (k, bk) in b.iter().enumerate() {
                    let e = levi_civita(i, j, k);
                    if e != 0 {
                        m.entries[i][j] = &m.entries[i][j] + &bk.scale(&super::scalar::c_int(e));
                    }
                }
            }
        }
        m
    }

    /// Axial matrix with strength `b` along one axis.
    pub fn along_axis(axis: usize, b: Scalar) -> Self {
        let mut v = [Scalar::zero(), Scalar::zero(), Scalar::zero()];
        v[axis] = b;
        DeformationMatrix::axial(v)
    }

    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[[Scalar; 3]; 3] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Scalar::is_zero)
    }

    pub fn check_skew(&self) -> Result<(), MatrixError> {
        for i in 0..3 {
            for j in i..3 {
                if !(&self.entries[i][j] + &self.entries[j][i]).is_zero() {
                    return Err(MatrixError::NotSkew(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn is_skew(&self) -> bool {
        self.check_skew().is_ok()
    }

    /// `b_k = ½ ε_kij B_ij`, defined for skew matrices.
    pub fn axial_vector(&self) -> Option<[Scalar; 3]> {
        self.check_skew().ok()?;
        Some([self.entries[1][2].clone(), self.entries[2][0].clone(), self.entries[0][1].clone()])
    }

    pub fn scale(&self, s: &Scalar) -> DeformationMatrix {
        DeformationMatrix { entries: self.entries.clone().map(|row| row.map(|e| &e * s)) }
    }

    pub fn substitute(&self, name: &str, value: &Scalar) -> Result<DeformationMatrix, ScalarError> {
        let mut out = self.clone();
        for row in out.entries.iter_mut() {
            for e in row.iter_mut() {
                *e = e.substitute(name, value)?;
            }
        }
        Ok(out)
    }

    /// `(B Q)_k = B_kl Q_l`.
    pub fn apply(&self, q: &[CoordFunction; 3]) -> [CoordFunction; 3] {
        [0, 1, 2].map(|k| {
            let mut acc = CoordFunction::zero();
            for (l, ql) in q.iter().enumerate() {
                if !self.entries[k][l].is_zero() {
                    acc.add_assign_ref(&ql.scale(&self.entries[k][l]));
                }
            }
            acc
        })
    }

    /// Inverse of the block on the plane orthogonal to `axis`, embedded with a zero row and column.
    pub fn transverse_inverse(&self, axis: usize) -> Result<DeformationMatrix, MatrixError> {
        let (a, b) = match axis {
            0 => (1, 2),
            1 => (2, 0),
            _ => (0, 1),
        };
        let e = &self.entries;
        let det = &(&e[a][a] * &e[b][b]) - &(&e[a][b] * &e[b][a]);
        if det.is_zero() {
            return Err(MatrixError::Singular);
        }
        let inv = det.inverse().map_err(|_| MatrixError::Singular)?;
        let mut out = DeformationMatrix::zero();
        out.entries[a][a] = &e[b][b] * &inv;
        out.entries[b][b] = &e[a][a] * &inv;
        out.entries[a][b] = -&(&e[a][b] * &inv);
        out.entries[b][a] = -&(&e[b][a] * &inv);
        Ok(out)
    }
}

impl std::ops::Add for &DeformationMatrix {
    type Output = DeformationMatrix;
    fn add(self, rhs: &DeformationMatrix) -> DeformationMatrix {
        let mut out = self.clone();
        for i in 0..3 {
            for j in 0..3 {
                out.entries[i][j] = &self.entries[i][j] + &rhs.entries[i][j];
            }
        }
        out
    }
}

impl std::ops::Neg for &DeformationMatrix {
    type Output = DeformationMatrix;
    fn neg(self) -> DeformationMatrix {
        DeformationMatrix { entries: self.entries.clone().map(|row| row.map(|e| -&e)) }
    }
}

impl fmt::Display for DeformationMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|row| format!("[{}]", row.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QPreset {
    /// `Q = X`.
    Coordinate,
    /// `Q = X / r^n`.
    RadialPower(Rational),
    /// `Q = X / rho`.
    TransverseRadial,
    Custom,
}

impl fmt::Display for QPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QPreset::Coordinate => write!(f, "coordinate"),
            QPreset::RadialPower(n) => write!(f, "radial:{}", fmt_rational(n)),
            QPreset::TransverseRadial => write!(f, "transverse"),
            QPreset::Custom => write!(f, "custom"),
        }
    }
}

/// Generator `Q(X)` of the unitary group used in the deformation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSpec {
    pub components: [CoordFunction; 3],
    pub preset: QPreset,
}

impl QSpec {
    pub fn coordinate() -> Self {
        QSpec { components: [0, 1, 2].map(CoordFunction::coordinate), preset: QPreset::Coordinate }
    }

    pub fn radial_power(n: Rational) -> Self {
        if n.is_zero() {
            return QSpec { preset: QPreset::RadialPower(n), ..QSpec::coordinate() };
        }
        let w = CoordFunction::r_pow(-n.clone());
        QSpec {
            components: [0, 1, 2].map(|j| &CoordFunction::coordinate(j) * &w),
            preset: QPreset::RadialPower(n),
        }
    }

    pub fn transverse_radial() -> Self {
        let w = CoordFunction::rho_pow(-Rational::from_integer(1.into()));
        QSpec {
            components: [0, 1, 2].map(|j| &CoordFunction::coordinate(j) * &w),
            preset: QPreset::TransverseRadial,
        }
    }

    pub fn custom(components: [CoordFunction; 3]) -> Self {
        QSpec { components, preset: QPreset::Custom }
    }

    /// `∂_j Q_k`.
    pub fn jacobian(&self, k: usize, j: usize) -> CoordFunction {
        self.components[k].partial_derivative(j)
    }

    /// `[Q_k, P_j] = i ∂_j Q_k`, a coordinate function.
    pub fn commutator_with_momentum(&self, k: usize, j: usize) -> CoordFunction {
        self.jacobian(k, j).scale(&Scalar::i())
    }
}
