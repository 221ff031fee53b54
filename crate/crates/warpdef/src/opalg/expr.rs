//! Normal-ordered operators: sums of `f(X) · P1^k1 P2^k2 P3^k3`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::coord::{CoordFunction, CoordKey};
use super::scalar::{c_i, c_int, c_is_zero, fmt_complex, fmt_rational, CRational, Rational, Scalar, ScalarError};

/// Exponents of the right-hand momentum factors.
pub type MomentumIndex = [u32; 3];

/// Commutation rule used for reordering `P_j f(X) → f(X) P_j + [P_j, f]`.
///
/// `C1` is the only physical convention (`P_j = -i ∂_j`, `[X_j, P_k] = i δ_jk`).
/// `FlippedSign` exists for negative-control runs of the identity suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    C1,
    FlippedSign,
}

impl Convention {
    /// The factor `c` in `[P_j, f] = c · ∂_j f`.
    pub fn commutator_factor(self) -> CRational {
        match self {
            Convention::C1 => -c_i(),
            Convention::FlippedSign => c_i(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct OperatorExpr {
    terms: BTreeMap<MomentumIndex, CoordFunction>,
}

impl OperatorExpr {
    pub fn zero() -> Self {
        OperatorExpr::default()
    }

    pub fn identity() -> Self {
        OperatorExpr::from_coord(CoordFunction::one())
    }

    pub fn scalar(s: Scalar) -> Self {
        OperatorExpr::from_coord(CoordFunction::constant(s))
    }

    pub fn from_coord(f: CoordFunction) -> Self {
        OperatorExpr::term(f, [0; 3])
    }

    pub fn term(f: CoordFunction, k: MomentumIndex) -> Self {
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(k, f);
        }
        OperatorExpr { terms }
    }

    /// `P_{axis+1}`.
    pub fn momentum(axis: usize) -> Self {
        let mut k = [0; 3];
        k[axis] = 1;
        OperatorExpr::term(CoordFunction::one(), k)
    }

    /// `X_{axis+1}`.
    pub fn coordinate(axis: usize) -> Self {
        OperatorExpr::from_coord(CoordFunction::coordinate(axis))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MomentumIndex, &CoordFunction)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, k: &MomentumIndex) -> CoordFunction {
        self.terms.get(k).cloned().unwrap_or_default()
    }

    /// The part without momentum factors.
    pub fn coordinate_part(&self) -> CoordFunction {
        self.coefficient(&[0; 3])
    }

    /// Total momentum degree of the highest term (0 for the zero operator).
    pub fn momentum_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().sum()).max().unwrap_or(0)
    }

    /// Terms of exactly the given total momentum degree.
    pub fn homogeneous_part(&self, degree: u32) -> OperatorExpr {
        OperatorExpr {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.iter().sum::<u32>() == degree)
                .map(|(k, f)| (*k, f.clone()))
                .collect(),
        }
    }

    pub(crate) fn add_term(&mut self, k: MomentumIndex, f: &CoordFunction) {
        if f.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                v.add_assign_ref(f);
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, f.clone());
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &OperatorExpr) {
        for (k, f) in &other.terms {
            self.add_term(*k, f);
        }
    }

    pub fn scale(&self, s: &Scalar) -> OperatorExpr {
        let mut out = OperatorExpr::zero();
        for (k, f) in &self.terms {
            out.add_term(*k, &f.scale(s));
        }
        out
    }

    pub fn scale_complex(&self, c: &CRational) -> OperatorExpr {
        self.scale(&Scalar::from_complex(c.clone()))
    }

    /// Multiplies every coefficient from the left by a coordinate function.
    pub fn left_mul_coord(&self, g: &CoordFunction) -> OperatorExpr {
        let mut out = OperatorExpr::zero();
        for (k, f) in &self.terms {
            out.add_term(*k, &(g * f));
        }
        out
    }

    pub fn map_coefficients(
        &self,
        mut op: impl FnMut(&CoordFunction) -> Result<CoordFunction, ScalarError>,
    ) -> Result<OperatorExpr, ScalarError> {
        let mut out = OperatorExpr::zero();
        for (k, f) in &self.terms {
            out.add_term(*k, &op(f)?);
        }
        Ok(out)
    }

    /// Drops all terms of degree above `max_degree` in constant `name`.
    pub fn truncate(&self, name: &str, max_degree: i32) -> OperatorExpr {
        self.map_coefficients(|f| Ok(f.truncate(name, max_degree)))
            .expect("truncation cannot fail")
    }

    pub fn substitute(&self, name: &str, value: &Scalar) -> Result<OperatorExpr, ScalarError> {
        self.map_coefficients(|f| f.substitute(name, value))
    }

    pub fn pow(&self, k: u32) -> OperatorExpr {
        let mut acc = OperatorExpr::identity();
        for _ in 0..k {
            acc = multiply(&acc, self);
        }
        acc
    }
}

fn binomial(n: u32, k: u32) -> i64 {
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

/// Normal-orders `P^alpha · g(X)` into `Σ_β C(α,β) c^{|β|} (∂^β g) P^{α-β}`.
fn momentum_past_coord(conv: Convention, alpha: MomentumIndex, g: &CoordFunction) -> Vec<(MomentumIndex, CoordFunction)> {
    let c = conv.commutator_factor();
    let mut out = Vec::new();
    // derivative tables along each axis
    let mut d1 = vec![g.clone()];
    for _ in 0..alpha[0] {
        let next = d1.last().unwrap().partial_derivative(0);
        d1.push(next);
    }
    for b0 in 0..=alpha[0] {
        let mut d2 = vec![d1[b0 as usize].clone()];
        for _ in 0..alpha[1] {
            let next = d2.last().unwrap().partial_derivative(1);
            d2.push(next);
        }
        for b1 in 0..=alpha[1] {
            let mut d3 = vec![d2[b1 as usize].clone()];
            for _ in 0..alpha[2] {
                let next = d3.last().unwrap().partial_derivative(2);
                d3.push(next);
            }
            for b2 in 0..=alpha[2] {
                let deriv = &d3[b2 as usize];
                if deriv.is_zero() {
                    continue;
                }
                let weight = binomial(alpha[0], b0) * binomial(alpha[1], b1) * binomial(alpha[2], b2);
                let order = (b0 + b1 + b2) as i32;
                let mut factor = c_int(weight);
                for _ in 0..order {
                    factor = &factor * &c;
                }
                if c_is_zero(&factor) {
                    continue;
                }
                out.push((
                    [alpha[0] - b0, alpha[1] - b1, alpha[2] - b2],
                    deriv.scale(&Scalar::from_complex(factor)),
                ));
            }
        }
    }
    out
}

/// Normal-ordered product under an explicit commutation convention.
pub fn multiply_in(conv: Convention, a: &OperatorExpr, b: &OperatorExpr) -> OperatorExpr {
    let mut out = OperatorExpr::zero();
    for (ka, fa) in &a.terms {
        for (kb, gb) in &b.terms {
            for (k, h) in momentum_past_coord(conv, *ka, gb) {
                let idx = [k[0] + kb[0], k[1] + kb[1], k[2] + kb[2]];
                out.add_term(idx, &(fa * &h));
            }
        }
    }
    out
}

/// Normal-ordered product `a · b` under convention C1.
pub fn multiply(a: &OperatorExpr, b: &OperatorExpr) -> OperatorExpr {
    multiply_in(Convention::C1, a, b)
}

pub fn commutator_in(conv: Convention, a: &OperatorExpr, b: &OperatorExpr) -> OperatorExpr {
    &multiply_in(conv, a, b) - &multiply_in(conv, b, a)
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &OperatorExpr, b: &OperatorExpr) -> OperatorExpr {
    commutator_in(Convention::C1, a, b)
}

/// `{a, b} = ab + ba`.
pub fn anticommutator(a: &OperatorExpr, b: &OperatorExpr) -> OperatorExpr {
    &multiply(a, b) + &multiply(b, a)
}

/// Hermitian adjoint: conjugate coefficients, reverse factor order, re-normal-order.
pub fn adjoint(a: &OperatorExpr) -> OperatorExpr {
    let mut out = OperatorExpr::zero();
    for (k, f) in &a.terms {
        let p = OperatorExpr::term(CoordFunction::one(), *k);
        out.add_assign_ref(&multiply(&p, &OperatorExpr::from_coord(f.conj())));
    }
    out
}

impl<'a> Add<&'a OperatorExpr> for &'a OperatorExpr {
    type Output = OperatorExpr;
    fn add(self, rhs: &OperatorExpr) -> OperatorExpr {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<'a> Sub<&'a OperatorExpr> for &'a OperatorExpr {
    type Output = OperatorExpr;
    fn sub(self, rhs: &OperatorExpr) -> OperatorExpr {
        self + &(-rhs)
    }
}

impl Neg for &OperatorExpr {
    type Output = OperatorExpr;
    fn neg(self) -> OperatorExpr {
        OperatorExpr {
            terms: self.terms.iter().map(|(k, f)| (*k, -f)).collect(),
        }
    }
}

impl<'a> Mul<&'a OperatorExpr> for &'a OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: &OperatorExpr) -> OperatorExpr {
        multiply(self, rhs)
    }
}

impl From<CoordFunction> for OperatorExpr {
    fn from(f: CoordFunction) -> Self {
        OperatorExpr::from_coord(f)
    }
}

impl From<Scalar> for OperatorExpr {
    fn from(s: Scalar) -> Self {
        OperatorExpr::scalar(s)
    }
}

fn fmt_exponent(p: &Rational) -> String {
    if p.is_integer() {
        fmt_rational(p)
    } else {
        format!("({})", fmt_rational(p))
    }
}

/// Factor list of a coordinate key and momentum index, in parser syntax.
fn factor_strings(key: &CoordKey, k: &MomentumIndex) -> Vec<String> {
    let mut out = Vec::new();
    for (j, a) in key.x.iter().enumerate() {
        match a {
            0 => {}
            1 => out.push(format!("X{}", j + 1)),
            _ => out.push(format!("X{}^{}", j + 1, a)),
        }
    }
    if !key.r.is_zero() {
        out.push(format!("r^{}", fmt_exponent(&key.r)));
    }
    if !key.rho.is_zero() {
        out.push(format!("rho^{}", fmt_exponent(&key.rho)));
    }
    for (j, a) in k.iter().enumerate() {
        match a {
            0 => {}
            1 => out.push(format!("P{}", j + 1)),
            _ => out.push(format!("P{}^{}", j + 1, a)),
        }
    }
    out
}

impl fmt::Display for OperatorExpr {
    /// Output is valid input for the expression parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces: Vec<String> = Vec::new();
        for (k, cf) in &self.terms {
            for (key, s) in cf.terms() {
                for (mono, c) in s.terms() {
                    let mut factors: Vec<String> = mono
                        .powers()
                        .map(|(n, e)| if e == 1 { n.to_string() } else { format!("{}^{}", n, e) })
                        .collect();
                    factors.extend(factor_strings(key, k));
                    let coef = fmt_complex(c);
                    let piece = if factors.is_empty() {
                        coef
                    } else if *c == c_int(1) {
                        factors.join("*")
                    } else if *c == -c_int(1) {
                        format!("-{}", factors.join("*"))
                    } else {
                        format!("{}*{}", coef, factors.join("*"))
                    };
                    pieces.push(piece);
                }
            }
        }
        if pieces.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (idx, p) in pieces.iter().enumerate() {
            if idx == 0 {
                out.push_str(p);
            } else if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        write!(f, "{}", out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::scalar::rat_int;

    fn p(j: usize) -> OperatorExpr {
        OperatorExpr::momentum(j)
    }
    fn x(j: usize) -> OperatorExpr {
        OperatorExpr::coordinate(j)
    }

    #[test]
    fn canonical_commutators() {
        for i in 0..3 {
            for j in 0..3 {
                assert!(commutator(&x(i), &x(j)).is_zero());
                assert!(commutator(&p(i), &p(j)).is_zero());
                let expected = if i == j { OperatorExpr::scalar(Scalar::i()) } else { OperatorExpr::zero() };
                assert_eq!(commutator(&x(i), &p(j)), expected);
            }
        }
    }

    #[test]
    fn momentum_past_coordinate() {
        // P1 X1 = X1 P1 - i
        let prod = multiply(&p(0), &x(0));
        let expected = &(&x(0) * &p(0)) - &OperatorExpr::scalar(Scalar::i());
        assert_eq!(prod, expected);
    }

    #[test]
    fn anticommutator_x1_p1() {
        let a = anticommutator(&x(0), &p(0));
        let expected = &(&x(0) * &p(0)).scale(&Scalar::from_int(2)) - &OperatorExpr::scalar(Scalar::i());
        assert_eq!(a, expected);
        assert!(anticommutator(&x(0), &OperatorExpr::zero()).is_zero());
    }

    #[test]
    fn adjoint_examples() {
        let xp = &x(0) * &p(0);
        // (X1 P1)^† = P1 X1 = X1 P1 - i
        assert_eq!(adjoint(&xp), &xp - &OperatorExpr::scalar(Scalar::i()));
        let ip = p(0).scale(&Scalar::i());
        assert_eq!(adjoint(&ip), p(0).scale(&-&Scalar::i()));
        let h0 = &(&(&p(0) * &p(0)) + &(&p(1) * &p(1))) + &(&p(2) * &p(2));
        assert_eq!(adjoint(&h0), h0);
    }

    #[test]
    fn second_order_reordering() {
        // P1^2 r^-1 = r^-1 P1^2 - 2i (∂1 r^-1) P1 - ∂1^2 r^-1
        let f = CoordFunction::r_pow(rat_int(-1));
        let lhs = multiply(&p(0).pow(2), &OperatorExpr::from_coord(f.clone()));
        let d1 = f.partial_derivative(0);
        let d11 = d1.partial_derivative(0);
        let mut rhs = OperatorExpr::term(f, [2, 0, 0]);
        rhs.add_assign_ref(&OperatorExpr::term(d1.scale(&Scalar::from_complex(-c_i() * c_int(2))), [1, 0, 0]));
        rhs.add_assign_ref(&OperatorExpr::from_coord(d11.scale(&Scalar::from_int(-1))));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn flipped_convention_changes_sign() {
        let c = commutator_in(Convention::FlippedSign, &x(1), &p(1));
        assert_eq!(c, OperatorExpr::scalar(-&Scalar::i()));
    }

    #[test]
    fn display_is_readable() {
        let e = &(&x(0) * &p(0)) - &OperatorExpr::scalar(Scalar::i());
        assert_eq!(e.to_string(), "-i + X1*P1");
    }
}
