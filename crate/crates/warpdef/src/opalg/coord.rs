//! Coordinate functions: sums of `c · x1^a1 x2^a2 x3^a3 · r^p · rho^q`.
//!
//! `r = |x|` and `rho = sqrt(x2^2 + x3^2)`. Polynomial parts are never
//! rewritten against `r` or `rho`; identities such as `x2^2 + x3^2 = rho^2`
//! are settled by the evaluation oracle.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::scalar::{c_real, rat_int, Rational, Scalar, ScalarError};

/// Structural key of a coordinate monomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CoordKey {
    pub x: [u32; 3],
    pub r: Rational,
    pub rho: Rational,
}

impl CoordKey {
    pub fn one() -> Self {
        CoordKey { x: [0; 3], r: Rational::zero(), rho: Rational::zero() }
    }

    pub fn is_one(&self) -> bool {
        self.x == [0; 3] && self.r.is_zero() && self.rho.is_zero()
    }

    fn mul(&self, other: &CoordKey) -> CoordKey {
        CoordKey {
            x: [self.x[0] + other.x[0], self.x[1] + other.x[1], self.x[2] + other.x[2]],
            r: &self.r + &other.r,
            rho: &self.rho + &other.rho,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct CoordFunction {
    terms: BTreeMap<CoordKey, Scalar>,
}

impl CoordFunction {
    pub fn zero() -> Self {
        CoordFunction::default()
    }

    pub fn one() -> Self {
        CoordFunction::constant(Scalar::one())
    }

    pub fn constant(s: Scalar) -> Self {
        CoordFunction::term(s, CoordKey::one())
    }

    pub fn term(s: Scalar, key: CoordKey) -> Self {
        let mut terms = BTreeMap::new();
        if !s.is_zero() {
            terms.insert(key, s);
        }
        CoordFunction { terms }
    }

    /// The coordinate `x_{axis+1}`; axes are 0-based.
    pub fn coordinate(axis: usize) -> Self {
        let mut x = [0; 3];
        x[axis] = 1;
        CoordFunction::term(Scalar::one(), CoordKey { x, r: Rational::zero(), rho: Rational::zero() })
    }

    pub fn r_pow(p: Rational) -> Self {
        CoordFunction::term(Scalar::one(), CoordKey { x: [0; 3], r: p, rho: Rational::zero() })
    }

    pub fn rho_pow(q: Rational) -> Self {
        CoordFunction::term(Scalar::one(), CoordKey { x: [0; 3], r: Rational::zero(), rho: q })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CoordKey, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(s)` when the function does not depend on the coordinates.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&CoordKey::one()).cloned(),
            _ => None,
        }
    }

    pub(crate) fn add_term(&mut self, key: CoordKey, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                v.add_assign_ref(s);
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, s.clone());
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &CoordFunction) {
        for (k, s) in &other.terms {
            self.add_term(k.clone(), s);
        }
    }

    pub fn scale(&self, s: &Scalar) -> CoordFunction {
        let mut out = CoordFunction::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &(v * s));
        }
        out
    }

    pub fn conj(&self) -> CoordFunction {
        CoordFunction {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.conj())).collect(),
        }
    }

    /// Exact `∂f/∂x_{axis+1}` within the class.
    pub fn partial_derivative(&self, axis: usize) -> CoordFunction {
        assert!(axis < 3, "axis index out of range");
        let mut out = CoordFunction::zero();
        for (k, s) in &self.terms {
            let a = k.x[axis];
            if a > 0 {
                let mut key = k.clone();
                key.x[axis] -= 1;
                out.add_term(key, &s.scale(&c_real(rat_int(a as i64))));
            }
            if !k.r.is_zero() {
                let mut key = k.clone();
                key.x[axis] += 1;
                key.r = &k.r - rat_int(2);
                out.add_term(key, &s.scale(&c_real(k.r.clone())));
            }
            if axis != 0 && !k.rho.is_zero() {
                let mut key = k.clone();
                key.x[axis] += 1;
                key.rho = &k.rho - rat_int(2);
                out.add_term(key, &s.scale(&c_real(k.rho.clone())));
            }
        }
        out
    }

    pub fn gradient(&self) -> [CoordFunction; 3] {
        [0, 1, 2].map(|j| self.partial_derivative(j))
    }

    pub fn pow(&self, k: u32) -> CoordFunction {
        let mut acc = CoordFunction::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn truncate(&self, name: &str, max_degree: i32) -> CoordFunction {
        let mut out = CoordFunction::zero();
        for (k, s) in &self.terms {
            out.add_term(k.clone(), &s.truncate(name, max_degree));
        }
        out
    }

    pub fn substitute(&self, name: &str, value: &Scalar) -> Result<CoordFunction, ScalarError> {
        let mut out = CoordFunction::zero();
        for (k, s) in &self.terms {
            out.add_term(k.clone(), &s.substitute(name, value)?);
        }
        Ok(out)
    }

    /// Largest denominators of `p/2` and `q/2` over all terms.
    pub(crate) fn radical_orders(&self) -> (u64, u64) {
        let mut dr = 1u64;
        let mut ds = 1u64;
        for k in self.terms.keys() {
            dr = lcm(dr, half_denominator(&k.r));
            ds = lcm(ds, half_denominator(&k.rho));
        }
        (dr, ds)
    }

    /// True if some term carries a negative power of `r` (singular at the origin).
    pub fn singular_in_r(&self) -> bool {
        self.terms.keys().any(|k| k.r < Rational::zero())
    }

    /// True if some term carries a negative power of `rho` (singular on the x1 axis).
    pub fn singular_in_rho(&self) -> bool {
        self.terms.keys().any(|k| k.rho < Rational::zero())
    }
}

fn half_denominator(p: &Rational) -> u64 {
    let half = p / rat_int(2);
    use num_traits::ToPrimitive;
    half.denom().to_u64().unwrap_or(1)
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl<'a> Add<&'a CoordFunction> for &'a CoordFunction {
    type Output = CoordFunction;
    fn add(self, rhs: &CoordFunction) -> CoordFunction {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<'a> Sub<&'a CoordFunction> for &'a CoordFunction {
    type Output = CoordFunction;
    fn sub(self, rhs: &CoordFunction) -> CoordFunction {
        self + &(-rhs)
    }
}

impl Neg for &CoordFunction {
    type Output = CoordFunction;
    fn neg(self) -> CoordFunction {
        CoordFunction {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }
}

impl<'a> Mul<&'a CoordFunction> for &'a CoordFunction {
    type Output = CoordFunction;
    fn mul(self, rhs: &CoordFunction) -> CoordFunction {
        let mut out = CoordFunction::zero();
        for (ka, sa) in &self.terms {
            for (kb, sb) in &rhs.terms {
                out.add_term(ka.mul(kb), &(sa * sb));
            }
        }
        out
    }
}

impl From<Scalar> for CoordFunction {
    fn from(s: Scalar) -> Self {
        CoordFunction::constant(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::scalar::rat;

    fn x(j: usize) -> CoordFunction {
        CoordFunction::coordinate(j)
    }

    #[test]
    fn derivative_of_inverse_radius() {
        // ∂_1 r^-1 = -x1 r^-3
        let f = CoordFunction::r_pow(rat_int(-1));
        let d = f.partial_derivative(0);
        let expected = (&x(0) * &CoordFunction::r_pow(rat_int(-3))).scale(&Scalar::from_int(-1));
        assert_eq!(d, expected);
    }

    #[test]
    fn rho_is_independent_of_x1() {
        let f = CoordFunction::rho_pow(rat_int(-2));
        assert!(f.partial_derivative(0).is_zero());
    }

    #[test]
    fn derivative_of_transverse_ratio() {
        // ∂_2 (x2 rho^-2) = rho^-2 - 2 x2^2 rho^-4
        let f = &x(1) * &CoordFunction::rho_pow(rat_int(-2));
        let d = f.partial_derivative(1);
        let expected = &CoordFunction::rho_pow(rat_int(-2))
            - &(&(&x(1) * &x(1)) * &CoordFunction::rho_pow(rat_int(-4))).scale(&Scalar::from_int(2));
        assert_eq!(d, expected);
    }

    #[test]
    fn mixed_partials_commute_structurally() {
        let f = &(&x(0) * &x(2)) * &(&CoordFunction::r_pow(rat(-3, 2)) * &CoordFunction::rho_pow(rat(1, 3)));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(
                    f.partial_derivative(i).partial_derivative(j),
                    f.partial_derivative(j).partial_derivative(i)
                );
            }
        }
    }

    #[test]
    fn like_terms_merge() {
        let f = &x(0) + &x(0);
        assert_eq!(f.len(), 1);
        assert!((&f - &f).is_zero());
    }
}
