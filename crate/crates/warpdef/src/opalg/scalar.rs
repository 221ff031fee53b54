//! Exact scalars: complex rationals times Laurent monomials in named constants.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;
pub type CRational = Complex<BigRational>;

/// Physical constants the parser recognises without declaration.
pub const KNOWN_CONSTANTS: &[&str] = &[
    "e", "m", "G", "M", "I", "r_hs", "phi_M", "Omega", "B", "omega", "hbar", "pi",
];

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn c_real(r: Rational) -> CRational {
    Complex::new(r, Rational::zero())
}

pub fn c_int(n: i64) -> CRational {
    c_real(rat_int(n))
}

pub fn c_i() -> CRational {
    Complex::new(Rational::zero(), Rational::one())
}

pub fn c_is_zero(c: &CRational) -> bool {
    c.re.is_zero() && c.im.is_zero()
}

/// Integer power of an exact complex rational; negative powers invert.
pub fn c_pow(base: &CRational, exp: i32) -> Option<CRational> {
    if exp < 0 {
        if c_is_zero(base) {
            return None;
        }
        let inv = c_inv(base);
        return c_pow(&inv, -exp);
    }
    let mut acc = c_int(1);
    for _ in 0..exp {
        acc = &acc * base;
    }
    Some(acc)
}

pub fn c_inv(c: &CRational) -> CRational {
    let norm = &c.re * &c.re + &c.im * &c.im;
    Complex::new(&c.re / &norm, -(&c.im / &norm))
}

/// Writes a rational as `n` or `n/d`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn fmt_complex(c: &CRational) -> String {
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => fmt_rational(&c.re),
        (true, false) => {
            if c.im.is_one() {
                "i".to_string()
            } else if (-&c.im).is_one() {
                "-i".to_string()
            } else {
                format!("{}*i", fmt_rational(&c.im))
            }
        }
        (false, false) => {
            let sign = if c.im.is_negative() { "-" } else { "+" };
            let im = c.im.abs();
            let im_s = if im.is_one() {
                "i".to_string()
            } else {
                format!("{}*i", fmt_rational(&im))
            };
            format!("({}{}{})", fmt_rational(&c.re), sign, im_s)
        }
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // very large numerator/denominator; scale through the bit length
            let shift = r.denom().bits().max(r.numer().bits()) as i64 - 60;
            let n = (r.numer() >> shift.max(0) as usize).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift.max(0) as usize).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// A product of named constants with integer exponents, sorted by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(Vec<(Arc<str>, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn symbol(name: &str) -> Self {
        Monomial(vec![(Arc::from(name), 1)])
    }

    pub fn from_powers<'a>(powers: impl IntoIterator<Item = (&'a str, i32)>) -> Self {
        let mut map: BTreeMap<Arc<str>, i32> = BTreeMap::new();
        for (name, e) in powers {
            *map.entry(Arc::from(name)).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|(_, e)| *e != 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn powers(&self) -> impl Iterator<Item = (&str, i32)> {
        self.0.iter().map(|(n, e)| (n.as_ref(), *e))
    }

    pub fn exponent(&self, name: &str) -> i32 {
        self.0
            .iter()
            .find(|(n, _)| n.as_ref() == name)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    if a.1 + b.1 != 0 {
                        out.push((a.0.clone(), a.1 + b.1));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    out.push(a.clone());
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    out.push(b.clone());
                    j += 1;
                }
                (Some(a), None) => {
                    out.push(a.clone());
                    i += 1;
                }
                (None, Some(b)) => {
                    out.push(b.clone());
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Monomial(out)
    }

    pub fn pow(&self, k: i32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|(n, e)| (n.clone(), e * k)).collect())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(n, _)| n.as_ref())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(n, e)| if *e == 1 { n.to_string() } else { format!("{}^{}", n, e) })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("constant `{0}` has no value")]
    Unbound(String),
    #[error("constant `{0}` is zero but appears with a negative power")]
    ZeroDivision(String),
    #[error("scalar is not a single monomial and cannot be inverted")]
    NotInvertible,
}

/// Exact Laurent polynomial in named constants with complex rational coefficients.
///
/// A single-term `Scalar` is what the rest of the crate calls a symbolic scalar.
/// Zero coefficients never appear in the map.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Scalar {
    terms: BTreeMap<Monomial, CRational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_complex(c_int(1))
    }

    pub fn i() -> Self {
        Scalar::from_complex(c_i())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_complex(c_int(n))
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar::from_complex(c_real(r))
    }

    pub fn from_complex(c: CRational) -> Self {
        Scalar::term(c, Monomial::one())
    }

    pub fn constant(name: &str) -> Self {
        Scalar::term(c_int(1), Monomial::symbol(name))
    }

    pub fn term(c: CRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c_is_zero(&c) {
            terms.insert(m, c);
        }
        Scalar { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` if the scalar is a pure number.
    pub fn as_number(&self) -> Option<CRational> {
        match self.terms.len() {
            0 => Some(c_int(0)),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn as_single_term(&self) -> Option<(&CRational, &Monomial)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, c)| (c, m))
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Monomial, c: CRational) {
        if c_is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = &*v + &c;
                if c_is_zero(v) {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Scalar) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &CRational) -> Scalar {
        if c_is_zero(c) {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn conj(&self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.conj())).collect(),
        }
    }

    /// Inverse of a single-term scalar.
    pub fn inverse(&self) -> Result<Scalar, ScalarError> {
        match self.as_single_term() {
            Some((c, m)) => Ok(Scalar::term(c_inv(c), m.pow(-1))),
            None => Err(ScalarError::NotInvertible),
        }
    }

    /// Integer power; negative powers require a single-term scalar.
    pub fn pow(&self, k: i32) -> Result<Scalar, ScalarError> {
        if k < 0 {
            return self.inverse()?.pow(-k);
        }
        let mut acc = Scalar::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        Ok(acc)
    }

    /// Highest exponent of `name` over all terms (0 for the zero scalar).
    pub fn degree_in(&self, name: &str) -> i32 {
        self.terms.keys().map(|m| m.exponent(name)).max().unwrap_or(0)
    }

    /// Drops every term whose exponent of `name` exceeds `max_degree`.
    pub fn truncate(&self, name: &str, max_degree: i32) -> Scalar {
        Scalar {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exponent(name) <= max_degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Replaces constant `name` by `value` everywhere.
    pub fn substitute(&self, name: &str, value: &Scalar) -> Result<Scalar, ScalarError> {
        let mut out = Scalar::zero();
        for (m, c) in &self.terms {
            let k = m.exponent(name);
            let rest = Monomial(m.0.iter().filter(|(n, _)| n.as_ref() != name).cloned().collect());
            let factor = value.pow(k)?;
            out.add_assign_ref(&(&Scalar::term(c.clone(), rest) * &factor));
        }
        Ok(out)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().flat_map(|m| m.names())
    }

    /// Exact value with every constant bound.
    pub fn eval(&self, constants: &BTreeMap<String, Rational>) -> Result<CRational, ScalarError> {
        let mut acc = c_int(0);
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (name, e) in m.powers() {
                let x = constants
                    .get(name)
                    .ok_or_else(|| ScalarError::Unbound(name.to_string()))?;
                if x.is_zero() && e < 0 {
                    return Err(ScalarError::ZeroDivision(name.to_string()));
                }
                let p = if e >= 0 {
                    num_traits::pow(x.clone(), e as usize)
                } else {
                    num_traits::pow(x.recip(), (-e) as usize)
                };
                v = v * c_real(p);
            }
            acc = acc + v;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, constants: &BTreeMap<String, f64>) -> Result<Complex<f64>, ScalarError> {
        let mut acc = Complex::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = Complex::new(rational_to_f64(&c.re), rational_to_f64(&c.im));
            for (name, e) in m.powers() {
                let x = match (constants.get(name), name) {
                    (Some(x), _) => x,
                    (None, "pi") => &std::f64::consts::PI,
                    (None, _) => return Err(ScalarError::Unbound(name.to_string())),
                };
                if *x == 0.0 && e < 0 {
                    return Err(ScalarError::ZeroDivision(name.to_string()));
                }
                v *= x.powi(e);
            }
            acc += v;
        }
        Ok(acc)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.is_one() {
                    fmt_complex(c)
                } else if *c == c_int(1) {
                    m.to_string()
                } else {
                    format!("{}*{}", fmt_complex(c), m)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
