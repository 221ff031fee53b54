//! Canonical JSON for operator expressions.
//!
//! An expression is a list of terms, each a complex rational coefficient,
//! a constant monomial, coordinate exponents and a momentum multi-index.
//! Rationals are `{"num": "...", "den": "..."}` with decimal strings.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::coord::{CoordFunction, CoordKey};
use super::expr::OperatorExpr;
use super::scalar::{CRational, Monomial, Rational, Scalar};

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct JsonRational {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for JsonRational {
    fn from(r: &Rational) -> Self {
        JsonRational { num: r.numer().to_string(), den: r.denom().to_string() }
    }
}

impl JsonRational {
    pub fn to_rational(&self) -> Result<Rational, JsonError> {
        let n: BigInt = self.num.parse().map_err(|_| JsonError::BadNumber(self.num.clone()))?;
        let d: BigInt = self.den.parse().map_err(|_| JsonError::BadNumber(self.den.clone()))?;
        if d == BigInt::from(0) {
            return Err(JsonError::BadNumber(self.den.clone()));
        }
        Ok(Rational::new(n, d))
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct JsonComplex {
    pub re: JsonRational,
    pub im: JsonRational,
}

impl From<&CRational> for JsonComplex {
    fn from(c: &CRational) -> Self {
        JsonComplex { re: (&c.re).into(), im: (&c.im).into() }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct JsonTerm {
    pub coefficient: JsonComplex,
    pub constants: BTreeMap<String, i32>,
    pub x: [u32; 3],
    pub r: JsonRational,
    pub rho: JsonRational,
    pub momentum: [u32; 3],
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct JsonExpr {
    pub terms: Vec<JsonTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JsonError {
    #[error("malformed expression JSON: {0}")]
    Shape(String),
    #[error("malformed number `{0}`")]
    BadNumber(String),
}

pub fn to_json_expr(a: &OperatorExpr) -> JsonExpr {
    let mut terms = Vec::new();
    for (k, cf) in a.terms() {
        for (key, s) in cf.terms() {
            for (mono, c) in s.terms() {
                terms.push(JsonTerm {
                    coefficient: c.into(),
                    constants: mono.powers().map(|(n, e)| (n.to_string(), e)).collect(),
                    x: key.x,
                    r: (&key.r).into(),
                    rho: (&key.rho).into(),
                    momentum: *k,
                });
            }
        }
    }
    JsonExpr { terms }
}

pub fn to_json(a: &OperatorExpr) -> Value {
    serde_json::to_value(to_json_expr(a)).expect("expression JSON is always serializable")
}

pub fn from_json_expr(e: &JsonExpr) -> Result<OperatorExpr, JsonError> {
    let mut out = OperatorExpr::zero();
    for t in &e.terms {
        let c = Complex::new(t.coefficient.re.to_rational()?, t.coefficient.im.to_rational()?);
        let mono = Monomial::from_powers(t.constants.iter().map(|(n, e)| (n.as_str(), *e)));
        let key = CoordKey { x: t.x, r: t.r.to_rational()?, rho: t.rho.to_rational()? };
        let f = CoordFunction::term(Scalar::term(c, mono), key);
        out.add_assign_ref(&OperatorExpr::term(f, t.momentum));
    }
    Ok(out)
}

pub fn from_json(v: &Value) -> Result<OperatorExpr, JsonError> {
    let e: JsonExpr = serde_json::from_value(v.clone()).map_err(|err| JsonError::Shape(err.to_string()))?;
    from_json_expr(&e)
}
