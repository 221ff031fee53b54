//! Exact pointwise evaluation and the randomized equality oracle.
//!
//! With `R = r^2` and `S = rho^2` rational at rational points, every term
//! `r^p rho^q` is a rational multiple of a basis element `R^(i/Dr) S^(j/Ds)`.
//! Points are chosen so that no nontrivial basis element is rational; the
//! basis is then linearly independent over the rationals, so a value vanishes
//! exactly when all of its basis coefficients vanish.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::coord::{lcm, CoordFunction};
use super::expr::OperatorExpr;
use super::scalar::{c_is_zero, c_real, rat, rat_int, rational_to_f64, CRational, Rational, ScalarError};

pub const DEFAULT_SEED: u64 = 0x5eed_0f_c1;
pub const DEFAULT_POINTS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("expression is singular at the evaluation point ({0})")]
    Singular(&'static str),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// `Σ c_ij · R^(i/dr) · S^(j/ds)` with `R = r^2`, `S = rho^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadicalValue {
    pub dr: u64,
    pub ds: u64,
    pub r_sq: Rational,
    pub rho_sq: Rational,
    pub coeffs: BTreeMap<(u64, u64), CRational>,
}

impl RadicalValue {
    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(c_is_zero)
    }

    /// The value when it has no irrational radical part.
    pub fn as_rational(&self) -> Option<CRational> {
        if self.coeffs.keys().any(|k| *k != (0, 0)) {
            return None;
        }
        Some(self.coeffs.get(&(0, 0)).cloned().unwrap_or_else(|| c_real(Rational::zero())))
    }

    pub fn to_f64(&self) -> Complex<f64> {
        let big_r = rational_to_f64(&self.r_sq);
        let big_s = rational_to_f64(&self.rho_sq);
        let mut acc = Complex::new(0.0, 0.0);
        for ((i, j), c) in &self.coeffs {
            let basis = big_r.powf(*i as f64 / self.dr as f64) * big_s.powf(*j as f64 / self.ds as f64);
            acc += Complex::new(rational_to_f64(&c.re), rational_to_f64(&c.im)) * basis;
        }
        acc
    }
}

/// Splits `e/2` (for `base^(e/2)`) into `n + i/d` with `0 <= i < d`.
fn split_half(e: &Rational, d: u64) -> (i32, u64) {
    let scaled = e * rat_int(d as i64) / rat_int(2);
    debug_assert!(scaled.is_integer());
    let num = scaled.to_integer();
    let (q, r) = num.div_mod_floor(&BigInt::from(d));
    (q.to_i32().expect("exponent overflow"), r.to_u64().unwrap())
}

fn pow_rational(base: &Rational, e: i32) -> Rational {
    if e >= 0 {
        num_traits::pow(base.clone(), e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

/// Evaluates a coordinate function at a rational point, with radical orders `(dr, ds)`.
pub fn evaluate_coord_with(
    f: &CoordFunction,
    point: &[Rational; 3],
    constants: &BTreeMap<String, Rational>,
    dr: u64,
    ds: u64,
) -> Result<RadicalValue, EvalError> {
    let rho_sq = &point[1] * &point[1] + &point[2] * &point[2];
    let r_sq = &point[0] * &point[0] + &rho_sq;
    let mut coeffs: BTreeMap<(u64, u64), CRational> = BTreeMap::new();
    for (key, s) in f.terms() {
        let mut value = s.eval(constants)?;
        for (j, a) in key.x.iter().enumerate() {
            value = value * c_real(num_traits::pow(point[j].clone(), *a as usize));
        }
        let (nr, ir) = split_half(&key.r, dr);
        let (ns, js) = split_half(&key.rho, ds);
        for (sq, e, n, label) in [(&r_sq, &key.r, nr, "r = 0"), (&rho_sq, &key.rho, ns, "rho = 0")] {
            if sq.is_zero() {
                if e.is_negative() {
                    return Err(EvalError::Singular(label));
                }
                if e.is_positive() {
                    value = c_real(Rational::zero());
                }
            } else if !e.is_zero() {
                value = value * c_real(pow_rational(sq, n));
            }
        }
        let idx = (if r_sq.is_zero() { 0 } else { ir }, if rho_sq.is_zero() { 0 } else { js });
        let slot = coeffs.entry(idx).or_insert_with(|| c_real(Rational::zero()));
        *slot = &*slot + &value;
    }
    coeffs.retain(|_, c| !c_is_zero(c));
    Ok(RadicalValue { dr, ds, r_sq, rho_sq, coeffs })
}

pub fn evaluate_coord(
    f: &CoordFunction,
    point: &[Rational; 3],
    constants: &BTreeMap<String, Rational>,
) -> Result<RadicalValue, EvalError> {
    let (dr, ds) = f.radical_orders();
    evaluate_coord_with(f, point, constants, dr, ds)
}

/// A coordinate function with its constants bound, for fast floating-point evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericCoord {
    terms: Vec<(Complex<f64>, [i32; 3], f64, f64)>,
}

impl NumericCoord {
    pub fn new(f: &CoordFunction, constants: &BTreeMap<String, f64>) -> Result<Self, EvalError> {
        let mut terms = Vec::new();
        for (key, s) in f.terms() {
            let c = s.eval_f64(constants)?;
            let x = key.x.map(|a| a as i32);
            terms.push((c, x, rational_to_f64(&key.r), rational_to_f64(&key.rho)));
        }
        Ok(NumericCoord { terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: [f64; 3]) -> Result<Complex<f64>, EvalError> {
        let rho_sq = x[1] * x[1] + x[2] * x[2];
        let r_sq = x[0] * x[0] + rho_sq;
        let mut acc = Complex::new(0.0, 0.0);
        for (c, a, p, q) in &self.terms {
            let mut v = *c;
            for j in 0..3 {
                v *= x[j].powi(a[j]);
            }
            for (sq, e, label) in [(r_sq, *p, "r = 0"), (rho_sq, *q, "rho = 0")] {
                if e != 0.0 {
                    if sq == 0.0 && e < 0.0 {
                        return Err(EvalError::Singular(label));
                    }
                    v *= sq.powf(e / 2.0);
                }
            }
            acc += v;
        }
        Ok(acc)
    }
}

/// Evaluates the symbol of a normal-ordered operator: `Σ_k f_k(x) p^k`.
pub fn evaluate(
    a: &OperatorExpr,
    point: &[Rational; 3],
    momentum: &[Rational; 3],
    constants: &BTreeMap<String, Rational>,
) -> Result<RadicalValue, EvalError> {
    let mut f = CoordFunction::zero();
    for (k, cf) in a.terms() {
        let mut weight = Rational::from_integer(1.into());
        for j in 0..3 {
            weight *= num_traits::pow(momentum[j].clone(), k[j] as usize);
        }
        f.add_assign_ref(&cf.scale(&super::scalar::Scalar::from_rational(weight)));
    }
    evaluate_coord(&f, point, constants)
}

fn trial_factor(mut n: u64) -> Vec<(u64, i64)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Prime valuations of a positive rational, or `None` if it is too large to factor.
fn valuations(q: &Rational) -> Option<BTreeMap<u64, i64>> {
    let num = q.numer().to_u64()?;
    let den = q.denom().to_u64()?;
    let mut out = BTreeMap::new();
    for (p, e) in trial_factor(num) {
        *out.entry(p).or_insert(0) += e;
    }
    for (p, e) in trial_factor(den) {
        *out.entry(p).or_insert(0) -= e;
    }
    Some(out)
}

/// True when no `R^(i/dr) S^(j/ds)` with `(i, j) != (0, 0)` is rational.
fn radicals_independent(r_sq: &Rational, rho_sq: &Rational, dr: u64, ds: u64) -> bool {
    if dr == 1 && ds == 1 {
        return true;
    }
    let (Some(vr), Some(vs)) = (valuations(r_sq), valuations(rho_sq)) else {
        return false;
    };
    let primes: BTreeSet<u64> = vr.keys().chain(vs.keys()).copied().collect();
    let modulus = (dr * ds) as i64;
    for i in 0..dr {
        for j in 0..ds {
            if i == 0 && j == 0 {
                continue;
            }
            let rational = primes.iter().all(|p| {
                let a = vr.get(p).copied().unwrap_or(0);
                let b = vs.get(p).copied().unwrap_or(0);
                (i as i64 * a * ds as i64 + j as i64 * b * dr as i64).rem_euclid(modulus) == 0
            });
            if rational {
                return false;
            }
        }
    }
    true
}

fn random_rational(rng: &mut ChaCha8Rng, bound: i64, max_den: i64) -> Rational {
    let d = rng.gen_range(1..=max_den);
    let n = rng.gen_range(-bound * d..=bound * d);
    rat(n, d)
}

/// A random rational point off the x1 axis whose radicals are independent.
pub fn sample_point(rng: &mut ChaCha8Rng, dr: u64, ds: u64) -> [Rational; 3] {
    loop {
        let p = [0, 1, 2].map(|_| random_rational(rng, 10, 7));
        let rho_sq = &p[1] * &p[1] + &p[2] * &p[2];
        if rho_sq.is_zero() {
            continue;
        }
        let r_sq = &p[0] * &p[0] + &rho_sq;
        if radicals_independent(&r_sq, &rho_sq, dr, ds) {
            return p;
        }
    }
}

/// Random nonzero rational values for the given constant names.
pub fn sample_constants<'a>(rng: &mut ChaCha8Rng, names: impl IntoIterator<Item = &'a str>) -> BTreeMap<String, Rational> {
    let mut out = BTreeMap::new();
    for name in names {
        let v = loop {
            let d = rng.gen_range(1..=5);
            let n = rng.gen_range(-9..=9);
            if n != 0 {
                break rat(n, d);
            }
        };
        out.insert(name.to_string(), v);
    }
    out
}

fn expr_symbols(a: &OperatorExpr, out: &mut BTreeSet<String>) {
    for (_, cf) in a.terms() {
        for (_, s) in cf.terms() {
            for sym in s.symbols() {
                out.insert(sym.to_string());
            }
        }
    }
}

/// A point where two operators were found to differ.
#[derive(Debug, Clone)]
pub struct Witness {
    pub point: [Rational; 3],
    pub constants: BTreeMap<String, Rational>,
    pub momentum_index: [u32; 3],
    pub difference: RadicalValue,
}

/// Searches for a point where `a` and `b` differ; `None` means they agree at all samples.
pub fn find_difference(a: &OperatorExpr, b: &OperatorExpr, seed: u64, samples: usize) -> Option<Witness> {
    if a == b {
        return None;
    }
    let diff = a - b;
    if diff.is_zero() {
        return None;
    }
    let mut names = BTreeSet::new();
    expr_symbols(&diff, &mut names);
    let (mut dr, mut ds) = (1u64, 1u64);
    for (_, cf) in diff.terms() {
        let (r, s) = cf.radical_orders();
        dr = lcm(dr, r);
        ds = lcm(ds, s);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples.max(1) {
        let point = sample_point(&mut rng, dr, ds);
        let constants = sample_constants(&mut rng, names.iter().map(|s| s.as_str()));
        for (k, cf) in diff.terms() {
            let value = evaluate_coord_with(cf, &point, &constants, dr, ds)
                .expect("sample points avoid singularities and bind all constants");
            if !value.is_zero() {
                return Some(Witness { point, constants, momentum_index: *k, difference: value });
            }
        }
    }
    None
}

pub fn equals_with(a: &OperatorExpr, b: &OperatorExpr, seed: u64, samples: usize) -> bool {
    find_difference(a, b, seed, samples).is_none()
}

/// Structural match first, then exact evaluation at random rational points.
pub fn equals(a: &OperatorExpr, b: &OperatorExpr) -> bool {
    equals_with(a, b, DEFAULT_SEED, DEFAULT_POINTS)
}

pub fn coord_equals(f: &CoordFunction, g: &CoordFunction) -> bool {
    equals(&OperatorExpr::from_coord(f.clone()), &OperatorExpr::from_coord(g.clone()))
}
