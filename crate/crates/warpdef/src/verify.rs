//! Identity suite shared by the command-line `verify` command and the acceptance tests.
//!
//! The operator under test is always computed under the requested convention;
//! every reference is built independently under the physical convention, so a
//! flipped commutation rule shows up as failures.

use std::time::Instant;

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::deform::{
    deform_coordinate, deform_operator_in, factorization_check, free_hamiltonian, rieffel_product_in,
    DeformationSpec,
};
use crate::gauge::{bianchi_holds, curl, extract_gauge_field, field_strength_in, jacobi_maxwell_report_in};
use crate::models::{catalog, guiding_center_coordinates, landau, uncertainty_symbols, aharonov_bohm};
use crate::opalg::scalar::{c_i, c_int, rat, rat_int};
use crate::opalg::{
    commutator, commutator_in, equals, multiply, multiply_in, parse_scalar, Convention, CoordFunction,
    DeformationMatrix, OperatorExpr, QSpec, Scalar,
};

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub group: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(group: &'static str, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult { group, name: name.into(), passed, detail: detail.into() }
}

/// Groups of the identity suite, in execution order.
pub const GROUPS: &[&str] = &["lemmas", "coefficients", "models", "moyal", "gauge", "ring"];

/// Generators used throughout the suite.
pub fn catalog_generators() -> Vec<QSpec> {
    vec![
        QSpec::coordinate(),
        QSpec::radial_power(rat_int(1)),
        QSpec::radial_power(rat(3, 2)),
        QSpec::radial_power(rat_int(2)),
        QSpec::transverse_radial(),
    ]
}

/// A skew matrix with one symbolic and two random rational axial components.
pub fn random_skew(rng: &mut ChaCha8Rng) -> DeformationMatrix {
    let mut r = || {
        let d = rng.gen_range(1..=5);
        Scalar::from_rational(rat(rng.gen_range(-9..=9), d))
    };
    let b = [&Scalar::constant("B") * &r(), r(), r()];
    DeformationMatrix::axial(b)
}

fn generic_matrix() -> DeformationMatrix {
    DeformationMatrix::axial([
        Scalar::constant("B"),
        Scalar::constant("e"),
        Scalar::from_rational(rat(-2, 3)),
    ])
}

/// `P_j + i (BQ)_k [Q_k, P_j]` with the commutator taken in the operator algebra.
fn reference_momentum(spec: &DeformationSpec, j: usize) -> OperatorExpr {
    let bq = spec.matrix.apply(&spec.generator.components);
    let mut out = OperatorExpr::momentum(j);
    for (k, bqk) in bq.iter().enumerate() {
        let qk = OperatorExpr::from_coord(spec.generator.components[k].clone());
        let c = commutator(&qk, &OperatorExpr::momentum(j));
        out.add_assign_ref(&multiply(&OperatorExpr::from_coord(bqk.clone()), &c).scale(&Scalar::i()));
    }
    out
}

fn reference_hamiltonian(spec: &DeformationSpec) -> OperatorExpr {
    let mut h = OperatorExpr::zero();
    for j in 0..3 {
        let p = reference_momentum(spec, j);
        h.add_assign_ref(&multiply(&p, &p));
    }
    h.scale(&parse_scalar("1/(2*m)", &[]).unwrap())
}

/// Closed-form deformation checks for all catalog generators.
pub fn lemma_suite(conv: Convention, seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let b = generic_matrix();
    for q in catalog_generators() {
        let spec = DeformationSpec::new(b.clone(), q.clone());
        let label = q.preset.to_string();
        let h = deform_operator_in(conv, &free_hamiltonian(), &spec);
        let ok = h.map(|h| equals(&h, &reference_hamiltonian(&spec))).unwrap_or(false);
        out.push(check("lemmas", format!("deformed free Hamiltonian, Q = {}", label), ok, ""));
        let ok = (0..3).all(|j| {
            deform_operator_in(conv, &OperatorExpr::momentum(j), &spec)
                .map(|p| equals(&p, &reference_momentum(&spec, j)))
                .unwrap_or(false)
        });
        out.push(check("lemmas", format!("deformed momentum, Q = {}", label), ok, ""));
        let ok = factorization_check(&spec).unwrap_or(false)
            && deform_operator_in(conv, &free_hamiltonian(), &spec)
                .map(|h| {
                    let p = [0, 1, 2].map(|j| reference_momentum(&spec, j));
                    let sq = p.iter().fold(OperatorExpr::zero(), |acc, pj| &acc + &multiply(pj, pj));
                    equals(&h, &sq.scale(&parse_scalar("1/(2*m)", &[]).unwrap()))
                })
                .unwrap_or(false);
        out.push(check("lemmas", format!("factorization into deformed momenta, Q = {}", label), ok, ""));
        let mut sum = OperatorExpr::zero();
        let mut ok = true;
        for k in 0..3 {
            match rieffel_product_in(conv, &OperatorExpr::momentum(k), &OperatorExpr::momentum(k), &spec) {
                Ok(p) => sum.add_assign_ref(&p),
                Err(_) => ok = false,
            }
        }
        let squares = crate::opalg::parse("P1^2 + P2^2 + P3^2").unwrap();
        out.push(check("lemmas", format!("Rieffel sum of squares, Q = {}", label), ok && equals(&sum, &squares), ""));
    }
    // deformed coordinates: X_j + i (θP)_k [P_k, X_j]
    let theta = generic_matrix();
    let ok = match deform_coordinate(&theta) {
        Ok(x) => (0..3).all(|j| {
            let mut reference = OperatorExpr::coordinate(j);
            for k in 0..3 {
                let mut tp = OperatorExpr::zero();
                for l in 0..3 {
                    tp.add_assign_ref(&OperatorExpr::momentum(l).scale(theta.entry(k, l)));
                }
                let c = commutator(&OperatorExpr::momentum(k), &OperatorExpr::coordinate(j));
                reference.add_assign_ref(&multiply(&tp, &c).scale(&Scalar::i()));
            }
            let under_conv = commutator_in(conv, &x[j], &OperatorExpr::coordinate(j));
            equals(&x[j], &reference) && under_conv.is_zero()
        }),
        Err(_) => false,
    };
    out.push(check("lemmas", "deformed coordinates", ok, ""));
    let ok = (0..3).all(|i| {
        (0..3).all(|j| {
            let c = commutator_in(conv, &OperatorExpr::coordinate(i), &OperatorExpr::momentum(j));
            let expected = if i == j { OperatorExpr::scalar(Scalar::i()) } else { OperatorExpr::zero() };
            c == expected
        })
    });
    out.push(check("lemmas", "canonical commutation relations", ok, ""));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generators = catalog_generators();
    let mut failures = 0;
    for case in 0..100 {
        let q = generators[case % generators.len()].clone();
        let s1 = DeformationSpec::new(random_skew(&mut rng), q.clone());
        let s2 = DeformationSpec::new(random_skew(&mut rng), q);
        let twice = deform_operator_in(conv, &free_hamiltonian(), &s1)
            .and_then(|h| deform_operator_in(conv, &h, &s2));
        let once = deform_operator_in(conv, &free_hamiltonian(), &s1.sum(&s2));
        let ok = match (twice, once) {
            (Ok(t), Ok(o)) => equals(&t, &o),
            _ => false,
        };
        if !ok {
            failures += 1;
        }
    }
    out.push(check("lemmas", "additivity for 100 random matrix pairs", failures == 0, format!("{} failures", failures)));
    out
}

/// `(n² - 3n)` and `(n² - 2n + 3)` read off from commutators with `Q = X / r^n`.
pub fn coefficient_identities(conv: Convention) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for n in [rat_int(-1), rat_int(0), rat_int(1), rat(3, 2), rat_int(2), rat_int(3)] {
        let q = QSpec::radial_power(n.clone());
        let a_n = &n * &n - rat_int(3) * &n;
        let c_n = &n * &n - rat_int(2) * &n + rat_int(3);
        let mut ok_a = true;
        for k in 0..3 {
            let qk = OperatorExpr::from_coord(q.components[k].clone());
            let mut sum = OperatorExpr::zero();
            for j in 0..3 {
                let pj = OperatorExpr::momentum(j);
                let inner = commutator_in(conv, &pj, &qk);
                sum.add_assign_ref(&(&multiply_in(conv, &pj, &inner) + &multiply_in(conv, &inner, &pj)));
            }
            // -(n² - 3n) x_k r^-(n+2)
            let expected = (&CoordFunction::coordinate(k) * &CoordFunction::r_pow(-(&n + rat_int(2))))
                .scale(&Scalar::from_rational(-a_n.clone()));
            ok_a &= equals(&OperatorExpr::from_coord(sum.coordinate_part()), &OperatorExpr::from_coord(expected));
        }
        out.push(check(
            "coefficients",
            format!("anticommutator coefficient, n = {}", n),
            ok_a,
            format!("|a(n)| = {}", a_n.abs()),
        ));
        let mut sum = OperatorExpr::zero();
        for l in 0..3 {
            let ql = OperatorExpr::from_coord(q.components[l].clone());
            for j in 0..3 {
                let c = commutator_in(conv, &ql, &OperatorExpr::momentum(j));
                sum.add_assign_ref(&multiply_in(conv, &c, &c));
            }
        }
        let expected = CoordFunction::r_pow(-(rat_int(2) * &n)).scale(&Scalar::from_rational(-c_n.clone()));
        let ok = sum.momentum_degree() == 0 && equals(&sum, &OperatorExpr::from_coord(expected));
        out.push(check("coefficients", format!("squared commutator coefficient, n = {}", n), ok, format!("n^2 - 2n + 3 = {}", c_n)));
    }
    out
}

pub fn model_equivalences(conv: Convention) -> Vec<CheckResult> {
    catalog()
        .into_iter()
        .map(|p| match p.check_in(conv) {
            Ok(c) => {
                let detail = format!(
                    "exact={} linearized={:?} order_independent={:?}",
                    c.exact, c.linearized, c.order_independent
                );
                check("models", p.name, c.passed(), detail)
            }
            Err(e) => check("models", p.name, false, e.to_string()),
        })
        .collect()
}

fn scalar_op(s: &Scalar) -> OperatorExpr {
    OperatorExpr::scalar(s.clone())
}

pub fn moyal_weyl(conv: Convention, seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d77);
    let mut failures = 0;
    for _ in 0..cases {
        let theta = random_skew(&mut rng);
        let Ok(x) = deform_coordinate(&theta) else {
            failures += 1;
            continue;
        };
        for i in 0..3 {
            for j in 0..3 {
                let c = commutator_in(conv, &x[i], &x[j]);
                let expected = scalar_op(&theta.entry(i, j).scale(&(-c_i() * c_int(2))));
                if c != expected {
                    failures += 1;
                }
            }
        }
    }
    out.push(check("moyal", format!("deformed coordinate commutators, {} random matrices", cases), failures == 0, format!("{} failures", failures)));
    let ok = match guiding_center_coordinates(&landau().specs[0].matrix, 0) {
        Ok(gc) => (0..3).all(|i| (0..3).all(|j| commutator_in(conv, &gc.coordinates[i], &gc.coordinates[j]) == gc.expected[i][j])),
        Err(_) => false,
    };
    out.push(check("moyal", "guiding-center commutator i (B^-1)_ij", ok, ""));
    let (bound, area) = uncertainty_symbols();
    let expected_area = parse_scalar("2*pi*hbar*m^-1*Omega^-1", &[]).unwrap();
    let ok = area == expected_area && area == &bound * &parse_scalar("2*pi", &[]).unwrap();
    out.push(check("moyal", "uncertainty area 2 pi hbar/(m Omega)", ok, area.to_string()));
    out
}

pub fn gauge_structure(conv: Convention) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for p in catalog() {
        let mut ok_curl = true;
        let mut ok_bianchi = true;
        let mut ok_jacobi = true;
        for (spec, g) in p.specs.iter().zip(&p.couplings) {
            match (field_strength_in(conv, spec, g), extract_gauge_field(spec, g)) {
                (Ok(f), Ok(a)) => {
                    ok_curl &= f.agrees_with(&curl(&a)) && f.is_antisymmetric();
                    ok_bianchi &= bianchi_holds(&f);
                }
                _ => {
                    ok_curl = false;
                    ok_bianchi = false;
                }
            }
            let potential = p.potential.clone();
            ok_jacobi &= jacobi_maxwell_report_in(conv, spec, g, &potential).map(|r| r.all_zero()).unwrap_or(false);
        }
        out.push(check("gauge", format!("{}: field strength from commutators equals curl", p.name), ok_curl, ""));
        out.push(check("gauge", format!("{}: Bianchi identity", p.name), ok_bianchi, ""));
        out.push(check("gauge", format!("{}: Jacobi identities and static field equations", p.name), ok_jacobi, ""));
    }
    let ab = aharonov_bohm();
    let ok = field_strength_in(conv, &ab.specs[0], &ab.couplings[0]).map(|f| f.is_zero()).unwrap_or(false);
    out.push(check("gauge", "Aharonov-Bohm field strength vanishes off the axis", ok, ""));
    out
}

/// A random normal-ordered expression with up to `terms` terms of momentum degree at most 2.
pub fn random_expr(rng: &mut ChaCha8Rng, terms: usize) -> OperatorExpr {
    let mut out = OperatorExpr::zero();
    let radial = [rat_int(0), rat_int(-1), rat(1, 2), rat(-3, 2)];
    for _ in 0..rng.gen_range(1..=terms) {
        let re = rat(rng.gen_range(-5..=5), rng.gen_range(1..=3));
        let im = rat(rng.gen_range(-2..=2), 1);
        let mut s = Scalar::from_complex(num_complex::Complex::new(re, im));
        if rng.gen_bool(0.3) {
            s = &s * &Scalar::constant("m");
        }
        let mut f = CoordFunction::constant(s);
        for j in 0..3 {
            if rng.gen_bool(0.35) {
                f = &f * &CoordFunction::coordinate(j);
            }
        }
        if rng.gen_bool(0.3) {
            f = &f * &CoordFunction::r_pow(radial[rng.gen_range(0..radial.len())].clone());
        }
        if rng.gen_bool(0.15) {
            f = &f * &CoordFunction::rho_pow(rat_int(-2));
        }
        let mut k = [0u32; 3];
        let degree = rng.gen_range(0..=2);
        for _ in 0..degree {
            k[rng.gen_range(0..3)] += 1;
        }
        out.add_assign_ref(&OperatorExpr::term(f, k));
    }
    out
}

/// Ring axioms and the Jacobi identity on random expressions.
pub fn ring_axioms(conv: Convention, seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7269);
    let mut fails = [0usize; 4];
    for _ in 0..cases {
        let a = random_expr(&mut rng, 2);
        let b = random_expr(&mut rng, 2);
        let c = random_expr(&mut rng, 2);
        let lambda = Scalar::from_rational(rat(rng.gen_range(-7..=7), rng.gen_range(1..=4)));
        let ab = multiply_in(conv, &a, &b);
        if !equals(&multiply_in(conv, &ab, &c), &multiply_in(conv, &a, &multiply_in(conv, &b, &c))) {
            fails[0] += 1;
        }
        let bc = &b + &c;
        if !equals(&multiply_in(conv, &a, &bc), &(&ab + &multiply_in(conv, &a, &c))) {
            fails[1] += 1;
        }
        let lin = commutator_in(conv, &a, &(&b.scale(&lambda) + &c));
        let split = &commutator_in(conv, &a, &b).scale(&lambda) + &commutator_in(conv, &a, &c);
        if !equals(&lin, &split) {
            fails[2] += 1;
        }
        let j = &(&commutator_in(conv, &a, &commutator_in(conv, &b, &c)) + &commutator_in(conv, &b, &commutator_in(conv, &c, &a)))
            + &commutator_in(conv, &c, &commutator_in(conv, &a, &b));
        if !j.is_zero() {
            fails[3] += 1;
        }
    }
    ["associativity", "distributivity", "commutator bilinearity", "Jacobi identity"]
        .iter()
        .zip(fails)
        .map(|(name, f)| check("ring", format!("{} on {} random cases", name, cases), f == 0, format!("{} failures", f)))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub convention: String,
    pub seed: u64,
    pub results: Vec<CheckResult>,
    pub passed: bool,
}

/// Runs the selected groups, all of them when `only` is `None`.
pub fn run_suite(conv: Convention, seed: u64, only: Option<&[String]>) -> SuiteReport {
    let selected = |g: &str| only.map_or(true, |o| o.iter().any(|x| x == g));
    let mut results = Vec::new();
    if selected("lemmas") {
        results.extend(lemma_suite(conv, seed));
    }
    if selected("coefficients") {
        results.extend(coefficient_identities(conv));
    }
    if selected("models") {
        results.extend(model_equivalences(conv));
    }
    if selected("moyal") {
        results.extend(moyal_weyl(conv, seed, 100));
    }
    if selected("gauge") {
        results.extend(gauge_structure(conv));
    }
    if selected("ring") {
        results.extend(ring_axioms(conv, seed, 1000));
    }
    let passed = results.iter().all(|r| r.passed);
    SuiteReport { convention: format!("{:?}", conv), seed, results, passed }
}

/// Wall-clock seconds for a closure, with its result.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed().as_secs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_identities_hold() {
        assert!(coefficient_identities(Convention::C1).iter().all(|r| r.passed));
    }

    #[test]
    fn flipped_convention_is_detected() {
        let lemmas = lemma_suite(Convention::FlippedSign, 3);
        let additivity = lemmas.iter().find(|r| r.name.starts_with("additivity")).unwrap();
        assert!(additivity.passed);
        assert!(lemmas.iter().any(|r| !r.passed));
        assert!(gauge_structure(Convention::FlippedSign).iter().any(|r| !r.passed));
    }

    #[test]
    fn small_ring_run() {
        assert!(ring_axioms(Convention::C1, 1, 20).iter().all(|r| r.passed));
    }
}
