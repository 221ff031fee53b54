use std::collections::BTreeMap;
use std::f64::consts::PI;

use warpdef::models::{catalog, free_particle, landau};
use warpdef::opalg::parse_coord;
use warpdef::spectra::{
    discretize, discretize_fields, eigenvalues, eigenvalues_with, landau_degeneracy, preset_shift, EigenOptions,
    GridSpec, RESIDUAL_TOL,
};

fn constants(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn all_constants() -> BTreeMap<String, f64> {
    constants(&[
        ("e", 1.0),
        ("m", 1.0),
        ("B", 1.0),
        ("G", 1.0),
        ("M", 1.0),
        ("r_hs", 4.0),
        ("omega", 1.0),
        ("I", 1.0),
        ("phi_M", 0.8),
    ])
}

fn landau_levels(n: usize, l: f64, b: f64, k: usize) -> Vec<f64> {
    let c = constants(&[("e", 1.0), ("m", 1.0), ("B", b)]);
    let d = discretize(&landau(), &GridSpec::new(n, l, 0).unwrap(), &c).unwrap();
    let r = eigenvalues(&d.matrix, k).unwrap();
    assert!(r.max_residual() <= RESIDUAL_TOL);
    landau_degeneracy(&r, 1e-3).levels(3)
}

#[test]
fn free_box_levels() {
    let (n, l, m) = (32, 10.0, 1.0);
    let d = discretize(&free_particle(), &GridSpec::new(n, l, 0).unwrap(), &constants(&[("m", m)])).unwrap();
    let r = eigenvalues(&d.matrix, 12).unwrap();
    let h = l / (n as f64 + 1.0);
    let lattice = |i: usize| (2.0 - 2.0 * (i as f64 * PI / (n as f64 + 1.0)).cos()) / (2.0 * m * h * h);
    let mut expected: Vec<f64> = (1..=6).flat_map(|i| (1..=6).map(move |j| (i, j))).map(|(i, j)| lattice(i) + lattice(j)).collect();
    expected.sort_by(f64::total_cmp);
    for (got, want) in r.eigenvalues.iter().zip(&expected) {
        assert!((got - want).abs() < 1e-9, "{} vs {}", got, want);
    }
    // (1,1), (1,2)=(2,1), (2,2) in units of pi^2/(2 m L^2)
    let unit = PI * PI / (2.0 * m * l * l);
    let levels = landau_degeneracy(&r, 1e-6).levels(1);
    for (got, want) in levels.iter().zip([2.0, 5.0, 8.0]) {
        assert!((got / (want * unit) - 1.0).abs() < 0.01, "{} vs {}", got, want * unit);
    }
}

#[test]
fn every_preset_discretizes_to_a_hermitian_matrix() {
    let c = all_constants();
    for preset in catalog() {
        let d = discretize(&preset, &GridSpec::new(24, 4.0, 0).unwrap(), &c).unwrap();
        assert!(d.hermiticity_defect < 1e-12, "{}: {:e}", preset.name, d.hermiticity_defect);
    }
}

#[test]
fn a_pure_gauge_shift_leaves_the_spectrum_unchanged() {
    let c = constants(&[("e", 1.0), ("m", 1.0), ("B", 1.0)]);
    let grid = GridSpec::new(64, 12.0, 0).unwrap();
    let symmetric = preset_shift(&landau());
    let chi = parse_coord("3/10*X2 + 1/2*X2*X3 - 1/5*X3^2", &[]).unwrap();
    let grad = chi.gradient();
    let shifted = [&symmetric[0] + &grad[0], &symmetric[1] + &grad[1], &symmetric[2] + &grad[2]];
    let zero = parse_coord("0", &[]).unwrap();
    let a = eigenvalues(&discretize_fields(&symmetric, &zero, &grid, &c).unwrap().matrix, 24).unwrap();
    let b = eigenvalues(&discretize_fields(&shifted, &zero, &grid, &c).unwrap().matrix, 24).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((x / y - 1.0).abs() < 5e-3, "{} vs {}", x, y);
    }
}

#[test]
fn refining_the_grid_moves_the_lowest_level_little() {
    let coarse = landau_levels(128, 12.0, 1.0, 8);
    let fine = landau_levels(256, 12.0, 1.0, 8);
    let change = (fine[0] / coarse[0] - 1.0).abs();
    assert!(change < 5e-3, "{} -> {} ({:.2e})", coarse[0], fine[0], change);
}

#[test]
fn landau_spacing_is_linear_in_the_field() {
    let fields = [0.8, 1.0, 1.25];
    let spacings: Vec<f64> = fields
        .iter()
        .map(|&b| {
            let levels = landau_levels(64, 12.0, b, 32);
            assert!(levels.len() >= 2, "B = {}: {:?}", b, levels);
            levels[1] - levels[0]
        })
        .collect();
    let mb = fields.iter().sum::<f64>() / 3.0;
    let ms = spacings.iter().sum::<f64>() / 3.0;
    let num: f64 = fields.iter().zip(&spacings).map(|(b, s)| (b - mb) * (s - ms)).sum();
    let den: f64 = fields.iter().map(|b| (b - mb) * (b - mb)).sum();
    let slope = num / den;
    assert!((slope - 1.0).abs() < 0.03, "slope {} from {:?}", slope, spacings);
}

#[test]
fn same_seed_same_bits() {
    let c = constants(&[("e", 1.0), ("m", 1.0), ("B", 1.0)]);
    let d = discretize(&landau(), &GridSpec::new(64, 12.0, 0).unwrap(), &c).unwrap();
    let opts = EigenOptions { seed: 7, ..EigenOptions::default() };
    let a = eigenvalues_with(&d.matrix, 12, &opts).unwrap();
    let b = eigenvalues_with(&d.matrix, 12, &opts).unwrap();
    assert_eq!(a.method, "block-lanczos");
    assert_eq!(a, b);
}
