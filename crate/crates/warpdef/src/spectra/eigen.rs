//! Lowest eigenpairs of a sparse hermitian matrix.
//!
//! Small problems are diagonalized densely. Larger ones use shift-and-invert
//! block Lanczos: `(H - σ)^(-1)` is applied through a banded Cholesky factor,
//! the Krylov basis is fully reorthogonalized, and the iteration restarts
//! thickly until every reported pair has a small residual in `H`.

use faer::{Mat, Side};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::grid::HermitianMatrix;
use super::SpectraError;

pub const MAX_EIGENVALUES: usize = 64;
pub const DENSE_LIMIT: usize = 4096;
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    pub seed: u64,
    pub tol: f64,
    pub max_cycles: usize,
    /// Shift `σ`; must lie below the spectrum. Defaults to just below the Gershgorin bound.
    pub shift: Option<f64>,
    pub block: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { seed: 0x5eed, tol: RESIDUAL_TOL, max_cycles: 60, shift: None, block: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub count: usize,
    pub residuals: Vec<f64>,
    pub method: &'static str,
    pub cycles: usize,
    pub dimension: usize,
}

impl SpectrumResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn eigenvalues(matrix: &HermitianMatrix, k: usize) -> Result<SpectrumResult, SpectraError> {
    eigenvalues_with(matrix, k, &EigenOptions::default())
}

pub fn eigenvalues_with(matrix: &HermitianMatrix, k: usize, opts: &EigenOptions) -> Result<SpectrumResult, SpectraError> {
    let n = matrix.dim();
    if k > MAX_EIGENVALUES || k > n {
        return Err(SpectraError::TooManyEigenvalues { requested: k, limit: MAX_EIGENVALUES.min(n) });
    }
    if n < DENSE_LIMIT {
        dense(matrix, k)
    } else {
        lanczos_with_retries(matrix, k, opts)
    }
}

fn norm(v: &[Complex64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = v.chunks_exact(4);
    let rest = chunks.remainder();
    for c in chunks {
        for (a, z) in acc.iter_mut().zip(c) {
            *a += z.norm_sqr();
        }
    }
    let tail: f64 = rest.iter().map(|z| z.norm_sqr()).sum();
    (acc[0] + acc[1] + acc[2] + acc[3] + tail).sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = [0.0f64; 4];
    let mut im = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            re[l] += x[l].re * y[l].re + x[l].im * y[l].im;
            im[l] += x[l].re * y[l].im - x[l].im * y[l].re;
        }
    }
    let mut out = Complex64::new(re[0] + re[1] + re[2] + re[3], im[0] + im[1] + im[2] + im[3]);
    for (x, y) in ra.iter().zip(rb) {
        out += x.conj() * y;
    }
    out
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn residual(matrix: &HermitianMatrix, lambda: f64, v: &[Complex64]) -> f64 {
    let mut hv = vec![Complex64::new(0.0, 0.0); v.len()];
    matrix.matvec(v, &mut hv);
    axpy(Complex64::new(-lambda, 0.0), v, &mut hv);
    norm(&hv) / norm(v)
}

fn dense(matrix: &HermitianMatrix, k: usize) -> Result<SpectrumResult, SpectraError> {
    let n = matrix.dim();
    let (values, vectors) = small_eigen(matrix.to_dense())?;
    let mut eigenvalues = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for (i, &lambda) in values.iter().enumerate().take(k) {
        let v: Vec<Complex64> = (0..n).map(|r| vectors[(r, i)]).collect();
        eigenvalues.push(lambda);
        residuals.push(residual(matrix, lambda, &v));
    }
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if worst > RESIDUAL_TOL {
        return Err(SpectraError::NotConverged { cycles: 0, converged: 0, worst_residual: worst });
    }
    Ok(SpectrumResult { eigenvalues, count: k, residuals, method: "dense", cycles: 0, dimension: n })
}

/// `A - σ = L Lᴴ` for a hermitian band matrix, lower band stored row by row.
pub struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<Complex64>,
}

impl BandCholesky {
    pub fn factor(matrix: &HermitianMatrix, shift: f64) -> Result<Self, SpectraError> {
        let n = matrix.dim();
        let bw = matrix.bandwidth();
        let w = bw + 1;
        // row i holds L[i][i-bw..=i] in ascending column order
        let mut l = vec![Complex64::new(0.0, 0.0); n * w];
        let at = |i: usize, j: usize| i * w + (j + bw - i);
        for i in 0..n {
            for (j, v) in matrix.row(i) {
                if *j <= i && i - j <= bw {
                    l[at(i, *j)] = if *j == i { v - shift } else { *v };
                }
            }
        }
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let k0 = lo.max(j.saturating_sub(bw));
                let len = j - k0;
                let mut sum = l[at(i, j)];
                if len > 0 {
                    let ri = &l[at(i, k0)..at(i, k0) + len];
                    let rj = &l[at(j, k0)..at(j, k0) + len];
                    sum -= dot(rj, ri);
                }
                if j == i {
                    if !(sum.re > 0.0) {
                        return Err(SpectraError::Factorization(format!(
                            "pivot {} is {:.3e}; the shift {} is not below the spectrum",
                            i, sum.re, shift
                        )));
                    }
                    l[at(i, i)] = Complex64::new(sum.re.sqrt(), 0.0);
                } else {
                    l[at(i, j)] = sum / l[at(j, j)].re;
                }
            }
        }
        Ok(BandCholesky { n, bw, l })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let w = self.bw + 1;
        let bw = self.bw;
        let mut y = b.to_vec();
        for i in 0..self.n {
            let k0 = i.saturating_sub(bw);
            let row = &self.l[i * w + (k0 + bw - i)..i * w + bw];
            let mut s = y[i];
            let mut re = [0.0f64; 2];
            let mut im = [0.0f64; 2];
            for (t, (lv, yv)) in row.iter().zip(&y[k0..i]).enumerate() {
                re[t & 1] += lv.re * yv.re - lv.im * yv.im;
                im[t & 1] += lv.re * yv.im + lv.im * yv.re;
            }
            s -= Complex64::new(re[0] + re[1], im[0] + im[1]);
            y[i] = s / self.l[i * w + bw].re;
        }
        for j in (0..self.n).rev() {
            let xj = y[j] / self.l[j * w + bw].re;
            y[j] = xj;
            let k0 = j.saturating_sub(bw);
            let row = &self.l[j * w + (k0 + bw - j)..j * w + bw];
            for (yi, lv) in y[k0..j].iter_mut().zip(row) {
                *yi -= lv.conj() * xj;
            }
        }
        y
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Classical Gram-Schmidt against `basis`, applied twice, then normalization; `false` when `v` collapses.
fn orthonormalize(basis: &[Vec<Complex64>], v: &mut [Complex64]) -> bool {
    let start = norm(v);
    for _ in 0..2 {
        let coeffs: Vec<Complex64> = basis.iter().map(|q| dot(q, v)).collect();
        for (q, c) in basis.iter().zip(coeffs) {
            axpy(-c, q, v);
        }
    }
    let nv = norm(v);
    if !(nv > 1e-10 * start) || nv == 0.0 {
        return false;
    }
    for z in v.iter_mut() {
        *z /= nv;
    }
    true
}

fn push_orthonormal(basis: &mut Vec<Vec<Complex64>>, mut v: Vec<Complex64>, rng: &mut ChaCha8Rng) {
    while !orthonormalize(basis, &mut v) {
        v = random_vector(rng, v.len());
    }
    basis.push(v);
}

/// Hermitian eigenproblem of a dense matrix, ascending.
fn small_eigen(t: Mat<Complex64>) -> Result<(Vec<f64>, Mat<Complex64>), SpectraError> {
    let n = t.nrows();
    let herm = Mat::from_fn(n, n, |i, j| (t[(i, j)] + t[(j, i)].conj()) * 0.5);
    let eig = herm
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| SpectraError::Factorization(format!("dense eigensolver: {:?}", e)))?;
    let values = eig.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, eig.U().to_owned()))
}

fn combine(basis: &[Vec<Complex64>], coeffs: &Mat<Complex64>, col: usize) -> Vec<Complex64> {
    let mut y = vec![Complex64::new(0.0, 0.0); basis[0].len()];
    for (i, q) in basis.iter().enumerate() {
        let c = coeffs[(i, col)];
        if c != Complex64::new(0.0, 0.0) {
            axpy(c, q, &mut y);
        }
    }
    y
}

/// Rayleigh-Ritz for `H` itself on the span of `(H - σ)^(-1) U`.
///
/// One more application of the inverse damps the high-energy error that the
/// shift-inverted projection hardly sees but that dominates the residual in `H`.
fn polish(
    matrix: &HermitianMatrix,
    vectors: &[Vec<Complex64>],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<f64>, Vec<f64>), SpectraError> {
    let n = matrix.dim();
    let mut y: Vec<Vec<Complex64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        push_orthonormal(&mut y, v.clone(), rng);
    }
    let m = y.len();
    let hy: Vec<Vec<Complex64>> = y
        .iter()
        .map(|v| {
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            matrix.matvec(v, &mut out);
            out
        })
        .collect();
    let mut g = Mat::<Complex64>::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let c = dot(&y[j], &hy[i]);
            g[(j, i)] = c;
            g[(i, j)] = c.conj();
        }
    }
    let (theta, s) = small_eigen(g)?;
    let mut values = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for c in 0..k.min(m) {
        let u = combine(&y, &s, c);
        values.push(theta[c]);
        residuals.push(residual(matrix, theta[c], &u));
    }
    Ok((values, residuals))
}

/// Cycles without progress before the block size is doubled.
const STALL_CYCLES: usize = 6;

fn lanczos_with_retries(matrix: &HermitianMatrix, k: usize, opts: &EigenOptions) -> Result<SpectrumResult, SpectraError> {
    let mut spent = 0;
    let mut attempt = EigenOptions { block: opts.block.max(1), ..*opts };
    loop {
        attempt.max_cycles = opts.max_cycles - spent;
        match block_lanczos(matrix, k, &attempt) {
            Ok(mut r) => {
                r.cycles += spent;
                return Ok(r);
            }
            Err(SpectraError::NotConverged { cycles, converged, worst_residual }) => {
                spent += cycles;
                if spent >= opts.max_cycles || attempt.block >= 4 * opts.block.max(1) {
                    return Err(SpectraError::NotConverged { cycles: spent, converged, worst_residual });
                }
                attempt.block *= 2;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Thick-restart block Lanczos on `(H - σ)^(-1)`.
///
/// The basis grows block by block up to `max_dim`; the projected matrix is
/// formed explicitly from stored images. On restart the `keep` leading Ritz
/// vectors are retained together with the orthogonalized residual block.
fn block_lanczos(matrix: &HermitianMatrix, k: usize, opts: &EigenOptions) -> Result<SpectrumResult, SpectraError> {
    let n = matrix.dim();
    if k == 0 {
        return Ok(SpectrumResult { eigenvalues: vec![], count: 0, residuals: vec![], method: "block-lanczos", cycles: 0, dimension: n });
    }
    let (lo, hi) = matrix.gershgorin();
    let shift = opts.shift.unwrap_or(lo - 1e-3 * (hi - lo).max(1.0));
    let chol = BandCholesky::factor(matrix, shift)?;
    let b = opts.block.max(1).min(n);
    let keep = (k + k / 4 + b).min(n);
    let max_dim = (keep + k.max(8 * b)).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(max_dim);
    let mut images: Vec<Vec<Complex64>> = Vec::with_capacity(max_dim);
    let mut t = Mat::<Complex64>::zeros(max_dim, max_dim);
    let mut pending: Vec<Vec<Complex64>> = (0..b).map(|_| random_vector(&mut rng, n)).collect();
    let mut last = (0, f64::INFINITY);
    let (mut best, mut since) = ((0, f64::INFINITY), 0);
    for cycle in 1..=opts.max_cycles {
        loop {
            let start = basis.len();
            for v in pending.drain(..) {
                if basis.len() < max_dim {
                    push_orthonormal(&mut basis, v, &mut rng);
                }
            }
            for i in start..basis.len() {
                images.push(chol.solve(&basis[i]));
                for j in 0..=i {
                    let c = dot(&basis[j], &images[i]);
                    t[(j, i)] = c;
                    t[(i, j)] = c.conj();
                }
            }
            pending = images[start..].to_vec();
            if basis.len() + b > max_dim || basis.len() == n {
                break;
            }
        }
        let dim = basis.len();
        let (neg_theta, s) = small_eigen(Mat::from_fn(dim, dim, |i, j| -t[(i, j)]))?;
        let kept = keep.min(dim);
        let ritz: Vec<Vec<Complex64>> = (0..kept).map(|c| combine(&basis, &s, c)).collect();

        let ritz_images: Vec<Vec<Complex64>> = (0..kept).map(|c| combine(&images, &s, c)).collect();
        let (values, residuals) = polish(matrix, &ritz_images, k, &mut rng)?;
        let worst = residuals.iter().cloned().fold(0.0, f64::max);
        let converged = residuals.iter().filter(|r| **r <= opts.tol).count();
        if converged > best.0 || worst < 0.1 * best.1 {
            best = (converged, worst);
            since = 0;
        } else {
            since += 1;
        }
        last = (converged, worst);
        if converged == k {
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by(|a, c| values[*a].total_cmp(&values[*c]));
            return Ok(SpectrumResult {
                eigenvalues: order.iter().map(|&i| values[i]).collect(),
                count: k,
                residuals: order.iter().map(|&i| residuals[i]).collect(),
                method: "block-lanczos",
                cycles: cycle,
                dimension: n,
            });
        }
        if dim == n || since >= STALL_CYCLES {
            return Err(SpectraError::NotConverged { cycles: cycle, converged: last.0, worst_residual: last.1 });
        }
        let mut residual_block: Vec<Vec<Complex64>> = Vec::with_capacity(b);
        for v in pending.drain(..) {
            let mut w = v;
            let mut probe = basis.clone();
            probe.extend(residual_block.iter().cloned());
            if orthonormalize(&probe, &mut w) {
                residual_block.push(w);
            }
        }
        basis = ritz;
        images = ritz_images;
        t = Mat::zeros(max_dim, max_dim);
        for (i, th) in neg_theta.iter().take(kept).enumerate() {
            t[(i, i)] = Complex64::new(-th, 0.0);
        }
        pending = residual_block;
        while pending.len() < b {
            pending.push(random_vector(&mut rng, n));
        }
    }
    Err(SpectraError::NotConverged { cycles: opts.max_cycles, converged: last.0, worst_residual: last.1 })
}

/// A run of eigenvalues within `tol` of their neighbours.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cluster {
    pub mean: f64,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyReport {
    pub tol: f64,
    pub clusters: Vec<Cluster>,
}

impl DegeneracyReport {
    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.size).collect()
    }

    /// Means of the clusters with at least `min_size` members.
    pub fn levels(&self, min_size: usize) -> Vec<f64> {
        self.clusters.iter().filter(|c| c.size >= min_size).map(|c| c.mean).collect()
    }

    /// Gaps between consecutive clusters of at least `min_size` members.
    pub fn spacings(&self, min_size: usize) -> Vec<f64> {
        self.levels(min_size).windows(2).map(|w| w[1] - w[0]).collect()
    }
}

pub fn landau_degeneracy(result: &SpectrumResult, tol: f64) -> DegeneracyReport {
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for &e in &result.eigenvalues {
        match clusters.last_mut() {
            Some((sum, size)) if e - prev < tol => {
                *sum += e;
                *size += 1;
            }
            _ => clusters.push((e, 1)),
        }
        prev = e;
    }
    DegeneracyReport {
        tol,
        clusters: clusters.into_iter().map(|(sum, size)| Cluster { mean: sum / size as f64, size }).collect(),
    }
}
