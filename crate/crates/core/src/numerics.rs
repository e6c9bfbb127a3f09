//! Dense complex linear-algebra kernel.
//!
//! Everything above this module works on [`CMatrix`], a dynamically sized
//! `nalgebra` matrix of `Complex64`. Eigen, Schur and QR decompositions come
//! from `nalgebra`; the SVD is a one-sided Jacobi iteration kept here because
//! rank-deficient inputs are routine for the star product. On top sit the
//! conventions the rest of the crate relies on: descending singular values,
//! relative rank truncation for the pseudo-inverse, and the JSON matrix
//! literal.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

const JACOBI_TOL: f64 = 1e-15;
const JACOBI_MAX_SWEEPS: usize = 80;

/// Relative truncation threshold used by [`pseudo_inverse`] unless a caller
/// supplies its own.
pub const DEFAULT_PINV_TOL: f64 = 1e-12;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

/// Square matrix with `diag` on the diagonal.
pub fn diag(diag: &[Complex64]) -> CMatrix {
    let n = diag.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { Complex64::ZERO })
}

/// Real diagonal convenience wrapper around [`diag`].
pub fn diag_real(diag_entries: &[f64]) -> CMatrix {
    let entries: Vec<_> = diag_entries.iter().map(|&x| c64(x, 0.0)).collect();
    diag(&entries)
}

/// Builds a matrix from row-major real/imaginary pairs. Handy in tests.
pub fn from_rows(rows: &[&[Complex64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| rows[i][j])
}

pub fn is_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_finite(a: &CMatrix, what: &str) -> Result<()> {
    if is_finite(a) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} contains non-finite entries")))
    }
}

/// Largest entry modulus. This is the `‖·‖∞` used for every tolerance in the
/// crate.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// `max |A†A − 1|` for a square matrix.
pub fn unitarity_defect(a: &CMatrix) -> f64 {
    let n = a.ncols();
    max_abs(&(a.adjoint() * a - identity(n)))
}

/// Thin singular value decomposition `A = U · diag(sigma) · V†`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    /// Nonnegative, sorted in descending order.
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let s = diag_real(&self.sigma);
        &self.u * s * self.v.adjoint()
    }

    pub fn max_singular(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }
}

/// Thin SVD, `a = U Σ V†` with `U: m×r`, `V: n×r`, `r = min(m, n)`.
///
/// One-sided Jacobi: columns are rotated pairwise until mutually orthogonal.
/// Unlike bidiagonal QR this keeps small singular values and their vectors
/// accurate, which the kernel handling of the star product depends on.
pub fn svd(a: &CMatrix) -> Result<Svd> {
    ensure_finite(a, "svd input")?;
    let (m, n) = a.shape();
    if m.min(n) == 0 {
        return Ok(Svd {
            u: zeros(m, 0),
            sigma: Vec::new(),
            v: zeros(n, 0),
        });
    }
    if m < n {
        let t = svd(&a.adjoint())?;
        return Ok(Svd { u: t.v, sigma: t.sigma, v: t.u });
    }

    let mut g = a.clone();
    let mut v = identity(n);
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = g.column(p).norm_squared();
                let beta = g.column(q).norm_squared();
                let gamma = g.column(p).dotc(&g.column(q));
                if gamma.norm() <= JACOBI_TOL * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                // Rephase column q so the overlap is real, then rotate.
                let phase = (gamma / gamma.norm()).conj();
                let zeta = (beta - alpha) / (2.0 * gamma.norm());
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for x in [&mut g, &mut v] {
                    for i in 0..x.nrows() {
                        let xp = x[(i, p)];
                        let xq = x[(i, q)] * phase;
                        x[(i, p)] = xp * c - xq * s;
                        x[(i, q)] = xp * s + xq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| g.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let v = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);

    // Columns with negligible norm carry no direction; complete U with an
    // orthonormal basis of what is left instead of normalising noise.
    let floor = sigma[0] * f64::EPSILON * (m as f64);
    let mut u = zeros(m, n);
    let mut filled = 0;
    for (k, &j) in order.iter().enumerate() {
        if sigma[k] > floor {
            u.set_column(k, &(g.column(j) / c64(sigma[k], 0.0)));
            filled = k + 1;
        }
    }
    for k in filled..n {
        // The standard basis vector with the largest component outside the
        // span so far; one of them always keeps at least 1/√m of its norm.
        let best = (0..m)
            .map(|i| {
                let mut e = zeros(m, 1);
                e[(i, 0)] = c64(1.0, 0.0);
                for _ in 0..2 {
                    for j in 0..k {
                        let proj = u.column(j).dotc(&e.column(0));
                        e -= u.columns(j, 1) * proj;
                    }
                }
                e
            })
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .expect("m > 0");
        let norm = best.norm();
        u.set_column(k, &(best.column(0) / c64(norm, 0.0)));
    }
    Ok(Svd { u, sigma, v })
}

/// Moore–Penrose pseudo-inverse. Singular values below `rel_tol · σ_max` are
/// treated as exact zeros.
pub fn pseudo_inverse(a: &CMatrix, rel_tol: f64) -> Result<CMatrix> {
    if !(rel_tol > 0.0) {
        return Err(Error::invalid("pseudo-inverse tolerance must be positive"));
    }
    let dec = svd(a)?;
    let cutoff = rel_tol * dec.max_singular();
    let (m, n) = a.shape();
    let mut out = zeros(n, m);
    for (k, &s) in dec.sigma.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            continue;
        }
        let vk = dec.v.column(k);
        let uk = dec.u.column(k);
        out += (vk * uk.adjoint()) * c64(1.0 / s, 0.0);
    }
    Ok(out)
}

/// Largest eigenvalue modulus of a square matrix.
pub fn spectral_radius(a: &CMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::invalid(format!(
            "spectral radius needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    ensure_finite(a, "spectral radius input")?;
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    // Complex Schur form: the eigenvalues sit on the diagonal of T.
    let schur = a.clone().schur();
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).fold(0.0_f64, |acc, i| acc.max(t[(i, i)].norm())))
}

/// Largest singular value (spectral norm).
pub fn operator_norm(a: &CMatrix) -> Result<f64> {
    Ok(svd(a)?.max_singular())
}

/// Eigenvalues of a Hermitian matrix, ascending. Only the Hermitian part of
/// `a` is used.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let h = hermitian_part(a);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * c64(0.5, 0.0)
}

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues in `[-neg_tol, 0)` are clamped to zero; anything more
/// negative is rejected.
pub fn psd_sqrt(a: &CMatrix, neg_tol: f64) -> Result<CMatrix> {
    let n = a.nrows();
    if n == 0 {
        return Ok(zeros(0, 0));
    }
    let eig = hermitian_part(a).symmetric_eigen();
    let mut out = zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda < -neg_tol {
            return Err(Error::invalid(format!(
                "matrix is not positive semidefinite (eigenvalue {lambda:.3e})"
            )));
        }
        let root = lambda.max(0.0).sqrt();
        if root == 0.0 {
            continue;
        }
        let vk = eig.eigenvectors.column(k);
        out += (vk * vk.adjoint()) * c64(root, 0.0);
    }
    Ok(out)
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.trace()
}

/// JSON form of a complex matrix: row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixLiteral {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&CMatrix> for MatrixLiteral {
    fn from(a: &CMatrix) -> Self {
        let (rows, cols) = a.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = a[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        MatrixLiteral { rows, cols, data }
    }
}

impl TryFrom<MatrixLiteral> for CMatrix {
    type Error = Error;

    fn try_from(lit: MatrixLiteral) -> Result<Self> {
        if lit.data.len() != lit.rows * lit.cols {
            return Err(Error::invalid(format!(
                "matrix literal has {} entries, expected {}x{}",
                lit.data.len(),
                lit.rows,
                lit.cols
            )));
        }
        let m = CMatrix::from_fn(lit.rows, lit.cols, |i, j| {
            let [re, im] = lit.data[i * lit.cols + j];
            c64(re, im)
        });
        ensure_finite(&m, "matrix literal")?;
        Ok(m)
    }
}

/// Serde adapter so structs can hold a `CMatrix` field directly.
pub mod literal {
    use super::{CMatrix, MatrixLiteral};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        MatrixLiteral::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let lit = MatrixLiteral::deserialize(d)?;
        CMatrix::try_from(lit).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_unitary};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn power_iteration_radius(a: &CMatrix) -> f64 {
        // Repeated squaring: ρ(A) = lim ‖A^k‖^{1/k}, tracked in log scale.
        let mut p = a.clone();
        let mut k = 1u32;
        let mut scale_log = 0.0_f64;
        for _ in 0..12 {
            p = &p * &p;
            k *= 2;
            let n = p.norm();
            if n == 0.0 {
                return 0.0;
            }
            scale_log = scale_log * 2.0 + n.ln();
            p /= c64(n, 0.0);
        }
        (scale_log / k as f64).exp()
    }

    #[test]
    fn svd_of_identity_and_diagonal() {
        let s = svd(&identity(2)).unwrap();
        assert_eq!(s.sigma.len(), 2);
        assert!((s.sigma[0] - 1.0).abs() < 1e-15 && (s.sigma[1] - 1.0).abs() < 1e-15);

        let s = svd(&diag_real(&[3.0, 0.0])).unwrap();
        assert!((s.sigma[0] - 3.0).abs() < 1e-15);
        assert!(s.sigma[1].abs() < 1e-15);

        let s = svd(&diag_real(&[0.5, 2.0, 1.0])).unwrap();
        assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn svd_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=8 {
            let a = random_matrix(&mut rng, n, n);
            let dec = svd(&a).unwrap();
            let res = max_abs(&(dec.reconstruct() - &a));
            assert!(res < 1e-12 * dec.max_singular().max(1.0), "n={n} residual {res}");
            assert!(unitarity_defect(&dec.u) < 1e-12);
            assert!(unitarity_defect(&dec.v) < 1e-12);
        }
        let a = random_matrix(&mut rng, 3, 5);
        let dec = svd(&a).unwrap();
        assert!(max_abs(&(dec.reconstruct() - &a)) < 1e-12);
    }

    #[test]
    fn svd_handles_rank_deficient_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let m = rng.random_range(1..=6);
            let n = rng.random_range(1..=6);
            let rank = rng.random_range(1..=m.min(n));
            let a = random_matrix(&mut rng, m, rank) * random_matrix(&mut rng, rank, n);
            let dec = svd(&a).unwrap();
            let scale = dec.max_singular();
            assert!(max_abs(&(dec.reconstruct() - &a)) < 1e-13 * scale.max(1.0));
            assert!(unitarity_defect(&dec.u) < 1e-12 && unitarity_defect(&dec.v) < 1e-12);
            assert!(dec.sigma.windows(2).all(|w| w[0] >= w[1]));
            assert!(dec.sigma[rank..].iter().all(|&s| s < 1e-13 * scale));
        }
        let zero = svd(&zeros(3, 2)).unwrap();
        assert_eq!(zero.sigma, vec![0.0, 0.0]);
        assert!(unitarity_defect(&zero.u) < 1e-15);
    }

    #[test]
    fn svd_rejects_nan() {
        let mut a = identity(2);
        a[(0, 1)] = c64(f64::NAN, 0.0);
        assert!(matches!(svd(&a), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn pinv_special_cases() {
        let z = pseudo_inverse(&zeros(3, 2), DEFAULT_PINV_TOL).unwrap();
        assert_eq!(z.shape(), (2, 3));
        assert_eq!(max_abs(&z), 0.0);

        let p = pseudo_inverse(&diag_real(&[2.0, 0.0]), DEFAULT_PINV_TOL).unwrap();
        assert!(max_abs(&(p - diag_real(&[0.5, 0.0]))) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(&mut rng, 4);
        let p = pseudo_inverse(&u, DEFAULT_PINV_TOL).unwrap();
        assert!(max_abs(&(p - u.adjoint())) < 1e-13);

        assert!(pseudo_inverse(&u, 0.0).is_err());
    }

    #[test]
    fn spectral_radius_examples() {
        let a = diag(&[c64(0.5, 0.0), c64(-0.25, 0.0)]);
        assert!((spectral_radius(&a).unwrap() - 0.5).abs() < 1e-15);

        let nil = from_rows(&[&[c64(0.0, 0.0), c64(1.0, 0.0)], &[c64(0.0, 0.0), c64(0.0, 0.0)]]);
        assert!(spectral_radius(&nil).unwrap().abs() < 1e-15);

        assert!(spectral_radius(&zeros(2, 3)).is_err());
    }

    #[test]
    fn spectral_radius_matches_power_iteration_on_contractions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=6 {
            let a = random_matrix(&mut rng, n, n);
            let a = &a * c64(0.5 / operator_norm(&a).unwrap(), 0.0);
            let rho = spectral_radius(&a).unwrap();
            assert!(rho < 1.0);
            let oracle = power_iteration_radius(&a);
            assert!((rho - oracle).abs() < 1e-2 * oracle.max(1e-3), "{rho} vs {oracle}");
        }
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = random_matrix(&mut rng, 4, 4);
        let a = &b * b.adjoint();
        let r = psd_sqrt(&a, 1e-10).unwrap();
        assert!(max_abs(&(&r * &r - &a)) < 1e-10);
        assert!(psd_sqrt(&diag_real(&[1.0, -1e-3]), 1e-10).is_err());
        let r = psd_sqrt(&diag_real(&[1.0, -1e-12]), 1e-10).unwrap();
        assert_eq!(r[(1, 1)], c64(0.0, 0.0));
    }

    #[test]
    fn literal_round_trip_and_validation() {
        let a = from_rows(&[&[c64(1.0, 2.0), c64(3.0, -4.0)]]);
        let lit = MatrixLiteral::from(&a);
        let json = serde_json::to_string(&lit).unwrap();
        assert_eq!(json, r#"{"rows":1,"cols":2,"data":[[1.0,2.0],[3.0,-4.0]]}"#);
        let back = CMatrix::try_from(serde_json::from_str::<MatrixLiteral>(&json).unwrap()).unwrap();
        assert_eq!(back, a);

        let bad = MatrixLiteral { rows: 2, cols: 2, data: vec![[0.0, 0.0]] };
        assert!(CMatrix::try_from(bad).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn penrose_identities(seed in any::<u64>(), m in 1usize..=12, n in 1usize..=12, rank_cut in 0usize..4) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                // Rank-deficient products exercise the truncation path.
                let r = m.min(n).saturating_sub(rank_cut).max(1);
                let a = random_matrix(&mut rng, m, r) * random_matrix(&mut rng, r, n);
                let p = pseudo_inverse(&a, DEFAULT_PINV_TOL).unwrap();
                let scale = operator_norm(&a).unwrap().max(1.0);
                let ap = &a * &p;
                let pa = &p * &a;
                prop_assert!(max_abs(&(&ap * &a - &a)) < 1e-10 * scale);
                prop_assert!(max_abs(&(&pa * &p - &p)) < 1e-10 * operator_norm(&p).unwrap().max(1.0));
                prop_assert!(max_abs(&(ap.adjoint() - &ap)) < 1e-10);
                prop_assert!(max_abs(&(pa.adjoint() - &pa)) < 1e-10);
            }
        }
    }
}
