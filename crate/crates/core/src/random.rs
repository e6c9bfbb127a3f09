//! Random matrices for randomized checks and benchmarks.
//!
//! Unitaries are Haar-distributed (QR of a complex Ginibre matrix with the
//! phase of `R`'s diagonal divided out).

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::composer::Wiring;
use crate::numerics::{c64, diag_real, zeros, CMatrix};
use crate::smatrix::{PortSpec, ScatteringMatrix};

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-random `n × n` unitary.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    orthonormalize(random_matrix(rng, n, n))
}

fn orthonormalize(a: CMatrix) -> CMatrix {
    let n = a.ncols();
    let qr = a.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        for i in 0..q.nrows() {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random unitary whose first column is exactly the unit vector `v`
/// (up to rounding).
pub fn unitary_with_first_column<R: Rng + ?Sized>(rng: &mut R, v: &CMatrix) -> CMatrix {
    let n = v.nrows();
    let mut a = random_matrix(rng, n, n);
    a.set_column(0, &v.column(0));
    let mut q = orthonormalize(a);
    // The QR phase convention already makes column 0 a positive multiple of v.
    let norm = v.column(0).norm();
    for i in 0..n {
        q[(i, 0)] = v[(i, 0)] / c64(norm, 0.0);
    }
    q
}

/// Random unit column vector.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let v = random_matrix(rng, n, 1);
    let norm = v.norm();
    v / c64(norm, 0.0)
}

/// Random contraction `U · diag(s) · V` with singular values drawn uniformly
/// from `[0, 1]`.
pub fn random_contraction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let dist = Uniform::new_inclusive(0.0, 1.0).expect("valid range");
    let s: Vec<f64> = (0..n).map(|_| dist.sample(rng)).collect();
    random_unitary(rng, n) * diag_real(&s) * random_unitary(rng, n)
}

/// Random full-rank density matrix `G G† / Tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = random_matrix(rng, n, n);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Haar-random scatterer with the given layout.
pub fn random_scatterer<R: Rng + ?Sized>(rng: &mut R, spec: PortSpec) -> ScatteringMatrix {
    ScatteringMatrix::new(random_unitary(rng, spec.dim()), spec, false).expect("square unitary fits the layout")
}

/// Homogeneous scatterer `(A ⊕ B) [[C, −S], [S, C]] (E ⊕ F)` with Haar
/// `A, B, E, F` and cosines drawn from `[0, max_reflection]`, so both
/// reflection blocks have operator norm at most `max_reflection`.
pub fn random_bounded_scatterer<R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    d: usize,
    max_reflection: f64,
) -> ScatteringMatrix {
    let n = k * d;
    let dist = Uniform::new_inclusive(0.0, max_reflection.clamp(0.0, 1.0)).expect("valid range");
    let mut core = zeros(2 * n, 2 * n);
    for j in 0..n {
        let c: f64 = dist.sample(rng);
        let s = (1.0 - c * c).sqrt();
        core[(j, j)] = c64(c, 0.0);
        core[(n + j, n + j)] = c64(c, 0.0);
        core[(j, n + j)] = c64(-s, 0.0);
        core[(n + j, j)] = c64(s, 0.0);
    }
    let mut outer = zeros(2 * n, 2 * n);
    outer.view_mut((0, 0), (n, n)).copy_from(&random_unitary(rng, n));
    outer.view_mut((n, n), (n, n)).copy_from(&random_unitary(rng, n));
    let mut inner = zeros(2 * n, 2 * n);
    inner.view_mut((0, 0), (n, n)).copy_from(&random_unitary(rng, n));
    inner.view_mut((n, n), (n, n)).copy_from(&random_unitary(rng, n));
    let m = outer * core * inner;
    ScatteringMatrix::new(m, PortSpec::homogeneous(k, d), false).expect("homogeneous layout")
}

/// Random unitary pair `(S2, S1)` of homogeneous `k`-slot scatterers whose
/// loop matrix `1 − S2^{LL} S1^{RR}` is exactly singular.
///
/// S1 sends a random right-side input `v` straight back out on the right as
/// `w`, and S2 returns `w` on its left as `v`, so `v` circulates forever
/// between the two without touching any port.
pub fn singular_loop_pair<R: Rng + ?Sized>(rng: &mut R, k: usize, d: usize) -> (ScatteringMatrix, ScatteringMatrix) {
    let n = k * d;
    let v = random_unit_vector(rng, n);
    let w = random_unit_vector(rng, n);
    let stack = |top: Option<&CMatrix>, bottom: Option<&CMatrix>| {
        let mut x = zeros(2 * n, 1);
        if let Some(t) = top {
            x.view_mut((0, 0), (n, 1)).copy_from(t);
        }
        if let Some(b) = bottom {
            x.view_mut((n, 0), (n, 1)).copy_from(b);
        }
        x
    };
    let with_fixed_column = |rng: &mut R, input: &CMatrix, output: &CMatrix| {
        let q_in = unitary_with_first_column(rng, input);
        let q_out = unitary_with_first_column(rng, output);
        let mut mid = zeros(2 * n, 2 * n);
        mid[(0, 0)] = c64(1.0, 0.0);
        mid.view_mut((1, 1), (2 * n - 1, 2 * n - 1))
            .copy_from(&random_unitary(rng, 2 * n - 1));
        q_out * mid * q_in.adjoint()
    };
    let s1 = with_fixed_column(rng, &stack(None, Some(&v)), &stack(None, Some(&w)));
    let s2 = with_fixed_column(rng, &stack(Some(&w), None), &stack(Some(&v), None));
    let spec = PortSpec::homogeneous(k, d);
    (
        ScatteringMatrix::new(s2, spec, false).expect("homogeneous layout"),
        ScatteringMatrix::new(s1, spec, false).expect("homogeneous layout"),
    )
}

/// Random layout with at most `max_group` slots per group and at least one
/// slot.
pub fn random_spec<R: Rng + ?Sized>(rng: &mut R, max_group: usize, d: usize) -> PortSpec {
    loop {
        let li = rng.random_range(0..=max_group);
        let ri = rng.random_range(0..=max_group);
        let total = li + ri;
        if total == 0 {
            continue;
        }
        let lo_min = total.saturating_sub(max_group);
        let lo_max = total.min(max_group);
        let lo = rng.random_range(lo_min..=lo_max);
        return PortSpec::new(li, lo, ri, total - lo, d).expect("balanced layout");
    }
}

/// Random wiring between scatterers with layouts `s1`, `s2`, closing at
/// least one edge.
pub fn random_wiring<R: Rng + ?Sized>(rng: &mut R, s1: &PortSpec, s2: &PortSpec) -> Wiring {
    let pick = |rng: &mut R, n: usize, count: usize| {
        let mut slots: Vec<usize> = (0..n).collect();
        slots.shuffle(rng);
        slots.truncate(count);
        slots
    };
    loop {
        let n12 = rng.random_range(0..=s1.total_out().min(s2.total_in()));
        let n21 = rng.random_range(0..=s2.total_out().min(s1.total_in()));
        if n12 + n21 == 0 {
            continue;
        }
        let from1 = pick(rng, s1.total_out(), n12);
        let to2 = pick(rng, s2.total_in(), n12);
        let from2 = pick(rng, s2.total_out(), n21);
        let to1 = pick(rng, s1.total_in(), n21);
        return Wiring {
            s1_to_s2: from1.into_iter().zip(to2).collect(),
            s2_to_s1: from2.into_iter().zip(to1).collect(),
        };
    }
}
