//! Quantum capacities of erasure-type channels.
//!
//! For `M = √p · U` the channel is the standard erasure channel with
//! capacity `max{0, (2p − 1) log₂ d}`. A general `M` only admits bounds: by
//! data processing its capacity lies between those of the erasure channels
//! built from the smallest and the largest squared singular value.

use crate::error::{Error, Result};
use crate::numerics::{svd, CMatrix};

/// Squared singular values may exceed 1 by this much before `M` is rejected.
pub const CONTRACTION_TOL: f64 = 1e-10;

/// Quantum capacity of the `d`-dimensional erasure channel with success
/// probability `p`, in qubits per use.
pub fn erasure_capacity(p: f64, d: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
    }
    if d < 2 {
        return Err(Error::invalid(format!("dimension {d} below 2")));
    }
    Ok(((2.0 * p - 1.0) * (d as f64).log2()).max(0.0))
}

/// Squared singular values of `M`, ascending and clamped to `[0, 1]`.
pub fn singular_probabilities(m: &CMatrix) -> Result<Vec<f64>> {
    let mut p: Vec<f64> = svd(m)?.sigma.iter().map(|s| s * s).collect();
    if let Some(&top) = p.first() {
        if top > 1.0 + CONTRACTION_TOL {
            return Err(Error::invalid(format!(
                "operator is not a contraction (largest squared singular value {top})"
            )));
        }
    }
    for x in p.iter_mut() {
        *x = x.clamp(0.0, 1.0);
    }
    p.reverse();
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityBounds {
    /// Squared singular values, ascending.
    pub p: Vec<f64>,
    pub d: usize,
    pub q_low: f64,
    pub q_up: f64,
}

impl CapacityBounds {
    pub fn from_probabilities(mut p: Vec<f64>, d: usize) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::invalid("empty probability vector"));
        }
        p.sort_by(f64::total_cmp);
        let q_low = erasure_capacity(p[0], d)?;
        let q_up = erasure_capacity(p[p.len() - 1], d)?;
        Ok(CapacityBounds { p, d, q_low, q_up })
    }

    pub fn p_min(&self) -> f64 {
        self.p[0]
    }

    pub fn p_max(&self) -> f64 {
        self.p[self.p.len() - 1]
    }

    /// Whether the bounds pin the capacity down exactly.
    pub fn is_exact(&self) -> bool {
        self.q_low == self.q_up
    }
}

/// Capacity bounds of the erasure channel with transmission operator `m`.
pub fn capacity_bounds(m: &CMatrix, d: usize) -> Result<CapacityBounds> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::invalid(format!(
            "operator is {}x{} but d = {d}",
            m.nrows(),
            m.ncols()
        )));
    }
    CapacityBounds::from_probabilities(singular_probabilities(m)?, d)
}

/// Largest transmission probabilities and upper capacity bounds of two
/// channels and of their sequential composition.
#[derive(Debug, Clone, PartialEq)]
pub struct DataProcessingReport {
    pub p_max_first: f64,
    pub p_max_second: f64,
    pub p_max_composed: f64,
    pub q_up_first: f64,
    pub q_up_second: f64,
    pub q_up_composed: f64,
}

impl DataProcessingReport {
    /// `p_max(M₂M₁) ≤ min{p_max(M₁), p_max(M₂)}` up to `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        self.p_max_composed <= self.p_max_first.min(self.p_max_second) + tol
            && self.q_up_composed <= self.q_up_first.min(self.q_up_second) + tol
    }
}

pub fn check_data_processing(m1: &CMatrix, m2: &CMatrix, d: usize) -> Result<DataProcessingReport> {
    let first = capacity_bounds(m1, d)?;
    let second = capacity_bounds(m2, d)?;
    let composed = capacity_bounds(&(m2 * m1), d)?;
    Ok(DataProcessingReport {
        p_max_first: first.p_max(),
        p_max_second: second.p_max(),
        p_max_composed: composed.p_max(),
        q_up_first: first.q_up,
        q_up_second: second.q_up,
        q_up_composed: composed.q_up,
    })
}

/// Certified superactivation: the resonant configuration provably carries
/// quantum information while the direct one provably cannot.
pub fn detect_superactivation(resonant: &CapacityBounds, direct: &CapacityBounds) -> Result<bool> {
    if resonant.d != direct.d {
        return Err(Error::invalid(format!(
            "dimensions differ ({} vs {})",
            resonant.d, direct.d
        )));
    }
    Ok(resonant.q_low > 0.0 && direct.q_up == 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c64, diag_real, identity, zeros};
    use crate::random::{random_contraction, random_unitary};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bounds(q_low: f64, q_up: f64) -> CapacityBounds {
        CapacityBounds { p: vec![0.5, 0.5], d: 2, q_low, q_up }
    }

    #[test]
    fn erasure_capacity_examples() {
        assert_eq!(erasure_capacity(1.0, 2).unwrap(), 1.0);
        assert_eq!(erasure_capacity(0.5, 2).unwrap(), 0.0);
        assert_eq!(erasure_capacity(0.75, 4).unwrap(), 1.0);
        assert!(erasure_capacity(1.5, 2).is_err());
        assert!(erasure_capacity(-0.1, 2).is_err());
        assert!(erasure_capacity(0.7, 1).is_err());
    }

    #[test]
    fn singular_probability_examples() {
        let m = diag_real(&[0.9f64.sqrt(), 0.2f64.sqrt()]);
        let p = singular_probabilities(&m).unwrap();
        assert!((p[0] - 0.2).abs() < 1e-15 && (p[1] - 0.9).abs() < 1e-15);
        assert_eq!(singular_probabilities(&zeros(2, 2)).unwrap(), vec![0.0, 0.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rotated = random_unitary(&mut rng, 2) * m * random_unitary(&mut rng, 2);
        let p = singular_probabilities(&rotated).unwrap();
        assert!((p[0] - 0.2).abs() < 1e-12 && (p[1] - 0.9).abs() < 1e-12);

        assert!(singular_probabilities(&(identity(2) * c64(1.001, 0.0))).is_err());
        let edge = identity(2) * c64(1.0 + 1e-12, 0.0);
        assert_eq!(singular_probabilities(&edge).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn capacity_bound_examples() {
        let b = capacity_bounds(&diag_real(&[0.9f64.sqrt(), 0.2f64.sqrt()]), 2).unwrap();
        assert_eq!(b.q_low, 0.0);
        assert!((b.q_up - 0.8).abs() < 1e-12);

        let p: f64 = 0.8;
        let b = capacity_bounds(&(identity(3) * c64(p.sqrt(), 0.0)), 3).unwrap();
        let exact = erasure_capacity(p, 3).unwrap();
        assert!((b.q_low - exact).abs() < 1e-12 && (b.q_up - exact).abs() < 1e-12);

        let b = capacity_bounds(&zeros(2, 2), 2).unwrap();
        assert_eq!((b.q_low, b.q_up), (0.0, 0.0));
        assert!(capacity_bounds(&zeros(2, 2), 3).is_err());
    }

    #[test]
    fn data_processing_examples() {
        let m = identity(2) * c64(0.8f64.sqrt(), 0.0);
        let r = check_data_processing(&m, &m, 2).unwrap();
        assert!((r.p_max_composed - 0.64).abs() < 1e-12);
        assert!(r.holds(1e-12));

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m1 = random_contraction(&mut rng, 3);
        let u = random_unitary(&mut rng, 3);
        let r = check_data_processing(&m1, &u, 3).unwrap();
        assert!((r.p_max_composed - r.p_max_first).abs() < 1e-12);
    }

    #[test]
    fn superactivation_examples() {
        assert!(detect_superactivation(&bounds(0.3, 0.4), &bounds(0.0, 0.0)).unwrap());
        assert!(!detect_superactivation(&bounds(0.0, 0.4), &bounds(0.0, 0.0)).unwrap());
        assert!(!detect_superactivation(&bounds(0.3, 0.4), &bounds(0.0, 0.1)).unwrap());
        let mut other = bounds(0.0, 0.0);
        other.d = 3;
        assert!(detect_superactivation(&bounds(0.3, 0.4), &other).is_err());
    }

    proptest! {
        #[test]
        fn threshold_and_monotonicity(p in 0.0f64..=1.0, q in 0.0f64..=1.0, d in 2usize..6) {
            let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
            let c_lo = erasure_capacity(lo, d).unwrap();
            let c_hi = erasure_capacity(hi, d).unwrap();
            prop_assert!(c_lo <= c_hi);
            if hi <= 0.5 {
                prop_assert_eq!(c_hi, 0.0);
            }
            if lo > 0.5 && hi > lo {
                prop_assert!(c_lo < c_hi);
            }
            prop_assert!(c_hi <= (d as f64).log2() + 1e-15);
        }

        #[test]
        fn random_contractions_obey_data_processing(seed in any::<u64>(), d in 2usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m1 = random_contraction(&mut rng, d);
            let m2 = random_contraction(&mut rng, d);
            let r = check_data_processing(&m1, &m2, d).unwrap();
            prop_assert!(r.holds(1e-12));
        }

        #[test]
        fn bounds_are_ordered_and_unitarily_invariant(seed in any::<u64>(), d in 2usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_contraction(&mut rng, d);
            let b = capacity_bounds(&m, d).unwrap();
            prop_assert!(0.0 <= b.q_low && b.q_low <= b.q_up && b.q_up <= (d as f64).log2());
            prop_assert!(b.p.windows(2).all(|w| w[0] <= w[1]));
            let rotated = random_unitary(&mut rng, d) * &m * random_unitary(&mut rng, d);
            let p2 = singular_probabilities(&rotated).unwrap();
            for (x, y) in b.p.iter().zip(&p2) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
