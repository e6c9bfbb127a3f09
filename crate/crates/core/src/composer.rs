//! Redheffer star product of two scattering matrices.
//!
//! `star(S2, S1, wiring)` closes the internal edges between two scatterers.
//! The first scatterer's wired out-slots feed the second one's in-slots
//! (`s1_to_s2`) and the second one's wired out-slots feed back into the
//! first (`s2_to_s1`). Every remaining slot stays dangling; in the result the
//! first scatterer's dangling slots form the left group and the second one's
//! the right group, each in ascending original slot order.
//!
//! With the slots arranged that way the composition reads
//!
//! ```text
//! L   = 1 − S2^{LL} S1^{RR}
//! S^{LL} = S1^{LL} + S1^{LR} L⁺ S2^{LL} S1^{RL}
//! S^{LR} = S1^{LR} L⁺ S2^{LR}
//! S^{RL} = S2^{RL} S1^{RL} + S2^{RL} S1^{RR} L⁺ S2^{LL} S1^{RL}
//! S^{RR} = S2^{RR} + S2^{RL} S1^{RR} L⁺ S2^{LR}
//! ```
//!
//! where `L⁺` is the Moore–Penrose pseudo-inverse. Unequal group sizes are
//! first padded with identity-routed fictitious slots so that every block
//! is square, and the physical block is cut back out afterwards.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, identity, max_abs, pseudo_inverse, svd, CMatrix, DEFAULT_PINV_TOL};
use crate::smatrix::{s_to_t, t_to_s, Group, PortSpec, ScatteringMatrix};

/// Star results whose unitarity defect exceeds this are reported as
/// internal-consistency failures.
pub const RESULT_UNITARITY_TOL: f64 = 1e-6;

/// Kernel directions of the loop matrix must be decoupled from the ports to
/// within this residual.
pub const DECOUPLING_TOL: f64 = 1e-8;

/// Singular values of the loop matrix below this count as kernel in
/// [`kernel_decoupling_check`].
pub const KERNEL_TOL: f64 = 1e-10;

/// Internal edges between two scatterers, as zero-based flat slot indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wiring {
    /// `(S1 out-slot, S2 in-slot)` pairs.
    pub s1_to_s2: Vec<(usize, usize)>,
    /// `(S2 out-slot, S1 in-slot)` pairs.
    pub s2_to_s1: Vec<(usize, usize)>,
}

impl Wiring {
    /// Standard cascade: S1's right out-slots feed S2's left in-slots and
    /// S2's left out-slots feed S1's right in-slots, pairwise in order.
    pub fn cascade(s1: &PortSpec, s2: &PortSpec) -> Result<Wiring> {
        if s1.right_out != s2.left_in || s2.left_out != s1.right_in {
            return Err(Error::invalid(format!(
                "cascade needs S1 right-out = S2 left-in ({} vs {}) and S2 left-out = S1 right-in ({} vs {})",
                s1.right_out, s2.left_in, s2.left_out, s1.right_in
            )));
        }
        Ok(Wiring {
            s1_to_s2: (0..s1.right_out).map(|j| (s1.left_out + j, j)).collect(),
            s2_to_s1: (0..s2.left_out).map(|j| (j, s1.left_in + j)).collect(),
        })
    }

    pub fn validate(&self, s1: &PortSpec, s2: &PortSpec) -> Result<()> {
        if s1.internal_dim != s2.internal_dim {
            return Err(Error::invalid(format!(
                "internal dimensions differ ({} vs {})",
                s1.internal_dim, s2.internal_dim
            )));
        }
        check_pairs(&self.s1_to_s2, s1.total_out(), s2.total_in(), "s1_to_s2")?;
        check_pairs(&self.s2_to_s1, s2.total_out(), s1.total_in(), "s2_to_s1")?;
        let dangling_in = s1.total_in() + s2.total_in() - self.s1_to_s2.len() - self.s2_to_s1.len();
        let dangling_out = s1.total_out() + s2.total_out() - self.s1_to_s2.len() - self.s2_to_s1.len();
        if dangling_in != dangling_out {
            return Err(Error::invalid("dangling in/out counts differ"));
        }
        Ok(())
    }
}

fn check_pairs(pairs: &[(usize, usize)], n_from: usize, n_to: usize, name: &str) -> Result<()> {
    let mut used_from = vec![false; n_from];
    let mut used_to = vec![false; n_to];
    for &(from, to) in pairs {
        if from >= n_from || to >= n_to {
            return Err(Error::invalid(format!("{name}: pair ({from}, {to}) out of range")));
        }
        if std::mem::replace(&mut used_from[from], true) || std::mem::replace(&mut used_to[to], true) {
            return Err(Error::invalid(format!("{name}: slot wired twice in pair ({from}, {to})")));
        }
    }
    Ok(())
}

/// Permutes slots of `s` so that `ins`/`outs` list the new slot order.
fn permute_slots(s: &ScatteringMatrix, ins: &[usize], outs: &[usize], spec: PortSpec) -> ScatteringMatrix {
    let d = s.internal_dim();
    let m = s.matrix();
    let out = CMatrix::from_fn(outs.len() * d, ins.len() * d, |i, j| {
        m[(outs[i / d] * d + i % d, ins[j / d] * d + j % d)]
    });
    ScatteringMatrix::new(out, spec, false).expect("permutation preserves layout")
}

fn complement(n: usize, taken: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut mask = vec![false; n];
    for t in taken {
        mask[t] = true;
    }
    (0..n).filter(|&i| !mask[i]).collect()
}

/// Re-lays out S1 as (dangling | wired) and S2 as (wired | dangling).
fn arrange(s2: &ScatteringMatrix, s1: &ScatteringMatrix, w: &Wiring) -> (ScatteringMatrix, ScatteringMatrix) {
    let d = s1.internal_dim();
    let (p1, p2) = (s1.spec(), s2.spec());

    let s1_dang_in = complement(p1.total_in(), w.s2_to_s1.iter().map(|p| p.1));
    let s1_dang_out = complement(p1.total_out(), w.s1_to_s2.iter().map(|p| p.0));
    let s1_ins: Vec<usize> = s1_dang_in.iter().copied().chain(w.s2_to_s1.iter().map(|p| p.1)).collect();
    let s1_outs: Vec<usize> = s1_dang_out.iter().copied().chain(w.s1_to_s2.iter().map(|p| p.0)).collect();
    let spec1 = PortSpec {
        left_in: s1_dang_in.len(),
        left_out: s1_dang_out.len(),
        right_in: w.s2_to_s1.len(),
        right_out: w.s1_to_s2.len(),
        internal_dim: d,
    };

    let s2_dang_in = complement(p2.total_in(), w.s1_to_s2.iter().map(|p| p.1));
    let s2_dang_out = complement(p2.total_out(), w.s2_to_s1.iter().map(|p| p.0));
    let s2_ins: Vec<usize> = w.s1_to_s2.iter().map(|p| p.1).chain(s2_dang_in.iter().copied()).collect();
    let s2_outs: Vec<usize> = w.s2_to_s1.iter().map(|p| p.0).chain(s2_dang_out.iter().copied()).collect();
    let spec2 = PortSpec {
        left_in: w.s1_to_s2.len(),
        left_out: w.s2_to_s1.len(),
        right_in: s2_dang_in.len(),
        right_out: s2_dang_out.len(),
        internal_dim: d,
    };

    (
        permute_slots(s2, &s2_ins, &s2_outs, spec2),
        permute_slots(s1, &s1_ins, &s1_outs, spec1),
    )
}

/// `1 − S2^{LL} S1^{RR}` for a cascade-ordered pair.
pub fn loop_matrix(s2: &ScatteringMatrix, s1: &ScatteringMatrix) -> Result<CMatrix> {
    let a = s2.block(Group::Left, Group::Left);
    let b = s1.block(Group::Right, Group::Right);
    if a.ncols() != b.nrows() || a.nrows() != b.ncols() {
        return Err(Error::invalid(format!(
            "S2^{{LL}} is {}x{} but S1^{{RR}} is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    if s1.internal_dim() != s2.internal_dim() {
        return Err(Error::invalid("internal dimensions differ"));
    }
    Ok(identity(a.nrows()) - a * b)
}

/// Evaluates the composition law for a cascade-ordered pair given the
/// (approximate) loop inverse. Blocks may be rectangular.
fn compose_blocks(s2: &ScatteringMatrix, s1: &ScatteringMatrix, loop_inv: &CMatrix) -> CMatrix {
    use Group::{Left as L, Right as R};
    let (s1_ll, s1_lr, s1_rl, s1_rr) = (s1.block(L, L), s1.block(L, R), s1.block(R, L), s1.block(R, R));
    let (s2_ll, s2_lr, s2_rl, s2_rr) = (s2.block(L, L), s2.block(L, R), s2.block(R, L), s2.block(R, R));

    let inner = loop_inv * &s2_ll * &s1_rl;
    let g_ll = &s1_ll + &s1_lr * &inner;
    let g_lr = &s1_lr * loop_inv * &s2_lr;
    let s2_rl_s1_rr = &s2_rl * &s1_rr;
    let g_rl = &s2_rl * &s1_rl + &s2_rl_s1_rr * &inner;
    let g_rr = &s2_rr + &s2_rl_s1_rr * loop_inv * &s2_lr;

    let (top, bottom) = (g_ll.nrows(), g_rl.nrows());
    let (left, right) = (g_ll.ncols(), g_lr.ncols());
    let mut out = CMatrix::zeros(top + bottom, left + right);
    out.view_mut((0, 0), (top, left)).copy_from(&g_ll);
    out.view_mut((0, left), (top, right)).copy_from(&g_lr);
    out.view_mut((top, 0), (bottom, left)).copy_from(&g_rl);
    out.view_mut((top, left), (bottom, right)).copy_from(&g_rr);
    out
}

fn composed_spec(s2: &PortSpec, s1: &PortSpec) -> PortSpec {
    PortSpec {
        left_in: s1.left_in,
        left_out: s1.left_out,
        right_in: s2.right_in,
        right_out: s2.right_out,
        internal_dim: s1.internal_dim,
    }
}

/// Pseudo-inverse of the loop matrix. Directions the pseudo-inverse drops are
/// checked for decoupling from the ports.
fn loop_pseudo_inverse(s2: &ScatteringMatrix, s1: &ScatteringMatrix) -> Result<CMatrix> {
    let l = loop_matrix(s2, s1)?;
    if l.nrows() == 0 {
        return Ok(l);
    }
    let dec = svd(&l)?;
    let cutoff = DEFAULT_PINV_TOL * dec.max_singular();
    let dropped: Vec<usize> = (0..dec.sigma.len())
        .filter(|&k| dec.sigma[k] <= cutoff || dec.sigma[k] == 0.0)
        .collect();
    if !dropped.is_empty() {
        let residual = dropped
            .iter()
            .map(|&k| decoupling_residuals(s2, s1, &dec.v.columns(k, 1).into_owned()))
            .flat_map(|r| r.into_iter())
            .fold(0.0_f64, f64::max);
        if residual > DECOUPLING_TOL {
            return Err(Error::InternalConsistency(format!(
                "loop-matrix kernel couples to the ports (residual {residual:.3e}); inputs are probably not unitary"
            )));
        }
    }
    pseudo_inverse(&l, DEFAULT_PINV_TOL)
}

fn star_homogeneous(s2: &ScatteringMatrix, s1: &ScatteringMatrix) -> Result<ScatteringMatrix> {
    let inv = loop_pseudo_inverse(s2, s1)?;
    let m = compose_blocks(s2, s1, &inv);
    ScatteringMatrix::new(m, composed_spec(s2.spec(), s1.spec()), false)
}

fn check_result(s: ScatteringMatrix) -> Result<ScatteringMatrix> {
    let defect = s.unitarity_defect();
    if defect > RESULT_UNITARITY_TOL {
        return Err(Error::InternalConsistency(format!(
            "star product is not unitary (defect {defect:.3e}); inputs are probably not unitary"
        )));
    }
    Ok(s)
}

/// Star product `S2 ⋆ S1` over the given internal wiring.
pub fn star(s2: &ScatteringMatrix, s1: &ScatteringMatrix, wiring: &Wiring) -> Result<ScatteringMatrix> {
    wiring.validate(s1.spec(), s2.spec())?;
    let (a2, a1) = arrange(s2, s1, wiring);
    let (p1, p2) = (*a1.spec(), *a2.spec());
    let k = p1.max_group().max(p2.max_group());
    if p1 == PortSpec::homogeneous(k, p1.internal_dim) && p2 == p1 {
        return check_result(star_homogeneous(&a2, &a1)?);
    }

    let b1 = pad_to_homogeneous(&a1, k)?;
    let b2 = pad_to_homogeneous(&a2, k)?;
    let composed = star_homogeneous(&b2, &b1)?;
    let physical = PhysicalSlots::for_composition(&p2, &p1, k);
    check_result(extract_physical(&composed, &physical)?)
}

/// Star product with the standard cascade wiring.
pub fn star_cascade(s2: &ScatteringMatrix, s1: &ScatteringMatrix) -> Result<ScatteringMatrix> {
    star(s2, s1, &Wiring::cascade(s1.spec(), s2.spec())?)
}

/// Operator norm of the internal round trip `S₂^{L,L} S₁^{R,R}`; the series
/// route converges when it is below 1.
pub fn round_trip_norm(s2: &ScatteringMatrix, s1: &ScatteringMatrix, wiring: &Wiring) -> Result<f64> {
    wiring.validate(s1.spec(), s2.spec())?;
    let (a2, a1) = arrange(s2, s1, wiring);
    numerics::operator_norm(&(a2.block(Group::Left, Group::Left) * a1.block(Group::Right, Group::Right)))
}

/// Star product with the loop inverse replaced by its truncated geometric
/// series. Works directly on rectangular blocks and never pads, so it is an
/// independent route to the same matrix wherever the series converges.
pub fn star_via_series(
    s2: &ScatteringMatrix,
    s1: &ScatteringMatrix,
    wiring: &Wiring,
    max_terms: usize,
    tol: f64,
) -> Result<ScatteringMatrix> {
    let norm = round_trip_norm(s2, s1, wiring)?;
    let (a2, a1) = arrange(s2, s1, wiring);
    let round_trip = a2.block(Group::Left, Group::Left) * a1.block(Group::Right, Group::Right);
    if norm >= 1.0 {
        return Err(Error::SeriesDivergent { norm });
    }
    let n = round_trip.nrows();
    let mut sum = identity(n);
    let mut term = identity(n);
    for _ in 0..max_terms {
        term = &term * &round_trip;
        sum += &term;
        if max_abs(&term) < tol {
            break;
        }
    }
    let m = compose_blocks(&a2, &a1, &sum);
    ScatteringMatrix::new(m, composed_spec(a2.spec(), a1.spec()), false)
}

/// Star product through transfer matrices, `t_to_s(T2 · T1)`. Only defined
/// for homogeneous cascades with invertible `S^{L,R}` blocks.
pub fn star_via_transfer(s2: &ScatteringMatrix, s1: &ScatteringMatrix) -> Result<ScatteringMatrix> {
    if s1.spec() != s2.spec() || !s1.spec().is_homogeneous() {
        return Err(Error::invalid("transfer route needs identical homogeneous layouts"));
    }
    let t1 = s_to_t(s1)?;
    let t2 = s_to_t(s2)?;
    t_to_s(&t1.then(&t2)?)
}

/// Embeds `s` into a `2·target_k` slot homogeneous scatterer.
///
/// Physical slots keep their place at the front of each group; fictitious
/// slots are appended behind them. Each fictitious in-slot is routed by an
/// identity block to a fictitious out-slot, preferring the opposite side:
/// right-side fictitious inputs fill the left fictitious outputs first, left
/// inputs fill the right outputs first, and leftovers go to the same side.
pub fn pad_to_homogeneous(s: &ScatteringMatrix, target_k: usize) -> Result<ScatteringMatrix> {
    let spec = *s.spec();
    if target_k < spec.max_group() {
        return Err(Error::invalid(format!(
            "target {target_k} is smaller than the largest port group ({})",
            spec.max_group()
        )));
    }
    let d = spec.internal_dim;
    let k = target_k;
    let padded_spec = PortSpec::homogeneous(k, d);
    if spec == padded_spec {
        return Ok(s.clone());
    }

    let in_pos = |slot: usize| if slot < spec.left_in { slot } else { k + slot - spec.left_in };
    let out_pos = |slot: usize| if slot < spec.left_out { slot } else { k + slot - spec.left_out };

    let mut m = CMatrix::zeros(2 * k * d, 2 * k * d);
    let src = s.matrix();
    for o in 0..spec.total_out() {
        for i in 0..spec.total_in() {
            let block = src.view((o * d, i * d), (d, d));
            m.view_mut((out_pos(o) * d, in_pos(i) * d), (d, d)).copy_from(&block);
        }
    }

    // Fictitious slot positions, in order.
    let fict_lin: Vec<usize> = (spec.left_in..k).collect();
    let fict_rin: Vec<usize> = (k + spec.right_in..2 * k).collect();
    let fict_lout: Vec<usize> = (spec.left_out..k).collect();
    let fict_rout: Vec<usize> = (k + spec.right_out..2 * k).collect();

    let a = fict_rin.len().min(fict_lout.len());
    let b = fict_lin.len().min(fict_rout.len());
    let mut routes: Vec<(usize, usize)> = Vec::new();
    routes.extend(fict_rin[..a].iter().copied().zip(fict_lout[..a].iter().copied()));
    routes.extend(fict_lin[..b].iter().copied().zip(fict_rout[..b].iter().copied()));
    routes.extend(fict_lin[b..].iter().copied().zip(fict_lout[a..].iter().copied()));
    routes.extend(fict_rin[a..].iter().copied().zip(fict_rout[b..].iter().copied()));

    for (input, output) in routes {
        for x in 0..d {
            m[(output * d + x, input * d + x)] = numerics::c64(1.0, 0.0);
        }
    }
    ScatteringMatrix::new(m, padded_spec, false)
}

/// Which slots of a padded composite are physical, and the layout of the
/// physical block once extracted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhysicalSlots {
    pub ins: Vec<usize>,
    pub outs: Vec<usize>,
    pub spec: PortSpec,
}

impl PhysicalSlots {
    /// Physical slots of `pad(S2) ⋆ pad(S1)` where both were padded to
    /// `k` slots per group from the cascade-ordered layouts `s2`, `s1`.
    pub fn for_composition(s2: &PortSpec, s1: &PortSpec, k: usize) -> Self {
        PhysicalSlots {
            ins: (0..s1.left_in).chain(k..k + s2.right_in).collect(),
            outs: (0..s1.left_out).chain(k..k + s2.right_out).collect(),
            spec: composed_spec(s2, s1),
        }
    }
}

/// Cuts the physical block out of a padded composite, verifying that it does
/// not couple to the fictitious slots.
pub fn extract_physical(s_bar: &ScatteringMatrix, physical: &PhysicalSlots) -> Result<ScatteringMatrix> {
    let spec = s_bar.spec();
    let d = spec.internal_dim;
    if physical.spec.internal_dim != d
        || physical.ins.len() != physical.spec.total_in()
        || physical.outs.len() != physical.spec.total_out()
    {
        return Err(Error::invalid("physical slot sets do not match the target layout"));
    }
    if physical.ins.iter().any(|&i| i >= spec.total_in()) || physical.outs.iter().any(|&o| o >= spec.total_out()) {
        return Err(Error::invalid("physical slot index out of range"));
    }
    let fict_ins = complement(spec.total_in(), physical.ins.iter().copied());
    let fict_outs = complement(spec.total_out(), physical.outs.iter().copied());

    let m = s_bar.matrix();
    let block_max = |outs: &[usize], ins: &[usize]| {
        let mut worst = 0.0_f64;
        for &o in outs {
            for &i in ins {
                worst = worst.max(max_abs(&m.view((o * d, i * d), (d, d)).into_owned()));
            }
        }
        worst
    };
    let coupling = block_max(&physical.outs, &fict_ins).max(block_max(&fict_outs, &physical.ins));
    if coupling > DECOUPLING_TOL {
        return Err(Error::DecouplingViolation { coupling });
    }
    Ok(permute_slots(s_bar, &physical.ins, &physical.outs, physical.spec))
}

/// Residuals of the four decoupling identities for one kernel vector.
fn decoupling_residuals(s2: &ScatteringMatrix, s1: &ScatteringMatrix, v: &CMatrix) -> [f64; 4] {
    use Group::{Left as L, Right as R};
    let vh = v.adjoint();
    [
        (s1.block(L, R) * v).norm(),
        (s2.block(R, L) * s1.block(R, R) * v).norm(),
        (&vh * s2.block(L, R)).norm(),
        (&vh * s2.block(L, L) * s1.block(R, L)).norm(),
    ]
}

/// Decoupling residuals for every kernel direction of the loop matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelReport {
    /// Singular values of the loop matrix counted as kernel.
    pub kernel_singular_values: Vec<f64>,
    /// Per kernel vector: `‖S1^{LR}V‖`, `‖S2^{RL}S1^{RR}V‖`, `‖V†S2^{LR}‖`,
    /// `‖V†S2^{LL}S1^{RL}‖`.
    pub residuals: Vec<[f64; 4]>,
}

impl KernelReport {
    pub fn kernel_dim(&self) -> usize {
        self.residuals.len()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().flatten().copied().fold(0.0, f64::max)
    }

    pub fn is_decoupled(&self) -> bool {
        self.max_residual() < DECOUPLING_TOL
    }
}

/// Checks that loop-matrix kernel vectors never reach the output ports.
pub fn kernel_decoupling_check(s2: &ScatteringMatrix, s1: &ScatteringMatrix) -> Result<KernelReport> {
    let l = loop_matrix(s2, s1)?;
    let dec = svd(&l)?;
    let mut report = KernelReport {
        kernel_singular_values: Vec::new(),
        residuals: Vec::new(),
    };
    for (k, &sigma) in dec.sigma.iter().enumerate() {
        if sigma < KERNEL_TOL {
            report.kernel_singular_values.push(sigma);
            report
                .residuals
                .push(decoupling_residuals(s2, s1, &dec.v.columns(k, 1).into_owned()));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c64, diag, unitarity_defect};
    use crate::random::random_unitary;
    use crate::smatrix::{beamsplitter, distance, phase_reflector, swap};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn loop_matrix_examples() {
        let l = loop_matrix(&swap(1), &swap(1)).unwrap();
        assert_eq!(l[(0, 0)], c64(1.0, 0.0));
        let refl = phase_reflector(0.0, 0.0, 1);
        let l = loop_matrix(&refl, &refl).unwrap();
        assert_eq!(l[(0, 0)], c64(0.0, 0.0));
        let bs = beamsplitter(FRAC_PI_4, 1);
        let l = loop_matrix(&bs, &bs).unwrap();
        assert!((l[(0, 0)] - c64(1.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn loop_matrix_rejects_incompatible_blocks() {
        let big = ScatteringMatrix::identity(PortSpec::homogeneous(2, 1)).unwrap();
        assert!(loop_matrix(&big, &swap(1)).is_err());
    }

    #[test]
    fn swap_composes_to_swap() {
        let g = star_cascade(&swap(2), &swap(2)).unwrap();
        assert!(distance(&g, &swap(2)) < 1e-15);
        let w = Wiring::cascade(swap(1).spec(), swap(1).spec()).unwrap();
        let g = star_via_series(&swap(1), &swap(1), &w, 100, 1e-14).unwrap();
        assert!(distance(&g, &swap(1)) < 1e-15);
    }

    #[test]
    fn singular_loop_between_reflectors() {
        let (a1, b1, a2) = (0.3, 1.1, -1.1);
        let b2 = 2.4;
        let s1 = phase_reflector(a1, b1, 1);
        let s2 = phase_reflector(a2, b2, 1);
        let g = star_cascade(&s2, &s1).unwrap();
        let expected = diag(&[c64(0.0, a1).exp(), c64(0.0, b2).exp()]);
        assert!(max_abs(&(g.matrix() - expected)) < 1e-15);

        let report = kernel_decoupling_check(&s2, &s1).unwrap();
        assert_eq!(report.kernel_dim(), 1);
        assert_eq!(report.max_residual(), 0.0);
    }

    #[test]
    fn beamsplitter_pair_matches_series() {
        let bs = beamsplitter(FRAC_PI_4, 1);
        let g = star_cascade(&bs, &bs).unwrap();
        let t = g.matrix()[(1, 0)];
        let r = g.matrix()[(0, 0)];
        assert!((t - c64(1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((r - c64(0.0, 2.0 * 2f64.sqrt() / 3.0)).norm() < 1e-15);

        let w = Wiring::cascade(bs.spec(), bs.spec()).unwrap();
        let series = star_via_series(&bs, &bs, &w, 10_000, 1e-14).unwrap();
        assert!(distance(&series, &g) < 1e-12);
    }

    #[test]
    fn full_reflectors_diverge_as_series() {
        let refl = ScatteringMatrix::identity(PortSpec::homogeneous(1, 1)).unwrap();
        let w = Wiring::cascade(refl.spec(), refl.spec()).unwrap();
        assert!(matches!(
            star_via_series(&refl, &refl, &w, 100, 1e-14),
            Err(Error::SeriesDivergent { .. })
        ));
    }

    #[test]
    fn swap_pair_has_empty_kernel() {
        let report = kernel_decoupling_check(&swap(1), &swap(1)).unwrap();
        assert_eq!(report.kernel_dim(), 0);
        assert!(report.is_decoupled());
    }

    #[test]
    fn wiring_validation() {
        let s = swap(1);
        let bad = Wiring { s1_to_s2: vec![(1, 0), (1, 1)], s2_to_s1: vec![] };
        assert!(star(&s, &s, &bad).is_err());
        let out_of_range = Wiring { s1_to_s2: vec![(5, 0)], s2_to_s1: vec![] };
        assert!(star(&s, &s, &out_of_range).is_err());
        assert!(Wiring::cascade(s.spec(), &PortSpec::homogeneous(2, 1)).is_err());
        let d2 = swap(2);
        assert!(star(&d2, &s, &Wiring::default()).is_err());
    }

    #[test]
    fn padding_keeps_homogeneous_input() {
        let bs = beamsplitter(0.4, 2);
        assert_eq!(pad_to_homogeneous(&bs, 1).unwrap(), bs);
        assert!(pad_to_homogeneous(&bs, 0).is_err());
    }

    #[test]
    fn padding_pure_transmitter() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let k = 2;
        let d = 1;
        let t = random_unitary(&mut rng, k * d);
        let spec = PortSpec::new(k, 0, 0, k, d).unwrap();
        let s = ScatteringMatrix::new(t.clone(), spec, true).unwrap();
        let padded = pad_to_homogeneous(&s, k).unwrap();
        let mut expected = CMatrix::zeros(2 * k * d, 2 * k * d);
        expected.view_mut((0, k * d), (k * d, k * d)).copy_from(&identity(k * d));
        expected.view_mut((k * d, 0), (k * d, k * d)).copy_from(&t);
        assert!(max_abs(&(padded.matrix() - expected)) < 1e-15);
    }

    #[test]
    fn padding_preserves_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let layouts = [(1, 2, 2, 1), (0, 1, 2, 1), (3, 1, 0, 2), (2, 2, 1, 1), (1, 0, 1, 2)];
        for (li, lo, ri, ro) in layouts {
            for d in 1..=2 {
                let spec = PortSpec::new(li, lo, ri, ro, d).unwrap();
                let s = ScatteringMatrix::new(random_unitary(&mut rng, spec.dim()), spec, true).unwrap();
                let target = spec.max_group() + 1;
                let padded = pad_to_homogeneous(&s, target).unwrap();
                assert!(unitarity_defect(padded.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn feed_forward_pair_reduces_to_direct_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let k = 2;
        let spec = PortSpec::new(k, 0, 0, k, 1).unwrap();
        let t1 = random_unitary(&mut rng, k);
        let t2 = random_unitary(&mut rng, k);
        let s1 = ScatteringMatrix::new(t1.clone(), spec, true).unwrap();
        let s2 = ScatteringMatrix::new(t2.clone(), spec, true).unwrap();
        let g = star_cascade(&s2, &s1).unwrap();
        assert_eq!(*g.spec(), spec);
        assert!(max_abs(&(g.matrix() - &t2 * &t1)) < 1e-14);

        // Same thing by hand: pad, compose, extract.
        let p1 = pad_to_homogeneous(&s1, k).unwrap();
        let p2 = pad_to_homogeneous(&s2, k).unwrap();
        let bar = star_cascade(&p2, &p1).unwrap();
        let phys = extract_physical(&bar, &PhysicalSlots::for_composition(&spec, &spec, k)).unwrap();
        assert!(max_abs(&(phys.matrix() - &t2 * &t1)) < 1e-14);
    }

    #[test]
    fn extract_physical_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let phys = random_unitary(&mut rng, 2);
        let mut bar = identity(4);
        bar.view_mut((0, 0), (2, 2)).copy_from(&phys);
        let s_bar = ScatteringMatrix::new(bar.clone(), PortSpec::homogeneous(2, 1), true).unwrap();
        let slots = PhysicalSlots {
            ins: vec![0, 1],
            outs: vec![0, 1],
            spec: PortSpec::homogeneous(1, 1),
        };
        let got = extract_physical(&s_bar, &slots).unwrap();
        assert!(max_abs(&(got.matrix() - &phys)) < 1e-15);

        bar[(0, 3)] = c64(1e-3, 0.0);
        let corrupted = ScatteringMatrix::new(bar, PortSpec::homogeneous(2, 1), false).unwrap();
        assert!(matches!(
            extract_physical(&corrupted, &slots),
            Err(Error::DecouplingViolation { .. })
        ));
    }

    #[test]
    fn star_is_not_commutative() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let spec = PortSpec::homogeneous(1, 2);
        let s1 = ScatteringMatrix::new(random_unitary(&mut rng, 4), spec, true).unwrap();
        let s2 = ScatteringMatrix::new(random_unitary(&mut rng, 4), spec, true).unwrap();
        let a = star_cascade(&s2, &s1).unwrap();
        let b = star_cascade(&s1, &s2).unwrap();
        assert!(distance(&a, &b) > 0.1);
    }

    #[test]
    fn non_unitary_inputs_are_reported() {
        let spec = PortSpec::homogeneous(1, 1);
        let mut m = beamsplitter(0.5, 1).into_matrix();
        m[(1, 0)] *= c64(3.0, 0.0);
        let bad = ScatteringMatrix::new(m, spec, false).unwrap();
        let err = star_cascade(&beamsplitter(0.3, 1), &bad).unwrap_err();
        assert!(matches!(err, Error::InternalConsistency(_)));
    }

    #[test]
    fn dishomogeneous_star_matches_series() {
        // S1: 2 in / 2 out, one slot wired each way; S2: 3 in / 3 out.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let spec1 = PortSpec::new(1, 1, 1, 1, 2).unwrap();
        let spec2 = PortSpec::new(2, 1, 1, 2, 2).unwrap();
        let s1 = ScatteringMatrix::new(random_unitary(&mut rng, spec1.dim()), spec1, true).unwrap();
        let s2 = ScatteringMatrix::new(random_unitary(&mut rng, spec2.dim()), spec2, true).unwrap();
        let w = Wiring { s1_to_s2: vec![(1, 0), (0, 2)], s2_to_s1: vec![(0, 1)] };
        let g = star(&s2, &s1, &w).unwrap();
        assert!(g.unitarity_defect() < 1e-12);
        assert_eq!(g.spec().total_in(), 2);
        let series = star_via_series(&s2, &s1, &w, 100_000, 1e-15).unwrap();
        assert!(distance(&g, &series) < 1e-9);
    }
}
