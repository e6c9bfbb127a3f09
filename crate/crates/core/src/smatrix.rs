//! Scattering and transfer matrices.
//!
//! Slots are flattened left group first, then right group, each slot a
//! contiguous block of `internal_dim` amplitudes. In-slots index columns and
//! out-slots index rows, so `S[(out, in)]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, identity, max_abs, svd, unitarity_defect, CMatrix, MatrixLiteral};

/// Unitarity violations above this are rejected by [`ScatteringMatrix::new`].
pub const UNITARITY_TOL: f64 = 1e-8;

/// Conversions report unavailable beyond this condition number.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

/// Port layout of a scatterer: slot counts per side and direction plus the
/// internal dimension carried by every slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PortSpec {
    pub left_in: usize,
    pub left_out: usize,
    pub right_in: usize,
    pub right_out: usize,
    pub internal_dim: usize,
}

impl PortSpec {
    pub fn new(
        left_in: usize,
        left_out: usize,
        right_in: usize,
        right_out: usize,
        internal_dim: usize,
    ) -> Result<Self> {
        let spec = PortSpec {
            left_in,
            left_out,
            right_in,
            right_out,
            internal_dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `k` slots per group on each side.
    pub fn homogeneous(k: usize, d: usize) -> Self {
        PortSpec {
            left_in: k,
            left_out: k,
            right_in: k,
            right_out: k,
            internal_dim: d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.internal_dim == 0 {
            return Err(Error::invalid("internal dimension must be at least 1"));
        }
        if self.total_in() != self.total_out() {
            return Err(Error::invalid(format!(
                "in-slot count {} differs from out-slot count {}",
                self.total_in(),
                self.total_out()
            )));
        }
        Ok(())
    }

    pub fn total_in(&self) -> usize {
        self.left_in + self.right_in
    }

    pub fn total_out(&self) -> usize {
        self.left_out + self.right_out
    }

    pub fn is_homogeneous(&self) -> bool {
        self.left_in == self.left_out
            && self.left_out == self.right_in
            && self.right_in == self.right_out
    }

    pub fn max_group(&self) -> usize {
        self.left_in
            .max(self.left_out)
            .max(self.right_in)
            .max(self.right_out)
    }

    /// Matrix dimension (`total_in · d`).
    pub fn dim(&self) -> usize {
        self.total_in() * self.internal_dim
    }

    pub fn in_count(&self, g: Group) -> usize {
        match g {
            Group::Left => self.left_in,
            Group::Right => self.right_in,
        }
    }

    pub fn out_count(&self, g: Group) -> usize {
        match g {
            Group::Left => self.left_out,
            Group::Right => self.right_out,
        }
    }

    /// Column range (in amplitude units) of an in-group.
    pub fn in_range(&self, g: Group) -> std::ops::Range<usize> {
        let d = self.internal_dim;
        match g {
            Group::Left => 0..self.left_in * d,
            Group::Right => self.left_in * d..self.total_in() * d,
        }
    }

    /// Row range (in amplitude units) of an out-group.
    pub fn out_range(&self, g: Group) -> std::ops::Range<usize> {
        let d = self.internal_dim;
        match g {
            Group::Left => 0..self.left_out * d,
            Group::Right => self.left_out * d..self.total_out() * d,
        }
    }
}

/// A validated scattering matrix together with its port layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScattering", into = "RawScattering")]
pub struct ScatteringMatrix {
    spec: PortSpec,
    matrix: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawScattering {
    spec: PortSpec,
    matrix: MatrixLiteral,
}

impl TryFrom<RawScattering> for ScatteringMatrix {
    type Error = Error;

    fn try_from(raw: RawScattering) -> Result<Self> {
        let m = CMatrix::try_from(raw.matrix)?;
        ScatteringMatrix::new(m, raw.spec, false)
    }
}

impl From<ScatteringMatrix> for RawScattering {
    fn from(s: ScatteringMatrix) -> Self {
        RawScattering {
            spec: s.spec,
            matrix: MatrixLiteral::from(&s.matrix),
        }
    }
}

impl ScatteringMatrix {
    /// Validates dimensions against `spec`; when `check_unitary` is set, also
    /// rejects matrices with `max |S†S − 1| > 1e-8`.
    pub fn new(matrix: CMatrix, spec: PortSpec, check_unitary: bool) -> Result<Self> {
        spec.validate()?;
        let d = spec.internal_dim;
        let (r, c) = matrix.shape();
        if r != spec.total_out() * d || c != spec.total_in() * d {
            return Err(Error::invalid(format!(
                "matrix is {r}x{c} but port spec needs {}x{}",
                spec.total_out() * d,
                spec.total_in() * d
            )));
        }
        numerics::ensure_finite(&matrix, "scattering matrix")?;
        let s = ScatteringMatrix { spec, matrix };
        if check_unitary {
            let defect = s.unitarity_defect();
            if defect > UNITARITY_TOL {
                return Err(Error::NonUnitary { defect });
            }
        }
        Ok(s)
    }

    pub fn spec(&self) -> &PortSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn internal_dim(&self) -> usize {
        self.spec.internal_dim
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }

    /// Rectangular sub-block `S^{out, in}`.
    pub fn block(&self, out_group: Group, in_group: Group) -> CMatrix {
        let rows = self.spec.out_range(out_group);
        let cols = self.spec.in_range(in_group);
        self.matrix
            .view((rows.start, cols.start), (rows.len(), cols.len()))
            .into_owned()
    }

    /// The `d × d` block mapping in-slot `in_slot` to out-slot `out_slot`
    /// (flat, zero-based slot indices).
    pub fn slot_block(&self, out_slot: usize, in_slot: usize) -> Result<CMatrix> {
        let d = self.spec.internal_dim;
        if out_slot >= self.spec.total_out() || in_slot >= self.spec.total_in() {
            return Err(Error::invalid(format!(
                "slot pair ({out_slot}, {in_slot}) outside {}x{} slots",
                self.spec.total_out(),
                self.spec.total_in()
            )));
        }
        Ok(self.matrix.view((out_slot * d, in_slot * d), (d, d)).into_owned())
    }

    /// Same matrix with a different left/right split. Slot order is kept, so
    /// only the group boundaries move.
    pub fn regroup(&self, left_in: usize, left_out: usize) -> Result<Self> {
        let total_in = self.spec.total_in();
        let total_out = self.spec.total_out();
        if left_in > total_in || left_out > total_out {
            return Err(Error::invalid("regroup boundary beyond slot count"));
        }
        let spec = PortSpec {
            left_in,
            left_out,
            right_in: total_in - left_in,
            right_out: total_out - left_out,
            internal_dim: self.spec.internal_dim,
        };
        Ok(ScatteringMatrix {
            spec,
            matrix: self.matrix.clone(),
        })
    }
}

/// Transfer matrix mapping `(A_L, B_L)` to `(B_R, A_R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    k: usize,
    d: usize,
    matrix: CMatrix,
}

impl TransferMatrix {
    pub fn new(matrix: CMatrix, k: usize, d: usize) -> Result<Self> {
        let n = 2 * k * d;
        if matrix.shape() != (n, n) {
            return Err(Error::invalid(format!(
                "transfer matrix must be {n}x{n}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        numerics::ensure_finite(&matrix, "transfer matrix")?;
        Ok(TransferMatrix { k, d, matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn slots_per_side(&self) -> usize {
        self.k
    }

    pub fn internal_dim(&self) -> usize {
        self.d
    }

    fn half(&self) -> usize {
        self.k * self.d
    }

    fn quad(&self, row: usize, col: usize) -> CMatrix {
        let h = self.half();
        self.matrix.view((row * h, col * h), (h, h)).into_owned()
    }

    pub fn t_ba(&self) -> CMatrix {
        self.quad(0, 0)
    }

    pub fn t_bb(&self) -> CMatrix {
        self.quad(0, 1)
    }

    pub fn t_aa(&self) -> CMatrix {
        self.quad(1, 0)
    }

    pub fn t_ab(&self) -> CMatrix {
        self.quad(1, 1)
    }

    pub fn determinant(&self) -> num_complex::Complex64 {
        self.matrix.determinant()
    }

    /// Transfer matrix of `self` followed by `next` (`T_next · T_self`).
    pub fn then(&self, next: &TransferMatrix) -> Result<TransferMatrix> {
        if self.k != next.k || self.d != next.d {
            return Err(Error::invalid("transfer matrices have different layouts"));
        }
        Ok(TransferMatrix {
            k: self.k,
            d: self.d,
            matrix: &next.matrix * &self.matrix,
        })
    }
}

/// Inverts `m`, refusing when its condition number exceeds [`MAX_CONDITION`].
fn well_conditioned_inverse(m: &CMatrix, what: &str) -> Result<CMatrix> {
    let dec = svd(m)?;
    let smax = dec.max_singular();
    let smin = dec.sigma.last().copied().unwrap_or(0.0);
    if smin == 0.0 || smax / smin > MAX_CONDITION {
        return Err(Error::ConversionUnavailable(format!(
            "{what} is singular or ill-conditioned (sigma_min = {smin:.3e}, sigma_max = {smax:.3e})"
        )));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::ConversionUnavailable(format!("{what} is singular")))
}

fn assemble(tl: &CMatrix, tr: &CMatrix, bl: &CMatrix, br: &CMatrix) -> CMatrix {
    let h = tl.nrows();
    let mut out = CMatrix::zeros(2 * h, 2 * h);
    out.view_mut((0, 0), (h, h)).copy_from(tl);
    out.view_mut((0, h), (h, h)).copy_from(tr);
    out.view_mut((h, 0), (h, h)).copy_from(bl);
    out.view_mut((h, h), (h, h)).copy_from(br);
    out
}

/// Converts a scattering matrix with equal left/right slot counts into its
/// transfer matrix.
pub fn s_to_t(s: &ScatteringMatrix) -> Result<TransferMatrix> {
    let spec = s.spec();
    if !spec.is_homogeneous() {
        return Err(Error::invalid(
            "S to T conversion needs equal slot counts in all four groups",
        ));
    }
    let s_ll = s.block(Group::Left, Group::Left);
    let s_lr = s.block(Group::Left, Group::Right);
    let s_rl = s.block(Group::Right, Group::Left);
    let s_rr = s.block(Group::Right, Group::Right);
    let inv = well_conditioned_inverse(&s_lr, "S^{L,R}")?;

    let t_ba = &s_rl - &s_rr * &inv * &s_ll;
    let t_bb = &s_rr * &inv;
    let t_aa = -(&inv * &s_ll);
    let t = assemble(&t_ba, &t_bb, &t_aa, &inv);
    TransferMatrix::new(t, spec.left_in, spec.internal_dim)
}

/// Inverse of [`s_to_t`].
pub fn t_to_s(t: &TransferMatrix) -> Result<ScatteringMatrix> {
    let inv = well_conditioned_inverse(&t.t_ab(), "T^{A,B}")?;
    let t_aa = t.t_aa();
    let t_ba = t.t_ba();
    let t_bb = t.t_bb();

    let s_ll = -(&inv * &t_aa);
    let s_rl = &t_ba - &t_bb * &inv * &t_aa;
    let s_rr = &t_bb * &inv;
    let m = assemble(&s_ll, &inv, &s_rl, &s_rr);
    ScatteringMatrix::new(m, PortSpec::homogeneous(t.k, t.d), false)
}

/// Two-port beamsplitter `[[i sinθ, cosθ], [cosθ, i sinθ]] ⊗ 1_d`.
pub fn beamsplitter(theta: f64, d: usize) -> ScatteringMatrix {
    let r = numerics::c64(0.0, theta.sin());
    let t = numerics::c64(theta.cos(), 0.0);
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    for a in 0..d {
        m[(a, a)] = r;
        m[(a, d + a)] = t;
        m[(d + a, a)] = t;
        m[(d + a, d + a)] = r;
    }
    ScatteringMatrix::new(m, PortSpec::homogeneous(1, d), true).expect("beamsplitter is unitary")
}

/// Perfect transmitter: swaps the left and right slots.
pub fn swap(d: usize) -> ScatteringMatrix {
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    for a in 0..d {
        m[(a, d + a)] = numerics::c64(1.0, 0.0);
        m[(d + a, a)] = numerics::c64(1.0, 0.0);
    }
    ScatteringMatrix::new(m, PortSpec::homogeneous(1, d), true).expect("swap is unitary")
}

/// Perfect reflector with per-side phases `e^{iα}` (left) and `e^{iβ}` (right).
pub fn phase_reflector(alpha: f64, beta: f64, d: usize) -> ScatteringMatrix {
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    for a in 0..d {
        m[(a, a)] = num_complex::Complex64::from_polar(1.0, alpha);
        m[(d + a, d + a)] = num_complex::Complex64::from_polar(1.0, beta);
    }
    ScatteringMatrix::new(m, PortSpec::homogeneous(1, d), true).expect("reflector is unitary")
}

/// Max-entry distance between two scattering matrices with equal layouts.
pub fn distance(a: &ScatteringMatrix, b: &ScatteringMatrix) -> f64 {
    if a.spec().dim() != b.spec().dim() {
        return f64::INFINITY;
    }
    max_abs(&(a.matrix() - b.matrix()))
}

impl ScatteringMatrix {
    pub fn identity(spec: PortSpec) -> Result<Self> {
        ScatteringMatrix::new(identity(spec.dim()), spec, true)
    }
}
