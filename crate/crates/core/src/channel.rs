//! Port-to-port erasure channels.
//!
//! A state entering one port either reaches the chosen output port, where
//! its internal amplitudes have been mapped by the transmission operator
//! `M`, or it does not, which the receiver sees as an erasure flag `|∅⟩`.
//! The flag is one extra basis vector appended after the `d` internal ones.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    c64, hermitian_eigenvalues, hermitian_part, identity, max_abs, psd_sqrt, unitarity_defect, zeros, CMatrix, MatrixLiteral,
};
use crate::smatrix::ScatteringMatrix;

/// Allowed negativity of `1 − M†M` and of density-matrix spectra.
pub const PSD_TOL: f64 = 1e-10;

/// Hermiticity and trace tolerance for density matrices.
pub const STATE_TOL: f64 = 1e-12;

/// A validated density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::invalid("density matrix must be square and non-empty"));
        }
        crate::numerics::ensure_finite(&matrix, "density matrix")?;
        let asym = max_abs(&(&matrix - matrix.adjoint()));
        if asym > STATE_TOL {
            return Err(Error::invalid(format!("density matrix is not Hermitian ({asym:.3e})")));
        }
        let tr = matrix.trace();
        if (tr - c64(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::invalid(format!("density matrix trace is {tr}")));
        }
        let min_eig = hermitian_eigenvalues(&matrix)[0];
        if min_eig < -PSD_TOL {
            return Err(Error::invalid(format!("density matrix has eigenvalue {min_eig:.3e}")));
        }
        Ok(DensityMatrix { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a normalised column vector.
    pub fn pure(psi: &CMatrix) -> Result<Self> {
        DensityMatrix::new(psi * psi.adjoint())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Weight on the last basis vector, i.e. the erasure probability for a
    /// channel output.
    pub fn flag_weight(&self) -> f64 {
        let n = self.dim();
        self.matrix[(n - 1, n - 1)].re
    }
}

/// Erasure channel `ρ ↦ MρM† ⊕ Tr[(1 − M†M)ρ]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel", into = "RawChannel")]
pub struct ErasureChannel {
    m: CMatrix,
    /// `√(1 − M†M)`, cached.
    defect_root: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawChannel {
    d: usize,
    m_op: MatrixLiteral,
}

impl TryFrom<RawChannel> for ErasureChannel {
    type Error = Error;

    fn try_from(raw: RawChannel) -> Result<Self> {
        let m = CMatrix::try_from(raw.m_op)?;
        if m.nrows() != raw.d || m.ncols() != raw.d {
            return Err(Error::invalid(format!("m_op is {}x{}, expected d = {}", m.nrows(), m.ncols(), raw.d)));
        }
        ErasureChannel::new(m)
    }
}

impl From<ErasureChannel> for RawChannel {
    fn from(ch: ErasureChannel) -> Self {
        RawChannel {
            d: ch.dim(),
            m_op: MatrixLiteral::from(&ch.m),
        }
    }
}

impl ErasureChannel {
    /// Rejects `M` unless `1 − M†M ⪰ −1e-10`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::invalid("transmission operator must be square and non-empty"));
        }
        crate::numerics::ensure_finite(&m, "transmission operator")?;
        let d = m.nrows();
        let defect = identity(d) - m.adjoint() * &m;
        let defect_root = psd_sqrt(&defect, PSD_TOL)
            .map_err(|_| Error::invalid("transmission operator is not a contraction (M†M > 1)"))?;
        Ok(ErasureChannel { m, defect_root })
    }

    /// Channel from input port `in_port` to output port `out_port` of a
    /// global scattering matrix (one-based labels).
    pub fn from_scattering(s_g: &ScatteringMatrix, in_port: usize, out_port: usize) -> Result<Self> {
        ErasureChannel::new(transmission_operator(s_g, in_port, out_port)?)
    }

    pub fn m_op(&self) -> &CMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// Index of the erasure flag in the output space.
    pub fn flag_index(&self) -> usize {
        self.dim()
    }

    /// The channel applied to any `d × d` operator, linearly.
    pub fn apply_operator(&self, x: &CMatrix) -> Result<CMatrix> {
        let d = self.dim();
        if x.nrows() != d || x.ncols() != d {
            return Err(Error::invalid(format!(
                "input is {}x{}, channel acts on dimension {d}",
                x.nrows(),
                x.ncols()
            )));
        }
        let mut out = zeros(d + 1, d + 1);
        out.view_mut((0, 0), (d, d)).copy_from(&(&self.m * x * self.m.adjoint()));
        let lost = &self.defect_root * x * &self.defect_root;
        out[(d, d)] = lost.trace();
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_operator(rho.matrix())?;
        Ok(DensityMatrix { matrix: out })
    }

    /// `K⁰ = M ⊕ 0` and `Kᵃ = |∅⟩⟨a|√(1 − M†M)`, each `(d+1) × d`.
    pub fn kraus(&self) -> Vec<CMatrix> {
        let d = self.dim();
        let mut ops = Vec::with_capacity(d + 1);
        let mut k0 = zeros(d + 1, d);
        k0.view_mut((0, 0), (d, d)).copy_from(&self.m);
        ops.push(k0);
        for a in 0..d {
            let mut ka = zeros(d + 1, d);
            ka.row_mut(d).copy_from(&self.defect_root.row(a));
            ops.push(ka);
        }
        ops
    }

    /// Choi matrix `Σ_ab (1/d) G(|a⟩⟨b|) ⊗ |a⟩⟨b|`, output factor first.
    pub fn choi(&self) -> CMatrix {
        let d = self.dim();
        let n = d + 1;
        let mut c = zeros(n * d, n * d);
        for a in 0..d {
            for b in 0..d {
                let mut e = zeros(d, d);
                e[(a, b)] = c64(1.0, 0.0);
                let g = self.apply_operator(&e).expect("dimension matches") / c64(d as f64, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        c[(i * d + a, j * d + b)] = g[(i, j)];
                    }
                }
            }
        }
        c
    }

    /// `M₂M₁`: transmission through `self` first, then `next`.
    pub fn then(&self, next: &ErasureChannel) -> Result<ErasureChannel> {
        compose(next, self)
    }

    /// Channel with transmission operator `U₂ M U₁`.
    pub fn conjugated(&self, u2: &CMatrix, u1: &CMatrix) -> Result<ErasureChannel> {
        let d = self.dim();
        for u in [u1, u2] {
            if u.nrows() != d || u.ncols() != d {
                return Err(Error::invalid("conjugating unitary has the wrong dimension"));
            }
            let defect = unitarity_defect(u);
            if defect > crate::smatrix::UNITARITY_TOL {
                return Err(Error::NonUnitary { defect });
            }
        }
        ErasureChannel::new(u2 * &self.m * u1)
    }
}

/// Residuals of the three CPTP conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    /// `max |Σ K†K − 1|`.
    pub kraus_completeness: f64,
    /// Smallest eigenvalue of the Choi matrix.
    pub choi_min_eigenvalue: f64,
    /// `|Tr C − 1|`.
    pub trace_deviation: f64,
}

impl CptpReport {
    pub fn passes(&self, completeness_tol: f64, negativity_tol: f64, trace_tol: f64) -> bool {
        self.kraus_completeness < completeness_tol
            && self.choi_min_eigenvalue >= -negativity_tol
            && self.trace_deviation < trace_tol
    }
}

impl ErasureChannel {
    pub fn cptp_report(&self) -> CptpReport {
        let d = self.dim();
        let completeness = self
            .kraus()
            .iter()
            .fold(zeros(d, d), |acc, k| acc + k.adjoint() * k);
        let choi = self.choi();
        CptpReport {
            kraus_completeness: max_abs(&(completeness - identity(d))),
            choi_min_eigenvalue: hermitian_eigenvalues(&hermitian_part(&choi))[0],
            trace_deviation: (choi.trace() - c64(1.0, 0.0)).norm(),
        }
    }
}

/// `d × d` block of `s_g` from input port `in_port` to output port
/// `out_port` (one-based labels).
pub fn transmission_operator(s_g: &ScatteringMatrix, in_port: usize, out_port: usize) -> Result<CMatrix> {
    let spec = s_g.spec();
    if in_port == 0 || in_port > spec.total_in() {
        return Err(Error::invalid(format!("no input port {in_port}")));
    }
    if out_port == 0 || out_port > spec.total_out() {
        return Err(Error::invalid(format!("no output port {out_port}")));
    }
    s_g.slot_block(out_port - 1, in_port - 1)
}

/// Sequential use of `ch1` then `ch2`; erased states stay erased.
pub fn compose(ch2: &ErasureChannel, ch1: &ErasureChannel) -> Result<ErasureChannel> {
    if ch1.dim() != ch2.dim() {
        return Err(Error::invalid(format!(
            "channel dimensions differ ({} vs {})",
            ch1.dim(),
            ch2.dim()
        )));
    }
    ErasureChannel::new(&ch2.m * &ch1.m)
}
