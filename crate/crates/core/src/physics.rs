//! Spin-1/2 particle on a line with two square barriers and a lossy point
//! scatterer between them.
//!
//! Units are dimensionless: energies in units of the barrier scale `V₀`,
//! lengths in units of `ħ/√(2mV₀)`. A spin-σ particle at energy `Ẽ = E/V₀`
//! has wavenumber `k = √Ẽ` outside the barriers and decay constant
//! `κ = √(h − Ẽ)` inside a barrier of height `h = 1 ± ε`, continued to
//! imaginary values above the barrier top.
//!
//! Two configurations are compared. The *single* one sends the particle
//! through one barrier and then the loss element. The *double* one puts a
//! second barrier behind the loss element, so the particle bounces between
//! the two barriers and picks up a resonant denominator.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::capacity::{capacity_bounds, detect_superactivation, CapacityBounds};
use crate::channel::transmission_operator;
use crate::error::{Error, Result};
use crate::graph::{Edge, Port, QuantumGraph, SlotAddr, Vertex};
use crate::numerics::{c64, diag, max_abs, zeros, CMatrix};
use crate::smatrix::{PortSpec, ScatteringMatrix};

/// Barrier half-width of the reference configuration, `0.06·√20`.
pub const REFERENCE_HALF_WIDTH: f64 = 0.268_328_157_299_974_8;

/// Barrier separation of the reference configuration, `10·√20`.
pub const REFERENCE_SEPARATION: f64 = 44.721_359_549_995_796;

/// Resonant denominators smaller than this are left to the star product.
pub const MIN_DENOMINATOR: f64 = 1e-14;

/// Every this many grid points the sweep recomputes both channels by graph
/// contraction.
pub const CROSS_CHECK_STRIDE: usize = 100;

/// Allowed closed-form vs contraction mismatch.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

/// Global port labels of the input (Alice) and output (Bob) in both graphs.
pub const INPUT_PORT: usize = 1;
pub const OUTPUT_PORT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierParams {
    /// `E/V₀`.
    pub energy_ratio: f64,
    /// Spin asymmetry: heights are `1 + ε` (up) and `1 − ε` (down).
    pub epsilon: f64,
    pub half_width: f64,
    pub separation: f64,
    /// Probability of being deflected off the line by the loss element.
    pub eta: f64,
}

impl BarrierParams {
    /// Reference geometry at the given energy, asymmetry and loss.
    pub fn reference(energy_ratio: f64, epsilon: f64, eta: f64) -> Self {
        BarrierParams {
            energy_ratio,
            epsilon,
            half_width: REFERENCE_HALF_WIDTH,
            separation: REFERENCE_SEPARATION,
            eta,
        }
    }

    pub fn with_energy(self, energy_ratio: f64) -> Self {
        BarrierParams { energy_ratio, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.energy_ratio, self.epsilon, self.half_width, self.separation, self.eta]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::invalid("barrier parameters must be finite"));
        }
        if self.energy_ratio <= 0.0 {
            return Err(Error::invalid(format!("energy ratio {} must be positive", self.energy_ratio)));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::invalid(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        if self.half_width <= 0.0 {
            return Err(Error::invalid(format!("half-width {} must be positive", self.half_width)));
        }
        if self.separation < 0.0 {
            return Err(Error::invalid(format!("separation {} must be non-negative", self.separation)));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::invalid(format!("eta {} outside [0, 1]", self.eta)));
        }
        Ok(())
    }

    /// Free wavenumber `k = √Ẽ`.
    pub fn wavenumber(&self) -> f64 {
        self.energy_ratio.sqrt()
    }

    /// Round-trip phase `φ = 2kw` picked up by translating a barrier by `w`.
    pub fn translation_phase(&self) -> f64 {
        2.0 * self.wavenumber() * self.separation
    }

    pub fn spin_up(&self) -> Barrier {
        barrier_coefficients(self.energy_ratio, 1.0 + self.epsilon, self.half_width)
    }

    pub fn spin_down(&self) -> Barrier {
        barrier_coefficients(self.energy_ratio, 1.0 - self.epsilon, self.half_width)
    }
}

/// Transmission and reflection amplitudes of one symmetric barrier for one
/// spin component. The barrier is symmetric, so both sides share them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Barrier {
    pub t: Complex64,
    pub r: Complex64,
}

/// `sinh(z)/z`, with its Taylor series near the origin.
fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0))
    } else {
        z.sinh() / z
    }
}

/// Amplitudes of a square barrier of height `height` on `[-a, a]` at energy
/// `energy_ratio`, with the plane waves referenced to the origin.
pub fn barrier_coefficients(energy_ratio: f64, height: f64, half_width: f64) -> Barrier {
    let k = energy_ratio.sqrt();
    let kappa2 = c64(height - energy_ratio, 0.0);
    let kappa = kappa2.sqrt();
    let z = 2.0 * half_width * kappa;
    // sinh(2aκ)/κ, finite as κ → 0.
    let sinh_over_kappa = 2.0 * half_width * sinhc(z);
    let i = c64(0.0, 1.0);
    let denom = z.cosh() - i * (k * k - kappa2) / (2.0 * k) * sinh_over_kappa;
    let t = c64(0.0, -2.0 * k * half_width).exp() / denom;
    let r = -i * (k * k + kappa2) / (2.0 * k) * sinh_over_kappa * t;
    Barrier { t, r }
}

/// Spin-diagonal two-slot scatterer with the given per-spin amplitudes
/// (reflection on each side, transmission both ways).
fn spin_scatterer(up: [Complex64; 4], down: [Complex64; 4]) -> ScatteringMatrix {
    // [S^{11}, S^{12}, S^{21}, S^{22}] per spin.
    let mut m = zeros(4, 4);
    for (spin, s) in [(0, up), (1, down)] {
        m[(spin, spin)] = s[0];
        m[(spin, 2 + spin)] = s[1];
        m[(2 + spin, spin)] = s[2];
        m[(2 + spin, 2 + spin)] = s[3];
    }
    ScatteringMatrix::new(m, PortSpec::homogeneous(1, 2), false).expect("4x4 layout")
}

/// Local scattering matrix of the first barrier: slot 0 is the left side,
/// slot 1 the right side, spin up before spin down within each slot.
pub fn barrier_smatrix(p: &BarrierParams) -> Result<ScatteringMatrix> {
    p.validate()?;
    let (up, dn) = (p.spin_up(), p.spin_down());
    Ok(spin_scatterer([up.r, up.t, up.t, up.r], [dn.r, dn.t, dn.t, dn.r]))
}

/// Shifts a two-slot spin scatterer by `p.separation`: left reflections pick
/// up `e^{iφ}`, right reflections `e^{−iφ}`, transmissions are unchanged.
pub fn translated_barrier(s1: &ScatteringMatrix, p: &BarrierParams) -> Result<ScatteringMatrix> {
    if *s1.spec() != PortSpec::homogeneous(1, 2) {
        return Err(Error::invalid("translation expects a two-slot spin scatterer"));
    }
    let phase = c64(0.0, p.translation_phase()).exp();
    let mut m = s1.matrix().clone();
    for spin in 0..2 {
        m[(spin, spin)] *= phase;
        m[(2 + spin, 2 + spin)] *= phase.conj();
    }
    ScatteringMatrix::new(m, *s1.spec(), false)
}

/// The loss element: four slots (two per side), slot 0 and slot 3 on the
/// line, slots 1 and 2 leading off it. Staying on the line has amplitude
/// `√(1−η)`, being deflected `±√η`.
pub fn loss_smatrix(eta: f64) -> Result<ScatteringMatrix> {
    if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
        return Err(Error::invalid(format!("eta {eta} outside [0, 1]")));
    }
    let (a, b) = (eta.sqrt(), (1.0 - eta).sqrt());
    // Rows: out-slots, columns: in-slots.
    let slots = [
        [0.0, 0.0, a, b],
        [0.0, 0.0, -b, a],
        [a, -b, 0.0, 0.0],
        [b, a, 0.0, 0.0],
    ];
    let mut m = zeros(8, 8);
    for (o, row) in slots.iter().enumerate() {
        for (i, &x) in row.iter().enumerate() {
            for s in 0..2 {
                m[(2 * o + s, 2 * i + s)] = c64(x, 0.0);
            }
        }
    }
    ScatteringMatrix::new(m, PortSpec::homogeneous(2, 2), false)
}

/// Diagonal transmission operator `diag(m_up, m_down)` of one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinChannelPair {
    pub m_up: Complex64,
    pub m_down: Complex64,
}

impl SpinChannelPair {
    pub fn operator(&self) -> CMatrix {
        diag(&[self.m_up, self.m_down])
    }

    /// `(|m_up|², |m_down|²)`.
    pub fn probabilities(&self) -> (f64, f64) {
        (self.m_up.norm_sqr(), self.m_down.norm_sqr())
    }

    pub fn bounds(&self) -> Result<CapacityBounds> {
        capacity_bounds(&self.operator(), 2)
    }
}

/// Closed-form transmission operator of the single-barrier channel,
/// `√(1−η)·t_σ`.
pub fn single_barrier_m(p: &BarrierParams) -> Result<SpinChannelPair> {
    p.validate()?;
    let line = (1.0 - p.eta).sqrt();
    Ok(SpinChannelPair {
        m_up: line * p.spin_up().t,
        m_down: line * p.spin_down().t,
    })
}

/// Closed-form transmission operator of the double-barrier channel,
/// `√(1−η) t_σ² / (1 − (1−η) r_σ² e^{iφ})`. Falls back to graph contraction
/// where the denominator vanishes.
pub fn double_barrier_m(p: &BarrierParams) -> Result<SpinChannelPair> {
    p.validate()?;
    let line = 1.0 - p.eta;
    let phase = c64(0.0, p.translation_phase()).exp();
    let mut m = [c64(0.0, 0.0); 2];
    for (slot, b) in m.iter_mut().zip([p.spin_up(), p.spin_down()]) {
        let denom = 1.0 - line * b.r * b.r * phase;
        if denom.norm() < MIN_DENOMINATOR {
            log::warn!(
                "resonant denominator {:.3e} at E/V0 = {}; using graph contraction",
                denom.norm(),
                p.energy_ratio
            );
            let op = double_barrier_m_pipeline(p)?;
            return Ok(SpinChannelPair { m_up: op[(0, 0)], m_down: op[(1, 1)] });
        }
        *slot = line.sqrt() * b.t * b.t / denom;
    }
    Ok(SpinChannelPair { m_up: m[0], m_down: m[1] })
}

fn slot(vertex: usize, slot: usize) -> SlotAddr {
    SlotAddr { vertex, slot }
}

fn port(label: usize, vertex: usize, slot: usize) -> Port {
    Port { label, vertex, slot }
}

fn wire(from: (usize, usize), to: (usize, usize)) -> Edge {
    Edge { from: slot(from.0, from.1), to: slot(to.0, to.1) }
}

/// Barrier (vertex 1) followed by the loss element (vertex 2). Port 1 is
/// the left input of the barrier, port 4 the line output of the loss.
pub fn single_barrier_graph(p: &BarrierParams) -> Result<QuantumGraph> {
    Ok(QuantumGraph {
        vertices: vec![
            Vertex { id: 1, smatrix: barrier_smatrix(p)? },
            Vertex { id: 2, smatrix: loss_smatrix(p.eta)? },
        ],
        edges: vec![wire((1, 1), (2, 0)), wire((2, 0), (1, 1))],
        dangling_in: vec![port(1, 1, 0), port(2, 2, 1), port(3, 2, 2), port(4, 2, 3)],
        dangling_out: vec![port(1, 1, 0), port(2, 2, 1), port(3, 2, 2), port(4, 2, 3)],
    })
}

/// Barrier (vertex 1), loss element (vertex 2) and translated barrier
/// (vertex 3). Port 1 is the left input of the first barrier, port 4 the
/// right output of the second.
pub fn double_barrier_graph(p: &BarrierParams) -> Result<QuantumGraph> {
    let s1 = barrier_smatrix(p)?;
    let s2 = translated_barrier(&s1, p)?;
    Ok(QuantumGraph {
        vertices: vec![
            Vertex { id: 1, smatrix: s1 },
            Vertex { id: 2, smatrix: loss_smatrix(p.eta)? },
            Vertex { id: 3, smatrix: s2 },
        ],
        edges: vec![
            wire((1, 1), (2, 0)),
            wire((2, 3), (3, 0)),
            wire((3, 0), (2, 3)),
            wire((2, 0), (1, 1)),
        ],
        dangling_in: vec![port(1, 1, 0), port(2, 2, 1), port(3, 2, 2), port(4, 3, 1)],
        dangling_out: vec![port(1, 1, 0), port(2, 2, 1), port(3, 2, 2), port(4, 3, 1)],
    })
}

/// Single-barrier transmission operator by graph contraction.
pub fn single_barrier_m_pipeline(p: &BarrierParams) -> Result<CMatrix> {
    let s_g = single_barrier_graph(p)?.contract()?;
    transmission_operator(&s_g, INPUT_PORT, OUTPUT_PORT)
}

/// Double-barrier transmission operator by graph contraction.
pub fn double_barrier_m_pipeline(p: &BarrierParams) -> Result<CMatrix> {
    let s_g = double_barrier_graph(p)?.contract()?;
    transmission_operator(&s_g, INPUT_PORT, OUTPUT_PORT)
}

/// Largest closed-form vs contraction discrepancy over both configurations.
pub fn pipeline_residual(p: &BarrierParams) -> Result<f64> {
    let single = max_abs(&(single_barrier_m(p)?.operator() - single_barrier_m_pipeline(p)?));
    let double = max_abs(&(double_barrier_m(p)?.operator() - double_barrier_m_pipeline(p)?));
    Ok(single.max(double))
}

/// One energy of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub energy_ratio: f64,
    pub single: SpinChannelPair,
    pub double: SpinChannelPair,
    pub single_bounds: CapacityBounds,
    pub double_bounds: CapacityBounds,
    /// Double configuration certifiably transmits quantum information
    /// while the single one certifiably cannot.
    pub superactivated: bool,
}

impl SweepRow {
    pub fn evaluate(p: &BarrierParams) -> Result<Self> {
        let single = single_barrier_m(p)?;
        let double = double_barrier_m(p)?;
        let single_bounds = single.bounds()?;
        let double_bounds = double.bounds()?;
        let superactivated = detect_superactivation(&double_bounds, &single_bounds)?;
        Ok(SweepRow {
            energy_ratio: p.energy_ratio,
            single,
            double,
            single_bounds,
            double_bounds,
            superactivated,
        })
    }
}

/// Evaluates both channels on `grid`, in parallel, rows in grid order.
/// Every [`CROSS_CHECK_STRIDE`]-th point (starting with the first) is
/// recomputed by graph contraction.
pub fn energy_sweep(base: &BarrierParams, grid: &[f64]) -> Result<Vec<SweepRow>> {
    validate_grid(grid)?;
    base.with_energy(grid[0]).validate()?;
    grid.par_iter()
        .enumerate()
        .map(|(idx, &e)| {
            let p = base.with_energy(e);
            let row = SweepRow::evaluate(&p)?;
            if idx % CROSS_CHECK_STRIDE == 0 {
                let residual = pipeline_residual(&p)?;
                if residual > CROSS_CHECK_TOL {
                    return Err(Error::InternalConsistency(format!(
                        "closed form and graph contraction differ by {residual:.3e} at E/V0 = {e}"
                    )));
                }
            }
            Ok(row)
        })
        .collect()
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("energy grid is empty"));
    }
    if grid.iter().any(|e| !e.is_finite() || *e <= 0.0) {
        return Err(Error::invalid("energy grid values must be finite and positive"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("energy grid must be strictly increasing"));
    }
    Ok(())
}

/// `points` equally spaced values on `[start, stop]`.
pub fn linear_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::invalid("a grid needs at least two points"));
    }
    if !(start.is_finite() && stop.is_finite()) || stop <= start {
        return Err(Error::invalid(format!("grid bounds [{start}, {stop}] are not increasing")));
    }
    let step = (stop - start) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i == points - 1 { stop } else { start + step * i as f64 })
        .collect())
}
