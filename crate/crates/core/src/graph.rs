//! Quantum graphs and their contraction to a global scattering matrix.
//!
//! Vertices carry local scattering matrices; internal edges identify an
//! out-slot of one vertex with an in-slot of another. Slots that are not
//! wired are dangling and carry the labels `1..=N` of the global ports.
//! Contraction merges vertices pairwise with the star product until one is
//! left, then orders its slots by dangling label.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::composer::{star, Wiring};
use crate::error::{Error, Result};
use crate::smatrix::{PortSpec, ScatteringMatrix};

/// Unitarity tolerance for the contracted matrix.
pub const GLOBAL_UNITARITY_TOL: f64 = 1e-9;

pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub smatrix: ScatteringMatrix,
}

/// A slot on a vertex, zero-based and flat (left group first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlotAddr {
    pub vertex: VertexId,
    pub slot: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    /// Out-slot the amplitude leaves from.
    pub from: SlotAddr,
    /// In-slot it enters.
    pub to: SlotAddr,
}

/// Global port: a labelled dangling slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Port {
    pub label: usize,
    pub vertex: VertexId,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumGraph {
    pub vertices: Vec<Vertex>,
    #[serde(default)]
    pub edges: Vec<Edge>,
    pub dangling_in: Vec<Port>,
    pub dangling_out: Vec<Port>,
}

/// Which side of a vertex a slot sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Dir {
    In,
    Out,
}

impl QuantumGraph {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("graph JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }

    /// Number of global ports.
    pub fn port_count(&self) -> usize {
        self.dangling_in.len()
    }

    pub fn internal_dim(&self) -> Option<usize> {
        self.vertices.first().map(|v| v.smatrix.internal_dim())
    }

    fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    /// All structural violations, empty when the graph is valid.
    pub fn violations(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if self.vertices.is_empty() {
            errs.push("graph has no vertices".to_string());
            return errs;
        }

        let mut ids = HashSet::new();
        let d = self.vertices[0].smatrix.internal_dim();
        for v in &self.vertices {
            let spec = v.smatrix.spec();
            if !ids.insert(v.id) {
                errs.push(format!("vertex id {} used twice", v.id));
            }
            if spec.total_in() == 0 && spec.total_out() == 0 {
                errs.push(format!("vertex {} has no slots", v.id));
            }
            if spec.internal_dim != d {
                errs.push(format!(
                    "vertex {}: internal dimension {} differs from {}",
                    v.id, spec.internal_dim, d
                ));
            }
        }

        // Count how often each slot is used, as wired or dangling.
        let mut uses: BTreeMap<(VertexId, Dir, usize), usize> = BTreeMap::new();
        let mut claim = |errs: &mut Vec<String>, addr: SlotAddr, dir: Dir, what: &str| {
            let Some(v) = self.vertex(addr.vertex) else {
                errs.push(format!("{what}: unknown vertex {}", addr.vertex));
                return;
            };
            let n = match dir {
                Dir::In => v.smatrix.spec().total_in(),
                Dir::Out => v.smatrix.spec().total_out(),
            };
            if addr.slot >= n {
                errs.push(format!(
                    "{what}: vertex {} has no {:?}-slot {}",
                    addr.vertex, dir, addr.slot
                ));
                return;
            }
            *uses.entry((addr.vertex, dir, addr.slot)).or_default() += 1;
        };

        for e in &self.edges {
            if e.from.vertex == e.to.vertex {
                errs.push(format!("self-loop on vertex {}", e.from.vertex));
            }
            claim(&mut errs, e.from, Dir::Out, "edge source");
            claim(&mut errs, e.to, Dir::In, "edge target");
        }
        for p in &self.dangling_in {
            claim(&mut errs, SlotAddr { vertex: p.vertex, slot: p.slot }, Dir::In, "dangling in");
        }
        for p in &self.dangling_out {
            claim(&mut errs, SlotAddr { vertex: p.vertex, slot: p.slot }, Dir::Out, "dangling out");
        }

        for v in &self.vertices {
            let spec = v.smatrix.spec();
            let sides = [(Dir::In, spec.total_in()), (Dir::Out, spec.total_out())];
            for (dir, n) in sides {
                for slot in 0..n {
                    match uses.get(&(v.id, dir, slot)).copied().unwrap_or(0) {
                        1 => {}
                        0 => errs.push(format!("vertex {}: {:?}-slot {} is neither wired nor dangling", v.id, dir, slot)),
                        k => errs.push(format!("vertex {}: {:?}-slot {} is used {} times", v.id, dir, slot, k)),
                    }
                }
            }
        }

        if self.dangling_in.len() != self.dangling_out.len() {
            errs.push(format!(
                "{} dangling in-edges but {} dangling out-edges",
                self.dangling_in.len(),
                self.dangling_out.len()
            ));
        }
        for (ports, name) in [(&self.dangling_in, "dangling_in"), (&self.dangling_out, "dangling_out")] {
            let mut labels: Vec<usize> = ports.iter().map(|p| p.label).collect();
            labels.sort_unstable();
            if labels.iter().enumerate().any(|(i, &l)| l != i + 1) {
                errs.push(format!("{name} labels must be exactly 1..={}", ports.len()));
            }
        }
        errs
    }

    pub fn validate(&self) -> Result<()> {
        let errs = self.violations();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid(errs.join("; ")))
        }
    }

    /// Global scattering matrix with the default contraction order
    /// (ascending vertex id).
    pub fn contract(&self) -> Result<ScatteringMatrix> {
        self.contract_with_order(&[])
    }

    /// Global scattering matrix. `order` lists vertex pairs `(a, b)` to merge
    /// first, `a` playing the first scatterer; the merged vertex keeps id
    /// `a`. Whatever remains is merged in ascending id order.
    ///
    /// Rows and columns follow the dangling labels; the result is laid out
    /// as `N` left in/out slots.
    pub fn contract_with_order(&self, order: &[(VertexId, VertexId)]) -> Result<ScatteringMatrix> {
        self.validate()?;
        let mut nodes: BTreeMap<VertexId, Node> = BTreeMap::new();
        for v in &self.vertices {
            let spec = v.smatrix.spec();
            nodes.insert(
                v.id,
                Node {
                    s: v.smatrix.clone(),
                    ins: vec![SlotRef::Dangling(0); spec.total_in()],
                    outs: vec![SlotRef::Dangling(0); spec.total_out()],
                },
            );
        }
        for (k, e) in self.edges.iter().enumerate() {
            nodes.get_mut(&e.from.vertex).unwrap().outs[e.from.slot] = SlotRef::Edge(k);
            nodes.get_mut(&e.to.vertex).unwrap().ins[e.to.slot] = SlotRef::Edge(k);
        }
        for p in &self.dangling_in {
            nodes.get_mut(&p.vertex).unwrap().ins[p.slot] = SlotRef::Dangling(p.label);
        }
        for p in &self.dangling_out {
            nodes.get_mut(&p.vertex).unwrap().outs[p.slot] = SlotRef::Dangling(p.label);
        }

        for &(a, b) in order {
            if a == b {
                return Err(Error::invalid(format!("cannot merge vertex {a} with itself")));
            }
            let (Some(na), Some(nb)) = (nodes.remove(&a), nodes.remove(&b)) else {
                return Err(Error::invalid(format!(
                    "contraction order names vertex {a} or {b}, which no longer exists"
                )));
            };
            nodes.insert(a, merge(na, nb)?);
        }
        let mut rest = std::mem::take(&mut nodes).into_values();
        let mut acc = rest.next().expect("graph has vertices");
        for next in rest {
            acc = merge(acc, next)?;
        }

        let n = self.port_count();
        let d = acc.s.internal_dim();
        let position = |refs: &[SlotRef]| -> Vec<usize> {
            let mut pos = vec![0; n];
            for (slot, r) in refs.iter().enumerate() {
                if let SlotRef::Dangling(label) = r {
                    pos[label - 1] = slot;
                }
            }
            pos
        };
        let (ins, outs) = (position(&acc.ins), position(&acc.outs));
        let m = acc.s.matrix();
        let global = crate::numerics::CMatrix::from_fn(n * d, n * d, |i, j| {
            m[(outs[i / d] * d + i % d, ins[j / d] * d + j % d)]
        });
        let result = ScatteringMatrix::new(global, PortSpec::new(n, n, 0, 0, d)?, false)?;
        let defect = result.unitarity_defect();
        if defect > GLOBAL_UNITARITY_TOL {
            return Err(Error::InternalConsistency(format!(
                "contracted matrix is not unitary (defect {defect:.3e})"
            )));
        }
        Ok(result)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SlotRef {
    Dangling(usize),
    Edge(usize),
}

#[derive(Debug, Clone)]
struct Node {
    s: ScatteringMatrix,
    ins: Vec<SlotRef>,
    outs: Vec<SlotRef>,
}

/// Star product of two partially contracted vertices, `b ⋆ a`.
fn merge(a: Node, b: Node) -> Result<Node> {
    let edge_slot = |refs: &[SlotRef], e: usize| refs.iter().position(|r| *r == SlotRef::Edge(e));
    let mut wiring = Wiring::default();
    for (o, r) in a.outs.iter().enumerate() {
        if let SlotRef::Edge(e) = *r {
            if let Some(i) = edge_slot(&b.ins, e) {
                wiring.s1_to_s2.push((o, i));
            }
        }
    }
    for (o, r) in b.outs.iter().enumerate() {
        if let SlotRef::Edge(e) = *r {
            if let Some(i) = edge_slot(&a.ins, e) {
                wiring.s2_to_s1.push((o, i));
            }
        }
    }

    let closed_a_in: HashSet<usize> = wiring.s2_to_s1.iter().map(|p| p.1).collect();
    let closed_a_out: HashSet<usize> = wiring.s1_to_s2.iter().map(|p| p.0).collect();
    let closed_b_in: HashSet<usize> = wiring.s1_to_s2.iter().map(|p| p.1).collect();
    let closed_b_out: HashSet<usize> = wiring.s2_to_s1.iter().map(|p| p.0).collect();
    let keep = |refs: &[SlotRef], closed: &HashSet<usize>| -> Vec<SlotRef> {
        refs.iter()
            .enumerate()
            .filter(|(k, _)| !closed.contains(k))
            .map(|(_, r)| *r)
            .collect()
    };
    let mut ins = keep(&a.ins, &closed_a_in);
    ins.extend(keep(&b.ins, &closed_b_in));
    let mut outs = keep(&a.outs, &closed_a_out);
    outs.extend(keep(&b.outs, &closed_b_out));

    let s = star(&b.s, &a.s, &wiring)?;
    Ok(Node { s, ins, outs })
}
