//! Layout, routing, basis translation and peephole optimization onto a coupling map.

mod basis;
mod layout;
mod sabre;

pub use basis::{decompose_to_basis, optimize, IDENTITY_TOL};
pub use layout::Layout;
pub use sabre::{sabre_route, RoutingResult, SabreConfig};

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::topology::{CouplingGraph, DistanceMatrix, TopologyKind};

/// A coupling graph together with its precomputed distance matrix.
#[derive(Debug, Clone)]
pub struct Device {
    graph: CouplingGraph,
    distances: DistanceMatrix,
}

impl Device {
    pub fn new(kind: TopologyKind, n: usize) -> Result<Self> {
        Self::from_graph(CouplingGraph::build(kind, n)?)
    }

    pub fn from_graph(graph: CouplingGraph) -> Result<Self> {
        let distances = graph.distance_matrix()?;
        Ok(Self { graph, distances })
    }

    pub fn graph(&self) -> &CouplingGraph {
        &self.graph
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.distances
    }

    pub fn num_qubits(&self) -> usize {
        self.graph.num_qubits()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceMetrics {
    pub swap_count: usize,
    pub depth_pre: usize,
    pub depth_post: usize,
    pub depth_increase_pct: f64,
    pub twoq_pre: usize,
    pub twoq_post: usize,
    pub twoq_overhead_pct: f64,
}

impl ResourceMetrics {
    pub fn new(
        swap_count: usize,
        depth_pre: usize,
        depth_post: usize,
        twoq_pre: usize,
        twoq_post: usize,
    ) -> Self {
        Self {
            swap_count,
            depth_pre,
            depth_post,
            depth_increase_pct: percent_change(depth_pre, depth_post),
            twoq_pre,
            twoq_post,
            twoq_overhead_pct: percent_change(twoq_pre, twoq_post),
        }
    }

    /// `# swaps=…, depth_pre=…, depth_post=…, twoq_pre=…, twoq_post=…`
    pub fn header_line(&self) -> String {
        format!(
            "# swaps={}, depth_pre={}, depth_post={}, twoq_pre={}, twoq_post={}",
            self.swap_count, self.depth_pre, self.depth_post, self.twoq_pre, self.twoq_post
        )
    }
}

/// Relative change in percent; zero when the baseline is zero.
fn percent_change(pre: usize, post: usize) -> f64 {
    if pre == 0 {
        0.0
    } else {
        100.0 * (post as f64 - pre as f64) / pre as f64
    }
}

#[derive(Debug, Clone)]
pub struct CompiledCircuit {
    pub circuit: Circuit,
    pub initial_layout: Layout,
    pub final_layout: Layout,
    pub metrics: ResourceMetrics,
}

impl CompiledCircuit {
    pub fn dump(&self) -> String {
        format!("{}\n{}", self.metrics.header_line(), self.circuit.dump())
    }

    /// Checks the basis and coupling invariants against `device`.
    pub fn respects(&self, device: &Device) -> bool {
        self.circuit.gates().iter().all(|g| match g.kind {
            GateKind::U3 => true,
            GateKind::CX => device.graph().contains_edge(g.qubits()[0], g.qubits()[1]),
            _ => false,
        })
    }
}

/// Decompose, lay out trivially, route with SABRE, expand swaps and optimize.
pub fn compile(circuit: &Circuit, device: &Device, cfg: &SabreConfig) -> Result<CompiledCircuit> {
    if circuit.n_qubits() > device.num_qubits() {
        return Err(Error::DeviceTooSmall {
            needed: circuit.n_qubits(),
            available: device.num_qubits(),
        });
    }
    let pre = decompose_to_basis(circuit);
    let initial_layout = Layout::trivial(circuit.n_qubits(), device.num_qubits())?;
    let routed = sabre_route(&pre, device, &initial_layout, cfg)?;
    let expanded = decompose_to_basis(&routed.circuit);
    let optimized = optimize(&expanded);
    let metrics = ResourceMetrics::new(
        routed.swap_count,
        pre.depth(),
        optimized.depth(),
        pre.count_gates().two_qubit,
        optimized.count_gates().two_qubit,
    );
    Ok(CompiledCircuit {
        circuit: optimized,
        initial_layout,
        final_layout: routed.final_layout,
        metrics,
    })
}
