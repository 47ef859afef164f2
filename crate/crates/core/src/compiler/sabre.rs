//! SABRE swap insertion.
//!
//! The router walks the per-qubit dependency DAG of the input circuit. Gates whose
//! predecessors have all been emitted form the front layer; single-qubit gates and
//! two-qubit gates on coupled physical qubits are emitted immediately. When the front
//! layer is blocked, every coupling edge touching a front-layer qubit is scored by the
//! mean front-layer distance plus a weighted mean distance over a lookahead set of
//! upcoming two-qubit gates, scaled by a per-qubit decay penalty, and the cheapest
//! swap is applied.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::compiler::{Device, Layout};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SabreConfig {
    pub extended_set_size: usize,
    pub lookahead_weight: f64,
    pub decay_increment: f64,
    pub decay_reset_interval: usize,
    /// Recorded for provenance; tie-breaking is lexicographic so routing does not draw
    /// random numbers.
    pub seed: u64,
    /// Consecutive swaps without progress before falling back to a shortest-path chain.
    /// `None` means three times the device size.
    pub stall_limit: Option<usize>,
}

impl Default for SabreConfig {
    fn default() -> Self {
        Self {
            extended_set_size: 20,
            lookahead_weight: 0.5,
            decay_increment: 0.001,
            decay_reset_interval: 5,
            seed: 0,
            stall_limit: None,
        }
    }
}

impl SabreConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lookahead_weight) {
            return Err(Error::InvalidParameter(format!(
                "lookahead weight must lie in [0, 1], got {}",
                self.lookahead_weight
            )));
        }
        if !(self.decay_increment >= 0.0) {
            return Err(Error::InvalidParameter(
                "decay increment must be non-negative".into(),
            ));
        }
        if self.decay_reset_interval == 0 {
            return Err(Error::InvalidParameter(
                "decay reset interval must be at least 1".into(),
            ));
        }
        if self.stall_limit == Some(0) {
            return Err(Error::InvalidParameter("stall limit must be at least 1".into()));
        }
        Ok(())
    }

    fn stall_limit_for(&self, n: usize) -> usize {
        self.stall_limit.unwrap_or(3 * n).max(1)
    }
}

#[derive(Debug, Clone)]
pub struct RoutingResult {
    /// Routed circuit over physical qubits, SWAP gates included.
    pub circuit: Circuit,
    pub final_layout: Layout,
    pub swap_count: usize,
}

const NONE: usize = usize::MAX;

pub fn sabre_route(
    circuit: &Circuit,
    device: &Device,
    layout: &Layout,
    cfg: &SabreConfig,
) -> Result<RoutingResult> {
    cfg.validate()?;
    let n_phys = device.num_qubits();
    if circuit.n_qubits() > n_phys {
        return Err(Error::DeviceTooSmall {
            needed: circuit.n_qubits(),
            available: n_phys,
        });
    }
    if layout.len() != n_phys {
        return Err(Error::InvalidParameter(format!(
            "layout covers {} qubits, device has {n_phys}",
            layout.len()
        )));
    }
    let mut router = Router::new(circuit, device, layout.clone(), cfg);
    router.run();
    Ok(RoutingResult {
        circuit: router.out,
        final_layout: router.layout,
        swap_count: router.swap_count,
    })
}

struct Router<'a> {
    gates: &'a [Gate],
    device: &'a Device,
    cfg: &'a SabreConfig,
    successors: Vec<[usize; 2]>,
    pending_preds: Vec<u8>,
    layout: Layout,
    out: Circuit,
    front: BTreeSet<usize>,
    front_of_virtual: Vec<usize>,
    front_sum: i64,
    extended: Vec<usize>,
    extended_sum: i64,
    visit_stamp: Vec<u32>,
    stamp: u32,
    decay: Vec<f64>,
    swaps_since_reset: usize,
    swap_count: usize,
}

impl<'a> Router<'a> {
    fn new(circuit: &'a Circuit, device: &'a Device, layout: Layout, cfg: &'a SabreConfig) -> Self {
        let gates = circuit.gates();
        let mut successors = vec![[NONE; 2]; gates.len()];
        let mut pending_preds = vec![0u8; gates.len()];
        let mut last = vec![NONE; circuit.n_qubits()];
        for (i, g) in gates.iter().enumerate() {
            for &q in g.qubits() {
                let p = last[q];
                if p != NONE {
                    let s = &mut successors[p];
                    if s[0] != i && s[1] != i {
                        let slot = if s[0] == NONE { 0 } else { 1 };
                        s[slot] = i;
                        pending_preds[i] += 1;
                    }
                }
                last[q] = i;
            }
        }
        let n_phys = device.num_qubits();
        Self {
            gates,
            device,
            cfg,
            successors,
            pending_preds,
            layout,
            out: Circuit::new(n_phys).expect("device has qubits"),
            front: BTreeSet::new(),
            front_of_virtual: vec![NONE; n_phys],
            front_sum: 0,
            extended: Vec::with_capacity(cfg.extended_set_size),
            extended_sum: 0,
            visit_stamp: vec![0; gates.len()],
            stamp: 0,
            decay: vec![1.0; n_phys],
            swaps_since_reset: 0,
            swap_count: 0,
        }
    }

    #[inline]
    fn pair(&self, g: usize) -> (usize, usize) {
        let q = self.gates[g].qubits();
        (q[0], q[1])
    }

    #[inline]
    fn gate_distance(&self, g: usize) -> i64 {
        let (a, b) = self.pair(g);
        self.device
            .distances()
            .get(self.layout.physical(a), self.layout.physical(b)) as i64
    }

    fn run(&mut self) {
        let initial: VecDeque<usize> = (0..self.gates.len())
            .filter(|&i| self.pending_preds[i] == 0)
            .collect();
        self.advance(initial);
        let stall_limit = self.cfg.stall_limit_for(self.device.num_qubits());
        let mut stalled = 0;
        let mut refresh = true;
        while !self.front.is_empty() {
            if refresh {
                self.rebuild_extended_set();
                self.reset_decay();
                stalled = 0;
            }
            let touched = if stalled >= stall_limit {
                stalled = 0;
                self.force_first_front_gate()
            } else {
                let (a, b) = self.best_swap();
                self.apply_swap(a, b);
                stalled += 1;
                vec![a, b]
            };
            let mut ready = VecDeque::new();
            for p in touched {
                let g = self.front_of_virtual[self.layout.virtual_at(p)];
                if g != NONE && !ready.contains(&g) && self.gate_distance(g) == 1 {
                    ready.push_back(g);
                }
            }
            for &g in &ready {
                self.remove_from_front(g);
            }
            refresh = !ready.is_empty();
            if refresh {
                self.advance(ready);
            }
        }
    }

    /// Emits everything reachable from `work` that can run under the current layout;
    /// blocked two-qubit gates join the front layer.
    fn advance(&mut self, mut work: VecDeque<usize>) {
        while let Some(g) = work.pop_front() {
            let gate = &self.gates[g];
            if gate.is_two_qubit() && self.gate_distance(g) != 1 {
                let (a, b) = self.pair(g);
                self.front.insert(g);
                self.front_of_virtual[a] = g;
                self.front_of_virtual[b] = g;
                self.front_sum += self.gate_distance(g);
                continue;
            }
            let layout = &self.layout;
            self.out.push_unchecked(gate.remapped(|q| layout.physical(q)));
            for s in self.successors[g] {
                if s == NONE {
                    continue;
                }
                self.pending_preds[s] -= 1;
                if self.pending_preds[s] == 0 {
                    work.push_back(s);
                }
            }
        }
    }

    fn remove_from_front(&mut self, g: usize) {
        self.front_sum -= self.gate_distance(g);
        self.front.remove(&g);
        let (a, b) = self.pair(g);
        self.front_of_virtual[a] = NONE;
        self.front_of_virtual[b] = NONE;
    }

    fn rebuild_extended_set(&mut self) {
        self.extended.clear();
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.visit_stamp.fill(0);
            self.stamp = 1;
        }
        let limit = self.cfg.extended_set_size;
        let mut queue = VecDeque::new();
        for &g in &self.front {
            queue.extend(self.successors[g].iter().copied().filter(|&s| s != NONE));
        }
        while let Some(g) = queue.pop_front() {
            if self.extended.len() >= limit {
                break;
            }
            if self.visit_stamp[g] == self.stamp {
                continue;
            }
            self.visit_stamp[g] = self.stamp;
            if self.gates[g].is_two_qubit() {
                self.extended.push(g);
            }
            queue.extend(self.successors[g].iter().copied().filter(|&s| s != NONE));
        }
        self.extended_sum = self.extended.iter().map(|&g| self.gate_distance(g)).sum();
    }

    fn reset_decay(&mut self) {
        self.decay.fill(1.0);
        self.swaps_since_reset = 0;
    }

    /// Change in summed distance of gate `g` if physical qubits `pa` and `pb` swap.
    #[inline]
    fn delta(&self, g: usize, pa: usize, pb: usize) -> i64 {
        let (a, b) = self.pair(g);
        let moved = |p: usize| {
            if p == pa {
                pb
            } else if p == pb {
                pa
            } else {
                p
            }
        };
        let (xa, xb) = (self.layout.physical(a), self.layout.physical(b));
        let d = self.device.distances();
        d.get(moved(xa), moved(xb)) as i64 - d.get(xa, xb) as i64
    }

    fn score(&self, pa: usize, pb: usize) -> f64 {
        let va = self.layout.virtual_at(pa);
        let vb = self.layout.virtual_at(pb);
        let (ga, gb) = (self.front_of_virtual[va], self.front_of_virtual[vb]);
        let mut front_total = self.front_sum;
        if ga != NONE {
            front_total += self.delta(ga, pa, pb);
        }
        if gb != NONE && gb != ga {
            front_total += self.delta(gb, pa, pb);
        }
        let mut ext_total = self.extended_sum;
        for &g in &self.extended {
            let (a, b) = self.pair(g);
            if a == va || a == vb || b == va || b == vb {
                ext_total += self.delta(g, pa, pb);
            }
        }
        let front_term = front_total as f64 / self.front.len() as f64;
        let ext_term = ext_total as f64 / self.extended.len().max(1) as f64;
        self.decay[pa].max(self.decay[pb]) * (front_term + self.cfg.lookahead_weight * ext_term)
    }

    fn best_swap(&self) -> (usize, usize) {
        let graph = self.device.graph();
        let mut candidates = Vec::new();
        for &g in &self.front {
            let (a, b) = self.pair(g);
            for v in [a, b] {
                let p = self.layout.physical(v);
                for &nb in graph.neighbors(p) {
                    candidates.push((p.min(nb), p.max(nb)));
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        let mut best = candidates[0];
        let mut best_score = f64::INFINITY;
        for &(pa, pb) in &candidates {
            let s = self.score(pa, pb);
            if s < best_score {
                best_score = s;
                best = (pa, pb);
            }
        }
        best
    }

    fn apply_swap(&mut self, pa: usize, pb: usize) {
        let va = self.layout.virtual_at(pa);
        let vb = self.layout.virtual_at(pb);
        let (ga, gb) = (self.front_of_virtual[va], self.front_of_virtual[vb]);
        if ga != NONE {
            self.front_sum += self.delta(ga, pa, pb);
        }
        if gb != NONE && gb != ga {
            self.front_sum += self.delta(gb, pa, pb);
        }
        self.layout.swap_physical(pa, pb);
        self.out.push_unchecked(Gate::swap(pa, pb));
        self.swap_count += 1;
        self.extended_sum = self.extended.iter().map(|&g| self.gate_distance(g)).sum();

        self.decay[pa] += self.cfg.decay_increment;
        self.decay[pb] += self.cfg.decay_increment;
        self.swaps_since_reset += 1;
        if self.swaps_since_reset >= self.cfg.decay_reset_interval {
            self.reset_decay();
        }
    }

    /// Walks the first front-layer gate's control along a shortest path until it is
    /// adjacent to its partner. Returns the physical qubits touched.
    fn force_first_front_gate(&mut self) -> Vec<usize> {
        let g = *self.front.iter().next().expect("front layer is non-empty");
        let (a, b) = self.pair(g);
        let path = self.device.graph().shortest_path(
            self.device.distances(),
            self.layout.physical(a),
            self.layout.physical(b),
        );
        let mut touched = Vec::new();
        for w in path[..path.len() - 1].windows(2) {
            self.apply_swap(w[0], w[1]);
            touched.extend_from_slice(w);
        }
        touched.sort_unstable();
        touched.dedup();
        touched
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::TopologyKind;

    fn route(c: &Circuit, kind: TopologyKind) -> RoutingResult {
        let dev = Device::new(kind, c.n_qubits()).unwrap();
        let layout = Layout::trivial(c.n_qubits(), dev.num_qubits()).unwrap();
        sabre_route(c, &dev, &layout, &SabreConfig::default()).unwrap()
    }

    fn respects_coupling(c: &Circuit, dev: &Device) -> bool {
        c.gates()
            .iter()
            .filter(|g| g.is_two_qubit())
            .all(|g| dev.graph().contains_edge(g.qubits()[0], g.qubits()[1]))
    }

    #[test]
    fn distance_three_needs_two_swaps() {
        let c = Circuit::from_gates(4, vec![Gate::cx(0, 3)]).unwrap();
        let r = route(&c, TopologyKind::Linear);
        assert_eq!(r.swap_count, 2);
        let dev = Device::new(TopologyKind::Linear, 4).unwrap();
        assert!(respects_coupling(&r.circuit, &dev));
    }

    #[test]
    fn distance_two_needs_one_swap() {
        let c = Circuit::from_gates(4, vec![Gate::cx(0, 2)]).unwrap();
        assert_eq!(route(&c, TopologyKind::Linear).swap_count, 1);
        let c = Circuit::from_gates(4, vec![Gate::cx(1, 3)]).unwrap();
        assert_eq!(route(&c, TopologyKind::Star).swap_count, 1);
    }

    #[test]
    fn native_circuit_needs_no_swaps() {
        let c = crate::generators::ghz_circuit(30).unwrap();
        let r = route(&c, TopologyKind::Linear);
        assert_eq!(r.swap_count, 0);
        assert_eq!(r.circuit, c);
    }

    #[test]
    fn every_gate_is_emitted_once() {
        let mut gates = vec![];
        for i in 0..12 {
            gates.push(Gate::h(i));
        }
        for i in 0..12 {
            gates.push(Gate::cx(i, (i * 5 + 7) % 12));
            gates.push(Gate::ry((i * 3) % 12, 0.1));
        }
        let gates: Vec<Gate> = gates
            .into_iter()
            .filter(|g| !g.is_two_qubit() || g.qubits()[0] != g.qubits()[1])
            .collect();
        let c = Circuit::from_gates(12, gates).unwrap();
        for kind in TopologyKind::ALL {
            let dev = Device::new(kind, 12).unwrap();
            let r = route(&c, kind);
            assert_eq!(r.circuit.len(), c.len() + r.swap_count);
            assert_eq!(r.circuit.count_gates().swap, r.swap_count);
            assert!(respects_coupling(&r.circuit, &dev));
        }
    }

    #[test]
    fn stall_fallback_still_routes() {
        let cfg = SabreConfig {
            stall_limit: Some(1),
            ..Default::default()
        };
        let c = Circuit::from_gates(8, vec![Gate::cx(0, 7), Gate::cx(1, 6), Gate::cx(2, 5)]).unwrap();
        let dev = Device::new(TopologyKind::Linear, 8).unwrap();
        let layout = Layout::trivial(8, 8).unwrap();
        let r = sabre_route(&c, &dev, &layout, &cfg).unwrap();
        assert!(respects_coupling(&r.circuit, &dev));
        assert_eq!(r.circuit.len(), 3 + r.swap_count);
    }

    #[test]
    fn config_validation() {
        let bad = SabreConfig {
            lookahead_weight: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SabreConfig {
            stall_limit: Some(0),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(SabreConfig::default().validate().is_ok());
    }
}
