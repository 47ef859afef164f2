//! Gate-level circuit representation, structural metrics and ASAP scheduling.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gate kinds understood by every stage of the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    RX,
    RY,
    RZ,
    P,
    U3,
    CX,
    CZ,
    SWAP,
}

impl GateKind {
    pub fn num_qubits(self) -> usize {
        match self {
            GateKind::CX | GateKind::CZ | GateKind::SWAP => 2,
            _ => 1,
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::CX | GateKind::CZ | GateKind::SWAP => 0,
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::P => 1,
            GateKind::U3 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::P => "P",
            GateKind::U3 => "U3",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
            GateKind::SWAP => "SWAP",
        }
    }
}

/// A single gate application. For `CX` the qubits are `[control, target]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    qubits: [usize; 2],
    params: [f64; 3],
}

impl Gate {
    /// Builds a gate, checking qubit and parameter arity. Range checks against a
    /// register size happen when the gate is pushed into a [`Circuit`].
    pub fn new(kind: GateKind, qubits: &[usize], params: &[f64]) -> Result<Self> {
        if qubits.len() != kind.num_qubits() {
            return Err(Error::InvalidGate(format!(
                "{} expects {} qubit(s), got {}",
                kind.name(),
                kind.num_qubits(),
                qubits.len()
            )));
        }
        if params.len() != kind.num_params() {
            return Err(Error::InvalidGate(format!(
                "{} expects {} parameter(s), got {}",
                kind.name(),
                kind.num_params(),
                params.len()
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::InvalidGate(format!(
                "{} on repeated qubit {}",
                kind.name(),
                qubits[0]
            )));
        }
        let mut q = [0; 2];
        q[..qubits.len()].copy_from_slice(qubits);
        let mut p = [0.0; 3];
        p[..params.len()].copy_from_slice(params);
        Ok(Self {
            kind,
            qubits: q,
            params: p,
        })
    }

    fn one(kind: GateKind, q: usize, params: &[f64]) -> Self {
        Self::new(kind, &[q], params).expect("single-qubit arity")
    }

    fn two(kind: GateKind, a: usize, b: usize) -> Self {
        Self::new(kind, &[a, b], &[]).expect("two-qubit arity")
    }

    pub fn h(q: usize) -> Self {
        Self::one(GateKind::H, q, &[])
    }
    pub fn x(q: usize) -> Self {
        Self::one(GateKind::X, q, &[])
    }
    pub fn rx(q: usize, theta: f64) -> Self {
        Self::one(GateKind::RX, q, &[theta])
    }
    pub fn ry(q: usize, theta: f64) -> Self {
        Self::one(GateKind::RY, q, &[theta])
    }
    pub fn rz(q: usize, lambda: f64) -> Self {
        Self::one(GateKind::RZ, q, &[lambda])
    }
    pub fn p(q: usize, lambda: f64) -> Self {
        Self::one(GateKind::P, q, &[lambda])
    }
    pub fn u3(q: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        Self::one(GateKind::U3, q, &[theta, phi, lambda])
    }
    /// Panics if `control == target`.
    pub fn cx(control: usize, target: usize) -> Self {
        Self::two(GateKind::CX, control, target)
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::two(GateKind::CZ, a, b)
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self::two(GateKind::SWAP, a, b)
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.num_qubits()]
    }

    pub fn params(&self) -> &[f64] {
        &self.params[..self.kind.num_params()]
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.num_qubits() == 2
    }

    /// The same gate acting on relabelled qubits.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Self {
        let mut g = self.clone();
        for q in g.qubits.iter_mut().take(self.kind.num_qubits()) {
            *q = map(*q);
        }
        g
    }

    pub fn inverse(&self) -> Self {
        let mut g = self.clone();
        match self.kind {
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::P => g.params[0] = -g.params[0],
            GateKind::U3 => {
                let [theta, phi, lambda] = self.params;
                g.params = [-theta, -lambda, -phi];
            }
            _ => {}
        }
        g
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.kind.name())?;
        let qs: Vec<String> = self.qubits().iter().map(|q| q.to_string()).collect();
        write!(f, "{}", qs.join(","))?;
        if !self.params().is_empty() {
            let ps: Vec<String> = self.params().iter().map(|p| fmt_angle(*p)).collect();
            write!(f, " {}", ps.join(","))?;
        }
        Ok(())
    }
}

fn fmt_angle(x: f64) -> String {
    crate::report::format_sig(x, 12)
}

/// Ordered gate list over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateCounts {
    pub total: usize,
    pub two_qubit: usize,
    pub swap: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidCircuit("circuit needs at least one qubit".into()));
        }
        Ok(Self {
            n_qubits,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(n_qubits)?;
        c.gates.reserve(gates.len());
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(&q) = gate.qubits().iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::InvalidGate(format!(
                "qubit {q} out of range for {}-qubit circuit",
                self.n_qubits
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Internal fast path for gates whose indices are known to be in range.
    pub(crate) fn push_unchecked(&mut self, gate: Gate) {
        debug_assert!(gate.qubits().iter().all(|&q| q < self.n_qubits));
        self.gates.push(gate);
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let l = g.qubits().iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for &q in g.qubits() {
                level[q] = l;
            }
            depth = depth.max(l);
        }
        depth
    }

    pub fn count_gates(&self) -> GateCounts {
        let mut counts = GateCounts {
            total: self.gates.len(),
            ..Default::default()
        };
        for g in &self.gates {
            if g.is_two_qubit() {
                counts.two_qubit += 1;
            }
            if g.kind == GateKind::SWAP {
                counts.swap += 1;
            }
        }
        counts
    }

    pub fn inverse(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn compose(&self, other: &Circuit) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let mut gates = Vec::with_capacity(self.len() + other.len());
        gates.extend_from_slice(&self.gates);
        gates.extend_from_slice(&other.gates);
        Ok(Self {
            n_qubits: self.n_qubits,
            gates,
        })
    }

    /// Greedy as-soon-as-possible layering; the slice count always equals [`Circuit::depth`].
    pub fn schedule_asap(&self, durations: &GateDurations) -> Schedule {
        let mut level = vec![0usize; self.n_qubits];
        let mut slices: Vec<Timeslice> = Vec::new();
        for (idx, g) in self.gates.iter().enumerate() {
            let l = g.qubits().iter().map(|&q| level[q]).max().unwrap_or(0);
            for &q in g.qubits() {
                level[q] = l + 1;
            }
            if l == slices.len() {
                slices.push(Timeslice {
                    gate_indices: Vec::new(),
                    duration: 0.0,
                });
            }
            let slice = &mut slices[l];
            slice.gate_indices.push(idx);
            slice.duration = slice.duration.max(durations.of(g));
        }
        let total_time = slices.iter().map(|s| s.duration).sum();
        Schedule { slices, total_time }
    }

    /// One gate per line: `KIND q[,q] [param,...]`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

/// Gate execution times in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateDurations {
    pub t_1q: f64,
    pub t_2q: f64,
}

impl GateDurations {
    pub fn new(t_1q: f64, t_2q: f64) -> Result<Self> {
        if !(t_1q > 0.0 && t_2q > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gate durations must be positive (got {t_1q}, {t_2q})"
            )));
        }
        Ok(Self { t_1q, t_2q })
    }

    pub fn of(&self, gate: &Gate) -> f64 {
        if gate.is_two_qubit() {
            self.t_2q
        } else {
            self.t_1q
        }
    }
}

/// Gates that execute in parallel. `duration` is that of the slowest member.
#[derive(Debug, Clone, PartialEq)]
pub struct Timeslice {
    pub gate_indices: Vec<usize>,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub slices: Vec<Timeslice>,
    pub total_time: f64,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }
}
