//! Dense unitary simulation for small circuits, used to check compiler output.
//!
//! Qubit 0 is the least-significant bit of the basis-state index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::compiler::{compile, CompiledCircuit, Device, Layout, SabreConfig};
use crate::error::{Error, Result};
use crate::matrix::{self, C64};
use crate::topology::TopologyKind;

pub const MAX_QUBITS: usize = 6;

/// Column-major `2^n x 2^n` complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseUnitary {
    n_qubits: usize,
    dim: usize,
    data: Vec<C64>,
}

impl DenseUnitary {
    pub fn identity(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::OracleTooLarge {
                got: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let dim = 1 << n_qubits;
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0, 0.0);
        }
        Ok(Self {
            n_qubits,
            dim,
            data,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at row `r`, column `c`.
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[c * self.dim + r]
    }

    fn column_mut(&mut self, c: usize) -> &mut [C64] {
        &mut self.data[c * self.dim..(c + 1) * self.dim]
    }

    /// Left-multiplies by `gate`.
    fn apply(&mut self, gate: &Gate) {
        for c in 0..self.dim {
            apply_to_state(self.column_mut(c), gate);
        }
    }

    /// Maximum deviation of `U U^dagger` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..self.dim {
                    acc += self.get(i, k) * self.get(j, k).conj();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }

    /// Equality up to a single global phase, entrywise within `tol`.
    pub fn equal_up_to_phase(&self, other: &DenseUnitary, tol: f64) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let (idx, _) = self
            .data
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("non-empty matrix");
        if other.data[idx].norm() < 1e-6 {
            return false;
        }
        let phase = self.data[idx] / other.data[idx];
        let phase = phase / phase.norm();
        self.data
            .iter()
            .zip(&other.data)
            .all(|(a, b)| (a - phase * b).norm() <= tol)
    }

    /// Left-multiplies by the relabeling that moves bit `q` to bit `perm[q]`.
    fn permuted_rows(&self, perm: &[usize]) -> Self {
        let mut out = self.clone();
        for r in 0..self.dim {
            let mut target = 0;
            for (q, &p) in perm.iter().enumerate() {
                if r >> q & 1 == 1 {
                    target |= 1 << p;
                }
            }
            for c in 0..self.dim {
                out.data[c * self.dim + target] = self.data[c * self.dim + r];
            }
        }
        out
    }

    /// Right-multiplies by the inverse of the relabeling used in
    /// [`DenseUnitary::permuted_rows`].
    fn permuted_columns(&self, perm: &[usize]) -> Self {
        let mut out = self.clone();
        for c in 0..self.dim {
            let mut source = 0;
            for (q, &p) in perm.iter().enumerate() {
                if c >> p & 1 == 1 {
                    source |= 1 << q;
                }
            }
            let dim = self.dim;
            out.data[c * dim..(c + 1) * dim].copy_from_slice(&self.data[source * dim..(source + 1) * dim]);
        }
        out
    }
}

/// Applies `gate` to a state vector in place.
pub fn apply_to_state(state: &mut [C64], gate: &Gate) {
    if let Some(m) = matrix::single_qubit(gate) {
        let bit = 1 << gate.qubits()[0];
        for i in 0..state.len() {
            if i & bit == 0 {
                let (a, b) = (state[i], state[i | bit]);
                state[i] = m[0][0] * a + m[0][1] * b;
                state[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
        return;
    }
    let (qa, qb) = (gate.qubits()[0], gate.qubits()[1]);
    let (ba, bb) = (1 << qa, 1 << qb);
    match gate.kind {
        GateKind::CX => {
            for i in 0..state.len() {
                if i & ba != 0 && i & bb == 0 {
                    state.swap(i, i | bb);
                }
            }
        }
        GateKind::CZ => {
            for (i, amp) in state.iter_mut().enumerate() {
                if i & ba != 0 && i & bb != 0 {
                    *amp = -*amp;
                }
            }
        }
        GateKind::SWAP => {
            for i in 0..state.len() {
                if i & ba != 0 && i & bb == 0 {
                    state.swap(i, (i & !ba) | bb);
                }
            }
        }
        _ => unreachable!("single-qubit kinds handled above"),
    }
}

pub fn simulate_unitary(circuit: &Circuit) -> Result<DenseUnitary> {
    let mut u = DenseUnitary::identity(circuit.n_qubits())?;
    for g in circuit.gates() {
        u.apply(g);
    }
    Ok(u)
}

/// Checks `P_final^dagger U_compiled P_initial == U_original` up to global phase.
///
/// The original circuit is widened with idle qubits when the device is larger.
pub fn equivalent_up_to_layout(original: &Circuit, compiled: &CompiledCircuit, tol: f64) -> Result<bool> {
    let n = compiled.circuit.n_qubits();
    if n > MAX_QUBITS || original.n_qubits() > MAX_QUBITS {
        return Err(Error::OracleTooLarge {
            got: n.max(original.n_qubits()),
            max: MAX_QUBITS,
        });
    }
    let widened = Circuit::from_gates(n, original.gates().to_vec())?;
    let expected = simulate_unitary(&widened)?;
    let actual = simulate_unitary(&compiled.circuit)?;
    let virtualized = pull_back(&actual, &compiled.initial_layout, &compiled.final_layout);
    Ok(virtualized.equal_up_to_phase(&expected, tol))
}

/// Expresses a physical-qubit unitary in virtual-qubit coordinates.
fn pull_back(physical: &DenseUnitary, initial: &Layout, final_layout: &Layout) -> DenseUnitary {
    // U_virtual = P_final^dagger U_physical P_initial, where P_L maps virtual basis
    // states onto physical ones via L.
    let rows = physical.permuted_rows(final_layout.inverse().virtual_to_physical());
    rows.permuted_columns(initial.inverse().virtual_to_physical())
}

/// Summary of a batch of random compile-and-compare checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfTestReport {
    pub circuits: usize,
    pub equivalent: usize,
    pub coupling_respected: usize,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.equivalent == self.circuits && self.coupling_respected == self.circuits
    }
}

/// Random circuit over every gate kind, `n` qubits, `len` gates.
pub fn random_circuit(rng: &mut impl Rng, n: usize, len: usize) -> Circuit {
    use std::f64::consts::PI;
    let mut c = Circuit::new(n).expect("n >= 1");
    let kinds = [
        GateKind::H,
        GateKind::X,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::P,
        GateKind::U3,
        GateKind::CX,
        GateKind::CZ,
        GateKind::SWAP,
    ];
    while c.len() < len {
        let kind = kinds[rng.gen_range(0..kinds.len())];
        if kind.num_qubits() == 2 && n < 2 {
            continue;
        }
        let a = rng.gen_range(0..n);
        let qubits = if kind.num_qubits() == 2 {
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            vec![a, b]
        } else {
            vec![a]
        };
        let params: Vec<f64> = (0..kind.num_params()).map(|_| rng.gen_range(-PI..PI)).collect();
        c.push(Gate::new(kind, &qubits, &params).expect("arity matches"))
            .expect("qubits in range");
    }
    c
}

/// Compiles `per_topology` random circuits on each topology and checks equivalence
/// and coupling. Circuit sizes range over 2..=5 qubits.
pub fn self_test(per_topology: usize, seed: u64, cfg: &SabreConfig) -> Result<SelfTestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SelfTestReport {
        circuits: 0,
        equivalent: 0,
        coupling_respected: 0,
    };
    for kind in TopologyKind::ALL {
        for _ in 0..per_topology {
            let n = rng.gen_range(2..=5);
            let len = rng.gen_range(1..=40);
            let c = random_circuit(&mut rng, n, len);
            let device = Device::new(kind, n)?;
            let compiled = compile(&c, &device, cfg)?;
            report.circuits += 1;
            if equivalent_up_to_layout(&c, &compiled, 1e-7)? {
                report.equivalent += 1;
            }
            if compiled.respects(&device) {
                report.coupling_respected += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{decompose_to_basis, ResourceMetrics};

    fn circ(n: usize, gates: Vec<Gate>) -> Circuit {
        Circuit::from_gates(n, gates).unwrap()
    }

    #[test]
    fn hadamard_squared_is_identity() {
        let u = simulate_unitary(&circ(1, vec![Gate::h(0), Gate::h(0)])).unwrap();
        let id = DenseUnitary::identity(1).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert!((u.get(r, c) - id.get(r, c)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cx_matrix_convention() {
        // control is qubit 0 = least-significant bit: |01> <-> |11> in index terms 1 <-> 3
        let u = simulate_unitary(&circ(2, vec![Gate::cx(0, 1)])).unwrap();
        let expected_col = [0, 3, 2, 1];
        for (c, &r) in expected_col.iter().enumerate() {
            assert!((u.get(r, c).re - 1.0).abs() < 1e-15);
        }
        // in big-endian labels (q1 q0) this is |01>->|11>; with q1 as control it would
        // be |10> <-> |11>
        let u = simulate_unitary(&circ(2, vec![Gate::cx(1, 0)])).unwrap();
        assert!((u.get(3, 2).re - 1.0).abs() < 1e-15);
        assert!((u.get(2, 3).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn too_large() {
        assert!(matches!(
            simulate_unitary(&Circuit::new(7).unwrap()),
            Err(Error::OracleTooLarge { got: 7, max: 6 })
        ));
    }

    #[test]
    fn every_rewrite_rule_preserves_the_unitary() {
        let gates = [
            Gate::h(0),
            Gate::x(1),
            Gate::rx(0, 0.37),
            Gate::ry(1, -1.1),
            Gate::rz(0, 2.2),
            Gate::p(1, 0.9),
            Gate::u3(0, 0.3, -0.2, 1.7),
            Gate::cx(0, 1),
            Gate::cx(1, 0),
            Gate::cz(0, 1),
            Gate::swap(0, 1),
        ];
        for g in gates {
            let c = circ(2, vec![g.clone()]);
            let a = simulate_unitary(&c).unwrap();
            let b = simulate_unitary(&decompose_to_basis(&c)).unwrap();
            assert!(a.equal_up_to_phase(&b, 1e-12), "{g}");
        }
    }

    #[test]
    fn unitarity_of_random_circuits() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=5 {
            let c = random_circuit(&mut rng, n, 30);
            assert!(simulate_unitary(&c).unwrap().unitarity_error() < 1e-9);
        }
    }

    #[test]
    fn ghz_statevector() {
        let c = crate::generators::ghz_circuit(3).unwrap();
        let mut state = vec![C64::new(0.0, 0.0); 8];
        state[0] = C64::new(1.0, 0.0);
        for g in c.gates() {
            apply_to_state(&mut state, g);
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (i, amp) in state.iter().enumerate() {
            let want = if i == 0 || i == 7 { h } else { 0.0 };
            assert!((amp.re - want).abs() < 1e-12 && amp.im.abs() < 1e-12);
        }
    }

    fn uncompiled(c: &Circuit) -> CompiledCircuit {
        let id = Layout::trivial(c.n_qubits(), c.n_qubits()).unwrap();
        CompiledCircuit {
            circuit: c.clone(),
            initial_layout: id.clone(),
            final_layout: id,
            metrics: ResourceMetrics::new(0, 0, 0, 0, 0),
        }
    }

    #[test]
    fn equivalence_is_reflexive_and_phase_blind() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = random_circuit(&mut rng, 4, 25);
        assert!(equivalent_up_to_layout(&c, &uncompiled(&c), 1e-7).unwrap());
        // RZ vs P differ by a global phase only
        let a = circ(1, vec![Gate::rz(0, 0.7)]);
        let b = circ(1, vec![Gate::p(0, 0.7)]);
        assert!(equivalent_up_to_layout(&a, &uncompiled(&b), 1e-7).unwrap());
    }

    #[test]
    fn routed_cx_is_equivalent_and_mutation_is_caught() {
        let c = circ(4, vec![Gate::h(0), Gate::cx(0, 3), Gate::ry(3, 0.4)]);
        let dev = Device::new(TopologyKind::Linear, 4).unwrap();
        let compiled = compile(&c, &dev, &SabreConfig::default()).unwrap();
        assert_eq!(compiled.metrics.swap_count, 2);
        assert!(equivalent_up_to_layout(&c, &compiled, 1e-7).unwrap());

        let mut broken = compiled.clone();
        let mut gates = broken.circuit.gates().to_vec();
        let drop = gates.iter().position(|g| g.kind == GateKind::CX).unwrap();
        gates.remove(drop);
        broken.circuit = Circuit::from_gates(4, gates).unwrap();
        assert!(!equivalent_up_to_layout(&c, &broken, 1e-7).unwrap());
    }

    #[test]
    fn small_self_test_passes() {
        let report = self_test(10, 1, &SabreConfig::default()).unwrap();
        assert_eq!(report.circuits, 40);
        assert!(report.passed(), "{report:?}");
    }
}
