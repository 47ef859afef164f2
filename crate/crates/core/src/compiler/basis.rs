//! Rewriting into the `{U3, CX}` basis and peephole cleanup.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::matrix::{self, Mat2};

/// Threshold below which a merged single-qubit run is treated as the identity.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Rewrites every gate into `U3` and `CX`. Global phases are discarded.
pub fn decompose_to_basis(circuit: &Circuit) -> Circuit {
    let mut out = Circuit::new(circuit.n_qubits()).expect("non-empty register");
    for g in circuit.gates() {
        let q = g.qubits();
        let p = g.params();
        match g.kind {
            GateKind::U3 | GateKind::CX => out.push_unchecked(g.clone()),
            GateKind::H => out.push_unchecked(Gate::u3(q[0], FRAC_PI_2, 0.0, PI)),
            GateKind::X => out.push_unchecked(Gate::u3(q[0], PI, 0.0, PI)),
            GateKind::RX => out.push_unchecked(Gate::u3(q[0], p[0], -FRAC_PI_2, FRAC_PI_2)),
            GateKind::RY => out.push_unchecked(Gate::u3(q[0], p[0], 0.0, 0.0)),
            GateKind::RZ | GateKind::P => out.push_unchecked(Gate::u3(q[0], 0.0, 0.0, p[0])),
            GateKind::SWAP => {
                out.push_unchecked(Gate::cx(q[0], q[1]));
                out.push_unchecked(Gate::cx(q[1], q[0]));
                out.push_unchecked(Gate::cx(q[0], q[1]));
            }
            GateKind::CZ => {
                out.push_unchecked(Gate::u3(q[1], FRAC_PI_2, 0.0, PI));
                out.push_unchecked(Gate::cx(q[0], q[1]));
                out.push_unchecked(Gate::u3(q[1], FRAC_PI_2, 0.0, PI));
            }
        }
    }
    out
}

/// Merges runs of single-qubit gates into one `U3` (dropping identities) and cancels
/// back-to-back identical `CX` pairs, repeating until neither rule applies.
///
/// Works in one pass: every wire keeps a stack of emitted gates plus a pending
/// single-qubit product. When a `CX` pair cancels, the `U3`s that become exposed at
/// the top of either wire are pulled back into the pending product so they can merge
/// with whatever follows.
pub fn optimize(circuit: &Circuit) -> Circuit {
    let n = circuit.n_qubits();
    let mut out: Vec<Option<Gate>> = Vec::with_capacity(circuit.len());
    let mut wire: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut pending: Vec<Option<Mat2>> = vec![None; n];

    let flush = |q: usize,
                 pending: &mut Vec<Option<Mat2>>,
                 out: &mut Vec<Option<Gate>>,
                 wire: &mut Vec<Vec<usize>>| {
        if let Some(m) = pending[q].take() {
            if !matrix::is_identity_up_to_phase(&m, IDENTITY_TOL) {
                let (t, p, l) = matrix::zyz_angles(&m);
                wire[q].push(out.len());
                out.push(Some(Gate::u3(q, t, p, l)));
            }
        }
    };

    for g in circuit.gates() {
        if let Some(m) = matrix::single_qubit(g) {
            let q = g.qubits()[0];
            pending[q] = Some(match pending[q] {
                Some(acc) => matrix::mul(&m, &acc),
                None => m,
            });
            continue;
        }
        let (a, b) = (g.qubits()[0], g.qubits()[1]);
        flush(a, &mut pending, &mut out, &mut wire);
        flush(b, &mut pending, &mut out, &mut wire);
        let top = |q: usize| wire[q].last().copied();
        let cancels = g.kind == GateKind::CX
            && matches!((top(a), top(b)), (Some(i), Some(j)) if i == j
                && out[i].as_ref().is_some_and(|prev| prev.kind == GateKind::CX && prev.qubits() == g.qubits()));
        if cancels {
            let i = wire[a].pop().expect("checked above");
            wire[b].pop();
            out[i] = None;
            for q in [a, b] {
                if let Some(&j) = wire[q].last() {
                    if out[j].as_ref().is_some_and(|prev| prev.kind == GateKind::U3) {
                        let prev = out[j].take().expect("checked above");
                        pending[q] = matrix::single_qubit(&prev);
                        wire[q].pop();
                    }
                }
            }
        } else {
            wire[a].push(out.len());
            wire[b].push(out.len());
            out.push(Some(g.clone()));
        }
    }
    for q in 0..n {
        flush(q, &mut pending, &mut out, &mut wire);
    }

    let mut result = Circuit::new(n).expect("non-empty register");
    for g in out.into_iter().flatten() {
        result.push_unchecked(g);
    }
    result
}
