//! Analytical per-qubit fidelity under depolarizing gate errors and idle decoherence.
//!
//! Each qubit carries a fidelity that starts at 1. Single-qubit gates apply
//! `F <- (1 - p) F + (1 - p_ent) p / 2`. A two-qubit gate on `(i, j)` reads
//! `S = F_i + F_j`, forms `eta = (sqrt((1 - p) S^2 + p) - sqrt(1 - p) S) / 2` and sets
//! `F_k <- sqrt(1 - p) F_k + (1 - p_ent) eta` for both qubits. After the gates of a
//! timeslice, every qubit is multiplied by `exp(-t / T1) * (exp(-t / T2) + 1) / 2`,
//! where `t` is the slice duration. Circuit fidelity is the product over qubits.

use serde::{Deserialize, Serialize};

use crate::circuit::{GateDurations, GateKind};
use crate::compiler::CompiledCircuit;
use crate::error::{Error, Result};

/// Gate error and timing parameters. Times are in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p1: f64,
    pub p2: f64,
    pub p_ent: f64,
    pub t_1q: f64,
    pub t_2q: f64,
    pub t1: f64,
    pub t2: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            p1: 7.42e-5,
            p2: 7e-4,
            p_ent: 0.0,
            t_1q: 7.9e-9,
            t_2q: 30e-9,
            t1: 1.2e-3,
            t2: 1.16e-3,
        }
    }
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        unit("p1", self.p1)?;
        unit("p2", self.p2)?;
        unit("p_ent", self.p_ent)?;
        for (name, v) in [
            ("t_1q", self.t_1q),
            ("t_2q", self.t_2q),
            ("T1", self.t1),
            ("T2", self.t2),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.t2 > 2.0 * self.t1 {
            return Err(Error::InvalidParameter(format!(
                "T2 ({}) exceeds 2*T1 ({})",
                self.t2,
                2.0 * self.t1
            )));
        }
        Ok(())
    }

    pub fn durations(&self) -> GateDurations {
        GateDurations {
            t_1q: self.t_1q,
            t_2q: self.t_2q,
        }
    }

    /// Divides both error rates and both gate times by `delta`.
    pub fn improved(&self, delta: f64) -> Result<Self> {
        if !(delta >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "improvement factor must be >= 1, got {delta}"
            )));
        }
        Ok(Self {
            p1: self.p1 / delta,
            p2: self.p2 / delta,
            t_1q: self.t_1q / delta,
            t_2q: self.t_2q / delta,
            ..*self
        })
    }

    /// Per-qubit multiplicative decay for an idle or busy slice of length `t`.
    pub fn decoherence_factor(&self, t: f64) -> f64 {
        (-t / self.t1).exp() * 0.5 * ((-t / self.t2).exp() + 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityState {
    fidelities: Vec<f64>,
}

impl FidelityState {
    pub fn new(n: usize) -> Self {
        Self {
            fidelities: vec![1.0; n],
        }
    }

    pub fn from_fidelities(fidelities: Vec<f64>) -> Self {
        Self { fidelities }
    }

    pub fn per_qubit(&self) -> &[f64] {
        &self.fidelities
    }

    pub fn total(&self) -> f64 {
        self.fidelities.iter().product()
    }

    pub fn apply_1q(&mut self, q: usize, params: &NoiseParams) {
        let p = params.p1;
        let f = &mut self.fidelities[q];
        *f = (1.0 - p) * *f + (1.0 - params.p_ent) * p / 2.0;
    }

    pub fn apply_2q(&mut self, qi: usize, qj: usize, params: &NoiseParams) {
        debug_assert_ne!(qi, qj);
        let p = params.p2;
        let keep = (1.0 - p).sqrt();
        let s = self.fidelities[qi] + self.fidelities[qj];
        let eta = 0.5 * (((1.0 - p) * s * s + p).sqrt() - keep * s);
        let shared = (1.0 - params.p_ent) * eta;
        for q in [qi, qj] {
            self.fidelities[q] = keep * self.fidelities[q] + shared;
        }
    }

    pub fn apply_decoherence(&mut self, t_layer: f64, params: &NoiseParams) {
        let factor = params.decoherence_factor(t_layer);
        for f in self.fidelities.iter_mut() {
            *f *= factor;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityResult {
    pub total: f64,
    pub per_qubit: Vec<f64>,
    pub total_time: f64,
}

/// Evolves the per-qubit fidelities slice by slice over the ASAP schedule.
pub fn estimate_fidelity(compiled: &CompiledCircuit, params: &NoiseParams) -> Result<FidelityResult> {
    let circuit = &compiled.circuit;
    if let Some(g) = circuit
        .gates()
        .iter()
        .find(|g| !matches!(g.kind, GateKind::U3 | GateKind::CX))
    {
        return Err(Error::NonBasisGate(g.kind.name()));
    }
    let schedule = circuit.schedule_asap(&params.durations());
    let mut state = FidelityState::new(circuit.n_qubits());
    for slice in &schedule.slices {
        for &i in &slice.gate_indices {
            let g = &circuit.gates()[i];
            match g.qubits() {
                [q] => state.apply_1q(*q, params),
                [a, b] => state.apply_2q(*a, *b, params),
                _ => unreachable!("gates act on one or two qubits"),
            }
        }
        state.apply_decoherence(slice.duration, params);
    }
    Ok(FidelityResult {
        total: state.total(),
        per_qubit: state.fidelities,
        total_time: schedule.total_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn single_qubit_update() {
        let params = NoiseParams::default();
        let mut s = FidelityState::new(1);
        s.apply_1q(0, &params);
        // 1 - p/2 evaluated at 50 digits
        assert!(rel(s.per_qubit()[0], 0.9999629) < 1e-12);

        let correlated = NoiseParams {
            p_ent: 1.0,
            ..params
        };
        let mut s = FidelityState::new(1);
        s.apply_1q(0, &correlated);
        assert_eq!(s.per_qubit()[0], 1.0 - 7.42e-5);

        let clean = NoiseParams { p1: 0.0, ..params };
        let mut s = FidelityState::new(1);
        s.apply_1q(0, &clean);
        assert_eq!(s.per_qubit()[0], 1.0);
    }

    #[test]
    fn two_qubit_update() {
        let params = NoiseParams::default();
        let mut s = FidelityState::new(2);
        s.apply_2q(0, 1, &params);
        let expected = 0.999_737_465_537_828_086_051_942_121_551_733_954_655_488_f64;
        assert!(rel(s.per_qubit()[0], expected) < 1e-12);
        assert!(rel(s.per_qubit()[1], expected) < 1e-12);
        assert!(rel(s.total(), 0.999475) < 1e-12);

        // unequal inputs, both read before the update
        let mut s = FidelityState::from_fidelities(vec![0.9, 0.8]);
        s.apply_2q(0, 1, &params);
        assert!(rel(s.per_qubit()[0], 0.899_787_915_841_249_655_430_637_571_709_539_983_594_f64) < 1e-12);
        assert!(rel(s.per_qubit()[1], 0.799_822_921_968_394_343_781_070_383_098_101_551_555_f64) < 1e-12);

        let mut s = FidelityState::new(2);
        s.apply_2q(0, 1, &NoiseParams { p2: 0.0, ..params });
        assert_eq!(s.per_qubit(), &[1.0, 1.0]);

        let mut s = FidelityState::new(2);
        s.apply_2q(0, 1, &NoiseParams { p_ent: 1.0, ..params });
        assert_eq!(s.per_qubit()[0], (1.0f64 - 7e-4).sqrt());
    }

    #[test]
    fn decoherence_update() {
        let params = NoiseParams::default();
        let mut s = FidelityState::new(3);
        s.apply_decoherence(0.0, &params);
        assert_eq!(s.per_qubit(), &[1.0; 3]);
        s.apply_decoherence(30e-9, &params);
        let expected = 0.999_962_069_768_492_489_504_100_216_495_768_369_780_595_f64;
        assert!(s.per_qubit().iter().all(|&f| rel(f, expected) < 1e-12));

        let frozen = NoiseParams {
            t1: f64::INFINITY,
            t2: f64::INFINITY,
            ..params
        };
        let mut s = FidelityState::new(2);
        s.apply_decoherence(1.0, &frozen);
        assert_eq!(s.per_qubit(), &[1.0, 1.0]);
    }

    #[test]
    fn whole_circuit_estimates() {
        use crate::circuit::{Circuit, Gate};
        use crate::compiler::{Layout, ResourceMetrics};

        let wrap = |c: Circuit| CompiledCircuit {
            initial_layout: Layout::trivial(c.n_qubits(), c.n_qubits()).unwrap(),
            final_layout: Layout::trivial(c.n_qubits(), c.n_qubits()).unwrap(),
            circuit: c,
            metrics: ResourceMetrics::new(0, 0, 0, 0, 0),
        };
        let params = NoiseParams::default();
        let empty = estimate_fidelity(&wrap(Circuit::new(3).unwrap()), &params).unwrap();
        assert_eq!(empty.total, 1.0);

        let one = Circuit::from_gates(10, vec![Gate::u3(0, 0.1, 0.2, 0.3)]).unwrap();
        let r = estimate_fidelity(&wrap(one), &params).unwrap();
        // (1 - p1/2) * d^10 with d the 7.9 ns decay factor, 50-digit evaluation
        assert!(rel(r.total, 0.999_863_023_694_393_619_220_442_091_361_836_000_83_f64) < 1e-12);
        assert!(rel(r.total, r.per_qubit.iter().product()) < 1e-12);
        assert!(rel(r.total_time, 7.9e-9) < 1e-15);

        let h = Circuit::from_gates(1, vec![Gate::h(0)]).unwrap();
        assert!(matches!(estimate_fidelity(&wrap(h), &params), Err(Error::NonBasisGate("H"))));
    }

    #[test]
    fn improvement() {
        let base = NoiseParams::default();
        assert_eq!(base.improved(1.0).unwrap(), base);
        let better = base.improved(100.0).unwrap();
        assert!(rel(better.p2, 7e-6) < 1e-15);
        assert!(rel(better.t_2q, 0.3e-9) < 1e-15);
        assert_eq!((better.t1, better.t2, better.p_ent), (base.t1, base.t2, base.p_ent));
        assert!(base.improved(0.5).is_err());
    }

    #[test]
    fn validation() {
        assert!(NoiseParams::default().validate().is_ok());
        assert!(NoiseParams { p2: 1.5, ..Default::default() }.validate().is_err());
        assert!(NoiseParams { t2: 3e-3, ..Default::default() }.validate().is_err());
        assert!(NoiseParams { t_1q: 0.0, ..Default::default() }.validate().is_err());
    }
}
