use nisq_scaling::analysis::{fit_stretched_exponential, n_threshold, StretchedExpFit};
use nisq_scaling::circuit::GateDurations;
use nisq_scaling::compiler::{decompose_to_basis, optimize, sabre_route, Layout};
use nisq_scaling::generators::kernel_circuit;
use nisq_scaling::oracle::{random_circuit, simulate_unitary};
use nisq_scaling::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn circuit_from(seed: u64, n: usize, len: usize) -> Circuit {
    random_circuit(&mut ChaCha8Rng::seed_from_u64(seed), n, len)
}

fn topology() -> impl Strategy<Value = TopologyKind> {
    prop::sample::select(TopologyKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_is_an_involution(seed in any::<u64>(), n in 1usize..8, len in 0usize..60) {
        let c = circuit_from(seed, n, len);
        prop_assert_eq!(c.inverse().inverse(), c);
    }

    #[test]
    fn depth_is_subadditive(a in any::<u64>(), b in any::<u64>(), n in 2usize..8, la in 0usize..40, lb in 0usize..40) {
        let x = circuit_from(a, n, la);
        let y = circuit_from(b, n, lb);
        prop_assert!(x.compose(&y).unwrap().depth() <= x.depth() + y.depth());
    }

    #[test]
    fn schedule_partitions_gates_into_depth_slices(seed in any::<u64>(), n in 1usize..8, len in 0usize..60) {
        let c = circuit_from(seed, n, len);
        let s = c.schedule_asap(&GateDurations::new(7.9e-9, 30e-9).unwrap());
        prop_assert_eq!(s.len(), c.depth());
        let mut seen = vec![false; c.len()];
        for slice in &s.slices {
            let mut busy = vec![false; n];
            for &i in &slice.gate_indices {
                prop_assert!(!seen[i]);
                seen[i] = true;
                for &q in c.gates()[i].qubits() {
                    prop_assert!(!busy[q]);
                    busy[q] = true;
                }
            }
        }
        prop_assert!(seen.into_iter().all(|s| s));
        let total: f64 = s.slices.iter().map(|sl| sl.duration).sum();
        prop_assert!((total - s.total_time).abs() <= 1e-18);
    }

    #[test]
    fn routing_respects_coupling_and_accounts_for_every_gate(seed in any::<u64>(), n in 2usize..12, len in 1usize..80, kind in topology()) {
        let c = decompose_to_basis(&circuit_from(seed, n, len));
        let device = Device::new(kind, n).unwrap();
        let layout = Layout::trivial(n, n).unwrap();
        let routed = sabre_route(&c, &device, &layout, &SabreConfig::default()).unwrap();
        prop_assert_eq!(routed.circuit.len(), c.len() + routed.swap_count);
        let expanded = decompose_to_basis(&routed.circuit);
        prop_assert_eq!(expanded.len(), c.len() + 3 * routed.swap_count);
        for g in routed.circuit.gates().iter().filter(|g| g.is_two_qubit()) {
            prop_assert!(device.graph().contains_edge(g.qubits()[0], g.qubits()[1]));
        }
        let compiled = compile(&c, &device, &SabreConfig::default()).unwrap();
        prop_assert!(compiled.respects(&device));
    }

    #[test]
    fn optimization_preserves_the_unitary_and_never_grows(seed in any::<u64>(), n in 1usize..5, len in 0usize..50) {
        let c = decompose_to_basis(&circuit_from(seed, n, len));
        let o = optimize(&c);
        prop_assert!(o.len() <= c.len());
        prop_assert!(o.depth() <= c.depth());
        prop_assert!(o.count_gates().two_qubit <= c.count_gates().two_qubit);
        let (u, v) = (simulate_unitary(&c).unwrap(), simulate_unitary(&o).unwrap());
        prop_assert!(u.equal_up_to_phase(&v, 1e-9));
    }

    #[test]
    fn kernel_with_equal_inputs_is_identity(n in 2usize..6, raw in prop::collection::vec(0.0f64..6.283, 5), s in prop::sample::select(EntanglementStrategy::ALL.to_vec())) {
        let x = &raw[..n];
        let k = kernel_circuit(n, s, x, x).unwrap();
        let id = simulate_unitary(&Circuit::new(n).unwrap()).unwrap();
        prop_assert!(simulate_unitary(&k).unwrap().equal_up_to_phase(&id, 1e-9));
    }

    #[test]
    fn fit_round_trip(lambda in 10.0f64..1000.0, beta in 0.5f64..3.0) {
        let truth = StretchedExpFit { lambda, beta, r_squared: 1.0, points_used: 0 };
        let points: Vec<(f64, f64)> = (0..10)
            .map(|k| lambda * 2f64.powf((k as f64 - 5.0) / 2.0))
            .map(|n| (n, truth.eval(n)))
            .collect();
        let fit = fit_stretched_exponential(&points).unwrap();
        prop_assert!((fit.lambda / lambda - 1.0).abs() < 1e-6);
        prop_assert!((fit.beta / beta - 1.0).abs() < 1e-6);
    }

    #[test]
    fn threshold_is_monotone_in_target(lambda in 10.0f64..1000.0, beta in 0.5f64..3.0, a in 0.01f64..0.999, b in 0.01f64..0.999) {
        let fit = StretchedExpFit { lambda, beta, r_squared: 1.0, points_used: 10 };
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(n_threshold(&fit, hi).unwrap() <= n_threshold(&fit, lo).unwrap());
    }

    #[test]
    fn appending_a_gate_never_raises_fidelity(seed in any::<u64>(), n in 2usize..8, len in 1usize..60, kind in topology(), pick in any::<prop::sample::Index>(), twoq in any::<bool>()) {
        let c = circuit_from(seed, n, len);
        let device = Device::new(kind, n).unwrap();
        let compiled = compile(&c, &device, &SabreConfig::default()).unwrap();
        let params = NoiseParams::default();
        let before = estimate_fidelity(&compiled, &params).unwrap().total;

        let mut longer = compiled.clone();
        let gate = if twoq {
            let (a, b) = *pick.get(device.graph().edges());
            Gate::cx(a, b)
        } else {
            Gate::u3(pick.index(n), 0.3, 0.1, -0.2)
        };
        longer.circuit.push(gate).unwrap();
        let after = estimate_fidelity(&longer, &params).unwrap().total;
        prop_assert!(after <= before);
    }

    #[test]
    fn fidelity_is_monotone_in_improvement(seed in any::<u64>(), n in 2usize..8, len in 1usize..60, kind in topology(), d1 in 1.0f64..100.0, d2 in 1.0f64..100.0) {
        let c = circuit_from(seed, n, len);
        let compiled = compile(&c, &Device::new(kind, n).unwrap(), &SabreConfig::default()).unwrap();
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let base = NoiseParams::default();
        let f_lo = estimate_fidelity(&compiled, &base.improved(lo).unwrap()).unwrap();
        let f_hi = estimate_fidelity(&compiled, &base.improved(hi).unwrap()).unwrap();
        prop_assert!(f_hi.total >= f_lo.total);
        prop_assert!((0.0..=1.0).contains(&f_lo.total));
    }

    #[test]
    fn distances_form_a_metric(n in 2usize..40, kind in topology()) {
        let g = CouplingGraph::build(kind, n).unwrap();
        let d = g.distance_matrix().unwrap();
        for a in 0..n {
            prop_assert_eq!(d.get(a, a), 0);
            for b in 0..n {
                prop_assert_eq!(d.get(a, b), d.get(b, a));
                prop_assert_eq!(d.get(a, b) == 1, g.contains_edge(a, b));
                for c in 0..n {
                    prop_assert!(d.get(a, c) <= d.get(a, b) + d.get(b, c));
                }
            }
        }
    }
}
