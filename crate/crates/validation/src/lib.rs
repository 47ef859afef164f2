//! Trend-level acceptance checks. Each check returns an [`Outcome`] rather than
//! panicking so a runner can report every criterion in one pass.

use std::fmt;

use nisq_scaling::analysis::{
    fidelity_sweep, fit_stretched_exponential, linear_fit, n_threshold, power_law_exponent,
    resource_sweep, tech_gap_sweep, ResourceRow, StretchedExpFit, SweepSpec, TechGapRow,
};
use nisq_scaling::noise::FidelityState;
use nisq_scaling::oracle::{random_circuit, self_test};
use nisq_scaling::{
    compile, estimate_fidelity, CircuitFamily, Device, EntanglementStrategy, Gate, NoiseParams,
    SabreConfig, TopologyKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(id: u8, title: &'static str, failures: Vec<String>, summary: String) -> Self {
        let passed = failures.is_empty();
        let detail = if passed {
            summary
        } else {
            format!("{summary}; failing: {}", failures.join("; "))
        };
        Self {
            id,
            title,
            passed,
            detail,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} [{verdict}] {}: {}", self.id, self.title, self.detail)
    }
}

fn is_pairwise(f: CircuitFamily) -> bool {
    f.strategy() == Some(EntanglementStrategy::Pairwise)
}

fn series<'a>(rows: &'a [ResourceRow], f: CircuitFamily, t: TopologyKind) -> Vec<&'a ResourceRow> {
    rows.iter().filter(|r| r.family == f && r.topology == t).collect()
}

fn at(rows: &[&ResourceRow], n: usize) -> ResourceRow {
    (*rows.iter().find(|r| r.n_qubits == n).expect("size present in sweep")).clone()
}

/// Reference resource sweep: every family on every topology at the reference sizes.
pub fn reference_resources() -> Vec<ResourceRow> {
    resource_sweep(&SweepSpec::resources()).expect("reference sweep compiles")
}

pub fn ring_zero_overhead(rows: &[ResourceRow]) -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for f in CircuitFamily::ALL.into_iter().filter(|&f| f != CircuitFamily::Ttn) {
        let s = series(rows, f, TopologyKind::Ring);
        for n in [100, 500, 1000] {
            checked += 1;
            let swaps = at(&s, n).metrics.swap_count;
            if swaps != 0 {
                failures.push(format!("{f} n={n} swaps={swaps}"));
            }
        }
    }
    Outcome::new(1, "ring has no swap overhead", failures, format!("{checked} circuits checked"))
}

pub fn linear_resource_scaling(rows: &[ResourceRow]) -> Outcome {
    let mut failures = Vec::new();
    let mut gammas = Vec::new();
    for f in CircuitFamily::ALL {
        for t in TopologyKind::ALL {
            let s = series(rows, f, t);
            let xs: Vec<f64> = s.iter().map(|r| r.n_qubits as f64).collect();
            let ys: Vec<f64> = s.iter().map(|r| r.metrics.swap_count as f64).collect();
            if f == CircuitFamily::Ttn {
                if !matches!(t, TopologyKind::Linear | TopologyKind::Ring) {
                    continue;
                }
                let g = power_law_exponent(&xs, &ys).map(|l| l.slope).unwrap_or(f64::NAN);
                gammas.push(g);
                if !(g > 1.2) {
                    failures.push(format!("{f}/{t} gamma={g:.3} (need > 1.2)"));
                }
                continue;
            }
            if ys.iter().all(|&y| y == 0.0) {
                continue;
            }
            let g = power_law_exponent(&xs, &ys).map(|l| l.slope).unwrap_or(f64::NAN);
            gammas.push(g);
            if !(0.8..=1.2).contains(&g) {
                failures.push(format!("{f}/{t} gamma={g:.3} (need [0.8, 1.2])"));
            }
        }
    }
    let lo = gammas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = gammas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Outcome::new(
        2,
        "swap count scales linearly except TTN",
        failures,
        format!("{} series fitted, gamma in [{lo:.3}, {hi:.3}]", gammas.len()),
    )
}

pub fn pairwise_kernel_constant_depth(rows: &[ResourceRow]) -> Outcome {
    let f = CircuitFamily::Kernel(EntanglementStrategy::Pairwise);
    let mut failures = Vec::new();
    let mut seen = Vec::new();
    for t in [TopologyKind::Linear, TopologyKind::Ring] {
        let s = series(rows, f, t);
        let (small, large) = (at(&s, 100).metrics.depth_post, at(&s, 1000).metrics.depth_post);
        let ratio = large as f64 / small as f64;
        seen.push(format!("{t} {small}->{large}"));
        if (ratio - 1.0).abs() > 0.05 {
            failures.push(format!("{t} ratio {ratio:.3}"));
        }
    }
    Outcome::new(3, "kernel-pairwise depth is size independent", failures, seen.join(", "))
}

pub fn ttn_depth_becomes_linear(rows: &[ResourceRow]) -> Outcome {
    let s = series(rows, CircuitFamily::Ttn, TopologyKind::Linear);
    let (a, b) = (at(&s, 512), at(&s, 1024));
    let pre = b.metrics.depth_pre as f64 / a.metrics.depth_pre as f64;
    let post = b.metrics.depth_post as f64 / a.metrics.depth_post as f64;
    let mut failures = Vec::new();
    if pre > 1.2 {
        failures.push(format!("pre ratio {pre:.3} > 1.2"));
    }
    if !(1.6..=2.4).contains(&post) {
        failures.push(format!("post ratio {post:.3} outside [1.6, 2.4]"));
    }
    Outcome::new(
        4,
        "TTN depth is logarithmic before and linear after compilation",
        failures,
        format!("depth(1024)/depth(512) pre {pre:.3}, post {post:.3}"),
    )
}

pub fn compiler_soundness() -> Outcome {
    let report = self_test(200, 2024, &SabreConfig::default()).expect("self test runs");
    let mut failures = Vec::new();
    if report.circuits < 800 {
        failures.push(format!("only {} circuits", report.circuits));
    }
    if report.equivalent != report.circuits {
        failures.push(format!("{} not equivalent", report.circuits - report.equivalent));
    }
    if report.coupling_respected != report.circuits {
        failures.push(format!("{} off-coupling", report.circuits - report.coupling_respected));
    }
    Outcome::new(
        5,
        "compiled circuits are equivalent and coupling-respecting",
        failures,
        format!(
            "{} circuits, {} equivalent, {} on coupling edges",
            report.circuits, report.equivalent, report.coupling_respected
        ),
    )
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

pub fn fidelity_model_checks() -> Outcome {
    let params = NoiseParams::default();
    let mut failures = Vec::new();
    let mut check = |name: &str, got: f64, want: f64| {
        if rel(got, want) >= 1e-12 {
            failures.push(format!("{name}: {got:.17} vs {want:.17}"));
        }
    };

    let mut s = FidelityState::new(1);
    s.apply_1q(0, &params);
    check("single-qubit update", s.per_qubit()[0], 0.9999629);

    let mut s = FidelityState::new(2);
    s.apply_2q(0, 1, &params);
    check("two-qubit update", s.per_qubit()[0], 0.999_737_465_537_828_086_051_942_121_551_733_95);
    check("two-qubit product", s.total(), 0.999475);

    let mut s = FidelityState::from_fidelities(vec![0.9, 0.8]);
    s.apply_2q(0, 1, &params);
    check("two-qubit unequal", s.per_qubit()[1], 0.799_822_921_968_394_343_781_070_383_098_1);

    let mut s = FidelityState::new(1);
    s.apply_decoherence(30e-9, &params);
    check("decoherence", s.per_qubit()[0], 0.999_962_069_768_492_489_504_100_216_495_77);

    let one = nisq_scaling::Circuit::from_gates(10, vec![Gate::u3(0, 0.4, 0.0, 0.0)]).unwrap();
    let device = Device::new(TopologyKind::Linear, 10).unwrap();
    let compiled = compile(&one, &device, &SabreConfig::default()).unwrap();
    let total = estimate_fidelity(&compiled, &params).unwrap().total;
    check("one U3 on ten qubits", total, 0.999_863_023_694_393_619_220_442_091_361_836);

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let deltas = [1.0, 2.0, 5.0, 10.0, 50.0, 100.0];
    let mut violations = 0;
    let trials = 200;
    for _ in 0..trials {
        let n = rng.gen_range(2..=8);
        let kind = TopologyKind::ALL[rng.gen_range(0..4)];
        let len = rng.gen_range(1..=60);
        let c = random_circuit(&mut rng, n, len);
        let device = Device::new(kind, n).unwrap();
        let compiled = compile(&c, &device, &SabreConfig::default()).unwrap();
        let base = estimate_fidelity(&compiled, &params).unwrap().total;

        let mut longer = compiled.clone();
        let edges = device.graph().edges();
        let extra = if rng.gen_bool(0.5) {
            let (a, b) = edges[rng.gen_range(0..edges.len())];
            Gate::cx(a, b)
        } else {
            Gate::u3(rng.gen_range(0..n), 0.7, 0.2, 0.1)
        };
        longer.circuit.push(extra).unwrap();
        if estimate_fidelity(&longer, &params).unwrap().total > base {
            violations += 1;
        }
        let by_delta: Vec<f64> = deltas
            .iter()
            .map(|&d| estimate_fidelity(&compiled, &params.improved(d).unwrap()).unwrap().total)
            .collect();
        if by_delta.windows(2).any(|w| w[1] < w[0]) {
            violations += 1;
        }
    }
    if violations > 0 {
        failures.push(format!("{violations} monotonicity violations"));
    }
    Outcome::new(
        6,
        "noise model single steps and monotonicity",
        failures,
        format!("6 reference values at 1e-12, {trials} random circuits for monotonicity"),
    )
}

/// Sizes where the sign of `ghz - kernel_pairwise` changes, reported as the
/// first size after each change.
fn crossings(topology: TopologyKind) -> Vec<usize> {
    let spec = SweepSpec {
        families: vec![
            CircuitFamily::Ghz,
            CircuitFamily::Kernel(EntanglementStrategy::Pairwise),
        ],
        topologies: vec![topology],
        qubit_counts: (30..=90).collect(),
        ..SweepSpec::fidelity()
    };
    let rows = fidelity_sweep(&spec).expect("fidelity sweep runs");
    let (ghz, kp): (Vec<_>, Vec<_>) = rows.iter().partition(|r| r.family == CircuitFamily::Ghz);
    let diff: Vec<(usize, f64)> = ghz
        .iter()
        .zip(&kp)
        .map(|(g, k)| (g.n_qubits, g.total_fidelity - k.total_fidelity))
        .collect();
    diff.windows(2)
        .filter(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0))
        .map(|w| w[1].0)
        .collect()
}

/// Returns the gating outcome and an informational line for the narrower band.
pub fn ghz_pairwise_crossover() -> (Outcome, String) {
    let mut failures = Vec::new();
    let mut found = Vec::new();
    let mut narrow = Vec::new();
    for t in [TopologyKind::Linear, TopologyKind::Ring] {
        let c = crossings(t);
        found.push(format!("{t} at {c:?}"));
        if c.len() != 1 {
            failures.push(format!("{t}: {} crossings", c.len()));
        }
        let inside = c.len() == 1 && (60..=70).contains(&c[0]);
        narrow.push(format!("{t} {}", if inside { "inside" } else { "outside" }));
    }
    (
        Outcome::new(
            7,
            "GHZ and kernel-pairwise fidelity cross once in [30, 90]",
            failures,
            found.join(", "),
        ),
        format!("informational: crossing within [60, 70]: {}", narrow.join(", ")),
    )
}

pub fn severe_degradation_at_100() -> Outcome {
    let spec = SweepSpec {
        families: CircuitFamily::ALL
            .into_iter()
            .filter(|f| matches!(f, CircuitFamily::Kernel(_) | CircuitFamily::Qnn(_)))
            .collect(),
        qubit_counts: vec![100],
        ..SweepSpec::fidelity()
    };
    let rows = fidelity_sweep(&spec).expect("fidelity sweep runs");
    let tol = 0.1;
    let mut failures = Vec::new();
    let mut worst_linear: f64 = 0.0;
    let mut worst_qnn: f64 = 0.0;
    for r in &rows {
        if r.topology == TopologyKind::Linear && !(r.family == CircuitFamily::Kernel(EntanglementStrategy::Pairwise)) {
            worst_linear = worst_linear.max(r.total_fidelity);
            if r.total_fidelity >= 0.6 + tol {
                failures.push(format!("{} on linear F={:.3}", r.family, r.total_fidelity));
            }
        }
        if matches!(r.family, CircuitFamily::Qnn(_)) {
            worst_qnn = worst_qnn.max(r.total_fidelity);
            if r.total_fidelity >= 0.4 + tol {
                failures.push(format!("{}/{} F={:.3}", r.family, r.topology, r.total_fidelity));
            }
        }
    }
    Outcome::new(
        8,
        "kernel and QNN fidelity collapses by 100 qubits",
        failures,
        format!("max F on linear {worst_linear:.3} (< 0.6), max QNN F {worst_qnn:.3} (< 0.4), tolerance {tol}"),
    )
}

pub fn reference_tech_gap() -> Vec<TechGapRow> {
    tech_gap_sweep(&SweepSpec::tech_gap()).expect("tech gap sweep runs")
}

pub fn tech_gap(rows: &[TechGapRow]) -> Outcome {
    let mut failures = Vec::new();
    let mut saturated = 0;
    let mut series_count = 0;
    let mut max_increment: f64 = 0.0;
    for f in CircuitFamily::ALL {
        for t in TopologyKind::ALL {
            let s: Vec<&TechGapRow> = rows.iter().filter(|r| r.family == f && r.topology == t).collect();
            series_count += 1;
            let fids: Vec<f64> = s.iter().map(|r| r.fidelity_at_fixed_n).collect();
            if fids.windows(2).any(|w| w[1] < w[0]) {
                failures.push(format!("{f}/{t} not monotone"));
            }
            let last = s.len() - 1;
            assert_eq!((s[last - 1].improvement_factor, s[last].improvement_factor), (90.0, 100.0));
            let inc = fids[last] - fids[last - 1];
            max_increment = max_increment.max(inc);
            if inc < 1e-3 {
                saturated += 1;
            }
            if !is_pairwise(f) {
                match s[0].n_threshold {
                    Some(th) if th < 100.0 => {}
                    other => failures.push(format!("{f}/{t} threshold at delta=1 is {other:?}")),
                }
            }
        }
    }
    if saturated < series_count {
        failures.push(format!(
            "{} of {series_count} series still rising by >= 1e-3 between delta 90 and 100 (max {max_increment:.2e})",
            series_count - saturated
        ));
    }
    let mut r2s = Vec::new();
    for t in [TopologyKind::Linear, TopologyKind::Ring] {
        let s: Vec<&TechGapRow> = rows
            .iter()
            .filter(|r| r.family == CircuitFamily::Kernel(EntanglementStrategy::Pairwise) && r.topology == t)
            .collect();
        let ds: Vec<f64> = s.iter().map(|r| r.improvement_factor).collect();
        let th: Vec<f64> = s.iter().map(|r| r.n_threshold.unwrap_or(f64::NAN)).collect();
        let r2 = linear_fit(&ds, &th).map(|l| l.r_squared).unwrap_or(f64::NAN);
        r2s.push(format!("{t} {r2:.4}"));
        if !(r2 >= 0.9) {
            failures.push(format!("kernel-pairwise/{t} threshold R^2 {r2:.4}"));
        }
    }
    Outcome::new(
        9,
        "fidelity at 256 qubits saturates and pairwise thresholds grow linearly",
        failures,
        format!("threshold-vs-delta R^2: {}; {saturated}/{series_count} series saturated", r2s.join(", ")),
    )
}

pub fn fit_round_trip() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let lambda = rng.gen_range(10.0..1000.0);
        let beta = rng.gen_range(0.5..3.0);
        let truth = StretchedExpFit {
            lambda,
            beta,
            r_squared: 1.0,
            points_used: 0,
        };
        let points: Vec<(f64, f64)> = (0..10)
            .map(|k| lambda * 2f64.powf((k as f64 - 5.0) / 2.0))
            .map(|n| (n, truth.eval(n)))
            .collect();
        match fit_stretched_exponential(&points) {
            Ok(fit) => {
                let err = rel(fit.lambda, lambda).max(rel(fit.beta, beta));
                worst = worst.max(err);
                if err >= 1e-6 {
                    failures.push(format!("lambda={lambda:.3} beta={beta:.3} error {err:.2e}"));
                }
            }
            Err(e) => failures.push(format!("lambda={lambda:.3} beta={beta:.3}: {e}")),
        }
    }
    let example = StretchedExpFit {
        lambda: 500.0,
        beta: 1.2,
        r_squared: 1.0,
        points_used: 10,
    };
    let th = n_threshold(&example, 0.99).expect("valid fit");
    let reference = 10.817_340_078_775_699_313_243_414_084_597_79;
    if rel(th, reference) >= 1e-6 {
        failures.push(format!("threshold example {th}"));
    }
    Outcome::new(
        10,
        "stretched-exponential fit round trip",
        failures,
        format!("50 pairs, worst relative error {worst:.1e}; threshold(500, 1.2, 0.99) = {th:.6}"),
    )
}

/// Runs the full `resources` command twice with the same seed and compares bytes.
pub fn deterministic_resources() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut outputs = Vec::new();
    let mut failures = Vec::new();
    for dir in &dirs {
        let args = ["nisq-scaling", "--seed", "7", "--out", dir.path().to_str().unwrap(), "resources"];
        let code = nisq_scaling_cli::run(args, &mut std::io::sink());
        if code != 0 {
            failures.push(format!("resources exited with {code}"));
        }
        outputs.push(std::fs::read(dir.path().join("resources.csv")).unwrap_or_default());
    }
    if outputs[0].is_empty() || outputs[0] != outputs[1] {
        failures.push("CSV outputs differ".into());
    }
    Outcome::new(
        11,
        "full resources sweep is byte-identical across runs",
        failures,
        format!("{} bytes, {} rows", outputs[0].len(), outputs[0].iter().filter(|&&b| b == b'\n').count().saturating_sub(1)),
    )
}
