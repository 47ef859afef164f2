//! Scaling sweeps, stretched-exponential fits and threshold extraction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compiler::{compile, CompiledCircuit, Device, ResourceMetrics, SabreConfig};
use crate::error::{Error, Result};
use crate::generators::{AngleSource, CircuitFamily};
use crate::noise::{estimate_fidelity, NoiseParams};
use crate::topology::TopologyKind;

/// Fidelity target used for threshold extraction.
pub const DEFAULT_TARGET: f64 = 0.99;

/// Qubit count at which the tech-gap sweep reports fidelity directly.
pub const DEFAULT_FIXED_N: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub families: Vec<CircuitFamily>,
    pub topologies: Vec<TopologyKind>,
    /// Qubit counts for every family except TTN.
    pub qubit_counts: Vec<usize>,
    /// Qubit counts for TTN; powers of two.
    pub ttn_qubit_counts: Vec<usize>,
    pub improvement_factors: Vec<f64>,
    pub fixed_n: usize,
    pub noise: NoiseParams,
    pub sabre: SabreConfig,
    pub seed: u64,
}

impl SweepSpec {
    /// Large-scale resource sweep: 100..=1000 in steps of 100, TTN 8..=1024.
    pub fn resources() -> Self {
        Self {
            families: CircuitFamily::ALL.to_vec(),
            topologies: TopologyKind::ALL.to_vec(),
            qubit_counts: (1..=10).map(|k| 100 * k).collect(),
            ttn_qubit_counts: (3..=10).map(|k| 1 << k).collect(),
            improvement_factors: vec![1.0],
            fixed_n: DEFAULT_FIXED_N,
            noise: NoiseParams::default(),
            sabre: SabreConfig::default(),
            seed: 0,
        }
    }

    /// Fidelity range: 10..=100 in steps of 10, TTN 4..=64.
    pub fn fidelity() -> Self {
        Self {
            qubit_counts: (1..=10).map(|k| 10 * k).collect(),
            ttn_qubit_counts: (2..=6).map(|k| 1 << k).collect(),
            ..Self::resources()
        }
    }

    /// Fidelity range plus improvement factors 1, 10, 20, ..., 100.
    pub fn tech_gap() -> Self {
        let mut deltas = vec![1.0];
        deltas.extend((1..=10).map(|k| 10.0 * k as f64));
        Self {
            improvement_factors: deltas,
            ..Self::fidelity()
        }
    }

    pub fn counts_for(&self, family: CircuitFamily) -> &[usize] {
        if family == CircuitFamily::Ttn {
            &self.ttn_qubit_counts
        } else {
            &self.qubit_counts
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidParameter(msg));
        if self.families.is_empty() {
            return invalid("no circuit families selected".into());
        }
        if self.topologies.is_empty() {
            return invalid("no topologies selected".into());
        }
        for &family in &self.families {
            let counts = self.counts_for(family);
            if counts.is_empty() {
                return invalid(format!("no qubit counts for {family}"));
            }
            if !counts.windows(2).all(|w| w[0] < w[1]) {
                return invalid(format!("qubit counts for {family} must be strictly increasing"));
            }
            for &n in counts {
                family.validate_size(n)?;
            }
            family.validate_size(self.fixed_n)?;
        }
        if self.improvement_factors.is_empty() {
            return invalid("no improvement factors".into());
        }
        if !self.improvement_factors.windows(2).all(|w| w[0] < w[1]) {
            return invalid("improvement factors must be strictly increasing".into());
        }
        for &d in &self.improvement_factors {
            self.noise.improved(d)?;
        }
        self.noise.validate()?;
        self.sabre.validate()
    }

    fn angles(&self) -> AngleSource {
        AngleSource::Seeded(self.seed)
    }

    fn compile_point(&self, family: CircuitFamily, topology: TopologyKind, n: usize) -> Result<CompiledCircuit> {
        let circuit = family.build(n, self.angles())?;
        let device = Device::new(topology, n)?;
        compile(&circuit, &device, &self.sabre)
    }

    /// `(family, topology, n)` in output order.
    fn grid(&self) -> Vec<(CircuitFamily, TopologyKind, usize)> {
        let mut points = Vec::new();
        for &family in &self.families {
            for &topology in &self.topologies {
                for &n in self.counts_for(family) {
                    points.push((family, topology, n));
                }
            }
        }
        points
    }

    /// Total fidelity at every improvement factor.
    fn fidelities(&self, compiled: &CompiledCircuit) -> Result<Vec<f64>> {
        self.improvement_factors
            .iter()
            .map(|&d| Ok(estimate_fidelity(compiled, &self.noise.improved(d)?)?.total))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceRow {
    pub family: CircuitFamily,
    pub topology: TopologyKind,
    pub n_qubits: usize,
    pub metrics: ResourceMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityRow {
    pub family: CircuitFamily,
    pub topology: TopologyKind,
    pub n_qubits: usize,
    pub improvement_factor: f64,
    pub total_fidelity: f64,
    pub metrics: ResourceMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TechGapRow {
    pub family: CircuitFamily,
    pub topology: TopologyKind,
    pub improvement_factor: f64,
    pub fixed_n: usize,
    pub fidelity_at_fixed_n: f64,
    /// Fit over the sampled curve, or the reason it failed.
    pub fit: std::result::Result<StretchedExpFit, String>,
    pub n_threshold: Option<f64>,
    /// Threshold lies outside the sampled qubit range.
    pub extrapolated: bool,
}

/// Rows ordered by family, topology, then qubit count.
pub fn resource_sweep(spec: &SweepSpec) -> Result<Vec<ResourceRow>> {
    spec.validate()?;
    spec.grid()
        .into_par_iter()
        .map(|(family, topology, n)| {
            let compiled = spec.compile_point(family, topology, n)?;
            Ok(ResourceRow {
                family,
                topology,
                n_qubits: n,
                metrics: compiled.metrics,
            })
        })
        .collect()
}

/// Rows ordered by family, topology, qubit count, then improvement factor.
/// Each circuit is compiled once and evaluated at every factor.
pub fn fidelity_sweep(spec: &SweepSpec) -> Result<Vec<FidelityRow>> {
    spec.validate()?;
    let nested: Vec<Vec<FidelityRow>> = spec
        .grid()
        .into_par_iter()
        .map(|(family, topology, n)| {
            let compiled = spec.compile_point(family, topology, n)?;
            let fids = spec.fidelities(&compiled)?;
            Ok(spec
                .improvement_factors
                .iter()
                .zip(fids)
                .map(|(&d, f)| FidelityRow {
                    family,
                    topology,
                    n_qubits: n,
                    improvement_factor: d,
                    total_fidelity: f,
                    metrics: compiled.metrics,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// Rows ordered by family, topology, then improvement factor. Fit failures are
/// recorded in the row rather than aborting the sweep.
pub fn tech_gap_sweep(spec: &SweepSpec) -> Result<Vec<TechGapRow>> {
    spec.validate()?;
    let mut points = Vec::new();
    for &family in &spec.families {
        for &topology in &spec.topologies {
            for &n in spec.counts_for(family) {
                points.push((family, topology, n));
            }
            if !spec.counts_for(family).contains(&spec.fixed_n) {
                points.push((family, topology, spec.fixed_n));
            }
        }
    }
    let evaluated: Vec<Vec<f64>> = points
        .par_iter()
        .map(|&(family, topology, n)| spec.fidelities(&spec.compile_point(family, topology, n)?))
        .collect::<Result<_>>()?;
    let lookup = |family, topology, n| {
        let i = points
            .iter()
            .position(|&p| p == (family, topology, n))
            .expect("every point was evaluated");
        &evaluated[i]
    };

    let mut rows = Vec::new();
    for &family in &spec.families {
        let counts = spec.counts_for(family);
        let (lo, hi) = (counts[0] as f64, counts[counts.len() - 1] as f64);
        for &topology in &spec.topologies {
            for (k, &delta) in spec.improvement_factors.iter().enumerate() {
                let curve: Vec<(f64, f64)> = counts
                    .iter()
                    .map(|&n| (n as f64, lookup(family, topology, n)[k]))
                    .collect();
                let fit = fit_stretched_exponential(&curve).map_err(|e| e.to_string());
                let n_threshold = fit.as_ref().ok().and_then(|f| n_threshold(f, DEFAULT_TARGET).ok());
                let extrapolated = n_threshold.is_some_and(|t| t < lo || t > hi);
                rows.push(TechGapRow {
                    family,
                    topology,
                    improvement_factor: delta,
                    fixed_n: spec.fixed_n,
                    fidelity_at_fixed_n: lookup(family, topology, spec.fixed_n)[k],
                    fit,
                    n_threshold,
                    extrapolated,
                });
            }
        }
    }
    Ok(rows)
}

/// Ordinary least squares `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::FitFailed(format!(
            "need at least 2 paired points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::FitFailed("all abscissae are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Exponent `gamma` of `y ~ a x^gamma`, from a log-log linear fit over positive points.
pub fn power_law_exponent(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .unzip();
    linear_fit(&lx, &ly)
}

/// `F(N) = exp(-(N / lambda)^beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StretchedExpFit {
    pub lambda: f64,
    pub beta: f64,
    /// Coefficient of determination of the linearized fit.
    pub r_squared: f64,
    pub points_used: usize,
}

impl StretchedExpFit {
    pub fn eval(&self, n: f64) -> f64 {
        (-(n / self.lambda).powf(self.beta)).exp()
    }
}

/// Fits `ln(-ln F) = beta ln N - beta ln lambda` by least squares. Points with
/// `F > 1 - 1e-12` carry no signal and are dropped; `F` is clamped below at `1e-300`.
pub fn fit_stretched_exponential(points: &[(f64, f64)]) -> Result<StretchedExpFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|&&(n, f)| n > 0.0 && f <= 1.0 - 1e-12)
        .map(|&(n, f)| (n.ln(), (-f.max(1e-300).ln()).ln()))
        .unzip();
    if xs.len() < 2 {
        return Err(Error::FitFailed(format!("{} usable points, need 2", xs.len())));
    }
    let line = linear_fit(&xs, &ys)?;
    let beta = line.slope;
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::FitFailed(format!("non-positive exponent {beta}")));
    }
    Ok(StretchedExpFit {
        lambda: (-line.intercept / beta).exp(),
        beta,
        r_squared: line.r_squared,
        points_used: xs.len(),
    })
}

/// Qubit count at which the fitted curve falls to `target`: `lambda (-ln target)^(1/beta)`.
pub fn n_threshold(fit: &StretchedExpFit, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParameter(format!("target must lie in (0, 1), got {target}")));
    }
    if !(fit.lambda > 0.0 && fit.beta > 0.0 && fit.lambda.is_finite() && fit.beta.is_finite()) {
        return Err(Error::FitFailed(format!(
            "invalid fit lambda={} beta={}",
            fit.lambda, fit.beta
        )));
    }
    Ok(fit.lambda * (-target.ln()).powf(1.0 / fit.beta))
}
