//! Tabular output shared by every sweep: one flat row schema, CSV and JSON writers.

use std::io::Write;

use serde::Serialize;

use crate::analysis::{FidelityRow, ResourceRow, TechGapRow};
use crate::compiler::ResourceMetrics;
use crate::error::Result;
use crate::generators::CircuitFamily;
use crate::topology::TopologyKind;

pub const COLUMNS: [&str; 20] = [
    "experiment_id",
    "circuit_family",
    "entanglement",
    "topology",
    "n_qubits",
    "improvement_factor",
    "swap_count",
    "depth_pre",
    "depth_post",
    "depth_increase_pct",
    "twoq_pre",
    "twoq_post",
    "twoq_overhead_pct",
    "total_fidelity",
    "n_threshold",
    "fit_lambda",
    "fit_beta",
    "fit_r2",
    "extrapolated",
    "seed",
];

/// Significant digits used for floating-point CSV fields.
pub const CSV_DIGITS: usize = 10;

/// Formats `x` with `digits` significant digits in the style of C's `%g`:
/// fixed notation for moderate exponents, scientific otherwise, trailing zeros dropped.
pub fn format_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One output row. `None` fields are written as empty CSV cells and JSON nulls.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Record {
    pub experiment_id: String,
    pub circuit_family: String,
    pub entanglement: String,
    pub topology: String,
    pub n_qubits: Option<usize>,
    pub improvement_factor: Option<f64>,
    pub swap_count: Option<usize>,
    pub depth_pre: Option<usize>,
    pub depth_post: Option<usize>,
    pub depth_increase_pct: Option<f64>,
    pub twoq_pre: Option<usize>,
    pub twoq_post: Option<usize>,
    pub twoq_overhead_pct: Option<f64>,
    pub total_fidelity: Option<f64>,
    pub n_threshold: Option<f64>,
    pub fit_lambda: Option<f64>,
    pub fit_beta: Option<f64>,
    pub fit_r2: Option<f64>,
    pub extrapolated: Option<bool>,
    pub seed: Option<u64>,
}

impl Record {
    fn base(id: String, family: CircuitFamily, topology: TopologyKind, seed: u64) -> Self {
        Self {
            experiment_id: id,
            circuit_family: family.kind_name().into(),
            entanglement: family.strategy().map(|s| s.name().to_string()).unwrap_or_default(),
            topology: topology.name().into(),
            seed: Some(seed),
            ..Default::default()
        }
    }

    fn with_metrics(mut self, m: &ResourceMetrics) -> Self {
        self.swap_count = Some(m.swap_count);
        self.depth_pre = Some(m.depth_pre);
        self.depth_post = Some(m.depth_post);
        self.depth_increase_pct = Some(m.depth_increase_pct);
        self.twoq_pre = Some(m.twoq_pre);
        self.twoq_post = Some(m.twoq_post);
        self.twoq_overhead_pct = Some(m.twoq_overhead_pct);
        self
    }

    pub fn cells(&self) -> [String; 20] {
        fn int(v: Option<usize>) -> String {
            v.map(|v| v.to_string()).unwrap_or_default()
        }
        fn float(v: Option<f64>) -> String {
            v.map(|v| format_sig(v, CSV_DIGITS)).unwrap_or_default()
        }
        [
            self.experiment_id.clone(),
            self.circuit_family.clone(),
            self.entanglement.clone(),
            self.topology.clone(),
            int(self.n_qubits),
            float(self.improvement_factor),
            int(self.swap_count),
            int(self.depth_pre),
            int(self.depth_post),
            float(self.depth_increase_pct),
            int(self.twoq_pre),
            int(self.twoq_post),
            float(self.twoq_overhead_pct),
            float(self.total_fidelity),
            float(self.n_threshold),
            float(self.fit_lambda),
            float(self.fit_beta),
            float(self.fit_r2),
            self.extrapolated.map(|b| b.to_string()).unwrap_or_default(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
        ]
    }
}

fn id(prefix: &str, i: usize) -> String {
    format!("{prefix}-{:05}", i + 1)
}

pub fn resource_records(rows: &[ResourceRow], seed: u64) -> Vec<Record> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| Record {
            n_qubits: Some(r.n_qubits),
            ..Record::base(id("resources", i), r.family, r.topology, seed).with_metrics(&r.metrics)
        })
        .collect()
}

pub fn fidelity_records(rows: &[FidelityRow], seed: u64) -> Vec<Record> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| Record {
            n_qubits: Some(r.n_qubits),
            improvement_factor: Some(r.improvement_factor),
            total_fidelity: Some(r.total_fidelity),
            ..Record::base(id("fidelity", i), r.family, r.topology, seed).with_metrics(&r.metrics)
        })
        .collect()
}

pub fn tech_gap_records(rows: &[TechGapRow], seed: u64) -> Vec<Record> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let fit = r.fit.as_ref().ok();
            Record {
                n_qubits: Some(r.fixed_n),
                improvement_factor: Some(r.improvement_factor),
                total_fidelity: Some(r.fidelity_at_fixed_n),
                n_threshold: r.n_threshold,
                fit_lambda: fit.map(|f| f.lambda),
                fit_beta: fit.map(|f| f.beta),
                fit_r2: fit.map(|f| f.r_squared),
                extrapolated: r.n_threshold.map(|_| r.extrapolated),
                ..Record::base(id("tech-gap", i), r.family, r.topology, seed)
            }
        })
        .collect()
}

pub fn write_csv<W: Write>(out: W, records: &[Record]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(r.cells())?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(records: &[Record]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, records).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.0, 10), "0");
        assert_eq!(format_sig(3.0, 12), "3");
        assert_eq!(format_sig(-0.25, 12), "-0.25");
        assert_eq!(format_sig(1.0 / 3.0, 10), "0.3333333333");
        assert_eq!(format_sig(123456.789, 4), "1.235e5");
        assert_eq!(format_sig(9.99999999999, 10), "10");
        assert_eq!(format_sig(1.5e-7, 10), "1.5e-7");
        assert_eq!(format_sig(0.000123, 10), "0.000123");
        assert_eq!(format_sig(45.0, 10), "45");
        assert_eq!(format_sig(f64::NAN, 10), "NaN");
    }

    #[test]
    fn header_and_empty_cells() {
        let r = Record {
            experiment_id: "x-1".into(),
            circuit_family: "ghz".into(),
            topology: "ring".into(),
            n_qubits: Some(4),
            seed: Some(7),
            ..Default::default()
        };
        let text = csv_string(&[r]);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
        assert_eq!(lines.next().unwrap(), "x-1,ghz,,ring,4,,,,,,,,,,,,,,,7");
        assert!(lines.next().is_none());
    }
}
