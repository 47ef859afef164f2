//! Run configuration: TOML file, command-line overrides, and the resolved echo
//! stored in every manifest.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use nisq_scaling::analysis::SweepSpec;
use nisq_scaling::{CircuitFamily, NoiseParams, SabreConfig, TopologyKind};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// On-disk configuration. Every key is optional; unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: Option<usize>,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub sabre: SabreConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub families: Option<Vec<String>>,
    pub topologies: Option<Vec<String>>,
    pub qubit_counts: Option<Vec<usize>>,
    pub ttn_qubit_counts: Option<Vec<usize>>,
    pub improvement_factors: Option<Vec<f64>>,
    pub fixed_n: Option<usize>,
}

/// Noise keys in laboratory units: gate times in ns, coherence times in us.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub p_ent: Option<f64>,
    pub t1q_ns: Option<f64>,
    pub t2q_ns: Option<f64>,
    #[serde(rename = "T1_us")]
    pub t1_us: Option<f64>,
    #[serde(rename = "T2_us")]
    pub t2_us: Option<f64>,
}

impl NoiseSection {
    fn resolve(&self) -> NoiseParams {
        let d = NoiseParams::default();
        NoiseParams {
            p1: self.p1.unwrap_or(d.p1),
            p2: self.p2.unwrap_or(d.p2),
            p_ent: self.p_ent.unwrap_or(d.p_ent),
            t_1q: self.t1q_ns.map_or(d.t_1q, |t| t * 1e-9),
            t_2q: self.t2q_ns.map_or(d.t_2q, |t| t * 1e-9),
            t1: self.t1_us.map_or(d.t1, |t| t * 1e-6),
            t2: self.t2_us.map_or(d.t2, |t| t * 1e-6),
        }
    }

    fn echo(p: &NoiseParams) -> Self {
        Self {
            p1: Some(p.p1),
            p2: Some(p.p2),
            p_ent: Some(p.p_ent),
            t1q_ns: Some(p.t_1q * 1e9),
            t2q_ns: Some(p.t_2q * 1e9),
            t1_us: Some(p.t1 * 1e6),
            t2_us: Some(p.t2 * 1e6),
        }
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Which default sweep ranges apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Resources,
    Fidelity,
    TechGap,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Resources => "resources",
            SweepKind::Fidelity => "fidelity",
            SweepKind::TechGap => "tech-gap",
        }
    }

    fn defaults(self) -> SweepSpec {
        match self {
            SweepKind::Resources => SweepSpec::resources(),
            SweepKind::Fidelity => SweepSpec::fidelity(),
            SweepKind::TechGap => SweepSpec::tech_gap(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: Option<usize>,
    pub families: Vec<String>,
    pub topologies: Vec<String>,
    pub qubit_counts: Vec<usize>,
    pub improvement_factors: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: SweepSpec,
    pub out: PathBuf,
    pub format: Format,
    pub workers: Option<usize>,
    /// Fully resolved configuration in file form.
    pub echo: ConfigFile,
}

fn parse_all<T: std::str::FromStr>(names: &[String]) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    names
        .iter()
        .map(|s| s.parse::<T>().map_err(|e| CliError::Config(e.to_string())))
        .collect()
}

fn non_empty<T: Clone>(cli: &[T], file: &Option<Vec<T>>) -> Option<Vec<T>> {
    if !cli.is_empty() {
        Some(cli.to_vec())
    } else {
        file.clone()
    }
}

pub fn resolve(kind: SweepKind, file: &ConfigFile, cli: &Overrides) -> Result<RunConfig, CliError> {
    let mut spec = kind.defaults();
    let sweep = &file.sweep;
    if let Some(f) = non_empty(&cli.families, &sweep.families) {
        spec.families = parse_all::<CircuitFamily>(&f)?;
    }
    if let Some(t) = non_empty(&cli.topologies, &sweep.topologies) {
        spec.topologies = parse_all::<TopologyKind>(&t)?;
    }
    if let Some(n) = &sweep.qubit_counts {
        spec.qubit_counts = n.clone();
    }
    if let Some(n) = &sweep.ttn_qubit_counts {
        spec.ttn_qubit_counts = n.clone();
    }
    // `--n` applies to every selected family, TTN included
    if !cli.qubit_counts.is_empty() {
        spec.qubit_counts = cli.qubit_counts.clone();
        spec.ttn_qubit_counts = cli.qubit_counts.clone();
    }
    if let Some(d) = non_empty(&cli.improvement_factors, &sweep.improvement_factors) {
        spec.improvement_factors = d;
    }
    if let Some(n) = sweep.fixed_n {
        spec.fixed_n = n;
    }
    spec.noise = file.noise.resolve();
    spec.sabre = file.sabre.clone();
    spec.seed = cli.seed.or(file.seed).unwrap_or(0);

    let workers = cli.workers.or(file.workers);
    if workers == Some(0) {
        return Err(CliError::Config("workers must be at least 1".into()));
    }
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;

    let out = cli.out.clone().or_else(|| file.out.clone()).unwrap_or_else(|| "results".into());
    let format = cli.format.or(file.format).unwrap_or_default();
    let echo = ConfigFile {
        seed: Some(spec.seed),
        out: Some(out.clone()),
        format: Some(format),
        workers,
        sweep: SweepSection {
            families: Some(spec.families.iter().map(|f| f.name()).collect()),
            topologies: Some(spec.topologies.iter().map(|t| t.name().to_string()).collect()),
            qubit_counts: Some(spec.qubit_counts.clone()),
            ttn_qubit_counts: Some(spec.ttn_qubit_counts.clone()),
            improvement_factors: Some(spec.improvement_factors.clone()),
            fixed_n: Some(spec.fixed_n),
        },
        noise: NoiseSection::echo(&spec.noise),
        sabre: spec.sabre.clone(),
    };
    Ok(RunConfig {
        spec,
        out,
        format,
        workers,
        echo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_reproduce_the_reference_configuration() {
        let run = resolve(SweepKind::Resources, &ConfigFile::default(), &Overrides::default()).unwrap();
        assert_eq!(run.spec, SweepSpec::resources());
        assert_eq!(run.format, Format::Csv);
        assert_eq!(run.spec.noise, NoiseParams::default());
    }

    #[test]
    fn toml_units_and_unknown_keys() {
        let file: ConfigFile = toml::from_str(
            "seed = 3\n[noise]\nt2q_ns = 60.0\nT1_us = 100.0\nT2_us = 150.0\n[sweep]\nfamilies = [\"ghz\"]\n",
        )
        .unwrap();
        let run = resolve(SweepKind::Fidelity, &file, &Overrides::default()).unwrap();
        assert_eq!(run.spec.seed, 3);
        assert!((run.spec.noise.t_2q - 60e-9).abs() < 1e-20);
        assert!((run.spec.noise.t1 - 100e-6).abs() < 1e-18);
        assert_eq!(run.spec.families, vec![CircuitFamily::Ghz]);

        assert!(toml::from_str::<ConfigFile>("sed = 3\n").is_err());
        assert!(toml::from_str::<ConfigFile>("[noise]\np3 = 0.1\n").is_err());
        assert!(toml::from_str::<ConfigFile>("[sabre]\nlookahead = 0.1\n").is_err());
    }

    #[test]
    fn overrides_win_and_bad_values_are_config_errors() {
        let file: ConfigFile = toml::from_str("seed = 3\n").unwrap();
        let cli = Overrides {
            seed: Some(9),
            families: vec!["ttn".into()],
            qubit_counts: vec![8, 16],
            ..Default::default()
        };
        let run = resolve(SweepKind::Resources, &file, &cli).unwrap();
        assert_eq!(run.spec.seed, 9);
        assert_eq!(run.spec.ttn_qubit_counts, vec![8, 16]);

        let bad = Overrides {
            families: vec!["ttn".into()],
            qubit_counts: vec![12],
            ..Default::default()
        };
        assert!(matches!(
            resolve(SweepKind::Resources, &file, &bad),
            Err(CliError::Config(_))
        ));
        let typo = Overrides {
            families: vec!["kernel-ring".into()],
            ..Default::default()
        };
        assert!(matches!(
            resolve(SweepKind::Resources, &file, &typo),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn echo_round_trips() {
        let run = resolve(SweepKind::TechGap, &ConfigFile::default(), &Overrides::default()).unwrap();
        let text = serde_json::to_string(&run.echo).unwrap();
        let back: ConfigFile = serde_json::from_str(&text).unwrap();
        let again = resolve(SweepKind::TechGap, &back, &Overrides::default()).unwrap();
        assert_eq!(again.spec.families, run.spec.families);
        assert_eq!(again.spec.improvement_factors, run.spec.improvement_factors);
        assert_eq!(again.spec.sabre, run.spec.sabre);
        for (a, b) in [
            (again.spec.noise.t_1q, run.spec.noise.t_1q),
            (again.spec.noise.t1, run.spec.noise.t1),
        ] {
            assert!((a / b - 1.0).abs() < 1e-12);
        }
    }
}
