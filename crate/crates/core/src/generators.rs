//! Circuit families: ZZ feature map, TwoLocal ansatz, kernel and QNN circuits,
//! tree tensor network and GHZ preparation.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntanglementStrategy {
    Linear,
    Circular,
    Sca,
    Pairwise,
}

impl EntanglementStrategy {
    pub const ALL: [EntanglementStrategy; 4] = [
        EntanglementStrategy::Linear,
        EntanglementStrategy::Circular,
        EntanglementStrategy::Sca,
        EntanglementStrategy::Pairwise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EntanglementStrategy::Linear => "linear",
            EntanglementStrategy::Circular => "circular",
            EntanglementStrategy::Sca => "sca",
            EntanglementStrategy::Pairwise => "pairwise",
        }
    }
}

impl fmt::Display for EntanglementStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntanglementStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown entanglement strategy `{s}`")))
    }
}

/// Entangling pairs of one block, grouped into sublayers. Only `Pairwise`
/// produces more than one sublayer.
pub fn entanglement_sublayers(
    strategy: EntanglementStrategy,
    n: usize,
    block_index: usize,
) -> Result<Vec<Vec<(usize, usize)>>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "entanglement needs at least 2 qubits, got {n}"
        )));
    }
    let linear = || (0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>();
    let circular = || {
        // a 2-qubit ring has a single unordered pair
        if n == 2 {
            return vec![(0, 1)];
        }
        let mut pairs = Vec::with_capacity(n);
        pairs.push((n - 1, 0));
        pairs.extend((0..n - 1).map(|i| (i, i + 1)));
        pairs
    };
    let layers = match strategy {
        EntanglementStrategy::Linear => vec![linear()],
        EntanglementStrategy::Circular => vec![circular()],
        EntanglementStrategy::Sca => {
            let shift = block_index % n;
            let shifted = |q: usize| (q + n - shift) % n;
            let mut pairs: Vec<(usize, usize)> = circular()
                .into_iter()
                .map(|(a, b)| (shifted(a), shifted(b)))
                .collect();
            if block_index % 2 == 1 {
                for p in pairs.iter_mut() {
                    *p = (p.1, p.0);
                }
                pairs.reverse();
            }
            vec![pairs]
        }
        EntanglementStrategy::Pairwise => {
            let even = (0..n - 1).step_by(2).map(|i| (i, i + 1)).collect();
            let odd: Vec<_> = (1..n - 1).step_by(2).map(|i| (i, i + 1)).collect();
            if odd.is_empty() {
                vec![even]
            } else {
                vec![even, odd]
            }
        }
    };
    Ok(layers)
}

/// Flattened `(control, target)` list for one entanglement block.
pub fn entanglement_pairs(
    strategy: EntanglementStrategy,
    n: usize,
    block_index: usize,
) -> Result<Vec<(usize, usize)>> {
    Ok(entanglement_sublayers(strategy, n, block_index)?
        .into_iter()
        .flatten()
        .collect())
}

pub fn zz_feature_map(
    n: usize,
    strategy: EntanglementStrategy,
    reps: usize,
    data: &[f64],
) -> Result<Circuit> {
    if reps == 0 {
        return Err(Error::InvalidParameter("feature map needs reps >= 1".into()));
    }
    if data.len() != n {
        return Err(Error::InvalidParameter(format!(
            "feature map on {n} qubits needs {n} data values, got {}",
            data.len()
        )));
    }
    let mut c = Circuit::new(n)?;
    for r in 0..reps {
        let pairs = entanglement_pairs(strategy, n, r)?;
        for q in 0..n {
            c.push_unchecked(Gate::h(q));
        }
        for (q, &x) in data.iter().enumerate() {
            c.push_unchecked(Gate::p(q, 2.0 * x));
        }
        for (i, j) in pairs {
            let phase = 2.0 * (PI - data[i]) * (PI - data[j]);
            c.push_unchecked(Gate::cx(i, j));
            c.push_unchecked(Gate::p(j, phase));
            c.push_unchecked(Gate::cx(i, j));
        }
    }
    Ok(c)
}

/// RY rotation layers interleaved with CX entanglement blocks; `params` holds
/// `n * (reps + 1)` angles, one rotation layer at a time.
pub fn two_local(
    n: usize,
    strategy: EntanglementStrategy,
    reps: usize,
    params: &[f64],
) -> Result<Circuit> {
    let expected = n * (reps + 1);
    if params.len() != expected {
        return Err(Error::InvalidParameter(format!(
            "TwoLocal on {n} qubits with {reps} reps needs {expected} parameters, got {}",
            params.len()
        )));
    }
    let mut c = Circuit::new(n)?;
    let mut angles = params.chunks(n);
    let rotation_layer = |c: &mut Circuit, layer: &[f64]| {
        for (q, &theta) in layer.iter().enumerate() {
            c.push_unchecked(Gate::ry(q, theta));
        }
    };
    rotation_layer(&mut c, angles.next().expect("at least one layer"));
    for r in 0..reps {
        for (i, j) in entanglement_pairs(strategy, n, r)? {
            c.push_unchecked(Gate::cx(i, j));
        }
        rotation_layer(&mut c, angles.next().expect("reps + 1 layers"));
    }
    Ok(c)
}

pub fn kernel_circuit(
    n: usize,
    strategy: EntanglementStrategy,
    x1: &[f64],
    x2: &[f64],
) -> Result<Circuit> {
    let u = zz_feature_map(n, strategy, 1, x1)?;
    let v = zz_feature_map(n, strategy, 1, x2)?;
    u.compose(&v.inverse())
}

pub fn qnn_circuit(
    n: usize,
    strategy: EntanglementStrategy,
    data: &[f64],
    params: &[f64],
) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::InvalidParameter("QNN needs at least 2 qubits".into()));
    }
    let fm = zz_feature_map(n, EntanglementStrategy::Linear, 1, data)?;
    let ansatz = two_local(n, strategy, QNN_ANSATZ_REPS, params)?;
    fm.compose(&ansatz)
}

pub const QNN_ANSATZ_REPS: usize = 2;

/// Binary-tree ansatz over `n = 2^k` qubits; `params` holds `2(n-1) + 1` angles.
pub fn ttn_circuit(n: usize, params: &[f64]) -> Result<Circuit> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "TTN needs a power-of-two qubit count >= 2, got {n}"
        )));
    }
    let expected = 2 * (n - 1) + 1;
    if params.len() != expected {
        return Err(Error::InvalidParameter(format!(
            "TTN on {n} qubits needs {expected} parameters, got {}",
            params.len()
        )));
    }
    let mut c = Circuit::new(n)?;
    let mut angles = params.iter().copied();
    let mut stride = 1;
    while stride < n {
        for i in (0..n).step_by(2 * stride) {
            let j = i + stride;
            c.push_unchecked(Gate::ry(i, angles.next().unwrap()));
            c.push_unchecked(Gate::ry(j, angles.next().unwrap()));
            c.push_unchecked(Gate::cx(j, i));
        }
        stride *= 2;
    }
    c.push_unchecked(Gate::ry(0, angles.next().unwrap()));
    Ok(c)
}

pub fn ghz_circuit(n: usize) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::InvalidParameter("GHZ needs at least 2 qubits".into()));
    }
    let mut c = Circuit::new(n)?;
    c.push_unchecked(Gate::h(0));
    for i in 0..n - 1 {
        c.push_unchecked(Gate::cx(i, i + 1));
    }
    Ok(c)
}

/// The circuit families swept by the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CircuitFamily {
    Kernel(EntanglementStrategy),
    Qnn(EntanglementStrategy),
    Ttn,
    Ghz,
}

impl CircuitFamily {
    pub const ALL: [CircuitFamily; 10] = [
        CircuitFamily::Kernel(EntanglementStrategy::Linear),
        CircuitFamily::Kernel(EntanglementStrategy::Circular),
        CircuitFamily::Kernel(EntanglementStrategy::Sca),
        CircuitFamily::Kernel(EntanglementStrategy::Pairwise),
        CircuitFamily::Qnn(EntanglementStrategy::Linear),
        CircuitFamily::Qnn(EntanglementStrategy::Circular),
        CircuitFamily::Qnn(EntanglementStrategy::Sca),
        CircuitFamily::Qnn(EntanglementStrategy::Pairwise),
        CircuitFamily::Ttn,
        CircuitFamily::Ghz,
    ];

    pub fn name(self) -> String {
        match self {
            CircuitFamily::Kernel(s) => format!("kernel-{s}"),
            CircuitFamily::Qnn(s) => format!("qnn-{s}"),
            CircuitFamily::Ttn => "ttn".into(),
            CircuitFamily::Ghz => "ghz".into(),
        }
    }

    /// Family label without the strategy suffix, as used in the CSV `circuit_family` column.
    pub fn kind_name(self) -> &'static str {
        match self {
            CircuitFamily::Kernel(_) => "kernel",
            CircuitFamily::Qnn(_) => "qnn",
            CircuitFamily::Ttn => "ttn",
            CircuitFamily::Ghz => "ghz",
        }
    }

    pub fn strategy(self) -> Option<EntanglementStrategy> {
        match self {
            CircuitFamily::Kernel(s) | CircuitFamily::Qnn(s) => Some(s),
            _ => None,
        }
    }

    pub fn validate_size(self, n: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "{} needs at least 2 qubits, got {n}",
                self.name()
            )));
        }
        if self == CircuitFamily::Ttn && !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "ttn needs a power-of-two qubit count, got {n}"
            )));
        }
        Ok(())
    }

    pub fn build(self, n: usize, angles: AngleSource) -> Result<Circuit> {
        self.validate_size(n)?;
        match self {
            CircuitFamily::Kernel(s) => {
                let (x1, x2) = angles.kernel_data(n);
                kernel_circuit(n, s, &x1, &x2)
            }
            CircuitFamily::Qnn(s) => {
                let x = angles.values(n, 0);
                let theta = angles.values(n * (QNN_ANSATZ_REPS + 1), 1);
                qnn_circuit(n, s, &x, &theta)
            }
            CircuitFamily::Ttn => ttn_circuit(n, &angles.values(2 * (n - 1) + 1, 1)),
            CircuitFamily::Ghz => ghz_circuit(n),
        }
    }
}

impl fmt::Display for CircuitFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for CircuitFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown circuit family `{s}`")))
    }
}

/// Where data and trainable angles come from.
///
/// `Fixed` uses `0.1 * (i + 1)`; the second kernel data point is offset by
/// `0.05` so that `U(x1) U(x2)^dagger` does not collapse to the identity.
/// `Seeded` draws uniformly from `[0, 2pi)` with a ChaCha8 stream per role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AngleSource {
    #[default]
    Fixed,
    Seeded(u64),
}

impl AngleSource {
    fn values(self, len: usize, stream: u64) -> Vec<f64> {
        match self {
            AngleSource::Fixed => (0..len).map(|i| 0.1 * (i + 1) as f64).collect(),
            AngleSource::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(stream);
                (0..len).map(|_| rng.gen_range(0.0..2.0 * PI)).collect()
            }
        }
    }

    fn kernel_data(self, n: usize) -> (Vec<f64>, Vec<f64>) {
        match self {
            AngleSource::Fixed => {
                let x1 = self.values(n, 0);
                let x2 = x1.iter().map(|x| x + 0.05).collect();
                (x1, x2)
            }
            AngleSource::Seeded(_) => (self.values(n, 0), self.values(n, 2)),
        }
    }
}
