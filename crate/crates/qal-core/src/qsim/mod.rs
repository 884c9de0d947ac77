//! Noise-free statevector simulation and the data-encoding circuit families.
//!
//! A [`FeatureMapSpec`] plus an input vector deterministically defines a gate
//! list; [`encode_state`] applies it to |0…0⟩. Qubit 0 is the least-significant
//! bit of the amplitude index, so kernel values are bit-exact reproducible.

mod state;

pub use state::{
    overlap, reduced_density_matrix, OneQubitDensity, Statevector, COMPLEX_ONE, COMPLEX_ZERO,
};

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

/// Hard cap on the simulated register size; the amplitude vector is 2^n.
pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureMapFamily {
    /// Per rep: H on every qubit, then a phase rotation P(2·x_q) per qubit.
    Z,
    /// Z layer followed by pairwise ZZ phase interactions over the
    /// entanglement pair list.
    Zz,
    /// Generalized Pauli evolutions driven by `pauli_strings`
    /// (default `["Z", "ZZ"]`, which reduces to the ZZ structure).
    Pauli,
    /// Alternating RY/RZ layers with cyclic feature assignment and a linear
    /// CX chain; accepts input vectors of any positive length.
    HighDim,
    /// RY(x_q) then RZ(x_q) on every qubit followed by a linear CX chain.
    YzCx,
}

impl FeatureMapFamily {
    pub fn name(&self) -> &'static str {
        match self {
            FeatureMapFamily::Z => "z",
            FeatureMapFamily::Zz => "zz",
            FeatureMapFamily::Pauli => "pauli",
            FeatureMapFamily::HighDim => "highdim",
            FeatureMapFamily::YzCx => "yz_cx",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Entanglement {
    None,
    /// All unordered pairs (i, j), i < j, in lexicographic order.
    Full,
    /// The wrap-around pair (n−1, 0) followed by the consecutive pairs
    /// (0, 1), (1, 2), …, (n−2, n−1).
    Circular,
    /// The chain CX(q, q+1) for q = 0 … n−2.
    Linear,
}

impl Entanglement {
    pub fn name(&self) -> &'static str {
        match self {
            Entanglement::None => "none",
            Entanglement::Full => "full",
            Entanglement::Circular => "circular",
            Entanglement::Linear => "linear",
        }
    }
}

/// Declarative description of an encoding circuit family. Together with an
/// input vector it expands to a deterministic gate list (see [`expand_gates`]).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMapSpec {
    pub family: FeatureMapFamily,
    pub n_qubits: usize,
    pub reps: usize,
    pub entanglement: Entanglement,
    /// Pauli labels over {X, Y, Z}; only consulted by the Pauli family.
    pub pauli_strings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QsimError {
    InvalidQubitCount { n_qubits: usize },
    InvalidReps,
    IncompatibleEntanglement {
        family: FeatureMapFamily,
        entanglement: Entanglement,
    },
    InvalidPauliString(String),
    DimensionMismatch { expected: usize, got: usize },
    NonFiniteInput { index: usize },
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    ControlEqualsTarget { qubit: usize },
}

impl fmt::Display for QsimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QsimError::InvalidQubitCount { n_qubits } => {
                write!(f, "qubit count {n_qubits} outside 1..={MAX_QUBITS}")
            }
            QsimError::InvalidReps => write!(f, "reps must be >= 1"),
            QsimError::IncompatibleEntanglement {
                family,
                entanglement,
            } => write!(
                f,
                "feature map family {} does not support {} entanglement",
                family.name(),
                entanglement.name()
            ),
            QsimError::InvalidPauliString(s) => write!(f, "invalid Pauli string {s:?}"),
            QsimError::DimensionMismatch { expected, got } => {
                write!(f, "input dimension mismatch: expected {expected}, got {got}")
            }
            QsimError::NonFiniteInput { index } => {
                write!(f, "input component {index} is not finite")
            }
            QsimError::QubitOutOfRange { qubit, n_qubits } => {
                write!(f, "qubit index {qubit} out of range for {n_qubits} qubits")
            }
            QsimError::ControlEqualsTarget { qubit } => {
                write!(f, "control and target coincide on qubit {qubit}")
            }
        }
    }
}

impl core::error::Error for QsimError {}

impl FeatureMapSpec {
    /// Validated constructor; enforces the family/entanglement compatibility
    /// rules and the register-size cap.
    pub fn new(
        family: FeatureMapFamily,
        n_qubits: usize,
        reps: usize,
        entanglement: Entanglement,
    ) -> Result<Self, QsimError> {
        let spec = FeatureMapSpec {
            family,
            n_qubits,
            reps,
            entanglement,
            pauli_strings: match family {
                FeatureMapFamily::Pauli => ["Z", "ZZ"].iter().map(|s| s.to_string()).collect(),
                _ => Vec::new(),
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Replaces the Pauli labels (Pauli family only) and re-validates.
    pub fn with_pauli_strings(mut self, strings: &[&str]) -> Result<Self, QsimError> {
        self.pauli_strings = strings.iter().map(|s| s.to_string()).collect();
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), QsimError> {
        if self.n_qubits < 1 || self.n_qubits > MAX_QUBITS {
            return Err(QsimError::InvalidQubitCount {
                n_qubits: self.n_qubits,
            });
        }
        if self.reps < 1 {
            return Err(QsimError::InvalidReps);
        }
        let compatible = match self.family {
            FeatureMapFamily::Z => self.entanglement == Entanglement::None,
            FeatureMapFamily::Zz | FeatureMapFamily::Pauli => matches!(
                self.entanglement,
                Entanglement::Full | Entanglement::Circular
            ),
            FeatureMapFamily::HighDim | FeatureMapFamily::YzCx => {
                self.entanglement == Entanglement::Linear
            }
        };
        if !compatible {
            return Err(QsimError::IncompatibleEntanglement {
                family: self.family,
                entanglement: self.entanglement,
            });
        }
        if self.family == FeatureMapFamily::Pauli {
            if self.pauli_strings.is_empty() {
                return Err(QsimError::InvalidPauliString("<empty list>".to_string()));
            }
            for s in &self.pauli_strings {
                if s.is_empty()
                    || s.len() > self.n_qubits
                    || !s.chars().all(|c| matches!(c, 'X' | 'Y' | 'Z'))
                {
                    return Err(QsimError::InvalidPauliString(s.clone()));
                }
                if s.len() > 2 && self.entanglement == Entanglement::Circular {
                    // windows of width > 2 are not defined for the circular map
                    return Err(QsimError::InvalidPauliString(s.clone()));
                }
            }
        }
        if self.family == FeatureMapFamily::Zz && self.n_qubits < 2 {
            return Err(QsimError::InvalidQubitCount {
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Accepted input-vector length, or `None` when any positive length is
    /// accepted (HighDim cycles features).
    pub fn expected_input_len(&self) -> Option<usize> {
        match self.family {
            FeatureMapFamily::HighDim => None,
            _ => Some(self.n_qubits),
        }
    }

    /// FNV-1a hash of the canonical spec encoding, used in kernel provenance.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        eat(self.family.name().as_bytes());
        eat(&(self.n_qubits as u64).to_le_bytes());
        eat(&(self.reps as u64).to_le_bytes());
        eat(self.entanglement.name().as_bytes());
        for s in &self.pauli_strings {
            eat(s.as_bytes());
            eat(b"|");
        }
        h
    }
}

/// Convenience wrapper for the validated constructor.
pub fn build_feature_map(
    family: FeatureMapFamily,
    n_qubits: usize,
    reps: usize,
    entanglement: Entanglement,
) -> Result<FeatureMapSpec, QsimError> {
    FeatureMapSpec::new(family, n_qubits, reps, entanglement)
}

/// Gate set sufficient for all five encoding families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H { q: usize },
    Rx { q: usize, theta: f64 },
    Ry { q: usize, theta: f64 },
    Rz { q: usize, theta: f64 },
    /// Diagonal phase gate diag(1, e^{iθ}).
    Phase { q: usize, theta: f64 },
    Cx { control: usize, target: usize },
}

impl Gate {
    /// Exact inverse gate (rotations negate their angle; H and CX are
    /// self-inverse).
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::H { q } => Gate::H { q },
            Gate::Rx { q, theta } => Gate::Rx { q, theta: -theta },
            Gate::Ry { q, theta } => Gate::Ry { q, theta: -theta },
            Gate::Rz { q, theta } => Gate::Rz { q, theta: -theta },
            Gate::Phase { q, theta } => Gate::Phase { q, theta: -theta },
            Gate::Cx { control, target } => Gate::Cx { control, target },
        }
    }
}

/// Inverse of a gate sequence: reversed order, each gate inverted.
pub fn inverse_gates(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(Gate::inverse).collect()
}

/// Line-oriented debug export: one gate per line, `GATE q[,q2] [angle]`.
pub fn gate_list_text(gates: &[Gate]) -> String {
    let mut out = String::new();
    for g in gates {
        match *g {
            Gate::H { q } => out.push_str(&format!("H {q}\n")),
            Gate::Rx { q, theta } => out.push_str(&format!("RX {q} {theta}\n")),
            Gate::Ry { q, theta } => out.push_str(&format!("RY {q} {theta}\n")),
            Gate::Rz { q, theta } => out.push_str(&format!("RZ {q} {theta}\n")),
            Gate::Phase { q, theta } => out.push_str(&format!("P {q} {theta}\n")),
            Gate::Cx { control, target } => out.push_str(&format!("CX {control},{target}\n")),
        }
    }
    out
}

fn check_input(spec: &FeatureMapSpec, x: &[f64]) -> Result<(), QsimError> {
    match spec.expected_input_len() {
        Some(d) if x.len() != d => {
            return Err(QsimError::DimensionMismatch {
                expected: d,
                got: x.len(),
            })
        }
        None if x.is_empty() => {
            return Err(QsimError::DimensionMismatch {
                expected: 1,
                got: 0,
            })
        }
        _ => {}
    }
    for (i, v) in x.iter().enumerate() {
        if !v.is_finite() {
            return Err(QsimError::NonFiniteInput { index: i });
        }
    }
    Ok(())
}

/// Entanglement pair list for two-qubit interactions.
fn pair_list(n: usize, entanglement: Entanglement) -> Vec<[usize; 2]> {
    match entanglement {
        Entanglement::Full => {
            let mut pairs = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    pairs.push([i, j]);
                }
            }
            pairs
        }
        Entanglement::Circular => {
            let mut pairs = Vec::with_capacity(n);
            pairs.push([n - 1, 0]);
            for i in 0..(n - 1) {
                pairs.push([i, i + 1]);
            }
            pairs
        }
        Entanglement::None | Entanglement::Linear => Vec::new(),
    }
}

/// Lexicographic k-combinations of 0..n.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Index tuples a Pauli string of the given weight acts on.
fn pauli_tuples(weight: usize, n: usize, entanglement: Entanglement) -> Vec<Vec<usize>> {
    if weight == 1 {
        return (0..n).map(|q| alloc::vec![q]).collect();
    }
    if weight == 2 {
        return pair_list(n, entanglement)
            .into_iter()
            .map(|p| alloc::vec![p[0], p[1]])
            .collect();
    }
    // weight >= 3 is only reachable with full entanglement (validated above)
    combinations(n, weight)
}

/// Data map for a qubit tuple: x_i for singletons, Π (π − x_i) otherwise.
fn data_map(x: &[f64], tuple: &[usize]) -> f64 {
    if tuple.len() == 1 {
        x[tuple[0]]
    } else {
        tuple.iter().map(|&q| PI - x[q]).product()
    }
}

fn push_pauli_evolution(gates: &mut Vec<Gate>, string: &str, tuple: &[usize], angle: f64) {
    let chars: Vec<char> = string.chars().collect();
    // basis changes: X → H sandwich, Y → RX(±π/2) sandwich
    for (c, &q) in chars.iter().zip(tuple) {
        match c {
            'X' => gates.push(Gate::H { q }),
            'Y' => gates.push(Gate::Rx { q, theta: PI / 2.0 }),
            _ => {}
        }
    }
    for w in tuple.windows(2) {
        gates.push(Gate::Cx {
            control: w[0],
            target: w[1],
        });
    }
    gates.push(Gate::Phase {
        q: *tuple.last().expect("nonempty tuple"),
        theta: angle,
    });
    for w in tuple.windows(2).rev() {
        gates.push(Gate::Cx {
            control: w[0],
            target: w[1],
        });
    }
    for (c, &q) in chars.iter().zip(tuple) {
        match c {
            'X' => gates.push(Gate::H { q }),
            'Y' => gates.push(Gate::Rx {
                q,
                theta: -PI / 2.0,
            }),
            _ => {}
        }
    }
}

fn expand_pauli_like(
    spec: &FeatureMapSpec,
    x: &[f64],
    strings: &[String],
    gates: &mut Vec<Gate>,
) {
    let n = spec.n_qubits;
    for _ in 0..spec.reps {
        for q in 0..n {
            gates.push(Gate::H { q });
        }
        for s in strings {
            for tuple in pauli_tuples(s.len(), n, spec.entanglement) {
                let angle = 2.0 * data_map(x, &tuple);
                push_pauli_evolution(gates, s, &tuple, angle);
            }
        }
    }
}

/// Expands a feature map and an input vector into its deterministic gate list.
pub fn expand_gates(spec: &FeatureMapSpec, x: &[f64]) -> Result<Vec<Gate>, QsimError> {
    spec.validate()?;
    check_input(spec, x)?;
    let n = spec.n_qubits;
    let mut gates = Vec::new();
    match spec.family {
        FeatureMapFamily::Z => {
            for _ in 0..spec.reps {
                for q in 0..n {
                    gates.push(Gate::H { q });
                }
                for q in 0..n {
                    gates.push(Gate::Phase {
                        q,
                        theta: 2.0 * x[q],
                    });
                }
            }
        }
        FeatureMapFamily::Zz => {
            let strings = [String::from("Z"), String::from("ZZ")];
            expand_pauli_like(spec, x, &strings, &mut gates);
        }
        FeatureMapFamily::Pauli => {
            let strings = spec.pauli_strings.clone();
            expand_pauli_like(spec, x, &strings, &mut gates);
        }
        FeatureMapFamily::HighDim => {
            // running feature counter across layers and reps, wrapping on the
            // input length
            let d = x.len();
            let mut counter = 0usize;
            for _ in 0..spec.reps {
                for q in 0..n {
                    gates.push(Gate::Ry {
                        q,
                        theta: x[counter % d],
                    });
                    counter += 1;
                }
                for q in 0..n {
                    gates.push(Gate::Rz {
                        q,
                        theta: x[counter % d],
                    });
                    counter += 1;
                }
                for q in 0..n.saturating_sub(1) {
                    gates.push(Gate::Cx {
                        control: q,
                        target: q + 1,
                    });
                }
            }
        }
        FeatureMapFamily::YzCx => {
            for _ in 0..spec.reps {
                for q in 0..n {
                    gates.push(Gate::Ry { q, theta: x[q] });
                    gates.push(Gate::Rz { q, theta: x[q] });
                }
                for q in 0..n.saturating_sub(1) {
                    gates.push(Gate::Cx {
                        control: q,
                        target: q + 1,
                    });
                }
            }
        }
    }
    Ok(gates)
}

/// Encodes a feature vector as the state U(x)|0…0⟩.
pub fn encode_state(spec: &FeatureMapSpec, x: &[f64]) -> Result<Statevector, QsimError> {
    let gates = expand_gates(spec, x)?;
    let mut state = Statevector::zero_state(spec.n_qubits)?;
    state.apply_all(&gates)?;
    Ok(state)
}
