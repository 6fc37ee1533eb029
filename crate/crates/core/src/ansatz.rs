//! Circuit families built from rotation blocks and CNOT entangler blocks.
//!
//! `C1` with `L` layers is `L × (rotations, entangler)`. `C2` appends one more
//! rotation block with no entangler after it. Parameters are consumed
//! layer-major, then axis-major, then qubit-minor: angle
//! `(layer * |rotations| + axis) * n_qubits + qubit`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::scalar::Scalar;
use crate::statevec::{Axis, QubitIndex, StateVector, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    C1,
    C2,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::C1 => "C1",
            Family::C2 => "C2",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C1" | "c1" => Ok(Family::C1),
            "C2" | "c2" => Ok(Family::C2),
            _ => Err(config(format!("unknown circuit family {s:?}"))),
        }
    }
}

/// CNOT pattern of one entangler block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Linear,
    Circular,
    Pairwise,
    Full,
}

impl Topology {
    pub const ALL: [Topology; 4] = [
        Topology::Linear,
        Topology::Circular,
        Topology::Pairwise,
        Topology::Full,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Topology::Linear => "linear",
            Topology::Circular => "circular",
            Topology::Pairwise => "pairwise",
            Topology::Full => "full",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Topology::Linear),
            "circular" => Ok(Topology::Circular),
            "pairwise" => Ok(Topology::Pairwise),
            "full" => Ok(Topology::Full),
            _ => Err(config(format!("unknown topology {s:?}"))),
        }
    }
}

/// Ordered `(control, target)` CNOT pairs of one entangler block.
///
/// - linear: `(0,1), (1,2), …, (n-2,n-1)`
/// - circular: `(n-1,0)` then the linear chain
/// - pairwise: `(0,1), (2,3), …` then `(1,2), (3,4), …` closed by `(n-1,0)` when `n > 2`
/// - full: every `(i,j)` with `i < j`, lexicographic
pub fn entangler_pairs(topology: Topology, n_qubits: usize) -> Result<Vec<(usize, usize)>> {
    if n_qubits < 2 {
        return Err(config(format!(
            "entangler needs at least 2 qubits, got {n_qubits}"
        )));
    }
    let n = n_qubits;
    let linear = (0..n - 1).map(|i| (i, i + 1));
    let pairs = match topology {
        Topology::Linear => linear.collect(),
        Topology::Circular => std::iter::once((n - 1, 0)).chain(linear).collect(),
        Topology::Pairwise => {
            let mut pairs: Vec<_> = linear.clone().step_by(2).collect();
            pairs.extend(linear.skip(1).step_by(2));
            if n > 2 {
                pairs.push((n - 1, 0));
            }
            pairs
        }
        Topology::Full => (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect(),
    };
    Ok(pairs)
}

/// One to three rotation axes applied per block, in order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RotationSequence(Vec<Axis>);

impl RotationSequence {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(config(format!(
                "rotation sequence must have 1 to 3 axes, got {}",
                axes.len()
            )));
        }
        Ok(RotationSequence(axes))
    }

    pub fn axes(&self) -> &[Axis] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for RotationSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for axis in &self.0 {
            write!(f, "{axis}")?;
        }
        Ok(())
    }
}

impl FromStr for RotationSequence {
    type Err = Error;

    /// Parses `"x"`, `"xy"`, `"zyx"`, …
    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .chars()
            .map(|c| Axis::from_char(c).ok_or_else(|| config(format!("bad rotation {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        RotationSequence::new(axes)
    }
}

/// Immutable description of a circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub struct AnsatzSpec {
    family: Family,
    n_qubits: usize,
    layers: usize,
    rotations: RotationSequence,
    topology: Topology,
    pairs: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    family: Family,
    qubits: usize,
    layers: usize,
    rotations: String,
    topology: Topology,
}

impl TryFrom<SpecJson> for AnsatzSpec {
    type Error = Error;

    fn try_from(raw: SpecJson) -> Result<Self> {
        AnsatzSpec::new(
            raw.family,
            raw.qubits,
            raw.layers,
            raw.rotations.parse()?,
            raw.topology,
        )
    }
}

impl From<AnsatzSpec> for SpecJson {
    fn from(spec: AnsatzSpec) -> Self {
        SpecJson {
            family: spec.family,
            qubits: spec.n_qubits,
            layers: spec.layers,
            rotations: spec.rotations.to_string(),
            topology: spec.topology,
        }
    }
}

impl AnsatzSpec {
    pub fn new(
        family: Family,
        n_qubits: usize,
        layers: usize,
        rotations: RotationSequence,
        topology: Topology,
    ) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(config(format!(
                "n_qubits must be at most {MAX_QUBITS}, got {n_qubits}"
            )));
        }
        if layers == 0 {
            return Err(config("layers must be at least 1"));
        }
        let pairs = entangler_pairs(topology, n_qubits)?;
        Ok(AnsatzSpec {
            family,
            n_qubits,
            layers,
            rotations,
            topology,
            pairs,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn rotations(&self) -> &RotationSequence {
        &self.rotations
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn entangler(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Number of rotation blocks: `layers` for C1, `layers + 1` for C2.
    pub fn rotation_blocks(&self) -> usize {
        match self.family {
            Family::C1 => self.layers,
            Family::C2 => self.layers + 1,
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.n_qubits * self.rotations.len() * self.rotation_blocks()
    }

    /// Runs the circuit on `state` in place.
    pub fn apply<T: Scalar>(&self, params: &[T], state: &mut StateVector<T>) -> Result<()> {
        if params.len() != self.parameter_count() {
            return Err(config(format!(
                "expected {} parameters, got {}",
                self.parameter_count(),
                params.len()
            )));
        }
        if state.n_qubits() != self.n_qubits {
            return Err(config(format!(
                "circuit has {} qubits but state has {}",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        let mut angles = params.iter().copied();
        for block in 0..self.rotation_blocks() {
            for &axis in self.rotations.axes() {
                for q in 0..self.n_qubits {
                    let angle = angles.next().expect("length checked above");
                    state.apply_rotation(axis, QubitIndex(q), angle)?;
                }
            }
            if block < self.layers {
                self.apply_entangler(state)?;
            }
        }
        debug_assert!(angles.next().is_none());
        Ok(())
    }

    /// Runs one entangler block on `state`.
    pub fn apply_entangler<T: Scalar>(&self, state: &mut StateVector<T>) -> Result<()> {
        for &(c, t) in &self.pairs {
            state.apply_cnot(QubitIndex(c), QubitIndex(t))?;
        }
        Ok(())
    }

    /// Output state for `params` on `|0…0⟩`.
    pub fn prepare<T: Scalar>(&self, params: &[T]) -> Result<StateVector<T>> {
        let mut state = StateVector::zero_state(self.n_qubits)?;
        self.apply(params, &mut state)?;
        Ok(state)
    }
}

impl fmt::Display for AnsatzSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}q/{}L/{}/{}",
            self.family, self.n_qubits, self.layers, self.rotations, self.topology
        )
    }
}

/// Rotation angles in radians, laid out as documented at module level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector<T: Scalar = f64>(pub Vec<T>);

impl<T: Scalar> ParameterVector<T> {
    pub fn zeros(spec: &AnsatzSpec) -> Self {
        ParameterVector(vec![T::zero(); spec.parameter_count()])
    }

    pub fn filled(spec: &AnsatzSpec, angle: T) -> Self {
        ParameterVector(vec![angle; spec.parameter_count()])
    }

    /// Flat index of the angle for `(block, axis, qubit)`.
    pub fn index_of(spec: &AnsatzSpec, block: usize, axis: usize, qubit: usize) -> usize {
        (block * spec.rotations.len() + axis) * spec.n_qubits + qubit
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Convenience: applies `spec` to `initial` and returns the output state.
pub fn apply_ansatz<T: Scalar>(
    spec: &AnsatzSpec,
    params: &ParameterVector<T>,
    initial: &StateVector<T>,
) -> Result<StateVector<T>> {
    let mut state = initial.clone();
    spec.apply(params.as_slice(), &mut state)?;
    Ok(state)
}
