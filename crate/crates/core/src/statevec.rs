//! Dense statevector simulation.
//!
//! Basis states are indexed with qubit 0 as the most significant bit, so
//! `|q0 q1 … q(n-1)⟩` maps to the integer whose binary digits read left to
//! right. Rotations follow `R_a(θ) = exp(-i θ σ_a / 2)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::scalar::Scalar;

/// Largest register this simulator accepts.
pub const MAX_QUBITS: usize = 16;

/// Pauli axis of a single-qubit rotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn as_char(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    pub fn from_char(c: char) -> Option<Axis> {
        match c.to_ascii_lowercase() {
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            'z' => Some(Axis::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next().and_then(Axis::from_char), chars.next()) {
            (Some(axis), None) => Ok(axis),
            _ => Err(config(format!("unknown rotation axis {s:?}"))),
        }
    }
}

/// Index of a qubit inside a register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitIndex(pub usize);

impl From<usize> for QubitIndex {
    fn from(index: usize) -> Self {
        QubitIndex(index)
    }
}

/// Normalized pure state of `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Scalar = f64> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

fn check_qubit_count(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(config(format!(
            "n_qubits must be in 1..={MAX_QUBITS}, got {n_qubits}"
        )));
    }
    Ok(())
}

impl<T: Scalar> StateVector<T> {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amplitudes[0] = Complex::new(T::one(), T::zero());
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        let mut state = Self::zero_state(n_qubits)?;
        if index >= state.dim() {
            return Err(config(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        state.amplitudes[0] = Complex::new(T::zero(), T::zero());
        state.amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(state)
    }

    /// Wraps raw amplitudes. The length must be a power of two; the caller
    /// is responsible for normalization.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(config(format!(
                "amplitude vector length {len} is not a power of two >= 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubit_count(n_qubits)?;
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    /// Amplitude embedding: `data / ||data||₂` as a real-valued state.
    pub fn amplitude_embed(data: &[T]) -> Result<Self> {
        let len = data.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(config(format!(
                "embedding length {len} is not a power of two >= 2"
            )));
        }
        let norm = data.iter().map(|&x| x * x).sum::<T>().sqrt();
        if norm.as_f64().partial_cmp(&1e-12) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::DegenerateInput(format!(
                "embedding vector has norm {norm}"
            )));
        }
        Self::from_amplitudes(
            data.iter()
                .map(|&x| Complex::new(x / norm, T::zero()))
                .collect(),
        )
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(n_qubits: usize) -> Result<Self> {
        let mut state = Self::zero_state(n_qubits)?;
        let h = T::FRAC_1_SQRT_2();
        let last = state.dim() - 1;
        state.amplitudes[0] = Complex::new(h, T::zero());
        state.amplitudes[last] = Complex::new(h, T::zero());
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    fn check_qubit(&self, qubit: QubitIndex) -> Result<()> {
        if qubit.0 >= self.n_qubits {
            return Err(Error::Index {
                index: qubit.0,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    #[inline]
    fn mask(&self, qubit: QubitIndex) -> usize {
        1 << (self.n_qubits - 1 - qubit.0)
    }

    /// Applies `R_axis(angle)` to `qubit` in place.
    pub fn apply_rotation(&mut self, axis: Axis, qubit: QubitIndex, angle: T) -> Result<()> {
        self.check_qubit(qubit)?;
        let half = angle / T::lit(2.0);
        let (s, c) = half.sin_cos();
        let zero = T::zero();
        // [[m00, m01], [m10, m11]]
        let (m00, m01, m10, m11) = match axis {
            Axis::X => (
                Complex::new(c, zero),
                Complex::new(zero, -s),
                Complex::new(zero, -s),
                Complex::new(c, zero),
            ),
            Axis::Y => (
                Complex::new(c, zero),
                Complex::new(-s, zero),
                Complex::new(s, zero),
                Complex::new(c, zero),
            ),
            Axis::Z => (
                Complex::new(c, -s),
                Complex::new(zero, zero),
                Complex::new(zero, zero),
                Complex::new(c, s),
            ),
        };
        let mask = self.mask(qubit);
        let dim = self.dim();
        let amps = &mut self.amplitudes;
        match axis {
            Axis::Z => {
                for (i, a) in amps.iter_mut().enumerate() {
                    *a = if i & mask == 0 { *a * m00 } else { *a * m11 };
                }
            }
            _ => {
                for base in (0..dim).step_by(mask << 1) {
                    for i0 in base..base + mask {
                        let i1 = i0 | mask;
                        let a0 = amps[i0];
                        let a1 = amps[i1];
                        amps[i0] = m00 * a0 + m01 * a1;
                        amps[i1] = m10 * a0 + m11 * a1;
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies CNOT in place: amplitudes with the control bit set get the
    /// target bit flipped.
    pub fn apply_cnot(&mut self, control: QubitIndex, target: QubitIndex) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(config(format!(
                "CNOT control and target are both qubit {}",
                control.0
            )));
        }
        let cmask = self.mask(control);
        let tmask = self.mask(target);
        for i in 0..self.dim() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amplitudes.swap(i, i | tmask);
            }
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.n_qubits != other.n_qubits {
            return Err(config(format!(
                "dimension mismatch: {} vs {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            }))
    }

    /// `|⟨self|other⟩|²`, clamped to `[0, 1]`.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        let f = self.inner(other)?.norm_sqr();
        Ok(f.max(T::zero()).min(T::one()))
    }

    /// Outcome distribution `p[x] = |ψ_x|²`.
    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal distribution over `qubits`, first listed qubit most significant.
    pub fn marginal_probabilities(&self, qubits: &[QubitIndex]) -> Result<Vec<T>> {
        if qubits.is_empty() {
            return Err(config("marginal over an empty qubit set"));
        }
        for (i, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..i].contains(&q) {
                return Err(config(format!("duplicate qubit {} in marginal", q.0)));
            }
        }
        let masks: Vec<usize> = qubits.iter().map(|&q| self.mask(q)).collect();
        let mut out = vec![T::zero(); 1 << qubits.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let outcome = masks
                .iter()
                .fold(0usize, |acc, &m| (acc << 1) | usize::from(i & m != 0));
            out[outcome] += a.norm_sqr();
        }
        Ok(out)
    }

    /// `Tr[ρ_k²]` of the reduced state of qubit `k`.
    pub fn single_qubit_purity(&self, k: QubitIndex) -> Result<T> {
        let (p0, p1, coherence) = self.reduced_density(k)?;
        Ok(p0 * p0 + p1 * p1 + T::lit(2.0) * coherence)
    }

    /// `2 det ρ_k`, equal to `1 - Tr ρ_k²` for a normalized state. Exactly zero
    /// whenever qubit `k` is in a basis state, unlike the purity route.
    pub fn single_qubit_mixedness(&self, k: QubitIndex) -> Result<T> {
        let (p0, p1, coherence) = self.reduced_density(k)?;
        Ok(T::lit(2.0) * (p0 * p1 - coherence))
    }

    /// Diagonal of the reduced density matrix of qubit `k` and `|ρ01|²`.
    fn reduced_density(&self, k: QubitIndex) -> Result<(T, T, T)> {
        self.check_qubit(k)?;
        let mask = self.mask(k);
        let zero = T::zero();
        let (mut p0, mut p1) = (zero, zero);
        let mut coherence = Complex::new(zero, zero);
        for base in (0..self.dim()).step_by(mask << 1) {
            for i0 in base..base + mask {
                let a0 = self.amplitudes[i0];
                let a1 = self.amplitudes[i0 | mask];
                p0 += a0.norm_sqr();
                p1 += a1.norm_sqr();
                coherence += a0 * a1.conj();
            }
        }
        Ok((p0, p1, coherence.norm_sqr()))
    }
}
