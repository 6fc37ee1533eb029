use rayon::prelude::*;

use crate::ansatz::AnsatzSpec;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::statevec::StateVector;

/// Outcome probabilities of `spec(params)` applied to `initial`.
pub fn output_probabilities<T: Scalar>(
    spec: &AnsatzSpec,
    params: &[T],
    initial: &StateVector<T>,
) -> Result<Vec<T>> {
    let mut state = initial.clone();
    spec.apply(params, &mut state)?;
    Ok(state.probabilities())
}

/// `∂p(x)/∂θ_j`, stored column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct Jacobian<T: Scalar = f64> {
    n_outcomes: usize,
    n_params: usize,
    data: Vec<T>,
}

impl<T: Scalar> Jacobian<T> {
    pub fn n_outcomes(&self) -> usize {
        self.n_outcomes
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn get(&self, outcome: usize, param: usize) -> T {
        self.data[param * self.n_outcomes + outcome]
    }

    pub fn column(&self, param: usize) -> &[T] {
        &self.data[param * self.n_outcomes..(param + 1) * self.n_outcomes]
    }

    /// `Σ_x weights[x] · ∂p(x)/∂θ_j` for every `j`.
    pub fn pullback(&self, weights: &[T]) -> Vec<T> {
        assert_eq!(weights.len(), self.n_outcomes);
        (0..self.n_params)
            .map(|j| {
                self.column(j)
                    .iter()
                    .zip(weights)
                    .map(|(&d, &w)| d * w)
                    .sum()
            })
            .collect()
    }
}

fn shifted_column<T: Scalar>(
    spec: &AnsatzSpec,
    params: &[T],
    initial: &StateVector<T>,
    j: usize,
) -> Result<Vec<T>> {
    let shift = T::FRAC_PI_2();
    let mut shifted = params.to_vec();
    shifted[j] = params[j] + shift;
    let plus = output_probabilities(spec, &shifted, initial)?;
    shifted[j] = params[j] - shift;
    let minus = output_probabilities(spec, &shifted, initial)?;
    let half = T::lit(0.5);
    Ok(plus
        .into_iter()
        .zip(minus)
        .map(|(a, b)| (a - b) * half)
        .collect())
}

fn assemble<T: Scalar>(n_outcomes: usize, columns: Vec<Vec<T>>) -> Jacobian<T> {
    Jacobian {
        n_outcomes,
        n_params: columns.len(),
        data: columns.into_iter().flatten().collect(),
    }
}

/// Parameter-shift Jacobian of the outcome distribution,
/// `∂p/∂θ_j = (p(θ_j + π/2) − p(θ_j − π/2)) / 2`. Columns are evaluated in parallel.
pub fn probability_jacobian<T: Scalar>(
    spec: &AnsatzSpec,
    params: &[T],
    initial: &StateVector<T>,
) -> Result<Jacobian<T>> {
    // validates lengths before fanning out
    output_probabilities(spec, params, initial)?;
    let columns = (0..params.len())
        .into_par_iter()
        .map(|j| shifted_column(spec, params, initial, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(initial.dim(), columns))
}

/// Single-threaded variant for callers that already parallelize over samples.
pub(crate) fn probability_jacobian_serial<T: Scalar>(
    spec: &AnsatzSpec,
    params: &[T],
    initial: &StateVector<T>,
) -> Result<Jacobian<T>> {
    let columns = (0..params.len())
        .map(|j| shifted_column(spec, params, initial, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(initial.dim(), columns))
}
