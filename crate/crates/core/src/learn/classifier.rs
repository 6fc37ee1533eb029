//! Variational classifier on amplitude-embedded inputs.
//!
//! Forward pass: embed → circuit → marginal over the leading
//! `⌈log2 n_classes⌉` qubits → keep the first `n_classes` entries and
//! renormalize → cross-entropy.

use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::ansatz::AnsatzSpec;
use crate::data::PreparedSample;
use crate::error::{config, Error, Result};
use crate::rng::{stream_rng, uniform_in};
use crate::scalar::Scalar;
use crate::statevec::StateVector;

use super::adam::AdamState;
use super::gradient::{output_probabilities, probability_jacobian_serial};
use super::report::TrainReport;

#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierConfig {
    pub n_classes: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            n_classes: 2,
            epochs: 5,
            batch_size: 32,
            learning_rate: 0.01,
            seed: 0,
        }
    }
}

/// Number of leading qubits read out for `n_classes` classes.
pub fn readout_qubits(n_classes: usize) -> usize {
    n_classes.next_power_of_two().trailing_zeros() as usize
}

const SCORE_FLOOR: f64 = 1e-12;

/// Sums a full outcome distribution into the marginal over the leading
/// `readout` qubits (contiguous blocks with qubit 0 most significant).
fn leading_marginal<T: Scalar>(probs: &[T], readout: usize) -> Vec<T> {
    let block = probs.len() >> readout;
    probs.chunks(block).map(|c| c.iter().copied().sum()).collect()
}

/// Renormalized class scores of one embedded input.
pub fn class_scores<T: Scalar>(
    spec: &AnsatzSpec,
    params: &[T],
    amplitudes: &[T],
    n_classes: usize,
) -> Result<Vec<T>> {
    let initial = StateVector::amplitude_embed(amplitudes)?;
    let probs = output_probabilities(spec, params, &initial)?;
    let marginal = leading_marginal(&probs, readout_qubits(n_classes));
    Ok(renormalize(&marginal[..n_classes]))
}

fn renormalize<T: Scalar>(kept: &[T]) -> Vec<T> {
    let total: T = kept.iter().copied().sum();
    if total.as_f64() < SCORE_FLOOR {
        return vec![T::one() / T::lit(kept.len() as f64); kept.len()];
    }
    kept.iter().map(|&m| m / total).collect()
}

/// Index of the largest score; ties go to the lower class.
fn argmax<T: Scalar>(scores: &[T]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Cross-entropy loss and its parameter gradient for one sample.
fn sample_loss_and_grad<T: Scalar>(
    spec: &AnsatzSpec,
    params: &[T],
    sample: &PreparedSample<T>,
    n_classes: usize,
) -> Result<(f64, Vec<T>)> {
    let initial = StateVector::amplitude_embed(&sample.amplitudes)?;
    let probs = output_probabilities(spec, params, &initial)?;
    let readout = readout_qubits(n_classes);
    let marginal = leading_marginal(&probs, readout);
    let floor = T::lit(SCORE_FLOOR);
    let kept_total = marginal[..n_classes].iter().copied().sum::<T>().max(floor);
    let label_mass = marginal[sample.label].max(floor);
    let loss = -(label_mass / kept_total).ln();

    // dL/dm_c = 1/S - [c == y]/m_y for kept classes, 0 for dropped outcomes
    let class_weight: Vec<T> = (0..marginal.len())
        .map(|c| {
            if c >= n_classes {
                T::zero()
            } else if c == sample.label {
                T::one() / kept_total - T::one() / label_mass
            } else {
                T::one() / kept_total
            }
        })
        .collect();
    let block = probs.len() >> readout;
    let weights: Vec<T> = (0..probs.len()).map(|x| class_weight[x / block]).collect();
    let jac = probability_jacobian_serial(spec, params, &initial)?;
    Ok((loss.as_f64(), jac.pullback(&weights)))
}

fn accuracy<T: Scalar>(
    spec: &AnsatzSpec,
    params: &[T],
    samples: &[PreparedSample<T>],
    n_classes: usize,
) -> Result<f64> {
    let correct = samples
        .par_iter()
        .map(|s| Ok(usize::from(argmax(&class_scores(spec, params, &s.amplitudes, n_classes)?) == s.label)))
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(correct as f64 / samples.len() as f64)
}

fn check_samples<T: Scalar>(
    spec: &AnsatzSpec,
    samples: &[PreparedSample<T>],
    n_classes: usize,
    what: &str,
) -> Result<()> {
    if samples.is_empty() {
        return Err(config(format!("{what} set is empty")));
    }
    let dim = 1usize << spec.n_qubits();
    for (i, s) in samples.iter().enumerate() {
        if s.label >= n_classes {
            return Err(config(format!(
                "{what} sample {i} has label {} >= {n_classes}",
                s.label
            )));
        }
        if s.amplitudes.len() != dim {
            return Err(config(format!(
                "{what} sample {i} has {} amplitudes, circuit needs {dim}",
                s.amplitudes.len()
            )));
        }
    }
    Ok(())
}

/// Mini-batch Adam on mean cross-entropy. Parameters start uniform on
/// `[-0.1, 0.1]`; samples are reshuffled every epoch. `final_metric` is the
/// accuracy on `test`.
pub fn train_classifier<T: Scalar>(
    spec: &AnsatzSpec,
    train: &[PreparedSample<T>],
    test: &[PreparedSample<T>],
    cfg: &ClassifierConfig,
) -> Result<TrainReport> {
    let n_classes = cfg.n_classes;
    if ![2, 4, 6].contains(&n_classes) {
        return Err(config(format!("n_classes must be 2, 4 or 6, got {n_classes}")));
    }
    if readout_qubits(n_classes) > spec.n_qubits() {
        return Err(config("not enough qubits for the class readout"));
    }
    if cfg.epochs == 0 || cfg.batch_size == 0 || cfg.learning_rate.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(config("epochs, batch_size and learning_rate must be positive"));
    }
    check_samples(spec, train, n_classes, "training")?;
    check_samples(spec, test, n_classes, "test")?;
    let start = Instant::now();

    let mut params: Vec<T> = uniform_in(&mut stream_rng(cfg.seed, 0), spec.parameter_count(), -0.1, 0.1);
    let mut opt = AdamState::new(params.len(), T::lit(cfg.learning_rate));
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut losses = Vec::with_capacity(cfg.epochs);
    let mut trace = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut stream_rng(cfg.seed, 1 + epoch as u64));
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let results = batch
                .par_iter()
                .map(|&i| sample_loss_and_grad(spec, &params, &train[i], n_classes))
                .collect::<Result<Vec<_>>>()?;
            let scale = T::one() / T::lit(batch.len() as f64);
            let mut grad = vec![T::zero(); params.len()];
            for (loss, g) in results {
                if !loss.is_finite() {
                    return Err(Error::Diverged(format!("cross-entropy is {loss}")));
                }
                epoch_loss += loss;
                grad.iter_mut().zip(g).for_each(|(a, b)| *a += b * scale);
            }
            opt.step(&mut params, &grad)?;
        }
        losses.push(epoch_loss / train.len() as f64);
        trace.push(accuracy(spec, &params, test, n_classes)?);
    }

    Ok(TrainReport {
        task: "classify".into(),
        spec: spec.clone(),
        seed: cfg.seed,
        epochs: cfg.epochs,
        losses,
        final_metric: *trace.last().expect("epochs > 0"),
        wall_time_s: start.elapsed().as_secs_f64(),
        metric_trace: trace,
    })
}
