//! Learning a discrete distribution over `2^n` outcomes with the circuit as
//! generator: adversarially (QGAN) or by minimizing squared Hellinger distance
//! directly.

use std::time::Instant;

use rand::distributions::{Distribution as _, WeightedIndex};

use crate::ansatz::AnsatzSpec;
use crate::error::{config, Error, Result};
use crate::metrics::hellinger;
use crate::rng::{stream_rng, uniform_angles};
use crate::scalar::Scalar;
use crate::statevec::StateVector;

use super::adam::AdamState;
use super::discriminator::Discriminator;
use super::gradient::{output_probabilities, probability_jacobian};
use super::report::TrainReport;

/// Generator starting point.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamInit {
    /// Uniform on `[0, 2π)` from the run seed.
    Uniform,
    Constant(f64),
    Given(Vec<f64>),
}

impl ParamInit {
    pub(crate) fn build<T: Scalar>(&self, spec: &AnsatzSpec, seed: u64) -> Result<Vec<T>> {
        let p = spec.parameter_count();
        match self {
            ParamInit::Uniform => Ok(uniform_angles(&mut stream_rng(seed, 0), p)),
            ParamInit::Constant(v) => Ok(vec![T::lit(*v); p]),
            ParamInit::Given(v) if v.len() == p => Ok(v.iter().map(|&x| T::lit(x)).collect()),
            ParamInit::Given(v) => Err(config(format!(
                "initial parameters have length {}, circuit needs {p}",
                v.len()
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributionConfig {
    pub epochs: usize,
    /// Alternating (discriminator, generator) updates per epoch; the direct
    /// trainer takes this many Adam steps per epoch.
    pub steps_per_epoch: usize,
    /// Samples drawn from each of target and generator per discriminator step.
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub init: ParamInit,
}

impl Default for DistributionConfig {
    fn default() -> Self {
        DistributionConfig {
            epochs: 50,
            steps_per_epoch: 10,
            batch_size: 32,
            learning_rate: 0.01,
            seed: 0,
            init: ParamInit::Uniform,
        }
    }
}

impl DistributionConfig {
    fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.steps_per_epoch == 0 || self.batch_size == 0 {
            return Err(config("epochs, steps_per_epoch and batch_size must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(config(format!("bad learning rate {}", self.learning_rate)));
        }
        Ok(())
    }
}

/// Discriminator input for outcome `x` of `n_outcomes`: `x / (n_outcomes - 1)`.
pub fn encode_outcome<T: Scalar>(x: usize, n_outcomes: usize) -> T {
    T::lit(x as f64 / (n_outcomes - 1) as f64)
}

fn check_target<T: Scalar>(spec: &AnsatzSpec, target: &[T]) -> Result<()> {
    let n = 1usize << spec.n_qubits();
    if target.len() != n {
        return Err(config(format!(
            "target has {} outcomes, circuit produces {n}",
            target.len()
        )));
    }
    if target.iter().any(|&t| t.partial_cmp(&T::zero()).is_none_or(|o| o == std::cmp::Ordering::Less)) {
        return Err(config("target has negative or NaN entries"));
    }
    let sum = target.iter().copied().sum::<T>().as_f64();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(config(format!("target sums to {sum}, not 1")));
    }
    Ok(())
}

fn ensure_finite(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Diverged(format!("{what} is {value}")))
    }
}

/// Adversarial training against a [`Discriminator`]. Each step the
/// discriminator takes one Adam step on BCE separating `batch_size` target
/// samples (label 1) from `batch_size` generator samples (label 0); the
/// generator then takes one Adam step on `-Σ_x p_θ(x) ln D(x)` using the exact
/// output distribution.
pub fn train_distribution_qgan<T: Scalar>(
    spec: &AnsatzSpec,
    target: &[T],
    cfg: &DistributionConfig,
) -> Result<TrainReport> {
    cfg.validate()?;
    check_target(spec, target)?;
    let start = Instant::now();
    let n_outcomes = target.len();
    let initial = StateVector::<T>::zero_state(spec.n_qubits())?;
    let inputs: Vec<T> = (0..n_outcomes).map(|x| encode_outcome(x, n_outcomes)).collect();

    let mut gen_params = cfg.init.build::<T>(spec, cfg.seed)?;
    let mut gen_opt = AdamState::new(gen_params.len(), T::lit(cfg.learning_rate));
    let mut disc = Discriminator::<T>::random(&mut stream_rng(cfg.seed, 1));
    let mut disc_params = disc.params();
    let mut disc_opt = AdamState::new(disc_params.len(), T::lit(cfg.learning_rate));

    let target_f64: Vec<f64> = target.iter().map(|t| t.as_f64()).collect();
    let target_sampler = WeightedIndex::new(&target_f64)
        .map_err(|e| config(format!("target cannot be sampled: {e}")))?;
    let mut sample_rng = stream_rng(cfg.seed, 2);

    let mut labels = vec![T::one(); cfg.batch_size];
    labels.extend(std::iter::repeat_n(T::zero(), cfg.batch_size));
    let mut batch = Vec::with_capacity(2 * cfg.batch_size);

    let mut losses = Vec::with_capacity(cfg.epochs);
    let mut trace = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        let mut epoch_loss = 0.0;
        for _ in 0..cfg.steps_per_epoch {
            let probs = output_probabilities(spec, &gen_params, &initial)?;

            let probs_f64: Vec<f64> = probs.iter().map(|p| p.as_f64().max(0.0)).collect();
            let gen_sampler = WeightedIndex::new(&probs_f64)
                .map_err(|e| Error::Diverged(format!("generator distribution invalid: {e}")))?;
            batch.clear();
            batch.extend((0..cfg.batch_size).map(|_| inputs[target_sampler.sample(&mut sample_rng)]));
            batch.extend((0..cfg.batch_size).map(|_| inputs[gen_sampler.sample(&mut sample_rng)]));
            ensure_finite(disc.bce_loss(&batch, &labels).as_f64(), "discriminator loss")?;
            let disc_grad = disc.gradients(&batch, &labels);
            disc_opt.step(&mut disc_params, &disc_grad)?;
            disc.set_params(&disc_params)?;

            let log_d: Vec<T> = inputs.iter().map(|&x| disc.log_output(x)).collect();
            let gen_loss: T = -probs.iter().zip(&log_d).map(|(&p, &l)| p * l).sum::<T>();
            epoch_loss += ensure_finite(gen_loss.as_f64(), "generator loss")?;
            let neg_log_d: Vec<T> = log_d.iter().map(|&l| -l).collect();
            let jac = probability_jacobian(spec, &gen_params, &initial)?;
            gen_opt.step(&mut gen_params, &jac.pullback(&neg_log_d))?;
        }
        losses.push(epoch_loss / cfg.steps_per_epoch as f64);
        let probs = output_probabilities(spec, &gen_params, &initial)?;
        trace.push(hellinger(target, &probs)?.as_f64());
    }

    let final_metric = *trace.last().expect("epochs > 0");
    Ok(TrainReport {
        task: "qgan".into(),
        spec: spec.clone(),
        seed: cfg.seed,
        epochs: cfg.epochs,
        losses,
        final_metric,
        wall_time_s: start.elapsed().as_secs_f64(),
        metric_trace: trace,
    })
}

/// Non-adversarial baseline: Adam on `H²(target, p_θ) = 1 - Σ sqrt(t_x p_x)`
/// with gradient `-Σ_x ∂p_x/∂θ · sqrt(t_x / max(p_x, 1e-12)) / 2`.
pub fn train_distribution_direct<T: Scalar>(
    spec: &AnsatzSpec,
    target: &[T],
    cfg: &DistributionConfig,
) -> Result<TrainReport> {
    cfg.validate()?;
    check_target(spec, target)?;
    let start = Instant::now();
    let initial = StateVector::<T>::zero_state(spec.n_qubits())?;
    let mut params = cfg.init.build::<T>(spec, cfg.seed)?;
    let mut opt = AdamState::new(params.len(), T::lit(cfg.learning_rate));
    let floor = T::lit(1e-12);
    let half = T::lit(0.5);

    let mut losses = Vec::with_capacity(cfg.epochs);
    let mut trace = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        let mut epoch_loss = 0.0;
        for _ in 0..cfg.steps_per_epoch {
            let probs = output_probabilities(spec, &params, &initial)?;
            let h = hellinger(target, &probs)?;
            epoch_loss += ensure_finite((h * h).as_f64(), "squared Hellinger loss")?;
            let weights: Vec<T> = target
                .iter()
                .zip(&probs)
                .map(|(&t, &p)| -(t / p.max(floor)).sqrt() * half)
                .collect();
            let jac = probability_jacobian(spec, &params, &initial)?;
            opt.step(&mut params, &jac.pullback(&weights))?;
        }
        losses.push(epoch_loss / cfg.steps_per_epoch as f64);
        let probs = output_probabilities(spec, &params, &initial)?;
        trace.push(hellinger(target, &probs)?.as_f64());
    }

    let final_metric = *trace.last().expect("epochs > 0");
    Ok(TrainReport {
        task: "direct".into(),
        spec: spec.clone(),
        seed: cfg.seed,
        epochs: cfg.epochs,
        losses,
        final_metric,
        wall_time_s: start.elapsed().as_secs_f64(),
        metric_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{Family, Topology};
    use std::f64::consts::FRAC_PI_2;

    fn spec(n: usize, layers: usize, rot: &str, top: Topology) -> AnsatzSpec {
        AnsatzSpec::new(Family::C1, n, layers, rot.parse().unwrap(), top).unwrap()
    }

    fn point_mass(n: usize) -> Vec<f64> {
        let mut t = vec![0.0; n];
        t[0] = 1.0;
        t
    }

    #[test]
    fn point_mass_target_is_already_optimal() {
        let s = spec(6, 1, "y", Topology::Linear);
        let cfg = DistributionConfig {
            epochs: 5,
            init: ParamInit::Constant(0.0),
            ..Default::default()
        };
        let qgan = train_distribution_qgan(&s, &point_mass(64), &cfg).unwrap();
        assert!(qgan.metric_trace.iter().all(|&h| h <= 0.05));
        assert!(qgan.final_metric <= 0.05);
        let direct = train_distribution_direct(&s, &point_mass(64), &cfg).unwrap();
        assert!(direct.final_metric < 1e-12);
    }

    #[test]
    fn uniform_target_is_matched_at_half_pi_init() {
        // Ry(π/2) on every qubit gives the uniform superposition; CNOTs permute it.
        let s = spec(6, 1, "y", Topology::Linear);
        let uniform = vec![1.0 / 64.0; 64];
        let probs = output_probabilities(
            &s,
            &[FRAC_PI_2; 6],
            &StateVector::zero_state(6).unwrap(),
        )
        .unwrap();
        assert!(hellinger(&uniform, &probs).unwrap() < 1e-7);
    }

    #[test]
    fn one_qubit_direct_toy_converges() {
        // H²(θ) = 1 - (cos(θ/2) + sin(θ/2))/√2 has its unique minimum on (0, π) at θ = π/2
        let s = AnsatzSpec::new(Family::C2, 2, 1, "y".parse().unwrap(), Topology::Linear).unwrap();
        // use qubit 1 only: target [0.5, 0.5] on qubit 1, qubit 0 pinned at |0⟩
        let target = vec![0.5, 0.5, 0.0, 0.0];
        let cfg = DistributionConfig {
            epochs: 200,
            steps_per_epoch: 1,
            learning_rate: 0.05,
            init: ParamInit::Given(vec![0.0, 0.3, 0.0, 0.0]),
            ..Default::default()
        };
        let report = train_distribution_direct(&s, &target, &cfg).unwrap();
        assert!(report.final_metric < 0.01, "{}", report.final_metric);
    }

    #[test]
    fn rejects_bad_targets() {
        let s = spec(2, 1, "x", Topology::Linear);
        let cfg = DistributionConfig::default();
        assert!(train_distribution_qgan(&s, &[0.5, 0.5], &cfg).is_err());
        assert!(train_distribution_direct(&s, &[0.5, 0.5, 0.5, 0.5], &cfg).is_err());
        let bad = DistributionConfig {
            learning_rate: f64::NAN,
            ..Default::default()
        };
        assert!(train_distribution_direct(&s, &[0.25; 4], &bad).is_err());
        let wrong = DistributionConfig {
            init: ParamInit::Given(vec![0.0]),
            ..Default::default()
        };
        assert!(train_distribution_qgan(&s, &[0.25; 4], &wrong).is_err());
    }
}
