//! Expressibility, entangling capability and distribution distances.
//!
//! Expressibility is the KL divergence (nats) between the histogram of
//! fidelities `|⟨ψ(θ)|ψ(φ)⟩|²` over random parameter pairs and the binned Haar
//! fidelity law `P(F) = (N-1)(1-F)^(N-2)`. Entangling capability is the mean
//! Meyer-Wallach measure `Q = 2(1 - mean_k Tr[ρ_k²])` over random parameters.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzSpec;
use crate::error::{config, Error, Result};
use crate::rng::{stream_rng, uniform_angles};
use crate::scalar::Scalar;
use crate::statevec::{QubitIndex, StateVector};

/// Estimation hyperparameters shared by both estimators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub n_pairs: usize,
    pub n_states: usize,
    pub n_bins: usize,
    pub seed: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            n_pairs: 200_000,
            n_states: 5_000,
            n_bins: 1_000,
            seed: 0,
        }
    }
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_bins < 2 {
            return Err(config(format!("n_bins must be >= 2, got {}", self.n_bins)));
        }
        if self.n_pairs < 100 {
            return Err(config(format!("n_pairs must be >= 100, got {}", self.n_pairs)));
        }
        if self.n_states < 100 {
            return Err(config(format!(
                "n_states must be >= 100, got {}",
                self.n_states
            )));
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SamplingConfig { seed, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Expressibility,
    EntanglingCapability,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Expressibility => "expressibility",
            Metric::EntanglingCapability => "entangling_capability",
        })
    }
}

/// A sampled metric together with everything needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricEstimate {
    pub metric: Metric,
    pub value: f64,
    /// Delta-method (expressibility) or sample (entanglement) standard error.
    pub std_error: f64,
    pub spec: AnsatzSpec,
    #[serde(flatten)]
    pub config: SamplingConfig,
}

/// Haar probability mass of fidelity bin `[i/n_bins, (i+1)/n_bins)` in dimension `dim`.
pub fn haar_bin_probability(bin_index: usize, n_bins: usize, dim: usize) -> f64 {
    assert!(bin_index < n_bins && dim >= 2);
    let exponent = (dim - 1) as i32;
    let lo = bin_index as f64 / n_bins as f64;
    let hi = (bin_index + 1) as f64 / n_bins as f64;
    (1.0 - lo).powi(exponent) - (1.0 - hi).powi(exponent)
}

pub fn haar_histogram(n_bins: usize, dim: usize) -> Vec<f64> {
    (0..n_bins)
        .map(|i| haar_bin_probability(i, n_bins, dim))
        .collect()
}

/// `Σ_{p_i > 0} p_i ln(p_i / q_i)` in nats.
pub fn kl_divergence<T: Scalar>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() {
        return Err(config(format!(
            "histogram lengths differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    let mut total = T::zero();
    for (bin, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi > T::zero() {
            if qi <= T::zero() {
                return Err(Error::UndefinedDivergence { bin });
            }
            total += pi * (pi / qi).ln();
        }
    }
    Ok(total.max(T::zero()))
}

/// `sqrt(1 - Σ sqrt(p_i q_i))`, clamped to `[0, 1]`.
pub fn hellinger<T: Scalar>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() {
        return Err(config(format!(
            "distribution lengths differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    for (name, d) in [("p", p), ("q", q)] {
        let sum = d.iter().copied().sum::<T>().as_f64();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(config(format!("{name} sums to {sum}, not 1")));
        }
    }
    let overlap: T = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| (a.max(T::zero()) * b.max(T::zero())).sqrt())
        .sum();
    Ok((T::one() - overlap).max(T::zero()).sqrt().min(T::one()))
}

/// Meyer-Wallach global entanglement of a pure state.
pub fn meyer_wallach<T: Scalar>(state: &StateVector<T>) -> T {
    let n = state.n_qubits();
    let mixedness: T = (0..n)
        .map(|k| {
            state
                .single_qubit_mixedness(QubitIndex(k))
                .expect("k < n_qubits")
        })
        .sum();
    let q = T::lit(2.0) * mixedness / T::lit(n as f64);
    q.max(T::zero()).min(T::one())
}

fn fidelity_bin(f: f64, n_bins: usize) -> usize {
    ((f * n_bins as f64) as usize).min(n_bins - 1)
}

/// Histogram counts of sampled fidelities; pair `i` uses stream `i` of `seed`.
pub fn fidelity_counts<T: Scalar>(spec: &AnsatzSpec, cfg: &SamplingConfig) -> Result<Vec<u64>> {
    cfg.validate()?;
    let p = spec.parameter_count();
    (0..cfg.n_pairs as u64)
        .into_par_iter()
        .map(|i| -> Result<usize> {
            let mut rng = stream_rng(cfg.seed, i);
            let theta = uniform_angles::<T, _>(&mut rng, p);
            let phi = uniform_angles::<T, _>(&mut rng, p);
            let a = spec.prepare(&theta)?;
            let b = spec.prepare(&phi)?;
            Ok(fidelity_bin(a.fidelity(&b)?.as_f64(), cfg.n_bins))
        })
        .try_fold(
            || vec![0u64; cfg.n_bins],
            |mut counts, bin| {
                counts[bin?] += 1;
                Ok(counts)
            },
        )
        .try_reduce(
            || vec![0u64; cfg.n_bins],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )
}

/// KL value and delta-method standard error of a fidelity histogram against Haar.
pub fn expressibility_from_counts(counts: &[u64], dim: usize) -> Result<(f64, f64)> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::DegenerateInput("empty fidelity histogram".into()));
    }
    let p: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    let q = haar_histogram(counts.len(), dim);
    let kl = kl_divergence(&p, &q)?;
    let second: f64 = p
        .iter()
        .zip(&q)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| pi * (pi / qi).ln().powi(2))
        .sum();
    let var = ((second - kl * kl) / total as f64).max(0.0);
    Ok((kl, var.sqrt()))
}

pub fn estimate_expressibility_with<T: Scalar>(
    spec: &AnsatzSpec,
    cfg: &SamplingConfig,
) -> Result<MetricEstimate> {
    let counts = fidelity_counts::<T>(spec, cfg)?;
    let (value, std_error) = expressibility_from_counts(&counts, 1 << spec.n_qubits())?;
    Ok(MetricEstimate {
        metric: Metric::Expressibility,
        value,
        std_error,
        spec: spec.clone(),
        config: *cfg,
    })
}

pub fn estimate_expressibility(spec: &AnsatzSpec, cfg: &SamplingConfig) -> Result<MetricEstimate> {
    estimate_expressibility_with::<f64>(spec, cfg)
}

/// Sequential compensated sum; inputs arrive in index order so the result
/// does not depend on thread scheduling.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Per-state Meyer-Wallach values; state `i` uses stream `i` of `seed`.
pub fn entanglement_samples<T: Scalar>(spec: &AnsatzSpec, cfg: &SamplingConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let p = spec.parameter_count();
    (0..cfg.n_states as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, i);
            let theta = uniform_angles::<T, _>(&mut rng, p);
            Ok(meyer_wallach(&spec.prepare(&theta)?).as_f64())
        })
        .collect()
}

pub fn estimate_entangling_capability_with<T: Scalar>(
    spec: &AnsatzSpec,
    cfg: &SamplingConfig,
) -> Result<MetricEstimate> {
    let samples = entanglement_samples::<T>(spec, cfg)?;
    let n = samples.len() as f64;
    let mean = compensated_sum(samples.iter().copied()) / n;
    let var = compensated_sum(samples.iter().map(|q| (q - mean) * (q - mean))) / (n - 1.0);
    Ok(MetricEstimate {
        metric: Metric::EntanglingCapability,
        value: mean.clamp(0.0, 1.0),
        std_error: (var / n).sqrt(),
        spec: spec.clone(),
        config: *cfg,
    })
}

pub fn estimate_entangling_capability(
    spec: &AnsatzSpec,
    cfg: &SamplingConfig,
) -> Result<MetricEstimate> {
    estimate_entangling_capability_with::<f64>(spec, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{Family, Topology};
    use crate::statevec::Axis;
    use std::f64::consts::PI;

    #[test]
    fn haar_bins() {
        for n_bins in [2, 7, 75, 1000] {
            let h = haar_histogram(n_bins, 2);
            assert!(h.iter().all(|&x| (x - 1.0 / n_bins as f64).abs() < 1e-12));
        }
        for dim in [2, 4, 64, 1024] {
            let total: f64 = haar_histogram(75, dim).iter().sum();
            assert!((total - 1.0).abs() < 1e-14, "{dim}: {total}");
        }
        let expected = 1.0 - (1.0f64 - 1.0 / 75.0).powi(63);
        assert!((haar_bin_probability(0, 75, 64) - expected).abs() < 1e-15);
        assert!((haar_bin_probability(0, 75, 64) - 0.5708).abs() < 1e-4);
        assert!(haar_histogram(1000, 64).iter().all(|&x| x > 0.0));
    }

    #[test]
    fn kl_examples() {
        let p = [0.2, 0.3, 0.5];
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let v = kl_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-15);
        let v = kl_divergence(&[0.5, 0.5], &[0.25, 0.75]).unwrap();
        let expected = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.1438).abs() < 1e-4);
        assert!(matches!(
            kl_divergence(&[0.5, 0.5], &[1.0, 0.0]),
            Err(Error::UndefinedDivergence { bin: 1 })
        ));
        assert!(kl_divergence(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn hellinger_examples() {
        let p = [0.1, 0.2, 0.7];
        assert_eq!(hellinger(&p, &p).unwrap(), 0.0);
        assert_eq!(hellinger(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        let v = hellinger(&[0.5, 0.5], &[1.0, 0.0]).unwrap();
        assert!((v - (1.0 - 0.5f64.sqrt()).sqrt()).abs() < 1e-15);
        assert!((v - 0.5412).abs() < 1e-4);
        assert!(matches!(hellinger(&[1.0], &[0.5, 0.5]), Err(Error::Config(_))));
        assert!(hellinger(&[0.5, 0.6], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn meyer_wallach_examples() {
        let zero = StateVector::<f64>::zero_state(6).unwrap();
        assert_eq!(meyer_wallach(&zero), 0.0);
        let ghz = StateVector::<f64>::ghz(6).unwrap();
        assert!((meyer_wallach(&ghz) - 1.0).abs() < 1e-15);
        let mut bell = zero.clone();
        bell.apply_rotation(Axis::Y, QubitIndex(0), PI / 2.0).unwrap();
        bell.apply_cnot(QubitIndex(0), QubitIndex(1)).unwrap();
        // purities {0.5, 0.5, 1, 1, 1, 1}
        assert!((meyer_wallach(&bell) - 2.0 * (1.0 - 5.0 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let ok = SamplingConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            SamplingConfig { n_bins: 1, ..ok },
            SamplingConfig { n_pairs: 99, ..ok },
            SamplingConfig { n_states: 10, ..ok },
        ] {
            assert!(matches!(bad.validate(), Err(Error::Config(_))));
        }
    }

    fn small_cfg(seed: u64) -> SamplingConfig {
        SamplingConfig {
            n_pairs: 2000,
            n_states: 500,
            n_bins: 75,
            seed,
        }
    }

    #[test]
    fn z_only_circuit_has_no_entanglement() {
        let spec = AnsatzSpec::new(Family::C1, 6, 3, "z".parse().unwrap(), Topology::Full).unwrap();
        let est = estimate_entangling_capability(&spec, &small_cfg(1)).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn estimators_are_deterministic() {
        let spec = AnsatzSpec::new(Family::C1, 4, 2, "xy".parse().unwrap(), Topology::Circular)
            .unwrap();
        let a = estimate_expressibility(&spec, &small_cfg(9)).unwrap();
        let b = estimate_expressibility(&spec, &small_cfg(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        let a = estimate_entangling_capability(&spec, &small_cfg(9)).unwrap();
        let b = estimate_entangling_capability(&spec, &small_cfg(9)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn estimate_json_shape() {
        let spec = AnsatzSpec::new(Family::C1, 2, 1, "x".parse().unwrap(), Topology::Linear).unwrap();
        let est = estimate_entangling_capability(&spec, &small_cfg(3)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&est).unwrap();
        for key in ["metric", "value", "spec", "n_pairs", "n_states", "n_bins", "seed"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["metric"], "entangling_capability");
        let back: MetricEstimate = serde_json::from_value(v).unwrap();
        assert_eq!(back, est);
    }

    #[test]
    fn compensated_sum_is_accurate() {
        let values = std::iter::once(1.0).chain(std::iter::repeat_n(1e-16, 10_000));
        assert!((compensated_sum(values) - (1.0 + 1e-12)).abs() < 1e-15);
    }
}
