use rand::Rng;

use crate::error::{config, Result};
use crate::scalar::Scalar;

pub const HIDDEN_WIDTH: usize = 32;
pub const LEAKY_SLOPE: f64 = 0.01;

/// Dense `1 → 32 → 1` network: leaky ReLU hidden layer, logistic output.
///
/// Flat parameter layout is `[w1; 32] [b1; 32] [w2; 32] [b2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Discriminator<T: Scalar = f64> {
    pub w1: Vec<T>,
    pub b1: Vec<T>,
    pub w2: Vec<T>,
    pub b2: T,
}

/// `ln(1 + e^x)` without overflow.
fn softplus<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn logistic<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

impl<T: Scalar> Discriminator<T> {
    pub const N_PARAMS: usize = 3 * HIDDEN_WIDTH + 1;

    pub fn zeros() -> Self {
        Discriminator {
            w1: vec![T::zero(); HIDDEN_WIDTH],
            b1: vec![T::zero(); HIDDEN_WIDTH],
            w2: vec![T::zero(); HIDDEN_WIDTH],
            b2: T::zero(),
        }
    }

    /// Uniform fan-in initialization: `w1 ~ U(-1, 1)`, `w2 ~ U(-1/√32, 1/√32)`,
    /// hidden biases `U(-1, 1)` so the ReLU kinks spread over the input range.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let bound2 = 1.0 / (HIDDEN_WIDTH as f64).sqrt();
        let mut draw = |bound: f64| T::lit(rng.gen_range(-bound..bound));
        let w1 = (0..HIDDEN_WIDTH).map(|_| draw(1.0)).collect();
        let b1 = (0..HIDDEN_WIDTH).map(|_| draw(1.0)).collect();
        let w2 = (0..HIDDEN_WIDTH).map(|_| draw(bound2)).collect();
        Discriminator {
            w1,
            b1,
            w2,
            b2: T::zero(),
        }
    }

    pub fn params(&self) -> Vec<T> {
        let mut flat = Vec::with_capacity(Self::N_PARAMS);
        flat.extend_from_slice(&self.w1);
        flat.extend_from_slice(&self.b1);
        flat.extend_from_slice(&self.w2);
        flat.push(self.b2);
        flat
    }

    pub fn set_params(&mut self, flat: &[T]) -> Result<()> {
        if flat.len() != Self::N_PARAMS {
            return Err(config(format!(
                "discriminator has {} parameters, got {}",
                Self::N_PARAMS,
                flat.len()
            )));
        }
        let h = HIDDEN_WIDTH;
        self.w1.copy_from_slice(&flat[..h]);
        self.b1.copy_from_slice(&flat[h..2 * h]);
        self.w2.copy_from_slice(&flat[2 * h..3 * h]);
        self.b2 = flat[3 * h];
        Ok(())
    }

    fn hidden(&self, x: T) -> impl Iterator<Item = (T, T)> + '_ {
        let slope = T::lit(LEAKY_SLOPE);
        self.w1.iter().zip(&self.b1).map(move |(&w, &b)| {
            let z = w * x + b;
            if z > T::zero() {
                (z, T::one())
            } else {
                (slope * z, slope)
            }
        })
    }

    /// Pre-activation of the output unit.
    pub fn logit(&self, x: T) -> T {
        self.hidden(x)
            .zip(&self.w2)
            .map(|((h, _), &w)| w * h)
            .sum::<T>()
            + self.b2
    }

    pub fn forward(&self, x: T) -> T {
        logistic(self.logit(x))
    }

    /// `ln D(x)`, stable for saturated outputs.
    pub fn log_output(&self, x: T) -> T {
        -softplus(-self.logit(x))
    }

    /// Mean binary cross-entropy over `(inputs, labels)` with labels in `{0, 1}`.
    pub fn bce_loss(&self, inputs: &[T], labels: &[T]) -> T {
        assert_eq!(inputs.len(), labels.len());
        let total: T = inputs
            .iter()
            .zip(labels)
            .map(|(&x, &t)| {
                let z = self.logit(x);
                t * softplus(-z) + (T::one() - t) * softplus(z)
            })
            .sum();
        total / T::lit(inputs.len() as f64)
    }

    /// Gradient of [`Self::bce_loss`] in the flat parameter layout.
    pub fn gradients(&self, inputs: &[T], labels: &[T]) -> Vec<T> {
        assert_eq!(inputs.len(), labels.len());
        let h = HIDDEN_WIDTH;
        let mut grad = vec![T::zero(); Self::N_PARAMS];
        let scale = T::one() / T::lit(inputs.len() as f64);
        for (&x, &t) in inputs.iter().zip(labels) {
            let hidden: Vec<(T, T)> = self.hidden(x).collect();
            let z = hidden
                .iter()
                .zip(&self.w2)
                .map(|(&(a, _), &w)| w * a)
                .sum::<T>()
                + self.b2;
            let delta = (logistic(z) - t) * scale;
            for (k, &(a, da)) in hidden.iter().enumerate() {
                let back = delta * self.w2[k] * da;
                grad[k] += back * x;
                grad[h + k] += back;
                grad[2 * h + k] += delta * a;
            }
            grad[3 * h] += delta;
        }
        grad
    }
}
