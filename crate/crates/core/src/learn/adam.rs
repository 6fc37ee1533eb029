use crate::error::{config, Error, Result};
use crate::scalar::Scalar;

/// Bias-corrected Adam.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T: Scalar = f64> {
    pub step: u64,
    pub first_moment: Vec<T>,
    pub second_moment: Vec<T>,
    pub learning_rate: T,
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
}

impl<T: Scalar> AdamState<T> {
    /// Canonical constants `β1 = 0.9, β2 = 0.999, ε = 1e-8`.
    pub fn new(n_params: usize, learning_rate: T) -> Self {
        AdamState {
            step: 0,
            first_moment: vec![T::zero(); n_params],
            second_moment: vec![T::zero(); n_params],
            learning_rate,
            beta1: T::lit(0.9),
            beta2: T::lit(0.999),
            epsilon: T::lit(1e-8),
        }
    }

    /// One update of `params` in place.
    pub fn step(&mut self, params: &mut [T], grads: &[T]) -> Result<()> {
        let n = self.first_moment.len();
        if params.len() != n || grads.len() != n {
            return Err(config(format!(
                "Adam sized for {n} parameters, got {} params and {} grads",
                params.len(),
                grads.len()
            )));
        }
        if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
            return Err(Error::Diverged(format!(
                "non-finite gradient component {i}: {}",
                grads[i]
            )));
        }
        self.step += 1;
        let t = self.step as i32;
        let one = T::one();
        let bias1 = one - self.beta1.powi(t);
        let bias2 = one - self.beta2.powi(t);
        for i in 0..n {
            let g = grads[i];
            self.first_moment[i] = self.beta1 * self.first_moment[i] + (one - self.beta1) * g;
            self.second_moment[i] = self.beta2 * self.second_moment[i] + (one - self.beta2) * g * g;
            let m_hat = self.first_moment[i] / bias1;
            let v_hat = self.second_moment[i] / bias2;
            params[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut adam = AdamState::new(3, 0.01);
        let mut params = vec![0.5, -1.0, 2.0];
        adam.step(&mut params, &[0.0; 3]).unwrap();
        assert_eq!(params, vec![0.5, -1.0, 2.0]);
        assert_eq!(adam.step, 1);
    }

    #[test]
    fn first_step_closed_form() {
        let lr = 0.01_f64;
        let grads = [0.3_f64, -2.0, 1e-3];
        let mut adam = AdamState::new(3, lr);
        let mut params = vec![1.0; 3];
        adam.step(&mut params, &grads).unwrap();
        for (p, g) in params.iter().zip(grads) {
            let expected = 1.0 - lr * g / (g.abs() + 1e-8);
            assert!((p - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_gradient_decreases_by_lr_per_step() {
        // scalar oracle: with constant g, m̂ = g and v̂ = g² exactly,
        // so every step moves by lr·g/(|g|+ε)
        let lr = 0.01_f64;
        let mut adam = AdamState::new(1, lr);
        let mut p = vec![0.0_f64];
        let mut prev = 0.0;
        for _ in 0..100 {
            adam.step(&mut p, &[1.0]).unwrap();
            let delta = prev - p[0];
            assert!(delta > 0.0);
            assert!((delta - lr / (1.0 + 1e-8)).abs() < 1e-12);
            prev = p[0];
        }
        assert!((p[0] + 100.0 * lr / (1.0 + 1e-8)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let mut adam = AdamState::new(2, 0.01);
        let mut params = vec![0.0, 0.0];
        assert!(matches!(
            adam.step(&mut params, &[1.0, f64::NAN]),
            Err(Error::Diverged(_))
        ));
        assert!(matches!(
            adam.step(&mut params, &[1.0]),
            Err(Error::Config(_))
        ));
        assert_eq!(adam.step, 0);
    }
}
