//! Gradient clipping and the Adam update.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Clamps every gradient entry into `[lo, hi]`.
pub fn clip_gradients<T: Scalar>(grads: &mut [Matrix<T>], lo: T, hi: T) {
    for g in grads {
        g.map_inplace(|v| v.max(lo).min(hi));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates for a list of parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    pub config: AdamConfig,
    pub t: u64,
    pub m: Vec<Matrix<T>>,
    pub v: Vec<Matrix<T>>,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(config: AdamConfig, shapes: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let (m, v) = shapes
            .into_iter()
            .map(|(r, c)| (Matrix::zeros(r, c), Matrix::zeros(r, c)))
            .unzip();
        AdamState { config, t: 0, m, v }
    }

    /// One bias-corrected Adam update with learning rate `lr`.
    pub fn step(&mut self, params: &mut [Matrix<T>], grads: &[Matrix<T>], lr: T) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::shape(
                "adam_step",
                format!(
                    "{} params, {} grads, state for {}",
                    params.len(),
                    grads.len(),
                    self.m.len()
                ),
            ));
        }
        for ((p, g), m) in params.iter().zip(grads).zip(&self.m) {
            if p.shape() != g.shape() || p.shape() != m.shape() {
                return Err(Error::shape(
                    "adam_step",
                    format!("param {:?}, grad {:?}, moment {:?}", p.shape(), g.shape(), m.shape()),
                ));
            }
        }
        self.t += 1;
        let b1 = T::from_f64_lossy(self.config.beta1);
        let b2 = T::from_f64_lossy(self.config.beta2);
        let eps = T::from_f64_lossy(self.config.eps);
        let one = T::one();
        let t = i32::try_from(self.t).unwrap_or(i32::MAX);
        let c1 = one - b1.powi(t);
        let c2 = one - b2.powi(t);
        for (((p, g), m), v) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
        {
            for (((pi, &gi), mi), vi) in p
                .data_mut()
                .iter_mut()
                .zip(g.data())
                .zip(m.data_mut().iter_mut())
                .zip(v.data_mut().iter_mut())
            {
                *mi = b1 * *mi + (one - b1) * gi;
                *vi = b2 * *vi + (one - b2) * gi * gi;
                let m_hat = *mi / c1;
                let v_hat = *vi / c2;
                *pi -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, v: &[f64]) -> Matrix<f64> {
        Matrix::from_vec(rows, cols, v.to_vec()).unwrap()
    }

    #[test]
    fn clipping_examples() {
        let mut g = vec![m(1, 3, &[3.5, -0.2, -7.0])];
        clip_gradients(&mut g, -1.0, 1.0);
        assert_eq!(g[0], m(1, 3, &[1.0, -0.2, -1.0]));
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut p = vec![m(2, 2, &[1.0, -2.0, 3.0, 0.5])];
        let before = p.clone();
        let mut state = AdamState::new(AdamConfig::default(), [(2, 2)]);
        state.step(&mut p, &[Matrix::zeros(2, 2)], 0.001).unwrap();
        assert_eq!(p, before);
        assert_eq!(state.t, 1);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        // t = 1: m_hat = g, v_hat = g^2, so the step is lr * 1 / (1 + eps).
        let mut p = vec![Matrix::<f64>::zeros(1, 3)];
        let mut state = AdamState::new(AdamConfig::default(), [(1, 3)]);
        state.step(&mut p, &[Matrix::filled(1, 3, 1.0)], 0.001).unwrap();
        for &v in p[0].data() {
            assert!((v + 0.001 / (1.0 + 1e-8)).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_gradient_gives_constant_steps() {
        let mut p = vec![Matrix::<f64>::zeros(1, 1)];
        let mut state = AdamState::new(AdamConfig::default(), [(1, 1)]);
        let g = [Matrix::filled(1, 1, 0.7)];
        let mut prev = 0.0;
        for _ in 0..5 {
            state.step(&mut p, &g, 0.01).unwrap();
            let delta = prev - p[0].item();
            assert!((delta - 0.01).abs() < 1e-9, "{delta}");
            prev = p[0].item();
        }
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let mut p = vec![Matrix::<f64>::zeros(1, 2)];
        let mut state = AdamState::new(AdamConfig::default(), [(1, 2)]);
        assert!(state.step(&mut p, &[Matrix::zeros(2, 1)], 0.1).is_err());
        assert!(state.step(&mut p, &[], 0.1).is_err());
        assert_eq!(state.t, 0);
    }
}
