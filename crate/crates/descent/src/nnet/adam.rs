//! Adam optimizer state.

/// Adam with bias correction. Moment vectors are part of the training state
/// and are stored in checkpoints, so training resumes exactly.
#[derive(Clone, Debug)]
pub struct Adam {
    pub(crate) m: Vec<f32>,
    pub(crate) v: Vec<f32>,
    pub(crate) step: u64,
    pub beta1: f32,
    pub beta2: f32,
    pub epsilon: f32,
}

impl Adam {
    /// Fresh state for `count` parameters with the standard coefficients.
    pub fn new(count: usize) -> Adam {
        Adam {
            m: vec![0.0; count],
            v: vec![0.0; count],
            step: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    /// Number of updates applied so far.
    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Apply one update of `grad` to `params` with learning rate `lr`.
    pub fn update(&mut self, params: &mut [f32], grad: &[f32], lr: f32) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grad.len(), self.m.len());
        self.step += 1;
        let b1c = 1.0 - self.beta1.powi(self.step.min(i32::MAX as u64) as i32);
        let b2c = 1.0 - self.beta2.powi(self.step.min(i32::MAX as u64) as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / b1c;
            let v_hat = self.v[i] / b2c;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}
