//! The engine-facing network bundle: f32 net, Adam state, training step.

use super::{Adam, Architecture, Net, Scalar};

/// Hyperparameters of one training step.
#[derive(Clone, Copy, Debug)]
pub struct TrainConfig {
    /// Samples per optimizer update; the last batch may be smaller.
    pub batch_size: usize,
    /// Learning rate.
    pub learning_rate: f64,
    /// L2 coefficient on the parameters, added to every batch loss.
    pub l2: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { batch_size: 128, learning_rate: 1e-3, l2: 1e-3 }
    }
}

/// A value network with its optimizer state.
#[derive(Clone, Debug)]
pub struct Network {
    pub(crate) net: Net<f32>,
    pub(crate) adam: Adam,
}

impl Network {
    /// Seeded fresh network.
    pub fn init(arch: Architecture, seed: u64) -> Network {
        let net: Net<f32> = Net::init(arch, seed);
        let adam = Adam::new(net.param_count());
        Network { net, adam }
    }

    pub(crate) fn from_parts(net: Net<f32>, adam: Adam) -> Network {
        assert_eq!(net.param_count(), adam.m.len());
        Network { net, adam }
    }

    pub fn architecture(&self) -> &Architecture {
        self.net.architecture()
    }

    pub fn param_count(&self) -> usize {
        self.net.param_count()
    }

    pub fn params(&self) -> &[f32] {
        self.net.params()
    }

    /// Number of optimizer updates applied.
    pub fn step_count(&self) -> u64 {
        self.adam.step_count()
    }

    /// Input length of one sample (planes times rows times cols).
    pub fn input_len(&self) -> usize {
        self.net.input_len()
    }

    /// Evaluate a batch of encoded positions.
    pub fn forward_batch(&self, planes: &[f32], batch: usize) -> Vec<f32> {
        self.net.forward(planes, batch)
    }

    /// One pass over `targets.len()` samples: split into batches of
    /// `cfg.batch_size` in order (last one smaller), one Adam update per
    /// batch. Returns the mean squared error measured before each batch's
    /// own update.
    pub fn train_step(&mut self, planes: &[f32], targets: &[f32], cfg: &TrainConfig) -> f64 {
        let one = self.net.input_len();
        let count = targets.len();
        assert_eq!(planes.len(), count * one, "planes do not match targets");
        assert!(cfg.batch_size > 0, "batch size must be positive");
        if count == 0 {
            return 0.0;
        }
        let mut total_sq = 0.0f64;
        let mut start = 0usize;
        while start < count {
            let end = (start + cfg.batch_size).min(count);
            let batch = end - start;
            let (data_loss, grad) = self.net.loss_grad(
                &planes[start * one..end * one],
                &targets[start..end],
                batch,
                f32::from_f64(cfg.l2),
            );
            total_sq += data_loss;
            self.adam
                .update(self.net.params_mut(), &grad, cfg.learning_rate as f32);
            start = end;
        }
        total_sq / count as f64
    }
}
