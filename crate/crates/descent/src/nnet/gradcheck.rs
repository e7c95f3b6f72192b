//! Finite-difference gradient verification.
//!
//! Runs the shared forward/backward code at f64 and compares the analytic
//! gradient of the batch loss (data term plus L2) against central
//! differences on a seeded random batch. Checks a random subset of
//! parameters and reports the worst relative error.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::{Architecture, Net};

/// Outcome of one gradient check.
#[derive(Clone, Copy, Debug)]
pub struct GradCheckReport {
    /// Worst relative error over the checked parameters.
    pub max_rel_err: f64,
    /// How many parameters were checked.
    pub checked: usize,
    /// Total parameter count of the architecture.
    pub param_count: usize,
}

/// Compare analytic and numeric gradients on `arch`; checks up to `samples`
/// randomly chosen parameters against central differences.
pub fn grad_check(arch: &Architecture, seed: u64, samples: usize) -> GradCheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net: Net<f64> = Net::init(arch.clone(), rng.gen());
    let batch = 3;
    let input: Vec<f64> = (0..batch * net.input_len()).map(|_| rng.gen::<f64>()).collect();
    let targets: Vec<f64> = (0..batch).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
    let l2 = 0.001;

    let (_, analytic) = net.loss_grad(&input, &targets, batch, l2);

    let param_count = net.param_count();
    let mut indices: Vec<usize> = (0..param_count).collect();
    indices.shuffle(&mut rng);
    indices.truncate(samples);

    let h = 1e-5;
    let mut max_rel_err = 0.0f64;
    for &i in &indices {
        let orig = net.params()[i];
        net.params_mut()[i] = orig + h;
        let up = net.loss(&input, &targets, batch, l2);
        net.params_mut()[i] = orig - h;
        let down = net.loss(&input, &targets, batch, l2);
        net.params_mut()[i] = orig;
        let numeric = (up - down) / (2.0 * h);
        let denom = analytic[i].abs().max(numeric.abs()).max(1e-6);
        let rel = (analytic[i] - numeric).abs() / denom;
        max_rel_err = max_rel_err.max(rel);
    }
    GradCheckReport { max_rel_err, checked: indices.len(), param_count }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_stack_passes() {
        let arch = Architecture::parse("in:1x1x9;dense:64;relu;dense:1").unwrap();
        let report = grad_check(&arch, 1, 100);
        assert!(report.max_rel_err < 1e-4, "max rel err {}", report.max_rel_err);
    }

    #[test]
    fn conv_stack_passes() {
        let arch = Architecture::parse("in:3x7x7;conv:16x3;relu;conv:16x3;relu;dense:64;relu;dense:1;tanh")
            .unwrap();
        let report = grad_check(&arch, 2, 100);
        assert!(report.max_rel_err < 1e-4, "max rel err {}", report.max_rel_err);
        assert_eq!(report.checked, 100);
    }

    #[test]
    fn broken_gradient_would_be_caught() {
        let arch = Architecture::parse("in:1x1x4;dense:3;relu;dense:1").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut net: Net<f64> = Net::init(arch, rng.gen());
        let input: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
        let targets = vec![0.3];
        let (_, mut grad) = net.loss_grad(&input, &targets, 1, 0.001);
        grad[0] += 0.5;
        let orig = net.params()[0];
        let h = 1e-5;
        net.params_mut()[0] = orig + h;
        let up = net.loss(&input, &targets, 1, 0.001);
        net.params_mut()[0] = orig - h;
        let down = net.loss(&input, &targets, 1, 0.001);
        let numeric = (up - down) / (2.0 * h);
        let rel = (grad[0] - numeric).abs() / grad[0].abs().max(numeric.abs()).max(1e-6);
        assert!(rel > 1e-2);
    }
}
