//! Forward and backward passes, generic over the float type.
//!
//! Parameters live in one flat vector; each layer owns a slice of it. The
//! backward pass returns the gradient of
//! `sum((out - target)^2) + l2 * sum(theta^2)` in the same flat layout.

use std::ops::Range;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Architecture, LayerSpec, Scalar};

#[derive(Clone, Debug)]
enum RtLayer {
    Conv {
        in_ch: usize,
        out_ch: usize,
        k: usize,
        in_h: usize,
        in_w: usize,
        w: Range<usize>,
        b: Range<usize>,
    },
    Dense {
        in_dim: usize,
        out_dim: usize,
        w: Range<usize>,
        b: Range<usize>,
    },
    Relu,
    Tanh,
}

/// A value network instance: architecture, layer plan, flat parameters.
#[derive(Clone, Debug)]
pub struct Net<T> {
    arch: Architecture,
    layers: Vec<RtLayer>,
    params: Vec<T>,
}

impl<T: Scalar> Net<T> {
    /// Build with all parameters zero.
    pub fn zeros(arch: Architecture) -> Net<T> {
        arch.validate().expect("invalid architecture");
        let (layers, count) = plan(&arch);
        Net { arch, layers, params: vec![T::zero(); count] }
    }

    /// Build with uniform He-style initialization, biases zero.
    pub fn init(arch: Architecture, seed: u64) -> Net<T> {
        let mut net = Net::zeros(arch);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in net.layers.clone() {
            let (w, fan_in) = match &layer {
                RtLayer::Conv { in_ch, k, w, .. } => (w.clone(), in_ch * k * k),
                RtLayer::Dense { in_dim, w, .. } => (w.clone(), *in_dim),
                _ => continue,
            };
            let limit = (6.0 / fan_in as f64).sqrt();
            for i in w {
                net.params[i] = T::from_f64((rng.gen::<f64>() * 2.0 - 1.0) * limit);
            }
        }
        net
    }

    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    /// Input length for one sample.
    pub fn input_len(&self) -> usize {
        let (p, h, w) = self.arch.input;
        p * h * w
    }

    /// Network outputs for a batch packed sample by sample.
    pub fn forward(&self, input: &[T], batch: usize) -> Vec<T> {
        self.activations(input, batch).pop().unwrap()
    }

    fn activations(&self, input: &[T], batch: usize) -> Vec<Vec<T>> {
        assert_eq!(
            input.len(),
            batch * self.input_len(),
            "input length does not match batch size"
        );
        let mut acts: Vec<Vec<T>> = Vec::with_capacity(self.layers.len() + 1);
        acts.push(input.to_vec());
        for layer in &self.layers {
            let prev = acts.last().unwrap();
            let next = match layer {
                RtLayer::Conv { in_ch, out_ch, k, in_h, in_w, w, b } => self.conv_forward(
                    prev, batch, *in_ch, *out_ch, *k, *in_h, *in_w, &self.params[w.clone()],
                    &self.params[b.clone()],
                ),
                RtLayer::Dense { in_dim, out_dim, w, b } => self.dense_forward(
                    prev, batch, *in_dim, *out_dim, &self.params[w.clone()],
                    &self.params[b.clone()],
                ),
                RtLayer::Relu => prev.iter().map(|&x| x.max(T::zero())).collect(),
                RtLayer::Tanh => prev.iter().map(|&x| x.tanh()).collect(),
            };
            acts.push(next);
        }
        acts
    }

    #[allow(clippy::too_many_arguments)]
    fn conv_forward(
        &self,
        input: &[T],
        batch: usize,
        in_ch: usize,
        out_ch: usize,
        k: usize,
        in_h: usize,
        in_w: usize,
        weights: &[T],
        biases: &[T],
    ) -> Vec<T> {
        let out_h = in_h - k + 1;
        let out_w = in_w - k + 1;
        let mut out = vec![T::zero(); batch * out_ch * out_h * out_w];
        for bi in 0..batch {
            let in_base = bi * in_ch * in_h * in_w;
            let out_base = bi * out_ch * out_h * out_w;
            for oc in 0..out_ch {
                for oy in 0..out_h {
                    for ox in 0..out_w {
                        let mut acc = biases[oc];
                        for ic in 0..in_ch {
                            for ky in 0..k {
                                let in_row = in_base + ic * in_h * in_w + (oy + ky) * in_w + ox;
                                let w_row = oc * in_ch * k * k + ic * k * k + ky * k;
                                for kx in 0..k {
                                    acc += input[in_row + kx] * weights[w_row + kx];
                                }
                            }
                        }
                        out[out_base + oc * out_h * out_w + oy * out_w + ox] = acc;
                    }
                }
            }
        }
        out
    }

    fn dense_forward(
        &self,
        input: &[T],
        batch: usize,
        in_dim: usize,
        out_dim: usize,
        weights: &[T],
        biases: &[T],
    ) -> Vec<T> {
        let mut out = vec![T::zero(); batch * out_dim];
        for bi in 0..batch {
            for o in 0..out_dim {
                let mut acc = biases[o];
                let w_row = o * in_dim;
                let in_row = bi * in_dim;
                for i in 0..in_dim {
                    acc += input[in_row + i] * weights[w_row + i];
                }
                out[bi * out_dim + o] = acc;
            }
        }
        out
    }

    /// Total loss `sum((out - target)^2) + l2 * sum(theta^2)`.
    pub fn loss(&self, input: &[T], targets: &[T], batch: usize, l2: T) -> f64 {
        let out = self.forward(input, batch);
        assert_eq!(out.len(), targets.len());
        let data: f64 = out
            .iter()
            .zip(targets)
            .map(|(&o, &t)| (o - t).to_f64().powi(2))
            .sum();
        let reg: f64 = self.params.iter().map(|&p| p.to_f64().powi(2)).sum();
        data + l2.to_f64() * reg
    }

    /// Gradient of the total loss; also returns the data term
    /// `sum((out - target)^2)` for reporting.
    pub fn loss_grad(&self, input: &[T], targets: &[T], batch: usize, l2: T) -> (f64, Vec<T>) {
        let acts = self.activations(input, batch);
        let out = acts.last().unwrap();
        assert_eq!(out.len(), targets.len());
        let data_loss: f64 = out
            .iter()
            .zip(targets)
            .map(|(&o, &t)| (o - t).to_f64().powi(2))
            .sum();
        let two = T::from_f64(2.0);
        let mut dcur: Vec<T> = out.iter().zip(targets).map(|(&o, &t)| two * (o - t)).collect();
        let mut grad = vec![T::zero(); self.params.len()];
        for (li, layer) in self.layers.iter().enumerate().rev() {
            let prev = &acts[li];
            dcur = match layer {
                RtLayer::Conv { in_ch, out_ch, k, in_h, in_w, w, b } => self.conv_backward(
                    prev, &dcur, batch, *in_ch, *out_ch, *k, *in_h, *in_w, w.clone(), b.clone(),
                    &mut grad,
                ),
                RtLayer::Dense { in_dim, out_dim, w, b } => self.dense_backward(
                    prev, &dcur, batch, *in_dim, *out_dim, w.clone(), b.clone(), &mut grad,
                ),
                RtLayer::Relu => prev
                    .iter()
                    .zip(&dcur)
                    .map(|(&x, &d)| if x > T::zero() { d } else { T::zero() })
                    .collect(),
                RtLayer::Tanh => acts[li + 1]
                    .iter()
                    .zip(&dcur)
                    .map(|(&y, &d)| d * (T::one() - y * y))
                    .collect(),
            };
        }
        for (g, &p) in grad.iter_mut().zip(&self.params) {
            *g += two * l2 * p;
        }
        (data_loss, grad)
    }

    #[allow(clippy::too_many_arguments)]
    fn conv_backward(
        &self,
        input: &[T],
        dout: &[T],
        batch: usize,
        in_ch: usize,
        out_ch: usize,
        k: usize,
        in_h: usize,
        in_w: usize,
        w: Range<usize>,
        b: Range<usize>,
        grad: &mut [T],
    ) -> Vec<T> {
        let out_h = in_h - k + 1;
        let out_w = in_w - k + 1;
        let weights = &self.params[w.clone()];
        let mut din = vec![T::zero(); input.len()];
        for bi in 0..batch {
            let in_base = bi * in_ch * in_h * in_w;
            let out_base = bi * out_ch * out_h * out_w;
            for oc in 0..out_ch {
                for oy in 0..out_h {
                    for ox in 0..out_w {
                        let d = dout[out_base + oc * out_h * out_w + oy * out_w + ox];
                        if d == T::zero() {
                            continue;
                        }
                        grad[b.start + oc] += d;
                        for ic in 0..in_ch {
                            for ky in 0..k {
                                let in_row = in_base + ic * in_h * in_w + (oy + ky) * in_w + ox;
                                let w_row = oc * in_ch * k * k + ic * k * k + ky * k;
                                for kx in 0..k {
                                    grad[w.start + w_row + kx] += d * input[in_row + kx];
                                    din[in_row + kx] += d * weights[w_row + kx];
                                }
                            }
                        }
                    }
                }
            }
        }
        din
    }

    #[allow(clippy::too_many_arguments)]
    fn dense_backward(
        &self,
        input: &[T],
        dout: &[T],
        batch: usize,
        in_dim: usize,
        out_dim: usize,
        w: Range<usize>,
        b: Range<usize>,
        grad: &mut [T],
    ) -> Vec<T> {
        let weights = &self.params[w.clone()];
        let mut din = vec![T::zero(); input.len()];
        for bi in 0..batch {
            let in_row = bi * in_dim;
            for o in 0..out_dim {
                let d = dout[bi * out_dim + o];
                if d == T::zero() {
                    continue;
                }
                grad[b.start + o] += d;
                let w_row = o * in_dim;
                for i in 0..in_dim {
                    grad[w.start + w_row + i] += d * input[in_row + i];
                    din[in_row + i] += d * weights[w_row + i];
                }
            }
        }
        din
    }
}

fn plan(arch: &Architecture) -> (Vec<RtLayer>, usize) {
    let (mut ch, mut h, mut w) = arch.input;
    let mut flat: Option<usize> = None;
    let mut offset = 0usize;
    let mut layers = Vec::new();
    for spec in &arch.layers {
        match spec {
            LayerSpec::Conv { filters, kernel } => {
                let w_len = filters * ch * kernel * kernel;
                layers.push(RtLayer::Conv {
                    in_ch: ch,
                    out_ch: *filters,
                    k: *kernel,
                    in_h: h,
                    in_w: w,
                    w: offset..offset + w_len,
                    b: offset + w_len..offset + w_len + filters,
                });
                offset += w_len + filters;
                ch = *filters;
                h -= kernel - 1;
                w -= kernel - 1;
            }
            LayerSpec::Dense { units } => {
                let in_dim = flat.unwrap_or(ch * h * w);
                let w_len = units * in_dim;
                layers.push(RtLayer::Dense {
                    in_dim,
                    out_dim: *units,
                    w: offset..offset + w_len,
                    b: offset + w_len..offset + w_len + units,
                });
                offset += w_len + units;
                flat = Some(*units);
            }
            LayerSpec::Relu => layers.push(RtLayer::Relu),
            LayerSpec::Tanh => layers.push(RtLayer::Tanh),
        }
    }
    (layers, offset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_arch() -> Architecture {
        Architecture::parse("in:2x4x4;conv:3x3;relu;dense:5;relu;dense:1;tanh").unwrap()
    }

    #[test]
    fn param_count_matches_the_plan() {
        let net: Net<f64> = Net::zeros(tiny_arch());
        let conv = 3 * 2 * 9 + 3;
        let d1 = 5 * (3 * 2 * 2) + 5;
        let d2 = 5 + 1;
        assert_eq!(net.param_count(), conv + d1 + d2);
    }

    #[test]
    fn zero_net_outputs_zero() {
        let net: Net<f32> = Net::zeros(tiny_arch());
        let input = vec![0.5f32; 2 * net.input_len()];
        let out = net.forward(&input, 2);
        assert_eq!(out, vec![0.0, 0.0]);
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let a: Net<f32> = Net::init(tiny_arch(), 7);
        let b: Net<f32> = Net::init(tiny_arch(), 7);
        let c: Net<f32> = Net::init(tiny_arch(), 8);
        assert_eq!(a.params(), b.params());
        assert_ne!(a.params(), c.params());
        let limit = (6.0f32 / 5.0).sqrt() + 1e-6;
        assert!(a.params().iter().all(|p| p.abs() <= limit));
    }

    #[test]
    fn tanh_output_stays_in_bounds() {
        let net: Net<f64> = Net::init(tiny_arch(), 3);
        let input: Vec<f64> = (0..4 * net.input_len()).map(|i| (i % 7) as f64).collect();
        for v in net.forward(&input, 4) {
            assert!((-1.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn batch_forward_equals_stacked_singles() {
        let net: Net<f64> = Net::init(tiny_arch(), 5);
        let one = net.input_len();
        let input: Vec<f64> = (0..3 * one).map(|i| (i as f64 * 0.37).sin()).collect();
        let batched = net.forward(&input, 3);
        for bi in 0..3 {
            let single = net.forward(&input[bi * one..(bi + 1) * one], 1);
            assert_eq!(single[0], batched[bi]);
        }
    }

    #[test]
    fn known_convolution_value() {
        let arch = Architecture::parse("in:1x3x3;conv:1x2;dense:1").unwrap();
        let mut net: Net<f64> = Net::zeros(arch);
        let n = net.param_count();
        for p in net.params_mut().iter_mut().take(4) {
            *p = 1.0;
        }
        net.params_mut()[4] = 0.5;
        let dense_w = 5..n - 1;
        for i in dense_w {
            net.params_mut()[i] = 1.0;
        }
        let input: Vec<f64> = (1..=9).map(|v| v as f64).collect();
        let out = net.forward(&input, 1);
        let patches = [12.0, 16.0, 24.0, 28.0];
        let expected: f64 = patches.iter().map(|p| p + 0.5).sum();
        assert_eq!(out[0], expected);
    }

    #[test]
    fn zero_target_gradient_is_pure_regularization() {
        let net: Net<f64> = Net::init(tiny_arch(), 11);
        let input = vec![0.3; net.input_len()];
        let out = net.forward(&input, 1);
        let (data, grad) = net.loss_grad(&input, &out, 1, 0.001);
        assert!(data < 1e-24);
        for (g, &p) in grad.iter().zip(net.params()) {
            assert!((g - 0.002 * p).abs() < 1e-12);
        }
    }
}
