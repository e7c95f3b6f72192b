//! Network architecture descriptors.
//!
//! An architecture is the input shape plus a layer list, written as a
//! semicolon-separated text descriptor such as
//! `in:3x7x7;conv:16x3;relu;conv:16x3;relu;dense:64;relu;dense:1;tanh`.
//! The descriptor is stored verbatim in checkpoints, so a checkpoint is
//! self-describing.

use super::NetError;

/// One layer of the stack. Convolutions are valid (no padding), stride 1.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LayerSpec {
    Conv { filters: usize, kernel: usize },
    Dense { units: usize },
    Relu,
    Tanh,
}

/// Input shape plus layer list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Architecture {
    pub input: (usize, usize, usize),
    pub layers: Vec<LayerSpec>,
}

impl Architecture {
    /// The desk-scale default: up to two 16-filter 3x3 convolutions (as many
    /// as the board fits), a 64-unit dense layer, and the scalar output,
    /// with `tanh` when the value targets live in [-1, 1].
    pub fn desk_default(input: (usize, usize, usize), tanh: bool) -> Architecture {
        let (_, mut h, mut w) = input;
        let mut layers = Vec::new();
        for _ in 0..2 {
            if h >= 3 && w >= 3 {
                layers.push(LayerSpec::Conv { filters: 16, kernel: 3 });
                layers.push(LayerSpec::Relu);
                h -= 2;
                w -= 2;
            }
        }
        layers.push(LayerSpec::Dense { units: 64 });
        layers.push(LayerSpec::Relu);
        layers.push(LayerSpec::Dense { units: 1 });
        if tanh {
            layers.push(LayerSpec::Tanh);
        }
        Architecture { input, layers }
    }

    /// The reference scale: three 64-filter 3x3 convolutions and a 100-unit
    /// dense layer before the scalar output.
    pub fn full_default(input: (usize, usize, usize), tanh: bool) -> Architecture {
        let mut layers = Vec::new();
        let (_, mut h, mut w) = input;
        for _ in 0..3 {
            if h >= 3 && w >= 3 {
                layers.push(LayerSpec::Conv { filters: 64, kernel: 3 });
                layers.push(LayerSpec::Relu);
                h -= 2;
                w -= 2;
            }
        }
        layers.push(LayerSpec::Dense { units: 100 });
        layers.push(LayerSpec::Relu);
        layers.push(LayerSpec::Dense { units: 1 });
        if tanh {
            layers.push(LayerSpec::Tanh);
        }
        Architecture { input, layers }
    }

    /// Dense-only fallback for inputs too small to convolve.
    pub fn dense_default(input: (usize, usize, usize), tanh: bool) -> Architecture {
        let mut layers = vec![
            LayerSpec::Dense { units: 64 },
            LayerSpec::Relu,
            LayerSpec::Dense { units: 1 },
        ];
        if tanh {
            layers.push(LayerSpec::Tanh);
        }
        Architecture { input, layers }
    }

    /// Parse a text descriptor; inverse of [`Architecture::descriptor`].
    pub fn parse(text: &str) -> Result<Architecture, NetError> {
        let mut parts = text.split(';');
        let input = parts
            .next()
            .and_then(|p| p.strip_prefix("in:"))
            .ok_or_else(|| NetError(format!("descriptor must start with in:PxHxW, got '{text}'")))?;
        let dims: Vec<usize> = input
            .split('x')
            .map(|d| d.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| NetError(format!("bad input shape '{input}'")))?;
        if dims.len() != 3 || dims.contains(&0) {
            return Err(NetError(format!("bad input shape '{input}'")));
        }
        let mut layers = Vec::new();
        for part in parts {
            let spec = if part == "relu" {
                LayerSpec::Relu
            } else if part == "tanh" {
                LayerSpec::Tanh
            } else if let Some(rest) = part.strip_prefix("conv:") {
                let (f, k) = rest
                    .split_once('x')
                    .ok_or_else(|| NetError(format!("bad conv spec '{part}'")))?;
                LayerSpec::Conv {
                    filters: f.parse().map_err(|_| NetError(format!("bad conv spec '{part}'")))?,
                    kernel: k.parse().map_err(|_| NetError(format!("bad conv spec '{part}'")))?,
                }
            } else if let Some(rest) = part.strip_prefix("dense:") {
                LayerSpec::Dense {
                    units: rest.parse().map_err(|_| NetError(format!("bad dense spec '{part}'")))?,
                }
            } else {
                return Err(NetError(format!("unknown layer '{part}'")));
            };
            layers.push(spec);
        }
        let arch = Architecture { input: (dims[0], dims[1], dims[2]), layers };
        arch.validate()?;
        Ok(arch)
    }

    /// The canonical text form.
    pub fn descriptor(&self) -> String {
        let mut out = format!("in:{}x{}x{}", self.input.0, self.input.1, self.input.2);
        for layer in &self.layers {
            out.push(';');
            match layer {
                LayerSpec::Conv { filters, kernel } => {
                    out.push_str(&format!("conv:{filters}x{kernel}"))
                }
                LayerSpec::Dense { units } => out.push_str(&format!("dense:{units}")),
                LayerSpec::Relu => out.push_str("relu"),
                LayerSpec::Tanh => out.push_str("tanh"),
            }
        }
        out
    }

    /// Check layer compatibility: convolutions must fit their input, nothing
    /// may follow once the spatial grid is flattened by a dense layer except
    /// more dense layers and activations, and the stack must end in one unit.
    pub fn validate(&self) -> Result<(), NetError> {
        let (_, mut h, mut w) = self.input;
        let mut flat: Option<usize> = None;
        for layer in &self.layers {
            match layer {
                LayerSpec::Conv { filters, kernel } => {
                    if flat.is_some() {
                        return Err(NetError("conv after dense is not supported".into()));
                    }
                    if *kernel == 0 || *filters == 0 {
                        return Err(NetError("conv needs positive filters and kernel".into()));
                    }
                    if h < *kernel || w < *kernel {
                        return Err(NetError(format!(
                            "conv kernel {kernel} exceeds its {h}x{w} input"
                        )));
                    }
                    h -= kernel - 1;
                    w -= kernel - 1;
                }
                LayerSpec::Dense { units } => {
                    if *units == 0 {
                        return Err(NetError("dense needs positive units".into()));
                    }
                    flat = Some(*units);
                }
                LayerSpec::Relu | LayerSpec::Tanh => {}
            }
        }
        match flat {
            Some(1) => Ok(()),
            Some(u) => Err(NetError(format!("network must end in 1 unit, ends in {u}"))),
            None => Err(NetError("network needs at least one dense layer".into())),
        }
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_round_trips() {
        for arch in [
            Architecture::desk_default((3, 7, 7), true),
            Architecture::desk_default((3, 3, 3), false),
            Architecture::full_default((3, 13, 13), true),
            Architecture::dense_default((1, 1, 9), false),
        ] {
            let text = arch.descriptor();
            assert_eq!(Architecture::parse(&text).unwrap(), arch);
        }
    }

    #[test]
    fn desk_default_drops_convs_that_do_not_fit() {
        let a = Architecture::desk_default((3, 3, 3), true);
        let convs = a
            .layers
            .iter()
            .filter(|l| matches!(l, LayerSpec::Conv { .. }))
            .count();
        assert_eq!(convs, 1);
        a.validate().unwrap();
    }

    #[test]
    fn oversized_kernel_is_rejected() {
        let err = Architecture::parse("in:3x3x3;conv:16x3;conv:16x3;dense:1").unwrap_err();
        assert!(err.0.contains("exceeds"));
    }

    #[test]
    fn output_must_be_scalar() {
        assert!(Architecture::parse("in:3x3x3;dense:64").is_err());
        assert!(Architecture::parse("in:3x3x3;conv:8x3").is_err());
        assert!(Architecture::parse("in:3x3x3;dense:64;relu;dense:1").is_ok());
    }

    #[test]
    fn garbage_descriptors_are_rejected() {
        assert!(Architecture::parse("conv:16x3;dense:1").is_err());
        assert!(Architecture::parse("in:3x3;dense:1").is_err());
        assert!(Architecture::parse("in:3x3x3;pool:2;dense:1").is_err());
        assert!(Architecture::parse("in:0x3x3;dense:1").is_err());
    }
}
