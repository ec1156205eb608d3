use ndarray::{Array1, Array2};

use super::activation::Activation;
use crate::autodiff::{Jet4, Scalar, Tape, Var};
use crate::error::{PinnError, Result};
use crate::rng::{SeededRng, Stream};

/// Weights (`N_l × N_{l-1}`) and biases (`N_l`) of one dense layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
}

impl LayerParams {
    pub fn zeros(outputs: usize, inputs: usize) -> Self {
        LayerParams {
            weights: Array2::zeros((outputs, inputs)),
            biases: Array1::zeros(outputs),
        }
    }

    pub fn outputs(&self) -> usize {
        self.weights.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }
}

/// Fully connected network mapping `(t, x)` to a scalar.
///
/// Hidden layers apply the activation; the last layer is affine only.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    sizes: Vec<usize>,
    activation: Activation,
    layers: Vec<LayerParams>,
}

pub const INPUT_WIDTH: usize = 2;
pub const OUTPUT_WIDTH: usize = 1;

pub(crate) fn validate_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 {
        return Err(PinnError::config(
            "network.layer_sizes",
            format!("need at least an input and an output layer, got {sizes:?}"),
        ));
    }
    if sizes[0] != INPUT_WIDTH || sizes[sizes.len() - 1] != OUTPUT_WIDTH {
        return Err(PinnError::config(
            "network.layer_sizes",
            format!("must start with {INPUT_WIDTH} and end with {OUTPUT_WIDTH}, got {sizes:?}"),
        ));
    }
    if sizes.contains(&0) {
        return Err(PinnError::config(
            "network.layer_sizes",
            format!("every layer needs at least one neuron, got {sizes:?}"),
        ));
    }
    Ok(())
}

/// Layer sizes `[2, width × hidden, 1]`.
pub fn layer_sizes(hidden_layers: usize, width: usize) -> Vec<usize> {
    let mut sizes = Vec::with_capacity(hidden_layers + 2);
    sizes.push(INPUT_WIDTH);
    sizes.extend(std::iter::repeat_n(width, hidden_layers));
    sizes.push(OUTPUT_WIDTH);
    sizes
}

/// `Σ_l (N_l·N_{l-1} + N_l)`.
pub fn param_count_for(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[1] * w[0] + w[1]).sum()
}

impl Network {
    /// Glorot-uniform weights in `±sqrt(6 / (fan_in + fan_out))`, zero biases.
    pub fn init_glorot(sizes: &[usize], activation: Activation, seed: u64) -> Result<Self> {
        validate_sizes(sizes)?;
        let mut rng = SeededRng::new(seed, Stream::Weights);
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let weights =
                    Array2::from_shape_simple_fn((fan_out, fan_in), || rng.uniform(-limit, limit));
                LayerParams {
                    weights,
                    biases: Array1::zeros(fan_out),
                }
            })
            .collect();
        Ok(Network {
            sizes: sizes.to_vec(),
            activation,
            layers,
        })
    }

    /// Assembles a network from explicit layers, checking shape consistency.
    pub fn from_layers(activation: Activation, layers: Vec<LayerParams>) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| PinnError::config("network.layer_sizes", "no layers"))?;
        let mut sizes = vec![first.inputs()];
        for (i, layer) in layers.iter().enumerate() {
            if layer.inputs() != sizes[i] || layer.biases.len() != layer.outputs() {
                return Err(PinnError::config(
                    "network.layer_sizes",
                    format!(
                        "layer {i} has weights {:?} and {} biases after a layer of width {}",
                        layer.weights.dim(),
                        layer.biases.len(),
                        sizes[i]
                    ),
                ));
            }
            sizes.push(layer.outputs());
        }
        validate_sizes(&sizes)?;
        Ok(Network {
            sizes,
            activation,
            layers,
        })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn layers(&self) -> &[LayerParams] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [LayerParams] {
        &mut self.layers
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(LayerParams::param_count).sum()
    }

    /// Parameters flattened layer by layer: weights row-major, then biases.
    pub fn flat_params(&self) -> Vec<f64> {
        flatten(&self.layers)
    }

    pub fn set_flat_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(PinnError::Usage(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                params.len()
            )));
        }
        let mut offset = 0;
        for layer in &mut self.layers {
            for w in layer.weights.iter_mut().chain(layer.biases.iter_mut()) {
                *w = params[offset];
                offset += 1;
            }
        }
        Ok(())
    }

    /// Zero-filled parameter-shaped buffers, used for gradients.
    pub fn zeros_like(&self) -> Vec<LayerParams> {
        self.layers
            .iter()
            .map(|l| LayerParams::zeros(l.outputs(), l.inputs()))
            .collect()
    }

    pub fn all_finite(&self) -> bool {
        self.layers.iter().all(|l| {
            l.weights.iter().all(|v| v.is_finite()) && l.biases.iter().all(|v| v.is_finite())
        })
    }

    /// Plain evaluation at `z = (t, x)`.
    pub fn forward(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != INPUT_WIDTH {
            return Err(PinnError::Usage(format!(
                "network input must have length {INPUT_WIDTH}, got {}",
                z.len()
            )));
        }
        let last = self.layers.len() - 1;
        let mut a = z.to_vec();
        for (l, layer) in self.layers.iter().enumerate() {
            let w = layer.weights.as_slice().expect("row-major weights");
            let cols = layer.inputs();
            a = (0..layer.outputs())
                .map(|i| {
                    let row = &w[i * cols..(i + 1) * cols];
                    let mut acc = a[0] * row[0];
                    for j in 1..cols {
                        acc = acc + a[j] * row[j];
                    }
                    acc = acc + layer.biases[i];
                    if l < last {
                        self.activation.apply(acc)
                    } else {
                        acc
                    }
                })
                .collect();
        }
        Ok(a)
    }

    /// Scalar output at `(t, x)`.
    pub fn predict(&self, t: f64, x: f64) -> f64 {
        self.forward(&[t, x]).expect("two inputs")[0]
    }

    /// Output jet `(u, u_t, u_x, u_xx)` at `(t, x)`.
    pub fn forward_jet(&self, t: f64, x: f64) -> Result<Jet4> {
        let (jt, jx) = crate::autodiff::jet_seed(t, x)?;
        let views: Vec<LayerView<'_, f64>> = self
            .layers
            .iter()
            .map(|l| LayerView {
                weights: l.weights.as_slice().expect("row-major weights"),
                biases: l.biases.as_slice().expect("contiguous biases"),
                inputs: l.inputs(),
            })
            .collect();
        let out = forward_jet_generic(&views, self.activation, jt, jx);
        if !out.is_finite() {
            return Err(PinnError::Numerical(format!(
                "network jet overflowed at (t={t}, x={x})"
            )));
        }
        Ok(out)
    }

    /// Registers every parameter on `tape`, in flat order, so jets built from
    /// the returned network can be differentiated with respect to them.
    pub fn record<'t>(&self, tape: &'t Tape) -> TapedNetwork<'t> {
        let layers = self
            .layers
            .iter()
            .map(|l| {
                let weights = l.weights.iter().map(|&w| tape.param(w)).collect();
                let biases = l.biases.iter().map(|&b| tape.param(b)).collect();
                (weights, biases, l.inputs())
            })
            .collect();
        TapedNetwork {
            tape,
            activation: self.activation,
            layers,
        }
    }
}

pub(crate) fn flatten(layers: &[LayerParams]) -> Vec<f64> {
    let mut out = Vec::with_capacity(layers.iter().map(LayerParams::param_count).sum());
    for layer in layers {
        out.extend(layer.weights.iter());
        out.extend(layer.biases.iter());
    }
    out
}

pub(crate) struct LayerView<'a, S> {
    weights: &'a [S],
    biases: &'a [S],
    inputs: usize,
}

fn forward_jet_generic<S: Scalar>(
    layers: &[LayerView<'_, S>],
    activation: Activation,
    t: Jet4<S>,
    x: Jet4<S>,
) -> Jet4<S> {
    let unary = activation.unary();
    let last = layers.len() - 1;
    let mut a = vec![t, x];
    for (l, layer) in layers.iter().enumerate() {
        let cols = layer.inputs;
        a = layer
            .biases
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let row = &layer.weights[i * cols..(i + 1) * cols];
                let mut acc = a[0].scale(row[0]);
                for j in 1..cols {
                    acc = acc + a[j].scale(row[j]);
                }
                acc = acc.shift(b);
                if l < last {
                    acc.map_unary(&unary)
                } else {
                    acc
                }
            })
            .collect();
    }
    a[0]
}

/// A [`Network`] whose parameters are leaves on a tape.
pub struct TapedNetwork<'t> {
    tape: &'t Tape,
    activation: Activation,
    layers: Vec<(Vec<Var<'t>>, Vec<Var<'t>>, usize)>,
}

impl<'t> TapedNetwork<'t> {
    pub fn tape(&self) -> &'t Tape {
        self.tape
    }

    /// Output jet at `(t, x)`, recorded on the tape.
    pub fn forward_jet(&self, t: f64, x: f64) -> Result<Jet4<Var<'t>>> {
        crate::autodiff::jet_seed(t, x)?;
        let one = self.tape.constant(1.0);
        let zero = self.tape.constant(0.0);
        let jt = Jet4::new(self.tape.constant(t), one, zero, zero);
        let jx = Jet4::new(self.tape.constant(x), zero, one, zero);
        let views: Vec<LayerView<'_, Var<'t>>> = self
            .layers
            .iter()
            .map(|(w, b, inputs)| LayerView {
                weights: w,
                biases: b,
                inputs: *inputs,
            })
            .collect();
        Ok(forward_jet_generic(&views, self.activation, jt, jx))
    }

    /// Output value at `(t, x)`, recorded on the tape.
    pub fn forward(&self, t: f64, x: f64) -> Result<Var<'t>> {
        Ok(self.forward_jet(t, x)?.val)
    }
}
