use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng;

use super::NetError;

/// Per-layer output nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Sigmoid,
    Linear,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed through the activation output `y = f(z)`.
    #[inline]
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Linear => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Linear => "linear",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "sigmoid" => Ok(Activation::Sigmoid),
            "linear" => Ok(Activation::Linear),
            other => Err(NetError::Checkpoint(format!("unknown activation `{other}`"))),
        }
    }
}

/// Fully-connected feed-forward network.
///
/// Layer `k` maps `layer_sizes[k]` inputs to `layer_sizes[k + 1]` outputs with
/// a weight matrix of shape `(out, in)`, a bias of length `out`, and an
/// activation applied element-wise to the affine output.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseNet {
    layer_sizes: Vec<usize>,
    pub(crate) weights: Vec<Array2<f64>>,
    pub(crate) biases: Vec<Array1<f64>>,
    activations: Vec<Activation>,
}

/// Gradient of a scalar loss with respect to every weight and bias of a net.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGradient {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

/// Layer outputs recorded by [`DenseNet::forward_trace`] for backpropagation.
/// `outputs[0]` is the input batch, `outputs[k + 1]` the output of layer `k`.
#[derive(Debug, Clone)]
pub struct Trace {
    pub outputs: Vec<Array2<f64>>,
}

impl Trace {
    pub fn output(&self) -> &Array2<f64> {
        self.outputs.last().expect("trace always holds the input")
    }
}

fn validate_layout(layer_sizes: &[usize], activations: &[Activation]) -> Result<(), NetError> {
    if layer_sizes.len() < 2 {
        return Err(NetError::Layout("at least an input and an output size are required".into()));
    }
    if layer_sizes.contains(&0) {
        return Err(NetError::Layout("layer sizes must be positive".into()));
    }
    if activations.len() != layer_sizes.len() - 1 {
        return Err(NetError::Layout(format!(
            "{} layers need {} activations, got {}",
            layer_sizes.len() - 1,
            layer_sizes.len() - 1,
            activations.len()
        )));
    }
    Ok(())
}

impl DenseNet {
    /// All-zero network.
    pub fn zeros(layer_sizes: &[usize], activations: &[Activation]) -> Result<Self, NetError> {
        validate_layout(layer_sizes, activations)?;
        let weights = layer_sizes
            .windows(2)
            .map(|w| Array2::zeros((w[1], w[0])))
            .collect();
        let biases = layer_sizes.windows(2).map(|w| Array1::zeros(w[1])).collect();
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            activations: activations.to_vec(),
        })
    }

    /// Parameters drawn uniformly from `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`.
    pub fn init_uniform<R: Rng + ?Sized>(
        layer_sizes: &[usize],
        activations: &[Activation],
        rng: &mut R,
    ) -> Result<Self, NetError> {
        let mut net = Self::zeros(layer_sizes, activations)?;
        for (w, b) in net.weights.iter_mut().zip(net.biases.iter_mut()) {
            let bound = 1.0 / (w.ncols() as f64).sqrt();
            w.mapv_inplace(|_| rng.random_range(-bound..=bound));
            b.mapv_inplace(|_| rng.random_range(-bound..=bound));
        }
        Ok(net)
    }

    /// Builds a network from explicit parameters, checking every shape.
    pub fn from_parts(
        layer_sizes: &[usize],
        activations: &[Activation],
        weights: Vec<Array2<f64>>,
        biases: Vec<Array1<f64>>,
    ) -> Result<Self, NetError> {
        validate_layout(layer_sizes, activations)?;
        if weights.len() != layer_sizes.len() - 1 || biases.len() != layer_sizes.len() - 1 {
            return Err(NetError::Layout("parameter count does not match layer count".into()));
        }
        for (k, (w, b)) in weights.iter().zip(&biases).enumerate() {
            if w.dim() != (layer_sizes[k + 1], layer_sizes[k]) || b.len() != layer_sizes[k + 1] {
                return Err(NetError::Layout(format!("layer {k} parameter shape mismatch")));
            }
        }
        let net = Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            activations: activations.to_vec(),
        };
        net.ensure_finite()?;
        Ok(net)
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, layer: usize) -> &Array2<f64> {
        &self.weights[layer]
    }

    pub fn bias(&self, layer: usize) -> &Array1<f64> {
        &self.biases[layer]
    }

    pub fn weight_mut(&mut self, layer: usize) -> &mut Array2<f64> {
        &mut self.weights[layer]
    }

    pub fn bias_mut(&mut self, layer: usize) -> &mut Array1<f64> {
        &mut self.biases[layer]
    }

    pub fn param_count(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    /// Sum of squared weights (biases excluded).
    pub fn weight_sq_norm(&self) -> f64 {
        self.weights.iter().flat_map(|w| w.iter()).map(|w| w * w).sum()
    }

    /// Every parameter in declared order: per layer, weights row-major then biases.
    pub fn params(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.iter().chain(b.iter()).copied())
    }

    pub(crate) fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> + '_ {
        self.weights
            .iter_mut()
            .zip(self.biases.iter_mut())
            .flat_map(|(w, b)| w.iter_mut().chain(b.iter_mut()))
    }

    pub fn same_shape(&self, other: &DenseNet) -> bool {
        self.layer_sizes == other.layer_sizes
    }

    pub(crate) fn ensure_finite(&self) -> Result<(), NetError> {
        if self.params().all(f64::is_finite) {
            Ok(())
        } else {
            Err(NetError::NonFinite("network parameter"))
        }
    }

    /// Evaluates the network on a single input vector.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>, NetError> {
        if input.len() != self.input_dim() {
            return Err(NetError::DimensionMismatch {
                expected: self.input_dim(),
                got: input.len(),
            });
        }
        if !input.iter().all(|x| x.is_finite()) {
            return Err(NetError::NonFinite("input"));
        }
        let mut x = Array1::from(input.to_vec());
        for ((w, b), act) in self.weights.iter().zip(&self.biases).zip(&self.activations) {
            let mut z = w.dot(&x);
            z += b;
            z.mapv_inplace(|v| act.apply(v));
            x = z;
        }
        Ok(x.to_vec())
    }

    /// Evaluates a batch (one sample per row), keeping every layer output.
    pub fn forward_trace(&self, inputs: ArrayView2<f64>) -> Result<Trace, NetError> {
        if inputs.ncols() != self.input_dim() {
            return Err(NetError::DimensionMismatch {
                expected: self.input_dim(),
                got: inputs.ncols(),
            });
        }
        let mut outputs = Vec::with_capacity(self.num_layers() + 1);
        outputs.push(inputs.to_owned());
        for ((w, b), act) in self.weights.iter().zip(&self.biases).zip(&self.activations) {
            let prev = outputs.last().unwrap();
            let mut z = prev.dot(&w.t());
            z += b;
            z.mapv_inplace(|v| act.apply(v));
            outputs.push(z);
        }
        Ok(Trace { outputs })
    }

    /// Batched evaluation without keeping intermediates.
    pub fn forward_batch(&self, inputs: ArrayView2<f64>) -> Result<Array2<f64>, NetError> {
        Ok(self.forward_trace(inputs)?.outputs.pop().unwrap())
    }

    /// Backpropagates `output_grad` (dL/d output, one row per sample) through a
    /// recorded trace. Returns the parameter gradient summed over the batch and
    /// the gradient with respect to the inputs.
    pub fn backward(
        &self,
        trace: &Trace,
        output_grad: ArrayView2<f64>,
    ) -> Result<(ParamGradient, Array2<f64>), NetError> {
        let out = trace.output();
        if output_grad.dim() != out.dim() {
            return Err(NetError::DimensionMismatch {
                expected: out.ncols(),
                got: output_grad.ncols(),
            });
        }
        let n_layers = self.num_layers();
        let mut gw: Vec<Array2<f64>> = Vec::with_capacity(n_layers);
        let mut gb: Vec<Array1<f64>> = Vec::with_capacity(n_layers);
        let mut upstream = output_grad.to_owned();
        for k in (0..n_layers).rev() {
            let act = self.activations[k];
            let y = &trace.outputs[k + 1];
            if act != Activation::Linear {
                Zip::from(&mut upstream)
                    .and(y)
                    .for_each(|g, &yv| *g *= act.derivative_from_output(yv));
            }
            let x = &trace.outputs[k];
            gw.push(upstream.t().dot(x));
            gb.push(upstream.sum_axis(Axis(0)));
            upstream = upstream.dot(&self.weights[k]);
        }
        gw.reverse();
        gb.reverse();
        Ok((ParamGradient { weights: gw, biases: gb }, upstream))
    }

    /// Exact gradient of a scalar loss for one input, given dL/d output.
    pub fn gradient(&self, input: &[f64], loss_grad_at_output: &[f64]) -> Result<ParamGradient, NetError> {
        if input.len() != self.input_dim() {
            return Err(NetError::DimensionMismatch {
                expected: self.input_dim(),
                got: input.len(),
            });
        }
        if loss_grad_at_output.len() != self.output_dim() {
            return Err(NetError::DimensionMismatch {
                expected: self.output_dim(),
                got: loss_grad_at_output.len(),
            });
        }
        let x = Array2::from_shape_vec((1, input.len()), input.to_vec()).unwrap();
        let g = Array2::from_shape_vec((1, loss_grad_at_output.len()), loss_grad_at_output.to_vec()).unwrap();
        let trace = self.forward_trace(x.view())?;
        Ok(self.backward(&trace, g.view())?.0)
    }
}

impl ParamGradient {
    pub fn zeros_like(net: &DenseNet) -> Self {
        Self {
            weights: net.weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect(),
            biases: net.biases.iter().map(|b| Array1::zeros(b.raw_dim())).collect(),
        }
    }

    pub fn matches(&self, net: &DenseNet) -> bool {
        self.weights.len() == net.weights.len()
            && self.weights.iter().zip(&net.weights).all(|(a, b)| a.dim() == b.dim())
            && self.biases.iter().zip(&net.biases).all(|(a, b)| a.len() == b.len())
    }

    /// Components in the same order as [`DenseNet::params`].
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.iter().chain(b.iter()).copied())
    }

    pub(crate) fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> + '_ {
        self.weights
            .iter_mut()
            .zip(self.biases.iter_mut())
            .flat_map(|(w, b)| w.iter_mut().chain(b.iter_mut()))
    }

    pub fn scale(&mut self, factor: f64) {
        self.values_mut().for_each(|v| *v *= factor);
    }

    /// Adds `factor * w` to every weight gradient (L2 penalty term).
    pub fn add_weight_decay(&mut self, net: &DenseNet, factor: f64) {
        for (g, w) in self.weights.iter_mut().zip(&net.weights) {
            g.scaled_add(factor, w);
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Central-difference estimate of dL/dθ for every parameter, with step 1e-5.
///
/// Only uses [`DenseNet::forward`]; serves as the reference for backprop.
pub fn finite_diff_gradient<F>(net: &DenseNet, input: &[f64], loss: F) -> Result<ParamGradient, NetError>
where
    F: Fn(&[f64]) -> f64,
{
    const H: f64 = 1e-5;
    let mut probe = net.clone();
    let mut grad = ParamGradient::zeros_like(net);
    let n = net.param_count();
    for i in 0..n {
        let original = net.params().nth(i).unwrap();
        *probe.params_mut().nth(i).unwrap() = original + H;
        let plus = loss(&probe.forward(input)?);
        *probe.params_mut().nth(i).unwrap() = original - H;
        let minus = loss(&probe.forward(input)?);
        *probe.params_mut().nth(i).unwrap() = original;
        *grad.values_mut().nth(i).unwrap() = (plus - minus) / (2.0 * H);
    }
    Ok(grad)
}
