//! Dense feed-forward ReLU network: parameter container, forward pass,
//! backpropagation, initialization, and the parameter-space distance used by
//! the training stopping criteria.
//!
//! A network with `l` hidden layers consists of `l + 1` affine maps. ReLU is
//! applied componentwise between affine maps and never after the last one.
//! The ReLU derivative at exactly zero is taken to be zero.

use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Layer widths of a network: input dimension, hidden widths, output dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    input_dim: usize,
    output_dim: usize,
    hidden_widths: Vec<usize>,
}

impl Architecture {
    /// An empty `hidden_widths` means a single affine map.
    pub fn new(input_dim: usize, output_dim: usize, hidden_widths: Vec<usize>) -> Result<Self> {
        if input_dim == 0 || output_dim == 0 {
            return Err(Error::config("input and output dims must be >= 1"));
        }
        if hidden_widths.contains(&0) {
            return Err(Error::config("hidden widths must be >= 1"));
        }
        Ok(Self {
            input_dim,
            output_dim,
            hidden_widths,
        })
    }

    /// `hidden_layers` hidden layers of equal `width`.
    pub fn uniform(
        input_dim: usize,
        output_dim: usize,
        hidden_layers: usize,
        width: usize,
    ) -> Result<Self> {
        Architecture::new(input_dim, output_dim, vec![width; hidden_layers])
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn hidden_widths(&self) -> &[usize] {
        &self.hidden_widths
    }

    /// Widths of every layer boundary: `[p, p^1, ..., p^l, c]`.
    pub fn dims(&self) -> Vec<usize> {
        let mut d = Vec::with_capacity(self.hidden_widths.len() + 2);
        d.push(self.input_dim);
        d.extend_from_slice(&self.hidden_widths);
        d.push(self.output_dim);
        d
    }
}

/// Weight matrices and bias vectors of a ReLU network.
///
/// Layer `j` maps `dims[j] -> dims[j + 1]`; its weight matrix is stored
/// row-major with shape `(dims[j + 1], dims[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    dims: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

impl NetworkParams {
    pub fn zeros(arch: &Architecture) -> Self {
        let dims = arch.dims();
        let weights = (0..dims.len() - 1)
            .map(|j| vec![0.0; dims[j + 1] * dims[j]])
            .collect();
        let biases = (0..dims.len() - 1).map(|j| vec![0.0; dims[j + 1]]).collect();
        Self {
            dims,
            weights,
            biases,
        }
    }

    /// Builds params from explicit per-layer matrices and bias vectors,
    /// validating shapes and finiteness.
    pub fn from_parts(
        arch: &Architecture,
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let dims = arch.dims();
        let layers = dims.len() - 1;
        if weights.len() != layers || biases.len() != layers {
            return Err(Error::shape(format!(
                "expected {layers} weight/bias blocks, got {}/{}",
                weights.len(),
                biases.len()
            )));
        }
        for j in 0..layers {
            if weights[j].len() != dims[j + 1] * dims[j] {
                return Err(Error::shape(format!(
                    "layer {j}: weight block has {} entries, expected {}",
                    weights[j].len(),
                    dims[j + 1] * dims[j]
                )));
            }
            if biases[j].len() != dims[j + 1] {
                return Err(Error::shape(format!(
                    "layer {j}: bias block has {} entries, expected {}",
                    biases[j].len(),
                    dims[j + 1]
                )));
            }
            if weights[j].iter().chain(biases[j].iter()).any(|v| !v.is_finite()) {
                return Err(Error::domain(format!("layer {j}: non-finite parameter entry")));
            }
        }
        Ok(Self {
            dims,
            weights,
            biases,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of affine layers (`l + 1`).
    pub fn num_layers(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn weight(&self, layer: usize) -> &[f64] {
        &self.weights[layer]
    }

    pub fn bias(&self, layer: usize) -> &[f64] {
        &self.biases[layer]
    }

    pub fn weight_mut(&mut self, layer: usize) -> &mut [f64] {
        &mut self.weights[layer]
    }

    pub fn bias_mut(&mut self, layer: usize) -> &mut [f64] {
        &mut self.biases[layer]
    }

    pub fn same_shape(&self, other: &NetworkParams) -> bool {
        self.dims == other.dims
    }

    /// Total number of scalar parameters.
    pub fn num_params(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>()
            + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    /// `self += alpha * grad`, entrywise.
    pub fn axpy(&mut self, alpha: f64, grad: &GradientSet) -> Result<()> {
        if grad.weights.len() != self.weights.len() {
            return Err(Error::shape("gradient has different layer count"));
        }
        for j in 0..self.weights.len() {
            if grad.weights[j].len() != self.weights[j].len()
                || grad.biases[j].len() != self.biases[j].len()
            {
                return Err(Error::shape(format!("gradient layer {j} shape differs")));
            }
            for (w, g) in self.weights[j].iter_mut().zip(&grad.weights[j]) {
                *w += alpha * g;
            }
            for (b, g) in self.biases[j].iter_mut().zip(&grad.biases[j]) {
                *b += alpha * g;
            }
        }
        Ok(())
    }

    /// Returns `self + alpha * grad` as a new parameter set.
    pub fn stepped(&self, alpha: f64, grad: &GradientSet) -> Result<NetworkParams> {
        let mut out = self.clone();
        out.axpy(alpha, grad)?;
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        self.weights
            .iter()
            .chain(self.biases.iter())
            .all(|block| block.iter().all(|v| v.is_finite()))
    }
}

/// Per-parameter partial derivatives of a scalar objective; shape-identical
/// to the `NetworkParams` it was computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

impl GradientSet {
    pub fn zeros_like(params: &NetworkParams) -> Self {
        Self {
            weights: params.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: params.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn weight(&self, layer: usize) -> &[f64] {
        &self.weights[layer]
    }

    pub fn bias(&self, layer: usize) -> &[f64] {
        &self.biases[layer]
    }

    /// `self += other`, entrywise.
    pub fn accumulate(&mut self, other: &GradientSet) {
        debug_assert_eq!(self.weights.len(), other.weights.len());
        for j in 0..self.weights.len() {
            for (a, b) in self.weights[j].iter_mut().zip(&other.weights[j]) {
                *a += b;
            }
            for (a, b) in self.biases[j].iter_mut().zip(&other.biases[j]) {
                *a += b;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for block in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            for v in block.iter_mut() {
                *v *= factor;
            }
        }
    }

    /// Negates every entry.
    pub fn negate(&mut self) {
        self.scale(-1.0);
    }

    /// Euclidean norm over all entries.
    pub fn norm(&self) -> f64 {
        let ss: f64 = self
            .weights
            .iter()
            .chain(self.biases.iter())
            .flat_map(|block| block.iter())
            .map(|v| v * v)
            .sum();
        ss.sqrt()
    }

    /// All entries in a fixed order (weights then biases, per layer).
    pub fn entries(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.weights.len()).flat_map(move |j| {
            self.weights[j]
                .iter()
                .copied()
                .chain(self.biases[j].iter().copied())
        })
    }
}

/// Parameter initialization scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitScheme {
    /// Every entry i.i.d. uniform on `[low, high]`.
    Uniform { low: f64, high: f64 },
    /// Per layer, entries i.i.d. uniform on `[-sqrt(6/fan_in), sqrt(6/fan_in)]`.
    /// Keeps ReLU units live at the widths used here.
    ScaledUniform,
}

/// Draws parameters i.i.d. from `scheme`, deterministically for a given seed.
pub fn init_params(arch: &Architecture, scheme: InitScheme, seed: u64) -> Result<NetworkParams> {
    if let InitScheme::Uniform { low, high } = scheme {
        if !low.is_finite() || !high.is_finite() || low > high {
            return Err(Error::config(format!("invalid uniform bounds [{low}, {high}]")));
        }
    }
    let mut generator = rng::seeded(seed);
    let mut params = NetworkParams::zeros(arch);
    let dims = params.dims().to_vec();
    #[allow(clippy::needless_range_loop)]
    for j in 0..dims.len() - 1 {
        let dist = match scheme {
            InitScheme::Uniform { low, high } => Uniform::new_inclusive(low, high),
            InitScheme::ScaledUniform => {
                let limit = (6.0 / dims[j] as f64).sqrt();
                Uniform::new_inclusive(-limit, limit)
            }
        }
        .map_err(|e| Error::config(format!("uniform distribution: {e}")))?;
        for w in params.weight_mut(j) {
            *w = dist.sample(&mut generator);
        }
        for b in params.bias_mut(j) {
            *b = dist.sample(&mut generator);
        }
    }
    Ok(params)
}

/// Intermediate values of one forward pass, kept for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    /// `layer_inputs[j]` is the input to affine layer `j` (`layer_inputs[0]` = x).
    pub layer_inputs: Vec<Vec<f64>>,
    /// `pre_activations[j] = M^j * layer_inputs[j] + theta^j`; the last one is
    /// the network output.
    pub pre_activations: Vec<Vec<f64>>,
}

impl ForwardTrace {
    pub fn output(&self) -> &[f64] {
        self.pre_activations.last().unwrap()
    }
}

fn affine(weight: &[f64], bias: &[f64], input: &[f64], out_dim: usize) -> Vec<f64> {
    let in_dim = input.len();
    let mut out = Vec::with_capacity(out_dim);
    for v in 0..out_dim {
        let row = &weight[v * in_dim..(v + 1) * in_dim];
        let mut acc = bias[v];
        for (w, x) in row.iter().zip(input) {
            acc += w * x;
        }
        out.push(acc);
    }
    out
}

/// Runs the network on `x`, returning all intermediate layer values.
pub fn forward_trace(params: &NetworkParams, x: &[f64]) -> Result<ForwardTrace> {
    if x.len() != params.input_dim() {
        return Err(Error::shape(format!(
            "input has length {}, network expects {}",
            x.len(),
            params.input_dim()
        )));
    }
    let layers = params.num_layers();
    let mut layer_inputs = Vec::with_capacity(layers);
    let mut pre_activations = Vec::with_capacity(layers);
    let mut current = x.to_vec();
    for j in 0..layers {
        let z = affine(
            params.weight(j),
            params.bias(j),
            &current,
            params.dims[j + 1],
        );
        layer_inputs.push(current);
        current = if j + 1 < layers {
            z.iter().map(|&v| if v > 0.0 { v } else { 0.0 }).collect()
        } else {
            Vec::new()
        };
        pre_activations.push(z);
    }
    Ok(ForwardTrace {
        layer_inputs,
        pre_activations,
    })
}

/// Evaluates the network on `x`. No activation follows the final affine map.
pub fn forward(params: &NetworkParams, x: &[f64]) -> Result<Vec<f64>> {
    let mut trace = forward_trace(params, x)?;
    Ok(trace.pre_activations.pop().unwrap())
}

/// Backpropagates `dl_doutput` through a recorded forward pass.
pub fn backward_from_trace(
    params: &NetworkParams,
    trace: &ForwardTrace,
    dl_doutput: &[f64],
) -> Result<GradientSet> {
    if dl_doutput.len() != params.output_dim() {
        return Err(Error::shape(format!(
            "output gradient has length {}, network emits {}",
            dl_doutput.len(),
            params.output_dim()
        )));
    }
    let layers = params.num_layers();
    let mut grads = GradientSet::zeros_like(params);
    let mut delta = dl_doutput.to_vec();
    for j in (0..layers).rev() {
        let input = &trace.layer_inputs[j];
        let in_dim = input.len();
        for (v, &d) in delta.iter().enumerate() {
            grads.biases[j][v] = d;
            let row = &mut grads.weights[j][v * in_dim..(v + 1) * in_dim];
            for (g, &a) in row.iter_mut().zip(input) {
                *g = d * a;
            }
        }
        if j > 0 {
            let weight = params.weight(j);
            let mut upstream = vec![0.0; in_dim];
            for (v, &d) in delta.iter().enumerate() {
                let row = &weight[v * in_dim..(v + 1) * in_dim];
                for (u, &w) in upstream.iter_mut().zip(row) {
                    *u += w * d;
                }
            }
            // ReLU derivative: 1 for positive pre-activation, 0 otherwise
            // (including exactly zero).
            let z = &trace.pre_activations[j - 1];
            for (u, &zv) in upstream.iter_mut().zip(z) {
                if zv <= 0.0 {
                    *u = 0.0;
                }
            }
            delta = upstream;
        }
    }
    Ok(grads)
}

/// Gradient of a scalar loss with output-gradient `dl_doutput`, with respect
/// to every weight and bias.
pub fn backward(params: &NetworkParams, x: &[f64], dl_doutput: &[f64]) -> Result<GradientSet> {
    let trace = forward_trace(params, x)?;
    backward_from_trace(params, &trace, dl_doutput)
}

/// Euclidean distance between two parameter sets, taken over every weight and
/// bias entry stacked into one vector.
pub fn param_distance(a: &NetworkParams, b: &NetworkParams) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(Error::shape("parameter sets have different shapes"));
    }
    let mut ss = 0.0;
    for j in 0..a.num_layers() {
        for (x, y) in a.weights[j].iter().zip(&b.weights[j]) {
            let d = x - y;
            ss += d * d;
        }
        for (x, y) in a.biases[j].iter().zip(&b.biases[j]) {
            let d = x - y;
            ss += d * d;
        }
    }
    Ok(ss.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arch(p: usize, c: usize, hidden: &[usize]) -> Architecture {
        Architecture::new(p, c, hidden.to_vec()).unwrap()
    }

    /// Independent straight-line evaluator used as the forward oracle.
    fn forward_naive(params: &NetworkParams, x: &[f64]) -> Vec<f64> {
        let dims = params.dims();
        let mut a = x.to_vec();
        for j in 0..params.num_layers() {
            let mut z = vec![0.0; dims[j + 1]];
            for (v, zv) in z.iter_mut().enumerate() {
                let mut s = params.bias(j)[v];
                for (w, x) in a.iter().enumerate() {
                    s += params.weight(j)[v * dims[j] + w] * x;
                }
                *zv = s;
            }
            if j + 1 < params.num_layers() {
                for v in z.iter_mut() {
                    *v = v.max(0.0);
                }
            }
            a = z;
        }
        a
    }

    #[test]
    fn single_affine_layer() {
        let a = arch(1, 1, &[]);
        let params =
            NetworkParams::from_parts(&a, vec![vec![2.0]], vec![vec![3.0]]).unwrap();
        assert_eq!(forward(&params, &[1.0]).unwrap(), vec![5.0]);
    }

    #[test]
    fn relu_kills_negative_branch() {
        let a = arch(1, 1, &[2]);
        let params = NetworkParams::from_parts(
            &a,
            vec![vec![1.0, -1.0], vec![1.0, 1.0]],
            vec![vec![0.0, 0.0], vec![0.0]],
        )
        .unwrap();
        // x = -2: hidden pre-activations [-2, 2] -> ReLU [0, 2] -> output 2.
        assert_eq!(forward(&params, &[-2.0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn forward_matches_straight_line_oracle() {
        let a = arch(3, 2, &[4, 4]);
        let params = init_params(&a, InitScheme::Uniform { low: -1.0, high: 1.0 }, 11).unwrap();
        let mut r = crate::rng::seeded(99);
        use rand::Rng;
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| r.random_range(-2.0..2.0)).collect();
            let got = forward(&params, &x).unwrap();
            let want = forward_naive(&params, &x);
            assert_eq!(got.len(), want.len());
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-12, "got {g}, oracle {w}");
            }
        }
    }

    #[test]
    fn forward_rejects_bad_input_length() {
        let a = arch(3, 1, &[]);
        let params = NetworkParams::zeros(&a);
        assert!(matches!(forward(&params, &[1.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn forward_is_pure() {
        let a = arch(2, 2, &[3]);
        let params = init_params(&a, InitScheme::ScaledUniform, 5).unwrap();
        let x = [0.3, -0.7];
        let y1 = forward(&params, &x).unwrap();
        let y2 = forward(&params, &x).unwrap();
        assert_eq!(y1, y2);
    }

    #[test]
    fn affine_gradient() {
        let a = arch(1, 1, &[]);
        let params =
            NetworkParams::from_parts(&a, vec![vec![2.0]], vec![vec![3.0]]).unwrap();
        let g = backward(&params, &[1.0], &[1.0]).unwrap();
        assert_eq!(g.weight(0), &[1.0]);
        assert_eq!(g.bias(0), &[1.0]);
    }

    #[test]
    fn zero_preactivation_blocks_gradient() {
        // Hidden pre-activation is exactly 0: no gradient reaches layer 0.
        let a = arch(1, 1, &[1]);
        let params = NetworkParams::from_parts(
            &a,
            vec![vec![1.0], vec![1.0]],
            vec![vec![-1.0], vec![0.0]],
        )
        .unwrap();
        let trace = forward_trace(&params, &[1.0]).unwrap();
        assert_eq!(trace.pre_activations[0], vec![0.0]);
        let g = backward_from_trace(&params, &trace, &[-2.0]).unwrap();
        assert_eq!(g.weight(0), &[0.0]);
        assert_eq!(g.bias(0), &[0.0]);
        // Output layer still sees its own (zero-activation) input and bias.
        assert_eq!(g.weight(1), &[0.0]);
        assert_eq!(g.bias(1), &[-2.0]);
    }

    #[test]
    fn init_is_deterministic() {
        let a = arch(4, 2, &[5, 5]);
        let p1 = init_params(&a, InitScheme::Uniform { low: -1.0, high: 1.0 }, 7).unwrap();
        let p2 = init_params(&a, InitScheme::Uniform { low: -1.0, high: 1.0 }, 7).unwrap();
        assert_eq!(p1, p2);
        let p3 = init_params(&a, InitScheme::Uniform { low: -1.0, high: 1.0 }, 8).unwrap();
        assert_ne!(p1, p3);
    }

    #[test]
    fn degenerate_bounds_give_constant_params() {
        let a = arch(2, 1, &[3]);
        let p = init_params(&a, InitScheme::Uniform { low: 0.0, high: 0.0 }, 1).unwrap();
        for j in 0..p.num_layers() {
            assert!(p.weight(j).iter().all(|&v| v == 0.0));
            assert!(p.bias(j).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn inverted_bounds_rejected() {
        let a = arch(1, 1, &[]);
        let r = init_params(&a, InitScheme::Uniform { low: 1.0, high: -1.0 }, 1);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn uniform_moments() {
        // ~1e5 draws of U(-1, 1): mean near 0, variance near 1/3.
        let a = arch(100, 100, &[500, 500]); // 100*500 + 500*500 + 500*100 + biases
        let p = init_params(&a, InitScheme::Uniform { low: -1.0, high: 1.0 }, 3).unwrap();
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut count = 0usize;
        for j in 0..p.num_layers() {
            for &v in p.weight(j).iter().chain(p.bias(j)) {
                sum += v;
                sum_sq += v * v;
                count += 1;
            }
        }
        assert!(count >= 100_000);
        let mean = sum / count as f64;
        let var = sum_sq / count as f64 - mean * mean;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0 / 3.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn param_distance_identity_and_single_coordinate() {
        let a = arch(2, 1, &[3]);
        let p = init_params(&a, InitScheme::ScaledUniform, 1).unwrap();
        assert_eq!(param_distance(&p, &p).unwrap(), 0.0);
        let mut q = p.clone();
        q.weight_mut(1)[0] += 3.0;
        assert!((param_distance(&p, &q).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn param_distance_matches_flat_loop_oracle() {
        let a = arch(3, 2, &[4]);
        let p = init_params(&a, InitScheme::Uniform { low: -1.0, high: 1.0 }, 21).unwrap();
        let q = init_params(&a, InitScheme::Uniform { low: -1.0, high: 1.0 }, 22).unwrap();
        let mut ss = 0.0;
        for j in 0..p.num_layers() {
            for (x, y) in p.weight(j).iter().zip(q.weight(j)) {
                ss += (x - y) * (x - y);
            }
            for (x, y) in p.bias(j).iter().zip(q.bias(j)) {
                ss += (x - y) * (x - y);
            }
        }
        assert!((param_distance(&p, &q).unwrap() - ss.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn param_distance_rejects_shape_mismatch() {
        let p = NetworkParams::zeros(&arch(2, 1, &[3]));
        let q = NetworkParams::zeros(&arch(2, 1, &[4]));
        assert!(matches!(param_distance(&p, &q), Err(Error::Shape(_))));
    }

    #[test]
    fn positive_homogeneity_of_preactivations() {
        // With all biases zero, scaling the input by lambda > 0 scales every
        // hidden pre-activation by lambda.
        let a = arch(3, 2, &[4, 5]);
        let mut params = init_params(&a, InitScheme::ScaledUniform, 17).unwrap();
        for j in 0..params.num_layers() {
            for b in params.bias_mut(j) {
                *b = 0.0;
            }
        }
        let x = [0.4, -1.2, 0.7];
        let lambda = 2.5;
        let xs: Vec<f64> = x.iter().map(|v| v * lambda).collect();
        let t1 = forward_trace(&params, &x).unwrap();
        let t2 = forward_trace(&params, &xs).unwrap();
        for (z1, z2) in t1.pre_activations.iter().zip(&t2.pre_activations) {
            for (a1, a2) in z1.iter().zip(z2) {
                assert!((a1 * lambda - a2).abs() < 1e-10 * (1.0 + a2.abs()));
            }
        }
    }
}
