//! Minimal dense MLP engine: forward, backprop, SGD with momentum and
//! decoupled weight decay, milestone learning-rate schedule, and a central
//! finite-difference gradient checker.
//!
//! ReLU between layers, identity at the output. No autodiff graph; gradients
//! are derived by hand and verified against the finite-difference oracle.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::vector::SoftLabel;

/// One dense layer; weights are row-major `(out_dim, in_dim)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearLayer {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub in_dim: usize,
    pub out_dim: usize,
}

impl LinearLayer {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Self { weights: vec![0.0; in_dim * out_dim], bias: vec![0.0; out_dim], in_dim, out_dim }
    }

    /// Uniform init in `[-1/sqrt(in_dim), 1/sqrt(in_dim)]`.
    pub fn uniform<R: Rng>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let weights = (0..in_dim * out_dim).map(|_| rng.gen_range(-bound..=bound)).collect();
        let bias = (0..out_dim).map(|_| rng.gen_range(-bound..=bound)).collect();
        Self { weights, bias, in_dim, out_dim }
    }

    pub fn identity(dim: usize) -> Self {
        let mut l = Self::zeros(dim, dim);
        for i in 0..dim {
            l.weights[i * dim + i] = 1.0;
        }
        l
    }

    /// `out = W x + b` for one sample.
    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, out_v) in out.iter_mut().enumerate() {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let mut acc = self.bias[o];
            for (w, xi) in row.iter().zip(x) {
                acc += w * xi;
            }
            *out_v = acc;
        }
    }
}

/// Feed-forward network: ReLU after every layer except the last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<LinearLayer>,
}

/// Per-layer activations cached by [`Mlp::forward_cached`]; input excluded.
pub struct ForwardCache {
    /// Post-activation outputs per layer (ReLU applied except on the last).
    activations: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("at least one layer")
    }
}

/// Parameter gradients, same shapes as the network.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub d_weights: Vec<Vec<f64>>,
    pub d_biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(mlp: &Mlp) -> Self {
        Self {
            d_weights: mlp.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            d_biases: mlp.layers.iter().map(|l| vec![0.0; l.bias.len()]).collect(),
        }
    }

    pub fn scale(&mut self, s: f64) {
        for w in &mut self.d_weights {
            for v in w.iter_mut() {
                *v *= s;
            }
        }
        for b in &mut self.d_biases {
            for v in b.iter_mut() {
                *v *= s;
            }
        }
    }
}

impl Mlp {
    /// Network with the given layer dimensions, e.g. `[16, 32, 16]` for a
    /// two-layer MLP; weights seeded uniformly in `±1/sqrt(fan_in)`.
    pub fn new(dims: &[usize], seed: RngSeed) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Input("mlp needs at least one layer".into()));
        }
        if dims.iter().any(|d| *d == 0) {
            return Err(Error::Input("mlp layer dims must be positive".into()));
        }
        let mut rng = seed.rng();
        let layers = dims
            .windows(2)
            .map(|w| LinearLayer::uniform(w[0], w[1], &mut rng))
            .collect();
        Ok(Self { layers })
    }

    pub fn from_layers(layers: Vec<LinearLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Input("mlp needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::Dimension { expected: pair[0].out_dim, got: pair[1].in_dim });
            }
        }
        Ok(Self { layers })
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        let layers = dims.windows(2).map(|w| LinearLayer::zeros(w[0], w[1])).collect();
        Self::from_layers(layers)
    }

    pub fn layers(&self) -> &[LinearLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [LinearLayer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().out_dim
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// Forward pass for one sample.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut cache = self.forward_cached(x)?;
        Ok(cache.activations.pop().expect("at least one layer"))
    }

    /// Forward pass keeping per-layer activations for backprop.
    pub fn forward_cached(&self, x: &[f64]) -> Result<ForwardCache> {
        if x.len() != self.input_dim() {
            return Err(Error::Dimension { expected: self.input_dim(), got: x.len() });
        }
        let n_layers = self.layers.len();
        let mut activations = Vec::with_capacity(n_layers);
        let mut cur = x;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut out = vec![0.0; layer.out_dim];
            layer.forward_into(cur, &mut out);
            if i + 1 < n_layers {
                for v in out.iter_mut() {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
            }
            activations.push(out);
            cur = activations.last().unwrap();
        }
        Ok(ForwardCache { activations })
    }

    /// Forward pass over a batch of rows.
    pub fn forward_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.iter().map(|r| self.forward(r)).collect()
    }

    /// Backpropagates `d_out` (dL/d output) for one sample whose forward
    /// pass produced `cache`. Accumulates parameter gradients into `grads`
    /// and returns dL/d input.
    pub fn backward_accumulate(
        &self,
        x: &[f64],
        cache: &ForwardCache,
        d_out: &[f64],
        grads: &mut Gradients,
    ) -> Vec<f64> {
        debug_assert_eq!(d_out.len(), self.output_dim());
        let mut delta = d_out.to_vec();
        for idx in (0..self.layers.len()).rev() {
            let layer = &self.layers[idx];
            // ReLU derivative on hidden layers: gate by post-activation sign
            if idx + 1 < self.layers.len() {
                for (d, a) in delta.iter_mut().zip(&cache.activations[idx]) {
                    if *a <= 0.0 {
                        *d = 0.0;
                    }
                }
            }
            let input: &[f64] = if idx == 0 { x } else { &cache.activations[idx - 1] };
            let dw = &mut grads.d_weights[idx];
            for (o, d) in delta.iter().enumerate() {
                let row = &mut dw[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (w, xi) in row.iter_mut().zip(input) {
                    *w += d * xi;
                }
                grads.d_biases[idx][o] += d;
            }
            if idx == 0 {
                let mut d_in = vec![0.0; layer.in_dim];
                for (o, d) in delta.iter().enumerate() {
                    let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                    for (di, w) in d_in.iter_mut().zip(row) {
                        *di += d * w;
                    }
                }
                return d_in;
            }
            let mut next = vec![0.0; layer.in_dim];
            for (o, d) in delta.iter().enumerate() {
                let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (nv, w) in next.iter_mut().zip(row) {
                    *nv += d * w;
                }
            }
            delta = next;
        }
        unreachable!("loop returns at idx == 0");
    }

    pub fn flatten_params(&self, out: &mut Vec<f64>) {
        out.clear();
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
    }

    pub fn set_params(&mut self, params: &[f64]) {
        let mut i = 0;
        for l in &mut self.layers {
            l.weights.copy_from_slice(&params[i..i + l.weights.len()]);
            i += l.weights.len();
            l.bias.copy_from_slice(&params[i..i + l.bias.len()]);
            i += l.bias.len();
        }
        debug_assert_eq!(i, params.len());
    }

    pub fn flatten_grads(grads: &Gradients, out: &mut Vec<f64>) {
        out.clear();
        for (w, b) in grads.d_weights.iter().zip(&grads.d_biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
    }
}

/// Softmax cross-entropy against a soft target.
///
/// Returns the loss and dL/d logits = softmax(logits) − target.
pub fn softmax_cross_entropy(logits: &[f64], target: &SoftLabel) -> Result<(f64, Vec<f64>)> {
    if logits.len() != target.len() {
        return Err(Error::Dimension { expected: target.len(), got: logits.len() });
    }
    if logits.iter().any(|v| v.is_nan()) {
        return Err(Error::Numeric("NaN logits".into()));
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    let log_sum = sum.ln() + max;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(logits.len());
    for ((&l, &e), &t) in logits.iter().zip(&exps).zip(target.weights()) {
        loss -= t * (l - log_sum);
        grad.push(e / sum - t);
    }
    Ok((loss, grad))
}

/// SGD hyperparameters: momentum, decoupled weight decay and a milestone
/// learning-rate schedule (lr is divided by `decay` after each milestone).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SgdConfig {
    pub lr0: f64,
    pub milestones: Vec<usize>,
    pub decay: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for SgdConfig {
    fn default() -> Self {
        Self {
            lr0: 0.1,
            milestones: vec![60, 80],
            decay: 10.0,
            momentum: 0.9,
            weight_decay: 1e-3,
            epochs: 100,
            batch_size: 32,
        }
    }
}

impl SgdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lr0 <= 0.0 {
            return Err(Error::Config("lr0 must be > 0".into()));
        }
        if self.decay <= 1.0 {
            return Err(Error::Config("decay must be > 1".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config("momentum must be in [0, 1)".into()));
        }
        if self.weight_decay < 0.0 {
            return Err(Error::Config("weight_decay must be >= 0".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        Ok(())
    }

    /// Learning rate at `epoch`: `lr0 / decay^(milestones passed)`.
    pub fn lr_at(&self, epoch: usize) -> f64 {
        let passed = self.milestones.iter().filter(|m| epoch >= **m).count() as i32;
        self.lr0 / self.decay.powi(passed)
    }
}

/// Momentum buffers for one network; owns no parameters.
#[derive(Debug, Clone)]
pub struct SgdOptimizer {
    velocity_w: Vec<Vec<f64>>,
    velocity_b: Vec<Vec<f64>>,
}

impl SgdOptimizer {
    pub fn new(mlp: &Mlp) -> Self {
        Self {
            velocity_w: mlp.layers().iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            velocity_b: mlp.layers().iter().map(|l| vec![0.0; l.bias.len()]).collect(),
        }
    }

    /// One parameter update:
    /// `v ← μ v + g`, `w ← w(1 − lr·λ) − lr·v` (decoupled decay, weights only).
    pub fn step(&mut self, mlp: &mut Mlp, grads: &Gradients, cfg: &SgdConfig, epoch: usize) {
        let lr = cfg.lr_at(epoch);
        for (idx, layer) in mlp.layers_mut().iter_mut().enumerate() {
            let vw = &mut self.velocity_w[idx];
            for ((w, v), g) in layer.weights.iter_mut().zip(vw.iter_mut()).zip(&grads.d_weights[idx]) {
                *v = cfg.momentum * *v + g;
                *w = *w * (1.0 - lr * cfg.weight_decay) - lr * *v;
            }
            let vb = &mut self.velocity_b[idx];
            for ((b, v), g) in layer.bias.iter_mut().zip(vb.iter_mut()).zip(&grads.d_biases[idx]) {
                *v = cfg.momentum * *v + g;
                *b -= lr * *v;
            }
        }
    }
}

/// Result of a finite-difference gradient check.
#[derive(Debug, Clone)]
pub struct GradReport {
    pub max_relative_error: f64,
    pub per_param: Vec<f64>,
}

/// Anything exposing a flat parameter vector; lets the checker walk
/// composite models (several networks trained jointly).
pub trait Parameterized {
    fn params(&self) -> Vec<f64>;
    fn set_params(&mut self, params: &[f64]);
}

impl Parameterized for Mlp {
    fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        self.flatten_params(&mut out);
        out
    }

    fn set_params(&mut self, params: &[f64]) {
        Mlp::set_params(self, params)
    }
}

/// Relative error with an absolute floor on the denominator, so that
/// near-zero gradient pairs do not inflate the report.
fn fd_relative_error(analytic: f64, numeric: f64) -> f64 {
    if analytic.abs() < 1e-8 && numeric.abs() < 1e-8 {
        return 0.0;
    }
    (analytic - numeric).abs() / numeric.abs().max(1e-3)
}

/// Compares `analytic` against central finite differences of `loss` over
/// every parameter of `model`.
pub fn grad_check_model<M, F>(model: &mut M, loss: F, analytic: &[f64], eps: f64) -> GradReport
where
    M: Parameterized,
    F: Fn(&M) -> f64,
{
    let base = model.params();
    assert_eq!(base.len(), analytic.len(), "analytic gradient length mismatch");
    let mut per_param = Vec::with_capacity(base.len());
    let mut work = base.clone();
    for i in 0..base.len() {
        work[i] = base[i] + eps;
        model.set_params(&work);
        let plus = loss(model);
        work[i] = base[i] - eps;
        model.set_params(&work);
        let minus = loss(model);
        work[i] = base[i];
        let numeric = (plus - minus) / (2.0 * eps);
        per_param.push(fd_relative_error(analytic[i], numeric));
    }
    model.set_params(&base);
    let max_relative_error = per_param.iter().cloned().fold(0.0, f64::max);
    GradReport { max_relative_error, per_param }
}

/// Mean cross-entropy loss of `mlp` on a batch.
pub fn batch_loss(mlp: &Mlp, batch: &[Vec<f64>], targets: &[SoftLabel]) -> Result<f64> {
    let mut total = 0.0;
    for (x, t) in batch.iter().zip(targets) {
        let out = mlp.forward(x)?;
        total += softmax_cross_entropy(&out, t)?.0;
    }
    Ok(total / batch.len() as f64)
}

/// Mean cross-entropy gradient of `mlp` on a batch.
pub fn batch_grads(mlp: &Mlp, batch: &[Vec<f64>], targets: &[SoftLabel]) -> Result<Gradients> {
    let mut grads = Gradients::zeros_like(mlp);
    for (x, t) in batch.iter().zip(targets) {
        let cache = mlp.forward_cached(x)?;
        let (_, d_out) = softmax_cross_entropy(cache.output(), t)?;
        mlp.backward_accumulate(x, &cache, &d_out, &mut grads);
    }
    grads.scale(1.0 / batch.len() as f64);
    Ok(grads)
}

/// Checks the MLP's analytic cross-entropy gradients against central finite
/// differences on the given batch.
pub fn grad_check(mlp: &mut Mlp, batch: &[Vec<f64>], targets: &[SoftLabel], eps: f64) -> Result<GradReport> {
    let grads = batch_grads(mlp, batch, targets)?;
    let mut analytic = Vec::new();
    Mlp::flatten_grads(&grads, &mut analytic);
    Ok(grad_check_model(
        mlp,
        |m| batch_loss(m, batch, targets).expect("loss"),
        &analytic,
        eps,
    ))
}
