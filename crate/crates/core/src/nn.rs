//! Minimal feed-forward network machinery: parameter containers, forward
//! pass, exact backpropagation, and an adaptive-moment optimizer.
//!
//! Everything is 64-bit and hand-rolled so gradients can be checked against
//! central finite differences. Weight matrices are `out_dim x in_dim`
//! row-major.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Identity => z,
        }
    }

    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn new(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        Self {
            in_dim,
            out_dim,
            activation,
        }
    }
}

/// Dense network parameters. Shapes chain: layer `l`'s `in_dim` equals layer
/// `l-1`'s `out_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetParams {
    pub specs: Vec<LayerSpec>,
    /// `weights[l][o * in_dim + i]`
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

/// Activation cache from one forward pass, consumed by `backward`.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input to each layer (post-activation of the previous one).
    inputs: Vec<Vec<f64>>,
    /// Pre-activation of each layer.
    pre_acts: Vec<Vec<f64>>,
}

/// Parameter gradients plus the gradient with respect to the network input.
#[derive(Debug, Clone)]
pub struct Grads {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub input: Vec<f64>,
}

impl Grads {
    pub fn zeros_like(params: &NetParams) -> Self {
        Self {
            weights: params.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: params.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
            input: vec![0.0; params.input_dim()],
        }
    }

    pub fn accumulate(&mut self, other: &Grads) {
        for (acc, g) in self.weights.iter_mut().zip(&other.weights) {
            for (a, v) in acc.iter_mut().zip(g) {
                *a += v;
            }
        }
        for (acc, g) in self.biases.iter_mut().zip(&other.biases) {
            for (a, v) in acc.iter_mut().zip(g) {
                *a += v;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for w in &mut self.weights {
            for v in w {
                *v *= factor;
            }
        }
        for b in &mut self.biases {
            for v in b {
                *v *= factor;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.weights
            .iter()
            .chain(self.biases.iter())
            .all(|v| v.iter().all(|x| x.is_finite()))
    }
}

fn validate_specs(specs: &[LayerSpec]) -> Result<()> {
    if specs.is_empty() {
        return Err(Error::Config("network needs at least one layer".into()));
    }
    for spec in specs {
        if spec.in_dim == 0 || spec.out_dim == 0 {
            return Err(Error::Config("layer dimensions must be >= 1".into()));
        }
    }
    for pair in specs.windows(2) {
        if pair[0].out_dim != pair[1].in_dim {
            return Err(Error::Config(format!(
                "layer shapes do not chain: {} -> {}",
                pair[0].out_dim, pair[1].in_dim
            )));
        }
    }
    Ok(())
}

impl NetParams {
    /// Uniform fan-in/fan-out initialization: weights from
    /// `+/- sqrt(6 / (in + out))`, biases zero.
    pub fn init<R: Rng>(specs: Vec<LayerSpec>, rng: &mut R) -> Result<Self> {
        validate_specs(&specs)?;
        let mut weights = Vec::with_capacity(specs.len());
        let mut biases = Vec::with_capacity(specs.len());
        for spec in &specs {
            let bound = (6.0 / (spec.in_dim + spec.out_dim) as f64).sqrt();
            let w = (0..spec.in_dim * spec.out_dim)
                .map(|_| rng.gen_range(-bound..bound))
                .collect();
            weights.push(w);
            biases.push(vec![0.0; spec.out_dim]);
        }
        Ok(Self {
            specs,
            weights,
            biases,
        })
    }

    pub fn zeros(specs: Vec<LayerSpec>) -> Result<Self> {
        validate_specs(&specs)?;
        let weights = specs
            .iter()
            .map(|s| vec![0.0; s.in_dim * s.out_dim])
            .collect();
        let biases = specs.iter().map(|s| vec![0.0; s.out_dim]).collect();
        Ok(Self {
            specs,
            weights,
            biases,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.specs[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.specs[self.specs.len() - 1].out_dim
    }

    pub fn parameter_count(&self) -> usize {
        self.specs
            .iter()
            .map(|s| s.in_dim * s.out_dim + s.out_dim)
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.weights
            .iter()
            .chain(self.biases.iter())
            .all(|v| v.iter().all(|x| x.is_finite()))
    }

    /// Shape and finiteness checks for parameters from untrusted sources.
    pub fn validate(&self) -> Result<()> {
        validate_specs(&self.specs)?;
        if self.weights.len() != self.specs.len() || self.biases.len() != self.specs.len() {
            return Err(Error::Format("layer count mismatch".into()));
        }
        for (l, spec) in self.specs.iter().enumerate() {
            if self.weights[l].len() != spec.in_dim * spec.out_dim
                || self.biases[l].len() != spec.out_dim
            {
                return Err(Error::Format(format!("layer {l} parameter shape mismatch")));
            }
        }
        if !self.is_finite() {
            return Err(Error::Format("parameters contain non-finite values".into()));
        }
        Ok(())
    }

    /// Forward pass returning the output and the cache needed by `backward`.
    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
        if input.len() != self.input_dim() {
            return Err(Error::Config(format!(
                "input dimension {} does not match network input {}",
                input.len(),
                self.input_dim()
            )));
        }
        let mut inputs = Vec::with_capacity(self.specs.len());
        let mut pre_acts = Vec::with_capacity(self.specs.len());
        let mut x = input.to_vec();
        for (l, spec) in self.specs.iter().enumerate() {
            let w = &self.weights[l];
            let b = &self.biases[l];
            let mut z = vec![0.0; spec.out_dim];
            for o in 0..spec.out_dim {
                let row = &w[o * spec.in_dim..(o + 1) * spec.in_dim];
                let mut acc = b[o];
                for (wi, xi) in row.iter().zip(&x) {
                    acc += wi * xi;
                }
                z[o] = acc;
            }
            let a: Vec<f64> = z.iter().map(|&v| spec.activation.apply(v)).collect();
            inputs.push(x);
            pre_acts.push(z);
            x = a;
        }
        Ok((x, ForwardCache { inputs, pre_acts }))
    }

    /// Output without a cache, for inference.
    pub fn infer(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward(input)?.0)
    }

    /// Exact gradients of the scalar loss whose output gradient is
    /// `output_grad`, plus the gradient with respect to the input.
    pub fn backward(&self, cache: &ForwardCache, output_grad: &[f64]) -> Result<Grads> {
        if cache.inputs.len() != self.specs.len()
            || cache.inputs[0].len() != self.input_dim()
            || output_grad.len() != self.output_dim()
        {
            return Err(Error::Usage(
                "backward cache does not match this network's forward pass".into(),
            ));
        }
        let mut grads = Grads::zeros_like(self);
        let mut upstream = output_grad.to_vec();
        for l in (0..self.specs.len()).rev() {
            let spec = &self.specs[l];
            let x = &cache.inputs[l];
            let z = &cache.pre_acts[l];
            if x.len() != spec.in_dim || z.len() != spec.out_dim {
                return Err(Error::Usage(
                    "backward cache does not match this network's forward pass".into(),
                ));
            }
            let mut dz = vec![0.0; spec.out_dim];
            for o in 0..spec.out_dim {
                dz[o] = upstream[o] * spec.activation.derivative(z[o]);
            }
            let w = &self.weights[l];
            let gw = &mut grads.weights[l];
            for o in 0..spec.out_dim {
                let row = &mut gw[o * spec.in_dim..(o + 1) * spec.in_dim];
                for (gi, xi) in row.iter_mut().zip(x) {
                    *gi += dz[o] * xi;
                }
            }
            grads.biases[l].copy_from_slice(&dz);
            let mut dx = vec![0.0; spec.in_dim];
            for o in 0..spec.out_dim {
                let row = &w[o * spec.in_dim..(o + 1) * spec.in_dim];
                for (dxi, wi) in dx.iter_mut().zip(row) {
                    *dxi += dz[o] * wi;
                }
            }
            upstream = dx;
        }
        grads.input = upstream;
        Ok(grads)
    }

    /// Versioned JSON checkpoint; load/save round-trips byte-exactly.
    pub fn to_checkpoint_string(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Checkpoint<'a> {
            version: u32,
            layers: &'a [LayerSpec],
            weights: &'a [Vec<f64>],
            biases: &'a [Vec<f64>],
        }
        Ok(serde_json::to_string(&Checkpoint {
            version: 1,
            layers: &self.specs,
            weights: &self.weights,
            biases: &self.biases,
        })?)
    }

    pub fn from_checkpoint_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Checkpoint {
            version: u32,
            layers: Vec<LayerSpec>,
            weights: Vec<Vec<f64>>,
            biases: Vec<Vec<f64>>,
        }
        let ckpt: Checkpoint = serde_json::from_str(s)?;
        if ckpt.version != 1 {
            return Err(Error::Format(format!(
                "unsupported checkpoint version {}",
                ckpt.version
            )));
        }
        let params = NetParams {
            specs: ckpt.layers,
            weights: ckpt.weights,
            biases: ckpt.biases,
        };
        params.validate()?;
        Ok(params)
    }
}

/// Adaptive-moment optimizer state (step count, first/second moments).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: u64,
    m_weights: Vec<Vec<f64>>,
    v_weights: Vec<Vec<f64>>,
    m_biases: Vec<Vec<f64>>,
    v_biases: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(params: &NetParams, learning_rate: f64) -> Self {
        let zeros_w: Vec<Vec<f64>> = params.weights.iter().map(|w| vec![0.0; w.len()]).collect();
        let zeros_b: Vec<Vec<f64>> = params.biases.iter().map(|b| vec![0.0; b.len()]).collect();
        Self {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            m_weights: zeros_w.clone(),
            v_weights: zeros_w,
            m_biases: zeros_b.clone(),
            v_biases: zeros_b,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One bias-corrected update:
    /// `theta -= lr * m_hat / (sqrt(v_hat) + eps)`.
    pub fn step(&mut self, params: &mut NetParams, grads: &Grads) -> Result<()> {
        if !grads.is_finite() {
            return Err(Error::Training(format!(
                "non-finite gradient at optimizer step {}",
                self.step + 1
            )));
        }
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step as i32);
        let c2 = 1.0 - self.beta2.powi(self.step as i32);
        let update = |theta: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]| {
            for i in 0..theta.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                theta[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        };
        for l in 0..params.weights.len() {
            update(
                &mut params.weights[l],
                &grads.weights[l],
                &mut self.m_weights[l],
                &mut self.v_weights[l],
            );
            update(
                &mut params.biases[l],
                &grads.biases[l],
                &mut self.m_biases[l],
                &mut self.v_biases[l],
            );
        }
        if !params.is_finite() {
            return Err(Error::Training(format!(
                "non-finite parameter after optimizer step {}",
                self.step
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn loss_half_sq(params: &NetParams, x: &[f64], y: &[f64]) -> f64 {
        let out = params.infer(x).unwrap();
        out.iter().zip(y).map(|(o, t)| 0.5 * (o - t) * (o - t)).sum()
    }

    /// Central finite differences over every parameter; the independent
    /// gradient oracle.
    fn finite_diff_grads(params: &NetParams, x: &[f64], y: &[f64], h: f64) -> Grads {
        let mut fd = Grads::zeros_like(params);
        for l in 0..params.weights.len() {
            for i in 0..params.weights[l].len() {
                let mut plus = params.clone();
                let mut minus = params.clone();
                plus.weights[l][i] += h;
                minus.weights[l][i] -= h;
                fd.weights[l][i] =
                    (loss_half_sq(&plus, x, y) - loss_half_sq(&minus, x, y)) / (2.0 * h);
            }
            for i in 0..params.biases[l].len() {
                let mut plus = params.clone();
                let mut minus = params.clone();
                plus.biases[l][i] += h;
                minus.biases[l][i] -= h;
                fd.biases[l][i] =
                    (loss_half_sq(&plus, x, y) - loss_half_sq(&minus, x, y)) / (2.0 * h);
            }
        }
        fd
    }

    fn backprop_grads(params: &NetParams, x: &[f64], y: &[f64]) -> Grads {
        let (out, cache) = params.forward(x).unwrap();
        let out_grad: Vec<f64> = out.iter().zip(y).map(|(o, t)| o - t).collect();
        params.backward(&cache, &out_grad).unwrap()
    }

    fn max_rel_error(a: &Grads, b: &Grads) -> f64 {
        let mut worst: f64 = 0.0;
        let pairs = a
            .weights
            .iter()
            .flatten()
            .zip(b.weights.iter().flatten())
            .chain(a.biases.iter().flatten().zip(b.biases.iter().flatten()));
        for (x, y) in pairs {
            let denom = x.abs().max(y.abs()).max(1e-8);
            worst = worst.max((x - y).abs() / denom);
        }
        worst
    }

    #[test]
    fn identity_layer_with_identity_weights_is_identity() {
        let spec = vec![LayerSpec::new(3, 3, Activation::Identity)];
        let mut params = NetParams::zeros(spec).unwrap();
        for i in 0..3 {
            params.weights[0][i * 3 + i] = 1.0;
        }
        let x = [0.3, -1.2, 2.5];
        assert_eq!(params.infer(&x).unwrap(), x.to_vec());
    }

    #[test]
    fn zero_weights_emit_activated_bias() {
        let spec = vec![LayerSpec::new(2, 2, Activation::Relu)];
        let mut params = NetParams::zeros(spec).unwrap();
        params.biases[0] = vec![1.5, -2.0];
        assert_eq!(params.infer(&[3.0, 4.0]).unwrap(), vec![1.5, 0.0]);
    }

    #[test]
    fn relu_clamps_negative_preactivations_to_zero() {
        let spec = vec![LayerSpec::new(2, 2, Activation::Relu)];
        let mut params = NetParams::zeros(spec).unwrap();
        params.weights[0] = vec![1.0, 0.0, 0.0, 1.0];
        assert_eq!(params.infer(&[-1.0, -5.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn zero_output_grad_yields_zero_parameter_grads() {
        let specs = vec![
            LayerSpec::new(4, 8, Activation::Relu),
            LayerSpec::new(8, 2, Activation::Identity),
        ];
        let params = NetParams::init(specs, &mut rng(1)).unwrap();
        let x = [0.1, -0.2, 0.3, 0.4];
        let (_, cache) = params.forward(&x).unwrap();
        let grads = params.backward(&cache, &[0.0, 0.0]).unwrap();
        assert!(grads.weights.iter().flatten().all(|&g| g == 0.0));
        assert!(grads.biases.iter().flatten().all(|&g| g == 0.0));
    }

    #[test]
    fn single_linear_layer_gradient_has_closed_form() {
        // loss = 0.5 ||Wx - y||^2  =>  dW = (Wx - y) x^T
        let spec = vec![LayerSpec::new(2, 2, Activation::Identity)];
        let mut params = NetParams::zeros(spec).unwrap();
        params.weights[0] = vec![1.0, 2.0, -0.5, 0.25];
        let x = [0.7, -1.1];
        let y = [0.2, 0.9];
        let grads = backprop_grads(&params, &x, &y);
        let out = params.infer(&x).unwrap();
        for o in 0..2 {
            for i in 0..2 {
                let expected = (out[o] - y[o]) * x[i];
                assert!((grads.weights[0][o * 2 + i] - expected).abs() < 1e-15);
            }
        }
    }

    /// Central differences are only valid away from relu kinks: every
    /// pre-activation must clear the probe step by a margin.
    fn kink_free(params: &NetParams, x: &[f64], margin: f64) -> bool {
        let (_, cache) = params.forward(x).unwrap();
        params
            .specs
            .iter()
            .zip(&cache.pre_acts)
            .filter(|(spec, _)| spec.activation == Activation::Relu)
            .all(|(_, z)| z.iter().all(|v| v.abs() > margin))
    }

    #[test]
    fn backprop_matches_finite_differences_on_random_small_nets() {
        let mut r = rng(42);
        let mut trials = 0;
        while trials < 20 {
            let hidden = 2 + (trials % 6);
            let specs = vec![
                LayerSpec::new(3, hidden, Activation::Relu),
                LayerSpec::new(hidden, hidden, Activation::Relu),
                LayerSpec::new(hidden, 2, Activation::Identity),
            ];
            let params = NetParams::init(specs, &mut r).unwrap();
            let x: Vec<f64> = (0..3).map(|_| r.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..2).map(|_| r.gen_range(-1.0..1.0)).collect();
            if !kink_free(&params, &x, 1e-3) {
                continue;
            }
            trials += 1;
            let analytic = backprop_grads(&params, &x, &y);
            let numeric = finite_diff_grads(&params, &x, &y, 1e-5);
            let err = max_rel_error(&analytic, &numeric);
            assert!(err < 1e-6, "trial {trials}: max rel error {err}");
        }
    }

    #[test]
    fn backward_rejects_mismatched_cache() {
        let specs_a = vec![LayerSpec::new(3, 2, Activation::Identity)];
        let specs_b = vec![LayerSpec::new(4, 2, Activation::Identity)];
        let a = NetParams::init(specs_a, &mut rng(1)).unwrap();
        let b = NetParams::init(specs_b, &mut rng(2)).unwrap();
        let (_, cache_b) = b.forward(&[0.0; 4]).unwrap();
        assert!(a.backward(&cache_b, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn optimizer_zero_gradient_keeps_parameters() {
        let specs = vec![LayerSpec::new(2, 2, Activation::Identity)];
        let mut params = NetParams::init(specs, &mut rng(3)).unwrap();
        let before = params.clone();
        let mut opt = Adam::new(&params, 1e-3);
        let grads = Grads::zeros_like(&params);
        opt.step(&mut params, &grads).unwrap();
        assert_eq!(params, before);
        assert_eq!(opt.step_count(), 1);
    }

    #[test]
    fn optimizer_zero_learning_rate_keeps_parameters() {
        let specs = vec![LayerSpec::new(2, 2, Activation::Identity)];
        let mut params = NetParams::init(specs, &mut rng(4)).unwrap();
        let before = params.clone();
        let mut opt = Adam::new(&params, 0.0);
        let mut grads = Grads::zeros_like(&params);
        grads.weights[0][0] = 1.0;
        opt.step(&mut params, &grads).unwrap();
        assert_eq!(params, before);
    }

    #[test]
    fn optimizer_matches_hand_computed_two_step_recursion() {
        // Scalar parameter, constant gradient g = 0.5, lr 1e-3.
        let specs = vec![LayerSpec::new(1, 1, Activation::Identity)];
        let mut params = NetParams::zeros(specs).unwrap();
        params.weights[0][0] = 1.0;
        let mut opt = Adam::new(&params, 1e-3);
        let mut grads = Grads::zeros_like(&params);
        grads.weights[0][0] = 0.5;
        opt.step(&mut params, &grads).unwrap();
        opt.step(&mut params, &grads).unwrap();

        // Hand recursion at beta1=0.9, beta2=0.999, eps=1e-8.
        let (g, lr, b1, b2, eps) = (0.5, 1e-3, 0.9, 0.999, 1e-8);
        let mut theta: f64 = 1.0;
        let (mut m, mut v) = (0.0, 0.0);
        for t in 1..=2 {
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let m_hat = m / (1.0 - b1_pow(b1, t));
            let v_hat = v / (1.0 - b1_pow(b2, t));
            theta -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        assert!((params.weights[0][0] - theta).abs() < 1e-15);

        fn b1_pow(b: f64, t: i32) -> f64 {
            b.powi(t)
        }
    }

    #[test]
    fn optimizer_rejects_non_finite_gradients() {
        let specs = vec![LayerSpec::new(1, 1, Activation::Identity)];
        let mut params = NetParams::zeros(specs).unwrap();
        let mut opt = Adam::new(&params, 1e-3);
        let mut grads = Grads::zeros_like(&params);
        grads.weights[0][0] = f64::NAN;
        assert!(opt.step(&mut params, &grads).is_err());
    }

    #[test]
    fn initialization_is_seed_deterministic() {
        let specs = vec![
            LayerSpec::new(5, 7, Activation::Relu),
            LayerSpec::new(7, 3, Activation::Identity),
        ];
        let a = NetParams::init(specs.clone(), &mut rng(9)).unwrap();
        let b = NetParams::init(specs, &mut rng(9)).unwrap();
        assert_eq!(a, b);
        let bound = (6.0 / 12.0f64).sqrt();
        assert!(a.weights[0].iter().all(|w| w.abs() <= bound));
    }

    #[test]
    fn checkpoint_round_trip_is_byte_exact() {
        let specs = vec![
            LayerSpec::new(4, 6, Activation::Relu),
            LayerSpec::new(6, 2, Activation::Identity),
        ];
        let params = NetParams::init(specs, &mut rng(11)).unwrap();
        let s1 = params.to_checkpoint_string().unwrap();
        let loaded = NetParams::from_checkpoint_str(&s1).unwrap();
        assert_eq!(params, loaded);
        let s2 = loaded.to_checkpoint_string().unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn checkpoint_rejects_malformed_input() {
        assert!(NetParams::from_checkpoint_str("{}").is_err());
        let specs = vec![LayerSpec::new(2, 2, Activation::Identity)];
        let params = NetParams::zeros(specs).unwrap();
        let good = params.to_checkpoint_string().unwrap();
        let bad_version = good.replace("\"version\":1", "\"version\":9");
        assert!(NetParams::from_checkpoint_str(&bad_version).is_err());
    }
}
