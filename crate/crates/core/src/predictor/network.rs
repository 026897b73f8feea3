//! Fully connected feed-forward network: ReLU hidden layers, sigmoid output.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Dense layer with a row-major `outputs × inputs` weight matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Layer { inputs, outputs, weights: vec![0.0; inputs * outputs], biases: vec![0.0; outputs] }
    }

    /// Uniform in ±sqrt(6 / (fan_in + fan_out)), biases zero.
    pub fn glorot<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        let weights = (0..inputs * outputs).map(|_| rng.gen_range(-limit..=limit)).collect();
        Layer { inputs, outputs, weights, biases: vec![0.0; outputs] }
    }

    #[inline]
    pub fn weight(&self, out: usize, inp: usize) -> f64 {
        self.weights[out * self.inputs + inp]
    }

    fn affine(&self, x: &[f64], z: &mut Vec<f64>) {
        z.clear();
        for o in 0..self.outputs {
            let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
            let mut acc = self.biases[o];
            for (w, xi) in row.iter().zip(x) {
                acc += w * xi;
            }
            z.push(acc);
        }
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

// Keeps the output strictly inside (0, 1) even when the logistic saturates.
const OUTPUT_MARGIN: f64 = 1e-15;

#[inline]
fn squash(z: f64) -> f64 {
    sigmoid(z).clamp(OUTPUT_MARGIN, 1.0 - OUTPUT_MARGIN)
}

/// Gradient buffers shaped like the network's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        Gradients {
            weights: net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            biases: net.layers.iter().map(|l| vec![0.0; l.biases.len()]).collect(),
        }
    }

    fn clear(&mut self) {
        for w in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            w.iter_mut().for_each(|g| *g = 0.0);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub layers: Vec<Layer>,
}

impl Network {
    /// `widths` lists every layer size including input and the width-1 output.
    pub fn new<R: Rng + ?Sized>(widths: &[usize], rng: &mut R) -> Self {
        assert!(widths.len() >= 2 && *widths.last().unwrap() == 1, "network must end in one output unit");
        let layers = widths.windows(2).map(|w| Layer::glorot(w[0], w[1], rng)).collect();
        Network { layers }
    }

    pub fn zeros(widths: &[usize]) -> Self {
        Network { layers: widths.windows(2).map(|w| Layer::zeros(w[0], w[1])).collect() }
    }

    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.layers[0].inputs];
        w.extend(self.layers.iter().map(|l| l.outputs));
        w
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        let mut a = x.to_vec();
        let mut z = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.affine(&a, &mut z);
            if i == last {
                return squash(z[0]);
            }
            a.clear();
            a.extend(z.iter().map(|&v| v.max(0.0)));
        }
        unreachable!("network has at least one layer")
    }

    /// Squared error `(y − target)²` of one sample, adding its parameter
    /// gradient (times `scale`) into `grads`.
    pub fn accumulate_gradients(&self, x: &[f64], target: f64, scale: f64, grads: &mut Gradients) -> f64 {
        // Activations per layer, input first.
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        let last = self.layers.len() - 1;
        let mut z = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            layer.affine(acts.last().unwrap(), &mut z);
            let a = if i == last { vec![squash(z[0])] } else { z.iter().map(|&v| v.max(0.0)).collect() };
            acts.push(a);
        }
        let y = acts[last + 1][0];
        let err = y - target;

        let mut delta = vec![2.0 * err * y * (1.0 - y) * scale];
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let input = &acts[l];
            let gw = &mut grads.weights[l];
            let gb = &mut grads.biases[l];
            for o in 0..layer.outputs {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                gb[o] += d;
                let row = &mut gw[o * layer.inputs..(o + 1) * layer.inputs];
                for (g, &a) in row.iter_mut().zip(input) {
                    *g += d * a;
                }
            }
            if l == 0 {
                break;
            }
            // Back through the ReLU of the layer below: derivative 1 where its
            // activation is positive.
            let mut prev = vec![0.0; layer.inputs];
            for (i, p) in prev.iter_mut().enumerate() {
                if input[i] > 0.0 {
                    let mut acc = 0.0;
                    for (o, &d) in delta.iter().enumerate() {
                        acc += layer.weight(o, i) * d;
                    }
                    *p = acc;
                }
            }
            delta = prev;
        }
        err * err
    }

    /// Mean squared error and its gradient over a batch.
    pub fn batch_gradients(&self, xs: &[&[f64]], targets: &[f64], grads: &mut Gradients) -> f64 {
        grads.clear();
        let scale = 1.0 / xs.len() as f64;
        let mut loss = 0.0;
        for (x, &t) in xs.iter().zip(targets) {
            loss += self.accumulate_gradients(x, t, scale, grads);
        }
        loss * scale
    }

    pub fn apply_gradients(&mut self, grads: &Gradients, learning_rate: f64) {
        for (l, layer) in self.layers.iter_mut().enumerate() {
            for (w, g) in layer.weights.iter_mut().zip(&grads.weights[l]) {
                *w -= learning_rate * g;
            }
            for (b, g) in layer.biases.iter_mut().zip(&grads.biases[l]) {
                *b -= learning_rate * g;
            }
        }
    }

    /// Whether some hidden layer is inactive on every input, which leaves the
    /// output constant and every gradient below that layer zero.
    pub fn has_dead_layer(&self, xs: &[&[f64]]) -> bool {
        let hidden = self.layers.len() - 1;
        let mut alive = vec![false; hidden];
        let mut z = Vec::new();
        for x in xs {
            let mut a = x.to_vec();
            for (l, layer) in self.layers[..hidden].iter().enumerate() {
                layer.affine(&a, &mut z);
                alive[l] |= z.iter().any(|&v| v > 0.0);
                a.clear();
                a.extend(z.iter().map(|&v| v.max(0.0)));
            }
        }
        alive.iter().any(|&ok| !ok)
    }

    pub fn mse(&self, xs: &[&[f64]], targets: &[f64]) -> f64 {
        if xs.is_empty() {
            return 0.0;
        }
        let total: f64 = xs.iter().zip(targets).map(|(x, &t)| (self.forward(x) - t).powi(2)).sum();
        total / xs.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_network_outputs_half() {
        let net = Network::zeros(&[4, 32, 16, 8, 4, 2, 1]);
        assert_eq!(net.forward(&[0.3, 10.0, -2.0, 0.9]), 0.5);
    }

    #[test]
    fn hand_computed_single_hidden_unit() {
        // x -> h = relu(0.5*x0 - 0.25*x1 + 0.1) -> y = sigmoid(2h - 0.3)
        let net = Network {
            layers: vec![
                Layer { inputs: 2, outputs: 1, weights: vec![0.5, -0.25], biases: vec![0.1] },
                Layer { inputs: 1, outputs: 1, weights: vec![2.0], biases: vec![-0.3] },
            ],
        };
        let h: f64 = 0.5 * 0.8 - 0.25 * 0.4 + 0.1;
        let expected = 1.0 / (1.0 + (-(2.0 * h - 0.3)).exp());
        assert!((net.forward(&[0.8, 0.4]) - expected).abs() < 1e-9);
        // Negative pre-activation is rectified to zero.
        let expected_dead = 1.0 / (1.0 + 0.3f64.exp());
        assert!((net.forward(&[0.0, 1.0]) - expected_dead).abs() < 1e-9);
    }

    #[test]
    fn glorot_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let layer = Layer::glorot(4, 32, &mut rng);
        let limit = (6.0f64 / 36.0).sqrt();
        assert!(layer.weights.iter().all(|w| w.abs() <= limit));
        assert!(layer.biases.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(-800.0).is_finite());
        assert_eq!(sigmoid(800.0), 1.0);
        assert_eq!(sigmoid(0.0), 0.5);
        let net = Network {
            layers: vec![Layer { inputs: 1, outputs: 1, weights: vec![1.0], biases: vec![0.0] }],
        };
        for x in [-1e6, -800.0, 800.0, 1e6] {
            let y = net.forward(&[x]);
            assert!(y > 0.0 && y < 1.0, "{x} -> {y}");
        }
    }

    #[test]
    fn dead_layer_detection() {
        let x: &[f64] = &[0.8, 0.4];
        let mut net = Network {
            layers: vec![
                Layer { inputs: 2, outputs: 1, weights: vec![-0.5, -0.25], biases: vec![0.0] },
                Layer { inputs: 1, outputs: 1, weights: vec![2.0], biases: vec![-0.3] },
            ],
        };
        assert!(net.has_dead_layer(&[x]));
        net.layers[0].biases[0] = 1.0;
        assert!(!net.has_dead_layer(&[x]));
        assert!(!Network::zeros(&[2, 1]).has_dead_layer(&[x]));
    }
}
