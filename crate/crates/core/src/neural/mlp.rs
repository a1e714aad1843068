use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::Rng;

use super::ReplayTuple;
use crate::error::{Error, Result};

/// Fully connected layer, `weight` is `outputs x inputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            weight: Array2::zeros((outputs, inputs)),
            bias: Array1::zeros(outputs),
        }
    }

    /// Uniform in `[-1/√fan_in, 1/√fan_in]` for weights and biases.
    pub fn uniform<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (inputs as f64).sqrt();
        let mut draw = || (rng.random::<f64>() * 2.0 - 1.0) * bound;
        Self {
            weight: Array2::from_shape_simple_fn((outputs, inputs), &mut draw),
            bias: Array1::from_shape_simple_fn(outputs, &mut draw),
        }
    }

    pub fn inputs(&self) -> usize {
        self.weight.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.weight.nrows()
    }
}

/// Two ReLU hidden layers of width `q` and a linear output of `2^M` action
/// values. Layers are stored input to output.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: [Dense; 3],
}

impl Mlp {
    pub fn new<R: Rng + ?Sized>(inputs: usize, hidden: usize, outputs: usize, rng: &mut R) -> Self {
        Self {
            layers: [
                Dense::uniform(inputs, hidden, rng),
                Dense::uniform(hidden, hidden, rng),
                Dense::uniform(hidden, outputs, rng),
            ],
        }
    }

    pub fn zeros(inputs: usize, hidden: usize, outputs: usize) -> Self {
        Self {
            layers: [
                Dense::zeros(inputs, hidden),
                Dense::zeros(hidden, hidden),
                Dense::zeros(hidden, outputs),
            ],
        }
    }

    /// All-zero tensors with this network's shapes.
    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.inputs(), self.hidden(), self.outputs())
    }

    pub fn inputs(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn hidden(&self) -> usize {
        self.layers[0].outputs()
    }

    pub fn outputs(&self) -> usize {
        self.layers[2].outputs()
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weight.len() + l.bias.len())
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weight.iter().all(|x| x.is_finite()) && l.bias.iter().all(|x| x.is_finite()))
    }

    /// Flat view of every parameter, layer by layer, weights before biases.
    pub fn flat(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weight.iter().chain(l.bias.iter()).copied())
            .collect()
    }

    /// Mutable access to parameter `i` of [`Mlp::flat`].
    pub fn flat_mut(&mut self, mut i: usize) -> &mut f64 {
        for l in &mut self.layers {
            let nw = l.weight.len();
            if i < nw {
                let cols = l.weight.ncols();
                return &mut l.weight[(i / cols, i % cols)];
            }
            i -= nw;
            if i < l.bias.len() {
                return &mut l.bias[i];
            }
            i -= l.bias.len();
        }
        panic!("parameter index out of range");
    }

    /// Action values for one feature vector.
    pub fn forward(&self, features: &[f64]) -> Result<Array1<f64>> {
        if features.len() != self.inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.inputs(),
                actual: features.len(),
            });
        }
        let x = ArrayView1::from(features);
        let [l1, l2, l3] = &self.layers;
        let h1 = (l1.weight.dot(&x) + &l1.bias).mapv_into(relu);
        let h2 = (l2.weight.dot(&h1) + &l2.bias).mapv_into(relu);
        Ok(l3.weight.dot(&h2) + &l3.bias)
    }
}

fn relu(x: f64) -> f64 {
    x.max(0.0)
}

/// Mean squared error between each tuple's reward and the value of its
/// chosen action, and the gradient with respect to every parameter.
///
/// Only the chosen action's output receives error signal.
pub fn loss_and_grad(net: &Mlp, batch: &[&ReplayTuple]) -> Result<(f64, Mlp)> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let n_in = net.inputs();
    for t in batch {
        if t.features.len() != n_in {
            return Err(Error::DimensionMismatch {
                expected: n_in,
                actual: t.features.len(),
            });
        }
        if t.action >= net.outputs() {
            return Err(Error::IndexOutOfRange {
                index: t.action,
                channels: 0,
                limit: net.outputs(),
            });
        }
    }
    let b = batch.len();
    let scale = 1.0 / b as f64;
    let [l1, l2, l3] = &net.layers;

    let x = Array2::from_shape_fn((b, n_in), |(j, i)| batch[j].features[i]);
    let z1 = x.dot(&l1.weight.t()) + &l1.bias;
    let h1 = z1.mapv(relu);
    let z2 = h1.dot(&l2.weight.t()) + &l2.bias;
    let h2 = z2.mapv(relu);

    let mut grads = net.zeros_like();
    let mut loss = 0.0;
    let mut dz2 = Array2::<f64>::zeros(h2.raw_dim());
    for (j, t) in batch.iter().enumerate() {
        let w = l3.weight.row(t.action);
        let value = h2.row(j).dot(&w) + l3.bias[t.action];
        let err = t.reward - value;
        loss += err * err * scale;
        let g = -2.0 * err * scale;
        grads.layers[2]
            .weight
            .row_mut(t.action)
            .scaled_add(g, &h2.row(j));
        grads.layers[2].bias[t.action] += g;
        dz2.row_mut(j).scaled_add(g, &w);
    }
    dz2.zip_mut_with(&z2, |d, &z| {
        if z <= 0.0 {
            *d = 0.0
        }
    });
    grads.layers[1].weight = dz2.t().dot(&h1);
    grads.layers[1].bias = dz2.sum_axis(Axis(0));

    let mut dz1 = dz2.dot(&l2.weight);
    dz1.zip_mut_with(&z1, |d, &z| {
        if z <= 0.0 {
            *d = 0.0
        }
    });
    grads.layers[0].weight = dz1.t().dot(&x);
    grads.layers[0].bias = dz1.sum_axis(Axis(0));

    Ok((loss, grads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};
    use rand::Rng;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs())
    }

    /// Straightforward loop-based forward pass, independent of ndarray.
    fn forward_oracle(net: &Mlp, x: &[f64]) -> Vec<f64> {
        let mut act = x.to_vec();
        for (li, l) in net.layers.iter().enumerate() {
            let mut out = vec![0.0; l.outputs()];
            for (o, slot) in out.iter_mut().enumerate() {
                let mut s = l.bias[o];
                for (i, a) in act.iter().enumerate() {
                    s += l.weight[(o, i)] * a;
                }
                *slot = if li < 2 { s.max(0.0) } else { s };
            }
            act = out;
        }
        act
    }

    #[test]
    fn zero_net_outputs_zero() {
        let net = Mlp::zeros(6, 16, 8);
        assert!(net.forward(&[1.0; 6]).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_unit_pass_through() {
        let mut net = Mlp::zeros(1, 1, 1);
        net.layers[0].weight[(0, 0)] = 2.0;
        net.layers[1].weight[(0, 0)] = 1.0;
        net.layers[2].weight[(0, 0)] = 1.0;
        assert_eq!(net.forward(&[1.0]).unwrap()[0], 2.0);
    }

    #[test]
    fn zero_input_gives_composed_biases() {
        let net = Mlp::new(4, 5, 4, &mut stream(8, Stream::Init));
        let out = net.forward(&[0.0; 4]).unwrap();
        let h1 = net.layers[0].bias.mapv(relu);
        let h2 = (net.layers[1].weight.dot(&h1) + &net.layers[1].bias).mapv(relu);
        let expected = net.layers[2].weight.dot(&h2) + &net.layers[2].bias;
        assert_eq!(out, expected);
    }

    #[test]
    fn forward_matches_loop_oracle() {
        let mut rng = stream(21, Stream::Init);
        for _ in 0..20 {
            let m = rng.random_range(1..=4);
            let q = rng.random_range(1..=32);
            let net = Mlp::new(2 * m, q, 1 << m, &mut rng);
            let x: Vec<f64> = (0..2 * m)
                .map(|_| rng.random::<f64>() * 6.0 - 3.0)
                .collect();
            let got = net.forward(&x).unwrap();
            let want = forward_oracle(&net, &x);
            for (g, w) in got.iter().zip(&want) {
                assert!(
                    rel_close(*g, *w, 1e-12) || (g - w).abs() < 1e-15,
                    "{g} vs {w}"
                );
            }
        }
    }

    #[test]
    fn forward_rejects_wrong_width() {
        let net = Mlp::zeros(4, 3, 2);
        assert!(matches!(
            net.forward(&[0.0; 3]),
            Err(Error::DimensionMismatch {
                expected: 4,
                actual: 3
            })
        ));
    }

    #[test]
    fn param_count_formula() {
        for (m, q) in [(1, 1), (2, 8), (3, 64), (5, 20)] {
            let net = Mlp::zeros(2 * m, q, 1 << m);
            let a = 1usize << m;
            assert_eq!(net.param_count(), 2 * m * q + q + q * q + q + q * a + a);
            assert_eq!(net.flat().len(), net.param_count());
        }
    }

    #[test]
    fn perfect_fit_has_zero_loss_and_gradient() {
        let net = Mlp::new(2, 4, 2, &mut stream(1, Stream::Init));
        let features = vec![0.3, -0.7];
        let v = net.forward(&features).unwrap();
        let tuples = [
            ReplayTuple::new(features.clone(), 0, v[0]),
            ReplayTuple::new(features.clone(), 1, v[1]),
        ];
        let batch: Vec<_> = tuples.iter().collect();
        let (loss, g) = loss_and_grad(&net, &batch).unwrap();
        assert!(loss < 1e-28);
        assert!(g.flat().iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn unit_error_gives_unit_loss() {
        let net = Mlp::zeros(2, 3, 4);
        let t = ReplayTuple::new(vec![1.0, 1.0], 2, 1.0);
        let (loss, g) = loss_and_grad(&net, &[&t]).unwrap();
        assert_eq!(loss, 1.0);
        // only the chosen output bias moves
        assert_eq!(g.layers[2].bias.to_vec(), vec![0.0, 0.0, -2.0, 0.0]);
    }

    #[test]
    fn empty_batch_and_bad_action_are_rejected() {
        let net = Mlp::zeros(2, 3, 4);
        assert!(matches!(loss_and_grad(&net, &[]), Err(Error::EmptyBatch)));
        let t = ReplayTuple::new(vec![1.0, 1.0], 4, 1.0);
        assert!(loss_and_grad(&net, &[&t]).is_err());
    }
}
