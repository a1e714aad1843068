use ndarray::{Array, Dimension, Zip};

use super::Mlp;

/// Per-parameter moving average of squared gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct RmsPropState {
    sq_avg: Mlp,
    pub decay: f64,
    pub eps: f64,
    pub lr: f64,
}

impl RmsPropState {
    pub const DEFAULT_DECAY: f64 = 0.9;
    pub const DEFAULT_EPS: f64 = 1e-8;

    pub fn new(net: &Mlp, lr: f64) -> Self {
        Self::with_params(net, lr, Self::DEFAULT_DECAY, Self::DEFAULT_EPS)
    }

    pub fn with_params(net: &Mlp, lr: f64, decay: f64, eps: f64) -> Self {
        Self {
            sq_avg: net.zeros_like(),
            decay,
            eps,
            lr,
        }
    }

    /// The squared-gradient averages, shaped like the network.
    pub fn averages(&self) -> &Mlp {
        &self.sq_avg
    }
}

fn update<D: Dimension>(
    w: &mut Array<f64, D>,
    g: &Array<f64, D>,
    e: &mut Array<f64, D>,
    decay: f64,
    lr: f64,
    eps: f64,
) {
    Zip::from(w).and(g).and(e).for_each(|w, &g, e| {
        *e = decay * *e + (1.0 - decay) * g * g;
        *w -= lr * g / (e.sqrt() + eps);
    });
}

/// One RMSProp step:
/// `E ← β·E + (1-β)·g²`, `w ← w - lr·g / (√E + ε)`.
///
/// Returns `false` and leaves both net and state untouched if the gradients
/// or the updated parameters are not finite.
pub fn rmsprop_step(net: &mut Mlp, grads: &Mlp, state: &mut RmsPropState) -> bool {
    if !grads.is_finite() {
        log::warn!("skipping RMSProp step with non-finite gradient");
        return false;
    }
    let mut next = net.clone();
    let mut sq = state.sq_avg.clone();
    for ((l, g), e) in next
        .layers
        .iter_mut()
        .zip(&grads.layers)
        .zip(&mut sq.layers)
    {
        update(
            &mut l.weight,
            &g.weight,
            &mut e.weight,
            state.decay,
            state.lr,
            state.eps,
        );
        update(
            &mut l.bias,
            &g.bias,
            &mut e.bias,
            state.decay,
            state.lr,
            state.eps,
        );
    }
    if !next.is_finite() {
        log::warn!("skipping RMSProp step producing non-finite weights");
        return false;
    }
    *net = next;
    state.sq_avg = sq;
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    fn scalar_net(w: f64) -> Mlp {
        let mut net = Mlp::zeros(1, 1, 1);
        net.layers[0].weight[(0, 0)] = w;
        net
    }

    #[test]
    fn zero_gradient_only_decays_average() {
        let mut net = Mlp::new(2, 3, 4, &mut stream(1, Stream::Init));
        let before = net.clone();
        let mut st = RmsPropState::new(&net, 0.01);
        st.sq_avg.layers[1].bias.fill(2.0);
        let zero = net.zeros_like();
        assert!(rmsprop_step(&mut net, &zero, &mut st));
        assert_eq!(net, before);
        assert!(st.sq_avg.layers[1]
            .bias
            .iter()
            .all(|&e| (e - 1.8).abs() < 1e-15));
    }

    #[test]
    fn first_step_from_empty_average() {
        // 0.01 · 1 / √0.1
        let mut net = scalar_net(0.0);
        let mut grads = net.zeros_like();
        grads.layers[0].weight[(0, 0)] = 1.0;
        let mut st = RmsPropState::with_params(&net, 0.01, 0.9, 1e-8);
        rmsprop_step(&mut net, &grads, &mut st);
        let dw = net.layers[0].weight[(0, 0)];
        assert!((dw + 0.031_622_776).abs() < 1e-8, "{dw}");
    }

    #[test]
    fn repeated_gradient_step_tends_to_lr() {
        let mut net = scalar_net(0.0);
        let mut grads = net.zeros_like();
        grads.layers[0].weight[(0, 0)] = 0.37;
        let mut st = RmsPropState::new(&net, 0.01);
        let mut last = 0.0;
        for _ in 0..1000 {
            let before = net.layers[0].weight[(0, 0)];
            rmsprop_step(&mut net, &grads, &mut st);
            last = before - net.layers[0].weight[(0, 0)];
        }
        assert!((last - 0.01).abs() < 1e-9, "{last}");
    }

    #[test]
    fn averages_stay_non_negative() {
        let mut rng = stream(4, Stream::Init);
        let mut net = Mlp::new(2, 3, 2, &mut rng);
        let mut st = RmsPropState::new(&net, 0.01);
        for _ in 0..50 {
            let g = Mlp::new(2, 3, 2, &mut rng);
            rmsprop_step(&mut net, &g, &mut st);
        }
        assert!(st.averages().flat().iter().all(|&e| e >= 0.0));
    }

    #[test]
    fn non_finite_gradient_is_ignored() {
        let mut net = scalar_net(1.0);
        let mut grads = net.zeros_like();
        grads.layers[2].bias[0] = f64::NAN;
        let mut st = RmsPropState::new(&net, 0.01);
        let before = (net.clone(), st.clone());
        assert!(!rmsprop_step(&mut net, &grads, &mut st));
        assert_eq!((net, st), before);
    }
}
