//! The agent's action-value network: a small ReLU MLP trained online with
//! RMSProp on mini-batches drawn from a bounded replay memory.

mod checkpoint;
mod mlp;
mod replay;
mod rmsprop;

pub use checkpoint::{
    from_checkpoint_str, load_checkpoint, save_checkpoint, to_checkpoint_string, CHECKPOINT_MAGIC,
};
pub use mlp::{loss_and_grad, Dense, Mlp};
pub use replay::{ReplayMemory, ReplayTuple};
pub use rmsprop::{rmsprop_step, RmsPropState};

use rand::Rng;

/// Sample a mini-batch, compute the loss gradient and apply one RMSProp step.
///
/// Returns the pre-step mini-batch loss, or `None` when the memory holds
/// fewer than `batch` tuples (the network is left unchanged).
pub fn train_step<R: Rng + ?Sized>(
    net: &mut Mlp,
    mem: &ReplayMemory,
    batch: usize,
    opt: &mut RmsPropState,
    rng: &mut R,
) -> Option<f64> {
    let sample = mem.sample_minibatch(batch, rng)?;
    let (loss, grads) = loss_and_grad(net, &sample).expect("replay tuples match the network");
    rmsprop_step(net, &grads, opt);
    Some(loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    #[test]
    fn not_ready_leaves_net_unchanged() {
        let mut rng = stream(1, Stream::Init);
        let mut net = Mlp::new(2, 4, 2, &mut rng);
        let before = net.clone();
        let mut mem = ReplayMemory::new(10);
        mem.push(ReplayTuple::new(vec![0.0, 1.0], 1, 1.0));
        let mut opt = RmsPropState::new(&net, 0.01);
        assert!(train_step(&mut net, &mem, 2, &mut opt, &mut rng).is_none());
        assert_eq!(net, before);
    }

    #[test]
    fn training_is_deterministic() {
        let run = || {
            let mut init = stream(4, Stream::Init);
            let mut rng = stream(4, Stream::Replay);
            let mut net = Mlp::new(4, 8, 4, &mut init);
            let mut mem = ReplayMemory::new(50);
            let mut opt = RmsPropState::new(&net, 0.01);
            for i in 0..200 {
                let f = vec![(i % 7) as f64, 1.0, -0.5, (i % 3) as f64];
                mem.push(ReplayTuple::new(
                    f,
                    i % 4,
                    if i % 4 == 1 { 1.0 } else { -1.0 },
                ));
                train_step(&mut net, &mem, 16, &mut opt, &mut rng);
            }
            net.flat()
        };
        let a = run();
        let b = run();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
