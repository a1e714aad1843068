use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use csra_core::analytics::{success_prob, PsiMatrix};
use csra_core::config::{PolicyKind, SimConfig};
use csra_core::neural::{loss_and_grad, train_step, Mlp, ReplayMemory, ReplayTuple, RmsPropState};
use csra_core::rng::{stream, Stream};
use csra_core::sim::{cap_resolve, Engine};
use csra_core::AccessConfig;
use rand::Rng;

fn filled_memory(m: usize, capacity: usize) -> ReplayMemory {
    let mut rng = stream(1, Stream::Replay);
    let mut mem = ReplayMemory::new(capacity);
    for _ in 0..capacity {
        let f: Vec<f64> = (0..2 * m)
            .map(|_| rng.random::<f64>() * 2.0 - 1.0)
            .collect();
        let a = rng.random_range(0..1 << m);
        mem.push(ReplayTuple::new(
            f,
            a,
            if rng.random_bool(0.5) { 1.0 } else { -1.0 },
        ));
    }
    mem
}

fn neural(c: &mut Criterion) {
    let m = 3;
    let mem = filled_memory(m, 2400);
    for q in [16, 32, 64] {
        let mut net = Mlp::new(2 * m, q, 1 << m, &mut stream(2, Stream::Init));
        let mut opt = RmsPropState::new(&net, 0.01);
        let mut rng = stream(3, Stream::Replay);
        c.bench_function(&format!("train_step M=3 q={q} B=240"), |b| {
            b.iter(|| train_step(&mut net, &mem, 240, &mut opt, &mut rng))
        });
    }
    let net = Mlp::new(2 * m, 64, 1 << m, &mut stream(2, Stream::Init));
    let batch: Vec<&ReplayTuple> = mem.iter().take(240).collect();
    c.bench_function("loss_and_grad M=3 q=64 B=240", |b| {
        b.iter(|| loss_and_grad(black_box(&net), &batch).unwrap())
    });
    let x = [0.1, -0.3, 0.7, 0.2, -0.9, 0.4];
    c.bench_function("forward M=3 q=64", |b| {
        b.iter(|| net.forward(black_box(&x)).unwrap())
    });
}

fn analytics(c: &mut Criterion) {
    let psi = PsiMatrix::random(6, 4, &mut stream(5, Stream::Init));
    c.bench_function("success_prob K=6 M=4", |b| {
        b.iter(|| success_prob(black_box(&psi), 0.4).unwrap())
    });
    let tx: Vec<(usize, AccessConfig)> = (0..10)
        .map(|n| (n, AccessConfig::from_index(1 + n % 7, 3).unwrap()))
        .collect();
    c.bench_function("cap_resolve K=10 M=3", |b| {
        b.iter(|| cap_resolve(black_box(&tx), 3))
    });
}

fn engine(c: &mut Criterion) {
    for policy in [PolicyKind::Rch, PolicyKind::Mab, PolicyKind::Dnn] {
        let cfg = SimConfig {
            policy,
            ..SimConfig::default()
        };
        c.bench_function(&format!("engine 1000 slots K=10 M=3 {policy}"), |b| {
            b.iter_batched(
                || Engine::with_horizon(&cfg, 1000).unwrap(),
                |e| e.run().unwrap(),
                BatchSize::LargeInput,
            )
        });
    }
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = neural, analytics, engine
}
criterion_main!(benches);
