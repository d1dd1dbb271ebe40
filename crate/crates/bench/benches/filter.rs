use criterion::{criterion_group, criterion_main, Criterion};
use searchtrack_bench::desk_fixture;
use searchtrack_core::filter::{predict, update};
use searchtrack_core::rng;
use searchtrack_core::Position;

fn filter(c: &mut Criterion) {
    let (scenario, belief) = desk_fixture();
    let caps = &scenario.filter_caps;
    let agent = Position::new(140.0, 150.0);
    let predicted = predict(&belief, &scenario.motion, 1, caps.max_hypotheses, &mut rng::from_seed(1));
    let zs = vec![Position::new(150.0, 152.0), Position::new(138.0, 160.0)];

    c.bench_function("predict_one_step", |b| {
        b.iter(|| predict(&belief, &scenario.motion, 1, caps.max_hypotheses, &mut rng::from_seed(1)))
    });
    c.bench_function("update_two_detections", |b| {
        b.iter(|| update(&predicted, &zs, &scenario.sensor, &agent, caps.update_caps()).unwrap())
    });
}

criterion_group!(benches, filter);
criterion_main!(benches);
