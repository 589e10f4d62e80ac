use std::hint::black_box;
use std::time::{Duration, Instant};

use criterion::{criterion_group, criterion_main, Criterion};
use ctmp_core::harness::corpus::{open_sequential, random_arm, random_grid};
use ctmp_core::query::{query, PotentialStateIndex, QueryRequest};
use ctmp_core::{anytime_refine, preprocess, Config, Scenario};

fn covered_goals(s: &Scenario) -> (ctmp_core::Library, Vec<Config>) {
    let lib = preprocess(s, 0).expect("corpus scenarios preprocess");
    let goals = lib.covered_states().into_iter().collect();
    (lib, goals)
}

fn bench_preprocess(c: &mut Criterion) {
    let mut g = c.benchmark_group("preprocess");
    g.sample_size(10);
    for s in [random_grid(24, 0.2, 1), random_arm(32, 0.15, 1)] {
        g.bench_function(s.name.clone(), |b| {
            b.iter(|| preprocess(black_box(&s), 0).unwrap())
        });
    }
    g.finish();
}

fn bench_query(c: &mut Criterion) {
    let mut g = c.benchmark_group("query_initial");
    for s in [random_grid(24, 0.2, 1), random_arm(32, 0.15, 1)] {
        let (lib, goals) = covered_goals(&s);
        let index = PotentialStateIndex::new(&lib);
        let mut i = 0;
        g.bench_function(s.name.clone(), |b| {
            b.iter(|| {
                i = (i + 1) % goals.len();
                let req =
                    QueryRequest::new(s.home.clone(), goals[i].clone(), Duration::from_secs(1))
                        .without_refinement();
                query(&s, &lib, &index, black_box(&req)).unwrap()
            })
        });
    }
    g.finish();
}

fn bench_refine(c: &mut Criterion) {
    let s = open_sequential();
    let (lib, _) = covered_goals(&s);
    let index = PotentialStateIndex::new(&lib);
    let start = Config::new([15, 19]);
    let goal = Config::new([21, 20]);
    let req =
        QueryRequest::new(start.clone(), goal.clone(), Duration::from_secs(1)).without_refinement();
    let initial = query(&s, &lib, &index, &req).unwrap().path;
    c.bench_function("refine_to_optimal/open-seq", |b| {
        b.iter(|| {
            anytime_refine(
                &s,
                &start,
                &goal,
                black_box(&initial),
                Instant::now(),
                Duration::from_secs(10),
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, bench_preprocess, bench_query, bench_refine);
criterion_main!(benches);
