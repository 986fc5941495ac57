use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use kawahex::config::clusters;
use kawahex::dynamics::{Kernel, Simulation};
use kawahex::landscape::{communication_height, SearchOptions};
use kawahex::{Configuration, HexLattice, Params};
use kawahex_bench::{droplet, gas, lattice};

fn step_loop(c: &mut Criterion) {
    let lat = lattice();
    let start = droplet(&lat);
    for beta in [1.0, 3.5] {
        let p = Params::p1(beta);
        let kernel = Kernel::new(&lat, &p);
        c.bench_function(&format!("100k steps beta={beta}"), |b| {
            b.iter(|| {
                let mut sim = Simulation::new(&kernel, &start, &p, 7);
                for _ in 0..100_000 {
                    black_box(sim.step());
                }
                sim.energy()
            })
        });
    }
}

fn cluster_decomposition(c: &mut Criterion) {
    let lat = lattice();
    let (g, d) = (gas(&lat), droplet(&lat));
    c.bench_function("clusters of a random gas", |b| b.iter(|| clusters(&lat, black_box(&g))));
    c.bench_function("clusters of a droplet", |b| b.iter(|| clusters(&lat, black_box(&d))));
}

fn bottleneck_search(c: &mut Criterion) {
    let lat = HexLattice::new(2).unwrap();
    let p = Params::p1(1.0);
    let (e, f) = (Configuration::empty(&lat), Configuration::full(&lat));
    let mut group = c.benchmark_group("Phi(empty, full) at L=2");
    group.sample_size(10);
    for symmetry in [false, true] {
        let opts = SearchOptions::default().with_symmetry(symmetry);
        group.bench_function(if symmetry { "quotient" } else { "plain" }, |b| {
            b.iter(|| communication_height(&lat, &p, &e, &f, opts).unwrap().value)
        });
    }
    group.finish();
}

criterion_group!(benches, step_loop, cluster_decomposition, bottleneck_search);
criterion_main!(benches);
