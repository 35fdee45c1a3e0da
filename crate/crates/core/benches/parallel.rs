use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jrp_core::exec::{map_ordered, Exec};
use jrp_core::generate::{gen_instance, GeneratorSpec};
use jrp_core::online::policies::SumCjPolicy;
use jrp_core::online::{run_online, SimConfig};
use jrp_core::oracle::{exact_solve_with, OracleConfig};
use jrp_core::{Instance, Objective};

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn oracle(c: &mut Criterion) {
    let inst = gen_instance(&GeneratorSpec {
        joint_cost: 4,
        item_cost: (1, 3),
        max_release: 10,
        ..GeneratorSpec::random(11, 7, 2)
    })
    .unwrap();
    let mut group = c.benchmark_group("oracle_n7_s2");
    group.sample_size(10);
    for (name, exec) in MODES {
        let cfg = OracleConfig {
            exec,
            ..OracleConfig::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| exact_solve_with(black_box(&inst), Objective::TotalCompletion, &cfg).unwrap())
        });
    }
    group.finish();
}

fn ratio_sweep(c: &mut Criterion) {
    let instances: Vec<Instance> = (0..64)
        .map(|seed| {
            gen_instance(&GeneratorSpec {
                joint_cost: 5,
                max_release: 14,
                ..GeneratorSpec::random(seed, 7, 1)
            })
            .unwrap()
        })
        .collect();
    let oracle_cfg = OracleConfig {
        exec: Exec::Sequential,
        ..OracleConfig::default()
    };
    let mut group = c.benchmark_group("ratio_sweep_64x_n7");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                map_ordered(exec, &instances, |inst| {
                    let k = inst.single_order_cost();
                    let online = run_online(inst, &mut SumCjPolicy::new(k), &SimConfig::default())
                        .unwrap()
                        .solution
                        .total();
                    let best = exact_solve_with(inst, Objective::TotalCompletion, &oracle_cfg)
                        .unwrap()
                        .total();
                    online as f64 / best as f64
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, oracle, ratio_sweep);
criterion_main!(benches);
