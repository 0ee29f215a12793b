use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use qthermo::channels::ChannelModel;
use qthermo::nonmarkov::ohmic_sweep;
use qthermo::numerics::linspace;
use qthermo::parallel::{self, Execution};
use qthermo::thermo::adiabatic_time_tc;
use qthermo::BlochState;

fn s_sweep(c: &mut Criterion) {
    let s_values = linspace(2.2, 5.0, 16);
    let mut group = c.benchmark_group("ohmic_s_sweep");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| ohmic_sweep(black_box(&s_values), 1.0, 1.0, exec).unwrap())
        });
    }
    group.finish();
}

fn tc_grid(c: &mut Criterion) {
    let model = ChannelModel::SpontaneousEmission { gamma: 1.0, omega0: 1.0 };
    let states: Vec<BlochState> = linspace(-0.9, 0.9, 24)
        .into_iter()
        .map(|z| BlochState::new((1.0 - z * z).sqrt() * 0.9, 0.0, z * 0.9).unwrap())
        .collect();
    let times = linspace(0.0, 10.0, 200);
    let mut group = c.benchmark_group("adiabatic_time_grid");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| parallel::map(&states, exec, |r0| adiabatic_time_tc(&model, r0, &times).ok()))
        });
    }
    group.finish();
}

criterion_group!(benches, s_sweep, tc_grid);
criterion_main!(benches);
