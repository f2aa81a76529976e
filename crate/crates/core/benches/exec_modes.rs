use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qglab_core::diagonals::{thm33_records, DiagonalContext, SweepOptions};
use qglab_core::exec::ExecMode;
use qglab_core::group::GroupTable;
use qglab_core::qgcore::FiniteQuantumGroup;

fn bench_modes(c: &mut Criterion) {
    let mut group = c.benchmark_group("thm33_sweep");
    group.sample_size(10);
    for g in [GroupTable::symmetric3(), GroupTable::dihedral4()] {
        let q = FiniteQuantumGroup::from_cayley_function_algebra(&g).unwrap();
        let ctx = DiagonalContext::new(&q).unwrap();
        for mode in [ExecMode::Sequential, ExecMode::Parallel] {
            let opts = SweepOptions {
                draws: 16,
                epsilons: vec![0.1],
                mode,
                ..SweepOptions::default()
            };
            group.bench_with_input(BenchmarkId::new(format!("{mode:?}"), g.name()), &opts, |b, opts| {
                b.iter(|| thm33_records(&ctx, opts))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_modes);
criterion_main!(benches);
