//! Sequential vs. parallel timings for the enumeration-heavy entry points:
//! box tensor products and the bounded structure-equation validator.

use bhf_core::knot::{builtin_knot, cfd_from_cfk};
use bhf_core::par::ExecMode;
use bhf_core::structures::{aa_iprime, cfda_t, cfdd_t, validate_type_da_with_mode};
use bhf_core::tensor::{box_da_d_with_mode, box_dd_aa, box_dd_aa_with_mode};
use criterion::{criterion_group, criterion_main, Criterion};

const MODES: [ExecMode; 2] = [ExecMode::Sequential, ExecMode::Parallel];

fn mode_name(mode: ExecMode) -> &'static str {
    match mode {
        ExecMode::Sequential => "sequential",
        ExecMode::Parallel => "parallel",
    }
}

fn bench_box_dd_aa(c: &mut Criterion) {
    let dd = cfdd_t();
    let aa = aa_iprime();
    let mut group = c.benchmark_group("box_dd_aa");
    for mode in MODES {
        group.bench_function(mode_name(mode), |b| {
            b.iter(|| box_dd_aa_with_mode(&dd, &aa, mode).unwrap())
        });
    }
    group.finish();
}

fn bench_box_da_d(c: &mut Criterion) {
    let da = cfda_t();
    let knot = builtin_knot("figure_eight").unwrap();
    let base = cfd_from_cfk(&knot, 7).unwrap();
    let mut group = c.benchmark_group("box_da_d");
    for mode in MODES {
        group.bench_function(mode_name(mode), |b| {
            b.iter(|| box_da_d_with_mode(&da, &base, mode).unwrap())
        });
    }
    group.finish();
}

fn bench_validate_da(c: &mut Criterion) {
    let da = box_dd_aa(&cfdd_t(), &aa_iprime()).unwrap();
    let mut group = c.benchmark_group("validate_type_da");
    for mode in MODES {
        group.bench_function(mode_name(mode), |b| {
            b.iter(|| validate_type_da_with_mode(&da, 6, mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_box_dd_aa, bench_box_da_d, bench_validate_da);
criterion_main!(benches);
