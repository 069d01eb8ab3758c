use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use ghlab_core::channel::{decohere, entropy, LogBase};
use ghlab_core::channel::scan::tc_ground_state;
use ghlab_core::code::dephasing_noise;
use ghlab_core::exact::Sector;
use ghlab_core::rbim::{mc_estimate, McConfig, OmegaBasisLabel, RbimInstance};
use ghlab_core::{build_lghm_code, build_tc_code, centralizer_in_span, gauge_out, LatticeGeometry, Model};

fn pauli(c: &mut Criterion) {
    let g = LatticeGeometry::new(5, 4).unwrap();
    let a = g.logical_x();
    let b = g.plaquette(3).multiply(&g.star(7)).unwrap();
    c.bench_function("pauli_multiply_31q", |bch| bch.iter(|| black_box(&a).multiply(black_box(&b)).unwrap()));

    let lghm = build_lghm_code(&LatticeGeometry::new(3, 2).unwrap()).unwrap();
    let noise = dephasing_noise(&LatticeGeometry::new(3, 2).unwrap(), Model::GaugeHiggs);
    c.bench_function("centralizer_lghm_3x2", |bch| {
        bch.iter(|| centralizer_in_span(black_box(&lghm.gauge), &noise).unwrap())
    });
    let tc = build_tc_code(&g).unwrap();
    let tc_noise = dephasing_noise(&g, Model::ToricCode);
    c.bench_function("gauge_out_tc_5x4", |bch| bch.iter(|| gauge_out(black_box(&tc), &tc_noise).unwrap()));
}

fn exact(c: &mut Criterion) {
    let g = LatticeGeometry::new(3, 2).unwrap();
    let mut grp = c.benchmark_group("exact");
    grp.sample_size(10);
    grp.bench_function("ground_state_tc_3x2", |bch| {
        bch.iter(|| tc_ground_state(&g, black_box(0.8), Sector::PLUS, 0, 0).unwrap())
    });
    let gs = tc_ground_state(&g, 0.8, Sector::PLUS, 0, 0).unwrap();
    grp.bench_function("decohere_entropy_3x2", |bch| {
        bch.iter(|| {
            let d = decohere(&gs.state, &g, black_box(0.2)).unwrap();
            entropy(&d, None, LogBase::Natural)
        })
    });
    grp.finish();
}

fn rbim(c: &mut Criterion) {
    let g = LatticeGeometry::new(5, 4).unwrap();
    let s = OmegaBasisLabel::from_mask(g.n_links(), 0b1011_0010_0110_1001);
    let inst = RbimInstance::from_omega_label(&g, &s, 0.6).unwrap();
    c.bench_function("partition_exhaustive_5x4", |bch| bch.iter(|| black_box(&inst).exact_partition().unwrap()));

    let big = LatticeGeometry::new(10, 8).unwrap();
    let inst = RbimInstance::from_omega_label(&big, &OmegaBasisLabel::all_up(big.n_links()), 0.6).unwrap();
    c.bench_function("partition_transfer_10x8", |bch| {
        bch.iter(|| black_box(&inst).log_sum_transfer(0.6f64.exp(), (-0.6f64).exp()).unwrap())
    });

    let mut grp = c.benchmark_group("mc");
    grp.sample_size(10);
    let cfg = McConfig {
        l: 16,
        p: 0.1,
        beta: 1.1,
        sweeps: 200,
        thermalization: 0,
        replicas: 1,
        seed: 1,
    };
    grp.bench_function("mc_200_sweeps_l16", |bch| bch.iter(|| mc_estimate(black_box(&cfg)).unwrap()));
    grp.finish();
}

criterion_group!(benches, pauli, exact, rbim);
criterion_main!(benches);
