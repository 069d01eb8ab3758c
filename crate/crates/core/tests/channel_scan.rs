use ghlab_core::channel::scan::tc_ground_state;
use ghlab_core::channel::{decohere, default_gauge_observable, entropy, purity, run_scan, LogBase, Observable, ScanSpec};
use ghlab_core::exact::Sector;
use ghlab_core::LatticeGeometry;

fn pool(n: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap()
}

#[test]
fn scan_rows_do_not_depend_on_thread_count() {
    let g = LatticeGeometry::new(3, 2).unwrap();
    let mut spec = ScanSpec::new(3, 2, vec![0.0, 0.9], vec![0.0, 0.2, 0.5]);
    let (_, op) = default_gauge_observable(&g).unwrap();
    spec.observables.push(Observable { name: "o_g".into(), op });
    let a = pool(1).install(|| run_scan(&spec)).unwrap();
    let b = pool(4).install(|| run_scan(&spec)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.iter().all(|r| r.error.is_none()));
}

#[test]
fn spectrum_measures_match_dense_density_matrix() {
    let g = LatticeGeometry::new(2, 2).unwrap();
    let gs = tc_ground_state(&g, 0.6, Sector::PLUS, 3, 0).unwrap();
    for p in [0.0, 0.1, 0.35, 0.5] {
        let d = decohere(&gs.state, &g, p).unwrap();
        let rho = d.density_matrix().unwrap();
        let eig = rho.clone().symmetric_eigen().eigenvalues;
        let s_dense: f64 = eig.iter().filter(|&&l| l > 1e-14).map(|&l| -l * l.ln()).sum();
        let p_dense = (&rho * &rho).trace().re;
        assert!((entropy(&d, None, LogBase::Natural) - s_dense).abs() < 1e-9, "p={p}");
        assert!((entropy(&d, None, LogBase::Two) - s_dense / std::f64::consts::LN_2).abs() < 1e-9);
        assert!((purity(&d) - p_dense).abs() < 1e-10, "p={p}");
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }
}
