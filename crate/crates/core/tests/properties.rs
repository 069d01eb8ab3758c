use num_complex::Complex64;
use proptest::prelude::*;

use ghlab_core::code::dephasing_noise;
use ghlab_core::gf2::BitVec;
use ghlab_core::rbim::{boundary_factor, k0, loop_expansion, nishimori_beta, smooth_signs, OmegaBasisLabel};
use ghlab_core::{build_tc_code, centralizer_in_span, gauge_out, LatticeGeometry, Model, PauliOperator, PauliSpan, Phase};

fn pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
    (prop::collection::vec(0u8..4, n), 0u8..4).prop_map(move |(letters, k)| {
        let x: Vec<bool> = letters.iter().map(|&l| l == 1 || l == 2).collect();
        let z: Vec<bool> = letters.iter().map(|&l| l == 2 || l == 3).collect();
        PauliOperator::from_bits(BitVec::from_bools(&x), BitVec::from_bools(&z), Phase::from_exponent(k)).unwrap()
    })
}

type Dense = Vec<Vec<Complex64>>;

fn matmul(a: &Dense, b: &Dense) -> Dense {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn close(a: &Dense, b: &Dense) -> bool {
    a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() < 1e-12)
}

proptest! {
    #[test]
    fn product_matches_dense(a in pauli(3), b in pauli(3)) {
        let ab = a.multiply(&b).unwrap();
        prop_assert!(close(&ab.to_dense(), &matmul(&a.to_dense(), &b.to_dense())));
    }

    #[test]
    fn product_is_associative(a in pauli(6), b in pauli(6), c in pauli(6)) {
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn commutation_matches_dense(a in pauli(3), b in pauli(3)) {
        let (da, db) = (a.to_dense(), b.to_dense());
        prop_assert_eq!(a.commutes(&b).unwrap(), close(&matmul(&da, &db), &matmul(&db, &da)));
    }

    #[test]
    fn centralizer_is_idempotent(gens in prop::collection::vec(pauli(5), 1..7), cons in prop::collection::vec(pauli(5), 1..4)) {
        let span = PauliSpan::new(5, gens).unwrap();
        let once = centralizer_in_span(&span, &cons).unwrap();
        let twice = centralizer_in_span(&once, &cons).unwrap();
        prop_assert!(once.same_span(&twice));
        prop_assert!(span.contains_span(&once));
        for g in once.generators() {
            for c in &cons {
                prop_assert!(g.commutes(c).unwrap());
            }
        }
    }

    #[test]
    fn gauge_out_is_idempotent(pick in prop::collection::vec(any::<bool>(), 7)) {
        let g = LatticeGeometry::new(3, 2).unwrap();
        let noise: Vec<_> = dephasing_noise(&g, Model::ToricCode)
            .into_iter()
            .zip(&pick)
            .filter(|(_, &keep)| keep)
            .map(|(op, _)| op)
            .collect();
        let tc = build_tc_code(&g).unwrap();
        let once = gauge_out(&tc, &noise).unwrap();
        let twice = gauge_out(&once, &noise).unwrap();
        prop_assert!(once.stabilizer_group().unwrap().same_span(&twice.stabilizer_group().unwrap()));
        prop_assert!(twice.gauged_out.is_empty());
    }

    #[test]
    fn smooth_factor_and_loop_classes(mask in 0u64..(1 << 13), p in 0.0f64..0.5) {
        let g = LatticeGeometry::new(3, 2).unwrap();
        let s = OmegaBasisLabel::from_mask(13, mask);
        let (a, b) = smooth_signs(&s, &g).unwrap();
        let lambda = boundary_factor(&s, &g).unwrap();
        prop_assert_eq!(lambda, f64::from((1 + a) * (1 + b)));

        let k = loop_expansion(&g, &s, p).unwrap();
        let (a, b) = (f64::from(a), f64::from(b));
        let scale = k[0].abs().max(1e-300);
        prop_assert!((k[1] - a * k[0]).abs() <= 1e-12 * scale);
        prop_assert!((k[2] - b * k[0]).abs() <= 1e-12 * scale);
        prop_assert!((k[3] - a * b * k[0]).abs() <= 1e-12 * scale);

        // K0 from the loop sum equals the partition-function form.
        let from_z = k0(&g, &s, nishimori_beta(p).unwrap()).unwrap();
        prop_assert!((from_z - k[0]).abs() <= 1e-12 * scale.max(1.0), "{from_z} vs {}", k[0]);
    }
}
