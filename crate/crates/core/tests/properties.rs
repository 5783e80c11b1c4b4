use proptest::prelude::*;

use xy_spectral::compare::oracle_value_gap;
use xy_spectral::linalg::tridiag_char;
use xy_spectral::model::{
    assemble_from_components, build_chain, build_ring, extract_component, ChainModel, Model,
    PeriodicParameters, RingModel,
};
use xy_spectral::solver::{closed_form, Vectors};

fn coupling() -> impl Strategy<Value = f64> {
    (0.5f64..2.0, any::<bool>()).prop_map(|(m, s)| if s { m } else { -m })
}

fn params(kmax: usize) -> impl Strategy<Value = PeriodicParameters> {
    (1..=kmax).prop_flat_map(|k| {
        (
            prop::collection::vec(-1.0f64..1.0, k),
            prop::collection::vec(coupling(), k),
        )
            .prop_map(|(w, d)| PeriodicParameters::new(w, d).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_is_corner_of_ring(p in params(4), m in 2usize..6) {
        let ring = RingModel::new(p.clone(), m).unwrap();
        let chain = ChainModel::new(p, ring.sites() - 1).unwrap();
        let r = build_ring(&ring);
        let c = build_chain(&chain).to_dense();
        let n = chain.sites;
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(r.get(i, j), c.get(i, j));
            }
        }
    }

    #[test]
    fn components_round_trip(v in prop::collection::vec(-5.0f64..5.0, 1..40), k in 1usize..6) {
        let comps: Vec<Vec<f64>> = (1..=k).map(|j| extract_component(&v, j, k)).collect();
        prop_assert_eq!(assemble_from_components(&comps, k, v.len()).unwrap(), v);
    }

    #[test]
    fn closed_form_matches_oracle(p in params(5), n in 2usize..8, ring in any::<bool>()) {
        let model = if ring {
            Model::Ring(RingModel::new(p, n).unwrap())
        } else {
            Model::Chain(ChainModel::with_cells(p, n).unwrap())
        };
        let scale = 1.0 + model.operator().frobenius_norm();
        prop_assert!(oracle_value_gap(&model).unwrap() <= 1e-8 * scale);
    }

    #[test]
    fn canonical_vectors_have_small_residuals(p in params(5), n in 2usize..8, ring in any::<bool>()) {
        let model = if ring {
            Model::Ring(RingModel::new(p, n).unwrap())
        } else {
            Model::Chain(ChainModel::with_cells(p, n).unwrap())
        };
        let eig = closed_form(&model, Vectors::Canonical).unwrap();
        prop_assert_eq!(eig.total_multiplicity(), model.sites());
        prop_assert!(eig.max_relative_residual() <= 1e-9);
    }

    #[test]
    fn eigenvalues_are_roots_of_the_chain_determinant(p in params(4), n in 2usize..6) {
        let chain = ChainModel::with_cells(p, n).unwrap();
        let t = build_chain(&chain);
        let eig = closed_form(&Model::Chain(chain), Vectors::Skip).unwrap();
        for line in &eig.lines {
            // Sign change across a small bracket around each simple root.
            let h = 1e-7 * (1.0 + line.value.abs());
            let a = tridiag_char(&t, line.value - h);
            let b = tridiag_char(&t, line.value + h);
            prop_assert!(a * b <= 0.0, "no sign change at {}", line.value);
        }
    }
}
