//! Embedding grounding against an independent dense linear-algebra route.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use programport::grounding::{ground_embedding, ground_embedding_raw, ConceptEmbedding, FeatureMap, Matrix, ProjectionWeights};

#[derive(Debug, Clone)]
struct Instance {
    h: usize,
    w: usize,
    d1: usize,
    d2: usize,
    features: Vec<f64>,
    cv: Vec<f64>,
    cl: Vec<f64>,
    e: Vec<f64>,
}

fn instance() -> impl Strategy<Value = Instance> {
    (1usize..=8, 1usize..=8, 1usize..=8, 1usize..=8).prop_flat_map(|(h, w, d1, d2)| {
        let v = |n| prop::collection::vec(-2.0f64..2.0, n);
        (v(h * w * d1), v(d2 * d1), v(d2 * d2), v(d2)).prop_map(move |(features, cv, cl, e)| Instance {
            h,
            w,
            d1,
            d2,
            features,
            cv,
            cl,
            e,
        })
    })
}

/// `eᵀ · Cl · Cv · f` per pixel, via nalgebra.
fn oracle(i: &Instance) -> Vec<f64> {
    let cv = DMatrix::from_row_slice(i.d2, i.d1, &i.cv);
    let cl = DMatrix::from_row_slice(i.d2, i.d2, &i.cl);
    let e = DVector::from_column_slice(&i.e);
    let proj = e.transpose() * cl * cv;
    i.features.chunks_exact(i.d1).map(|f| (&proj * DVector::from_column_slice(f))[(0, 0)]).collect()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn matches_dense_oracle(i in instance()) {
        let fm = FeatureMap::new(i.h, i.w, i.d1, i.features.clone()).unwrap();
        let weights = ProjectionWeights::new(
            Matrix::new(i.d2, i.d1, i.cv.clone()).unwrap(),
            Matrix::new(i.d2, i.d2, i.cl.clone()).unwrap(),
        ).unwrap();
        let e = ConceptEmbedding::new(i.e.clone()).unwrap();
        let raw = ground_embedding_raw(&fm, &e, &weights).unwrap();
        let want = oracle(&i);
        for (a, b) in raw.iter().zip(&want) {
            prop_assert!(rel_err(*a, *b) <= 1e-12, "{} vs {}", a, b);
        }
        let lo = want.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = want.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let map = ground_embedding(&fm, &e, &weights).unwrap();
        if hi - lo > 1e-6 {
            for (g, b) in map.values().iter().zip(&want) {
                prop_assert!((g - (b - lo) / (hi - lo)).abs() <= 1e-9);
            }
        }
    }
}
