use nalgebra::DMatrix;
use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

use tdlab::container::{DType, Tensor, TensorContainer};
use tdlab::dynamics::{deviation, effective_dimension, transient_chaos_length, LyapunovSeries};
use tdlab::embedding::{embed, EmbeddingConfig, EmbeddingParams};
use tdlab::encoder::{
    attention_probabilities, encoder_step, init_params, layer_norm, EncoderConfig, MapVariant, StateMatrix,
};
use tdlab::readout::{fit_ridge, nmse, softmax_probabilities, stratified_split, ReadoutModel};

fn normal_matrix(rows: usize, cols: usize, seed: u64, scale: f64) -> Array2<f64> {
    let mut rng = tdlab::rng::seeded(seed);
    Array2::from_shape_fn((rows, cols), |_| {
        let z: f64 = StandardNormal.sample(&mut rng);
        scale * z
    })
}

fn variant(literal: bool) -> MapVariant {
    if literal {
        MapVariant::PaperLiteral
    } else {
        MapVariant::StandardAlbert
    }
}

fn spread(x: &StateMatrix) -> f64 {
    let first = x.row(0);
    x.rows()
        .into_iter()
        .flat_map(|r| r.iter().zip(first.iter()).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn synchronized_states_stay_synchronized(seed in any::<u64>(), n in 1usize..10, literal in any::<bool>()) {
        let config = EncoderConfig::new(16, 2).unwrap().with_variant(variant(literal));
        let params = init_params(&config, seed).unwrap();
        let row = normal_matrix(1, 16, seed ^ 1, 1.0);
        let x = StateMatrix::synchronized(row.row(0), n).unwrap();
        let y = encoder_step(&x, &params, &config).unwrap();
        prop_assert!(spread(&y) < 1e-12);
    }

    #[test]
    fn encoder_is_permutation_equivariant(seed in any::<u64>(), n in 2usize..10, literal in any::<bool>()) {
        let config = EncoderConfig::new(16, 4).unwrap().with_variant(variant(literal));
        let params = init_params(&config, seed).unwrap();
        let x = StateMatrix::new(normal_matrix(n, 16, seed ^ 2, 1.0)).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut tdlab::rng::seeded(seed ^ 3));
        let a = encoder_step(&x.permute_rows(&perm), &params, &config).unwrap();
        let b = encoder_step(&x, &params, &config).unwrap().permute_rows(&perm);
        let diff: f64 = (a.as_array() - b.as_array()).iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(diff < 1e-9);
    }

    #[test]
    fn attention_rows_are_distributions(seed in any::<u64>(), n in 1usize..12, scale in 0.1f64..30.0) {
        let config = EncoderConfig::new(16, 2).unwrap();
        let params = init_params(&config, seed).unwrap();
        let x = StateMatrix::new(normal_matrix(n, 16, seed ^ 4, scale)).unwrap();
        for head in 0..2 {
            let p = attention_probabilities(&x, &params, &config, head).unwrap();
            for row in p.rows() {
                prop_assert!((row.sum() - 1.0).abs() < 1e-12);
                prop_assert!(row.iter().all(|&v| v >= 0.0));
            }
        }
    }

    #[test]
    fn layer_norm_standardizes(seed in any::<u64>(), n in 2usize..40, scale in 1e-3f64..1e3, shift in -1e3f64..1e3) {
        let row = normal_matrix(1, n, seed, scale).row(0).mapv(|v| v + shift);
        let ones = Array1::ones(n);
        let zeros = Array1::zeros(n);
        let out = layer_norm(row.view(), ones.view(), zeros.view(), 1e-12);
        let mean = out.sum() / n as f64;
        let var = out.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        prop_assert!(mean.abs() < 1e-9);
        prop_assert!((var - 1.0).abs() < 1e-6);
    }

    #[test]
    fn deviation_ignores_row_order(seed in any::<u64>(), n in 1usize..10) {
        let x = StateMatrix::new(normal_matrix(n, 8, seed, 2.0)).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut tdlab::rng::seeded(seed ^ 5));
        let d = deviation(&x);
        prop_assert!(d >= 0.0);
        prop_assert!((deviation(&x.permute_rows(&perm)) - d).abs() <= 1e-12 * d.max(1.0));
    }

    #[test]
    fn embedding_is_linear_and_equivariant(seed in any::<u64>(), alpha in -5.0f64..5.0) {
        let cfg = EmbeddingConfig { vocab_size: 12, embedding_dim: 3, hidden_dim: 5, max_positions: 6, use_positional: false };
        let p = EmbeddingParams::random(&cfg, seed).unwrap();
        let ids: Vec<u32> = (0..6).map(|i| ((seed >> (4 * i)) % 12) as u32).collect();
        let x = embed(&ids, &p).unwrap();
        prop_assert_eq!(x.shape(), &[6, 5]);

        let mut scaled = p.clone();
        scaled.token_table.mapv_inplace(|v| v * alpha);
        let xs = embed(&ids, &scaled).unwrap();
        let err = (xs.as_array() - &(x.as_array() * alpha)).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(err < 1e-12);

        let perm = [3, 0, 5, 1, 4, 2];
        let permuted: Vec<u32> = perm.iter().map(|&i| ids[i]).collect();
        prop_assert_eq!(embed(&permuted, &p).unwrap(), x.permute_rows(&perm));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn effective_dimension_is_rotation_and_scale_invariant(seed in any::<u64>(), m in 3usize..12, alpha in 0.01f64..100.0) {
        let dim = 6;
        let data = normal_matrix(m, dim, seed, 1.0);
        let q = DMatrix::from_fn(dim, dim, |i, j| normal_matrix(dim, dim, seed ^ 6, 1.0)[[i, j]]).qr().q();
        let rotated = Array2::from_shape_fn((m, dim), |(r, c)| (0..dim).map(|k| data[[r, k]] * q[(k, c)]).sum());
        let states = |a: &Array2<f64>| -> Vec<StateMatrix> {
            a.rows().into_iter().map(|r| StateMatrix::new(r.to_owned().into_shape_with_order((2, 3)).unwrap()).unwrap()).collect()
        };
        let base = effective_dimension(&states(&data)).unwrap();
        let rot = effective_dimension(&states(&rotated)).unwrap();
        let scaled = effective_dimension(&states(&(&data * alpha))).unwrap();
        prop_assert!((base - rot).abs() < 1e-6);
        prop_assert!((base - scaled).abs() < 1e-6);
        prop_assert!(base >= 1.0 && base <= ((m - 1).min(dim)) as f64);
    }

    #[test]
    fn longer_runs_never_end_the_transient_earlier(values in prop::collection::vec(-1.0f64..1.0, 1..60), c1 in 1usize..8, extra in 0usize..8) {
        let s = LyapunovSeries::from_raw(values.clone(), 5, 5 * values.len());
        let a = transient_chaos_length(&s, c1).unwrap();
        let b = transient_chaos_length(&s, c1 + extra).unwrap();
        prop_assert!(b.length >= a.length);
    }

    #[test]
    fn ridge_predictions_shift_with_targets(seed in any::<u64>(), n in 3usize..20, p in 1usize..30, ridge in 1e-6f64..1.0) {
        let x = normal_matrix(n, p, seed, 1.0);
        let y = normal_matrix(n, 2, seed ^ 7, 1.0);
        let c = [3.5, -1.25];
        let shifted = Array2::from_shape_fn((n, 2), |(r, k)| y[[r, k]] + c[k]);
        let a = fit_ridge(x.view(), y.view(), ridge).unwrap().predict(x.view());
        let b = fit_ridge(x.view(), shifted.view(), ridge).unwrap().predict(x.view());
        for r in 0..n {
            for k in 0..2 {
                prop_assert!((b[[r, k]] - a[[r, k]] - c[k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn nmse_is_scale_free(seed in any::<u64>(), alpha in prop_oneof![-50.0f64..-0.02, 0.02f64..50.0]) {
        let y: Vec<Array2<f64>> = (0..3).map(|i| normal_matrix(5, 2, seed ^ i, 1.0)).collect();
        let d: Vec<Array2<f64>> = (0..3).map(|i| normal_matrix(5, 2, seed ^ (i + 10), 1.0)).collect();
        let base = nmse(&y, &d).unwrap();
        let ys: Vec<_> = y.iter().map(|a| a * alpha).collect();
        let ds: Vec<_> = d.iter().map(|a| a * alpha).collect();
        prop_assert!((nmse(&ys, &ds).unwrap() - base).abs() < 1e-12 * base.max(1.0));
    }

    #[test]
    fn softmax_probabilities_sum_to_one(seed in any::<u64>(), scale in 0.01f64..100.0) {
        let model = ReadoutModel { weights: normal_matrix(4, 5, seed, scale), intercept: Array1::from_vec(vec![0.3, -2.0, 5.0, 0.0, 1.0]), window: None };
        let p = softmax_probabilities(&model, normal_matrix(7, 4, seed ^ 8, 1.0).view());
        for row in p.rows() {
            prop_assert!((row.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn splits_are_disjoint_and_complete(strata in prop::collection::vec(0usize..4, 2..80), frac in 0.05f64..0.95, seed in any::<u64>()) {
        if let Ok(s) = stratified_split(&strata, frac, seed) {
            let mut all: Vec<usize> = s.train.iter().chain(&s.eval).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..strata.len()).collect::<Vec<_>>());
            prop_assert!(s.train.iter().all(|i| !s.eval.contains(i)));
            prop_assert_eq!(stratified_split(&strata, frac, seed).unwrap(), s);
        }
    }

    #[test]
    fn container_bytes_round_trip(dims in prop::collection::vec(0usize..4, 0..4), wide in any::<bool>(), seed in any::<u64>()) {
        let n: usize = dims.iter().product();
        let dtype = if wide { DType::F64 } else { DType::F32 };
        let data: Vec<f64> = normal_matrix(1, n, seed, 3.0).iter().map(|&v| if wide { v } else { v as f32 as f64 }).collect();
        let mut c = TensorContainer::new();
        c.insert("t.0", Tensor { dtype, dims: dims.clone(), data }).unwrap();
        c.insert("ünïcode", Tensor { dtype: DType::F64, dims: vec![1], data: vec![seed as f64] }).unwrap();
        let bytes = c.to_bytes();
        let back = TensorContainer::from_bytes(&bytes).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_bytes(), bytes);
    }
}
