use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{array, Array1, Array2};
use rand_distr::{Distribution, StandardNormal};
use statrs::function::erf::erf;

use tdlab::dynamics::{
    draw_perturbation, effective_dimension, local_lyapunov, pca_project, perturbation_response, FnMap,
    LleParams,
};
use tdlab::embedding::{embed, EmbeddingConfig, EmbeddingParams};
use tdlab::encoder::{truncated_normal, Encoder, EncoderConfig, StateMatrix, StateTrajectory, INIT_STD};
use tdlab::readout::{
    fit_ridge, handwriting_sweep, layer_sweep, letter_targets, nmse, stratified_split, CellOutcome,
    FeatureMap, HandwritingSetup, LetterPath, SweepTask,
};

fn normal_matrix(rows: usize, cols: usize, seed: u64, scale: f64) -> Array2<f64> {
    let mut rng = tdlab::rng::seeded(seed);
    Array2::from_shape_fn((rows, cols), |_| {
        let z: f64 = StandardNormal.sample(&mut rng);
        scale * z
    })
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

#[test]
fn clipped_init_matches_clipped_normal_moments() {
    let mut rng = tdlab::rng::seeded(7);
    let v = truncated_normal(&mut rng, 1_000_000, INIT_STD);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let std = (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();

    // N(0, σ²) clipped to ±cσ keeps the interior mass and piles the tails on the bounds:
    // Var/σ² = (2Φ(c) − 1) − 2cφ(c) + 2c²(1 − Φ(c))
    let c = 2.0;
    let phi = (-c * c / 2.0f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let tail = 1.0 - std_normal_cdf(c);
    let var_ratio = (1.0 - 2.0 * tail) - 2.0 * c * phi + 2.0 * c * c * tail;
    let expected = INIT_STD * var_ratio.sqrt();

    assert!(mean.abs() < 3e-4, "mean {mean}");
    assert!((std / expected - 1.0).abs() < 0.02, "std {std} vs {expected}");
    assert!(v.iter().all(|x| x.abs() <= 2.0 * INIT_STD));
    let clipped = v.iter().filter(|x| x.abs() == 2.0 * INIT_STD).count() as f64 / n;
    assert!((clipped - 2.0 * tail).abs() < 2e-3, "clipped fraction {clipped}");
}

#[test]
fn linear_maps_have_log_slope_exponent() {
    for a in [0.5f64, 0.9, 1.1, 2.0] {
        let map = FnMap::new(move |x: &f64| a * x);
        for tau in [1, 3, 10] {
            let p = LleParams { k: 1e-4, tau, horizon: 200, seed: 5 };
            let s = local_lyapunov(&map, &0.0, &p).unwrap();
            for v in &s.per_step.values {
                assert!((v - a.ln()).abs() < 1e-9, "a={a} tau={tau}: {v}");
            }
            for v in &s.raw.values {
                assert!((v - tau as f64 * a.ln()).abs() < 1e-9 * tau as f64);
            }
        }
    }
}

fn toy_state(seed: u64) -> (Encoder, StateMatrix) {
    let encoder = Encoder::random(EncoderConfig::new(32, 2).unwrap(), seed).unwrap();
    let cfg = EmbeddingConfig { vocab_size: 20, embedding_dim: 16, hidden_dim: 32, max_positions: 6, use_positional: true };
    let emb = EmbeddingParams::random(&cfg, seed + 1).unwrap();
    (encoder, embed(&[3, 9, 4, 17, 5, 3], &emb).unwrap())
}

#[test]
fn perturbation_response_reproduces_first_exponent() {
    let (encoder, x0) = toy_state(2);
    for (k, tau) in [(1.0, 10), (1e-3, 4), (1e-6, 1)] {
        let p = LleParams { k, tau, horizon: 3 * tau, seed: 41 };
        let lle = local_lyapunov(&encoder, &x0, &p).unwrap();
        let r = perturbation_response(&encoder, &x0, k, tau, 41).unwrap();
        let from_response = (r.values[tau] / k).ln();
        assert!((from_response - lle.raw.values[0]).abs() < 1e-12);
        assert!((r.values[0] - k).abs() < 1e-12 * k);
    }
    let eps = draw_perturbation(&x0, 0.5, 1);
    assert!((eps.iter().map(|v| v * v).sum::<f64>().sqrt() - 0.5).abs() < 1e-14);
}

#[test]
fn effective_dimension_matches_covariance_eigenvalues() {
    for seed in 0..10 {
        let m = 6 + seed as usize;
        let mut data = normal_matrix(m, 8, seed, 1.0);
        // anisotropic spread so the spectrum is far from flat
        for c in 0..8 {
            data.column_mut(c).mapv_inplace(|v| v * (c + 1) as f64);
        }
        let states: Vec<StateMatrix> = data
            .rows()
            .into_iter()
            .map(|r| StateMatrix::new(r.to_owned().into_shape_with_order((2, 4)).unwrap()).unwrap())
            .collect();
        let got = effective_dimension(&states).unwrap();

        let mean = data.mean_axis(ndarray::Axis(0)).unwrap();
        let centered = &data - &mean;
        let cov = DMatrix::from_fn(8, 8, |i, j| {
            centered.column(i).dot(&centered.column(j)) / (m - 1) as f64
        });
        let eig = SymmetricEigen::new(cov).eigenvalues;
        let total: f64 = eig.iter().sum();
        let expected = 1.0 / eig.iter().map(|l| (l / total).powi(2)).sum::<f64>();
        assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
    }
}

#[test]
fn pca_matches_covariance_eigenvectors() {
    let fixture = array![
        [2.0, 0.5, -1.0],
        [0.0, 1.5, 0.5],
        [-1.0, -0.5, 2.0],
        [3.0, 2.5, -0.5],
        [0.5, -1.0, 1.0],
    ];
    let traj = StateTrajectory {
        times: (0..5).map(|t| t * 10).collect(),
        states: fixture
            .rows()
            .into_iter()
            .map(|r| StateMatrix::new(r.to_owned().insert_axis(ndarray::Axis(0))).unwrap())
            .collect(),
    };
    let pca = pca_project(&traj, 3).unwrap();

    let mean = fixture.mean_axis(ndarray::Axis(0)).unwrap();
    let centered = &fixture - &mean;
    let cov = DMatrix::from_fn(3, 3, |i, j| centered.column(i).dot(&centered.column(j)));
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let total: f64 = eig.eigenvalues.iter().sum();
    for (k, &e) in order.iter().enumerate() {
        let axis = Array1::from_shape_fn(3, |i| eig.eigenvectors[(i, e)]);
        let proj = centered.dot(&axis);
        let sign = if proj.dot(&pca.coordinates.column(k)) < 0.0 { -1.0 } else { 1.0 };
        for r in 0..5 {
            assert!((sign * proj[r] - pca.coordinates[[r, k]]).abs() < 1e-9);
        }
        assert!((pca.explained_variance_ratio[k] - eig.eigenvalues[e] / total).abs() < 1e-9);
    }
    assert_eq!(pca.times, traj.times);
}

#[test]
fn ridge_shrinkage_and_realizable_targets() {
    let x = normal_matrix(30, 5, 1, 1.0);
    let w = normal_matrix(5, 2, 2, 1.0);
    let y = x.dot(&w) + 0.75;
    let exact = fit_ridge(x.view(), y.view(), 1e-12).unwrap();
    let err = nmse(&[exact.predict(x.view())], &[y.clone()]).unwrap();
    assert!(err < 1e-8, "training nmse {err}");

    let norm = |m: &Array2<f64>| m.iter().map(|v| v * v).sum::<f64>().sqrt();
    let free = fit_ridge(x.view(), y.view(), 0.0).unwrap();
    let shrunk = fit_ridge(x.view(), y.view(), 1e8).unwrap();
    assert!(norm(&shrunk.weights) < 1e-4 * norm(&free.weights));
}

fn toy_trajectories(n: usize, steps: usize) -> Vec<StateTrajectory> {
    (0..n)
        .map(|i| {
            let base = normal_matrix(1, 6, 100 + i as u64, 1.0);
            StateTrajectory {
                times: (0..=steps).collect(),
                states: (0..=steps)
                    .map(|t| StateMatrix::new(base.mapv(|v| v * (0.9f64).powi(t as i32) + (t as f64 * v).sin())).unwrap())
                    .collect(),
            }
        })
        .collect()
}

#[test]
fn sweep_times_are_fitted_independently() {
    let trajs = toy_trajectories(40, 6);
    let targets: Vec<f64> = trajs.iter().map(|t| t.states[0][[0, 0]] * 2.0 - t.states[0][[0, 3]]).collect();
    let task = SweepTask::Regression { targets: &targets, ridge: 1e-3 };
    let all = layer_sweep(&trajs, &task, &[0, 3, 6], &FeatureMap::Flatten, 0.25, 9).unwrap();
    for (i, &t) in [0, 3, 6].iter().enumerate() {
        let single = layer_sweep(&trajs, &task, &[t], &FeatureMap::Flatten, 0.25, 9).unwrap();
        assert_eq!(single.scores[0], all.scores[i]);
    }
    // targets are linear in the t = 0 state
    assert!(all.scores[0].unwrap() > 0.999);
}

#[test]
fn single_cell_grid_equals_direct_fit() {
    let trajs = toy_trajectories(20, 30);
    let labels: Vec<usize> = (0..20).map(|i| i % 2).collect();
    let letters = [LetterPath::builtin_u(), LetterPath::builtin_s()];
    let setup = HandwritingSetup {
        letters: letters.clone(),
        t0s: vec![4],
        delta_ts: vec![8],
        ridge: 1e-3,
        eval_fraction: 0.3,
        seed: 2,
    };
    let map = handwriting_sweep(&trajs, &labels, &setup).unwrap();
    let CellOutcome::Nmse(got) = map.cells[0].outcome else { panic!("cell failed") };

    let split = stratified_split(&labels, 0.3, 2).unwrap();
    assert_eq!(map.split, split);
    let targets: Vec<Array2<f64>> = letters
        .iter()
        .map(|l| {
            let d = letter_targets(l, 8).unwrap().directions;
            Array2::from_shape_fn((8, 2), |(r, c)| d[r][c])
        })
        .collect();
    let window = |i: usize| Array2::from_shape_fn((8, 6), |(r, c)| trajs[i].states[4 + r][[0, c]]);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &i in &split.train {
        xs.extend(window(i).iter().copied());
        ys.extend(targets[labels[i]].iter().copied());
    }
    let n = split.train.len() * 8;
    let model = fit_ridge(
        Array2::from_shape_vec((n, 6), xs).unwrap().view(),
        Array2::from_shape_vec((n, 2), ys).unwrap().view(),
        1e-3,
    )
    .unwrap();
    let outputs: Vec<_> = split.eval.iter().map(|&i| model.predict(window(i).view())).collect();
    let wanted: Vec<_> = split.eval.iter().map(|&i| targets[labels[i]].clone()).collect();
    let expected = nmse(&outputs, &wanted).unwrap();
    assert!((got - expected).abs() < 1e-12 * expected.max(1.0), "{got} vs {expected}");
}

#[test]
fn cells_beyond_the_trajectory_are_marked() {
    let trajs = toy_trajectories(10, 10);
    let labels: Vec<usize> = (0..10).map(|i| i % 2).collect();
    let setup = HandwritingSetup {
        letters: [LetterPath::builtin_u(), LetterPath::builtin_s()],
        t0s: vec![0, 5],
        delta_ts: vec![5, 8],
        ridge: 1e-3,
        eval_fraction: 0.2,
        seed: 0,
    };
    let map = handwriting_sweep(&trajs, &labels, &setup).unwrap();
    let outcome = |t0, dt| map.cells.iter().find(|c| c.t0 == t0 && c.delta_t == dt).unwrap().outcome.clone();
    assert!(outcome(0, 8).nmse().is_some());
    assert!(outcome(5, 5).nmse().is_some());
    assert_eq!(outcome(5, 8), CellOutcome::InsufficientLength);
}
