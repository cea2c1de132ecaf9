//! Teach one shared linear readout to write U for one class of trajectories
//! and S for the other, then compare against a label-shuffled control.
//!
//! The reservoir is a constructed linear system: each class relaxes towards
//! its own fixed point through slowly decaying rotations, so a window of the
//! transient identifies both the class and the elapsed time.

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use tdlab::encoder::{StateMatrix, StateTrajectory};
use tdlab::readout::{draw_cell, handwriting_sweep, HandwritingSetup, LetterPath, Window};

const DIM: usize = 64;
const STEPS: usize = 60;

fn rotation_decay(x: &Array1<f64>) -> Array1<f64> {
    let mut y = Array1::zeros(DIM);
    for j in 0..DIM / 2 {
        let theta = 0.04 + 0.09 * j as f64;
        let (s, c) = theta.sin_cos();
        let (a, b) = (x[2 * j], x[2 * j + 1]);
        y[2 * j] = 0.97 * (c * a - s * b);
        y[2 * j + 1] = 0.97 * (s * a + c * b);
    }
    y
}

fn trajectories(per_class: usize, seed: u64) -> (Vec<StateTrajectory>, Vec<usize>) {
    let mut rng = tdlab::rng::seeded(seed);
    let mut normal = |scale: f64| -> Array1<f64> {
        Array1::from_shape_fn(DIM, |_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            scale * z
        })
    };
    let centers = [normal(1.0), normal(1.0)];
    let kicks = [normal(3.0), normal(3.0)];
    let mut trajs = Vec::new();
    let mut labels = Vec::new();
    for member in 0..2 * per_class {
        let class = member % 2;
        let mut dev = &kicks[class] + &normal(0.01);
        let mut states = Vec::with_capacity(STEPS + 1);
        for _ in 0..=STEPS {
            let x = &centers[class] + &dev;
            states.push(StateMatrix::new(Array2::from_shape_vec((1, DIM), x.to_vec()).unwrap()).unwrap());
            dev = rotation_decay(&dev);
        }
        trajs.push(StateTrajectory { times: (0..=STEPS).collect(), states });
        labels.push(class);
    }
    (trajs, labels)
}

fn main() -> tdlab::Result<()> {
    let (trajs, labels) = trajectories(40, 11);
    let setup = HandwritingSetup {
        letters: [LetterPath::builtin_u(), LetterPath::builtin_s()],
        t0s: vec![0, 5, 10, 20, 30],
        delta_ts: vec![10, 20, 30],
        ridge: 1e-6,
        eval_fraction: 0.25,
        seed: 3,
    };
    let map = handwriting_sweep(&trajs, &labels, &setup)?;
    print!("{}", map.to_csv());
    let best = map.best().expect("non-empty grid");
    println!("best cell t0={} delta_t={} nmse={:?}", best.t0, best.delta_t, best.outcome.nmse());

    let (_, drawn) = draw_cell(&trajs, &labels, &setup, Window { t0: best.t0, delta_t: best.delta_t })?;
    for d in drawn.iter().take(2) {
        let end = d.points.last().unwrap();
        println!("item {} (class {}) ends at ({:.3}, {:.3}), nmse {:.2e}", d.item, d.class, end[0], end[1], d.nmse);
    }

    let mut shuffled = labels.clone();
    shuffled.shuffle(&mut tdlab::rng::seeded(5));
    let control = handwriting_sweep(&trajs, &shuffled, &setup)?;
    print!("{}", control.to_csv());
    let c = control.best().expect("non-empty grid");
    println!("shuffled labels: best nmse {:?} at t0={} delta_t={}", c.outcome.nmse(), c.t0, c.delta_t);
    Ok(())
}
