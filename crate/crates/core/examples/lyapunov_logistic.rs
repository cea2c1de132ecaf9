//! The local Lyapunov estimator on the logistic map `r = 4`, whose exponent
//! is `ln 2`.

use tdlab::dynamics::{local_lyapunov, FnMap, LleParams};

fn main() -> tdlab::Result<()> {
    let logistic = FnMap::new(|x: &f64| 4.0 * x * (1.0 - x));
    let params = LleParams {
        k: 1e-8,
        tau: 1,
        horizon: 100_000,
        seed: 1,
    };
    let start = std::time::Instant::now();
    let lle = local_lyapunov(&logistic, &0.3, &params)?;
    let mean = lle.mean_per_step().expect("non-empty series");
    println!("mean lambda = {mean:.5}  (ln 2 = {:.5})", std::f64::consts::LN_2);
    println!("{} samples in {:.2?}", lle.len(), start.elapsed());

    for a in [0.5, 1.1, 2.0] {
        let linear = FnMap::new(move |x: &f64| a * x);
        let p = LleParams { k: 1e-3, tau: 5, horizon: 100, seed: 0 };
        // start on the fixed point so the orbit itself never grows
        let m = local_lyapunov(&linear, &0.0, &p)?.mean_per_step().unwrap();
        println!("x -> {a} x: lambda = {m:.12}, ln a = {:.12}", f64::ln(a));
    }
    Ok(())
}
