use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::Serialize;

/// Mean time in system of an M/D/1 queue.
pub fn md1_system_time(lambda: f64, mu: f64) -> f64 {
    (1.0 / mu) * (1.0 + lambda / (2.0 * (mu - lambda)))
}

#[derive(Debug, Clone, Serialize)]
pub struct Md1Result {
    pub mean_system_time: f64,
    pub theory: f64,
    pub relative_error: f64,
}

/// Lindley recursion for a single queue with Poisson arrivals and fixed
/// service time `1/mu`.
pub fn simulate_md1(lambda: f64, mu: f64, arrivals: usize, seed: u64) -> Md1Result {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gap = Exp::new(lambda).expect("lambda must be positive");
    let s = 1.0 / mu;
    let mut wait = 0.0f64;
    let mut sum = 0.0;
    for _ in 0..arrivals {
        sum += wait + s;
        wait = (wait + s - gap.sample(&mut rng)).max(0.0);
    }
    let mean = sum / arrivals as f64;
    let theory = md1_system_time(lambda, mu);
    Md1Result { mean_system_time: mean, theory, relative_error: (mean - theory).abs() / theory }
}
