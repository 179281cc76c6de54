#![allow(dead_code)]

use bbcd::Params;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random parameter points with `n1, n2 <= n_max`, `p` in `[0.05, 0.95]`, `t` in `[0.05, 2]`.
pub fn grid(count: usize, n_max: u32, seed: u64) -> Vec<Params> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            Params::new(
                rng.random_range(1..=n_max),
                rng.random_range(1..=n_max),
                rng.random_range(0.05..=0.95),
                rng.random_range(0.05..=0.95),
                rng.random_range(0.05..=2.0),
            )
            .unwrap()
        })
        .collect()
}

pub fn ln_choose(n: u32, k: u32) -> f64 {
    (1..=k)
        .map(|i| ((n - k + i) as f64).ln() - (i as f64).ln())
        .sum()
}

/// Joint pmf by direct enumeration of the unnormalized weights, row-major in `x`.
pub fn enumerate(p: &Params) -> Vec<f64> {
    let (n1, n2) = (p.n1(), p.n2());
    let (a, b, c) = (
        (p.p1() / (1.0 - p.p1())).ln(),
        (p.p2() / (1.0 - p.p2())).ln(),
        p.t().ln(),
    );
    let mut logw = Vec::with_capacity(((n1 + 1) * (n2 + 1)) as usize);
    for x in 0..=n1 {
        for y in 0..=n2 {
            logw.push(
                ln_choose(n1, x)
                    + ln_choose(n2, y)
                    + x as f64 * a
                    + y as f64 * b
                    + (x * y) as f64 * c,
            );
        }
    }
    let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = logw.iter().map(|w| (w - max).exp()).sum();
    let log_s = max + total.ln();
    logw.iter().map(|w| (w - log_s).exp()).collect()
}

/// `Σ f(x, y) P(x, y)` over the enumerated table.
pub fn expect(p: &Params, probs: &[f64], f: impl Fn(f64, f64) -> f64) -> f64 {
    let cols = p.n2() as usize + 1;
    probs
        .iter()
        .enumerate()
        .map(|(i, pr)| f((i / cols) as f64, (i % cols) as f64) * pr)
        .sum()
}

pub fn binomial_pmf(n: u32, prob: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| (ln_choose(n, k) + k as f64 * prob.ln() + (n - k) as f64 * (-prob).ln_1p()).exp())
        .collect()
}

/// `|got - want| <= tol |want|`, with an absolute floor at the bottom of the normal range.
pub fn close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs() + 1e-300
}
