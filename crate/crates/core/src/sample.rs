//! Random variate generation: the two-conditional Gibbs sampler and an exact
//! inverse-CDF sampler over the finite support.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use serde::Serialize;

use crate::dist::{build_table, JointTable};
use crate::error::{Error, Result};
use crate::params::Params;
use crate::special::logistic;

/// Identifier of the generator behind every seeded stream, echoed in sample metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Largest `n` drawn by inversion; larger counts use BTPE rejection.
pub const INVERSION_MAX_N: u32 = 64;

/// Seeded generator. Distinct `stream` values give independent sequences for
/// the same seed, which lets parallel chains share one user-facing seed.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One `Bin(n, p)` variate.
pub fn sample_binomial<R: Rng + ?Sized>(rng: &mut R, n: u32, p: f64) -> u32 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    if n > INVERSION_MAX_N {
        return rand_distr::Binomial::new(n as u64, p)
            .expect("p checked to lie in (0, 1)")
            .sample(rng) as u32;
    }
    if p > 0.5 {
        return n - invert_binomial(rng, n, 1.0 - p);
    }
    invert_binomial(rng, n, p)
}

/// Sequential search from zero; `p <= 0.5` and `n <= 64` keep `(1-p)^n` well above underflow.
fn invert_binomial<R: Rng + ?Sized>(rng: &mut R, n: u32, p: f64) -> u32 {
    let q = 1.0 - p;
    let odds = p / q;
    let mut f = q.powi(n as i32);
    let mut u: f64 = rng.random();
    let mut k = 0;
    while u > f && k < n {
        u -= f;
        k += 1;
        f *= odds * (n - k + 1) as f64 / k as f64;
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GibbsConfig {
    pub n_samples: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub init: (u32, u32),
}

impl GibbsConfig {
    /// Defaults: 500 burn-in sweeps, no thinning, chain started at `(0, 0)`.
    pub fn new(n_samples: usize, seed: u64) -> Self {
        GibbsConfig {
            n_samples,
            burn_in: 500,
            thin: 1,
            seed,
            init: (0, 0),
        }
    }

    pub fn burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn thin(mut self, thin: usize) -> Self {
        self.thin = thin;
        self
    }

    pub fn init(mut self, x0: u32, y0: u32) -> Self {
        self.init = (x0, y0);
        self
    }

    pub fn validate(&self, params: &Params) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Config("n_samples must be at least 1".into()));
        }
        if self.thin == 0 {
            return Err(Error::Config("thin must be at least 1".into()));
        }
        let (x0, y0) = self.init;
        if !params.in_support(x0, y0) {
            return Err(Error::Config(format!(
                "initial state ({x0}, {y0}) outside [0, {}] x [0, {}]",
                params.n1(),
                params.n2()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "sampler", rename_all = "snake_case")]
pub enum SamplerConfig {
    Gibbs(GibbsConfig),
    Exact { n_samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePairs {
    pub pairs: Vec<(u32, u32)>,
    pub params_used: Params,
    pub config_used: SamplerConfig,
    pub rng_algorithm: &'static str,
}

impl SamplePairs {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// CSV with header `x,y`, one pair per LF-terminated line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y")?;
        for (x, y) in &self.pairs {
            writeln!(out, "{x},{y}")?;
        }
        Ok(())
    }

    /// Relative cell frequencies over `[0, n1] x [0, n2]`, row-major.
    pub fn empirical_table(&self) -> Vec<f64> {
        let (n1, n2) = (self.params_used.n1(), self.params_used.n2());
        let w = n2 as usize + 1;
        let mut counts = vec![0.0; (n1 as usize + 1) * w];
        for &(x, y) in &self.pairs {
            counts[x as usize * w + y as usize] += 1.0;
        }
        let m = self.pairs.len() as f64;
        counts.iter_mut().for_each(|c| *c /= m);
        counts
    }

    /// Total variation distance between the empirical frequencies and `table`.
    pub fn tv_distance(&self, table: &JointTable) -> f64 {
        0.5 * self
            .empirical_table()
            .iter()
            .zip(table.as_slice())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// Alternates `Y | X=x ~ Bin(n2, t^x p2 / (1 - p2 + t^x p2))` and
/// `X | Y=y ~ Bin(n1, t^y p1 / (1 - p1 + t^y p1))`, keeping every `thin`-th
/// sweep after `burn_in` sweeps.
pub fn gibbs_sample(params: &Params, config: &GibbsConfig) -> Result<SamplePairs> {
    config.validate(params)?;
    let [a, b, c] = params.natural();
    let (n1, n2) = (params.n1(), params.n2());
    let p_y_given_x: Vec<f64> = (0..=n1).map(|x| logistic(b + x as f64 * c)).collect();
    let p_x_given_y: Vec<f64> = (0..=n2).map(|y| logistic(a + y as f64 * c)).collect();

    let mut rng = seeded_rng(config.seed, 0);
    let (mut x, mut y) = config.init;
    let mut sweep = || {
        y = sample_binomial(&mut rng, n2, p_y_given_x[x as usize]);
        x = sample_binomial(&mut rng, n1, p_x_given_y[y as usize]);
        (x, y)
    };
    for _ in 0..config.burn_in {
        sweep();
    }
    let mut pairs = Vec::with_capacity(config.n_samples);
    while pairs.len() < config.n_samples {
        let mut last = (0, 0);
        for _ in 0..config.thin {
            last = sweep();
        }
        pairs.push(last);
    }
    Ok(SamplePairs {
        pairs,
        params_used: *params,
        config_used: SamplerConfig::Gibbs(*config),
        rng_algorithm: RNG_ALGORITHM,
    })
}

/// I.i.d. draws by inverse-CDF search over the flattened joint table.
pub fn exact_sample(params: &Params, n_samples: usize, seed: u64) -> Result<SamplePairs> {
    let table = build_table(params)?;
    let mut cdf = Vec::with_capacity(table.as_slice().len());
    let mut acc = 0.0;
    for &p in table.as_slice() {
        acc += p;
        cdf.push(acc);
    }
    let w = params.n2() as usize + 1;
    let last = cdf.len() - 1;
    let mut rng = seeded_rng(seed, 0);
    let pairs = (0..n_samples)
        .map(|_| {
            let u = rng.random::<f64>() * acc;
            let i = cdf.partition_point(|&c| c <= u).min(last);
            ((i / w) as u32, (i % w) as u32)
        })
        .collect();
    Ok(SamplePairs {
        pairs,
        params_used: *params,
        config_used: SamplerConfig::Exact { n_samples, seed },
        rng_algorithm: RNG_ALGORITHM,
    })
}
