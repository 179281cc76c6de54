//! Small log-space helpers shared by the distribution, sampler and fitter.

/// Cumulative `ln k!` table for `k = 0..=n`.
#[derive(Debug, Clone)]
pub struct LnFactorials {
    table: Vec<f64>,
}

impl LnFactorials {
    pub fn new(n: u32) -> Self {
        let mut table = Vec::with_capacity(n as usize + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for k in 1..=n {
            acc += (k as f64).ln();
            table.push(acc);
        }
        LnFactorials { table }
    }

    #[inline]
    pub fn ln_factorial(&self, k: u32) -> f64 {
        self.table[k as usize]
    }

    /// `ln C(n, k)`; `k <= n <= capacity` is the caller's responsibility.
    #[inline]
    pub fn ln_choose(&self, n: u32, k: u32) -> f64 {
        debug_assert!(k <= n);
        self.table[n as usize] - self.table[k as usize] - self.table[(n - k) as usize]
    }

    /// `ln n_(r)` for the falling factorial `n (n-1) ... (n-r+1)`.
    #[inline]
    pub fn ln_falling(&self, n: u32, r: u32) -> f64 {
        debug_assert!(r <= n);
        self.table[n as usize] - self.table[(n - r) as usize]
    }
}

/// Numerically stable `ln Σ exp(v)`, summed in iteration order.
pub fn log_sum_exp<I>(values: I) -> f64
where
    I: IntoIterator<Item = f64>,
    I::IntoIter: Clone,
{
    let iter = values.into_iter();
    let max = iter.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = iter.map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// `ln(1 + e^a)` without overflow.
#[inline]
pub fn softplus(a: f64) -> f64 {
    if a > 0.0 {
        a + (-a).exp().ln_1p()
    } else {
        a.exp().ln_1p()
    }
}

/// `1 / (1 + e^-a)`.
#[inline]
pub fn logistic(a: f64) -> f64 {
    if a >= 0.0 {
        1.0 / (1.0 + (-a).exp())
    } else {
        let e = a.exp();
        e / (1.0 + e)
    }
}

#[inline]
pub fn logit(p: f64) -> f64 {
    p.ln() - (-p).ln_1p()
}
