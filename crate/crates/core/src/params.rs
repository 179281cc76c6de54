use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::logit;

/// Parameters `(n1, n2, p1, p2, t)` of a bivariate binomial conditionals law.
///
/// `X | Y=y ~ Bin(n1, t^y p1 / (1 - p1 + t^y p1))` and symmetrically for `Y | X=x`.
/// `t < 1` gives negative correlation, `t = 1` independence, `t > 1` positive correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    n1: u32,
    n2: u32,
    p1: f64,
    p2: f64,
    t: f64,
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in (0, 1), got {p}")))
    }
}

impl Params {
    pub fn new(n1: u32, n2: u32, p1: f64, p2: f64, t: f64) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::Domain(format!(
                "trial counts must be positive, got n1={n1}, n2={n2}"
            )));
        }
        check_probability("p1", p1)?;
        check_probability("p2", p2)?;
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Domain(format!("t must be finite and > 0, got {t}")));
        }
        let params = Params { n1, n2, p1, p2, t };
        if !(params.q1().is_finite() && params.q2().is_finite()) {
            return Err(Error::Domain("success odds overflow".into()));
        }
        Ok(params)
    }

    /// Equal trial counts `n1 = n2 = n`.
    pub fn symmetric_n(n: u32, p1: f64, p2: f64, t: f64) -> Result<Self> {
        Self::new(n, n, p1, p2, t)
    }

    pub fn n1(&self) -> u32 {
        self.n1
    }

    pub fn n2(&self) -> u32 {
        self.n2
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn q1(&self) -> f64 {
        self.p1 / (1.0 - self.p1)
    }

    pub fn q2(&self) -> f64 {
        self.p2 / (1.0 - self.p2)
    }

    /// Natural parameters `(ln q1, ln q2, ln t)`.
    pub fn natural(&self) -> [f64; 3] {
        [logit(self.p1), logit(self.p2), self.t.ln()]
    }

    /// The law of `(Y, X)`.
    pub fn swapped(&self) -> Params {
        Params {
            n1: self.n2,
            n2: self.n1,
            p1: self.p2,
            p2: self.p1,
            t: self.t,
        }
    }

    pub fn cells(&self) -> u128 {
        (self.n1 as u128 + 1) * (self.n2 as u128 + 1)
    }

    pub fn in_support(&self, x: u32, y: u32) -> bool {
        x <= self.n1 && y <= self.n2
    }
}
