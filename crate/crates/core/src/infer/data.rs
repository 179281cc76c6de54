use std::collections::BTreeMap;

use serde::Serialize;

use crate::dist::{JointTable, MomentSummary};
use crate::error::{Error, Result};

/// `(Σx, Σy, Σxy)`, complete and sufficient for `(p1, p2, t)` at fixed trial counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SufficientStats {
    pub sum_x: f64,
    pub sum_y: f64,
    pub sum_xy: f64,
}

/// Observed `(x, y)` counts. Cell weights are usually integer counts but may be
/// fractional, e.g. expected counts used as a population-level pseudo-sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleData {
    pairs: Vec<(u32, u32)>,
    cells: BTreeMap<(u32, u32), f64>,
    m: f64,
    suff: SufficientStats,
    max_x: u32,
    max_y: u32,
}

impl SampleData {
    pub fn from_pairs(pairs: Vec<(u32, u32)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::NoObservations);
        }
        let mut cells = BTreeMap::new();
        for &(x, y) in &pairs {
            *cells.entry((x, y)).or_insert(0.0) += 1.0;
        }
        let mut data = Self::build(cells)?;
        data.pairs = pairs;
        Ok(data)
    }

    /// Aggregated cells with nonnegative weights; zero-weight cells are dropped.
    pub fn from_cells<I>(cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((u32, u32), f64)>,
    {
        let mut map = BTreeMap::new();
        for ((x, y), w) in cells {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Domain(format!(
                    "cell ({x}, {y}) has invalid weight {w}"
                )));
            }
            if w > 0.0 {
                *map.entry((x, y)).or_insert(0.0) += w;
            }
        }
        Self::build(map)
    }

    /// Expected counts `m P(x, y)` as a fractional pseudo-sample.
    pub fn expected_from_table(table: &JointTable, m: f64) -> Result<Self> {
        Self::from_cells(table.iter().map(|(x, y, p)| ((x, y), m * p)))
    }

    fn build(cells: BTreeMap<(u32, u32), f64>) -> Result<Self> {
        let mut suff = SufficientStats::default();
        let mut m = 0.0;
        let (mut max_x, mut max_y) = (0, 0);
        for (&(x, y), &w) in &cells {
            m += w;
            suff.sum_x += w * x as f64;
            suff.sum_y += w * y as f64;
            suff.sum_xy += w * x as f64 * y as f64;
            max_x = max_x.max(x);
            max_y = max_y.max(y);
        }
        if cells.is_empty() || m <= 0.0 {
            return Err(Error::NoObservations);
        }
        Ok(SampleData {
            pairs: Vec::new(),
            cells,
            m,
            suff,
            max_x,
            max_y,
        })
    }

    /// Raw pairs in input order; empty when built from aggregated cells.
    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn cells(&self) -> &BTreeMap<(u32, u32), f64> {
        &self.cells
    }

    pub fn count(&self, x: u32, y: u32) -> f64 {
        self.cells.get(&(x, y)).copied().unwrap_or(0.0)
    }

    /// Total weight (number of observations for count data).
    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn suff(&self) -> SufficientStats {
        self.suff
    }

    pub fn max_x(&self) -> u32 {
        self.max_x
    }

    pub fn max_y(&self) -> u32 {
        self.max_y
    }

    pub fn sample_moments(&self) -> MomentSummary {
        MomentSummary::from_weighted(self.cells.iter().map(|(&(x, y), &w)| (x, y, w)))
            .expect("data has positive total weight")
    }

    /// First observation (or cell) falling outside `[0, n1] x [0, n2]`.
    pub(crate) fn check_support(&self, n1: u32, n2: u32) -> Result<()> {
        if self.max_x <= n1 && self.max_y <= n2 {
            return Ok(());
        }
        let bad = |&(x, y): &(u32, u32)| x > n1 || y > n2;
        let (index, (x, y)) = if self.pairs.is_empty() {
            self.cells
                .keys()
                .copied()
                .enumerate()
                .find(|(_, c)| bad(c))
                .expect("max exceeds bound")
        } else {
            self.pairs
                .iter()
                .copied()
                .enumerate()
                .find(|(_, c)| bad(c))
                .expect("max exceeds bound")
        };
        Err(Error::DataOutOfSupport {
            index,
            x,
            y,
            n1,
            n2,
        })
    }
}

/// Relative frequencies of the four low cells `(0,0), (0,1), (1,0), (1,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellFrequencies {
    pub f00: f64,
    pub f01: f64,
    pub f10: f64,
    pub f11: f64,
}

impl CellFrequencies {
    pub fn from_data(data: &SampleData) -> Self {
        let f = |x, y| data.count(x, y) / data.m();
        CellFrequencies {
            f00: f(0, 0),
            f01: f(0, 1),
            f10: f(1, 0),
            f11: f(1, 1),
        }
    }

    pub fn from_table(table: &JointTable) -> Self {
        CellFrequencies {
            f00: table.get(0, 0),
            f01: table.get(0, 1),
            f10: table.get(1, 0),
            f11: table.get(1, 1),
        }
    }
}
