use serde::Serialize;
use statrs::function::gamma::gamma_ur;

use super::{FitResult, SampleData};
use crate::dist::build_table;
use crate::error::{Error, Result};
use crate::params::Params;

/// Minimum expected count per pooled group.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PooledCell {
    pub cells: Vec<(u32, u32)>,
    pub observed: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub pooled_cells: Vec<PooledCell>,
    /// Set when `groups - 1 - estimated` fell below 1 and was raised to 1.
    pub dof_floored: bool,
}

/// `P(χ²_dof > statistic)`.
pub fn chi_square_upper_tail(statistic: f64, dof: usize) -> f64 {
    if statistic <= 0.0 {
        return 1.0;
    }
    gamma_ur(dof as f64 / 2.0, statistic / 2.0)
}

pub fn chi_square_gof(
    data: &SampleData,
    fitted: &FitResult,
    n_estimated_params: usize,
) -> Result<GofReport> {
    chi_square_gof_params(data, &fitted.params_hat, n_estimated_params)
}

/// Pearson test with cells pooled greedily by descending expected count until
/// each group expects at least five observations. A short final group is
/// merged into the previous one.
pub fn chi_square_gof_params(
    data: &SampleData,
    params: &Params,
    n_estimated_params: usize,
) -> Result<GofReport> {
    if data.m() < 10.0 {
        return Err(Error::InsufficientData(format!(
            "chi-square test needs at least 10 observations, got {}",
            data.m()
        )));
    }
    data.check_support(params.n1(), params.n2())?;
    let table = build_table(params)?;
    let m = data.m();
    let total = table.total();

    let mut cells: Vec<(u32, u32, f64)> = table
        .iter()
        .map(|(x, y, p)| (x, y, m * p / total))
        .collect();
    cells.sort_by(|a, b| b.2.total_cmp(&a.2));

    let mut groups: Vec<PooledCell> = Vec::new();
    let mut current = PooledCell {
        cells: Vec::new(),
        observed: 0.0,
        expected: 0.0,
    };
    for (x, y, e) in cells {
        current.cells.push((x, y));
        current.observed += data.count(x, y);
        current.expected += e;
        if current.expected >= MIN_EXPECTED {
            groups.push(std::mem::replace(
                &mut current,
                PooledCell {
                    cells: Vec::new(),
                    observed: 0.0,
                    expected: 0.0,
                },
            ));
        }
    }
    if !current.cells.is_empty() {
        match groups.last_mut() {
            Some(last) => {
                last.cells.extend(current.cells);
                last.observed += current.observed;
                last.expected += current.expected;
            }
            None => groups.push(current),
        }
    }

    let statistic: f64 = groups
        .iter()
        .map(|g| (g.observed - g.expected).powi(2) / g.expected)
        .sum();
    let raw_dof = groups.len() as i64 - 1 - n_estimated_params as i64;
    let dof_floored = raw_dof < 1;
    let dof = raw_dof.max(1) as usize;
    Ok(GofReport {
        statistic,
        dof,
        p_value: chi_square_upper_tail(statistic, dof),
        pooled_cells: groups,
        dof_floored,
    })
}
