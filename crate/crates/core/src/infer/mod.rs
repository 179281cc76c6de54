//! Parameter estimation and goodness-of-fit.
//!
//! The log-likelihood is an exponential family in the natural parameters
//! `(ln q1, ln q2, ln t)` with sufficient statistics `(Σx, Σy, Σxy)`, so the
//! fitter searches directly in that space. At an interior optimum the model
//! means of `X`, `Y` and `XY` equal the sample means.

mod data;
mod gof;
pub mod simplex;

pub use data::{CellFrequencies, SampleData, SufficientStats};
pub use gof::{
    chi_square_gof, chi_square_gof_params, chi_square_upper_tail, GofReport, PooledCell,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::{build_table, log_s_ln, MomentSummary};
use crate::error::{Error, Result};
use crate::params::Params;
use crate::special::{logistic, logit, LnFactorials};
use simplex::{minimize, SimplexOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Proportions,
    MleFixedN,
    MleProfiledN,
}

/// Log-likelihood at one candidate trial-count pair of a profiled fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub n1: u32,
    pub n2: u32,
    pub log_lik: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    #[serde(flatten)]
    pub params_hat: Params,
    pub log_lik: Option<f64>,
    pub converged: bool,
    pub method: FitMethod,
    pub n_evaluations: usize,
    /// Parameters estimated from the data; the default chi-square dof deduction.
    pub free_parameters: usize,
    pub model_moments: MomentSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_moments: Option<MomentSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub profile: Vec<ProfilePoint>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn finish(params: Params) -> Result<MomentSummary> {
    Ok(build_table(&params)?.moments())
}

/// Closed-form estimates from the four low-cell frequencies:
/// `p2 = f01 / (f01 + n2 f00)`, `p1 = f10 / (f10 + n1 f00)`,
/// `t = (1 - p1) f11 / (n1 p1 f01)`.
pub fn estimate_from_proportions(freq: &CellFrequencies, n1: u32, n2: u32) -> Result<FitResult> {
    for (f, x, y) in [
        (freq.f00, 0, 0),
        (freq.f01, 0, 1),
        (freq.f10, 1, 0),
        (freq.f11, 1, 1),
    ] {
        if f.is_nan() || f <= 0.0 {
            return Err(Error::ZeroFrequency { x, y });
        }
    }
    if n1 == 0 || n2 == 0 {
        return Err(Error::Domain("trial counts must be positive".into()));
    }
    let p2 = freq.f01 / (freq.f01 + n2 as f64 * freq.f00);
    let p1 = freq.f10 / (freq.f10 + n1 as f64 * freq.f00);
    let t = (1.0 - p1) * freq.f11 / (n1 as f64 * p1 * freq.f01);

    let mut warnings = Vec::new();
    let clamp_p = |name: &str, v: f64, warnings: &mut Vec<String>| {
        let c = v.clamp(f64::EPSILON, 1.0 - f64::EPSILON);
        if c != v {
            warnings.push(format!("{name} estimate {v} clamped to {c}"));
        }
        c
    };
    let p1 = clamp_p("p1", p1, &mut warnings);
    let p2 = clamp_p("p2", p2, &mut warnings);
    let t = if t.is_finite() {
        t
    } else {
        warnings.push(format!("t estimate {t} clamped to {}", f64::MAX));
        f64::MAX
    };
    let params_hat = Params::new(n1, n2, p1, p2, t)?;
    Ok(FitResult {
        params_hat,
        log_lik: None,
        converged: true,
        method: FitMethod::Proportions,
        n_evaluations: 0,
        free_parameters: 3,
        model_moments: finish(params_hat)?,
        sample_moments: None,
        profile: Vec::new(),
        warnings,
    })
}

/// Proportions estimator applied to data, with the log-likelihood filled in.
pub fn estimate_from_sample(data: &SampleData, n1: u32, n2: u32) -> Result<FitResult> {
    data.check_support(n1, n2)?;
    let mut fit = estimate_from_proportions(&CellFrequencies::from_data(data), n1, n2)?;
    fit.log_lik = Some(log_likelihood(&fit.params_hat, data)?);
    fit.sample_moments = Some(data.sample_moments());
    Ok(fit)
}

/// Log-likelihood as a function of the natural parameters at fixed `(n1, n2)`.
struct Surface {
    n1: u32,
    n2: u32,
    lf: LnFactorials,
    constant: f64,
    m: f64,
    suff: [f64; 3],
}

impl Surface {
    fn new(data: &SampleData, n1: u32, n2: u32) -> Self {
        let lf = LnFactorials::new(n1.max(n2));
        let constant = data
            .cells()
            .iter()
            .map(|(&(x, y), &w)| w * (lf.ln_choose(n1, x) + lf.ln_choose(n2, y)))
            .sum();
        let s = data.suff();
        Surface {
            n1,
            n2,
            lf,
            constant,
            m: data.m(),
            suff: [s.sum_x, s.sum_y, s.sum_xy],
        }
    }

    fn log_lik(&self, theta: &[f64; 3]) -> f64 {
        let log_s = log_s_ln(&self.lf, self.n1, self.n2, theta[0], theta[1], theta[2]);
        self.constant
            + theta
                .iter()
                .zip(&self.suff)
                .map(|(a, b)| a * b)
                .sum::<f64>()
            - self.m * log_s
    }

    /// Model mean and covariance of `(X, Y, XY)` at `theta`.
    fn moments(&self, theta: &[f64; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
        let log_s = log_s_ln(&self.lf, self.n1, self.n2, theta[0], theta[1], theta[2]);
        let mut mean = [0.0; 3];
        let mut second = [[0.0; 3]; 3];
        for x in 0..=self.n1 {
            for y in 0..=self.n2 {
                let (xf, yf) = (x as f64, y as f64);
                let lw = self.lf.ln_choose(self.n1, x)
                    + self.lf.ln_choose(self.n2, y)
                    + xf * theta[0]
                    + yf * theta[1]
                    + xf * yf * theta[2];
                let p = (lw - log_s).exp();
                let stat = [xf, yf, xf * yf];
                for i in 0..3 {
                    mean[i] += p * stat[i];
                    for j in 0..3 {
                        second[i][j] += p * stat[i] * stat[j];
                    }
                }
            }
        }
        let mut cov = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] = second[i][j] - mean[i] * mean[j];
            }
        }
        (mean, cov)
    }
}

/// `ℓ = m ln K_B + Σ ln C(n1,x_i) + Σ ln C(n2,y_i) + Σx ln p1 + Σy ln p2
///      + Σ(n1-x) ln(1-p1) + Σ(n2-y) ln(1-p2) + Σxy ln t`.
pub fn log_likelihood(params: &Params, data: &SampleData) -> Result<f64> {
    data.check_support(params.n1(), params.n2())?;
    Ok(Surface::new(data, params.n1(), params.n2()).log_lik(&params.natural()))
}

#[derive(Debug, Clone)]
pub struct MleOptions {
    pub simplex: SimplexOptions,
    /// Starting `(p1, p2, t)`; defaults to `(x̄/n1, ȳ/n2, 1)`.
    pub start: Option<(f64, f64, f64)>,
    /// Hold `t` fixed (e.g. `1` for the independence model).
    pub fixed_t: Option<f64>,
    /// Newton refinement on the exact score after the simplex stops.
    pub polish: bool,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions {
            simplex: SimplexOptions::default(),
            start: None,
            fixed_t: None,
            polish: true,
        }
    }
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col].clone();
        for row in col + 1..n {
            let f = a[row][col] / pivot_row[col];
            for (v, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *v -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn check_fit_inputs(data: &SampleData, n1: u32, n2: u32) -> Result<()> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::Domain("trial counts must be positive".into()));
    }
    data.check_support(n1, n2)?;
    if data.m() < 3.0 {
        return Err(Error::InsufficientData(format!(
            "maximum likelihood needs at least 3 observations, got {}",
            data.m()
        )));
    }
    let s = data.suff();
    for (name, sum, n) in [("x", s.sum_x, n1), ("y", s.sum_y, n2)] {
        if sum <= 0.0 {
            return Err(Error::Boundary(format!("all {name} equal 0")));
        }
        if sum >= data.m() * n as f64 {
            return Err(Error::Boundary(format!("all {name} equal {n}")));
        }
    }
    Ok(())
}

/// Maximum likelihood for `(p1, p2, t)` at known `(n1, n2)`.
pub fn fit_mle(data: &SampleData, n1: u32, n2: u32, opts: &MleOptions) -> Result<FitResult> {
    check_fit_inputs(data, n1, n2)?;
    let surface = Surface::new(data, n1, n2);
    let m = data.m();
    let s = data.suff();

    let (p1_0, p2_0, t_0) =
        opts.start
            .unwrap_or((s.sum_x / (m * n1 as f64), s.sum_y / (m * n2 as f64), 1.0));
    let free_dims = if opts.fixed_t.is_some() { 2 } else { 3 };
    let fixed_ln_t = opts.fixed_t.map(f64::ln);
    let theta_of =
        |free: &[f64]| -> [f64; 3] { [free[0], free[1], fixed_ln_t.unwrap_or_else(|| free[2])] };
    let objective = |free: &[f64]| -surface.log_lik(&theta_of(free)) / m;

    let start = [logit(p1_0), logit(p2_0), t_0.ln()];
    let nm = minimize(objective, &start[..free_dims], &opts.simplex);
    let mut free = nm.point.clone();
    let mut evals = nm.evals;

    let mut polished = false;
    if opts.polish {
        let target = [s.sum_x / m, s.sum_y / m, s.sum_xy / m];
        let mut current = objective(&free);
        for _ in 0..50 {
            let theta = theta_of(&free);
            let (mean, cov) = surface.moments(&theta);
            evals += 1;
            let grad: Vec<f64> = (0..free_dims).map(|i| mean[i] - target[i]).collect();
            let rel = (0..free_dims)
                .map(|i| grad[i].abs() / target[i].abs().max(1e-300))
                .fold(0.0, f64::max);
            if rel < 1e-12 {
                polished = true;
                break;
            }
            let hess = (0..free_dims)
                .map(|i| (0..free_dims).map(|j| cov[i][j]).collect())
                .collect();
            let Some(step) = solve(hess, grad) else { break };
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let trial: Vec<f64> = free.iter().zip(&step).map(|(f, d)| f - scale * d).collect();
                let value = objective(&trial);
                evals += 1;
                if value.is_finite() && value <= current {
                    free = trial;
                    current = value;
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if !accepted {
                // No further descent in floating point; accept if already stationary.
                polished = rel < 1e-8;
                break;
            }
        }
    }

    let theta = theta_of(&free);
    let params_hat = Params::new(
        n1,
        n2,
        logistic(theta[0]),
        logistic(theta[1]),
        theta[2].exp(),
    )?;
    let converged = nm.converged || polished;
    let mut warnings = Vec::new();
    if !converged {
        warnings.push(format!(
            "simplex stopped after {} evaluations without meeting the diameter tolerance; reporting best point",
            nm.evals
        ));
    }
    Ok(FitResult {
        params_hat,
        log_lik: Some(surface.log_lik(&theta)),
        converged,
        method: FitMethod::MleFixedN,
        n_evaluations: evals,
        free_parameters: free_dims,
        model_moments: finish(params_hat)?,
        sample_moments: Some(data.sample_moments()),
        profile: Vec::new(),
        warnings,
    })
}

/// Maximum likelihood with integer trial counts profiled over `[n_min, n_max]`
/// (`n1 = n2 = n` when `equal_n`, else the full grid). Ties go to smaller `n`.
pub fn fit_mle_profile_n(
    data: &SampleData,
    n_min: u32,
    n_max: u32,
    equal_n: bool,
    opts: &MleOptions,
) -> Result<FitResult> {
    let observed = data.max_x().max(data.max_y());
    if n_min < observed.max(1) {
        return Err(Error::Config(format!(
            "n_min = {n_min} is below the largest observed count {observed}"
        )));
    }
    if n_max < n_min {
        return Err(Error::Config(format!("n_max = {n_max} < n_min = {n_min}")));
    }
    let grid: Vec<(u32, u32)> = if equal_n {
        (n_min..=n_max).map(|n| (n, n)).collect()
    } else {
        (n_min..=n_max)
            .flat_map(|a| (n_min..=n_max).map(move |b| (a, b)))
            .collect()
    };
    let fits: Vec<Result<FitResult>> = grid
        .par_iter()
        .map(|&(n1, n2)| fit_mle(data, n1, n2, opts))
        .collect();

    let mut best: Option<(usize, f64)> = None;
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by_key(|&i| (grid[i].0 + grid[i].1, grid[i].0));
    for &i in &order {
        if let Ok(fit) = &fits[i] {
            let ll = fit.log_lik.unwrap_or(f64::NEG_INFINITY);
            if best.is_none_or(|(_, b)| ll > b) {
                best = Some((i, ll));
            }
        }
    }
    let profile = grid
        .iter()
        .zip(&fits)
        .map(|(&(n1, n2), fit)| ProfilePoint {
            n1,
            n2,
            log_lik: fit.as_ref().ok().and_then(|f| f.log_lik),
            converged: fit.as_ref().is_ok_and(|f| f.converged),
        })
        .collect();
    let Some((i, _)) = best else {
        let first = fits.into_iter().find_map(|f| f.err());
        return Err(Error::AllFitsFailed(
            first.map_or_else(|| "empty grid".to_string(), |e| e.to_string()),
        ));
    };
    let mut fit = fits.into_iter().nth(i).expect("index in range")?;
    fit.method = FitMethod::MleProfiledN;
    fit.free_parameters += if equal_n { 1 } else { 2 };
    fit.profile = profile;
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::build_table;

    fn params(n1: u32, n2: u32, p1: f64, p2: f64, t: f64) -> Params {
        Params::new(n1, n2, p1, p2, t).unwrap()
    }

    #[test]
    fn proportions_round_trip() {
        let truth = params(5, 5, 0.3, 0.6, 0.7);
        let freq = CellFrequencies::from_table(&build_table(&truth).unwrap());
        let fit = estimate_from_proportions(&freq, 5, 5).unwrap();
        assert!((fit.params_hat.p1() - 0.3).abs() < 1e-12);
        assert!((fit.params_hat.p2() - 0.6).abs() < 1e-12);
        assert!((fit.params_hat.t() - 0.7).abs() < 1e-12);
        assert!(fit.warnings.is_empty());
    }

    #[test]
    fn proportions_independent_case() {
        let freq = CellFrequencies::from_table(&build_table(&params(4, 4, 0.5, 0.5, 1.0)).unwrap());
        let fit = estimate_from_proportions(&freq, 4, 4).unwrap();
        assert!((fit.params_hat.t() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn proportions_zero_cell() {
        let freq = CellFrequencies {
            f00: 0.2,
            f01: 0.1,
            f10: 0.1,
            f11: 0.0,
        };
        assert_eq!(
            estimate_from_proportions(&freq, 3, 3),
            Err(Error::ZeroFrequency { x: 1, y: 1 })
        );
    }

    #[test]
    fn single_observation_likelihood_is_log_pmf() {
        let p = params(6, 4, 0.35, 0.55, 0.6);
        let d = SampleData::from_pairs(vec![(2, 3)]).unwrap();
        let ll = log_likelihood(&p, &d).unwrap();
        assert!((ll - crate::dist::log_pmf(&p, 2, 3)).abs() < 1e-12);
    }

    #[test]
    fn duplicated_data_scales_likelihood() {
        let p = params(6, 4, 0.35, 0.55, 0.6);
        let base = vec![(2, 3), (0, 1), (6, 0), (3, 3)];
        let once = log_likelihood(&p, &SampleData::from_pairs(base.clone()).unwrap()).unwrap();
        let thrice: Vec<_> = base.iter().cycle().take(12).copied().collect();
        let three = log_likelihood(&p, &SampleData::from_pairs(thrice).unwrap()).unwrap();
        assert!((three - 3.0 * once).abs() < 1e-10);
    }

    #[test]
    fn likelihood_factorizes_at_independence() {
        let p = params(5, 3, 0.4, 0.2, 1.0);
        let pairs = vec![(1, 0), (4, 2), (0, 3), (2, 1)];
        let d = SampleData::from_pairs(pairs.clone()).unwrap();
        let bx = crate::dist::Binomial { n: 5, p: 0.4 }.pmf();
        let by = crate::dist::Binomial { n: 3, p: 0.2 }.pmf();
        let expect: f64 = pairs
            .iter()
            .map(|&(x, y)| bx[x as usize].ln() + by[y as usize].ln())
            .sum();
        assert!((log_likelihood(&p, &d).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn likelihood_support_error() {
        let p = params(2, 2, 0.5, 0.5, 0.5);
        let d = SampleData::from_pairs(vec![(0, 0), (3, 1)]).unwrap();
        assert!(matches!(
            log_likelihood(&p, &d),
            Err(Error::DataOutOfSupport { index: 1, .. })
        ));
    }

    #[test]
    fn population_pseudo_sample_recovers_truth() {
        let truth = params(10, 10, 0.5, 0.9, 0.8);
        let data = SampleData::expected_from_table(&build_table(&truth).unwrap(), 1000.0).unwrap();
        let fit = fit_mle(&data, 10, 10, &MleOptions::default()).unwrap();
        assert!(fit.converged);
        assert!((fit.params_hat.p1() - 0.5).abs() < 1e-6);
        assert!((fit.params_hat.p2() - 0.9).abs() < 1e-6);
        assert!((fit.params_hat.t() - 0.8).abs() < 1e-6);
    }

    #[test]
    fn degenerate_data_is_diagnosed() {
        let d = SampleData::from_pairs(vec![(0, 1), (0, 2), (0, 0)]).unwrap();
        assert!(matches!(
            fit_mle(&d, 3, 3, &MleOptions::default()),
            Err(Error::Boundary(_))
        ));
        let d = SampleData::from_pairs(vec![(1, 1), (2, 0)]).unwrap();
        assert!(matches!(
            fit_mle(&d, 3, 3, &MleOptions::default()),
            Err(Error::InsufficientData(_))
        ));
        let d = SampleData::from_pairs(vec![(1, 1), (2, 0), (3, 3)]).unwrap();
        assert!(fit_mle(&d, 3, 3, &MleOptions::default()).is_ok());
    }

    #[test]
    fn fixed_t_fits_binomial_means() {
        let data = SampleData::from_pairs(vec![(1, 2), (3, 0), (2, 2), (0, 1), (4, 1)]).unwrap();
        let opts = MleOptions {
            fixed_t: Some(1.0),
            ..MleOptions::default()
        };
        let fit = fit_mle(&data, 4, 3, &opts).unwrap();
        assert_eq!(fit.params_hat.t(), 1.0);
        assert_eq!(fit.free_parameters, 2);
        assert!((fit.params_hat.p1() - 10.0 / 20.0).abs() < 1e-9);
        assert!((fit.params_hat.p2() - 6.0 / 15.0).abs() < 1e-9);
    }

    #[test]
    fn single_point_profile_matches_fixed_fit() {
        let truth = params(6, 6, 0.4, 0.5, 0.7);
        let data = crate::sample::exact_sample(&truth, 400, 3).unwrap();
        let data = SampleData::from_pairs(data.pairs).unwrap();
        let fixed = fit_mle(&data, 6, 6, &MleOptions::default()).unwrap();
        let prof = fit_mle_profile_n(&data, 6, 6, true, &MleOptions::default()).unwrap();
        assert_eq!(prof.params_hat, fixed.params_hat);
        assert_eq!(prof.log_lik, fixed.log_lik);
        assert_eq!(prof.method, FitMethod::MleProfiledN);
        assert_eq!(prof.profile.len(), 1);
    }

    #[test]
    fn profile_rejects_bad_ranges() {
        let data = SampleData::from_pairs(vec![(1, 5), (2, 0), (3, 3)]).unwrap();
        assert!(fit_mle_profile_n(&data, 4, 10, true, &MleOptions::default()).is_err());
        assert!(fit_mle_profile_n(&data, 6, 5, true, &MleOptions::default()).is_err());
    }
}
