//! Fit (p1, p2, t) at known trial counts, then profile the trial count.

use bbcd::infer::{estimate_from_sample, fit_mle, fit_mle_profile_n, MleOptions, SampleData};
use bbcd::sample::{gibbs_sample, GibbsConfig};
use bbcd::Params;

fn main() -> bbcd::Result<()> {
    let truth = Params::symmetric_n(10, 0.5, 0.9, 0.8)?;
    let draws = gibbs_sample(&truth, &GibbsConfig::new(5000, 2024))?;
    let data = SampleData::from_pairs(draws.pairs)?;
    let opts = MleOptions::default();

    match estimate_from_sample(&data, 10, 10) {
        Ok(fit) => println!("proportions: {:?}", fit.params_hat),
        Err(e) => println!("proportions estimator unavailable: {e}"),
    }
    let fixed = fit_mle(&data, 10, 10, &opts)?;
    let p = fixed.params_hat;
    println!(
        "known n: p1={:.4} p2={:.4} t={:.4} log_lik={:.3}",
        p.p1(),
        p.p2(),
        p.t(),
        fixed.log_lik.unwrap()
    );

    let n_min = data.max_x().max(data.max_y());
    let profiled = fit_mle_profile_n(&data, n_min, 25, true, &opts)?;
    for point in &profiled.profile {
        println!(
            "n={:>2} log_lik={:.3}",
            point.n1,
            point.log_lik.unwrap_or(f64::NAN)
        );
    }
    let p = profiled.params_hat;
    println!(
        "n-hat={} p1={:.4} p2={:.4} t={:.4}",
        p.n1(),
        p.p1(),
        p.p2(),
        p.t()
    );
    println!(
        "correlation model {:.4} data {:.4}",
        profiled.model_moments.corr,
        profiled.sample_moments.unwrap().corr
    );
    Ok(())
}
