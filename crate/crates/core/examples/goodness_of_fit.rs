//! Chi-square goodness of fit for the full model and the independence model.

use bbcd::infer::{chi_square_gof, fit_mle, MleOptions, SampleData};
use bbcd::sample::exact_sample;
use bbcd::Params;

fn main() -> bbcd::Result<()> {
    let truth = Params::symmetric_n(25, 0.1, 0.2, 0.1)?;
    let data = SampleData::from_pairs(exact_sample(&truth, 10_000, 7)?.pairs)?;

    let full = fit_mle(&data, 25, 25, &MleOptions::default())?;
    let independent = fit_mle(
        &data,
        25,
        25,
        &MleOptions {
            fixed_t: Some(1.0),
            ..MleOptions::default()
        },
    )?;
    for (name, fit) in [("dependent", &full), ("independent", &independent)] {
        let gof = chi_square_gof(&data, fit, fit.free_parameters)?;
        println!(
            "{name:>11}: t={:.4} chi2={:.2} on {} dof over {} groups, p={:.3e}",
            fit.params_hat.t(),
            gof.statistic,
            gof.dof,
            gof.pooled_cells.len(),
            gof.p_value
        );
    }
    Ok(())
}
