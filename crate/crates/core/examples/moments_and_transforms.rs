//! Moments, factorial moments, generating functions and derived quantities.

use bbcd::dist::{
    conditional_given_sum, factorial_moment, max_pmf, mgf, moments, pgf, prob_x_less_y,
    stochastic_order, Bbcd,
};
use bbcd::Params;

fn main() -> bbcd::Result<()> {
    for t in [0.5, 1.0, 1.5] {
        let params = Params::new(8, 12, 0.4, 0.3, t)?;
        let m = moments(&params)?;
        println!(
            "t={t}: E[X]={:.4} E[Y]={:.4} cov={:+.4} corr={:+.4}",
            m.mean_x, m.mean_y, m.cov, m.corr
        );
    }

    let params = Params::new(8, 12, 0.4, 0.3, 0.7)?;
    let model = Bbcd::new(params);
    println!(
        "E[X] two ways: {:.10} {:.10}",
        model.mean_x_shifted(),
        model.mean_x_weighted()
    );
    println!("E[X(X-1) Y] = {:.6}", factorial_moment(&params, 2, 1)?);
    println!(
        "pgf(0.5, 0.5) = {:.6}, mgf(0.1, -0.1) = {:.6}",
        pgf(&params, 0.5, 0.5)?,
        mgf(&params, 0.1, -0.1)?
    );
    println!("P(X < Y) = {:.6}", prob_x_less_y(&params)?);
    println!("order: {:?}", stochastic_order(&params));

    let cond = conditional_given_sum(&params, 6)?;
    let mean: f64 = (cond.x_min..=cond.x_max())
        .map(|x| x as f64 * cond.get(x))
        .sum();
    println!("E[X | X+Y=6] = {mean:.4}");

    let max = max_pmf(&params)?;
    println!("P(max(X,Y) <= 5) = {:.6}", max[..=5].iter().sum::<f64>());
    Ok(())
}
