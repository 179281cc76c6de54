//! Evaluate the joint pmf, its conditionals and the lattice recurrences.

use bbcd::dist::{build_table, conditional_x_given_y, log_pmf, recurrence_step, Bbcd, Step};
use bbcd::Params;

fn main() -> bbcd::Result<()> {
    let params = Params::new(10, 10, 0.5, 0.9, 0.8)?;
    let model = Bbcd::new(params);

    println!(
        "ln S = {:.6}, ln K = {:.6}",
        model.log_s(),
        model.log_norm()
    );
    println!("P(5, 9) = {:.6e}", model.pmf(5, 9));
    println!(
        "P(11, 0) = {} (outside the support)",
        log_pmf(&params, 11, 0).exp()
    );

    let cond = conditional_x_given_y(&params, 9)?;
    println!(
        "X | Y=9 ~ Bin({}, {:.6}), mean {:.4}",
        cond.n,
        cond.p,
        cond.mean()
    );

    let next = recurrence_step(&params, Step::X, 6, 9, model.pmf(5, 9))?;
    println!(
        "P(6, 9) by recurrence {:.6e}, direct {:.6e}",
        next,
        model.pmf(6, 9)
    );

    let table = build_table(&params)?;
    println!("total mass {:.15}", table.total());
    let mode = table.iter().max_by(|a, b| a.2.total_cmp(&b.2)).unwrap();
    println!(
        "mode at ({}, {}) with probability {:.5}",
        mode.0, mode.1, mode.2
    );
    Ok(())
}
