//! Convergence towards the bivariate Poisson-conditionals limit.

use bbcd::dist::{PoissonLimit, PoissonLimitParams};

fn main() -> bbcd::Result<()> {
    for t in [0.5, 0.95] {
        let limit = PoissonLimit::auto(PoissonLimitParams::new(1.7, 2.0, t)?)?;
        print!("t={t} (truncation {}):", limit.truncation());
        for n in [10, 20, 40, 80, 160] {
            print!(" n={n} TV={:.5}", limit.tv_distance(n)?);
        }
        println!();
    }
    Ok(())
}
