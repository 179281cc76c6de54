//! Draw with the Gibbs sampler and compare against exact sampling.

use bbcd::dist::build_table;
use bbcd::sample::{exact_sample, gibbs_sample, GibbsConfig};
use bbcd::Params;

fn main() -> bbcd::Result<()> {
    let params = Params::symmetric_n(25, 0.1, 0.2, 0.1)?;
    let table = build_table(&params)?;

    let config = GibbsConfig::new(100_000, 42).burn_in(1000).thin(2);
    let gibbs = gibbs_sample(&params, &config)?;
    let exact = exact_sample(&params, 100_000, 42)?;
    println!(
        "Gibbs TV {:.4}, exact TV {:.4}",
        gibbs.tv_distance(&table),
        exact.tv_distance(&table)
    );

    println!("first draws: {:?}", &gibbs.pairs[..5]);
    println!("{:?}", gibbs.config_used);
    Ok(())
}
