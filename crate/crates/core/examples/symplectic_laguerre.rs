//! Sums of quaternionic rank-one terms: for one summand of size one, the
//! positive eigenvalue is Gamma(2, 1).

use interlaced_dpp::ensembles::sample_sum_c;
use interlaced_dpp::rng::stream_rng;
use interlaced_dpp::stats::{gamma2_cdf, ks_one_sample, mean_and_stderr};

fn main() -> interlaced_dpp::Result<()> {
    let mut rng = stream_rng(3, 0);
    let draws = (0..50_000)
        .map(|_| sample_sum_c(1, 1, &mut rng).map(|(_, e)| e[0]))
        .collect::<interlaced_dpp::Result<Vec<f64>>>()?;
    let (mean, se) = mean_and_stderr(&draws);
    println!("mean {mean:.4} +- {se:.4} (Gamma(2,1) mean 2)");
    println!("KS p-value against Gamma(2,1): {:.3}", ks_one_sample(&draws, gamma2_cdf).p_value);
    let (m, eig) = sample_sum_c(3, 4, &mut rng)?;
    m.validate(1e-10)?;
    println!("n=3, k=4 positive eigenvalues: {eig:.4?}");
    Ok(())
}
