//! Minor processes of a fixed orbit are uniform on the Gelfand-Tsetlin cone.

use interlaced_dpp::ensembles::sample_fixed_orbit;
use interlaced_dpp::gc_cones::{pattern_from_minors, sample_uniform};
use interlaced_dpp::minors::minor_sequence;
use interlaced_dpp::rng::stream_rng;
use interlaced_dpp::stats::ks_two_sample;
use interlaced_dpp::MatrixClass;

fn main() -> interlaced_dpp::Result<()> {
    let class = MatrixClass::b(2);
    let lambda = [1.8, 0.6];
    let count = 5000;
    let mut matrix = Vec::with_capacity(count);
    let mut gibbs = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let h = sample_fixed_orbit(class, &lambda, &mut stream_rng(1, i))?;
        matrix.push(pattern_from_minors(&minor_sequence(&h)?)?.coordinates());
        gibbs.push(sample_uniform(class, &lambda, 60, &mut stream_rng(2, i))?.coordinates());
    }
    for d in 0..matrix[0].len() - lambda.len() {
        let a: Vec<f64> = matrix.iter().map(|v| v[d]).collect();
        let b: Vec<f64> = gibbs.iter().map(|v| v[d]).collect();
        println!("coordinate {d}: KS p-value {:.3}", ks_two_sample(&a, &b).p_value);
    }
    Ok(())
}
