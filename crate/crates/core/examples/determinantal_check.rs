//! Monte Carlo correlations of GUE minors against kernel determinants.

use interlaced_dpp::numerics::quadrature::Integrator;
use interlaced_dpp::verify::{compare, default_queries};
use interlaced_dpp::MatrixClass;

fn main() -> interlaced_dpp::Result<()> {
    let class = MatrixClass::a(2);
    let queries = default_queries(class)?;
    let report = compare(class, 200_000, 7, &queries, &Integrator::default())?;
    for r in report.results.iter().take(8) {
        println!(
            "k={} estimate {:.5} +- {:.5}  predicted {:.5}  z {:+.2}",
            r.query.order(),
            r.estimate,
            r.stderr,
            r.predicted,
            r.z
        );
    }
    println!(
        "{} queries, {:.1}% within 3 standard errors, passed: {}",
        report.results.len(),
        100.0 * report.fraction_within,
        report.passed
    );
    Ok(())
}
