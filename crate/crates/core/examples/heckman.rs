//! Scaled branching measures of U(3) approach the projected orbit law.

use interlaced_dpp::heckman::convergence_report;

fn main() -> interlaced_dpp::Result<()> {
    let ns = [5i64, 10, 20, 40];
    let lambdas: Vec<Vec<i64>> = ns.iter().map(|&n| vec![2 * n, n, 0]).collect();
    let eps: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
    let report = convergence_report(&lambdas, &eps, &[2.0, 1.0, 0.0], 50_000, 11)?;
    for row in &report.rows {
        println!("lambda {:?}: W1 {:.4} +- {:.4} ({} atoms)", row.lambda, row.distance, row.stderr, row.atoms);
    }
    println!("monotone within 3 standard errors: {}", report.is_monotone_within(3.0));
    Ok(())
}
