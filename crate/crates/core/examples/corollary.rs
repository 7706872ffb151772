//! Reconciles the infinite-rank class B kernel with the finite-rank one.

use interlaced_dpp::kernels::{corollary_reconciliation, kernel_corollary, CorollaryConvention};

fn main() -> interlaced_dpp::Result<()> {
    let report = corollary_reconciliation(3, 4, &[0.1, 0.5, 1.0, 1.6])?;
    println!("{}", report.summary());
    for y in [0.2f64, 0.8, 1.4] {
        let exact = 2.0 / std::f64::consts::PI.sqrt() * (-y * y).exp();
        let printed = kernel_corollary(CorollaryConvention::Printed, (1, y), (1, y))?;
        let reconciled = kernel_corollary(CorollaryConvention::Reconciled, (1, y), (1, y))?;
        println!("y={y}: density {exact:.6}, printed {printed:.6}, reconciled {reconciled:.6}");
    }
    Ok(())
}
