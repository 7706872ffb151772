//! The indicator chain reproduces the class B kernel through the Eynard-Mehta formula.

use interlaced_dpp::eynard_mehta::{em_check, ChainSpec};
use interlaced_dpp::kernels::{gaussian_spec, BiorthogonalKernel};
use interlaced_dpp::MatrixClass;

fn main() -> interlaced_dpp::Result<()> {
    for n in 1..=3 {
        let chain = ChainSpec::indicator_gaussian(n)?;
        let reference = BiorthogonalKernel(gaussian_spec(MatrixClass::b(n))?);
        let c = em_check(&chain, &reference, &[0.1, 0.5, 1.0, 1.7])?;
        println!(
            "n={n}: kernel diff {:.1e}, trace diff {:.1e}, Gram condition {:.1}",
            c.max_kernel_diff, c.max_trace_diff, c.condition
        );
    }
    Ok(())
}
