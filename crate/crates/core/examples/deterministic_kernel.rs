//! Kernel of the minor process of a fixed orbit: a continuous part below the
//! top level plus atoms at the fixed radial values.

use interlaced_dpp::kernels::{kernel_deterministic, KernelSpec};
use interlaced_dpp::MatrixClass;

fn main() -> interlaced_dpp::Result<()> {
    let spec = KernelSpec::deterministic(MatrixClass::a(3), &[1.5, 0.2, -1.0])?;
    for y in [-0.8, 0.0, 0.9] {
        let v = kernel_deterministic(&spec, (1, y), (1, y))?;
        println!("R((1,{y}),(1,{y})) = {:.5}", v.continuous);
    }
    let top = kernel_deterministic(&spec, (3, 0.0), (2, 0.3))?;
    println!("top-level atoms: {:?}", top.atoms);
    Ok(())
}
