//! The integral and biorthogonal forms of the correlation kernel agree.

use interlaced_dpp::kernels::{gaussian_spec, kernel_biorthogonal, kernel_generic};
use interlaced_dpp::{ClassTag, MatrixClass};

fn main() -> interlaced_dpp::Result<()> {
    for tag in ClassTag::ALL {
        let class = MatrixClass::new(tag, 2)?;
        let spec = gaussian_spec(class)?;
        let (y, z) = if tag.is_half_line() { (0.4, 1.1) } else { (-0.4, 0.7) };
        let mut worst = 0.0f64;
        for r in 1..=class.level_count() {
            for s in 1..=class.level_count() {
                let a = kernel_generic(&spec, (r, y), (s, z))?;
                let b = kernel_biorthogonal(&spec, (r, y), (s, z))?;
                worst = worst.max((a - b).abs());
            }
        }
        println!("{class}: max difference over level pairs {worst:.2e}");
    }
    Ok(())
}
