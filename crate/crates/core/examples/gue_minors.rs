//! Eigenvalues of the main minors of one GUE matrix interlace.

use interlaced_dpp::ensembles::sample_gaussian;
use interlaced_dpp::gc_cones::{is_member, pattern_from_minors};
use interlaced_dpp::minors::{minor_sequence, to_point_configuration};
use interlaced_dpp::rng::stream_rng;
use interlaced_dpp::MatrixClass;

fn main() -> interlaced_dpp::Result<()> {
    let class = MatrixClass::a(4);
    let h = sample_gaussian(class, &mut stream_rng(2024, 0));
    let seq = minor_sequence(&h)?;
    for (order, part) in &seq.parts {
        let row: Vec<String> = part.values.iter().map(|v| format!("{v:+.4}")).collect();
        println!("minor {order}: {}", row.join("  "));
    }
    let cfg = to_point_configuration(&seq)?;
    println!("{} points on {} levels", cfg.len(), cfg.levels.len());
    println!("Gelfand-Tsetlin pattern: {}", is_member(&pattern_from_minors(&seq)?)?);
    Ok(())
}
