//! The Vandermonde-type products attached to each class and their exact
//! partial derivatives.
//!
//! * A: `prod_{i<j} (x_i - x_j)`
//! * B, C: `prod_i x_i * prod_{i<j} (x_i^2 - x_j^2)`
//! * D: `prod_{i<j} (x_i^2 - x_j^2)`

use super::polynomial::Polynomial;
use crate::class::ClassTag;
use crate::error::{Error, Result};

pub fn delta(tag: ClassTag, x: &[f64]) -> f64 {
    let n = x.len();
    let mut p = 1.0;
    for i in 0..n {
        for j in (i + 1)..n {
            p *= match tag {
                ClassTag::A => x[i] - x[j],
                _ => x[i] * x[i] - x[j] * x[j],
            };
        }
    }
    if matches!(tag, ClassTag::B | ClassTag::C) {
        p *= x.iter().product::<f64>();
    }
    p
}

/// `delta(tag, x)` as a polynomial in the slot `k` (0-based), all other
/// coordinates frozen at their values in `x`.
pub fn delta_in_slot(tag: ClassTag, k: usize, x: &[f64]) -> Polynomial {
    let n = x.len();
    let mut constant = 1.0;
    let mut poly = Polynomial::constant(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if i != k && j != k {
                constant *= match tag {
                    ClassTag::A => x[i] - x[j],
                    _ => x[i] * x[i] - x[j] * x[j],
                };
                continue;
            }
            let other = if i == k { x[j] } else { x[i] };
            // factor is (t - other) or (other - t), or their squared versions
            let sign = if i == k { 1.0 } else { -1.0 };
            let factor = match tag {
                ClassTag::A => Polynomial::new(vec![-sign * other, sign]),
                _ => Polynomial::new(vec![-sign * other * other, 0.0, sign]),
            };
            poly = &poly * &factor;
        }
    }
    if matches!(tag, ClassTag::B | ClassTag::C) {
        constant *= x
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, v)| v)
            .product::<f64>();
        poly = &poly * &Polynomial::monomial(1, 1.0);
    }
    poly.scale(constant)
}

/// `d^order delta / d x_k^order` at `x`, with `k` 1-based.
///
/// Computed by exact expansion in the slot variable, never by finite
/// differences.
pub fn delta_partial(tag: ClassTag, k: usize, order: usize, x: &[f64]) -> Result<f64> {
    if k == 0 || k > x.len() {
        return Err(Error::Domain(format!(
            "slot {k} out of range 1..={}",
            x.len()
        )));
    }
    if order == 0 {
        return Ok(delta(tag, x));
    }
    Ok(delta_in_slot(tag, k - 1, x).eval_derivative(order, x[k - 1]))
}
