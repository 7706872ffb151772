//! Hermite polynomials orthonormal for the weight `e^{-x^2}`.
//!
//! `h_0 = pi^{-1/4}`, `h_1 = sqrt(2) x h_0` and
//! `h_{i+1} = sqrt(2/(i+1)) x h_i - sqrt(i/(i+1)) h_{i-1}`.

use super::polynomial::Polynomial;

fn h0() -> f64 {
    std::f64::consts::PI.powf(-0.25)
}

/// Value of `h_i(x)` by the three-term recurrence.
pub fn hermite_normalized(i: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = h0();
    for k in 0..i {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Values `h_0(x), ..., h_max(x)`.
pub fn hermite_normalized_all(max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut prev = 0.0;
    let mut cur = h0();
    out.push(cur);
    for k in 0..max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Monomial coefficients of `h_i`, from the same recurrence.
pub fn hermite_polynomial(i: usize) -> Polynomial {
    let x = Polynomial::monomial(1, 1.0);
    let mut prev = Polynomial::zero();
    let mut cur = Polynomial::constant(h0());
    for k in 0..i {
        let kf = k as f64;
        let next = &(&x * &cur).scale((2.0 / (kf + 1.0)).sqrt())
            + &prev.scale(-(kf / (kf + 1.0)).sqrt());
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{integrate, Domain};

    #[test]
    fn h0_is_constant() {
        for x in [-3.0, 0.0, 0.7, 5.0] {
            assert!((hermite_normalized(0, x) - std::f64::consts::PI.powf(-0.25)).abs() < 1e-15);
        }
    }

    #[test]
    fn recurrence_matches_coefficients() {
        for i in 0..=10 {
            let p = hermite_polynomial(i);
            assert_eq!(p.degree(), Some(i));
            assert!(p.leading_coefficient() != 0.0);
            for x in [-1.3, 0.0, 0.4, 2.2] {
                let a = hermite_normalized(i, x);
                let b = p.eval(x);
                assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "i={i} x={x}");
            }
        }
    }

    #[test]
    fn orthonormal_up_to_ten() {
        for i in 0..=10 {
            for j in 0..=i {
                let v = integrate(
                    |x| hermite_normalized(i, x) * hermite_normalized(j, x) * (-x * x).exp(),
                    Domain::WholeLine,
                )
                .unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() <= 1e-10, "i={i} j={j} got {v}");
            }
        }
    }
}
