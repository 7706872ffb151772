//! Weight functions `psi` and their iterated tail integrals
//! `[psi]^{-i}(y) = int_y^inf (x - y)^{i-1} / (i-1)! psi(x) dx`.

use std::fmt;
use std::sync::Arc;

use statrs::function::erf::erfc;

use super::quadrature::{Domain, Integrator};
use crate::error::Result;

/// Coarse description of where a weight lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    WholeLine,
    PositiveHalfLine,
    UnitInterval,
    /// Compactly supported elsewhere.
    Bounded,
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A measurable function with finite moments.
#[derive(Clone)]
pub enum WeightFunction {
    /// `x^power e^{-beta x^2}`, on the whole line or restricted to `x > 0`.
    GaussianMonomial {
        power: u32,
        beta: f64,
        half_line: bool,
    },
    /// `x^power e^{-beta x}` on `x > 0`.
    Laguerre { power: f64, beta: f64 },
    /// `x^power (1 - x)^beta` on `0 < x < 1`.
    Jacobi { power: f64, beta: f64 },
    /// Indicator of `[lo, hi]`.
    Indicator { lo: f64, hi: f64 },
    /// Unit-mass Gaussian bump of standard deviation `width`, truncated at 12 widths.
    Bump { center: f64, width: f64 },
    /// Arbitrary evaluator with bounds of its support and known kinks.
    Custom {
        f: Evaluator,
        lo: f64,
        hi: f64,
        breakpoints: Vec<f64>,
    },
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunction::GaussianMonomial {
                power,
                beta,
                half_line,
            } => write!(
                f,
                "x^{power} exp(-{beta} x^2){}",
                if *half_line { " 1_(x>0)" } else { "" }
            ),
            WeightFunction::Laguerre { power, beta } => {
                write!(f, "x^{power} exp(-{beta} x) 1_(x>0)")
            }
            WeightFunction::Jacobi { power, beta } => {
                write!(f, "x^{power} (1-x)^{beta} 1_(0<x<1)")
            }
            WeightFunction::Indicator { lo, hi } => write!(f, "1_[{lo},{hi}]"),
            WeightFunction::Bump { center, width } => write!(f, "bump({center}, {width})"),
            WeightFunction::Custom { lo, hi, .. } => write!(f, "custom on [{lo},{hi}]"),
        }
    }
}

impl WeightFunction {
    /// The printed Gaussian family member `x^power e^{-x^2}` (restricted to `x > 0` if `half_line`).
    pub fn gaussian(power: u32, half_line: bool) -> Self {
        WeightFunction::GaussianMonomial {
            power,
            beta: 1.0,
            half_line,
        }
    }

    pub fn custom<F>(f: F, lo: f64, hi: f64, breakpoints: Vec<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        WeightFunction::Custom {
            f: Arc::new(f),
            lo,
            hi,
            breakpoints,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            WeightFunction::GaussianMonomial {
                power,
                beta,
                half_line,
            } => {
                if half_line && x <= 0.0 {
                    return 0.0;
                }
                if x == 0.0 {
                    return if power == 0 { 1.0 } else { 0.0 };
                }
                let g = (-beta * x * x).exp();
                if g == 0.0 {
                    0.0
                } else {
                    x.powi(power as i32) * g
                }
            }
            WeightFunction::Laguerre { power, beta } => {
                if x <= 0.0 {
                    0.0
                } else {
                    (power * x.ln() - beta * x).exp()
                }
            }
            WeightFunction::Jacobi { power, beta } => {
                if x <= 0.0 || x >= 1.0 {
                    0.0
                } else {
                    x.powf(power) * (1.0 - x).powf(beta)
                }
            }
            WeightFunction::Indicator { lo, hi } => {
                if (lo..=hi).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            WeightFunction::Bump { center, width } => {
                let z = (x - center) / width;
                if z.abs() > 12.0 {
                    0.0
                } else {
                    (-0.5 * z * z).exp() / (width * (2.0 * std::f64::consts::PI).sqrt())
                }
            }
            WeightFunction::Custom { ref f, lo, hi, .. } => {
                if x < lo || x > hi {
                    0.0
                } else {
                    f(x)
                }
            }
        }
    }

    pub fn support(&self) -> Support {
        match self {
            WeightFunction::GaussianMonomial { half_line: false, .. } => Support::WholeLine,
            WeightFunction::GaussianMonomial { half_line: true, .. }
            | WeightFunction::Laguerre { .. } => Support::PositiveHalfLine,
            WeightFunction::Jacobi { .. } => Support::UnitInterval,
            WeightFunction::Custom { lo, hi, .. } => match (lo.is_finite(), hi.is_finite()) {
                (false, false) => Support::WholeLine,
                (true, false) if *lo == 0.0 => Support::PositiveHalfLine,
                (true, true) if *lo == 0.0 && *hi == 1.0 => Support::UnitInterval,
                _ => Support::Bounded,
            },
            WeightFunction::Indicator { .. } | WeightFunction::Bump { .. } => Support::Bounded,
        }
    }

    /// Every member has finite moments of all orders.
    pub fn moments_finite(&self) -> bool {
        match *self {
            WeightFunction::GaussianMonomial { beta, .. } | WeightFunction::Laguerre { beta, .. } => {
                beta > 0.0
            }
            WeightFunction::Jacobi { power, beta } => power > -1.0 && beta > -1.0,
            _ => true,
        }
    }

    /// Whether the weight vanishes on the negative half-line.
    pub fn vanishes_on_negatives(&self) -> bool {
        let (lo, _) = self.bounds();
        lo >= 0.0
    }

    /// Closed interval outside which the weight is zero.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            WeightFunction::GaussianMonomial { half_line, .. } => {
                (if half_line { 0.0 } else { f64::NEG_INFINITY }, f64::INFINITY)
            }
            WeightFunction::Laguerre { .. } => (0.0, f64::INFINITY),
            WeightFunction::Jacobi { .. } => (0.0, 1.0),
            WeightFunction::Indicator { lo, hi } => (lo, hi),
            WeightFunction::Bump { center, width } => (center - 12.0 * width, center + 12.0 * width),
            WeightFunction::Custom { lo, hi, .. } => (lo, hi),
        }
    }

    /// Interior points worth splitting quadrature at.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            WeightFunction::Bump { center, width } => (-4..=4)
                .map(|k| center + f64::from(k) * 2.0 * width)
                .collect(),
            WeightFunction::Custom { breakpoints, .. } => breakpoints.clone(),
            _ => Vec::new(),
        }
    }

    /// `int f(x) psi(x) dx` over the support of `psi`.
    pub fn integrate_against<F: Fn(f64) -> f64>(&self, f: F, q: &Integrator) -> Result<f64> {
        let (lo, hi) = self.bounds();
        q.integrate(
            |x| f(x) * self.eval(x),
            Domain::between(lo, hi),
            &self.breakpoints(),
        )
    }

    /// As [`WeightFunction::integrate_against`] for a fallible `f`.
    pub fn try_integrate_against<F: Fn(f64) -> Result<f64>>(
        &self,
        f: F,
        q: &Integrator,
        extra_breakpoints: &[f64],
    ) -> Result<f64> {
        let (lo, hi) = self.bounds();
        let mut bps = self.breakpoints();
        bps.extend_from_slice(extra_breakpoints);
        q.try_integrate(|x| Ok(f(x)? * self.eval(x)), Domain::between(lo, hi), &bps)
    }

    /// `[psi]^{-i}(y)`; `i = 0` returns `psi(y)`.
    ///
    /// Gaussian monomials use the exact incomplete-moment recursion, all
    /// other weights adaptive quadrature at the integrator's tolerance.
    pub fn iterated_integral(&self, i: usize, y: f64, q: &Integrator) -> Result<f64> {
        if i == 0 {
            return Ok(self.eval(y));
        }
        if let WeightFunction::GaussianMonomial {
            power,
            beta,
            half_line,
        } = *self
        {
            return Ok(gaussian_iterated(power as usize, beta, half_line, i, y));
        }
        let (lo, hi) = self.bounds();
        let start = lo.max(y);
        if start >= hi {
            return Ok(0.0);
        }
        let norm = factorial(i - 1);
        let mut bps = self.breakpoints();
        bps.push(y);
        q.integrate(
            |x| (x - y).powi(i as i32 - 1) / norm * self.eval(x),
            Domain::between(start, hi),
            &bps,
        )
    }
}

/// `[psi]^{-i}(y)` with the default tolerance.
pub fn iterated_integral(psi: &WeightFunction, i: usize, y: f64) -> Result<f64> {
    psi.iterated_integral(i, y, &Integrator::default())
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

/// `J_q(v) = int_v^inf u^q e^{-u^2} du` for `q = 0..=max`.
fn gaussian_tail_moments(max: usize, v: f64) -> Vec<f64> {
    let e = (-v * v).exp();
    let mut out = Vec::with_capacity(max + 1);
    out.push(0.5 * std::f64::consts::PI.sqrt() * erfc(v));
    if max >= 1 {
        out.push(0.5 * e);
    }
    for q in 2..=max {
        let next = 0.5 * ((q as f64 - 1.0) * out[q - 2] + v.powi(q as i32 - 1) * e);
        out.push(next);
    }
    out
}

fn gaussian_iterated(power: usize, beta: f64, half_line: bool, i: usize, y: f64) -> f64 {
    let lower = if half_line { y.max(0.0) } else { y };
    let s = beta.sqrt();
    let tails = gaussian_tail_moments(power + i - 1, s * lower);
    // (x - y)^{i-1} = sum_j C(i-1, j) x^j (-y)^{i-1-j}
    let mut binom = 1.0;
    let mut acc = 0.0;
    for j in 0..i {
        if j > 0 {
            binom *= (i - j) as f64 / j as f64;
        }
        let q = j + power;
        let moment = tails[q] / s.powi(q as i32 + 1);
        acc += binom * (-y).powi((i - 1 - j) as i32) * moment;
    }
    acc / factorial(i - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn order_zero_is_pointwise() {
        let psi = WeightFunction::gaussian(2, false);
        assert_eq!(iterated_integral(&psi, 0, 0.3).unwrap(), psi.eval(0.3));
    }

    #[test]
    fn unit_indicator() {
        let psi = WeightFunction::Indicator { lo: 0.0, hi: 1.0 };
        assert!((iterated_integral(&psi, 1, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((iterated_integral(&psi, 2, 0.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn half_gaussian() {
        let psi = WeightFunction::gaussian(0, false);
        let v = iterated_integral(&psi, 1, 0.0).unwrap();
        assert!((v - PI.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let q = Integrator::default();
        for half_line in [false, true] {
            for power in 0..6u32 {
                let closed = WeightFunction::gaussian(power, half_line);
                let generic = WeightFunction::custom(
                    move |x| x.powi(power as i32) * (-x * x).exp(),
                    if half_line { 0.0 } else { f64::NEG_INFINITY },
                    f64::INFINITY,
                    vec![],
                );
                for i in 1..5 {
                    for y in [-2.5, -0.3, 0.0, 0.8, 2.0] {
                        let a = closed.iterated_integral(i, y, &q).unwrap();
                        let b = generic.iterated_integral(i, y, &q).unwrap();
                        assert!(
                            (a - b).abs() <= 1e-9 * (1.0 + b.abs()),
                            "p={power} half={half_line} i={i} y={y}: {a} vs {b}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn scaled_gaussian_beta() {
        let psi = WeightFunction::GaussianMonomial {
            power: 1,
            beta: 2.0,
            half_line: false,
        };
        // int_y^inf x e^{-2x^2} dx = e^{-2y^2}/4
        let v = iterated_integral(&psi, 1, 0.5).unwrap();
        assert!((v - (-0.5f64).exp() / 4.0).abs() < 1e-14);
    }

    #[test]
    fn supports() {
        assert!(WeightFunction::gaussian(1, true).vanishes_on_negatives());
        assert!(!WeightFunction::gaussian(1, false).vanishes_on_negatives());
        assert_eq!(
            WeightFunction::Laguerre { power: 1.0, beta: 1.0 }.support(),
            Support::PositiveHalfLine
        );
        assert_eq!(
            WeightFunction::Jacobi { power: 1.0, beta: 2.0 }.support(),
            Support::UnitInterval
        );
    }
}
