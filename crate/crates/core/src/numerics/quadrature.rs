//! Globally adaptive Gauss–Kronrod quadrature.
//!
//! Every integral in the crate goes through [`Integrator::integrate`]. The
//! integration domain is split at the caller's breakpoints (kinks, jumps,
//! support edges); infinite pieces are mapped onto `[0, 1)` with
//! `x = a + t / (1 - t)` and then bisected together with the finite pieces,
//! always refining the sub-interval with the largest error estimate.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// `[a, b]`.
    Finite(f64, f64),
    /// `[a, +inf)`.
    UpperHalf(f64),
    /// `(-inf, b]`.
    LowerHalf(f64),
    /// The whole real line.
    WholeLine,
}

impl Domain {
    fn lower(&self) -> f64 {
        match *self {
            Domain::Finite(a, _) | Domain::UpperHalf(a) => a,
            Domain::LowerHalf(_) | Domain::WholeLine => f64::NEG_INFINITY,
        }
    }

    fn upper(&self) -> f64 {
        match *self {
            Domain::Finite(_, b) | Domain::LowerHalf(b) => b,
            Domain::UpperHalf(_) | Domain::WholeLine => f64::INFINITY,
        }
    }

    /// Domain `[lo, hi]` with either end possibly infinite.
    pub fn between(lo: f64, hi: f64) -> Domain {
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => Domain::Finite(lo, hi),
            (true, false) => Domain::UpperHalf(lo),
            (false, true) => Domain::LowerHalf(hi),
            (false, false) => Domain::WholeLine,
        }
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_284,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// How one piece of the split domain maps onto its integration variable.
#[derive(Debug, Clone, Copy)]
enum Piece {
    Finite,
    /// `x = origin + t / (1 - t)`, `t in [0, 1)`.
    Up(f64),
    /// `x = origin - t / (1 - t)`, `t in [0, 1)`.
    Down(f64),
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    piece: Piece,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive quadrature with a relative and an absolute target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrator {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_segments: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-13,
            max_segments: 4000,
        }
    }
}

impl Integrator {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    /// Integrates `f` over `domain`, splitting at every breakpoint strictly inside it.
    pub fn integrate<F>(&self, f: F, domain: Domain, breakpoints: &[f64]) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let lo = domain.lower();
        let hi = domain.upper();
        if lo.is_finite() && hi.is_finite() && lo >= hi {
            return Ok(if lo == hi {
                0.0
            } else {
                -self.integrate(f, Domain::Finite(hi, lo), breakpoints)?
            });
        }

        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&p| p.is_finite() && p > lo && p < hi)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        if cuts.is_empty() && !lo.is_finite() && !hi.is_finite() {
            cuts.push(0.0);
        }

        let mut nodes = Vec::with_capacity(cuts.len() + 2);
        nodes.push(lo);
        nodes.extend(cuts);
        nodes.push(hi);

        let mut evaluations = 0usize;
        let mut heap = BinaryHeap::new();
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (piece, ta, tb) = if !a.is_finite() {
                (Piece::Down(b), 0.0, 1.0)
            } else if !b.is_finite() {
                (Piece::Up(a), 0.0, 1.0)
            } else {
                (Piece::Finite, a, b)
            };
            let (value, error, magnitude) = rule(&f, piece, ta, tb)?;
            evaluations += 21;
            heap.push(Segment {
                piece,
                a: ta,
                b: tb,
                value,
                error,
                magnitude,
            });
        }

        let mut total: f64 = heap.iter().map(|s| s.value).sum();
        let mut err: f64 = heap.iter().map(|s| s.error).sum();
        let mut magnitude: f64 = heap.iter().map(|s| s.magnitude).sum();
        loop {
            // below 100 eps int |f| cancellation dominates the estimate
            let floor = 100.0 * f64::EPSILON * magnitude;
            let target = self.abs_tol.max(self.rel_tol * total.abs()).max(floor);
            if err <= target {
                // resum to shed drift from the running totals
                total = heap.iter().map(|s| s.value).sum();
                err = heap.iter().map(|s| s.error).sum();
                magnitude = heap.iter().map(|s| s.magnitude).sum();
                let floor = 100.0 * f64::EPSILON * magnitude;
                if err <= self.abs_tol.max(self.rel_tol * total.abs()).max(floor) {
                    return Ok(total);
                }
            }
            if heap.len() >= self.max_segments {
                return Err(Error::NoConvergence {
                    estimate: total,
                    error: err,
                    evaluations,
                });
            }
            let worst = heap.pop().expect("non-empty");
            total -= worst.value;
            err -= worst.error;
            magnitude -= worst.magnitude;
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // cannot bisect further in floating point; accept as is
                total += worst.value;
                magnitude += worst.magnitude;
                heap.push(Segment { error: 0.0, ..worst });
                continue;
            }
            for (a, b) in [(worst.a, mid), (mid, worst.b)] {
                let (value, error, mag) = rule(&f, worst.piece, a, b)?;
                evaluations += 21;
                total += value;
                err += error;
                magnitude += mag;
                heap.push(Segment {
                    piece: worst.piece,
                    a,
                    b,
                    value,
                    error,
                    magnitude: mag,
                });
            }
        }
    }

    /// As [`Integrator::integrate`] for a fallible integrand; the first error
    /// raised by `f` is returned.
    pub fn try_integrate<F>(&self, f: F, domain: Domain, breakpoints: &[f64]) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let failure = std::cell::RefCell::new(None);
        let value = self.integrate(
            |x| match f(x) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            },
            domain,
            breakpoints,
        );
        match failure.into_inner() {
            Some(e) => Err(e),
            None => value,
        }
    }

    /// Convenience wrapper for `[a, b]` without breakpoints.
    pub fn finite<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        self.integrate(f, Domain::Finite(a, b), &[])
    }
}

/// Integrates `f` over `domain` with the default tolerances (relative 1e-9).
pub fn integrate<F: Fn(f64) -> f64>(f: F, domain: Domain) -> Result<f64> {
    Integrator::default().integrate(f, domain, &[])
}

#[inline]
fn mapped<F: Fn(f64) -> f64>(f: &F, piece: Piece, t: f64) -> f64 {
    match piece {
        Piece::Finite => f(t),
        Piece::Up(o) => {
            let s = 1.0 - t;
            f(o + t / s) / (s * s)
        }
        Piece::Down(o) => {
            let s = 1.0 - t;
            f(o - t / s) / (s * s)
        }
    }
}

/// 21-point Kronrod rule with QUADPACK's error estimate.
fn rule<F: Fn(f64) -> f64>(f: &F, piece: Piece, a: f64, b: f64) -> Result<(f64, f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = mapped(f, piece, center);
    let mut resg = 0.0;
    let mut resk = WGK[10] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = mapped(f, piece, center - dx);
        let f2 = mapped(f, piece, center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    if !result.is_finite() {
        return Err(Error::NoConvergence {
            estimate: result,
            error: f64::INFINITY,
            evaluations: 21,
        });
    }
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((result, err, resabs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_over_line() {
        let v = integrate(|x| (-x * x).exp(), Domain::WholeLine).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn linear_on_unit_interval() {
        let v = integrate(|x| x, Domain::Finite(0.0, 1.0)).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gamma_four() {
        let v = integrate(|x| x.powi(3) * (-x).exp(), Domain::UpperHalf(0.0)).unwrap();
        assert!((v - 6.0).abs() < 1e-9);
    }

    #[test]
    fn lower_half_and_reversed_bounds() {
        let v = integrate(|x| x.exp(), Domain::LowerHalf(0.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        let w = integrate(|x| x, Domain::Finite(1.0, 0.0)).unwrap();
        assert!((w + 0.5).abs() < 1e-12);
    }

    #[test]
    fn breakpoints_handle_jumps() {
        let q = Integrator::default();
        let v = q
            .integrate(
                |x| if x < 0.3 { 1.0 } else { 0.0 },
                Domain::Finite(0.0, 1.0),
                &[0.3],
            )
            .unwrap();
        assert!((v - 0.3).abs() < 1e-14);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let q = Integrator {
            max_segments: 3,
            ..Integrator::default()
        };
        let err = q.finite(|x: f64| x.abs().sqrt().recip(), -1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { .. }));
    }
}
