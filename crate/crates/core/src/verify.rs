//! Monte Carlo check that sampled configurations are determinantal with the
//! predicted kernel.
//!
//! For windows `W_1, ..., W_k` (disjoint when on the same level) the
//! factorial moment `E[prod N(W_i)]` equals `int_{W_1 x ... x W_k} det[R(p_i, p_j)]`.
//! The estimator is the sample mean of `prod N(W_i)`, unbiased for any window
//! width; the fraction of samples with more than one point in some window is
//! reported alongside.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::class::MatrixClass;
use crate::ensembles::sample_gaussian;
use crate::error::{Error, Result};
use crate::kernels::{gaussian_spec, BiorthogonalKernel, CorrelationKernel};
use crate::minors::{minor_sequence_unchecked, to_point_configuration, PointConfiguration};
use crate::numerics::quadrature::{Domain, Integrator};
use crate::rng::{chunks, stream_rng};

/// Default window width.
pub const DEFAULT_WIDTH: f64 = 0.2;
/// Windows are centred where the one-point density is at least this.
pub const MIN_DENSITY: f64 = 0.05;
/// Largest `k` accepted by [`predict_correlation`].
pub const MAX_ORDER: usize = 3;

/// `[center - width/2, center + width/2)` at `level`; no width means the whole line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub level: usize,
    pub center: f64,
    #[serde(default)]
    pub width: Option<f64>,
}

impl Window {
    pub fn centered(level: usize, center: f64, width: f64) -> Self {
        Self {
            level,
            center,
            width: Some(width),
        }
    }

    pub fn whole_line(level: usize) -> Self {
        Self {
            level,
            center: 0.0,
            width: None,
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        match self.width {
            Some(w) => (self.center - 0.5 * w, self.center + 0.5 * w),
            None => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn contains(&self, y: f64) -> bool {
        let (lo, hi) = self.bounds();
        y >= lo && y < hi
    }

    fn overlaps(&self, other: &Window) -> bool {
        let (a, b) = self.bounds();
        let (c, d) = other.bounds();
        a.max(c) < b.min(d)
    }
}

/// A `k`-point correlation query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationQuery {
    pub windows: Vec<Window>,
}

impl CorrelationQuery {
    pub fn new(windows: Vec<Window>) -> Result<Self> {
        let q = Self { windows };
        q.check()?;
        Ok(q)
    }

    pub fn order(&self) -> usize {
        self.windows.len()
    }

    /// Rejects empty queries, bad widths and overlapping same-level windows.
    pub fn check(&self) -> Result<()> {
        if self.windows.is_empty() {
            return Err(Error::config("queries", "a query needs at least one window"));
        }
        for (i, w) in self.windows.iter().enumerate() {
            if let Some(width) = w.width {
                if width.is_nan() || width < 0.0 || !width.is_finite() || !w.center.is_finite() {
                    return Err(Error::config("queries", format!("window {} has invalid center or width", i + 1)));
                }
            }
            for v in &self.windows[..i] {
                if v.level == w.level && v.overlaps(w) {
                    return Err(Error::config(
                        "queries",
                        format!("windows at level {} overlap", w.level),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Same as [`CorrelationQuery::check`] plus level bounds for `class`.
    pub fn check_for(&self, class: MatrixClass) -> Result<()> {
        self.check()?;
        for w in &self.windows {
            class
                .check_level(w.level)
                .map_err(|e| Error::config("queries", e.to_string()))?;
        }
        Ok(())
    }

    /// `(prod N(W_i), some window holds more than one point)`.
    fn count(&self, cfg: &PointConfiguration) -> (f64, bool) {
        let mut prod = 1.0;
        let mut multiple = false;
        for w in &self.windows {
            let n = cfg.levels.get(w.level - 1).map_or(0, |l| l.iter().filter(|&&y| w.contains(y)).count());
            multiple |= n > 1;
            prod *= n as f64;
        }
        (prod, multiple)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    /// Fraction of samples with at least two points in one window.
    pub multiple_occupancy: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    sum: f64,
    sum_sq: f64,
    multiple: usize,
}

impl Moments {
    fn push(&mut self, x: f64, multiple: bool) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
        self.multiple += usize::from(multiple);
    }

    fn merge(mut self, o: Moments) -> Moments {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self.multiple += o.multiple;
        self
    }

    fn finish(self) -> Estimate {
        if self.n == 0 {
            return Estimate {
                value: 0.0,
                stderr: 0.0,
                multiple_occupancy: 0.0,
                samples: 0,
            };
        }
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = if self.n > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Estimate {
            value: mean,
            stderr: (var / n).sqrt(),
            multiple_occupancy: self.multiple as f64 / n,
            samples: self.n,
        }
    }
}

/// Sample mean of `prod N(W_i)` with its standard error.
pub fn estimate_correlation(samples: &[PointConfiguration], query: &CorrelationQuery) -> Result<Estimate> {
    query.check()?;
    let m = samples.iter().fold(Moments::default(), |mut m, cfg| {
        let (x, multi) = query.count(cfg);
        m.push(x, multi);
        m
    });
    Ok(m.finish())
}

fn nested_det(
    kernel: &dyn CorrelationKernel,
    q: &Integrator,
    windows: &[Window],
    ys: &[f64],
) -> Result<f64> {
    let depth = ys.len();
    if depth == windows.len() {
        let k = windows.len();
        let mut m = nalgebra::DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = kernel.value((windows[i].level, ys[i]), (windows[j].level, ys[j]))?;
            }
        }
        return Ok(m.determinant());
    }
    let (lo, hi) = windows[depth].bounds();
    let (slo, shi) = kernel.support();
    let (lo, hi) = (lo.max(slo), hi.min(shi));
    if lo >= hi {
        return Ok(0.0);
    }
    let mut bps = ys.to_vec();
    if lo.is_finite() || hi.is_finite() {
        bps.push(windows[depth].center);
    }
    q.try_integrate(
        |y| {
            let mut local = ys.to_vec();
            local.push(y);
            nested_det(kernel, q, windows, &local)
        },
        Domain::between(lo, hi),
        &bps,
    )
}

/// `int_{W_1 x ... x W_k} det[R(p_i, p_j)]` by nested quadrature.
pub fn predict_correlation(kernel: &dyn CorrelationKernel, query: &CorrelationQuery, q: &Integrator) -> Result<f64> {
    query.check()?;
    if query.order() > MAX_ORDER {
        return Err(Error::config("queries", format!("prediction supports k <= {MAX_ORDER}")));
    }
    nested_det(kernel, q, &query.windows, &[])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    pub query: CorrelationQuery,
    pub estimate: f64,
    pub stderr: f64,
    pub predicted: f64,
    pub z: f64,
    pub multiple_occupancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub class: String,
    pub rank: usize,
    pub samples: usize,
    pub seed: u64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub z_threshold: f64,
    pub required_fraction: f64,
    pub results: Vec<QueryResult>,
    pub max_abs_z: f64,
    pub fraction_within: f64,
    pub max_multiple_occupancy: f64,
    pub passed: bool,
}

/// Uncertainty floor added to the standard error, covering the prediction's quadrature error.
pub const PREDICTION_TOL: f64 = 1e-6;

fn z_score(estimate: f64, stderr: f64, predicted: f64) -> f64 {
    (estimate - predicted) / stderr.hypot(PREDICTION_TOL)
}

/// Samples one interlaced configuration of the Gaussian ensemble.
pub fn sample_configuration<R: rand::Rng + ?Sized>(class: MatrixClass, rng: &mut R) -> Result<PointConfiguration> {
    let h = sample_gaussian(class, rng);
    to_point_configuration(&minor_sequence_unchecked(&h)?)
}

/// `count` configurations over independent streams of `seed`, in stream order.
pub fn sample_configurations(class: MatrixClass, count: usize, seed: u64) -> Result<Vec<PointConfiguration>> {
    let parts: Vec<Vec<PointConfiguration>> = chunks(count, 4096)
        .into_par_iter()
        .map(|(i, size)| {
            let mut rng = stream_rng(seed, i);
            (0..size).map(|_| sample_configuration(class, &mut rng)).collect()
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// Full pipeline: Gaussian samples, estimates, kernel predictions and z-scores.
pub fn compare(
    class: MatrixClass,
    samples: usize,
    seed: u64,
    queries: &[CorrelationQuery],
    q: &Integrator,
) -> Result<ComparisonReport> {
    if queries.is_empty() {
        return Err(Error::config("queries", "query set is empty"));
    }
    for query in queries {
        query.check_for(class)?;
    }
    let kernel = BiorthogonalKernel(gaussian_spec(class)?);
    let predicted: Vec<f64> = queries
        .par_iter()
        .map(|query| predict_correlation(&kernel, query, q))
        .collect::<Result<_>>()?;

    let k = queries.len();
    let moments = chunks(samples, 4096)
        .into_par_iter()
        .map(|(i, size)| {
            let mut rng = stream_rng(seed, i);
            let mut acc = vec![Moments::default(); k];
            for _ in 0..size {
                let cfg = sample_configuration(class, &mut rng)?;
                for (m, query) in acc.iter_mut().zip(queries) {
                    let (x, multi) = query.count(&cfg);
                    m.push(x, multi);
                }
            }
            Ok::<_, Error>(acc)
        })
        .try_reduce(
            || vec![Moments::default(); k],
            |a, b| Ok(a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect()),
        )?;

    let z_threshold = 3.0;
    let required_fraction = 0.95;
    let results: Vec<QueryResult> = queries
        .iter()
        .zip(moments)
        .zip(predicted)
        .map(|((query, m), predicted)| {
            let e = m.finish();
            QueryResult {
                query: query.clone(),
                estimate: e.value,
                stderr: e.stderr,
                predicted,
                z: z_score(e.value, e.stderr, predicted),
                multiple_occupancy: e.multiple_occupancy,
            }
        })
        .collect();
    let max_abs_z = results.iter().map(|r| r.z.abs()).fold(0.0, f64::max);
    let within = results.iter().filter(|r| r.z.abs() <= z_threshold).count();
    let fraction_within = within as f64 / results.len() as f64;
    Ok(ComparisonReport {
        class: class.to_string(),
        rank: class.rank,
        samples,
        seed,
        rel_tol: q.rel_tol,
        abs_tol: q.abs_tol,
        z_threshold,
        required_fraction,
        max_multiple_occupancy: results.iter().map(|r| r.multiple_occupancy).fold(0.0, f64::max),
        results,
        max_abs_z,
        fraction_within,
        passed: fraction_within >= required_fraction,
    })
}

/// Window centres on `level` where `R((level, y), (level, y)) >= MIN_DENSITY` on the whole window.
fn admissible_centres(kernel: &dyn CorrelationKernel, class: MatrixClass, level: usize) -> Result<Vec<f64>> {
    let start = if class.tag.is_half_line() { 0.5 * DEFAULT_WIDTH } else { -4.0 };
    let mut out = Vec::new();
    let mut c = start;
    while c <= 4.0 + 1e-9 {
        let mut ok = true;
        for t in [-0.5, 0.0, 0.5] {
            let y = c + t * DEFAULT_WIDTH;
            if kernel.value((level, y), (level, y))? < MIN_DENSITY {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(c);
        }
        c += 0.1;
    }
    Ok(out)
}

fn spread(cands: &[f64], count: usize) -> Vec<f64> {
    if cands.is_empty() || count == 0 {
        return Vec::new();
    }
    if count == 1 {
        return vec![cands[cands.len() / 2]];
    }
    let mut picks: Vec<f64> = (0..count)
        .map(|i| cands[(i * (cands.len() - 1)) / (count - 1)])
        .collect();
    picks.dedup();
    picks
}

/// At least 20 queries over all levels with `k in {1, 2}`, windows of width
/// 0.2 centred where the predicted one-point density is at least 0.05.
pub fn default_queries(class: MatrixClass) -> Result<Vec<CorrelationQuery>> {
    let kernel = BiorthogonalKernel(gaussian_spec(class)?);
    let levels = class.level_count();
    let cands: Vec<Vec<f64>> = (1..=levels)
        .map(|r| admissible_centres(&kernel, class, r))
        .collect::<Result<_>>()?;
    let mut per_level = 3;
    loop {
        let mut qs = Vec::new();
        let picks: Vec<Vec<f64>> = cands.iter().map(|c| spread(c, per_level)).collect();
        for (r, ps) in picks.iter().enumerate() {
            for &c in ps {
                qs.push(CorrelationQuery::new(vec![Window::centered(r + 1, c, DEFAULT_WIDTH)])?);
            }
        }
        for (r, ps) in picks.iter().enumerate() {
            if class.points_at_level(r + 1)? > 1 {
                for pair in ps.windows(2) {
                    if (pair[1] - pair[0]).abs() >= DEFAULT_WIDTH {
                        qs.push(CorrelationQuery::new(vec![
                            Window::centered(r + 1, pair[0], DEFAULT_WIDTH),
                            Window::centered(r + 1, pair[1], DEFAULT_WIDTH),
                        ])?);
                    }
                }
            }
        }
        for r in 1..levels {
            for (&a, &b) in picks[r - 1].iter().zip(picks[r].iter().rev()) {
                qs.push(CorrelationQuery::new(vec![
                    Window::centered(r, a, DEFAULT_WIDTH),
                    Window::centered(r + 1, b, DEFAULT_WIDTH),
                ])?);
            }
        }
        let exhausted = cands.iter().all(|c| c.len() <= per_level);
        if qs.len() >= 20 || exhausted {
            return Ok(qs);
        }
        per_level += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn window_validation() {
        let a = Window::centered(1, 0.0, 0.2);
        let b = Window::centered(1, 0.1, 0.2);
        assert!(CorrelationQuery::new(vec![a, b]).is_err());
        assert!(CorrelationQuery::new(vec![a, Window::centered(1, 0.2, 0.2)]).is_ok());
        assert!(CorrelationQuery::new(vec![a, Window::centered(2, 0.0, 0.2)]).is_ok());
        assert!(CorrelationQuery::new(vec![Window::whole_line(1), a]).is_err());
        assert!(CorrelationQuery::new(vec![]).is_err());
    }

    #[test]
    fn gue_one_point_prediction() {
        let kernel = BiorthogonalKernel(gaussian_spec(MatrixClass::a(1)).unwrap());
        let q = CorrelationQuery::new(vec![Window::centered(1, 0.0, 0.2)]).unwrap();
        let p = predict_correlation(&kernel, &q, &Integrator::default()).unwrap();
        let exact = statrs::function::erf::erf(0.1);
        assert!((p - exact).abs() < 1e-9);
        assert!((p - 0.11246).abs() < 1e-5);
        assert!((p - 0.2 / SQRT_PI).abs() < 1e-3);
        let empty = CorrelationQuery::new(vec![Window::centered(1, 0.0, 0.0)]).unwrap();
        assert_eq!(predict_correlation(&kernel, &empty, &Integrator::default()).unwrap(), 0.0);
    }

    #[test]
    fn whole_line_queries_count_points() {
        let class = MatrixClass::b(2);
        let samples = sample_configurations(class, 200, 4).unwrap();
        let kernel = BiorthogonalKernel(gaussian_spec(class).unwrap());
        for r in 1..=4 {
            let q = CorrelationQuery::new(vec![Window::whole_line(r)]).unwrap();
            let e = estimate_correlation(&samples, &q).unwrap();
            let want = class.points_at_level(r).unwrap() as f64;
            assert_eq!(e.value, want);
            assert_eq!(e.stderr, 0.0);
            let p = predict_correlation(&kernel, &q, &Integrator::default()).unwrap();
            assert!((p - want).abs() < 1e-7);
        }
    }

    #[test]
    fn separated_pairs_nearly_factorise() {
        let class = MatrixClass::a(3);
        let kernel = BiorthogonalKernel(gaussian_spec(class).unwrap());
        let ig = Integrator::default();
        let one = |c: f64| {
            predict_correlation(&kernel, &CorrelationQuery::new(vec![Window::centered(3, c, 0.2)]).unwrap(), &ig).unwrap()
        };
        let mut last = f64::INFINITY;
        for sep in [0.4, 1.0, 2.0] {
            let q = CorrelationQuery::new(vec![Window::centered(3, -sep / 2.0, 0.2), Window::centered(3, sep / 2.0, 0.2)]).unwrap();
            let pair = predict_correlation(&kernel, &q, &ig).unwrap();
            let correction = one(-sep / 2.0) * one(sep / 2.0) - pair;
            assert!(correction > 0.0);
            let rel = correction / (one(-sep / 2.0) * one(sep / 2.0));
            assert!(rel < last);
            last = rel;
        }
    }

    #[test]
    fn gue_rank_one_compare() {
        let class = MatrixClass::a(1);
        let qs = default_queries(class).unwrap();
        assert!(qs.len() >= 20);
        let rep = compare(class, 40_000, 17, &qs, &Integrator::default()).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert_eq!(rep.max_multiple_occupancy, 0.0);
    }

    #[test]
    fn default_query_shapes() {
        for class in [MatrixClass::a(2), MatrixClass::c(2), MatrixClass::b(1), MatrixClass::d(2)] {
            let qs = default_queries(class).unwrap();
            assert!(qs.len() >= 20, "{class}: {}", qs.len());
            assert!(qs.iter().any(|q| q.order() == 2));
            let levels: std::collections::BTreeSet<_> = qs.iter().flat_map(|q| q.windows.iter().map(|w| w.level)).collect();
            assert_eq!(levels.len(), class.level_count());
            for q in &qs {
                q.check_for(class).unwrap();
            }
        }
    }
}
