//! Gelfand–Cetlin cones of types A, B, C, D.
//!
//! Level `k` of a pattern has `k` entries for A and `ceil(k/2)` entries for
//! B, C, D. The top row is level `n` (A), `2n` (B, C) or `2n - 1` (D).
//! For B and D the last entry of every odd level may take either sign and
//! enters the interlacing relations through its absolute value; every other
//! entry of a B, C, D pattern is nonnegative.
//!
//! A GC_d pattern is a GC_b pattern with its top row removed. Such a top row
//! `x^(2n) >= |x^(2n-1)|` exists iff `|x^(2n-1)|` is weakly decreasing, so
//! the cone is cut out by the same inequalities as GC_b below the top, plus
//! the chamber condition on `x^(2n-1)`.

use rand::Rng;

use crate::class::{ClassTag, MatrixClass};
use crate::ensembles::check_chamber;
use crate::error::{Error, Result};
use crate::minors::MinorSequence;

/// Slack used by [`validate`].
pub const GC_SLACK: f64 = 1e-10;

/// `x >= y` in the interlacing sense, `x` the longer (or equal-length) vector.
pub fn interlaces(x: &[f64], y: &[f64]) -> Result<bool> {
    interlaces_with_slack(x, y, 0.0)
}

pub fn interlaces_with_slack(x: &[f64], y: &[f64], slack: f64) -> Result<bool> {
    if !(y.len() == x.len() || y.len() + 1 == x.len()) {
        return Err(Error::Domain(format!(
            "cannot interlace lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(first_interlacing_failure(x, y, slack).is_none())
}

/// Index into the chain `x_1 >= y_1 >= x_2 >= ...` of the first failing link.
fn first_interlacing_failure(x: &[f64], y: &[f64], slack: f64) -> Option<String> {
    for (j, &yj) in y.iter().enumerate() {
        if x[j] < yj - slack {
            return Some(format!("x_{} = {} < y_{} = {}", j + 1, x[j], j + 1, yj));
        }
        if j + 1 < x.len() && yj < x[j + 1] - slack {
            return Some(format!("y_{} = {} < x_{} = {}", j + 1, yj, j + 2, x[j + 1]));
        }
    }
    None
}

/// Entries at level `k` (1-based).
pub fn level_len(tag: ClassTag, k: usize) -> usize {
    match tag {
        ClassTag::A => k,
        _ => k.div_ceil(2),
    }
}

/// Number of levels of a pattern, top row included.
pub fn pattern_levels(class: MatrixClass) -> usize {
    match class.tag {
        ClassTag::A => class.rank,
        ClassTag::B | ClassTag::C => 2 * class.rank,
        ClassTag::D => 2 * class.rank - 1,
    }
}

/// Whether the entry `(k, j)` (1-based) may be negative.
pub fn is_sign_free(tag: ClassTag, k: usize, j: usize) -> bool {
    matches!(tag, ClassTag::B | ClassTag::D) && k % 2 == 1 && j == level_len(tag, k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcPattern {
    pub class: MatrixClass,
    /// `levels[k - 1]` is `x^(k)`.
    pub levels: Vec<Vec<f64>>,
}

/// The first violated inequality of a pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Level of the offending entry, or the upper level of an interlacing pair.
    pub level: usize,
    pub description: String,
}

impl GcPattern {
    pub fn new(class: MatrixClass, levels: Vec<Vec<f64>>) -> Result<Self> {
        let p = Self { class, levels };
        p.check_shape()?;
        Ok(p)
    }

    pub fn top(&self) -> &[f64] {
        self.levels.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn level(&self, k: usize) -> &[f64] {
        &self.levels[k - 1]
    }

    /// All coordinates in level-major order.
    pub fn coordinates(&self) -> Vec<f64> {
        self.levels.iter().flatten().copied().collect()
    }

    fn check_shape(&self) -> Result<()> {
        let count = pattern_levels(self.class);
        if self.levels.len() != count {
            return Err(Error::Domain(format!(
                "class {} patterns have {count} levels, got {}",
                self.class,
                self.levels.len()
            )));
        }
        for (i, l) in self.levels.iter().enumerate() {
            let want = level_len(self.class.tag, i + 1);
            if l.len() != want {
                return Err(Error::Domain(format!(
                    "level {} has {} entries, expected {want}",
                    i + 1,
                    l.len()
                )));
            }
        }
        Ok(())
    }

    /// Level `k` with sign-free entries replaced by their absolute value.
    fn abs_level(&self, k: usize) -> Vec<f64> {
        let tag = self.class.tag;
        self.levels[k - 1]
            .iter()
            .enumerate()
            .map(|(j, &v)| if is_sign_free(tag, k, j + 1) { v.abs() } else { v })
            .collect()
    }
}

/// Checks every defining inequality with slack [`GC_SLACK`]. Returns the
/// first violation, or `None` for a member of the cone.
pub fn validate(pattern: &GcPattern) -> Result<Option<Violation>> {
    pattern.check_shape()?;
    let tag = pattern.class.tag;
    let count = pattern.levels.len();
    for k in 1..=count {
        if tag != ClassTag::A {
            for (j, &v) in pattern.levels[k - 1].iter().enumerate() {
                if !is_sign_free(tag, k, j + 1) && v < -GC_SLACK {
                    return Ok(Some(Violation {
                        level: k,
                        description: format!("x^({k})_{} = {v} is negative", j + 1),
                    }));
                }
            }
        }
        if k >= 2 {
            let upper = pattern.abs_level(k);
            let lower = pattern.abs_level(k - 1);
            if let Some(msg) = first_interlacing_failure(&upper, &lower, GC_SLACK) {
                return Ok(Some(Violation {
                    level: k,
                    description: format!("x^({k}) does not interlace x^({}): {msg}", k - 1),
                }));
            }
        }
    }
    if tag == ClassTag::D {
        let top = pattern.abs_level(count);
        if let Some(w) = top.windows(2).position(|w| w[0] < w[1] - GC_SLACK) {
            return Ok(Some(Violation {
                level: count,
                description: format!(
                    "no x^({}) exists: |x^({count})| not decreasing at entry {}",
                    count + 1,
                    w + 2
                ),
            }));
        }
    }
    Ok(None)
}

pub fn is_member(pattern: &GcPattern) -> Result<bool> {
    Ok(validate(pattern)?.is_none())
}

/// Allowed values of one coordinate: one or two closed intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateRange {
    pub intervals: Vec<(f64, f64)>,
}

impl CoordinateRange {
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }

    /// Uniform draw; degenerate ranges return a forced endpoint.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let total = self.total_length();
        if total <= 0.0 {
            let pick = if self.intervals.len() > 1 { rng.random_range(0..self.intervals.len()) } else { 0 };
            return self.intervals[pick].0;
        }
        let mut u = rng.random::<f64>() * total;
        for &(a, b) in &self.intervals {
            let w = b - a;
            if u <= w {
                return a + u;
            }
            u -= w;
        }
        self.intervals.last().map(|iv| iv.1).unwrap_or(0.0)
    }
}

/// Values of entry `(level, slot)` (1-based) keeping every constraint,
/// all other entries held fixed.
pub fn coordinate_range(pattern: &GcPattern, level: usize, slot: usize) -> Result<CoordinateRange> {
    pattern.check_shape()?;
    let tag = pattern.class.tag;
    let count = pattern.levels.len();
    if level == count {
        return Err(Error::Domain("the top row is fixed".into()));
    }
    if level == 0 || level > count || slot == 0 || slot > level_len(tag, level) {
        return Err(Error::Domain(format!("no coordinate ({level}, {slot})")));
    }
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    let j = slot - 1;
    let upper = pattern.abs_level(level + 1);
    hi = hi.min(upper[j]);
    if j + 1 < upper.len() {
        lo = lo.max(upper[j + 1]);
    }
    if level >= 2 {
        let lower = pattern.abs_level(level - 1);
        if j < lower.len() {
            lo = lo.max(lower[j]);
        }
        if j >= 1 {
            hi = hi.min(lower[j - 1]);
        }
    }
    if tag != ClassTag::A {
        lo = lo.max(0.0);
    }
    if hi < lo {
        return Err(Error::Domain(format!(
            "coordinate ({level}, {slot}) has an empty range [{lo}, {hi}]"
        )));
    }
    let intervals = if is_sign_free(tag, level, slot) {
        if lo <= 0.0 {
            vec![(-hi, hi)]
        } else {
            vec![(-hi, -lo), (lo, hi)]
        }
    } else {
        vec![(lo, hi)]
    };
    Ok(CoordinateRange { intervals })
}

/// Burn-in and thinning for chains of patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GibbsConfig {
    pub burn_in: usize,
    pub thin: usize,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        Self { burn_in: 50, thin: 5 }
    }
}

/// Systematic-scan Gibbs sampler for the uniform law on `GC(lambda)`.
#[derive(Debug, Clone)]
pub struct GibbsSampler {
    state: GcPattern,
}

impl GibbsSampler {
    /// Starts from the pattern whose levels are truncations of `|lambda|`.
    pub fn new(class: MatrixClass, lambda: &[f64]) -> Result<Self> {
        check_chamber(class, lambda)?;
        let tag = class.tag;
        let count = pattern_levels(class);
        let mut levels: Vec<Vec<f64>> = (1..count)
            .map(|k| {
                let len = level_len(tag, k);
                if tag == ClassTag::A {
                    lambda[..len].to_vec()
                } else {
                    lambda[..len].iter().map(|v| v.abs()).collect()
                }
            })
            .collect();
        levels.push(lambda.to_vec());
        Ok(Self {
            state: GcPattern { class, levels },
        })
    }

    pub fn state(&self) -> &GcPattern {
        &self.state
    }

    pub fn sweep<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let tag = self.state.class.tag;
        for k in 1..self.state.levels.len() {
            for slot in 1..=level_len(tag, k) {
                let range = coordinate_range(&self.state, k, slot)?;
                self.state.levels[k - 1][slot - 1] = range.sample(rng);
            }
        }
        Ok(())
    }
}

/// State of a fresh chain after `sweeps` full sweeps.
pub fn sample_uniform<R: Rng + ?Sized>(
    class: MatrixClass,
    lambda: &[f64],
    sweeps: usize,
    rng: &mut R,
) -> Result<GcPattern> {
    if sweeps == 0 {
        return Err(Error::Domain("at least one sweep is required".into()));
    }
    let mut s = GibbsSampler::new(class, lambda)?;
    for _ in 0..sweeps {
        s.sweep(rng)?;
    }
    Ok(s.state)
}

/// `count` thinned patterns from one chain.
pub fn sample_chain<R: Rng + ?Sized>(
    class: MatrixClass,
    lambda: &[f64],
    count: usize,
    config: GibbsConfig,
    rng: &mut R,
) -> Result<Vec<GcPattern>> {
    let mut s = GibbsSampler::new(class, lambda)?;
    for _ in 0..config.burn_in {
        s.sweep(rng)?;
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        for _ in 0..config.thin.max(1) {
            s.sweep(rng)?;
        }
        out.push(s.state.clone());
    }
    Ok(out)
}

/// The even levels `x^(2), x^(4), ..., x^(2n)` of a GC_c pattern.
pub fn project_c(pattern: &GcPattern) -> Result<Vec<Vec<f64>>> {
    if pattern.class.tag != ClassTag::C {
        return Err(Error::Domain(format!(
            "projection applies to class C patterns, not {}",
            pattern.class
        )));
    }
    pattern.check_shape()?;
    Ok(pattern.levels.iter().skip(1).step_by(2).cloned().collect())
}

/// The pattern read off a minor sequence. For A, B, D this is the full
/// pattern; for C the odd levels have no matrix meaning and are filled with
/// the smallest admissible values, so membership of the result certifies
/// that the even levels extend to a GC_c pattern.
pub fn pattern_from_minors(seq: &MinorSequence) -> Result<GcPattern> {
    let class = seq.class;
    let values = |order: usize| -> Result<Vec<f64>> {
        seq.part(order)
            .map(|p| p.values.clone())
            .ok_or_else(|| Error::Structural(format!("minor sequence lacks order {order}")))
    };
    let levels = match class.tag {
        ClassTag::A => (1..=class.rank).map(values).collect::<Result<Vec<_>>>()?,
        ClassTag::B | ClassTag::D => (1..=class.level_count())
            .map(|k| values(k + 1))
            .collect::<Result<Vec<_>>>()?,
        ClassTag::C => {
            let even: Vec<Vec<f64>> = (1..=class.rank)
                .map(|i| values(2 * i))
                .collect::<Result<Vec<_>>>()?;
            let mut levels = Vec::with_capacity(2 * class.rank);
            for i in 0..class.rank {
                // x^(2i+1) needs x^(2i+1)_j >= x^(2i+2)_{j+1} and x^(2i+1)_j >= x^(2i)_j
                let up = &even[i];
                let fill: Vec<f64> = (0..=i)
                    .map(|j| {
                        let a = up.get(j + 1).copied().unwrap_or(0.0);
                        let b = if i > 0 { even[i - 1].get(j).copied().unwrap_or(0.0) } else { 0.0 };
                        a.max(b).max(0.0)
                    })
                    .collect();
                levels.push(fill);
                levels.push(up.clone());
            }
            levels
        }
    };
    GcPattern::new(class, levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn interlacing_examples() {
        assert!(interlaces(&[3.0, 1.0], &[2.0]).unwrap());
        assert!(!interlaces(&[3.0, 1.0], &[4.0]).unwrap());
        assert!(interlaces(&[3.0, 2.0, 1.0], &[3.0, 1.0]).unwrap());
        assert!(interlaces(&[3.0, 1.0], &[3.0, 1.0]).unwrap());
        assert!(interlaces(&[3.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn validation_examples() {
        let ok = GcPattern::new(MatrixClass::a(2), vec![vec![2.0], vec![3.0, 1.0]]).unwrap();
        assert!(validate(&ok).unwrap().is_none());
        let bad = GcPattern::new(MatrixClass::a(2), vec![vec![4.0], vec![3.0, 1.0]]).unwrap();
        assert_eq!(validate(&bad).unwrap().unwrap().level, 2);
        let b = GcPattern::new(MatrixClass::b(1), vec![vec![-0.5], vec![1.0]]).unwrap();
        assert!(validate(&b).unwrap().is_none());
        let b_bad = GcPattern::new(MatrixClass::b(1), vec![vec![-1.5], vec![1.0]]).unwrap();
        assert!(validate(&b_bad).unwrap().is_some());
        assert!(GcPattern::new(MatrixClass::a(2), vec![vec![1.0]]).is_err());
        let c_neg = GcPattern::new(MatrixClass::c(1), vec![vec![-0.5], vec![1.0]]).unwrap();
        assert!(validate(&c_neg).unwrap().is_some());
        let d_top = GcPattern::new(MatrixClass::d(2), vec![vec![1.0], vec![1.5], vec![1.0, -2.0]]).unwrap();
        assert!(validate(&d_top).unwrap().is_some());
    }

    #[test]
    fn range_examples() {
        let p = GcPattern::new(MatrixClass::a(2), vec![vec![2.0], vec![3.0, 1.0]]).unwrap();
        assert_eq!(coordinate_range(&p, 1, 1).unwrap().intervals, vec![(1.0, 3.0)]);
        let p = GcPattern::new(
            MatrixClass::a(3),
            vec![vec![3.0], vec![4.0, 2.0], vec![5.0, 3.0, 1.0]],
        )
        .unwrap();
        assert_eq!(coordinate_range(&p, 1, 1).unwrap().intervals, vec![(2.0, 4.0)]);
        assert!(coordinate_range(&p, 3, 1).is_err());
        let b = GcPattern::new(MatrixClass::b(1), vec![vec![0.2], vec![1.0]]).unwrap();
        assert_eq!(coordinate_range(&b, 1, 1).unwrap().intervals, vec![(-1.0, 1.0)]);
        // |x^(3)_2| is bounded by x^(4)_2 = 0.5 only
        let b2 = GcPattern::new(
            MatrixClass::b(2),
            vec![vec![1.0], vec![2.0], vec![2.5, 0.1], vec![3.0, 0.5]],
        )
        .unwrap();
        assert_eq!(coordinate_range(&b2, 3, 2).unwrap().intervals, vec![(-0.5, 0.5)]);
        assert_eq!(coordinate_range(&b2, 2, 1).unwrap().intervals, vec![(1.0, 2.5)]);
    }

    #[test]
    fn point_cone_is_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = sample_uniform(MatrixClass::a(3), &[1.5, 1.5, 1.5], 20, &mut rng).unwrap();
        assert!(p.coordinates().iter().all(|&v| v == 1.5));
    }

    #[test]
    fn samples_stay_in_the_cone() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cases = [
            (MatrixClass::a(3), vec![2.0, 1.0, 0.0]),
            (MatrixClass::b(2), vec![2.0, 0.7]),
            (MatrixClass::c(3), vec![3.0, 1.0, 0.5]),
            (MatrixClass::d(3), vec![3.0, 1.0, -0.5]),
        ];
        for (class, lam) in cases {
            for p in sample_chain(class, &lam, 200, GibbsConfig { burn_in: 5, thin: 1 }, &mut rng).unwrap() {
                assert!(validate(&p).unwrap().is_none(), "{class}: {p:?}");
                assert_eq!(p.top(), lam.as_slice());
            }
        }
    }

    #[test]
    fn projection_shapes() {
        for n in 1..=5 {
            let lam: Vec<f64> = (0..n).map(|i| (n - i) as f64).collect();
            let p = GibbsSampler::new(MatrixClass::c(n), &lam).unwrap().state().clone();
            let proj = project_c(&p).unwrap();
            assert_eq!(proj.len(), n);
            assert_eq!(proj.iter().map(Vec::len).sum::<usize>(), n * (n + 1) / 2);
            assert_eq!(proj.last().unwrap(), &lam);
        }
        let a = GibbsSampler::new(MatrixClass::a(2), &[1.0, 0.0]).unwrap();
        assert!(project_c(a.state()).is_err());
    }
}
