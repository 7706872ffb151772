//! Eynard–Mehta kernels for interlaced processes on `{1, ..., 2n} x R_+`.
//!
//! Level `r` carries `ceil(r/2)` particles. The measure is built from
//! transition functions `phi_0, ..., phi_{2n-1}`, anchors `a_1, ..., a_n` and
//! terminal weights `psi_1, ..., psi_n`. Writing
//!
//! ```text
//! phi^{(r,s)}  = phi_r * ... * phi_{s-1}                (r < s, else 0)
//! T_{r,k}(x)   = int phi^{(r,2n)}(x, y) psi_k(y) dy     (T_{2n,k} = psi_k)
//! E_l^s(y)     = phi_{2l-2} * phi^{(2l-1,s)}(a_l, y)    (s >= 2l - 1)
//! M_lj         = int E_l^{2n}(x) psi_j(x) dx
//! ```
//!
//! the kernel is `K((r,x),(s,y)) = -phi^{(r,s)}(x,y) + sum_k T_{r,k}(x) sum_{l <= (s+1)/2} (M^{-1})_{kl} E_l^s(y)`.
//!
//! One-variable functions `T` and `E` are tabulated once on piecewise
//! Chebyshev panels; `T` on a compactified axis covering all of `R_+`, `E`
//! on `[0, table_max]` with direct evaluation beyond.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernels::{condition_number, CorrelationKernel, LevelPoint};
use crate::numerics::quadrature::{Domain, Integrator};
use crate::numerics::weight::WeightFunction;

/// Largest condition number accepted for `M`.
pub const MAX_CONDITION: f64 = 1e12;

/// A transition function `phi(x, y)` on `R_+ x R_+`.
pub trait Transition: Send + Sync + fmt::Debug {
    fn eval(&self, x: f64, y: f64) -> Result<f64>;

    /// Interval containing the support of `y -> phi(x, y)`.
    fn forward_support(&self, _x: f64) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    /// Interval containing the support of `x -> phi(x, y)`.
    fn backward_support(&self, _y: f64) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

/// `1_{y >= x}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Indicator;

impl Transition for Indicator {
    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        Ok(if y >= x { 1.0 } else { 0.0 })
    }
    fn forward_support(&self, x: f64) -> (f64, f64) {
        (x.max(0.0), f64::INFINITY)
    }
    fn backward_support(&self, y: f64) -> (f64, f64) {
        (0.0, y)
    }
}

type Kernel2 = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A transition given by a closure, assumed supported on all of `R_+ x R_+`.
#[derive(Clone)]
pub struct FnTransition {
    name: String,
    f: Arc<Kernel2>,
}

impl FnTransition {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for FnTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnTransition({})", self.name)
    }
}

impl Transition for FnTransition {
    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        Ok((self.f)(x, y))
    }
}

/// `(f * g)(x, y) = int_0^inf f(x, z) g(z, y) dz`, evaluated by quadrature.
#[derive(Debug, Clone)]
pub struct Convolution {
    left: Arc<dyn Transition>,
    right: Arc<dyn Transition>,
    integrator: Integrator,
}

pub fn convolve(f: Arc<dyn Transition>, g: Arc<dyn Transition>) -> Convolution {
    Convolution {
        left: f,
        right: g,
        integrator: Integrator::new(1e-11, 1e-14),
    }
}

impl Transition for Convolution {
    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let (a, b) = self.left.forward_support(x);
        let (c, d) = self.right.backward_support(y);
        let lo = a.max(c).max(0.0);
        let hi = b.min(d);
        if lo >= hi {
            return Ok(0.0);
        }
        self.integrator.try_integrate(
            |z| {
                let u = self.left.eval(x, z)?;
                if u == 0.0 {
                    return Ok(0.0);
                }
                Ok(u * self.right.eval(z, y)?)
            },
            Domain::between(lo, hi),
            &[x, y],
        )
    }

    // supports are assumed to move monotonically with the base point
    fn forward_support(&self, x: f64) -> (f64, f64) {
        let (a, b) = self.left.forward_support(x);
        let lo = self.right.forward_support(a).0;
        let hi = if b.is_finite() { self.right.forward_support(b).1 } else { f64::INFINITY };
        (lo, hi)
    }

    fn backward_support(&self, y: f64) -> (f64, f64) {
        let (c, d) = self.right.backward_support(y);
        let lo = self.left.backward_support(c).0;
        let hi = if d.is_finite() { self.left.backward_support(d).1 } else { f64::INFINITY };
        (lo, hi)
    }
}

const NODES: usize = 16;

/// Axis on which a table is laid out.
#[derive(Debug, Clone, Copy)]
enum Axis {
    /// `x = u`.
    Linear,
    /// `x = c u / (1 - u)`, `u in [0, 1)`.
    Compact(f64),
}

impl Axis {
    fn to_x(self, u: f64) -> f64 {
        match self {
            Axis::Linear => u,
            Axis::Compact(c) => c * u / (1.0 - u),
        }
    }
    fn to_u(self, x: f64) -> f64 {
        match self {
            Axis::Linear => x,
            Axis::Compact(c) => x / (c + x),
        }
    }
}

fn cheb_node(j: usize) -> f64 {
    ((2 * j + 1) as f64 * PI / (2 * NODES) as f64).cos()
}

fn cheb_weight(j: usize) -> f64 {
    let s = ((2 * j + 1) as f64 * PI / (2 * NODES) as f64).sin();
    if j.is_multiple_of(2) {
        s
    } else {
        -s
    }
}

#[derive(Debug, Clone)]
struct Panel {
    a: f64,
    b: f64,
    values: [f64; NODES],
}

impl Panel {
    fn build(f: &dyn Fn(f64) -> Result<f64>, axis: Axis, a: f64, b: f64) -> Result<Self> {
        let mut values = [0.0; NODES];
        for (j, v) in values.iter_mut().enumerate() {
            let u = 0.5 * (a + b) + 0.5 * (b - a) * cheb_node(j);
            *v = f(axis.to_x(u))?;
        }
        Ok(Self { a, b, values })
    }

    fn eval(&self, u: f64) -> f64 {
        let t = (2.0 * u - self.a - self.b) / (self.b - self.a);
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..NODES {
            let d = t - cheb_node(j);
            if d == 0.0 {
                return self.values[j];
            }
            let w = cheb_weight(j) / d;
            num += w * self.values[j];
            den += w;
        }
        num / den
    }
}

/// Piecewise Chebyshev interpolant, refined until it matches `f` at probe points.
#[derive(Debug, Clone)]
struct Table {
    axis: Axis,
    panels: Vec<Panel>,
}

impl Table {
    fn build(f: &dyn Fn(f64) -> Result<f64>, axis: Axis, edges: &[f64], tol: f64) -> Result<Self> {
        let mut panels = Vec::new();
        let mut stack: Vec<(f64, f64, u32)> = edges.windows(2).rev().map(|w| (w[0], w[1], 0)).collect();
        while let Some((a, b, depth)) = stack.pop() {
            let p = Panel::build(f, axis, a, b)?;
            let mut ok = true;
            if depth < 14 {
                for t in [-0.71, 0.13, 0.93] {
                    let u = 0.5 * (a + b) + 0.5 * (b - a) * t;
                    let exact = f(axis.to_x(u))?;
                    if (p.eval(u) - exact).abs() > tol * exact.abs().max(1.0) {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                panels.push(p);
            } else {
                let m = 0.5 * (a + b);
                stack.push((m, b, depth + 1));
                stack.push((a, m, depth + 1));
            }
        }
        Ok(Self { axis, panels })
    }

    fn eval(&self, x: f64) -> Option<f64> {
        let u = self.axis.to_u(x);
        let first = self.panels.first()?;
        let last = self.panels.last()?;
        if !(u >= first.a && u <= last.b) {
            return None;
        }
        let i = self.panels.partition_point(|p| p.b < u).min(self.panels.len() - 1);
        Some(self.panels[i].eval(u))
    }
}

/// Build-time knobs for a [`ChainSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainOptions {
    /// Row functions are tabulated on `[0, table_max]`.
    pub table_max: f64,
    /// Scale `c` of the compactified axis `x = c u / (1 - u)`.
    pub compact_scale: f64,
    /// Relative interpolation tolerance of the tables.
    pub table_tol: f64,
    pub integrator: Integrator,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            table_max: 10.0,
            compact_scale: 1.0,
            table_tol: 1e-11,
            integrator: Integrator::new(1e-11, 1e-14),
        }
    }
}

/// A fully built Eynard–Mehta structure: immutable, shareable across threads.
#[derive(Debug)]
pub struct ChainSpec {
    n: usize,
    transitions: Vec<Arc<dyn Transition>>,
    anchors: Vec<f64>,
    psi: Vec<WeightFunction>,
    options: ChainOptions,
    /// `chains[r][s]` is `phi^{(r,s)}` for `r < s`, 0-based in `r`.
    chains: Vec<Vec<Option<Arc<dyn Transition>>>>,
    /// `rows[l-1][s-1]`.
    rows: Vec<Vec<Option<Table>>>,
    /// `transported[r-1][k-1]`.
    transported: Vec<Vec<Option<Table>>>,
    gram: DMatrix<f64>,
    gram_inverse: DMatrix<f64>,
    condition: f64,
}

impl ChainSpec {
    /// `transitions[i]` is `phi_i` for `i = 0, ..., 2n - 1`.
    pub fn new(
        transitions: Vec<Arc<dyn Transition>>,
        anchors: Vec<f64>,
        psi: Vec<WeightFunction>,
        options: ChainOptions,
    ) -> Result<Self> {
        let n = psi.len();
        if n == 0 {
            return Err(Error::config("psi", "need at least one terminal weight"));
        }
        if transitions.len() != 2 * n {
            return Err(Error::config(
                "transitions",
                format!("rank {n} needs 2n = {} transitions, got {}", 2 * n, transitions.len()),
            ));
        }
        if anchors.len() != n {
            return Err(Error::config("anchors", format!("rank {n} needs {n} anchors, got {}", anchors.len())));
        }
        if anchors.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::config("anchors", "anchors must be finite and nonnegative"));
        }
        if let Some(i) = psi.iter().position(|w| !w.vanishes_on_negatives()) {
            return Err(Error::config("psi", format!("psi_{} must live on R_+", i + 1)));
        }

        let levels = 2 * n;
        let mut chains: Vec<Vec<Option<Arc<dyn Transition>>>> = vec![vec![None; levels + 1]; levels + 1];
        for r in 1..levels {
            let mut acc = Arc::clone(&transitions[r]);
            chains[r][r + 1] = Some(Arc::clone(&acc));
            for s in r + 2..=levels {
                acc = Arc::new(convolve(acc, Arc::clone(&transitions[s - 1])));
                chains[r][s] = Some(Arc::clone(&acc));
            }
        }

        let mut spec = Self {
            n,
            transitions,
            anchors,
            psi,
            options,
            chains,
            rows: vec![vec![None; levels]; n],
            transported: vec![vec![None; n]; levels],
            gram: DMatrix::zeros(n, n),
            gram_inverse: DMatrix::zeros(n, n),
            condition: f64::NAN,
        };
        spec.build_tables()?;
        spec.build_gram()?;
        Ok(spec)
    }

    /// Indicator transitions `1_{y >= x}` with all anchors at 0.
    pub fn indicator(psi: Vec<WeightFunction>) -> Result<Self> {
        let n = psi.len();
        let transitions: Vec<Arc<dyn Transition>> = (0..2 * n).map(|_| Arc::new(Indicator) as Arc<dyn Transition>).collect();
        Self::new(transitions, vec![0.0; n], psi, ChainOptions::default())
    }

    /// Odd Gaussian weights `x^{2k-1} e^{-x^2} 1_{x>0}`, `k = 1..n`, on the indicator chain.
    pub fn indicator_gaussian(n: usize) -> Result<Self> {
        Self::indicator((1..=n as u32).map(|k| WeightFunction::gaussian(2 * k - 1, true)).collect())
    }

    fn edges(&self, axis: Axis) -> Vec<f64> {
        let mut e: Vec<f64> = match axis {
            Axis::Linear => {
                let m = (self.options.table_max / 0.5).ceil() as usize;
                (0..=m).map(|i| self.options.table_max * i as f64 / m as f64).collect()
            }
            Axis::Compact(_) => (0..=24).map(|i| i as f64 / 24.0).collect(),
        };
        let hi = *e.last().expect("non-empty");
        for &a in &self.anchors {
            let u = axis.to_u(a);
            if u > 0.0 && u < hi {
                e.push(u);
            }
        }
        for w in &self.psi {
            for b in w.breakpoints().into_iter().chain([w.bounds().1]) {
                let u = axis.to_u(b);
                if b.is_finite() && u > 0.0 && u < hi {
                    e.push(u);
                }
            }
        }
        e.sort_by(f64::total_cmp);
        e.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        e
    }

    fn build_tables(&mut self) -> Result<()> {
        let n = self.n;
        let tol = self.options.table_tol;
        let linear = self.edges(Axis::Linear);
        let compact_axis = Axis::Compact(self.options.compact_scale);
        // the last point u = 1 is x = inf; stop just short of it
        let mut compact = self.edges(compact_axis);
        compact.pop();
        compact.push(1.0 - 1e-9);
        for l in 1..=n {
            for s in 2 * l..=2 * n {
                let t = Table::build(&|y| self.row_direct(l, s, y), Axis::Linear, &linear, tol)?;
                self.rows[l - 1][s - 1] = Some(t);
            }
        }
        for r in (1..2 * n).rev() {
            for k in 1..=n {
                let t = Table::build(&|x| self.transported_direct(r, k, x), compact_axis, &compact, tol)?;
                self.transported[r - 1][k - 1] = Some(t);
            }
        }
        Ok(())
    }

    fn build_gram(&mut self) -> Result<()> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for l in 1..=n {
            for j in 1..=n {
                m[(l - 1, j - 1)] = self.psi[j - 1].try_integrate_against(
                    |x| self.row_function(l, 2 * n, x),
                    &self.options.integrator,
                    &self.anchors,
                )?;
            }
        }
        let condition = condition_number(&m);
        if !condition.is_finite() || condition > MAX_CONDITION {
            return Err(Error::Singular { condition });
        }
        let inv = m
            .clone()
            .try_inverse()
            .ok_or(Error::Singular { condition })?;
        self.gram = m;
        self.gram_inverse = inv;
        self.condition = condition;
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> usize {
        2 * self.n
    }

    pub fn anchors(&self) -> &[f64] {
        &self.anchors
    }

    /// `M` together with its inverse and 2-norm condition number.
    pub fn gram_matrix(&self) -> (&DMatrix<f64>, &DMatrix<f64>, f64) {
        (&self.gram, &self.gram_inverse, self.condition)
    }

    fn check_level(&self, r: usize) -> Result<()> {
        if r == 0 || r > 2 * self.n {
            return Err(Error::Domain(format!("level {r} outside 1..={}", 2 * self.n)));
        }
        Ok(())
    }

    fn check_point(x: f64) -> Result<()> {
        if x.is_nan() || x < 0.0 || !x.is_finite() {
            return Err(Error::Domain(format!("location {x} is not in R_+")));
        }
        Ok(())
    }

    /// `phi^{(r,s)}(x, y)`: the `s - r` fold convolution, 0 unless `r < s`.
    pub fn phi_chain(&self, r: usize, s: usize, x: f64, y: f64) -> Result<f64> {
        self.check_level(r)?;
        self.check_level(s)?;
        match &self.chains[r][s] {
            Some(c) if r < s => c.eval(x, y),
            _ => Ok(0.0),
        }
    }

    fn transported_direct(&self, r: usize, k: usize, x: f64) -> Result<f64> {
        if r == 2 * self.n {
            return Ok(self.psi[k - 1].eval(x));
        }
        let phi = &self.transitions[r];
        let (a, b) = phi.forward_support(x);
        let (plo, phi_hi) = self.psi[k - 1].bounds();
        let lo = a.max(0.0);
        let hi = if r == 2 * self.n - 1 { b.min(phi_hi) } else { b };
        let lo = if r == 2 * self.n - 1 { lo.max(plo) } else { lo };
        if lo >= hi {
            return Ok(0.0);
        }
        let mut bps = vec![x, plo, phi_hi];
        bps.extend(self.psi[k - 1].breakpoints());
        self.options.integrator.try_integrate(
            |z| {
                let p = phi.eval(x, z)?;
                if p == 0.0 {
                    return Ok(0.0);
                }
                Ok(p * self.transported_psi(r + 1, k, z)?)
            },
            Domain::between(lo, hi),
            &bps,
        )
    }

    /// `T_{r,k}(x) = int phi^{(r,2n)}(x, y) psi_k(y) dy`, and `psi_k(x)` at `r = 2n`.
    pub fn transported_psi(&self, r: usize, k: usize, x: f64) -> Result<f64> {
        self.check_level(r)?;
        if k == 0 || k > self.n {
            return Err(Error::Domain(format!("weight index {k} outside 1..={}", self.n)));
        }
        if let Some(v) = self.transported[r - 1][k - 1].as_ref().and_then(|t| t.eval(x)) {
            return Ok(v);
        }
        self.transported_direct(r, k, x)
    }

    fn row_direct(&self, l: usize, s: usize, y: f64) -> Result<f64> {
        let a = self.anchors[l - 1];
        if s == 2 * l - 1 {
            return self.transitions[2 * l - 2].eval(a, y);
        }
        let phi = &self.transitions[s - 1];
        let (lo, hi) = phi.backward_support(y);
        let lo = lo.max(0.0);
        if lo >= hi {
            return Ok(0.0);
        }
        self.options.integrator.try_integrate(
            |z| {
                let p = phi.eval(z, y)?;
                if p == 0.0 {
                    return Ok(0.0);
                }
                Ok(self.row_function(l, s - 1, z)? * p)
            },
            Domain::between(lo, hi),
            &[y, a],
        )
    }

    /// `E_l^s(y) = phi_{2l-2} * phi^{(2l-1,s)}(a_l, y)`; bare `phi_{2l-2}(a_l, y)` at `s = 2l - 1`.
    pub fn row_function(&self, l: usize, s: usize, y: f64) -> Result<f64> {
        self.check_level(s)?;
        if l == 0 || l > self.n || s + 1 < 2 * l {
            return Err(Error::Domain(format!("row {l} is not defined at level {s}")));
        }
        if let Some(v) = self.rows[l - 1][s - 1].as_ref().and_then(|t| t.eval(y)) {
            return Ok(v);
        }
        self.row_direct(l, s, y)
    }

    /// `max |M' M^{-1} - I|` with `M'_lj = int phi_{2l-2}(a_l, z) T_{2l-1,j}(z) dz`, an
    /// independent assembly of `M` from the transported weights.
    pub fn gram_residual(&self) -> Result<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for l in 1..=n {
            let a = self.anchors[l - 1];
            let phi = &self.transitions[2 * l - 2];
            let (lo, hi) = phi.forward_support(a);
            for j in 1..=n {
                m[(l - 1, j - 1)] = self.options.integrator.try_integrate(
                    |z| {
                        let p = phi.eval(a, z)?;
                        if p == 0.0 {
                            return Ok(0.0);
                        }
                        Ok(p * self.transported_psi(2 * l - 1, j, z)?)
                    },
                    Domain::between(lo.max(0.0), hi),
                    &[a],
                )?;
            }
        }
        Ok((m * &self.gram_inverse - DMatrix::identity(n, n)).abs().max())
    }

    /// `K((r,x),(s,y))`.
    pub fn em_kernel(&self, p: LevelPoint, q: LevelPoint) -> Result<f64> {
        let ((r, x), (s, y)) = (p, q);
        self.check_level(r)?;
        self.check_level(s)?;
        Self::check_point(x)?;
        Self::check_point(y)?;
        let rows: Vec<f64> = (1..=s.div_ceil(2)).map(|l| self.row_function(l, s, y)).collect::<Result<_>>()?;
        let mut sum = 0.0;
        for k in 1..=self.n {
            let t = self.transported_psi(r, k, x)?;
            if t == 0.0 {
                continue;
            }
            let inner: f64 = rows.iter().enumerate().map(|(l, e)| self.gram_inverse[(k - 1, l)] * e).sum();
            sum += t * inner;
        }
        Ok(sum - self.phi_chain(r, s, x, y)?)
    }
}

/// Free-function form of [`ChainSpec::phi_chain`].
pub fn phi_chain(spec: &ChainSpec, r: usize, s: usize, x: f64, y: f64) -> Result<f64> {
    spec.phi_chain(r, s, x, y)
}

/// Free-function form of [`ChainSpec::transported_psi`].
pub fn transported_psi(spec: &ChainSpec, r: usize, k: usize, x: f64) -> Result<f64> {
    spec.transported_psi(r, k, x)
}

/// Free-function form of [`ChainSpec::em_kernel`].
pub fn em_kernel(spec: &ChainSpec, p: LevelPoint, q: LevelPoint) -> Result<f64> {
    spec.em_kernel(p, q)
}

impl CorrelationKernel for ChainSpec {
    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
    fn value(&self, p: LevelPoint, q: LevelPoint) -> Result<f64> {
        self.em_kernel(p, q)
    }

    fn kinks(&self, _r: usize, q: LevelPoint) -> Vec<f64> {
        let mut k = vec![q.1];
        k.extend_from_slice(&self.anchors);
        k
    }
}

/// Summary of comparing the indicator-chain kernel with a reference kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct EmCheck {
    pub rank: usize,
    pub max_kernel_diff: f64,
    /// `(level, trace, expected ceil(level/2))`.
    pub traces: Vec<(usize, f64, f64)>,
    pub max_trace_diff: f64,
    pub gram_residual: f64,
    pub condition: f64,
    pub min_diagonal: f64,
}

/// Compares `spec` with `reference` on `grid^2` for all level pairs and
/// integrates the diagonal on every level.
pub fn em_check(spec: &ChainSpec, reference: &dyn CorrelationKernel, grid: &[f64]) -> Result<EmCheck> {
    let levels = spec.levels();
    let mut max_kernel_diff: f64 = 0.0;
    let mut min_diagonal = f64::INFINITY;
    for r in 1..=levels {
        for s in 1..=levels {
            for &x in grid {
                for &y in grid {
                    let k = spec.em_kernel((r, x), (s, y))?;
                    let want = reference.value((r, x), (s, y))?;
                    max_kernel_diff = max_kernel_diff.max((k - want).abs());
                    if r == s && x == y {
                        min_diagonal = min_diagonal.min(k);
                    }
                }
            }
        }
    }
    let q = Integrator::new(1e-9, 1e-12);
    let mut traces = Vec::new();
    let mut max_trace_diff: f64 = 0.0;
    for r in 1..=levels {
        let t = q.try_integrate(|x| spec.em_kernel((r, x), (r, x)), Domain::UpperHalf(0.0), spec.anchors())?;
        let want = r.div_ceil(2) as f64;
        max_trace_diff = max_trace_diff.max((t - want).abs());
        traces.push((r, t, want));
    }
    Ok(EmCheck {
        rank: spec.rank(),
        max_kernel_diff,
        traces,
        max_trace_diff,
        gram_residual: spec.gram_residual()?,
        condition: spec.condition,
        min_diagonal,
    })
}
