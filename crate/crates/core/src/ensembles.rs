//! Random matrix samplers for the four classical Hermitian families.
//!
//! Gaussian variances are read off `exp(-t Tr H^2)` with `t = 1` for A and
//! `t = 1/2` for B, C, D:
//!
//! | class | coordinate                                     | variance |
//! |-------|------------------------------------------------|----------|
//! | A     | diagonal `H_ii`                                | 1/2      |
//! | A     | `Re H_ij`, `Im H_ij` for `i < j`               | 1/4      |
//! | B, D  | `A_jk` for `j < k`, where `H = iA`             | 1/2      |
//! | C     | `p`, `Re q`, `Im q` in diagonal blocks         | 1/2      |
//! | C     | `Re`, `Im` of `u`, `v` in off-diagonal blocks  | 1/4      |
//!
//! Class C uses 2x2 blocks `[[p, q], [conj q, -p]]` on the diagonal and
//! `[[u, v], [conj v, -conj u]]` above it, which is the general solution of
//! `H^t J + J H = 0` for `J = diag([[0, -1], [1, 0]], ...)`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::class::{ClassTag, MatrixClass};
use crate::error::{Error, Result};
use crate::numerics::linalg::{hermitian_defect, hermitian_eigenvalues, max_abs, CMatrix, C64};

/// Tolerance for the class invariants of sampler outputs.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// The symplectic form with `J_{2i,2i-1} = 1`, `J_{2i-1,2i} = -1` (1-based).
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(2 * i + 1, 2 * i)] = 1.0;
        j[(2 * i, 2 * i + 1)] = -1.0;
    }
    j
}

/// A Hermitian matrix carrying its class.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredHermitian {
    class: MatrixClass,
    matrix: CMatrix,
}

impl StructuredHermitian {
    /// Wraps `matrix`, checking the class invariants at [`STRUCTURE_TOL`].
    pub fn new(class: MatrixClass, matrix: CMatrix) -> Result<Self> {
        let h = Self { class, matrix };
        h.validate(STRUCTURE_TOL)?;
        Ok(h)
    }

    pub(crate) fn new_unchecked(class: MatrixClass, matrix: CMatrix) -> Self {
        Self { class, matrix }
    }

    pub fn class(&self) -> MatrixClass {
        self.class
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Checks shape, Hermitian symmetry and the class relation, scaled by
    /// `max(1, max|H_ij|)`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let m = &self.matrix;
        let dim = self.class.ambient_dim();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::Structural(format!(
                "class {} needs a {dim}x{dim} matrix, got {}x{}",
                self.class,
                m.nrows(),
                m.ncols()
            )));
        }
        let scale = max_abs(m).max(1.0);
        let defect = hermitian_defect(m);
        if defect > tol * scale {
            return Err(Error::Structural(format!("not Hermitian (defect {defect:e})")));
        }
        match self.class.tag {
            ClassTag::A => {}
            ClassTag::B | ClassTag::D => {
                let re = m.iter().fold(0.0f64, |acc, z| acc.max(z.re.abs()));
                if re > tol * scale {
                    return Err(Error::Structural(format!(
                        "class {} entries must be purely imaginary (max real part {re:e})",
                        self.class.tag
                    )));
                }
            }
            ClassTag::C => {
                let j = symplectic_form(self.class.rank).map(|v| C64::new(v, 0.0));
                let r = m.transpose() * &j + &j * m;
                let defect = max_abs(&r);
                if defect > tol * scale {
                    return Err(Error::Structural(format!(
                        "H^t J + J H = 0 violated (defect {defect:e})"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    sd * z
}

/// Draw from the Gaussian measure `exp(-t Tr H^2)` on the class.
pub fn sample_gaussian<R: Rng + ?Sized>(class: MatrixClass, rng: &mut R) -> StructuredHermitian {
    let dim = class.ambient_dim();
    let half = 0.5f64.sqrt();
    let mut h = CMatrix::zeros(dim, dim);
    match class.tag {
        ClassTag::A => {
            for i in 0..dim {
                h[(i, i)] = C64::new(normal(rng, half), 0.0);
                for j in (i + 1)..dim {
                    let z = C64::new(normal(rng, 0.5), normal(rng, 0.5));
                    h[(i, j)] = z;
                    h[(j, i)] = z.conj();
                }
            }
        }
        ClassTag::B | ClassTag::D => {
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let a = normal(rng, half);
                    h[(i, j)] = C64::new(0.0, a);
                    h[(j, i)] = C64::new(0.0, -a);
                }
            }
        }
        ClassTag::C => {
            let n = class.rank;
            for a in 0..n {
                let p = normal(rng, half);
                let q = C64::new(normal(rng, half), normal(rng, half));
                set_block(&mut h, a, a, C64::new(p, 0.0), q);
                for b in (a + 1)..n {
                    let u = C64::new(normal(rng, 0.5), normal(rng, 0.5));
                    let v = C64::new(normal(rng, 0.5), normal(rng, 0.5));
                    set_block(&mut h, a, b, u, v);
                }
            }
        }
    }
    StructuredHermitian::new_unchecked(class, h)
}

/// Writes the block `[[u, v], [conj v, -conj u]]` at block position
/// `(a, b)` and its adjoint at `(b, a)`.
fn set_block(h: &mut CMatrix, a: usize, b: usize, u: C64, v: C64) {
    let block = [[u, v], [v.conj(), -u.conj()]];
    for (r, row) in block.iter().enumerate() {
        for (c, &val) in row.iter().enumerate() {
            h[(2 * a + r, 2 * b + c)] = val;
            h[(2 * b + c, 2 * a + r)] = val.conj();
        }
    }
}

/// Compact groups with a Haar sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    /// `U(n)`
    Unitary(usize),
    /// `SO(m)`
    SpecialOrthogonal(usize),
    /// `Sp(n)` inside `U(2n)`, preserving the form of [`symplectic_form`].
    Symplectic(usize),
}

impl Group {
    pub fn of_class(class: MatrixClass) -> Group {
        match class.tag {
            ClassTag::A => Group::Unitary(class.rank),
            ClassTag::B | ClassTag::D => Group::SpecialOrthogonal(class.ambient_dim()),
            ClassTag::C => Group::Symplectic(class.rank),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Group::Unitary(n) | Group::SpecialOrthogonal(n) => n,
            Group::Symplectic(n) => 2 * n,
        }
    }
}

fn complex_gaussian_vector<R: Rng + ?Sized>(len: usize, real: bool, rng: &mut R) -> Vec<C64> {
    (0..len)
        .map(|_| {
            if real {
                C64::new(normal(rng, 1.0), 0.0)
            } else {
                C64::new(normal(rng, 1.0), normal(rng, 1.0))
            }
        })
        .collect()
}

/// Projects `v` off the first `count` columns of `q` (twice, for stability)
/// and normalises. Returns `false` if `v` collapsed.
fn orthonormalise(v: &mut [C64], q: &CMatrix, count: usize) -> bool {
    for _ in 0..2 {
        for c in 0..count {
            let col = q.column(c);
            let dot: C64 = col.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (vi, a) in v.iter_mut().zip(col.iter()) {
                *vi -= dot * a;
            }
        }
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-8 {
        return false;
    }
    for vi in v.iter_mut() {
        *vi /= norm;
    }
    true
}

/// Haar-distributed element of `group`, as a complex matrix (real entries
/// for `SO(m)`).
///
/// Gram–Schmidt on Gaussian columns: this is the QR route with the phases
/// of `R` fixed to be positive.
pub fn haar_element<R: Rng + ?Sized>(group: Group, rng: &mut R) -> CMatrix {
    let dim = group.dim();
    let mut q = CMatrix::zeros(dim, dim);
    match group {
        Group::Unitary(_) | Group::SpecialOrthogonal(_) => {
            let real = matches!(group, Group::SpecialOrthogonal(_));
            let mut c = 0;
            while c < dim {
                let mut v = complex_gaussian_vector(dim, real, rng);
                if orthonormalise(&mut v, &q, c) {
                    q.column_mut(c).copy_from_slice(&v);
                    c += 1;
                }
            }
            if real && dim > 0 {
                let det = q.map(|z| z.re).determinant();
                if det < 0.0 {
                    let mut first = q.column_mut(0);
                    first.neg_mut();
                }
            }
        }
        Group::Symplectic(n) => {
            let j = symplectic_form(n);
            let mut i = 0;
            while i < n {
                let mut v = complex_gaussian_vector(dim, false, rng);
                if !orthonormalise(&mut v, &q, 2 * i) {
                    continue;
                }
                // partner column J * conj(v) completes a quaternionic line
                let partner: Vec<C64> = (0..dim)
                    .map(|r| (0..dim).map(|c| v[c].conj() * j[(r, c)]).sum())
                    .collect();
                q.column_mut(2 * i).copy_from_slice(&v);
                q.column_mut(2 * i + 1).copy_from_slice(&partner);
                i += 1;
            }
        }
    }
    q
}

/// Canonical representative of the orbit with radial part `lambda`.
pub fn chamber_representative(class: MatrixClass, lambda: &[f64]) -> Result<CMatrix> {
    check_chamber(class, lambda)?;
    let dim = class.ambient_dim();
    let mut m = CMatrix::zeros(dim, dim);
    match class.tag {
        ClassTag::A => {
            for (i, &l) in lambda.iter().enumerate() {
                m[(i, i)] = C64::new(l, 0.0);
            }
        }
        ClassTag::B | ClassTag::D => {
            // D(x): entry (2k, 2k-1) = i x_k, (2k-1, 2k) = -i x_k; B pads with a zero row and column
            for (k, &x) in lambda.iter().enumerate() {
                m[(2 * k + 1, 2 * k)] = C64::new(0.0, x);
                m[(2 * k, 2 * k + 1)] = C64::new(0.0, -x);
            }
        }
        ClassTag::C => {
            for (k, &x) in lambda.iter().enumerate() {
                m[(2 * k, 2 * k)] = C64::new(x, 0.0);
                m[(2 * k + 1, 2 * k + 1)] = C64::new(-x, 0.0);
            }
        }
    }
    Ok(m)
}

/// Checks that `lambda` lies in the closed Weyl chamber of `class`.
pub fn check_chamber(class: MatrixClass, lambda: &[f64]) -> Result<()> {
    let n = class.rank;
    if lambda.len() != n {
        return Err(Error::Domain(format!(
            "radial vector has length {}, class {class} needs {n}",
            lambda.len()
        )));
    }
    if lambda.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("radial vector must be finite".into()));
    }
    let ordered = |v: &[f64]| v.windows(2).all(|w| w[0] >= w[1]);
    let ok = match class.tag {
        ClassTag::A => ordered(lambda),
        ClassTag::B | ClassTag::C => ordered(lambda) && lambda[n - 1] >= 0.0,
        ClassTag::D => {
            let head_ok = ordered(&lambda[..n - 1]);
            let tail_ok = n < 2 || lambda[n - 2] >= lambda[n - 1].abs();
            head_ok && tail_ok
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{lambda:?} is outside the closed chamber of class {class}"
        )))
    }
}

/// `k Lambda(lambda) k*` with `k` Haar in the class's group.
pub fn sample_fixed_orbit<R: Rng + ?Sized>(
    class: MatrixClass,
    lambda: &[f64],
    rng: &mut R,
) -> Result<StructuredHermitian> {
    let rep = chamber_representative(class, lambda)?;
    let k = haar_element(Group::of_class(class), rng);
    let mut h = &k * rep * k.adjoint();
    symmetrise(&mut h, class.tag);
    Ok(StructuredHermitian::new_unchecked(class, h))
}

/// Removes rounding asymmetry so outputs satisfy the invariants to machine precision.
fn symmetrise(h: &mut CMatrix, tag: ClassTag) {
    let n = h.nrows();
    for i in 0..n {
        for j in i..n {
            let mut avg = 0.5 * (h[(i, j)] + h[(j, i)].conj());
            if matches!(tag, ClassTag::B | ClassTag::D) {
                avg.re = 0.0;
            }
            if i == j {
                avg.im = 0.0;
            }
            h[(i, j)] = avg;
            h[(j, i)] = avg.conj();
        }
    }
}

/// Sample of the symplectic Laguerre-type sum `M_k = sum_i S(X_i, Y_i) R(X_i, Y_i)^*`.
///
/// `X_i, Y_i` have independent standard complex Gaussian entries
/// (`E|z|^2 = 1`). Returns `M_k` and its `n` positive eigenvalues, decreasing.
pub fn sample_sum_c<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<(StructuredHermitian, Vec<f64>)> {
    let class = MatrixClass::new(ClassTag::C, n)?;
    if k == 0 {
        return Err(Error::Domain("number of summands must be at least 1".into()));
    }
    let dim = 2 * n;
    let half = 0.5f64.sqrt();
    let mut m = CMatrix::zeros(dim, dim);
    let mut s = CMatrix::zeros(dim, 2);
    let mut r = CMatrix::zeros(dim, 2);
    for _ in 0..k {
        for i in 0..n {
            let a = C64::new(normal(rng, half), normal(rng, half));
            let b = C64::new(normal(rng, half), normal(rng, half));
            // s(a, b) = [[a, -b], [conj b, conj a]], r(a, b) = [[a, b], [conj b, -conj a]]
            s[(2 * i, 0)] = a;
            s[(2 * i, 1)] = -b;
            s[(2 * i + 1, 0)] = b.conj();
            s[(2 * i + 1, 1)] = a.conj();
            r[(2 * i, 0)] = a;
            r[(2 * i, 1)] = b;
            r[(2 * i + 1, 0)] = b.conj();
            r[(2 * i + 1, 1)] = -a.conj();
        }
        m += &s * r.adjoint();
    }
    symmetrise(&mut m, ClassTag::C);
    let eig = hermitian_eigenvalues(&m)?;
    let positive = eig[..n].to_vec();
    Ok((StructuredHermitian::new_unchecked(class, m), positive))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn gaussian_samples_satisfy_invariants() {
        let mut r = rng(1);
        for tag in ClassTag::ALL {
            for n in 1..=4 {
                let class = MatrixClass::new(tag, n).unwrap();
                let h = sample_gaussian(class, &mut r);
                h.validate(STRUCTURE_TOL).unwrap();
            }
        }
    }

    #[test]
    fn b_and_d_diagonal_is_zero() {
        let mut r = rng(2);
        for class in [MatrixClass::b(2), MatrixClass::d(2)] {
            let h = sample_gaussian(class, &mut r);
            for i in 0..class.ambient_dim() {
                assert_eq!(h.matrix()[(i, i)], C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn second_moment_of_trace() {
        // E[Tr H^2] = (real dimension) / (2t)
        let cases = [
            (MatrixClass::a(2), 2.0),
            (MatrixClass::b(1), 3.0),
            (MatrixClass::c(2), 10.0),
            (MatrixClass::d(2), 6.0),
        ];
        let mut r = rng(3);
        for (class, want) in cases {
            let samples = 40_000;
            let mut acc = 0.0;
            for _ in 0..samples {
                let h = sample_gaussian(class, &mut r);
                acc += h.matrix().iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
            let mean = acc / samples as f64;
            assert!((mean - want).abs() < 0.05 * want, "{class}: {mean} vs {want}");
        }
    }

    #[test]
    fn haar_outputs_are_in_their_groups() {
        let mut r = rng(4);
        for g in [
            Group::Unitary(1),
            Group::Unitary(4),
            Group::SpecialOrthogonal(1),
            Group::SpecialOrthogonal(5),
            Group::Symplectic(1),
            Group::Symplectic(3),
        ] {
            let q = haar_element(g, &mut r);
            let d = q.nrows();
            let resid = max_abs(&(q.adjoint() * &q - CMatrix::identity(d, d)));
            assert!(resid <= 1e-12, "{g:?}: {resid:e}");
            match g {
                Group::SpecialOrthogonal(_) => {
                    assert!(q.iter().all(|z| z.im == 0.0));
                    assert!((q.map(|z| z.re).determinant() - 1.0).abs() < 1e-10);
                }
                Group::Symplectic(n) => {
                    let j = symplectic_form(n).map(|v| C64::new(v, 0.0));
                    assert!(max_abs(&(q.transpose() * &j * &q - &j)) < 1e-12);
                }
                Group::Unitary(_) => {}
            }
        }
    }

    #[test]
    fn fixed_orbit_zero_and_spectrum() {
        let mut r = rng(5);
        let z = sample_fixed_orbit(MatrixClass::c(2), &[0.0, 0.0], &mut r).unwrap();
        assert_eq!(max_abs(z.matrix()), 0.0);
        let h = sample_fixed_orbit(MatrixClass::a(3), &[2.0, 0.5, -1.0], &mut r).unwrap();
        let ev = hermitian_eigenvalues(h.matrix()).unwrap();
        for (a, b) in ev.iter().zip([2.0, 0.5, -1.0]) {
            assert!((a - b).abs() < 1e-9);
        }
        for tag in ClassTag::ALL {
            let class = MatrixClass::new(tag, 3).unwrap();
            let lam = [3.0, 2.0, 1.0];
            sample_fixed_orbit(class, &lam, &mut r)
                .unwrap()
                .validate(STRUCTURE_TOL)
                .unwrap();
        }
    }

    #[test]
    fn chamber_violations() {
        assert!(check_chamber(MatrixClass::a(2), &[0.0, 1.0]).is_err());
        assert!(check_chamber(MatrixClass::b(2), &[1.0, -0.5]).is_err());
        assert!(check_chamber(MatrixClass::d(2), &[1.0, -0.5]).is_ok());
        assert!(check_chamber(MatrixClass::d(2), &[1.0, -1.5]).is_err());
        assert!(check_chamber(MatrixClass::d(1), &[-2.0]).is_ok());
        assert!(check_chamber(MatrixClass::c(2), &[1.0]).is_err());
    }

    #[test]
    fn sum_c_rank_one_closed_form() {
        // for n = k = 1 the positive eigenvalue is |a|^2 + |b|^2
        let mut r1 = rng(6);
        let mut r2 = rng(6);
        for _ in 0..100 {
            let (_, ev) = sample_sum_c(1, 1, &mut r1).unwrap();
            let half = 0.5f64.sqrt();
            let a = C64::new(normal(&mut r2, half), normal(&mut r2, half));
            let b = C64::new(normal(&mut r2, half), normal(&mut r2, half));
            let want = a.norm_sqr() + b.norm_sqr();
            assert!((ev[0] - want).abs() < 1e-12 * (1.0 + want));
        }
    }

    #[test]
    fn sum_c_is_class_c_with_symmetric_spectrum() {
        let mut r = rng(7);
        for (n, k) in [(1, 3), (2, 1), (3, 4)] {
            let (m, pos) = sample_sum_c(n, k, &mut r).unwrap();
            m.validate(STRUCTURE_TOL).unwrap();
            assert_eq!(pos.len(), n);
            let ev = hermitian_eigenvalues(m.matrix()).unwrap();
            for i in 0..ev.len() {
                assert!((ev[i] + ev[ev.len() - 1 - i]).abs() < 1e-9);
            }
        }
        assert!(sample_sum_c(1, 0, &mut r).is_err());
    }
}
