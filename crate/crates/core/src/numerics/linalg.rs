//! Hermitian spectra and Pfaffians.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

const HERMITIAN_TOL: f64 = 1e-10;

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max |H - H*|`.
pub fn hermitian_defect(h: &CMatrix) -> f64 {
    let n = h.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_hermitian(h: &CMatrix) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(Error::Structural(format!(
            "matrix is {}x{}, not square",
            h.nrows(),
            h.ncols()
        )));
    }
    let defect = hermitian_defect(h);
    if defect > HERMITIAN_TOL * max_abs(h).max(1.0) {
        return Err(Error::Structural(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }
    Ok(())
}

fn sorted_decreasing(v: DVector<f64>) -> Vec<f64> {
    let mut out: Vec<f64> = v.iter().copied().collect();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Eigenvalues of a Hermitian matrix in decreasing order.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    match h.nrows() {
        0 => Ok(Vec::new()),
        1 => Ok(vec![h[(0, 0)].re]),
        2 => {
            // closed form keeps the hot Monte Carlo loops cheap
            let a = h[(0, 0)].re;
            let d = h[(1, 1)].re;
            let b = h[(0, 1)].norm();
            let mean = 0.5 * (a + d);
            let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            Ok(vec![mean + r, mean - r])
        }
        _ => Ok(sorted_decreasing(h.clone().symmetric_eigenvalues())),
    }
}

/// Decreasing eigenvalues together with the unitary `Q` (columns in the same order).
pub fn hermitian_eigen_decomposition(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_hermitian(h)?;
    let eig = h.clone().symmetric_eigen();
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let q = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, q))
}

/// Pfaffian of a real antisymmetric matrix by skew-symmetric Gaussian
/// elimination with partial pivoting (Parlett–Reid).
///
/// Returns 0 when a pivot falls below `1e-12` times the largest entry.
pub fn pfaffian(a: &DMatrix<f64>) -> Result<f64> {
    let m = a.nrows();
    if a.ncols() != m {
        return Err(Error::Structural("Pfaffian needs a square matrix".into()));
    }
    if m % 2 == 1 {
        return Err(Error::Structural(format!(
            "Pfaffian needs even dimension, got {m}"
        )));
    }
    let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    for i in 0..m {
        for j in i..m {
            if (a[(i, j)] + a[(j, i)]).abs() > 1e-10 * scale.max(1.0) {
                return Err(Error::Structural("matrix is not antisymmetric".into()));
            }
        }
    }
    if m == 0 {
        return Ok(1.0);
    }
    let tol = 1e-12 * scale;
    let mut w = a.clone();
    let mut pf = 1.0;
    for k in (0..m - 1).step_by(2) {
        let (offset, _) = (k + 1..m)
            .map(|i| w[(i, k)].abs())
            .enumerate()
            .fold((0, -1.0), |best, (i, v)| if v > best.1 { (i, v) } else { best });
        let kp = k + 1 + offset;
        if kp != k + 1 {
            w.swap_rows(k + 1, kp);
            w.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let pivot = w[(k, k + 1)];
        if pivot.abs() <= tol || scale == 0.0 {
            return Ok(0.0);
        }
        pf *= pivot;
        if k + 2 < m {
            let tau: Vec<f64> = (k + 2..m).map(|j| w[(k, j)] / pivot).collect();
            let col: Vec<f64> = (k + 2..m).map(|i| w[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..m).enumerate() {
                for (jj, j) in (k + 2..m).enumerate() {
                    w[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
    }
    Ok(pf)
}

/// Sign of the Pfaffian: `+1`, `-1`, or `0` for numerically singular input.
pub fn pfaffian_sign(a: &DMatrix<f64>) -> Result<i8> {
    let pf = pfaffian(a)?;
    Ok(if pf > 0.0 {
        1
    } else if pf < 0.0 {
        -1
    } else {
        0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_and_2x2() {
        let d = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(3.0, 0.0)]));
        assert_eq!(hermitian_eigenvalues(&d).unwrap(), vec![3.0, 1.0]);
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)]);
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::Structural(_))));
    }

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
        let mut h = CMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = c(rng.random_range(-2.0..2.0), 0.0);
            for j in (i + 1)..n {
                let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        h
    }

    /// Complex determinant by Gaussian elimination, used for the characteristic polynomial.
    fn det(mut m: CMatrix) -> C64 {
        let n = m.nrows();
        let mut d = c(1.0, 0.0);
        for k in 0..n {
            let p = (k..n).max_by(|&a, &b| m[(a, k)].norm().total_cmp(&m[(b, k)].norm())).unwrap();
            if m[(p, k)].norm() == 0.0 {
                return c(0.0, 0.0);
            }
            if p != k {
                m.swap_rows(p, k);
                d = -d;
            }
            d *= m[(k, k)];
            for i in (k + 1)..n {
                let f = m[(i, k)] / m[(k, k)];
                for j in k..n {
                    let v = m[(k, j)];
                    m[(i, j)] -= f * v;
                }
            }
        }
        d
    }

    #[test]
    fn matches_characteristic_polynomial_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(6, &mut rng);
        let ev = hermitian_eigenvalues(&h).unwrap();
        let charpoly = |x: f64| {
            let shifted = &h - CMatrix::identity(6, 6) * c(x, 0.0);
            det(shifted).re
        };
        // bisection between consecutive sign changes found on a fine scan
        let bound = 12.0;
        let steps = 24_000;
        let mut roots = Vec::new();
        let mut prev_x = -bound;
        let mut prev_v = charpoly(prev_x);
        for s in 1..=steps {
            let x = -bound + 2.0 * bound * s as f64 / steps as f64;
            let v = charpoly(x);
            if prev_v == 0.0 || prev_v.signum() != v.signum() {
                let (mut lo, mut hi) = (prev_x, x);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if charpoly(mid).signum() == charpoly(lo).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev_x = x;
            prev_v = v;
        }
        roots.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(roots.len(), 6);
        for (a, b) in ev.iter().zip(&roots) {
            assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn decomposition_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [3, 5, 8] {
            let h = random_hermitian(n, &mut rng);
            let (vals, q) = hermitian_eigen_decomposition(&h).unwrap();
            let lam = CMatrix::from_diagonal(&DVector::from_iterator(
                n,
                vals.iter().map(|&v| c(v, 0.0)),
            ));
            let rebuilt = &q * lam * q.adjoint();
            assert!(max_abs(&(&h - rebuilt)) <= 1e-8 * max_abs(&h));
            assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn pfaffian_2x2_signs() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert_eq!(pfaffian_sign(&a).unwrap(), 1);
        assert_eq!(pfaffian_sign(&(-a)).unwrap(), -1);
        assert_eq!(pfaffian_sign(&DMatrix::zeros(2, 2)).unwrap(), 0);
        assert!(pfaffian(&DMatrix::zeros(3, 3)).is_err());
    }

    fn random_antisymmetric(m: usize, rng: &mut impl Rng) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in (i + 1)..m {
                let v: f64 = rng.random_range(-1.0..1.0);
                a[(i, j)] = v;
                a[(j, i)] = -v;
            }
        }
        a
    }

    #[test]
    fn pfaffian_squared_is_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in [2, 4, 6, 8] {
            let a = random_antisymmetric(m, &mut rng);
            let pf = pfaffian(&a).unwrap();
            let d = a.clone().determinant();
            assert!((pf * pf - d).abs() <= 1e-10 * d.abs().max(1.0));
        }
    }

    #[test]
    fn pfaffian_4x4_explicit_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let a = random_antisymmetric(4, &mut rng);
            let explicit =
                a[(0, 1)] * a[(2, 3)] - a[(0, 2)] * a[(1, 3)] + a[(0, 3)] * a[(1, 2)];
            assert!((pfaffian(&a).unwrap() - explicit).abs() < 1e-12);
        }
    }
}
