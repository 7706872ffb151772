//! Semiclassical limit of `U(m) -> U(m-1)` branching.
//!
//! For dominant weights `lambda_n` with `eps_n lambda_n -> x`, the measures
//! `mu_n = sum_beta dim(beta)/dim(lambda_n) delta_{eps_n beta}` over `beta`
//! interlacing `lambda_n` converge to the law of the eigenvalues of the
//! `(m-1) x (m-1)` main minor of `U diag(x) U*`, `U` Haar on `U(m)`.

use num_integer::Integer;
use rayon::prelude::*;
use rand::Rng;

use crate::ensembles::{haar_element, Group};
use crate::error::{Error, Result};
use crate::gc_cones::interlaces_with_slack;
use crate::numerics::linalg::{hermitian_eigenvalues, CMatrix, C64};
use crate::rng::{chunks, stream_rng};

fn check_dominant(lambda: &[i64]) -> Result<()> {
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Domain(format!("{lambda:?} is not weakly decreasing")));
    }
    Ok(())
}

/// `prod_{i<j} (lambda_i - lambda_j + j - i)/(j - i)`, exactly.
pub fn weyl_dim_unitary(lambda: &[i64]) -> Result<u128> {
    check_dominant(lambda)?;
    let m = lambda.len();
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..m {
        for j in i + 1..m {
            let a = (lambda[i] - lambda[j]) as u128 + (j - i) as u128;
            let b = (j - i) as u128;
            num = num
                .checked_mul(a)
                .ok_or_else(|| Error::Domain(format!("dimension of {lambda:?} overflows u128")))?;
            den *= b;
            let g = num.gcd(&den);
            num /= g;
            den /= g;
        }
    }
    if den != 1 {
        return Err(Error::Consistency(format!("Weyl formula left remainder {den} for {lambda:?}")));
    }
    Ok(num)
}

/// Finitely many weighted points of a chamber.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub atoms: Vec<(Vec<f64>, f64)>,
}

impl DiscreteMeasure {
    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    /// `(location, weight)` of coordinate `i`.
    pub fn marginal(&self, i: usize) -> Vec<(f64, f64)> {
        self.atoms.iter().map(|(x, w)| (x[i], *w)).collect()
    }
}

/// All integer `beta` with `lambda_1 >= beta_1 >= lambda_2 >= ... >= beta_{m-1} >= lambda_m`.
pub fn interlacing_weights(lambda: &[i64]) -> Result<Vec<Vec<i64>>> {
    check_dominant(lambda)?;
    let m = lambda.len();
    if m == 0 {
        return Err(Error::Domain("empty weight".into()));
    }
    let mut out = vec![Vec::with_capacity(m - 1)];
    for i in 0..m - 1 {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (lambda[i + 1]..=lambda[i]).map(move |b| {
                    let mut v = prefix.clone();
                    v.push(b);
                    v
                })
            })
            .collect();
    }
    Ok(out)
}

/// `mu = sum_beta dim(beta)/dim(lambda) delta_{eps beta}`.
pub fn branching_measure_a(lambda: &[i64], epsilon: f64) -> Result<DiscreteMeasure> {
    let dim = weyl_dim_unitary(lambda)?;
    let betas = interlacing_weights(lambda)?;
    let mut exact_sum = 0u128;
    let mut atoms = Vec::with_capacity(betas.len());
    for beta in betas {
        let d = weyl_dim_unitary(&beta)?;
        exact_sum += d;
        atoms.push((beta.iter().map(|&b| epsilon * b as f64).collect(), d as f64 / dim as f64));
    }
    if exact_sum != dim {
        return Err(Error::Consistency(format!(
            "branching dimensions of {lambda:?} sum to {exact_sum}, expected {dim}"
        )));
    }
    let measure = DiscreteMeasure { atoms };
    if (measure.total_weight() - 1.0).abs() > 1e-9 {
        return Err(Error::Consistency(format!("weights sum to {}", measure.total_weight())));
    }
    Ok(measure)
}

/// One draw of the sorted spectrum of the `(m-1)` minor of `U diag(x) U*`.
pub fn projected_radial_sample<R: Rng + ?Sized>(x: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let m = x.len();
    if m < 2 {
        return Err(Error::Domain("need at least two eigenvalues".into()));
    }
    let u = haar_element(Group::Unitary(m), rng);
    let d = CMatrix::from_fn(m, m, |i, j| if i == j { C64::new(x[i], 0.0) } else { C64::new(0.0, 0.0) });
    let h = &u * d * u.adjoint();
    let minor = h.view((0, 0), (m - 1, m - 1)).into_owned();
    let minor = (&minor + minor.adjoint()).scale(0.5);
    hermitian_eigenvalues(&minor)
}

/// `samples` draws of [`projected_radial_sample`] from one generator.
pub fn projected_radial_law_a<R: Rng + ?Sized>(x: &[f64], samples: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    if x.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Domain(format!("{x:?} is not weakly decreasing")));
    }
    (0..samples).map(|_| projected_radial_sample(x, rng)).collect()
}

/// As [`projected_radial_law_a`], spread over independent streams of `seed`.
pub fn projected_radial_law_a_par(x: &[f64], samples: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let parts: Vec<Vec<Vec<f64>>> = chunks(samples, 2048)
        .into_par_iter()
        .map(|(i, size)| projected_radial_law_a(x, size, &mut stream_rng(seed, i)))
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// `int |F - G|` for a weighted atomic law and an empirical sample.
pub fn wasserstein1_atoms_vs_sample(atoms: &[(f64, f64)], sample: &[f64]) -> f64 {
    let n = sample.len() as f64;
    let mut events: Vec<(f64, f64)> = atoms.to_vec();
    events.extend(sample.iter().map(|&s| (s, -1.0 / n)));
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut diff = 0.0;
    let mut total = 0.0;
    for w in events.windows(2) {
        diff += w[0].1;
        total += diff.abs() * (w[1].0 - w[0].0);
    }
    total
}

/// `int |F - G|` with `G` the Uniform[0, 1] CDF.
pub fn wasserstein1_to_uniform(atoms: &[(f64, f64)]) -> f64 {
    let mut a = atoms.to_vec();
    a.sort_by(|p, q| p.0.total_cmp(&q.0));
    // piecewise: F constant between atoms, G(t) = t on [0, 1]
    let mut cuts: Vec<f64> = vec![0.0, 1.0];
    cuts.extend(a.iter().map(|p| p.0.clamp(0.0, 1.0)));
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let below = |t: f64| a.iter().filter(|p| p.0 <= t).map(|p| p.1).sum::<f64>();
    for w in cuts.windows(2) {
        let (l, r) = (w[0], w[1]);
        if r <= l {
            continue;
        }
        let f = below(l);
        // int_l^r |f - t| dt
        total += if f <= l {
            ((r - f).powi(2) - (l - f).powi(2)) / 2.0
        } else if f >= r {
            ((f - l).powi(2) - (f - r).powi(2)) / 2.0
        } else {
            ((f - l).powi(2) + (r - f).powi(2)) / 2.0
        };
    }
    // mass outside [0, 1]
    for &(x, w) in &a {
        if x < 0.0 {
            total += w * -x;
        } else if x > 1.0 {
            total += w * (x - 1.0);
        }
    }
    total
}

/// Sum over coordinates of the one-dimensional W1 distances.
pub fn coordinate_w1(mu: &DiscreteMeasure, samples: &[Vec<f64>]) -> f64 {
    let k = samples.first().map_or(0, Vec::len);
    (0..k)
        .map(|i| {
            let coord: Vec<f64> = samples.iter().map(|s| s[i]).collect();
            wasserstein1_atoms_vs_sample(&mu.marginal(i), &coord)
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConvergenceRow {
    pub lambda: Vec<i64>,
    pub epsilon: f64,
    pub atoms: usize,
    pub distance: f64,
    /// Batch-means standard error of `distance`.
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConvergenceReport {
    pub x: Vec<f64>,
    pub samples: usize,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// Distances never increase by more than `k` combined standard errors.
    pub fn is_monotone_within(&self, k: f64) -> bool {
        self.rows.windows(2).all(|w| {
            let slack = k * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
            w[1].distance <= w[0].distance + slack
        })
    }

    /// Largest increase `d_{i+1} - d_i` measured in combined standard errors.
    pub fn worst_increase_in_stderr(&self) -> f64 {
        self.rows
            .windows(2)
            .map(|w| {
                let se = (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt().max(f64::MIN_POSITIVE);
                (w[1].distance - w[0].distance) / se
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

const BATCHES: usize = 20;

/// Coordinate W1 between `mu_n` and one shared Monte Carlo sample of the
/// limiting law, for every `(lambda_n, eps_n)`.
pub fn convergence_report(
    lambdas: &[Vec<i64>],
    epsilons: &[f64],
    x: &[f64],
    samples: usize,
    seed: u64,
) -> Result<ConvergenceReport> {
    if lambdas.len() != epsilons.len() {
        return Err(Error::config("epsilons", "one scale per weight is required"));
    }
    if samples < BATCHES {
        return Err(Error::config("samples", format!("need at least {BATCHES} samples")));
    }
    let draws = projected_radial_law_a_par(x, samples, seed)?;
    let batch = samples / BATCHES;
    let rows = lambdas
        .iter()
        .zip(epsilons)
        .map(|(lambda, &eps)| {
            if lambda.len() != x.len() {
                return Err(Error::config("lambda", format!("{lambda:?} and x differ in length")));
            }
            let mu = branching_measure_a(lambda, eps)?;
            let distance = coordinate_w1(&mu, &draws);
            let parts: Vec<f64> = (0..BATCHES)
                .map(|b| coordinate_w1(&mu, &draws[b * batch..(b + 1) * batch]))
                .collect();
            let mean = parts.iter().sum::<f64>() / BATCHES as f64;
            let var = parts.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
            Ok(ConvergenceRow {
                lambda: lambda.clone(),
                epsilon: eps,
                atoms: mu.atoms.len(),
                distance,
                stderr: (var / BATCHES as f64).sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport {
        x: x.to_vec(),
        samples,
        rows,
    })
}

/// Whether every sample interlaces `x` within `slack`.
pub fn all_interlace(x: &[f64], samples: &[Vec<f64>], slack: f64) -> bool {
    samples.iter().all(|s| interlaces_with_slack(x, s, slack).unwrap_or(false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_one_sample, uniform01_cdf};

    #[test]
    fn dimensions() {
        assert_eq!(weyl_dim_unitary(&[5]).unwrap(), 1);
        assert_eq!(weyl_dim_unitary(&[7, 0]).unwrap(), 8);
        assert_eq!(weyl_dim_unitary(&[2, 1, 0]).unwrap(), 8);
        assert_eq!(weyl_dim_unitary(&[1, 0, 0]).unwrap(), 3);
        assert!(weyl_dim_unitary(&[0, 1]).is_err());
    }

    #[test]
    fn dimension_counts_patterns() {
        // dim(lambda) is the number of integer Gelfand-Tsetlin patterns with top row lambda
        fn count(lambda: &[i64]) -> u128 {
            if lambda.len() == 1 {
                return 1;
            }
            interlacing_weights(lambda).unwrap().iter().map(|b| count(b)).sum()
        }
        for lambda in [vec![3, 1, 0], vec![4, 4, 2, 0], vec![2, 1, 0], vec![5, 0]] {
            assert_eq!(weyl_dim_unitary(&lambda).unwrap(), count(&lambda));
        }
    }

    #[test]
    fn u2_branching_is_uniform_grid() {
        let n = 6;
        let mu = branching_measure_a(&[n, 0], 1.0 / n as f64).unwrap();
        assert_eq!(mu.atoms.len(), 7);
        for (x, w) in &mu.atoms {
            assert!((w - 1.0 / 7.0).abs() < 1e-15);
            assert!(x[0] >= 0.0 && x[0] <= 1.0);
        }
        let w1 = wasserstein1_to_uniform(&mu.marginal(0));
        assert!(w1 <= 1.0 / n as f64);
        let zero = branching_measure_a(&[0, 0, 0], 1.0).unwrap();
        assert_eq!(zero.atoms, vec![(vec![0.0, 0.0], 1.0)]);
    }

    #[test]
    fn uniform_w1_closed_form() {
        // atoms at (k + 1/2)/N: W1 = 1/(4N)
        let n = 10;
        let atoms: Vec<_> = (0..n).map(|k| ((k as f64 + 0.5) / n as f64, 1.0 / n as f64)).collect();
        assert!((wasserstein1_to_uniform(&atoms) - 0.025).abs() < 1e-12);
        assert!((wasserstein1_to_uniform(&[(2.0, 1.0)]) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn projected_law_of_u2() {
        let s = projected_radial_law_a_par(&[1.0, 0.0], 20_000, 3).unwrap();
        let xs: Vec<f64> = s.iter().map(|v| v[0]).collect();
        assert!(ks_one_sample(&xs, uniform01_cdf).p_value > 0.01);
        let c = projected_radial_law_a_par(&[2.0, 2.0, 2.0], 10, 1).unwrap();
        assert!(c.iter().flatten().all(|v| (v - 2.0).abs() < 1e-12));
        let t = projected_radial_law_a_par(&[1.0, 0.0, -1.0], 2000, 5).unwrap();
        assert!(all_interlace(&[1.0, 0.0, -1.0], &t, 1e-10));
    }

    #[test]
    fn convergence_u3() {
        let ns = [5i64, 10, 20, 40];
        let lambdas: Vec<Vec<i64>> = ns.iter().map(|&n| vec![2 * n, n, 0]).collect();
        let eps: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
        let rep = convergence_report(&lambdas, &eps, &[2.0, 1.0, 0.0], 40_000, 11).unwrap();
        assert!(rep.is_monotone_within(3.0), "{rep:?}");
        assert!(rep.rows[0].distance > rep.rows[3].distance);
    }
}
