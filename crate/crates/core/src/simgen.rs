//! Simulation data generation: random sparse concentration matrices,
//! Gaussian / t / t* samplers, cell-level contamination, and the robust
//! pairwise covariance baseline.
//!
//! Every sampler derives one RNG stream per row from the spec seed, so a
//! dataset is bit-reproducible and growing `n` appends rows without
//! reshuffling the existing ones.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::{Cholesky, Mat, SymMatrix};
use crate::rng::{self, Stream};
use crate::types::{graph_from_precision, Dataset, GraphEstimate};

/// Which distribution the observations are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GeneratorKind {
    Gaussian,
    TClassical,
    TAlternative,
    ContaminatedGaussian,
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Gaussian => "gaussian",
            GeneratorKind::TClassical => "t_classical",
            GeneratorKind::TAlternative => "t_alternative",
            GeneratorKind::ContaminatedGaussian => "contaminated_gaussian",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "gaussian" => GeneratorKind::Gaussian,
            "t_classical" => GeneratorKind::TClassical,
            "t_alternative" => GeneratorKind::TAlternative,
            "contaminated_gaussian" => GeneratorKind::ContaminatedGaussian,
            _ => return Err(Error::invalid("unknown generator")),
        })
    }
}

/// Full description of one simulated dataset.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimSpec {
    pub p: usize,
    pub n: usize,
    /// Probability of each signed value: a lower-triangular entry is -1, 0
    /// or +1 with probabilities edge_prob, 1 - 2 edge_prob, edge_prob.
    pub edge_prob: f64,
    /// Smallest eigenvalue the concentration matrix is rescaled to.
    pub min_eigenvalue: f64,
    pub generator: GeneratorKind,
    /// Degrees of freedom for the t generators.
    pub nu: f64,
    /// Fraction of cells replaced by the contamination generator.
    pub contamination_frac: f64,
    pub seed: u64,
}

impl Default for SimSpec {
    fn default() -> Self {
        SimSpec {
            p: 100,
            n: 50,
            edge_prob: 0.01,
            min_eigenvalue: 0.6,
            generator: GeneratorKind::Gaussian,
            nu: 3.0,
            contamination_frac: 0.02,
            seed: 0,
        }
    }
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::invalid("p must be positive"));
        }
        if self.n < 2 {
            return Err(Error::invalid("n must be at least 2"));
        }
        if !(self.edge_prob >= 0.0 && 2.0 * self.edge_prob < 1.0) {
            return Err(Error::invalid("edge_prob must satisfy 2*edge_prob < 1"));
        }
        if self.min_eigenvalue <= 0.0 {
            return Err(Error::invalid("min_eigenvalue must be positive"));
        }
        if !(0.0..1.0).contains(&self.contamination_frac) {
            return Err(Error::invalid("contamination_frac must lie in [0, 1)"));
        }
        if self.nu <= 0.0 {
            return Err(Error::invalid("nu must be positive"));
        }
        Ok(())
    }
}

/// A drawn concentration matrix with its support graph.
#[derive(Debug, Clone)]
pub struct SparsePrecision {
    pub theta: SymMatrix,
    pub graph: GraphEstimate,
    /// Amount subtracted from the diagonal to reach the target eigenvalue;
    /// `None` when the dominant matrix was already at or below the target
    /// and was returned unmodified.
    pub diagonal_shift: Option<f64>,
}

/// Sparse +/-1 pattern with diagonal 1 + (row nonzero count): strictly
/// diagonally dominant, hence positive definite.
pub fn raw_sparse_precision(spec: &SimSpec, rng: &mut Stream) -> SymMatrix {
    let p = spec.p;
    let mut theta = SymMatrix::zeros(p);
    for j in 1..p {
        for k in 0..j {
            let u: f64 = rng.gen();
            let v = if u < spec.edge_prob {
                -1.0
            } else if u < 2.0 * spec.edge_prob {
                1.0
            } else {
                0.0
            };
            theta.set(j, k, v);
        }
    }
    for k in 0..p {
        let h = theta.row(k).iter().filter(|&&v| v != 0.0).count();
        theta.set(k, k, 1.0 + h as f64);
    }
    theta
}

/// Subtracts a common constant from the diagonal so the smallest eigenvalue
/// lands exactly on `target` (a spectrum shift, so no search is needed).
pub fn rescale_min_eigenvalue(theta: &SymMatrix, target: f64) -> (SymMatrix, Option<f64>) {
    let lambda_min = theta.min_eigenvalue();
    let shift = lambda_min - target;
    if shift <= 0.0 {
        return (theta.clone(), None);
    }
    let mut out = theta.clone();
    out.add_to_diag(-shift);
    (out, Some(shift))
}

/// Random sparse concentration matrix per the simulation protocol, rescaled
/// to the spec's minimum eigenvalue.
pub fn random_sparse_precision(spec: &SimSpec, rng: &mut Stream) -> Result<SparsePrecision> {
    spec.validate()?;
    let raw = raw_sparse_precision(spec, rng);
    let graph = graph_from_precision(&raw, 0.0);
    let (theta, diagonal_shift) = rescale_min_eigenvalue(&raw, spec.min_eigenvalue);
    Ok(SparsePrecision { theta, graph, diagonal_shift })
}

fn standard_normal_vec(p: usize, rng: &mut Stream) -> Vec<f64> {
    (0..p).map(|_| StandardNormal.sample(rng)).collect()
}

/// One draw from N(0, Theta^{-1}) using the Cholesky factor of Theta:
/// solving L' x = z maps z ~ N(0, I) to the target covariance.
fn mvn_row(chol: &Cholesky, mu: &[f64], rng: &mut Stream) -> Vec<f64> {
    let z = standard_normal_vec(mu.len(), rng);
    let x = chol.solve_lt(&z);
    mu.iter().zip(x).map(|(m, v)| m + v).collect()
}

/// n i.i.d. rows from N(mu, Theta^{-1}).
pub fn sample_mvn(n: usize, mu: &[f64], theta: &SymMatrix, seed: u64) -> Result<Dataset> {
    let chol = theta.cholesky()?;
    let p = mu.len();
    let mut m = Mat::zeros(n, p);
    for i in 0..n {
        let mut r = rng::derive(seed, &[rng::TAG_ROW, i as u64]);
        m.row_mut(i).copy_from_slice(&mvn_row(&chol, mu, &mut r));
    }
    Dataset::new(m)
}

/// Classical multivariate t: one Gamma(nu/2, nu/2) divisor per row,
/// Y = mu + X / sqrt(tau).
pub fn sample_t_classical(
    n: usize,
    mu: &[f64],
    theta: &SymMatrix,
    nu: f64,
    seed: u64,
) -> Result<Dataset> {
    let chol = theta.cholesky()?;
    let gamma = Gamma::new(nu / 2.0, 2.0 / nu).map_err(|_| Error::invalid("bad nu"))?;
    let p = mu.len();
    let mut m = Mat::zeros(n, p);
    for i in 0..n {
        let mut r = rng::derive(seed, &[rng::TAG_ROW, i as u64]);
        let tau: f64 = gamma.sample(&mut r);
        let scale = 1.0 / tau.sqrt();
        let z = standard_normal_vec(p, &mut r);
        let x = chol.solve_lt(&z);
        for (out, (mj, xj)) in m.row_mut(i).iter_mut().zip(mu.iter().zip(x)) {
            *out = mj + scale * xj;
        }
    }
    Dataset::new(m)
}

/// Alternative multivariate t: p independent Gamma(nu/2, nu/2) divisors per
/// row, Y_j = mu_j + X_j / sqrt(tau_j).
pub fn sample_t_alternative(
    n: usize,
    mu: &[f64],
    theta: &SymMatrix,
    nu: f64,
    seed: u64,
) -> Result<Dataset> {
    let chol = theta.cholesky()?;
    let gamma = Gamma::new(nu / 2.0, 2.0 / nu).map_err(|_| Error::invalid("bad nu"))?;
    let p = mu.len();
    let mut m = Mat::zeros(n, p);
    for i in 0..n {
        let mut r = rng::derive(seed, &[rng::TAG_ROW, i as u64]);
        let taus: Vec<f64> = (0..p).map(|_| gamma.sample(&mut r)).collect();
        let z = standard_normal_vec(p, &mut r);
        let x = chol.solve_lt(&z);
        for (j, out) in m.row_mut(i).iter_mut().enumerate() {
            *out = mu[j] + x[j] / taus[j].sqrt();
        }
    }
    Dataset::new(m)
}

/// Replaces round(frac * n * p) cells (chosen without replacement) with
/// independent N(mu*, 0.2) draws, mu* = 2.5 * max_j (Theta^{-1})_jj, and
/// records the replaced cells in the mask. Unmasked cells are bit-identical
/// to the input.
pub fn contaminate(
    data: &Dataset,
    theta_true: &SymMatrix,
    frac: f64,
    seed: u64,
) -> Result<Dataset> {
    if !(0.0..1.0).contains(&frac) {
        return Err(Error::invalid("contamination fraction must lie in [0, 1)"));
    }
    let (n, p) = (data.n(), data.p());
    let cells = n * p;
    let count = (frac * cells as f64).round() as usize;
    let mut values = data.values().clone();
    let mut mask = vec![false; cells];
    if count == 0 {
        return Dataset::with_mask(values, mask);
    }

    let sigma = theta_true.cholesky()?.inverse();
    let mu_star = 2.5 * sigma.diag().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sd = 0.2f64.sqrt();

    let mut r = rng::derive(seed, &[rng::TAG_CONTAMINATE]);
    let chosen = rand::seq::index::sample(&mut r, cells, count);
    for idx in chosen.iter() {
        let z: f64 = StandardNormal.sample(&mut r);
        let (i, j) = (idx / p, idx % p);
        values.set(i, j, mu_star + sd * z);
        mask[idx] = true;
    }
    Dataset::with_mask(values, mask)
}

/// Everything a simulation replicate needs: the truth and the data.
#[derive(Debug, Clone)]
pub struct SimulatedData {
    pub theta_true: SymMatrix,
    pub graph_true: GraphEstimate,
    pub data: Dataset,
}

/// Draws the concentration matrix and the dataset described by `spec`.
pub fn generate(spec: &SimSpec) -> Result<SimulatedData> {
    spec.validate()?;
    let mut prec_rng = rng::derive(spec.seed, &[rng::TAG_PRECISION]);
    let prec = random_sparse_precision(spec, &mut prec_rng)?;
    let mu = vec![0.0; spec.p];
    let data = match spec.generator {
        GeneratorKind::Gaussian => sample_mvn(spec.n, &mu, &prec.theta, spec.seed)?,
        GeneratorKind::TClassical => {
            sample_t_classical(spec.n, &mu, &prec.theta, spec.nu, spec.seed)?
        }
        GeneratorKind::TAlternative => {
            sample_t_alternative(spec.n, &mu, &prec.theta, spec.nu, spec.seed)?
        }
        GeneratorKind::ContaminatedGaussian => {
            let clean = sample_mvn(spec.n, &mu, &prec.theta, spec.seed)?;
            contaminate(&clean, &prec.theta, spec.contamination_frac, spec.seed)?
        }
    };
    Ok(SimulatedData { theta_true: prec.theta, graph_true: prec.graph, data })
}

/// Robust pairwise covariance estimate with its bookkeeping.
#[derive(Debug, Clone)]
pub struct RobustCovariance {
    pub matrix: SymMatrix,
    /// Variables whose robust scale collapsed to zero (constant columns);
    /// their variance was floored at 1e-12.
    pub floored: Vec<usize>,
    /// Constant added to the diagonal to make the matrix nonnegative
    /// definite.
    pub diagonal_shift: f64,
}

/// Gaussian-consistency factor for the median absolute deviation.
const MAD_CONSISTENCY: f64 = 1.482_602_218_505_601_8;

fn median_in_place(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// MAD scale calibrated for Gaussian consistency.
fn mad_scale(values: &mut [f64]) -> f64 {
    let med = median_in_place(values);
    for v in values.iter_mut() {
        *v = (*v - med).abs();
    }
    MAD_CONSISTENCY * median_in_place(values)
}

/// Pairwise robust covariances from the identity
/// cov(X,Y) = (s(X+Y)^2 - s(X-Y)^2) / 4 with a MAD scale, then a diagonal
/// shift to restore nonnegative definiteness.
pub fn robust_covariance(data: &Dataset) -> Result<RobustCovariance> {
    let (n, p) = (data.n(), data.p());
    if n < 3 {
        return Err(Error::invalid("robust covariance needs n >= 3"));
    }
    let mut floored = Vec::new();
    let mut scales = vec![0.0; p];
    let mut buf = vec![0.0; n];
    for j in 0..p {
        for (b, i) in buf.iter_mut().zip(0..n) {
            *b = data.row(i)[j];
        }
        let s = mad_scale(&mut buf);
        if s == 0.0 {
            floored.push(j);
        }
        scales[j] = s;
    }

    let mut m = SymMatrix::zeros(p);
    for j in 0..p {
        let var = if scales[j] == 0.0 { 1e-12 } else { scales[j] * scales[j] };
        m.set(j, j, var);
    }
    let mut sum_buf = vec![0.0; n];
    let mut diff_buf = vec![0.0; n];
    for j in 0..p {
        for k in (j + 1)..p {
            for i in 0..n {
                let row = data.row(i);
                sum_buf[i] = row[j] + row[k];
                diff_buf[i] = row[j] - row[k];
            }
            let s_sum = mad_scale(&mut sum_buf);
            let s_diff = mad_scale(&mut diff_buf);
            m.set(j, k, 0.25 * (s_sum * s_sum - s_diff * s_diff));
        }
    }

    let lambda_min = m.min_eigenvalue();
    let diagonal_shift = (-lambda_min).max(0.0) + 1e-8;
    m.add_to_diag(diagonal_shift);
    Ok(RobustCovariance { matrix: m, floored, diagonal_shift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(p: usize, n: usize) -> SimSpec {
        SimSpec { p, n, seed: 42, ..SimSpec::default() }
    }

    #[test]
    fn raw_precision_pattern_and_diagonal() {
        let sp = spec(30, 10);
        let mut r = rng::derive(sp.seed, &[rng::TAG_PRECISION]);
        let raw = raw_sparse_precision(&sp, &mut r);
        for j in 0..30 {
            let h = (0..30).filter(|&k| k != j && raw.get(j, k) != 0.0).count();
            assert_eq!(raw.get(j, j), 1.0 + h as f64);
            for k in 0..j {
                assert!([-1.0, 0.0, 1.0].contains(&raw.get(j, k)));
            }
        }
    }

    #[test]
    fn no_edges_gives_identity_before_rescale() {
        let sp = SimSpec { edge_prob: 0.0, ..spec(12, 10) };
        let mut r = rng::derive(1, &[rng::TAG_PRECISION]);
        let raw = raw_sparse_precision(&sp, &mut r);
        assert_eq!(raw, SymMatrix::identity(12));
    }

    #[test]
    fn rescale_hits_target_eigenvalue() {
        let sp = spec(40, 10);
        let mut r = rng::derive(7, &[rng::TAG_PRECISION]);
        let prec = random_sparse_precision(&sp, &mut r).unwrap();
        let lmin = prec.theta.min_eigenvalue();
        assert!((lmin - 0.6).abs() < 1e-6, "min eigenvalue {lmin}");
        assert!(prec.diagonal_shift.is_some());
        prec.theta.require_pd().unwrap();
    }

    #[test]
    fn expected_edge_count_at_paper_scale() {
        let sp = spec(100, 10);
        let mut r = rng::derive(3, &[rng::TAG_PRECISION]);
        let prec = random_sparse_precision(&sp, &mut r).unwrap();
        let e = prec.graph.edge_count();
        assert!((60..=140).contains(&e), "edge count {e}");
    }

    #[test]
    fn mvn_sample_covariance_matches_truth() {
        let theta = SymMatrix::from_flat(3, vec![2.0, -0.5, 0.0, -0.5, 1.5, 0.3, 0.0, 0.3, 1.0])
            .unwrap();
        let sigma = theta.cholesky().unwrap().inverse();
        let n = 100_000;
        let d = sample_mvn(n, &[0.0; 3], &theta, 11).unwrap();
        let s = d.scatter_about(&[0.0; 3]);
        for j in 0..3 {
            for k in 0..3 {
                // 3 standard errors of a Gaussian covariance entry.
                let se = ((sigma.get(j, j) * sigma.get(k, k) + sigma.get(j, k).powi(2))
                    / n as f64)
                    .sqrt();
                assert!(
                    (s.get(j, k) - sigma.get(j, k)).abs() < 3.0 * se,
                    "entry ({j},{k})"
                );
            }
        }
    }

    #[test]
    fn samplers_are_seed_stable_and_extend_with_n() {
        let theta = SymMatrix::identity(2);
        let a = sample_mvn(5, &[0.0; 2], &theta, 9).unwrap();
        let b = sample_mvn(5, &[0.0; 2], &theta, 9).unwrap();
        let c = sample_mvn(8, &[0.0; 2], &theta, 9).unwrap();
        assert_eq!(a, b);
        for i in 0..5 {
            assert_eq!(a.row(i), c.row(i));
        }
        let t = sample_t_classical(4, &[0.0; 2], &theta, 3.0, 9).unwrap();
        let t2 = sample_t_classical(6, &[0.0; 2], &theta, 3.0, 9).unwrap();
        for i in 0..4 {
            assert_eq!(t.row(i), t2.row(i));
        }
    }

    #[test]
    fn mean_shift_moves_samples_exactly() {
        let theta = SymMatrix::identity(2);
        let a = sample_mvn(4, &[0.0, 0.0], &theta, 5).unwrap();
        let b = sample_mvn(4, &[1.5, -2.0], &theta, 5).unwrap();
        for i in 0..4 {
            assert_eq!(b.row(i)[0], 1.5 + a.row(i)[0]);
            assert_eq!(b.row(i)[1], -2.0 + a.row(i)[1]);
        }
    }

    #[test]
    fn t_classical_variance_and_f_statistic() {
        // p = 1, nu = 3: Var = nu/(nu-2) = 3.
        let theta = SymMatrix::identity(1);
        let d = sample_t_classical(1_000_000, &[0.0], &theta, 3.0, 13).unwrap();
        let var = (0..d.n()).map(|i| d.row(i)[0] * d.row(i)[0]).sum::<f64>() / d.n() as f64;
        assert!((var - 3.0).abs() / 3.0 < 0.05, "variance {var}");

        // delta/p has mean nu/(nu-2) for nu = 6, p = 5 (F_{p,nu} mean).
        let p = 5;
        let theta = SymMatrix::identity(p);
        let n = 10_000;
        let d = sample_t_classical(n, &[0.0; 5], &theta, 6.0, 17).unwrap();
        let mean: f64 = (0..n)
            .map(|i| theta.quad_form(d.row(i)) / p as f64)
            .sum::<f64>()
            / n as f64;
        // Var(F_{5,6}) = 4.05 => se of the mean ~ 0.0201.
        assert!((mean - 1.5).abs() < 3.0 * 0.0201, "mean {mean}");
    }

    #[test]
    fn t_with_huge_nu_matches_gaussian() {
        // Two-sample Kolmogorov-Smirnov on the first coordinate.
        let theta = SymMatrix::identity(1);
        let n = 10_000;
        let a = sample_t_classical(n, &[0.0], &theta, 1e6, 19).unwrap();
        let b = sample_mvn(n, &[0.0], &theta, 23).unwrap();
        let mut xs: Vec<f64> = (0..n).map(|i| a.row(i)[0]).collect();
        let mut ys: Vec<f64> = (0..n).map(|i| b.row(i)[0]).collect();
        xs.sort_by(|u, v| u.partial_cmp(v).unwrap());
        ys.sort_by(|u, v| u.partial_cmp(v).unwrap());
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < n && j < n {
            if xs[i] <= ys[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / n as f64 - j as f64 / n as f64).abs());
        }
        // 0.1% critical value: 1.95 * sqrt(2/n).
        assert!(d < 1.95 * (2.0 / n as f64).sqrt(), "KS statistic {d}");
    }

    #[test]
    fn t_alternative_moments() {
        let psi = SymMatrix::from_flat(2, vec![1.0, 0.9, 0.9, 1.0]).unwrap();
        let theta = psi.cholesky().unwrap().inverse();
        let n = 1_000_000;
        let d = sample_t_alternative(n, &[0.0; 2], &theta, 3.0, 29).unwrap();
        let s = d.scatter_about(&[0.0; 2]);
        // Diagonal: nu/(nu-2) psi_jj = 3; fourth moments of the marginals
        // diverge at nu = 3, so allow a generous 5% band.
        assert!((s.get(0, 0) - 3.0 * psi.get(0, 0)).abs() / 3.0 < 0.05);
        // Off-diagonal: (6/pi) psi_jk, whose estimator variance is finite:
        // Var(Y1 Y2) = 9 (1 + 2 r^2) - (factor r)^2 with r = 0.9.
        let factor = 6.0 / core::f64::consts::PI;
        let r: f64 = 0.9;
        let se = ((9.0 * (1.0 + 2.0 * r * r) - (factor * r).powi(2)) / n as f64).sqrt();
        assert!(
            (s.get(0, 1) - factor * r).abs() < 3.0 * se,
            "covariance {} vs {}",
            s.get(0, 1),
            factor * r
        );
    }

    #[test]
    fn t_alternative_diagonal_psi_gives_independent_coordinates() {
        let theta = SymMatrix::from_diag(&[1.0, 2.0]);
        let n = 200_000;
        let d = sample_t_alternative(n, &[0.0; 2], &theta, 3.0, 31).unwrap();
        let (mut c01, mut csq, mut v0, mut v1) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let r = d.row(i);
            c01 += r[0] * r[1];
            csq += r[0] * r[0] * r[1] * r[1];
            v0 += r[0] * r[0];
            v1 += r[1] * r[1];
        }
        let nf = n as f64;
        let corr = (c01 / nf) / ((v0 / nf).sqrt() * (v1 / nf).sqrt());
        assert!(corr.abs() < 0.01, "corr {corr}");
        // Product of squares factors under independence.
        let sq_ratio = (csq / nf) / ((v0 / nf) * (v1 / nf));
        assert!((sq_ratio - 1.0).abs() < 0.15, "squared ratio {sq_ratio}");
    }

    #[test]
    fn contaminate_examples() {
        let theta = SymMatrix::identity(4);
        let clean = sample_mvn(50, &[0.0; 4], &theta, 37).unwrap();

        let same = contaminate(&clean, &theta, 0.0, 37).unwrap();
        assert_eq!(same.values(), clean.values());
        assert!(same.mask().unwrap().iter().all(|&m| !m));

        let c = contaminate(&clean, &theta, 0.02, 37).unwrap();
        let replaced = c.mask().unwrap().iter().filter(|&&m| m).count();
        assert_eq!(replaced, 4); // round(0.02 * 200)
        for i in 0..50 {
            for j in 0..4 {
                if !c.is_masked(i, j) {
                    assert_eq!(c.row(i)[j], clean.row(i)[j]);
                }
            }
        }
    }

    #[test]
    fn contaminated_cell_statistics() {
        let theta = SymMatrix::identity(2).scale(0.5); // Sigma diag = 2, mu* = 5
        let clean = sample_mvn(20_000, &[0.0; 2], &theta, 41).unwrap();
        let c = contaminate(&clean, &theta, 0.1, 41).unwrap();
        let vals: Vec<f64> = (0..c.n())
            .flat_map(|i| (0..2usize).map(move |j| (i, j)))
            .filter(|&(i, j)| c.is_masked(i, j))
            .map(|(i, j)| c.row(i)[j])
            .collect();
        assert_eq!(vals.len(), 4000);
        let n = vals.len() as f64;
        let m = vals.iter().sum::<f64>() / n;
        let v = vals.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        assert_relative_eq!(m, 5.0, epsilon = 3.0 * (0.2f64 / n).sqrt());
        assert_relative_eq!(v, 0.2, epsilon = 3.0 * 0.2 * (2.0 / n).sqrt());
    }

    #[test]
    fn robust_covariance_close_to_classical_on_clean_data() {
        let theta = SymMatrix::from_flat(3, vec![2.0, -0.8, 0.0, -0.8, 1.5, 0.3, 0.0, 0.3, 1.0])
            .unwrap();
        let sigma = theta.cholesky().unwrap().inverse();
        let d = sample_mvn(10_000, &[0.0; 3], &theta, 43).unwrap();
        let s = d.scatter_about(&d.column_means());
        let r = robust_covariance(&d).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let denom = (sigma.get(j, j) * sigma.get(k, k)).sqrt();
                assert!(
                    (r.matrix.get(j, k) - s.get(j, k)).abs() / denom < 0.1,
                    "entry ({j},{k}): robust {} classical {}",
                    r.matrix.get(j, k),
                    s.get(j, k)
                );
            }
        }
    }

    #[test]
    fn robust_covariance_resists_a_gross_cell() {
        let theta = SymMatrix::identity(3);
        let clean = sample_mvn(500, &[0.0; 3], &theta, 47).unwrap();
        let r_clean = robust_covariance(&clean).unwrap();

        let mut dirty = clean.values().clone();
        dirty.set(7, 1, 1e6);
        let dirty = Dataset::new(dirty).unwrap();
        let r_dirty = robust_covariance(&dirty).unwrap();
        let s_dirty = dirty.scatter_about(&dirty.column_means());

        for j in 0..3 {
            for k in 0..3 {
                let rel = (r_dirty.matrix.get(j, k) - r_clean.matrix.get(j, k)).abs()
                    / r_clean.matrix.get(j, j).max(1.0);
                assert!(rel < 0.05, "robust moved by {rel} at ({j},{k})");
            }
        }
        assert!(s_dirty.get(1, 1) > 1e8, "classical should explode");
        assert!(r_dirty.matrix.min_eigenvalue() >= 0.0);
    }

    #[test]
    fn robust_covariance_flags_constant_columns() {
        let mut m = Mat::zeros(10, 2);
        for i in 0..10 {
            m.set(i, 0, i as f64);
            m.set(i, 1, 4.0);
        }
        let d = Dataset::new(m).unwrap();
        let r = robust_covariance(&d).unwrap();
        assert_eq!(r.floored, vec![1]);
        assert!(r.matrix.get(1, 1) >= 1e-12);
    }
}
