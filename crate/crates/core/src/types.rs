//! Shared domain types: datasets, graphs, estimator configuration and output.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{Mat, SymMatrix};

/// n observations of p variables, with an optional contamination mask
/// carrying simulation ground truth about replaced cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Mat,
    contamination_mask: Option<Vec<bool>>,
}

impl Dataset {
    pub fn new(values: Mat) -> Result<Self> {
        if values.rows() < 2 {
            return Err(Error::invalid("dataset needs at least 2 observations"));
        }
        if values.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("dataset contains non-finite values"));
        }
        Ok(Dataset { values, contamination_mask: None })
    }

    pub fn with_mask(values: Mat, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != values.rows() * values.cols() {
            return Err(Error::DimensionMismatch {
                expected: values.rows() * values.cols(),
                got: mask.len(),
            });
        }
        let mut d = Dataset::new(values)?;
        d.contamination_mask = Some(mask);
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.values.rows()
    }

    pub fn p(&self) -> usize {
        self.values.cols()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    pub fn values(&self) -> &Mat {
        &self.values
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.contamination_mask.as_deref()
    }

    pub fn is_masked(&self, i: usize, j: usize) -> bool {
        self.contamination_mask.as_ref().map_or(false, |m| m[i * self.p() + j])
    }

    /// New dataset keeping the rows listed in `rows` (duplicates allowed, so
    /// this also serves bootstrap resampling).
    pub fn subset_rows(&self, rows: &[usize]) -> Result<Dataset> {
        let p = self.p();
        let mut m = Mat::zeros(rows.len(), p);
        for (out, &i) in rows.iter().enumerate() {
            m.row_mut(out).copy_from_slice(self.row(i));
        }
        Dataset::new(m)
    }

    /// Coordinate-wise sample mean.
    pub fn column_means(&self) -> Vec<f64> {
        let (n, p) = (self.n(), self.p());
        let mut mu = alloc::vec![0.0; p];
        for i in 0..n {
            for (m, v) in mu.iter_mut().zip(self.row(i)) {
                *m += v;
            }
        }
        for m in mu.iter_mut() {
            *m /= n as f64;
        }
        mu
    }

    /// Coordinate-wise median; the robust default initializer for EM fits.
    pub fn column_medians(&self) -> Vec<f64> {
        let (n, p) = (self.n(), self.p());
        (0..p)
            .map(|j| {
                let mut col: Vec<f64> = (0..n).map(|i| self.row(i)[j]).collect();
                col.sort_by(|a, b| a.partial_cmp(b).unwrap());
                if n % 2 == 1 {
                    col[n / 2]
                } else {
                    0.5 * (col[n / 2 - 1] + col[n / 2])
                }
            })
            .collect()
    }

    /// Empirical covariance about `mu` (divisor n).
    pub fn scatter_about(&self, mu: &[f64]) -> SymMatrix {
        self.weighted_scatter(mu, None)
    }

    /// (1/n) sum_i w_i (Y_i - mu)(Y_i - mu)'; unit weights when `w` is None.
    pub fn weighted_scatter(&self, mu: &[f64], w: Option<&[f64]>) -> SymMatrix {
        let (n, p) = (self.n(), self.p());
        let mut s = SymMatrix::zeros(p);
        let mut d = alloc::vec![0.0; p];
        for i in 0..n {
            let wi = w.map_or(1.0, |w| w[i]);
            for (dj, (y, m)) in d.iter_mut().zip(self.row(i).iter().zip(mu)) {
                *dj = y - m;
            }
            for j in 0..p {
                let wd = wi * d[j];
                for k in j..p {
                    let v = s.get(j, k) + wd * d[k];
                    s.set(j, k, v);
                }
            }
        }
        s.scale(1.0 / n as f64)
    }
}

/// Undirected graph read off the support of an estimated concentration
/// matrix: edge (j,k) present iff |theta_jk| > zero_threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphEstimate {
    pub p: usize,
    pub edges: BTreeSet<(usize, usize)>,
    pub zero_threshold: f64,
}

impl GraphEstimate {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, j: usize, k: usize) -> bool {
        let e = if j < k { (j, k) } else { (k, j) };
        self.edges.contains(&e)
    }
}

/// Support extraction with an explicit zero threshold.
pub fn graph_from_precision(theta: &SymMatrix, eps: f64) -> GraphEstimate {
    debug_assert!(eps >= 0.0);
    let p = theta.p();
    let mut edges = BTreeSet::new();
    for j in 0..p {
        for k in (j + 1)..p {
            if theta.get(j, k).abs() > eps {
                edges.insert((j, k));
            }
        }
    }
    GraphEstimate { p, edges, zero_threshold: eps }
}

/// Which E-step the EM wrapper runs; `None` is the plain Gaussian fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EStepKind {
    Classical,
    Variational,
    MonteCarlo,
    None,
}

/// Estimator selector mirroring the CLI `--method` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Method {
    Glasso,
    Tlasso,
    TstarVar,
    TstarMc,
    RobustGlasso,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Glasso => "glasso",
            Method::Tlasso => "tlasso",
            Method::TstarVar => "tstar-var",
            Method::TstarMc => "tstar-mc",
            Method::RobustGlasso => "robust-glasso",
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        Ok(match s {
            "glasso" => Method::Glasso,
            "tlasso" => Method::Tlasso,
            "tstar-var" => Method::TstarVar,
            "tstar-mc" => Method::TstarMc,
            "robust-glasso" => Method::RobustGlasso,
            _ => return Err(Error::invalid("unknown method")),
        })
    }

    pub fn estep_kind(self) -> EStepKind {
        match self {
            Method::Glasso | Method::RobustGlasso => EStepKind::None,
            Method::Tlasso => EStepKind::Classical,
            Method::TstarVar => EStepKind::Variational,
            Method::TstarMc => EStepKind::MonteCarlo,
        }
    }

    pub const ALL: [Method; 5] =
        [Method::Glasso, Method::Tlasso, Method::TstarVar, Method::TstarMc, Method::RobustGlasso];
}

/// Estimator inputs. `rho` is the penalty weight against the full (n-scaled)
/// log-likelihood; EM wrappers and the Gaussian fit hand `2 rho / n` to the
/// inner lasso solver so one `rho` means the same model across methods.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitConfig {
    pub rho: f64,
    /// Degrees of freedom for the t models; must exceed 2 so the covariance
    /// exists.
    pub nu: f64,
    /// Relative objective-change threshold that stops the EM loop.
    pub em_tol: f64,
    pub em_max_iter: usize,
    pub glasso_tol: f64,
    pub glasso_max_sweeps: usize,
    /// Gibbs sweeps averaged per Monte Carlo E-step.
    pub gibbs_sweeps: usize,
    /// Discarded sweeps before averaging starts.
    pub gibbs_burn_in: usize,
    pub seed: u64,
    pub estep_kind: EStepKind,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            rho: 0.1,
            nu: 3.0,
            em_tol: 1e-5,
            em_max_iter: 200,
            glasso_tol: 1e-4,
            glasso_max_sweeps: 200,
            gibbs_sweeps: 200,
            gibbs_burn_in: 50,
            seed: 0,
            estep_kind: EStepKind::Classical,
        }
    }
}

impl FitConfig {
    pub fn validate(&self, for_t_model: bool) -> Result<()> {
        if self.rho < 0.0 {
            return Err(Error::invalid("rho must be nonnegative"));
        }
        if for_t_model && self.nu <= 2.0 {
            return Err(Error::invalid("nu must exceed 2"));
        }
        if self.em_tol <= 0.0 || self.glasso_tol <= 0.0 {
            return Err(Error::invalid("tolerances must be positive"));
        }
        Ok(())
    }

    /// Penalty handed to the inner lasso: Eq.-per-observation scale.
    pub fn glasso_rho(&self, n: usize) -> f64 {
        2.0 * self.rho / n as f64
    }
}

/// Output of any fit: location, concentration and scale estimates, the
/// per-cell E-step weights, and the objective trace of the EM loop.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub mu_hat: Vec<f64>,
    /// Estimated concentration matrix; exact zeros come straight from the
    /// lasso soft-thresholding of the last M-step.
    pub theta_hat: SymMatrix,
    /// Numerical inverse of `theta_hat` (so `sigma_hat * theta_hat` is the
    /// identity to machine precision).
    pub sigma_hat: SymMatrix,
    /// n x p matrix of E[tau]; classical fits replicate one weight per row,
    /// Gaussian fits store ones.
    pub weights: Mat,
    /// Objective value per EM iteration. Nondecreasing for deterministic
    /// E-steps (classical); stochastic for the Monte Carlo t* fit.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub graph: GraphEstimate,
}

impl FitResult {
    pub(crate) fn assemble(
        mu_hat: Vec<f64>,
        theta_hat: SymMatrix,
        weights: Mat,
        objective_trace: Vec<f64>,
        iterations: usize,
        converged: bool,
    ) -> Result<FitResult> {
        let sigma_hat = theta_hat.cholesky()?.inverse();
        let graph = graph_from_precision(&theta_hat, crate::EDGE_EPS);
        Ok(FitResult { mu_hat, theta_hat, sigma_hat, weights, objective_trace, iterations, converged, graph })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn graph_from_precision_examples() {
        let diag = SymMatrix::from_diag(&[1.0, 2.0, 3.0]);
        assert_eq!(graph_from_precision(&diag, 0.0).edge_count(), 0);
        let mut theta = SymMatrix::identity(2);
        theta.set(0, 1, 0.3);
        assert!(graph_from_precision(&theta, 0.1).has_edge(0, 1));
        theta.set(0, 1, 0.05);
        assert_eq!(graph_from_precision(&theta, 0.1).edge_count(), 0);
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(Mat::zeros(1, 3)).is_err());
        let m = Mat::from_vec(2, 2, vec![1.0, 2.0, 3.0, f64::NAN]).unwrap();
        assert!(Dataset::new(m).is_err());
    }

    #[test]
    fn weighted_scatter_matches_hand_value() {
        let m = Mat::from_vec(2, 2, vec![1.0, 0.0, -1.0, 2.0]).unwrap();
        let d = Dataset::new(m).unwrap();
        let s = d.weighted_scatter(&[0.0, 1.0], Some(&[1.0, 3.0]));
        // (1/2) [ 1*(1,-1)(1,-1)' + 3*(-1,1)(-1,1)' ]
        assert_eq!(s.get(0, 0), 2.0);
        assert_eq!(s.get(0, 1), -2.0);
        assert_eq!(s.get(1, 1), 2.0);
    }
}
