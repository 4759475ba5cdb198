//! Penalized EM for the classical multivariate t model.
//!
//! One latent Gamma(nu/2, nu/2) divisor tau_i per observation gives
//! Y_i = mu + X_i / sqrt(tau_i). The E-step has the closed form
//! E[tau | Y] = (nu + p) / (nu + delta_Y), the M-step is a tau-weighted mean
//! and a weighted-covariance lasso solve, and the loop tracks the penalized
//! observed t log-likelihood, which EM theory makes nondecreasing.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;

use crate::error::{Error, Result};
use crate::glasso::{glasso_fit_warm, penalized_gaussian_objective, GlassoState};
use crate::matrix::{Mat, SymMatrix};
use crate::rng;
use crate::special::ln_gamma;
use crate::types::{Dataset, EStepKind, FitConfig, FitResult};

/// Closed-form E-step output.
#[derive(Debug, Clone)]
pub struct ClassicalEStepOut {
    /// E[tau_i | Y_i] = (nu + p) / (nu + delta_i).
    pub tau: Vec<f64>,
    /// Mahalanobis distances delta_i = (Y_i - mu)' Theta (Y_i - mu).
    pub delta: Vec<f64>,
}

/// Conditional expectations of the latent divisors at the current estimates.
pub fn e_step_classical(
    y: &Dataset,
    mu: &[f64],
    theta: &SymMatrix,
    nu: f64,
) -> Result<ClassicalEStepOut> {
    let p = y.p() as f64;
    theta.require_pd()?;
    let mut tau = Vec::with_capacity(y.n());
    let mut delta = Vec::with_capacity(y.n());
    let mut d = vec![0.0; y.p()];
    for i in 0..y.n() {
        for (dj, (v, m)) in d.iter_mut().zip(y.row(i).iter().zip(mu)) {
            *dj = v - m;
        }
        let di = theta.quad_form(&d);
        delta.push(di);
        tau.push((nu + p) / (nu + di));
    }
    Ok(ClassicalEStepOut { tau, delta })
}

/// M-step: tau-weighted mean, then a lasso solve on the weighted scatter
/// S_tauYY(mu) with the penalty rescaled by 2/n to match the n/2-scaled
/// likelihood the EM objective carries.
pub struct MStepOut {
    pub mu: Vec<f64>,
    pub theta: SymMatrix,
    pub state: GlassoState,
}

pub fn m_step_classical(
    y: &Dataset,
    tau: &[f64],
    rho: f64,
    glasso_tol: f64,
    glasso_max_sweeps: usize,
    warm: Option<&GlassoState>,
) -> Result<MStepOut> {
    if tau.len() != y.n() {
        return Err(Error::DimensionMismatch { expected: y.n(), got: tau.len() });
    }
    let tau_sum: f64 = tau.iter().sum();
    if tau.iter().any(|&t| t <= 0.0) || tau_sum <= 0.0 {
        return Err(Error::invalid("tau weights must be positive"));
    }
    let p = y.p();
    let mut mu = vec![0.0; p];
    for (i, &ti) in tau.iter().enumerate() {
        for (m, v) in mu.iter_mut().zip(y.row(i)) {
            *m += ti * v;
        }
    }
    for m in mu.iter_mut() {
        *m /= tau_sum;
    }
    let s = y.weighted_scatter(&mu, Some(tau));
    let rho_inner = 2.0 * rho / y.n() as f64;
    let fit = glasso_fit_warm(&s, rho_inner, glasso_tol, glasso_max_sweeps, warm)
        .map_err(Error::from)?;
    Ok(MStepOut { mu, theta: fit.theta_hat, state: fit.state })
}

/// Observed-data t log-likelihood, summed over rows.
pub fn t_log_likelihood(y: &Dataset, mu: &[f64], theta: &SymMatrix, nu: f64) -> Result<f64> {
    if nu <= 0.0 {
        return Err(Error::invalid("nu must be positive"));
    }
    let p = y.p() as f64;
    let chol = theta.cholesky()?;
    let logdet = chol.logdet();
    let constant = ln_gamma((nu + p) / 2.0)
        - ln_gamma(nu / 2.0)
        - 0.5 * p * (core::f64::consts::PI * nu).ln()
        + 0.5 * logdet;
    let mut total = 0.0;
    let mut d = vec![0.0; y.p()];
    for i in 0..y.n() {
        for (dj, (v, m)) in d.iter_mut().zip(y.row(i).iter().zip(mu)) {
            *dj = v - m;
        }
        let delta = theta.quad_form(&d);
        total += constant - 0.5 * (nu + p) * (1.0 + delta / nu).ln();
    }
    Ok(total)
}

/// Penalized observed objective the EM loop maximizes.
pub fn penalized_t_objective(
    y: &Dataset,
    mu: &[f64],
    theta: &SymMatrix,
    nu: f64,
    rho: f64,
) -> Result<f64> {
    Ok(t_log_likelihood(y, mu, theta, nu)? - rho * theta.one_norm())
}

/// Line search for the degrees of freedom over a grid, judged by the
/// observed t likelihood at fixed (mu, Theta). Ties go to the smaller value.
pub fn estimate_nu(y: &Dataset, mu: &[f64], theta: &SymMatrix, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::invalid("nu grid is empty"));
    }
    if grid.iter().any(|&v| v <= 2.0) {
        return Err(Error::invalid("nu grid values must exceed 2"));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut best = sorted[0];
    let mut best_ll = t_log_likelihood(y, mu, theta, sorted[0])?;
    for &nu in &sorted[1..] {
        let ll = t_log_likelihood(y, mu, theta, nu)?;
        if ll > best_ll {
            best = nu;
            best_ll = ll;
        }
    }
    Ok(best)
}

/// Starting point for an EM fit; penalty paths reuse the previous fit here.
#[derive(Debug, Clone)]
pub struct EmInit {
    pub mu: Vec<f64>,
    pub theta: SymMatrix,
}

struct EmLoop {
    mu: Vec<f64>,
    theta: SymMatrix,
    state: Option<GlassoState>,
    trace: Vec<f64>,
    tau: Vec<f64>,
    iterations: usize,
    converged: bool,
}

fn run_em(y: &Dataset, config: &FitConfig, mu0: Vec<f64>, warm: Option<&EmInit>) -> Result<EmLoop> {
    let n = y.n();
    // Initialization: a warm start when given, otherwise the lasso on the
    // standard empirical covariance.
    let (mu0, theta0, state0) = match warm {
        Some(w) => (w.mu.clone(), w.theta.clone(), None),
        None => {
            let s = y.scatter_about(&y.column_means());
            let init = glasso_fit_warm(
                &s,
                config.glasso_rho(n),
                config.glasso_tol,
                config.glasso_max_sweeps,
                None,
            )
            .map_err(Error::from)?;
            (mu0, init.theta_hat, Some(init.state))
        }
    };

    let mut loop_state = EmLoop {
        mu: mu0,
        theta: theta0,
        state: state0,
        trace: Vec::new(),
        tau: vec![1.0; n],
        iterations: 0,
        converged: false,
    };
    let mut prev =
        penalized_t_objective(y, &loop_state.mu, &loop_state.theta, config.nu, config.rho)?;
    loop_state.trace.push(prev);

    for iter in 1..=config.em_max_iter {
        let e = e_step_classical(y, &loop_state.mu, &loop_state.theta, config.nu)?;
        let m = m_step_classical(
            y,
            &e.tau,
            config.rho,
            config.glasso_tol,
            config.glasso_max_sweeps,
            loop_state.state.as_ref(),
        )?;
        loop_state.mu = m.mu;
        loop_state.theta = m.theta;
        loop_state.state = Some(m.state);
        loop_state.tau = e.tau;
        loop_state.iterations = iter;

        let obj =
            penalized_t_objective(y, &loop_state.mu, &loop_state.theta, config.nu, config.rho)?;
        loop_state.trace.push(obj);
        if (obj - prev).abs() <= config.em_tol * (1.0 + prev.abs()) {
            loop_state.converged = true;
            break;
        }
        prev = obj;
    }
    Ok(loop_state)
}

/// Penalized EM fit of the classical t model.
pub fn tlasso_fit(y: &Dataset, config: &FitConfig) -> Result<FitResult> {
    tlasso_fit_multistart(y, config, 1)
}

/// Multi-start variant: `restarts` runs with jittered initial locations,
/// keeping the best final penalized objective. The first start is the plain
/// coordinatewise median.
pub fn tlasso_fit_multistart(
    y: &Dataset,
    config: &FitConfig,
    restarts: usize,
) -> Result<FitResult> {
    config.validate(true)?;
    let medians = y.column_medians();
    let mut best: Option<(f64, EmLoop)> = None;
    for start in 0..restarts.max(1) {
        let mu0 = if start == 0 {
            medians.clone()
        } else {
            // Jitter each coordinate by up to half its interquartile-ish
            // scale around the median start.
            let mut r = rng::derive(config.seed, &[rng::TAG_JITTER, start as u64]);
            let scales: Vec<f64> = (0..y.p())
                .map(|j| {
                    let mut col: Vec<f64> = (0..y.n()).map(|i| y.row(i)[j]).collect();
                    col.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    (col[3 * col.len() / 4] - col[col.len() / 4]).max(1e-6)
                })
                .collect();
            medians
                .iter()
                .zip(&scales)
                .map(|(m, s)| m + s * (r.gen::<f64>() - 0.5))
                .collect()
        };
        let run = run_em(y, config, mu0)?;
        let obj = *run.trace.last().expect("trace never empty");
        if best.as_ref().map_or(true, |(b, _)| obj > *b) {
            best = Some((obj, run));
        }
    }
    let (_, run) = best.expect("at least one start");

    let mut weights = Mat::zeros(y.n(), y.p());
    for i in 0..y.n() {
        weights.row_mut(i).fill(run.tau[i]);
    }
    FitResult::assemble(run.mu, run.theta, weights, run.trace, run.iterations, run.converged)
}

/// Plain Gaussian fit sharing the tlasso plumbing: lasso on the empirical
/// covariance about the sample mean, unit weights.
pub fn glasso_method_fit(y: &Dataset, config: &FitConfig) -> Result<FitResult> {
    config.validate(false)?;
    let mu = y.column_means();
    let s = y.scatter_about(&mu);
    gaussian_fit_on(y, &s, mu, config)
}

/// Gaussian fit on a caller-supplied covariance matrix (the robust baseline
/// feeds its pairwise estimate through here).
pub fn gaussian_fit_on(
    y: &Dataset,
    s: &SymMatrix,
    mu: Vec<f64>,
    config: &FitConfig,
) -> Result<FitResult> {
    let fit = glasso_fit_warm(
        s,
        config.glasso_rho(y.n()),
        config.glasso_tol,
        config.glasso_max_sweeps,
        None,
    )
    .map_err(Error::from)?;
    let obj = penalized_gaussian_objective(&fit.theta_hat, s, config.glasso_rho(y.n()))?;
    let mut weights = Mat::zeros(y.n(), y.p());
    for i in 0..y.n() {
        weights.row_mut(i).fill(1.0);
    }
    FitResult::assemble(mu, fit.theta_hat, weights, vec![obj], fit.state.sweep_count, true)
}

/// EM fits dispatch through this when asked for `EStepKind::Classical`.
pub(crate) fn assert_classical(config: &FitConfig) -> Result<()> {
    if config.estep_kind != EStepKind::Classical {
        return Err(Error::invalid("tlasso_fit expects the classical E-step"));
    }
    Ok(())
}
