//! Alternative t model: one latent Gamma(nu/2, nu/2) divisor per coordinate,
//! Y_j = mu_j + X_j / sqrt(tau_j).
//!
//! The likelihood has no closed form, so the E-step is estimated. Two routes
//! are implemented:
//!
//! * a Gibbs sampler over the divisors, whose full conditional is
//!   `f(tau) = C tau^{alpha-1} exp(-tau beta - sqrt(tau) gamma)` with
//!   alpha = (nu+1)/2; after rescaling by beta it reduces to
//!   `f_g(t) = C t^{alpha-1} exp(-t - 2 g sqrt(t))` with g = gamma/(2 sqrt(beta)).
//!   For the default nu = 3 (alpha = 2) draws come from two rejection
//!   samplers: Gamma(2, delta) proposals for g <= 1, and for g > 1 an
//!   exponential proposal on s = sqrt(t). Other nu fall back to inverse-CDF
//!   sampling on an adaptive grid.
//! * a mean-field approximation that keeps only diag(Theta), making each
//!   divisor's conditional an explicit Gamma(alpha, beta_ij).
//!
//! Both produce the moments E[sqrt(tau) sqrt(tau)'] that the weighted
//! M-step plugs into the lasso solve.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;

use crate::error::{Error, Result};
use crate::glasso::{glasso_fit_warm, GlassoState};
use crate::matrix::{Mat, SymMatrix};
use crate::rng::{self, Stream};
use crate::special::{erfcx, gamma_moment, ln_gamma, normal_cdf};
use crate::types::{Dataset, EStepKind, FitConfig, FitResult};

/// Parameters of the full conditional of one divisor given the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullConditionalParams {
    /// Shape (nu + 1) / 2.
    pub alpha: f64,
    /// Rate-like coefficient (nu + (Y_ij - mu_j)^2 theta_jj) / 2.
    pub beta: f64,
    /// Coefficient on sqrt(tau): (Y_ij - mu_j) Theta_{j,\j} X_{i,\j}.
    pub gamma: f64,
}

impl FullConditionalParams {
    /// The rescaled coefficient gamma' = gamma / (2 sqrt(beta)).
    pub fn gamma_prime(&self) -> f64 {
        self.gamma / (2.0 * self.beta.sqrt())
    }
}

/// Full conditional parameters for coordinate `j` of observation `y_i`,
/// reconstructing the latent normals as X_ik = sqrt(tau_ik) (Y_ik - mu_k).
pub fn full_conditional_params(
    y_i: &[f64],
    tau_rest: &[f64],
    mu: &[f64],
    theta: &SymMatrix,
    nu: f64,
    j: usize,
) -> FullConditionalParams {
    let dj = y_i[j] - mu[j];
    let row = theta.row(j);
    let mut coupling = 0.0;
    for k in 0..y_i.len() {
        if k != j && row[k] != 0.0 {
            coupling += row[k] * tau_rest[k].sqrt() * (y_i[k] - mu[k]);
        }
    }
    FullConditionalParams {
        alpha: (nu + 1.0) / 2.0,
        beta: (nu + dj * dj * row[j]) / 2.0,
        gamma: dj * coupling,
    }
}

/// Acceptance accounting for the two rejection branches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SamplerStats {
    pub gamma_branch_proposals: u64,
    pub gamma_branch_accepts: u64,
    pub hybrid_branch_proposals: u64,
    pub hybrid_branch_accepts: u64,
}

impl SamplerStats {
    pub fn overall_acceptance(&self) -> f64 {
        let proposals = self.gamma_branch_proposals + self.hybrid_branch_proposals;
        let accepts = self.gamma_branch_accepts + self.hybrid_branch_accepts;
        if proposals == 0 {
            1.0
        } else {
            accepts as f64 / proposals as f64
        }
    }

    pub fn merge(&mut self, other: &SamplerStats) {
        self.gamma_branch_proposals += other.gamma_branch_proposals;
        self.gamma_branch_accepts += other.gamma_branch_accepts;
        self.hybrid_branch_proposals += other.hybrid_branch_proposals;
        self.hybrid_branch_accepts += other.hybrid_branch_accepts;
    }
}

/// Optimal rate of the Gamma(2, delta) proposal for gamma' < 0; 1 on
/// [0, 1], where the unit-rate proposal already dominates the tail.
pub fn proposal_delta(gamma_prime: f64) -> f64 {
    if gamma_prime < 0.0 {
        let g2 = gamma_prime * gamma_prime;
        1.0 + (g2 - (g2 * g2 + 8.0 * g2).sqrt()) / 4.0
    } else {
        1.0
    }
}

fn ln_uniform(rng: &mut Stream) -> f64 {
    let u: f64 = rng.gen();
    u.max(1e-300).ln()
}

const ENVELOPE_SLACK: f64 = 1e-9;

/// Draws from `f_g(t) = C t exp(-t - 2 g sqrt(t))`, the alpha = 2 (nu = 3)
/// reduced full conditional.
pub fn sample_fgamma(gamma_prime: f64, rng: &mut Stream) -> f64 {
    sample_fgamma_with_stats(gamma_prime, rng, None)
}

pub fn sample_fgamma_with_stats(
    gamma_prime: f64,
    rng: &mut Stream,
    mut stats: Option<&mut SamplerStats>,
) -> f64 {
    debug_assert!(gamma_prime.is_finite());
    if gamma_prime <= 1.0 {
        let delta = proposal_delta(gamma_prime);
        // For gamma' < 0 the envelope constant is (C/delta^2) exp(g^2/(1-delta));
        // the log acceptance ratio below is f/(M g_delta) with C cancelled.
        let shift =
            if gamma_prime < 0.0 { gamma_prime * gamma_prime / (1.0 - delta) } else { 0.0 };
        loop {
            let t = -(ln_uniform(rng) + ln_uniform(rng)) / delta;
            let ln_ratio = -(1.0 - delta) * t - 2.0 * gamma_prime * t.sqrt() - shift;
            debug_assert!(ln_ratio <= ENVELOPE_SLACK, "envelope violated: {ln_ratio}");
            if let Some(s) = stats.as_deref_mut() {
                s.gamma_branch_proposals += 1;
            }
            if ln_uniform(rng) <= ln_ratio {
                if let Some(s) = stats.as_deref_mut() {
                    s.gamma_branch_accepts += 1;
                }
                return t;
            }
        }
    } else {
        // Transformed target h(s) = 2C s^3 exp(-s^2 - 2 g s) against an
        // Exp(delta) proposal with delta = (g + 1)/2; the envelope constant
        // comes from maximizing the log ratio numerically.
        let delta = (gamma_prime + 1.0) / 2.0;
        let log_ratio = |s: f64| 3.0 * s.ln() - s * s - (2.0 * gamma_prime - delta) * s;
        let m_log = max_concave_1d(log_ratio, hybrid_ratio_mode(gamma_prime, delta));
        loop {
            let s = -ln_uniform(rng) / delta;
            let ln_ratio = log_ratio(s) - m_log;
            debug_assert!(ln_ratio <= ENVELOPE_SLACK, "envelope violated: {ln_ratio}");
            if let Some(st) = stats.as_deref_mut() {
                st.hybrid_branch_proposals += 1;
            }
            if ln_uniform(rng) <= ln_ratio {
                if let Some(st) = stats.as_deref_mut() {
                    st.hybrid_branch_accepts += 1;
                }
                return s * s;
            }
        }
    }
}

/// Stationary point of the hybrid branch's log density ratio, used to seed
/// the numerical maximization.
fn hybrid_ratio_mode(gamma_prime: f64, delta: f64) -> f64 {
    let b = 2.0 * gamma_prime - delta;
    (-b + (b * b + 24.0).sqrt()) / 4.0
}

/// Golden-section maximization of a strictly concave function around `seed`.
fn max_concave_1d(f: impl Fn(f64) -> f64, seed: f64) -> f64 {
    let mut lo = seed / 8.0;
    let mut hi = seed * 8.0;
    let phi = 0.618_033_988_749_894_9;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..120 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2) + 1e-12
}

/// Normalizing constant of `f_g(t) = C(g) t exp(-t - 2 g sqrt(t))`:
/// `1/C = 1 + g^2 - g (2g^2 + 3) sqrt(pi) exp(g^2) (1 - Phi(g sqrt(2)))`.
///
/// The product `exp(g^2) (1 - Phi(g sqrt(2)))` equals `erfcx(g)/2`, which is
/// the numerically stable object for positive g; far in that tail the whole
/// expression cancels to O(g^-4) and an asymptotic series takes over.
pub fn normalizing_constant_c(gamma: f64) -> f64 {
    debug_assert!(gamma.is_finite());
    let sqrt_pi = core::f64::consts::PI.sqrt();
    let inv_c = if gamma >= 30.0 {
        // 1/C = (3/4) g^-4 - (15/4) g^-6 + (315/16) g^-8 - (945/8) g^-10 + ...
        let gi2 = 1.0 / (gamma * gamma);
        let gi4 = gi2 * gi2;
        gi4 * (0.75 + gi2 * (-3.75 + gi2 * (19.6875 - gi2 * 118.125)))
    } else if gamma >= 0.0 {
        1.0 + gamma * gamma - gamma * (2.0 * gamma * gamma + 3.0) * sqrt_pi * erfcx(gamma) / 2.0
    } else {
        // All terms positive on this side; only exp(g^2) can overflow, in
        // which case C legitimately underflows.
        let tail = 1.0 - normal_cdf(gamma * core::f64::consts::SQRT_2);
        1.0 + gamma * gamma
            - gamma * (2.0 * gamma * gamma + 3.0) * sqrt_pi * (gamma * gamma).exp() * tail
    };
    if inv_c.is_finite() {
        (1.0 / inv_c).max(f64::MIN_POSITIVE)
    } else {
        f64::MIN_POSITIVE
    }
}

/// One draw of tau_ij from its full conditional: a draw from the reduced
/// density at gamma' = gamma/(2 sqrt(beta)), divided by beta.
pub fn sample_full_conditional(params: &FullConditionalParams, rng: &mut Stream) -> f64 {
    sample_full_conditional_with_stats(params, rng, None)
}

pub fn sample_full_conditional_with_stats(
    params: &FullConditionalParams,
    rng: &mut Stream,
    stats: Option<&mut SamplerStats>,
) -> f64 {
    let g = params.gamma_prime();
    let t = if params.alpha == 2.0 {
        sample_fgamma_with_stats(g, rng, stats)
    } else {
        sample_fab_grid(params.alpha, g, rng)
    };
    t / params.beta
}

/// Inverse-CDF draw from `f(t) = C t^{alpha-1} exp(-t - 2 g sqrt(t))` on an
/// adaptive grid in s = sqrt(t); the fallback for nu != 3.
fn sample_fab_grid(alpha: f64, gamma_prime: f64, rng: &mut Stream) -> f64 {
    debug_assert!(alpha > 0.5);
    let k = 2.0 * alpha - 1.0; // s-space density: s^k exp(-s^2 - 2 g s)
    let mode = (-gamma_prime + (gamma_prime * gamma_prime + 2.0 * k).sqrt()) / 2.0;
    let curvature = 2.0 + k / (mode * mode);
    let width = 12.0 / curvature.sqrt();
    let lo = (mode - width).max(mode * 1e-6);
    let hi = mode + width;
    const CELLS: usize = 2048;
    let h = (hi - lo) / CELLS as f64;
    let log_f = |s: f64| k * s.ln() - s * s - 2.0 * gamma_prime * s;
    let log_mode = log_f(mode);
    let mut cdf = [0.0f64; CELLS + 1];
    let mut prev = (log_f(lo) - log_mode).exp();
    for i in 1..=CELLS {
        let s = lo + i as f64 * h;
        let cur = (log_f(s) - log_mode).exp();
        cdf[i] = cdf[i - 1] + 0.5 * h * (prev + cur);
        prev = cur;
    }
    let total = cdf[CELLS];
    let u: f64 = rng.gen::<f64>() * total;
    let idx = cdf.partition_point(|&c| c < u).clamp(1, CELLS);
    let frac = (u - cdf[idx - 1]) / (cdf[idx] - cdf[idx - 1]).max(f64::MIN_POSITIVE);
    let s = lo + (idx - 1) as f64 * h + frac * h;
    s * s
}

/// Per-observation divisor moments produced by an E-step.
#[derive(Debug, Clone, PartialEq)]
pub struct SqrtTauMoments {
    /// E[tau_ij], one per coordinate (the diagonal of `e_sqrt_outer`).
    pub e_tau: Vec<f64>,
    /// E[sqrt(tau_ij)].
    pub e_sqrt_tau: Vec<f64>,
    /// E[sqrt(tau_i) sqrt(tau_i)'], diagonal = `e_tau`.
    pub e_sqrt_outer: SymMatrix,
}

impl SqrtTauMoments {
    /// Unit moments: turns the weighted M-step into the Gaussian one.
    pub fn ones(p: usize) -> Self {
        SqrtTauMoments {
            e_tau: vec![1.0; p],
            e_sqrt_tau: vec![1.0; p],
            e_sqrt_outer: SymMatrix::from_fn(p, |_, _| 1.0),
        }
    }
}

/// Monte Carlo E-step for one observation: sweep the Gibbs sampler over the
/// p divisors and average sqrt(tau) sqrt(tau)' over the post-burn-in sweeps.
pub fn gibbs_e_step(
    y_i: &[f64],
    mu: &[f64],
    theta: &SymMatrix,
    nu: f64,
    sweeps: usize,
    burn_in: usize,
    rng: &mut Stream,
) -> Result<SqrtTauMoments> {
    gibbs_e_step_with_stats(y_i, mu, theta, nu, sweeps, burn_in, rng, None, None)
}

#[allow(clippy::too_many_arguments)]
pub fn gibbs_e_step_with_stats(
    y_i: &[f64],
    mu: &[f64],
    theta: &SymMatrix,
    nu: f64,
    sweeps: usize,
    burn_in: usize,
    rng: &mut Stream,
    mut stats: Option<&mut SamplerStats>,
    mut harvest: Option<&mut Vec<f64>>,
) -> Result<SqrtTauMoments> {
    if sweeps == 0 {
        return Err(Error::invalid("gibbs sweeps must be at least 1"));
    }
    theta.require_pd()?;
    let p = y_i.len();
    let mut tau = vec![1.0f64; p];
    let mut sqrt_tau = vec![1.0f64; p];
    let mut acc_outer = SymMatrix::zeros(p);
    let mut acc_sqrt = vec![0.0f64; p];

    for sweep in 0..(burn_in + sweeps) {
        for j in 0..p {
            let params = full_conditional_params(y_i, &tau, mu, theta, nu, j);
            if let Some(h) = harvest.as_deref_mut() {
                h.push(params.gamma_prime());
            }
            let draw = sample_full_conditional_with_stats(&params, rng, stats.as_deref_mut());
            tau[j] = draw;
            sqrt_tau[j] = draw.sqrt();
        }
        if sweep >= burn_in {
            for j in 0..p {
                acc_sqrt[j] += sqrt_tau[j];
                for k in j..p {
                    let v = acc_outer.get(j, k) + sqrt_tau[j] * sqrt_tau[k];
                    acc_outer.set(j, k, v);
                }
            }
        }
    }

    let m = sweeps as f64;
    let e_sqrt_outer = acc_outer.scale(1.0 / m);
    let e_tau = e_sqrt_outer.diag();
    let e_sqrt_tau: Vec<f64> = acc_sqrt.iter().map(|v| v / m).collect();
    Ok(SqrtTauMoments { e_tau, e_sqrt_tau, e_sqrt_outer })
}

/// Mean-field E-step: each divisor's approximating conditional is the
/// explicit Gamma(alpha, beta_ij) that keeps only diag(Theta), so all
/// moments are exact Gamma moments and the off-diagonal expectations factor.
pub fn variational_e_step(y_i: &[f64], mu: &[f64], theta: &SymMatrix, nu: f64) -> SqrtTauMoments {
    let p = y_i.len();
    let alpha = (nu + 1.0) / 2.0;
    let sqrt_factor = (ln_gamma(alpha + 0.5) - ln_gamma(alpha)).exp();
    let mut e_tau = Vec::with_capacity(p);
    let mut e_sqrt_tau = Vec::with_capacity(p);
    for j in 0..p {
        let d = y_i[j] - mu[j];
        let beta = (nu + d * d * theta.get(j, j)) / 2.0;
        e_tau.push(alpha / beta);
        e_sqrt_tau.push(sqrt_factor / beta.sqrt());
    }
    let e_sqrt_outer = SymMatrix::from_fn(p, |j, k| {
        if j == k {
            e_tau[j]
        } else {
            e_sqrt_tau[j] * e_sqrt_tau[k]
        }
    });
    SqrtTauMoments { e_tau, e_sqrt_tau, e_sqrt_outer }
}

/// Weighted M-step: coordinatewise weighted mean, then a lasso solve on
/// `S* = (1/n) sum_i E[sqrt(tau_i) sqrt(tau_i)'] .* (Y_i - mu)(Y_i - mu)'`.
pub struct TstarMStepOut {
    pub mu: Vec<f64>,
    pub theta: SymMatrix,
    pub state: GlassoState,
    pub s_star: SymMatrix,
}

pub fn tstar_m_step(
    y: &Dataset,
    moments: &[SqrtTauMoments],
    rho: f64,
    glasso_tol: f64,
    glasso_max_sweeps: usize,
    warm: Option<&GlassoState>,
) -> Result<TstarMStepOut> {
    let (n, p) = (y.n(), y.p());
    if moments.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: moments.len() });
    }
    let mut mu = vec![0.0; p];
    let mut wsum = vec![0.0; p];
    for (i, m) in moments.iter().enumerate() {
        for j in 0..p {
            mu[j] += m.e_tau[j] * y.row(i)[j];
            wsum[j] += m.e_tau[j];
        }
    }
    for (m, w) in mu.iter_mut().zip(&wsum) {
        if *w <= 0.0 {
            return Err(Error::invalid("divisor expectations must be positive"));
        }
        *m /= w;
    }

    let mut s_star = SymMatrix::zeros(p);
    let mut d = vec![0.0; p];
    for (i, m) in moments.iter().enumerate() {
        for (dj, (v, mj)) in d.iter_mut().zip(y.row(i).iter().zip(&mu)) {
            *dj = v - mj;
        }
        for j in 0..p {
            for k in j..p {
                let v = s_star.get(j, k) + m.e_sqrt_outer.get(j, k) * d[j] * d[k];
                s_star.set(j, k, v);
            }
        }
    }
    s_star = s_star.scale(1.0 / n as f64);

    let rho_inner = 2.0 * rho / n as f64;
    let fit = glasso_fit_warm(&s_star, rho_inner, glasso_tol, glasso_max_sweeps, warm)
        .map_err(Error::from)?;
    Ok(TstarMStepOut { mu, theta: fit.theta_hat, state: fit.state, s_star })
}

/// Hidden-data surrogate objective tracked by the t* EM loop:
/// `(n/2) log|Theta| - (n/2) tr(Theta S*) - rho ||Theta||_1`.
pub fn surrogate_objective(
    theta: &SymMatrix,
    s_star: &SymMatrix,
    n: usize,
    rho: f64,
) -> Result<f64> {
    let chol = theta.cholesky()?;
    Ok(0.5 * n as f64 * (chol.logdet() - s_star.trace_product(theta)) - rho * theta.one_norm())
}

/// Sampler diagnostics for a whole fit.
#[derive(Debug, Clone, Default)]
pub struct TstarDiagnostics {
    pub stats: SamplerStats,
    /// gamma' values the Gibbs E-steps encountered (empty for variational).
    pub gamma_primes: Vec<f64>,
}

/// Penalized EM fit of the t* model; `config.estep_kind` picks the
/// variational or Monte Carlo E-step.
pub fn tstar_fit(y: &Dataset, config: &FitConfig) -> Result<FitResult> {
    tstar_fit_with_diagnostics(y, config, None).map(|(fit, _)| fit)
}

pub fn tstar_fit_with_diagnostics(
    y: &Dataset,
    config: &FitConfig,
    harvest: Option<usize>,
) -> Result<(FitResult, TstarDiagnostics)> {
    config.validate(true)?;
    let monte_carlo = match config.estep_kind {
        EStepKind::Variational => false,
        EStepKind::MonteCarlo => true,
        _ => return Err(Error::invalid("tstar_fit expects a variational or monte_carlo E-step")),
    };
    let (n, p) = (y.n(), y.p());
    let mut diag = TstarDiagnostics::default();

    let s = y.scatter_about(&y.column_means());
    let init = glasso_fit_warm(
        &s,
        config.glasso_rho(n),
        config.glasso_tol,
        config.glasso_max_sweeps,
        None,
    )
    .map_err(Error::from)?;

    let mut mu = y.column_medians();
    let mut theta = init.theta_hat;
    let mut state = Some(init.state);
    let mut moments: Vec<SqrtTauMoments> = Vec::new();
    let mut trace: Vec<f64> = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    for iter in 1..=config.em_max_iter {
        // E-step.
        moments.clear();
        if monte_carlo {
            // Halve the sweep budget once the loop has settled.
            let sweeps =
                if iter > 5 { (config.gibbs_sweeps / 2).max(1) } else { config.gibbs_sweeps };
            for i in 0..n {
                let mut r =
                    rng::derive(config.seed, &[rng::TAG_GIBBS, i as u64, iter as u64]);
                let mut harvest_buf = harvest.map(|_| Vec::new());
                let m = gibbs_e_step_with_stats(
                    y.row(i),
                    &mu,
                    &theta,
                    config.nu,
                    sweeps,
                    config.gibbs_burn_in,
                    &mut r,
                    Some(&mut diag.stats),
                    harvest_buf.as_mut(),
                )?;
                if let (Some(buf), Some(cap)) = (harvest_buf, harvest) {
                    if diag.gamma_primes.len() < cap {
                        diag.gamma_primes.extend(buf);
                    }
                }
                moments.push(m);
            }
        } else {
            for i in 0..n {
                moments.push(variational_e_step(y.row(i), &mu, &theta, config.nu));
            }
        }

        // M-step.
        let m = tstar_m_step(
            y,
            &moments,
            config.rho,
            config.glasso_tol,
            config.glasso_max_sweeps,
            state.as_ref(),
        )?;
        mu = m.mu;
        theta = m.theta;
        state = Some(m.state);
        iterations = iter;

        trace.push(surrogate_objective(&theta, &m.s_star, n, config.rho)?);

        // Stopping: relative change of the surrogate, smoothed over a
        // 3-iteration moving average when the E-step is stochastic.
        let window = if monte_carlo { 3 } else { 1 };
        if trace.len() > window {
            let avg = |end: usize| -> f64 {
                let start = end.saturating_sub(window);
                trace[start..end].iter().sum::<f64>() / (end - start) as f64
            };
            let cur = avg(trace.len());
            let prev = avg(trace.len() - 1);
            if (cur - prev).abs() <= config.em_tol * (1.0 + prev.abs()) {
                converged = true;
                break;
            }
        }
    }

    let mut weights = Mat::zeros(n, p);
    for (i, m) in moments.iter().enumerate() {
        weights.row_mut(i).copy_from_slice(&m.e_tau);
    }
    if moments.is_empty() {
        for i in 0..n {
            weights.row_mut(i).fill(1.0);
        }
    }
    let fit = FitResult::assemble(mu, theta, weights, trace, iterations, converged)?;
    Ok((fit, diag))
}

/// Off-diagonal covariance factor of the t* model:
/// `Cov[Y_j, Y_k] = nu Gamma((nu-1)/2)^2 / (2 Gamma(nu/2)^2) * psi_jk`.
/// Dividing by the variance factor nu/(nu-2) bounds the attainable
/// correlation strictly below one.
pub fn tstar_covariance_multiplier(nu: f64) -> f64 {
    debug_assert!(nu > 2.0);
    nu * (2.0 * (ln_gamma((nu - 1.0) / 2.0) - ln_gamma(nu / 2.0))).exp() / 2.0
}

/// Largest |correlation| the t* model can express at the given degrees of
/// freedom.
pub fn tstar_max_correlation(nu: f64) -> f64 {
    tstar_covariance_multiplier(nu) * (nu - 2.0) / nu
}
