//! Single-letter objective `F1(q, gamma)` of the dynamic capacity formula
//! and the critical multipliers controlling its shape.
//!
//! With `f0 = sqrt((1-2q)^2 + 4 gamma^2)`, `f1` and `f2` the same radical
//! after channels of transmissivity `eta` and `1 - eta`,
//! `F1 = h2((1+f0)/2) + lambda h2((1+f1)/2) - (1+lambda+mu) h2((1+f2)/2)`.
//! `mu*` is the multiplier at which `dF1/dgamma` changes sign and `mu**` the
//! one at which `d2F1/dq2` does.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_unit, Error, Result};
use crate::regions::optimize::maximize;
use crate::regions::LagrangeWeights;
use crate::specfun::{h2, h2_radius};

/// Radicals closer than this to 0 or 1 are treated as singular by the
/// derivative checks.
pub const RADICAL_GUARD: f64 = 1e-3;
/// Finite-difference step for `dF1/dgamma`.
pub const FD_STEP_FIRST: f64 = 1e-6;
/// Finite-difference step for `d2F1/dq2`.
pub const FD_STEP_SECOND: f64 = 1e-4;
/// Smallest `1 - f` admitted by the second-derivative check. Near-pure
/// radicals blow up the fourth derivative through `1 / (1 - f^2)`, and the
/// truncation error of a `1e-4` centred difference exceeds `1e-5` relative.
pub const PURITY_GUARD_SECOND: f64 = 0.05;

/// A point `(q, gamma)` of a single letter with real coherence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AppendixPoint {
    pub q: f64,
    pub gamma: f64,
    pub weights: LagrangeWeights,
    pub eta: f64,
}

impl AppendixPoint {
    /// Requires `eta >= 1/2` and `0 <= gamma <= sqrt(q - q^2)`.
    pub fn new(q: f64, gamma: f64, weights: LagrangeWeights, eta: f64) -> Result<Self> {
        let pt = Self::new_any_eta(q, gamma, weights, eta)?;
        if pt.eta < 0.5 {
            return Err(Error::Regime { eta: pt.eta });
        }
        Ok(pt)
    }

    /// As [`AppendixPoint::new`] but accepting any `eta` in `[0, 1]`.
    pub fn new_any_eta(q: f64, gamma: f64, weights: LagrangeWeights, eta: f64) -> Result<Self> {
        let q = check_unit("q", q)?;
        let eta = check_unit("eta", eta)?;
        let bound = gamma_max(q);
        if !(gamma >= -1e-12 && gamma <= bound + 1e-12) {
            return Err(Error::Domain {
                name: "gamma",
                value: gamma,
                range: "[0, sqrt(q - q^2)]",
            });
        }
        Ok(Self {
            q,
            gamma: gamma.clamp(0.0, bound),
            weights,
            eta,
        })
    }

    fn at(&self, q: f64, gamma: f64) -> Self {
        Self { q, gamma, ..*self }
    }
}

/// `sqrt(q - q^2)`, the largest coherence at population `q`.
pub fn gamma_max(q: f64) -> f64 {
    (q - q * q).max(0.0).sqrt()
}

fn radical(q: f64, gamma: f64, z: f64) -> f64 {
    ((1.0 - 2.0 * z * q).powi(2) + 4.0 * z * gamma * gamma)
        .clamp(0.0, 1.0)
        .sqrt()
}

/// `(f0, f1, f2)`.
pub fn f_radicals(pt: &AppendixPoint) -> (f64, f64, f64) {
    (
        radical(pt.q, pt.gamma, 1.0),
        radical(pt.q, pt.gamma, pt.eta),
        radical(pt.q, pt.gamma, 1.0 - pt.eta),
    )
}

fn objective(q: f64, gamma: f64, eta: f64, lambda: f64, mu: f64) -> f64 {
    h2_radius(radical(q, gamma, 1.0)) + lambda * h2_radius(radical(q, gamma, eta))
        - (1.0 + lambda + mu) * h2_radius(radical(q, gamma, 1.0 - eta))
}

/// `F1(q, gamma)`.
pub fn f1_objective(pt: &AppendixPoint) -> f64 {
    objective(pt.q, pt.gamma, pt.eta, pt.weights.lambda, pt.weights.mu)
}

/// `ln((1 + f) / (1 - f))`.
fn log_ratio(f: f64) -> f64 {
    2.0 * f.atanh()
}

fn check_regular(pt: &AppendixPoint) -> Result<(f64, f64, f64)> {
    let (f0, f1, f2) = f_radicals(pt);
    if !(pt.gamma > 0.0) {
        return Err(Error::Singular(format!("gamma = {} must be positive", pt.gamma)));
    }
    if !(pt.q > 0.0 && pt.q < 1.0) {
        return Err(Error::Singular(format!("q = {} must lie in (0, 1)", pt.q)));
    }
    for (name, f) in [("f0", f0), ("f1", f1), ("f2", f2)] {
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::Singular(format!("{name} = {f} at q = {}, gamma = {}", pt.q, pt.gamma)));
        }
    }
    Ok((f0, f1, f2))
}

const LN_2: f64 = std::f64::consts::LN_2;

/// Closed-form `dF1/dgamma`, with `mu` from the point's weights.
pub fn d_f1_d_gamma(pt: &AppendixPoint) -> Result<f64> {
    let (f0, f1, f2) = check_regular(pt)?;
    let (eta, g) = (pt.eta, pt.gamma);
    let LagrangeWeights { lambda, mu } = pt.weights;
    let v = (1.0 + mu + lambda) * 2.0 * (1.0 - eta) * g / f2 * log_ratio(f2)
        - lambda * 2.0 * eta * g / f1 * log_ratio(f1)
        - 2.0 * g / f0 * log_ratio(f0);
    Ok(v / LN_2)
}

/// Closed-form `d2F1/dq2`.
pub fn d2_f1_d_q2(pt: &AppendixPoint) -> Result<f64> {
    let (f0, f1, f2) = check_regular(pt)?;
    let (eta, q, g) = (pt.eta, pt.q, pt.gamma);
    let LagrangeWeights { lambda, mu } = pt.weights;
    let g2 = g * g;
    let term = |z: f64, f: f64| {
        z * z / (f * f) * (2.0 * z * g2 / f * log_ratio(f) + (1.0 - 2.0 * z * q).powi(2) / (1.0 - f * f))
    };
    let v = -4.0 * term(1.0, f0) - 4.0 * lambda * term(eta, f1)
        + 4.0 * (1.0 + mu + lambda) * term(1.0 - eta, f2);
    Ok(v / LN_2)
}

/// Multiplier at which `dF1/dgamma` changes sign.
pub fn mu_star(pt: &AppendixPoint) -> Result<f64> {
    let (f0, f1, f2) = check_regular(pt)?;
    let eta = pt.eta;
    let lambda = pt.weights.lambda;
    if eta >= 1.0 {
        return Err(Error::Singular("eta = 1 leaves no environment term".into()));
    }
    let den = (1.0 - eta) / f2 * log_ratio(f2);
    let num = lambda * eta / f1 * log_ratio(f1) + log_ratio(f0) / f0;
    Ok(-(1.0 + lambda) + num / den)
}

/// Multiplier at which `d2F1/dq2` changes sign.
pub fn mu_star_star(pt: &AppendixPoint) -> Result<f64> {
    let (f0, f1, f2) = check_regular(pt)?;
    let eta = pt.eta;
    let lambda = pt.weights.lambda;
    if eta >= 1.0 {
        return Err(Error::Singular("eta = 1 leaves no environment term".into()));
    }
    let g2 = pt.gamma * pt.gamma;
    let e = 1.0 - eta;
    let den = e / f2 * log_ratio(f2) + (f2 * f2 - 4.0 * e * g2) / (2.0 * g2 * (1.0 - f2 * f2));
    let bracket = lambda * eta.powi(3) / f1.powi(3) * log_ratio(f1)
        + log_ratio(f0) / f0.powi(3)
        + lambda * eta * eta / (2.0 * g2 * f1 * f1) * (f1 * f1 - 4.0 * eta * g2) / (1.0 - f1 * f1)
        + (f0 * f0 - 4.0 * g2) / (2.0 * g2 * f0 * f0 * (1.0 - f0 * f0));
    Ok(-(1.0 + lambda) + f2 * f2 / (e * e) / den * bracket)
}

/// Whether the point is far enough from radical zeros and from the edge of
/// the domain for both finite-difference checks.
pub fn is_fd_regular(pt: &AppendixPoint) -> bool {
    let (f0, f1, f2) = f_radicals(pt);
    let radicals_ok = [f0, f1, f2]
        .iter()
        .all(|&f| f >= RADICAL_GUARD && f <= 1.0 - PURITY_GUARD_SECOND);
    let (q, g) = (pt.q, pt.gamma);
    let h = FD_STEP_SECOND;
    radicals_ok
        && g > FD_STEP_FIRST
        && q - h > 0.0
        && q + h < 1.0
        && g + FD_STEP_FIRST <= gamma_max(q)
        && g <= gamma_max(q - h)
        && g <= gamma_max(q + h)
}

/// Centred differences `(dF1/dgamma, d2F1/dq2)`.
pub fn finite_differences(pt: &AppendixPoint) -> (f64, f64) {
    let f = |q: f64, g: f64| f1_objective(&pt.at(q, g));
    let (q, g) = (pt.q, pt.gamma);
    let d1 = (f(q, g + FD_STEP_FIRST) - f(q, g - FD_STEP_FIRST)) / (2.0 * FD_STEP_FIRST);
    let h = FD_STEP_SECOND;
    let d2 = (f(q + h, g) - 2.0 * f(q, g) + f(q - h, g)) / (h * h);
    (d1, d2)
}

/// `sup_{0 <= g <= sqrt(q - q^2)} F1(q, g)` and its argument.
pub fn f1_sup_over_gamma(q: f64, eta: f64, weights: &LagrangeWeights) -> (f64, f64) {
    let top = gamma_max(q);
    let f = |g: f64| objective(q, g, eta, weights.lambda, weights.mu);
    maximize(f, 0.0, top, 32, 1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcavityViolation {
    pub p0: f64,
    pub q0: f64,
    pub gamma0: f64,
    pub q1: f64,
    pub gamma1: f64,
    /// Chord value minus the best single-letter value.
    pub excess: f64,
}

/// Outcome of the two-letter versus single-letter comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityReport {
    pub eta: f64,
    pub weights: LagrangeWeights,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Largest `p0 F1(q0, g0) + p1 F1(q1, g1) - sup_g F1(p0 q0 + p1 q1, g)`.
    pub max_excess: f64,
    pub violations: Vec<ConcavityViolation>,
    /// Trials in which neither `g = 0` nor `g = sqrt(q - q^2)` alone
    /// dominates the chord; informational.
    pub endpoint_only_failures: usize,
}

/// Checks `p0 F1(q0, g0) + p1 F1(q1, g1) <= F1(p0 q0 + p1 q1, g~)` for random
/// letter pairs, with `g~` the best admissible coherence at the mixed
/// population.
pub fn concavity_case_check(
    eta: f64,
    weights: &LagrangeWeights,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<ConcavityReport> {
    let eta = check_unit("eta", eta)?;
    if eta < 0.5 {
        return Err(Error::Regime { eta });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<[f64; 5]> = (0..trials)
        .map(|_| {
            let p0: f64 = rng.random();
            let q0: f64 = rng.random();
            let q1: f64 = rng.random();
            let g0 = rng.random::<f64>() * gamma_max(q0);
            let g1 = rng.random::<f64>() * gamma_max(q1);
            [p0, q0, g0, q1, g1]
        })
        .collect();
    let LagrangeWeights { lambda, mu } = *weights;
    let outcomes: Vec<(f64, bool)> = draws
        .par_iter()
        .map(|&[p0, q0, g0, q1, g1]| {
            let lhs = p0 * objective(q0, g0, eta, lambda, mu) + (1.0 - p0) * objective(q1, g1, eta, lambda, mu);
            let q = (p0 * q0 + (1.0 - p0) * q1).clamp(0.0, 1.0);
            let (_, best) = f1_sup_over_gamma(q, eta, weights);
            let ends = objective(q, 0.0, eta, lambda, mu).max(objective(q, gamma_max(q), eta, lambda, mu));
            (lhs - best, lhs - ends > tolerance)
        })
        .collect();
    let mut violations = Vec::new();
    let mut max_excess = f64::NEG_INFINITY;
    let mut endpoint_only_failures = 0;
    for (&[p0, q0, gamma0, q1, gamma1], &(excess, endpoint_fail)) in draws.iter().zip(&outcomes) {
        max_excess = max_excess.max(excess);
        endpoint_only_failures += endpoint_fail as usize;
        if excess > tolerance {
            violations.push(ConcavityViolation {
                p0,
                q0,
                gamma0,
                q1,
                gamma1,
                excess,
            });
        }
    }
    Ok(ConcavityReport {
        eta,
        weights: *weights,
        trials,
        seed,
        tolerance,
        max_excess: if trials == 0 { 0.0 } else { max_excess },
        violations,
        endpoint_only_failures,
    })
}

/// Ordering of the two critical multipliers on random regular points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingReport {
    pub eta_range: (f64, f64),
    pub lambda_max: f64,
    pub samples: usize,
    /// Draws rejected as singular.
    pub skipped: usize,
    /// Points with `mu* > mu** + tolerance`.
    pub violations: usize,
    /// Largest `mu* - mu**` seen.
    pub worst: f64,
}

/// Draws `samples` regular points with `eta` uniform in `eta_range`,
/// `lambda` uniform in `[0, lambda_max]`, and compares `mu*` with `mu**`.
pub fn mu_ordering_check(
    eta_range: (f64, f64),
    lambda_max: f64,
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> Result<OrderingReport> {
    let (lo, hi) = (check_unit("eta", eta_range.0)?, check_unit("eta", eta_range.1)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(samples);
    let mut skipped = 0;
    while pts.len() < samples {
        let eta = lo + (hi - lo) * rng.random::<f64>();
        let lambda = lambda_max * rng.random::<f64>();
        let q: f64 = rng.random();
        let gamma = rng.random::<f64>() * gamma_max(q);
        let w = LagrangeWeights { lambda, mu: 0.0 };
        let pt = AppendixPoint::new_any_eta(q, gamma, w, eta)?;
        let (f0, f1, f2) = f_radicals(&pt);
        if [f0, f1, f2].iter().any(|&f| f < RADICAL_GUARD || f > 1.0 - RADICAL_GUARD) || gamma < 1e-9 {
            skipped += 1;
            continue;
        }
        pts.push(pt);
    }
    let diffs: Vec<f64> = pts
        .par_iter()
        .map(|pt| Ok(mu_star(pt)? - mu_star_star(pt)?))
        .collect::<Result<_>>()?;
    Ok(OrderingReport {
        eta_range: (lo, hi),
        lambda_max,
        samples,
        skipped,
        violations: diffs.iter().filter(|&&d| d > tolerance).count(),
        worst: diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Agreement between closed-form and finite-difference derivatives.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub samples: usize,
    pub skipped: usize,
    pub max_rel_error_first: f64,
    pub max_rel_error_second: f64,
}

fn rel_error(fd: f64, exact: f64) -> f64 {
    (fd - exact).abs() / exact.abs().max(1.0)
}

/// Compares the closed-form derivatives with centred differences on
/// `samples` regular random points with `eta` in `[1/2, 1)`.
pub fn derivative_check(samples: usize, seed: u64, lambda_max: f64, mu_max: f64) -> Result<DerivativeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(samples);
    let mut skipped = 0;
    while pts.len() < samples {
        let eta = 0.5 + 0.5 * rng.random::<f64>();
        let w = LagrangeWeights {
            lambda: lambda_max * rng.random::<f64>(),
            mu: mu_max * rng.random::<f64>(),
        };
        let q: f64 = rng.random();
        let gamma = rng.random::<f64>() * gamma_max(q);
        let pt = AppendixPoint::new(q, gamma, w, eta)?;
        if is_fd_regular(&pt) {
            pts.push(pt);
        } else {
            skipped += 1;
        }
    }
    let errs: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|pt| {
            let (d1, d2) = finite_differences(pt);
            Ok((rel_error(d1, d_f1_d_gamma(pt)?), rel_error(d2, d2_f1_d_q2(pt)?)))
        })
        .collect::<Result<_>>()?;
    Ok(DerivativeReport {
        samples,
        skipped,
        max_rel_error_first: errs.iter().map(|e| e.0).fold(0.0, f64::max),
        max_rel_error_second: errs.iter().map(|e| e.1).fold(0.0, f64::max),
    })
}

/// `q mu h2(1 - (1 - eta) q)`, the large-`mu` form of the worst-case chord
/// inequality with letters `q0 = 0`, `q1 = 1`.
pub fn b2_worst_case(eta: f64, mu: f64, q: f64) -> f64 {
    q * mu * h2(1.0 - (1.0 - eta) * q)
}

/// `F1(q, sqrt(q - q^2)) - (1 - q) F1(0, 0) - q F1(1, 0)`, the exact margin of
/// the same inequality.
pub fn b2_exact_margin(eta: f64, weights: &LagrangeWeights, q: f64) -> f64 {
    let f = |q: f64, g: f64| objective(q, g, eta, weights.lambda, weights.mu);
    f(q, gamma_max(q)) - (1.0 - q) * f(0.0, 0.0) - q * f(1.0, 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCaseReport {
    pub points: usize,
    pub min_asymptotic: f64,
    pub min_exact: f64,
    /// Points where either form is below `-tolerance`.
    pub violations: usize,
}

/// Evaluates both worst-case forms on an `n x n` grid of `(eta, q)` in
/// `[1/2, 1] x [0, 1]` for each of the given multiplier pairs.
pub fn b2_grid_check(n: usize, weights: &[LagrangeWeights], tolerance: f64) -> WorstCaseReport {
    let n = n.max(2);
    let mut min_asymptotic = f64::INFINITY;
    let mut min_exact = f64::INFINITY;
    let mut violations = 0;
    let mut points = 0;
    for w in weights {
        for i in 0..n {
            let eta = 0.5 + 0.5 * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let q = j as f64 / (n - 1) as f64;
                let a = b2_worst_case(eta, w.mu, q);
                let e = b2_exact_margin(eta, w, q);
                min_asymptotic = min_asymptotic.min(a);
                min_exact = min_exact.min(e);
                violations += (a < -tolerance || e < -tolerance) as usize;
                points += 1;
            }
        }
    }
    WorstCaseReport {
        points,
        min_asymptotic,
        min_exact,
        violations,
    }
}
