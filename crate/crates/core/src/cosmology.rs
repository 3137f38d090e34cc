//! Transmissivity of the amplitude damping channel induced on a Dirac mode
//! by the conformal scale factor `a(tau) = 1 + eps (1 + tanh(rho tau))`.
//!
//! The particle sector of a mode with momentum `k` is mapped from the
//! asymptotic past (`a = 1`) to the asymptotic future (`a = 1 + 2 eps`) by a
//! Bogoliubov rotation; tracing out the antiparticle sector leaves an
//! amplitude damping channel with `eta = |alpha|^2 = 1 - n/2`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::specfun::abs_gamma_ratio_sq;

/// Below `SMALL_K_FRACTION * mass` the `k -> 0` limit `eta = 1` is returned.
pub const SMALL_K_FRACTION: f64 = 1e-6;

/// Drift outside `[0, 1]` that is silently clamped; anything larger is an error.
pub const ETA_CLAMP_TOL: f64 = 1e-6;

/// Expansion model of the 1+1 Robertson-Walker universe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosmologyParams {
    /// Total expansion volume control; `0` is a static universe.
    pub epsilon: f64,
    /// Expansion rapidity, in inverse conformal time.
    pub rho: f64,
    /// Field mass `m`.
    pub mass: f64,
}

impl CosmologyParams {
    pub fn new(epsilon: f64, rho: f64, mass: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::Domain {
                name: "epsilon",
                value: epsilon,
                range: "[0, inf)",
            });
        }
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::Domain {
                name: "rho",
                value: rho,
                range: "(0, inf)",
            });
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Domain {
                name: "mass",
                value: mass,
                range: "(0, inf)",
            });
        }
        Ok(Self { epsilon, rho, mass })
    }

    /// Conformal scale factor at conformal time `tau`.
    pub fn scale_factor(&self, tau: f64) -> f64 {
        1.0 + self.epsilon * (1.0 + (self.rho * tau).tanh())
    }
}

/// Asymptotic energies of a mode with momentum `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEnergies {
    pub k: f64,
    pub m_in: f64,
    pub m_out: f64,
    pub e_in: f64,
    pub e_out: f64,
    pub e_plus: f64,
    pub e_minus: f64,
}

fn check_momentum(k: f64) -> Result<f64> {
    if k.is_finite() && k >= 0.0 {
        Ok(k)
    } else {
        Err(Error::Domain {
            name: "k",
            value: k,
            range: "[0, inf)",
        })
    }
}

pub fn mode_energies(params: &CosmologyParams, k: f64) -> Result<ModeEnergies> {
    let k = check_momentum(k)?;
    let m_in = params.mass;
    let m_out = params.mass * (1.0 + 2.0 * params.epsilon);
    let e_in = k.hypot(m_in);
    let e_out = k.hypot(m_out);
    Ok(ModeEnergies {
        k,
        m_in,
        m_out,
        e_in,
        e_out,
        e_plus: 0.5 * (e_out + e_in),
        e_minus: 0.5 * (e_out - e_in),
    })
}

/// `|A^(-)(k)|^2`, the squared modulus of the in/out mode-function coefficient.
pub fn coefficient_a_minus(params: &CosmologyParams, k: f64) -> Result<f64> {
    let e = mode_energies(params, k)?;
    let rho = params.rho;
    let shift = params.mass * params.epsilon / rho;
    let num = [
        Complex64::new(1.0, -e.e_in / rho),
        Complex64::new(0.0, -e.e_out / rho),
    ];
    let den = [
        Complex64::new(1.0, -e.e_plus / rho - shift),
        Complex64::new(0.0, -e.e_plus / rho + shift),
    ];
    abs_gamma_ratio_sq(&num, &den).map_err(|err| Error::Evaluation {
        k,
        reason: err.to_string(),
    })
}

/// Damping parameter of the induced channel and the created-particle density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmissivity {
    pub eta: f64,
    /// `n = 2 (1 - eta)`.
    pub particle_density: f64,
}

impl Transmissivity {
    pub fn from_eta(eta: f64) -> Result<Self> {
        if !(-ETA_CLAMP_TOL..=1.0 + ETA_CLAMP_TOL).contains(&eta) {
            return Err(Error::Domain {
                name: "eta",
                value: eta,
                range: "[0, 1]",
            });
        }
        let eta = eta.clamp(0.0, 1.0);
        Ok(Self {
            eta,
            particle_density: 2.0 * (1.0 - eta),
        })
    }
}

/// Transmissivity `eta(k)` of the mode with momentum `k`.
///
/// The prefactor `E_out (E_in - M_in) / (E_in (E_out - M_out))` is evaluated
/// in the rationalised form `E_out (E_out + M_out) / (E_in (E_in + M_in))`,
/// which has no `0/0` as `k -> 0`.
pub fn transmissivity(params: &CosmologyParams, k: f64) -> Result<Transmissivity> {
    let k = check_momentum(k)?;
    if k < SMALL_K_FRACTION * params.mass {
        return Transmissivity::from_eta(1.0);
    }
    let e = mode_energies(params, k)?;
    let prefactor = e.e_out * (e.e_out + e.m_out) / (e.e_in * (e.e_in + e.m_in));
    let eta = prefactor * coefficient_a_minus(params, k)?;
    if !eta.is_finite() {
        return Err(Error::Evaluation {
            k,
            reason: format!("non-finite eta {eta}"),
        });
    }
    Transmissivity::from_eta(eta).map_err(|_| Error::Evaluation {
        k,
        reason: format!("eta = {eta} outside [0, 1] beyond clamp tolerance"),
    })
}

/// Spacing of momentum samples in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KGrid {
    #[default]
    Log,
    Linear,
}

/// Sample points of a momentum sweep, ascending.
pub fn k_grid(k_min: f64, k_max: f64, steps: usize, grid: KGrid) -> Result<Vec<f64>> {
    if !(k_min.is_finite() && k_max.is_finite() && k_min >= 0.0 && k_min < k_max) {
        return Err(Error::Domain {
            name: "k_min",
            value: k_min,
            range: "0 <= k_min < k_max",
        });
    }
    if steps < 2 {
        return Err(Error::Domain {
            name: "steps",
            value: steps as f64,
            range: "[2, inf)",
        });
    }
    let last = (steps - 1) as f64;
    let points = match grid {
        KGrid::Linear => (0..steps)
            .map(|i| k_min + (k_max - k_min) * i as f64 / last)
            .collect(),
        KGrid::Log => {
            if k_min <= 0.0 {
                return Err(Error::Domain {
                    name: "k_min",
                    value: k_min,
                    range: "(0, k_max) for a logarithmic grid",
                });
            }
            let ratio = (k_max / k_min).ln();
            (0..steps)
                .map(|i| match i {
                    0 => k_min,
                    i if i == steps - 1 => k_max,
                    i => k_min * (ratio * i as f64 / last).exp(),
                })
                .collect()
        }
    };
    Ok(points)
}

/// Transmissivity over a momentum grid. Points are evaluated in parallel and
/// returned in ascending `k`.
pub fn eta_sweep(
    params: &CosmologyParams,
    k_min: f64,
    k_max: f64,
    steps: usize,
    grid: KGrid,
) -> Result<Vec<(f64, Transmissivity)>> {
    k_grid(k_min, k_max, steps, grid)?
        .into_par_iter()
        .map(|k| transmissivity(params, k).map(|t| (k, t)))
        .collect()
}

/// Bogoliubov coefficients `alpha = cos r`, `beta = -e^{-i theta} sin r`.
///
/// Only `|alpha|^2` enters the channel; the phase is carried along unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovPair {
    pub alpha_sq: f64,
    pub r: f64,
    pub theta: f64,
}

impl BogoliubovPair {
    pub fn from_transmissivity(t: &Transmissivity, theta: f64) -> Self {
        Self {
            alpha_sq: t.eta,
            r: t.eta.sqrt().acos(),
            theta,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.r.cos()
    }

    pub fn beta(&self) -> Complex64 {
        -Complex64::from_polar(self.r.sin(), -self.theta)
    }

    /// `|beta|^2 = n / 2`.
    pub fn beta_sq(&self) -> f64 {
        self.r.sin().powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn fig1(epsilon: f64) -> CosmologyParams {
        CosmologyParams::new(epsilon, 100.0, 1.0).unwrap()
    }

    /// Same quantity through `|Gamma(1+iy)|^2 = pi y / sinh(pi y)` and
    /// `|Gamma(iy)|^2 = pi / (y sinh(pi y))`, without any log-gamma.
    fn eta_via_sinh(p: &CosmologyParams, k: f64) -> f64 {
        let m_in = p.mass;
        let m_out = p.mass * (1.0 + 2.0 * p.epsilon);
        let e_in = (k * k + m_in * m_in).sqrt();
        let e_out = (k * k + m_out * m_out).sqrt();
        let e_plus = 0.5 * (e_in + e_out);
        let a_in = e_in / p.rho;
        let a_out = e_out / p.rho;
        let a = (e_plus + p.mass * p.epsilon) / p.rho;
        let b = (e_plus - p.mass * p.epsilon) / p.rho;
        let ratio = a_in * b * (PI * a).sinh() * (PI * b).sinh()
            / (a_out * a * (PI * a_in).sinh() * (PI * a_out).sinh());
        // E - M written as k^2 / (E + M) to avoid cancellation at small k.
        let d_in = k * k / (e_in + m_in);
        let d_out = k * k / (e_out + m_out);
        e_out * d_in / (e_in * d_out) * ratio
    }

    #[test]
    fn energies_at_rest_and_unit_momentum() {
        let e = mode_energies(&fig1(10.0), 0.0).unwrap();
        assert_eq!((e.m_in, e.m_out), (1.0, 21.0));
        assert_eq!((e.e_in, e.e_out), (1.0, 21.0));
        assert_eq!((e.e_plus, e.e_minus), (11.0, 10.0));
        let e = mode_energies(&fig1(10.0), 1.0).unwrap();
        assert_relative_eq!(e.e_in, 2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(e.e_out, 442f64.sqrt(), epsilon = 1e-13);
        let e = mode_energies(&fig1(10.0), 1e9).unwrap();
        assert_relative_eq!(e.e_out / e.e_in, 1.0, epsilon = 1e-12);
        assert!(mode_energies(&fig1(10.0), -1.0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(CosmologyParams::new(-1.0, 1.0, 1.0).is_err());
        assert!(CosmologyParams::new(1.0, 0.0, 1.0).is_err());
        assert!(CosmologyParams::new(1.0, 1.0, f64::NAN).is_err());
        let p = CosmologyParams::new(10.0, 100.0, 1.0).unwrap();
        assert_relative_eq!(p.scale_factor(-1e3), 1.0);
        assert_relative_eq!(p.scale_factor(1e3), 21.0);
    }

    #[test]
    fn coefficient_static_universe_is_one() {
        let p = CosmologyParams::new(0.0, 3.0, 2.0).unwrap();
        for k in [1e-3, 0.5, 4.0, 300.0] {
            assert_relative_eq!(coefficient_a_minus(&p, k).unwrap(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn coefficient_against_arbitrary_precision_reference() {
        // 40-digit reference evaluation of the Gamma quotient at eps=10, rho=100, m=1, k=5.
        let a2 = coefficient_a_minus(&fig1(10.0), 5.0).unwrap();
        assert_relative_eq!(a2, 0.024_226_645_510_366_123, max_relative = 1e-10);
        let eta = transmissivity(&fig1(10.0), 5.0).unwrap().eta;
        assert_relative_eq!(eta, 0.716_171_331_066_236_5, max_relative = 1e-10);
    }

    #[test]
    fn matches_sinh_closed_form() {
        for eps in [0.5, 10.0, 55.0, 100.0] {
            let p = fig1(eps);
            for k in [0.01, 0.3, 1.0, 2.0, 7.5, 20.0, 60.0] {
                let lhs = transmissivity(&p, k).unwrap().eta;
                let rhs = eta_via_sinh(&p, k);
                assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn limits() {
        let p = fig1(50.0);
        assert_eq!(transmissivity(&p, 0.0).unwrap().eta, 1.0);
        assert!(transmissivity(&p, 1e5).unwrap().eta > 1.0 - 1e-9);
        // Fast, large expansion pushes the dip towards 1/2 from above.
        let extreme = CosmologyParams::new(1e4, 1e4, 1.0).unwrap();
        let eta = transmissivity(&extreme, 100.0).unwrap().eta;
        assert!(eta > 0.5 && eta < 0.52, "{eta}");
        for k in [1e-3, 1.0, 10.0, 1e3] {
            let static_eta = transmissivity(&CosmologyParams::new(0.0, 100.0, 1.0).unwrap(), k);
            assert!((static_eta.unwrap().eta - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn continuous_across_small_k_threshold() {
        let p = fig1(100.0);
        let threshold = SMALL_K_FRACTION * p.mass;
        for delta in [1e-1, 1e-2, 1e-3] {
            let above = transmissivity(&p, threshold * (1.0 + delta)).unwrap().eta;
            let below = transmissivity(&p, threshold * (1.0 - delta)).unwrap().eta;
            assert_eq!(below, 1.0);
            assert!((above - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sweep_bounds_and_ordering() {
        let low = eta_sweep(&fig1(10.0), 0.01, 50.0, 200, KGrid::Log).unwrap();
        let high = eta_sweep(&fig1(100.0), 0.01, 50.0, 200, KGrid::Log).unwrap();
        for ((k1, t1), (k2, t2)) in low.iter().zip(&high) {
            assert_eq!(k1, k2);
            assert!((0.5..=1.0).contains(&t1.eta));
            assert!((0.5..=1.0).contains(&t2.eta));
            assert!(t2.eta <= t1.eta + 1e-12);
            assert!((t1.particle_density - 2.0 * (1.0 - t1.eta)).abs() < 1e-15);
            assert!(t2.particle_density <= 1.0);
        }
        assert!(low.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn grids() {
        let g = k_grid(1.0, 100.0, 3, KGrid::Log).unwrap();
        assert_relative_eq!(g[1], 10.0, epsilon = 1e-12);
        assert_eq!((g[0], g[2]), (1.0, 100.0));
        let g = k_grid(0.0, 1.0, 5, KGrid::Linear).unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(k_grid(0.0, 1.0, 5, KGrid::Log).is_err());
        assert!(k_grid(1.0, 1.0, 5, KGrid::Linear).is_err());
        assert!(k_grid(0.0, 1.0, 1, KGrid::Linear).is_err());
    }

    #[test]
    fn transmissivity_clamp_policy() {
        assert_eq!(Transmissivity::from_eta(1.0 + 5e-7).unwrap().eta, 1.0);
        assert!(Transmissivity::from_eta(1.0 + 1e-5).is_err());
        assert!(Transmissivity::from_eta(-1e-5).is_err());
    }

    #[test]
    fn bogoliubov_pair() {
        let t = Transmissivity::from_eta(0.75).unwrap();
        let b = BogoliubovPair::from_transmissivity(&t, 0.4);
        assert_relative_eq!(b.alpha().powi(2), b.alpha_sq, epsilon = 1e-15);
        assert_relative_eq!(b.alpha_sq + b.beta_sq(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(b.beta_sq(), t.particle_density / 2.0, epsilon = 1e-15);
        assert_relative_eq!(b.beta().norm_sqr(), b.beta_sq(), epsilon = 1e-15);
    }
}
