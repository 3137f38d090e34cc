//! Achievable rate regions of the amplitude damping channel.
//!
//! A symmetric ensemble `(p, nu)` sends the two states with population `p`
//! and coherence `+-nu sqrt(p (1 - p))` with equal probability. A two-letter
//! ensemble mixes two such pairs with weights `p0`, `1 - p0`; the sign-flipped
//! copies keep the averaged output diagonal, so `H(B) = h2(eta p)` in both
//! cases and every bound has a closed form in terms of [`g_entropy`].
//!
//! [`g_entropy`]: crate::specfun::g_entropy

mod boundary;
mod frontier;
pub mod optimize;

use num_complex::Complex64;
use serde::Serialize;

use crate::channel::QubitState;
use crate::error::{check_unit, Error, Result};
use crate::oracle::InformationTriple;
use crate::specfun::{g, h2};

pub use boundary::{
    cq_boundary, cq_boundary_general, cqe_boundary, cqe_boundary_general, time_sharing_baseline,
    BoundaryPoint, Generator, GridMeta, RegionBoundary, RegionKind, DEFAULT_GRID,
    DEFAULT_GRID_GENERAL,
};
pub use frontier::{
    ce_timeshare, entanglement_at_classical_rate, quantum_rate_at_classical_rate, timeshare_q,
    CqeSummary,
};

/// Symmetric input ensemble: two letters of weight 1/2 with opposite coherence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleSymmetric {
    pub p: f64,
    pub nu: f64,
}

impl EnsembleSymmetric {
    pub fn new(p: f64, nu: f64) -> Result<Self> {
        Ok(Self {
            p: check_unit("p", p)?,
            nu: check_unit("nu", nu)?,
        })
    }

    /// The two equiprobable letters `(p, +gamma)`, `(p, -gamma)`.
    pub fn letters(&self) -> [(f64, QubitState); 2] {
        let gamma = self.nu * (self.p * (1.0 - self.p)).sqrt();
        let state = |s: f64| QubitState {
            q: self.p,
            gamma: Complex64::new(s * gamma, 0.0),
        };
        [(0.5, state(1.0)), (0.5, state(-1.0))]
    }

    pub fn as_two_letter(&self) -> EnsembleTwoLetter {
        EnsembleTwoLetter {
            p0: 1.0,
            q0: self.p,
            q1: self.p,
            nu0: self.nu,
            nu1: self.nu,
        }
    }
}

/// General two-letter ensemble; letter `x` has weight `p_x`, population
/// `q_x` and coherence magnitude `nu_x sqrt(q_x (1 - q_x))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleTwoLetter {
    pub p0: f64,
    pub q0: f64,
    pub q1: f64,
    pub nu0: f64,
    pub nu1: f64,
}

impl EnsembleTwoLetter {
    pub fn new(p0: f64, q0: f64, q1: f64, nu0: f64, nu1: f64) -> Result<Self> {
        Ok(Self {
            p0: check_unit("p0", p0)?,
            q0: check_unit("q0", q0)?,
            q1: check_unit("q1", q1)?,
            nu0: check_unit("nu0", nu0)?,
            nu1: check_unit("nu1", nu1)?,
        })
    }

    pub fn p1(&self) -> f64 {
        1.0 - self.p0
    }

    /// Induced excited population `p0 q0 + p1 q1`.
    pub fn p(&self) -> f64 {
        (self.p0 * self.q0 + self.p1() * self.q1).clamp(0.0, 1.0)
    }

    fn weighted(&self) -> [(f64, f64, f64); 2] {
        [(self.p0, self.q0, self.nu0), (self.p1(), self.q1, self.nu1)]
    }

    /// The two letters with real, non-negative coherences.
    pub fn letters(&self) -> [(f64, QubitState); 2] {
        self.weighted().map(|(w, q, nu)| {
            (
                w,
                QubitState {
                    q,
                    gamma: Complex64::new(nu * (q * (1.0 - q)).sqrt(), 0.0),
                },
            )
        })
    }

    /// Four letters `(x, s)` with weight `p_x / 2` and coherence sign `s`.
    pub fn symmetrized_letters(&self) -> [(f64, QubitState); 4] {
        let [(w0, s0), (w1, s1)] = self.letters();
        let flip = |s: QubitState| QubitState {
            q: s.q,
            gamma: -s.gamma,
        };
        [
            (0.5 * w0, s0),
            (0.5 * w0, flip(s0)),
            (0.5 * w1, s1),
            (0.5 * w1, flip(s1)),
        ]
    }

    /// `sum_x p_x g(q_x, z, nu_x)`.
    fn conditional_g(&self, z: f64) -> f64 {
        self.weighted().iter().map(|&(w, q, nu)| w * g(q, z, nu)).sum()
    }
}

/// Lagrange multipliers of the quantum dynamic capacity formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagrangeWeights {
    pub lambda: f64,
    pub mu: f64,
}

impl LagrangeWeights {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("mu", mu)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Domain {
                    name,
                    value: v,
                    range: "[0, inf)",
                });
            }
        }
        Ok(Self { lambda, mu })
    }
}

/// Classical and quantum rates, bits and qubits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePointCQ {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "Q")]
    pub q: f64,
}

/// Classical, quantum and entanglement rates. Negative `e` means entanglement
/// is consumed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePointCQE {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "E")]
    pub e: f64,
}

/// Right-hand sides of `Q <= q_max` and `C + Q <= cq_sum_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CqPolyhedron {
    pub q_max: f64,
    pub cq_sum_max: f64,
}

/// Right-hand sides of `C + 2Q <= ...`, `Q + E <= ...` and `C + Q + E <= ...`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CqePolyhedron {
    pub c_plus_two_q_max: f64,
    pub q_plus_e_max: f64,
    pub cqe_sum_max: f64,
}

impl CqePolyhedron {
    fn from_triple(t: &InformationTriple) -> Self {
        Self {
            c_plus_two_q_max: t.mutual,
            q_plus_e_max: t.coherent,
            cqe_sum_max: t.holevo + t.coherent,
        }
    }

    /// Extreme points with maximal rates: `(M, 0, S - M)`,
    /// `(H, (M - H)/2, Qc - (M - H)/2)`, `(H, 0, Qc)` and `(0, M/2, Qc - M/2)`,
    /// where `H` is the Holevo term, `Qc` the coherent term and `S = H + Qc`.
    pub fn corners(&self) -> [RatePointCQE; 4] {
        let m = self.c_plus_two_q_max;
        let qc = self.q_plus_e_max;
        let s = self.cqe_sum_max;
        let hol = (s - qc).min(m);
        let half = 0.5 * (m - hol);
        [
            RatePointCQE { c: m, q: 0.0, e: s - m },
            RatePointCQE { c: hol, q: half, e: qc - half },
            RatePointCQE { c: hol, q: 0.0, e: qc },
            RatePointCQE { c: 0.0, q: 0.5 * m, e: qc - 0.5 * m },
        ]
    }
}

/// Closed-form `I(X;B)`, `I(A>BX)` and `I(AX;B)` of a two-letter ensemble.
pub fn information_triple(eta: f64, e: &EnsembleTwoLetter) -> InformationTriple {
    let h_b = h2(eta * e.p());
    let h_a_x = e.conditional_g(1.0);
    let h_b_x = e.conditional_g(eta);
    let h_e_x = e.conditional_g(1.0 - eta);
    InformationTriple {
        holevo: h_b - h_b_x,
        coherent: h_b_x - h_e_x,
        mutual: h_b + h_a_x - h_e_x,
    }
}

/// Closed forms at a symmetric ensemble, without domain checks.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Symmetric {
    pub eta: f64,
}

impl Symmetric {
    /// `h2(eta p) - g(p, eta, nu)`
    pub fn holevo(&self, p: f64, nu: f64) -> f64 {
        h2(self.eta * p) - g(p, self.eta, nu)
    }
    /// `g(p, eta, nu) - g(p, 1 - eta, nu)`, not floored.
    pub fn coherent(&self, p: f64, nu: f64) -> f64 {
        g(p, self.eta, nu) - g(p, 1.0 - self.eta, nu)
    }
    /// `h2(eta p) - g(p, 1 - eta, nu)`
    pub fn sum(&self, p: f64, nu: f64) -> f64 {
        h2(self.eta * p) - g(p, 1.0 - self.eta, nu)
    }
    /// `h2(eta p) + g(p, 1, nu) - g(p, 1 - eta, nu)`
    pub fn mutual(&self, p: f64, nu: f64) -> f64 {
        h2(self.eta * p) + g(p, 1.0, nu) - g(p, 1.0 - self.eta, nu)
    }
}

fn check_regime(eta: f64) -> Result<f64> {
    let eta = check_unit("eta", eta)?;
    if eta < 0.5 {
        return Err(Error::Regime { eta });
    }
    Ok(eta)
}

/// Polyhedron of a symmetric ensemble. Only valid for `eta >= 1/2`.
pub fn cq_polyhedron(eta: f64, e: &EnsembleSymmetric) -> Result<CqPolyhedron> {
    let eta = check_regime(eta)?;
    let s = Symmetric { eta };
    Ok(CqPolyhedron {
        q_max: s.coherent(e.p, e.nu).max(0.0),
        cq_sum_max: s.sum(e.p, e.nu),
    })
}

/// Polyhedron of a two-letter ensemble, any `eta`. For `eta <= 1/2` every
/// letter has non-positive coherent information, so `q_max` is exactly zero
/// there rather than rounding noise.
pub fn cq_polyhedron_general(eta: f64, e: &EnsembleTwoLetter) -> Result<CqPolyhedron> {
    let eta = check_unit("eta", eta)?;
    let t = information_triple(eta, e);
    Ok(CqPolyhedron {
        q_max: if eta <= 0.5 { 0.0 } else { t.coherent.max(0.0) },
        cq_sum_max: t.holevo + t.coherent,
    })
}

/// Triple-region polyhedron of a symmetric ensemble. Only valid for `eta >= 1/2`.
pub fn cqe_polyhedron(eta: f64, e: &EnsembleSymmetric) -> Result<CqePolyhedron> {
    let eta = check_regime(eta)?;
    Ok(CqePolyhedron::from_triple(&information_triple(
        eta,
        &e.as_two_letter(),
    )))
}

/// Triple-region polyhedron of a two-letter ensemble, any `eta`.
pub fn cqe_polyhedron_general(eta: f64, e: &EnsembleTwoLetter) -> Result<CqePolyhedron> {
    let eta = check_unit("eta", eta)?;
    Ok(CqePolyhedron::from_triple(&information_triple(eta, e)))
}

/// `max_p h2(eta p) - h2((1 - eta) p)` and its maximiser; zero for `eta <= 1/2`.
pub fn quantum_capacity(eta: f64) -> Result<(f64, f64)> {
    let eta = check_unit("eta", eta)?;
    if eta <= 0.5 {
        return Ok((0.0, 0.0));
    }
    let s = Symmetric { eta };
    let (p, q) = optimize::maximize_unit(|p| s.coherent(p, 0.0));
    Ok((q.max(0.0), p))
}

/// `max_p h2(eta p) - g(p, 1 - eta, 1)` and its maximiser.
pub fn classical_capacity_product(eta: f64) -> Result<(f64, f64)> {
    let eta = check_unit("eta", eta)?;
    let s = Symmetric { eta };
    let (p, c) = optimize::maximize_unit(|p| s.sum(p, 1.0));
    Ok((c.max(0.0), p))
}

/// Entanglement-assisted classical capacity `max_p I(AX;B)` at `nu = 0`,
/// with the maximiser and the entanglement rate `-h2(p)` it consumes.
pub fn entanglement_assisted_classical(eta: f64) -> Result<(f64, f64, f64)> {
    let eta = check_unit("eta", eta)?;
    let s = Symmetric { eta };
    let (p, c) = optimize::maximize_unit(|p| s.mutual(p, 0.0));
    Ok((c, p, -h2(p)))
}

/// `(1 + mu) H(B) + H(A|X) + lambda H(B|X) - (1 + mu + lambda) H(E|X)`.
pub fn dynamic_capacity_formula(eta: f64, weights: &LagrangeWeights, e: &EnsembleTwoLetter) -> Result<f64> {
    let eta = check_unit("eta", eta)?;
    let LagrangeWeights { lambda, mu } = *weights;
    let h_b = h2(eta * e.p());
    Ok((1.0 + mu) * h_b + e.conditional_g(1.0) + lambda * e.conditional_g(eta)
        - (1.0 + mu + lambda) * e.conditional_g(1.0 - eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_cq_state, ADChannel};
    use crate::oracle;
    use crate::specfun::binary_entropy;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const Q_CAP_075: f64 = 0.415_037_499_278_573_5;
    const Q_CAP_075_ARGMAX: f64 = 0.444_444;
    const C_PROD_075: f64 = 0.683_665_630_304_698;
    const C_PROD_075_ARGMAX: f64 = 0.425_497;

    fn sym(p: f64, nu: f64) -> EnsembleSymmetric {
        EnsembleSymmetric::new(p, nu).unwrap()
    }

    #[test]
    fn noiseless_polyhedron() {
        let poly = cq_polyhedron(1.0, &sym(0.5, 0.0)).unwrap();
        assert_relative_eq!(poly.q_max, 1.0, epsilon = 1e-15);
        assert_relative_eq!(poly.cq_sum_max, 1.0, epsilon = 1e-15);
        let t = cqe_polyhedron(1.0, &sym(0.5, 0.0)).unwrap();
        assert_relative_eq!(t.c_plus_two_q_max, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn polyhedron_at_three_quarters() {
        let poly = cq_polyhedron(0.75, &sym(0.5, 0.0)).unwrap();
        let expected = binary_entropy(0.375).unwrap() - binary_entropy(0.125).unwrap();
        assert_relative_eq!(poly.q_max, expected, epsilon = 1e-15);
        assert_relative_eq!(poly.q_max, 0.410_869_559_725_368_65, epsilon = 1e-14);
    }

    #[test]
    fn half_transmissivity_has_no_quantum_rate() {
        for p in [0.1, 0.5, 0.9] {
            for nu in [0.0, 0.5, 1.0] {
                assert_eq!(cq_polyhedron(0.5, &sym(p, nu)).unwrap().q_max, 0.0);
            }
        }
        assert_eq!(quantum_capacity(0.5).unwrap().0, 0.0);
    }

    #[test]
    fn symmetric_forms_reject_low_eta() {
        assert_eq!(
            cq_polyhedron(0.4, &sym(0.5, 0.0)),
            Err(Error::Regime { eta: 0.4 })
        );
        assert!(cqe_polyhedron(0.4, &sym(0.5, 0.0)).is_err());
        let e = sym(0.5, 0.2).as_two_letter();
        assert!(cq_polyhedron_general(0.4, &e).is_ok());
    }

    #[test]
    fn general_reduces_to_symmetric() {
        for (p, nu, eta) in [(0.3, 0.4, 0.8), (0.7, 1.0, 0.55), (0.5, 0.0, 0.75)] {
            let a = cq_polyhedron(eta, &sym(p, nu)).unwrap();
            let e = EnsembleTwoLetter::new(0.37, p, p, nu, nu).unwrap();
            let b = cq_polyhedron_general(eta, &e).unwrap();
            assert_relative_eq!(a.q_max, b.q_max, epsilon = 1e-14);
            assert_relative_eq!(a.cq_sum_max, b.cq_sum_max, epsilon = 1e-14);
        }
        // p0 = 1 ignores the second letter entirely.
        let single = EnsembleTwoLetter::new(1.0, 0.3, 0.9, 0.2, 0.7).unwrap();
        let a = cq_polyhedron_general(0.8, &single).unwrap();
        let b = cq_polyhedron(0.8, &sym(0.3, 0.2)).unwrap();
        assert_relative_eq!(a.q_max, b.q_max, epsilon = 1e-14);
    }

    #[test]
    fn pure_symmetric_ensemble_attains_product_capacity() {
        let (c, p) = classical_capacity_product(0.75).unwrap();
        let t = cqe_polyhedron(0.75, &sym(p, 1.0)).unwrap();
        // At nu = 1 the coherent term vanishes and the sum bound is the Holevo rate.
        assert!(t.q_plus_e_max.abs() < 1e-12);
        assert_relative_eq!(t.cqe_sum_max, c, epsilon = 1e-12);
    }

    #[test]
    fn capacities_against_dense_grid() {
        let (q, pq) = quantum_capacity(0.75).unwrap();
        assert!((q - Q_CAP_075).abs() < 1e-8);
        assert!((pq - Q_CAP_075_ARGMAX).abs() < 1e-5);
        let (c, pc) = classical_capacity_product(0.75).unwrap();
        assert!((c - C_PROD_075).abs() < 1e-8);
        assert!((pc - C_PROD_075_ARGMAX).abs() < 1e-5);
        assert!((quantum_capacity(1.0).unwrap().0 - 1.0).abs() < 1e-10);
        assert!((classical_capacity_product(1.0).unwrap().0 - 1.0).abs() < 1e-10);
        assert_eq!(classical_capacity_product(0.0).unwrap().0, 0.0);
    }

    #[test]
    fn entanglement_assisted_reference() {
        let (c, p, e) = entanglement_assisted_classical(0.75).unwrap();
        assert!((c - 1.412_190_176_470_974_6).abs() < 1e-9);
        assert!((p - 0.482_299).abs() < 1e-5);
        assert!((e + 0.999_095_745_056_287_8).abs() < 1e-8);
    }

    #[test]
    fn argmax_invariant_under_rescaling() {
        let s = Symmetric { eta: 0.8 };
        let (p1, _) = optimize::maximize_unit(|p| s.coherent(p, 0.0));
        let (p2, _) = optimize::maximize_unit(|p| 2.0 * s.coherent(p, 0.0));
        assert!((p1 - p2).abs() < 1e-9);
        assert!((quantum_capacity(0.8).unwrap().1 - p1).abs() < 1e-9);
    }

    #[test]
    fn symmetric_letters_cancel_coherence() {
        let [(w0, a), (w1, b)] = sym(0.3, 0.8).letters();
        assert_eq!(w0 + w1, 1.0);
        assert_eq!(a.gamma, -b.gamma);
        let four = EnsembleTwoLetter::new(0.2, 0.1, 0.6, 0.5, 0.9)
            .unwrap()
            .symmetrized_letters();
        let total: f64 = four.iter().map(|(w, _)| w).sum();
        assert_relative_eq!(total, 1.0);
        let avg: Complex64 = four.iter().map(|(w, s)| s.gamma * w).sum();
        assert!(avg.norm() < 1e-16);
    }

    #[test]
    fn dynamic_formula_noiseless_unweighted() {
        let e = EnsembleTwoLetter::new(0.4, 0.0, 1.0, 0.0, 0.0).unwrap();
        let w = LagrangeWeights::new(0.0, 0.0).unwrap();
        // Pure classical letters: H(B) = h2(0.6), H(A|X) = 0.
        let v = dynamic_capacity_formula(1.0, &w, &e).unwrap();
        assert_relative_eq!(v, binary_entropy(0.6).unwrap(), epsilon = 1e-14);
        assert!(LagrangeWeights::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn dynamic_formula_prefers_incoherent_inputs_for_large_lambda() {
        let w = LagrangeWeights::new(50.0, 0.0).unwrap();
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..=100 {
            for j in 0..=100 {
                let e = sym(i as f64 / 100.0, j as f64 / 100.0).as_two_letter();
                let v = dynamic_capacity_formula(0.75, &w, &e).unwrap();
                if v > best.0 {
                    best = (v, e.nu0);
                }
            }
        }
        assert_eq!(best.1, 0.0);
    }

    #[test]
    fn dynamic_formula_matches_oracle() {
        let e = EnsembleTwoLetter::new(0.35, 0.2, 0.7, 0.6, 0.3).unwrap();
        let rho = build_cq_state(&ADChannel::new(0.8).unwrap(), &e.symmetrized_letters()).unwrap();
        let t = oracle::information_triple(&rho).unwrap();
        for (lambda, mu) in [(0.0, 0.0), (1.5, 0.3), (10.0, 4.0)] {
            let w = LagrangeWeights::new(lambda, mu).unwrap();
            let lhs = dynamic_capacity_formula(0.8, &w, &e).unwrap();
            let rhs = t.mutual + lambda * t.coherent + mu * (t.holevo + t.coherent);
            assert!((lhs - rhs).abs() < 1e-9, "{lhs} {rhs}");
        }
    }

    #[test]
    fn closed_form_triple_matches_oracle_for_symmetric_ensembles() {
        for (p, nu, eta) in [(0.5, 0.0, 1.0), (0.3, 0.7, 0.75), (0.9, 1.0, 0.55), (0.05, 0.2, 0.99)] {
            let e = sym(p, nu);
            let rho = build_cq_state(&ADChannel::new(eta).unwrap(), &e.letters()).unwrap();
            let t = oracle::information_triple(&rho).unwrap();
            let c = information_triple(eta, &e.as_two_letter());
            assert!((t.holevo - c.holevo).abs() < 1e-9);
            assert!((t.coherent - c.coherent).abs() < 1e-9);
            assert!((t.mutual - c.mutual).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn zero_entanglement_slice_reproduces_cq_bounds(p in 0.0f64..=1.0, nu in 0.0f64..=1.0, eta in 0.5f64..=1.0) {
            // With E = 0: Q <= Qc, C + Q <= S, and C + 2Q <= M is implied.
            let t = cqe_polyhedron(eta, &sym(p, nu)).unwrap();
            let cq = cq_polyhedron(eta, &sym(p, nu)).unwrap();
            prop_assert!((t.q_plus_e_max.max(0.0) - cq.q_max).abs() < 1e-12);
            prop_assert!((t.cqe_sum_max - cq.cq_sum_max).abs() < 1e-12);
            // Corner (S - Q, Q) of the CQ polyhedron satisfies C + 2Q <= M.
            prop_assert!(cq.cq_sum_max + cq.q_max <= t.c_plus_two_q_max + 1e-12);
        }

        #[test]
        fn cqe_corners_satisfy_their_polyhedron(p in 0.0f64..=1.0, nu in 0.0f64..=1.0, eta in 0.5f64..=1.0) {
            let t = cqe_polyhedron(eta, &sym(p, nu)).unwrap();
            for r in t.corners() {
                prop_assert!(r.c >= -1e-15 && r.q >= -1e-15);
                prop_assert!(r.c + 2.0 * r.q <= t.c_plus_two_q_max + 1e-12);
                prop_assert!(r.q + r.e <= t.q_plus_e_max + 1e-12);
                prop_assert!(r.c + r.q + r.e <= t.cqe_sum_max + 1e-12);
            }
        }

        #[test]
        fn coherent_information_below_sum(p in 0.0f64..=1.0, nu in 0.0f64..=1.0, eta in 0.5f64..=1.0) {
            let poly = cq_polyhedron(eta, &sym(p, nu)).unwrap();
            prop_assert!(poly.q_max <= poly.cq_sum_max + 1e-12);
        }
    }
}
