//! Continuous evaluation of the symmetric-ensemble envelopes at a given
//! classical rate, without grid discretisation.
//!
//! For fixed `p` the Holevo term increases and the coherent term decreases
//! with `nu`. The best quantum rate at classical rate `C` is therefore reached
//! at the smallest `nu` whose Holevo term reaches `C`, which leaves a
//! one-dimensional maximisation over `p`.

use serde::Serialize;

use super::optimize::{bisect_first, bisect_last, maximize};
use super::{classical_capacity_product, entanglement_assisted_classical, quantum_capacity, Symmetric};
use crate::error::{check_unit, Error, Result};

const BISECT_ITERS: usize = 56;
const SCAN_CELLS: usize = 96;
const P_TOL: f64 = 1e-12;

fn check_rate(c: f64) -> Result<f64> {
    if c.is_finite() && c >= 0.0 {
        Ok(c)
    } else {
        Err(Error::Domain {
            name: "C",
            value: c,
            range: "[0, inf)",
        })
    }
}

/// Interval of `p` around `centre` on which `f(p) >= level`, assuming `f` is
/// unimodal with its maximum at `centre`.
fn level_interval<F: Fn(f64) -> f64>(f: F, centre: f64, level: f64) -> Option<(f64, f64)> {
    if f(centre) < level {
        return None;
    }
    let lo = bisect_first(|p| f(p) >= level, 0.0, centre, BISECT_ITERS)?;
    let hi = bisect_last(|p| f(p) >= level, centre, 1.0, BISECT_ITERS)?;
    Some((lo, hi))
}

/// Largest quantum rate of the symmetric-ensemble region at classical rate
/// `c`, or `None` when `c` exceeds the product-state classical capacity.
pub fn quantum_rate_at_classical_rate(eta: f64, c: f64) -> Result<Option<f64>> {
    let eta = check_unit("eta", eta)?;
    if eta < 0.5 {
        return Err(Error::Regime { eta });
    }
    let c = check_rate(c)?;
    if c == 0.0 {
        return Ok(Some(quantum_capacity(eta)?.0));
    }
    let s = Symmetric { eta };
    let (c_prod, p_c) = classical_capacity_product(eta)?;
    if c > c_prod {
        return Ok(None);
    }
    let Some((lo, hi)) = level_interval(|p| s.holevo(p, 1.0), p_c, c) else {
        return Ok(Some(0.0));
    };
    let phi = |p: f64| {
        let nu = bisect_first(|nu| s.holevo(p, nu) >= c, 0.0, 1.0, BISECT_ITERS).unwrap_or(1.0);
        s.coherent(p, nu).max(0.0)
    };
    Ok(Some(maximize(phi, lo, hi, SCAN_CELLS, P_TOL).1))
}

/// Largest entanglement rate of the symmetric-ensemble triple region on the
/// `Q = 0` slice at classical rate `c`, or `None` above the
/// entanglement-assisted classical capacity.
pub fn entanglement_at_classical_rate(eta: f64, c: f64) -> Result<Option<f64>> {
    let eta = check_unit("eta", eta)?;
    if eta < 0.5 {
        return Err(Error::Regime { eta });
    }
    let c = check_rate(c)?;
    let s = Symmetric { eta };
    let (_, p_ea, _) = entanglement_assisted_classical(eta)?;
    let Some((lo, hi)) = level_interval(|p| s.mutual(p, 0.0), p_ea, c) else {
        return Ok(None);
    };
    let phi = |p: f64| {
        let nu_m = bisect_last(|nu| s.mutual(p, nu) >= c, 0.0, 1.0, BISECT_ITERS).unwrap_or(0.0);
        let nu_h = bisect_first(|nu| s.holevo(p, nu) >= c, 0.0, 1.0, BISECT_ITERS).unwrap_or(1.0);
        let nu = nu_m.min(nu_h);
        s.coherent(p, nu).min(s.sum(p, nu) - c)
    };
    Ok(Some(maximize(phi, lo, hi, SCAN_CELLS, P_TOL).1))
}

/// Quantum rate of time sharing between the product-state classical code and
/// the quantum code.
pub fn timeshare_q(q_cap: f64, c_prod: f64, c: f64) -> f64 {
    if c_prod <= 0.0 {
        return q_cap;
    }
    (q_cap * (1.0 - c / c_prod)).max(0.0)
}

/// Entanglement rate on the chord from `(c_prod, 0)` to `(c_ea, e_ea)`.
pub fn ce_timeshare(c_prod: f64, c_ea: f64, e_ea: f64, c: f64) -> f64 {
    e_ea * (c - c_prod) / (c_ea - c_prod)
}

/// Endpoints of the classical/entanglement comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CqeSummary {
    pub c_prod: f64,
    pub c_ea: f64,
    pub p_ea: f64,
    pub e_ea: f64,
}

impl CqeSummary {
    pub fn new(eta: f64) -> Result<Self> {
        let (c_prod, _) = classical_capacity_product(eta)?;
        let (c_ea, p_ea, e_ea) = entanglement_assisted_classical(eta)?;
        Ok(Self {
            c_prod,
            c_ea,
            p_ea,
            e_ea,
        })
    }
}
