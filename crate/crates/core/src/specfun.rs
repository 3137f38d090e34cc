//! Entropy primitives and the complex log-gamma function.
//!
//! All entropies are in bits. Arguments that sit within `1e-12` of the
//! boundary of their domain are clamped rather than rejected, since the
//! radicands of [`g_entropy`] land exactly on the boundary for fully
//! coherent or fully incoherent inputs.

use num_complex::Complex64;

use crate::error::{check_unit, Error, Result};

/// Complex argument of the Gamma function.
pub type ComplexValue = Complex64;

/// Binary Shannon entropy `h2(y) = -y log2 y - (1-y) log2 (1-y)`.
pub fn binary_entropy(y: f64) -> Result<f64> {
    let y = check_unit("y", y)?;
    Ok(h2(y))
}

/// Unchecked binary entropy; the argument is clamped into `[0, 1]`.
#[inline]
pub(crate) fn h2(y: f64) -> f64 {
    if y <= 0.0 || y >= 1.0 {
        return 0.0;
    }
    -y * y.log2() - (1.0 - y) * (1.0 - y).log2()
}

/// `h2((1 + f) / 2)` for a Bloch radius `f` in `[0, 1]`.
///
/// Evaluated on the lower branch `(1 - f) / 2`, where it is better conditioned.
#[inline]
pub(crate) fn h2_radius(f: f64) -> f64 {
    h2(0.5 * (1.0 - f.clamp(0.0, 1.0)))
}

/// `g(q, z, nu) = h2((1 + sqrt((1 - 2zq)^2 + 4 z nu^2 q (1 - q))) / 2)`.
///
/// This is the output entropy of the qubit state with excited population `q`
/// and coherence `nu * sqrt(q (1 - q))` after an amplitude damping channel of
/// transmissivity `z`.
pub fn g_entropy(q: f64, z: f64, nu: f64) -> Result<f64> {
    let q = check_unit("q", q)?;
    let z = check_unit("z", z)?;
    let nu = check_unit("nu", nu)?;
    let radicand = (1.0 - 2.0 * z * q).powi(2) + 4.0 * z * nu * nu * q * (1.0 - q);
    if !(-1e-12..=1.0 + 1e-9).contains(&radicand) {
        return Err(Error::Consistency(format!(
            "g radicand {radicand} outside [0, 1] at q={q}, z={z}, nu={nu}"
        )));
    }
    Ok(h2_radius(radicand.clamp(0.0, 1.0).sqrt()))
}

/// Unchecked `g(q, z, nu)`; arguments are assumed to lie in `[0, 1]` and
/// the radicand is clamped.
#[inline]
pub(crate) fn g(q: f64, z: f64, nu: f64) -> f64 {
    let radicand = (1.0 - 2.0 * z * q).powi(2) + 4.0 * z * nu * nu * q * (1.0 - q);
    h2_radius(radicand.clamp(0.0, 1.0).sqrt())
}

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k (2k - 1)) for k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

const STIRLING_MIN_RE: f64 = 15.0;
const STIRLING_MIN_IM: f64 = 30.0;

/// Principal branch of `log Gamma(z)`.
///
/// Upward recurrence moves the argument into the half-plane `Re w >= 15`
/// (or `Re w >= 0` with `|Im w| >= 30`), where a ten-term Stirling series is
/// accurate to well below double precision. Summing principal logarithms of
/// the shifted factors yields the branch that is analytic off the negative
/// real axis.
pub fn log_gamma_complex(z: ComplexValue) -> Result<ComplexValue> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain {
            name: "z",
            value: if z.re.is_finite() { z.im } else { z.re },
            range: "finite complex numbers",
        });
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Pole { re: z.re, im: z.im });
    }

    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < STIRLING_MIN_RE && !(w.re >= 0.0 && w.im.abs() >= STIRLING_MIN_IM) {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling(w) - shift)
}

fn stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv_sq = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv;
    for c in STIRLING {
        series += power * c;
        power *= inv_sq;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + series
}

/// `|prod Gamma(num) / prod Gamma(den)|^2`, accumulated in log space.
pub fn abs_gamma_ratio_sq(num: &[ComplexValue], den: &[ComplexValue]) -> Result<f64> {
    let mut log_mod = 0.0;
    for &z in num {
        log_mod += log_gamma_complex(z)?.re;
    }
    for &z in den {
        log_mod -= log_gamma_complex(z)?.re;
    }
    Ok((2.0 * log_mod).exp())
}
