//! Entropic quantities computed directly from explicit density matrices.
//!
//! Every function here works on marginals of a labelled state produced by
//! [`build_cq_state`](crate::channel::build_cq_state) or its environment
//! variant, and serves as the reference for the closed forms in `regions`.

use crate::channel::{DensityMatrix, Subsystem};
use crate::error::Result;

use Subsystem::{A, B, E, X};

/// `I(AX;B) = H(AX) + H(B) - H(ABX)`.
pub fn mutual_information_ax_b(state: &DensityMatrix) -> Result<f64> {
    Ok(state.marginal_entropy(&[X, A])? + state.marginal_entropy(&[B])?
        - state.marginal_entropy(&[X, A, B])?)
}

/// `I(A>BX) = H(BX) - H(ABX)`.
pub fn coherent_information_a_bx(state: &DensityMatrix) -> Result<f64> {
    Ok(state.marginal_entropy(&[X, B])? - state.marginal_entropy(&[X, A, B])?)
}

/// `I(X;B) = H(X) + H(B) - H(BX)`.
pub fn holevo_information_x_b(state: &DensityMatrix) -> Result<f64> {
    Ok(state.marginal_entropy(&[X])? + state.marginal_entropy(&[B])?
        - state.marginal_entropy(&[X, B])?)
}

/// `H(S|X) = H(SX) - H(X)` for a single quantum factor `S`.
pub fn conditional_entropy_given_x(state: &DensityMatrix, s: Subsystem) -> Result<f64> {
    Ok(state.marginal_entropy(&[X, s])? - state.marginal_entropy(&[X])?)
}

/// `H(B|X)`.
pub fn conditional_entropy_b_x(state: &DensityMatrix) -> Result<f64> {
    conditional_entropy_given_x(state, B)
}

/// `H(E|X)`; the state must carry the environment factor.
pub fn conditional_entropy_e_x(state: &DensityMatrix) -> Result<f64> {
    conditional_entropy_given_x(state, E)
}

/// The three information quantities bounding the triple region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InformationTriple {
    /// `I(X;B)`
    pub holevo: f64,
    /// `I(A>BX)`, not floored.
    pub coherent: f64,
    /// `I(AX;B)`
    pub mutual: f64,
}

pub fn information_triple(state: &DensityMatrix) -> Result<InformationTriple> {
    let h_x = state.marginal_entropy(&[X])?;
    let h_b = state.marginal_entropy(&[B])?;
    let h_xa = state.marginal_entropy(&[X, A])?;
    let h_xb = state.marginal_entropy(&[X, B])?;
    let h_xab = state.marginal_entropy(&[X, A, B])?;
    Ok(InformationTriple {
        holevo: h_x + h_b - h_xb,
        coherent: h_xb - h_xab,
        mutual: h_xa + h_b - h_xab,
    })
}
