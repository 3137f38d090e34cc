//! Qubit amplitude damping channel and explicit classical-quantum states.
//!
//! Basis ordering follows the input-state parameterisation
//! `rho = [[1 - q, gamma], [conj(gamma), q]]`: index 0 is `|1>` and index 1 is
//! `|0>`. With this ordering the Kraus operators are
//! `K0 = |1><1| + sqrt(eta) |0><0|` and `K1 = sqrt(1 - eta) |1><0|`, so the
//! population `q` of `|0>` is the one that decays.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{check_unit, Error, Result};
use crate::specfun::h2_radius;

const STATE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Qubit density operator `[[1 - q, gamma], [conj(gamma), q]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub q: f64,
    pub gamma: Complex64,
}

impl QubitState {
    pub fn new(q: f64, gamma: Complex64) -> Result<Self> {
        let q = check_unit("q", q)?;
        let bound = (q - q * q).max(0.0).sqrt();
        if !(gamma.norm() <= bound + STATE_TOL) {
            return Err(Error::State(format!(
                "|gamma| = {} exceeds sqrt(q - q^2) = {bound}",
                gamma.norm()
            )));
        }
        Ok(Self { q, gamma })
    }

    /// State with real coherence `nu * sqrt(q (1 - q))`, `nu` in `[-1, 1]`.
    pub fn with_coherence(q: f64, nu: f64) -> Result<Self> {
        let q = check_unit("q", q)?;
        if !(-1.0 - STATE_TOL..=1.0 + STATE_TOL).contains(&nu) {
            return Err(Error::Domain {
                name: "nu",
                value: nu,
                range: "[-1, 1]",
            });
        }
        let gamma = nu.clamp(-1.0, 1.0) * (q * (1.0 - q)).sqrt();
        Ok(Self {
            q,
            gamma: Complex64::new(gamma, 0.0),
        })
    }

    pub fn matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(1.0 - self.q, 0.0),
            self.gamma,
            self.gamma.conj(),
            Complex64::new(self.q, 0.0),
        )
    }

    /// Bloch radius `sqrt((1 - 2q)^2 + 4 |gamma|^2)`.
    pub fn bloch_radius(&self) -> f64 {
        ((1.0 - 2.0 * self.q).powi(2) + 4.0 * self.gamma.norm_sqr())
            .clamp(0.0, 1.0)
            .sqrt()
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        h2_radius(self.bloch_radius())
    }

    /// Principal square root of the density matrix.
    fn sqrt_matrix(&self) -> Matrix2<Complex64> {
        let det = ((1.0 - self.q) * self.q - self.gamma.norm_sqr()).max(0.0);
        let s = det.sqrt();
        let scale = 1.0 / (1.0 + 2.0 * s).sqrt();
        (self.matrix() + Matrix2::identity() * Complex64::new(s, 0.0)) * Complex64::new(scale, 0.0)
    }
}

/// Entropy of a qubit state, `h2((1 + sqrt((1-2q)^2 + 4|gamma|^2)) / 2)`.
pub fn state_entropy(s: &QubitState) -> f64 {
    s.entropy()
}

/// Amplitude damping channel with transmissivity `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ADChannel {
    pub eta: f64,
}

impl ADChannel {
    pub fn new(eta: f64) -> Result<Self> {
        Ok(Self {
            eta: check_unit("eta", eta)?,
        })
    }

    pub fn kraus(&self) -> [Matrix2<Complex64>; 2] {
        let zero = Complex64::new(0.0, 0.0);
        let k0 = Matrix2::new(
            Complex64::new(1.0, 0.0),
            zero,
            zero,
            Complex64::new(self.eta.sqrt(), 0.0),
        );
        let k1 = Matrix2::new(zero, Complex64::new((1.0 - self.eta).sqrt(), 0.0), zero, zero);
        [k0, k1]
    }

    /// Largest entry of `sum_j K_j^dag K_j - I`.
    pub fn completeness_defect(&self) -> f64 {
        let sum: Matrix2<Complex64> = self.kraus().iter().map(|k| k.adjoint() * k).sum();
        (sum - Matrix2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Output state `(eta q, sqrt(eta) gamma)`.
    pub fn apply_channel(&self, s: &QubitState) -> QubitState {
        QubitState {
            q: self.eta * s.q,
            gamma: s.gamma * self.eta.sqrt(),
        }
    }

    /// Environment state `((1 - eta) q, sqrt(1 - eta) gamma)`.
    pub fn apply_complementary(&self, s: &QubitState) -> QubitState {
        QubitState {
            q: (1.0 - self.eta) * s.q,
            gamma: s.gamma * (1.0 - self.eta).sqrt(),
        }
    }

    /// Kraus-sum action on an arbitrary 2x2 operator.
    pub fn apply_kraus(&self, rho: &Matrix2<Complex64>) -> Matrix2<Complex64> {
        self.kraus().iter().map(|k| k * rho * k.adjoint()).sum()
    }

    /// Isometric extension `A' -> B (x) E` as a 4x2 matrix, rows indexed `2b + e`.
    /// The environment starts in its vacuum, index 0.
    fn isometry(&self) -> [[f64; 2]; 4] {
        let mut v = [[0.0; 2]; 4];
        v[0][0] = 1.0;
        v[2][1] = self.eta.sqrt();
        v[1][1] = (1.0 - self.eta).sqrt();
        v
    }
}

/// Tensor factor labels of a classical-quantum state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    /// Classical letter register.
    X,
    /// Reference system purifying each input.
    A,
    /// Channel output.
    B,
    /// Channel environment.
    E,
}

/// Density matrix on a labelled tensor product, first factor most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    factors: Vec<(Subsystem, usize)>,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(factors: Vec<(Subsystem, usize)>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim: usize = factors.iter().map(|f| f.1).product();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::State(format!(
                "matrix is {}x{}, factors give dimension {dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        for (i, (label, _)) in factors.iter().enumerate() {
            if factors[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::State(format!("duplicate factor {label:?}")));
            }
        }
        let herm = (&matrix - matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm > STATE_TOL {
            return Err(Error::State(format!("not Hermitian (defect {herm:e})")));
        }
        let trace = matrix.trace();
        if (trace - 1.0).norm() > STATE_TOL {
            return Err(Error::State(format!("trace {trace} != 1")));
        }
        let state = Self { factors, matrix };
        let min = state.raw_eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::State(format!("negative eigenvalue {min:e}")));
        }
        Ok(state)
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn factors(&self) -> &[(Subsystem, usize)] {
        &self.factors
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    fn raw_eigenvalues(&self) -> Vec<f64> {
        self.matrix.clone().symmetric_eigenvalues().iter().copied().collect()
    }

    /// Eigenvalues floored at zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.raw_eigenvalues().into_iter().map(|l| l.max(0.0)).collect()
    }

    /// Von Neumann entropy in bits, with `0 log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .filter(|&l| l > 0.0)
            .map(|l| -l * l.log2())
            .sum()
    }

    /// Reduced state on `keep`, in the original factor order.
    pub fn marginal(&self, keep: &[Subsystem]) -> Result<DensityMatrix> {
        for label in keep {
            if !self.factors.iter().any(|(l, _)| l == label) {
                return Err(Error::State(format!("no factor {label:?} to keep")));
            }
        }
        let dims: Vec<usize> = self.factors.iter().map(|f| f.1).collect();
        let kept: Vec<bool> = self.factors.iter().map(|(l, _)| keep.contains(l)).collect();
        let factors: Vec<(Subsystem, usize)> = self
            .factors
            .iter()
            .zip(&kept)
            .filter(|(_, &k)| k)
            .map(|(f, _)| *f)
            .collect();
        let out_dim: usize = factors.iter().map(|f| f.1).product();

        // Split a full index into (kept index, traced index).
        let split = |mut index: usize| {
            let mut kept_idx = 0;
            let mut kept_stride = 1;
            let mut traced_idx = 0;
            let mut traced_stride = 1;
            for (d, &k) in dims.iter().zip(&kept).rev() {
                let digit = index % d;
                index /= d;
                if k {
                    kept_idx += digit * kept_stride;
                    kept_stride *= d;
                } else {
                    traced_idx += digit * traced_stride;
                    traced_stride *= d;
                }
            }
            (kept_idx, traced_idx)
        };
        let parts: Vec<(usize, usize)> = (0..self.dimension()).map(split).collect();

        let mut out = DMatrix::<Complex64>::zeros(out_dim, out_dim);
        for (i, &(ki, ti)) in parts.iter().enumerate() {
            for (j, &(kj, tj)) in parts.iter().enumerate() {
                if ti == tj {
                    out[(ki, kj)] += self.matrix[(i, j)];
                }
            }
        }
        Ok(DensityMatrix {
            factors,
            matrix: out,
        })
    }

    /// Entropy of the marginal on `keep`.
    pub fn marginal_entropy(&self, keep: &[Subsystem]) -> Result<f64> {
        Ok(self.marginal(keep)?.entropy())
    }
}

fn validate_ensemble(ensemble: &[(f64, QubitState)]) -> Result<()> {
    if ensemble.is_empty() {
        return Err(Error::State("empty ensemble".into()));
    }
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if ensemble.iter().any(|(p, _)| !(*p >= -STATE_TOL)) || (total - 1.0).abs() > STATE_TOL {
        return Err(Error::Domain {
            name: "ensemble probability sum",
            value: total,
            range: "non-negative weights summing to 1",
        });
    }
    for (_, s) in ensemble {
        QubitState::new(s.q, s.gamma)?;
    }
    Ok(())
}

/// Pure state on `A (x) B (x) E` obtained by purifying `s` and sending the
/// purifying copy through the channel isometry. Index `4a + 2b + e`.
fn purified_output(ch: &ADChannel, s: &QubitState) -> [Complex64; 8] {
    let root = s.sqrt_matrix();
    let v = ch.isometry();
    let mut psi = [Complex64::new(0.0, 0.0); 8];
    for a in 0..2 {
        for be in 0..4 {
            let mut amp = Complex64::new(0.0, 0.0);
            for (a_in, &weight) in v[be].iter().enumerate() {
                amp += root[(a_in, a)] * weight;
            }
            psi[4 * a + be] = amp;
        }
    }
    psi
}

/// `rho_XAB = sum_x p_x |x><x| (x) (id_A (x) N)(|phi_x><phi_x|)`.
pub fn build_cq_state(ch: &ADChannel, ensemble: &[(f64, QubitState)]) -> Result<DensityMatrix> {
    build_cq_state_with_environment(ch, ensemble)?.marginal(&[Subsystem::X, Subsystem::A, Subsystem::B])
}

/// Same state with the channel environment kept: `sigma_XABE`.
pub fn build_cq_state_with_environment(
    ch: &ADChannel,
    ensemble: &[(f64, QubitState)],
) -> Result<DensityMatrix> {
    validate_ensemble(ensemble)?;
    let n = ensemble.len();
    let mut m = DMatrix::<Complex64>::zeros(8 * n, 8 * n);
    for (x, (p, s)) in ensemble.iter().enumerate() {
        let psi = purified_output(ch, s);
        for i in 0..8 {
            for j in 0..8 {
                m[(8 * x + i, 8 * x + j)] = psi[i] * psi[j].conj() * p.max(0.0);
            }
        }
    }
    DensityMatrix::new(
        vec![
            (Subsystem::X, n),
            (Subsystem::A, 2),
            (Subsystem::B, 2),
            (Subsystem::E, 2),
        ],
        m,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_state(rng: &mut ChaCha8Rng) -> QubitState {
        let q: f64 = rng.random();
        let r = rng.random::<f64>() * (q - q * q).sqrt();
        let phase = rng.random::<f64>() * std::f64::consts::TAU;
        QubitState::new(q, Complex64::from_polar(r, phase)).unwrap()
    }

    fn matrix_close(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn state_validation() {
        assert!(QubitState::new(0.5, c(0.5, 0.0)).is_ok());
        assert!(QubitState::new(0.5, c(0.6, 0.0)).is_err());
        assert!(QubitState::new(1.2, c(0.0, 0.0)).is_err());
        assert!(QubitState::with_coherence(0.3, 1.5).is_err());
    }

    #[test]
    fn kraus_completeness_grid() {
        for i in 0..=100 {
            let ch = ADChannel::new(i as f64 / 100.0).unwrap();
            assert!(ch.completeness_defect() < 1e-12);
        }
        assert!(ADChannel::new(1.5).is_err());
    }

    #[test]
    fn channel_examples() {
        let s = QubitState::new(0.5, c(0.5, 0.0)).unwrap();
        let id = ADChannel::new(1.0).unwrap();
        assert_eq!(id.apply_channel(&s), s);
        let full = ADChannel::new(0.0).unwrap();
        let out = full.apply_channel(&s);
        assert_eq!((out.q, out.gamma), (0.0, c(0.0, 0.0)));
        assert_eq!(full.apply_complementary(&s), s);
        let zero = id.apply_complementary(&s);
        assert_eq!((zero.q, zero.gamma), (0.0, c(0.0, 0.0)));

        let ch = ADChannel::new(0.75).unwrap();
        let out = ch.apply_channel(&s);
        assert_relative_eq!(out.q, 0.375, epsilon = 1e-15);
        assert_relative_eq!(out.gamma.re, 0.433_012_701_892_219_3, epsilon = 1e-15);
        let env = ch.apply_complementary(&s);
        assert_relative_eq!(env.q, 0.125, epsilon = 1e-15);
        assert_relative_eq!(env.gamma.re, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn kraus_action_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let s = random_state(&mut rng);
            let ch = ADChannel::new(rng.random()).unwrap();
            let kraus = ch.apply_kraus(&s.matrix());
            assert!(matrix_close(&kraus, &ch.apply_channel(&s).matrix(), 1e-14));
        }
    }

    #[test]
    fn entropy_examples() {
        assert_relative_eq!(QubitState::new(0.5, c(0.0, 0.0)).unwrap().entropy(), 1.0);
        assert_eq!(QubitState::new(0.5, c(0.5, 0.0)).unwrap().entropy(), 0.0);
        assert_relative_eq!(
            QubitState::new(0.375, c(0.0, 0.0)).unwrap().entropy(),
            0.954_434_002_924_965,
            epsilon = 1e-14
        );
    }

    #[test]
    fn entropy_matches_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let s = random_state(&mut rng);
            let dm = DensityMatrix::new(
                vec![(Subsystem::A, 2)],
                DMatrix::from_iterator(2, 2, s.matrix().iter().copied()),
            )
            .unwrap();
            assert!((dm.entropy() - s.entropy()).abs() < 1e-10);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let s = random_state(&mut rng);
            let r = s.sqrt_matrix();
            assert!(matrix_close(&(r * r), &s.matrix(), 1e-12));
        }
    }

    #[test]
    fn pure_noiseless_input_is_rank_one() {
        let ch = ADChannel::new(1.0).unwrap();
        let s = QubitState::new(1.0, c(0.0, 0.0)).unwrap();
        let rho = build_cq_state(&ch, &[(1.0, s)]).unwrap();
        assert_eq!(rho.dimension(), 4);
        assert!(rho.entropy().abs() < 1e-12);
        let rank = rho.eigenvalues().iter().filter(|&&l| l > 1e-12).count();
        assert_eq!(rank, 1);
    }

    #[test]
    fn symmetric_ensemble_output_entropy() {
        // p = 0.5, nu = 0, eta = 0.75: H(B) = h2(0.375).
        let s = QubitState::with_coherence(0.5, 0.0).unwrap();
        let ch = ADChannel::new(0.75).unwrap();
        let rho = build_cq_state(&ch, &[(0.5, s), (0.5, s)]).unwrap();
        let hb = rho.marginal_entropy(&[Subsystem::B]).unwrap();
        assert_relative_eq!(hb, 0.954_434_002_924_965, epsilon = 1e-12);
    }

    #[test]
    fn invalid_ensemble() {
        let ch = ADChannel::new(0.5).unwrap();
        let s = QubitState::with_coherence(0.5, 0.0).unwrap();
        assert!(build_cq_state(&ch, &[(0.5, s), (0.4, s)]).is_err());
        assert!(build_cq_state(&ch, &[(1.5, s), (-0.5, s)]).is_err());
        assert!(build_cq_state(&ch, &[]).is_err());
    }

    #[test]
    fn marginal_rejects_unknown_label() {
        let ch = ADChannel::new(0.5).unwrap();
        let s = QubitState::with_coherence(0.5, 0.3).unwrap();
        let rho = build_cq_state(&ch, &[(1.0, s)]).unwrap();
        assert!(rho.marginal(&[Subsystem::E]).is_err());
    }

    #[test]
    fn noiseless_coherent_information_equals_reference_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let ch = ADChannel::new(1.0).unwrap();
        let ensemble: Vec<_> = (0..3).map(|_| (1.0 / 3.0, random_state(&mut rng))).collect();
        let sigma = build_cq_state_with_environment(&ch, &ensemble).unwrap();
        let h_bx = sigma.marginal_entropy(&[Subsystem::X, Subsystem::B]).unwrap();
        let h_abx = sigma.marginal_entropy(&[Subsystem::X, Subsystem::A, Subsystem::B]).unwrap();
        let h_a_given_x: f64 = ensemble.iter().map(|(p, s)| p * s.entropy()).sum();
        let h_ex = sigma.marginal_entropy(&[Subsystem::X, Subsystem::E]).unwrap();
        let h_x = sigma.marginal_entropy(&[Subsystem::X]).unwrap();
        assert!((h_ex - h_x).abs() < 1e-10);
        assert!((h_bx - h_abx - h_a_given_x).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn purification_and_complementarity(
            p0 in 0.0f64..=1.0,
            q0 in 0.0f64..=1.0, q1 in 0.0f64..=1.0,
            nu0 in -1.0f64..=1.0, nu1 in -1.0f64..=1.0,
            eta in 0.0f64..=1.0,
        ) {
            let ch = ADChannel::new(eta).unwrap();
            let ensemble = [
                (p0, QubitState::with_coherence(q0, nu0).unwrap()),
                (1.0 - p0, QubitState::with_coherence(q1, nu1).unwrap()),
            ];
            let sigma = build_cq_state_with_environment(&ch, &ensemble).unwrap();

            let b = sigma.marginal(&[Subsystem::B]).unwrap();
            let avg: Matrix2<Complex64> = ensemble
                .iter()
                .map(|(p, s)| ch.apply_channel(s).matrix() * Complex64::new(*p, 0.0))
                .sum();
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((b.matrix()[(i, j)] - avg[(i, j)]).norm() < 1e-12);
                }
            }

            let h_x = sigma.marginal_entropy(&[Subsystem::X]).unwrap();
            let h_ex = sigma.marginal_entropy(&[Subsystem::X, Subsystem::E]).unwrap();
            let closed: f64 = ensemble.iter().map(|(p, s)| p * ch.apply_complementary(s).entropy()).sum();
            prop_assert!((h_ex - h_x - closed).abs() < 1e-10);
        }
    }
}
