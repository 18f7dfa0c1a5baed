//! Single-mode bosonic operators in a truncated Fock space.
//!
//! Displacement convention, fixed crate-wide: for a parameter `x = (x1, x2)`
//! in phase space, the coherent amplitude is `alpha = (x1 + i*x2)/sqrt(2)` and
//! `D(x) = exp(alpha a^dagger - conj(alpha) a)`. Under this convention a
//! displaced vacuum has mean photon number `|x|^2 / 2` and vacuum overlap
//! `exp(-|x|^2 / 4)`. Every reported MSE value for bosonic ensembles is in
//! these units.
//!
//! The generator `alpha a^dagger - conj(alpha) a` stays anti-Hermitian after
//! truncation, so its exponential is unitary on the truncated space. The
//! physical truncation loss is therefore measured by displacing in a padded
//! space (twice the requested cutoff) and projecting back: the projected state
//! has trace `1 - loss`, and is renormalized.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix, HermitianOperator};

/// Default acceptable truncation loss for displaced states.
pub const DEFAULT_TRUNC_TOL: f64 = 1e-6;

/// Truncated annihilation operator: `a |n> = sqrt(n) |n-1>`.
pub fn annihilation_operator(dim: usize) -> CMatrix {
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Truncated photon number operator `a^dagger a`.
pub fn number_operator(dim: usize) -> HermitianOperator {
    HermitianOperator::from_diagonal(&(0..dim).map(|n| n as f64).collect::<Vec<_>>())
        .expect("dim >= 1")
}

/// Vacuum density operator `|0><0|`.
pub fn vacuum_state(dim: usize) -> HermitianOperator {
    let mut diag = vec![0.0; dim];
    diag[0] = 1.0;
    HermitianOperator::from_diagonal(&diag).expect("dim >= 1")
}

/// Truncated thermal state with the given mean photon number, renormalized.
pub fn thermal_state(dim: usize, mean_photons: f64) -> Result<HermitianOperator> {
    if mean_photons.is_nan() || mean_photons < 0.0 || !mean_photons.is_finite() {
        return Err(Error::InvalidConfig {
            reason: format!("mean photon number must be finite and >= 0, got {mean_photons}"),
        });
    }
    let s = mean_photons / (1.0 + mean_photons);
    let mut diag: Vec<f64> = (0..dim).map(|n| s.powi(n as i32)).collect();
    let total: f64 = diag.iter().sum();
    for v in &mut diag {
        *v /= total;
    }
    HermitianOperator::from_diagonal(&diag)
}

/// Coherent amplitude for a phase-space point.
pub fn coherent_amplitude(x: &[f64; 2]) -> Complex64 {
    Complex64::new(x[0], x[1]) / 2.0f64.sqrt()
}

/// Weyl displacement operator on the truncated space.
///
/// Unitary on the truncated space (the truncated generator is anti-Hermitian),
/// computed through the spectral decomposition of `i * generator`.
pub fn displacement_operator(dim: usize, x: &[f64; 2]) -> Result<CMatrix> {
    let alpha = coherent_amplitude(x);
    let a = annihilation_operator(dim);
    let generator = a.adjoint() * alpha - a * alpha.conj();
    // H = i K is Hermitian; D = exp(K) = exp(-i H) = V exp(-i q) V^dagger.
    let h = HermitianOperator::new(generator.map(|z| z * Complex64::new(0.0, 1.0)))?;
    let decomp = eigh(&h)?;
    let d = decomp.eigenvalues().len();
    let phases = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        decomp
            .eigenvalues()
            .iter()
            .map(|&q| Complex64::from_polar(1.0, -q)),
    ));
    Ok(decomp.eigenvectors() * phases * decomp.eigenvectors().adjoint())
}

/// Displaced, truncated, renormalized state together with its truncation loss.
///
/// The base state lives at the target cutoff; the displacement itself is
/// carried out at twice the cutoff so that the reported loss is the genuine
/// mass pushed past the cutoff.
pub fn displaced_state_with_loss(
    base: &HermitianOperator,
    x: &[f64; 2],
) -> Result<(HermitianOperator, f64)> {
    let cutoff = base.dim();
    let padded = 2 * cutoff;
    let mut embedded = CMatrix::zeros(padded, padded);
    embedded.view_mut((0, 0), (cutoff, cutoff)).copy_from(base.matrix());

    let disp = displacement_operator(padded, x)?;
    let moved = &disp * embedded * disp.adjoint();
    let projected = moved.view((0, 0), (cutoff, cutoff)).into_owned();
    let state = HermitianOperator::new(projected)?;
    let trace = state.trace();
    let loss = 1.0 - trace;
    if trace <= 0.0 {
        return Err(Error::TruncationLoss {
            loss,
            tol: 0.0,
            point_index: 0,
        });
    }
    Ok((state.scaled(1.0 / trace), loss))
}

/// Displaced state, failing when the truncation loss exceeds `trunc_tol`.
pub fn displaced_state(
    base: &HermitianOperator,
    x: &[f64; 2],
    trunc_tol: f64,
    point_index: usize,
) -> Result<HermitianOperator> {
    let (state, loss) = displaced_state_with_loss(base, x)?;
    if loss > trunc_tol {
        return Err(Error::TruncationLoss {
            loss,
            tol: trunc_tol,
            point_index,
        });
    }
    Ok(state)
}
