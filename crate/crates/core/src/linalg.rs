//! Dense Hermitian linear algebra kernels.
//!
//! Everything downstream (measurement construction, gain evaluation, the
//! operator-valued-measure calculus) is built on the operations here:
//! eigendecomposition, PSD square root, Moore–Penrose pseudo-inverse, kernel
//! projector, norms, and the contraction `Lambda` with
//! `Lambda * sqrt(rho) = sqrt(rho_E)`.
//!
//! Rank decisions are relative: eigenvalues with `|q| <= rank_tol * max(1,
//! op_norm)` count as zero. [`DEFAULT_RANK_TOL`] is used throughout the crate
//! so that support and kernel projectors obtained from the same spectrum add
//! to the identity exactly.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;

/// Relative eigenvalue cutoff below which spectrum entries count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

const EIGEN_MAX_ITERS: usize = 20_000;

/// A dense complex `d x d` matrix with Hermitian symmetry.
///
/// Symmetry is enforced at construction by replacing the input with
/// `(A + A^dagger)/2`, which absorbs round-off asymmetry from products such as
/// `Lambda^dagger Lambda`. Values are immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
}

impl HermitianOperator {
    /// Builds an operator from a square complex matrix, symmetrizing it.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.nrows() == 0 {
            return Err(Error::EmptyDimension);
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let sym = (&mat + mat.adjoint()).scale(0.5);
        Ok(Self { mat: sym })
    }

    /// Builds an operator from a real square matrix.
    pub fn from_real(mat: &DMatrix<f64>) -> Result<Self> {
        Self::new(mat.map(|x| Complex64::new(x, 0.0)))
    }

    /// Diagonal operator with the given real entries.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_diagonal(&DVector::from_iterator(
            diag.len(),
            diag.iter().map(|&x| Complex64::new(x, 0.0)),
        )))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: CMatrix::zeros(dim, dim),
        }
    }

    /// Rank-one projector `|psi><psi|` onto the normalized amplitude vector.
    pub fn pure_state(amplitudes: &[Complex64]) -> Result<Self> {
        let v = DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        let v = v.unscale(norm);
        Self::new(&v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    /// Trace; real because the diagonal of a symmetrized matrix is real.
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mat: self.mat.scale(factor),
        }
    }
}

impl std::ops::Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

/// Spectral decomposition `A = V diag(q) V^dagger` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl EigenDecomposition {
    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary matrix whose columns are the eigenvectors, ordered to match
    /// [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("dim >= 1")
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.min_eigenvalue().abs().max(self.max_eigenvalue().abs())
    }

    /// Applies a real function to the spectrum: `V diag(f(q)) V^dagger`.
    ///
    /// All spectral operators derived from the same decomposition (square
    /// root, pseudo-inverse, support and kernel projectors) share one rank
    /// decision, which keeps identities like `Pi_supp + Pi_ker = I` exact.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let d = self.eigenvalues.len();
        let diag = CMatrix::from_diagonal(&DVector::from_iterator(
            d,
            self.eigenvalues.iter().map(|&q| Complex64::new(f(q), 0.0)),
        ));
        let mat = &self.eigenvectors * diag * self.eigenvectors.adjoint();
        HermitianOperator::new(mat).expect("spectral rebuild is square and finite")
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.map_spectrum(|q| q)
    }

    /// Relative rank cutoff for this spectrum.
    pub fn rank_cutoff(&self, rank_tol: f64) -> f64 {
        rank_tol * self.max_abs_eigenvalue().max(1.0)
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
pub fn eigh(a: &HermitianOperator) -> Result<EigenDecomposition> {
    let se = a
        .mat
        .clone()
        .try_symmetric_eigen(f64::EPSILON, EIGEN_MAX_ITERS)
        .or_else(|| {
            a.mat
                .clone()
                .try_symmetric_eigen(f64::EPSILON * 1.0e3, EIGEN_MAX_ITERS)
        });
    let se = match se {
        Some(se) => se,
        None => {
            return Err(Error::EigenNonConvergence {
                residual: a.mat.norm(),
            })
        }
    };

    let d = a.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &se.eigenvectors.column(src));
    }

    let decomp = EigenDecomposition {
        eigenvalues,
        eigenvectors,
    };
    let residual = (decomp.reconstruct().matrix() - &a.mat).norm();
    let scale = a.mat.norm().max(1.0);
    if residual > 1e-10 * scale {
        return Err(Error::EigenNonConvergence { residual });
    }
    Ok(decomp)
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(a: &HermitianOperator) -> Result<Vec<f64>> {
    Ok(eigh(a)?.eigenvalues.clone())
}

/// Unique PSD square root of a PSD operator.
///
/// Eigenvalues in `[-tol, 0)` are clamped to zero; an eigenvalue below `-tol`
/// is a genuine positivity violation and is reported as an error.
pub fn psd_sqrt(a: &HermitianOperator, tol: f64) -> Result<HermitianOperator> {
    let decomp = eigh(a)?;
    psd_sqrt_from(&decomp, tol)
}

/// [`psd_sqrt`] on a precomputed decomposition.
pub fn psd_sqrt_from(decomp: &EigenDecomposition, tol: f64) -> Result<HermitianOperator> {
    let min = decomp.min_eigenvalue();
    if min < -tol {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
            tol,
        });
    }
    Ok(decomp.map_spectrum(|q| q.max(0.0).sqrt()))
}

/// Moore–Penrose pseudo-inverse of a Hermitian operator.
pub fn pinv(a: &HermitianOperator, rank_tol: f64) -> Result<HermitianOperator> {
    let decomp = eigh(a)?;
    let cut = decomp.rank_cutoff(rank_tol);
    Ok(decomp.map_spectrum(|q| if q.abs() <= cut { 0.0 } else { 1.0 / q }))
}

/// Orthogonal projector onto the kernel of a Hermitian PSD operator.
pub fn kernel_projector(a: &HermitianOperator, rank_tol: f64) -> Result<HermitianOperator> {
    let decomp = eigh(a)?;
    let cut = decomp.rank_cutoff(rank_tol);
    Ok(decomp.map_spectrum(|q| if q.abs() <= cut { 1.0 } else { 0.0 }))
}

/// The contraction mapping `sqrt(rho)` to `sqrt(rho_E)`.
///
/// Realized in closed form as `sqrt(rho_E) * pinv(sqrt(rho))`, which satisfies
/// all three defining properties: operator norm at most one, kernel of `rho`
/// inside the kernel of the contraction, and the square-root intertwining
/// relation.
#[derive(Debug, Clone)]
pub struct Contraction {
    matrix: CMatrix,
    rank_tolerance: f64,
}

impl Contraction {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rank_tolerance(&self) -> f64 {
        self.rank_tolerance
    }

    /// Operator norm, computed as the square root of the largest eigenvalue
    /// of the Gram matrix.
    pub fn op_norm(&self) -> f64 {
        let gram = self.gram();
        let decomp = eigh(&gram).expect("gram matrix eigensolve");
        decomp.max_eigenvalue().max(0.0).sqrt()
    }

    /// The PSD Gram matrix `Lambda^dagger Lambda`, symmetrized.
    pub fn gram(&self) -> HermitianOperator {
        HermitianOperator::new(self.matrix.adjoint() * &self.matrix)
            .expect("gram matrix is square and finite")
    }
}

/// Builds the contraction for a dominated pair `0 <= rho_e <= rho`.
pub fn contraction_lambda(
    rho_e: &HermitianOperator,
    rho: &HermitianOperator,
    rank_tol: f64,
) -> Result<Contraction> {
    if rho_e.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: rho_e.dim(),
            right: rho.dim(),
        });
    }
    let diff = rho - rho_e;
    let min = eigh(&diff)?.min_eigenvalue();
    if min < -1e-9 {
        return Err(Error::DominationViolated {
            min_eigenvalue: min,
        });
    }

    let sqrt_e = psd_sqrt(rho_e, 1e-9)?;
    let rho_decomp = eigh(rho)?;
    let cut = rho_decomp.rank_cutoff(rank_tol);
    let pinv_sqrt = rho_decomp.map_spectrum(|q| if q <= cut { 0.0 } else { 1.0 / q.sqrt() });
    Ok(Contraction {
        matrix: sqrt_e.matrix() * pinv_sqrt.matrix(),
        rank_tolerance: rank_tol,
    })
}

/// Trace norm: sum of absolute eigenvalues.
pub fn trace_norm(a: &HermitianOperator) -> f64 {
    let decomp = eigh(a).expect("hermitian eigensolve for trace norm");
    decomp.eigenvalues().iter().map(|q| q.abs()).sum()
}

/// Hilbert–Schmidt (Frobenius) norm.
pub fn hs_norm(a: &HermitianOperator) -> f64 {
    a.matrix().norm()
}

/// Operator norm: largest absolute eigenvalue.
pub fn op_norm(a: &HermitianOperator) -> f64 {
    let decomp = eigh(a).expect("hermitian eigensolve for operator norm");
    decomp.max_abs_eigenvalue()
}

/// Hilbert–Schmidt inner product `Tr[a b]`, real for Hermitian pairs.
pub fn hs_inner(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    a.matrix()
        .iter()
        .zip(b.matrix().iter())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

/// Hilbert–Schmidt distance between two Hermitian operators.
pub fn hs_distance(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    (a.matrix() - b.matrix()).norm()
}

/// `Tr[a b]` for general complex matrices in `O(d^2)`.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let d = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Conjugation `x a x^dagger`, symmetrized.
pub fn conjugate(a: &HermitianOperator, x: &CMatrix) -> HermitianOperator {
    HermitianOperator::new(x * a.matrix() * x.adjoint()).expect("conjugation keeps shape")
}
