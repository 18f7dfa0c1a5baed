//! Pretty good measurements over outcome partitions.
//!
//! For a finite ensemble with average state `rho`, the finite PGM has elements
//! `M_i = sqrt(rho^+) mu_i rho_i sqrt(rho^+) + mu_i Pi_ker(rho)`. The
//! generalized construction assigns to every cell `E` of an outcome partition
//! the element
//!
//! ```text
//! m(E) = Lambda_E^dagger Lambda_E + mu(E) Pi_ker(rho),
//! Lambda_E sqrt(rho) = sqrt(rho_E),
//! ```
//!
//! which satisfies `sqrt(rho) m(E) sqrt(rho) = rho_E` and reduces to the
//! finite PGM on singleton cells. The kernel term is always added; it is zero
//! for full-rank `rho`.
//!
//! All spectral objects derived from `rho` (square root, its pseudo-inverse,
//! the support and kernel projectors) come from a single eigendecomposition
//! with a single rank decision, which keeps `Pi_supp + Pi_ker = I` exact and
//! the completeness residual at round-off level.

use num_complex::Complex64;

use crate::ensemble::{
    average_state, partial_state, singleton_partition, validate_partition, Ensemble, OutcomeCell,
};
use crate::error::{Error, Result};
use crate::linalg::{
    eigh, hs_norm, CMatrix, EigenDecomposition, HermitianOperator, DEFAULT_RANK_TOL,
};

/// A finite-outcome measurement: one PSD element per partition cell, summing
/// to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    cells: Vec<OutcomeCell>,
    elements: Vec<HermitianOperator>,
    label: String,
}

impl Povm {
    /// Structural construction: matching lengths and a common dimension.
    ///
    /// Numerical validity (positivity, completeness) is checked separately by
    /// [`validate_povm`], so that deliberately broken candidates can be
    /// constructed and reported on.
    pub fn new(
        cells: Vec<OutcomeCell>,
        elements: Vec<HermitianOperator>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if cells.is_empty() || cells.len() != elements.len() {
            return Err(Error::InvalidPartition {
                reason: format!(
                    "{} cells paired with {} elements",
                    cells.len(),
                    elements.len()
                ),
            });
        }
        let dim = elements[0].dim();
        if elements.iter().any(|m| m.dim() != dim) {
            return Err(Error::InvalidPartition {
                reason: "POVM elements have mixed dimensions".into(),
            });
        }
        Ok(Self {
            cells,
            elements,
            label: label.into(),
        })
    }

    pub fn cells(&self) -> &[OutcomeCell] {
        &self.cells
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &HermitianOperator {
        &self.elements[k]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// For a POVM whose cells are singletons over `r` points, returns the map
    /// from point index to element index.
    pub fn singleton_order(&self, r: usize) -> Result<Vec<usize>> {
        if self.cells.len() != r {
            return Err(Error::NonSingletonCells);
        }
        let mut order = vec![usize::MAX; r];
        for (k, cell) in self.cells.iter().enumerate() {
            let idx = cell.indices();
            if idx.len() != 1 || idx[0] >= r || order[idx[0]] != usize::MAX {
                return Err(Error::NonSingletonCells);
            }
            order[idx[0]] = k;
        }
        Ok(order)
    }
}

/// Spectral objects of the average state, shared by every cell.
pub struct AverageStateFactors {
    pub rho: HermitianOperator,
    pub decomposition: EigenDecomposition,
    pub sqrt_rho: HermitianOperator,
    pub quarter_rho: HermitianOperator,
    pub pinv_sqrt_rho: HermitianOperator,
    pub proj_kernel: HermitianOperator,
    pub proj_support: HermitianOperator,
    pub rank_tol: f64,
}

/// Computes all spectral factors of the average state in one decomposition.
pub fn average_factors(e: &Ensemble, rank_tol: f64) -> Result<AverageStateFactors> {
    let rho = average_state(e);
    let decomposition = eigh(&rho)?;
    let cut = decomposition.rank_cutoff(rank_tol);
    let sqrt_rho = decomposition.map_spectrum(|q| q.max(0.0).sqrt());
    let quarter_rho = decomposition.map_spectrum(|q| q.max(0.0).powf(0.25));
    let pinv_sqrt_rho =
        decomposition.map_spectrum(|q| if q <= cut { 0.0 } else { 1.0 / q.sqrt() });
    let proj_kernel = decomposition.map_spectrum(|q| if q <= cut { 1.0 } else { 0.0 });
    let proj_support = decomposition.map_spectrum(|q| if q <= cut { 0.0 } else { 1.0 });
    Ok(AverageStateFactors {
        rho,
        decomposition,
        sqrt_rho,
        quarter_rho,
        pinv_sqrt_rho,
        proj_kernel,
        proj_support,
        rank_tol,
    })
}

/// Finite PGM with one singleton cell per ensemble point.
pub fn build_finite_pgm(e: &Ensemble) -> Result<Povm> {
    let factors = average_factors(e, DEFAULT_RANK_TOL)?;
    let b = factors.pinv_sqrt_rho.matrix();
    let mut elements = Vec::with_capacity(e.len());
    for i in 0..e.len() {
        let mu = e.weight(i);
        let core = b * e.state(i).matrix() * b * Complex64::new(mu, 0.0);
        let kernel = factors.proj_kernel.matrix() * Complex64::new(mu, 0.0);
        elements.push(HermitianOperator::new(core + kernel)?);
    }
    Povm::new(singleton_partition(e.len()), elements, "pgm")
}

/// Generalized PGM over an arbitrary outcome partition.
pub fn build_gpgm(e: &Ensemble, partition: &[OutcomeCell]) -> Result<Povm> {
    validate_partition(partition, e.len())?;
    let factors = average_factors(e, DEFAULT_RANK_TOL)?;
    let mut elements = Vec::with_capacity(partition.len());
    for cell in partition {
        elements.push(gpgm_element(e, &factors, cell)?);
    }
    Povm::new(partition.to_vec(), elements, "gpgm")
}

/// Single GPGM element `Lambda_E^dagger Lambda_E + mu(E) Pi_ker(rho)`.
pub fn gpgm_element(
    e: &Ensemble,
    factors: &AverageStateFactors,
    cell: &OutcomeCell,
) -> Result<HermitianOperator> {
    let rho_e = partial_state(e, cell)?;
    let sqrt_e = crate::linalg::psd_sqrt(&rho_e, 1e-9)?;
    let lambda: CMatrix = sqrt_e.matrix() * factors.pinv_sqrt_rho.matrix();
    let gram = lambda.adjoint() * &lambda;
    let kernel = factors.proj_kernel.matrix() * Complex64::new(e.cell_weight(cell), 0.0);
    HermitianOperator::new(gram + kernel)
}

/// Positivity and completeness report for a candidate POVM.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// Minimum eigenvalue of each element.
    pub per_element_min_eigenvalue: Vec<f64>,
    /// Hilbert–Schmidt norm of `sum(elements) - I`.
    pub completeness_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl ValidationReport {
    pub fn min_eigenvalue(&self) -> f64 {
        self.per_element_min_eigenvalue
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Reports per-element positivity and the completeness residual at `tol`.
///
/// Never fails: broken candidates produce a failing report.
pub fn validate_povm(p: &Povm, tol: f64) -> ValidationReport {
    let per_element_min_eigenvalue: Vec<f64> = p
        .elements()
        .iter()
        .map(|m| match eigh(m) {
            Ok(d) => d.min_eigenvalue(),
            Err(_) => f64::NEG_INFINITY,
        })
        .collect();
    let mut sum = CMatrix::zeros(p.dim(), p.dim());
    for m in p.elements() {
        sum += m.matrix();
    }
    let completeness_residual = hs_norm(
        &HermitianOperator::new(sum - CMatrix::identity(p.dim(), p.dim()))
            .expect("difference keeps shape"),
    );
    let min = per_element_min_eigenvalue
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let pass = min >= -tol && completeness_residual <= tol;
    ValidationReport {
        per_element_min_eigenvalue,
        completeness_residual,
        tol,
        pass,
    }
}

/// Merges cells of a POVM; merged elements are exact sums of constituents.
pub fn coarse_grain(p: &Povm, merge: &[OutcomeCell]) -> Result<Povm> {
    validate_partition(merge, p.len())?;
    let mut cells = Vec::with_capacity(merge.len());
    let mut elements = Vec::with_capacity(merge.len());
    for block in merge {
        let mut point_indices = Vec::new();
        let mut acc = CMatrix::zeros(p.dim(), p.dim());
        for &k in block.indices() {
            point_indices.extend_from_slice(p.cells()[k].indices());
            acc += p.element(k).matrix();
        }
        cells.push(OutcomeCell::new(point_indices)?);
        elements.push(HermitianOperator::new(acc)?);
    }
    Povm::new(cells, elements, format!("{}_coarse", p.label()))
}
