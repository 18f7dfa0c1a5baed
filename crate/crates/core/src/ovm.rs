//! Finite-partition calculus of positive operator-valued measures.
//!
//! An [`OperatorValuedMeasure`] assigns a PSD operator to each cell of a
//! finite partition without any completeness requirement. Scalar integration
//! is the weighted sum `integral f dl = sum_i f_i l(E_i)`; the semivariation
//! equals the operator norm of the total mass; and the trace and
//! Hilbert–Schmidt pairing identities
//!
//! ```text
//! Tr[integral f dl]                         = sum_i f_i Tr[l(E_i)]
//! Tr[(integral f dl)(integral g dl)]        = sum_ij f_i g_j Tr[l(E_i) l(E_j)]
//! ```
//!
//! become exactly checkable finite identities. The compressed measures
//! `rho^{1/4} m(E) rho^{1/4}` and `rho^{1/2} m(E) rho^{1/2}` of a pretty good
//! measurement connect this calculus to the square-root-bound proof: the
//! quarter compression is dominated by `rho^{1/2}` on both sides, and the half
//! compression reproduces the partial states.

use num_complex::Complex64;

use crate::ensemble::{Ensemble, OutcomeCell};
use crate::error::{Error, Result};
use crate::gpgm::{average_factors, Povm};
use crate::linalg::{
    eigenvalues, hs_inner, op_norm, trace_norm, trace_product, CMatrix, HermitianOperator,
    DEFAULT_RANK_TOL,
};

/// PSD-operator-valued set map over a finite partition; no completeness.
#[derive(Debug, Clone)]
pub struct OperatorValuedMeasure {
    cells: Vec<OutcomeCell>,
    values: Vec<HermitianOperator>,
}

impl OperatorValuedMeasure {
    /// Validates matching lengths, a common dimension, and positivity of each
    /// value within `1e-9`.
    pub fn new(cells: Vec<OutcomeCell>, values: Vec<HermitianOperator>) -> Result<Self> {
        if cells.is_empty() || cells.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: cells.len(),
            });
        }
        let dim = values[0].dim();
        for v in &values {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: v.dim(),
                    right: dim,
                });
            }
            let min = eigenvalues(v)?[0];
            if min < -1e-9 {
                return Err(Error::NotPsd {
                    min_eigenvalue: min,
                    tol: 1e-9,
                });
            }
        }
        Ok(Self { cells, values })
    }

    pub fn cells(&self) -> &[OutcomeCell] {
        &self.cells
    }

    pub fn values(&self) -> &[HermitianOperator] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    /// Total mass `l(X) = sum of values`.
    pub fn total_mass(&self) -> HermitianOperator {
        let mut acc = CMatrix::zeros(self.dim(), self.dim());
        for v in &self.values {
            acc += v.matrix();
        }
        HermitianOperator::new(acc).expect("sum keeps shape")
    }
}

/// Scalar integration `sum_i f_i l(E_i)`.
pub fn integrate_scalar(
    f_values: &[f64],
    l: &OperatorValuedMeasure,
) -> Result<HermitianOperator> {
    if f_values.len() != l.len() {
        return Err(Error::LengthMismatch {
            left: f_values.len(),
            right: l.len(),
        });
    }
    let mut acc = CMatrix::zeros(l.dim(), l.dim());
    for (fi, v) in f_values.iter().zip(l.values()) {
        acc += v.matrix() * Complex64::new(*fi, 0.0);
    }
    HermitianOperator::new(acc)
}

/// Operator-norm semivariation; equals the operator norm of the total mass.
pub fn semivariation(l: &OperatorValuedMeasure) -> f64 {
    op_norm(&l.total_mass())
}

/// Two routes to the same scalar, with a pass flag at the stated tolerance.
#[derive(Debug, Clone)]
pub struct PairingCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
    pub pass: bool,
}

fn pairing_scale(l: &OperatorValuedMeasure, f: &[f64], g: Option<&[f64]>) -> f64 {
    let sup =
        |v: &[f64]| v.iter().fold(0.0f64, |acc, x| acc.max(x.abs())).max(1.0);
    trace_norm(&l.total_mass()).max(1.0) * sup(f) * g.map_or(1.0, sup)
}

/// `Tr[integral f dl]` versus `sum_i f_i Tr[l(E_i)]`.
pub fn trace_pairing_identity(
    f_values: &[f64],
    l: &OperatorValuedMeasure,
) -> Result<PairingCheck> {
    let lhs = integrate_scalar(f_values, l)?.trace();
    let rhs: f64 = f_values
        .iter()
        .zip(l.values())
        .map(|(fi, v)| fi * v.trace())
        .sum();
    let tol = 1e-10 * pairing_scale(l, f_values, None);
    Ok(PairingCheck {
        lhs,
        rhs,
        tol,
        pass: (lhs - rhs).abs() <= tol,
    })
}

/// `Tr[(integral f dl)(integral g dl)]` versus
/// `sum_ij f_i g_j Tr[l(E_i) l(E_j)]`.
pub fn hs_pairing_identity(
    f_values: &[f64],
    g_values: &[f64],
    l: &OperatorValuedMeasure,
) -> Result<PairingCheck> {
    let int_f = integrate_scalar(f_values, l)?;
    let int_g = integrate_scalar(g_values, l)?;
    let lhs = hs_inner(&int_f, &int_g);
    let mut rhs = 0.0;
    for (fi, vi) in f_values.iter().zip(l.values()) {
        for (gj, vj) in g_values.iter().zip(l.values()) {
            rhs += fi * gj * trace_product(vi.matrix(), vj.matrix()).re;
        }
    }
    let tol = 1e-9 * pairing_scale(l, f_values, Some(g_values));
    Ok(PairingCheck {
        lhs,
        rhs,
        tol,
        pass: (lhs - rhs).abs() <= tol,
    })
}

/// Which compression of the measurement to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompressionPower {
    /// `rho^{1/4} m(E) rho^{1/4}`.
    Quarter,
    /// `rho^{1/2} m(E) rho^{1/2}`, which equals the partial states.
    Half,
}

/// Compresses a pretty good measurement by powers of the average state.
pub fn compressed_measure(
    e: &Ensemble,
    gpgm: &Povm,
    power: CompressionPower,
) -> Result<OperatorValuedMeasure> {
    let factors = average_factors(e, DEFAULT_RANK_TOL)?;
    let outer = match power {
        CompressionPower::Quarter => factors.quarter_rho.matrix(),
        CompressionPower::Half => factors.sqrt_rho.matrix(),
    };
    let values: Vec<HermitianOperator> = gpgm
        .elements()
        .iter()
        .map(|m| HermitianOperator::new(outer * m.matrix() * outer))
        .collect::<Result<_>>()?;
    OperatorValuedMeasure::new(gpgm.cells().to_vec(), values)
}
