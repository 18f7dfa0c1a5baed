//! Expected gain and mean square error of measurements.
//!
//! For an ensemble with points `x_i`, weights `mu_i` and states `rho_i`, and a
//! POVM with elements `m_c` over cells of the point set, the gain at `x_i` is
//!
//! ```text
//! G(x_i) = sum_c Sbar(x_i, c) Tr[rho_i m_c],
//! ```
//!
//! where `Sbar(x_i, c)` averages the score over the cell with the prior
//! weights. On singleton cells this is exactly `S(x_i, x_j)`; the delta score
//! then recovers the success probability. The expected gain is the
//! prior-weighted average of `G(x_i)` and always lies in `[0, 1]`.
//!
//! The MSE of a singleton-cell measurement is
//! `sum_i mu_i sum_j |x_i - x_j|^2 Tr[rho_i m_j]`, and it is approached from
//! below by `2/t (1 - G)` under the width-`t` Gaussian score as `t` shrinks.

use nalgebra::DMatrix;

use crate::ensemble::{second_moment, validate_partition, Ensemble};
use crate::error::{Error, Result};
use crate::gpgm::Povm;
use crate::linalg::trace_product;
use crate::score::{isotropic_gaussian_score, score_matrix, ScoreFunction, ScoreMatrix};

/// Default width sequence for the MSE-as-gain-limit check.
pub const DEFAULT_T_SEQUENCE: [f64; 7] = [1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001];

/// Gain (and optionally MSE) of one measurement on one ensemble.
#[derive(Debug, Clone)]
pub struct GainMseReport {
    pub per_x_gain: Vec<f64>,
    pub expected_gain: f64,
    pub mse: Option<f64>,
    pub ensemble_label: String,
    pub povm_label: String,
    pub score_label: String,
}

/// Outcome probability matrix `P[i][c] = Tr[rho_i m_c]`.
pub fn outcome_matrix(e: &Ensemble, p: &Povm) -> Result<DMatrix<f64>> {
    if e.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            left: e.dim(),
            right: p.dim(),
        });
    }
    validate_partition(p.cells(), e.len())?;
    Ok(DMatrix::from_fn(e.len(), p.len(), |i, c| {
        trace_product(e.state(i).matrix(), p.element(c).matrix()).re
    }))
}

/// Prior-weighted average score of a cell as seen from point `i`.
fn cell_score(e: &Ensemble, s: &ScoreMatrix, i: usize, cell_indices: &[usize]) -> f64 {
    let mut mass = 0.0;
    let mut acc = 0.0;
    for &j in cell_indices {
        acc += s.entry(i, j) * e.weight(j);
        mass += e.weight(j);
    }
    acc / mass
}

/// Gain of the measurement at the `i`-th parameter point.
pub fn gain_at(e: &Ensemble, s: &ScoreMatrix, p: &Povm, i: usize) -> Result<f64> {
    let probs = outcome_matrix(e, p)?;
    Ok(gain_at_with(e, s, p, i, &probs))
}

fn gain_at_with(e: &Ensemble, s: &ScoreMatrix, p: &Povm, i: usize, probs: &DMatrix<f64>) -> f64 {
    p.cells()
        .iter()
        .enumerate()
        .map(|(c, cell)| cell_score(e, s, i, cell.indices()) * probs[(i, c)])
        .sum()
}

/// Expected gain of a POVM under a score matrix.
pub fn expected_gain(e: &Ensemble, s: &ScoreMatrix, p: &Povm) -> Result<GainMseReport> {
    if s.r() != e.len() {
        return Err(Error::DimensionMismatch {
            left: s.r(),
            right: e.len(),
        });
    }
    let probs = outcome_matrix(e, p)?;
    let per_x_gain: Vec<f64> = (0..e.len())
        .map(|i| gain_at_with(e, s, p, i, &probs))
        .collect();
    let expected = per_x_gain
        .iter()
        .zip(e.weights())
        .map(|(g, w)| g * w)
        .sum();
    Ok(GainMseReport {
        per_x_gain,
        expected_gain: expected,
        mse: None,
        ensemble_label: e.label().to_string(),
        povm_label: p.label().to_string(),
        score_label: "matrix".to_string(),
    })
}

/// Expected gain under a pointwise score function (materialized on the grid).
pub fn expected_gain_fn(e: &Ensemble, s: &ScoreFunction, p: &Povm) -> Result<GainMseReport> {
    let matrix = score_matrix(s, e)?;
    let mut report = expected_gain(e, &matrix, p)?;
    report.score_label = s.label();
    Ok(report)
}

/// [`gain_at`] for a pointwise score function.
pub fn gain_at_fn(e: &Ensemble, s: &ScoreFunction, p: &Povm, i: usize) -> Result<f64> {
    gain_at(e, &score_matrix(s, e)?, p, i)
}

/// Expected gain plus the MSE when the measurement has singleton cells
/// (the MSE field is left empty for coarse partitions).
pub fn full_report(e: &Ensemble, s: &ScoreMatrix, p: &Povm) -> Result<GainMseReport> {
    let mut report = expected_gain(e, s, p)?;
    if p.singleton_order(e.len()).is_ok() {
        report.mse = Some(mse(e, p)?);
    }
    Ok(report)
}

/// Success probability `sum_i mu_i Tr[M_i rho_i]` for singleton POVMs.
///
/// Independent of the score machinery; used to cross-check the delta-score
/// reduction of the expected gain.
pub fn success_probability(e: &Ensemble, p: &Povm) -> Result<f64> {
    if e.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            left: e.dim(),
            right: p.dim(),
        });
    }
    let order = p.singleton_order(e.len())?;
    Ok((0..e.len())
        .map(|i| e.weight(i) * trace_product(e.state(i).matrix(), p.element(order[i]).matrix()).re)
        .sum())
}

/// Squared distances between parameter points.
fn squared_distances(e: &Ensemble) -> DMatrix<f64> {
    DMatrix::from_fn(e.len(), e.len(), |i, j| {
        e.point(i)
            .iter()
            .zip(e.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    })
}

/// Mean square error of a singleton-cell measurement.
pub fn mse(e: &Ensemble, p: &Povm) -> Result<f64> {
    if e.param_dim() == 0 {
        return Err(Error::UnsupportedParamDim { dim: 0, max: usize::MAX });
    }
    let order = p.singleton_order(e.len())?;
    let probs = outcome_matrix(e, p)?;
    let d2 = squared_distances(e);
    let mut acc = 0.0;
    for i in 0..e.len() {
        for j in 0..e.len() {
            acc += e.weight(i) * d2[(i, j)] * probs[(i, order[j])];
        }
    }
    Ok(acc)
}

/// The lower-approximant curve `(t, 2/t (1 - G_{S_t}))` for a descending
/// width sequence; every entry is at most the MSE and the curve approaches it
/// as `t` shrinks.
pub fn mse_via_gain_limit(e: &Ensemble, p: &Povm, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    for pair in ts.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::InvalidTSequence { value: pair[1] });
        }
    }
    if let Some(&bad) = ts.iter().find(|&&t| t.is_nan() || t <= 0.0) {
        return Err(Error::InvalidTSequence { value: bad });
    }
    let order = p.singleton_order(e.len())?;
    let probs = outcome_matrix(e, p)?;
    let d2 = squared_distances(e);

    let mut curve = Vec::with_capacity(ts.len());
    for &t in ts {
        let mut g = 0.0;
        for i in 0..e.len() {
            let mut gi = 0.0;
            for j in 0..e.len() {
                gi += (-0.5 * t * d2[(i, j)]).exp() * probs[(i, order[j])];
            }
            g += e.weight(i) * gi;
        }
        curve.push((t, 2.0 / t * (1.0 - g)));
    }
    Ok(curve)
}

/// MSE of the measurement next to the second-moment bound `4 E_{mu,2}`.
pub fn second_moment_bound_check(e: &Ensemble, p: &Povm) -> Result<(f64, f64)> {
    Ok((mse(e, p)?, 4.0 * second_moment(e)))
}

/// The estimator-moment sum `sum_i mu_i sum_j |x_j|^2 Tr[rho_i m_j]`.
///
/// For the singleton pretty good measurement this equals the prior's second
/// moment; the equality is the exchange step in the finite-MSE argument.
pub fn estimator_second_moment(e: &Ensemble, p: &Povm) -> Result<f64> {
    let order = p.singleton_order(e.len())?;
    let probs = outcome_matrix(e, p)?;
    let mut acc = 0.0;
    for i in 0..e.len() {
        for j in 0..e.len() {
            let norm2: f64 = e.point(j).iter().map(|x| x * x).sum();
            acc += e.weight(i) * norm2 * probs[(i, order[j])];
        }
    }
    Ok(acc)
}

/// Convenience: the width-`t` Gaussian score matrix on an ensemble's points.
pub fn isotropic_score_matrix(e: &Ensemble, t: f64) -> Result<ScoreMatrix> {
    score_matrix(&isotropic_gaussian_score(t, e.param_dim())?, e)
}
