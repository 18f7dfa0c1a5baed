//! Finite and grid-discretized quantum ensembles.
//!
//! An [`Ensemble`] pairs parameter points `x_i` in `R^N` with positive weights
//! summing to one and density operators of a common dimension. Continuous
//! priors are realized as regular grids with mass-at-node weights, so the
//! average state, partial states, and second moments are finite weighted sums.

use num_complex::Complex64;
use rand::Rng;

use crate::bosonic;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, CMatrix, HermitianOperator, DEFAULT_RANK_TOL};
use crate::rng::{complex_gaussian, rng_from, standard_normal};

/// Cap on generated grid sizes; keeps dense pipelines at desk scale.
pub const GRID_POINT_CAP: usize = 4096;

/// A block of point indices forming one cell of an outcome partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeCell {
    indices: Vec<usize>,
}

impl OutcomeCell {
    /// Builds a cell from point indices; duplicates are rejected.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyCell);
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPartition {
                reason: "cell contains a duplicate index".into(),
            });
        }
        Ok(Self { indices })
    }

    pub fn singleton(index: usize) -> Self {
        Self {
            indices: vec![index],
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Checks that `cells` partitions `{0, .., r-1}`.
pub fn validate_partition(cells: &[OutcomeCell], r: usize) -> Result<()> {
    let mut seen = vec![false; r];
    for cell in cells {
        for &i in cell.indices() {
            if i >= r {
                return Err(Error::InvalidPartition {
                    reason: format!("index {i} out of range for {r} points"),
                });
            }
            if seen[i] {
                return Err(Error::InvalidPartition {
                    reason: format!("index {i} appears in two cells"),
                });
            }
            seen[i] = true;
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::InvalidPartition {
            reason: format!("index {missing} is not covered"),
        });
    }
    Ok(())
}

/// Singleton partition `{0}, {1}, ..., {r-1}`.
pub fn singleton_partition(r: usize) -> Vec<OutcomeCell> {
    (0..r).map(OutcomeCell::singleton).collect()
}

/// A weighted family of parameterized density operators.
#[derive(Debug, Clone)]
pub struct Ensemble {
    param_dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    states: Vec<HermitianOperator>,
    label: String,
}

impl Ensemble {
    pub fn new(
        param_dim: usize,
        points: Vec<Vec<f64>>,
        weights: Vec<f64>,
        states: Vec<HermitianOperator>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let r = points.len();
        if r == 0 {
            return Err(Error::InvalidEnsembleGlobal {
                reason: "ensemble must contain at least one point".into(),
            });
        }
        if weights.len() != r || states.len() != r {
            return Err(Error::InvalidEnsembleGlobal {
                reason: format!(
                    "lengths disagree: {r} points, {} weights, {} states",
                    weights.len(),
                    states.len()
                ),
            });
        }

        let dim = states[0].dim();
        let mut weight_sum = 0.0;
        for i in 0..r {
            if points[i].len() != param_dim {
                return Err(Error::InvalidEnsemble {
                    index: i,
                    reason: format!(
                        "point has {} coordinates, expected {param_dim}",
                        points[i].len()
                    ),
                });
            }
            if points[i].iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidEnsemble {
                    index: i,
                    reason: "point has non-finite coordinates".into(),
                });
            }
            if weights[i].is_nan() || weights[i] <= 0.0 || !weights[i].is_finite() {
                return Err(Error::InvalidEnsemble {
                    index: i,
                    reason: format!("weight {} is not strictly positive", weights[i]),
                });
            }
            weight_sum += weights[i];
            if states[i].dim() != dim {
                return Err(Error::InvalidEnsemble {
                    index: i,
                    reason: format!("state dimension {} differs from {dim}", states[i].dim()),
                });
            }
            let trace = states[i].trace();
            if (trace - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidEnsemble {
                    index: i,
                    reason: format!("state trace {trace} is not 1 within 1e-10"),
                });
            }
            let spectrum = eigenvalues(&states[i])?;
            let cut = DEFAULT_RANK_TOL
                * spectrum
                    .iter()
                    .fold(1.0f64, |acc, q| acc.max(q.abs()));
            if spectrum[0] < -cut {
                return Err(Error::InvalidEnsemble {
                    index: i,
                    reason: format!("state has eigenvalue {:.3e}", spectrum[0]),
                });
            }
        }
        if (weight_sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidEnsembleGlobal {
                reason: format!("weights sum to {weight_sum}, not 1 within 1e-12"),
            });
        }
        for i in 0..r {
            for j in (i + 1)..r {
                if points[i] == points[j] {
                    return Err(Error::InvalidEnsemble {
                        index: j,
                        reason: format!("point duplicates point {i}"),
                    });
                }
            }
        }

        Ok(Self {
            param_dim,
            points,
            weights,
            states,
            label: label.into(),
        })
    }

    /// Number of ensemble members.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Hilbert-space dimension of the states.
    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[HermitianOperator] {
        &self.states
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn state(&self, i: usize) -> &HermitianOperator {
        &self.states[i]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Total weight of a cell.
    pub fn cell_weight(&self, cell: &OutcomeCell) -> f64 {
        cell.indices().iter().map(|&i| self.weights[i]).sum()
    }
}

/// Barycenter of the ensemble: `rho = sum_i mu_i rho_i`.
pub fn average_state(e: &Ensemble) -> HermitianOperator {
    let mut acc = CMatrix::zeros(e.dim(), e.dim());
    for i in 0..e.len() {
        acc += e.state(i).matrix() * Complex64::new(e.weight(i), 0.0);
    }
    HermitianOperator::new(acc).expect("weighted sum keeps shape")
}

/// Partial state `rho_E = sum_{i in E} mu_i rho_i`.
pub fn partial_state(e: &Ensemble, cell: &OutcomeCell) -> Result<HermitianOperator> {
    if cell.is_empty() {
        return Err(Error::EmptyCell);
    }
    let mut acc = CMatrix::zeros(e.dim(), e.dim());
    for &i in cell.indices() {
        if i >= e.len() {
            return Err(Error::InvalidPartition {
                reason: format!("index {i} out of range for {} points", e.len()),
            });
        }
        acc += e.state(i).matrix() * Complex64::new(e.weight(i), 0.0);
    }
    HermitianOperator::new(acc)
}

/// Second moment of the prior: `sum_i mu_i |x_i|^2`.
pub fn second_moment(e: &Ensemble) -> f64 {
    (0..e.len())
        .map(|i| e.weight(i) * e.point(i).iter().map(|x| x * x).sum::<f64>())
        .sum()
}

/// Parameterized state maps used by the grid discretizer.
#[derive(Debug, Clone)]
pub enum StateFamily {
    /// Displaced single-mode bosonic states in a truncated Fock space;
    /// requires `param_dim == 2`.
    BosonicDisplaced {
        fock_cutoff: usize,
        base: HermitianOperator,
        trunc_tol: f64,
    },
    /// Pure qubit states. For one parameter the amplitude is
    /// `(cos(scale*x), sin(scale*x))`; for more, the polar angle is
    /// `scale*|x|` and the relative phase is `atan2(x2, x1)`.
    QubitAngle { scale: f64 },
}

impl StateFamily {
    pub fn state_at(&self, x: &[f64], index: usize) -> Result<HermitianOperator> {
        match self {
            StateFamily::BosonicDisplaced {
                fock_cutoff,
                base,
                trunc_tol,
            } => {
                if x.len() != 2 {
                    return Err(Error::UnsupportedParamDim {
                        dim: x.len(),
                        max: 2,
                    });
                }
                if base.dim() != *fock_cutoff {
                    return Err(Error::DimensionMismatch {
                        left: base.dim(),
                        right: *fock_cutoff,
                    });
                }
                bosonic::displaced_state(base, &[x[0], x[1]], *trunc_tol, index)
            }
            StateFamily::QubitAngle { scale } => {
                let (theta, phase) = if x.len() == 1 {
                    (scale * x[0], 0.0)
                } else {
                    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    (scale * norm, x[1].atan2(x[0]))
                };
                HermitianOperator::pure_state(&[
                    Complex64::new(theta.cos(), 0.0),
                    Complex64::from_polar(theta.sin(), phase),
                ])
            }
        }
    }
}

/// Discretizes an isotropic Gaussian prior on a regular grid.
///
/// Weights are proportional to the Gaussian density at the nodes and are
/// renormalized to sum to one, so the grid carries the prior as point masses.
pub fn discretize_gaussian_prior(
    param_dim: usize,
    sigma_prior: f64,
    grid_half_width: f64,
    points_per_axis: usize,
    family: &StateFamily,
) -> Result<Ensemble> {
    if param_dim == 0 {
        return Err(Error::InvalidConfig {
            reason: "param_dim must be at least 1".into(),
        });
    }
    if points_per_axis < 2 {
        return Err(Error::InvalidConfig {
            reason: format!("points_per_axis must be >= 2, got {points_per_axis}"),
        });
    }
    if sigma_prior.is_nan() || sigma_prior <= 0.0 {
        return Err(Error::InvalidConfig {
            reason: format!("sigma_prior must be > 0, got {sigma_prior}"),
        });
    }
    let total = points_per_axis
        .checked_pow(param_dim as u32)
        .unwrap_or(usize::MAX);
    if total > GRID_POINT_CAP {
        return Err(Error::GridTooLarge {
            requested: total,
            cap: GRID_POINT_CAP,
        });
    }

    let axis: Vec<f64> = (0..points_per_axis)
        .map(|k| {
            -grid_half_width
                + 2.0 * grid_half_width * (k as f64) / ((points_per_axis - 1) as f64)
        })
        .collect();

    let mut points = Vec::with_capacity(total);
    let mut idx = vec![0usize; param_dim];
    loop {
        points.push(idx.iter().map(|&k| axis[k]).collect::<Vec<f64>>());
        let mut axis_i = 0;
        loop {
            idx[axis_i] += 1;
            if idx[axis_i] < points_per_axis {
                break;
            }
            idx[axis_i] = 0;
            axis_i += 1;
            if axis_i == param_dim {
                break;
            }
        }
        if axis_i == param_dim {
            break;
        }
    }

    let raw: Vec<f64> = points
        .iter()
        .map(|x| {
            let n2: f64 = x.iter().map(|v| v * v).sum();
            (-n2 / (2.0 * sigma_prior * sigma_prior)).exp()
        })
        .collect();
    let norm: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / norm).collect();

    let mut states = Vec::with_capacity(points.len());
    for (i, x) in points.iter().enumerate() {
        states.push(family.state_at(x, i)?);
    }

    let label = format!("gaussian_grid_n{param_dim}_p{points_per_axis}");
    Ensemble::new(param_dim, points, weights, states, label)
}

/// Ensemble of displaced bosonic states at explicit phase-space points.
///
/// Single-mode only; weights default to uniform.
pub fn bosonic_displaced_ensemble(
    fock_cutoff: usize,
    base: &HermitianOperator,
    points: &[[f64; 2]],
    weights: Option<&[f64]>,
    trunc_tol: f64,
    label: impl Into<String>,
) -> Result<Ensemble> {
    if base.dim() != fock_cutoff {
        return Err(Error::DimensionMismatch {
            left: base.dim(),
            right: fock_cutoff,
        });
    }
    let r = points.len();
    let weights: Vec<f64> = match weights {
        Some(w) => w.to_vec(),
        None => vec![1.0 / r as f64; r],
    };
    let mut states = Vec::with_capacity(r);
    for (i, x) in points.iter().enumerate() {
        states.push(bosonic::displaced_state(base, x, trunc_tol, i)?);
    }
    Ensemble::new(
        2,
        points.iter().map(|x| x.to_vec()).collect(),
        weights,
        states,
        label,
    )
}

/// Kind of random states drawn by [`random_ensemble`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    /// Haar-random rank-one projectors.
    Pure,
    /// Normalized Wishart matrices (full rank almost surely).
    Mixed,
}

/// Seeded random ensemble: Haar-random pure or Wishart mixed states, random
/// positive weights, standard-normal parameter points.
pub fn random_ensemble(d: usize, r: usize, param_dim: usize, seed: u64, kind: StateKind) -> Ensemble {
    random_ensemble_in_subspace(d, d, r, param_dim, seed, kind)
}

/// Random ensemble whose states are confined to a Haar-random subspace of the
/// given rank, producing a rank-deficient average state when `rank_dim < d`.
pub fn random_ensemble_in_subspace(
    d: usize,
    rank_dim: usize,
    r: usize,
    param_dim: usize,
    seed: u64,
    kind: StateKind,
) -> Ensemble {
    assert!(d >= 1 && r >= 1, "d and r must be at least 1");
    assert!(
        (1..=d).contains(&rank_dim),
        "rank_dim must lie in 1..=d"
    );
    let mut rng = rng_from(seed);

    // Haar-random isometry from C^rank_dim into C^d via QR of a Gaussian.
    let embed: CMatrix = if rank_dim == d {
        CMatrix::identity(d, d)
    } else {
        let g = CMatrix::from_fn(d, d, |_, _| complex_gaussian(&mut rng));
        let qr = g.qr();
        let q = qr.q();
        q.columns(0, rank_dim).into_owned()
    };

    let mut states = Vec::with_capacity(r);
    for _ in 0..r {
        let small = match kind {
            StateKind::Pure => {
                let v = nalgebra::DVector::from_fn(rank_dim, |_, _| complex_gaussian(&mut rng));
                let v = v.clone().unscale(v.norm());
                &v * v.adjoint()
            }
            StateKind::Mixed => {
                let g = CMatrix::from_fn(rank_dim, rank_dim, |_, _| complex_gaussian(&mut rng));
                let w = &g * g.adjoint();
                let tr: f64 = (0..rank_dim).map(|i| w[(i, i)].re).sum();
                w.unscale(tr)
            }
        };
        let lifted = &embed * small * embed.adjoint();
        states.push(HermitianOperator::new(lifted).expect("lifted state keeps shape"));
    }

    let raw: Vec<f64> = (0..r).map(|_| rng.gen::<f64>() + 0.05).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(r);
    while points.len() < r {
        let candidate: Vec<f64> = (0..param_dim).map(|_| standard_normal(&mut rng)).collect();
        if !points.contains(&candidate) {
            points.push(candidate);
        }
    }

    let kind_tag = match kind {
        StateKind::Pure => "pure",
        StateKind::Mixed => "mixed",
    };
    Ensemble::new(
        param_dim,
        points,
        weights,
        states,
        format!("random_{kind_tag}_d{d}_k{rank_dim}_r{r}_s{seed}"),
    )
    .expect("random ensembles satisfy the invariants by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, hs_distance, hs_norm, op_norm};
    use approx::assert_abs_diff_eq;

    fn ket(pos: usize, dim: usize) -> HermitianOperator {
        let mut diag = vec![0.0; dim];
        diag[pos] = 1.0;
        HermitianOperator::from_diagonal(&diag).unwrap()
    }

    fn plus_state() -> HermitianOperator {
        HermitianOperator::pure_state(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])
            .unwrap()
    }

    pub(crate) fn two_state_zero_plus() -> Ensemble {
        Ensemble::new(
            1,
            vec![vec![0.0], vec![1.0]],
            vec![0.5, 0.5],
            vec![ket(0, 2), plus_state()],
            "zero_plus",
        )
        .unwrap()
    }

    #[test]
    fn average_state_examples() {
        let single = Ensemble::new(1, vec![vec![0.0]], vec![1.0], vec![plus_state()], "s").unwrap();
        assert!(hs_distance(&average_state(&single), &plus_state()) <= 1e-14);

        let uniform = Ensemble::new(
            1,
            vec![vec![0.0], vec![1.0]],
            vec![0.5, 0.5],
            vec![ket(0, 2), ket(1, 2)],
            "u",
        )
        .unwrap();
        let half_eye = HermitianOperator::identity(2).scaled(0.5);
        assert!(hs_distance(&average_state(&uniform), &half_eye) <= 1e-14);

        // weighted sum computed by hand:
        // 0.25|0><0| + 0.75|+><+| = [[0.625, 0.375], [0.375, 0.375]]
        let weighted = Ensemble::new(
            1,
            vec![vec![0.0], vec![1.0]],
            vec![0.25, 0.75],
            vec![ket(0, 2), plus_state()],
            "w",
        )
        .unwrap();
        let avg = average_state(&weighted);
        assert_abs_diff_eq!(avg.entry(0, 0).re, 0.625, epsilon = 1e-14);
        assert_abs_diff_eq!(avg.entry(0, 1).re, 0.375, epsilon = 1e-14);
        assert_abs_diff_eq!(avg.entry(1, 1).re, 0.375, epsilon = 1e-14);
    }

    #[test]
    fn partial_state_examples() {
        let e = two_state_zero_plus();
        let all = OutcomeCell::new(vec![0, 1]).unwrap();
        assert!(hs_distance(&partial_state(&e, &all).unwrap(), &average_state(&e)) <= 1e-14);

        assert!(matches!(OutcomeCell::new(vec![]), Err(Error::EmptyCell)));

        let first = OutcomeCell::singleton(0);
        let part = partial_state(&e, &first).unwrap();
        assert!(hs_distance(&part, &ket(0, 2).scaled(0.5)) <= 1e-14);
        assert_abs_diff_eq!(part.trace(), e.cell_weight(&first), epsilon = 1e-14);
    }

    #[test]
    fn partial_states_are_dominated_and_additive() {
        let e = random_ensemble(4, 5, 2, 11, StateKind::Mixed);
        let cells = vec![
            OutcomeCell::new(vec![0, 2]).unwrap(),
            OutcomeCell::new(vec![1]).unwrap(),
            OutcomeCell::new(vec![3, 4]).unwrap(),
        ];
        let rho = average_state(&e);
        let mut acc = HermitianOperator::zeros(4);
        for cell in &cells {
            let part = partial_state(&e, cell).unwrap();
            let diff = &rho - &part;
            let min = eigh(&diff).unwrap().min_eigenvalue();
            assert!(min >= -1e-9, "domination failed: {min}");
            acc = &acc + &part;
        }
        assert!(hs_distance(&acc, &rho) <= 1e-10);
    }

    #[test]
    fn second_moment_examples() {
        let e = two_state_zero_plus();
        assert_abs_diff_eq!(second_moment(&e), 0.5, epsilon = 1e-14);

        let shifted = Ensemble::new(
            1,
            vec![vec![0.0], vec![2.0]],
            vec![0.2, 0.8],
            vec![ket(0, 2), ket(1, 2)],
            "m",
        )
        .unwrap();
        assert_abs_diff_eq!(second_moment(&shifted), 3.2, epsilon = 1e-14);
    }

    #[test]
    fn invalid_ensembles_are_rejected_with_index() {
        let states = vec![ket(0, 2), ket(1, 2)];
        // weights not summing to one
        let err = Ensemble::new(
            1,
            vec![vec![0.0], vec![1.0]],
            vec![0.5, 0.4],
            states.clone(),
            "bad",
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidEnsembleGlobal { .. }));

        // non-positive weight reported with its index
        let err = Ensemble::new(
            1,
            vec![vec![0.0], vec![1.0]],
            vec![1.0, 0.0],
            states.clone(),
            "bad",
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidEnsemble { index: 1, .. }));

        // duplicate points
        let err = Ensemble::new(
            1,
            vec![vec![1.0], vec![1.0]],
            vec![0.5, 0.5],
            states.clone(),
            "bad",
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidEnsemble { index: 1, .. }));

        // broken trace
        let err = Ensemble::new(
            1,
            vec![vec![0.0], vec![1.0]],
            vec![0.5, 0.5],
            vec![ket(0, 2), ket(1, 2).scaled(0.9)],
            "bad",
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidEnsemble { index: 1, .. }));
    }

    #[test]
    fn gaussian_grid_weights() {
        let fam = StateFamily::QubitAngle { scale: 0.7 };
        // symmetric two-point grid
        let e = discretize_gaussian_prior(1, 1.0, 1.0, 2, &fam).unwrap();
        assert_abs_diff_eq!(e.weight(0), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(e.weight(1), 0.5, epsilon = 1e-14);

        // three points on {-1, 0, 1} with sigma = 1: weights prop. to
        // (e^{-1/2}, 1, e^{-1/2})
        let e = discretize_gaussian_prior(1, 1.0, 1.0, 3, &fam).unwrap();
        let g = (-0.5f64).exp();
        let z = 1.0 + 2.0 * g;
        assert_abs_diff_eq!(e.weight(0), g / z, epsilon = 1e-14);
        assert_abs_diff_eq!(e.weight(1), 1.0 / z, epsilon = 1e-14);
        assert_abs_diff_eq!(e.weight(2), g / z, epsilon = 1e-14);

        // flat limit: sigma much larger than the grid
        let e = discretize_gaussian_prior(1, 1.0e3, 1.0, 5, &fam).unwrap();
        for &w in e.weights() {
            assert_abs_diff_eq!(w, 0.2, epsilon = 1e-3);
        }
    }

    #[test]
    fn gaussian_grid_respects_cap() {
        let fam = StateFamily::QubitAngle { scale: 1.0 };
        let err = discretize_gaussian_prior(2, 1.0, 1.0, 65, &fam).unwrap_err();
        assert!(matches!(err, Error::GridTooLarge { requested: 4225, cap: 4096 }));
    }

    #[test]
    fn bosonic_ensemble_examples() {
        let cutoff = 30;
        let base = bosonic::vacuum_state(cutoff);
        let e = bosonic_displaced_ensemble(
            cutoff,
            &base,
            &[[0.0, 0.0], [1.0, 0.0], [0.0, -1.0]],
            None,
            1e-6,
            "bosonic_test",
        )
        .unwrap();
        assert_eq!(e.dim(), cutoff);
        assert_eq!(e.param_dim(), 2);
        // x = 0 keeps the base state
        assert!(hs_distance(e.state(0), &base) <= 1e-12);
        for s in e.states() {
            assert_abs_diff_eq!(s.trace(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn random_ensembles_are_deterministic_per_seed() {
        let a = random_ensemble(3, 4, 2, 99, StateKind::Mixed);
        let b = random_ensemble(3, 4, 2, 99, StateKind::Mixed);
        assert_eq!(a.points(), b.points());
        assert_eq!(a.weights(), b.weights());
        for i in 0..a.len() {
            assert!(hs_distance(a.state(i), b.state(i)) == 0.0);
        }
        let c = random_ensemble(3, 4, 2, 100, StateKind::Mixed);
        assert!(hs_distance(a.state(0), c.state(0)) > 1e-6);
    }

    #[test]
    fn random_pure_states_have_rank_one() {
        let e = random_ensemble(4, 3, 1, 5, StateKind::Pure);
        for s in e.states() {
            let spectrum = eigenvalues(s).unwrap();
            assert_abs_diff_eq!(spectrum[3], 1.0, epsilon = 1e-10);
            assert!(spectrum[2].abs() <= 1e-10);
            assert_abs_diff_eq!(crate::linalg::trace_norm(s), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn subspace_ensembles_have_rank_deficient_average() {
        let e = random_ensemble_in_subspace(5, 2, 6, 1, 31, StateKind::Mixed);
        let rho = average_state(&e);
        let spectrum = eigenvalues(&rho).unwrap();
        assert!(spectrum[0].abs() <= 1e-12);
        assert!(spectrum[2].abs() <= 1e-12);
        assert!(spectrum[3] > 1e-6);
        assert!(op_norm(&rho) <= 1.0 + 1e-12);
        assert!(hs_norm(&rho) > 0.0);
    }

}
