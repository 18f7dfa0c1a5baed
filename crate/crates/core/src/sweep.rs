//! Seeded experiment corpora and sweep evaluators.
//!
//! Instances, candidate measurements, and every random draw are derived from a
//! single master seed through SplitMix64 stream splitting, so sweeps are
//! reproducible regardless of evaluation order or parallelism.

use crate::bosonic;
use crate::ensemble::{
    bosonic_displaced_ensemble, discretize_gaussian_prior, random_ensemble,
    random_ensemble_in_subspace, second_moment, Ensemble, StateFamily, StateKind,
};
use crate::error::{Error, Result};
use crate::gain::{
    estimator_second_moment, expected_gain, mse, mse_via_gain_limit, DEFAULT_T_SEQUENCE,
};
use crate::gpgm::build_finite_pgm;
use crate::io::{InstanceSource, ScoreSpec, SweepConfig};
use crate::optimal::{bk_certificate, helstrom_two_state, maximize_success, random_povm, SolverSettings};
pub use crate::rng::split_seed;
use crate::rng::rng_from;
use rand::Rng;

/// One sweep instance: an ensemble with a stable identifier.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub ensemble: Ensemble,
}

/// Random finite ensembles over the given dimension and size ranges.
///
/// `kind` is `pure`, `mixed`, or `varied`; `varied` cycles pure, mixed, and
/// subspace-confined mixed (rank-deficient average state).
pub fn random_corpus(
    num: usize,
    d_range: [usize; 2],
    r_range: [usize; 2],
    param_dim: usize,
    kind: &str,
    master_seed: u64,
) -> Result<Vec<Instance>> {
    let mut out = Vec::with_capacity(num);
    for k in 0..num {
        let seed = split_seed(master_seed, k as u64);
        let mut rng = rng_from(split_seed(seed, 0xD1CE));
        let d = d_range[0] + rng.gen_range(0..=(d_range[1] - d_range[0]));
        let r = r_range[0] + rng.gen_range(0..=(r_range[1] - r_range[0]));
        let ensemble = match kind {
            "pure" => random_ensemble(d, r, param_dim, seed, StateKind::Pure),
            "mixed" => random_ensemble(d, r, param_dim, seed, StateKind::Mixed),
            "varied" => match k % 3 {
                0 => random_ensemble(d, r, param_dim, seed, StateKind::Pure),
                1 => random_ensemble(d, r, param_dim, seed, StateKind::Mixed),
                _ => {
                    let rank = 1 + (d - 1) / 2;
                    random_ensemble_in_subspace(d, rank, r, param_dim, seed, StateKind::Mixed)
                }
            },
            other => {
                return Err(Error::InvalidConfig {
                    reason: format!("unknown random-family kind {other}"),
                })
            }
        };
        out.push(Instance {
            id: format!("rand-{k:04}"),
            ensemble,
        });
    }
    Ok(out)
}

/// Rescales an ensemble's points into the unit ball (factor strictly below
/// one keeps pairwise distances, and hence fourth moments, small enough for
/// tight gain-limit checks).
fn clamp_points_to_unit_ball(e: Ensemble) -> Ensemble {
    let max_norm = e
        .points()
        .iter()
        .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    if max_norm <= 1.0 {
        return e;
    }
    let factor = 1.0 / max_norm;
    let points = e
        .points()
        .iter()
        .map(|p| p.iter().map(|x| x * factor).collect())
        .collect();
    Ensemble::new(
        e.param_dim(),
        points,
        e.weights().to_vec(),
        e.states().to_vec(),
        format!("{}_unit", e.label()),
    )
    .expect("rescaling points preserves the invariants")
}

/// Estimation-oriented corpus with parameter points inside the unit ball:
/// qubit Gaussian grids (`N = 1`), bosonic displaced grids (`N = 2`), and
/// random finite ensembles at rescaled points.
pub fn estimation_corpus(
    num: usize,
    bosonic_cutoff: usize,
    bosonic_points_per_axis: usize,
    grid_points: usize,
    master_seed: u64,
) -> Result<Vec<Instance>> {
    let mut out = Vec::with_capacity(num);
    for k in 0..num {
        let seed = split_seed(master_seed, 0xE5717 ^ k as u64);
        let mut rng = rng_from(seed);
        let ensemble = match k % 3 {
            0 => {
                let scale = 0.4 + 0.8 * rng.gen::<f64>();
                discretize_gaussian_prior(
                    1,
                    0.4 + rng.gen::<f64>(),
                    1.0,
                    grid_points.max(2),
                    &StateFamily::QubitAngle { scale },
                )?
            }
            1 => {
                let base = if rng.gen::<bool>() {
                    bosonic::vacuum_state(bosonic_cutoff)
                } else {
                    bosonic::thermal_state(bosonic_cutoff, 0.3)?
                };
                let ppa = bosonic_points_per_axis.max(2);
                let half = 0.7;
                let mut points = Vec::new();
                for i in 0..ppa {
                    for j in 0..ppa {
                        points.push([
                            -half + 2.0 * half * i as f64 / (ppa - 1) as f64,
                            -half + 2.0 * half * j as f64 / (ppa - 1) as f64,
                        ]);
                    }
                }
                bosonic_displaced_ensemble(
                    bosonic_cutoff,
                    &base,
                    &points,
                    None,
                    1e-6,
                    format!("bosonic_c{bosonic_cutoff}_p{}", points.len()),
                )?
            }
            _ => {
                let d = 2 + (rng.gen_range(0..3) as usize);
                let r = 3 + (rng.gen_range(0..3) as usize);
                let n = 1 + (k / 3) % 2;
                clamp_points_to_unit_ball(random_ensemble(
                    d,
                    r,
                    n,
                    seed,
                    StateKind::Mixed,
                ))
            }
        };
        out.push(Instance {
            id: format!("est-{k:04}"),
            ensemble,
        });
    }
    Ok(out)
}

/// Builds the instance list named by a sweep config.
pub fn build_corpus(cfg: &SweepConfig) -> Result<Vec<Instance>> {
    cfg.validate()?;
    match &cfg.instances {
        InstanceSource::File { path } => {
            let ensemble = crate::io::load_ensemble(path)?;
            Ok(vec![Instance {
                id: "file-0000".to_string(),
                ensemble,
            }])
        }
        InstanceSource::RandomFamily {
            d_range,
            r_range,
            param_dim,
            kind,
        } => random_corpus(
            cfg.num_instances,
            *d_range,
            *r_range,
            *param_dim,
            kind,
            cfg.seed,
        ),
        InstanceSource::EstimationFamily {
            bosonic_cutoff,
            bosonic_points_per_axis,
            grid_points,
        } => estimation_corpus(
            cfg.num_instances,
            *bosonic_cutoff,
            *bosonic_points_per_axis,
            *grid_points,
            cfg.seed,
        ),
    }
}

/// One square-root-bound sweep row.
#[derive(Debug, Clone)]
pub struct BkRow {
    pub instance_id: String,
    pub d: usize,
    pub r: usize,
    pub param_dim: usize,
    pub score_kind: String,
    pub g_pgm: f64,
    pub sqrt_g_pgm: f64,
    pub g_best_candidate: f64,
    pub best_candidate: String,
    /// `sqrt(G_PGM) - G(best candidate)`; negative beyond `-1e-8` falsifies
    /// the square-root bound.
    pub slack: f64,
    pub solver_converged: bool,
    pub solver_residual: f64,
}

/// Evaluates the square-root bound on one instance with the standard
/// candidate set: the PGM itself, the closed-form two-state optimum when
/// `r = 2`, the fixed-point solver output, and seeded random POVMs.
pub fn evaluate_bk_instance(
    inst: &Instance,
    score: &ScoreSpec,
    solver: &SolverSettings,
    num_random_povms: usize,
    candidate_seed: u64,
) -> Result<BkRow> {
    let e = &inst.ensemble;
    let s = score.build_matrix(e)?;
    let pgm = build_finite_pgm(e)?;
    let pgm_report = expected_gain(e, &s, &pgm)?;

    let mut candidates = vec![("pgm".to_string(), pgm.clone())];
    if e.len() == 2 {
        let h = helstrom_two_state(e.weight(0), e.state(0), e.weight(1), e.state(1))?;
        candidates.push(("helstrom".to_string(), h.povm));
    }
    let solved = maximize_success(e, &s, solver)?;
    let solver_converged = solved.converged;
    let solver_residual = solved.optimality_residual;
    candidates.push(("solver".to_string(), solved.povm));
    for j in 0..num_random_povms {
        let povm = random_povm(e.dim(), e.len(), split_seed(candidate_seed, j as u64))?;
        candidates.push((format!("random_{j}"), povm));
    }

    let cert = bk_certificate(e, &s, &pgm_report, &candidates)?;
    let best = cert
        .entries
        .iter()
        .max_by(|a, b| a.gain.total_cmp(&b.gain))
        .expect("candidate list is nonempty");
    Ok(BkRow {
        instance_id: inst.id.clone(),
        d: e.dim(),
        r: e.len(),
        param_dim: e.param_dim(),
        score_kind: score.label(),
        g_pgm: cert.pgm_gain,
        sqrt_g_pgm: cert.sqrt_pgm_gain,
        g_best_candidate: cert.best_candidate_gain,
        best_candidate: best.label.clone(),
        slack: cert.min_slack,
        solver_converged,
        solver_residual,
    })
}

/// Per-candidate MSE comparison row.
#[derive(Debug, Clone)]
pub struct MseRow {
    pub instance_id: String,
    pub d: usize,
    pub r: usize,
    pub param_dim: usize,
    pub candidate: String,
    pub mse_pgm: f64,
    pub mse_candidate: f64,
    /// `mse_pgm / mse_candidate` (1 when both vanish).
    pub ratio: f64,
    pub bound_4e: f64,
}

/// Instance-level result of an MSE sweep.
#[derive(Debug, Clone)]
pub struct MseInstanceResult {
    pub rows: Vec<MseRow>,
    pub mse_pgm: f64,
    pub bound_4e: f64,
    /// `sum_i mu_i sum_j |x_j|^2 Tr[rho_i m_j] - E_{mu,2}` for the PGM.
    pub exchange_gap: f64,
    /// `(t, 2/t (1 - G_t))` for the width sequence.
    pub limit_curve: Vec<(f64, f64)>,
    /// Minimum of `mse - curve` over the sequence (should be >= -1e-9).
    pub limit_min_slack: f64,
    /// Final curve value minus the MSE.
    pub limit_final_gap: f64,
}

/// Evaluates the factor-2 and second-moment bounds on one instance against
/// the PGM and seeded random candidates.
pub fn evaluate_mse_instance(
    inst: &Instance,
    num_random_povms: usize,
    t_sequence: Option<&[f64]>,
    candidate_seed: u64,
) -> Result<MseInstanceResult> {
    let e = &inst.ensemble;
    let pgm = build_finite_pgm(e)?;
    let mse_pgm = mse(e, &pgm)?;
    let bound_4e = 4.0 * second_moment(e);
    let exchange_gap = estimator_second_moment(e, &pgm)? - second_moment(e);

    let ts: Vec<f64> = t_sequence
        .map(<[f64]>::to_vec)
        .unwrap_or_else(|| DEFAULT_T_SEQUENCE.to_vec());
    let limit_curve = mse_via_gain_limit(e, &pgm, &ts)?;
    let limit_min_slack = limit_curve
        .iter()
        .map(|&(_, v)| mse_pgm - v)
        .fold(f64::INFINITY, f64::min);
    let limit_final_gap = limit_curve.last().expect("nonempty sequence").1 - mse_pgm;

    let mut candidates = vec![("pgm".to_string(), pgm)];
    for j in 0..num_random_povms {
        let povm = random_povm(e.dim(), e.len(), split_seed(candidate_seed, 0xC0FE ^ j as u64))?;
        candidates.push((format!("random_{j}"), povm));
    }

    let mut rows = Vec::with_capacity(candidates.len());
    for (label, povm) in &candidates {
        let mse_candidate = mse(e, povm)?;
        let ratio = if mse_candidate == 0.0 && mse_pgm == 0.0 {
            1.0
        } else {
            mse_pgm / mse_candidate
        };
        rows.push(MseRow {
            instance_id: inst.id.clone(),
            d: e.dim(),
            r: e.len(),
            param_dim: e.param_dim(),
            candidate: label.clone(),
            mse_pgm,
            mse_candidate,
            ratio,
            bound_4e,
        });
    }

    Ok(MseInstanceResult {
        rows,
        mse_pgm,
        bound_4e,
        exchange_gap,
        limit_curve,
        limit_min_slack,
        limit_final_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_corpus_is_deterministic_and_in_range() {
        let a = random_corpus(12, [2, 6], [2, 8], 1, "varied", 77).unwrap();
        let b = random_corpus(12, [2, 6], [2, 8], 1, "varied", 77).unwrap();
        assert_eq!(a.len(), 12);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.ensemble.points(), y.ensemble.points());
            assert!((2..=6).contains(&x.ensemble.dim()));
            assert!((2..=8).contains(&x.ensemble.len()));
        }
    }

    #[test]
    fn estimation_corpus_keeps_points_in_unit_ball() {
        let corpus = estimation_corpus(6, 20, 2, 3, 5).unwrap();
        for inst in &corpus {
            for p in inst.ensemble.points() {
                let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!(norm <= 1.0 + 1e-12, "{}: |x| = {norm}", inst.id);
            }
        }
    }

    #[test]
    fn bk_row_passes_on_a_small_instance() {
        let corpus = random_corpus(2, [2, 3], [2, 3], 1, "varied", 3).unwrap();
        let row = evaluate_bk_instance(
            &corpus[0],
            &ScoreSpec::Delta,
            &SolverSettings::default(),
            2,
            split_seed(3, 100),
        )
        .unwrap();
        assert!(row.slack >= -1e-8, "{row:?}");
        assert!(row.g_pgm <= row.sqrt_g_pgm + 1e-12);
    }

    #[test]
    fn mse_instance_results_satisfy_bounds() {
        let corpus = estimation_corpus(3, 20, 2, 3, 9).unwrap();
        for inst in &corpus {
            let result = evaluate_mse_instance(inst, 2, None, split_seed(9, 7)).unwrap();
            assert!(result.mse_pgm <= result.bound_4e + 1e-8, "{}", inst.id);
            assert!(result.exchange_gap.abs() <= 1e-8, "{}", inst.id);
            assert!(result.limit_min_slack >= -1e-9, "{}", inst.id);
            for row in &result.rows {
                assert!(
                    row.mse_pgm <= 2.0 * row.mse_candidate + 1e-8,
                    "{}: {row:?}",
                    inst.id
                );
            }
        }
    }
}
