//! Optimal-measurement solvers and near-optimality certificates.
//!
//! For two states the optimum is the closed-form Helstrom measurement. For
//! general finite instances the score-weighted objective
//! `sum_j Tr[W_j m_j]` with `W_j = sum_i S_ij mu_i rho_i` is ascended by the
//! structure-preserving fixed point
//!
//! ```text
//! m_j <- R^+ W_j m_j W_j R^+,  R = (sum_j W_j m_j W_j)^{1/2},
//! ```
//!
//! started from the pretty good measurement. Global optimality is certified
//! through the residual of the dual condition `Y >= W_j` with
//! `Y = sym(sum_j m_j W_j)`: the reported residual is the largest operator
//! norm of a negative part of `Y - W_j`, and a solution is declared converged
//! when it drops below the solver tolerance.

use num_complex::Complex64;

use crate::ensemble::{singleton_partition, Ensemble};
use crate::error::{Error, Result};
use crate::gain::{expected_gain, GainMseReport};
use crate::gpgm::{build_finite_pgm, Povm};
use crate::linalg::{
    eigh, trace_product, CMatrix, HermitianOperator, DEFAULT_RANK_TOL,
};
use crate::rng::{complex_gaussian, rng_from, split_seed};
use crate::score::ScoreMatrix;

/// Stopping parameters for [`maximize_success`].
#[derive(Debug, Clone, Copy)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iters: 2000,
        }
    }
}

/// A solver outcome: POVM, objective, and the optimality-residual certificate.
#[derive(Debug, Clone)]
pub struct SolverResult {
    pub povm: Povm,
    pub objective: f64,
    pub iterations: usize,
    pub optimality_residual: f64,
    pub converged: bool,
    /// Objective after initialization and after every iteration.
    pub objective_trace: Vec<f64>,
}

fn check_density(label: &str, rho: &HermitianOperator) -> Result<()> {
    let trace = rho.trace();
    if (trace - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidConfig {
            reason: format!("{label} has trace {trace}, expected 1"),
        });
    }
    Ok(())
}

/// Closed-form optimal two-state discriminator.
///
/// Objective `(1 + ||p1 rho1 - p2 rho2||_1) / 2`; the POVM projects onto the
/// non-negative eigenspace of the difference (zero-eigenvalue directions go to
/// the first outcome, making the output deterministic).
pub fn helstrom_two_state(
    p1: f64,
    rho1: &HermitianOperator,
    p2: f64,
    rho2: &HermitianOperator,
) -> Result<SolverResult> {
    if (p1 + p2 - 1.0).abs() > 1e-12 || !(0.0..=1.0).contains(&p1) {
        return Err(Error::InvalidConfig {
            reason: format!("priors ({p1}, {p2}) must be a distribution"),
        });
    }
    check_density("rho1", rho1)?;
    check_density("rho2", rho2)?;
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            left: rho1.dim(),
            right: rho2.dim(),
        });
    }

    let delta = &rho1.scaled(p1) - &rho2.scaled(p2);
    let decomp = eigh(&delta)?;
    let trace_norm: f64 = decomp.eigenvalues().iter().map(|q| q.abs()).sum();
    let objective = 0.5 * (1.0 + trace_norm);
    let proj_plus = decomp.map_spectrum(|q| if q >= 0.0 { 1.0 } else { 0.0 });
    let proj_minus = &HermitianOperator::identity(rho1.dim()) - &proj_plus;

    let povm = Povm::new(
        singleton_partition(2),
        vec![proj_plus, proj_minus],
        "helstrom",
    )?;
    let w: Vec<CMatrix> = vec![
        rho1.matrix() * Complex64::new(p1, 0.0),
        rho2.matrix() * Complex64::new(p2, 0.0),
    ];
    let residual = dual_residual(&povm, &w)?;
    Ok(SolverResult {
        objective,
        iterations: 0,
        optimality_residual: residual,
        converged: true,
        objective_trace: vec![objective_value(&povm, &w)],
        povm,
    })
}

fn objective_value(p: &Povm, w: &[CMatrix]) -> f64 {
    p.elements()
        .iter()
        .zip(w)
        .map(|(m, wj)| trace_product(m.matrix(), wj).re)
        .sum()
}

/// Largest operator norm of a negative part of `Y - W_j`,
/// `Y = sym(sum_j m_j W_j)`.
fn dual_residual(p: &Povm, w: &[CMatrix]) -> Result<f64> {
    let d = p.dim();
    let mut y_raw = CMatrix::zeros(d, d);
    for (m, wj) in p.elements().iter().zip(w) {
        y_raw += m.matrix() * wj;
    }
    let y = HermitianOperator::new(y_raw)?;
    let mut residual = 0.0f64;
    for wj in w {
        let gap = HermitianOperator::new(y.matrix() - wj)?;
        let min = eigh(&gap)?.min_eigenvalue();
        residual = residual.max(-min.min(0.0));
    }
    Ok(residual)
}

/// Score-weighted ensemble operators `W_j = sum_i S_ij mu_i rho_i`.
fn score_weighted_states(e: &Ensemble, s: &ScoreMatrix) -> Vec<CMatrix> {
    let d = e.dim();
    (0..e.len())
        .map(|j| {
            let mut acc = CMatrix::zeros(d, d);
            for i in 0..e.len() {
                let c = s.entry(i, j) * e.weight(i);
                if c != 0.0 {
                    acc += e.state(i).matrix() * Complex64::new(c, 0.0);
                }
            }
            acc
        })
        .collect()
}

/// Fixed-point ascent of the expected gain over singleton-cell POVMs.
///
/// Initialized at the pretty good measurement. The objective is nondecreasing
/// along iterations; when the normalizer `T = sum_j W_j m_j W_j` is singular,
/// completeness is restored on its kernel with prior-weighted identity mass
/// (which cannot change the objective, since every `W_j` is supported inside
/// the support of the average state).
pub fn maximize_success(
    e: &Ensemble,
    s: &ScoreMatrix,
    settings: &SolverSettings,
) -> Result<SolverResult> {
    if s.r() != e.len() {
        return Err(Error::DimensionMismatch {
            left: s.r(),
            right: e.len(),
        });
    }
    let d = e.dim();
    let w = score_weighted_states(e, s);
    let mut elements: Vec<HermitianOperator> =
        build_finite_pgm(e)?.elements().to_vec();

    let make_povm = |els: &[HermitianOperator]| {
        Povm::new(singleton_partition(e.len()), els.to_vec(), "solver")
    };

    let mut trace = vec![{
        let p = make_povm(&elements)?;
        objective_value(&p, &w)
    }];
    let mut residual = dual_residual(&make_povm(&elements)?, &w)?;
    let mut iterations = 0;
    let mut converged = residual <= settings.tol;

    while !converged && iterations < settings.max_iters {
        let mut t_raw = CMatrix::zeros(d, d);
        for (m, wj) in elements.iter().zip(&w) {
            t_raw += wj * m.matrix() * wj;
        }
        let t = HermitianOperator::new(t_raw)?;
        let decomp = eigh(&t)?;
        let cut = decomp.rank_cutoff(DEFAULT_RANK_TOL);
        let inv_sqrt = decomp.map_spectrum(|q| if q <= cut { 0.0 } else { 1.0 / q.sqrt() });
        let kernel = decomp.map_spectrum(|q| if q <= cut { 1.0 } else { 0.0 });

        let mut next = Vec::with_capacity(elements.len());
        for (j, (m, wj)) in elements.iter().zip(&w).enumerate() {
            let x = inv_sqrt.matrix() * wj;
            let updated = &x * m.matrix() * x.adjoint()
                + kernel.matrix() * Complex64::new(e.weight(j), 0.0);
            next.push(HermitianOperator::new(updated)?);
        }
        elements = next;
        iterations += 1;

        let p = make_povm(&elements)?;
        trace.push(objective_value(&p, &w));
        residual = dual_residual(&p, &w)?;
        converged = residual <= settings.tol;
    }

    let povm = make_povm(&elements)?;
    let objective = *trace.last().expect("trace is never empty");
    Ok(SolverResult {
        povm,
        objective,
        iterations,
        optimality_residual: residual,
        converged,
        objective_trace: trace,
    })
}

/// One candidate line of a square-root-bound certificate.
#[derive(Debug, Clone)]
pub struct BkEntry {
    pub label: String,
    pub gain: f64,
    /// `sqrt(G_PGM) - G(candidate)`; the theorem demands this be nonnegative.
    pub slack: f64,
}

/// Square-root bound check of candidate gains against the PGM gain.
#[derive(Debug, Clone)]
pub struct BkCertificate {
    pub pgm_gain: f64,
    pub sqrt_pgm_gain: f64,
    pub entries: Vec<BkEntry>,
    pub best_candidate_gain: f64,
    /// `G(best candidate) - G_PGM`; sign-guaranteed only when a
    /// PGM-dominating candidate (e.g. the solver output) is present.
    pub best_minus_pgm: f64,
    pub min_slack: f64,
    pub pass: bool,
}

const BK_SLACK_FLOOR: f64 = -1e-8;

/// Checks `G(candidate) <= sqrt(G_PGM)` for every candidate.
pub fn bk_certificate(
    e: &Ensemble,
    s: &ScoreMatrix,
    pgm_report: &GainMseReport,
    candidates: &[(String, Povm)],
) -> Result<BkCertificate> {
    let pgm_gain = pgm_report.expected_gain;
    let sqrt_pgm_gain = pgm_gain.max(0.0).sqrt();
    let mut entries = Vec::with_capacity(candidates.len());
    let mut best = f64::NEG_INFINITY;
    let mut min_slack = f64::INFINITY;
    for (label, povm) in candidates {
        let gain = expected_gain(e, s, povm)?.expected_gain;
        let slack = sqrt_pgm_gain - gain;
        best = best.max(gain);
        min_slack = min_slack.min(slack);
        entries.push(BkEntry {
            label: label.clone(),
            gain,
            slack,
        });
    }
    Ok(BkCertificate {
        pgm_gain,
        sqrt_pgm_gain,
        best_candidate_gain: best,
        best_minus_pgm: best - pgm_gain,
        min_slack,
        pass: min_slack >= BK_SLACK_FLOOR,
        entries,
    })
}

/// Seeded random POVM with `k` elements: random PSD blocks conjugated by the
/// inverse square root of their sum.
pub fn random_povm(d: usize, k: usize, seed: u64) -> Result<Povm> {
    const MAX_ATTEMPTS: usize = 8;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = rng_from(split_seed(seed, attempt as u64));
        let blocks: Vec<CMatrix> = (0..k)
            .map(|_| {
                let g = CMatrix::from_fn(d, d, |_, _| complex_gaussian(&mut rng));
                &g * g.adjoint()
            })
            .collect();
        let mut total = CMatrix::zeros(d, d);
        for b in &blocks {
            total += b;
        }
        let t = HermitianOperator::new(total)?;
        let decomp = eigh(&t)?;
        if decomp.min_eigenvalue() <= decomp.rank_cutoff(DEFAULT_RANK_TOL) {
            continue;
        }
        let inv_sqrt = decomp.map_spectrum(|q| 1.0 / q.sqrt());
        let elements: Vec<HermitianOperator> = blocks
            .iter()
            .map(|b| {
                HermitianOperator::new(inv_sqrt.matrix() * b * inv_sqrt.matrix())
                    .expect("conjugation keeps shape")
            })
            .collect();
        return Povm::new(singleton_partition(k), elements, format!("random_s{seed}"));
    }
    Err(Error::SingularNormalizer {
        attempts: MAX_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{random_ensemble, StateKind};
    use crate::gpgm::validate_povm;
    use crate::linalg::hs_distance;
    use crate::score::delta_score;
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

    #[test]
    fn helstrom_orthogonal_states() {
        let r = helstrom_two_state(0.5, &ket(0, 2), 0.5, &ket(1, 2)).unwrap();
        assert_abs_diff_eq!(r.objective, 1.0, epsilon = 1e-12);
        assert!(r.optimality_residual <= 1e-10);
    }

    #[test]
    fn helstrom_identical_states() {
        let sigma = HermitianOperator::from_diagonal(&[0.7, 0.3]).unwrap();
        let r = helstrom_two_state(0.8, &sigma, 0.2, &sigma).unwrap();
        // trace norm of (0.8 - 0.2) sigma is 0.6
        assert_abs_diff_eq!(r.objective, 0.8, epsilon = 1e-12);
    }

    #[test]
    fn helstrom_zero_plus_anchor() {
        // eigenvalues of (|0><0| - |+><+|)/2 are +-1/(2 sqrt(2))
        let r = helstrom_two_state(0.5, &ket(0, 2), 0.5, &plus_state()).unwrap();
        let expect = 0.5 * (1.0 + 1.0 / 2.0f64.sqrt());
        assert_abs_diff_eq!(r.objective, expect, epsilon = 1e-12);
        assert!(validate_povm(&r.povm, 1e-8).pass);
        // returned POVM reproduces the objective as a gain
        let e = Ensemble::new(
            1,
            vec![vec![0.0], vec![1.0]],
            vec![0.5, 0.5],
            vec![ket(0, 2), plus_state()],
            "zero_plus",
        )
        .unwrap();
        let gain = expected_gain(&e, &delta_score(2), &r.povm)
            .unwrap()
            .expected_gain;
        assert_abs_diff_eq!(gain, r.objective, epsilon = 1e-9);
    }

    #[test]
    fn helstrom_rejects_bad_priors() {
        assert!(matches!(
            helstrom_two_state(0.7, &ket(0, 2), 0.7, &ket(1, 2)),
            Err(Error::InvalidConfig { .. })
        ));
    }

    #[test]
    fn solver_matches_helstrom_on_two_state_instances() {
        for seed in 0..8u64 {
            let e = random_ensemble(2 + (seed as usize % 3), 2, 1, 600 + seed, StateKind::Mixed);
            let helstrom = helstrom_two_state(e.weight(0), e.state(0), e.weight(1), e.state(1))
                .unwrap();
            let solved = maximize_success(&e, &delta_score(2), &SolverSettings::default()).unwrap();
            assert!(
                (solved.objective - helstrom.objective).abs() <= 1e-6,
                "seed {seed}: {} vs {}",
                solved.objective,
                helstrom.objective
            );
            assert!(solved.converged, "seed {seed} residual {}", solved.optimality_residual);
        }
    }

    #[test]
    fn solver_is_monotone_and_valid() {
        for seed in [1u64, 2, 5] {
            let e = random_ensemble(3, 5, 1, 900 + seed, StateKind::Pure);
            let s = delta_score(5);
            let solved = maximize_success(&e, &s, &SolverSettings::default()).unwrap();
            for pair in solved.objective_trace.windows(2) {
                assert!(pair[1] >= pair[0] - 1e-12, "seed {seed}: {pair:?}");
            }
            let report = validate_povm(&solved.povm, 1e-8);
            assert!(report.pass, "seed {seed}: {report:?}");
            // the reported objective is the expected gain of the returned POVM
            let gain = expected_gain(&e, &s, &solved.povm).unwrap().expected_gain;
            assert_abs_diff_eq!(gain, solved.objective, epsilon = 1e-9);
        }
    }

    #[test]
    fn solver_is_immediate_on_orthogonal_ensembles() {
        let e = Ensemble::new(
            1,
            vec![vec![0.0], vec![1.0], vec![2.0]],
            vec![0.2, 0.3, 0.5],
            vec![ket(0, 3), ket(1, 3), ket(2, 3)],
            "orthogonal",
        )
        .unwrap();
        let solved = maximize_success(&e, &delta_score(3), &SolverSettings::default()).unwrap();
        assert_abs_diff_eq!(solved.objective, 1.0, epsilon = 1e-9);
        assert!(solved.iterations <= 5);
        assert!(solved.converged);
    }

    #[test]
    fn solver_picks_most_likely_index_for_identical_states() {
        let sigma = HermitianOperator::from_diagonal(&[0.5, 0.5]).unwrap();
        let e = Ensemble::new(
            1,
            vec![vec![0.0], vec![1.0], vec![2.0]],
            vec![0.2, 0.5, 0.3],
            vec![sigma.clone(), sigma.clone(), sigma],
            "identical",
        )
        .unwrap();
        let solved = maximize_success(&e, &delta_score(3), &SolverSettings::default()).unwrap();
        assert_abs_diff_eq!(solved.objective, 0.5, epsilon = 1e-6);
        assert!(solved.converged);
    }

    #[test]
    fn sandwich_pgm_below_solver_below_sqrt_pgm() {
        for seed in 0..6u64 {
            let e = random_ensemble(3, 4, 1, 40 + seed, StateKind::Mixed);
            let s = delta_score(4);
            let pgm = build_finite_pgm(&e).unwrap();
            let pgm_gain = expected_gain(&e, &s, &pgm).unwrap().expected_gain;
            let solved = maximize_success(&e, &s, &SolverSettings::default()).unwrap();
            assert!(solved.objective >= pgm_gain - 1e-10, "seed {seed}");
            assert!(
                solved.objective <= pgm_gain.sqrt() + 1e-8,
                "seed {seed}: {} vs sqrt {}",
                solved.objective,
                pgm_gain.sqrt()
            );
        }
    }

    #[test]
    fn bk_certificate_on_pgm_itself_passes() {
        let e = random_ensemble(3, 4, 1, 123, StateKind::Pure);
        let s = delta_score(4);
        let pgm = build_finite_pgm(&e).unwrap();
        let report = expected_gain(&e, &s, &pgm).unwrap();
        let cert = bk_certificate(
            &e,
            &s,
            &report,
            &[("pgm".to_string(), pgm.clone())],
        )
        .unwrap();
        assert!(cert.pass);
        assert!(cert.min_slack >= 0.0);
    }

    #[test]
    fn bk_certificate_zero_plus_closed_forms() {
        let e = Ensemble::new(
            1,
            vec![vec![0.0], vec![1.0]],
            vec![0.5, 0.5],
            vec![ket(0, 2), plus_state()],
            "zero_plus",
        )
        .unwrap();
        let s = delta_score(2);
        let pgm = build_finite_pgm(&e).unwrap();
        let report = expected_gain(&e, &s, &pgm).unwrap();
        let helstrom = helstrom_two_state(0.5, &ket(0, 2), 0.5, &plus_state()).unwrap();
        let cert = bk_certificate(
            &e,
            &s,
            &report,
            &[("helstrom".to_string(), helstrom.povm)],
        )
        .unwrap();
        // 0.853553 <= sqrt(0.853553)
        assert!(cert.pass);
        assert_abs_diff_eq!(
            cert.sqrt_pgm_gain,
            (0.5 + 0.5 / 2.0f64.sqrt()).sqrt(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn random_povm_examples() {
        let single = random_povm(3, 1, 4).unwrap();
        assert!(hs_distance(single.element(0), &HermitianOperator::identity(3)) <= 1e-10);

        let p = random_povm(4, 5, 9).unwrap();
        let report = validate_povm(&p, 1e-9);
        assert!(report.pass, "{report:?}");

        let again = random_povm(4, 5, 9).unwrap();
        for k in 0..5 {
            assert!(hs_distance(p.element(k), again.element(k)) == 0.0);
        }
    }
}
