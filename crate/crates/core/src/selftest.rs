//! Built-in verification suites behind `selftest`: the operator-measure
//! calculus, the Gaussian convolution identity, and the reduction of the
//! generalized construction to the finite PGM.

use nalgebra::DMatrix;
use rand::Rng;

use crate::ensemble::{singleton_partition, OutcomeCell};
use crate::error::Result;
use crate::gpgm::{build_finite_pgm, build_gpgm, validate_povm};
use crate::linalg::{eigh, hs_distance, hs_norm, psd_sqrt, CMatrix, HermitianOperator};
use crate::ovm::{
    compressed_measure, hs_pairing_identity, trace_pairing_identity, CompressionPower,
    OperatorValuedMeasure,
};
use crate::rng::{complex_gaussian, rng_from, split_seed};
use crate::score::{
    gaussian_score, isotropic_gaussian_score, random_grid, score_matrix_on_points,
    verify_convolution, QuadratureSpec, ScoreFunction,
};
use crate::sweep::random_corpus;

/// Result of one named verification suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: String,
    pub pass: bool,
    pub checks: usize,
    pub detail: String,
}

fn random_psd(d: usize, rng: &mut rand_chacha::ChaCha8Rng) -> HermitianOperator {
    let g = CMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    HermitianOperator::new((&g * g.adjoint()).unscale(d as f64)).expect("psd block")
}

/// Operator-valued-measure identities: trace and Hilbert–Schmidt pairings on
/// 100 random triples per dimension in {2, 3, 4, 6}, Hilbert–Schmidt
/// dominance on 100 constructed pairs, and the compressed-measure dominance
/// on every cell of seeded measurements.
pub fn run_appendix_a(seed: u64) -> Result<SuiteReport> {
    let mut checks = 0usize;
    let mut worst: f64 = 0.0;

    for d in [2usize, 3, 4, 6] {
        for k in 0..100u64 {
            let stream = split_seed(seed, d as u64 * 1000 + k);
            let mut rng = rng_from(stream);
            let cells = 2 + (k as usize % 4);
            let values: Vec<HermitianOperator> =
                (0..cells).map(|_| random_psd(d, &mut rng)).collect();
            let l = OperatorValuedMeasure::new(singleton_partition(cells), values)?;
            let f: Vec<f64> = (0..cells).map(|_| 4.0 * rng.gen::<f64>() - 2.0).collect();
            let g: Vec<f64> = (0..cells).map(|_| 4.0 * rng.gen::<f64>() - 2.0).collect();

            let tp = trace_pairing_identity(&f, &l)?;
            let hp = hs_pairing_identity(&f, &g, &l)?;
            checks += 2;
            worst = worst
                .max((tp.lhs - tp.rhs).abs() / tp.tol)
                .max((hp.lhs - hp.rhs).abs() / hp.tol);
            if !tp.pass || !hp.pass {
                return Ok(SuiteReport {
                    name: "appendixA".into(),
                    pass: false,
                    checks,
                    detail: format!("pairing identity failed at d={d}, k={k}"),
                });
            }
        }
    }

    // Hilbert-Schmidt dominance: -zeta <= varrho <= zeta
    let mut rng = rng_from(split_seed(seed, 0xA2));
    for k in 0..100 {
        let d = 2 + k % 5;
        let phi = random_psd(d, &mut rng);
        let psi = random_psd(d, &mut rng);
        let varrho = (&phi - &psi).scaled(0.5);
        let zeta = (&phi + &psi).scaled(0.5);
        checks += 1;
        if hs_norm(&varrho) > hs_norm(&zeta) + 1e-10 {
            return Ok(SuiteReport {
                name: "appendixA".into(),
                pass: false,
                checks,
                detail: format!("HS dominance failed at pair {k}"),
            });
        }
    }

    // compressed measure dominated by sqrt(rho) on every cell
    for (j, inst) in random_corpus(6, [2, 5], [3, 6], 1, "varied", split_seed(seed, 0xA3))?
        .iter()
        .enumerate()
    {
        let e = &inst.ensemble;
        let cells = if j % 2 == 0 {
            singleton_partition(e.len())
        } else {
            vec![
                OutcomeCell::new((0..e.len() / 2).collect())?,
                OutcomeCell::new((e.len() / 2..e.len()).collect())?,
            ]
        };
        let gpgm = build_gpgm(e, &cells)?;
        let quarter = compressed_measure(e, &gpgm, CompressionPower::Quarter)?;
        let sqrt_rho = psd_sqrt(&crate::ensemble::average_state(e), 1e-9)?;
        for v in quarter.values() {
            let above = eigh(&(&sqrt_rho - v))?.min_eigenvalue();
            let below = eigh(&(&sqrt_rho + v))?.min_eigenvalue();
            checks += 2;
            if above < -1e-9 || below < -1e-9 || hs_norm(v) > hs_norm(&sqrt_rho) + 1e-9 {
                return Ok(SuiteReport {
                    name: "appendixA".into(),
                    pass: false,
                    checks,
                    detail: format!("compressed-measure dominance failed on {}", inst.id),
                });
            }
        }
    }

    Ok(SuiteReport {
        name: "appendixA".into(),
        pass: true,
        checks,
        detail: format!("worst identity residual {worst:.3e} (relative to tolerance)"),
    })
}

/// Gaussian convolution identity for isotropic and random positive definite
/// widths, plus positive semi-definiteness of Gaussian score matrices on
/// random grids.
pub fn run_convolution() -> Result<SuiteReport> {
    let mut checks = 0usize;
    let mut worst_dev: f64 = 0.0;

    let pairs_1d: Vec<(Vec<f64>, Vec<f64>)> = vec![
        (vec![0.0], vec![0.0]),
        (vec![0.0], vec![1.0]),
        (vec![-1.5], vec![1.5]),
        (vec![2.5], vec![-0.5]),
    ];
    for t in [0.25, 1.0, 4.0] {
        let s = gaussian_score(DMatrix::from_element(1, 1, t))?;
        let quad = QuadratureSpec::default_for(&s, &pairs_1d);
        let report = verify_convolution(&s, &pairs_1d, &quad)?;
        checks += pairs_1d.len();
        worst_dev = worst_dev.max(report.max_abs_deviation);
        if !report.pass {
            return Ok(SuiteReport {
                name: "convolution".into(),
                pass: false,
                checks,
                detail: format!("deviation {:.3e} at sigma {t}", report.max_abs_deviation),
            });
        }
    }

    // random positive definite 2x2 widths
    let pairs_2d: Vec<(Vec<f64>, Vec<f64>)> = vec![
        (vec![0.0, 0.0], vec![0.6, -0.4]),
        (vec![-1.0, 0.5], vec![1.0, 0.5]),
        (vec![0.3, 0.3], vec![0.3, 0.3]),
    ];
    let mut rng = rng_from(0xC0117);
    for k in 0..3 {
        let a = DMatrix::from_fn(2, 2, |_, _| rng.gen::<f64>() - 0.5);
        let sigma = &a * a.transpose() + DMatrix::identity(2, 2).scale(0.3);
        let s = gaussian_score(sigma)?;
        let mut quad = QuadratureSpec::default_for(&s, &pairs_2d);
        quad.nodes_per_axis = 400;
        let report = verify_convolution(&s, &pairs_2d, &quad)?;
        checks += pairs_2d.len();
        worst_dev = worst_dev.max(report.max_abs_deviation);
        if !report.pass {
            return Ok(SuiteReport {
                name: "convolution".into(),
                pass: false,
                checks,
                detail: format!("deviation {:.3e} on random sigma {k}", report.max_abs_deviation),
            });
        }
    }

    // Gaussian kernels stay PSD on random grids
    for k in 0..10u64 {
        let n = 1 + (k as usize % 2);
        let r = 16 + 6 * (k as usize);
        let s: ScoreFunction = isotropic_gaussian_score([0.25, 1.0, 4.0][k as usize % 3], n)?;
        let grid = random_grid(n, r, 3.0, split_seed(0xC0118, k));
        let m = score_matrix_on_points(&s, &grid)?;
        checks += 1;
        if m.min_eigenvalue() < -1e-9 * r as f64 {
            return Ok(SuiteReport {
                name: "convolution".into(),
                pass: false,
                checks,
                detail: format!("kernel matrix indefinite on grid {k}"),
            });
        }
    }

    Ok(SuiteReport {
        name: "convolution".into(),
        pass: true,
        checks,
        detail: format!("worst quadrature deviation {worst_dev:.3e}"),
    })
}

/// Reduction of the generalized construction to the finite PGM on singleton
/// partitions, with positivity and completeness of every constructed
/// measurement, including rank-deficient average states.
pub fn run_pgm_reduction(seed: u64) -> Result<SuiteReport> {
    let corpus = random_corpus(100, [2, 6], [2, 8], 1, "varied", seed)?;
    let mut checks = 0usize;
    let mut worst_gap: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut worst_min_eig: f64 = 0.0;

    for inst in &corpus {
        let e = &inst.ensemble;
        let pgm = build_finite_pgm(e)?;
        let gpgm = build_gpgm(e, &singleton_partition(e.len()))?;
        for i in 0..e.len() {
            let gap = hs_distance(pgm.element(i), gpgm.element(i));
            worst_gap = worst_gap.max(gap);
            checks += 1;
            if gap > 1e-8 {
                return Ok(SuiteReport {
                    name: "pgm-reduction".into(),
                    pass: false,
                    checks,
                    detail: format!("reduction gap {gap:.3e} on {}", inst.id),
                });
            }
        }
        let report = validate_povm(&gpgm, 1e-9);
        worst_residual = worst_residual.max(report.completeness_residual);
        worst_min_eig = worst_min_eig.min(report.min_eigenvalue());
        checks += 1;
        if !report.pass {
            return Ok(SuiteReport {
                name: "pgm-reduction".into(),
                pass: false,
                checks,
                detail: format!(
                    "POVM axioms failed on {}: min eig {:.3e}, residual {:.3e}",
                    inst.id,
                    report.min_eigenvalue(),
                    report.completeness_residual
                ),
            });
        }
    }

    Ok(SuiteReport {
        name: "pgm-reduction".into(),
        pass: true,
        checks,
        detail: format!(
            "worst gap {worst_gap:.3e}, completeness residual {worst_residual:.3e}, min eigenvalue {worst_min_eig:.3e}"
        ),
    })
}

/// The three suites behind the `selftest` command.
pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        run_appendix_a(split_seed(seed, 1))?,
        run_convolution()?,
        run_pgm_reduction(split_seed(seed, 2))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        for report in run_all(2024).unwrap() {
            assert!(report.pass, "{}: {}", report.name, report.detail);
            assert!(report.checks > 0);
        }
    }
}
