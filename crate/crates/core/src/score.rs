//! Positive score functions and their factorization witnesses.
//!
//! A score function assigns a quality in `[0, 1]` to a (true value, estimate)
//! pair. The built-ins are positive: each factors as a convolution
//! `S(x, y) = integral P(x, z) P(y, z) pi(dz)`. For the constant score `a`
//! the factor is the constant `sqrt(a)` against any probability measure; for
//! the Gaussian score
//!
//! ```text
//! S_Sigma(x, y) = exp(-(x - y)^T Sigma^{-1} (x - y) / 2)
//! ```
//!
//! the factor is `P_Sigma = ((2 pi)^N det(Sigma/4))^{-1/4} S_{Sigma/2}`
//! against the Lebesgue measure. [`verify_convolution`] checks the identity by
//! composite-trapezoid quadrature.
//!
//! On a finite grid a score function materializes to a [`ScoreMatrix`], which
//! must be positive semi-definite; the delta score is the identity matrix.

use nalgebra::DMatrix;

use crate::ensemble::Ensemble;
use crate::error::{Error, Result};

/// Pointwise-evaluable positive score function on `R^N x R^N`.
#[derive(Debug, Clone)]
pub enum ScoreFunction {
    Constant { param_dim: usize, value: f64 },
    Gaussian(GaussianScore),
}

/// Gaussian score with symmetric positive definite width matrix.
#[derive(Debug, Clone)]
pub struct GaussianScore {
    sigma: DMatrix<f64>,
    sigma_inv: DMatrix<f64>,
    sigma_eigenvalues: Vec<f64>,
}

impl GaussianScore {
    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    fn exponent(&self, diff: &[f64]) -> f64 {
        let d = nalgebra::DVector::from_column_slice(diff);
        -0.5 * (d.transpose() * &self.sigma_inv * &d)[(0, 0)]
    }

    pub fn max_sigma_eigenvalue(&self) -> f64 {
        *self
            .sigma_eigenvalues
            .last()
            .expect("sigma has at least one eigenvalue")
    }

    pub fn det_sigma(&self) -> f64 {
        self.sigma_eigenvalues.iter().product()
    }
}

/// Constant score `C_a`, factoring as `C_sqrt(a)` convolved with itself.
pub fn constant_score(a: f64, param_dim: usize) -> Result<ScoreFunction> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::ScoreOutOfRange { value: a });
    }
    Ok(ScoreFunction::Constant {
        param_dim,
        value: a,
    })
}

/// Gaussian score for a symmetric positive definite `Sigma`.
pub fn gaussian_score(sigma: DMatrix<f64>) -> Result<ScoreFunction> {
    if sigma.nrows() != sigma.ncols() {
        return Err(Error::NotSquare {
            rows: sigma.nrows(),
            cols: sigma.ncols(),
        });
    }
    if sigma.nrows() == 0 {
        return Err(Error::EmptyDimension);
    }
    let sym = (sigma.clone() + sigma.transpose()).scale(0.5);
    let se = sym.clone().symmetric_eigen();
    let mut eigenvalues: Vec<f64> = se.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    if eigenvalues[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: eigenvalues[0],
        });
    }
    let inv_vals = nalgebra::DVector::from_iterator(
        se.eigenvalues.len(),
        se.eigenvalues.iter().map(|&q| 1.0 / q),
    );
    let sigma_inv = &se.eigenvectors * DMatrix::from_diagonal(&inv_vals) * se.eigenvectors.transpose();
    Ok(ScoreFunction::Gaussian(GaussianScore {
        sigma: sym,
        sigma_inv,
        sigma_eigenvalues: eigenvalues,
    }))
}

/// Isotropic Gaussian score of width `t`: `exp(-t |x - y|^2 / 2)`.
///
/// This is the family driving the MSE-as-gain-limit relation; in terms of
/// [`gaussian_score`] it corresponds to `Sigma = I / t`, so it is strictly
/// decreasing in `t` for fixed distinct arguments and tends to the constant
/// one as `t` tends to zero.
pub fn isotropic_gaussian_score(t: f64, param_dim: usize) -> Result<ScoreFunction> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::InvalidTSequence { value: t });
    }
    gaussian_score(DMatrix::identity(param_dim, param_dim).scale(1.0 / t))
}

impl ScoreFunction {
    pub fn param_dim(&self) -> usize {
        match self {
            ScoreFunction::Constant { param_dim, .. } => *param_dim,
            ScoreFunction::Gaussian(g) => g.sigma.nrows(),
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.param_dim());
        debug_assert_eq!(y.len(), self.param_dim());
        match self {
            ScoreFunction::Constant { value, .. } => *value,
            ScoreFunction::Gaussian(g) => {
                let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                g.exponent(&diff).exp()
            }
        }
    }

    /// The factorization witness `P` with its measure convention.
    pub fn factor_witness(&self) -> FactorWitness {
        match self {
            ScoreFunction::Constant { value, .. } => FactorWitness::Constant {
                value: value.sqrt(),
            },
            ScoreFunction::Gaussian(g) => {
                let (witness, _) = gaussian_factor_parts(g);
                witness
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            ScoreFunction::Constant { value, .. } => format!("constant_{value}"),
            ScoreFunction::Gaussian(g) => {
                if g.sigma.nrows() == 1 {
                    format!("gaussian_t{}", g.sigma[(0, 0)])
                } else {
                    "gaussian".to_string()
                }
            }
        }
    }
}

/// Factor map of a positive score function.
///
/// Constant witnesses integrate against any probability measure, so their
/// convolution is exact. Gaussian witnesses integrate against the Lebesgue
/// measure on `R^N`.
#[derive(Debug, Clone)]
pub enum FactorWitness {
    Constant {
        value: f64,
    },
    Gaussian {
        /// Inverse of the original `Sigma`; the factor is a Gaussian of width
        /// `Sigma/2`, whose exponent is `-(x-z)^T Sigma^{-1} (x-z)`.
        sigma_inv: DMatrix<f64>,
        scale: f64,
    },
}

impl FactorWitness {
    pub fn eval(&self, x: &[f64], z: &[f64]) -> f64 {
        match self {
            FactorWitness::Constant { value } => *value,
            FactorWitness::Gaussian { sigma_inv, scale } => {
                let d = nalgebra::DVector::from_iterator(
                    x.len(),
                    x.iter().zip(z).map(|(a, b)| a - b),
                );
                let q = (d.transpose() * sigma_inv * &d)[(0, 0)];
                scale * (-q).exp()
            }
        }
    }

    pub fn scale(&self) -> f64 {
        match self {
            FactorWitness::Constant { value } => *value,
            FactorWitness::Gaussian { scale, .. } => *scale,
        }
    }
}

fn gaussian_factor_parts(g: &GaussianScore) -> (FactorWitness, f64) {
    let n = g.sigma.nrows() as i32;
    let det_quarter = g.det_sigma() / 4.0f64.powi(n);
    let scale = ((2.0 * std::f64::consts::PI).powi(n) * det_quarter).powf(-0.25);
    (
        FactorWitness::Gaussian {
            sigma_inv: g.sigma_inv.clone(),
            scale,
        },
        scale,
    )
}

/// Gaussian factor map and its normalization scale
/// `((2 pi)^N det(Sigma/4))^{-1/4}`.
pub fn gaussian_factor(sigma: DMatrix<f64>) -> Result<(FactorWitness, f64)> {
    match gaussian_score(sigma)? {
        ScoreFunction::Gaussian(g) => Ok(gaussian_factor_parts(&g)),
        ScoreFunction::Constant { .. } => unreachable!("gaussian_score returns Gaussian"),
    }
}

/// Materialized score values on a finite ensemble's points.
#[derive(Debug, Clone)]
pub struct ScoreMatrix {
    entries: DMatrix<f64>,
    min_eigenvalue: f64,
}

impl ScoreMatrix {
    /// Validates range, symmetry, and positive semi-definiteness
    /// (minimum eigenvalue at least `-1e-9 * r`).
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        let r = entries.nrows();
        if r == 0 {
            return Err(Error::EmptyDimension);
        }
        for i in 0..r {
            for j in 0..r {
                let v = entries[(i, j)];
                if !(-1e-12..=1.0 + 1e-12).contains(&v) {
                    return Err(Error::ScoreOutOfRange { value: v });
                }
                if (entries[(i, j)] - entries[(j, i)]).abs() > 1e-12 {
                    return Err(Error::InvalidConfig {
                        reason: "score matrix is not symmetric".into(),
                    });
                }
            }
        }
        let tol = 1e-9 * r as f64;
        let sym = (entries.clone() + entries.transpose()).scale(0.5);
        let min_eigenvalue = sym
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -tol {
            return Err(Error::ScoreNotPsd {
                min_eigenvalue,
                tol,
            });
        }
        Ok(Self {
            entries,
            min_eigenvalue,
        })
    }

    pub fn r(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }
}

/// Exact-identification score: the identity matrix.
pub fn delta_score(r: usize) -> ScoreMatrix {
    ScoreMatrix {
        entries: DMatrix::identity(r, r),
        min_eigenvalue: 1.0,
    }
}

/// Evaluates a score function on an ensemble's parameter points.
pub fn score_matrix(s: &ScoreFunction, e: &Ensemble) -> Result<ScoreMatrix> {
    if s.param_dim() != e.param_dim() {
        return Err(Error::DimensionMismatch {
            left: s.param_dim(),
            right: e.param_dim(),
        });
    }
    let r = e.len();
    let entries = DMatrix::from_fn(r, r, |i, j| s.eval(e.point(i), e.point(j)));
    ScoreMatrix::new(entries)
}

/// Composite-trapezoid quadrature box for convolution checks.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub half_width: f64,
    pub nodes_per_axis: usize,
}

impl QuadratureSpec {
    /// Default box: half-width `max(6 sigma_max, max|x|_inf + 6 sigma_max)`
    /// with 400 nodes per axis.
    pub fn default_for(s: &ScoreFunction, pairs: &[(Vec<f64>, Vec<f64>)]) -> Self {
        let sigma_max = match s {
            ScoreFunction::Constant { .. } => 1.0,
            ScoreFunction::Gaussian(g) => g.max_sigma_eigenvalue().sqrt(),
        };
        let max_coord = pairs
            .iter()
            .flat_map(|(x, y)| x.iter().chain(y.iter()))
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        QuadratureSpec {
            half_width: (6.0 * sigma_max).max(max_coord + 6.0 * sigma_max),
            nodes_per_axis: 400,
        }
    }
}

/// Outcome of a convolution-identity check.
#[derive(Debug, Clone)]
pub struct ConvolutionReport {
    pub max_abs_deviation: f64,
    /// Conservative bound on the factor-product mass outside the box,
    /// relative to the whole integral.
    pub tail_bound: f64,
    pub pass: bool,
}

const CONVOLUTION_PASS_TOL: f64 = 1e-6;
const TAIL_MASS_LIMIT: f64 = 1e-8;

/// Checks `S(x, y) = integral P(x, z) P(y, z) dz` on the sample pairs.
pub fn verify_convolution(
    s: &ScoreFunction,
    pairs: &[(Vec<f64>, Vec<f64>)],
    quad: &QuadratureSpec,
) -> Result<ConvolutionReport> {
    let witness = s.factor_witness();
    verify_convolution_witness(|x, y| s.eval(x, y), s.param_dim(), &witness, pairs, quad)
}

/// Convolution check against an explicit witness; used to detect witnesses
/// that do not reproduce the score.
pub fn verify_convolution_witness(
    eval: impl Fn(&[f64], &[f64]) -> f64,
    param_dim: usize,
    witness: &FactorWitness,
    pairs: &[(Vec<f64>, Vec<f64>)],
    quad: &QuadratureSpec,
) -> Result<ConvolutionReport> {
    match witness {
        FactorWitness::Constant { value } => {
            // probability measure: the convolution is exactly value^2
            let mut max_dev = 0.0f64;
            for (x, y) in pairs {
                max_dev = max_dev.max((value * value - eval(x, y)).abs());
            }
            Ok(ConvolutionReport {
                max_abs_deviation: max_dev,
                tail_bound: 0.0,
                pass: max_dev <= CONVOLUTION_PASS_TOL,
            })
        }
        FactorWitness::Gaussian { sigma_inv, .. } => {
            if param_dim > 2 {
                return Err(Error::UnsupportedParamDim {
                    dim: param_dim,
                    max: 2,
                });
            }
            // worst-axis standard deviation of the product Gaussian in z,
            // whose covariance is Sigma/4
            let sigma_inv_min = sigma_inv
                .clone()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            let sigma_z = (1.0 / sigma_inv_min).sqrt() / 2.0;

            let m = quad.nodes_per_axis;
            let h = 2.0 * quad.half_width / (m - 1) as f64;
            let axis: Vec<f64> = (0..m).map(|k| -quad.half_width + h * k as f64).collect();
            let axis_w: Vec<f64> = (0..m)
                .map(|k| if k == 0 || k == m - 1 { 0.5 * h } else { h })
                .collect();

            let mut max_dev = 0.0f64;
            let mut max_tail = 0.0f64;
            for (x, y) in pairs {
                // distance from the product-Gaussian center to the nearest face
                let dmin = (0..param_dim)
                    .map(|k| quad.half_width - 0.5 * (x[k] + y[k]).abs())
                    .fold(f64::INFINITY, f64::min);
                if dmin <= 0.0 {
                    return Err(Error::QuadratureCoverage {
                        tail_bound: 1.0,
                        limit: TAIL_MASS_LIMIT,
                    });
                }
                let tail =
                    2.0 * param_dim as f64 * (-dmin * dmin / (2.0 * sigma_z * sigma_z)).exp();
                max_tail = max_tail.max(tail);
                if tail > TAIL_MASS_LIMIT {
                    return Err(Error::QuadratureCoverage {
                        tail_bound: tail,
                        limit: TAIL_MASS_LIMIT,
                    });
                }

                let integral = match param_dim {
                    1 => {
                        let mut acc = 0.0;
                        for (zk, wk) in axis.iter().zip(&axis_w) {
                            let z = [*zk];
                            acc += wk * witness.eval(x, &z) * witness.eval(y, &z);
                        }
                        acc
                    }
                    2 => {
                        let mut acc = 0.0;
                        for (z0, w0) in axis.iter().zip(&axis_w) {
                            for (z1, w1) in axis.iter().zip(&axis_w) {
                                let z = [*z0, *z1];
                                acc += w0 * w1 * witness.eval(x, &z) * witness.eval(y, &z);
                            }
                        }
                        acc
                    }
                    _ => unreachable!("param_dim checked above"),
                };
                max_dev = max_dev.max((integral - eval(x, y)).abs());
            }
            Ok(ConvolutionReport {
                max_abs_deviation: max_dev,
                tail_bound: max_tail,
                pass: max_dev <= CONVOLUTION_PASS_TOL,
            })
        }
    }
}

/// Seeded random grids for score-matrix positivity checks.
pub fn random_grid(param_dim: usize, r: usize, half_width: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = crate::rng::rng_from(seed);
    (0..r)
        .map(|_| {
            (0..param_dim)
                .map(|_| half_width * (2.0 * rand::Rng::gen::<f64>(&mut rng) - 1.0))
                .collect()
        })
        .collect()
}

/// Score matrix evaluated on raw points (no ensemble required).
pub fn score_matrix_on_points(s: &ScoreFunction, points: &[Vec<f64>]) -> Result<ScoreMatrix> {
    let r = points.len();
    if r == 0 {
        return Err(Error::EmptyDimension);
    }
    let entries = DMatrix::from_fn(r, r, |i, j| s.eval(&points[i], &points[j]));
    ScoreMatrix::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn delta_score_examples() {
        let s = delta_score(1);
        assert_eq!(s.r(), 1);
        assert_abs_diff_eq!(s.entry(0, 0), 1.0);

        let s3 = delta_score(3);
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(s3.entry(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
        assert_abs_diff_eq!(s3.min_eigenvalue(), 1.0);
    }

    #[test]
    fn constant_score_examples() {
        let zero = constant_score(0.0, 1).unwrap();
        assert_abs_diff_eq!(zero.eval(&[0.3], &[2.0]), 0.0);
        let one = constant_score(1.0, 1).unwrap();
        assert_abs_diff_eq!(one.eval(&[0.3], &[2.0]), 1.0);

        let quarter = constant_score(0.25, 1).unwrap();
        match quarter.factor_witness() {
            FactorWitness::Constant { value } => assert_abs_diff_eq!(value, 0.5),
            other => panic!("unexpected witness {other:?}"),
        }

        assert!(matches!(
            constant_score(1.5, 1),
            Err(Error::ScoreOutOfRange { .. })
        ));
        assert!(matches!(
            constant_score(-0.1, 1),
            Err(Error::ScoreOutOfRange { .. })
        ));
    }

    #[test]
    fn gaussian_score_closed_form() {
        // width-t family evaluates to exp(-t |x - y|^2 / 2)
        let t = 0.5;
        let s = isotropic_gaussian_score(t, 2).unwrap();
        let x = [1.0f64, -0.5];
        let y = [0.0f64, 0.25];
        let d2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
        assert_abs_diff_eq!(s.eval(&x, &y), (-t * d2 / 2.0).exp(), epsilon = 1e-14);

        // diagonal case evaluated by hand: N = 1, Sigma = [1], |x - y| = sqrt(2)
        let s1 = isotropic_gaussian_score(1.0, 1).unwrap();
        assert_abs_diff_eq!(
            s1.eval(&[2.0f64.sqrt()], &[0.0]),
            (-1.0f64).exp(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(s1.eval(&[0.7], &[0.7]), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn gaussian_score_symmetry_and_translation_invariance() {
        let sigma = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let s = gaussian_score(sigma).unwrap();
        let x = [0.4, -1.0];
        let y = [-0.2, 0.5];
        assert_abs_diff_eq!(s.eval(&x, &y), s.eval(&y, &x), epsilon = 1e-15);
        let c = [10.0, -3.0];
        let xc = [x[0] + c[0], x[1] + c[1]];
        let yc = [y[0] + c[0], y[1] + c[1]];
        assert_abs_diff_eq!(s.eval(&x, &y), s.eval(&xc, &yc), epsilon = 1e-12);
    }

    #[test]
    fn gaussian_score_rejects_indefinite_sigma() {
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        match gaussian_score(sigma) {
            Err(Error::NotPositiveDefinite { min_eigenvalue }) => {
                assert_abs_diff_eq!(min_eigenvalue, -1.0, epsilon = 1e-12)
            }
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn gaussian_factor_scale_matches_formula() {
        // N = 1, Sigma = [1]: scale = (2 pi det(Sigma/4))^{-1/4} = (pi/2)^{-1/4}
        let (witness, scale) = gaussian_factor(DMatrix::from_element(1, 1, 1.0)).unwrap();
        let expect = (std::f64::consts::PI / 2.0).powf(-0.25);
        assert_abs_diff_eq!(scale, expect, epsilon = 1e-14);
        // P(x, x) = scale
        assert_abs_diff_eq!(witness.eval(&[0.3], &[0.3]), scale, epsilon = 1e-14);
        // symmetry
        assert_abs_diff_eq!(
            witness.eval(&[0.1], &[-0.7]),
            witness.eval(&[-0.7], &[0.1]),
            epsilon = 1e-15
        );
    }

    #[test]
    fn convolution_constant_is_exact() {
        let s = constant_score(0.25, 1).unwrap();
        let pairs = vec![(vec![0.0], vec![1.0]), (vec![-2.0], vec![0.5])];
        let quad = QuadratureSpec::default_for(&s, &pairs);
        let report = verify_convolution(&s, &pairs, &quad).unwrap();
        assert_abs_diff_eq!(report.max_abs_deviation, 0.0);
        assert!(report.pass);
    }

    #[test]
    fn convolution_gaussian_matches_within_1e6() {
        let s = isotropic_gaussian_score(1.0, 1).unwrap();
        let pairs: Vec<(Vec<f64>, Vec<f64>)> = vec![
            (vec![0.0], vec![0.0]),
            (vec![0.0], vec![1.0]),
            (vec![-1.5], vec![1.5]),
            (vec![2.0], vec![-1.0]),
        ];
        let quad = QuadratureSpec {
            half_width: 10.0,
            nodes_per_axis: 400,
        };
        let report = verify_convolution(&s, &pairs, &quad).unwrap();
        assert!(report.pass, "deviation {}", report.max_abs_deviation);
        assert!(report.max_abs_deviation <= 1e-6);
    }

    #[test]
    fn convolution_detects_tampered_witness() {
        // halving the scale multiplies the integral by 1/4, so the deviation
        // is 0.75 * S(x, y)
        let s = isotropic_gaussian_score(1.0, 1).unwrap();
        let witness = match s.factor_witness() {
            FactorWitness::Gaussian { sigma_inv, scale } => FactorWitness::Gaussian {
                sigma_inv,
                scale: scale / 2.0,
            },
            _ => unreachable!(),
        };
        let pairs = vec![(vec![0.0], vec![1.0])];
        let quad = QuadratureSpec::default_for(&s, &pairs);
        let report =
            verify_convolution_witness(|x, y| s.eval(x, y), 1, &witness, &pairs, &quad).unwrap();
        assert!(!report.pass);
        let expected_dev = 0.75 * s.eval(&[0.0], &[1.0]);
        assert_abs_diff_eq!(report.max_abs_deviation, expected_dev, epsilon = 1e-6);
    }

    #[test]
    fn convolution_rejects_undersized_boxes() {
        let s = isotropic_gaussian_score(1.0, 1).unwrap();
        let pairs = vec![(vec![0.0], vec![0.5])];
        let quad = QuadratureSpec {
            half_width: 1.0,
            nodes_per_axis: 100,
        };
        assert!(matches!(
            verify_convolution(&s, &pairs, &quad),
            Err(Error::QuadratureCoverage { .. })
        ));
    }

    #[test]
    fn score_matrix_examples() {
        // two points at distance sqrt(2), Sigma = [1]:
        // [[1, e^{-1}], [e^{-1}, 1]], eigenvalues 1 +- e^{-1}
        let s = isotropic_gaussian_score(1.0, 1).unwrap();
        let points = vec![vec![0.0], vec![2.0f64.sqrt()]];
        let m = score_matrix_on_points(&s, &points).unwrap();
        let e1 = (-1.0f64).exp();
        assert_abs_diff_eq!(m.entry(0, 1), e1, epsilon = 1e-14);
        assert_abs_diff_eq!(m.min_eigenvalue(), 1.0 - e1, epsilon = 1e-12);

        // constant one on r points: all-ones matrix, eigenvalues (r, 0, ...)
        let ones = constant_score(1.0, 1).unwrap();
        let pts: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64]).collect();
        let m = score_matrix_on_points(&ones, &pts).unwrap();
        assert!(m.min_eigenvalue() >= -1e-9 * 4.0);
        assert!(m.min_eigenvalue().abs() <= 1e-12);
    }

    #[test]
    fn gaussian_score_matrices_are_psd_on_random_grids() {
        for seed in 0..12u64 {
            let n = 1 + (seed as usize % 2);
            let r = 8 + 7 * (seed as usize % 9);
            let t = [0.25, 1.0, 4.0][seed as usize % 3];
            let s = isotropic_gaussian_score(t, n).unwrap();
            let points = random_grid(n, r, 3.0, 500 + seed);
            let m = score_matrix_on_points(&s, &points).unwrap();
            assert!(
                m.min_eigenvalue() >= -1e-9 * r as f64,
                "seed {seed}: min eig {}",
                m.min_eigenvalue()
            );
        }
    }

    #[test]
    fn isotropic_score_decreases_in_t() {
        let x = [0.0];
        let y = [1.3];
        let mut last = f64::INFINITY;
        for t in [0.1, 0.5, 1.0, 2.0, 8.0] {
            let s = isotropic_gaussian_score(t, 1).unwrap();
            let v = s.eval(&x, &y);
            assert!(v < last, "t {t}");
            last = v;
        }
    }

    #[test]
    fn score_matrix_rejects_broken_kernels() {
        // an indefinite symmetric matrix in [0,1] range is not a valid score
        // matrix
        let entries = DMatrix::from_row_slice(2, 2, &[0.1, 1.0, 1.0, 0.1]);
        assert!(matches!(
            ScoreMatrix::new(entries),
            Err(Error::ScoreNotPsd { .. })
        ));
        let out_of_range = DMatrix::from_row_slice(1, 1, &[1.5]);
        assert!(matches!(
            ScoreMatrix::new(out_of_range),
            Err(Error::ScoreOutOfRange { .. })
        ));
    }
}
