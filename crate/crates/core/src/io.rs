//! JSON file formats: ensembles, POVMs, score stanzas, sweep configs.
//!
//! Ensembles are either explicit (`points`, `weights`, `states` as `d x d`
//! arrays of `[re, im]` pairs) or a generator stanza selected by the
//! `generator` field (`bosonic`, `random`, `gaussian_grid`). Loaders validate
//! every invariant and report the first violation with its index.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::bosonic;
use crate::ensemble::{
    bosonic_displaced_ensemble, discretize_gaussian_prior, random_ensemble, Ensemble, OutcomeCell,
    StateFamily, StateKind,
};
use crate::error::{Error, Result};
use crate::gpgm::Povm;
use crate::linalg::{CMatrix, HermitianOperator};
use crate::optimal::SolverSettings;
use crate::score::{constant_score, gaussian_score, delta_score, score_matrix, ScoreMatrix};

/// Complex matrix as rows of `[re, im]` pairs.
pub type ComplexMatJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMatrix) -> ComplexMatJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &ComplexMatJson) -> Result<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::NotSquare {
            rows: n,
            cols: rows.first().map_or(0, Vec::len),
        });
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        num_complex::Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

/// Base state selector for bosonic generators.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BosonicBase {
    Vacuum,
    Thermal { mean_photons: f64 },
}

impl BosonicBase {
    pub fn build(&self, cutoff: usize) -> Result<HermitianOperator> {
        match self {
            BosonicBase::Vacuum => Ok(bosonic::vacuum_state(cutoff)),
            BosonicBase::Thermal { mean_photons } => bosonic::thermal_state(cutoff, *mean_photons),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum RandomKind {
    Pure,
    Mixed,
}

impl From<RandomKind> for StateKind {
    fn from(k: RandomKind) -> StateKind {
        match k {
            RandomKind::Pure => StateKind::Pure,
            RandomKind::Mixed => StateKind::Mixed,
        }
    }
}

/// State family stanza for grid generators.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    QubitAngle {
        scale: f64,
    },
    Bosonic {
        fock_cutoff: usize,
        base: BosonicBase,
        trunc_tol: Option<f64>,
    },
}

impl FamilySpec {
    pub fn build(&self) -> Result<StateFamily> {
        match self {
            FamilySpec::QubitAngle { scale } => Ok(StateFamily::QubitAngle { scale: *scale }),
            FamilySpec::Bosonic {
                fock_cutoff,
                base,
                trunc_tol,
            } => Ok(StateFamily::BosonicDisplaced {
                fock_cutoff: *fock_cutoff,
                base: base.build(*fock_cutoff)?,
                trunc_tol: trunc_tol.unwrap_or(bosonic::DEFAULT_TRUNC_TOL),
            }),
        }
    }
}

/// Generator stanza for ensemble files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Bosonic {
        fock_cutoff: usize,
        #[serde(default)]
        n_modes: Option<usize>,
        base: BosonicBase,
        points: Vec<[f64; 2]>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
        #[serde(default)]
        trunc_tol: Option<f64>,
        #[serde(default)]
        label: Option<String>,
    },
    Random {
        d: usize,
        r: usize,
        param_dim: usize,
        seed: u64,
        kind: RandomKind,
        #[serde(default)]
        label: Option<String>,
    },
    GaussianGrid {
        param_dim: usize,
        sigma_prior: f64,
        grid_half_width: f64,
        points_per_axis: usize,
        family: FamilySpec,
        #[serde(default)]
        label: Option<String>,
    },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Ensemble> {
        match self {
            GeneratorSpec::Bosonic {
                fock_cutoff,
                n_modes,
                base,
                points,
                weights,
                trunc_tol,
                label,
            } => {
                if let Some(n) = n_modes {
                    if *n != 1 {
                        return Err(Error::InvalidConfig {
                            reason: format!("only single-mode ensembles are supported, got n_modes = {n}"),
                        });
                    }
                }
                let base_state = base.build(*fock_cutoff)?;
                bosonic_displaced_ensemble(
                    *fock_cutoff,
                    &base_state,
                    points,
                    weights.as_deref(),
                    trunc_tol.unwrap_or(bosonic::DEFAULT_TRUNC_TOL),
                    label.clone().unwrap_or_else(|| "bosonic".to_string()),
                )
            }
            GeneratorSpec::Random {
                d,
                r,
                param_dim,
                seed,
                kind,
                label,
            } => {
                if *d == 0 || *r == 0 {
                    return Err(Error::InvalidConfig {
                        reason: "d and r must be at least 1".into(),
                    });
                }
                let mut e = random_ensemble(*d, *r, *param_dim, *seed, (*kind).into());
                if let Some(l) = label {
                    e = Ensemble::new(
                        e.param_dim(),
                        e.points().to_vec(),
                        e.weights().to_vec(),
                        e.states().to_vec(),
                        l.clone(),
                    )?;
                }
                Ok(e)
            }
            GeneratorSpec::GaussianGrid {
                param_dim,
                sigma_prior,
                grid_half_width,
                points_per_axis,
                family,
                label: _,
            } => discretize_gaussian_prior(
                *param_dim,
                *sigma_prior,
                *grid_half_width,
                *points_per_axis,
                &family.build()?,
            ),
        }
    }
}

/// Explicit ensemble payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExplicitEnsemble {
    #[serde(default)]
    pub label: Option<String>,
    pub param_dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub states: Vec<ComplexMatJson>,
}

/// An ensemble file: explicit data or a generator stanza.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnsembleSpec {
    Generated(GeneratorSpec),
    Explicit(ExplicitEnsemble),
}

impl EnsembleSpec {
    pub fn build(&self) -> Result<Ensemble> {
        match self {
            EnsembleSpec::Generated(g) => g.build(),
            EnsembleSpec::Explicit(x) => {
                let mut states = Vec::with_capacity(x.states.len());
                for (i, rows) in x.states.iter().enumerate() {
                    let mat = matrix_from_json(rows).map_err(|e| Error::InvalidEnsemble {
                        index: i,
                        reason: e.to_string(),
                    })?;
                    states.push(HermitianOperator::new(mat).map_err(|e| {
                        Error::InvalidEnsemble {
                            index: i,
                            reason: e.to_string(),
                        }
                    })?);
                }
                Ensemble::new(
                    x.param_dim,
                    x.points.clone(),
                    x.weights.clone(),
                    states,
                    x.label.clone().unwrap_or_else(|| "ensemble".to_string()),
                )
            }
        }
    }
}

pub fn parse_ensemble(json: &str) -> Result<Ensemble> {
    let spec: EnsembleSpec = serde_json::from_str(json)?;
    spec.build()
}

pub fn load_ensemble(path: impl AsRef<Path>) -> Result<Ensemble> {
    parse_ensemble(&std::fs::read_to_string(path)?)
}

pub fn ensemble_to_json(e: &Ensemble) -> serde_json::Value {
    serde_json::json!({
        "label": e.label(),
        "param_dim": e.param_dim(),
        "points": e.points(),
        "weights": e.weights(),
        "states": e.states().iter().map(|s| matrix_to_json(s.matrix())).collect::<Vec<_>>(),
    })
}

/// POVM file payload, mirroring the ensemble format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmFile {
    #[serde(default)]
    pub label: Option<String>,
    pub cells: Vec<Vec<usize>>,
    pub elements: Vec<ComplexMatJson>,
}

pub fn povm_to_json(p: &Povm) -> serde_json::Value {
    serde_json::json!({
        "label": p.label(),
        "cells": p.cells().iter().map(|c| c.indices().to_vec()).collect::<Vec<_>>(),
        "elements": p.elements().iter().map(|m| matrix_to_json(m.matrix())).collect::<Vec<_>>(),
    })
}

pub fn parse_povm(json: &str) -> Result<Povm> {
    let file: PovmFile = serde_json::from_str(json)?;
    let cells: Vec<OutcomeCell> = file
        .cells
        .iter()
        .map(|c| OutcomeCell::new(c.clone()))
        .collect::<Result<_>>()?;
    let elements: Vec<HermitianOperator> = file
        .elements
        .iter()
        .map(|rows| HermitianOperator::new(matrix_from_json(rows)?))
        .collect::<Result<_>>()?;
    Povm::new(
        cells,
        elements,
        file.label.unwrap_or_else(|| "povm".to_string()),
    )
}

pub fn load_povm(path: impl AsRef<Path>) -> Result<Povm> {
    parse_povm(&std::fs::read_to_string(path)?)
}

pub fn save_povm(path: impl AsRef<Path>, p: &Povm) -> Result<()> {
    Ok(std::fs::write(
        path,
        serde_json::to_string_pretty(&povm_to_json(p))?,
    )?)
}

/// Score stanza.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScoreSpec {
    Delta,
    Constant {
        a: f64,
    },
    Gaussian {
        #[serde(alias = "Sigma")]
        sigma: Vec<Vec<f64>>,
    },
}

impl ScoreSpec {
    pub fn label(&self) -> String {
        match self {
            ScoreSpec::Delta => "delta".to_string(),
            ScoreSpec::Constant { a } => format!("constant_{a}"),
            ScoreSpec::Gaussian { .. } => "gaussian".to_string(),
        }
    }

    /// Materializes the stanza on an ensemble's points.
    pub fn build_matrix(&self, e: &Ensemble) -> Result<ScoreMatrix> {
        match self {
            ScoreSpec::Delta => Ok(delta_score(e.len())),
            ScoreSpec::Constant { a } => score_matrix(&constant_score(*a, e.param_dim())?, e),
            ScoreSpec::Gaussian { sigma } => {
                let n = sigma.len();
                if sigma.iter().any(|row| row.len() != n) {
                    return Err(Error::NotSquare {
                        rows: n,
                        cols: sigma.first().map_or(0, Vec::len),
                    });
                }
                let mat =
                    nalgebra::DMatrix::from_fn(n, n, |i, j| sigma[i][j]);
                score_matrix(&gaussian_score(mat)?, e)
            }
        }
    }
}

/// Instance source for sweep configs: a file or a seeded family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InstanceSource {
    /// A single ensemble file.
    File { path: String },
    /// Random finite ensembles; `kind` may be `pure`, `mixed`, or `varied`
    /// (cycles pure, mixed, and subspace-confined).
    RandomFamily {
        d_range: [usize; 2],
        r_range: [usize; 2],
        param_dim: usize,
        kind: String,
    },
    /// Estimation-oriented mix: qubit grids, bosonic fixtures, and random
    /// ensembles with unit-ball points.
    EstimationFamily {
        #[serde(default = "default_bosonic_cutoff")]
        bosonic_cutoff: usize,
        #[serde(default = "default_bosonic_points_per_axis")]
        bosonic_points_per_axis: usize,
        #[serde(default = "default_grid_points")]
        grid_points: usize,
    },
}

fn default_bosonic_cutoff() -> usize {
    30
}

fn default_bosonic_points_per_axis() -> usize {
    3
}

fn default_grid_points() -> usize {
    5
}

fn default_num_random_povms() -> usize {
    5
}

fn default_solver() -> SolverSettingsSpec {
    SolverSettingsSpec {
        tol: 1e-7,
        max_iters: 2000,
    }
}

/// Solver stanza (mirrors [`SolverSettings`]).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverSettingsSpec {
    pub tol: f64,
    pub max_iters: usize,
}

impl From<SolverSettingsSpec> for SolverSettings {
    fn from(s: SolverSettingsSpec) -> SolverSettings {
        SolverSettings {
            tol: s.tol,
            max_iters: s.max_iters,
        }
    }
}

/// Batch sweep configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub instances: InstanceSource,
    pub score: ScoreSpec,
    #[serde(default = "default_solver")]
    pub solver: SolverSettingsSpec,
    pub num_instances: usize,
    pub seed: u64,
    #[serde(default = "default_num_random_povms")]
    pub num_random_povms: usize,
    #[serde(default)]
    pub t_sequence: Option<Vec<f64>>,
    #[serde(default)]
    pub out: Option<String>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_instances == 0 {
            return Err(Error::InvalidConfig {
                reason: "num_instances must be at least 1".into(),
            });
        }
        if let Some(ts) = &self.t_sequence {
            if ts.is_empty() {
                return Err(Error::InvalidConfig {
                    reason: "t_sequence must not be empty".into(),
                });
            }
            for pair in ts.windows(2) {
                if pair[1] >= pair[0] {
                    return Err(Error::InvalidTSequence { value: pair[1] });
                }
            }
            if let Some(&bad) = ts.iter().find(|&&t| t.is_nan() || t <= 0.0) {
                return Err(Error::InvalidTSequence { value: bad });
            }
        }
        if let InstanceSource::RandomFamily {
            d_range, r_range, kind, ..
        } = &self.instances
        {
            if d_range[0] == 0 || d_range[0] > d_range[1] || r_range[0] == 0 || r_range[0] > r_range[1]
            {
                return Err(Error::InvalidConfig {
                    reason: "d_range and r_range must be nonempty 1-based ranges".into(),
                });
            }
            if !["pure", "mixed", "varied"].contains(&kind.as_str()) {
                return Err(Error::InvalidConfig {
                    reason: format!("unknown random-family kind {kind}"),
                });
            }
        }
        if let ScoreSpec::Gaussian { sigma } = &self.score {
            let n = sigma.len();
            if n == 0 || sigma.iter().any(|row| row.len() != n) {
                return Err(Error::InvalidConfig {
                    reason: "gaussian score sigma must be a nonempty square matrix".into(),
                });
            }
            match &self.instances {
                InstanceSource::RandomFamily { param_dim, .. } if *param_dim != n => {
                    return Err(Error::InvalidConfig {
                        reason: format!(
                            "gaussian score has dimension {n} but instances have param_dim {param_dim}"
                        ),
                    });
                }
                // the estimation family mixes one- and two-parameter
                // ensembles, so a fixed-width gaussian cannot apply to all
                InstanceSource::EstimationFamily { .. } => {
                    return Err(Error::InvalidConfig {
                        reason: "gaussian scores are not supported with the estimation family; \
                                 use delta or constant"
                            .into(),
                    });
                }
                _ => {}
            }
        }
        Ok(())
    }
}

pub fn load_sweep_config(path: impl AsRef<Path>) -> Result<SweepConfig> {
    let cfg: SweepConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::singleton_partition;
    use crate::gpgm::build_finite_pgm;
    use crate::linalg::hs_distance;
    use approx::assert_abs_diff_eq;

    #[test]
    fn explicit_ensemble_round_trip() {
        let e = random_ensemble(3, 4, 2, 5, StateKind::Mixed);
        let json = serde_json::to_string(&ensemble_to_json(&e)).unwrap();
        let back = parse_ensemble(&json).unwrap();
        assert_eq!(back.len(), 4);
        assert_eq!(back.param_dim(), 2);
        for i in 0..4 {
            assert!(hs_distance(back.state(i), e.state(i)) <= 1e-12);
            assert_abs_diff_eq!(back.weight(i), e.weight(i), epsilon = 1e-15);
        }
    }

    #[test]
    fn loader_reports_first_violation_with_index() {
        let json = r#"{
            "param_dim": 1,
            "points": [[0.0], [1.0]],
            "weights": [0.6, 0.4],
            "states": [
                [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
                [[[0.7, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.2, 0.0]]]
            ]
        }"#;
        match parse_ensemble(json) {
            Err(Error::InvalidEnsemble { index: 1, reason }) => {
                assert!(reason.contains("trace"), "{reason}");
            }
            other => panic!("expected index-1 violation, got {other:?}"),
        }
    }

    #[test]
    fn generator_stanzas_build() {
        let random = r#"{"generator": "random", "d": 2, "r": 3, "param_dim": 1, "seed": 9, "kind": "pure"}"#;
        let e = parse_ensemble(random).unwrap();
        assert_eq!((e.dim(), e.len()), (2, 3));

        let grid = r#"{
            "generator": "gaussian_grid",
            "param_dim": 1, "sigma_prior": 1.0, "grid_half_width": 1.0,
            "points_per_axis": 3,
            "family": {"family": "qubit_angle", "scale": 0.5}
        }"#;
        let e = parse_ensemble(grid).unwrap();
        assert_eq!((e.dim(), e.len()), (2, 3));

        let bosonic = r#"{
            "generator": "bosonic",
            "fock_cutoff": 12,
            "base": {"kind": "vacuum"},
            "points": [[0.0, 0.0], [0.5, -0.5]]
        }"#;
        let e = parse_ensemble(bosonic).unwrap();
        assert_eq!((e.dim(), e.len()), (12, 2));

        let multimode = r#"{
            "generator": "bosonic",
            "fock_cutoff": 8, "n_modes": 2,
            "base": {"kind": "vacuum"},
            "points": [[0.0, 0.0]]
        }"#;
        assert!(matches!(
            parse_ensemble(multimode),
            Err(Error::InvalidConfig { .. })
        ));
    }

    #[test]
    fn povm_round_trip() {
        let e = random_ensemble(3, 4, 1, 6, StateKind::Pure);
        let pgm = build_finite_pgm(&e).unwrap();
        let json = serde_json::to_string(&povm_to_json(&pgm)).unwrap();
        let back = parse_povm(&json).unwrap();
        assert_eq!(back.len(), pgm.len());
        assert_eq!(back.cells(), &singleton_partition(4)[..]);
        for k in 0..4 {
            assert!(hs_distance(back.element(k), pgm.element(k)) <= 1e-12);
        }
    }

    #[test]
    fn score_spec_builds_matrices() {
        let e = random_ensemble(2, 3, 1, 8, StateKind::Pure);
        let delta: ScoreSpec = serde_json::from_str(r#"{"kind": "delta"}"#).unwrap();
        let m = delta.build_matrix(&e).unwrap();
        assert_abs_diff_eq!(m.entry(0, 0), 1.0);
        assert_abs_diff_eq!(m.entry(0, 1), 0.0);

        let c: ScoreSpec = serde_json::from_str(r#"{"kind": "constant", "a": 0.5}"#).unwrap();
        let m = c.build_matrix(&e).unwrap();
        assert_abs_diff_eq!(m.entry(0, 1), 0.5);

        let g: ScoreSpec =
            serde_json::from_str(r#"{"kind": "gaussian", "sigma": [[1.0]]}"#).unwrap();
        let m = g.build_matrix(&e).unwrap();
        assert!(m.entry(0, 1) > 0.0 && m.entry(0, 1) < 1.0);
    }

    #[test]
    fn sweep_config_validation() {
        let good = r#"{
            "instances": {"source": "random_family", "d_range": [2, 4], "r_range": [2, 5], "param_dim": 1, "kind": "varied"},
            "score": {"kind": "delta"},
            "num_instances": 10,
            "seed": 7
        }"#;
        let cfg: SweepConfig = serde_json::from_str(good).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.num_random_povms, 5);
        assert_abs_diff_eq!(cfg.solver.tol, 1e-7);

        let bad = r#"{
            "instances": {"source": "random_family", "d_range": [4, 2], "r_range": [2, 5], "param_dim": 1, "kind": "varied"},
            "score": {"kind": "delta"},
            "num_instances": 10,
            "seed": 7
        }"#;
        let cfg: SweepConfig = serde_json::from_str(bad).unwrap();
        assert!(cfg.validate().is_err());

        // gaussian width dimension must match the family's parameter dimension
        let mismatched = r#"{
            "instances": {"source": "random_family", "d_range": [2, 4], "r_range": [2, 5], "param_dim": 2, "kind": "varied"},
            "score": {"kind": "gaussian", "sigma": [[1.0]]},
            "num_instances": 10,
            "seed": 7
        }"#;
        let cfg: SweepConfig = serde_json::from_str(mismatched).unwrap();
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig { .. })));

        let estimation_gaussian = r#"{
            "instances": {"source": "estimation_family"},
            "score": {"kind": "gaussian", "sigma": [[1.0]]},
            "num_instances": 5,
            "seed": 7
        }"#;
        let cfg: SweepConfig = serde_json::from_str(estimation_gaussian).unwrap();
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig { .. })));
    }
}
