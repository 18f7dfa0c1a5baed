//! Interactive browser demo for the square-root measurement bounds.
//!
//! Three operations, each returning plot-ready JSON:
//!
//! - [`two_state_curve`]: optimal vs. pretty-good success probability for a
//!   pair of pure states as their angle varies, with the square-root bound.
//! - [`mse_limit_curve`]: the gain-limit curve `2/t (1 - G_t)` climbing to
//!   the MSE of the pretty good measurement, with the factor-2 and
//!   second-moment bounds.
//! - [`gain_vs_score_width`]: expected gains under Gaussian scores of varying
//!   width on a seeded random ensemble, against `sqrt(G_PGM)`.
//!
//! Build for the web with
//! `cargo build -p gpgm-demo --target wasm32-unknown-unknown --release`
//! followed by `wasm-bindgen --target web` (see the repository README).

use wasm_bindgen::prelude::*;

use gpgm_core::bosonic;
use gpgm_core::ensemble::{
    bosonic_displaced_ensemble, discretize_gaussian_prior, random_ensemble, Ensemble, StateFamily,
    StateKind,
};
use gpgm_core::gain::{expected_gain, mse, mse_via_gain_limit};
use gpgm_core::gpgm::build_finite_pgm;
use gpgm_core::linalg::HermitianOperator;
use gpgm_core::optimal::{helstrom_two_state, maximize_success, random_povm, SolverSettings};
use gpgm_core::score::{delta_score, isotropic_gaussian_score, score_matrix};
use gpgm_core::{Error, Result};
use num_complex::Complex64;

fn to_js(r: Result<serde_json::Value>) -> std::result::Result<String, JsValue> {
    r.map(|v| v.to_string())
        .map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Uniform-prior two-state discrimination as the second state rotates away
/// from the first: `|0>` against `cos(theta)|0> + sin(theta)|1>`.
pub fn two_state_curve_impl(prior_p1: f64, n_points: usize) -> Result<serde_json::Value> {
    if !(0.0..=1.0).contains(&prior_p1) {
        return Err(Error::InvalidConfig {
            reason: format!("prior {prior_p1} outside [0, 1]"),
        });
    }
    let n = n_points.clamp(2, 512);
    let ket0 = HermitianOperator::from_diagonal(&[1.0, 0.0])?;
    let mut theta = Vec::with_capacity(n);
    let mut p_helstrom = Vec::with_capacity(n);
    let mut p_pgm = Vec::with_capacity(n);
    let mut sqrt_p_pgm = Vec::with_capacity(n);
    for k in 0..n {
        let th = std::f64::consts::FRAC_PI_2 * k as f64 / (n - 1) as f64;
        let rotated = HermitianOperator::pure_state(&[
            Complex64::new(th.cos(), 0.0),
            Complex64::new(th.sin(), 0.0),
        ])?;
        let e = Ensemble::new(
            1,
            vec![vec![0.0], vec![1.0]],
            vec![prior_p1, 1.0 - prior_p1],
            vec![ket0.clone(), rotated.clone()],
            "two_state",
        )?;
        let helstrom = helstrom_two_state(prior_p1, &ket0, 1.0 - prior_p1, &rotated)?;
        let pgm = build_finite_pgm(&e)?;
        let gain = expected_gain(&e, &delta_score(2), &pgm)?.expected_gain;
        theta.push(th);
        p_helstrom.push(helstrom.objective);
        p_pgm.push(gain);
        sqrt_p_pgm.push(gain.max(0.0).sqrt());
    }
    Ok(serde_json::json!({
        "theta": theta,
        "p_helstrom": p_helstrom,
        "p_pgm": p_pgm,
        "sqrt_p_pgm": sqrt_p_pgm,
    }))
}

#[wasm_bindgen]
pub fn two_state_curve(prior_p1: f64, n_points: usize) -> std::result::Result<String, JsValue> {
    to_js(two_state_curve_impl(prior_p1, n_points))
}

const DEMO_T_SEQUENCE: [f64; 10] = [3.0, 1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.003, 0.001];

/// The MSE gain-limit curve for a small estimation ensemble.
///
/// `family` is `"qubit"` (1-parameter Gaussian grid of pure qubit states) or
/// `"bosonic"` (3x3 grid of displaced vacuum states at Fock cutoff 16, with
/// the `alpha = (x1 + i*x2)/sqrt(2)` convention). `spread` scales the prior.
pub fn mse_limit_curve_impl(family: &str, spread: f64, grid_points: usize) -> Result<serde_json::Value> {
    let spread = spread.clamp(0.1, 3.0);
    let e = match family {
        "qubit" => discretize_gaussian_prior(
            1,
            0.5 * spread,
            1.0,
            grid_points.clamp(2, 9),
            &StateFamily::QubitAngle { scale: 1.2 },
        )?,
        "bosonic" => {
            let cutoff = 16;
            let half = 0.28 * spread;
            let ppa = grid_points.clamp(2, 3);
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
                cutoff,
                &bosonic::vacuum_state(cutoff),
                &points,
                None,
                1e-6,
                "bosonic_demo",
            )?
        }
        other => {
            return Err(Error::InvalidConfig {
                reason: format!("unknown family {other}"),
            })
        }
    };

    let pgm = build_finite_pgm(&e)?;
    let mse_pgm = mse(&e, &pgm)?;
    let bound_4e = 4.0 * gpgm_core::ensemble::second_moment(&e);
    let curve = mse_via_gain_limit(&e, &pgm, &DEMO_T_SEQUENCE)?;
    let candidate = random_povm(e.dim(), e.len(), 7)?;
    let mse_candidate = mse(&e, &candidate)?;

    Ok(serde_json::json!({
        "family": family,
        "r": e.len(),
        "dim": e.dim(),
        "t": curve.iter().map(|&(t, _)| t).collect::<Vec<_>>(),
        "curve": curve.iter().map(|&(_, v)| v).collect::<Vec<_>>(),
        "mse_pgm": mse_pgm,
        "bound_4e": bound_4e,
        "mse_random_candidate": mse_candidate,
        "factor2_rhs": 2.0 * mse_candidate,
    }))
}

#[wasm_bindgen]
pub fn mse_limit_curve(family: &str, spread: f64, grid_points: usize) -> std::result::Result<String, JsValue> {
    to_js(mse_limit_curve_impl(family, spread, grid_points))
}

/// Gains under Gaussian scores of width `t` (log-spaced) on a seeded random
/// ensemble: pretty good measurement, its square-root bound, the fixed-point
/// solver, and a fixed random measurement.
pub fn gain_vs_score_width_impl(seed: u64, steps: usize) -> Result<serde_json::Value> {
    let steps = steps.clamp(4, 64);
    let e = random_ensemble(3, 4, 1, seed, StateKind::Mixed);
    let pgm = build_finite_pgm(&e)?;
    let candidate = random_povm(e.dim(), e.len(), seed ^ 0x5EED)?;
    let settings = SolverSettings {
        tol: 1e-6,
        max_iters: 400,
    };

    let mut ts = Vec::with_capacity(steps);
    let mut g_pgm = Vec::with_capacity(steps);
    let mut sqrt_g_pgm = Vec::with_capacity(steps);
    let mut g_solver = Vec::with_capacity(steps);
    let mut g_random = Vec::with_capacity(steps);
    let (lo, hi) = (1e-2f64.ln(), 1e2f64.ln());
    for k in 0..steps {
        let t = (lo + (hi - lo) * k as f64 / (steps - 1) as f64).exp();
        let s = score_matrix(&isotropic_gaussian_score(t, 1)?, &e)?;
        let pgm_gain = expected_gain(&e, &s, &pgm)?.expected_gain;
        let solved = maximize_success(&e, &s, &settings)?;
        let random_gain = expected_gain(&e, &s, &candidate)?.expected_gain;
        ts.push(t);
        g_pgm.push(pgm_gain);
        sqrt_g_pgm.push(pgm_gain.max(0.0).sqrt());
        g_solver.push(solved.objective);
        g_random.push(random_gain);
    }
    Ok(serde_json::json!({
        "t": ts,
        "g_pgm": g_pgm,
        "sqrt_g_pgm": sqrt_g_pgm,
        "g_solver": g_solver,
        "g_random": g_random,
    }))
}

#[wasm_bindgen]
pub fn gain_vs_score_width(seed: u64, steps: usize) -> std::result::Result<String, JsValue> {
    to_js(gain_vs_score_width_impl(seed, steps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_state_curve_respects_square_root_bound() {
        let v = two_state_curve_impl(0.5, 24).unwrap();
        let helstrom = v["p_helstrom"].as_array().unwrap();
        let pgm = v["p_pgm"].as_array().unwrap();
        let sqrt = v["sqrt_p_pgm"].as_array().unwrap();
        assert_eq!(helstrom.len(), 24);
        for k in 0..24 {
            let h = helstrom[k].as_f64().unwrap();
            let p = pgm[k].as_f64().unwrap();
            let s = sqrt[k].as_f64().unwrap();
            assert!(p <= h + 1e-9, "k = {k}");
            assert!(h <= s + 1e-9, "k = {k}");
        }
        // orthogonal endpoint discriminates perfectly
        assert!((helstrom[23].as_f64().unwrap() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn two_state_curve_rejects_bad_priors() {
        assert!(two_state_curve_impl(1.5, 10).is_err());
    }

    #[test]
    fn mse_curves_satisfy_bounds_for_both_families() {
        for family in ["qubit", "bosonic"] {
            let v = mse_limit_curve_impl(family, 1.0, 3).unwrap();
            let mse_pgm = v["mse_pgm"].as_f64().unwrap();
            let curve = v["curve"].as_array().unwrap();
            for c in curve {
                assert!(c.as_f64().unwrap() <= mse_pgm + 1e-9, "{family}");
            }
            assert!(mse_pgm <= v["bound_4e"].as_f64().unwrap() + 1e-9, "{family}");
            assert!(mse_pgm <= v["factor2_rhs"].as_f64().unwrap() + 1e-8, "{family}");
        }
    }

    #[test]
    fn gain_curves_respect_square_root_bound() {
        let v = gain_vs_score_width_impl(42, 8).unwrap();
        let g_pgm = v["g_pgm"].as_array().unwrap();
        let sqrt = v["sqrt_g_pgm"].as_array().unwrap();
        let g_solver = v["g_solver"].as_array().unwrap();
        let g_random = v["g_random"].as_array().unwrap();
        for k in 0..8 {
            let p = g_pgm[k].as_f64().unwrap();
            let s = sqrt[k].as_f64().unwrap();
            let o = g_solver[k].as_f64().unwrap();
            let r = g_random[k].as_f64().unwrap();
            assert!(o <= s + 1e-8, "k = {k}: solver {o} vs sqrt {s}");
            assert!(r <= s + 1e-8, "k = {k}");
            assert!(p <= o + 1e-8, "k = {k}: pgm {p} above solver {o}");
        }
    }
}
