//! Verification suites assembled from the individual checks, shared by the
//! command-line `verify` subcommand and the acceptance tests.

use serde::{Deserialize, Serialize};

use crate::closed_form::linear_solution;
use crate::dynamics::vf_x4;
use crate::error::Result;
use crate::integrate::{integrate, solve, Field, IntegratorOptions, Termination};
use crate::invariants::{h_from_k, h_scale, linear_invariants, H_by_integration, H_values, K_values, MAX_H};
use crate::poisson::checks::{
    bi_involution_check, compatibility_check, fg_characteristic_check, jacobi_check, lenard_magri_check,
    linear_chart_points, linear_states, rank_check, restricted_pairs, JACOBI_TOL, LAMBDAS,
};
use crate::poisson::tensors::AuxChoice;
use crate::report::{Check, Report};
use crate::sampling::{sigma_points, PointSpec, Sampler};
use crate::state::{LinearState, SigmaState, State5};

/// Tolerance for the two routes to `H₂..H₅`.
pub const H_EQUIVALENCE_TOL: f64 = 1e-9;

/// Physical states (`γ < 0`, `ω² − 4γζ > 0`) with entries in `[−r, r]`.
pub fn physical_states(n: usize, seed: u64, radius: f64) -> Vec<State5> {
    let mut s = Sampler::new(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = State5::new(
            s.uniform(-radius, radius),
            -s.uniform(0.05, radius),
            s.uniform(-radius, radius),
            s.uniform(-radius, radius),
            s.uniform(-radius, radius),
        );
        if p.omega * p.omega - 4.0 * p.gamma * p.zeta > 1e-3 {
            out.push(p);
        }
    }
    out
}

/// `Hₙ` from its `K`-representation versus exact integration of the
/// density over the support, `n = 2..5`, relative to `max(|Hₙ|, H₁Mⁿ⁻¹)`.
pub fn h_equivalence_check(states: &[State5]) -> Check {
    let res: Vec<Option<f64>> = states
        .iter()
        .map(|s| {
            let mut worst = 0.0f64;
            for n in 2..=MAX_H {
                let a = H_values(s, n).ok()?;
                let b = H_by_integration(s, n).ok()?;
                let scale = h_scale(s, n).ok()?.max(a.abs());
                worst = worst.max((a - b).abs() / scale);
            }
            Some(worst)
        })
        .collect();
    Check::from_residuals("H_n: representation = integral", H_EQUIVALENCE_TOL, &res)
}

/// Largest relative change of `K₀, K₁, K₂, H₁..H₅` along a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Drift {
    pub t_end: f64,
    pub steps: usize,
    /// Per quantity, `max_t |Q(t) − Q(0)| / max(|Q(0)|, 1)`.
    pub per_quantity: [f64; 8],
    pub max: f64,
    pub reason: Termination,
}

/// Conserved-quantity drift along the adaptive solution of `X`.
///
/// `H`s are evaluated through their `K`-representation and left out where
/// `K₀ < 0`.
pub fn conservation_drift(s0: &State5, t_end: f64, opts: &IntegratorOptions) -> Result<Drift> {
    let tr = integrate(Field::X, s0, t_end, opts)?;
    let quantities = |s: &State5| -> Result<[f64; 8]> {
        let k = K_values(s)?;
        let mut q = [k.k0, k.k1, k.k2, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN];
        if k.k0 >= 0.0 {
            for n in 1..=MAX_H {
                q[2 + n] = h_from_k(k.k0, k.k1, k.k2, n)?;
            }
        }
        Ok(q)
    };
    let q0 = quantities(s0)?;
    let mut per = [0.0f64; 8];
    for smp in &tr.samples {
        let q = quantities(&smp.state)?;
        for i in 0..8 {
            if q0[i].is_finite() {
                per[i] = per[i].max((q[i] - q0[i]).abs() / q0[i].abs().max(1.0));
            }
        }
    }
    Ok(Drift {
        t_end: tr.final_state().t,
        steps: tr.samples.len() - 1,
        max: per.iter().copied().fold(0.0, f64::max),
        per_quantity: per,
        reason: tr.reason,
    })
}

/// States with finite-time blow-up and `K₀ > 0` (so every `H` is
/// defined): `γ > 0` and `ζ < ω²/(4γ)`.
pub fn blowup_states(n: usize, seed: u64) -> Vec<State5> {
    let mut s = Sampler::new(seed);
    (0..n)
        .map(|_| {
            let gamma = s.uniform(0.2, 2.0);
            let omega = s.uniform(-1.5, 1.5);
            let zeta = omega * omega / (4.0 * gamma) - s.uniform(0.1, 2.0);
            State5::new(s.uniform(-1.0, 1.0), gamma, zeta, omega, s.uniform(-1.0, 1.0))
        })
        .collect()
}

/// Blow-up time detected by the adaptive integrator (last accepted step).
pub fn detected_blowup(s0: &State5, opts: &IntegratorOptions) -> Result<Option<f64>> {
    Ok(integrate(Field::X, s0, 1e3, opts)?.blowup_time())
}

/// Linear-linear flow: closed form against Runge–Kutta and drift of
/// `H^l₁`, `H^l₃`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearCheck {
    pub max_deviation: f64,
    pub h1_drift: f64,
    pub h3_drift: f64,
}

pub fn linear_check(s0: &LinearState, t_end: f64, opts: &IntegratorOptions) -> Result<LinearCheck> {
    let rhs = |y: &[f64], dy: &mut [f64]| {
        let v = vf_x4(&LinearState::new(y[0], y[1], y[2], y[3]));
        dy.copy_from_slice(&v);
    };
    let sol = solve(rhs, &s0.to_array(), t_end, opts)?;
    let h0 = linear_invariants(s0, s0.zeta)?;
    let mut out = LinearCheck {
        max_deviation: 0.0,
        h1_drift: 0.0,
        h3_drift: 0.0,
    };
    for (t, y) in sol.t.iter().zip(&sol.y) {
        let exact = linear_solution(*t, s0)?.to_array();
        for i in 0..4 {
            out.max_deviation = out.max_deviation.max((y[i] - exact[i]).abs() / exact[i].abs().max(1.0));
        }
        let s = LinearState::new(y[0], y[1], y[2], y[3]);
        let h = linear_invariants(&s, s.zeta)?;
        out.h1_drift = out.h1_drift.max((h[0] - h0[0]).abs() / h0[0].abs().max(1.0));
        out.h3_drift = out.h3_drift.max((h[2] - h0[2]).abs() / h0[2].abs().max(1.0));
    }
    Ok(out)
}

/// Settings of the `verify` suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub points: usize,
    pub seed: u64,
    /// Multiplies `f` inside the tensors (1 for the exact structure).
    pub f_factor: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            points: 100,
            seed: 0,
            f_factor: 1.0,
        }
    }
}

/// Every structural check on seeded random points.
pub fn full_suite(cfg: &SuiteConfig) -> Result<Report> {
    let n = cfg.points;
    let seed = cfg.seed;
    let aux = if cfg.f_factor == 1.0 {
        AuxChoice::Exact
    } else {
        AuxChoice::Scaled {
            f: cfg.f_factor,
            g: 1.0,
        }
    };
    let box_spec = PointSpec::default();
    let pts = sigma_points(n, seed, &box_spec);
    let neg = sigma_points(
        n,
        seed.wrapping_add(1),
        &PointSpec {
            negative_kappa: true,
            ..box_spec
        },
    );
    let sym: Vec<SigmaState> = sigma_points(n, seed.wrapping_add(3), &box_spec)
        .into_iter()
        .map(|mut s| {
            s.omega = 0.0;
            s.delta = 0.0;
            s
        })
        .collect();
    let lin = linear_states(&linear_chart_points(n, seed.wrapping_add(4), 3.0))?;

    let mut checks = Vec::new();
    checks.extend(lenard_magri_check(&pts, aux).checks);
    checks.extend(
        lenard_magri_check(&pts, AuxChoice::Constant { f: 0.37, g: -1.9 })
            .checks
            .into_iter()
            .map(|mut c| {
                c.name = format!("{} (constant f, g)", c.name);
                c
            }),
    );
    checks.extend(jacobi_check(&pts, aux, JACOBI_TOL).checks);
    checks.extend(compatibility_check(&pts, &LAMBDAS, aux, JACOBI_TOL).checks);
    checks.extend(bi_involution_check(&neg, aux).checks);
    checks.extend(rank_check(&pts, aux).checks);
    checks.extend(fg_characteristic_check(&pts).checks);
    checks.extend(restricted_pairs(&sym, &lin)?.checks);
    checks.push(h_equivalence_check(&physical_states(n, seed.wrapping_add(5), 3.0)));
    Ok(Report::new(
        "verify",
        serde_json::json!({
            "points": n,
            "seed": seed,
            "f_factor": cfg.f_factor,
            "rng": "splitmix64, (x >> 11) * 2^-53",
            "box": box_spec.radius,
            "mu_convention": crate::poisson::checks::MU_CONVENTION,
        }),
        checks,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_routes_agree() {
        let c = h_equivalence_check(&physical_states(500, 1, 3.0));
        assert!(c.passed, "{}", c.line());
    }

    #[test]
    fn drift_is_small() {
        let s0 = State5::new(0.1, -1.0, 1.0, 0.2, 0.3);
        let d = conservation_drift(&s0, 0.3, &IntegratorOptions::default()).unwrap();
        assert!(d.max < 1e-9, "{d:?}");
    }

    #[test]
    fn suite_passes_and_detects_wrong_f() {
        let cfg = SuiteConfig {
            points: 20,
            ..SuiteConfig::default()
        };
        let r = full_suite(&cfg).unwrap();
        assert!(r.passed, "{}", r.to_text());
        let r = full_suite(&SuiteConfig { f_factor: 1.5, ..cfg }).unwrap();
        let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        assert!(!failed.is_empty());
        assert!(failed.iter().all(|n| n.starts_with("jacobi")), "{failed:?}");
    }
}
