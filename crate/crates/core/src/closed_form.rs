//! Explicit solutions of the reduced flow.
//!
//! Along `X` the curvature obeys `γ = γ₀τ³` with `τ̇ = −ατ` and
//!
//! ```text
//! α² = 4γ₀τ³ + (α₀² − 4γ₀)τ²,    τ̇² = 4γ₀τ⁵ + (α₀² − 4γ₀)τ⁴.
//! ```
//!
//! Internally the motion is parametrized by `w = −α/τ`, which satisfies
//! `ẇ = 2γ₀τ²` and is therefore monotone even when `τ` turns around:
//!
//! ```text
//! τ(w) = (w² − c)/(4γ₀),   t(w) = ∫_{w₀}^{w} 8γ₀ dw'/(w'² − c)²,   c = α₀² − 4γ₀.
//! ```
//!
//! The vertex abscissa moves uniformly (`ξ = ξ₀ + δ₀t`) and the vertex height
//! scales like `τ` (`μ = μ₀τ`), which gives the full five-field solution.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::{find_root, integrate_gk};
use crate::state::{LinearState, State5, SymState3, VertexState};

/// `|c|` below this fraction of `α₀² + 4|γ₀|` switches the closed-form
/// antiderivatives (which lose `~ε·(scale/|c|)^{3/2}` to cancellation) to
/// quadrature.
pub const DEGENERATE_REL: f64 = 1e-3;

const QUAD_TOL: f64 = 1e-13;

/// Long-time behaviour of `τ` for given initial data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Regime {
    /// `τ → ∞` at the finite time `t_s`.
    BlowUp { t_s: f64 },
    /// `τ → 0` as `t → ∞`; the solution exists for all `t ≥ 0`.
    Decay,
}

/// Time map of the symmetric solution for fixed `(α₀, γ₀)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauSolver {
    pub alpha0: f64,
    pub gamma0: f64,
    c: f64,
    /// `√|c|`.
    b: f64,
    w0: f64,
    degenerate: bool,
    regime: Regime,
}

impl TauSolver {
    pub fn new(alpha0: f64, gamma0: f64) -> Result<Self> {
        if !alpha0.is_finite() || !gamma0.is_finite() {
            return Err(domain("non-finite initial data"));
        }
        if gamma0 == 0.0 {
            return Err(domain("gamma0 = 0 has no tau parametrization; use linear_solution"));
        }
        let c = alpha0 * alpha0 - 4.0 * gamma0;
        let scale = alpha0 * alpha0 + 4.0 * gamma0.abs();
        let mut me = Self {
            alpha0,
            gamma0,
            c,
            b: c.abs().sqrt(),
            w0: -alpha0,
            degenerate: c.abs() < DEGENERATE_REL * scale,
            regime: Regime::Decay,
        };
        // Blow-up unless w runs into the root −√c of w² − c first.
        let decays = gamma0 < 0.0 || (c >= 0.0 && me.w0 <= -me.b);
        if !decays {
            me.regime = Regime::BlowUp {
                t_s: me.t_blowup_branch(f64::INFINITY)?,
            };
        }
        Ok(me)
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn blowup_time(&self) -> Option<f64> {
        match self.regime {
            Regime::BlowUp { t_s } => Some(t_s),
            Regime::Decay => None,
        }
    }

    /// Antiderivative of `1/(w² − c)²` (non-degenerate `c`).
    fn anti(&self, w: f64) -> f64 {
        let b = self.b;
        if self.c < 0.0 {
            if w.is_infinite() {
                return w.signum() * FRAC_PI_2 / (2.0 * b * b * b);
            }
            w / (2.0 * b * b * (w * w + b * b)) + (w / b).atan() / (2.0 * b * b * b)
        } else {
            if w.is_infinite() {
                return 0.0;
            }
            -w / (2.0 * b * b * (w * w - b * b)) + ((w + b) / (w - b)).abs().ln() / (4.0 * b * b * b)
        }
    }

    fn integrand_w(&self, w: f64) -> f64 {
        let q = w * w - self.c;
        8.0 * self.gamma0 / (q * q)
    }

    /// `∫_{w₀}^{w} 8γ₀/(w'² − c)² dw'` by quadrature, splitting at the
    /// peak `w = 0` and mapping an infinite upper end through `v = 1/w`.
    fn quad_w(&self, w: f64) -> Result<f64> {
        let f = |x: f64| self.integrand_w(x);
        let mut total = 0.0;
        let mut lo = self.w0;
        let upper_finite = if w.is_infinite() {
            2.0 * self.w0.abs().max(self.b).max(1e-300)
        } else {
            w
        };
        if lo < 0.0 && upper_finite > 0.0 {
            total += integrate_gk(f, lo, 0.0, QUAD_TOL, 0.0)?;
            lo = 0.0;
        }
        total += integrate_gk(f, lo, upper_finite, QUAD_TOL, 0.0)?;
        if w.is_infinite() {
            let g = self.gamma0;
            let c = self.c;
            let tail = integrate_gk(
                |v: f64| {
                    let q = 1.0 - c * v * v;
                    8.0 * g * v * v / (q * q)
                },
                0.0,
                1.0 / upper_finite,
                QUAD_TOL,
                0.0,
            )?;
            total += tail;
        }
        Ok(total)
    }

    /// Elapsed time on the blow-up branch when `w` is reached (`w = ∞` gives `t_s`).
    fn t_blowup_branch(&self, w: f64) -> Result<f64> {
        if self.degenerate {
            self.quad_w(w)
        } else {
            Ok(8.0 * self.gamma0 * (self.anti(w) - self.anti(self.w0)))
        }
    }

    /// Distance `d = |w + √c|` to the limiting root at `t = 0`.
    fn d0(&self) -> f64 {
        (self.w0 + self.b).abs()
    }

    /// Antiderivative of `1/(w² − c)²` written in terms of `d = |w + √c|`.
    fn anti_d(&self, d: f64) -> f64 {
        let b = self.b;
        if self.gamma0 > 0.0 {
            // w = −b − d
            (b + d) / (2.0 * b * b * d * (2.0 * b + d)) + (d / (2.0 * b + d)).ln() / (4.0 * b * b * b)
        } else {
            // w = −b + d
            (b - d) / (2.0 * b * b * d * (d - 2.0 * b)) + (d / (2.0 * b - d)).abs().ln() / (4.0 * b * b * b)
        }
    }

    /// Elapsed time on the decaying branch when the distance `d` is reached.
    fn t_decay_branch(&self, d: f64) -> Result<f64> {
        let dd = self.d0();
        if self.degenerate {
            // Only γ₀ > 0 can be degenerate: ∫_d^{D} 8γ₀/(x²(2b + x)²) dx in log variable.
            let g = self.gamma0;
            let b = self.b;
            integrate_gk(
                |l: f64| {
                    let x = l.exp();
                    let q = 2.0 * b + x;
                    8.0 * g / (x * q * q)
                },
                d.ln(),
                dd.ln(),
                QUAD_TOL,
                0.0,
            )
        } else {
            Ok(8.0 * self.gamma0 * (self.anti_d(d) - self.anti_d(dd)))
        }
    }

    fn tau_from_w(&self, w: f64) -> f64 {
        1.0 + (w - self.w0) * (w + self.w0) / (4.0 * self.gamma0)
    }

    fn tau_from_d(&self, d: f64) -> f64 {
        if self.gamma0 > 0.0 {
            d * (2.0 * self.b + d) / (4.0 * self.gamma0)
        } else {
            d * (2.0 * self.b - d) / (-4.0 * self.gamma0)
        }
    }

    fn w_from_d(&self, d: f64) -> f64 {
        if self.gamma0 > 0.0 {
            -self.b - d
        } else {
            -self.b + d
        }
    }

    /// `(τ, α)` at time `t ≥ 0`.
    pub fn state_at(&self, t: f64) -> Result<(f64, f64)> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::OutOfDomain {
                t,
                blowup: self.blowup_time(),
            });
        }
        if t == 0.0 {
            return Ok((1.0, self.alpha0));
        }
        let f_tol = 1e-14 * t.max(1.0);
        match self.regime {
            Regime::BlowUp { t_s } => {
                if t >= t_s {
                    return Err(Error::OutOfDomain { t, blowup: Some(t_s) });
                }
                let l = self.w0.abs().max(self.b).max(1.0);
                let w_of = |s: f64| self.w0 + l * s / (1.0 - s);
                let s = find_root(
                    |s| {
                        if s >= 1.0 {
                            t_s - t
                        } else {
                            self.t_blowup_branch(w_of(s)).unwrap_or(f64::NAN) - t
                        }
                    },
                    0.0,
                    1.0,
                    f_tol,
                )?;
                let w = w_of(s);
                let tau = self.tau_from_w(w);
                Ok((tau, -tau * w))
            }
            Regime::Decay => {
                let hi = self.d0().ln();
                let g = |l: f64| self.t_decay_branch(l.exp()).unwrap_or(f64::NAN) - t;
                let mut lo = hi - 1.0;
                let mut step = 1.0;
                while g(lo) < 0.0 {
                    step *= 2.0;
                    lo = hi - step;
                    if lo < -700.0 {
                        return Err(Error::Root(format!("tau underflows before t = {t}")));
                    }
                }
                let l = find_root(g, lo, hi, f_tol)?;
                let d = l.exp();
                let tau = self.tau_from_d(d);
                Ok((tau, -tau * self.w_from_d(d)))
            }
        }
    }

    pub fn tau_of_t(&self, t: f64) -> Result<f64> {
        Ok(self.state_at(t)?.0)
    }

    /// Time at which `τ` is reached on the expanding branch `τ̇ = +τ²√F(τ)`.
    ///
    /// This is the evaluation of `t(τ) = ∫₁^τ ds / (s²√(4γ₀s + c))`; for
    /// `α₀ ≤ 0` it inverts [`TauSolver::tau_of_t`]. `τ = ∞` is accepted and
    /// gives the blow-up time.
    pub fn t_of_tau(&self, tau: f64) -> Result<f64> {
        if !(tau > 0.0) {
            return Err(domain(format!("tau must be > 0 (got {tau})")));
        }
        if tau == 1.0 {
            return Ok(0.0);
        }
        let g = self.gamma0;
        let c = self.c;
        let lo = tau.min(1.0);
        let hi = tau.max(1.0);
        let f_at = |s: f64| 4.0 * g * s + c;
        let f_min = if g > 0.0 { f_at(lo) } else { f_at(hi) };
        if f_min < 0.0 || (hi.is_infinite() && g < 0.0) {
            return Err(domain(format!(
                "tau = {tau} is not reached: 4 gamma0 tau + c changes sign on the way"
            )));
        }
        if self.degenerate {
            // ∫_{1/τ}^{1} √u / √(4γ₀ + cu) du
            let v = integrate_gk(|u: f64| (u / (4.0 * g + c * u)).sqrt(), 1.0 / tau, 1.0, QUAD_TOL, 0.0)?;
            return Ok(v);
        }
        let a0 = self.alpha0.abs();
        let b = self.b;
        // S = √(4γ₀τ + c); the rational part is (|α₀|τ − S)/(τc).
        let (rational, s) = if tau.is_infinite() {
            (a0 / c, f64::INFINITY)
        } else {
            let s = f_at(tau).sqrt();
            ((a0 * tau - s) / (tau * c), s)
        };
        let transc = |x: f64| -> f64 {
            if c > 0.0 {
                // ½ ln|(1 + x)/(1 − x)| at x = S/√c, real on both sides of 1.
                if x.is_infinite() {
                    0.0
                } else {
                    0.5 * ((1.0 + x) / (1.0 - x)).abs().ln()
                }
            } else {
                x.atan()
            }
        };
        let b3 = b * b * b;
        Ok(rational + 4.0 * g * (transc(s / b) - transc(a0 / b)) / b3)
    }
}

pub fn t_of_tau(tau: f64, alpha0: f64, gamma0: f64) -> Result<f64> {
    TauSolver::new(alpha0, gamma0)?.t_of_tau(tau)
}

pub fn tau_of_t(t: f64, alpha0: f64, gamma0: f64) -> Result<f64> {
    TauSolver::new(alpha0, gamma0)?.tau_of_t(t)
}

/// `(α, γ, ζ)` of the parity-symmetric solution at time `t`.
pub fn symmetric_solution(t: f64, alpha0: f64, gamma0: f64, zeta0: f64) -> Result<SymState3> {
    if t == 0.0 {
        return Ok(SymState3::new(alpha0, gamma0, zeta0));
    }
    let (tau, alpha) = TauSolver::new(alpha0, gamma0)?.state_at(t)?;
    Ok(SymState3::new(alpha, gamma0 * tau * tau * tau, zeta0 * tau))
}

/// Full five-field solution through the vertex chart.
pub fn full_solution(t: f64, s0: &State5) -> Result<State5> {
    full_solution_with(&TauSolver::new(s0.alpha, s0.gamma)?, t, s0)
}

/// [`full_solution`] reusing a prepared [`TauSolver`] for `(s0.alpha, s0.gamma)`.
pub fn full_solution_with(solver: &TauSolver, t: f64, s0: &State5) -> Result<State5> {
    if solver.alpha0 != s0.alpha || solver.gamma0 != s0.gamma {
        return Err(Error::Invalid("solver built for different (alpha0, gamma0)".into()));
    }
    if t == 0.0 {
        return Ok(*s0);
    }
    let v0 = s0.to_vertex()?;
    let (tau, alpha) = solver.state_at(t)?;
    let v = VertexState {
        alpha,
        gamma: s0.gamma * tau * tau * tau,
        xi: v0.xi + v0.delta * t,
        mu: v0.mu * tau,
        delta: v0.delta,
    };
    State5::from_vertex(&v)
}

/// Blow-up time `π/(4√γ₀)` of the data `α₀ = β₀ = 0`, `γ₀ > 0`.
pub fn blowup_time(gamma0: f64) -> Result<f64> {
    if !(gamma0 > 0.0) || !gamma0.is_finite() {
        return Err(Error::Unsupported(format!(
            "closed-form blow-up time needs gamma0 > 0 (got {gamma0})"
        )));
    }
    Ok(std::f64::consts::FRAC_PI_4 / gamma0.sqrt())
}

/// `ln(1 + x)/x`, continuous at 0.
fn psi(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x / 2.0
    } else {
        x.ln_1p() / x
    }
}

/// `(x − ln(1 + x))/x²`, continuous at 0.
fn phi(x: f64) -> f64 {
    if x.abs() < 0.1 {
        // Σ (−x)^k / (k + 2)
        let mut acc = 0.0;
        let mut p = 1.0;
        for k in 0..24 {
            acc += p / (k as f64 + 2.0);
            p *= -x;
        }
        acc
    } else {
        (x - x.ln_1p()) / (x * x)
    }
}

/// Solution of the linear-linear flow at time `t` (requires `1 + α₀t > 0`).
///
/// With `E = 1 + α₀t`:
///
/// ```text
/// α = α₀/E,  ω = ω₀/E²,  β = (β₀ − ω₀ ln(E)/α₀)/E,
/// ζ = ζ₀/E − β₀ω₀t/E² + ω₀²(α₀t − ln E)/(α₀²E²)
/// ```
///
/// evaluated in a form that stays accurate as `α₀ → 0`.
pub fn linear_solution(t: f64, s0: &LinearState) -> Result<LinearState> {
    if t == 0.0 {
        return Ok(*s0);
    }
    let LinearState {
        alpha: a0,
        zeta: z0,
        omega: w0,
        beta: b0,
    } = *s0;
    let x = a0 * t;
    let e = 1.0 + x;
    if !(e > 0.0) {
        return Err(Error::OutOfDomain {
            t,
            blowup: if a0 < 0.0 { Some(-1.0 / a0) } else { None },
        });
    }
    let e2 = e * e;
    Ok(LinearState {
        alpha: a0 / e,
        zeta: z0 / e - b0 * w0 * t / e2 + w0 * w0 * t * t * phi(x) / e2,
        omega: w0 / e2,
        beta: (b0 - w0 * t * psi(x)) / e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{vf_x3, vf_x4};
    use crate::integrate::{solve, IntegratorOptions};
    use std::f64::consts::{FRAC_PI_4, PI};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn tau_initial_and_blowup_examples() {
        assert_eq!(t_of_tau(1.0, 0.3, 1.0).unwrap(), 0.0);
        assert_eq!(tau_of_t(0.0, 0.3, 1.0).unwrap(), 1.0);
        let ts = TauSolver::new(0.0, 1.0).unwrap();
        assert!((ts.blowup_time().unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!((ts.t_of_tau(f64::INFINITY).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!((ts.t_of_tau(1e12).unwrap() - FRAC_PI_4).abs() < 1e-8);
        assert!((blowup_time(1.0).unwrap() - FRAC_PI_4).abs() < 1e-16);
        assert!((blowup_time(4.0).unwrap() - PI / 8.0).abs() < 1e-16);
        assert!(matches!(blowup_time(-1.0), Err(Error::Unsupported(_))));
        assert!(TauSolver::new(0.5, 0.0).is_err());
    }

    #[test]
    fn t_of_tau_derivative_matches_ode() {
        for &(a0, g0) in &[(0.0, 1.0), (-1.0, 0.5), (-3.0, 1.0), (0.5, -1.0), (-2.0, 1.0)] {
            let ts = TauSolver::new(a0, g0).unwrap();
            for &tau in &[1.1, 1.5, 2.0, 0.9] {
                let h = 1e-5;
                let (Ok(p), Ok(m)) = (ts.t_of_tau(tau + h), ts.t_of_tau(tau - h)) else {
                    continue;
                };
                let fd = (p - m) / (2.0 * h);
                let c = a0 * a0 - 4.0 * g0;
                let exact = 1.0 / (4.0 * g0 * tau.powi(5) + c * tau.powi(4)).sqrt();
                assert!(rel(fd, exact) < 1e-7, "a0={a0} g0={g0} tau={tau}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn t_of_tau_matches_quadrature() {
        for &(a0, g0) in &[(0.0, 1.0), (-1.0, 0.2), (-3.0, 1.0), (-2.0, 1.0), (-2.0001, 1.0)] {
            let ts = TauSolver::new(a0, g0).unwrap();
            for &tau in &[1.3f64, 4.0, 20.0] {
                // s = 1 + r² removes the endpoint singularity when α₀ = 0.
                let q = integrate_gk(
                    |r: f64| {
                        let s = 1.0 + r * r;
                        2.0 * r / (s * s * (a0 * a0 + 4.0 * g0 * r * r).sqrt())
                    },
                    0.0,
                    (tau - 1.0).sqrt(),
                    1e-14,
                    0.0,
                )
                .unwrap();
                assert!(rel(ts.t_of_tau(tau).unwrap(), q) < 1e-12, "a0={a0} tau={tau}");
            }
        }
    }

    #[test]
    fn tau_round_trip_on_expanding_branch() {
        let ts = TauSolver::new(0.0, 1.0).unwrap();
        let t = 0.9 * FRAC_PI_4;
        let tau = ts.tau_of_t(t).unwrap();
        assert!(tau > 2.0, "{tau}");
        let back = ts.t_of_tau(tau).unwrap();
        assert!((back - t).abs() < 1e-10, "{back} vs {t}");
        for &(a0, g0) in &[(-1.0, 0.5), (-3.0, 2.0), (-2.0, 1.0), (-2.00001, 1.0)] {
            let ts = TauSolver::new(a0, g0).unwrap();
            for t in [0.01, 0.1, 0.5] {
                if ts.blowup_time().is_some_and(|b| t >= b) {
                    continue;
                }
                let tau = ts.tau_of_t(t).unwrap();
                assert!((ts.t_of_tau(tau).unwrap() - t).abs() < 1e-10, "a0={a0} t={t}");
            }
        }
    }

    #[test]
    fn beyond_blowup_is_out_of_domain() {
        match tau_of_t(1.0, 0.0, 1.0) {
            Err(Error::OutOfDomain { blowup: Some(b), .. }) => assert!((b - FRAC_PI_4).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        assert!(tau_of_t(-0.1, 0.0, 1.0).is_err());
    }

    fn x3_reference(a0: f64, g0: f64, z0: f64, t: f64) -> [f64; 3] {
        let sol = solve(
            |y, d| d.copy_from_slice(&vf_x3(&SymState3::new(y[0], y[1], y[2]))),
            &[a0, g0, z0],
            t,
            &IntegratorOptions::adaptive(1e-13),
        )
        .unwrap();
        let y = sol.last().1;
        [y[0], y[1], y[2]]
    }

    #[test]
    fn symmetric_solution_matches_rk_in_all_regimes() {
        let cases = [
            (0.0, 1.0, 1.0, 0.7),    // blow-up, c < 0
            (0.8, 1.0, -0.5, 1.0),   // turns around, c < 0
            (-3.0, 1.0, 1.0, 0.1),   // blow-up, c > 0
            (3.0, 1.0, 1.0, 2.0),    // decay, c > 0
            (0.5, -1.0, 1.0, 3.0),   // γ₀ < 0
            (-0.3, -2.0, 0.4, 2.0),  // γ₀ < 0
            (2.0, 1.0, 1.0, 1.5),    // c = 0, decay
            (-2.0, 1.0, 1.0, 0.2),   // c = 0, blow-up
            (2.0004, 1.0, 1.0, 1.0), // near-degenerate decay
            (1.9996, 1.0, 1.0, 3.0), // near-degenerate, slow blow-up
        ];
        for (a0, g0, z0, t) in cases {
            let cf = symmetric_solution(t, a0, g0, z0).unwrap().to_array();
            let rk = x3_reference(a0, g0, z0, t);
            for i in 0..3 {
                assert!(rel(cf[i], rk[i]) < 1e-8, "case {a0},{g0}: {cf:?} vs {rk:?}");
            }
        }
    }

    #[test]
    fn symmetric_solution_preserves_k2() {
        let (a0, g0) = (0.4, 1.3);
        let k2 = |a: f64, g: f64| a * a / g.cbrt().powi(2) - 4.0 * g.cbrt();
        let k = k2(a0, g0);
        for t in [0.1, 0.3, 0.5] {
            let s = symmetric_solution(t, a0, g0, 1.0).unwrap();
            assert!((k2(s.alpha, s.gamma) - k).abs() < 1e-9 * k.abs().max(1.0));
        }
    }

    #[test]
    fn full_solution_reduces_and_keeps_delta() {
        let s = full_solution(0.3, &State5::new(0.2, -1.0, 1.0, 0.0, 0.0)).unwrap();
        let r = symmetric_solution(0.3, 0.2, -1.0, 1.0).unwrap();
        assert!(rel(s.alpha, r.alpha) < 1e-15 && rel(s.gamma, r.gamma) < 1e-15 && rel(s.zeta, r.zeta) < 1e-15);
        assert!(s.omega.abs() < 1e-15 && s.beta.abs() < 1e-15);
        let s0 = State5::new(0.2, -1.0, 1.0, 0.3, 0.1);
        let d0 = s0.to_vertex().unwrap().delta;
        for t in [0.2, 0.7, 1.5] {
            let d = full_solution(t, &s0).unwrap().to_vertex().unwrap().delta;
            assert!((d - d0).abs() < 1e-14);
        }
    }

    #[test]
    fn linear_solution_limits_and_residual() {
        let s0 = LinearState::new(0.0, 0.5, 1.5, -0.3);
        let t = 0.8;
        let s = linear_solution(t, &s0).unwrap();
        assert_eq!(s.alpha, 0.0);
        assert_eq!(s.omega, 1.5);
        assert!((s.beta - (-0.3 - 1.5 * t)).abs() < 1e-15);
        assert!((s.zeta - (0.5 + 0.3 * 1.5 * t + 1.5 * 1.5 * t * t / 2.0)).abs() < 1e-15);
        assert_eq!(linear_solution(0.0, &s0).unwrap(), s0);
        assert!(matches!(
            linear_solution(2.0, &LinearState::new(-1.0, 0.0, 1.0, 0.0)),
            Err(Error::OutOfDomain { .. })
        ));

        // ODE residual by central differences in t.
        for s0 in [
            LinearState::new(0.7, 0.5, 1.5, -0.3),
            LinearState::new(-0.4, 1.0, -0.5, 0.8),
            LinearState::new(1e-9, 0.2, 0.9, 0.1),
        ] {
            for t in [0.3, 1.1] {
                let h = 1e-5;
                let p = linear_solution(t + h, &s0).unwrap().to_array();
                let m = linear_solution(t - h, &s0).unwrap().to_array();
                let v = vf_x4(&linear_solution(t, &s0).unwrap());
                for i in 0..4 {
                    let fd = (p[i] - m[i]) / (2.0 * h);
                    assert!((fd - v[i]).abs() < 1e-8, "{s0:?} t={t} i={i}: {fd} vs {}", v[i]);
                }
            }
        }
    }

    #[test]
    fn phi_series_matches_direct_form() {
        for x in [0.09, -0.09, 0.0999] {
            let direct = (x - f64::ln_1p(x)) / (x * x);
            assert!((phi(x) - direct).abs() < 1e-13);
        }
    }
}
