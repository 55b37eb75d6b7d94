//! The auxiliary scalars `f(α, σ, δ)` and `g(α, σ)` entering the Poisson
//! tensors.
//!
//! They are characteristic solutions of
//!
//! ```text
//! X(f) = (−α² − 2σ³) f_α − ασ f_σ = σ²δ/(2α²),
//! X(g) = (−α² − 2σ³) g_α − ασ g_σ = −1.
//! ```
//!
//! Writing `u = Δ/α²` with `Δ = α² − 4σ³` and
//!
//! ```text
//! R(u) = atanh(√u)/√u        0 < u < 1
//!      = ½ ln|(1+√u)/(1−√u)|/√u   u > 1
//!      = atan(√−u)/√−u      u < 0
//! ```
//!
//! the solutions used here are
//!
//! ```text
//! f = σ²δ B(u)/α³,   B(u) = (3/2 − u − (3/2)(1−u) R(u)) / u²,
//! g = −C(u)/α,       C(u) = (1 − (1−u) R(u)) / u.
//! ```
//!
//! On `Δ > 0` these coincide with the inverse-hyperbolic closed forms
//! `f = −6σ⁵δ L(α/√Δ)/Δ^{5/2} + σ²δ(8σ³+α²)/(2αΔ²)` and
//! `g = 4σ³ L(α/√Δ)/Δ^{3/2} − α/Δ`, `L(x) = ½ ln|(1+x)/(1−x)|`; on `Δ < 0`
//! they are the arctangent continuations shifted by multiples of
//! `sign(α)·σ⁵δ/|Δ|^{5/2}` and `sign(α)·σ³/|Δ|^{3/2}`, which are constant
//! along the flow. The shift makes `B` and `C` power series
//! `B = Σ 3uᵏ/((2k+3)(2k+5))`, `C = Σ 2uᵏ/((2k+1)(2k+3))` near `u = 0`, so
//! both functions are real-analytic across `Δ = 0` and singular only on
//! `α = 0` (and, for `B`, logarithmically at `σ = 0`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold for the singular-locus guards on `|α|`, `|σ|` and `|Δ|`.
pub const GUARD: f64 = 1e-10;

/// Sign of `Δ = α² − 4σ³`, naming the branch of the closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `Δ > 0`: inverse-hyperbolic form.
    Hyperbolic,
    /// `Δ < 0`: arctangent form.
    Trigonometric,
}

/// `Δ = α² − 4σ³`.
pub fn discriminant(alpha: f64, sigma: f64) -> f64 {
    alpha * alpha - 4.0 * sigma * sigma * sigma
}

pub fn branch(alpha: f64, sigma: f64) -> Branch {
    if discriminant(alpha, sigma) > 0.0 {
        Branch::Hyperbolic
    } else {
        Branch::Trigonometric
    }
}

const SERIES_RADIUS: f64 = 0.25;

fn series(u: f64, coeff: impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    let mut p = 1.0;
    for k in 0..40 {
        let term = coeff(k as f64) * p;
        acc += term;
        if term.abs() < 1e-18 * acc.abs() {
            break;
        }
        p *= u;
    }
    acc
}

/// `(1 − u)·R(u)` given `u` and `v = 1 − u` computed without cancellation.
fn v_times_r(u: f64, v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    if u > 0.0 {
        let r = u.sqrt();
        // (1+√u)/|1−√u| = (1+√u)²/|1−u|
        let ratio = (1.0 + r) * (1.0 + r) / v.abs();
        v * 0.5 * ratio.ln() / r
    } else {
        let r = (-u).sqrt();
        v * r.atan() / r
    }
}

fn b_of(u: f64, v: f64) -> f64 {
    if u.abs() < SERIES_RADIUS {
        series(u, |k| 3.0 / ((2.0 * k + 3.0) * (2.0 * k + 5.0)))
    } else {
        (1.5 - u - 1.5 * v_times_r(u, v)) / (u * u)
    }
}

fn c_of(u: f64, v: f64) -> f64 {
    if u.abs() < SERIES_RADIUS {
        series(u, |k| 2.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0)))
    } else {
        (1.0 - v_times_r(u, v)) / u
    }
}

fn guard(alpha: f64, sigma: f64) -> Result<(f64, f64)> {
    if !alpha.is_finite() || !sigma.is_finite() {
        return Err(Error::Singular("non-finite input".into()));
    }
    if alpha.abs() <= GUARD {
        return Err(Error::Singular(format!(
            "|alpha| = {:e} is on the alpha = 0 locus",
            alpha.abs()
        )));
    }
    let d = discriminant(alpha, sigma);
    if d.abs() <= GUARD {
        return Err(Error::Singular(format!("|alpha^2 - 4 sigma^3| = {:e}", d.abs())));
    }
    let a2 = alpha * alpha;
    Ok((d / a2, 4.0 * sigma * sigma * sigma / a2))
}

/// `f(α, σ, δ)`, solving `X(f) = σ²δ/(2α²)`.
pub fn f_eval(alpha: f64, sigma: f64, delta: f64) -> Result<f64> {
    let (u, v) = guard(alpha, sigma)?;
    if delta == 0.0 || sigma == 0.0 {
        return Ok(0.0);
    }
    Ok(sigma * sigma * delta * b_of(u, v) / (alpha * alpha * alpha))
}

/// `g(α, σ)`, solving `X(g) = −1`, i.e. `(α² + 2σ³) g_α + ασ g_σ = 1`.
pub fn g_eval(alpha: f64, sigma: f64) -> Result<f64> {
    let (u, v) = guard(alpha, sigma)?;
    Ok(-c_of(u, v) / alpha)
}

/// Reference transcription of the inverse-hyperbolic closed forms on
/// `Δ > 0`, used to pin the branch.
pub fn fg_hyperbolic_reference(alpha: f64, sigma: f64, delta: f64) -> Result<(f64, f64)> {
    let d = discriminant(alpha, sigma);
    if !(d > 0.0) {
        return Err(Error::Singular("hyperbolic reference needs Delta > 0".into()));
    }
    let x = alpha / d.sqrt();
    let l = 0.5 * ((1.0 + x) / (1.0 - x)).abs().ln();
    let s3 = sigma.powi(3);
    let f = -6.0 * sigma.powi(5) * delta * l / d.powf(2.5)
        + 0.5 * sigma * sigma * delta * (8.0 * s3 + alpha * alpha) / (alpha * d * d);
    let g = 4.0 * s3 * l / d.powf(1.5) - alpha / d;
    Ok((f, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `(X(f) − σ²δ/(2α²), X(g) + 1)` by central differences, relative to the
    /// magnitude of the terms.
    fn pde_residuals(a: f64, s: f64, d: f64) -> (f64, f64) {
        let xa = -a * a - 2.0 * s.powi(3);
        let xs = -a * s;
        let ha = 1e-6 * a.abs().max(1.0);
        let hs = 1e-6 * s.abs().max(1.0);
        let fa = (f_eval(a + ha, s, d).unwrap() - f_eval(a - ha, s, d).unwrap()) / (2.0 * ha);
        let fs = (f_eval(a, s + hs, d).unwrap() - f_eval(a, s - hs, d).unwrap()) / (2.0 * hs);
        let ga = (g_eval(a + ha, s).unwrap() - g_eval(a - ha, s).unwrap()) / (2.0 * ha);
        let gs = (g_eval(a, s + hs).unwrap() - g_eval(a, s - hs).unwrap()) / (2.0 * hs);
        let target = s * s * d / (2.0 * a * a);
        let rf = (xa * fa + xs * fs - target).abs() / (xa * fa).abs().max((xs * fs).abs()).max(target.abs()).max(1.0);
        let rg = (xa * ga + xs * gs + 1.0).abs() / (xa * ga).abs().max((xs * gs).abs()).max(1.0);
        (rf, rg)
    }

    #[test]
    fn characteristic_equations_hold_on_both_branches() {
        let pts = [
            (1.5, 0.4, 0.7),    // Δ > 0, σ > 0
            (0.8, -1.1, -0.3),  // Δ > 0, σ < 0
            (0.5, 1.0, 1.2),    // Δ < 0
            (-0.7, 0.9, -2.0),  // Δ < 0, α < 0
            (2.0, 1.0001, 0.5), // Δ ≈ 0⁻, series region
            (2.0, 0.9999, 0.5), // Δ ≈ 0⁺, series region
            (-2.5, 0.2, 1.0),
        ];
        for (a, s, d) in pts {
            let (rf, rg) = pde_residuals(a, s, d);
            assert!(rf < 1e-7 && rg < 1e-7, "({a},{s},{d}): {rf:e} {rg:e}");
        }
    }

    #[test]
    fn agrees_with_hyperbolic_transcription() {
        for (a, s, d) in [(1.5, 0.4, 0.7), (0.8, -1.1, -0.3), (-2.5, 0.2, 1.0), (3.0, 1.0, 2.0)] {
            let (fr, gr) = fg_hyperbolic_reference(a, s, d).unwrap();
            let f = f_eval(a, s, d).unwrap();
            let g = g_eval(a, s).unwrap();
            assert!((f - fr).abs() < 1e-12 * fr.abs().max(1.0), "{f} vs {fr}");
            assert!((g - gr).abs() < 1e-12 * gr.abs().max(1.0), "{g} vs {gr}");
        }
    }

    #[test]
    fn series_and_closed_form_join_smoothly() {
        for a in [1.0f64, -1.7] {
            for u in [0.2499999, 0.2500001, -0.2499999, -0.2500001] {
                // σ³ = α²(1 − u)/4
                let s = (a * a * (1.0 - u) / 4.0).cbrt();
                let ua = discriminant(a, s) / (a * a);
                let v = 1.0 - ua;
                let series_b = series(ua, |k| 3.0 / ((2.0 * k + 3.0) * (2.0 * k + 5.0)));
                let closed_b = (1.5 - ua - 1.5 * v_times_r(ua, v)) / (ua * ua);
                assert!((series_b - closed_b).abs() < 1e-13);
                let series_c = series(ua, |k| 2.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0)));
                let closed_c = (1.0 - v_times_r(ua, v)) / ua;
                assert!((series_c - closed_c).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn special_values() {
        assert_eq!(f_eval(1.3, 0.7, 0.0).unwrap(), 0.0);
        // σ = 0: g = −1/α, and α²g_α = 1.
        assert_eq!(g_eval(2.0, 0.0).unwrap(), -0.5);
        // σ → 0: f ≈ σ²δ/(2α³)
        let (a, d) = (1.3, 0.8);
        for s in [1e-2, 1e-3, -1e-3] {
            let f = f_eval(a, s, d).unwrap();
            let lead = s * s * d / (2.0 * a.powi(3));
            // next correction is O(σ⁵ ln|σ|)
            assert!((f - lead).abs() < 10.0 * s.powi(5).abs() * s.abs().ln().abs(), "{s}");
        }
        assert!(matches!(f_eval(0.0, 1.0, 1.0), Err(Error::Singular(_))));
        assert!(matches!(g_eval(2.0, 1.0), Err(Error::Singular(_))));
    }
}
