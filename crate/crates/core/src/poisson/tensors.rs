//! Explicit bivectors.
//!
//! All matrices use the wedge convention `(v ∧ w)^{ij} = vⁱwʲ − vʲwⁱ`. On
//! `M₅` with the adapted chart `(α, σ, κ, ω, δ)`:
//!
//! ```text
//! P_f = Y ∧ ∂_δ + X ∧ X_α − f · Y ∧ X,      X_α = σ²/(2α) ∂_α
//! Q_g = Y ∧ ∂_κ + X ∧ ∂_δ − g · Y ∧ X
//! ```
//!
//! which satisfy the Lenard–Magri chain `P dκ = 0, P dδ = Y, P dK₂ = X` and
//! `Q dκ = Y, Q dδ = X, Q dK₂ = 0` for any `f`, `g`; the choice of `f` and
//! `g` is what makes them Poisson and compatible.

use nalgebra::SMatrix;
use serde::{Deserialize, Serialize};

use super::auxiliary::{discriminant, f_eval, g_eval, GUARD};
use crate::dynamics::{vf_x_sigma, vf_y_sigma};
use crate::error::{domain, Error, Result};
use crate::state::{LinearState, SigmaState};

pub type Bivector5 = SMatrix<f64, 5, 5>;
pub type Bivector4 = SMatrix<f64, 4, 4>;
pub type Bivector3 = SMatrix<f64, 3, 3>;

/// `(v ∧ w)^{ij} = vⁱwʲ − vʲwⁱ`.
pub fn wedge<const N: usize>(v: &[f64; N], w: &[f64; N]) -> SMatrix<f64, N, N> {
    SMatrix::from_fn(|i, j| v[i] * w[j] - v[j] * w[i])
}

fn unit<const N: usize>(k: usize) -> [f64; N] {
    let mut e = [0.0; N];
    e[k] = 1.0;
    e
}

/// Which auxiliary functions to put into the tensors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AuxChoice {
    /// The characteristic solutions of [`super::auxiliary`].
    Exact,
    /// Constants in place of `f` and `g`.
    Constant { f: f64, g: f64 },
    /// The exact functions multiplied by constant factors.
    Scaled { f: f64, g: f64 },
}

impl AuxChoice {
    pub fn f(&self, alpha: f64, sigma: f64, delta: f64) -> Result<f64> {
        match *self {
            AuxChoice::Exact => f_eval(alpha, sigma, delta),
            AuxChoice::Constant { f, .. } => Ok(f),
            AuxChoice::Scaled { f, .. } => Ok(f * f_eval(alpha, sigma, delta)?),
        }
    }

    pub fn g(&self, alpha: f64, sigma: f64) -> Result<f64> {
        match *self {
            AuxChoice::Exact => g_eval(alpha, sigma),
            AuxChoice::Constant { g, .. } => Ok(g),
            AuxChoice::Scaled { g, .. } => Ok(g * g_eval(alpha, sigma)?),
        }
    }
}

fn guard(s: &SigmaState) -> Result<()> {
    let arr = s.to_array();
    if arr.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("non-finite point".into()));
    }
    if s.alpha.abs() <= GUARD || s.sigma.abs() <= GUARD {
        return Err(Error::Singular(format!(
            "alpha = {:e}, sigma = {:e} on a singular locus",
            s.alpha, s.sigma
        )));
    }
    if discriminant(s.alpha, s.sigma).abs() <= GUARD {
        return Err(Error::Singular("alpha^2 - 4 sigma^3 = 0".into()));
    }
    Ok(())
}

/// `X_α = σ²/(2α) ∂_α`.
fn x_alpha(s: &SigmaState) -> [f64; 5] {
    [s.sigma * s.sigma / (2.0 * s.alpha), 0.0, 0.0, 0.0, 0.0]
}

#[allow(non_snake_case)]
pub fn P_f_matrix(s: &SigmaState, aux: &AuxChoice) -> Result<Bivector5> {
    guard(s)?;
    let x = vf_x_sigma(s);
    let y = vf_y_sigma(s);
    let f = aux.f(s.alpha, s.sigma, s.delta)?;
    Ok(wedge(&y, &unit(4)) + wedge(&x, &x_alpha(s)) - wedge(&y, &x) * f)
}

#[allow(non_snake_case)]
pub fn Q_g_matrix(s: &SigmaState, aux: &AuxChoice) -> Result<Bivector5> {
    guard(s)?;
    let x = vf_x_sigma(s);
    let y = vf_y_sigma(s);
    let g = aux.g(s.alpha, s.sigma)?;
    Ok(wedge(&y, &unit(2)) + wedge(&x, &unit(4)) - wedge(&y, &x) * g)
}

/// Entry-wise form of `P_f`, kept separate from the wedge construction so
/// the two can be compared.
#[allow(non_snake_case)]
pub fn P_f_entries(s: &SigmaState, f: f64) -> Bivector5 {
    let SigmaState {
        alpha: a,
        sigma: sg,
        omega: w,
        delta: d,
        ..
    } = *s;
    let s2 = sg * sg;
    let s3 = s2 * sg;
    let mut m = Bivector5::zeros();
    m[(0, 1)] = s3 / 2.0;
    m[(0, 3)] = s3 * s2 * d / a + 1.5 * s2 * w - 2.0 * f * (2.0 * s3 + a * a) * s3;
    m[(1, 3)] = -2.0 * f * s3 * sg * a;
    m[(3, 4)] = 2.0 * s3;
    m - m.transpose()
}

/// Entry-wise form of `Q_g`.
#[allow(non_snake_case)]
pub fn Q_g_entries(s: &SigmaState, g: f64) -> Bivector5 {
    let SigmaState {
        alpha: a,
        sigma: sg,
        omega: w,
        delta: d,
        ..
    } = *s;
    let s3 = sg * sg * sg;
    let mut m = Bivector5::zeros();
    m[(0, 3)] = -2.0 * s3 * (a * a + 2.0 * s3) * g;
    m[(1, 3)] = -2.0 * a * s3 * sg * g;
    m[(0, 4)] = -2.0 * s3 - a * a;
    m[(1, 4)] = -a * sg;
    m[(2, 3)] = -2.0 * s3;
    m[(3, 4)] = -2.0 * d * s3 - 3.0 * a * w;
    m - m.transpose()
}

/// Restriction of `X` to the parity-symmetric slice in `(α, σ, κ)`.
pub fn vf_x3_sigma(p: &[f64; 3]) -> [f64; 3] {
    let (a, s) = (p[0], p[1]);
    [-a * a - 2.0 * s * s * s, -a * s, 0.0]
}

/// `P₃ = X₃ ∧ X_α` on `(α, σ, κ)`.
pub fn p3_matrix(p: &[f64; 3]) -> Result<Bivector3> {
    if p[0].abs() <= GUARD {
        return Err(Error::Singular("alpha = 0".into()));
    }
    let xa = [p[1] * p[1] / (2.0 * p[0]), 0.0, 0.0];
    Ok(wedge(&vf_x3_sigma(p), &xa))
}

/// `Q₃ = X₃ ∧ ∂_κ` on `(α, σ, κ)`.
pub fn q3_matrix(p: &[f64; 3]) -> Result<Bivector3> {
    Ok(wedge(&vf_x3_sigma(p), &unit(2)))
}

/// Projects a point of `M₅` onto the parity-symmetric slice; requires
/// `ω = δ = 0`.
pub fn to_sym_chart(s: &SigmaState) -> Result<[f64; 3]> {
    if s.omega != 0.0 || s.delta != 0.0 {
        return Err(domain("parity-symmetric points need omega = delta = 0"));
    }
    Ok([s.alpha, s.sigma, s.kappa])
}

/// Chart `(α, μ, H^l₁, H^l₂)` of the linear-linear manifold with the
/// convention `μ = ζ`, in which the two commuting fields become
///
/// ```text
/// X₄ = (−α², −2αμ − α³/H₁² + α²H₂/H₁, 0, 0),   Y₄ = (0, α²/H₁, 0, 0).
/// ```
pub fn to_linear_chart(s: &LinearState) -> Result<[f64; 4]> {
    if s.alpha == 0.0 || s.omega == 0.0 {
        return Err(domain("linear chart needs alpha != 0 and omega != 0"));
    }
    let LinearState {
        alpha: a,
        zeta: mu,
        omega: w,
        beta: b,
    } = *s;
    Ok([a, mu, a * a / w, a * mu / w - b + w / a])
}

pub fn from_linear_chart(p: &[f64; 4]) -> Result<LinearState> {
    let [a, mu, h1, h2] = *p;
    if a == 0.0 || h1 == 0.0 {
        return Err(domain("linear chart needs alpha != 0 and H1 != 0"));
    }
    Ok(LinearState {
        alpha: a,
        zeta: mu,
        omega: a * a / h1,
        beta: mu * h1 / a + a / h1 - h2,
    })
}

pub fn x4_chart(p: &[f64; 4]) -> [f64; 4] {
    let [a, mu, h1, h2] = *p;
    [
        -a * a,
        -2.0 * a * mu - a * a * a / (h1 * h1) + a * a * h2 / h1,
        0.0,
        0.0,
    ]
}

pub fn y4_chart(p: &[f64; 4]) -> [f64; 4] {
    [0.0, p[0] * p[0] / p[2], 0.0, 0.0]
}

fn linear_guard(p: &[f64; 4]) -> Result<()> {
    if p[0].abs() <= GUARD || p[2].abs() <= GUARD {
        return Err(Error::Singular("alpha = 0 or H1 = 0".into()));
    }
    Ok(())
}

/// `P₁ = Y₄ ∧ ∂_{H₁} + X₄ ∧ ∂_{H₂} − (1/α) Y₄ ∧ X₄`.
pub fn p1_matrix(p: &[f64; 4]) -> Result<Bivector4> {
    linear_guard(p)?;
    let x = x4_chart(p);
    let y = y4_chart(p);
    Ok(wedge(&y, &unit(2)) + wedge(&x, &unit(3)) - wedge(&y, &x) / p[0])
}

/// `P₂ = Y₄ ∧ ∂_{H₂} + X₄ ∧ ∂_{H₁} + (μ/α² + ln|α|/H₁²) Y₄ ∧ X₄`.
pub fn p2_matrix(p: &[f64; 4]) -> Result<Bivector4> {
    linear_guard(p)?;
    let x = x4_chart(p);
    let y = y4_chart(p);
    let c = p[1] / (p[0] * p[0]) + p[0].abs().ln() / (p[2] * p[2]);
    Ok(wedge(&y, &unit(3)) + wedge(&x, &unit(2)) + wedge(&y, &x) * c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::vf_x4;

    #[test]
    fn entries_match_wedge_form() {
        for s in [
            SigmaState::new(3.0, 1.0, 0.5, 0.2, 0.7),
            SigmaState::new(-0.4, 1.2, -0.3, 1.1, -0.9),
            SigmaState::new(1.7, -0.8, 2.0, -0.6, 0.4),
        ] {
            let f = f_eval(s.alpha, s.sigma, s.delta).unwrap();
            let g = g_eval(s.alpha, s.sigma).unwrap();
            let p = P_f_matrix(&s, &AuxChoice::Exact).unwrap();
            let q = Q_g_matrix(&s, &AuxChoice::Exact).unwrap();
            assert!((p - P_f_entries(&s, f)).amax() < 1e-13 * p.amax());
            assert!((q - Q_g_entries(&s, g)).amax() < 1e-13 * q.amax());
            assert_eq!(p + p.transpose(), Bivector5::zeros());
            assert_eq!(q + q.transpose(), Bivector5::zeros());
            for k in 0..5 {
                assert_eq!(p[(2, k)], 0.0);
                assert_eq!(p[(k, 2)], 0.0);
            }
        }
    }

    #[test]
    fn p_at_simple_point() {
        let s = SigmaState::new(3.0, 1.0, 0.0, 0.0, 0.0);
        let p = P_f_matrix(&s, &AuxChoice::Exact).unwrap();
        let mut expect = Bivector5::zeros();
        expect[(0, 1)] = 0.5;
        expect[(1, 0)] = -0.5;
        expect[(3, 4)] = 2.0;
        expect[(4, 3)] = -2.0;
        assert_eq!(p, expect);
        let dk2 = nalgebra::SVector::<f64, 5>::from([6.0, -22.0, 0.0, 0.0, 0.0]);
        let v = p * dk2;
        assert_eq!(v.as_slice(), &[-11.0, -3.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn singular_points_rejected() {
        let aux = AuxChoice::Exact;
        assert!(matches!(
            P_f_matrix(&SigmaState::new(0.0, 1.0, 0.0, 0.0, 0.0), &aux),
            Err(Error::Singular(_))
        ));
        assert!(matches!(
            P_f_matrix(&SigmaState::new(1.0, 0.0, 0.0, 0.0, 0.0), &aux),
            Err(Error::Singular(_))
        ));
        assert!(matches!(
            Q_g_matrix(&SigmaState::new(2.0, 1.0, 0.0, 0.0, 0.0), &aux),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn linear_chart_round_trip_and_fields() {
        let s = LinearState::new(0.7, 0.4, -1.3, 0.25);
        let p = to_linear_chart(&s).unwrap();
        let back = from_linear_chart(&p).unwrap();
        for (a, b) in back.to_array().iter().zip(s.to_array()) {
            assert!((a - b).abs() < 1e-14);
        }
        // Push-forward of X₄ (with μ̇ = ζ̇) through the chart map.
        let v = vf_x4(&s);
        let h = 1e-6;
        let mut fd = [0.0; 4];
        let base = s.to_array();
        for k in 0..4 {
            let mut a = base;
            let mut b = base;
            for i in 0..4 {
                a[i] += h * v[i];
                b[i] -= h * v[i];
            }
            let pa = to_linear_chart(&LinearState::from_array(a)).unwrap();
            let pb = to_linear_chart(&LinearState::from_array(b)).unwrap();
            fd[k] = (pa[k] - pb[k]) / (2.0 * h);
        }
        let x = x4_chart(&p);
        for k in 0..4 {
            assert!((fd[k] - x[k]).abs() < 1e-8, "{k}: {} vs {}", fd[k], x[k]);
        }
    }
}
