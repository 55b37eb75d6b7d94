//! Conserved quantities of the reduced flow.
//!
//! The ring of invariants of `X` and `Y` is generated by
//!
//! ```text
//! K₀ = (ω² − 4γζ)/γ^{4/3},   K₁ = β − αω/(2γ),   K₂ = α²/γ^{2/3} − 4γ^{1/3}
//! ```
//!
//! (real cube root; in the adapted chart `K₀ = −4κ`, `K₁ = δ`). The
//! integrals `Hₙ = ∫ hₙ(η, u) dx` of the polynomial conserved densities over
//! the fluid support are functions of the `K`s; both routes are provided so
//! they can be checked against each other.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::state::{LinearState, SigmaState, State5};

/// Values of the three generators, optionally with `H₁..H₅`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservedSet {
    #[serde(rename = "K0")]
    pub k0: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    #[serde(rename = "H", skip_serializing_if = "Option::is_none", default)]
    pub h: Option<[f64; 5]>,
}

/// Covector in a named chart.
pub type Gradient5 = [f64; 5];

/// Highest density index supported by the integration route.
pub const MAX_H: usize = 5;

#[allow(non_snake_case)]
pub fn K_values(s: &State5) -> Result<ConservedSet> {
    s.validate()?;
    let sg = s.gamma.cbrt();
    let s2 = sg * sg;
    Ok(ConservedSet {
        k0: s.discriminant() / (s2 * s2),
        k1: s.beta - s.alpha * s.omega / (2.0 * s.gamma),
        k2: s.alpha * s.alpha / s2 - 4.0 * sg,
        h: None,
    })
}

/// `(K₀, K₁, K₂)` evaluated in the adapted chart.
#[allow(non_snake_case)]
pub fn K_values_sigma(s: &SigmaState) -> Result<ConservedSet> {
    if s.sigma == 0.0 {
        return Err(domain("sigma = 0"));
    }
    Ok(ConservedSet {
        k0: -4.0 * s.kappa,
        k1: s.delta,
        k2: s.alpha * s.alpha / (s.sigma * s.sigma) - 4.0 * s.sigma,
        h: None,
    })
}

/// `K`s together with all five `H`s (requires `K₀ ≥ 0`).
pub fn conserved_set(s: &State5) -> Result<ConservedSet> {
    let mut c = K_values(s)?;
    let mut h = [0.0; 5];
    for (n, slot) in h.iter_mut().enumerate() {
        *slot = h_from_k(c.k0, c.k1, c.k2, n + 1)?;
    }
    c.h = Some(h);
    Ok(c)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_H {
        return Err(Error::Invalid(format!("H index must be in 1..=5 (got {n})")));
    }
    Ok(())
}

/// `Hₙ` as a function of `(K₀, K₁, K₂)`.
pub fn h_from_k(k0: f64, k1: f64, k2: f64, n: usize) -> Result<f64> {
    check_n(n)?;
    if k0 < 0.0 {
        return Err(domain(format!(
            "K0 = {k0} < 0: H{n} needs K0^(3/2) (nonphysical branch)"
        )));
    }
    let p = k0 * k0.sqrt();
    let k1s = k1 * k1;
    Ok(match n {
        1 => p / 6.0,
        2 => p * k1 / 6.0,
        3 => p * (k1s / 6.0 + k0 * k2 / 120.0),
        4 => p * k1 * (k1s / 6.0 + k0 * k2 / 40.0),
        _ => p * (k1s * k1s / 6.0 + k0 * k1s * k2 / 20.0 + k0 * k0 * k2 * k2 / 1120.0),
    })
}

/// Partial derivatives `∂Hₙ/∂(K₀, K₁, K₂)`.
pub fn h_partials(k0: f64, k1: f64, k2: f64, n: usize) -> Result<[f64; 3]> {
    check_n(n)?;
    if k0 <= 0.0 {
        return Err(domain(format!("K0 = {k0} <= 0: gradient of H{n} undefined")));
    }
    let r = k0.sqrt();
    let p = k0 * r;
    // d(K0^{3/2})/dK0
    let dp = 1.5 * r;
    let k1s = k1 * k1;
    Ok(match n {
        1 => [dp / 6.0, 0.0, 0.0],
        2 => [dp * k1 / 6.0, p / 6.0, 0.0],
        3 => {
            let q = k1s / 6.0 + k0 * k2 / 120.0;
            [dp * q + p * k2 / 120.0, p * k1 / 3.0, p * k0 / 120.0]
        }
        4 => {
            let q = k1s / 6.0 + k0 * k2 / 40.0;
            [
                dp * k1 * q + p * k1 * k2 / 40.0,
                p * (k1s / 2.0 + k0 * k2 / 40.0),
                p * k1 * k0 / 40.0,
            ]
        }
        _ => {
            let q = k1s * k1s / 6.0 + k0 * k1s * k2 / 20.0 + k0 * k0 * k2 * k2 / 1120.0;
            [
                dp * q + p * (k1s * k2 / 20.0 + k0 * k2 * k2 / 560.0),
                p * (2.0 * k1s * k1 / 3.0 + k0 * k1 * k2 / 10.0),
                p * (k0 * k1s / 20.0 + k0 * k0 * k2 / 560.0),
            ]
        }
    })
}

/// `Hₙ` through its representation in the `K`s.
#[allow(non_snake_case)]
pub fn H_values(s: &State5, n: usize) -> Result<f64> {
    let k = K_values(s)?;
    h_from_k(k.k0, k.k1, k.k2, n)
}

/// Polynomial in one variable, coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq)]
struct Poly(Vec<f64>);

impl Poly {
    fn mul(&self, o: &Poly) -> Poly {
        let mut c = vec![0.0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly(c)
    }

    fn scale(&self, k: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * k).collect())
    }

    fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let mut c = vec![0.0; n];
        for (i, v) in self.0.iter().enumerate() {
            c[i] += v;
        }
        for (i, v) in o.0.iter().enumerate() {
            c[i] += v;
        }
        Poly(c)
    }

    /// Exact integral over `[−r, r]`.
    fn integrate_symmetric(&self, r: f64) -> f64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 0)
            .map(|(k, c)| 2.0 * c * r.powi(k as i32 + 1) / (k as f64 + 1.0))
            .sum()
    }
}

/// Density `hₙ(η, u)` as a polynomial, given polynomials for η and u.
fn density(eta: &Poly, u: &Poly, n: usize) -> Poly {
    let u2 = u.mul(u);
    let eta2 = eta.mul(eta);
    match n {
        1 => eta.clone(),
        2 => eta.mul(u),
        3 => eta2.add(&eta.mul(&u2)),
        4 => eta2.mul(u).scale(3.0).add(&eta.mul(&u2).mul(u)),
        _ => eta2
            .mul(eta)
            .scale(2.0)
            .add(&eta2.mul(&u2).scale(6.0))
            .add(&eta.mul(&u2.mul(&u2))),
    }
}

/// Scalar density `hₙ(η, u)`.
pub fn density_value(eta: f64, u: f64, n: usize) -> Result<f64> {
    check_n(n)?;
    let u2 = u * u;
    Ok(match n {
        1 => eta,
        2 => eta * u,
        3 => eta * eta + eta * u2,
        4 => 3.0 * eta * eta * u + eta * u2 * u,
        _ => 2.0 * eta * eta * eta + 6.0 * eta * eta * u2 + eta * u2 * u2,
    })
}

/// `Hₙ = ∫ hₙ(η, u) dx` over the support, by exact antidifferentiation.
///
/// The polynomials are re-centered on the midpoint of the support so the
/// integral runs over a symmetric interval.
#[allow(non_snake_case)]
pub fn H_by_integration(s: &State5, n: usize) -> Result<f64> {
    check_n(n)?;
    let sup = s.support_interval()?;
    let m = sup.center();
    let r = 0.5 * sup.width();
    let eta = Poly(vec![
        (s.gamma * m + s.omega) * m + s.zeta,
        2.0 * s.gamma * m + s.omega,
        s.gamma,
    ]);
    let u = Poly(vec![s.alpha * m + s.beta, s.alpha]);
    Ok(density(&eta, &u, n).integrate_symmetric(r))
}

/// Natural magnitude of `Hₙ` at a physical state: `H₁·Mⁿ⁻¹` with
/// `M = max|u| + √(max η)` over the support.
///
/// Used as the comparison floor when `Hₙ` itself is near zero through
/// cancellation (e.g. `H₂ = H₁K₁` with `K₁ ≈ 0`).
pub fn h_scale(s: &State5, n: usize) -> Result<f64> {
    check_n(n)?;
    let sup = s.support_interval()?;
    let (eta_max, _) = s.eval_fields(sup.center());
    let umax = s
        .eval_fields(sup.x_minus)
        .1
        .abs()
        .max(s.eval_fields(sup.x_plus).1.abs());
    let m = umax + eta_max.max(0.0).sqrt();
    let h1 = H_by_integration(s, 1)?;
    Ok(h1 * m.powi(n as i32 - 1))
}

/// Gradients `(dκ, dδ, dK₂)` in the adapted chart `(α, σ, κ, ω, δ)`.
///
/// The first entry is the differential of `κ = −K₀/4`, the normalization
/// used as the zeroth member of the bi-Hamiltonian chain.
#[allow(non_snake_case)]
pub fn grad_K(s: &SigmaState) -> Result<[Gradient5; 3]> {
    if s.sigma == 0.0 || !s.sigma.is_finite() {
        return Err(domain("sigma = 0"));
    }
    let sg = s.sigma;
    Ok([
        [0.0, 0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0],
        [
            2.0 * s.alpha / (sg * sg),
            -2.0 * s.alpha * s.alpha / (sg * sg * sg) - 4.0,
            0.0,
            0.0,
            0.0,
        ],
    ])
}

/// Gradient of `Hₙ` in the adapted chart, by the chain rule through the `K`s.
pub fn grad_h_sigma(s: &SigmaState, n: usize) -> Result<Gradient5> {
    let k = K_values_sigma(s)?;
    let dh = h_partials(k.k0, k.k1, k.k2, n)?;
    let [dkappa, ddelta, dk2] = grad_K(s)?;
    let mut g = [0.0; 5];
    for i in 0..5 {
        // K₀ = −4κ
        g[i] = -4.0 * dh[0] * dkappa[i] + dh[1] * ddelta[i] + dh[2] * dk2[i];
    }
    Ok(g)
}

/// Gradients of `(K₀, K₁, K₂)` in the original chart `(α, γ, ζ, ω, β)`.
#[allow(non_snake_case)]
pub fn grad_K_state(s: &State5) -> Result<[Gradient5; 3]> {
    s.validate()?;
    let State5 {
        alpha: a,
        gamma: g,
        zeta: z,
        omega: w,
        ..
    } = *s;
    let sg = g.cbrt();
    let s2 = sg * sg;
    let s4 = s2 * s2;
    let k0 = s.discriminant() / s4;
    let dk0 = [
        0.0,
        -4.0 * z / s4 - 4.0 * k0 / (3.0 * g),
        -4.0 * g / s4,
        2.0 * w / s4,
        0.0,
    ];
    let dk1 = [-w / (2.0 * g), a * w / (2.0 * g * g), 0.0, -a / (2.0 * g), 1.0];
    let dk2 = [
        2.0 * a / s2,
        (-2.0 * a * a / (s2 * sg) - 4.0) / (3.0 * s2),
        0.0,
        0.0,
        0.0,
    ];
    Ok([dk0, dk1, dk2])
}

/// Constants of motion `(H^l₁, H^l₂, H^l₃)` of the linear-linear flow.
///
/// `mu` is the auxiliary coordinate entering `H^l₂`; the flow conserves
/// `H^l₂` exactly when `mu` evolves like `ζ`, so callers normally pass
/// `s.zeta`.
pub fn linear_invariants(s: &LinearState, mu: f64) -> Result<[f64; 3]> {
    if s.omega == 0.0 || s.alpha == 0.0 {
        return Err(domain("linear invariants need alpha != 0 and omega != 0"));
    }
    let LinearState {
        alpha: a,
        omega: w,
        beta: b,
        ..
    } = *s;
    Ok([a * a / w, a * mu / w - b + w / a, a * b / w - a.abs().ln()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{vf_x, vf_x_sigma, vf_y, vf_y_sigma};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn k_examples() {
        let k = K_values(&State5::new(0.0, 1.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!((k.k0, k.k1, k.k2), (-4.0, 0.0, -4.0));
        let k = K_values(&State5::new(2.0, 1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(k.k2, 0.0);
        assert!(K_values(&State5::new(2.0, 0.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn k_charts_agree() {
        let s = State5::new(0.3, -1.7, 0.9, 0.4, -0.2);
        let a = K_values(&s).unwrap();
        let b = K_values_sigma(&s.to_sigma().unwrap()).unwrap();
        assert!(rel(a.k0, b.k0) < 1e-14);
        assert!(rel(a.k1, b.k1) < 1e-14);
        assert!(rel(a.k2, b.k2) < 1e-14);
    }

    #[test]
    fn h_examples() {
        let s = State5::new(0.0, -1.0, 1.0, 0.0, 0.0);
        assert!(rel(H_values(&s, 1).unwrap(), 4.0 / 3.0) < 1e-15);
        assert!(rel(H_by_integration(&s, 1).unwrap(), 4.0 / 3.0) < 1e-15);
        let s = State5::new(0.0, -1.0, 1.0, 0.0, 2.0);
        assert!(rel(H_values(&s, 2).unwrap(), 8.0 / 3.0) < 1e-15);
        let s = State5::new(0.0, -1.3, 0.7, 0.4, 0.0);
        assert_eq!(H_by_integration(&s, 2).unwrap(), 0.0);
        assert!(matches!(
            H_values(&State5::new(0.0, 1.0, 1.0, 0.0, 0.0), 1),
            Err(Error::Domain(_))
        ));
        assert!(H_values(&s, 0).is_err());
        assert!(H_values(&s, 6).is_err());
    }

    #[test]
    fn integration_route_matches_representation() {
        let states = [
            State5::new(0.3, -1.0, 1.0, 0.2, 0.5),
            State5::new(-1.2, -0.4, 2.0, -0.8, 0.1),
            State5::new(2.0, -3.0, 0.3, 1.5, -1.0),
        ];
        for s in states {
            for n in 1..=5 {
                let a = H_values(&s, n).unwrap();
                let b = H_by_integration(&s, n).unwrap();
                let scale = h_scale(&s, n).unwrap().max(a.abs());
                assert!((a - b).abs() <= 1e-12 * scale, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn integration_against_midpoint_quadrature() {
        // Independent check of the antiderivative: composite Simpson on the support.
        let s = State5::new(0.7, -0.9, 1.1, 0.3, -0.4);
        let sup = s.support_interval().unwrap();
        let m = 2000;
        let h = sup.width() / m as f64;
        for n in 1..=5 {
            let mut acc = 0.0;
            for i in 0..=m {
                let x = sup.x_minus + i as f64 * h;
                let (eta, u) = s.eval_fields(x);
                let w = if i == 0 || i == m {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * density_value(eta, u, n).unwrap();
            }
            acc *= h / 3.0;
            let exact = H_by_integration(&s, n).unwrap();
            assert!((acc - exact).abs() < 1e-9 * h_scale(&s, n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn grad_k_examples() {
        let s = SigmaState::new(3.0, 1.0, 0.2, 0.1, 0.4);
        let g = grad_K(&s).unwrap();
        assert_eq!(g[0], [0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(g[1], [0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(g[2], [6.0, -22.0, 0.0, 0.0, 0.0]);
        assert!(grad_K(&SigmaState::new(1.0, 0.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn gradients_match_finite_differences() {
        let s = State5::new(0.6, -1.4, 0.8, 0.3, -0.5);
        let g = grad_K_state(&s).unwrap();
        let p = s.to_array();
        for i in 0..5 {
            let h = 1e-6 * p[i].abs().max(1.0);
            let mut a = p;
            let mut b = p;
            a[i] += h;
            b[i] -= h;
            let ka = K_values(&State5::from_array(a)).unwrap();
            let kb = K_values(&State5::from_array(b)).unwrap();
            let fd = [
                (ka.k0 - kb.k0) / (2.0 * h),
                (ka.k1 - kb.k1) / (2.0 * h),
                (ka.k2 - kb.k2) / (2.0 * h),
            ];
            for j in 0..3 {
                assert!((fd[j] - g[j][i]).abs() < 1e-6 * (1.0 + g[j][i].abs()));
            }
        }
    }

    #[test]
    fn h_gradient_matches_finite_differences() {
        let s = SigmaState::new(0.6, -1.1, -0.8, 0.3, -0.5);
        for n in 1..=5 {
            let g = grad_h_sigma(&s, n).unwrap();
            let p = s.to_array();
            for i in 0..5 {
                let h = 1e-6 * p[i].abs().max(1.0);
                let mut a = p;
                let mut b = p;
                a[i] += h;
                b[i] -= h;
                let f = |q: [f64; 5]| {
                    let k = K_values_sigma(&SigmaState::from_array(q)).unwrap();
                    h_from_k(k.k0, k.k1, k.k2, n).unwrap()
                };
                let fd = (f(a) - f(b)) / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-6 * (1.0 + g[i].abs()), "n={n} i={i}");
            }
        }
    }

    #[test]
    fn fields_annihilate_generators() {
        let s = State5::new(0.6, -1.4, 0.8, 0.3, -0.5);
        let g = grad_K_state(&s).unwrap();
        let x = vf_x(&s);
        let y = vf_y(&s);
        for dk in g {
            let dx: f64 = dk.iter().zip(x).map(|(a, b)| a * b).sum();
            let dy: f64 = dk.iter().zip(y).map(|(a, b)| a * b).sum();
            assert!(dx.abs() < 1e-13 && dy.abs() < 1e-13);
        }
        let ss = s.to_sigma().unwrap();
        let x = vf_x_sigma(&ss);
        let y = vf_y_sigma(&ss);
        for n in 1..=5 {
            let dh = grad_h_sigma(&SigmaState { kappa: -0.3, ..ss }, n).unwrap();
            let dx: f64 = dh.iter().zip(x).map(|(a, b)| a * b).sum();
            let dy: f64 = dh.iter().zip(y).map(|(a, b)| a * b).sum();
            assert!(dx.abs() < 1e-12 && dy.abs() < 1e-12);
        }
    }

    #[test]
    fn linear_invariant_examples() {
        let h = linear_invariants(&LinearState::new(2.0, 0.0, 4.0, 0.0), 0.0).unwrap();
        assert_eq!(h[0], 1.0);
        let h = linear_invariants(&LinearState::new(1.0, 0.3, 1.0, 0.0), 0.3).unwrap();
        assert_eq!(h[2], 0.0);
        assert!(linear_invariants(&LinearState::new(0.0, 0.0, 1.0, 0.0), 0.0).is_err());
        assert!(linear_invariants(&LinearState::new(1.0, 0.0, 0.0, 0.0), 0.0).is_err());
    }
}
