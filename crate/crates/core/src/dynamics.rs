//! Vector fields of the reduced system and the scaling symmetry.
//!
//! `X` is the time evolution of the coefficients and `Y` is the field
//! induced by translations `x ↦ x + c`. Both commute, and their flows
//! preserve the submanifolds `{ω = β = 0}` and `{γ = 0}`.

use crate::state::{LinearState, SigmaState, State5, SymState3};

/// Tangent vector in the component order of the chart it was computed in.
pub type Tangent5 = [f64; 5];

/// Evolution field `X` in `(α, γ, ζ, ω, β)` order.
pub fn vf_x(s: &State5) -> Tangent5 {
    let State5 {
        alpha: a,
        gamma: g,
        zeta: z,
        omega: w,
        beta: b,
    } = *s;
    [
        -a * a - 2.0 * g,
        -3.0 * a * g,
        -a * z - b * w,
        -2.0 * b * g - 2.0 * a * w,
        -a * b - w,
    ]
}

/// Translation field `Y` in `(α, γ, ζ, ω, β)` order.
pub fn vf_y(s: &State5) -> Tangent5 {
    [0.0, 0.0, s.omega, 2.0 * s.gamma, s.alpha]
}

/// `X` in the adapted chart `(α, σ, κ, ω, δ)`.
pub fn vf_x_sigma(s: &SigmaState) -> Tangent5 {
    let SigmaState {
        alpha: a,
        sigma: sg,
        omega: w,
        delta: d,
        ..
    } = *s;
    let s3 = sg * sg * sg;
    [-a * a - 2.0 * s3, -a * sg, 0.0, -3.0 * a * w - 2.0 * d * s3, 0.0]
}

/// `Y` in the adapted chart `(α, σ, κ, ω, δ)`.
pub fn vf_y_sigma(s: &SigmaState) -> Tangent5 {
    [0.0, 0.0, 0.0, 2.0 * s.sigma.powi(3), 0.0]
}

/// Restriction of `X` to the parity-symmetric submanifold, `(α, γ, ζ)` order.
pub fn vf_x3(s: &SymState3) -> [f64; 3] {
    let SymState3 {
        alpha: a,
        gamma: g,
        zeta: z,
    } = *s;
    [-a * a - 2.0 * g, -3.0 * a * g, -a * z]
}

/// Restriction of `X` to `γ = 0`, `(α, ζ, ω, β)` order.
pub fn vf_x4(s: &LinearState) -> [f64; 4] {
    let LinearState {
        alpha: a,
        zeta: z,
        omega: w,
        beta: b,
    } = *s;
    [-a * a, -a * z - b * w, -2.0 * a * w, -a * b - w]
}

/// Restriction of `Y` to `γ = 0`, `(α, ζ, ω, β)` order.
pub fn vf_y4(s: &LinearState) -> [f64; 4] {
    [0.0, s.omega, 0.0, s.alpha]
}

/// Action of the scaling symmetry `(η, u) ↦ (e^{2s} η(x e^{−s}), e^{s} u(x e^{−s}))`
/// on the coefficients.
pub fn lie_symmetry_action(s: &State5, sflow: f64) -> State5 {
    let e = sflow.exp();
    State5::new(s.alpha, s.gamma, e * e * s.zeta, e * s.omega, e * s.beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_examples() {
        assert_eq!(vf_x(&State5::new(0.0, 1.0, 1.0, 0.0, 0.0)), [-2.0, 0.0, 0.0, 0.0, 0.0]);
        // β̇ = −αβ − ω vanishes at β = ω = 0.
        assert_eq!(vf_x(&State5::new(1.0, 0.0, 0.0, 0.0, 0.0)), [-1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            vf_x(&State5::new(1.0, 1.0, 1.0, 1.0, 1.0)),
            [-3.0, -3.0, -2.0, -4.0, -2.0]
        );
    }

    #[test]
    fn y_examples() {
        assert_eq!(vf_y(&State5::new(0.0, 1.0, 1.0, 0.0, 0.0)), [0.0, 0.0, 0.0, 2.0, 0.0]);
        assert_eq!(vf_y(&State5::new(1.0, 0.0, 0.0, 3.0, 0.0)), [0.0, 0.0, 3.0, 0.0, 1.0]);
    }

    #[test]
    fn sigma_examples() {
        let s = SigmaState::new(3.0, 1.0, 0.7, 0.0, 0.0);
        assert_eq!(vf_x_sigma(&s), [-11.0, -3.0, 0.0, 0.0, 0.0]);
        let s = SigmaState::new(0.0, 1.0, 0.7, 1.0, 1.0);
        assert_eq!(vf_x_sigma(&s), [-2.0, 0.0, 0.0, -2.0, 0.0]);
    }

    #[test]
    fn restricted_fields() {
        assert_eq!(vf_x3(&SymState3::new(0.0, 1.0, 1.0)), [-2.0, 0.0, 0.0]);
        assert_eq!(vf_x4(&LinearState::new(1.0, 0.0, 0.0, 0.0)), [-1.0, 0.0, 0.0, 0.0]);
        assert_eq!(vf_x4(&LinearState::new(1.0, 2.0, 3.0, 4.0)), [-1.0, -14.0, -6.0, -7.0]);

        let s3 = SymState3::new(0.4, -1.3, 0.8);
        let full = vf_x(&s3.embed());
        let red = vf_x3(&s3);
        assert_eq!(&full[..3], &red[..]);
        assert_eq!((full[3], full[4]), (0.0, 0.0));

        let l = LinearState::new(0.4, 0.2, -0.7, 1.1);
        let full = vf_x(&l.embed());
        let red = vf_x4(&l);
        assert_eq!(full[1], 0.0);
        assert_eq!([full[0], full[2], full[3], full[4]], red);
        let fy = vf_y(&l.embed());
        assert_eq!([fy[0], fy[2], fy[3], fy[4]], vf_y4(&l));
    }

    #[test]
    fn symmetry_examples() {
        let s = State5::new(0.3, -1.0, 0.5, 0.2, -0.1);
        assert_eq!(lie_symmetry_action(&s, 0.0), s);
        let t = lie_symmetry_action(&State5::new(1.0, 1.0, 1.0, 1.0, 1.0), 2f64.ln());
        for (a, b) in t.to_array().iter().zip([1.0, 1.0, 4.0, 2.0, 2.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        let back = lie_symmetry_action(&lie_symmetry_action(&s, 0.7), -0.7);
        for (a, b) in back.to_array().iter().zip(s.to_array()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn symmetry_matches_field_substitution() {
        // e^{2s} η(x e^{-s}) and e^{s} u(x e^{-s}) re-expanded in x.
        let s = State5::new(0.3, -1.2, 0.5, 0.2, -0.1);
        let sf = 0.45;
        let t = lie_symmetry_action(&s, sf);
        for x in [-1.0, 0.2, 1.7] {
            let (eta, u) = s.eval_fields(x * (-sf).exp());
            let (eta_t, u_t) = t.eval_fields(x);
            assert!((eta_t - (2.0 * sf).exp() * eta).abs() < 1e-14);
            assert!((u_t - sf.exp() * u).abs() < 1e-14);
        }
    }

    #[test]
    fn x_and_y_commute() {
        // Lie bracket by nested central differences: [X,Y] = DY·X − DX·Y.
        let p = State5::new(0.3, -0.8, 0.6, 0.25, -0.4).to_array();
        let h = 1e-6;
        let jv = |f: &dyn Fn(&State5) -> Tangent5, v: &Tangent5| {
            let mut a = p;
            let mut b = p;
            for i in 0..5 {
                a[i] += h * v[i];
                b[i] -= h * v[i];
            }
            let fa = f(&State5::from_array(a));
            let fb = f(&State5::from_array(b));
            let mut out = [0.0; 5];
            for i in 0..5 {
                out[i] = (fa[i] - fb[i]) / (2.0 * h);
            }
            out
        };
        let s = State5::from_array(p);
        let a = jv(&vf_y, &vf_x(&s));
        let b = jv(&vf_x, &vf_y(&s));
        for i in 0..5 {
            assert!((a[i] - b[i]).abs() < 1e-8, "component {i}: {} vs {}", a[i], b[i]);
        }
    }
}
