//! State charts for the parabolic/linear reduction and the fluid support.
//!
//! The reduced fields are
//!
//! ```text
//! η(x,t) = γ x² + ω x + ζ,    u(x,t) = α x + β
//! ```
//!
//! and [`State5`] stores the five coefficients in the order
//! `(α, γ, ζ, ω, β)`. Two alternative charts are provided:
//!
//! * [`SigmaState`] `(α, σ, κ, ω, δ)` in which the invariants `κ` and `δ`
//!   are coordinates;
//! * [`VertexState`] `(α, γ, ξ, μ, δ)` built on the vertex of the parabola,
//!   which rectifies the translation field.
//!
//! Fractional powers of γ use the real cube root: `σ = cbrt(γ)` is negative
//! for γ < 0 and `γ^{4/3}` means `σ⁴ ≥ 0`, `γ^{2/3}` means `σ²`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Coefficients `(α, γ, ζ, ω, β)` of a parabolic-linear field configuration.
///
/// The reduction requires `γ ≠ 0`; configurations with `γ = 0` are
/// [`LinearState`]s. The fields are plain data so vector fields can still be
/// evaluated on `γ = 0`, but every chart change rejects it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct State5 {
    pub alpha: f64,
    pub gamma: f64,
    pub zeta: f64,
    pub omega: f64,
    pub beta: f64,
}

/// Adapted chart `(α, σ, κ, ω, δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaState {
    pub alpha: f64,
    /// Real cube root of γ.
    pub sigma: f64,
    /// `−(ω² − 4γζ) / (4σ⁴)`.
    pub kappa: f64,
    pub omega: f64,
    /// Center-of-mass speed `β − αω/(2γ)`.
    pub delta: f64,
}

/// Vertex chart `(α, γ, ξ, μ, δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexState {
    pub alpha: f64,
    pub gamma: f64,
    /// Vertex abscissa `−ω/(2γ)`.
    pub xi: f64,
    /// Vertex height `ζ − ω²/(4γ)`.
    pub mu: f64,
    pub delta: f64,
}

/// Coefficients `(α, ζ, ω, β)` of a linear-linear configuration
/// `η = ωx + ζ`, `u = αx + β` (the invariant submanifold `γ = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearState {
    pub alpha: f64,
    pub zeta: f64,
    pub omega: f64,
    pub beta: f64,
}

/// Coefficients `(α, γ, ζ)` of a parity-symmetric configuration
/// `η = γx² + ζ`, `u = αx` (the invariant submanifold `ω = β = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymState3 {
    pub alpha: f64,
    pub gamma: f64,
    pub zeta: f64,
}

impl SymState3 {
    pub const fn new(alpha: f64, gamma: f64, zeta: f64) -> Self {
        Self { alpha, gamma, zeta }
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.alpha, self.gamma, self.zeta]
    }

    pub fn embed(&self) -> State5 {
        State5::new(self.alpha, self.gamma, self.zeta, 0.0, 0.0)
    }
}

/// Open interval `(x_minus, x_plus)` on which η > 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportInterval {
    pub x_minus: f64,
    pub x_plus: f64,
}

impl SupportInterval {
    pub fn width(&self) -> f64 {
        self.x_plus - self.x_minus
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.x_minus + self.x_plus)
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.x_minus && x < self.x_plus
    }
}

impl State5 {
    pub const fn new(alpha: f64, gamma: f64, zeta: f64, omega: f64, beta: f64) -> Self {
        Self {
            alpha,
            gamma,
            zeta,
            omega,
            beta,
        }
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.alpha, self.gamma, self.zeta, self.omega, self.beta]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Checks the chart invariant `γ ≠ 0` and finiteness.
    pub fn validate(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(domain(format!("non-finite state {self:?}")));
        }
        if self.gamma == 0.0 {
            return Err(domain("gamma = 0 is the linear-linear manifold; use LinearState"));
        }
        Ok(())
    }

    /// Discriminant `ω² − 4γζ` of the height parabola.
    pub fn discriminant(&self) -> f64 {
        self.omega * self.omega - 4.0 * self.gamma * self.zeta
    }

    /// Field values `(η, u)` at position `x`.
    pub fn eval_fields(&self, x: f64) -> (f64, f64) {
        let eta = (self.gamma * x + self.omega) * x + self.zeta;
        let u = self.alpha * x + self.beta;
        (eta, u)
    }

    pub fn to_sigma(&self) -> Result<SigmaState> {
        self.validate()?;
        let sigma = self.gamma.cbrt();
        let s4 = sigma.powi(4);
        Ok(SigmaState {
            alpha: self.alpha,
            sigma,
            kappa: -self.discriminant() / (4.0 * s4),
            omega: self.omega,
            delta: self.beta - self.alpha * self.omega / (2.0 * self.gamma),
        })
    }

    pub fn from_sigma(s: &SigmaState) -> Result<State5> {
        if s.sigma == 0.0 || !s.sigma.is_finite() {
            return Err(domain("sigma = 0 has no parabolic preimage; use LinearState"));
        }
        let s3 = s.sigma.powi(3);
        Ok(State5 {
            alpha: s.alpha,
            gamma: s3,
            zeta: s.sigma * s.kappa + s.omega * s.omega / (4.0 * s3),
            omega: s.omega,
            beta: s.delta + s.alpha * s.omega / (2.0 * s3),
        })
    }

    pub fn to_vertex(&self) -> Result<VertexState> {
        self.validate()?;
        let xi = -self.omega / (2.0 * self.gamma);
        Ok(VertexState {
            alpha: self.alpha,
            gamma: self.gamma,
            xi,
            mu: self.zeta - self.omega * self.omega / (4.0 * self.gamma),
            delta: self.beta + self.alpha * xi,
        })
    }

    pub fn from_vertex(v: &VertexState) -> Result<State5> {
        if v.gamma == 0.0 || !v.gamma.is_finite() {
            return Err(domain("gamma = 0 has no vertex chart"));
        }
        let omega = -2.0 * v.gamma * v.xi;
        Ok(State5 {
            alpha: v.alpha,
            gamma: v.gamma,
            zeta: v.mu + v.gamma * v.xi * v.xi,
            omega,
            beta: v.delta - v.alpha * v.xi,
        })
    }

    /// Support `(x₋, x₊)` of the fluid, bounded by the dry floor `η = 0`.
    ///
    /// Only the physical branch `γ < 0`, `ω² − 4γζ > 0` is accepted.
    pub fn support_interval(&self) -> Result<SupportInterval> {
        if !self.is_finite() {
            return Err(domain("non-finite state"));
        }
        if self.gamma >= 0.0 {
            return Err(Error::Unsupported(format!(
                "support interval needs gamma < 0 (got {})",
                self.gamma
            )));
        }
        let disc = self.discriminant();
        if disc <= 0.0 {
            return Err(Error::Unsupported(format!(
                "support interval needs omega^2 - 4 gamma zeta > 0 (got {disc})"
            )));
        }
        // Cancellation-free pair of roots.
        let q = -0.5 * (self.omega + self.omega.signum() * disc.sqrt());
        let q = if self.omega == 0.0 { -0.5 * disc.sqrt() } else { q };
        let r1 = q / self.gamma;
        let r2 = self.zeta / q;
        Ok(SupportInterval {
            x_minus: r1.min(r2),
            x_plus: r1.max(r2),
        })
    }
}

impl SigmaState {
    pub const fn new(alpha: f64, sigma: f64, kappa: f64, omega: f64, delta: f64) -> Self {
        Self {
            alpha,
            sigma,
            kappa,
            omega,
            delta,
        }
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.alpha, self.sigma, self.kappa, self.omega, self.delta]
    }

    pub fn to_state(&self) -> Result<State5> {
        State5::from_sigma(self)
    }
}

impl VertexState {
    pub fn to_state(&self) -> Result<State5> {
        State5::from_vertex(self)
    }
}

impl LinearState {
    pub const fn new(alpha: f64, zeta: f64, omega: f64, beta: f64) -> Self {
        Self {
            alpha,
            zeta,
            omega,
            beta,
        }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.alpha, self.zeta, self.omega, self.beta]
    }

    /// Embeds into the five-field coefficients with `γ = 0`.
    pub fn embed(&self) -> State5 {
        State5::new(self.alpha, 0.0, self.zeta, self.omega, self.beta)
    }

    pub fn eval_fields(&self, x: f64) -> (f64, f64) {
        (self.omega * x + self.zeta, self.alpha * x + self.beta)
    }
}
