//! Reproducible random sampling of verification points.
//!
//! Uses the SplitMix64 generator; a uniform double in `[0, 1)` is built from
//! the top 53 bits of each 64-bit output, `(x >> 11) · 2⁻⁵³`, so a seed gives
//! the same points on every platform.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::state::SigmaState;

pub struct Sampler {
    rng: SplitMix64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: SplitMix64::seed_from_u64(seed),
        }
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Log-uniform magnitude in `[lo, hi]` with a random sign.
    pub fn signed_log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let m = (lo.ln() + (hi.ln() - lo.ln()) * self.unit()).exp();
        if self.unit() < 0.5 {
            -m
        } else {
            m
        }
    }
}

/// Sign of the discriminant `Δ = α² − 4σ³` of the auxiliary functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaSign {
    Positive,
    Negative,
}

impl DeltaSign {
    pub fn of(s: &SigmaState) -> Self {
        if s.alpha * s.alpha - 4.0 * s.sigma.powi(3) > 0.0 {
            DeltaSign::Positive
        } else {
            DeltaSign::Negative
        }
    }
}

/// Rules for drawing points of the adapted chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointSpec {
    /// Half-width of the box `[−r, r]⁵`.
    pub radius: f64,
    /// Minimum `|α|`, `|σ|` and `|Δ|`.
    pub guard: f64,
    /// Force `κ < 0` (so `K₀ > 0` and the `H`s are defined).
    pub negative_kappa: bool,
    /// Minimum `|σ|` and `|δ|`, keeping away from the loci where the
    /// Jacobi obstruction of the uncorrected tensor degenerates.
    pub generic_margin: f64,
}

impl Default for PointSpec {
    fn default() -> Self {
        Self {
            radius: 3.0,
            guard: 1e-10,
            negative_kappa: false,
            generic_margin: 0.0,
        }
    }
}

/// `n` points in `[−r, r]⁵` passing the guards, alternating the sign of Δ so
/// both branches are equally represented.
pub fn sigma_points(n: usize, seed: u64, spec: &PointSpec) -> Vec<SigmaState> {
    let mut s = Sampler::new(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let want = if out.len() % 2 == 0 {
            DeltaSign::Positive
        } else {
            DeltaSign::Negative
        };
        out.push(draw_branch(&mut s, spec, want));
    }
    out
}

/// `n` points all on one Δ branch.
pub fn sigma_points_on(n: usize, seed: u64, spec: &PointSpec, branch: DeltaSign) -> Vec<SigmaState> {
    let mut s = Sampler::new(seed);
    (0..n).map(|_| draw_branch(&mut s, spec, branch)).collect()
}

fn draw_branch(s: &mut Sampler, spec: &PointSpec, want: DeltaSign) -> SigmaState {
    let r = spec.radius;
    loop {
        let mut p = SigmaState::new(
            s.uniform(-r, r),
            s.uniform(-r, r),
            s.uniform(-r, r),
            s.uniform(-r, r),
            s.uniform(-r, r),
        );
        if spec.negative_kappa {
            p.kappa = -p.kappa.abs();
        }
        let disc = p.alpha * p.alpha - 4.0 * p.sigma.powi(3);
        if p.alpha.abs() > spec.guard
            && p.sigma.abs() > spec.guard
            && disc.abs() > spec.guard
            && p.sigma.abs() >= spec.generic_margin
            && p.delta.abs() >= spec.generic_margin
            && DeltaSign::of(&p) == want
        {
            return p;
        }
    }
}
