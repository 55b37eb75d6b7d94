//! Numerical verification of the bi-Hamiltonian structure.
//!
//! Brackets are `{A, B} = ∇A · P · ∇B`. Gradients of the conserved
//! quantities are analytic; gradients of inner brackets in the Jacobi
//! identity come from five-point central differences with step
//! `h = 1e−5 · max(1, |x_l|)`.
//!
//! Jacobi residuals are reported relative to `max|P| · max|∂P|`, the natural
//! size of the Schouten bracket, so that a single threshold applies across
//! the box regardless of how large the tensor entries are near a singular
//! locus.

use nalgebra::{SMatrix, SVector};
use serde::Serialize;

use super::auxiliary::{f_eval, g_eval, GUARD};
use super::tensors::{
    from_linear_chart, p1_matrix, p2_matrix, p3_matrix, q3_matrix, to_sym_chart, vf_x3_sigma, wedge, x4_chart,
    y4_chart, AuxChoice, Bivector5, P_f_matrix, Q_g_matrix,
};
use crate::dynamics::{vf_x_sigma, vf_y_sigma};
use crate::error::{domain, Result};
use crate::invariants::{grad_K, grad_h_sigma, MAX_H};
use crate::report::{Check, Report};
use crate::sampling::Sampler;
use crate::state::{LinearState, SigmaState};

/// Default tolerance for relative Jacobi residuals.
pub const JACOBI_TOL: f64 = 1e-5;
/// Tolerance for the Lenard–Magri identities (relative, analytic gradients).
pub const LENARD_TOL: f64 = 1e-9;
/// Tolerance for `{Kᵢ, Kⱼ}` (relative).
pub const K_INVOLUTION_TOL: f64 = 1e-10;
/// Tolerance for `{Hᵢ, Hⱼ}` (relative).
pub const H_INVOLUTION_TOL: f64 = 1e-8;
/// Tolerance for the characteristic equations of `f` and `g`.
pub const FG_TOL: f64 = 1e-6;
/// Multipliers of `Q_g` in the pencil `P_f + λ Q_g`.
pub const LAMBDAS: [f64; 4] = [-1.0, 0.5, 1.0, 2.0];

/// A scalar function known through its gradient.
pub trait ScalarField<const N: usize> {
    fn grad(&self, x: &[f64; N]) -> [f64; N];
}

/// The coordinate function `x ↦ x_k`.
#[derive(Clone, Copy, Debug)]
pub struct Coordinate(pub usize);

impl<const N: usize> ScalarField<N> for Coordinate {
    fn grad(&self, _x: &[f64; N]) -> [f64; N] {
        let mut e = [0.0; N];
        e[self.0] = 1.0;
        e
    }
}

/// A linear function `x ↦ c·x`.
#[derive(Clone, Copy, Debug)]
pub struct Linear<const N: usize>(pub [f64; N]);

impl<const N: usize> ScalarField<N> for Linear<N> {
    fn grad(&self, _x: &[f64; N]) -> [f64; N] {
        self.0
    }
}

/// Jacobiator value together with the sum of magnitudes of its terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiValue {
    pub residual: f64,
    pub scale: f64,
}

impl JacobiValue {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.residual
        } else {
            self.residual / self.scale
        }
    }
}

/// Tensor evaluated at a point and at `x ± h_l e_l` for every `l`.
struct Stencil<const N: usize> {
    x: [f64; N],
    p: SMatrix<f64, N, N>,
    h: [f64; N],
    /// Tensor at `x + k h_l e_l` for `k = −2, −1, 1, 2`.
    shifted: Vec<[SMatrix<f64, N, N>; 4]>,
}

const OFFSETS: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];
const WEIGHTS: [f64; 4] = [1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0];

impl<const N: usize> Stencil<N> {
    fn new<T>(tensor: &T, x: &[f64; N]) -> Result<Self>
    where
        T: Fn(&[f64; N]) -> Result<SMatrix<f64, N, N>>,
    {
        let p = tensor(x)?;
        let mut h = [0.0; N];
        let mut shifted = Vec::with_capacity(N);
        for l in 0..N {
            h[l] = 1e-5 * x[l].abs().max(1.0);
            let mut m = [p; 4];
            for (k, o) in OFFSETS.iter().enumerate() {
                let mut y = *x;
                y[l] += o * h[l];
                m[k] = tensor(&y)?;
            }
            shifted.push(m);
        }
        Ok(Self { x: *x, p, h, shifted })
    }

    fn shifted(&self, l: usize, d: f64) -> [f64; N] {
        let mut y = self.x;
        y[l] += d;
        y
    }

    /// `∇{G, H}` at the centre by five-point central differences.
    fn bracket_grad(&self, g: &dyn ScalarField<N>, k: &dyn ScalarField<N>) -> [f64; N] {
        let mut out = [0.0; N];
        for l in 0..N {
            let mut acc = 0.0;
            for (m, (o, w)) in OFFSETS.iter().zip(WEIGHTS).enumerate() {
                let y = self.shifted(l, o * self.h[l]);
                acc += w * bracket(&self.shifted[l][m], &g.grad(&y), &k.grad(&y));
            }
            out[l] = acc / self.h[l];
        }
        out
    }

    /// Largest entry of `∂_l P` over all `l`.
    fn derivative_amax(&self) -> f64 {
        let mut m = 0.0f64;
        for l in 0..N {
            let mut d = SMatrix::<f64, N, N>::zeros();
            for (k, w) in WEIGHTS.iter().enumerate() {
                d += self.shifted[l][k] * *w;
            }
            m = m.max(d.amax() / self.h[l]);
        }
        m
    }

    /// `{F, {G, H}}` and the sum of magnitudes of its terms.
    fn outer(&self, f: &dyn ScalarField<N>, g: &dyn ScalarField<N>, k: &dyn ScalarField<N>) -> (f64, f64) {
        let df = f.grad(&self.x);
        let dgh = self.bracket_grad(g, k);
        let mut v = 0.0;
        let mut s = 0.0;
        for a in 0..N {
            for b in 0..N {
                let t = df[a] * self.p[(a, b)] * dgh[b];
                v += t;
                s += t.abs();
            }
        }
        (v, s)
    }

    fn jacobi(&self, f: &dyn ScalarField<N>, g: &dyn ScalarField<N>, k: &dyn ScalarField<N>) -> JacobiValue {
        let (a, sa) = self.outer(f, g, k);
        let (b, sb) = self.outer(g, k, f);
        let (c, sc) = self.outer(k, f, g);
        JacobiValue {
            residual: (a + b + c).abs(),
            scale: sa + sb + sc,
        }
    }
}

/// `∇A · P · ∇B`.
pub fn bracket<const N: usize>(p: &SMatrix<f64, N, N>, da: &[f64; N], db: &[f64; N]) -> f64 {
    (SVector::from(*da).transpose() * p * SVector::from(*db))[(0, 0)]
}

/// `{F,{G,H}} + {G,{H,F}} + {H,{F,G}}` at `x`.
pub fn jacobi_residual<const N: usize, T>(
    tensor: &T,
    f: &dyn ScalarField<N>,
    g: &dyn ScalarField<N>,
    h: &dyn ScalarField<N>,
    x: &[f64; N],
) -> Result<JacobiValue>
where
    T: Fn(&[f64; N]) -> Result<SMatrix<f64, N, N>>,
{
    Ok(Stencil::new(tensor, x)?.jacobi(f, g, h))
}

/// Largest Jacobiator over all coordinate triples at `x`, divided by
/// `max|P| · max|∂P|` there.
pub fn jacobi_point<const N: usize, T>(tensor: &T, x: &[f64; N]) -> Result<f64>
where
    T: Fn(&[f64; N]) -> Result<SMatrix<f64, N, N>>,
{
    let st = Stencil::new(tensor, x)?;
    let mut worst = 0.0f64;
    for i in 0..N {
        for j in i + 1..N {
            for k in j + 1..N {
                let v = st.jacobi(&Coordinate(i), &Coordinate(j), &Coordinate(k));
                worst = worst.max(v.residual);
            }
        }
    }
    let scale = st.p.amax() * st.derivative_amax();
    Ok(if scale == 0.0 { worst } else { worst / scale })
}

/// Per-point relative Jacobi residuals; `None` where the tensor could not
/// be evaluated on the stencil.
pub fn jacobi_residuals<const N: usize, T>(tensor: &T, points: &[[f64; N]]) -> Vec<Option<f64>>
where
    T: Fn(&[f64; N]) -> Result<SMatrix<f64, N, N>>,
{
    points.iter().map(|x| jacobi_point(tensor, x).ok()).collect()
}

/// `P_f` as a function of the chart coordinates.
pub fn p_tensor(aux: AuxChoice) -> impl Fn(&[f64; 5]) -> Result<Bivector5> {
    move |x| P_f_matrix(&SigmaState::from_array(*x), &aux)
}

/// `Q_g` as a function of the chart coordinates.
pub fn q_tensor(aux: AuxChoice) -> impl Fn(&[f64; 5]) -> Result<Bivector5> {
    move |x| Q_g_matrix(&SigmaState::from_array(*x), &aux)
}

/// `P_f + λ Q_g`.
pub fn pencil(aux: AuxChoice, lambda: f64) -> impl Fn(&[f64; 5]) -> Result<Bivector5> {
    move |x| {
        let s = SigmaState::from_array(*x);
        Ok(P_f_matrix(&s, &aux)? + Q_g_matrix(&s, &aux)? * lambda)
    }
}

fn arrays(points: &[SigmaState]) -> Vec<[f64; 5]> {
    points.iter().map(|p| p.to_array()).collect()
}

/// `|M v − target|∞` relative to `max_i Σ_j |M_ij v_j| + |target|∞`.
fn relative_image<const N: usize>(m: &SMatrix<f64, N, N>, v: &[f64; N], target: &[f64; N]) -> f64 {
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    let mut tmax = 0.0f64;
    for i in 0..N {
        let mut acc = 0.0;
        let mut mag = 0.0;
        for j in 0..N {
            acc += m[(i, j)] * v[j];
            mag += (m[(i, j)] * v[j]).abs();
        }
        err = err.max((acc - target[i]).abs());
        scale = scale.max(mag);
        tmax = tmax.max(target[i].abs());
    }
    let denom = scale + tmax;
    if denom == 0.0 {
        err
    } else {
        err / denom
    }
}

const LENARD_NAMES: [&str; 6] = [
    "P dK0 = 0",
    "P dK1 = Y",
    "P dK2 = X",
    "Q dK0 = Y",
    "Q dK1 = X",
    "Q dK2 = 0",
];

/// Lenard–Magri identities with arbitrary tensor evaluators, so that
/// perturbed tensors can be fed through the same harness.
pub fn lenard_magri_check_with<P, Q>(points: &[SigmaState], p: P, q: Q) -> Report
where
    P: Fn(&SigmaState) -> Result<Bivector5>,
    Q: Fn(&SigmaState) -> Result<Bivector5>,
{
    let mut res: Vec<Vec<Option<f64>>> = (0..6).map(|_| Vec::with_capacity(points.len())).collect();
    for s in points {
        let vals = (|| -> Result<[f64; 6]> {
            let pm = p(s)?;
            let qm = q(s)?;
            let [d0, d1, d2] = grad_K(s)?;
            let x = vf_x_sigma(s);
            let y = vf_y_sigma(s);
            let z = [0.0; 5];
            Ok([
                relative_image(&pm, &d0, &z),
                relative_image(&pm, &d1, &y),
                relative_image(&pm, &d2, &x),
                relative_image(&qm, &d0, &y),
                relative_image(&qm, &d1, &x),
                relative_image(&qm, &d2, &z),
            ])
        })();
        for (k, r) in res.iter_mut().enumerate() {
            r.push(vals.as_ref().ok().map(|v| v[k]));
        }
    }
    let checks = LENARD_NAMES
        .iter()
        .zip(&res)
        .map(|(n, r)| Check::from_residuals(*n, LENARD_TOL, r))
        .collect();
    Report::new("lenard-magri", serde_json::json!({ "points": points.len() }), checks)
}

pub fn lenard_magri_check(points: &[SigmaState], aux: AuxChoice) -> Report {
    let mut r = lenard_magri_check_with(points, |s| P_f_matrix(s, &aux), |s| Q_g_matrix(s, &aux));
    r.parameters = serde_json::json!({ "points": points.len(), "aux": aux });
    r
}

/// Jacobi identity of `P_f` and `Q_g` separately.
pub fn jacobi_check(points: &[SigmaState], aux: AuxChoice, tol: f64) -> Report {
    let xs = arrays(points);
    let checks = vec![
        Check::from_residuals("jacobi P_f", tol, &jacobi_residuals(&p_tensor(aux), &xs)),
        Check::from_residuals("jacobi Q_g", tol, &jacobi_residuals(&q_tensor(aux), &xs)),
    ];
    Report::new(
        "jacobi",
        serde_json::json!({ "points": points.len(), "aux": aux, "residual": "relative" }),
        checks,
    )
}

/// Jacobi identity of the pencil `P_f + λ Q_g` for each `λ`.
pub fn compatibility_check(points: &[SigmaState], lambdas: &[f64], aux: AuxChoice, tol: f64) -> Report {
    let xs = arrays(points);
    let checks = lambdas
        .iter()
        .map(|&l| {
            Check::from_residuals(
                format!("jacobi P_f + {l} Q_g"),
                tol,
                &jacobi_residuals(&pencil(aux, l), &xs),
            )
        })
        .collect();
    Report::new(
        "compatibility",
        serde_json::json!({ "points": points.len(), "lambdas": lambdas, "aux": aux }),
        checks,
    )
}

/// `|{A, B}|` relative to the sum of magnitudes of its terms.
fn relative_bracket(m: &Bivector5, da: &[f64; 5], db: &[f64; 5]) -> f64 {
    let mut v = 0.0;
    let mut s = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            let t = da[i] * m[(i, j)] * db[j];
            v += t;
            s += t.abs();
        }
    }
    if s == 0.0 {
        0.0
    } else {
        v.abs() / s
    }
}

/// Pairwise brackets of the `K`s under both tensors and of `H₁..H₅`
/// (points with `κ ≥ 0` have no `H`s and fail the `H` checks).
pub fn bi_involution_check(points: &[SigmaState], aux: AuxChoice) -> Report {
    let mut kp = Vec::new();
    let mut kq = Vec::new();
    let mut hp = Vec::new();
    let mut hq = Vec::new();
    for s in points {
        let mats = P_f_matrix(s, &aux).and_then(|p| Ok((p, Q_g_matrix(s, &aux)?)));
        let kv = mats.as_ref().ok().and_then(|(p, q)| {
            let d = grad_K(s).ok()?;
            let mut a = 0.0f64;
            let mut b = 0.0f64;
            for i in 0..3 {
                for j in i + 1..3 {
                    a = a.max(relative_bracket(p, &d[i], &d[j]));
                    b = b.max(relative_bracket(q, &d[i], &d[j]));
                }
            }
            Some((a, b))
        });
        kp.push(kv.map(|v| v.0));
        kq.push(kv.map(|v| v.1));
        let hv = mats.as_ref().ok().and_then(|(p, q)| {
            let d: Vec<_> = (1..=MAX_H).map(|n| grad_h_sigma(s, n)).collect::<Result<_>>().ok()?;
            let mut a = 0.0f64;
            let mut b = 0.0f64;
            for i in 0..d.len() {
                for j in i + 1..d.len() {
                    a = a.max(relative_bracket(p, &d[i], &d[j]));
                    b = b.max(relative_bracket(q, &d[i], &d[j]));
                }
            }
            Some((a, b))
        });
        hp.push(hv.map(|v| v.0));
        hq.push(hv.map(|v| v.1));
    }
    Report::new(
        "bi-involution",
        serde_json::json!({ "points": points.len(), "aux": aux }),
        vec![
            Check::from_residuals("{K_i, K_j}_P", K_INVOLUTION_TOL, &kp),
            Check::from_residuals("{K_i, K_j}_Q", K_INVOLUTION_TOL, &kq),
            Check::from_residuals("{H_i, H_j}_P", H_INVOLUTION_TOL, &hp),
            Check::from_residuals("{H_i, H_j}_Q", H_INVOLUTION_TOL, &hq),
        ],
    )
}

/// Singular values of a 5×5 bivector in decreasing order.
pub fn singular_values(m: &Bivector5) -> [f64; 5] {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    [sv[0], sv[1], sv[2], sv[3], sv[4]]
}

/// Rank four of `P_f` and `Q_g`: the fourth singular value is above
/// `1e−8·s₁` and the fifth below `1e−10·s₁`.
pub fn rank_check(points: &[SigmaState], aux: AuxChoice) -> Report {
    let mut checks = Vec::new();
    for (name, is_p) in [("rank P_f = 4", true), ("rank Q_g = 4", false)] {
        let res: Vec<Option<f64>> = points
            .iter()
            .map(|s| {
                let m = if is_p { P_f_matrix(s, &aux) } else { Q_g_matrix(s, &aux) }.ok()?;
                let sv = singular_values(&m);
                // Both conditions folded into one number that must stay ≤ 1.
                Some((1e-8 * sv[0] / sv[3]).max(sv[4] / (1e-10 * sv[0])))
            })
            .collect();
        checks.push(Check::from_residuals(name, 1.0, &res));
    }
    Report::new(
        "rank",
        serde_json::json!({ "points": points.len(), "aux": aux }),
        checks,
    )
}

/// Five-point derivative of `h` along `v` at `p`.
///
/// `f` and `g` depend on `(α, σ)` only (`δ` is constant along `X`), so the
/// step moves each of those by at most `1e−4` of its own magnitude; a step
/// tied to the largest coordinate is too coarse next to `α = 0`, where `f`
/// varies on the scale of `α`.
fn directional(h: &dyn Fn(&[f64; 5]) -> Result<f64>, p: &[f64; 5], v: &[f64; 5]) -> Result<f64> {
    let mut step = f64::INFINITY;
    for k in [0usize, 1] {
        if v[k] != 0.0 {
            step = step.min(1e-4 * p[k].abs().max(GUARD) / v[k].abs());
        }
    }
    if !step.is_finite() {
        return Ok(0.0);
    }
    let at = |c: f64| -> Result<f64> {
        let mut q = *p;
        for i in 0..5 {
            q[i] += c * step * v[i];
        }
        h(&q)
    };
    Ok((at(-2.0)? - 8.0 * at(-1.0)? + 8.0 * at(1.0)? - at(2.0)?) / (12.0 * step))
}

/// `X(f) = σ²δ/(2α²)` and `X(g) = −1` by central differences along `X`.
///
/// Residuals are divided by `max(1, |target|, |X^α f_α| + |X^σ f_σ|)`.
pub fn fg_characteristic_check(points: &[SigmaState]) -> Report {
    let fx = |x: &[f64; 5]| f_eval(x[0], x[1], x[4]);
    let gx = |x: &[f64; 5]| g_eval(x[0], x[1]);
    let mut rf = Vec::new();
    let mut rg = Vec::new();
    for s in points {
        let p = s.to_array();
        let v = vf_x_sigma(s);
        let partial_mag = |h: &dyn Fn(&[f64; 5]) -> Result<f64>| -> Result<f64> {
            let mut m = 0.0;
            for k in [0usize, 1] {
                let mut e = [0.0; 5];
                e[k] = v[k];
                m += directional(h, &p, &e)?.abs();
            }
            Ok(m)
        };
        let target_f = s.sigma * s.sigma * s.delta / (2.0 * s.alpha * s.alpha);
        rf.push(
            (|| -> Result<f64> {
                let d = directional(&fx, &p, &v)?;
                let norm = 1f64.max(target_f.abs()).max(partial_mag(&fx)?);
                Ok((d - target_f).abs() / norm)
            })()
            .ok(),
        );
        rg.push(
            (|| -> Result<f64> {
                let d = directional(&gx, &p, &v)?;
                let norm = 1f64.max(partial_mag(&gx)?);
                Ok((d + 1.0).abs() / norm)
            })()
            .ok(),
        );
    }
    Report::new(
        "auxiliary characteristic equations",
        serde_json::json!({ "points": points.len() }),
        vec![
            Check::from_residuals("X(f) = sigma^2 delta / (2 alpha^2)", FG_TOL, &rf),
            Check::from_residuals("X(g) = -1", FG_TOL, &rg),
        ],
    )
}

/// Label of the `μ` convention used for the linear-linear pair.
pub const MU_CONVENTION: &str = "mu = zeta";

/// Points `(α, μ, H₁, H₂)` of the linear-linear chart, uniform in
/// `[−r, r]⁴` with `|α|, |H₁|` above the guard.
pub fn linear_chart_points(n: usize, seed: u64, radius: f64) -> Vec<[f64; 4]> {
    let mut s = Sampler::new(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = [
            s.uniform(-radius, radius),
            s.uniform(-radius, radius),
            s.uniform(-radius, radius),
            s.uniform(-radius, radius),
        ];
        if p[0].abs() > GUARD && p[2].abs() > GUARD {
            out.push(p);
        }
    }
    out
}

/// Restricted structures on the parity-symmetric slice and on the
/// linear-linear manifold.
///
/// `sym_points` must have `ω = δ = 0`; `linear_points` are given in the
/// original coefficients and converted with `μ = ζ`.
pub fn restricted_pairs(sym_points: &[SigmaState], linear_points: &[LinearState]) -> Result<Report> {
    let sym: Vec<[f64; 3]> = sym_points.iter().map(to_sym_chart).collect::<Result<_>>()?;
    let lin: Vec<[f64; 4]> = linear_points
        .iter()
        .map(super::tensors::to_linear_chart)
        .collect::<Result<_>>()?;
    for p in &lin {
        if p[0].abs() <= GUARD || p[2].abs() <= GUARD {
            return Err(domain("linear-linear point on alpha = 0 or H1 = 0"));
        }
    }
    Ok(restricted_pairs_in_charts(&sym, &lin))
}

/// As [`restricted_pairs`], with points already in the charts `(α, σ, κ)`
/// and `(α, μ, H₁, H₂)`.
pub fn restricted_pairs_in_charts(sym: &[[f64; 3]], lin: &[[f64; 4]]) -> Report {
    let e_k = [0.0, 0.0, 1.0];
    let zero3 = [0.0; 3];
    let dh = |p: &[f64; 3]| [2.0 * p[0] / (p[1] * p[1]), -2.0 * p[0] * p[0] / p[1].powi(3) - 4.0, 0.0];
    let mut r3: Vec<Vec<Option<f64>>> = vec![Vec::new(); 4];
    for p in sym {
        let vals = (|| -> Result<[f64; 4]> {
            let pm = p3_matrix(p)?;
            let qm = q3_matrix(p)?;
            let x3 = vf_x3_sigma(p);
            let d = dh(p);
            Ok([
                relative_image(&pm, &e_k, &zero3),
                relative_image(&pm, &d, &x3),
                relative_image(&qm, &e_k, &x3),
                relative_image(&qm, &d, &zero3),
            ])
        })();
        for (k, r) in r3.iter_mut().enumerate() {
            r.push(vals.as_ref().ok().map(|v| v[k]));
        }
    }
    let p3 = |x: &[f64; 3]| p3_matrix(x);
    let q3 = |x: &[f64; 3]| q3_matrix(x);
    let pencil3 = |x: &[f64; 3]| Ok(p3_matrix(x)? + q3_matrix(x)?);

    let e2 = [0.0, 0.0, 1.0, 0.0];
    let e3 = [0.0, 0.0, 0.0, 1.0];
    let mut r4: Vec<Vec<Option<f64>>> = vec![Vec::new(); 4];
    for p in lin {
        let vals = (|| -> Result<[f64; 4]> {
            let a = p1_matrix(p)?;
            let b = p2_matrix(p)?;
            let x = x4_chart(p);
            let y = y4_chart(p);
            Ok([
                relative_image(&a, &e2, &y),
                relative_image(&a, &e3, &x),
                relative_image(&b, &e2, &x),
                relative_image(&b, &e3, &y),
            ])
        })();
        for (k, r) in r4.iter_mut().enumerate() {
            r.push(vals.as_ref().ok().map(|v| v[k]));
        }
    }
    let p1 = |x: &[f64; 4]| p1_matrix(x);
    let p2 = |x: &[f64; 4]| p2_matrix(x);
    let pencil4 = |x: &[f64; 4]| Ok(p1_matrix(x)? + p2_matrix(x)?);

    let checks = vec![
        Check::from_residuals("P3 dkappa = 0", LENARD_TOL, &r3[0]),
        Check::from_residuals("P3 dH = X3", LENARD_TOL, &r3[1]),
        Check::from_residuals("Q3 dkappa = X3", LENARD_TOL, &r3[2]),
        Check::from_residuals("Q3 dH = 0", LENARD_TOL, &r3[3]),
        Check::from_residuals("jacobi P3", JACOBI_TOL, &jacobi_residuals(&p3, sym)),
        Check::from_residuals("jacobi Q3", JACOBI_TOL, &jacobi_residuals(&q3, sym)),
        Check::from_residuals("jacobi P3 + Q3", JACOBI_TOL, &jacobi_residuals(&pencil3, sym)),
        Check::from_residuals("P1 dH1 = Y4", LENARD_TOL, &r4[0]),
        Check::from_residuals("P1 dH2 = X4", LENARD_TOL, &r4[1]),
        Check::from_residuals("P2 dH1 = X4", LENARD_TOL, &r4[2]),
        Check::from_residuals("P2 dH2 = Y4", LENARD_TOL, &r4[3]),
        Check::from_residuals("jacobi P1", JACOBI_TOL, &jacobi_residuals(&p1, lin)),
        Check::from_residuals("jacobi P2", JACOBI_TOL, &jacobi_residuals(&p2, lin)),
        Check::from_residuals("jacobi P1 + P2", JACOBI_TOL, &jacobi_residuals(&pencil4, lin)),
    ];
    Report::new(
        "restricted pairs",
        serde_json::json!({
            "symmetric_points": sym.len(),
            "linear_points": lin.len(),
            "mu_convention": MU_CONVENTION,
        }),
        checks,
    )
}

/// Converts chart points back to coefficients on `γ = 0`.
pub fn linear_states(points: &[[f64; 4]]) -> Result<Vec<LinearState>> {
    points.iter().map(from_linear_chart).collect()
}

/// Generic points for the obstruction test: `|σ|, |δ| ≥ 0.5`.
pub const GENERIC_MARGIN: f64 = 0.5;

/// Summary of the Jacobi obstruction of `P′` (the tensor with `f ≡ 0`).
#[derive(Clone, Debug, Serialize)]
pub struct Obstruction {
    pub points: usize,
    pub above_threshold: usize,
    pub threshold: f64,
    pub min_residual: f64,
}

pub fn obstruction(points: &[SigmaState], threshold: f64) -> Obstruction {
    let t = p_tensor(AuxChoice::Constant { f: 0.0, g: 0.0 });
    let res = jacobi_residuals(&t, &arrays(points));
    let vals: Vec<f64> = res.iter().flatten().copied().collect();
    Obstruction {
        points: points.len(),
        above_threshold: vals.iter().filter(|v| **v > threshold).count(),
        threshold,
        min_residual: vals.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

/// `Y ∧ X` at a point, the direction in which `f` and `g` shift the tensors.
pub fn correction_direction(s: &SigmaState) -> Bivector5 {
    wedge(&vf_y_sigma(s), &vf_x_sigma(s))
}
