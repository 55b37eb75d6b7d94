//! Coefficient hierarchy of symmetric power-series solutions
//!
//! ```text
//! η(x, t) = Σ η_m(t) x^{2m},    u(x, t) = Σ u_m(t) x^{2m+1},
//! ```
//!
//! truncated at order `N` with the closure `η_{N+1} ≡ 0`. The closure is
//! exact for data that stay polynomial of degree `2N` in `η`, such as the
//! parabolic reduction at `N = 1`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::integrate::{solve, IntegratorOptions, Termination};
use crate::state::SymState3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesState {
    pub eta: Vec<f64>,
    pub u: Vec<f64>,
}

impl SeriesState {
    pub fn new(eta: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if eta.len() != u.len() || eta.len() < 2 {
            return Err(Error::Invalid(format!(
                "need matching coefficient vectors of length >= 2 (got {} and {})",
                eta.len(),
                u.len()
            )));
        }
        if eta.iter().chain(&u).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite coefficient".into()));
        }
        Ok(Self { eta, u })
    }

    pub fn zeros(order: usize) -> Self {
        Self {
            eta: vec![0.0; order + 1],
            u: vec![0.0; order + 1],
        }
    }

    /// The parabolic state `η = ζ + γx²`, `u = αx` at truncation order `N`.
    pub fn from_parabolic(s: &SymState3, order: usize) -> Result<Self> {
        let mut out = Self::zeros(order.max(1));
        out.eta[0] = s.zeta;
        out.eta[1] = s.gamma;
        out.u[0] = s.alpha;
        Ok(out)
    }

    pub fn order(&self) -> usize {
        self.eta.len() - 1
    }

    fn to_vec(&self) -> Vec<f64> {
        self.eta.iter().chain(&self.u).copied().collect()
    }

    fn from_slice(y: &[f64]) -> Self {
        let n = y.len() / 2;
        Self {
            eta: y[..n].to_vec(),
            u: y[n..].to_vec(),
        }
    }

    /// `(η(x), u(x))` from the truncated series.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let x2 = x * x;
        let mut eta = 0.0;
        let mut u = 0.0;
        for m in (0..=self.order()).rev() {
            eta = eta * x2 + self.eta[m];
            u = u * x2 + self.u[m];
        }
        (eta, u * x)
    }
}

/// Time derivatives of the coefficients:
///
/// ```text
/// η̇_m = −(2m+1) Σ_{i+j=m} η_i u_j
/// u̇_m = −Σ_{i+j=m} (2j+1) u_i u_j − 2(m+1) η_{m+1}
/// ```
pub fn hierarchy_rhs(s: &SeriesState) -> SeriesState {
    let n = s.order();
    let mut out = SeriesState::zeros(n);
    for m in 0..=n {
        let mut a = 0.0;
        let mut b = 0.0;
        for i in 0..=m {
            let j = m - i;
            a += s.eta[i] * s.u[j];
            b += (2 * j + 1) as f64 * s.u[i] * s.u[j];
        }
        let next = if m < n { s.eta[m + 1] } else { 0.0 };
        out.eta[m] = -((2 * m + 1) as f64) * a;
        out.u[m] = -b - 2.0 * (m + 1) as f64 * next;
    }
    out
}

/// A coefficient of the series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Coef {
    Eta(usize),
    U(usize),
}

/// `coeff · Π factors`, factors sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Monomial {
    pub coeff: i64,
    pub factors: Vec<Coef>,
}

/// Symbolic form of the order-`m` equations written as
/// `η̇_m + Σ terms = 0` and `u̇_m + Σ terms = 0` (untruncated), with like
/// terms collected and sorted.
pub fn hierarchy_terms(m: usize) -> (Vec<Monomial>, Vec<Monomial>) {
    use std::collections::BTreeMap;
    let collect = |acc: BTreeMap<Vec<Coef>, i64>| -> Vec<Monomial> {
        acc.into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(factors, coeff)| Monomial { coeff, factors })
            .collect()
    };
    let mut eta = BTreeMap::new();
    let mut u = BTreeMap::new();
    for i in 0..=m {
        let j = m - i;
        let mut f = vec![Coef::Eta(i), Coef::U(j)];
        f.sort();
        *eta.entry(f).or_insert(0) += (2 * m + 1) as i64;
        let mut f = vec![Coef::U(i), Coef::U(j)];
        f.sort();
        *u.entry(f).or_insert(0) += (2 * j + 1) as i64;
    }
    *u.entry(vec![Coef::Eta(m + 1)]).or_insert(0) += 2 * (m as i64 + 1);
    (collect(eta), collect(u))
}

/// Coefficient trajectory; stops early on blow-up like the five-field
/// integrator.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTrajectory {
    pub t: Vec<f64>,
    pub states: Vec<SeriesState>,
    pub reason: Termination,
}

impl SeriesTrajectory {
    /// CSV with columns `t, eta0..etaN, u0..uN`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let n = self.states.first().map_or(0, |s| s.order());
        let mut header = vec!["t".to_string()];
        header.extend((0..=n).map(|m| format!("eta{m}")));
        header.extend((0..=n).map(|m| format!("u{m}")));
        wr.write_record(&header)?;
        for (t, s) in self.t.iter().zip(&self.states) {
            let mut row = vec![*t];
            row.extend(s.to_vec());
            wr.serialize(row)?;
        }
        wr.flush()?;
        Ok(())
    }
}

pub fn integrate_series(s0: &SeriesState, t_end: f64, opts: &IntegratorOptions) -> Result<SeriesTrajectory> {
    let rhs = |y: &[f64], dy: &mut [f64]| {
        let d = hierarchy_rhs(&SeriesState::from_slice(y));
        dy.copy_from_slice(&d.to_vec());
    };
    let sol = solve(rhs, &s0.to_vec(), t_end, opts)?;
    Ok(SeriesTrajectory {
        states: sol.y.iter().map(|y| SeriesState::from_slice(y)).collect(),
        t: sol.t,
        reason: sol.reason,
    })
}

/// Outcome of the dry-point test for the pair `(η_{n+1}, u_n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AffinityReport {
    pub n: usize,
    /// Largest second difference of the pair's right-hand side along a
    /// line in the pair's own coordinates.
    pub second_difference: f64,
    /// Largest change of the pair's right-hand side when the higher
    /// coefficients `u_{n+1}, η_{n+2}, …` are perturbed.
    pub upward_coupling: f64,
    pub tolerance: f64,
    /// The pair evolves by an affine system driven only by lower
    /// coefficients.
    pub linearizes: bool,
}

/// Tests whether `(η_{n+1}, u_n)` evolves affinely in itself given the
/// lower coefficients, and independently of the higher ones.
///
/// `s` supplies the lower coefficients and must have order `≥ n + 2` so
/// that the higher ones exist. At a dry point (`η₀ = 0`) both conditions
/// hold; for `η₀ ≠ 0` the term `η₀ u_{n+1}` couples the pair upward.
pub fn dry_point_affinity_check(n: usize, s: &SeriesState) -> Result<AffinityReport> {
    if n < 1 {
        return Err(domain("the pair (eta_{n+1}, u_n) needs n >= 1"));
    }
    if s.order() < n + 2 {
        return Err(domain(format!("need truncation order >= {} for n = {n}", n + 2)));
    }
    const TOL: f64 = 1e-10;
    let pair_rhs = |st: &SeriesState| {
        let d = hierarchy_rhs(st);
        [d.eta[n + 1], d.u[n]]
    };
    let at = |t: f64| {
        let mut st = s.clone();
        st.eta[n + 1] = s.eta[n + 1] + 0.7 * t;
        st.u[n] = s.u[n] - 1.3 * t;
        pair_rhs(&st)
    };
    let f: Vec<[f64; 2]> = (0..4).map(|k| at(k as f64)).collect();
    let mut second = 0.0f64;
    let mut scale = 1.0f64;
    for k in 0..2 {
        for c in 0..2 {
            second = second.max((f[k][c] - 2.0 * f[k + 1][c] + f[k + 2][c]).abs());
        }
    }
    for v in f.iter().flatten() {
        scale = scale.max(v.abs());
    }

    let base = pair_rhs(s);
    let mut upward = 0.0f64;
    for m in n + 1..=s.order() {
        for which in 0..2 {
            if which == 0 && m == n + 1 {
                continue;
            }
            let mut st = s.clone();
            if which == 0 {
                st.eta[m] += 1.0;
            } else {
                st.u[m] += 1.0;
            }
            let p = pair_rhs(&st);
            upward = upward.max((p[0] - base[0]).abs()).max((p[1] - base[1]).abs());
        }
    }
    let second_difference = second / scale;
    Ok(AffinityReport {
        n,
        second_difference,
        upward_coupling: upward,
        tolerance: TOL,
        linearizes: second_difference <= TOL && upward <= TOL,
    })
}

/// Values of `η₃` and `u₃` that keep `u₂ ≡ 0` along the flow.
///
/// `u̇₂ = 0` forces `η₃ = −u₁²/2`; `ü₂ = 0` then forces
/// `u₃ = −u₁(22η₂ + u₀u₁)/(14η₀)`.
pub fn algebraic_reduction_u2(s: &SeriesState) -> Result<(f64, f64)> {
    if s.order() < 2 {
        return Err(domain("need truncation order >= 2"));
    }
    if s.eta[0] == 0.0 {
        return Err(domain("eta0 = 0"));
    }
    let (e0, e2, u0, u1) = (s.eta[0], s.eta[2], s.u[0], s.u[1]);
    Ok((-0.5 * u1 * u1, -u1 * (22.0 * e2 + u0 * u1) / (14.0 * e0)))
}

/// Applies [`algebraic_reduction_u2`] in place (sets `u₂ = 0`, `η₃`, `u₃`).
pub fn impose_u2_constraint(s: &mut SeriesState) -> Result<()> {
    if s.order() < 3 {
        return Err(domain("need truncation order >= 3"));
    }
    s.u[2] = 0.0;
    let (e3, u3) = algebraic_reduction_u2(s)?;
    s.eta[3] = e3;
    s.u[3] = u3;
    Ok(())
}
