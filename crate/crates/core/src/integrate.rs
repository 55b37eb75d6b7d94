//! Explicit Runge–Kutta integration with blow-up detection.
//!
//! [`solve`] works on any autonomous system `y' = f(y)` stored as a slice;
//! [`integrate`] specializes it to the five-field reduction and records the
//! `K` diagnostics along the way.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::{vf_x, vf_y};
use crate::error::{Error, Result};
use crate::invariants::K_values;
use crate::state::State5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Method {
    /// Classic fourth-order Runge–Kutta with a fixed step.
    Rk4 { dt: f64 },
    /// Dormand–Prince 5(4) with error control on each component.
    Adaptive { rtol: f64, atol: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub method: Method,
    /// Any component larger than this in magnitude stops the run.
    pub blowup_threshold: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self::adaptive(1e-10)
    }
}

impl IntegratorOptions {
    pub fn adaptive(tol: f64) -> Self {
        Self {
            method: Method::Adaptive { rtol: tol, atol: tol },
            blowup_threshold: 1e12,
            max_steps: 10_000_000,
        }
    }

    pub fn rk4(dt: f64) -> Self {
        Self {
            method: Method::Rk4 { dt },
            ..Self::adaptive(1e-10)
        }
    }

    /// Fixed-step RK4 with `dt = 1e−3 / max(1, |α₀|, √|γ₀|)`.
    pub fn rk4_default_for(s0: &State5) -> Self {
        let scale = 1f64.max(s0.alpha.abs()).max(s0.gamma.abs().sqrt());
        Self::rk4(1e-3 / scale)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedEnd,
    BlowUp,
    StepUnderflow,
    MaxSteps,
}

/// Accepted steps of an integration run.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub reason: Termination,
}

impl Solution {
    pub fn last(&self) -> (f64, &[f64]) {
        let n = self.t.len() - 1;
        (self.t[n], &self.y[n])
    }
}

fn exceeds(y: &[f64], threshold: f64) -> bool {
    y.iter().any(|v| !v.is_finite() || v.abs() > threshold)
}

/// Integrates `y' = f(y)` from `t = 0` to `t_end`.
///
/// The returned samples always include `t = 0`; the run stops early on
/// blow-up (threshold or non-finite values), on step underflow
/// (`dt < 1e−14·t_end`) or after `max_steps` steps.
pub fn solve<F>(mut f: F, y0: &[f64], t_end: f64, opts: &IntegratorOptions) -> Result<Solution>
where
    F: FnMut(&[f64], &mut [f64]),
{
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::Invalid(format!("t_end must be finite and >= 0 (got {t_end})")));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("non-finite initial state".into()));
    }
    let mut sol = Solution {
        t: vec![0.0],
        y: vec![y0.to_vec()],
        reason: Termination::ReachedEnd,
    };
    if t_end == 0.0 {
        return Ok(sol);
    }
    match opts.method {
        Method::Rk4 { dt } => {
            if !(dt > 0.0) {
                return Err(Error::Invalid(format!("dt must be > 0 (got {dt})")));
            }
            rk4_loop(&mut f, t_end, dt, opts, &mut sol);
        }
        Method::Adaptive { rtol, atol } => {
            if !(rtol > 0.0 && atol > 0.0) {
                return Err(Error::Invalid("tolerances must be > 0".into()));
            }
            dopri_loop(&mut f, t_end, rtol, atol, opts, &mut sol);
        }
    }
    Ok(sol)
}

fn rk4_loop<F>(f: &mut F, t_end: f64, dt: f64, opts: &IntegratorOptions, sol: &mut Solution)
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = sol.y[0].len();
    let mut y = sol.y[0].clone();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let nsteps = (t_end / dt).ceil() as usize;
    for step in 1..=nsteps {
        if step > opts.max_steps {
            sol.reason = Termination::MaxSteps;
            return;
        }
        let t0 = (step - 1) as f64 * dt;
        let t1 = if step == nsteps { t_end } else { step as f64 * dt };
        let h = t1 - t0;
        f(&y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        f(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        f(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        f(&tmp, &mut k4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        sol.t.push(t1);
        sol.y.push(y.clone());
        if exceeds(&y, opts.blowup_threshold) {
            sol.reason = Termination::BlowUp;
            return;
        }
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dopri_loop<F>(f: &mut F, t_end: f64, rtol: f64, atol: f64, opts: &IntegratorOptions, sol: &mut Solution)
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = sol.y[0].len();
    let mut y = sol.y[0].clone();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut y5 = vec![0.0; n];
    f(&y, &mut k[0]);

    // Initial step from the ratio of state and slope magnitudes.
    let sc = |v: f64| atol + rtol * v.abs();
    let d0 = y.iter().map(|v| (v / sc(*v)).powi(2)).sum::<f64>().sqrt();
    let d1 = y
        .iter()
        .zip(&k[0])
        .map(|(v, d)| (d / sc(*v)).powi(2))
        .sum::<f64>()
        .sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(t_end).max(1e-12 * t_end);

    let h_min = 1e-14 * t_end;
    let mut t = 0.0;
    let mut steps = 0usize;
    while t < t_end {
        if steps >= opts.max_steps {
            sol.reason = Termination::MaxSteps;
            return;
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, a) in A[s].iter().enumerate().take(s) {
                    acc += a * k[j][i];
                }
                tmp[i] = y[i] + h * acc;
            }
            f(&tmp, &mut k[s]);
        }
        let mut err: f64 = 0.0;
        let mut finite = true;
        for i in 0..n {
            let mut s5 = 0.0;
            let mut s4 = 0.0;
            for j in 0..7 {
                s5 += B5[j] * k[j][i];
                s4 += B4[j] * k[j][i];
            }
            y5[i] = y[i] + h * s5;
            if !y5[i].is_finite() {
                finite = false;
            }
            let e = h * (s5 - s4);
            let scale = atol + rtol * y[i].abs().max(y5[i].abs());
            err = err.max((e / scale).abs());
        }
        if !finite {
            err = f64::INFINITY;
        }
        if err <= 1.0 {
            steps += 1;
            t = if last { t_end } else { t + h };
            y.copy_from_slice(&y5);
            sol.t.push(t);
            sol.y.push(y.clone());
            if exceeds(&y, opts.blowup_threshold) {
                sol.reason = Termination::BlowUp;
                return;
            }
            // First-same-as-last.
            let k6 = k[6].clone();
            k[0].copy_from_slice(&k6);
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= fac;
        } else {
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.1, 1.0)
            } else {
                0.1
            };
            h *= fac;
        }
        if t < t_end && h < h_min {
            sol.reason = Termination::StepUnderflow;
            return;
        }
    }
}

/// Vector field driving [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    /// Time evolution.
    X,
    /// Translation symmetry.
    Y,
}

/// One recorded step: time, state and `(K₀, K₁, K₂)` (NaN where undefined).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: State5,
    pub k: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub reason: Termination,
}

impl Trajectory {
    /// Time of the last accepted step when the run ended in blow-up or
    /// step underflow.
    pub fn blowup_time(&self) -> Option<f64> {
        match self.reason {
            Termination::BlowUp | Termination::StepUnderflow => self.samples.last().map(|s| s.t),
            _ => None,
        }
    }

    pub fn final_state(&self) -> &Sample {
        self.samples.last().expect("trajectory always has the initial sample")
    }

    /// CSV with columns `t, alpha, gamma, zeta, omega, beta, K0, K1, K2`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "alpha", "gamma", "zeta", "omega", "beta", "K0", "K1", "K2"])?;
        for s in &self.samples {
            let mut row = vec![s.t];
            row.extend(s.state.to_array());
            row.extend(s.k);
            wr.serialize(row)?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn k_diag(s: &State5) -> [f64; 3] {
    match K_values(s) {
        Ok(k) => [k.k0, k.k1, k.k2],
        Err(_) => [f64::NAN; 3],
    }
}

/// Integrates the five-field system along `X` (time) or `Y` (translation).
pub fn integrate(field: Field, s0: &State5, t_end: f64, opts: &IntegratorOptions) -> Result<Trajectory> {
    let rhs = move |y: &[f64], dy: &mut [f64]| {
        let s = State5::new(y[0], y[1], y[2], y[3], y[4]);
        let v = match field {
            Field::X => vf_x(&s),
            Field::Y => vf_y(&s),
        };
        dy.copy_from_slice(&v);
    };
    let sol = solve(rhs, &s0.to_array(), t_end, opts)?;
    let samples = sol
        .t
        .iter()
        .zip(&sol.y)
        .map(|(t, y)| {
            let state = State5::new(y[0], y[1], y[2], y[3], y[4]);
            Sample {
                t: *t,
                state,
                k: k_diag(&state),
            }
        })
        .collect();
    Ok(Trajectory {
        samples,
        reason: sol.reason,
    })
}
