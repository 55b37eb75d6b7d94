//! Small numerical kernels: adaptive Gauss–Kronrod quadrature and a
//! bracketed scalar root finder.

use crate::error::{Error, Result};

// 15-point Kronrod nodes (non-negative half) with Kronrod and embedded
// 7-point Gauss weights.
const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XK[i];
        let s = f(c - dx) + f(c + dx);
        k += WK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// `∫_a^b f` by globally adaptive 15-point Gauss–Kronrod bisection.
///
/// Stops when the summed error estimate is below
/// `max(abs_tol, rel_tol·|I|)` and returns [`Error::Invalid`] if the
/// interval budget runs out first.
pub fn integrate_gk<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut parts = vec![{
        let (v, e) = gk15(&f, a, b);
        (a, b, v, e)
    }];
    for _ in 0..2000 {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::Invalid("non-finite integrand".into()));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let (imax, _) = parts
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, _, _) = parts.swap_remove(imax);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval exhausted at machine resolution; accept the estimate.
            let (v, _) = gk15(&f, lo, hi);
            parts.push((lo, hi, v, 0.0));
            continue;
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    let total: f64 = parts.iter().map(|p| p.2).sum();
    let err: f64 = parts.iter().map(|p| p.3).sum();
    if err <= 1e3 * abs_tol.max(rel_tol * total.abs()) {
        Ok(total)
    } else {
        Err(Error::Invalid(format!("quadrature did not converge (error {err:e})")))
    }
}

/// Root of a continuous `f` on `[a, b]` with `f(a) ≤ 0 ≤ f(b)` or the
/// reverse, by the Illinois variant of regula falsi safeguarded with
/// bisection.
///
/// Terminates when `|f(x)| ≤ f_tol` or the bracket is at machine resolution.
/// `f(b)` may be infinite; such endpoints are handled by bisection.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, f_tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::Root(format!("no sign change on [{a}, {b}]: f = ({fa}, {fb})")));
    }
    let mut side = 0i8;
    for it in 0..400 {
        let secant_ok = fa.is_finite() && fb.is_finite() && it % 4 != 3;
        let mut x = if secant_ok {
            (a * fb - b * fa) / (fb - fa)
        } else {
            0.5 * (a + b)
        };
        if !(x > a.min(b) && x < a.max(b)) {
            x = 0.5 * (a + b);
        }
        if x == a || x == b {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
        let fx = f(x);
        if fx.is_nan() {
            return Err(Error::Root(format!("NaN at x = {x}")));
        }
        if fx.abs() <= f_tol {
            return Ok(x);
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::Root("iteration budget exhausted".into()))
}
