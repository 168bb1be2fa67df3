//! Embedded Dormand–Prince 5(4) integrator with adaptive step control.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5Options<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// First trial step.
    pub initial_step: T,
    /// Steps below this abort with [`Error::StepSizeUnderflow`].
    pub min_step: T,
    pub safety: T,
}

impl<T: Scalar> Dopri5Options<T> {
    pub fn new(rel_tol: T, abs_tol: T, initial_step: T) -> Self {
        Self {
            rel_tol,
            abs_tol,
            initial_step,
            min_step: T::lit(1e-12),
            safety: T::lit(0.9),
        }
    }
}

/// Returned by the step observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Control<R> {
    Continue,
    Stop(R),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integration<T, const N: usize, R> {
    /// Value passed to [`Control::Stop`], if the observer stopped early.
    pub stopped: Option<R>,
    pub accepted: usize,
    pub rejected: usize,
    pub t: T,
    pub y: [T; N],
}

const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
/// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn combine<T: Scalar, const N: usize>(y: &[T; N], h: T, coef: &[f64], k: &[[T; N]]) -> [T; N] {
    let mut out = *y;
    for (c, ki) in coef.iter().zip(k) {
        if *c == 0.0 {
            continue;
        }
        let w = h * T::lit(*c);
        for n in 0..N {
            out[n] = out[n] + w * ki[n];
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`.
///
/// `on_step(t_prev, t_new, y_new)` is called after every accepted step and
/// may stop the integration.
pub fn dopri5<T, const N: usize, R, F, O>(
    mut f: F,
    t0: T,
    y0: [T; N],
    t_end: T,
    opts: &Dopri5Options<T>,
    mut on_step: O,
) -> Result<Integration<T, N, R>>
where
    T: Scalar,
    F: FnMut(T, &[T; N]) -> [T; N],
    O: FnMut(T, T, &[T; N]) -> Control<R>,
{
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.initial_step.min(t_end - t0);
    let mut accepted = 0;
    let mut rejected = 0;
    let mut k1 = f(t, &y);
    let lit = |x: f64| T::lit(x);
    while t < t_end {
        if h < opts.min_step && t_end - t > opts.min_step {
            return Err(Error::StepSizeUnderflow {
                t: t.to_f64_lossy(),
                min_step: opts.min_step.to_f64_lossy(),
            });
        }
        let last = h >= t_end - t;
        if last {
            h = t_end - t;
        }
        let k2 = f(t + h * lit(C[0]), &combine(&y, h, &A2, &[k1]));
        let k3 = f(t + h * lit(C[1]), &combine(&y, h, &A3, &[k1, k2]));
        let k4 = f(t + h * lit(C[2]), &combine(&y, h, &A4, &[k1, k2, k3]));
        let k5 = f(t + h * lit(C[3]), &combine(&y, h, &A5, &[k1, k2, k3, k4]));
        let k6 = f(t + h * lit(C[4]), &combine(&y, h, &A6, &[k1, k2, k3, k4, k5]));
        let y_new = combine(&y, h, &B, &[k1, k2, k3, k4, k5, k6]);
        let t_new = if last { t_end } else { t + h };
        let k7 = f(t_new, &y_new);

        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err = T::zero();
        for n in 0..N {
            let mut e = T::zero();
            for (c, k) in E.iter().zip(&ks) {
                e = e + lit(*c) * k[n];
            }
            let scale = opts.abs_tol + opts.rel_tol * y[n].abs().max(y_new[n].abs());
            err = err.max((h * e).abs() / scale);
        }

        if err <= T::one() {
            let t_prev = t;
            t = t_new;
            y = y_new;
            k1 = k7;
            accepted += 1;
            if let Control::Stop(r) = on_step(t_prev, t, &y) {
                return Ok(Integration { stopped: Some(r), accepted, rejected, t, y });
            }
            let grow = if err == T::zero() {
                lit(5.0)
            } else {
                (opts.safety * err.powf(lit(-0.2))).min(lit(5.0)).max(lit(0.2))
            };
            h = h * grow;
        } else {
            rejected += 1;
            h = h * (opts.safety * err.powf(lit(-0.2))).max(lit(0.2)).min(T::one());
        }
    }
    Ok(Integration { stopped: None, accepted, rejected, t, y })
}
