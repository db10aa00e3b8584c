//! Adaptive Dormand–Prince 5(4) integrator over fixed-size real state vectors.
//!
//! Complex-valued density matrices are packed into real arrays by the callers.
//! Step-size control is the PI controller of Hairer, Nørsett & Wanner with
//! FSAL reuse of the last stage.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on a single step (s); `f64::INFINITY` for none.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-9,
            atol: 1e-12,
            h_max: f64::INFINITY,
            max_steps: 50_000_000,
        }
    }
}

impl Tolerances {
    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self
    }

    pub fn with_atol(mut self, atol: f64) -> Self {
        self.atol = atol;
        self
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// error coefficients: 5th-order weights minus embedded 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrator state that can be advanced repeatedly to increasing times.
pub struct Dopri5<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    h: f64,
    k1: [f64; N],
    err_old: f64,
    tol: Tolerances,
    steps: usize,
    rejected: usize,
    fresh: bool,
}

#[inline]
fn lin<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] += h * s;
    }
    out
}

impl<const N: usize> Dopri5<N> {
    pub fn new(t0: f64, y0: [f64; N], tol: Tolerances) -> Self {
        Dopri5 {
            t: t0,
            y: y0,
            h: 0.0,
            k1: [0.0; N],
            err_old: 1e-4,
            tol,
            steps: 0,
            rejected: 0,
            fresh: true,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn rejected(&self) -> usize {
        self.rejected
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.tol.atol + self.tol.rtol * a.abs().max(b.abs())
    }

    fn initial_step<F: FnMut(f64, &[f64; N]) -> [f64; N]>(&self, f: &mut F, span: f64) -> f64 {
        // Hairer's starting-step heuristic
        let f0 = &self.k1;
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for (&y, &f) in self.y.iter().zip(f0) {
            let sc = self.scale(y, y);
            d0 += (y / sc).powi(2);
            d1 += (f / sc).powi(2);
        }
        d0 = (d0 / N as f64).sqrt();
        d1 = (d1 / N as f64).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6 * span.abs()
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(span.abs()).min(self.tol.h_max);
        let y1 = lin(&self.y, h0, &[(1.0, f0)]);
        let f1 = f(self.t + h0, &y1);
        let mut d2 = 0.0;
        for i in 0..N {
            let sc = self.scale(self.y[i], self.y[i]);
            d2 += ((f1[i] - f0[i]) / sc).powi(2);
        }
        d2 = (d2 / N as f64).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6 * h0)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.tol.h_max).min(span.abs())
    }

    /// Advances the solution to exactly `t_end`.
    pub fn advance_to<F>(&mut self, t_end: f64, f: &mut F) -> Result<()>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        if t_end <= self.t {
            return Ok(());
        }
        if self.fresh {
            self.k1 = f(self.t, &self.y);
            self.h = self.initial_step(f, t_end - self.t);
            self.fresh = false;
        }
        const BETA: f64 = 0.04;
        const ALPHA: f64 = 0.2 - BETA * 0.75;
        while self.t < t_end {
            if self.steps + self.rejected >= self.tol.max_steps {
                return Err(Error::TooManySteps {
                    max_steps: self.tol.max_steps,
                    t_last: self.t,
                });
            }
            let mut h = self.h.min(self.tol.h_max);
            // stretch the step slightly rather than leave a sliver before t_end
            let last = self.t + h * (1.0 + 1e-8) >= t_end;
            if last {
                h = t_end - self.t;
            }
            if !(h > 1e-15 * self.t.abs().max(1e-300)) || !h.is_finite() {
                return Err(Error::StepFailure { t_last: self.t });
            }
            let t = self.t;
            let y = &self.y;
            let k1 = self.k1;
            let k2 = f(t + C2 * h, &lin(y, h, &[(A21, &k1)]));
            let k3 = f(t + C3 * h, &lin(y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(
                t + C4 * h,
                &lin(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = f(
                t + C5 * h,
                &lin(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + h,
                &lin(
                    y,
                    h,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = lin(
                y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = f(t + h, &y_new);
            let mut err = 0.0;
            let mut finite = true;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.scale(y[i], y_new[i]);
                err += (e / sc).powi(2);
                finite &= y_new[i].is_finite();
            }
            let err = (err / N as f64).sqrt();
            if !finite || !err.is_finite() {
                self.rejected += 1;
                self.h = 0.1 * h;
                continue;
            }
            if err <= 1.0 {
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-ALPHA) * self.err_old.powf(BETA)).clamp(0.2, 5.0)
                };
                self.err_old = err.max(1e-4);
                self.t = if last { t_end } else { t + h };
                self.y = y_new;
                self.k1 = k7;
                self.steps += 1;
                if !last {
                    self.h = h * fac;
                } else {
                    self.h = self.h.max(h);
                }
            } else {
                self.rejected += 1;
                self.h = h * (0.9 * err.powf(-ALPHA)).max(0.2);
            }
        }
        Ok(())
    }
}

/// Integrates from `t0` and returns the state at each of `samples`
/// (non-decreasing, all ≥ `t0`).
pub fn integrate_sampled<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    samples: &[f64],
    tol: Tolerances,
) -> Result<Vec<[f64; N]>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut ig = Dopri5::new(t0, y0, tol);
    let mut out = Vec::with_capacity(samples.len());
    for &ts in samples {
        ig.advance_to(ts, &mut f)?;
        out.push(ig.y);
    }
    Ok(out)
}
