//! Adaptive Dormand-Prince 5(4) integrator for small autonomous-in-dimension systems.

use crate::error::{Error, Result};

const MIN_STEP: f64 = 1e-14;
const MAX_STEPS: usize = 1_000_000;

// Butcher tableau.
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub(crate) struct Dopri5<const D: usize> {
    pub rtol: f64,
    pub atol: f64,
    /// Step size carried between successive `advance` calls.
    pub step: f64,
}

impl<const D: usize> Dopri5<D> {
    pub fn new(rtol: f64, atol: f64, initial_step: f64) -> Self {
        Dopri5 {
            rtol,
            atol,
            step: initial_step.abs(),
        }
    }

    /// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
    pub fn advance<F>(&mut self, f: &F, t0: f64, t1: f64, mut y: [f64; D]) -> Result<[f64; D]>
    where
        F: Fn(f64, &[f64; D]) -> [f64; D],
    {
        let dir = (t1 - t0).signum();
        let mut t = t0;
        let mut h = self.step.min((t1 - t0).abs());
        let mut steps = 0;
        while (t1 - t).abs() > 1e-15 * t1.abs().max(1.0) {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::numeric(format!(
                    "ODE integration exceeded {MAX_STEPS} steps near t = {t}"
                )));
            }
            let remaining = (t1 - t).abs();
            let last = h >= remaining;
            let hs = if last { remaining } else { h };
            let (y_new, err) = self.trial_step(f, t, &y, dir * hs);
            if !err.is_finite() {
                h = hs * 0.1;
            } else if err <= 1.0 {
                t = if last { t1 } else { t + dir * hs };
                y = y_new;
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                // Keep the un-truncated step so the next segment is not throttled.
                h = if last { h.max(hs * fac) } else { hs * fac };
            } else {
                h = hs * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            }
            if h < MIN_STEP {
                return Err(Error::numeric(format!(
                    "ODE step size underflow at t = {t} (h = {h:e})"
                )));
            }
        }
        self.step = h;
        Ok(y)
    }

    fn trial_step<F>(&self, f: &F, t: f64, y: &[f64; D], h: f64) -> ([f64; D], f64)
    where
        F: Fn(f64, &[f64; D]) -> [f64; D],
    {
        let comb = |terms: &[(f64, &[f64; D])]| {
            let mut out = *y;
            for (coef, k) in terms {
                for i in 0..D {
                    out[i] += h * coef * k[i];
                }
            }
            out
        };
        let k1 = f(t, y);
        let k2 = f(t + C2 * h, &comb(&[(A21, &k1)]));
        let k3 = f(t + C3 * h, &comb(&[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &comb(&[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &comb(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &comb(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y5 = comb(&[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + h, &y5);
        let mut err2 = 0.0;
        for i in 0..D {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
            err2 += (e / sc).powi(2);
        }
        (y5, (err2 / D as f64).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_backward_and_forward() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let mut ode = Dopri5::new(1e-11, 1e-14, 0.1);
        let y = ode.advance(&f, 0.0, 10.0, [0.0, 1.0]).unwrap();
        assert!((y[0] - 10f64.sin()).abs() < 1e-8);
        let back = ode.advance(&f, 10.0, 0.0, y).unwrap();
        assert!(back[0].abs() < 1e-8 && (back[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn blow_up_reports_failure() {
        // y' = y² from y(0) = 1 blows up at t = 1.
        let f = |_t: f64, y: &[f64; 1]| [y[0] * y[0]];
        let mut ode = Dopri5::new(1e-10, 1e-12, 0.01);
        assert!(ode.advance(&f, 0.0, 2.0, [1.0]).is_err());
    }
}
