//! Dormand–Prince 5(4) with the standard fourth-order continuous extension.
//!
//! Small fixed-size systems only; the state lives on the stack.

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

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, PartialEq)]
pub enum StepError {
    /// Step size fell below the resolution of `t`.
    Underflow { t: f64 },
    /// Too many steps for one call to `advance`.
    StepLimit { t: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rel: f64,
    /// Absolute tolerance, scaled by the Euclidean norm of the state.
    pub abs: f64,
    pub max_step: f64,
    pub max_steps: u64,
}

pub struct Dopri5<F, const N: usize> {
    f: F,
    tol: Tolerances,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    steps: u64,
    rejected: u64,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

fn norm<const N: usize>(y: &[f64; N]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl<F, const N: usize> Dopri5<F, N>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(mut f: F, t0: f64, y0: [f64; N], tol: Tolerances) -> Self {
        let k1 = f(t0, &y0);
        Dopri5 {
            f,
            tol,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            steps: 0,
            rejected: 0,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> [f64; N] {
        self.y
    }

    /// Accepted and rejected step counts since construction.
    pub fn stats(&self) -> (u64, u64) {
        (self.steps, self.rejected)
    }

    /// Replaces the current point (e.g. after a discontinuous update) while
    /// keeping the step-size history.
    pub fn reset(&mut self, y: [f64; N]) {
        self.y = y;
        self.k1 = (self.f)(self.t, &y);
    }

    fn initial_step(&mut self, span: f64) -> f64 {
        let yn = norm(&self.y).max(1e-300);
        let fn_ = norm(&self.k1);
        let mut h = if fn_ > 0.0 {
            0.01 * yn / fn_ * self.tol.rel.powf(0.2) * 10.0
        } else {
            span
        };
        h = h.min(span).min(self.tol.max_step);
        h.max(span * 1e-12)
    }

    fn error_norm(&self, y1: &[f64; N], err: &[f64; N]) -> f64 {
        let floor = self.tol.abs * norm(&self.y).max(norm(y1));
        let mut acc = 0.0;
        for i in 0..N {
            let sc = floor + self.tol.rel * self.y[i].abs().max(y1[i].abs());
            let e = err[i] / sc;
            acc += e * e;
        }
        (acc / N as f64).sqrt()
    }

    /// Integrates to `t_end`, calling `on_sample(index, y)` for every
    /// `samples[index]` in `(t, t_end]` (ascending) from the dense output.
    /// Samples at or before the current time are skipped; a sample equal to
    /// `t_end` receives the end point itself.
    pub fn advance(
        &mut self,
        t_end: f64,
        samples: &[f64],
        mut on_sample: impl FnMut(usize, [f64; N]),
    ) -> Result<(), StepError> {
        let mut next = samples.partition_point(|&s| s <= self.t);
        if t_end <= self.t {
            return Ok(());
        }
        if self.h <= 0.0 {
            self.h = self.initial_step(t_end - self.t);
        }
        let mut facmax = 10.0;
        let mut count = 0u64;
        loop {
            let remaining = t_end - self.t;
            let mut h = self.h.min(self.tol.max_step);
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }
            if h <= self.t.abs().max(remaining) * 1e-15 {
                return Err(StepError::Underflow { t: self.t });
            }
            count += 1;
            if count > self.tol.max_steps {
                return Err(StepError::StepLimit { t: self.t });
            }

            let t = self.t;
            let y = self.y;
            let k1 = self.k1;
            let f = &mut self.f;
            let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(
                t + C5 * h,
                &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + h,
                &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = f(t + h, &y1);
            let mut err = [0.0; N];
            for i in 0..N {
                err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            }
            let en = self.error_norm(&y1, &err);
            let finite = en.is_finite() && y1.iter().all(|v| v.is_finite());

            if finite && en <= 1.0 {
                let t1 = if last { t_end } else { t + h };
                // dense output between t and t1
                while next < samples.len() && samples[next] <= t1 {
                    let s = samples[next];
                    let out = if s == t1 {
                        y1
                    } else {
                        let theta = (s - t) / h;
                        let theta1 = 1.0 - theta;
                        let mut o = [0.0; N];
                        for i in 0..N {
                            let r2 = y1[i] - y[i];
                            let r3 = h * k1[i] - r2;
                            let r4 = r2 - h * k7[i] - r3;
                            let r5 = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                            o[i] = y[i] + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
                        }
                        o
                    };
                    on_sample(next, out);
                    next += 1;
                }
                self.t = t1;
                self.y = y1;
                self.k1 = k7;
                self.steps += 1;
                let fac = if en > 0.0 { 0.9 * en.powf(-0.2) } else { facmax };
                let fac = fac.clamp(0.2, facmax);
                // keep the step size that was actually needed, not the clipped one
                if !last || h == self.h.min(self.tol.max_step) {
                    self.h = h * fac;
                }
                facmax = 10.0;
                if last {
                    return Ok(());
                }
            } else {
                self.rejected += 1;
                let fac = if finite {
                    (0.9 * en.powf(-0.2)).clamp(0.1, 1.0)
                } else {
                    0.1
                };
                self.h = h * fac;
                facmax = 1.0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(rel: f64) -> Tolerances {
        Tolerances {
            rel,
            abs: rel * 1e-3,
            max_step: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }

    #[test]
    fn harmonic_oscillator_and_dense_output() {
        let mut solver = Dopri5::new(|_t, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], tol(1e-10));
        let samples: Vec<f64> = (1..=50).map(|i| i as f64 * 0.37).collect();
        let mut got = vec![[0.0; 2]; samples.len()];
        solver.advance(20.0, &samples, |i, y| got[i] = y).unwrap();
        for (s, y) in samples.iter().zip(&got) {
            assert!((y[0] - s.cos()).abs() < 1e-8, "t={s}: {} vs {}", y[0], s.cos());
            assert!((y[1] + s.sin()).abs() < 1e-8);
        }
        assert!((solver.y()[0] - 20f64.cos()).abs() < 1e-8);
        assert_eq!(solver.t(), 20.0);
    }

    #[test]
    fn polynomial_solutions_are_exact() {
        let mut solver = Dopri5::new(|t, _y: &[f64; 1]| [3.0 * t * t], 0.0, [0.0], tol(1e-12));
        solver.advance(5.0, &[], |_, _| {}).unwrap();
        assert!((solver.y()[0] - 125.0).abs() < 1e-10);
    }

    #[test]
    fn reset_and_continue() {
        let mut solver = Dopri5::new(|_t, y: &[f64; 1]| [-y[0]], 0.0, [1.0], tol(1e-10));
        solver.advance(1.0, &[], |_, _| {}).unwrap();
        solver.reset([2.0]);
        solver.advance(2.0, &[], |_, _| {}).unwrap();
        assert!((solver.y()[0] - 2.0 * (-1f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn step_limit_is_reported() {
        let mut t = tol(1e-10);
        t.max_steps = 3;
        let mut solver = Dopri5::new(|_t, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], t);
        assert!(matches!(
            solver.advance(1000.0, &[], |_, _| {}),
            Err(StepError::StepLimit { .. })
        ));
    }
}
