//! Dormand-Prince 5(4) integrator with the standard fourth-order continuous
//! extension and terminal event location on the dense output.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
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
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    -71.0 / 57600.0,
    0.0,
    71.0 / 16695.0,
    -71.0 / 1920.0,
    17253.0 / 339200.0,
    -22.0 / 525.0,
    1.0 / 40.0,
];
// Continuous extension: y(s0 + θh) = y0 + h Σ_j K_j Σ_k P[j][k] θ^(k+1).
const P: [[f64; 4]; 7] = [
    [
        1.0,
        -8048581381.0 / 2820520608.0,
        8663915743.0 / 2820520608.0,
        -12715105075.0 / 11282082432.0,
    ],
    [0.0, 0.0, 0.0, 0.0],
    [
        0.0,
        131558114200.0 / 32700410799.0,
        -68118460800.0 / 10900136933.0,
        87487479700.0 / 32700410799.0,
    ],
    [
        0.0,
        -1754552775.0 / 470086768.0,
        14199869525.0 / 1410260304.0,
        -10690763975.0 / 1880347072.0,
    ],
    [
        0.0,
        127303824393.0 / 49829197408.0,
        -318862633887.0 / 49829197408.0,
        701980252875.0 / 199316789632.0,
    ],
    [
        0.0,
        -282668133.0 / 205662961.0,
        2019193451.0 / 616988883.0,
        -1453857185.0 / 822651844.0,
    ],
    [
        0.0,
        40617522.0 / 29380423.0,
        -110615467.0 / 29380423.0,
        69997945.0 / 29380423.0,
    ],
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeControls {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// Smallest admissible step relative to `max(1, |s|)`.
    pub min_step_rel: f64,
}

impl Default for OdeControls {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: 0.05,
            max_steps: 200_000,
            min_step_rel: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Step<const N: usize> {
    s0: f64,
    h: f64,
    y0: [f64; N],
    q: [[f64; 4]; N],
}

impl<const N: usize> Step<N> {
    fn eval(&self, s: f64) -> [f64; N] {
        let th = (s - self.s0) / self.h;
        let mut y = self.y0;
        for (yi, qi) in y.iter_mut().zip(&self.q) {
            let poly = th * (qi[0] + th * (qi[1] + th * (qi[2] + th * qi[3])));
            *yi += self.h * poly;
        }
        y
    }
}

/// Piecewise-polynomial dense output of an accepted integration.
#[derive(Debug, Clone)]
pub struct DenseSolution<const N: usize> {
    steps: Vec<Step<N>>,
    s_end: f64,
    y_end: [f64; N],
}

impl<const N: usize> DenseSolution<N> {
    pub fn s_start(&self) -> f64 {
        self.steps.first().map_or(self.s_end, |st| st.s0)
    }

    pub fn s_end(&self) -> f64 {
        self.s_end
    }

    pub fn y_end(&self) -> [f64; N] {
        self.y_end
    }

    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }

    /// Mesh of accepted step boundaries, including both ends.
    pub fn nodes(&self) -> Vec<(f64, [f64; N])> {
        let mut out: Vec<_> = self.steps.iter().map(|st| (st.s0, st.y0)).collect();
        out.push((self.s_end, self.y_end));
        out
    }

    /// Evaluate the continuous extension. Arguments outside the integrated
    /// range are clamped to it.
    pub fn eval(&self, s: f64) -> [f64; N] {
        if self.steps.is_empty() || s >= self.s_end {
            return self.y_end;
        }
        let idx = self.steps.partition_point(|st| st.s0 <= s);
        let st = &self.steps[idx.saturating_sub(1)];
        st.eval(s.max(st.s0))
    }

    /// Drop everything beyond `s_cut` (which must lie in the integrated range).
    pub fn truncate(&mut self, s_cut: f64) {
        if s_cut >= self.s_end {
            return;
        }
        let y = self.eval(s_cut);
        let keep = self.steps.partition_point(|st| st.s0 < s_cut);
        self.steps.truncate(keep);
        self.s_end = s_cut;
        self.y_end = y;
    }
}

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// Reached the requested end point.
    Finished,
    /// Terminal event `index` fired (its function went from negative to
    /// non-negative) at the recorded end point.
    Event(usize),
    /// Step size fell below the admissible minimum.
    StepCollapse,
}

pub type EventFn<'a, const N: usize> = &'a dyn Fn(f64, &[f64; N]) -> f64;

fn err_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], c: &OdeControls) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = c.atol + c.rtol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Integrate `y' = rhs(s, y)` from `s0` toward `s_end`. The right side may
/// return `None` for an inadmissible state; the step is then rejected and
/// retried with a smaller size.
pub fn integrate<const N: usize, F>(
    mut rhs: F,
    s0: f64,
    y0: [f64; N],
    s_end: f64,
    ctrl: &OdeControls,
    events: &[EventFn<'_, N>],
) -> Result<(DenseSolution<N>, Termination)>
where
    F: FnMut(f64, &[f64; N]) -> Option<[f64; N]>,
{
    let mut f0 = rhs(s0, &y0).ok_or_else(|| Error::Integration {
        s: s0,
        msg: "right-hand side undefined at the initial state".into(),
    })?;

    // Initial step (Hairer, Nørsett & Wanner heuristic).
    let mut h = {
        let scale: Vec<f64> = y0.iter().map(|y| ctrl.atol + ctrl.rtol * y.abs()).collect();
        let rms = |v: &[f64; N]| {
            (v.iter()
                .zip(&scale)
                .map(|(x, s)| (x / s).powi(2))
                .sum::<f64>()
                / N as f64)
                .sqrt()
        };
        let d0 = rms(&y0);
        let d1 = rms(&f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let mut y1 = y0;
        for i in 0..N {
            y1[i] += h0 * f0[i];
        }
        let h1 = match rhs(s0 + h0, &y1) {
            Some(f1) => {
                let mut df = [0.0; N];
                for i in 0..N {
                    df[i] = f1[i] - f0[i];
                }
                let d2 = rms(&df) / h0;
                if d1.max(d2) <= 1e-15 {
                    (h0 * 1e-3).max(1e-6)
                } else {
                    (0.01 / d1.max(d2)).powf(0.2)
                }
            }
            None => h0,
        };
        (100.0 * h0).min(h1).min(ctrl.max_step)
    };

    let mut steps: Vec<Step<N>> = Vec::new();
    let mut s = s0;
    let mut y = y0;
    let mut ev_prev: Vec<f64> = events.iter().map(|e| e(s, &y)).collect();

    for _ in 0..ctrl.max_steps {
        if s >= s_end {
            return Ok((
                DenseSolution {
                    steps,
                    s_end: s,
                    y_end: y,
                },
                Termination::Finished,
            ));
        }
        let h_min = ctrl.min_step_rel * s.abs().max(1.0);
        h = h.min(ctrl.max_step).min(s_end - s);
        loop {
            if h < h_min {
                return Ok((
                    DenseSolution {
                        steps,
                        s_end: s,
                        y_end: y,
                    },
                    Termination::StepCollapse,
                ));
            }
            // Stages.
            let mut k = [[0.0; N]; 7];
            k[0] = f0;
            let mut ok = true;
            for st in 1..7 {
                let mut yst = y;
                for (j, kj) in k.iter().enumerate().take(st) {
                    let a = A[st][j];
                    if a != 0.0 {
                        for i in 0..N {
                            yst[i] += h * a * kj[i];
                        }
                    }
                }
                if st == 6 {
                    // Stage 7 is evaluated at the new solution (FSAL).
                    let mut yn = y;
                    for (j, kj) in k.iter().enumerate().take(6) {
                        for i in 0..N {
                            yn[i] += h * B[j] * kj[i];
                        }
                    }
                    yst = yn;
                }
                match rhs(s + C[st] * h, &yst) {
                    Some(v) if v.iter().all(|x| x.is_finite()) => k[st] = v,
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                h *= 0.25;
                continue;
            }
            let mut y_new = y;
            let mut err = [0.0; N];
            for i in 0..N {
                let mut acc = 0.0;
                let mut e = 0.0;
                for j in 0..7 {
                    acc += B[j] * k[j][i];
                    e += E[j] * k[j][i];
                }
                y_new[i] += h * acc;
                err[i] = h * e;
            }
            let en = err_norm(&err, &y, &y_new, ctrl);
            if !en.is_finite() || en > 1.0 {
                let fac = if en.is_finite() {
                    (0.9 * en.powf(-0.2)).max(0.2)
                } else {
                    0.2
                };
                h *= fac;
                continue;
            }
            // Accept.
            let mut q = [[0.0; 4]; N];
            for (i, qi) in q.iter_mut().enumerate() {
                for (m, qm) in qi.iter_mut().enumerate() {
                    *qm = (0..7).map(|j| k[j][i] * P[j][m]).sum();
                }
            }
            let step = Step { s0: s, h, y0: y, q };
            let s_new = s + h;
            steps.push(step);

            // Terminal events.
            let ev_new: Vec<f64> = events.iter().map(|e| e(s_new, &y_new)).collect();
            let mut fired: Option<(usize, f64)> = None;
            for (idx, (&before, &after)) in ev_prev.iter().zip(&ev_new).enumerate() {
                if before < 0.0 && after >= 0.0 {
                    let g = |x: f64| events[idx](x, &step.eval(x));
                    let (mut lo, mut hi) = (s, s_new);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        if g(mid) < 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    if fired.is_none_or(|(_, sf)| hi < sf) {
                        fired = Some((idx, hi));
                    }
                }
            }
            if let Some((idx, s_ev)) = fired {
                let y_ev = step.eval(s_ev);
                return Ok((
                    DenseSolution {
                        steps,
                        s_end: s_ev,
                        y_end: y_ev,
                    },
                    Termination::Event(idx),
                ));
            }
            ev_prev = ev_new;
            s = s_new;
            y = y_new;
            f0 = k[6];
            let fac = if en == 0.0 {
                10.0
            } else {
                (0.9 * en.powf(-0.2)).min(10.0)
            };
            h *= fac;
            break;
        }
    }
    Err(Error::Integration {
        s,
        msg: format!("exceeded {} steps", ctrl.max_steps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_and_dense_output() {
        let ctrl = OdeControls {
            max_step: 1.0,
            ..OdeControls::default()
        };
        let (sol, term) =
            integrate(|_, y: &[f64; 1]| Some([y[0]]), 0.0, [1.0], 2.0, &ctrl, &[]).unwrap();
        assert_eq!(term, Termination::Finished);
        assert!((sol.y_end()[0] - 2f64.exp()).abs() < 1e-8);
        for i in 0..=40 {
            let s = 0.05 * i as f64;
            let y = sol.eval(s)[0];
            assert!((y - s.exp()).abs() < 1e-8 * s.exp(), "s={s} y={y}");
        }
    }

    #[test]
    fn harmonic_oscillator_event_location() {
        // y = (cos s, -sin s); event when cos s crosses zero from below? use -cos.
        let ev = |_: f64, y: &[f64; 2]| -y[0];
        let (sol, term) = integrate(
            |_, y: &[f64; 2]| Some([y[1], -y[0]]),
            0.0,
            [1.0, 0.0],
            10.0,
            &OdeControls::default(),
            &[&ev],
        )
        .unwrap();
        assert_eq!(term, Termination::Event(0));
        assert!((sol.s_end() - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn rejected_states_shrink_the_step() {
        // Right side undefined for y > 1.5: the integration stops by step collapse.
        let (sol, term) = integrate(
            |_, y: &[f64; 1]| if y[0] > 1.5 { None } else { Some([1.0]) },
            0.0,
            [1.0],
            5.0,
            &OdeControls::default(),
            &[],
        )
        .unwrap();
        assert_eq!(term, Termination::StepCollapse);
        assert!(sol.s_end() > 0.49 && sol.s_end() <= 0.5 + 1e-12);
    }

    #[test]
    fn truncate_keeps_prefix() {
        let (mut sol, _) = integrate(
            |_, y: &[f64; 1]| Some([y[0]]),
            0.0,
            [1.0],
            1.0,
            &OdeControls::default(),
            &[],
        )
        .unwrap();
        sol.truncate(0.5);
        assert!((sol.s_end() - 0.5).abs() < 1e-15);
        assert!((sol.y_end()[0] - 0.5f64.exp()).abs() < 1e-9);
        assert!((sol.eval(0.25)[0] - 0.25f64.exp()).abs() < 1e-9);
    }
}
