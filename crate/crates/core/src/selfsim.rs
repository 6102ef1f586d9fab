//! Self-similar cavitating motions `w(R, t) = t φ(R/t)`.
//!
//! The trajectory is integrated in the de-singularised variables
//! `(φ, v)` with `v = φ̇ (φ/s)²`, which are regular at the cavity `s = 0`.
//! In terms of the radial and transverse stretches `a = φ̇`, `b = φ/s`,
//!
//! ```text
//! φ̇ = v s² / φ²
//! v̇ = 2 [v s³ (2 - s²) + v² s⁶ (s² - 1)/φ³ - φ³] / (s⁶ - s⁴ - h''(v) φ⁴)
//! ```
//!
//! The denominator is `s⁴ (s² - Φ11)`, so it vanishes exactly on the sonic
//! line. A precursor shock at `s = σ` joins the trajectory to the uniform
//! state `φ = λ s`, with `b` continuous and `a` jumping up to `λ`.

use rayon::prelude::*;
use serde::Serialize;

use crate::constitutive::EnergyFamily3D;
use crate::error::{positive, Error, NoSolutionReason, Result};
use crate::numerics::ode::{self, DenseSolution, OdeControls, Termination};
use crate::numerics::roots;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    SonicApproach,
    ShockCandidatePassed,
    MaxS,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverControls {
    pub ode: OdeControls,
    /// Integration stops once `Q = s² - Φ11 ≥ -eps_sonic`.
    pub eps_sonic: f64,
    pub s_max: f64,
    /// Initial shooting bracket for the cavity velocity `φ(0)`.
    pub phi_lo: f64,
    pub phi_hi: f64,
    /// Caps for geometric expansion of the bracket.
    pub phi_floor: f64,
    pub phi_ceiling: f64,
    /// Number of probes per scanned bracket.
    pub scan_points: usize,
    /// Minimum shock jump `λ - a₋` accepted as non-degenerate.
    pub jump_margin: f64,
}

impl Default for SolverControls {
    fn default() -> Self {
        Self {
            ode: OdeControls::default(),
            eps_sonic: 1e-8,
            s_max: 1e3,
            phi_lo: 1e-3,
            phi_hi: 1e2,
            phi_floor: 1e-6,
            phi_ceiling: 1e4,
            scan_points: 32,
            jump_margin: 1e-6,
        }
    }
}

impl SolverControls {
    /// Same controls with ODE tolerances divided by `factor`.
    pub fn tightened(mut self, factor: f64) -> Self {
        self.ode.rtol /= factor;
        self.ode.atol /= factor;
        self
    }
}

/// Closed-form right side of the `(φ, v)` system.
pub fn desingularized_rhs(fam: &EnergyFamily3D, s: f64, phi: f64, v: f64) -> Result<(f64, f64)> {
    if !(s >= 0.0) {
        return Err(Error::Domain {
            what: "s",
            value: s,
        });
    }
    positive("phi", phi)?;
    positive("v", v)?;
    let (dphi, dv, den) = rhs_parts(fam, s, phi, v);
    if den == 0.0 || !dv.is_finite() {
        return Err(Error::Sonic { s });
    }
    Ok((dphi, dv))
}

#[inline]
fn rhs_parts(fam: &EnergyFamily3D, s: f64, phi: f64, v: f64) -> (f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s2 * s2;
    let s6 = s4 * s2;
    let p3 = phi * phi * phi;
    let den = s6 - s4 - fam.d2h(v) * p3 * phi;
    let num = v * s3 * (2.0 - s2) + v * v * s6 * (s2 - 1.0) / p3 - p3;
    (v * s2 / (phi * phi), 2.0 * num / den, den)
}

/// Right side `(ȧ, ḃ)` of the self-similar system in the stretches:
/// `(s² - Φ11) ȧ = 2 (a - b) P / s`, `ḃ = (a - b)/s`.
pub fn ab_system_rhs(fam: &EnergyFamily3D, s: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    positive("s", s)?;
    let p = fam.p_coefficient(a, b)?;
    let q = s * s - fam.phi11(a, b);
    if q == 0.0 {
        return Err(Error::Sonic { s });
    }
    Ok((2.0 * (a - b) * p / (s * q), (a - b) / s))
}

/// One sample of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajPoint {
    pub s: f64,
    pub phi: f64,
    pub v: f64,
    pub a: f64,
    pub b: f64,
    #[serde(rename = "Q")]
    pub q: f64,
}

/// Integrated cavity trajectory with dense output.
#[derive(Debug, Clone)]
pub struct CavityTrajectory {
    pub family: EnergyFamily3D,
    pub phi0: f64,
    pub v0: f64,
    pub stop_reason: StopReason,
    dense: DenseSolution<2>,
}

impl CavityTrajectory {
    pub fn s_end(&self) -> f64 {
        self.dense.s_end()
    }

    fn point(&self, s: f64, y: [f64; 2]) -> TrajPoint {
        let [phi, v] = y;
        let a = v * s * s / (phi * phi);
        if s == 0.0 {
            return TrajPoint {
                s,
                phi,
                v,
                a: 0.0,
                b: f64::INFINITY,
                q: f64::NEG_INFINITY,
            };
        }
        let b = phi / s;
        let b2 = b * b;
        let q = s * s - 1.0 - self.family.d2h(v) * b2 * b2;
        TrajPoint { s, phi, v, a, b, q }
    }

    /// State at `s`, clamped to the integrated range.
    pub fn eval(&self, s: f64) -> TrajPoint {
        let s = s.clamp(0.0, self.s_end());
        self.point(s, self.dense.eval(s))
    }

    /// `φ(s)` and `a(s) = φ̇(s)` without the rest of the bookkeeping.
    #[inline]
    pub fn phi_and_slope(&self, s: f64) -> (f64, f64) {
        let [phi, v] = self.dense.eval(s);
        (phi, v * s * s / (phi * phi))
    }

    /// Accepted step boundaries plus `refine - 1` interior samples per step.
    pub fn grid(&self, refine: usize) -> Vec<TrajPoint> {
        let nodes = self.dense.nodes();
        let refine = refine.max(1);
        let mut out = Vec::with_capacity(nodes.len() * refine);
        for w in nodes.windows(2) {
            let (s0, y0) = w[0];
            let s1 = w[1].0;
            out.push(self.point(s0, y0));
            for k in 1..refine {
                let s = s0 + (s1 - s0) * k as f64 / refine as f64;
                out.push(self.point(s, self.dense.eval(s)));
            }
        }
        if let Some(&(s, y)) = nodes.last() {
            out.push(self.point(s, y));
        }
        out.dedup_by(|x, y| x.s == y.s);
        out
    }

    /// Check the monotone structure `a ↗`, `b ↘`, `a - b ↗ < 0`, `Q < 0` on
    /// the interior nodes. Returns a description of the first violation.
    pub fn structure_violation(&self) -> Option<String> {
        let g = self.grid(1);
        let interior: Vec<&TrajPoint> = g.iter().filter(|p| p.s > 0.0).collect();
        for w in interior.windows(2) {
            let (p, n) = (w[0], w[1]);
            // Near the sonic line successive nodes differ only at roundoff.
            let tol = 1e-12 * (1.0 + p.a.abs() + p.b.abs());
            if !(n.a > p.a - tol) {
                return Some(format!("a not increasing at s = {}", n.s));
            }
            if !(n.b < p.b + tol) {
                return Some(format!("b not decreasing at s = {}", n.s));
            }
            if !(n.a - n.b > p.a - p.b - tol) {
                return Some(format!("a - b not increasing at s = {}", n.s));
            }
        }
        for p in &interior {
            if !(p.a < p.b) {
                return Some(format!("a >= b at s = {}", p.s));
            }
            if !(p.q < 0.0) {
                return Some(format!("Q >= 0 at s = {}", p.s));
            }
        }
        None
    }

    fn uniform(&self, s_lo: f64, samples: usize) -> Vec<f64> {
        let s_hi = self.s_end();
        let k = samples.max(2);
        (0..k)
            .map(|i| s_lo + (s_hi - s_lo) * i as f64 / (k - 1) as f64)
            .collect()
    }

    /// Smallest normalised second difference `(φ(s+h) - 2φ(s) + φ(s-h)) / h²`
    /// over a uniform grid of the computed range; convexity needs `≥ 0`.
    pub fn min_second_difference(&self, samples: usize) -> f64 {
        let s = self.uniform(0.0, samples);
        s.windows(3)
            .map(|w| {
                let h = w[1] - w[0];
                let f = |x: f64| self.dense.eval(x)[0];
                (f(w[2]) - 2.0 * f(w[1]) + f(w[0])) / (h * h)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest relative defect of `d(s b)/ds = a`, with the derivative taken
    /// by central differences of the dense output on `[s_lo, s_end]`.
    pub fn involution_residual(&self, s_lo: f64, samples: usize) -> f64 {
        let e = 1e-5 * self.s_end();
        self.uniform(s_lo + e, samples)
            .into_iter()
            .map(|s| {
                let s = s.min(self.s_end() - e);
                let sb = |x: f64| {
                    let p = self.eval(x);
                    x * p.b
                };
                let d = (sb(s + e) - sb(s - e)) / (2.0 * e);
                let a = self.eval(s).a;
                ((d - a) / a).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest relative gap between the `(φ, v)` right side and the chain
    /// rule applied to the `(a, b)` system along the trajectory.
    pub fn rhs_consistency(&self, s_lo: f64, samples: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        for s in self.uniform(s_lo, samples) {
            let p = self.eval(s);
            let (dphi, dv) = desingularized_rhs(&self.family, s, p.phi, p.v)?;
            let (da, db) = ab_system_rhs(&self.family, s, p.a, p.b)?;
            let dv_chain = da * p.b * p.b + 2.0 * p.a * p.b * db;
            worst = worst.max(((dv - dv_chain) / dv_chain).abs());
            worst = worst.max(((dphi - p.a) / p.a).abs());
        }
        Ok(worst)
    }

    /// `(min v, max v)` over the accepted steps.
    pub fn volume_range(&self) -> (f64, f64) {
        self.grid(1)
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.v), hi.max(p.v))
            })
    }
}

fn run(
    fam: &EnergyFamily3D,
    phi0: f64,
    v0: f64,
    stop_at_stretch: Option<f64>,
    ctrl: &SolverControls,
) -> Result<CavityTrajectory> {
    positive("phi0", phi0)?;
    positive("v0", v0)?;
    let f = *fam;
    let rhs = move |s: f64, y: &[f64; 2]| {
        let [phi, v] = *y;
        if !(phi > 0.0 && v > 0.0) {
            return None;
        }
        let (dphi, dv, den) = rhs_parts(&f, s, phi, v);
        // Crossing the sonic line flips the sign of the denominator.
        if !(den < 0.0) {
            return None;
        }
        Some([dphi, dv])
    };
    let eps = ctrl.eps_sonic;
    let sonic = move |s: f64, y: &[f64; 2]| {
        if s == 0.0 {
            return f64::NEG_INFINITY;
        }
        let b = y[0] / s;
        let b2 = b * b;
        s * s - 1.0 - f.d2h(y[1]) * b2 * b2 + eps
    };
    let lam = stop_at_stretch.unwrap_or(0.0);
    let stretch = move |s: f64, y: &[f64; 2]| {
        if s == 0.0 {
            f64::NEG_INFINITY
        } else {
            lam - y[0] / s
        }
    };
    let events: Vec<ode::EventFn<'_, 2>> = if stop_at_stretch.is_some() {
        vec![&sonic, &stretch]
    } else {
        vec![&sonic]
    };
    let (dense, term) = ode::integrate(rhs, 0.0, [phi0, v0], ctrl.s_max, &ctrl.ode, &events)?;
    let stop_reason = match term {
        Termination::Finished => StopReason::MaxS,
        Termination::Event(0) => StopReason::SonicApproach,
        Termination::Event(_) => StopReason::ShockCandidatePassed,
        Termination::StepCollapse => {
            let traj = CavityTrajectory {
                family: *fam,
                phi0,
                v0,
                stop_reason: StopReason::SonicApproach,
                dense,
            };
            let end = traj.eval(traj.s_end());
            // The square-root singularity at the sonic line stalls the step
            // size before Q reaches the guard band.
            if end.q > -1e-3 * end.s.powi(2).max(1.0) {
                return Ok(traj);
            }
            return Err(Error::Integration {
                s: end.s,
                msg: format!(
                    "step size collapse away from the sonic line (Q = {})",
                    end.q
                ),
            });
        }
    };
    Ok(CavityTrajectory {
        family: *fam,
        phi0,
        v0,
        stop_reason,
        dense,
    })
}

/// Integrate from the cavity until the sonic guard band or `s_max`.
pub fn integrate_from_cavity(
    fam: &EnergyFamily3D,
    phi0: f64,
    v0: f64,
    ctrl: &SolverControls,
) -> Result<CavityTrajectory> {
    let traj = run(fam, phi0, v0, None, ctrl)?;
    if let Some(msg) = traj.structure_violation() {
        return Err(Error::Integration {
            s: traj.s_end(),
            msg: format!("monotonicity violated: {msg}"),
        });
    }
    Ok(traj)
}

/// `σ² (λ - a₋) - (Φ1(λ,λ,λ) - Φ1(a₋,λ,λ))`.
pub fn rh_residual(fam: &EnergyFamily3D, sigma: f64, a_minus: f64, lambda: f64) -> Result<f64> {
    positive("sigma", sigma)?;
    positive("a_minus", a_minus)?;
    positive("lambda", lambda)?;
    Ok(sigma * sigma * (lambda - a_minus) - (fam.phi1(lambda, lambda) - fam.phi1(a_minus, lambda)))
}

/// Precursor shock joining the trajectory to the uniform state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShockJunction {
    pub sigma: f64,
    pub a_minus: f64,
    pub lambda: f64,
    pub rh_residual: f64,
    pub lax_ok: bool,
}

impl ShockJunction {
    pub fn new(fam: &EnergyFamily3D, sigma: f64, a_minus: f64, lambda: f64) -> Result<Self> {
        let rh = rh_residual(fam, sigma, a_minus, lambda)?;
        let s2 = sigma * sigma;
        let lax_ok =
            a_minus < lambda && fam.phi11(lambda, lambda) <= s2 && s2 <= fam.phi11(a_minus, lambda);
        Ok(Self {
            sigma,
            a_minus,
            lambda,
            rh_residual: rh,
            lax_ok,
        })
    }

    /// Particle velocity behind the shock, `σ (λ - a₋)`.
    pub fn velocity_behind(&self) -> f64 {
        self.sigma * (self.lambda - self.a_minus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CavityCondition {
    StressFree,
    PrescribedV0(f64),
}

impl CavityCondition {
    pub fn v0(&self, fam: &EnergyFamily3D) -> Result<f64> {
        match *self {
            CavityCondition::StressFree => fam.cavity_pressure_root(),
            CavityCondition::PrescribedV0(v0) => positive("v0", v0),
        }
    }
}

/// Cavitating self-similar solution.
#[derive(Debug, Clone)]
pub struct CavitySolution {
    pub family: EnergyFamily3D,
    /// Trajectory on `[0, σ]`.
    pub trajectory: CavityTrajectory,
    pub junction: ShockJunction,
    pub phi0: f64,
    pub v0: f64,
    /// Number of sign changes of the shooting residual found on the bracket.
    pub root_count: usize,
}

impl CavitySolution {
    pub fn lambda(&self) -> f64 {
        self.junction.lambda
    }

    pub fn sigma(&self) -> f64 {
        self.junction.sigma
    }

    /// `φ(s)` and `φ̇(s)` on the whole half line, uniform state beyond `σ`.
    #[inline]
    pub fn profile(&self, s: f64) -> (f64, f64) {
        if s >= self.junction.sigma {
            (self.junction.lambda * s, self.junction.lambda)
        } else {
            self.trajectory.phi_and_slope(s)
        }
    }

    /// Radial displacement `w(R, t) = t φ(R/t)` for `R ≥ 0`, `t > 0`.
    pub fn w(&self, r: f64, t: f64) -> f64 {
        t * self.profile(r / t).0
    }

    /// `(w, w_R, w_t)` at `(R, t)`, `R ≥ 0`, `t > 0`.
    #[inline]
    pub fn fields(&self, r: f64, t: f64) -> (f64, f64, f64) {
        let s = r / t;
        let (phi, a) = self.profile(s);
        (t * phi, a, phi - s * a)
    }

    /// True when `b(σ) = λ` and `a(σ-) = a₋` agree with the stored junction.
    pub fn junction_consistency(&self) -> (f64, f64) {
        let end = self.trajectory.eval(self.junction.sigma);
        (
            (end.b - self.junction.lambda).abs(),
            (end.a - self.junction.a_minus).abs(),
        )
    }
}

#[derive(Debug, Clone)]
enum Probe {
    Reached { phi0: f64, g: f64 },
    Sonic { phi0: f64 },
}

impl Probe {
    fn phi0(&self) -> f64 {
        match *self {
            Probe::Reached { phi0, .. } | Probe::Sonic { phi0 } => phi0,
        }
    }
}

fn probe_traj(
    fam: &EnergyFamily3D,
    lambda: f64,
    v0: f64,
    phi0: f64,
    ctrl: &SolverControls,
) -> Result<Option<(CavityTrajectory, ShockJunction)>> {
    let traj = run(fam, phi0, v0, Some(lambda), ctrl)?;
    if traj.stop_reason != StopReason::ShockCandidatePassed {
        return Ok(None);
    }
    let sigma = traj.s_end();
    let end = traj.eval(sigma);
    let j = ShockJunction::new(fam, sigma, end.a, lambda)?;
    Ok(Some((traj, j)))
}

fn probe(
    fam: &EnergyFamily3D,
    lambda: f64,
    v0: f64,
    phi0: f64,
    ctrl: &SolverControls,
) -> Result<Probe> {
    Ok(match probe_traj(fam, lambda, v0, phi0, ctrl)? {
        Some((_, j)) => Probe::Reached {
            phi0,
            g: j.rh_residual,
        },
        None => Probe::Sonic { phi0 },
    })
}

fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Refine the reach/sonic boundary between `reached` and `sonic`, returning
/// the reached probe closest to it.
fn refine_boundary(
    fam: &EnergyFamily3D,
    lambda: f64,
    v0: f64,
    mut reached: f64,
    mut sonic: f64,
    ctrl: &SolverControls,
) -> Result<Option<(f64, f64)>> {
    let mut best = None;
    for _ in 0..60 {
        let mid = (reached * sonic).sqrt();
        if (mid - reached).abs() <= 1e-13 * reached {
            break;
        }
        match probe(fam, lambda, v0, mid, ctrl)? {
            Probe::Reached { g, .. } => {
                reached = mid;
                best = Some((mid, g));
                if g > 0.0 {
                    break;
                }
            }
            Probe::Sonic { .. } => sonic = mid,
        }
    }
    Ok(best)
}

/// Shoot on the cavity velocity `φ(0)` so that the precursor shock at the
/// point where `b = λ` satisfies the Rankine-Hugoniot condition.
pub fn shoot_cavity_solution(
    fam: &EnergyFamily3D,
    lambda: f64,
    condition: CavityCondition,
    ctrl: &SolverControls,
) -> Result<CavitySolution> {
    positive("lambda", lambda)?;
    let v0 = condition.v0(fam)?;
    let n = ctrl.scan_points.max(4);

    let mut lo = ctrl.phi_lo;
    let mut hi = ctrl.phi_hi;
    let mut segments = vec![(lo, hi)];
    let mut ever_reached = false;
    let mut all_probes: Vec<Probe> = Vec::new();

    let brackets = loop {
        let (seg_lo, seg_hi) = *segments.last().expect("segment");
        let pts = geomspace(seg_lo, seg_hi, n);
        let probes: Vec<Probe> = pts
            .par_iter()
            .map(|&p| probe(fam, lambda, v0, p, ctrl))
            .collect::<Result<_>>()?;
        all_probes.extend(probes);
        all_probes.sort_by(|x, y| x.phi0().total_cmp(&y.phi0()));
        all_probes.dedup_by(|x, y| x.phi0() == y.phi0());

        let mut brackets: Vec<(f64, f64)> = Vec::new();
        for w in all_probes.windows(2) {
            match (&w[0], &w[1]) {
                (Probe::Reached { phi0: p0, g: g0 }, Probe::Reached { phi0: p1, g: g1 }) => {
                    if g0.signum() != g1.signum() {
                        brackets.push((*p0, *p1));
                    }
                }
                (Probe::Reached { phi0: p0, g: g0 }, Probe::Sonic { phi0: p1 }) if *g0 < 0.0 => {
                    if let Some((pr, gr)) = refine_boundary(fam, lambda, v0, *p0, *p1, ctrl)? {
                        if gr > 0.0 {
                            brackets.push((*p0, pr));
                        }
                    }
                }
                (Probe::Sonic { phi0: p0 }, Probe::Reached { phi0: p1, g: g1 }) if *g1 < 0.0 => {
                    if let Some((pr, gr)) = refine_boundary(fam, lambda, v0, *p1, *p0, ctrl)? {
                        if gr > 0.0 {
                            brackets.push((pr, *p1));
                        }
                    }
                }
                _ => {}
            }
        }
        ever_reached |= all_probes
            .iter()
            .any(|p| matches!(p, Probe::Reached { .. }));
        if !brackets.is_empty() {
            break brackets;
        }
        // Expand toward whichever end could still hide a root.
        let first = all_probes.first().expect("probes");
        let last = all_probes.last().expect("probes");
        if matches!(last, Probe::Reached { g, .. } if *g < 0.0) && hi < ctrl.phi_ceiling {
            let nhi = (hi * 10.0).min(ctrl.phi_ceiling);
            segments.push((hi, nhi));
            hi = nhi;
        } else if matches!(first, Probe::Sonic { .. }) && lo > ctrl.phi_floor {
            let nlo = (lo / 10.0).max(ctrl.phi_floor);
            segments.push((nlo, lo));
            lo = nlo;
        } else {
            return Err(Error::NoCavitatingSolution {
                lambda,
                reason: if ever_reached {
                    NoSolutionReason::NoSignChange
                } else {
                    NoSolutionReason::SonicBeforeStretch
                },
                phi_lo: lo,
                phi_hi: hi,
            });
        }
    };

    let root_count = brackets.len();
    let mut last_err = None;
    for (b_lo, b_hi) in brackets {
        let g = |p: f64| match probe(fam, lambda, v0, p, ctrl) {
            Ok(Probe::Reached { g, .. }) => g,
            _ => f64::NAN,
        };
        let root = match roots::brent(g, b_lo, b_hi, 1e-15 * b_hi, 1e-12) {
            Ok(r) => r,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let Some((traj, junction)) = probe_traj(fam, lambda, v0, root, ctrl)? else {
            continue;
        };
        if !junction.lax_ok || junction.lambda - junction.a_minus <= ctrl.jump_margin {
            continue;
        }
        return Ok(CavitySolution {
            family: *fam,
            trajectory: traj,
            junction,
            phi0: root,
            v0,
            root_count,
        });
    }
    Err(last_err.unwrap_or(Error::NoCavitatingSolution {
        lambda,
        reason: NoSolutionReason::NoSignChange,
        phi_lo: lo,
        phi_hi: hi,
    }))
}

/// Bisection record for the operational critical stretch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalStretch {
    /// Largest probed stretch without a cavitating solution.
    pub lower: f64,
    /// Smallest probed stretch with one.
    pub upper: f64,
    /// Every probe `(λ, solvable)` in evaluation order.
    pub probes: Vec<(f64, bool)>,
}

impl CriticalStretch {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Solvability is an upper set in `λ` over all probes.
    pub fn is_monotone(&self) -> bool {
        let mut p = self.probes.clone();
        p.sort_by(|x, y| x.0.total_cmp(&y.0));
        p.windows(2).all(|w| !(w[0].1 && !w[1].1))
    }
}

fn solvable(
    fam: &EnergyFamily3D,
    lambda: f64,
    cond: CavityCondition,
    ctrl: &SolverControls,
) -> Result<bool> {
    match shoot_cavity_solution(fam, lambda, cond, ctrl) {
        Ok(_) => Ok(true),
        Err(Error::NoCavitatingSolution { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Bisect on `λ` over solvability of [`shoot_cavity_solution`].
pub fn critical_stretch(
    fam: &EnergyFamily3D,
    bracket: (f64, f64),
    tol: f64,
    cond: CavityCondition,
    ctrl: &SolverControls,
) -> Result<CriticalStretch> {
    let (mut lo, mut hi) = bracket;
    positive("lambda bracket lower end", lo)?;
    positive("tolerance", tol)?;
    if !(hi > lo) {
        return Err(Error::Bracket(format!(
            "empty stretch bracket [{lo}, {hi}]"
        )));
    }
    let mut probes = Vec::new();
    let top = solvable(fam, hi, cond, ctrl)?;
    probes.push((hi, top));
    if !top {
        return Err(Error::Bracket(format!(
            "no cavitating solution at the top of the bracket, lambda = {hi}"
        )));
    }
    let bottom = solvable(fam, lo, cond, ctrl)?;
    probes.push((lo, bottom));
    if bottom {
        return Err(Error::Bracket(format!(
            "cavitating solution already at the bottom of the bracket, lambda = {lo}"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let ok = solvable(fam, mid, cond, ctrl)?;
        probes.push((mid, ok));
        if ok {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(CriticalStretch {
        lower: lo,
        upper: hi,
        probes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShockNecessityReport {
    pub jump: f64,
    pub margin: f64,
    pub nondegenerate: bool,
}

/// The cavitating profile cannot join the uniform state continuously: the
/// jump `λ - a₋` must be strictly positive and above `margin`.
pub fn precursor_shock_necessity_check(
    sol: &CavitySolution,
    margin: f64,
) -> Result<ShockNecessityReport> {
    let jump = sol.junction.lambda - sol.junction.a_minus;
    let report = ShockNecessityReport {
        jump,
        margin,
        nondegenerate: jump > margin,
    };
    if !report.nondegenerate {
        return Err(Error::Verification(format!(
            "degenerate precursor shock: jump {jump} <= margin {margin} (a C1 junction is excluded)"
        )));
    }
    Ok(report)
}
