//! Radial mollification `wⁿ = φ_n ⋆_R w̃` of self-similar motions, with
//! `w̃` the odd extension of `w(·, t)` to the whole line.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use super::fields::{TestField, TestFieldKind};
use super::mollifier::MollifierSpec;
use crate::constitutive::EnergyFamily3D;
use crate::error::{positive, Error, Result};
use crate::numerics::{GaussLegendre, Quadrature};
use crate::selfsim::CavitySolution;

/// A self-similar radial motion `w = t φ(R/t)` that is uniform, `φ = λs`,
/// beyond `s = σ`.
pub trait RadialMotion: Sync {
    fn family(&self) -> &EnergyFamily3D;
    fn lambda(&self) -> f64;
    /// Outer edge of the non-uniform region in similarity variables.
    fn sigma(&self) -> f64;
    /// `φ(0)`, zero without a cavity.
    fn cavity_velocity(&self) -> f64;
    /// `(φ(s), φ̇(s))` for `s > 0`.
    fn profile(&self, s: f64) -> (f64, f64);
}

impl RadialMotion for CavitySolution {
    fn family(&self) -> &EnergyFamily3D {
        &self.family
    }
    fn lambda(&self) -> f64 {
        self.junction.lambda
    }
    fn sigma(&self) -> f64 {
        self.junction.sigma
    }
    fn cavity_velocity(&self) -> f64 {
        self.phi0
    }
    fn profile(&self, s: f64) -> (f64, f64) {
        CavitySolution::profile(self, s)
    }
}

/// The homogeneous deformation `w = λR`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homogeneous {
    pub family: EnergyFamily3D,
    pub lambda: f64,
}

impl RadialMotion for Homogeneous {
    fn family(&self) -> &EnergyFamily3D {
        &self.family
    }
    fn lambda(&self) -> f64 {
        self.lambda
    }
    fn sigma(&self) -> f64 {
        0.0
    }
    fn cavity_velocity(&self) -> f64 {
        0.0
    }
    fn profile(&self, s: f64) -> (f64, f64) {
        (self.lambda * s, self.lambda)
    }
}

/// Mollified displacement and its derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MollifiedPoint {
    pub r: f64,
    pub w: f64,
    pub w_r: f64,
    pub w_t: f64,
}

impl MollifiedPoint {
    /// Transverse stretch `wⁿ/R`; at `R = 0` its limit `wⁿ_R(0)`.
    pub fn b(&self) -> f64 {
        if self.r == 0.0 {
            self.w_r
        } else {
            self.w / self.r
        }
    }

    /// Specific volume `vⁿ = wⁿ_R (wⁿ/R)²`.
    pub fn v(&self) -> f64 {
        let b = self.b();
        self.w_r * b * b
    }
}

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(48))
}

/// Evaluator for `wⁿ` of a fixed motion at mollification level `n`.
pub struct Mollified<'a, M: RadialMotion + ?Sized> {
    pub motion: &'a M,
    pub mollifier: &'a MollifierSpec,
    pub n: f64,
}

impl<'a, M: RadialMotion + ?Sized> Mollified<'a, M> {
    pub fn new(motion: &'a M, mollifier: &'a MollifierSpec, n: u32) -> Self {
        Self {
            motion,
            mollifier,
            n: n as f64,
        }
    }

    /// `(w̃, w̃_R, w̃_t)` of the odd extension at `z ≠ 0`.
    #[inline]
    fn extended(&self, z: f64, t: f64) -> (f64, f64, f64) {
        let sign = z.signum();
        let s = z.abs() / t;
        let (phi, a) = if s >= self.motion.sigma() {
            let l = self.motion.lambda();
            (l * s, l)
        } else {
            self.motion.profile(s)
        };
        (sign * t * phi, a, sign * (phi - s * a))
    }

    /// `wⁿ`, `wⁿ_R`, `wⁿ_t` at `(R, t)`, `R ≥ 0`, `t > 0`.
    pub fn eval(&self, r: f64, t: f64) -> MollifiedPoint {
        let n = self.n;
        let lam = self.motion.lambda();
        let edge = self.motion.sigma() * t;
        if r - 1.0 / n >= edge {
            return MollifiedPoint {
                r,
                w: lam * r,
                w_r: lam,
                w_t: 0.0,
            };
        }
        // z = R - u/n for u in [-1, 1]; split where w̃ is not smooth and at
        // the centre of the kernel.
        let mut cuts = [-1.0, 0.0, 1.0, n * r, n * (r - edge), n * (r + edge)];
        cuts.sort_by(|a, b| a.total_cmp(b));
        let gl = rule();
        let (mut w, mut w_r, mut w_t) = (0.0, 0.0, 0.0);
        let mut lo = -1.0f64;
        for &c in &cuts {
            let hi = c.min(1.0);
            if hi <= lo {
                continue;
            }
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for (x, wt) in gl.nodes.iter().zip(&gl.weights) {
                let u = mid + half * x;
                let k = wt * half * self.mollifier.density(u);
                let z = r - u / n;
                if z == 0.0 {
                    continue;
                }
                let (f, fr, ft) = self.extended(z, t);
                w += k * f;
                w_r += k * fr;
                w_t += k * ft;
            }
            lo = hi;
            if lo >= 1.0 {
                break;
            }
        }
        // Jump of w̃ across z = 0.
        w_r += 2.0 * t * self.motion.cavity_velocity() * self.mollifier.scaled(n, r);
        if r == 0.0 {
            // Odd integrands vanish exactly at the centre.
            w = 0.0;
            w_t = 0.0;
        }
        MollifiedPoint { r, w, w_r, w_t }
    }
}

/// Mollified field on an explicit radial grid.
pub fn mollify_radial<M: RadialMotion + ?Sized>(
    motion: &M,
    mollifier: &MollifierSpec,
    n: u32,
    t: f64,
    grid: &[f64],
) -> Result<Vec<MollifiedPoint>> {
    positive("t", t)?;
    let max_gap = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Resolution(
            "radial grid must be strictly increasing".into(),
        ));
    }
    let needed = 1.0 / (32.0 * n as f64);
    if max_gap > needed * (1.0 + 1e-12) {
        return Err(Error::Resolution(format!(
            "grid spacing {max_gap} exceeds 1/(32 n) = {needed} at n = {n}"
        )));
    }
    let m = Mollified::new(motion, mollifier, n);
    Ok(grid.iter().map(|&r| m.eval(r, t)).collect())
}

/// Uniform grid on `[0, r_max]` with `per_layer` points per `1/n`.
pub fn layer_grid(n: u32, r_max: f64, per_layer: usize) -> Vec<f64> {
    let h = 1.0 / (n as f64 * per_layer as f64);
    let k = (r_max / h).ceil() as usize;
    (0..=k).map(|i| i as f64 * h).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetReport {
    pub n: u32,
    pub t: f64,
    /// `min vⁿ` over the grid, the admissibility margin `ε_n`.
    pub epsilon_n: f64,
    pub argmin_r: f64,
    /// `wⁿ(·, t)` strictly increasing on the grid.
    pub monotone: bool,
    pub points: usize,
}

/// Minimum of the mollified Jacobian determinant over a grid resolving `1/n`,
/// out to two kernel widths past the outer edge of the fan.
pub fn det_positivity<M: RadialMotion + ?Sized>(
    motion: &M,
    mollifier: &MollifierSpec,
    n: u32,
    t: f64,
) -> Result<DetReport> {
    let r_max = motion.sigma() * t + 2.0 / n as f64;
    let grid = layer_grid(n, r_max, 32);
    let pts = mollify_radial(motion, mollifier, n, t, &grid)?;
    let (mut eps, mut arg) = (f64::INFINITY, 0.0);
    for p in &pts {
        let v = p.v();
        if v < eps {
            eps = v;
            arg = p.r;
        }
    }
    let monotone = pts.windows(2).all(|w| w[1].w > w[0].w);
    let rep = DetReport {
        n,
        t,
        epsilon_n: eps,
        argmin_r: arg,
        monotone,
        points: pts.len(),
    };
    if !(eps > 0.0) {
        return Err(Error::Verification(format!(
            "mollified determinant {eps} <= 0 at R = {arg}, n = {n}"
        )));
    }
    Ok(rep)
}

/// Fitted constants of the cavity-layer sandwich
/// `c_φ n³ w(0,t)³ ≤ vⁿ ≤ c₃ (1 + t³n³)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerBounds {
    pub n: u32,
    pub t: f64,
    /// `min vⁿ / (n³ w(0,t)³)` over `R < 1/(2n)`.
    pub c_phi: f64,
    /// `max vⁿ / (1 + t³n³)` over `R < 1/n`.
    pub c3: f64,
}

pub fn layer_bounds<M: RadialMotion + ?Sized>(
    motion: &M,
    mollifier: &MollifierSpec,
    n: u32,
    t: f64,
) -> Result<LayerBounds> {
    let nf = n as f64;
    let w0 = t * motion.cavity_velocity();
    positive("cavity opening w(0,t)", w0)?;
    let grid: Vec<f64> = layer_grid(n, 1.0 / nf, 64)
        .into_iter()
        .filter(|&r| r < 1.0 / nf)
        .collect();
    let pts = mollify_radial(motion, mollifier, n, t, &grid)?;
    let mut c_phi = f64::INFINITY;
    let mut c3 = 0.0f64;
    for p in &pts {
        let v = p.v();
        if p.r < 0.5 / nf {
            c_phi = c_phi.min(v / (nf * w0).powi(3));
        }
        c3 = c3.max(v / (1.0 + (t * nf).powi(3)));
    }
    Ok(LayerBounds { n, t, c_phi, c3 })
}

fn radial_parts(field: &TestField) -> Result<(f64, (f64, f64))> {
    match field.kind {
        TestFieldKind::Radial3D { radius, .. } => Ok((radius, field.t_support())),
        TestFieldKind::Scalar1D { .. } => Err(Error::Contract(format!(
            "test field {} is not radial",
            field.name
        ))),
    }
}

/// Window of the radial weak form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialWindow {
    /// The whole support of the test field.
    Full,
    /// Only the cavity layer `R < 1/n`.
    Layer,
}

/// Action `⟨fⁿ, ψ⟩` of the radial momentum residual on `ψ = g x/R`:
/// `4π ∬ [wⁿ_t g_t - Φ1 g_R - 2 Φ2 g/R] R² dR dt`.
pub fn weak_residual_3d<M: RadialMotion + ?Sized>(
    motion: &M,
    mollifier: &MollifierSpec,
    n: u32,
    field: &TestField,
    window: RadialWindow,
    quad: &Quadrature,
) -> Result<f64> {
    let (radius, (t0, t1)) = radial_parts(field)?;
    let nf = n as f64;
    let m = Mollified::new(motion, mollifier, n);
    let fam = motion.family();
    let r_hi = match window {
        RadialWindow::Full => radius,
        RadialWindow::Layer => radius.min(1.0 / nf),
    };
    let inner = |t: f64| -> Result<f64> {
        let edge = motion.sigma() * t;
        let cuts = [1.0 / nf, 0.5 / nf, edge - 1.0 / nf, edge, edge + 1.0 / nf];
        let res = quad.integrate(
            |r| {
                if r == 0.0 {
                    return 0.0;
                }
                let p = m.eval(r, t);
                let g = field.eval(r, t);
                let b = p.b();
                let a = p.w_r;
                let integrand = p.w_t * g.d_time
                    - fam.phi1(a, b) * g.d_space
                    - 2.0 * fam.phi2(a, b) * field.radial_ratio(r, t);
                integrand * r * r
            },
            0.0,
            r_hi,
            &cuts,
        )?;
        Ok(res.value)
    };
    let outer = Quadrature::new(quad.epsabs * 10.0, quad.epsrel * 10.0);
    let mut err = None;
    let v = outer.integrate(
        |t| match inner(t) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        t0,
        t1,
        &[],
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(4.0 * PI * v?.value)
}

/// `4π ∫_0^ρ [½(wⁿ_t)² + Φ(wⁿ_R, wⁿ/R, wⁿ/R) - Φ(λ,λ,λ)] R² dR` at time `t`.
pub fn mollified_energy<M: RadialMotion + ?Sized>(
    motion: &M,
    mollifier: &MollifierSpec,
    n: u32,
    t: f64,
    rho: f64,
    quad: &Quadrature,
) -> Result<f64> {
    positive("t", t)?;
    let nf = n as f64;
    let edge = motion.sigma() * t;
    if !(rho >= edge + 1.0 / nf) {
        return Err(Error::Contract(format!(
            "ball radius {rho} does not contain the mollified fan (edge {})",
            edge + 1.0 / nf
        )));
    }
    let m = Mollified::new(motion, mollifier, n);
    let fam = motion.family();
    let lam = motion.lambda();
    let reference = fam.phi_ab(lam, lam);
    let cuts = [1.0 / nf, 0.5 / nf, edge - 1.0 / nf, edge, edge + 1.0 / nf];
    let res = quad.integrate(
        |r| {
            if r == 0.0 {
                return 0.0;
            }
            let p = m.eval(r, t);
            (0.5 * p.w_t * p.w_t + fam.phi_ab(p.w_r, p.b()) - reference) * r * r
        },
        0.0,
        rho,
        &cuts,
    )?;
    Ok(4.0 * PI * res.value)
}
