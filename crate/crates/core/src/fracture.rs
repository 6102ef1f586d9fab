//! One-dimensional self-similar fracture fan.
//!
//! ```text
//!          ⎧ λξ          ξ > σ
//! Y(ξ) =   ⎨ Y0 + αξ     0 < ξ < σ
//!          ⎪ -Y0 + αξ   -σ < ξ < 0
//!          ⎩ λξ          ξ < -σ
//! ```
//!
//! Two outgoing shocks at `ξ = ±σ` join the uniform far field to an inner
//! state of lower stretch `α`; the crack at `x = 0` opens at rate `2 Y0`.

use serde::Serialize;

use crate::constitutive::{ExtReal, StressLaw};
use crate::error::{positive, Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct FractureFan {
    pub lambda: f64,
    pub alpha: f64,
    pub sigma: f64,
    #[serde(rename = "Y0")]
    pub y0: f64,
    pub lax_ok: bool,
    pub material: String,
    #[serde(skip)]
    pub law: StressLaw,
}

/// Build the fan from the jump conditions at `ξ = ±σ`.
pub fn build_fan(law: impl Into<StressLaw>, lambda: f64, alpha: f64) -> Result<FractureFan> {
    let law = law.into();
    positive("lambda", lambda)?;
    positive("alpha", alpha)?;
    if !(alpha < lambda) {
        return Err(Error::Domain {
            what: "alpha (must be below lambda)",
            value: alpha,
        });
    }
    let jump = law.tau(lambda) - law.tau(alpha);
    if !(jump > 0.0) {
        return Err(Error::Constitutive(format!(
            "stress is not increasing between alpha = {alpha} and lambda = {lambda}"
        )));
    }
    let sigma2 = jump / (lambda - alpha);
    let sigma = sigma2.sqrt();
    let lax_ok = law.dtau(lambda) <= sigma2 && sigma2 <= law.dtau(alpha);
    Ok(FractureFan {
        lambda,
        alpha,
        sigma,
        y0: sigma * (lambda - alpha),
        lax_ok,
        material: law.label(),
        law,
    })
}

impl FractureFan {
    /// `Y(ξ)`; at `ξ = 0` the right-hand value `Y0` is returned.
    pub fn eval_y_profile(&self, xi: f64) -> f64 {
        if xi.abs() >= self.sigma {
            self.lambda * xi
        } else if xi >= 0.0 {
            self.y0 + self.alpha * xi
        } else {
            -self.y0 + self.alpha * xi
        }
    }

    /// `Y'(ξ)`; at `ξ = ±σ` the outer value.
    pub fn eval_dy_profile(&self, xi: f64) -> f64 {
        if xi.abs() >= self.sigma {
            self.lambda
        } else {
            self.alpha
        }
    }

    /// `y(x, t) = t Y(x/t)` for `t > 0`, `λx` for `t ≤ 0`.
    pub fn eval_y(&self, x: f64, t: f64) -> f64 {
        if t <= 0.0 {
            self.lambda * x
        } else {
            t * self.eval_y_profile(x / t)
        }
    }

    /// Velocity `y_t = Y - ξY'`: `±Y0` inside the fan, zero outside.
    pub fn eval_velocity(&self, x: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let xi = x / t;
        if xi.abs() >= self.sigma {
            0.0
        } else if xi >= 0.0 {
            self.y0
        } else {
            -self.y0
        }
    }

    /// Stress jump residual `σ²(λ - α) - (τ(λ) - τ(α))`.
    pub fn rh_residual(&self) -> f64 {
        self.sigma * self.sigma * (self.lambda - self.alpha)
            - (self.law.tau(self.lambda) - self.law.tau(self.alpha))
    }

    /// Samples `(ξ, Y, Y')` on `n` evenly spaced points of `[lo, hi]`.
    pub fn profile_samples(&self, lo: f64, hi: f64, n: usize) -> Vec<[f64; 3]> {
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let xi = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                [xi, self.eval_y_profile(xi), self.eval_dy_profile(xi)]
            })
            .collect()
    }

    /// Space-time samples `(x, t, y)` on a tensor grid.
    pub fn spacetime_samples(&self, x: (f64, f64, usize), t: (f64, f64, usize)) -> Vec<[f64; 3]> {
        let lin = |(lo, hi, n): (f64, f64, usize)| -> Vec<f64> {
            let n = n.max(2);
            (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect()
        };
        let mut out = Vec::new();
        for &tt in &lin(t) {
            for &xx in &lin(x) {
                out.push([xx, tt, self.eval_y(xx, tt)]);
            }
        }
        out
    }
}

/// Energy production of the fan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyProduction {
    /// Total production `T`, `+∞` when the stress is unbounded.
    #[serde(rename = "T")]
    pub total: ExtReal,
    /// Production at the right-moving shock.
    pub mu_sigma: f64,
    /// Production at the left-moving shock.
    pub mu_minus_sigma: f64,
    /// Surface work at the crack, `2(τ∞ - τ(α)) Y0`.
    pub crack: ExtReal,
    /// The three equivalent closed forms of `T` when finite.
    pub expressions: Option<[f64; 3]>,
}

/// Per-shock production `-s[[½v² + W]] - [[vτ]]`, `[[f]] = right - left`.
fn shock_production_1d(
    law: &StressLaw,
    speed: f64,
    left: (f64, f64),
    right: (f64, f64),
) -> Result<f64> {
    let e = |(v, u): (f64, f64)| -> Result<f64> { Ok(0.5 * v * v + law.energy(u)?) };
    let flux = |(v, u): (f64, f64)| v * law.tau(u);
    Ok(-speed * (e(right)? - e(left)?) - (flux(right) - flux(left)))
}

pub fn energy_production(fan: &FractureFan) -> Result<EnergyProduction> {
    let law = &fan.law;
    let (lam, alpha, sigma, y0) = (fan.lambda, fan.alpha, fan.sigma, fan.y0);
    let mu_sigma = shock_production_1d(law, sigma, (y0, alpha), (0.0, lam))?;
    let mu_minus_sigma = shock_production_1d(law, -sigma, (0.0, lam), (-y0, alpha))?;
    let tau_inf = law.growth().tau_infinity.unwrap_or(ExtReal::Infinite);
    let Some(tinf) = tau_inf.finite() else {
        return Ok(EnergyProduction {
            total: ExtReal::Infinite,
            mu_sigma,
            mu_minus_sigma,
            crack: ExtReal::Infinite,
            expressions: None,
        });
    };
    let crack = 2.0 * (tinf - law.tau(alpha)) * y0;
    let dw = law.energy(lam)? - law.energy(alpha)?;
    let e1 = mu_minus_sigma + mu_sigma + crack;
    let e2 = sigma * y0 * y0 - 2.0 * sigma * dw + 2.0 * tinf * y0;
    let e3 = sigma * y0 * y0 + 2.0 * y0 * (tinf - dw / (lam - alpha));
    Ok(EnergyProduction {
        total: ExtReal::Finite(e3),
        mu_sigma,
        mu_minus_sigma,
        crack: ExtReal::Finite(crack),
        expressions: Some([e1, e2, e3]),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlicClass {
    Slic,
    NotSlic,
}

/// Slic-solution when `lim τ(u)/u = 0`.
pub fn slic_classify_1d(law: &StressLaw) -> SlicClass {
    match law.growth().l_1d {
        Some(l) if l.is_zero() => SlicClass::Slic,
        _ => SlicClass::NotSlic,
    }
}
