//! Mollified residual of the 1-d fracture fan.
//!
//! With `M` the distribution function of the kernel, the mollified strain and
//! velocity of the fan are available in closed form:
//!
//! ```text
//! yⁿ_x = λ + (α - λ)[M(n(x+σt)) - M(n(x-σt))] + 2tY0 φ_n(x)
//! yⁿ_t = Y0 [2M(nx) - M(n(x-σt)) - M(n(x+σt))]
//! ```

use super::fields::{TestField, TestFieldKind};
use super::mollifier::MollifierSpec;
use crate::constitutive::ExtReal;
use crate::error::{Error, Result};
use crate::fracture::FractureFan;
use crate::numerics::Quadrature;

/// `(yⁿ_x, yⁿ_t)` at `(x, t)`, `t > 0`.
pub fn mollified_fan(fan: &FractureFan, m: &MollifierSpec, n: u32, x: f64, t: f64) -> (f64, f64) {
    let nf = n as f64;
    let e = fan.sigma * t;
    let left = m.cdf(nf * (x + e));
    let centre = m.cdf(nf * x);
    let right = m.cdf(nf * (x - e));
    let y_x =
        fan.lambda + (fan.alpha - fan.lambda) * (left - right) + 2.0 * t * fan.y0 * m.scaled(nf, x);
    let y_t = fan.y0 * (2.0 * centre - right - left);
    (y_x, y_t)
}

fn line_parts(field: &TestField) -> Result<((f64, f64), (f64, f64))> {
    match field.kind {
        TestFieldKind::Scalar1D { .. } => Ok((field.space_support(), field.t_support())),
        TestFieldKind::Radial3D { .. } => Err(Error::Contract(format!(
            "test field {} is not a line field",
            field.name
        ))),
    }
}

/// Action `∬ [-yⁿ_t ψ_t + τ(yⁿ_x) ψ_x] dx dt` of the mollified fan.
pub fn weak_residual_1d(
    fan: &FractureFan,
    m: &MollifierSpec,
    n: u32,
    field: &TestField,
    quad: &Quadrature,
) -> Result<f64> {
    let ((x0, x1), (t0, t1)) = line_parts(field)?;
    let nf = n as f64;
    let inner = |t: f64| -> Result<f64> {
        let e = fan.sigma * t;
        let d = 1.0 / nf;
        let cuts = [-d, 0.0, d, -e - d, -e, -e + d, e - d, e, e + d];
        Ok(quad
            .integrate(
                |x| {
                    let (y_x, y_t) = mollified_fan(fan, m, n, x, t);
                    let p = field.eval(x, t);
                    -y_t * p.d_time + fan.law.tau(y_x) * p.d_space
                },
                x0,
                x1,
                &cuts,
            )?
            .value)
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
    Ok(v?.value)
}

/// Limit of the action as `n → ∞`: `2 Y0 L ∫ t ψ_x(0, t) dt`.
pub fn predicted_limit_1d(
    fan: &FractureFan,
    field: &TestField,
    quad: &Quadrature,
) -> Result<ExtReal> {
    let (_, (t0, t1)) = line_parts(field)?;
    let moment = quad
        .integrate(|t| t * field.eval(0.0, t).d_space, t0, t1, &[])?
        .value;
    Ok(match fan.law.growth().l_1d.unwrap_or(ExtReal::Infinite) {
        ExtReal::Finite(l) => ExtReal::Finite(2.0 * fan.y0 * l * moment),
        ExtReal::Infinite if moment == 0.0 => ExtReal::Finite(0.0),
        ExtReal::Infinite => ExtReal::Infinite,
    })
}
