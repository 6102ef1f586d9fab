//! The bump mollifier `φ(x) = c exp(-1/(1-x²))` on `(-1, 1)`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::numerics::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierShape {
    Bump,
}

/// Unnormalised bump `exp(-1/(1-x²))`, zero outside `(-1, 1)`.
#[inline]
pub fn bump(x: f64) -> f64 {
    let d = 1.0 - x * x;
    if d <= 0.0 {
        0.0
    } else {
        (-1.0 / d).exp()
    }
}

/// Derivative of [`bump`].
#[inline]
pub fn bump_prime(x: f64) -> f64 {
    let d = 1.0 - x * x;
    if d <= 0.0 {
        0.0
    } else {
        -2.0 * x / (d * d) * (-1.0 / d).exp()
    }
}

const TABLE_PANELS: usize = 4096;

/// Unit-mass bump with a tabulated distribution function.
#[derive(Debug, Clone)]
pub struct MollifierSpec {
    pub shape: MollifierShape,
    /// Normalisation constant `c` with `∫φ = 1`.
    pub c: f64,
    cdf: Vec<f64>,
}

impl MollifierSpec {
    pub fn bump() -> Self {
        let gl = GaussLegendre::new(16);
        let h = 2.0 / TABLE_PANELS as f64;
        let mut cdf = Vec::with_capacity(TABLE_PANELS + 1);
        let mut acc = 0.0;
        cdf.push(0.0);
        for i in 0..TABLE_PANELS {
            let a = -1.0 + i as f64 * h;
            acc += gl.integrate(bump, a, a + h);
            cdf.push(acc);
        }
        let c = 1.0 / acc;
        for m in &mut cdf {
            *m *= c;
        }
        Self {
            shape: MollifierShape::Bump,
            c,
            cdf,
        }
    }

    /// Shared instance.
    pub fn standard() -> &'static MollifierSpec {
        static SPEC: OnceLock<MollifierSpec> = OnceLock::new();
        SPEC.get_or_init(MollifierSpec::bump)
    }

    /// `φ(x)`.
    #[inline]
    pub fn density(&self, x: f64) -> f64 {
        self.c * bump(x)
    }

    /// `φ'(x)`.
    #[inline]
    pub fn density_prime(&self, x: f64) -> f64 {
        self.c * bump_prime(x)
    }

    /// `φ_n(x) = n φ(n x)`.
    #[inline]
    pub fn scaled(&self, n: f64, x: f64) -> f64 {
        n * self.density(n * x)
    }

    /// `∫_{-1}^x φ`, cubic Hermite interpolation of the table, clamped to the
    /// panel's end values so the result is monotone.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= -1.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let h = 2.0 / TABLE_PANELS as f64;
        let pos = (x + 1.0) / h;
        let i = (pos.floor() as usize).min(TABLE_PANELS - 1);
        let x0 = -1.0 + i as f64 * h;
        let t = (x - x0) / h;
        let (m0, m1) = (self.cdf[i], self.cdf[i + 1]);
        let (d0, d1) = (self.density(x0) * h, self.density(x0 + h) * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let m = (2.0 * t3 - 3.0 * t2 + 1.0) * m0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * m1
            + (t3 - t2) * d1;
        m.clamp(m0, m1)
    }
}
