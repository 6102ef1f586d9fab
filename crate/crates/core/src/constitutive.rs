//! Stored-energy and stress families.
//!
//! The 3-d materials have stored energy
//! `Φ(v1, v2, v3) = ½(v1² + v2² + v3²) + h(v1 v2 v3)` with `h'' > 0`,
//! `h''' < 0` and `h → ∞` at both ends of `(0, ∞)`. Radial motions only ever
//! evaluate `Φ` at `(a, b, b)`, so the partials below are specialised to
//! that diagonal. The 1-d materials are plain stress-strain laws `τ(u)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{positive, Error, Result};
use crate::numerics::{roots, Quadrature};

/// Real number or `+∞`, for symbolic growth limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub fn is_zero(self) -> bool {
        matches!(self, ExtReal::Finite(x) if x == 0.0)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::Infinite => None,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(x) => s.serialize_f64(*x),
            ExtReal::Infinite => s.serialize_str("inf"),
        }
    }
}

/// 3-d stored-energy family, `h` given in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnergyFamily3D {
    /// `h(v) = A v^γ + B v^(-β)`.
    PowerLaw {
        #[serde(rename = "A")]
        a: f64,
        #[serde(rename = "B")]
        b: f64,
        gamma: f64,
        beta: f64,
    },
    /// `h(v) = L0 v - C ln v + D`.
    LinearLog {
        #[serde(rename = "L0")]
        l0: f64,
        #[serde(rename = "C")]
        c: f64,
        #[serde(rename = "D")]
        d: f64,
    },
}

/// `(Φ, Φ1, Φ2, Φ11, Φ12, Φ111)` at `(a, b, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiPartials {
    pub phi: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi11: f64,
    pub phi12: f64,
    pub phi111: f64,
}

/// A failed hypothesis with the sample point (or parameter value) exposing it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub condition: String,
    pub witness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub checked: Vec<String>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn new() -> Self {
        Self {
            valid: true,
            checked: Vec::new(),
            violations: Vec::new(),
        }
    }

    fn check(&mut self, condition: &str, witness: Option<f64>) {
        self.checked.push(condition.to_string());
        if let Some(w) = witness {
            self.valid = false;
            self.violations.push(Violation {
                condition: condition.to_string(),
                witness: w,
            });
        }
    }

    pub fn into_result(self) -> Result<Self> {
        if self.valid {
            Ok(self)
        } else {
            let msg = self
                .violations
                .iter()
                .map(|v| format!("{} (witness {})", v.condition, v.witness))
                .collect::<Vec<_>>()
                .join("; ");
            Err(Error::Constitutive(msg))
        }
    }
}

/// Symbolic growth limits. Entries that do not apply to the material's
/// dimension are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthReport {
    /// `lim h(u)/u`.
    pub l_3d: Option<ExtReal>,
    /// `lim h'(u³)/u`; zero is the slic side of the 3-d dichotomy.
    pub slic_indicator_3d: Option<ExtReal>,
    /// `lim τ(u)/u`.
    pub l_1d: Option<ExtReal>,
    /// `lim τ(u)`.
    pub tau_infinity: Option<ExtReal>,
}

impl GrowthReport {
    /// Theory prediction: is the self-similar solution a slic-solution?
    pub fn predicts_slic(&self) -> bool {
        match (self.slic_indicator_3d, self.l_1d) {
            (Some(ind), _) => ind.is_zero(),
            (None, Some(l)) => l.is_zero(),
            (None, None) => false,
        }
    }
}

/// Log-spaced sample points used by the validators.
pub fn validation_grid() -> impl Iterator<Item = f64> {
    const N: usize = 256;
    let (lo, hi) = (1e-3f64.ln(), 1e3f64.ln());
    (0..N).map(move |i| (lo + (hi - lo) * i as f64 / (N - 1) as f64).exp())
}

/// `base + k x y` with the product `x y` formed exactly, so that `Φ1` and
/// `Φ2` stay accurate enough for their difference near the diagonal.
#[inline]
fn base_plus_product(base: f64, k: f64, x: f64, y: f64) -> f64 {
    let hi = x * y;
    let lo = x.mul_add(y, -hi);
    k.mul_add(hi, k.mul_add(lo, base))
}

impl EnergyFamily3D {
    pub fn power_law(a: f64, b: f64, gamma: f64, beta: f64) -> Result<Self> {
        Ok(Self::PowerLaw {
            a: positive("A", a)?,
            b: positive("B", b)?,
            gamma: positive("gamma", gamma)?,
            beta: positive("beta", beta)?,
        })
    }

    pub fn linear_log(l0: f64, c: f64, d: f64) -> Result<Self> {
        if !d.is_finite() {
            return Err(Error::Domain {
                what: "D",
                value: d,
            });
        }
        Ok(Self::LinearLog {
            l0: positive("L0", l0)?,
            c: positive("C", c)?,
            d,
        })
    }

    /// Re-run the constructor checks (deserialised values skip them).
    pub fn checked(self) -> Result<Self> {
        match self {
            Self::PowerLaw { a, b, gamma, beta } => Self::power_law(a, b, gamma, beta),
            Self::LinearLog { l0, c, d } => Self::linear_log(l0, c, d),
        }
    }

    /// `(h, h', h'', h''')` at `v`.
    pub fn h_derivs(&self, v: f64) -> Result<[f64; 4]> {
        if !(v > 0.0) {
            return Err(Error::Domain {
                what: "v",
                value: v,
            });
        }
        Ok(self.h_derivs_unchecked(v))
    }

    #[inline]
    pub(crate) fn h_derivs_unchecked(&self, v: f64) -> [f64; 4] {
        match *self {
            Self::PowerLaw {
                a,
                b,
                gamma: g,
                beta: be,
            } => {
                let vg = v.powf(g);
                let vb = v.powf(-be);
                let iv = 1.0 / v;
                [
                    a * vg + b * vb,
                    (a * g * vg - b * be * vb) * iv,
                    (a * g * (g - 1.0) * vg + b * be * (be + 1.0) * vb) * iv * iv,
                    (a * g * (g - 1.0) * (g - 2.0) * vg - b * be * (be + 1.0) * (be + 2.0) * vb)
                        * iv
                        * iv
                        * iv,
                ]
            }
            Self::LinearLog { l0, c, d } => {
                let iv = 1.0 / v;
                [
                    l0 * v - c * v.ln() + d,
                    l0 - c * iv,
                    c * iv * iv,
                    -2.0 * c * iv * iv * iv,
                ]
            }
        }
    }

    #[inline]
    pub fn h(&self, v: f64) -> f64 {
        self.h_derivs_unchecked(v)[0]
    }

    #[inline]
    pub fn dh(&self, v: f64) -> f64 {
        match *self {
            Self::PowerLaw {
                a,
                b,
                gamma: g,
                beta: be,
            } => a * g * v.powf(g - 1.0) - b * be * v.powf(-be - 1.0),
            Self::LinearLog { l0, c, .. } => l0 - c / v,
        }
    }

    #[inline]
    pub fn d2h(&self, v: f64) -> f64 {
        match *self {
            Self::PowerLaw {
                a,
                b,
                gamma: g,
                beta: be,
            } => a * g * (g - 1.0) * v.powf(g - 2.0) + b * be * (be + 1.0) * v.powf(-be - 2.0),
            Self::LinearLog { c, .. } => c / (v * v),
        }
    }

    /// Full stored energy at principal stretches `(v1, v2, v3)`.
    pub fn phi(&self, v1: f64, v2: f64, v3: f64) -> f64 {
        0.5 * (v1 * v1 + v2 * v2 + v3 * v3) + self.h(v1 * v2 * v3)
    }

    /// `Φ(a, b, b)`.
    #[inline]
    pub fn phi_ab(&self, a: f64, b: f64) -> f64 {
        0.5 * (a * a + 2.0 * b * b) + self.h(a * b * b)
    }

    /// `Φ1(a, b, b) = a + h'(ab²) b²`.
    #[inline]
    pub fn phi1(&self, a: f64, b: f64) -> f64 {
        base_plus_product(a, self.dh(a * b * b), b, b)
    }

    /// `Φ2(a, b, b) = b + h'(ab²) a b`.
    #[inline]
    pub fn phi2(&self, a: f64, b: f64) -> f64 {
        base_plus_product(b, self.dh(a * b * b), a, b)
    }

    /// `Φ11(a, b, b) = 1 + h''(ab²) b⁴`.
    #[inline]
    pub fn phi11(&self, a: f64, b: f64) -> f64 {
        let b2 = b * b;
        1.0 + self.d2h(a * b2) * b2 * b2
    }

    pub fn phi_partials(&self, a: f64, b: f64) -> Result<PhiPartials> {
        positive("a", a)?;
        positive("b", b)?;
        let b2 = b * b;
        let v = a * b2;
        let [h, h1, h2, h3] = self.h_derivs_unchecked(v);
        Ok(PhiPartials {
            phi: 0.5 * (a * a + 2.0 * b2) + h,
            phi1: base_plus_product(a, h1, b, b),
            phi2: base_plus_product(b, h1, a, b),
            phi11: 1.0 + h2 * b2 * b2,
            phi12: h1 * b + h2 * a * b2 * b,
            phi111: h3 * b2 * b2 * b2,
        })
    }

    /// `P = 1 + a b³ h''(ab²)`, the bracket `Φ12 + (Φ1 - Φ2)/(a - b)` of the
    /// self-similar equation with the removable singularity at `a = b` gone.
    pub fn p_coefficient(&self, a: f64, b: f64) -> Result<f64> {
        positive("a", a)?;
        positive("b", b)?;
        Ok(self.p_unchecked(a, b))
    }

    #[inline]
    pub(crate) fn p_unchecked(&self, a: f64, b: f64) -> f64 {
        1.0 + a * b * b * b * self.d2h(a * b * b)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::new();
        match *self {
            Self::PowerLaw { gamma, .. } => {
                rep.check(
                    "gamma in (1, 2)",
                    (!(gamma > 1.0 && gamma < 2.0)).then_some(gamma),
                );
            }
            Self::LinearLog { l0, c, d } => {
                let vmin = c / l0;
                let hmin = c - c * vmin.ln() + d;
                rep.check("h > 0 (at minimiser C/L0)", (hmin <= 0.0).then_some(vmin));
            }
        }
        let grid: Vec<f64> = validation_grid().collect();
        let w2 = grid
            .iter()
            .copied()
            .find(|&v| !(self.h_derivs_unchecked(v)[2] > 0.0));
        rep.check("h'' > 0", w2);
        let w3 = grid
            .iter()
            .copied()
            .find(|&v| !(self.h_derivs_unchecked(v)[3] < 0.0));
        rep.check("h''' < 0", w3);
        // Both families blow up at 0+ and at infinity whenever the constructor
        // accepted their parameters (beta > 0 / C > 0, gamma > 0 / L0 > 0).
        rep.check("h -> inf as v -> 0+ and v -> inf", None);
        rep
    }

    pub fn growth(&self) -> GrowthReport {
        let (l_3d, ind) = match *self {
            Self::PowerLaw { a, gamma, .. } => {
                let l = if gamma > 1.0 {
                    ExtReal::Infinite
                } else if gamma == 1.0 {
                    ExtReal::Finite(a)
                } else {
                    ExtReal::Finite(0.0)
                };
                // h'(u³)/u ~ Aγ u^(3γ-4).
                let e = 3.0 * gamma - 4.0;
                let ind = if e < 0.0 {
                    ExtReal::Finite(0.0)
                } else if e == 0.0 {
                    ExtReal::Finite(a * gamma)
                } else {
                    ExtReal::Infinite
                };
                (l, ind)
            }
            Self::LinearLog { l0, .. } => (ExtReal::Finite(l0), ExtReal::Finite(0.0)),
        };
        GrowthReport {
            l_3d: Some(l_3d),
            slic_indicator_3d: Some(ind),
            l_1d: None,
            tau_infinity: None,
        }
    }

    /// Specific volume `H` of the stress-free cavity: the root of `h'`.
    pub fn cavity_pressure_root(&self) -> Result<f64> {
        let f = |v: f64| self.dh(v);
        let (mut lo, mut hi) = (1.0, 1.0);
        while f(lo) >= 0.0 {
            lo *= 0.5;
            if lo < 1e-300 {
                return Err(Error::Constitutive("h' has no sign change below 1".into()));
            }
        }
        while f(hi) <= 0.0 {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::Constitutive("h' has no sign change above 1".into()));
            }
        }
        roots::brent(f, lo, hi, 1e-15, 0.0)
    }
}

/// Built-in 1-d stress laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StressFamily1D {
    /// `τ(u) = τ∞ - u^(-p)`.
    ShiftedInversePower { tau_inf: f64, p: f64 },
    /// `τ(u) = k u^q`, a shear law (no compression hypothesis).
    PurePower { k: f64, q: f64 },
}

impl StressFamily1D {
    pub fn shifted_inverse_power(tau_inf: f64, p: f64) -> Result<Self> {
        if !tau_inf.is_finite() {
            return Err(Error::Domain {
                what: "tau_inf",
                value: tau_inf,
            });
        }
        Ok(Self::ShiftedInversePower {
            tau_inf,
            p: positive("p", p)?,
        })
    }

    pub fn pure_power(k: f64, q: f64) -> Result<Self> {
        Ok(Self::PurePower {
            k: positive("k", k)?,
            q: positive("q", q)?,
        })
    }

    pub fn checked(self) -> Result<Self> {
        match self {
            Self::ShiftedInversePower { tau_inf, p } => Self::shifted_inverse_power(tau_inf, p),
            Self::PurePower { k, q } => Self::pure_power(k, q),
        }
    }

    pub fn tau(&self, u: f64) -> f64 {
        match *self {
            Self::ShiftedInversePower { tau_inf, p } => tau_inf - u.powf(-p),
            Self::PurePower { k, q } => k * u.powf(q),
        }
    }

    pub fn dtau(&self, u: f64) -> f64 {
        match *self {
            Self::ShiftedInversePower { p, .. } => p * u.powf(-p - 1.0),
            Self::PurePower { k, q } => k * q * u.powf(q - 1.0),
        }
    }

    pub fn d2tau(&self, u: f64) -> f64 {
        match *self {
            Self::ShiftedInversePower { p, .. } => -p * (p + 1.0) * u.powf(-p - 2.0),
            Self::PurePower { k, q } => k * q * (q - 1.0) * u.powf(q - 2.0),
        }
    }

    /// `W(u) = ∫₁^u τ(s) ds` in closed form.
    pub fn energy(&self, u: f64) -> f64 {
        match *self {
            Self::ShiftedInversePower { tau_inf, p } => {
                let inv = if (p - 1.0).abs() < 1e-14 {
                    u.ln()
                } else {
                    (u.powf(1.0 - p) - 1.0) / (1.0 - p)
                };
                tau_inf * (u - 1.0) - inv
            }
            Self::PurePower { k, q } => k * (u.powf(q + 1.0) - 1.0) / (q + 1.0),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::new();
        let grid: Vec<f64> = validation_grid().collect();
        rep.check(
            "tau' > 0",
            grid.iter().copied().find(|&u| !(self.dtau(u) > 0.0)),
        );
        rep.check(
            "tau'' < 0",
            grid.iter().copied().find(|&u| !(self.d2tau(u) < 0.0)),
        );
        match *self {
            Self::ShiftedInversePower { p, .. } => {
                // u^(-p) is not integrable at 0 iff p >= 1.
                rep.check(
                    "tau -> -inf and W -> +inf as u -> 0+",
                    (p < 1.0).then_some(p),
                );
            }
            Self::PurePower { q, .. } => {
                rep.check("q in (0, 1)", (!(q > 0.0 && q < 1.0)).then_some(q));
            }
        }
        rep
    }

    pub fn growth(&self) -> GrowthReport {
        let (l, tinf) = match *self {
            Self::ShiftedInversePower { tau_inf, .. } => {
                (ExtReal::Finite(0.0), ExtReal::Finite(tau_inf))
            }
            Self::PurePower { k, q } => {
                let l = if q < 1.0 {
                    ExtReal::Finite(0.0)
                } else if q == 1.0 {
                    ExtReal::Finite(k)
                } else {
                    ExtReal::Infinite
                };
                (l, ExtReal::Infinite)
            }
        };
        GrowthReport {
            l_3d: None,
            slic_indicator_3d: None,
            l_1d: Some(l),
            tau_infinity: Some(tinf),
        }
    }
}

/// User-supplied stress callback with declared growth limits. Used on
/// classification and residual paths only; no hypothesis validation.
#[derive(Clone)]
pub struct RawStress {
    tau: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub linear_growth: ExtReal,
    pub tau_infinity: ExtReal,
    pub label: String,
}

impl fmt::Debug for RawStress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RawStress")
            .field("label", &self.label)
            .field("linear_growth", &self.linear_growth)
            .field("tau_infinity", &self.tau_infinity)
            .finish()
    }
}

impl RawStress {
    pub fn new<F>(
        label: impl Into<String>,
        tau: F,
        linear_growth: ExtReal,
        tau_infinity: ExtReal,
    ) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            tau: Arc::new(tau),
            linear_growth,
            tau_infinity,
            label: label.into(),
        }
    }
}

/// Any 1-d stress law the fracture fan can be built from.
#[derive(Debug, Clone)]
pub enum StressLaw {
    Family(StressFamily1D),
    Raw(RawStress),
}

impl From<StressFamily1D> for StressLaw {
    fn from(f: StressFamily1D) -> Self {
        StressLaw::Family(f)
    }
}

impl From<RawStress> for StressLaw {
    fn from(r: RawStress) -> Self {
        StressLaw::Raw(r)
    }
}

impl StressLaw {
    #[inline]
    pub fn tau(&self, u: f64) -> f64 {
        match self {
            StressLaw::Family(f) => f.tau(u),
            StressLaw::Raw(r) => (r.tau)(u),
        }
    }

    /// `τ'(u)`; raw callbacks fall back to a central difference.
    pub fn dtau(&self, u: f64) -> f64 {
        match self {
            StressLaw::Family(f) => f.dtau(u),
            StressLaw::Raw(r) => {
                let h = 1e-6 * u.abs().max(1e-3);
                ((r.tau)(u + h) - (r.tau)(u - h)) / (2.0 * h)
            }
        }
    }

    /// `W(u) = ∫₁^u τ`, closed form for the built-in families and adaptive
    /// quadrature otherwise.
    pub fn energy(&self, u: f64) -> Result<f64> {
        match self {
            StressLaw::Family(f) => Ok(f.energy(u)),
            StressLaw::Raw(r) => {
                let q = Quadrature::new(1e-14, 1e-13);
                Ok(q.integrate(|s| (r.tau)(s), 1.0, u, &[])?.value)
            }
        }
    }

    pub fn growth(&self) -> GrowthReport {
        match self {
            StressLaw::Family(f) => f.growth(),
            StressLaw::Raw(r) => GrowthReport {
                l_3d: None,
                slic_indicator_3d: None,
                l_1d: Some(r.linear_growth),
                tau_infinity: Some(r.tau_infinity),
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            StressLaw::Family(f) => format!("{f:?}"),
            StressLaw::Raw(r) => r.label.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl() -> EnergyFamily3D {
        EnergyFamily3D::power_law(1.0, 1.0, 1.25, 1.0).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn h_derivs_power_law_at_one() {
        let d = pl().h_derivs(1.0).unwrap();
        assert_eq!(d, [2.0, 0.25, 2.3125, -6.234375]);
    }

    #[test]
    fn h_derivs_linear_log_at_one() {
        let f = EnergyFamily3D::linear_log(1.0, 1.0, 1.0).unwrap();
        assert_eq!(f.h_derivs(1.0).unwrap(), [2.0, 0.0, 1.0, -2.0]);
    }

    #[test]
    fn h_derivs_match_central_differences() {
        let f = pl();
        let v = 2.0;
        let eps = 1e-4;
        let d = f.h_derivs(v).unwrap();
        let fd = |k: usize| {
            let g = |x: f64| f.h_derivs(x).unwrap()[k];
            (g(v + eps) - g(v - eps)) / (2.0 * eps)
        };
        for k in 0..3 {
            assert!(rel(fd(k), d[k + 1]) < 1e-6, "order {}", k + 1);
        }
    }

    #[test]
    fn h_derivs_reject_nonpositive() {
        assert!(matches!(pl().h_derivs(0.0), Err(Error::Domain { .. })));
        assert!(pl().h_derivs(-1.0).is_err());
    }

    #[test]
    fn phi_partials_at_unit_stretch() {
        let p = pl().phi_partials(1.0, 1.0).unwrap();
        assert_eq!(p.phi, 3.5);
        assert_eq!(p.phi1, 1.25);
        assert_eq!(p.phi2, 1.25);
        assert_eq!(p.phi11, 3.3125);
        assert_eq!(p.phi12, 2.5625);
        assert_eq!(p.phi111, -6.234375);
    }

    #[test]
    fn phi_partials_match_three_variable_differences() {
        let f = pl();
        let (a, b) = (1.5, 1.2);
        let p = f.phi_partials(a, b).unwrap();
        // Richardson-extrapolated central differences of the full Φ.
        let rich = |g: &dyn Fn(f64) -> f64, e: f64| (4.0 * g(e / 2.0) - g(e)) / 3.0;
        let d1 = rich(
            &|e| (f.phi(a + e, b, b) - f.phi(a - e, b, b)) / (2.0 * e),
            1e-3,
        );
        let d2 = rich(
            &|e| (f.phi(a, b + e, b) - f.phi(a, b - e, b)) / (2.0 * e),
            1e-3,
        );
        let d11 = rich(
            &|e| (f.phi(a + e, b, b) - 2.0 * f.phi(a, b, b) + f.phi(a - e, b, b)) / (e * e),
            1e-3,
        );
        let d12 = rich(
            &|e| {
                (f.phi(a + e, b + e, b) - f.phi(a + e, b - e, b) - f.phi(a - e, b + e, b)
                    + f.phi(a - e, b - e, b))
                    / (4.0 * e * e)
            },
            1e-3,
        );
        assert!(rel(d1, p.phi1) < 1e-6);
        assert!(rel(d2, p.phi2) < 1e-6);
        assert!(rel(d11, p.phi11) < 1e-6);
        assert!(rel(d12, p.phi12) < 1e-6);
    }

    #[test]
    fn p_coefficient_examples() {
        assert_eq!(pl().p_coefficient(1.0, 1.0).unwrap(), 3.3125);
        let ll = EnergyFamily3D::linear_log(1.0, 1.0, 1.0).unwrap();
        assert!((ll.p_coefficient(2.0, 1.0).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn validate_examples() {
        let f = EnergyFamily3D::power_law(1.0, 1.0, 1.5, 1.0).unwrap();
        assert!(f.validate().valid);
        assert_eq!(f.growth().slic_indicator_3d, Some(ExtReal::Infinite));

        let ll = EnergyFamily3D::linear_log(1.0, 1.0, 1.0).unwrap();
        assert!(ll.validate().valid);
        let g = ll.growth();
        assert_eq!(g.l_3d, Some(ExtReal::Finite(1.0)));
        assert_eq!(g.slic_indicator_3d, Some(ExtReal::Finite(0.0)));

        let s = StressFamily1D::shifted_inverse_power(2.0, 1.0).unwrap();
        assert!(s.validate().valid);
        let g = s.growth();
        assert_eq!(g.l_1d, Some(ExtReal::Finite(0.0)));
        assert_eq!(g.tau_infinity, Some(ExtReal::Finite(2.0)));
    }

    #[test]
    fn validate_reports_witnesses() {
        // gamma > 2 breaks h''' < 0 for large v.
        let f = EnergyFamily3D::power_law(1.0, 1.0, 2.5, 1.0).unwrap();
        let rep = f.validate();
        assert!(!rep.valid);
        assert!(rep
            .violations
            .iter()
            .any(|v| v.condition == "h''' < 0" && v.witness > 1.0));
        // Negative minimum of h.
        let ll = EnergyFamily3D::linear_log(1.0, 1.0, -5.0).unwrap();
        let rep = ll.validate();
        assert!(rep
            .violations
            .iter()
            .any(|v| v.condition.starts_with("h > 0")));
        assert!(rep.into_result().is_err());
        // p < 1: W stays bounded at 0+.
        let s = StressFamily1D::shifted_inverse_power(2.0, 0.5).unwrap();
        assert!(!s.validate().valid);
    }

    #[test]
    fn cavity_pressure_root_examples() {
        let ll = EnergyFamily3D::linear_log(1.0, 1.0, 1.0).unwrap();
        assert!((ll.cavity_pressure_root().unwrap() - 1.0).abs() < 1e-14);
        let h = pl().cavity_pressure_root().unwrap();
        assert!((h - 0.8f64.powf(1.0 / 2.25)).abs() < 1e-12);
        assert!(pl().dh(h).abs() < 1e-12);
        let f2 = EnergyFamily3D::power_law(2.0, 1.0, 1.25, 1.0).unwrap();
        let h2 = f2.cavity_pressure_root().unwrap();
        assert!((2.5 * h2.powf(2.25) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stress_energy_closed_form() {
        let s = StressFamily1D::shifted_inverse_power(2.0, 1.0).unwrap();
        assert!((s.energy(2.0) - (2.0 - 2f64.ln())).abs() < 1e-15);
        let law = StressLaw::Raw(RawStress::new(
            "copy",
            move |u| s.tau(u),
            ExtReal::Finite(0.0),
            ExtReal::Finite(2.0),
        ));
        assert!((law.energy(2.0).unwrap() - s.energy(2.0)).abs() < 1e-12);
        let pp = StressFamily1D::pure_power(1.0, 0.5).unwrap();
        assert!((pp.energy(4.0) - (8.0 - 1.0) / 1.5).abs() < 1e-14);
    }

    #[test]
    fn growth_classification_threshold() {
        for (g, slic) in [
            (1.2, true),
            (1.3, true),
            (4.0 / 3.0 + 1e-9, false),
            (1.5, false),
        ] {
            let f = EnergyFamily3D::power_law(1.0, 1.0, g, 1.0).unwrap();
            assert_eq!(f.growth().predicts_slic(), slic, "gamma={g}");
        }
    }

    #[test]
    fn serde_descriptor_round_trip() {
        let j = r#"{"kind": "power_law", "A":1.0, "B":1.0, "gamma":1.25, "beta":1.0}"#;
        let f: EnergyFamily3D = serde_json::from_str(j).unwrap();
        assert_eq!(f, pl());
        let bad = r#"{"kind": "power_law", "A":1.0, "B":1.0, "gamma":1.25, "beta":1.0, "x": 2}"#;
        assert!(serde_json::from_str::<EnergyFamily3D>(bad).is_err());
    }
}
