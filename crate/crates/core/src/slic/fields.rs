//! Compactly supported test fields built from bump functions.

use serde::Serialize;

use super::mollifier::{bump, bump_prime};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFieldKind {
    /// `ψ = g(R,t) x/R` with `g = R β(R/radius) β((t - t_center)/t_half)`.
    Radial3D {
        radius: f64,
        t_center: f64,
        t_half: f64,
    },
    /// `ψ = β((x - x_center)/x_half) β((t - t_center)/t_half)`.
    Scalar1D {
        x_center: f64,
        x_half: f64,
        t_center: f64,
        t_half: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestField {
    pub name: &'static str,
    #[serde(flatten)]
    pub kind: TestFieldKind,
}

/// Value and first partials of a test profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue {
    pub value: f64,
    pub d_space: f64,
    pub d_time: f64,
}

impl TestField {
    /// Radial catalogue: one field concentrated on the cavity layer, one
    /// spanning the whole fan, one at later times.
    pub fn radial_catalogue() -> Vec<TestField> {
        vec![
            TestField {
                name: "core",
                kind: TestFieldKind::Radial3D {
                    radius: 0.6,
                    t_center: 1.0,
                    t_half: 0.4,
                },
            },
            TestField {
                name: "wide",
                kind: TestFieldKind::Radial3D {
                    radius: 4.0,
                    t_center: 1.0,
                    t_half: 0.5,
                },
            },
            TestField {
                name: "late",
                kind: TestFieldKind::Radial3D {
                    radius: 1.5,
                    t_center: 1.5,
                    t_half: 0.5,
                },
            },
        ]
    }

    /// Line catalogue. "centered" has `ψ_x(0, t) ≡ 0`.
    pub fn line_catalogue() -> Vec<TestField> {
        vec![
            TestField {
                name: "shifted",
                kind: TestFieldKind::Scalar1D {
                    x_center: 0.3,
                    x_half: 1.0,
                    t_center: 1.0,
                    t_half: 0.5,
                },
            },
            TestField {
                name: "wide",
                kind: TestFieldKind::Scalar1D {
                    x_center: -0.5,
                    x_half: 2.5,
                    t_center: 1.5,
                    t_half: 0.8,
                },
            },
            TestField {
                name: "centered",
                kind: TestFieldKind::Scalar1D {
                    x_center: 0.0,
                    x_half: 1.0,
                    t_center: 1.0,
                    t_half: 0.5,
                },
            },
        ]
    }

    pub fn by_name(catalogue: &[TestField], name: &str) -> Option<TestField> {
        catalogue.iter().copied().find(|f| f.name == name)
    }

    /// Support in time.
    pub fn t_support(&self) -> (f64, f64) {
        match self.kind {
            TestFieldKind::Radial3D {
                t_center, t_half, ..
            }
            | TestFieldKind::Scalar1D {
                t_center, t_half, ..
            } => (t_center - t_half, t_center + t_half),
        }
    }

    /// Support in space (`R` or `x`).
    pub fn space_support(&self) -> (f64, f64) {
        match self.kind {
            TestFieldKind::Radial3D { radius, .. } => (0.0, radius),
            TestFieldKind::Scalar1D {
                x_center, x_half, ..
            } => (x_center - x_half, x_center + x_half),
        }
    }

    /// `g` (radial) or `ψ` (line) and its partials at `(space, t)`.
    pub fn eval(&self, x: f64, t: f64) -> FieldValue {
        match self.kind {
            TestFieldKind::Radial3D {
                radius,
                t_center,
                t_half,
            } => {
                let y = x / radius;
                let tau = (t - t_center) / t_half;
                let (br, dbr) = (bump(y), bump_prime(y));
                let (bt, dbt) = (bump(tau), bump_prime(tau));
                FieldValue {
                    value: x * br * bt,
                    d_space: (br + y * dbr) * bt,
                    d_time: x * br * dbt / t_half,
                }
            }
            TestFieldKind::Scalar1D {
                x_center,
                x_half,
                t_center,
                t_half,
            } => {
                let y = (x - x_center) / x_half;
                let tau = (t - t_center) / t_half;
                let (bx, dbx) = (bump(y), bump_prime(y));
                let (bt, dbt) = (bump(tau), bump_prime(tau));
                FieldValue {
                    value: bx * bt,
                    d_space: dbx * bt / x_half,
                    d_time: bx * dbt / t_half,
                }
            }
        }
    }

    /// `g/R` for radial fields, regular at the origin.
    pub fn radial_ratio(&self, r: f64, t: f64) -> f64 {
        match self.kind {
            TestFieldKind::Radial3D {
                radius,
                t_center,
                t_half,
            } => bump(r / radius) * bump((t - t_center) / t_half),
            TestFieldKind::Scalar1D { .. } => f64::NAN,
        }
    }
}
