//! Slic-solution checks: mollify a candidate motion at scale `1/n`, measure
//! its weak-form residual on test fields, and follow residuals and energies
//! along a ladder of `n`.

pub mod fields;
pub mod line;
pub mod mollifier;
pub mod radial;

use rayon::prelude::*;
use serde::Serialize;

pub use fields::{TestField, TestFieldKind};
pub use line::{mollified_fan, predicted_limit_1d, weak_residual_1d};
pub use mollifier::{MollifierShape, MollifierSpec};
pub use radial::{
    det_positivity, layer_bounds, layer_grid, mollified_energy, mollify_radial, weak_residual_3d,
    DetReport, Homogeneous, LayerBounds, Mollified, MollifiedPoint, RadialMotion, RadialWindow,
};

use crate::constitutive::{EnergyFamily3D, ExtReal};
use crate::energy::{energy_delta_closed, energy_delta_quadrature};
use crate::error::{Error, Result};
use crate::fracture::FractureFan;
use crate::numerics::{fit_slope, loglog_slope, Quadrature};
use crate::selfsim::CavitySolution;

pub const DEFAULT_LADDER: [u32; 4] = [8, 16, 32, 64];

/// Log-log slope below which a residual ladder counts as decaying.
pub const DECAY_SLOPE: f64 = -0.1;

/// Actions below this magnitude on every rung are zero up to roundoff.
pub const ZERO_ACTION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    DecaysToZero,
    NonVanishing,
}

impl Verdict {
    pub fn from_theory(predicts_slic: bool) -> Self {
        if predicts_slic {
            Verdict::DecaysToZero
        } else {
            Verdict::NonVanishing
        }
    }

    /// Classify a ladder of actions by the log-log slope of `|action|`.
    /// The rate is `None` when every action vanishes to roundoff.
    pub fn from_ladder(n_values: &[u32], actions: &[f64]) -> (Option<f64>, Verdict) {
        if actions.iter().all(|a| a.abs() <= ZERO_ACTION) {
            return (None, Verdict::DecaysToZero);
        }
        let rate = ladder_slope(n_values, actions);
        let decays = rate < DECAY_SLOPE
            && actions.last().map(|a| a.abs()) < actions.first().map(|a| a.abs());
        (
            Some(rate),
            if decays {
                Verdict::DecaysToZero
            } else {
                Verdict::NonVanishing
            },
        )
    }
}

fn ladder_slope(n_values: &[u32], values: &[f64]) -> f64 {
    let xs: Vec<f64> = n_values.iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    loglog_slope(&xs, &ys)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub field: TestField,
    pub n_values: Vec<u32>,
    pub actions: Vec<f64>,
    /// Closed-form limit of the action (line problems only).
    pub predicted_limit: Option<ExtReal>,
    pub fitted_rate: Option<f64>,
    pub verdict: Verdict,
    pub theory_verdict: Verdict,
}

impl ResidualReport {
    /// Distance of the finest action from the predicted limit, relative
    /// unless the limit is zero.
    pub fn limit_error(&self) -> Option<f64> {
        let limit = self.predicted_limit?.finite()?;
        let last = *self.actions.last()?;
        Some(if limit == 0.0 {
            last.abs()
        } else {
            ((last - limit) / limit).abs()
        })
    }
}

/// Catalogue-level verdict: decay only if every test field decays.
pub fn catalogue_verdict(reports: &[ResidualReport]) -> Verdict {
    if reports.iter().all(|r| r.verdict == Verdict::DecaysToZero) {
        Verdict::DecaysToZero
    } else {
        Verdict::NonVanishing
    }
}

/// Residual ladder of a radial motion on one test field.
pub fn residual_ladder_3d<M: RadialMotion + ?Sized>(
    motion: &M,
    mollifier: &MollifierSpec,
    ladder: &[u32],
    field: &TestField,
    quad: &Quadrature,
) -> Result<ResidualReport> {
    let actions: Vec<f64> = ladder
        .par_iter()
        .map(|&n| weak_residual_3d(motion, mollifier, n, field, RadialWindow::Full, quad))
        .collect::<Result<_>>()?;
    let (fitted_rate, verdict) = Verdict::from_ladder(ladder, &actions);
    Ok(ResidualReport {
        field: *field,
        n_values: ladder.to_vec(),
        actions,
        predicted_limit: None,
        fitted_rate,
        verdict,
        theory_verdict: Verdict::from_theory(motion.family().growth().predicts_slic()),
    })
}

/// Residual ladder of the fracture fan on one line test field.
pub fn residual_ladder_1d(
    fan: &FractureFan,
    mollifier: &MollifierSpec,
    ladder: &[u32],
    field: &TestField,
    quad: &Quadrature,
) -> Result<ResidualReport> {
    let actions: Vec<f64> = ladder
        .par_iter()
        .map(|&n| weak_residual_1d(fan, mollifier, n, field, quad))
        .collect::<Result<_>>()?;
    let (fitted_rate, verdict) = Verdict::from_ladder(ladder, &actions);
    Ok(ResidualReport {
        field: *field,
        n_values: ladder.to_vec(),
        actions,
        predicted_limit: Some(predicted_limit_1d(fan, field, quad)?),
        fitted_rate,
        verdict,
        theory_verdict: Verdict::from_theory(fan.law.growth().predicts_slic()),
    })
}

/// The cavity-layer part `D_n` of the residual against the heuristic scale
/// `h'(n³)/n`.
#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyReport {
    pub field: TestField,
    pub n_values: Vec<u32>,
    pub layer_actions: Vec<f64>,
    /// `h'(n³)/n` on the ladder.
    pub scale: Vec<f64>,
    /// Log-log slope of `|D_n|` against the scale; the heuristic predicts 1.
    pub slope_vs_scale: f64,
    /// Log-log slope of `|D_n|` against `n`.
    pub slope_vs_n: f64,
    /// Asymptotic log-log slope of the scale against `n`.
    pub expected_slope_vs_n: f64,
}

/// Asymptotic exponent `p` with `h'(n³)/n ~ n^p`.
pub fn scale_exponent(fam: &EnergyFamily3D) -> f64 {
    match *fam {
        EnergyFamily3D::PowerLaw { gamma, .. } => 3.0 * gamma - 4.0,
        EnergyFamily3D::LinearLog { .. } => -1.0,
    }
}

pub fn discrepancy_scaling<M: RadialMotion + ?Sized>(
    motion: &M,
    mollifier: &MollifierSpec,
    ladder: &[u32],
    field: &TestField,
    quad: &Quadrature,
) -> Result<DiscrepancyReport> {
    let fam = motion.family();
    let layer_actions: Vec<f64> = ladder
        .par_iter()
        .map(|&n| weak_residual_3d(motion, mollifier, n, field, RadialWindow::Layer, quad))
        .collect::<Result<_>>()?;
    let scale: Vec<f64> = ladder
        .iter()
        .map(|&n| {
            let nf = n as f64;
            fam.dh(nf * nf * nf) / nf
        })
        .collect();
    let lx: Vec<f64> = scale.iter().map(|s| s.abs().ln()).collect();
    let ly: Vec<f64> = layer_actions.iter().map(|d| d.abs().ln()).collect();
    Ok(DiscrepancyReport {
        field: *field,
        n_values: ladder.to_vec(),
        slope_vs_scale: fit_slope(&lx, &ly),
        slope_vs_n: ladder_slope(ladder, &layer_actions),
        expected_slope_vs_n: scale_exponent(fam),
        layer_actions,
        scale,
    })
}

/// Mollified energies relative to the homogeneous deformation, their
/// extrapolated limit, and the weak energy plus surface term it should match.
#[derive(Debug, Clone, Serialize)]
pub struct SlicEnergyReport {
    pub t: f64,
    pub rho: f64,
    pub n_values: Vec<u32>,
    pub energies: Vec<f64>,
    /// Richardson limit; absent when the energies diverge.
    pub extrapolated: Option<f64>,
    /// Convergence order used for the extrapolation.
    pub richardson_order: Option<f64>,
    /// Log-log growth rate of the energies when they diverge.
    pub divergence_rate: Option<f64>,
    /// Weak-solution energy difference (quadrature over the fan).
    pub weak_energy: f64,
    /// `(tφ(0))³ (4π/3) L`.
    pub surface_term: ExtReal,
    /// `weak_energy + surface_term` when finite.
    pub target: Option<f64>,
    pub relative_error: Option<f64>,
}

impl SlicEnergyReport {
    /// Limit energy exceeds the homogeneous one.
    pub fn p_wf_positive(&self) -> Option<bool> {
        self.extrapolated.map(|e| e > 0.0)
    }
}

/// Richardson extrapolation on the finest three levels of a geometric
/// ladder; the order is estimated from the data and falls back to 1.
pub fn richardson(n_values: &[u32], values: &[f64]) -> Option<(f64, f64)> {
    let k = values.len();
    if k < 2 {
        return None;
    }
    let r = n_values[k - 1] as f64 / n_values[k - 2] as f64;
    let mut p = 1.0;
    if k >= 3 {
        let r_prev = n_values[k - 2] as f64 / n_values[k - 3] as f64;
        let q = (values[k - 3] - values[k - 2]) / (values[k - 2] - values[k - 1]);
        if (r_prev - r).abs() < 1e-12 && q.is_finite() && q > 1.0 {
            let est = q.ln() / r.ln();
            if (0.5..=4.0).contains(&est) {
                p = est;
            }
        }
    }
    let e = values[k - 1] + (values[k - 1] - values[k - 2]) / (r.powf(p) - 1.0);
    Some((e, p))
}

pub fn slic_energy(
    sol: &CavitySolution,
    mollifier: &MollifierSpec,
    ladder: &[u32],
    t: f64,
    rho: f64,
    require_finite_limit: bool,
    quad: &Quadrature,
) -> Result<SlicEnergyReport> {
    let growth = sol.family.growth().l_3d.unwrap_or(ExtReal::Infinite);
    if require_finite_limit && growth == ExtReal::Infinite {
        return Err(Error::Contract(
            "energy limit requested for a material with superlinear h; the mollified energies diverge".into(),
        ));
    }
    let energies: Vec<f64> = ladder
        .par_iter()
        .map(|&n| mollified_energy(sol, mollifier, n, t, rho, quad))
        .collect::<Result<_>>()?;
    let weak_energy = energy_delta_quadrature(sol, t, rho, quad)?;
    let w0 = t * sol.phi0;
    let volume = 4.0 * std::f64::consts::PI / 3.0 * w0 * w0 * w0;
    let surface_term = match growth {
        ExtReal::Finite(l) => ExtReal::Finite(volume * l),
        ExtReal::Infinite => ExtReal::Infinite,
    };
    let (extrapolated, richardson_order, divergence_rate, target, relative_error) =
        match surface_term {
            ExtReal::Finite(s) => {
                let (e, p) = richardson(ladder, &energies)
                    .ok_or_else(|| Error::Contract("ladder needs at least two levels".into()))?;
                let target = energy_delta_closed(sol, t)? + s;
                (
                    Some(e),
                    Some(p),
                    None,
                    Some(target),
                    Some(((e - target) / target).abs()),
                )
            }
            ExtReal::Infinite => (
                None,
                None,
                Some(ladder_slope(ladder, &energies)),
                None,
                None,
            ),
        };
    Ok(SlicEnergyReport {
        t,
        rho,
        n_values: ladder.to_vec(),
        energies,
        extrapolated,
        richardson_order,
        divergence_rate,
        weak_energy,
        surface_term,
        target,
        relative_error,
    })
}

/// Layer-bound constants across a ladder and their spread.
#[derive(Debug, Clone, Serialize)]
pub struct LayerBoundsReport {
    pub bounds: Vec<LayerBounds>,
    pub dets: Vec<DetReport>,
    /// `max c_φ / min c_φ` over the ladder.
    pub c_phi_spread: f64,
    /// `max c₃ / min c₃` over the ladder.
    pub c3_spread: f64,
}

pub fn layer_bounds_ladder<M: RadialMotion + ?Sized>(
    motion: &M,
    mollifier: &MollifierSpec,
    ladder: &[u32],
    t: f64,
) -> Result<LayerBoundsReport> {
    let rows: Vec<(LayerBounds, DetReport)> = ladder
        .par_iter()
        .map(|&n| {
            Ok((
                layer_bounds(motion, mollifier, n, t)?,
                det_positivity(motion, mollifier, n, t)?,
            ))
        })
        .collect::<Result<_>>()?;
    let (bounds, dets): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let spread = |xs: Vec<f64>| {
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(0.0, f64::max);
        hi / lo
    };
    Ok(LayerBoundsReport {
        c_phi_spread: spread(bounds.iter().map(|b| b.c_phi).collect()),
        c3_spread: spread(bounds.iter().map(|b| b.c3).collect()),
        bounds,
        dets,
    })
}
