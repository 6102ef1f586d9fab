//! Energy bookkeeping for cavitating solutions versus the homogeneous
//! deformation `w = λR`.
//!
//! Inside a ball containing the wave fan the cavitating solution carries
//! less mechanical energy than the homogeneous one; the whole deficit is
//! dissipated at the precursor shock.

use std::f64::consts::PI;

use serde::Serialize;

use crate::constitutive::EnergyFamily3D;
use crate::error::{positive, Error, Result};
use crate::numerics::Quadrature;
use crate::selfsim::{CavitySolution, ShockJunction};

/// `Φ(a₋,λ,λ) - Φ(λ,λ,λ) + ½(Φ1(a₋,λ,λ) + Φ1(λ,λ,λ))(λ - a₋)`.
pub fn shock_bracket(fam: &EnergyFamily3D, a_minus: f64, lambda: f64) -> f64 {
    fam.phi_ab(a_minus, lambda) - fam.phi_ab(lambda, lambda)
        + 0.5 * (fam.phi1(a_minus, lambda) + fam.phi1(lambda, lambda)) * (lambda - a_minus)
}

/// Closed-form energy difference for a junction at time `t`.
pub fn junction_energy_delta(fam: &EnergyFamily3D, junction: &ShockJunction, t: f64) -> f64 {
    let r = t * junction.sigma;
    r * r * r * (4.0 * PI / 3.0) * shock_bracket(fam, junction.a_minus, junction.lambda)
}

/// Work done on the material by the cavity wall up to time `t`,
/// `-(4π/3)(tφ(0))³ h'(v0)`; zero for a stress-free cavity.
pub fn cavity_wall_work(sol: &CavitySolution, t: f64) -> f64 {
    let w0 = t * sol.phi0;
    -(4.0 * PI / 3.0) * w0 * w0 * w0 * sol.family.dh(sol.v0)
}

/// `E(cavity, B_ρ) - E(homogeneous, B_ρ)` in closed form, for any `ρ ≥ tσ`.
pub fn energy_delta_closed(sol: &CavitySolution, t: f64) -> Result<f64> {
    positive("t", t)?;
    Ok(junction_energy_delta(&sol.family, &sol.junction, t) + cavity_wall_work(sol, t))
}

/// Local energy density minus the homogeneous density at `(R, t)`.
fn energy_density_excess(sol: &CavitySolution, r: f64, t: f64, reference: f64) -> f64 {
    let (phi, a) = sol.profile(r / t);
    if r / t >= sol.sigma() {
        return 0.0;
    }
    let s = r / t;
    let b = phi / s;
    let wt = phi - s * a;
    0.5 * wt * wt + sol.family.phi_ab(a, b) - reference
}

/// Same energy difference by adaptive quadrature of the densities over
/// `B_ρ`, split at the shock radius.
pub fn energy_delta_quadrature(
    sol: &CavitySolution,
    t: f64,
    rho: f64,
    quad: &Quadrature,
) -> Result<f64> {
    positive("t", t)?;
    let shock = t * sol.sigma();
    if !(rho >= shock) {
        return Err(Error::Contract(format!(
            "ball radius {rho} does not contain the wave fan (shock at R = {shock})"
        )));
    }
    let lam = sol.lambda();
    let reference = sol.family.phi_ab(lam, lam);
    let inner = quad.integrate(
        |r| {
            if r == 0.0 {
                return 0.0;
            }
            energy_density_excess(sol, r, t, reference) * r * r
        },
        0.0,
        shock,
        &[],
    )?;
    // Outside the fan the integrand vanishes identically; integrating it
    // anyway keeps the locality check honest.
    let outer = quad.integrate(
        |r| energy_density_excess(sol, r, t, reference) * r * r,
        shock,
        rho,
        &[],
    )?;
    Ok(4.0 * PI * (inner.value + outer.value))
}

/// Energy production at a shock, `-σ[[½ v² + Φ]] - [[v Φ1]]` with
/// `[[f]] = f(right) - f(left)` and the particle velocity behind the
/// shock from the kinematic jump condition. For RH-consistent junctions
/// this equals `σ` times the shock bracket.
pub fn shock_production(fam: &EnergyFamily3D, junction: &ShockJunction) -> Result<f64> {
    let lam = junction.lambda;
    let am = junction.a_minus;
    let scale = fam.phi1(lam, lam).abs()
        + fam.phi1(am, lam).abs()
        + junction.sigma.powi(2) * (lam - am).abs();
    if !(junction.rh_residual.abs() <= 1e-8 * scale.max(1.0)) {
        return Err(Error::Contract(format!(
            "junction is not Rankine-Hugoniot consistent (residual {})",
            junction.rh_residual
        )));
    }
    let sigma = junction.sigma;
    let v_left = junction.velocity_behind();
    let e_left = 0.5 * v_left * v_left + fam.phi_ab(am, lam);
    let e_right = fam.phi_ab(lam, lam);
    let flux_left = v_left * fam.phi1(am, lam);
    let flux_right = 0.0;
    Ok(-sigma * (e_right - e_left) - (flux_right - flux_left))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport3D {
    pub t: f64,
    pub rho: f64,
    pub delta_closed: f64,
    pub delta_quadrature: f64,
    pub shock_production: f64,
    pub entropy_sign_ok: bool,
}

impl EnergyReport3D {
    pub fn relative_discrepancy(&self) -> f64 {
        ((self.delta_quadrature - self.delta_closed) / self.delta_closed).abs()
    }
}

pub fn energy_report(
    sol: &CavitySolution,
    t: f64,
    rho: f64,
    quad: &Quadrature,
) -> Result<EnergyReport3D> {
    let delta_closed = energy_delta_closed(sol, t)?;
    let delta_quadrature = energy_delta_quadrature(sol, t, rho, quad)?;
    let production = shock_production(&sol.family, &sol.junction)?;
    Ok(EnergyReport3D {
        t,
        rho,
        delta_closed,
        delta_quadrature,
        shock_production: production,
        entropy_sign_ok: production <= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selfsim::{shoot_cavity_solution, CavityCondition, SolverControls};

    fn solution() -> CavitySolution {
        let f = EnergyFamily3D::power_law(1.0, 1.0, 1.25, 1.0).unwrap();
        shoot_cavity_solution(
            &f,
            3.0,
            CavityCondition::StressFree,
            &SolverControls::default(),
        )
        .unwrap()
    }

    #[test]
    fn degenerate_bracket_vanishes() {
        let f = EnergyFamily3D::linear_log(1.0, 1.0, 1.0).unwrap();
        assert_eq!(shock_bracket(&f, 1.7, 1.7), 0.0);
        let j = ShockJunction::new(&f, 1.3, 1.7, 1.7).unwrap();
        assert_eq!(shock_production(&f, &j).unwrap(), 0.0);
    }

    #[test]
    fn prescribed_cavity_includes_wall_work() {
        let f = EnergyFamily3D::power_law(1.0, 1.0, 1.25, 1.0).unwrap();
        let sol = shoot_cavity_solution(
            &f,
            3.0,
            CavityCondition::PrescribedV0(0.8),
            &SolverControls::default(),
        )
        .unwrap();
        assert!(cavity_wall_work(&sol, 1.0) > 0.0);
        let closed = energy_delta_closed(&sol, 1.0).unwrap();
        let quad =
            energy_delta_quadrature(&sol, 1.0, 2.0 * sol.sigma(), &Quadrature::default()).unwrap();
        assert!(
            ((quad - closed) / closed).abs() < 1e-4,
            "{quad} vs {closed}"
        );
    }

    #[test]
    fn closed_form_scales_cubically_in_time() {
        let sol = solution();
        let d1 = energy_delta_closed(&sol, 1.0).unwrap();
        let d2 = energy_delta_closed(&sol, 2.0).unwrap();
        assert!(d1 < 0.0);
        assert!((d2 - 8.0 * d1).abs() <= 1e-14 * d2.abs());
    }

    #[test]
    fn quadrature_matches_closed_form_and_is_local() {
        let sol = solution();
        let q = Quadrature::default();
        let closed = energy_delta_closed(&sol, 1.0).unwrap();
        let quad = energy_delta_quadrature(&sol, 1.0, sol.sigma(), &q).unwrap();
        assert!(
            ((quad - closed) / closed).abs() < 1e-4,
            "{quad} vs {closed}"
        );
        let wider = energy_delta_quadrature(&sol, 1.0, 2.0 * sol.sigma() + 3.0, &q).unwrap();
        assert!((wider - quad).abs() < 1e-10);
        assert!(energy_delta_quadrature(&sol, 1.0, 0.5 * sol.sigma(), &q).is_err());
    }

    #[test]
    fn production_equals_sigma_times_bracket() {
        let sol = solution();
        let p = shock_production(&sol.family, &sol.junction).unwrap();
        let expect = sol.sigma() * shock_bracket(&sol.family, sol.junction.a_minus, sol.lambda());
        assert!(p < 0.0);
        assert!(((p - expect) / expect).abs() < 1e-12);
    }

    #[test]
    fn inconsistent_junction_is_a_contract_error() {
        let f = EnergyFamily3D::power_law(1.0, 1.0, 1.25, 1.0).unwrap();
        let j = ShockJunction::new(&f, 5.0, 0.5, 1.0).unwrap();
        assert!(matches!(shock_production(&f, &j), Err(Error::Contract(_))));
    }
}
