//! Far-zone Casimir-Polder energies between the source atom A and a
//! polarizable atom B near the wall.
//!
//! Atom B sits at the observation point of the frame and responds through a
//! static scalar polarizability, `E = -alpha_B <E^2(r_B)> / 2` (electric) or
//! `E = -alpha_M <H^2(r_B)> / 2` (magnetic). The closed forms assume the
//! static polarizability of A as well; the quadrature route integrates the
//! density with either model.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fields::{
    dynamic_electric_density_with, static_electric_density_with, static_magnetic_density_with, DensityOptions,
    DensityResult, FieldKind,
};
use crate::geometry::{add, derive_frame, scale, AtomSource, GeometryFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    ClosedForm,
    Quadrature,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::ClosedForm => "closed_form",
            Route::Quadrature => "quadrature",
        }
    }
}

/// Interaction energy in units of `hbar c k0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CPEnergy {
    pub total: f64,
    pub direct: f64,
    pub image: f64,
    pub cross: f64,
    pub kind: FieldKind,
    pub route: Route,
}

impl CPEnergy {
    fn from_parts(direct: f64, image: f64, cross: f64, kind: FieldKind, route: Route) -> Self {
        Self { total: direct + image + cross, direct, image, cross, kind, route }
    }

    fn from_density(density: &DensityResult, polarizability: f64) -> Self {
        let s = -0.5 * polarizability;
        Self::from_parts(
            s * density.direct,
            s * density.image,
            s * density.cross,
            density.kind,
            Route::Quadrature,
        )
    }
}

/// Electric energy from the distances to the source and to its image and the
/// transverse offset `rho`.
pub fn electric_cp_from_distances(r0: f64, r1: f64, rho: f64, alpha_a: f64, alpha_b: f64) -> CPEnergy {
    let aa = alpha_a * alpha_b;
    let direct = -23.0 * aa / (4.0 * PI * r0.powi(7));
    let image = -23.0 * aa / (4.0 * PI * r1.powi(7));
    let bracket = 3.0 * r0 * r0 * r1 * r1 + rho * rho * (r0 * r0 + 5.0 * r0 * r1 + r1 * r1);
    let cross = 16.0 * aa * bracket / (PI * (r0 * r1).powi(3) * (r0 + r1).powi(5));
    CPEnergy::from_parts(direct, image, cross, FieldKind::Electric, Route::ClosedForm)
}

/// Same as [`electric_cp_from_distances`] with `rho = r0 sin(theta0)`.
pub fn electric_cp_from_angles(r0: f64, r1: f64, theta0: f64, alpha_a: f64, alpha_b: f64) -> CPEnergy {
    electric_cp_from_distances(r0, r1, r0 * theta0.sin(), alpha_a, alpha_b)
}

pub fn electric_cp_closed(frame: &GeometryFrame, alpha_a: f64, alpha_b: f64) -> CPEnergy {
    electric_cp_from_distances(frame.r0, frame.r1, frame.rho, alpha_a, alpha_b)
}

/// Magnetic energy from distances and direction cosines to the wall normal.
pub fn magnetic_cp_from_angles(
    r0: f64,
    r1: f64,
    cos_theta0: f64,
    cos_theta1: f64,
    alpha_e_a: f64,
    alpha_m_b: f64,
) -> CPEnergy {
    let aa = alpha_e_a * alpha_m_b;
    let direct = 7.0 * aa / (4.0 * PI * r0.powi(7));
    let image = 7.0 * aa / (4.0 * PI * r1.powi(7));
    let bracket = r0 * r0 + 5.0 * r0 * r1 + r1 * r1;
    let cross = -16.0 * aa * r0 * cos_theta0 * r1 * cos_theta1 * bracket / (PI * (r0 * r1).powi(3) * (r0 + r1).powi(5));
    CPEnergy::from_parts(direct, image, cross, FieldKind::Magnetic, Route::ClosedForm)
}

pub fn magnetic_cp_closed(frame: &GeometryFrame, alpha_e_a: f64, alpha_m_b: f64) -> CPEnergy {
    magnetic_cp_from_angles(frame.r0, frame.r1, frame.cos_theta0, frame.cos_theta1, alpha_e_a, alpha_m_b)
}

/// Electric energy from the stationary density with A's polarizability
/// frozen at its static value.
pub fn electric_cp_quadrature(frame: &GeometryFrame, atom_a: &AtomSource, alpha_b: f64) -> Result<CPEnergy> {
    electric_cp_quadrature_with(frame, atom_a, alpha_b, &DensityOptions::far_zone())
}

pub fn electric_cp_quadrature_with(
    frame: &GeometryFrame,
    atom_a: &AtomSource,
    alpha_b: f64,
    opts: &DensityOptions,
) -> Result<CPEnergy> {
    let density = static_electric_density_with(frame, atom_a, opts)?;
    Ok(CPEnergy::from_density(&density, alpha_b))
}

pub fn magnetic_cp_quadrature(frame: &GeometryFrame, atom_a: &AtomSource, alpha_m_b: f64) -> Result<CPEnergy> {
    magnetic_cp_quadrature_with(frame, atom_a, alpha_m_b, &DensityOptions::far_zone())
}

pub fn magnetic_cp_quadrature_with(
    frame: &GeometryFrame,
    atom_a: &AtomSource,
    alpha_m_b: f64,
    opts: &DensityOptions,
) -> Result<CPEnergy> {
    let density = static_magnetic_density_with(frame, atom_a, opts)?;
    Ok(CPEnergy::from_density(&density, alpha_m_b))
}

/// Electric energy at time `t` after A starts dressing itself, with the
/// dynamic polarizability of A.
pub fn dynamic_cp_energy(frame: &GeometryFrame, atom_a: &AtomSource, alpha_b: f64, t: f64) -> Result<f64> {
    Ok(dynamic_cp_decomposed(frame, atom_a, alpha_b, t, &DensityOptions::default())?.total)
}

pub fn dynamic_cp_decomposed(
    frame: &GeometryFrame,
    atom_a: &AtomSource,
    alpha_b: f64,
    t: f64,
    opts: &DensityOptions,
) -> Result<CPEnergy> {
    let density = dynamic_electric_density_with(frame, atom_a, t, opts)?;
    Ok(CPEnergy::from_density(&density, alpha_b))
}

/// Relative step of the central difference in [`quasi_static_force`].
pub const FORCE_STEP: f64 = 1e-4;

/// `-dE/dr0`, moving atom B radially away from A by a central difference of
/// step `FORCE_STEP * r0`. Negative values are attractive.
pub fn quasi_static_force<F>(frame: &GeometryFrame, atom_a: &AtomSource, energy: F) -> Result<f64>
where
    F: Fn(&GeometryFrame) -> Result<f64>,
{
    let h = FORCE_STEP * frame.r0;
    let shifted = |s: f64| -> Result<f64> {
        let point = add(atom_a.position(), scale(frame.rhat0, frame.r0 + s));
        let f = derive_frame(point, atom_a)?;
        energy(&f)
    };
    let ahead = shifted(h)?;
    let behind = shifted(-h)?;
    let force = -(ahead - behind) / (2.0 * h);
    if !force.is_finite() {
        return Err(Error::NonFinite("force"));
    }
    Ok(force)
}
