//! Image-point kinematics.
//!
//! The wall is the plane `z = 0`, the atom sits at `(0, 0, d)` and its mirror
//! image at `(0, 0, -d)`. All lengths are reduced (`k0 r`), so the transition
//! wavenumber is 1 throughout the crate.

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Smallest atom-to-point distance accepted before the point counts as
/// coincident with the source.
pub const COINCIDENCE_GUARD: f64 = 1e-9;

/// Cartesian axis index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        Axis::ALL.get(i).copied()
    }
}

/// The two propagation paths from the source to an observation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Straight from the atom (distance `r0`).
    Direct = 0,
    /// Via the wall, i.e. from the image atom (distance `r1`).
    Reflected = 1,
}

impl Branch {
    pub const ALL: [Branch; 2] = [Branch::Direct, Branch::Reflected];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Sign picked up by dipole component `q` on the given branch: the image
/// dipole keeps its normal component and flips the tangential ones.
pub fn reflection_sign(branch: Branch, q: Axis) -> f64 {
    match (branch, q) {
        (Branch::Direct, _) | (Branch::Reflected, Axis::Z) => 1.0,
        (Branch::Reflected, _) => -1.0,
    }
}

/// `reflection_sign` for all three components at once.
pub fn reflection_signs(branch: Branch) -> Vec3 {
    [
        reflection_sign(branch, Axis::X),
        reflection_sign(branch, Axis::Y),
        reflection_sign(branch, Axis::Z),
    ]
}

/// The radiating two-level atom.
///
/// `mu` holds the reduced dipole components `m_q`, normalised so that the
/// static polarizability is `2 m_q m_q'`. An isotropic atom uses the
/// orientation-averaged tensor `2 m^2 delta_qq'` instead of the outer product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSource {
    pub d: f64,
    pub mu: Vec3,
    pub isotropic: bool,
}

impl AtomSource {
    /// Builds an atom; it is flagged isotropic when all three components agree.
    pub fn new(d: f64, mu: Vec3) -> Result<Self> {
        let isotropic = mu[0] == mu[1] && mu[1] == mu[2];
        Self::build(d, mu, isotropic)
    }

    pub fn isotropic(d: f64, m: f64) -> Result<Self> {
        Self::build(d, [m; 3], true)
    }

    /// A fixed-orientation dipole, never averaged even when the components agree.
    pub fn oriented(d: f64, mu: Vec3) -> Result<Self> {
        Self::build(d, mu, false)
    }

    fn build(d: f64, mu: Vec3, isotropic: bool) -> Result<Self> {
        if !d.is_finite() || d <= 0.0 {
            return Err(Error::InvalidAtom(format!("wall distance must be positive, got {d}")));
        }
        if mu.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidAtom("dipole components must be finite".into()));
        }
        if mu.iter().all(|&m| m == 0.0) {
            return Err(Error::InvalidAtom("dipole has no nonzero component".into()));
        }
        Ok(Self { d, mu, isotropic })
    }

    pub fn position(&self) -> Vec3 {
        [0.0, 0.0, self.d]
    }

    pub fn image_position(&self) -> Vec3 {
        [0.0, 0.0, -self.d]
    }

    /// Same dipole at another wall distance.
    pub fn with_distance(&self, d: f64) -> Result<Self> {
        Self::build(d, self.mu, self.isotropic)
    }

    /// `2 m_q m_q'` (or `2 m^2 delta_qq'` when isotropic); the polarizability
    /// tensor at zero frequency.
    pub fn dipole_weights(&self) -> [[f64; 3]; 3] {
        let mut w = [[0.0; 3]; 3];
        if self.isotropic {
            let m2 = self.mu[0] * self.mu[0];
            for (q, row) in w.iter_mut().enumerate() {
                row[q] = 2.0 * m2;
            }
        } else {
            for (q, row) in w.iter_mut().enumerate() {
                for (qp, entry) in row.iter_mut().enumerate() {
                    *entry = 2.0 * self.mu[q] * self.mu[qp];
                }
            }
        }
        w
    }

    /// Scalar static polarizability of an isotropic atom, `2 m^2`.
    pub fn static_polarizability(&self) -> Option<f64> {
        self.isotropic.then(|| 2.0 * self.mu[0] * self.mu[0])
    }
}

/// Observation point together with its direct and image kinematics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryFrame {
    pub point: Vec3,
    pub r0: f64,
    pub r1: f64,
    pub rho: f64,
    pub rhat0: Vec3,
    pub rhat1: Vec3,
    pub cos_theta0: f64,
    pub cos_theta1: f64,
}

impl GeometryFrame {
    pub fn distance(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Direct => self.r0,
            Branch::Reflected => self.r1,
        }
    }

    pub fn rhat(&self, branch: Branch) -> Vec3 {
        match branch {
            Branch::Direct => self.rhat0,
            Branch::Reflected => self.rhat1,
        }
    }

    pub fn cos_theta(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Direct => self.cos_theta0,
            Branch::Reflected => self.cos_theta1,
        }
    }

    /// `r sin(theta)` evaluated on the given branch; equals `rho` on both.
    pub fn transverse_from(&self, branch: Branch) -> f64 {
        let n = self.rhat(branch);
        self.distance(branch) * n[0].hypot(n[1])
    }
}

/// Computes the frame of `point` with respect to `atom` and its image.
pub fn derive_frame(point: Vec3, atom: &AtomSource) -> Result<GeometryFrame> {
    if point.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("observation point"));
    }
    let [x, y, z] = point;
    if z <= 0.0 {
        return Err(Error::BehindWall { z });
    }
    let rho = x.hypot(y);
    let v0 = [x, y, z - atom.d];
    let v1 = [x, y, z + atom.d];
    let r0 = norm(v0);
    if r0 < COINCIDENCE_GUARD {
        return Err(Error::CoincidentPoint { r0 });
    }
    let r1 = norm(v1);
    let rhat0 = scale(v0, 1.0 / r0);
    let rhat1 = scale(v1, 1.0 / r1);
    Ok(GeometryFrame {
        point,
        r0,
        r1,
        rho,
        rhat0,
        rhat1,
        cos_theta0: rhat0[2],
        cos_theta1: rhat1[2],
    })
}

pub(crate) fn norm(v: Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn scale(v: Vec3, s: f64) -> Vec3 {
    [v[0] * s, v[1] * s, v[2] * s]
}

pub(crate) fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
