//! Dyadic response tensors and the atomic polarizability.
//!
//! Both tensors take a single complex argument `zeta`: `zeta = k r` for real
//! frequencies and `zeta = i k r` on the imaginary axis. With
//! `F_pq = -lap delta_pq + d_p d_q` and `G_pq = -eps_pqs d_s` acting on spherical
//! waves,
//!
//! ```text
//! F_pq e^{ikr}/r = k^3 f_pq(kr) e^{ikr}
//! G_pq e^{ikr}/r = i k^2 g_pq(kr) e^{ikr}
//! ```
//!
//! where
//!
//! ```text
//! f_pq(zeta) = (delta_pq - r_p r_q)/zeta + (delta_pq - 3 r_p r_q)(i/zeta^2 - 1/zeta^3)
//! g_pq(zeta) = -eps_pqs r_s (1/zeta + i/zeta^2)
//! ```
//!
//! On the imaginary axis `g(i y) = i eps_pqs r_s (1/y + 1/y^2)`, so every
//! product of two magnetic tensors there carries a factor `i^2 = -1`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{AtomSource, Vec3};

pub type Tensor3 = [[Complex64; 3]; 3];

pub const ZERO_TENSOR: Tensor3 = [[Complex64::new(0.0, 0.0); 3]; 3];

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `eps[p][q][s]`, the fully antisymmetric symbol with `eps[0][1][2] = 1`.
pub const LEVI_CIVITA: [[[f64; 3]; 3]; 3] = [
    [[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]],
    [[0.0, 0.0, -1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
    [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorKind {
    /// `f_pq`, symmetric; governs the electric field.
    Electric,
    /// `g_pq`, antisymmetric; governs the magnetic field.
    Magnetic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseTensor {
    pub entries: Tensor3,
    pub argument: Complex64,
    pub rhat: Vec3,
    pub kind: TensorKind,
}

impl ResponseTensor {
    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1] + self.entries[2][2]
    }

    /// Full contraction `sum_pq a_pq b_pq`.
    pub fn contract(&self, other: &ResponseTensor) -> Complex64 {
        contract(&self.entries, &other.entries)
    }
}

pub fn f_tensor(zeta: Complex64, rhat: Vec3) -> Result<ResponseTensor> {
    check_argument(zeta)?;
    Ok(ResponseTensor {
        entries: f_entries(zeta, rhat),
        argument: zeta,
        rhat,
        kind: TensorKind::Electric,
    })
}

pub fn g_tensor(zeta: Complex64, rhat: Vec3) -> Result<ResponseTensor> {
    check_argument(zeta)?;
    Ok(ResponseTensor {
        entries: g_entries(zeta, rhat),
        argument: zeta,
        rhat,
        kind: TensorKind::Magnetic,
    })
}

fn check_argument(zeta: Complex64) -> Result<()> {
    if !zeta.is_finite() {
        return Err(Error::NonFinite("tensor argument"));
    }
    if zeta.norm() == 0.0 {
        return Err(Error::ZeroArgument);
    }
    Ok(())
}

/// Unchecked `f_pq(zeta)`; used inside integrands.
pub(crate) fn f_entries(zeta: Complex64, rhat: Vec3) -> Tensor3 {
    let inv = zeta.inv();
    let inv2 = inv * inv;
    let transverse = inv;
    let near = I * inv2 - inv2 * inv;
    let mut t = ZERO_TENSOR;
    for p in 0..3 {
        for q in 0..3 {
            let delta = if p == q { 1.0 } else { 0.0 };
            let rr = rhat[p] * rhat[q];
            t[p][q] = transverse * (delta - rr) + near * (delta - 3.0 * rr);
        }
    }
    t
}

/// Unchecked `g_pq(zeta)`; used inside integrands.
pub(crate) fn g_entries(zeta: Complex64, rhat: Vec3) -> Tensor3 {
    let inv = zeta.inv();
    let radial = -(inv + I * inv * inv);
    let mut t = ZERO_TENSOR;
    for (p, row) in t.iter_mut().enumerate() {
        for (q, entry) in row.iter_mut().enumerate() {
            let e: f64 = (0..3).map(|s| LEVI_CIVITA[p][q][s] * rhat[s]).sum();
            *entry = radial * e;
        }
    }
    t
}

/// Real tensor `A` with `k^3 f_pq(i k r) = -i A_pq`, written without negative
/// powers of `k` so it stays finite as `k -> 0`.
pub fn imaginary_axis_f(k: f64, r: f64, rhat: Vec3) -> [[f64; 3]; 3] {
    let transverse = k * k / r;
    let near = k / (r * r) + 1.0 / (r * r * r);
    let mut t = [[0.0; 3]; 3];
    for (p, row) in t.iter_mut().enumerate() {
        for (q, entry) in row.iter_mut().enumerate() {
            let delta = if p == q { 1.0 } else { 0.0 };
            let rr = rhat[p] * rhat[q];
            *entry = transverse * (delta - rr) + near * (delta - 3.0 * rr);
        }
    }
    t
}

/// Real tensor `B` with `k^3 g_pq(i k r) = i B_pq`.
pub fn imaginary_axis_g(k: f64, r: f64, rhat: Vec3) -> [[f64; 3]; 3] {
    let radial = k * k / r + k / (r * r);
    let mut t = [[0.0; 3]; 3];
    for (p, row) in t.iter_mut().enumerate() {
        for (q, entry) in row.iter_mut().enumerate() {
            let e: f64 = (0..3).map(|s| LEVI_CIVITA[p][q][s] * rhat[s]).sum();
            *entry = radial * e;
        }
    }
    t
}

pub(crate) fn contract(a: &Tensor3, b: &Tensor3) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..3 {
        for q in 0..3 {
            acc += a[p][q] * b[p][q];
        }
    }
    acc
}

/// Atomic polarizability on the imaginary frequency axis,
/// `alpha_qq'(i kappa) = 2 m_q m_q' / (1 + kappa^2)` in reduced units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizabilityTensor {
    /// The `kappa = 0` tensor.
    pub static_tensor: [[f64; 3]; 3],
}

impl PolarizabilityTensor {
    pub fn of(atom: &AtomSource) -> Self {
        Self { static_tensor: atom.dipole_weights() }
    }

    pub fn at(&self, kappa: f64) -> Result<[[f64; 3]; 3]> {
        if kappa.is_nan() {
            return Err(Error::NonFinite("kappa"));
        }
        if kappa < 0.0 {
            return Err(Error::NegativeWavenumber(kappa));
        }
        Ok(self.scaled(dispersion(kappa)))
    }

    pub(crate) fn scaled(&self, s: f64) -> [[f64; 3]; 3] {
        let mut out = self.static_tensor;
        for row in out.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }
}

/// Frequency profile `1 / (1 + kappa^2)` of the two-level polarizability.
pub fn dispersion(kappa: f64) -> f64 {
    1.0 / (1.0 + kappa * kappa)
}

pub fn polarizability(atom: &AtomSource, kappa: f64) -> Result<[[f64; 3]; 3]> {
    PolarizabilityTensor::of(atom).at(kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const Z: Vec3 = [0.0, 0.0, 1.0];

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn f_on_axis_at_unit_argument() {
        let f = f_tensor(c(1.0, 0.0), Z).unwrap();
        assert_relative_eq!(f.entries[2][2].re, 2.0, max_relative = 1e-15);
        assert_relative_eq!(f.entries[2][2].im, -2.0, max_relative = 1e-15);
        // transverse entries: 1 + (i - 1) = i
        assert_relative_eq!(f.entries[0][0].im, 1.0, max_relative = 1e-15);
        assert!(f.entries[0][0].re.abs() < 1e-15);
    }

    #[test]
    fn f_on_imaginary_axis_is_imaginary() {
        // f(i) zz = -2 (i/(i)^2 - 1/(i)^3) = -2(-i - i) = 4i
        let f = f_tensor(c(0.0, 1.0), Z).unwrap();
        assert_relative_eq!(f.entries[2][2].im, 4.0, max_relative = 1e-15);
        assert!(f.entries[2][2].re.abs() < 1e-15);
    }

    #[test]
    fn g_structure_on_axis() {
        let g = g_tensor(c(2.5, 0.3), Z).unwrap();
        for p in 0..3 {
            for q in 0..3 {
                let allowed = (p, q) == (0, 1) || (p, q) == (1, 0);
                if !allowed {
                    assert_eq!(g.entries[p][q], Complex64::new(0.0, 0.0));
                }
            }
        }
        assert_eq!(g.entries[0][1], -g.entries[1][0]);
    }

    #[test]
    fn g_on_imaginary_axis_matches_printed_form() {
        let y = 0.7;
        let rhat = [0.6, 0.0, 0.8];
        let g = g_tensor(c(0.0, y), rhat).unwrap();
        let radial = 1.0 / y + 1.0 / (y * y);
        for p in 0..3 {
            for q in 0..3 {
                let e: f64 = (0..3).map(|s| LEVI_CIVITA[p][q][s] * rhat[s]).sum();
                let want = c(0.0, e * radial);
                assert!((g.entries[p][q] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn levi_civita_contraction_brute_force() {
        // sum_pq eps_pqs eps_pqs' = 2 delta_ss'
        for s in 0..3 {
            for sp in 0..3 {
                let mut acc = 0.0;
                for p in 0..3 {
                    for q in 0..3 {
                        acc += LEVI_CIVITA[p][q][s] * LEVI_CIVITA[p][q][sp];
                    }
                }
                assert_eq!(acc, if s == sp { 2.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn g_self_contraction() {
        // sum_pq g_pq g_pq = 2 (1/zeta + i/zeta^2)^2; at zeta = i y this is
        // -2 (1/y + 1/y^2)^2.
        let rhat = [0.36, 0.48, 0.8];
        let zeta = c(1.3, -0.4);
        let g = g_tensor(zeta, rhat).unwrap();
        let h = zeta.inv() + I * zeta.inv() * zeta.inv();
        assert!((g.contract(&g) - 2.0 * h * h).norm() < 1e-13);

        let y = 3.0;
        let g = g_tensor(c(0.0, y), rhat).unwrap();
        let radial = 1.0 / y + 1.0 / (y * y);
        assert!((g.contract(&g) - c(-2.0 * radial * radial, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn imaginary_axis_forms_match_complex_tensors() {
        let rhat = [0.48, -0.6, 0.64];
        for (k, r) in [(0.3, 2.0), (1.7, 0.9), (12.0, 5.0)] {
            let zeta = c(0.0, k * r);
            let f = f_entries(zeta, rhat);
            let g = g_entries(zeta, rhat);
            let a = imaginary_axis_f(k, r, rhat);
            let b = imaginary_axis_g(k, r, rhat);
            let k3 = k * k * k;
            for p in 0..3 {
                for q in 0..3 {
                    let scale = 1.0 + a[p][q].abs() + b[p][q].abs();
                    assert!((f[p][q] * k3 - c(0.0, -a[p][q])).norm() < 1e-13 * scale);
                    assert!((g[p][q] * k3 - c(0.0, b[p][q])).norm() < 1e-13 * scale);
                }
            }
        }
    }

    #[test]
    fn zero_argument_rejected() {
        assert_eq!(f_tensor(c(0.0, 0.0), Z).unwrap_err(), Error::ZeroArgument);
        assert_eq!(g_tensor(c(0.0, 0.0), Z).unwrap_err(), Error::ZeroArgument);
    }

    #[test]
    fn polarizability_values() {
        let iso = AtomSource::isotropic(1.0, 1.0).unwrap();
        let a0 = polarizability(&iso, 0.0).unwrap();
        let a1 = polarizability(&iso, 1.0).unwrap();
        for q in 0..3 {
            assert_eq!(a0[q][q], 2.0);
            assert_eq!(a1[q][q], 1.0);
        }
        let x = AtomSource::new(1.0, [1.0, 0.0, 0.0]).unwrap();
        let a = polarizability(&x, 3.0).unwrap();
        assert_relative_eq!(a[0][0], 0.2, max_relative = 1e-15);
        let others: f64 = (0..9).filter(|&i| i != 0).map(|i| a[i / 3][i % 3].abs()).sum();
        assert_eq!(others, 0.0);
        assert!(matches!(polarizability(&iso, -0.1), Err(Error::NegativeWavenumber(_))));
    }

    fn unit(theta: f64, phi: f64) -> Vec3 {
        [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn tensor_symmetries(
            re in -30.0f64..30.0,
            im in -30.0f64..30.0,
            theta in 0.0f64..std::f64::consts::PI,
            phi in 0.0f64..std::f64::consts::TAU,
        ) {
            let zeta = c(re, im);
            prop_assume!(zeta.norm() > 1e-2);
            let rhat = unit(theta, phi);
            let f = f_tensor(zeta, rhat).unwrap();
            let g = g_tensor(zeta, rhat).unwrap();
            let scale = f.entries.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
            for p in 0..3 {
                prop_assert!(g.entries[p][p].norm() == 0.0);
                for q in 0..3 {
                    prop_assert!((f.entries[p][q] - f.entries[q][p]).norm() <= 1e-12 * scale);
                    prop_assert!((g.entries[p][q] + g.entries[q][p]).norm() <= 1e-12 * scale.max(1.0));
                }
            }
            let want = 2.0 / zeta;
            prop_assert!((f.trace() - want).norm() <= 1e-12 * scale.max(want.norm()));
        }

        #[test]
        fn isotropic_polarizability_positive_and_decreasing(
            m in 0.01f64..10.0,
            k1 in 0.0f64..50.0,
            dk in 1e-3f64..10.0,
        ) {
            let atom = AtomSource::isotropic(1.0, m).unwrap();
            let a = polarizability(&atom, k1).unwrap();
            let b = polarizability(&atom, k1 + dk).unwrap();
            for q in 0..3 {
                prop_assert!(a[q][q] > 0.0);
                prop_assert!(b[q][q] < a[q][q]);
            }
        }
    }
}
