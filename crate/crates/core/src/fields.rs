//! First-order field kernels and vacuum-subtracted energy densities.
//!
//! A density is a double sum over the direct (`nu = 0`) and reflected
//! (`nu = 1`) paths. Its parts are reported separately: `direct` collects
//! `nu = nu' = 0`, `image` collects `nu = nu' = 1` and `cross` the two mixed
//! terms. Static densities are imaginary-axis integrals; the dynamic electric
//! density adds a damped transient that dies out as `t -> inf`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{reflection_signs, AtomSource, Branch, GeometryFrame};
use crate::quadrature::{integrate_damped_oscillatory, integrate_decaying, QuadratureSpec, WAVEFRONT_WINDOW};
use crate::response::{
    dispersion, f_entries, g_entries, imaginary_axis_f, imaginary_axis_g, Tensor3, ZERO_TENSOR,
};

type Real3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Electric,
    Magnetic,
}

impl FieldKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldKind::Electric => "electric",
            FieldKind::Magnetic => "magnetic",
        }
    }
}

/// Contribution of one propagation path to the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchKernel {
    pub electric: Tensor3,
    pub magnetic: Tensor3,
    /// `ct > r_nu`.
    pub active: bool,
}

impl BranchKernel {
    const INACTIVE: BranchKernel = BranchKernel {
        electric: ZERO_TENSOR,
        magnetic: ZERO_TENSOR,
        active: false,
    };
}

/// Coefficient of `S+` in the first-order field operators, indexed
/// `[p][q]` with `p` the field component and `q` the dipole component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldKernel {
    pub time: f64,
    pub electric: Tensor3,
    pub magnetic: Tensor3,
    pub direct_active: bool,
    pub reflected_active: bool,
    pub branches: [BranchKernel; 2],
}

impl FieldKernel {
    pub fn branch(&self, branch: Branch) -> &BranchKernel {
        &self.branches[branch.index()]
    }

    /// The `S-` coefficient.
    pub fn conjugate(&self) -> FieldKernel {
        let conj = |t: &Tensor3| t.map(|row| row.map(|v| v.conj()));
        let mut out = *self;
        out.electric = conj(&self.electric);
        out.magnetic = conj(&self.magnetic);
        for (b, src) in out.branches.iter_mut().zip(&self.branches) {
            b.electric = conj(&src.electric);
            b.magnetic = conj(&src.magnetic);
        }
        out
    }

    /// Contracts the kernel with a dipole vector, giving the field amplitude.
    pub fn apply(&self, kind: FieldKind, mu: [f64; 3]) -> [Complex64; 3] {
        let t = match kind {
            FieldKind::Electric => &self.electric,
            FieldKind::Magnetic => &self.magnetic,
        };
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (p, row) in t.iter().enumerate() {
            out[p] = row.iter().zip(mu).map(|(v, m)| v * m).sum();
        }
        out
    }
}

fn check_time(frame: &GeometryFrame, t: f64) -> Result<()> {
    if t.is_nan() || t.is_infinite() {
        return Err(Error::NonFinite("time"));
    }
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    for branch in Branch::ALL {
        let r = frame.distance(branch);
        let gap = (t - r).abs();
        if gap <= WAVEFRONT_WINDOW {
            return Err(Error::Wavefront { r, gap });
        }
    }
    Ok(())
}

fn branch_kernel(frame: &GeometryFrame, branch: Branch, t: f64) -> BranchKernel {
    let r = frame.distance(branch);
    if t <= r {
        return BranchKernel::INACTIVE;
    }
    let rhat = frame.rhat(branch);
    let sigma = reflection_signs(branch);
    let phase = Complex64::new(0.0, t - r).exp();
    let zeta = Complex64::new(r, 0.0);
    let f = f_entries(zeta, rhat);
    let g = g_entries(zeta, rhat);
    let mut electric = ZERO_TENSOR;
    let mut magnetic = ZERO_TENSOR;
    for p in 0..3 {
        for q in 0..3 {
            electric[p][q] = f[p][q].conj() * phase * sigma[q];
            magnetic[p][q] = g[p][q].conj() * phase * sigma[q];
        }
    }
    BranchKernel { electric, magnetic, active: true }
}

/// First-order kernel at reduced time `t`. Paths the signal has not yet
/// travelled contribute exact zeros.
pub fn first_order_kernel(frame: &GeometryFrame, t: f64) -> Result<FieldKernel> {
    check_time(frame, t)?;
    let branches = [
        branch_kernel(frame, Branch::Direct, t),
        branch_kernel(frame, Branch::Reflected, t),
    ];
    let mut electric = ZERO_TENSOR;
    let mut magnetic = ZERO_TENSOR;
    for b in branches.iter().filter(|b| b.active) {
        for p in 0..3 {
            for q in 0..3 {
                electric[p][q] += b.electric[p][q];
                magnetic[p][q] += b.magnetic[p][q];
            }
        }
    }
    Ok(FieldKernel {
        time: t,
        electric,
        magnetic,
        direct_active: branches[0].active,
        reflected_active: branches[1].active,
        branches,
    })
}

/// `<E1 . E1>` on the bare ground state, split by `(nu, nu')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct E1E1 {
    pub total: Complex64,
    pub terms: [[Complex64; 2]; 2],
}

pub fn e1e1_expectation(frame: &GeometryFrame, atom: &AtomSource, t: f64) -> Result<E1E1> {
    let kernel = first_order_kernel(frame, t)?;
    let weights = atom.dipole_weights().map(|row| row.map(|w| 0.5 * w));
    let mut terms = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (nu, a) in kernel.branches.iter().enumerate() {
        for (nup, b) in kernel.branches.iter().enumerate() {
            if !(a.active && b.active) {
                continue;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..3 {
                for q in 0..3 {
                    for qp in 0..3 {
                        acc += a.electric[p][q].conj() * weights[q][qp] * b.electric[p][qp];
                    }
                }
            }
            terms[nu][nup] = acc;
        }
    }
    let total = terms.iter().flatten().sum();
    Ok(E1E1 { total, terms })
}

/// Frequency dependence used for the source atom inside density integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PolarizabilityModel {
    /// `alpha(i k) = alpha(0) / (1 + k^2)`.
    #[default]
    Dynamic,
    /// `alpha(i k) = alpha(0)`, the far-zone approximation.
    Static,
}

impl PolarizabilityModel {
    fn weight(self, k: f64) -> f64 {
        match self {
            PolarizabilityModel::Dynamic => dispersion(k),
            PolarizabilityModel::Static => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DensityOptions {
    pub quadrature: QuadratureSpec,
    pub polarizability: PolarizabilityModel,
}

impl DensityOptions {
    pub fn far_zone() -> Self {
        Self { polarizability: PolarizabilityModel::Static, ..Self::default() }
    }

    pub fn with_quadrature(mut self, quadrature: QuadratureSpec) -> Self {
        self.quadrature = quadrature;
        self
    }
}

/// Energy density in units of `hbar c k0^4`, zero-point background removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityResult {
    pub total: f64,
    pub direct: f64,
    pub image: f64,
    pub cross: f64,
    pub kind: FieldKind,
    pub time: Option<f64>,
}

impl DensityResult {
    fn from_parts(direct: f64, image: f64, cross: f64, kind: FieldKind, time: Option<f64>) -> Self {
        Self { total: direct + image + cross, direct, image, cross, kind, time }
    }

    fn zero(kind: FieldKind, time: Option<f64>) -> Self {
        Self::from_parts(0.0, 0.0, 0.0, kind, time)
    }

    fn add(&self, other: &DensityResult) -> Self {
        Self::from_parts(
            self.direct + other.direct,
            self.image + other.image,
            self.cross + other.cross,
            self.kind,
            self.time.or(other.time),
        )
    }
}

/// `sum_p sum_qq' a_pq w_qq' b_pq'`.
fn sandwich(a: &Real3, w: &Real3, b: &Real3) -> f64 {
    let mut acc = 0.0;
    for p in 0..3 {
        for q in 0..3 {
            if a[p][q] == 0.0 {
                continue;
            }
            let inner: f64 = (0..3).map(|qp| w[q][qp] * b[p][qp]).sum();
            acc += a[p][q] * inner;
        }
    }
    acc
}

fn signed_columns(mut t: Real3, branch: Branch) -> Real3 {
    let sigma = reflection_signs(branch);
    for row in t.iter_mut() {
        for (v, s) in row.iter_mut().zip(sigma) {
            *v *= s;
        }
    }
    t
}

/// Real form of `k^3 T(i k r_nu)` with the reflection signs applied.
fn imaginary_axis_tensor(kind: FieldKind, frame: &GeometryFrame, branch: Branch, k: f64) -> Real3 {
    let r = frame.distance(branch);
    let rhat = frame.rhat(branch);
    let t = match kind {
        FieldKind::Electric => imaginary_axis_f(k, r, rhat),
        FieldKind::Magnetic => imaginary_axis_g(k, r, rhat),
    };
    signed_columns(t, branch)
}

/// One `(nu, nu')` term of the static density. The electric term is
/// `-(1/pi) int k^6 alpha f f e^{...}` and with `k^3 f(ikr) = -i A` becomes
/// `+(1/pi) int alpha A A e^{...}`; the magnetic term flips sign through `g`'s
/// factor of `i`.
fn static_pair(
    kind: FieldKind,
    frame: &GeometryFrame,
    weights: &Real3,
    pair: (Branch, Branch),
    opts: &DensityOptions,
) -> Result<f64> {
    let (a, b) = pair;
    let decay = frame.distance(a) + frame.distance(b);
    let sign = match kind {
        FieldKind::Electric => 1.0 / PI,
        FieldKind::Magnetic => -1.0 / PI,
    };
    let model = opts.polarizability;
    let integrand = |k: f64| {
        let ta = imaginary_axis_tensor(kind, frame, a, k);
        let tb = imaginary_axis_tensor(kind, frame, b, k);
        let v = sign * model.weight(k) * sandwich(&ta, weights, &tb) * (-k * decay).exp();
        Complex64::new(v, 0.0)
    };
    let est = integrate_decaying(integrand, &opts.quadrature.with_decay_scale(decay))?;
    Ok(est.value.re)
}

fn static_density(
    kind: FieldKind,
    frame: &GeometryFrame,
    atom: &AtomSource,
    opts: &DensityOptions,
    with_reflection: bool,
) -> Result<DensityResult> {
    use Branch::{Direct, Reflected};
    let weights = atom.dipole_weights();
    let direct = static_pair(kind, frame, &weights, (Direct, Direct), opts)?;
    if !with_reflection {
        return Ok(DensityResult::from_parts(direct, 0.0, 0.0, kind, None));
    }
    let image = static_pair(kind, frame, &weights, (Reflected, Reflected), opts)?;
    let cross = static_pair(kind, frame, &weights, (Direct, Reflected), opts)?
        + static_pair(kind, frame, &weights, (Reflected, Direct), opts)?;
    Ok(DensityResult::from_parts(direct, image, cross, kind, None))
}

/// Stationary (`t -> inf`) electric energy density.
pub fn static_electric_density(frame: &GeometryFrame, atom: &AtomSource) -> Result<DensityResult> {
    static_electric_density_with(frame, atom, &DensityOptions::default())
}

pub fn static_electric_density_with(
    frame: &GeometryFrame,
    atom: &AtomSource,
    opts: &DensityOptions,
) -> Result<DensityResult> {
    static_density(FieldKind::Electric, frame, atom, opts, true)
}

/// Stationary magnetic energy density.
pub fn static_magnetic_density(frame: &GeometryFrame, atom: &AtomSource) -> Result<DensityResult> {
    static_magnetic_density_with(frame, atom, &DensityOptions::default())
}

pub fn static_magnetic_density_with(
    frame: &GeometryFrame,
    atom: &AtomSource,
    opts: &DensityOptions,
) -> Result<DensityResult> {
    static_density(FieldKind::Magnetic, frame, atom, opts, true)
}

fn require_isotropic(atom: &AtomSource) -> Result<f64> {
    atom.static_polarizability()
        .ok_or_else(|| Error::InvalidAtom("radial form needs an isotropic atom".into()))
}

/// `a (delta - r r) + b (delta - 3 r r)` contracted with the same structure on
/// another direction and weighted by the image signs of `q`.
fn signed_overlap(h0: [f64; 3], c0: (f64, f64), h1: [f64; 3], c1: (f64, f64)) -> f64 {
    let sigma = reflection_signs(Branch::Reflected);
    let mut acc = 0.0;
    for p in 0..3 {
        for q in 0..3 {
            let delta = if p == q { 1.0 } else { 0.0 };
            let x = c0.0 * (delta - h0[p] * h0[q]) + c0.1 * (delta - 3.0 * h0[p] * h0[q]);
            let y = c1.0 * (delta - h1[p] * h1[q]) + c1.1 * (delta - 3.0 * h1[p] * h1[q]);
            acc += sigma[q] * x * y;
        }
    }
    acc
}

/// Isotropic electric density from the explicit radial polynomials.
pub fn isotropic_electric_density(
    frame: &GeometryFrame,
    atom: &AtomSource,
    opts: &DensityOptions,
) -> Result<DensityResult> {
    let alpha0 = require_isotropic(atom)?;
    let model = opts.polarizability;
    let spec = &opts.quadrature;
    let diagonal = |r: f64| -> Result<f64> {
        let integrand = |k: f64| {
            let poly = k.powi(4) / r.powi(2)
                + 2.0 * k.powi(3) / r.powi(3)
                + 5.0 * k * k / r.powi(4)
                + 6.0 * k / r.powi(5)
                + 3.0 / r.powi(6);
            Complex64::new(alpha0 * model.weight(k) * poly * (-2.0 * k * r).exp(), 0.0)
        };
        Ok(2.0 / PI * integrate_decaying(integrand, &spec.with_decay_scale(2.0 * r))?.value.re)
    };
    let (r0, r1) = (frame.r0, frame.r1);
    let cross_integrand = |k: f64| {
        let c0 = (k * k / r0, k / (r0 * r0) + 1.0 / r0.powi(3));
        let c1 = (k * k / r1, k / (r1 * r1) + 1.0 / r1.powi(3));
        let overlap = signed_overlap(frame.rhat0, c0, frame.rhat1, c1);
        Complex64::new(alpha0 * model.weight(k) * overlap * (-k * (r0 + r1)).exp(), 0.0)
    };
    let cross = 2.0 / PI * integrate_decaying(cross_integrand, &spec.with_decay_scale(r0 + r1))?.value.re;
    Ok(DensityResult::from_parts(diagonal(r0)?, diagonal(r1)?, cross, FieldKind::Electric, None))
}

/// Isotropic magnetic density, using `sum_pq g_pq g_pq = -2 h^2` on the
/// imaginary axis and `-2 cos(theta0) cos(theta1) h0 h1` for the signed
/// mixed contraction, with `h(y) = 1/y + 1/y^2`.
pub fn isotropic_magnetic_density(
    frame: &GeometryFrame,
    atom: &AtomSource,
    opts: &DensityOptions,
) -> Result<DensityResult> {
    let alpha0 = require_isotropic(atom)?;
    let model = opts.polarizability;
    let spec = &opts.quadrature;
    // k^3 h(kr)
    let scaled_h = |k: f64, r: f64| k * k / r + k / (r * r);
    let diagonal = |r: f64| -> Result<f64> {
        let integrand = |k: f64| {
            let h = scaled_h(k, r);
            Complex64::new(alpha0 * model.weight(k) * h * h * (-2.0 * k * r).exp(), 0.0)
        };
        Ok(-2.0 / PI * integrate_decaying(integrand, &spec.with_decay_scale(2.0 * r))?.value.re)
    };
    let (r0, r1) = (frame.r0, frame.r1);
    let cos = frame.cos_theta0 * frame.cos_theta1;
    let cross = if cos == 0.0 {
        0.0
    } else {
        let integrand = |k: f64| {
            let v = alpha0 * model.weight(k) * scaled_h(k, r0) * scaled_h(k, r1) * (-k * (r0 + r1)).exp();
            Complex64::new(v, 0.0)
        };
        4.0 / PI * cos * integrate_decaying(integrand, &spec.with_decay_scale(r0 + r1))?.value.re
    };
    Ok(DensityResult::from_parts(diagonal(r0)?, diagonal(r1)?, cross, FieldKind::Magnetic, None))
}

const SERIES_SWITCH: f64 = 0.5;

/// `e^{-k t} [sinh(y)/y, (sinh y - y cosh y)/y^3]` with `y = k r`, free of
/// overflow for large `y` and of cancellation for small `y`.
fn standing_wave(k: f64, t: f64, r: f64) -> (f64, f64) {
    let y = k * r;
    if y < SERIES_SWITCH {
        let y2 = y * y;
        // t_n = y^{2n}/(2n+1)!, u_n = y^{2n-2}/(2n+1)!
        let (mut t_n, mut u_n) = (1.0, 1.0 / 6.0);
        let (mut s1, mut s3) = (1.0, -2.0 / 6.0);
        for n in 1..12 {
            let m = (2 * n) as f64;
            t_n *= y2 / (m * (m + 1.0));
            s1 += t_n;
            u_n *= y2 / ((m + 2.0) * (m + 3.0));
            s3 -= (m + 2.0) * u_n;
        }
        let damp = (-k * t).exp();
        (damp * s1, damp * s3)
    } else {
        let em = (-k * (t - r)).exp();
        let ep = (-k * (t + r)).exp();
        let es = 0.5 * (em - ep);
        let ec = 0.5 * (em + ep);
        (es / y, (es - y * ec) / (y * y * y))
    }
}

/// The transient part of the dynamic electric density: the deviation from
/// the stationary value at time `t`. Requires `t > r_nu'` on every active
/// path, which holds off the wavefronts.
pub fn electric_transient(
    frame: &GeometryFrame,
    atom: &AtomSource,
    t: f64,
    opts: &DensityOptions,
) -> Result<DensityResult> {
    check_time(frame, t)?;
    let kind = FieldKind::Electric;
    if t < frame.r0 {
        return Ok(DensityResult::zero(kind, Some(t)));
    }
    let branches: &[Branch] = if t < frame.r1 { &[Branch::Direct] } else { &Branch::ALL };
    let weights = atom.dipole_weights();
    let mut parts = [[0.0; 2]; 2];
    for &a in branches {
        let r = frame.distance(a);
        let sigma = reflection_signs(a);
        let f = f_entries(Complex64::new(r, 0.0), frame.rhat(a));
        let phase = Complex64::new(0.0, -(t - r)).exp();
        // W = Re(Z) alpha, V = Im(Z) alpha with Z_pq = sigma_q f_pq e^{-i(t - r)}
        let mut w = [[0.0; 3]; 3];
        let mut v = [[0.0; 3]; 3];
        for p in 0..3 {
            for q in 0..3 {
                let z = f[p][q] * phase * sigma[q];
                for qp in 0..3 {
                    w[p][qp] += z.re * weights[q][qp];
                    v[p][qp] += z.im * weights[q][qp];
                }
            }
        }
        for &b in branches {
            let rb = frame.distance(b);
            let hb = frame.rhat(b);
            let sb = reflection_signs(b);
            let model = opts.polarizability;
            let integrand = |k: f64| {
                let (s1, s3) = standing_wave(k, t, rb);
                let mut acc = 0.0;
                for p in 0..3 {
                    for qp in 0..3 {
                        let delta = if p == qp { 1.0 } else { 0.0 };
                        let rr = hb[p] * hb[qp];
                        let e = sb[qp] * (s1 * (delta - rr) + s3 * (delta - 3.0 * rr));
                        acc += (w[p][qp] - k * v[p][qp]) * e;
                    }
                }
                Complex64::new(-k.powi(3) * model.weight(k) * acc / PI, 0.0)
            };
            let est = integrate_damped_oscillatory(integrand, t, rb, &opts.quadrature)?;
            parts[a.index()][b.index()] = est.value.re;
        }
    }
    Ok(DensityResult::from_parts(
        parts[0][0],
        parts[1][1],
        parts[0][1] + parts[1][0],
        kind,
        Some(t),
    ))
}

/// Time-dependent electric energy density during the self-dressing of the
/// atom. Zero before the direct signal arrives; between the two arrivals only
/// the direct path contributes.
pub fn dynamic_electric_density(frame: &GeometryFrame, atom: &AtomSource, t: f64) -> Result<DensityResult> {
    dynamic_electric_density_with(frame, atom, t, &DensityOptions::default())
}

pub fn dynamic_electric_density_with(
    frame: &GeometryFrame,
    atom: &AtomSource,
    t: f64,
    opts: &DensityOptions,
) -> Result<DensityResult> {
    let transient = electric_transient(frame, atom, t, opts)?;
    if t < frame.r0 {
        return Ok(transient);
    }
    let stationary = static_density(FieldKind::Electric, frame, atom, opts, t > frame.r1)?;
    Ok(stationary.add(&transient))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::derive_frame;
    use approx::assert_relative_eq;

    fn iso(d: f64) -> AtomSource {
        AtomSource::isotropic(d, 1.0).unwrap()
    }

    #[test]
    fn standing_wave_branches_agree() {
        for (k, t, r) in [(0.1f64, 7.0f64, 4.9f64), (0.05, 3.0, 2.0), (1.0, 12.0, 3.0), (0.2, 30.0, 2.5)] {
            let y = k * r;
            let damp = (-k * t).exp();
            let want = (damp * y.sinh() / y, damp * (y.sinh() - y * y.cosh()) / y.powi(3));
            let got = standing_wave(k, t, r);
            assert_relative_eq!(got.0, want.0, max_relative = 1e-12);
            assert_relative_eq!(got.1, want.1, max_relative = 1e-9);
        }
        // continuity across the switch
        let below = standing_wave(SERIES_SWITCH / 2.0 * (1.0 - 1e-12), 1.0, 2.0);
        let above = standing_wave(SERIES_SWITCH / 2.0 * (1.0 + 1e-12), 1.0, 2.0);
        assert_relative_eq!(below.0, above.0, max_relative = 1e-10);
        assert_relative_eq!(below.1, above.1, max_relative = 1e-10);
    }

    #[test]
    fn kernel_vanishes_before_arrival() {
        let atom = iso(2.0);
        let frame = derive_frame([0.0, 0.0, 9.0], &atom).unwrap();
        let k = first_order_kernel(&frame, 6.0).unwrap();
        assert!(!k.direct_active && !k.reflected_active);
        assert_eq!(k.electric, ZERO_TENSOR);
        assert_eq!(k.magnetic, ZERO_TENSOR);
        let e = e1e1_expectation(&frame, &atom, 6.0).unwrap();
        assert_eq!(e.total, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn intermediate_kernel_is_free_space() {
        let atom = iso(2.0);
        let frame = derive_frame([1.0, 0.5, 9.0], &atom).unwrap();
        let t = 0.5 * (frame.r0 + frame.r1);
        let k = first_order_kernel(&frame, t).unwrap();
        assert!(k.direct_active && !k.reflected_active);
        assert_eq!(k.branches[1].electric, ZERO_TENSOR);
        let far = derive_frame([1.0, 0.5, 1e6 + 7.0], &iso(1e6)).unwrap();
        let free = first_order_kernel(&far, t).unwrap();
        for p in 0..3 {
            for q in 0..3 {
                assert!((k.electric[p][q] - free.electric[p][q]).norm() < 1e-6 * k.electric[p][q].norm().max(1e-3));
            }
        }
    }

    #[test]
    fn wavefront_is_rejected() {
        let atom = iso(2.0);
        let frame = derive_frame([0.0, 0.0, 9.0], &atom).unwrap();
        assert!(matches!(first_order_kernel(&frame, 7.0 + 1e-8), Err(Error::Wavefront { .. })));
        assert!(matches!(first_order_kernel(&frame, 11.0 - 1e-7), Err(Error::Wavefront { .. })));
        assert!(matches!(first_order_kernel(&frame, -1.0), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn conjugate_kernel() {
        let atom = iso(2.0);
        let frame = derive_frame([1.0, 0.0, 4.0], &atom).unwrap();
        let k = first_order_kernel(&frame, 20.0).unwrap();
        let c = k.conjugate();
        assert_eq!(c.electric[0][2], k.electric[0][2].conj());
        assert_eq!(c.branches[1].magnetic[1][2], k.branches[1].magnetic[1][2].conj());
    }

    #[test]
    fn e1e1_matches_literal_double_sum() {
        // -sum f(r_nu) f(-r_nu') e^{i (r_nu - r_nu')} mu_q mu_q' sigma sigma
        let atom = AtomSource::new(1.5, [0.3, -0.7, 0.5]).unwrap();
        let frame = derive_frame([0.8, -0.4, 3.0], &atom).unwrap();
        let e = e1e1_expectation(&frame, &atom, 40.0).unwrap();
        let mut total = Complex64::new(0.0, 0.0);
        for a in Branch::ALL {
            for b in Branch::ALL {
                let fa = f_entries(Complex64::new(frame.distance(a), 0.0), frame.rhat(a));
                let fb = f_entries(Complex64::new(-frame.distance(b), 0.0), frame.rhat(b));
                let (sa, sb) = (reflection_signs(a), reflection_signs(b));
                let phase = Complex64::new(0.0, frame.distance(a) - frame.distance(b)).exp();
                let mut acc = Complex64::new(0.0, 0.0);
                for p in 0..3 {
                    for q in 0..3 {
                        for qp in 0..3 {
                            acc -= fa[p][q] * fb[p][qp] * atom.mu[q] * atom.mu[qp] * sa[q] * sb[qp] * phase;
                        }
                    }
                }
                let got = e.terms[a.index()][b.index()];
                assert!((got - acc).norm() < 1e-12 * acc.norm().max(1e-12));
                total += acc;
            }
        }
        assert!(e.total.im.abs() < 1e-14 * e.total.norm());
        assert!((e.total - total).norm() < 1e-12 * total.norm());
    }

    #[test]
    fn static_electric_direct_term_far_zone() {
        let atom = iso(1e9);
        let frame = derive_frame([0.0, 0.0, 1e9 + 10.0], &atom).unwrap();
        let dens = static_electric_density_with(&frame, &atom, &DensityOptions::far_zone()).unwrap();
        let want = 23.0 / (2.0 * PI) * 2.0 / 1e7;
        assert_relative_eq!(dens.direct, want, max_relative = 1e-10);
        assert_relative_eq!(want, 7.321e-7, max_relative = 1e-4);
    }

    #[test]
    fn static_magnetic_direct_term_far_zone() {
        let atom = iso(1e9);
        let frame = derive_frame([0.0, 0.0, 1e9 + 10.0], &atom).unwrap();
        let dens = static_magnetic_density_with(&frame, &atom, &DensityOptions::far_zone()).unwrap();
        assert_relative_eq!(dens.direct, -7.0 / PI * 1e-7, max_relative = 1e-10);
    }

    #[test]
    fn oriented_z_dipole_keeps_only_zz() {
        let oriented = AtomSource::new(2.0, [0.0, 0.0, 1.0]).unwrap();
        let frame = derive_frame([1.0, 2.0, 5.0], &oriented).unwrap();
        let got = static_electric_density(&frame, &oriented).unwrap();
        // independent sum over the q = q' = z column only
        let mut want = [0.0; 3];
        for (slot, (a, b)) in [
            (Branch::Direct, Branch::Direct),
            (Branch::Reflected, Branch::Reflected),
            (Branch::Direct, Branch::Reflected),
        ]
        .into_iter()
        .enumerate()
        {
            let integrand = |k: f64| {
                let ta = imaginary_axis_f(k, frame.distance(a), frame.rhat(a));
                let tb = imaginary_axis_f(k, frame.distance(b), frame.rhat(b));
                let col: f64 = (0..3).map(|p| ta[p][2] * tb[p][2]).sum();
                let decay = frame.distance(a) + frame.distance(b);
                Complex64::new(2.0 * col * dispersion(k) * (-k * decay).exp() / PI, 0.0)
            };
            let decay = frame.distance(a) + frame.distance(b);
            let spec = QuadratureSpec::default().with_decay_scale(decay);
            want[slot] = integrate_decaying(integrand, &spec).unwrap().value.re;
        }
        assert_relative_eq!(got.direct, want[0], max_relative = 1e-9);
        assert_relative_eq!(got.image, want[1], max_relative = 1e-9);
        assert_relative_eq!(got.cross, 2.0 * want[2], max_relative = 1e-9);
    }

    #[test]
    fn radial_forms_match_tensor_route() {
        let atom = AtomSource::isotropic(2.0, 0.8).unwrap();
        let frame = derive_frame([3.0, 1.0, 6.0], &atom).unwrap();
        for opts in [DensityOptions::default(), DensityOptions::far_zone()] {
            let a = static_electric_density_with(&frame, &atom, &opts).unwrap();
            let b = isotropic_electric_density(&frame, &atom, &opts).unwrap();
            assert_relative_eq!(a.direct, b.direct, max_relative = 1e-9);
            assert_relative_eq!(a.image, b.image, max_relative = 1e-9);
            assert_relative_eq!(a.cross, b.cross, max_relative = 1e-9);
            let a = static_magnetic_density_with(&frame, &atom, &opts).unwrap();
            let b = isotropic_magnetic_density(&frame, &atom, &opts).unwrap();
            assert_relative_eq!(a.direct, b.direct, max_relative = 1e-9);
            assert_relative_eq!(a.image, b.image, max_relative = 1e-9);
            assert_relative_eq!(a.cross, b.cross, max_relative = 1e-9);
        }
    }

    #[test]
    fn magnetic_cross_on_axis_is_positive() {
        let atom = iso(2.0);
        let frame = derive_frame([0.0, 0.0, 7.0], &atom).unwrap();
        let m = static_magnetic_density(&frame, &atom).unwrap();
        assert!(m.direct < 0.0 && m.image < 0.0);
        assert!(m.cross > 0.0);
    }

    #[test]
    fn radial_forms_need_isotropic_atom() {
        let atom = AtomSource::new(2.0, [1.0, 0.0, 0.0]).unwrap();
        let frame = derive_frame([0.0, 0.0, 7.0], &atom).unwrap();
        assert!(isotropic_electric_density(&frame, &atom, &DensityOptions::default()).is_err());
    }

    #[test]
    fn dynamic_density_regions() {
        let atom = iso(2.0);
        let frame = derive_frame([0.0, 0.0, 9.0], &atom).unwrap();
        let before = dynamic_electric_density(&frame, &atom, 5.0).unwrap();
        assert_eq!(before.total, 0.0);
        let mid = dynamic_electric_density(&frame, &atom, 9.0).unwrap();
        assert_eq!((mid.image, mid.cross), (0.0, 0.0));
        assert!(mid.direct.is_finite() && mid.direct != 0.0);
        let after = dynamic_electric_density(&frame, &atom, 1.1 * frame.r1).unwrap();
        assert!(after.image != 0.0 && after.cross != 0.0);
    }

    #[test]
    fn transient_product_reading_is_real() {
        // The complex integrand with Re/Im taken of f e^{-i(t - r)} and the
        // bracket f(-iy) e^{y} + f(iy) e^{-y} built from complex tensors has a
        // negligible imaginary part.
        let atom = iso(2.0);
        let frame = derive_frame([0.0, 1.0, 9.0], &atom).unwrap();
        let t = 1.3 * frame.r1;
        let weights = atom.dipole_weights();
        let mut total = Complex64::new(0.0, 0.0);
        for a in Branch::ALL {
            let r = frame.distance(a);
            let sa = reflection_signs(a);
            let f = f_entries(Complex64::new(r, 0.0), frame.rhat(a));
            let phase = Complex64::new(0.0, -(t - r)).exp();
            for b in Branch::ALL {
                let rb = frame.distance(b);
                let sb = reflection_signs(b);
                let integrand = |k: f64| {
                    let y = k * rb;
                    let fm = f_entries(Complex64::new(0.0, -y), frame.rhat(b));
                    let fp = f_entries(Complex64::new(0.0, y), frame.rhat(b));
                    let mut acc = Complex64::new(0.0, 0.0);
                    for p in 0..3 {
                        for q in 0..3 {
                            let z = f[p][q] * phase * sa[q];
                            let x = z.re - k * z.im;
                            for qp in 0..3 {
                                let bracket = fm[p][qp] * (-k * (t - rb)).exp() + fp[p][qp] * (-k * (t + rb)).exp();
                                acc += x * weights[q][qp] * sb[qp] * bracket;
                            }
                        }
                    }
                    -acc * Complex64::new(0.0, -0.5) * k.powi(3) * dispersion(k) / PI
                };
                let spec = QuadratureSpec::default().with_rel_tol(1e-9);
                total += integrate_damped_oscillatory(integrand, t, rb, &spec).unwrap().value;
            }
        }
        let ours = electric_transient(&frame, &atom, t, &DensityOptions::default()).unwrap();
        assert!(total.im.abs() <= 1e-8 * total.re.abs());
        assert_relative_eq!(ours.total, total.re, max_relative = 1e-7);
    }

    #[test]
    fn dynamic_density_settles() {
        let atom = iso(2.0);
        let frame = derive_frame([0.0, 0.0, 9.0], &atom).unwrap();
        let stat = static_electric_density(&frame, &atom).unwrap();
        let late = dynamic_electric_density(&frame, &atom, 1e4 * frame.r1).unwrap();
        assert!(((late.total - stat.total) / stat.total).abs() <= 1e-3);
    }
}
