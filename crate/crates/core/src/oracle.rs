//! Independent checks of the analytic tensors.
//!
//! [`fd_operator_check`] applies the differential operators `F_pq` and `G_pq`
//! to spherical waves with central-difference stencils.
//! [`angular_polarization_sum`] integrates the half-space mode-function
//! products over all propagation directions, after replacing the products
//! that oscillate with the box size by their period averages.

use std::f64::consts::{PI, TAU};
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{norm, reflection_sign, scale, sub, Axis, Branch, Vec3};
use crate::response::{f_entries, g_entries, Tensor3, ZERO_TENSOR, LEVI_CIVITA};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// `F_pq = -lap delta_pq + d_p d_q` on `e^{ikr}/r`.
    F,
    /// `G_pq = -eps_pqs d_s` on `(1/r) d_r e^{ikr}`.
    G,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilSpec {
    pub step: f64,
    /// 2 or 4.
    pub order: u8,
}

impl StencilSpec {
    pub const DEFAULT_RELATIVE_STEP: f64 = 1e-4;

    /// Step `1e-4` times the shorter of `|r|` and the wavelength scale `1/k`.
    pub fn for_point(k: f64, r: Vec3, order: u8) -> Self {
        let length = norm(r).min(1.0 / k.abs());
        Self { step: Self::DEFAULT_RELATIVE_STEP * length, order }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    fn reach(&self) -> f64 {
        match self.order {
            2 => self.step,
            _ => 2.0 * self.step,
        }
    }

    fn validate(&self, r: Vec3) -> Result<()> {
        if self.order != 2 && self.order != 4 {
            return Err(Error::InvalidStencil(format!("order must be 2 or 4, got {}", self.order)));
        }
        let rn = norm(r);
        if !self.step.is_finite() || self.step <= 0.0 {
            return Err(Error::InvalidStencil(format!("step must be positive, got {}", self.step)));
        }
        if self.step < 1e3 * f64::EPSILON * rn {
            return Err(Error::InvalidStencil(format!("step {} underflows at |r| = {rn}", self.step)));
        }
        if rn < 10.0 * self.reach() {
            return Err(Error::OriginProximity { r: rn, step: self.step });
        }
        Ok(())
    }
}

fn spherical_wave(k: f64, x: Vec3) -> Complex64 {
    let r = norm(x);
    Complex64::new(0.0, k * r).exp() / r
}

fn shifted(x: Vec3, axis: usize, by: f64) -> Vec3 {
    let mut y = x;
    y[axis] += by;
    y
}

/// Offsets and weights of the first-derivative stencil, in units of `h`.
fn first_derivative(order: u8) -> &'static [(f64, f64)] {
    match order {
        2 => &[(-1.0, -0.5), (1.0, 0.5)],
        _ => &[(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)],
    }
}

/// Offsets and weights of the second-derivative stencil, in units of `h^2`.
fn second_derivative(order: u8) -> &'static [(f64, f64)] {
    match order {
        2 => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
        _ => &[
            (-2.0, -1.0 / 12.0),
            (-1.0, 16.0 / 12.0),
            (0.0, -30.0 / 12.0),
            (1.0, 16.0 / 12.0),
            (2.0, -1.0 / 12.0),
        ],
    }
}

fn derivative<F: Fn(Vec3) -> Complex64>(f: &F, x: Vec3, axis: usize, s: &StencilSpec) -> Complex64 {
    let h = s.step;
    first_derivative(s.order)
        .iter()
        .map(|&(o, w)| f(shifted(x, axis, o * h)) * w)
        .sum::<Complex64>()
        / h
}

fn hessian<F: Fn(Vec3) -> Complex64>(f: &F, x: Vec3, s: &StencilSpec) -> Tensor3 {
    let h = s.step;
    let mut out = ZERO_TENSOR;
    for p in 0..3 {
        out[p][p] = second_derivative(s.order)
            .iter()
            .map(|&(o, w)| f(shifted(x, p, o * h)) * w)
            .sum::<Complex64>()
            / (h * h);
        for q in 0..p {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(op, wp) in first_derivative(s.order) {
                for &(oq, wq) in first_derivative(s.order) {
                    acc += f(shifted(shifted(x, p, op * h), q, oq * h)) * (wp * wq);
                }
            }
            out[p][q] = acc / (h * h);
            out[q][p] = out[p][q];
        }
    }
    out
}

/// Numerical `F_pq e^{ikr}/r` or `G_pq (1/r) d_r e^{ikr}` at `r`.
pub fn fd_operator_check(kind: OperatorKind, k: f64, r: Vec3, stencil: &StencilSpec) -> Result<Tensor3> {
    if !k.is_finite() || k == 0.0 || r.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("operator check input"));
    }
    stencil.validate(r)?;
    let mut out = ZERO_TENSOR;
    match kind {
        OperatorKind::F => {
            let wave = |x: Vec3| spherical_wave(k, x);
            let hess = hessian(&wave, r, stencil);
            let lap = hess[0][0] + hess[1][1] + hess[2][2];
            for p in 0..3 {
                for q in 0..3 {
                    out[p][q] = hess[p][q] - if p == q { lap } else { Complex64::new(0.0, 0.0) };
                }
            }
        }
        OperatorKind::G => {
            // the radial derivative is itself taken by a one-dimensional stencil
            let radial = |x: Vec3| {
                let rho = norm(x);
                let h = stencil.step;
                let d: Complex64 = first_derivative(stencil.order)
                    .iter()
                    .map(|&(o, w)| Complex64::new(0.0, k * (rho + o * h)).exp() * w)
                    .sum::<Complex64>()
                    / h;
                d / rho
            };
            let grad = [0, 1, 2].map(|s| derivative(&radial, r, s, stencil));
            for p in 0..3 {
                for q in 0..3 {
                    out[p][q] = -(0..3).map(|s| grad[s] * LEVI_CIVITA[p][q][s]).sum::<Complex64>();
                }
            }
        }
    }
    Ok(out)
}

/// Analytic counterpart of [`fd_operator_check`]: `k^3 f(kr) e^{ikr}` for `F`
/// and `-k^3 g(kr) e^{ikr}` for `G`.
pub fn operator_reference(kind: OperatorKind, k: f64, r: Vec3) -> Tensor3 {
    let rn = norm(r);
    let rhat = scale(r, 1.0 / rn);
    let zeta = Complex64::new(k * rn, 0.0);
    let phase = Complex64::new(0.0, k * rn).exp() * k.powi(3);
    let (t, sign) = match kind {
        OperatorKind::F => (f_entries(zeta, rhat), 1.0),
        OperatorKind::G => (g_entries(zeta, rhat), -1.0),
    };
    t.map(|row| row.map(|v| v * phase * sign))
}

/// Largest entry difference relative to the largest reference entry.
pub fn max_relative_deviation(numeric: &Tensor3, reference: &Tensor3) -> f64 {
    let scale = reference.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    let diff = numeric
        .iter()
        .flatten()
        .zip(reference.iter().flatten())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    diff / scale
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Trig {
    Cos,
    Sin,
}

/// Trig factor of mode-function component `c` along `axis`: the component's
/// own axis carries the cosine.
fn trig(component: usize, axis: usize) -> Trig {
    if component == axis {
        Trig::Cos
    } else {
        Trig::Sin
    }
}

/// Period average over the box size of the product of the two standing-wave
/// factors along a tangential axis.
fn tangential_average(a: Trig, b: Trig, k: f64, u: f64, u_a: f64) -> f64 {
    match (a, b) {
        (Trig::Cos, Trig::Cos) | (Trig::Sin, Trig::Sin) => 0.5 * (k * (u - u_a)).cos(),
        (Trig::Cos, Trig::Sin) => 0.5 * (k * (u_a - u)).sin(),
        (Trig::Sin, Trig::Cos) => 0.5 * (k * (u - u_a)).sin(),
    }
}

fn apply_trig(t: Trig, x: f64) -> f64 {
    match t {
        Trig::Cos => x.cos(),
        Trig::Sin => x.sin(),
    }
}

/// Polarization-summed, box-averaged mode product for direction `khat`.
fn mode_product(k: f64, khat: Vec3, r: Vec3, r_a: Vec3, p: usize, q: usize) -> f64 {
    let delta = if p == q { 1.0 } else { 0.0 };
    let transverse = delta - khat[p] * khat[q];
    if transverse == 0.0 {
        return 0.0;
    }
    let mut product = 8.0 * transverse;
    for axis in 0..2 {
        product *= tangential_average(trig(p, axis), trig(q, axis), k * khat[axis], r[axis], r_a[axis]);
    }
    let kz = k * khat[2];
    product * apply_trig(trig(p, 2), kz * r[2]) * apply_trig(trig(q, 2), kz * r_a[2])
}

fn sphere_integral(k: f64, r: Vec3, r_a: Vec3, p: usize, q: usize, n: usize) -> (f64, f64) {
    let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("n > 0"));
    let n_phi = 2 * n;
    let dphi = TAU / n_phi as f64;
    let (mut value, mut magnitude) = (0.0, 0.0);
    for &(c, w) in rule.as_node_weight_pairs() {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for j in 0..n_phi {
            let phi = j as f64 * dphi;
            let khat = [s * phi.cos(), s * phi.sin(), c];
            let v = mode_product(k, khat, r, r_a, p, q) * w * dphi;
            value += v;
            magnitude += v.abs();
        }
    }
    (value, magnitude)
}

/// Relative stability demanded between successive angular refinements.
pub const ANGULAR_TOLERANCE: f64 = 1e-8;

const MAX_ANGULAR_NODES: usize = 4096;

/// Sum over polarizations and integral over directions of the product of the
/// `p` component of the mode function at `r` and the `q` component at `r_a`.
pub fn angular_polarization_sum(k: f64, r: Vec3, r_a: Vec3, p: Axis, q: Axis) -> Result<f64> {
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::NegativeWavenumber(k));
    }
    for v in [r, r_a] {
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("angular sum point"));
        }
        if v[2] <= 0.0 {
            return Err(Error::BehindWall { z: v[2] });
        }
    }
    let extent = norm(r) + norm(r_a);
    let mut n = 16 + (k * extent).ceil() as usize;
    let (mut last, _) = sphere_integral(k, r, r_a, p.index(), q.index(), n);
    let mut change = f64::INFINITY;
    while n < MAX_ANGULAR_NODES {
        n *= 2;
        let (value, magnitude) = sphere_integral(k, r, r_a, p.index(), q.index(), n);
        change = (value - last).abs();
        last = value;
        if change <= ANGULAR_TOLERANCE * magnitude.max(f64::MIN_POSITIVE) {
            return Ok(value);
        }
    }
    Err(Error::AngularNonConvergence { change })
}

/// `(4 pi / k^3) sum_nu sigma(nu, q) F_pq sin(k r_nu)/r_nu`, evaluated as
/// `4 pi sum_nu sigma(nu, q) Im[f_pq(k r_nu) e^{i k r_nu}]`.
pub fn polarization_sum_closed(k: f64, r: Vec3, r_a: Vec3, p: Axis, q: Axis) -> f64 {
    let image = [r_a[0], r_a[1], -r_a[2]];
    let mut acc = 0.0;
    for (branch, source) in [(Branch::Direct, r_a), (Branch::Reflected, image)] {
        let v = sub(r, source);
        let rn = norm(v);
        let f = f_entries(Complex64::new(k * rn, 0.0), scale(v, 1.0 / rn));
        let wave = f[p.index()][q.index()] * Complex64::new(0.0, k * rn).exp();
        acc += reflection_sign(branch, q) * wave.im;
    }
    4.0 * PI * acc
}
