//! Semi-infinite integrals of exponentially decaying integrands.
//!
//! Two independent schemes are provided:
//!
//! * adaptive 7/15-point Gauss-Kronrod bisection on `u in (0, 1)` after the
//!   substitution `k = u / (lambda (1 - u))`, with `lambda` the decay rate of
//!   the integrand (production default);
//! * fixed-order Gauss-Laguerre with the weight `e^{-lambda k}` factored out
//!   of the integrand, used as a cross-check.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::laguerre::GaussLaguerre;
use num_complex::Complex64;

use crate::error::QuadratureError;

/// Width of the excluded window around the light cone, `|ct - r| > WAVEFRONT_WINDOW`.
pub const WAVEFRONT_WINDOW: f64 = 1e-6;

pub const DEFAULT_LAGUERRE_ORDER: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Adaptive,
    GaussLaguerre { order: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// `lambda` in `e^{-lambda k}`.
    pub decay_scale: f64,
    pub scheme: Scheme,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 2000,
            decay_scale: 1.0,
            scheme: Scheme::Adaptive,
        }
    }
}

impl QuadratureSpec {
    pub fn with_decay_scale(mut self, decay_scale: f64) -> Self {
        self.decay_scale = decay_scale;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rel_tol) {
            return Err(QuadratureError::InvalidSpec("relative tolerance must be positive".into()));
        }
        if !self.abs_tol.is_finite() || self.abs_tol < 0.0 {
            return Err(QuadratureError::InvalidSpec("absolute tolerance must be non-negative".into()));
        }
        if !positive(self.decay_scale) {
            return Err(QuadratureError::InvalidSpec(format!(
                "decay scale must be positive, got {}",
                self.decay_scale
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(QuadratureError::InvalidSpec("max_subdivisions must be at least 1".into()));
        }
        if let Scheme::GaussLaguerre { order } = self.scheme {
            if order < 2 {
                return Err(QuadratureError::InvalidSpec("Gauss-Laguerre order must be at least 2".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Integrates `f` over `(0, inf)` with the scheme selected in `spec`.
pub fn integrate_decaying<F>(f: F, spec: &QuadratureSpec) -> Result<Estimate, QuadratureError>
where
    F: Fn(f64) -> Complex64,
{
    spec.validate()?;
    match spec.scheme {
        Scheme::Adaptive => adaptive(f, spec),
        Scheme::GaussLaguerre { order } => gauss_laguerre(f, spec.decay_scale, order),
    }
}

/// Integrates an integrand carrying `e^{-k tau}` together with growth or
/// phase factors of range at most `rho_max`. The net decay `tau - rho_max`
/// sets the mapping scale.
pub fn integrate_damped_oscillatory<F>(
    f: F,
    tau: f64,
    rho_max: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate, QuadratureError>
where
    F: Fn(f64) -> Complex64,
{
    if !tau.is_finite() || !rho_max.is_finite() || tau - rho_max.abs() <= WAVEFRONT_WINDOW {
        return Err(QuadratureError::NonDecaying { tau, rho_max });
    }
    integrate_decaying(f, &spec.with_decay_scale(tau - rho_max.abs()))
}

// Gauss-Kronrod 7/15 nodes on [-1, 1] (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    res_abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive<F>(f: F, spec: &QuadratureSpec) -> Result<Estimate, QuadratureError>
where
    F: Fn(f64) -> Complex64,
{
    let scale = 1.0 / spec.decay_scale;
    let mapped = |u: f64| -> Result<Complex64, QuadratureError> {
        let w = 1.0 - u;
        let k = scale * u / w;
        let v = f(k);
        if !v.is_finite() {
            return Err(QuadratureError::NonFinite { k });
        }
        Ok(v * (scale / (w * w)))
    };

    let mut evaluations = 0usize;
    let mut rule = |a: f64, b: f64| -> Result<Segment, QuadratureError> {
        evaluations += 15;
        let (value, error, res_abs) = kronrod15(&mapped, a, b)?;
        Ok(Segment { a, b, value, error, res_abs })
    };

    let first = rule(0.0, 1.0)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut total_abs = first.res_abs;
    let mut frozen_err = 0.0;
    let mut heap = BinaryHeap::from([first]);
    let mut subdivisions = 0usize;

    loop {
        let tol = tolerance(spec, total, total_abs);
        if total_err <= tol {
            break;
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 8.0 * f64::EPSILON * mid {
            // cannot refine further in double precision
            frozen_err += worst.error;
            continue;
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(QuadratureError::NoConvergence {
                subdivisions,
                estimate: total.re,
                error: total_err,
            });
        }
        subdivisions += 1;
        let left = rule(worst.a, mid)?;
        let right = rule(mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.res_abs + right.res_abs - worst.res_abs;
        heap.push(left);
        heap.push(right);
    }

    // recompute sums from the segments to shed accumulated update error
    let value: Complex64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum::<f64>() + frozen_err;
    let res_abs: f64 = heap.iter().map(|s| s.res_abs).sum();
    let tol = tolerance(spec, value, res_abs);
    if error > tol {
        return Err(QuadratureError::NoConvergence {
            subdivisions,
            estimate: value.re,
            error,
        });
    }
    Ok(Estimate { value, error, evaluations })
}

/// Requested accuracy, floored at the rounding level set by the integral of
/// `|f|` so that cancelling integrands still terminate.
fn tolerance(spec: &QuadratureSpec, value: Complex64, res_abs: f64) -> f64 {
    spec.abs_tol
        .max(spec.rel_tol * value.norm())
        .max(100.0 * f64::EPSILON * res_abs)
}

fn kronrod15<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64, f64), QuadratureError>
where
    F: Fn(f64) -> Result<Complex64, QuadratureError>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut samples = [Complex64::new(0.0, 0.0); 15];
    samples[0] = f(center)?;
    for j in 0..7 {
        let dx = half * XGK[j];
        samples[1 + 2 * j] = f(center - dx)?;
        samples[2 + 2 * j] = f(center + dx)?;
    }

    let mut kronrod = samples[0] * WGK[7];
    let mut gauss = samples[0] * WG[3];
    let mut abs_sum = samples[0].norm() * WGK[7];
    for j in 0..7 {
        let pair = samples[1 + 2 * j] + samples[2 + 2 * j];
        kronrod += pair * WGK[j];
        abs_sum += (samples[1 + 2 * j].norm() + samples[2 + 2 * j].norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = (samples[0] - mean).norm() * WGK[7];
    for j in 0..7 {
        asc += ((samples[1 + 2 * j] - mean).norm() + (samples[2 + 2 * j] - mean).norm()) * WGK[j];
    }

    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).norm();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, error, res_abs))
}

type Rule = Arc<Vec<(f64, f64)>>;

/// Nodes `x_i` with combined weights `w_i e^{x_i}` of the Gauss-Laguerre rule.
fn laguerre_rule(order: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&order) {
        return rule.clone();
    }
    let degree = std::num::NonZeroUsize::new(order).expect("order validated");
    let quad = GaussLaguerre::new(degree, 0.0.try_into().expect("alpha = 0 is valid"));
    let rule: Vec<(f64, f64)> = quad
        .as_node_weight_pairs()
        .iter()
        .filter(|&&(_, w)| w > 0.0)
        .map(|&(x, w)| (x, (w.ln() + x).exp()))
        .collect();
    let rule = Arc::new(rule);
    cache.lock().unwrap().insert(order, rule.clone());
    rule
}

/// Fixed-order Gauss-Laguerre with `e^{-lambda k}` extracted. The error
/// estimate is the difference to the rule of half the order.
pub fn gauss_laguerre<F>(f: F, decay_scale: f64, order: usize) -> Result<Estimate, QuadratureError>
where
    F: Fn(f64) -> Complex64,
{
    let apply = |order: usize| -> Result<Complex64, QuadratureError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(x, w) in laguerre_rule(order).iter() {
            let k = x / decay_scale;
            let v = f(k);
            if !v.is_finite() {
                return Err(QuadratureError::NonFinite { k });
            }
            acc += v * w;
        }
        Ok(acc / decay_scale)
    };
    let value = apply(order)?;
    let coarse = apply((order / 2).max(1))?;
    Ok(Estimate {
        value,
        error: (value - coarse).norm(),
        evaluations: order + order / 2,
    })
}
