//! Oracle and closed-form equivalence suite behind `--mode verify`.

use std::f64::consts::PI;

use rayon::prelude::*;

use cpwall::casimir::{electric_cp_closed, electric_cp_quadrature, magnetic_cp_closed, magnetic_cp_quadrature};
use cpwall::fields::{
    e1e1_expectation, first_order_kernel, isotropic_electric_density, isotropic_magnetic_density, DensityOptions,
    PolarizabilityModel,
};
use cpwall::geometry::{derive_frame, AtomSource, Axis};
use cpwall::oracle::{
    angular_polarization_sum, fd_operator_check, max_relative_deviation, operator_reference,
    polarization_sum_closed, OperatorKind, StencilSpec,
};
use cpwall::quadrature::{QuadratureSpec, Scheme, DEFAULT_LAGUERRE_ORDER};
use cpwall::response::ZERO_TENSOR;
use cpwall::Result;

use crate::output::{Cell, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.measured <= self.tolerance
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn free_space(electric: bool) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for r0 in [5.0, 10.0, 20.0] {
        let atom = AtomSource::isotropic(1e3 * r0, 1.0)?;
        let frame = derive_frame([0.0, 0.0, atom.d + r0], &atom)?;
        let (got, coefficient) = if electric {
            (electric_cp_quadrature(&frame, &atom, 1.0)?.total, -23.0)
        } else {
            (magnetic_cp_quadrature(&frame, &atom, 1.0)?.total, 7.0)
        };
        worst = worst.max(rel(got, coefficient * 2.0 / (4.0 * PI * r0.powi(7))));
    }
    Ok(worst)
}

fn wall_grid(electric: bool) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for r0 in [5.0, 10.0, 20.0] {
        for d in [2.0, 5.0] {
            for theta in [0.0, PI / 3.0, PI / 2.0] {
                let atom = AtomSource::isotropic(d, 1.0)?;
                let frame = derive_frame([r0 * f64::sin(theta), 0.0, d + r0 * f64::cos(theta)], &atom)?;
                let (q, c) = if electric {
                    (electric_cp_quadrature(&frame, &atom, 1.0)?.total, electric_cp_closed(&frame, 2.0, 1.0).total)
                } else {
                    (magnetic_cp_quadrature(&frame, &atom, 1.0)?.total, magnetic_cp_closed(&frame, 2.0, 1.0).total)
                };
                worst = worst.max(rel(q, c));
            }
        }
    }
    Ok(worst)
}

fn operator_oracle() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for kr in [1.0, 5.0, 20.0] {
        let r = [0.36 * kr, -0.48 * kr, 0.8 * kr];
        for kind in [OperatorKind::F, OperatorKind::G] {
            let reference = operator_reference(kind, 1.0, r);
            for order in [2, 4] {
                let num = fd_operator_check(kind, 1.0, r, &StencilSpec::for_point(1.0, r, order))?;
                worst = worst.max(max_relative_deviation(&num, &reference));
            }
        }
    }
    Ok(worst)
}

fn appendix_identity() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (k, r, r_a) in [
        (1.0, [0.5, 0.8, 2.0], [0.0, 0.0, 1.0]),
        (2.0, [1.5, -1.0, 0.7], [0.0, 0.0, 2.0]),
        (0.7, [-1.0, 2.0, 3.0], [0.3, -0.2, 0.8]),
    ] {
        let pairs: Vec<(Axis, Axis)> = Axis::ALL.iter().flat_map(|&p| Axis::ALL.map(move |q| (p, q))).collect();
        let closed: Vec<f64> = pairs.iter().map(|&(p, q)| polarization_sum_closed(k, r, r_a, p, q)).collect();
        let scale = closed.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (&(p, q), c) in pairs.iter().zip(&closed) {
            worst = worst.max((angular_polarization_sum(k, r, r_a, p, q)? - c).abs() / scale);
        }
    }
    Ok(worst)
}

/// Largest adaptive versus Gauss-Laguerre disagreement, in units of the
/// requested tolerance.
fn quadrature_redundancy(spec: QuadratureSpec) -> Result<f64> {
    let laguerre = spec.with_scheme(Scheme::GaussLaguerre { order: DEFAULT_LAGUERRE_ORDER });
    let mut worst: f64 = 0.0;
    for (d, point) in [(2.0, [0.0, 0.0, 9.0]), (1.0, [3.0, 1.0, 6.0]), (5.0, [10.0, -4.0, 2.0])] {
        let atom = AtomSource::isotropic(d, 1.0)?;
        let frame = derive_frame(point, &atom)?;
        for model in [PolarizabilityModel::Dynamic, PolarizabilityModel::Static] {
            let a = DensityOptions { quadrature: spec, polarizability: model };
            let b = DensityOptions { quadrature: laguerre, polarizability: model };
            for (x, y) in [
                (isotropic_electric_density(&frame, &atom, &a)?, isotropic_electric_density(&frame, &atom, &b)?),
                (isotropic_magnetic_density(&frame, &atom, &a)?, isotropic_magnetic_density(&frame, &atom, &b)?),
            ] {
                for (u, v) in [(x.direct, y.direct), (x.image, y.image), (x.cross, y.cross)] {
                    if u != 0.0 {
                        worst = worst.max((u - v).abs() / u.abs() / spec.rel_tol);
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Count of nonzero kernel or correlation entries before the signal arrives.
fn causality() -> Result<f64> {
    let mut violations = 0;
    for (d, point) in [(2.0, [0.0, 0.0, 9.0]), (1.0, [3.0, 1.0, 6.0]), (0.5, [-2.0, 4.0, 0.3])] {
        let atom = AtomSource::new(d, [0.3, -0.5, 0.8])?;
        let frame = derive_frame(point, &atom)?;
        for s in [0.0, 0.5, 0.99] {
            let t = s * frame.r0;
            let k = first_order_kernel(&frame, t)?;
            let e = e1e1_expectation(&frame, &atom, t)?;
            violations += usize::from(k.electric != ZERO_TENSOR || k.magnetic != ZERO_TENSOR || e.total.norm() != 0.0);
            let t = frame.r0 + s * (frame.r1 - frame.r0) * 0.99 + 1e-3;
            let k = first_order_kernel(&frame, t)?;
            violations += usize::from(k.branches[1].electric != ZERO_TENSOR || k.branches[1].magnetic != ZERO_TENSOR);
        }
    }
    Ok(violations as f64)
}

pub fn run_suite(spec: QuadratureSpec) -> Result<Vec<Check>> {
    type Job = (&'static str, f64, Box<dyn Fn() -> Result<f64> + Send + Sync>);
    let jobs: Vec<Job> = vec![
        ("free-space electric law", 1e-8, Box::new(|| free_space(true))),
        ("free-space magnetic law", 1e-8, Box::new(|| free_space(false))),
        ("electric closed form vs quadrature", 1e-6, Box::new(|| wall_grid(true))),
        ("magnetic closed form vs quadrature", 1e-6, Box::new(|| wall_grid(false))),
        ("finite-difference operator oracle", 1e-6, Box::new(operator_oracle)),
        ("angular polarization sum", 1e-6, Box::new(appendix_identity)),
        ("adaptive vs Gauss-Laguerre (x rel-tol)", 10.0, Box::new(move || quadrature_redundancy(spec))),
        ("causality violations", 0.0, Box::new(causality)),
    ];
    jobs.par_iter()
        .map(|(name, tolerance, job)| Ok(Check { name, measured: job()?, tolerance: *tolerance }))
        .collect()
}

pub fn table(checks: &[Check]) -> Table {
    Table {
        columns: vec!["check", "measured", "tolerance", "result"],
        rows: checks
            .iter()
            .map(|c| {
                vec![
                    Cell::Text(c.name.into()),
                    Cell::Num(c.measured),
                    Cell::Num(c.tolerance),
                    Cell::Text(if c.passed() { "PASS" } else { "FAIL" }.into()),
                ]
            })
            .collect(),
    }
}

pub fn print_summary<W: std::io::Write>(mut out: W, checks: &[Check]) -> std::io::Result<()> {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in checks {
        let result = if c.passed() { "PASS" } else { "FAIL" };
        writeln!(out, "{:<width$}  {:>10.3e}  <= {:<8.1e} {result}", c.name, c.measured, c.tolerance)?;
    }
    Ok(())
}
