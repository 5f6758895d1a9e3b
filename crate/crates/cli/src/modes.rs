//! Grid expansion and per-mode row evaluation.

use rayon::prelude::*;

use cpwall::casimir::{
    dynamic_cp_decomposed, electric_cp_closed, electric_cp_quadrature_with, magnetic_cp_closed,
    magnetic_cp_quadrature_with, CPEnergy,
};
use cpwall::fields::{
    dynamic_electric_density_with, first_order_kernel, static_electric_density_with, static_magnetic_density_with,
    DensityOptions, DensityResult,
};
use cpwall::geometry::{derive_frame, AtomSource, Vec3};
use cpwall::{FieldKind, Route};

use crate::config::{Coord, Mode, SweepConfig};
use crate::output::{Cell, Table};
use crate::CliError;

/// One evaluation site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub point: Vec3,
    pub d: f64,
    pub t: Option<f64>,
}

/// Base point used by sweeps that only move one coordinate.
pub fn default_base(d: f64) -> Vec3 {
    [0.0, 0.0, d + 10.0]
}

pub fn expand_grid(config: &SweepConfig) -> Vec<GridPoint> {
    let base = config.points.first().copied().unwrap_or_else(|| default_base(config.d));
    let at = |point, d, t| GridPoint { point, d, t };
    match config.sweep {
        None => config.points.iter().map(|&p| at(p, config.d, config.time)).collect(),
        Some(s) => s
            .values()
            .into_iter()
            .map(|v| match s.coord {
                Coord::R0 => at([0.0, 0.0, config.d + v], config.d, config.time),
                Coord::Z => at([base[0], base[1], v], config.d, config.time),
                Coord::X => at([v, base[1], base[2]], config.d, config.time),
                Coord::D => at(base, v, config.time),
                Coord::T => at(base, config.d, Some(v)),
            })
            .collect(),
    }
}

pub fn columns(config: &SweepConfig) -> Vec<&'static str> {
    let mut c = match config.mode {
        Mode::Density => vec![
            "x",
            "y",
            "z",
            "d",
            "r0",
            "r1",
            "electric_direct",
            "electric_image",
            "electric_cross",
            "electric_total",
            "magnetic_direct",
            "magnetic_image",
            "magnetic_cross",
            "magnetic_total",
        ],
        Mode::DensityDynamic => vec!["t", "total", "direct", "image", "cross", "static_reference"],
        Mode::Cp => vec!["r0", "r1", "rho", "E_direct", "E_image", "E_cross", "E_total", "route"],
        Mode::CpDynamic => vec!["t", "r0", "r1", "rho", "E_direct", "E_image", "E_cross", "E_total", "E_static"],
        Mode::Kernel => vec![
            "x",
            "y",
            "z",
            "t",
            "e_x_re",
            "e_x_im",
            "e_y_re",
            "e_y_im",
            "e_z_re",
            "e_z_im",
            "b_x_re",
            "b_x_im",
            "b_y_re",
            "b_y_im",
            "b_z_re",
            "b_z_im",
            "direct_active",
            "reflected_active",
        ],
        Mode::Verify => unreachable!("verify has its own table"),
    };
    c.push("status");
    c
}

/// A failed grid point.
#[derive(Debug, Clone)]
pub struct RowFailure {
    pub index: usize,
    pub point: GridPoint,
    pub message: String,
}

fn density_cells(d: &DensityResult) -> [Cell; 4] {
    [Cell::Num(d.direct), Cell::Num(d.image), Cell::Num(d.cross), Cell::Num(d.total)]
}

fn energy_cells(e: &CPEnergy) -> [Cell; 4] {
    [Cell::Num(e.direct), Cell::Num(e.image), Cell::Num(e.cross), Cell::Num(e.total)]
}

fn evaluate(config: &SweepConfig, g: &GridPoint) -> Result<Vec<Cell>, CliError> {
    let atom: AtomSource = config.atom_at(g.d)?;
    let frame = derive_frame(g.point, &atom)?;
    let opts = DensityOptions::default().with_quadrature(config.quadrature);
    let t = || g.t.expect("time checked during configuration");
    let mut row = Vec::new();
    match config.mode {
        Mode::Density => {
            let e = static_electric_density_with(&frame, &atom, &opts)?;
            let m = static_magnetic_density_with(&frame, &atom, &opts)?;
            row.extend(g.point.map(Cell::Num));
            row.extend([Cell::Num(g.d), Cell::Num(frame.r0), Cell::Num(frame.r1)]);
            row.extend(density_cells(&e));
            row.extend(density_cells(&m));
        }
        Mode::DensityDynamic => {
            let t = t();
            let dynamic = dynamic_electric_density_with(&frame, &atom, t, &opts)?;
            let stationary = static_electric_density_with(&frame, &atom, &opts)?;
            row.extend([
                Cell::Num(t),
                Cell::Num(dynamic.total),
                Cell::Num(dynamic.direct),
                Cell::Num(dynamic.image),
                Cell::Num(dynamic.cross),
                Cell::Num(stationary.total),
            ]);
        }
        Mode::Cp => {
            let far = DensityOptions::far_zone().with_quadrature(config.quadrature);
            let e = match (config.field, config.closed_form) {
                (FieldKind::Electric, false) => electric_cp_quadrature_with(&frame, &atom, config.alpha_b, &far)?,
                (FieldKind::Magnetic, false) => magnetic_cp_quadrature_with(&frame, &atom, config.alpha_m_b, &far)?,
                (kind, true) => {
                    let alpha_a = atom.static_polarizability().expect("isotropy checked during configuration");
                    match kind {
                        FieldKind::Electric => electric_cp_closed(&frame, alpha_a, config.alpha_b),
                        FieldKind::Magnetic => magnetic_cp_closed(&frame, alpha_a, config.alpha_m_b),
                    }
                }
            };
            row.extend([Cell::Num(frame.r0), Cell::Num(frame.r1), Cell::Num(frame.rho)]);
            row.extend(energy_cells(&e));
            row.push(Cell::Text(e.route.as_str().into()));
        }
        Mode::CpDynamic => {
            let t = t();
            let e = dynamic_cp_decomposed(&frame, &atom, config.alpha_b, t, &opts)?;
            let stationary = static_electric_density_with(&frame, &atom, &opts)?;
            row.extend([Cell::Num(t), Cell::Num(frame.r0), Cell::Num(frame.r1), Cell::Num(frame.rho)]);
            row.extend(energy_cells(&e));
            row.push(Cell::Num(-0.5 * config.alpha_b * stationary.total));
        }
        Mode::Kernel => {
            let t = t();
            let k = first_order_kernel(&frame, t)?;
            row.extend(g.point.map(Cell::Num));
            row.push(Cell::Num(t));
            for kind in [FieldKind::Electric, FieldKind::Magnetic] {
                for c in k.apply(kind, atom.mu) {
                    row.extend([Cell::Num(c.re), Cell::Num(c.im)]);
                }
            }
            row.extend([Cell::Bool(k.direct_active), Cell::Bool(k.reflected_active)]);
        }
        Mode::Verify => unreachable!("verify has its own table"),
    }
    row.push(Cell::Text("ok".into()));
    Ok(row)
}

/// Evaluates every grid point in parallel. Rows keep grid order; failed
/// points are kept with empty values and the error in the status column.
pub fn run_grid(config: &SweepConfig) -> (Table, Vec<RowFailure>) {
    let columns = columns(config);
    let grid = expand_grid(config);
    let results: Vec<Result<Vec<Cell>, CliError>> = grid.par_iter().map(|g| evaluate(config, g)).collect();
    let mut rows = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for (index, (g, result)) in grid.iter().zip(results).enumerate() {
        match result {
            Ok(row) => rows.push(row),
            Err(e) => {
                let mut row = vec![Cell::Num(f64::NAN); columns.len() - 1];
                if config.mode == Mode::Cp {
                    let route = if config.closed_form { Route::ClosedForm } else { Route::Quadrature };
                    row[columns.len() - 2] = Cell::Text(route.as_str().into());
                }
                row.push(Cell::Text(format!("error: {e}")));
                rows.push(row);
                failures.push(RowFailure { index, point: *g, message: e.to_string() });
            }
        }
    }
    (Table { columns, rows }, failures)
}
