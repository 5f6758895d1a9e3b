//! Sweep configuration assembled from a key=value file and command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use cpwall::geometry::{AtomSource, Vec3};
use cpwall::quadrature::QuadratureSpec;
use cpwall::FieldKind;

use crate::CliError;

pub const KEYS: [&str; 13] = [
    "mode", "d", "mu", "alpha-b", "alpha-m-b", "sweep", "point", "time", "rel-tol", "out", "format", "field",
    "route",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Density,
    DensityDynamic,
    Cp,
    CpDynamic,
    Kernel,
    Verify,
}

impl Mode {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "density" => Mode::Density,
            "density-dynamic" => Mode::DensityDynamic,
            "cp" => Mode::Cp,
            "cp-dynamic" => Mode::CpDynamic,
            "kernel" => Mode::Kernel,
            "verify" => Mode::Verify,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Density => "density",
            Mode::DensityDynamic => "density-dynamic",
            Mode::Cp => "cp",
            Mode::CpDynamic => "cp-dynamic",
            Mode::Kernel => "kernel",
            Mode::Verify => "verify",
        }
    }

    pub fn needs_time(self) -> bool {
        matches!(self, Mode::DensityDynamic | Mode::CpDynamic | Mode::Kernel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coord {
    /// Distance from the atom along the wall normal.
    R0,
    Z,
    X,
    D,
    T,
}

impl Coord {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "r0" => Coord::R0,
            "z" => Coord::Z,
            "x" => Coord::X,
            "d" => Coord::D,
            "t" => Coord::T,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Coord::R0 => "r0",
            Coord::Z => "z",
            Coord::X => "x",
            Coord::D => "d",
            Coord::T => "t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub coord: Coord,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub log: bool,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let s = i as f64 / last;
                if self.log {
                    (self.lo.ln() + s * (self.hi.ln() - self.lo.ln())).exp()
                } else {
                    self.lo + s * (self.hi - self.lo)
                }
            })
            .map(|v| v.clamp(self.lo, self.hi))
            .collect()
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.coord.as_str(), self.lo, self.hi, self.steps)?;
        if self.log {
            write!(f, ":log")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub mode: Mode,
    pub d: f64,
    pub mu: Vec3,
    pub alpha_b: f64,
    pub alpha_m_b: f64,
    pub sweep: Option<Sweep>,
    pub points: Vec<Vec3>,
    pub time: Option<f64>,
    pub quadrature: QuadratureSpec,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub field: FieldKind,
    pub closed_form: bool,
}

/// Raw values keyed by option name; later sources replace earlier ones.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    values: BTreeMap<String, Vec<String>>,
}

fn canonical(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl RawConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut raw = RawConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config("config", format!("line {} is not key=value: {line}", n + 1)));
            };
            let key = canonical(key);
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::config(&key, "unknown key".into()));
            }
            raw.values.entry(key).or_default().push(value.trim().to_string());
        }
        Ok(raw)
    }

    /// Replaces every value of `key`.
    pub fn set(&mut self, key: &str, values: Vec<String>) {
        if !values.is_empty() {
            self.values.insert(canonical(key), values);
        }
    }

    fn single(&self, key: &str) -> Result<Option<&str>, CliError> {
        match self.values.get(key).map(Vec::as_slice) {
            None | Some([]) => Ok(None),
            Some([v]) => Ok(Some(v)),
            Some(_) => Err(CliError::config(key, "given more than once".into())),
        }
    }

    fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.single(key)?.map(|v| parse_f64(key, v)).transpose()
    }

    pub fn resolve(&self) -> Result<SweepConfig, CliError> {
        let mode = self.single("mode")?.ok_or_else(|| CliError::config("mode", "required".into()))?;
        let mode = Mode::parse(mode).ok_or_else(|| CliError::config("mode", format!("unknown mode `{mode}`")))?;

        let d = self.number("d")?.unwrap_or(2.0);
        let mu = self.single("mu")?.map(|v| parse_vec3("mu", v)).transpose()?.unwrap_or([1.0; 3]);
        AtomSource::new(d, mu).map_err(|e| CliError::config("d", e.to_string()))?;

        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(CliError::config(key, format!("must be positive, got {v}")))
            }
        };
        let alpha_b = positive("alpha-b", self.number("alpha-b")?.unwrap_or(1.0))?;
        let alpha_m_b = positive("alpha-m-b", self.number("alpha-m-b")?.unwrap_or(1.0))?;

        let sweep = self.single("sweep")?.map(parse_sweep).transpose()?;
        let points = self
            .values
            .get("point")
            .map(|vs| vs.iter().map(|v| parse_vec3("point", v)).collect::<Result<Vec<_>, _>>())
            .transpose()?
            .unwrap_or_default();
        let time = self.number("time")?;
        if let Some(t) = time {
            if !t.is_finite() || t < 0.0 {
                return Err(CliError::config("time", format!("must be non-negative, got {t}")));
            }
        }

        let mut quadrature = QuadratureSpec::default();
        if let Some(tol) = self.number("rel-tol")? {
            quadrature = quadrature.with_rel_tol(tol);
        }
        quadrature.validate().map_err(|e| CliError::config("rel-tol", e.to_string()))?;

        let format = match self.single("format")?.unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(CliError::config("format", format!("expected csv or json, got `{other}`"))),
        };
        let field = match self.single("field")?.unwrap_or("electric") {
            "electric" => FieldKind::Electric,
            "magnetic" => FieldKind::Magnetic,
            other => return Err(CliError::config("field", format!("expected electric or magnetic, got `{other}`"))),
        };
        let closed_form = match self.single("route")?.unwrap_or("quadrature") {
            "quadrature" => false,
            "closed_form" | "closed-form" => true,
            other => {
                return Err(CliError::config("route", format!("expected quadrature or closed_form, got `{other}`")))
            }
        };
        let out = self.single("out")?.map(PathBuf::from);

        let config = SweepConfig {
            mode,
            d,
            mu,
            alpha_b,
            alpha_m_b,
            sweep,
            points,
            time,
            quadrature,
            out,
            format,
            field,
            closed_form,
        };
        config.check()?;
        Ok(config)
    }
}

impl SweepConfig {
    fn check(&self) -> Result<(), CliError> {
        if let Some(s) = &self.sweep {
            if s.coord == Coord::T && !self.mode.needs_time() {
                return Err(CliError::config("sweep", format!("mode {} does not take a time", self.mode.as_str())));
            }
            if s.coord == Coord::T && self.time.is_some() {
                return Err(CliError::config("time", "conflicts with a sweep over t".into()));
            }
            if self.points.len() > 1 {
                return Err(CliError::config("point", "a sweep takes at most one base point".into()));
            }
        }
        if self.mode.needs_time() && self.time.is_none() && self.sweep.map(|s| s.coord) != Some(Coord::T) {
            return Err(CliError::config("time", format!("required by mode {}", self.mode.as_str())));
        }
        if self.mode != Mode::Verify && self.sweep.is_none() && self.points.is_empty() {
            return Err(CliError::config("point", "give --point or --sweep".into()));
        }
        if self.mode == Mode::Cp && self.closed_form && self.atom()?.static_polarizability().is_none() {
            return Err(CliError::config("route", "the closed form needs an isotropic atom".into()));
        }
        Ok(())
    }

    pub fn atom(&self) -> Result<AtomSource, CliError> {
        self.atom_at(self.d)
    }

    pub fn atom_at(&self, d: f64) -> Result<AtomSource, CliError> {
        AtomSource::new(d, self.mu).map_err(|e| CliError::config("d", e.to_string()))
    }

    /// Resolved settings, echoed into output metadata.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let join = |v: &Vec3| format!("{},{},{}", v[0], v[1], v[2]);
        let mut e = vec![
            ("mode", self.mode.as_str().to_string()),
            ("d", self.d.to_string()),
            ("mu", join(&self.mu)),
            ("alpha-b", self.alpha_b.to_string()),
            ("alpha-m-b", self.alpha_m_b.to_string()),
            ("rel-tol", self.quadrature.rel_tol.to_string()),
            ("field", self.field.as_str().to_string()),
            ("route", if self.closed_form { "closed_form" } else { "quadrature" }.to_string()),
        ];
        if let Some(s) = &self.sweep {
            e.push(("sweep", s.to_string()));
        }
        for p in &self.points {
            e.push(("point", join(p)));
        }
        if let Some(t) = self.time {
            e.push(("time", t.to_string()));
        }
        e
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v.trim().parse().map_err(|_| CliError::config(key, format!("not a number: `{v}`")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::config(key, format!("not finite: `{v}`")))
    }
}

fn parse_vec3(key: &str, v: &str) -> Result<Vec3, CliError> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::config(key, format!("expected x,y,z, got `{v}`")));
    }
    Ok([parse_f64(key, parts[0])?, parse_f64(key, parts[1])?, parse_f64(key, parts[2])?])
}

fn parse_sweep(v: &str) -> Result<Sweep, CliError> {
    let key = "sweep";
    let parts: Vec<&str> = v.split(':').collect();
    if !(4..=5).contains(&parts.len()) {
        return Err(CliError::config(key, format!("expected coord:lo:hi:n[:log], got `{v}`")));
    }
    let coord = Coord::parse(parts[0]).ok_or_else(|| {
        CliError::config(key, format!("unknown coordinate `{}` (r0, z, x, d or t)", parts[0]))
    })?;
    let lo = parse_f64(key, parts[1])?;
    let hi = parse_f64(key, parts[2])?;
    let steps: usize = parts[3]
        .parse()
        .map_err(|_| CliError::config(key, format!("step count is not an integer: `{}`", parts[3])))?;
    let log = match parts.get(4) {
        None => false,
        Some(&"log") => true,
        Some(other) => return Err(CliError::config(key, format!("unknown spacing `{other}`"))),
    };
    if steps == 0 {
        return Err(CliError::config(key, "needs at least one step".into()));
    }
    if hi < lo || (steps > 1 && hi == lo) {
        return Err(CliError::config(key, format!("empty range {lo}..{hi}")));
    }
    if log && lo <= 0.0 {
        return Err(CliError::config(key, "logarithmic spacing needs a positive lower bound".into()));
    }
    Ok(Sweep { coord, lo, hi, steps, log })
}
