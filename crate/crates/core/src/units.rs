//! Conversion from reduced units to SI.
//!
//! The library works with `hbar = c = 1` and the transition wavenumber
//! `k0 = 1`. A reduced length `L` is `k0 r`, a reduced time is `c k0 t`,
//! energies are in `hbar c k0` and energy densities in `hbar c k0^4`.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// One-line description written into output metadata.
pub const REDUCED_UNITS_NOTE: &str =
    "reduced units hbar=c=k0=1: length k0*r, time c*k0*t, energy hbar*c*k0, energy density hbar*c*k0^4";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    /// Transition wavenumber in 1/m.
    pub k0: f64,
}

impl UnitSystem {
    pub fn new(k0: f64) -> Self {
        Self { k0 }
    }

    /// From the transition wavelength in metres.
    pub fn from_wavelength(lambda: f64) -> Self {
        Self { k0: std::f64::consts::TAU / lambda }
    }

    pub fn length_m(&self, reduced: f64) -> f64 {
        reduced / self.k0
    }

    pub fn reduced_length(&self, metres: f64) -> f64 {
        metres * self.k0
    }

    pub fn time_s(&self, reduced: f64) -> f64 {
        reduced / (SPEED_OF_LIGHT * self.k0)
    }

    pub fn energy_j(&self, reduced: f64) -> f64 {
        reduced * HBAR * SPEED_OF_LIGHT * self.k0
    }

    pub fn energy_density_j_m3(&self, reduced: f64) -> f64 {
        reduced * HBAR * SPEED_OF_LIGHT * self.k0.powi(4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn round_trip_and_scaling() {
        let u = UnitSystem::from_wavelength(589e-9);
        assert_relative_eq!(u.reduced_length(u.length_m(12.5)), 12.5, max_relative = 1e-15);
        // one wavelength is 2 pi reduced lengths
        assert_relative_eq!(u.reduced_length(589e-9), std::f64::consts::TAU, max_relative = 1e-15);
        assert_relative_eq!(u.time_s(u.k0 * SPEED_OF_LIGHT), 1.0, max_relative = 1e-15);
        assert_relative_eq!(u.energy_density_j_m3(1.0) / u.energy_j(1.0), u.k0.powi(3), max_relative = 1e-12);
    }
}
