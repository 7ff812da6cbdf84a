//! Unit system tying physical quantities to the internal natural units.
//!
//! All numerics in this crate run in natural units where `hbar = m = c = 1`:
//! the internal length unit is the Compton length `hbar/(m c)`, the internal
//! time unit is `hbar/(m c^2)`, and the rest energy `m c^2` is 1. A
//! [`UnitSystem`] carries the physical values of `hbar`, `m`, `c` and is used
//! only at the I/O boundary to convert physical quantities in and out.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Physical scales of one particle species: action, mass, light speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem<T> {
    hbar: T,
    mass: T,
    c: T,
}

/// Dimension tag for converting a scalar quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Length,
    Time,
    Energy,
    Momentum,
    Frequency,
    Action,
}

impl Dimension {
    pub const ALL: [Dimension; 6] = [
        Dimension::Length,
        Dimension::Time,
        Dimension::Energy,
        Dimension::Momentum,
        Dimension::Frequency,
        Dimension::Action,
    ];
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "length" => Ok(Dimension::Length),
            "time" => Ok(Dimension::Time),
            "energy" => Ok(Dimension::Energy),
            "momentum" => Ok(Dimension::Momentum),
            "frequency" => Ok(Dimension::Frequency),
            "action" => Ok(Dimension::Action),
            other => Err(Error::rejected(format!("unknown dimension tag `{other}`"))),
        }
    }
}

impl<T: Real> UnitSystem<T> {
    /// Build a unit system from physical `hbar` (J s), mass (kg) and `c` (m/s).
    pub fn new(hbar: T, mass: T, c: T) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("mass", mass), ("c", c)] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::rejected(format!(
                    "unit system requires {name} > 0 and finite, got {v}"
                )));
            }
        }
        let u = UnitSystem { hbar, mass, c };
        for (name, v) in [
            ("Compton length", u.compton_length()),
            ("Compton time", u.compton_time()),
        ] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::rejected(format!(
                    "derived {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(u)
    }

    /// The internal unit system itself: `hbar = m = c = 1`.
    pub fn natural() -> Self {
        UnitSystem {
            hbar: T::one(),
            mass: T::one(),
            c: T::one(),
        }
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn c(&self) -> T {
        self.c
    }

    /// Physical size of one internal length unit: `hbar/(m c)`.
    pub fn compton_length(&self) -> T {
        self.hbar / (self.mass * self.c)
    }

    /// Physical size of one internal time unit: `hbar/(m c^2)`.
    pub fn compton_time(&self) -> T {
        self.hbar / (self.mass * self.c * self.c)
    }

    /// Physical size of one internal energy unit: `m c^2`.
    pub fn rest_energy(&self) -> T {
        self.mass * self.c * self.c
    }

    /// Physical size of one internal unit of the given dimension.
    pub fn scale(&self, dim: Dimension) -> T {
        match dim {
            Dimension::Length => self.compton_length(),
            Dimension::Time => self.compton_time(),
            Dimension::Energy => self.rest_energy(),
            Dimension::Momentum => self.mass * self.c,
            Dimension::Frequency => self.rest_energy() / self.hbar,
            Dimension::Action => self.hbar,
        }
    }

    /// Convert a physical quantity into a dimensionless internal value.
    pub fn to_internal(&self, quantity: T, dim: Dimension) -> T {
        quantity / self.scale(dim)
    }

    /// Convert an internal value back into physical units.
    pub fn from_internal(&self, value: T, dim: Dimension) -> T {
        value * self.scale(dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // SI-ish values for an electron, used as a representative "physical" system.
    fn electron() -> UnitSystem<f64> {
        UnitSystem::new(1.054571817e-34, 9.1093837015e-31, 2.99792458e8).unwrap()
    }

    #[test]
    fn compton_length_is_the_internal_length_unit() {
        let u = electron();
        let lc = u.compton_length();
        assert_relative_eq!(u.to_internal(lc, Dimension::Length), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rest_energy_is_the_internal_energy_unit() {
        let u = electron();
        let e0 = u.rest_energy();
        assert_relative_eq!(u.to_internal(e0, Dimension::Energy), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn de_broglie_clock_period_is_two_pi() {
        // One rest-clock period is 2*pi*hbar/(m c^2): 2*pi internal time units.
        let u = electron();
        let period = 2.0 * std::f64::consts::PI * u.hbar() / u.rest_energy();
        assert_relative_eq!(
            u.to_internal(period, Dimension::Time),
            2.0 * std::f64::consts::PI,
            max_relative = 1e-14
        );
    }

    #[test]
    fn rejects_nonpositive_scales() {
        assert!(UnitSystem::new(0.0, 1.0, 1.0).is_err());
        assert!(UnitSystem::new(1.0, -1.0, 1.0).is_err());
        assert!(UnitSystem::new(1.0, 1.0, f64::NAN).is_err());
        assert!(UnitSystem::new(1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn unknown_dimension_tag_is_rejected() {
        assert!("charge".parse::<Dimension>().is_err());
        assert_eq!("length".parse::<Dimension>().unwrap(), Dimension::Length);
    }

    proptest! {
        #[test]
        fn round_trip_all_dimensions(
            hbar in 1e-40f64..1e5,
            mass in 1e-32f64..1e3,
            c in 1e0f64..1e10,
            q in 1e-20f64..1e20,
        ) {
            let u = UnitSystem::new(hbar, mass, c).unwrap();
            for dim in Dimension::ALL {
                let back = u.from_internal(u.to_internal(q, dim), dim);
                prop_assert!((back - q).abs() <= 1e-12 * q.abs());
            }
        }
    }
}
