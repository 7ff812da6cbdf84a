//! Closed-form field constructors: plane-wave actions, oscillating and
//! spinning breathers, Lorentz boosts, and the log-form action with branch
//! tracking.
//!
//! Everything here is in internal natural units (`hbar = m = c = 1`). The
//! breather frequency is hard-locked to twice the rest clock rate
//! (`omega = 2`), which puts the radial wavenumber at `k = sqrt(3)` on the
//! free dispersion relation `omega = sqrt(k^2 + 1)`; a separate
//! [`dispersion_omega`] constructor exists for general `(omega, k)` pairs
//! used in dispersion tests.

use crate::action::ActionValue;
use crate::error::{Error, Result};
use crate::grid::SpacetimePoint;
use crate::scalar::{cis, Cx, Real};
use crate::special::{assoc_legendre, spherical_bessel, MAX_ORDER};
use crate::vec3::{self, Vec3};

/// Relative tolerance for the mass-shell and dispersion invariants.
const SHELL_TOL: f64 = 1e-12;

/// Breather oscillation frequency in internal units: twice the rest clock.
pub fn locked_frequency<T: Real>() -> T {
    T::of(2.0)
}

/// Radial wavenumber paired with [`locked_frequency`] on the free shell.
pub fn locked_wavenumber<T: Real>() -> T {
    T::of(3.0).sqrt()
}

/// On-shell plane wave: energy and momentum with `E^2 = p^2 + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveSpec<T> {
    energy: T,
    momentum: Vec3<T>,
}

impl<T: Real> PlaneWaveSpec<T> {
    pub fn new(energy: T, momentum: Vec3<T>) -> Result<Self> {
        if !energy.is_finite() || !vec3::is_finite(momentum) {
            return Err(Error::rejected("plane wave requires finite (E, p)"));
        }
        let shell = energy * energy - vec3::norm2(momentum) - T::one();
        if shell.abs() > T::of(SHELL_TOL) * (energy * energy).max(T::one()) {
            return Err(Error::rejected(format!(
                "off mass shell: E^2 - p^2 - 1 = {shell}"
            )));
        }
        Ok(PlaneWaveSpec { energy, momentum })
    }

    /// On-shell spec from momentum alone.
    pub fn from_momentum(momentum: Vec3<T>) -> Result<Self> {
        if !vec3::is_finite(momentum) {
            return Err(Error::rejected("momentum must be finite"));
        }
        let energy = (vec3::norm2(momentum) + T::one()).sqrt();
        Ok(PlaneWaveSpec { energy, momentum })
    }

    /// On-shell spec of a particle moving at velocity `v` (|v| < 1).
    pub fn from_velocity(v: Vec3<T>) -> Result<Self> {
        let b2 = vec3::norm2(v);
        if !(b2 < T::one()) {
            return Err(Error::rejected(format!("|v| must be < 1, got |v|^2 = {b2}")));
        }
        let gamma = T::one() / (T::one() - b2).sqrt();
        Ok(PlaneWaveSpec {
            energy: gamma,
            momentum: vec3::scale(v, gamma),
        })
    }

    pub fn rest() -> Self {
        PlaneWaveSpec {
            energy: T::one(),
            momentum: vec3::zero(),
        }
    }

    pub fn energy(&self) -> T {
        self.energy
    }

    pub fn momentum(&self) -> Vec3<T> {
        self.momentum
    }
}

/// Matched `(omega, k)` pair on the free dispersion relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPair<T> {
    pub omega: T,
    pub k: T,
}

impl<T: Real> DispersionPair<T> {
    pub fn new(omega: T, k: T) -> Result<Self> {
        let expect = (k * k + T::one()).sqrt();
        if ((omega - expect) / expect).abs() > T::of(SHELL_TOL) {
            return Err(Error::rejected(format!(
                "dispersion violated: omega = {omega}, sqrt(k^2+1) = {expect}"
            )));
        }
        Ok(DispersionPair { omega, k })
    }
}

/// Frequency of a free mode of wavenumber `k >= 0`: `omega = sqrt(k^2 + 1)`.
pub fn dispersion_omega<T: Real>(k: T) -> Result<DispersionPair<T>> {
    if !(k.is_finite() && k >= T::zero()) {
        return Err(Error::rejected(format!("wavenumber must be >= 0, got {k}")));
    }
    DispersionPair::new((k * k + T::one()).sqrt(), k)
}

/// All free parameters of one breather term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreatherSpec<T> {
    pub alpha: Cx<T>,
    pub l: u32,
    pub n: i32,
    pub boost_v: Vec3<T>,
    pub center: Vec3<T>,
}

impl<T: Real> BreatherSpec<T> {
    pub fn new(alpha: Cx<T>, l: u32, n: i32, boost_v: Vec3<T>, center: Vec3<T>) -> Result<Self> {
        if l > MAX_ORDER {
            return Err(Error::rejected(format!(
                "orbital index {l} exceeds supported maximum {MAX_ORDER}"
            )));
        }
        if n.unsigned_abs() > l {
            return Err(Error::rejected(format!(
                "azimuthal index |{n}| exceeds orbital index {l}"
            )));
        }
        // |alpha| < 1 keeps the log argument 1 + alpha(...) away from zero.
        if !(alpha.norm() < T::one()) {
            return Err(Error::rejected(format!(
                "breather intensity |alpha| must be < 1, got {}",
                alpha.norm()
            )));
        }
        if !(vec3::norm2(boost_v) < T::one()) {
            return Err(Error::rejected("boost velocity must satisfy |v| < 1"));
        }
        if !vec3::is_finite(center) {
            return Err(Error::rejected("breather center must be finite"));
        }
        Ok(BreatherSpec {
            alpha,
            l,
            n,
            boost_v,
            center,
        })
    }

    /// Spherically symmetric breather at rest at the origin.
    pub fn rest(alpha: Cx<T>) -> Result<Self> {
        BreatherSpec::new(alpha, 0, 0, vec3::zero(), vec3::zero())
    }

    /// Rest-frame coordinates of a lab event relative to this breather.
    pub fn rest_frame(&self, pt: SpacetimePoint<T>) -> Result<SpacetimePoint<T>> {
        let rel = SpacetimePoint::new(
            pt.t,
            pt.x - self.center[0],
            pt.y - self.center[1],
            pt.z - self.center[2],
        );
        if vec3::norm2(self.boost_v) == T::zero() {
            Ok(rel)
        } else {
            lorentz_boost(rel, self.boost_v)
        }
    }

    /// Breather factor `w` with `psi = e^{-i t'} (1 + w)`:
    /// `w = alpha exp(i (n phi' - t')) j_l(sqrt3 r') P_l^n(cos theta')`.
    fn breather_factor(&self, rest: SpacetimePoint<T>) -> Result<Cx<T>> {
        let (r, cos_theta, phi) = spherical(rest.space());
        let radial = spherical_bessel(self.l, locked_wavenumber::<T>() * r)?;
        let angular = assoc_legendre(self.l, self.n, cos_theta)?;
        let phase = cis(T::of(self.n as f64) * phi - rest.t);
        Ok(self.alpha * phase * (radial * angular))
    }
}

fn spherical<T: Real>(xyz: Vec3<T>) -> (T, T, T) {
    let r = vec3::norm(xyz);
    if r == T::zero() {
        // Angles are immaterial at the origin: l = 0 has P = 1 and l > 0
        // has a vanishing radial factor.
        return (T::zero(), T::one(), T::zero());
    }
    let cos_theta = (xyz[2] / r).max(-T::one()).min(T::one());
    let phi = xyz[1].atan2(xyz[0]);
    (r, cos_theta, phi)
}

/// Action of a free plane wave: `S = -E t + p . x`, purely real, branch 0.
pub fn plane_wave_action<T: Real>(
    spec: &PlaneWaveSpec<T>,
    pt: SpacetimePoint<T>,
) -> ActionValue<T> {
    let s = -spec.energy * pt.t + vec3::dot(spec.momentum, pt.space());
    ActionValue::new(Cx::new(s, T::zero()), 0)
}

/// Group velocity of an on-shell plane wave: `v = p / E`, always subluminal.
pub fn group_velocity<T: Real>(spec: &PlaneWaveSpec<T>) -> Vec3<T> {
    vec3::scale(spec.momentum, T::one() / spec.energy)
}

/// Pure Lorentz boost of an event, velocity `|v| < 1`.
///
/// For `v` along x: `t' = gamma (t - v x)`, `x' = gamma (x - v t)`; a general
/// `v` acts on the component parallel to it and leaves the rest unchanged.
pub fn lorentz_boost<T: Real>(pt: SpacetimePoint<T>, v: Vec3<T>) -> Result<SpacetimePoint<T>> {
    let b2 = vec3::norm2(v);
    if !(b2 < T::one() && b2.is_finite()) {
        return Err(Error::rejected(format!(
            "boost speed must satisfy |v| < 1, got |v|^2 = {b2}"
        )));
    }
    if b2 == T::zero() {
        return Ok(pt);
    }
    let gamma = T::one() / (T::one() - b2).sqrt();
    let x = pt.space();
    let xv = vec3::dot(x, v);
    let t_new = gamma * (pt.t - xv);
    // x' = x + ((gamma - 1) (x.v)/v^2 - gamma t) v
    let coeff = (gamma - T::one()) * xv / b2 - gamma * pt.t;
    let x_new = vec3::add(x, vec3::scale(v, coeff));
    Ok(SpacetimePoint::with_space(t_new, x_new))
}

/// Two-term breather field: plane-wave background plus a frequency-locked
/// localized term, boosted and offset per the spec.
pub fn breather_psi<T: Real>(spec: &BreatherSpec<T>, pt: SpacetimePoint<T>) -> Result<Cx<T>> {
    let rest = spec.rest_frame(pt)?;
    let w = spec.breather_factor(rest)?;
    Ok(cis(-rest.t) * (Cx::new(T::one(), T::zero()) + w))
}

/// Log-form action of the breather on the principal branch:
/// `S = -t' - i ln(1 + w)`. With `|alpha| < 1` the log argument stays in the
/// unit disc around 1, so the principal branch is continuous everywhere.
pub fn breather_action<T: Real>(
    spec: &BreatherSpec<T>,
    pt: SpacetimePoint<T>,
) -> Result<ActionValue<T>> {
    let rest = spec.rest_frame(pt)?;
    let w = spec.breather_factor(rest)?;
    let arg = Cx::new(T::one(), T::zero()) + w;
    if arg.norm_sqr() == T::zero() {
        return Err(Error::Singular {
            location: format!("breather action at t={}, r'-frame", pt.t.as_f64()),
        });
    }
    let value = Cx::new(-rest.t, T::zero()) - Cx::new(T::zero(), T::one()) * arg.ln();
    Ok(ActionValue::new(value, 0))
}

/// First-order far-field action `S = -t - i w`, valid away from the core
/// (`sqrt3 r >= 10`); rest breathers only.
pub fn far_field_action<T: Real>(
    spec: &BreatherSpec<T>,
    pt: SpacetimePoint<T>,
) -> Result<ActionValue<T>> {
    if vec3::norm2(spec.boost_v) != T::zero() {
        return Err(Error::rejected(
            "far-field form is defined in the rest frame; boost the result instead",
        ));
    }
    let rest = spec.rest_frame(pt)?;
    let r = vec3::norm(rest.space());
    if locked_wavenumber::<T>() * r < T::of(10.0) {
        return Err(Error::rejected(format!(
            "far-field form requires sqrt3 * r >= 10, got {}",
            (locked_wavenumber::<T>() * r).as_f64()
        )));
    }
    let w = spec.breather_factor(rest)?;
    let value = Cx::new(-rest.t, T::zero()) - Cx::new(T::zero(), T::one()) * w;
    Ok(ActionValue::new(value, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::action_from_psi;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    #[test]
    fn rest_particle_action() {
        let spec = PlaneWaveSpec::<f64>::rest();
        let s = plane_wave_action(&spec, SpacetimePoint::new(2.0, 0.0, 0.0, 0.0));
        assert_relative_eq!(s.value.re, -2.0, epsilon = 1e-15);
        assert_eq!(s.value.im, 0.0);
        assert_eq!(s.branch, 0);
        let s0 = plane_wave_action(&spec, SpacetimePoint::new(0.0, 3.0, -1.0, 0.5));
        assert_eq!(s0.value.re, 0.0);
    }

    #[test]
    fn three_four_five_action() {
        let spec = PlaneWaveSpec::new(1.25, [0.75, 0.0, 0.0]).unwrap();
        let s = plane_wave_action(&spec, SpacetimePoint::new(1.0, 1.0, 0.0, 0.0));
        assert_relative_eq!(s.value.re, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn off_shell_is_rejected() {
        assert!(PlaneWaveSpec::new(1.0, [0.75, 0.0, 0.0]).is_err());
    }

    #[test]
    fn dispersion_values() {
        assert_relative_eq!(dispersion_omega(0.0f64).unwrap().omega, 1.0, epsilon = 1e-15);
        // Locked pair: k = sqrt(3) gives omega = 2 to 1e-14.
        let lock = dispersion_omega(3.0f64.sqrt()).unwrap();
        assert!((lock.omega - 2.0).abs() < 1e-14);
        assert_relative_eq!(
            dispersion_omega(1.0f64).unwrap().omega,
            2.0f64.sqrt(),
            epsilon = 1e-15
        );
        assert!(dispersion_omega(-0.5f64).is_err());
    }

    #[test]
    fn mass_shell_closure_over_sweep() {
        // log-spaced k sweep; omega^2 - k^2 = 1 to relative 1e-12.
        for i in 0..200 {
            let k = 10f64.powf(-3.0 + 6.0 * i as f64 / 199.0);
            let d = dispersion_omega(k).unwrap();
            let shell = d.omega * d.omega - d.k * d.k - 1.0;
            assert!(shell.abs() <= 1e-12 * (d.omega * d.omega).max(1.0), "k = {k}");
        }
    }

    #[test]
    fn group_velocity_values() {
        assert_eq!(group_velocity(&PlaneWaveSpec::<f64>::rest()), [0.0; 3]);
        let spec = PlaneWaveSpec::new(1.25, [0.75, 0.0, 0.0]).unwrap();
        let v = group_velocity(&spec);
        assert_relative_eq!(v[0], 0.6, epsilon = 1e-15);
    }

    #[test]
    fn boost_identity_and_example() {
        let pt = SpacetimePoint::new(1.0, 0.6, -0.3, 0.2);
        assert_eq!(lorentz_boost(pt, [0.0; 3]).unwrap(), pt);
        // v = 0.6 along x, event (t=1, x=0.6): t' = 0.8, x' = 0.
        let b = lorentz_boost(SpacetimePoint::new(1.0, 0.6, 0.0, 0.0), [0.6, 0.0, 0.0]).unwrap();
        assert_relative_eq!(b.t, 0.8, epsilon = 1e-15);
        assert_relative_eq!(b.x, 0.0, epsilon = 1e-15);
        assert!(lorentz_boost(pt, [1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn collinear_boosts_compose_by_velocity_addition() {
        let pt = SpacetimePoint::new(0.7, -1.3, 0.4, 0.9);
        let (u, v) = (0.5f64, 0.3f64);
        let once = lorentz_boost(lorentz_boost(pt, [u, 0.0, 0.0]).unwrap(), [v, 0.0, 0.0]).unwrap();
        let w = (u + v) / (1.0 + u * v);
        let composed = lorentz_boost(pt, [w, 0.0, 0.0]).unwrap();
        assert_relative_eq!(once.t, composed.t, max_relative = 1e-10);
        assert_relative_eq!(once.x, composed.x, max_relative = 1e-10);
        assert_relative_eq!(once.y, composed.y, max_relative = 1e-10);
        assert_relative_eq!(once.z, composed.z, max_relative = 1e-10);
    }

    #[test]
    fn breather_trivial_points() {
        // alpha = 0: plane term only.
        let spec = BreatherSpec::rest(c(0.0, 0.0)).unwrap();
        let psi = breather_psi(&spec, SpacetimePoint::origin()).unwrap();
        assert_relative_eq!(psi.re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(psi.im, 0.0, epsilon = 1e-15);

        // alpha = 1 is out of range; alpha just below 1 at the center and
        // t = 0 approaches 1 + alpha.
        let spec = BreatherSpec::rest(c(0.5, 0.0)).unwrap();
        let psi = breather_psi(&spec, SpacetimePoint::origin()).unwrap();
        assert_relative_eq!(psi.re, 1.5, epsilon = 1e-15);

        // At t = pi and sqrt3 r = pi the localized term sits on a radial zero.
        let r = PI / 3.0f64.sqrt();
        let psi = breather_psi(&spec, SpacetimePoint::new(PI, r, 0.0, 0.0)).unwrap();
        assert_relative_eq!(psi.re, -1.0, epsilon = 1e-14);
        assert_relative_eq!(psi.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn breather_spec_validation() {
        assert!(BreatherSpec::rest(c(1.0, 0.0)).is_err()); // |alpha| = 1
        assert!(BreatherSpec::new(c(0.1, 0.0), 9, 0, [0.0; 3], [0.0; 3]).is_err());
        assert!(BreatherSpec::new(c(0.1, 0.0), 1, 2, [0.0; 3], [0.0; 3]).is_err());
        assert!(BreatherSpec::new(c(0.1, 0.0), 1, 1, [1.0, 0.0, 0.0], [0.0; 3]).is_err());
        // l = 0, n = 0 reproduces the spherically symmetric field: no
        // azimuthal dependence.
        let spec = BreatherSpec::rest(c(0.3, 0.0)).unwrap();
        let a = breather_psi(&spec, SpacetimePoint::new(0.4, 1.0, 0.0, 0.0)).unwrap();
        let b = breather_psi(&spec, SpacetimePoint::new(0.4, 0.0, 1.0, 0.0)).unwrap();
        assert_relative_eq!(a.re, b.re, epsilon = 1e-14);
        assert_relative_eq!(a.im, b.im, epsilon = 1e-14);
    }

    #[test]
    fn action_matches_direct_log_formula_at_fixed_point() {
        let alpha = c(0.1, 0.0);
        let spec = BreatherSpec::rest(alpha).unwrap();
        let pt0: [f64; 3] = [2.0, 0.7, -0.4];
        let r = (pt0[0] * pt0[0] + pt0[1] * pt0[1] + pt0[2] * pt0[2]).sqrt();
        let j0 = {
            let u = 3.0f64.sqrt() * r;
            u.sin() / u
        };
        // Branch-tracked action along the time path vs the scalar formula.
        let n = 513;
        let ts: Vec<f64> = (0..n).map(|k| 4.0 * PI * k as f64 / (n - 1) as f64).collect();
        let path: Vec<Cx<f64>> = ts
            .iter()
            .map(|&t| {
                breather_psi(&spec, SpacetimePoint::new(t, pt0[0], pt0[1], pt0[2])).unwrap()
            })
            .collect();
        let s = action_from_psi(&path).unwrap();
        for (a, &t) in s.iter().zip(&ts) {
            let w = Cx::from_polar(1.0, -t) * alpha * j0;
            let expect = c(-t, 0.0) - c(0.0, 1.0) * (c(1.0, 0.0) + w).ln();
            assert_relative_eq!(a.value.re, expect.re, epsilon = 1e-12);
            assert_relative_eq!(a.value.im, expect.im, epsilon = 1e-12);
        }
        // And the closed-form constructor agrees (modulo 2 pi branch).
        let direct = breather_action(&spec, SpacetimePoint::new(ts[17], pt0[0], pt0[1], pt0[2]))
            .unwrap();
        let tracked = s[17].value;
        let diff = (tracked - direct.value).re / (2.0 * PI);
        assert_relative_eq!(diff, diff.round(), epsilon = 1e-12);
        assert_relative_eq!(tracked.im, direct.value.im, epsilon = 1e-12);
    }

    #[test]
    fn far_field_examples_and_remainder_bound() {
        let spec = BreatherSpec::rest(c(0.0, 0.0)).unwrap();
        let pt = SpacetimePoint::new(1.5, 20.0, 0.0, 0.0);
        let s = far_field_action(&spec, pt).unwrap();
        assert_relative_eq!(s.value.re, -1.5, epsilon = 1e-15);
        assert_eq!(s.value.im, 0.0);

        // alpha = 0.05, sqrt3 r = 20, t = 0: S = -i 0.05 sin(20)/20.
        let spec = BreatherSpec::rest(c(0.05, 0.0)).unwrap();
        let r = 20.0 / 3.0f64.sqrt();
        let s = far_field_action(&spec, SpacetimePoint::new(0.0, r, 0.0, 0.0)).unwrap();
        assert_relative_eq!(s.value.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(s.value.im, -0.05 * (20.0f64.sin() / 20.0), epsilon = 1e-15);

        // Inside the core the expansion is refused.
        assert!(far_field_action(&spec, SpacetimePoint::new(0.0, 1.0, 0.0, 0.0)).is_err());

        // |full - far| <= |w|^2/2 * (1 + |w|/(1-|w|)): Taylor remainder of
        // ln(1 + w).
        let spec = BreatherSpec::rest(c(0.2, 0.1)).unwrap();
        for i in 0..50 {
            let r = (10.0 + 3.0 * i as f64) / 3.0f64.sqrt();
            let t = 0.13 * i as f64;
            let pt = SpacetimePoint::new(t, r, 0.0, 0.0);
            let full = breather_action(&spec, pt).unwrap().value;
            let far = far_field_action(&spec, pt).unwrap().value;
            let u = 3.0f64.sqrt() * r;
            let wmag = spec.alpha.norm() * (u.sin() / u).abs();
            let bound = wmag * wmag / 2.0 * (1.0 + wmag / (1.0 - wmag));
            assert!(
                (full - far).norm() <= bound + 1e-15,
                "remainder {} exceeds bound {}",
                (full - far).norm(),
                bound
            );
        }
    }

    #[test]
    fn frequency_lock_is_independent_of_intensity() {
        // The argument of the breather factor advances by exactly -2 pi per
        // internal time 2 pi, for any alpha.
        for &alpha in &[0.01, 0.1, 0.5] {
            let spec = BreatherSpec::rest(c(alpha, 0.0)).unwrap();
            let pt = [0.9, 0.2, -0.4];
            let n = 128;
            let mut phase = 0.0f64;
            let mut prev: Option<Cx<f64>> = None;
            for k in 0..=n {
                let t = 2.0 * PI * k as f64 / n as f64;
                let psi = breather_psi(&spec, SpacetimePoint::new(t, pt[0], pt[1], pt[2])).unwrap();
                let w = psi * cis(t) - c(1.0, 0.0); // strip the plane factor
                if let Some(p) = prev {
                    phase += (w / p).arg();
                }
                prev = Some(w);
            }
            assert_relative_eq!(phase, -2.0 * PI, epsilon = 1e-12);
        }
    }

    #[test]
    fn spinning_mode_has_azimuthal_phase() {
        let spec = BreatherSpec::new(c(0.2, 0.0), 1, 1, [0.0; 3], [0.0; 3]).unwrap();
        // At theta = pi/2 the l=1, n=1 angular factor is -1; the breather
        // factor rotates with phi.
        let t = 0.3f64;
        let r = 1.0f64;
        let probe = |phi: f64| {
            let pt = SpacetimePoint::new(t, r * phi.cos(), r * phi.sin(), 0.0);
            let psi = breather_psi(&spec, pt).unwrap();
            psi * cis(t) - c(1.0, 0.0)
        };
        let w0 = probe(0.0);
        let w1 = probe(1.0);
        assert_relative_eq!((w1 / w0).arg(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(w1.norm(), w0.norm(), epsilon = 1e-12);
    }

    /// Envelope-center oracle: bisection on a centered finite difference of
    /// |w|^2 along the x axis. Independent of the constructor internals.
    fn envelope_center(spec: &BreatherSpec<f64>, t: f64, xlo: f64, xhi: f64) -> f64 {
        let wmag2 = |x: f64| {
            let psi = breather_psi(spec, SpacetimePoint::new(t, x, 0.0, 0.0)).unwrap();
            let rest = spec.rest_frame(SpacetimePoint::new(t, x, 0.0, 0.0)).unwrap();
            let w = psi * cis(rest.t) - c(1.0, 0.0);
            w.norm_sqr()
        };
        let h = 1e-4;
        let g = |x: f64| (wmag2(x + h) - wmag2(x - h)) / (2.0 * h);
        let (mut a, mut b) = (xlo, xhi);
        assert!(g(a) > 0.0 && g(b) < 0.0, "bracket does not straddle the peak");
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if g(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn boosted_center_drifts_at_group_velocity() {
        let v = 0.37;
        let spec = BreatherSpec::new(c(0.3, 0.0), 0, 0, [v, 0.0, 0.0], [0.0; 3]).unwrap();
        let t0 = 0.0;
        let t1 = 2.0 * PI; // one rest-clock period
        let x0 = envelope_center(&spec, t0, -0.9, 0.9);
        let x1 = envelope_center(&spec, t1, v * t1 - 0.9, v * t1 + 0.9);
        let drift = (x1 - x0) / (t1 - t0);
        // Matches the group-velocity oracle p/E = v.
        let pw = PlaneWaveSpec::from_velocity([v, 0.0, 0.0]).unwrap();
        assert_relative_eq!(drift, group_velocity(&pw)[0], epsilon = 1e-10);
    }

    proptest! {
        #[test]
        fn boost_preserves_the_interval(
            t in -5.0f64..5.0, x in -5.0f64..5.0, y in -5.0f64..5.0, z in -5.0f64..5.0,
            vx in -0.9f64..0.9, vy in -0.45f64..0.45, vz in -0.3f64..0.3,
        ) {
            prop_assume!(vx*vx + vy*vy + vz*vz < 0.98);
            let pt = SpacetimePoint::new(t, x, y, z);
            let b = lorentz_boost(pt, [vx, vy, vz]).unwrap();
            prop_assert!((b.interval() - pt.interval()).abs() <= 1e-10 * (1.0 + pt.interval().abs()));
        }

        #[test]
        fn boost_group_inverse(
            t in -5.0f64..5.0, x in -5.0f64..5.0, y in -5.0f64..5.0, z in -5.0f64..5.0,
            vx in -0.9f64..0.9, vy in -0.45f64..0.45, vz in -0.3f64..0.3,
        ) {
            prop_assume!(vx*vx + vy*vy + vz*vz < 0.98);
            let pt = SpacetimePoint::new(t, x, y, z);
            let v = [vx, vy, vz];
            let back = lorentz_boost(lorentz_boost(pt, v).unwrap(), [-vx, -vy, -vz]).unwrap();
            prop_assert!((back.t - pt.t).abs() <= 1e-12 * (1.0 + pt.t.abs()).max(10.0));
            prop_assert!((back.x - pt.x).abs() <= 1e-12 * (1.0 + pt.x.abs()).max(10.0));
            prop_assert!((back.y - pt.y).abs() <= 1e-12 * (1.0 + pt.y.abs()).max(10.0));
            prop_assert!((back.z - pt.z).abs() <= 1e-12 * (1.0 + pt.z.abs()).max(10.0));
        }
    }
}
