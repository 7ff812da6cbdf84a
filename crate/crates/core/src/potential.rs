//! Slowly varying electromagnetic potentials supplied as callables.
//!
//! A potential declares its minimal spatio-temporal variation scale `L`
//! (internal Compton units); constructors reject `L < 50` so that asymptotic
//! tests stay inside their validity window. Derivatives of the callables are
//! taken by small centered differences.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::{self, Vec3};

/// Smallest admissible variation scale (Compton units).
pub const MIN_SCALE: f64 = 50.0;

type ScalarFn<T> = Arc<dyn Fn(Vec3<T>, T) -> T + Send + Sync>;
type VectorFn<T> = Arc<dyn Fn(Vec3<T>, T) -> Vec3<T> + Send + Sync>;

/// Scalar/vector potential pair `(U, A)` with coupling `e` and declared
/// variation scale.
#[derive(Clone)]
pub struct EMPotential<T: Real> {
    scalar: ScalarFn<T>,
    vector: VectorFn<T>,
    charge: T,
    scale: T,
    fd_step: T,
}

impl<T: Real> std::fmt::Debug for EMPotential<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EMPotential")
            .field("charge", &self.charge)
            .field("scale", &self.scale)
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

impl<T: Real> EMPotential<T> {
    pub fn new(
        scalar: impl Fn(Vec3<T>, T) -> T + Send + Sync + 'static,
        vector: impl Fn(Vec3<T>, T) -> Vec3<T> + Send + Sync + 'static,
        charge: T,
        scale: T,
    ) -> Result<Self> {
        if !(scale >= T::of(MIN_SCALE)) {
            return Err(Error::rejected(format!(
                "potential variation scale must be >= {MIN_SCALE} Compton units, got {scale}"
            )));
        }
        if !charge.is_finite() {
            return Err(Error::rejected("charge must be finite"));
        }
        let fd_step = if scale.is_finite() {
            (scale / T::of(1e4)).max(T::of(1e-6)).min(T::one())
        } else {
            T::of(1e-2)
        };
        Ok(EMPotential {
            scalar: Arc::new(scalar),
            vector: Arc::new(vector),
            charge,
            scale,
            fd_step,
        })
    }

    /// Field-free potential.
    pub fn free() -> Self {
        EMPotential::new(|_, _| T::zero(), |_, _| vec3::zero(), T::one(), T::infinity()).unwrap()
    }

    /// Constant scalar potential `U = u0`, `A = 0`.
    pub fn constant_scalar(u0: T, charge: T) -> Self {
        EMPotential::new(move |_, _| u0, |_, _| vec3::zero(), charge, T::infinity()).unwrap()
    }

    /// Uniform force field: `U = -g . x`, `A = 0`.
    pub fn linear_scalar(g: Vec3<T>, charge: T) -> Self {
        EMPotential::new(
            move |x, _| -vec3::dot(g, x),
            |_, _| vec3::zero(),
            charge,
            T::infinity(),
        )
        .unwrap()
    }

    /// Isotropic harmonic well `U = omega0^2 |x|^2 / 2`; scale `1/omega0`.
    pub fn harmonic(omega0: T, charge: T) -> Result<Self> {
        let scale = T::one() / omega0;
        EMPotential::new(
            move |x, _| vec3::norm2(x) * omega0 * omega0 / T::of(2.0),
            |_, _| vec3::zero(),
            charge,
            scale,
        )
    }

    /// Slowly varying one-dimensional wave `U = u0 cos(x/length + phase)`.
    pub fn cosine_x(u0: T, length: T, phase: T, charge: T) -> Result<Self> {
        EMPotential::new(
            move |x, _| u0 * (x[0] / length + phase).cos(),
            |_, _| vec3::zero(),
            charge,
            length,
        )
    }

    pub fn u(&self, x: Vec3<T>, t: T) -> T {
        (self.scalar)(x, t)
    }

    pub fn a(&self, x: Vec3<T>, t: T) -> Vec3<T> {
        (self.vector)(x, t)
    }

    pub fn charge(&self) -> T {
        self.charge
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn fd_step(&self) -> T {
        self.fd_step
    }

    /// Override the differentiation step (testing and stiff callables).
    pub fn with_fd_step(mut self, h: T) -> Self {
        self.fd_step = h;
        self
    }

    pub fn grad_u(&self, x: Vec3<T>, t: T) -> Vec3<T> {
        let h = self.fd_step;
        let mut g = vec3::zero();
        for i in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            g[i] = (self.u(xp, t) - self.u(xm, t)) / (h + h);
        }
        g
    }

    pub fn du_dt(&self, x: Vec3<T>, t: T) -> T {
        let h = self.fd_step;
        (self.u(x, t + h) - self.u(x, t - h)) / (h + h)
    }

    pub fn div_a(&self, x: Vec3<T>, t: T) -> T {
        let h = self.fd_step;
        let mut div = T::zero();
        for i in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            div += (self.a(xp, t)[i] - self.a(xm, t)[i]) / (h + h);
        }
        div
    }

    /// Jacobian `J[i][j] = d A_j / d x_i`.
    pub fn grad_a(&self, x: Vec3<T>, t: T) -> [[T; 3]; 3] {
        let h = self.fd_step;
        let mut j = [[T::zero(); 3]; 3];
        for i in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let ap = self.a(xp, t);
            let am = self.a(xm, t);
            for k in 0..3 {
                j[i][k] = (ap[k] - am[k]) / (h + h);
            }
        }
        j
    }

    /// Lorentz-gauge residual `dU/dt + div A` (c = 1).
    pub fn gauge_residual(&self, x: Vec3<T>, t: T) -> T {
        self.du_dt(x, t) + self.div_a(x, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn rejects_fast_variation() {
        assert!(EMPotential::<f64>::harmonic(0.1, 1.0).is_err()); // scale 10 < 50
        assert!(EMPotential::<f64>::harmonic(0.01, 1.0).is_ok()); // scale 100
        assert!(EMPotential::<f64>::cosine_x(0.1, 10.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn derivatives_of_polynomial_potentials_are_exact() {
        // Centered differences are exact on linear and quadratic callables.
        let lin = EMPotential::linear_scalar([0.3, -0.1, 0.0], 1.0);
        let g = lin.grad_u([1.0, 2.0, 3.0], 0.0);
        assert_relative_eq!(g[0], -0.3, epsilon = 1e-12);
        assert_relative_eq!(g[1], 0.1, epsilon = 1e-12);

        let har = EMPotential::harmonic(0.01, 1.0).unwrap();
        let g = har.grad_u([2.0, -1.0, 0.5], 0.0);
        assert_relative_eq!(g[0], 1e-4 * 2.0, max_relative = 1e-9);
        assert_relative_eq!(g[1], 1e-4 * -1.0, max_relative = 1e-9);
    }

    #[test]
    fn gauge_residual_vanishes_for_static_scalar_potentials() {
        // 1000 random sample points.
        let pot = EMPotential::cosine_x(0.2, 50.0, -1.2, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(123);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let x: [f64; 3] = [
                rng.gen_range(-100.0..100.0),
                rng.gen_range(-100.0..100.0),
                rng.gen_range(-100.0..100.0),
            ];
            let t = rng.gen_range(-50.0..50.0);
            worst = worst.max(pot.gauge_residual(x, t).abs());
        }
        assert!(worst <= 1e-8, "gauge residual {worst}");
    }

    #[test]
    fn gauge_residual_detects_violations() {
        // U growing linearly in t with A = 0 violates the gauge.
        let bad = EMPotential::new(|_, t| t, |_, _| vec3::zero(), 1.0, f64::INFINITY).unwrap();
        assert!(bad.gauge_residual([0.0; 3], 0.0).abs() > 0.5);
    }
}
