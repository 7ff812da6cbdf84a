//! Minimal 3-vector helpers for momenta, velocities and potentials.

use crate::scalar::Real;

pub type Vec3<T> = [T; 3];

pub fn zero<T: Real>() -> Vec3<T> {
    [T::zero(); 3]
}

pub fn dot<T: Real>(a: Vec3<T>, b: Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm2<T: Real>(a: Vec3<T>) -> T {
    dot(a, a)
}

pub fn norm<T: Real>(a: Vec3<T>) -> T {
    norm2(a).sqrt()
}

pub fn add<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale<T: Real>(a: Vec3<T>, s: T) -> Vec3<T> {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn is_finite<T: Real>(a: Vec3<T>) -> bool {
    a.iter().all(|c| c.is_finite())
}
