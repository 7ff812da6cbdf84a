//! Periodic breather trains, the momentum compatibility (Bohr–Sommerfeld)
//! condition, the two-wall fold, and the toroidal-duct mode.
//!
//! A train realizes periodic boundary conditions by an image sum of radial
//! profiles. The sum converges only conditionally (1/r tails), so every
//! train carries a truncation certificate: with `K` images per side the
//! periodicity defect of the bare sum is bounded by
//! `2 (1 + ln 2) / (sqrt3 K d)`. Image terms are reduced in a fixed pairwise
//! order, so results do not depend on the worker count.

use std::io::Write;

use crate::action::{action_from_psi, ActionValue};
use crate::analytic::{locked_wavenumber, PlaneWaveSpec};
use crate::error::{Error, Result};
use crate::grid::SpacetimePoint;
use crate::io;
use crate::scalar::{cis, Cx, Real};
use crate::special::spherical_bessel;

/// `d`-periodic train of breathers drifting at `v` along x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainSpec<T> {
    pub d: T,
    pub v: T,
    pub alpha: Cx<T>,
    /// Image breathers on each side of the fundamental one.
    pub images: usize,
}

pub const MAX_IMAGES: usize = 10_000;

impl<T: Real> TrainSpec<T> {
    /// `images = 0` is the degenerate single-breather case (no periodicity
    /// claim; the certificate is infinite).
    pub fn new(d: T, v: T, alpha: Cx<T>, images: usize) -> Result<Self> {
        if !(d.is_finite() && d > T::zero()) {
            return Err(Error::rejected(format!("train period must be > 0, got {d}")));
        }
        if !(v.abs() < T::one()) {
            return Err(Error::rejected("train drift speed must satisfy |v| < 1"));
        }
        if !(alpha.norm() < T::one()) {
            return Err(Error::rejected("train intensity |alpha| must be < 1"));
        }
        if images > MAX_IMAGES {
            return Err(Error::rejected(format!(
                "image count {images} exceeds supported {MAX_IMAGES}"
            )));
        }
        Ok(TrainSpec {
            d,
            v,
            alpha,
            images,
        })
    }

    /// Upper bound on the periodicity defect of the truncated image sum:
    /// `2 (1 + ln 2) / (sqrt3 K d)`.
    pub fn truncation_certificate(&self) -> T {
        if self.images == 0 {
            return T::infinity();
        }
        T::of(2.0) * (T::one() + T::of(2.0).ln())
            / (locked_wavenumber::<T>() * T::of_count(self.images) * self.d)
    }

    /// On-shell plane wave drifting with this train.
    pub fn plane_wave(&self) -> Result<PlaneWaveSpec<T>> {
        PlaneWaveSpec::from_velocity([self.v, T::zero(), T::zero()])
    }
}

/// Fixed-order pairwise reduction (deterministic, accurate).
fn pairwise_sum<T: Real>(terms: &mut [T]) -> T {
    let mut n = terms.len();
    if n == 0 {
        return T::zero();
    }
    while n > 1 {
        let half = n / 2;
        for i in 0..half {
            terms[i] = terms[2 * i] + terms[2 * i + 1];
        }
        if n % 2 == 1 {
            terms[half] = terms[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    terms[0]
}

/// Image sum of radial profiles: `sum_k j0(sqrt3 r_k)` with
/// `r_k = sqrt(((x - v t - k d)/sqrt(1 - v^2))^2 + y^2 + z^2)`.
///
/// The image offsets carry the dilated period `d/sqrt(1-v^2)` in the
/// comoving frame, which restores the lab-frame spatial period `d` after
/// contraction.
pub fn train_sum<T: Real>(spec: &TrainSpec<T>, pt: SpacetimePoint<T>) -> T {
    let k3 = locked_wavenumber::<T>();
    let inv_contract = T::one() / (T::one() - spec.v * spec.v).sqrt();
    let perp2 = pt.y * pt.y + pt.z * pt.z;
    let kk = spec.images as i64;
    let mut terms: Vec<T> = (-kk..=kk)
        .map(|k| {
            let along = (pt.x - spec.v * pt.t - T::of(k as f64) * spec.d) * inv_contract;
            let r = (along * along + perp2).sqrt();
            spherical_bessel(0, k3 * r).expect("order 0 in range")
        })
        .collect();
    pairwise_sum(&mut terms)
}

/// Log-form action of the train over its drifting plane wave:
/// `S = -E t + p x - i ln(1 + alpha e^{i(-E t + p x)} T)`.
pub fn train_action<T: Real>(
    spec: &TrainSpec<T>,
    pt: SpacetimePoint<T>,
    wave: &PlaneWaveSpec<T>,
) -> Result<ActionValue<T>> {
    let p = wave.momentum();
    if p[1] != T::zero() || p[2] != T::zero() {
        return Err(Error::rejected("train momentum must be along x"));
    }
    let v = p[0] / wave.energy();
    if (v - spec.v).abs() > T::of(1e-12) * v.abs().max(T::one()) {
        return Err(Error::rejected(format!(
            "plane-wave velocity {} does not match train drift {}",
            v.as_f64(),
            spec.v.as_f64()
        )));
    }
    let phase = -wave.energy() * pt.t + p[0] * pt.x;
    let z = cis(phase);
    let arg = Cx::new(T::one(), T::zero()) + spec.alpha * z * train_sum(spec, pt);
    if arg.norm_sqr() == T::zero() {
        return Err(Error::Singular {
            location: format!("train action at x = {}", pt.x.as_f64()),
        });
    }
    let value = Cx::new(phase, T::zero()) - Cx::new(T::zero(), T::one()) * arg.ln();
    Ok(ActionValue::new(value, 0))
}

/// Momenta compatible with spatial period `d`: `p_n = 2 pi n / d`.
pub fn quantized_momenta<T: Real>(d: T, n_max: u32) -> Result<Vec<T>> {
    if !(d > T::zero()) {
        return Err(Error::rejected("period must be > 0"));
    }
    let two_pi = T::PI() + T::PI();
    Ok((0..=n_max).map(|n| two_pi * T::of(n as f64) / d).collect())
}

/// Measured periodicity defect `sup_x |S(x + d) - S(x) - p d|` with the
/// action branch-tracked along each x path.
pub fn periodicity_defect<T: Real>(
    spec: &TrainSpec<T>,
    wave: &PlaneWaveSpec<T>,
    samples: &[SpacetimePoint<T>],
    path_steps: usize,
) -> Result<T> {
    if samples.is_empty() {
        return Err(Error::rejected("defect needs at least one sample point"));
    }
    let p = wave.momentum()[0];
    let mut worst = T::zero();
    for &start in samples {
        let sums: Vec<T> = (0..=path_steps)
            .map(|j| {
                let mut pt = start;
                pt.x = start.x + spec.d * T::of_count(j) / T::of_count(path_steps);
                train_sum(spec, pt)
            })
            .collect();
        let defect = defect_from_sums(spec, &sums, start, spec.d, wave.energy(), p)?;
        if defect > worst {
            worst = defect;
        }
    }
    Ok(worst)
}

/// Defect of one path given precomputed train sums along it.
fn defect_from_sums<T: Real>(
    spec: &TrainSpec<T>,
    sums: &[T],
    start: SpacetimePoint<T>,
    d: T,
    energy: T,
    p: T,
) -> Result<T> {
    let steps = sums.len() - 1;
    let psi: Vec<Cx<T>> = sums
        .iter()
        .enumerate()
        .map(|(j, &tr)| {
            let x = start.x + d * T::of_count(j) / T::of_count(steps);
            let z = cis(-energy * start.t + p * x);
            z * (Cx::new(T::one(), T::zero()) + spec.alpha * z * tr)
        })
        .collect();
    let s = action_from_psi(&psi)?;
    let delta = s[steps].value - s[0].value;
    Ok((delta - Cx::new(p * d, T::zero())).norm())
}

/// One row of a momentum scan.
#[derive(Debug, Clone, Copy)]
pub struct ScanRow<T> {
    pub p: T,
    pub defect: T,
    pub certificate: T,
    pub is_quantized: bool,
}

/// Scan the periodicity defect over `p` in `[0, n_max * 2 pi / d]` with
/// `steps_per_interval` points per quantum, reusing the image sums across
/// momenta.
pub fn defect_scan<T: Real>(
    spec: &TrainSpec<T>,
    n_max: u32,
    steps_per_interval: usize,
    samples: &[SpacetimePoint<T>],
    path_steps: usize,
) -> Result<Vec<ScanRow<T>>> {
    if spec.v != T::zero() {
        return Err(Error::rejected(
            "momentum scan varies p independently; use a standing train",
        ));
    }
    let two_pi = T::PI() + T::PI();
    let cert = spec.truncation_certificate();
    // Precompute image sums along each sample path once.
    let paths: Vec<(SpacetimePoint<T>, Vec<T>)> = samples
        .iter()
        .map(|&start| {
            let sums: Vec<T> = (0..=path_steps)
                .map(|j| {
                    let mut pt = start;
                    pt.x = start.x + spec.d * T::of_count(j) / T::of_count(path_steps);
                    train_sum(spec, pt)
                })
                .collect();
            (start, sums)
        })
        .collect();

    let total = n_max as usize * steps_per_interval;
    let mut rows = Vec::with_capacity(total + 1);
    for j in 0..=total {
        let p = two_pi * T::of_count(j) / (T::of_count(steps_per_interval) * spec.d);
        let energy = (p * p + T::one()).sqrt();
        let mut defect = T::zero();
        for (start, sums) in &paths {
            let d = defect_from_sums(spec, sums, *start, spec.d, energy, p)?;
            if d > defect {
                defect = d;
            }
        }
        let frac = p * spec.d / two_pi;
        let is_quantized = (frac - frac.round()).abs() < T::of(1e-9);
        rows.push(ScanRow {
            p,
            defect,
            certificate: cert,
            is_quantized,
        });
    }
    Ok(rows)
}

/// Scan rows as CSV: `p, defect, certificate, is_quantized`.
pub fn write_scan_csv<T: Real, W: Write>(w: &mut W, rows: &[ScanRow<T>]) -> Result<()> {
    io::csv_header(w, &["p", "defect", "certificate", "is_quantized"])?;
    for r in rows {
        io::csv_line(
            w,
            &[
                io::fmt_full(r.p.as_f64()),
                io::fmt_full(r.defect.as_f64()),
                io::fmt_full(r.certificate.as_f64()),
                (r.is_quantized as u8).to_string(),
            ],
        )?;
    }
    Ok(())
}

/// Sheet of the double cover used to fold two reflecting walls onto a
/// periodic interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    Plus,
    Minus,
}

/// Map a folded coordinate `x` in `[0, d/2]` with its sheet onto the
/// periodic cover `[0, d)`: the plus sheet is the identity, the minus sheet
/// is the reflection `d - x` (with `d` wrapped to 0).
pub fn fold_two_wall<T: Real>(x: T, sheet: Sheet, d: T) -> Result<T> {
    if !(d > T::zero()) {
        return Err(Error::rejected("wall separation must be > 0"));
    }
    let half = d / T::of(2.0);
    if !(x >= T::zero() && x <= half) {
        return Err(Error::rejected(format!(
            "folded coordinate must lie in [0, d/2], got {x}"
        )));
    }
    Ok(match sheet {
        Sheet::Plus => x,
        Sheet::Minus => {
            let y = d - x;
            if y == d {
                T::zero()
            } else {
                y
            }
        }
    })
}

/// Inverse of [`fold_two_wall`] for any cover coordinate: reduce mod `d`
/// and fold into `[0, d/2]` with the sheet that owns it.
pub fn unfold_position<T: Real>(y: T, d: T) -> Result<(T, Sheet)> {
    if !(d > T::zero()) {
        return Err(Error::rejected("wall separation must be > 0"));
    }
    let mut r = y % d;
    if r < T::zero() {
        r += d;
    }
    let half = d / T::of(2.0);
    if r <= half {
        Ok((r, Sheet::Plus))
    } else {
        Ok((d - r, Sheet::Minus))
    }
}

/// Breather circulating in a thin toroidal duct.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusSpec<T> {
    pub radius: T,
    pub duct: T,
    pub mode: u32,
    pub alpha: Cx<T>,
}

impl<T: Real> TorusSpec<T> {
    /// Orderings: duct width >= 10 Compton units, centerline radius >= 10
    /// duct widths, azimuthal speed `n / R <= 0.1`.
    pub fn new(radius: T, duct: T, mode: u32, alpha: Cx<T>) -> Result<Self> {
        if !(duct >= T::of(10.0)) {
            return Err(Error::rejected(format!(
                "duct width must be >= 10 Compton units, got {duct}"
            )));
        }
        if !(radius >= T::of(10.0) * duct) {
            return Err(Error::rejected(format!(
                "centerline radius must be >= 10 duct widths, got {radius}"
            )));
        }
        if mode == 0 {
            return Err(Error::rejected("mode index must be >= 1"));
        }
        let v = T::of(mode as f64) / radius;
        if !(v <= T::of(0.1)) {
            return Err(Error::rejected(format!(
                "azimuthal speed n/R = {} exceeds the nonrelativistic window 0.1",
                v.as_f64()
            )));
        }
        if !(alpha.norm() < T::one()) {
            return Err(Error::rejected("torus intensity |alpha| must be < 1"));
        }
        Ok(TorusSpec {
            radius,
            duct,
            mode,
            alpha,
        })
    }

    /// Azimuthal momentum `p_phi = n / R`.
    pub fn p_phi(&self) -> T {
        T::of(self.mode as f64) / self.radius
    }

    /// Azimuthal speed `v_phi = p_phi` (unit mass, nonrelativistic).
    pub fn v_phi(&self) -> T {
        self.p_phi()
    }

    /// `E = 1 + v_phi^2 / 2`.
    pub fn energy(&self) -> T {
        T::one() + self.v_phi() * self.v_phi() / T::of(2.0)
    }
}

/// Duct-mode action at cylindrical `(rho, phi, z)` and time `t`; `phi` is the
/// unwrapped azimuth of the inner solution:
/// `S = -E t + p_phi R phi - i ln(1 + alpha e^{i(-E t + p_phi R phi)} j0(sqrt3 r))`
/// with `r^2 = (R phi - v_phi t)^2 + (rho - R)^2 + z^2`.
pub fn torus_action<T: Real>(
    spec: &TorusSpec<T>,
    rho: T,
    phi: T,
    z: T,
    t: T,
) -> Result<ActionValue<T>> {
    if (rho - spec.radius).abs() > spec.duct || z.abs() > spec.duct {
        return Err(Error::rejected(
            "evaluation point outside the duct neighborhood",
        ));
    }
    let along = spec.radius * phi - spec.v_phi() * t;
    let r = (along * along + (rho - spec.radius) * (rho - spec.radius) + z * z).sqrt();
    let phase = -spec.energy() * t + spec.p_phi() * spec.radius * phi;
    let w = spec.alpha * cis(phase) * spherical_bessel(0, locked_wavenumber::<T>() * r)?;
    let arg = Cx::new(T::one(), T::zero()) + w;
    if arg.norm_sqr() == T::zero() {
        return Err(Error::Singular {
            location: format!("torus action at phi = {}", phi.as_f64()),
        });
    }
    let value = Cx::new(phase, T::zero()) - Cx::new(T::zero(), T::one()) * arg.ln();
    Ok(ActionValue::new(value, 0))
}

/// Closed-loop action increase around the centerline, branch-tracked from
/// the wave-function samples. The loop seam is placed diametrically opposite
/// the breather core, where the single-valued log term cancels exactly; the
/// multivalued part contributes `2 pi n`.
pub fn torus_winding<T: Real>(spec: &TorusSpec<T>, t: T, loop_samples: usize) -> Result<Cx<T>> {
    let m = loop_samples.max(64 * spec.mode as usize);
    let phi_c = spec.v_phi() * t / spec.radius;
    let psi: Vec<Cx<T>> = (0..=m)
        .map(|j| {
            let phi = phi_c - T::PI() + (T::PI() + T::PI()) * T::of_count(j) / T::of_count(m);
            let s = torus_action(spec, spec.radius, phi, T::zero(), t)
                .expect("centerline is inside the duct");
            s.psi()
        })
        .collect();
    let tracked = action_from_psi(&psi)?;
    Ok(tracked[m].value - tracked[0].value)
}

/// Envelope center along the centerline: the azimuthal arclength `R phi`
/// where the breather factor peaks, found by bisecting the sign change of a
/// centered difference of the envelope magnitude.
pub fn torus_envelope_center<T: Real>(spec: &TorusSpec<T>, t: T) -> Result<T> {
    let target = spec.v_phi() * t;
    let mag2 = |arc: T| -> T {
        let along = arc - spec.v_phi() * t;
        let j = spherical_bessel(0, locked_wavenumber::<T>() * along).unwrap();
        j * j
    };
    let h = T::of(1e-4);
    let g = |arc: T| (mag2(arc + h) - mag2(arc - h)) / (h + h);
    let mut lo = target - T::one();
    let mut hi = target + T::one();
    if !(g(lo) > T::zero() && g(hi) < T::zero()) {
        return Err(Error::rejected("envelope bracket does not straddle a peak"));
    }
    for _ in 0..200 {
        let mid = (lo + hi) / T::of(2.0);
        if g(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / T::of(2.0))
}
