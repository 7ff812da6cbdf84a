//! Finite-difference residuals of the free and minimally coupled wave
//! operator and of the nonlinear action-form equation, plus convergence-order
//! fitting.
//!
//! Residuals are evaluated on interior points only: the box shrinks by the
//! stencil radius on every sampled axis, never falling back to one-sided
//! stencils, so the measured convergence order is that of the centered
//! stencil alone. Reductions are slab-ordered and deterministic across
//! worker counts.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Axis, ComplexField, Grid, SpacetimePoint};
use crate::potential::EMPotential;
use crate::scalar::{Cx, Real};
use crate::vec3;

/// Centered stencil choice: accuracy order 2 or 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StencilSpec {
    order: u32,
}

impl StencilSpec {
    pub fn new(order: u32) -> Result<Self> {
        if order != 2 && order != 4 {
            return Err(Error::rejected(format!(
                "stencil order must be 2 or 4, got {order}"
            )));
        }
        Ok(StencilSpec { order })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Interior cells excluded at each boundary.
    pub fn margin(&self) -> usize {
        (self.order / 2) as usize
    }
}

/// Residual norms over the interior sample set.
#[derive(Debug, Clone)]
pub struct ResidualReport<T> {
    /// Max |residual|.
    pub linf: T,
    /// RMS |residual|.
    pub l2: T,
    pub grid: Grid<T>,
    pub interior_margin: usize,
}

/// Value and centered first/second differences at one interior point,
/// indexed by sampled-axis position.
pub(crate) struct PointDerivs<T> {
    pub value: Cx<T>,
    pub d1: [Cx<T>; 4],
    pub d2: [Cx<T>; 4],
}

/// Sweep all interior points, evaluating `f(point, derivatives)` and
/// reducing |f| into max and RMS norms. Slabs along the first axis run in
/// parallel; per-slab partial sums are combined in fixed slab order, so the
/// result is independent of the worker count.
pub(crate) fn sweep_residual<T, F>(
    field: &ComplexField<T>,
    stencil: &StencilSpec,
    f: F,
) -> Result<ResidualReport<T>>
where
    T: Real,
    F: Fn(SpacetimePoint<T>, &PointDerivs<T>) -> Cx<T> + Sync,
{
    let grid = field.grid();
    let margin = stencil.margin();
    let order = stencil.order();
    for a in grid.axes() {
        if a.count < (order + 1) as usize {
            return Err(Error::rejected(format!(
                "axis {:?} has {} points; order-{order} stencil needs at least {}",
                a.axis,
                a.count,
                order + 1
            )));
        }
    }
    if let Some(bad) = field
        .values()
        .iter()
        .position(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        return Err(Error::NonFinite {
            location: format!("field sample {bad}"),
        });
    }

    let ndim = grid.ndim();
    let shape = grid.shape();
    let strides: Vec<usize> = grid.strides().to_vec();
    let spacings: Vec<T> = grid.axes().iter().map(|a| a.spacing).collect();
    let values = field.values();

    let first_lo = margin;
    let first_hi = shape[0] - margin;
    let slabs: Vec<(T, T, usize)> = (first_lo..first_hi)
        .into_par_iter()
        .map(|i0| {
            let mut linf = T::zero();
            let mut sumsq = T::zero();
            let mut count = 0usize;
            // Odometer over axes 1..ndim-1; innermost axis iterated directly.
            let mut idx = vec![margin; ndim];
            idx[0] = i0;
            loop {
                let base: usize = idx[..ndim.saturating_sub(1)]
                    .iter()
                    .zip(&strides[..ndim.saturating_sub(1)])
                    .map(|(&i, &s)| i * s)
                    .sum();
                let inner_stride = strides[ndim - 1];
                for j in margin..(shape[ndim - 1] - margin) {
                    let flat = base + j * inner_stride;
                    let mut d = PointDerivs {
                        value: values[flat],
                        d1: [Cx::new(T::zero(), T::zero()); 4],
                        d2: [Cx::new(T::zero(), T::zero()); 4],
                    };
                    for k in 0..ndim {
                        let s = strides[k];
                        let h = spacings[k];
                        let (d1, d2) = if order == 2 {
                            let fm = values[flat - s];
                            let fp = values[flat + s];
                            let f0 = d.value;
                            (
                                (fp - fm) / (h + h),
                                (fp - f0 - f0 + fm) / (h * h),
                            )
                        } else {
                            let fm2 = values[flat - 2 * s];
                            let fm1 = values[flat - s];
                            let f0 = d.value;
                            let fp1 = values[flat + s];
                            let fp2 = values[flat + 2 * s];
                            let twelve_h = T::of(12.0) * h;
                            let twelve_h2 = T::of(12.0) * h * h;
                            (
                                (fm2 - fm1 * T::of(8.0) + fp1 * T::of(8.0) - fp2) / twelve_h,
                                (-fm2 + fm1 * T::of(16.0) - f0 * T::of(30.0) + fp1 * T::of(16.0)
                                    - fp2)
                                    / twelve_h2,
                            )
                        };
                        d.d1[k] = d1;
                        d.d2[k] = d2;
                    }
                    let r = f(grid.point(flat), &d).norm();
                    if r > linf {
                        linf = r;
                    }
                    sumsq += r * r;
                    count += 1;
                }
                // advance odometer over axes 1..ndim-1
                let mut k = ndim.saturating_sub(1);
                let mut done = true;
                while k > 1 {
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < shape[k] - margin {
                        done = false;
                        break;
                    }
                    idx[k] = margin;
                }
                if done {
                    break;
                }
            }
            (linf, sumsq, count)
        })
        .collect();

    let mut linf = T::zero();
    let mut sumsq = T::zero();
    let mut count = 0usize;
    for (slab_linf, slab_sumsq, slab_count) in slabs {
        if slab_linf > linf {
            linf = slab_linf;
        }
        sumsq += slab_sumsq;
        count += slab_count;
    }
    if count == 0 {
        return Err(Error::rejected("no interior points after margin"));
    }
    Ok(ResidualReport {
        linf,
        l2: (sumsq / T::of_count(count)).sqrt(),
        grid: grid.clone(),
        interior_margin: margin,
    })
}

/// Discretized wave-operator residual of a sampled field (internal units):
/// free form `d2_t psi - lap psi + psi`; with potentials the minimally
/// coupled operator
/// `(d_t + i e U)^2 psi - (grad - i e A)^2 psi + psi` expanded as
/// `d2_t + i e U_t + 2 i e U d_t - e^2 U^2 - lap + i e div A + 2 i e A . grad + e^2 A^2 + 1`.
pub fn kg_residual<T: Real>(
    field: &ComplexField<T>,
    stencil: &StencilSpec,
    potentials: Option<&EMPotential<T>>,
) -> Result<ResidualReport<T>> {
    let grid = field.grid();
    let t_pos = grid
        .axis_position(Axis::T)
        .ok_or_else(|| Error::rejected("wave-operator residual needs a sampled t axis"))?;
    let spatial: Vec<usize> = grid.spatial_axis_positions();
    let spatial_axes: Vec<Axis> = spatial.iter().map(|&k| grid.axes()[k].axis).collect();
    let i = Cx::new(T::zero(), T::one());

    sweep_residual(field, stencil, move |pt, d| {
        let lap = spatial
            .iter()
            .fold(Cx::new(T::zero(), T::zero()), |acc, &k| acc + d.d2[k]);
        let mut r = d.d2[t_pos] - lap + d.value;
        if let Some(pot) = potentials {
            let e = pot.charge();
            let x = pt.space();
            let u = pot.u(x, pt.t);
            let a = pot.a(x, pt.t);
            let ut = pot.du_dt(x, pt.t);
            let diva = pot.div_a(x, pt.t);
            let mut a_grad = Cx::new(T::zero(), T::zero());
            for (kk, &k) in spatial.iter().enumerate() {
                let comp = match spatial_axes[kk] {
                    Axis::X => a[0],
                    Axis::Y => a[1],
                    Axis::Z => a[2],
                    Axis::T => unreachable!(),
                };
                a_grad = a_grad + d.d1[k] * comp;
            }
            r = r + i * d.value * (e * ut)
                + i * d.d1[t_pos] * (T::of(2.0) * e * u)
                - d.value * (e * e * u * u)
                + i * d.value * (e * diva)
                + i * a_grad * (T::of(2.0) * e)
                + d.value * (e * e * vec3::norm2(a));
        }
        r
    })
}

/// Residual of the nonlinear action-form equation (internal units, hbar = 1):
/// `(S_t + e U)^2 - (grad S - e A)^2 - 1 - i (S_tt - lap S)`.
///
/// The action must be branch-continuous on the grid; a neighbor step larger
/// than pi aborts with an insufficient-resolution error.
pub fn qhj_residual<T: Real>(
    action: &ComplexField<T>,
    stencil: &StencilSpec,
    potentials: Option<&EMPotential<T>>,
) -> Result<ResidualReport<T>> {
    let grid = action.grid();
    let t_pos = grid
        .axis_position(Axis::T)
        .ok_or_else(|| Error::rejected("action residual needs a sampled t axis"))?;

    // Branch-jump guard: |delta S| > pi between any pair of neighbors.
    let values = action.values();
    let shape = grid.shape();
    let strides = grid.strides();
    let pi = T::PI();
    for k in 0..grid.ndim() {
        let stride = strides[k];
        let count = shape[k];
        let jump = (0..values.len())
            .into_par_iter()
            .find_first(|&flat| {
                let idx = (flat / stride) % count;
                idx + 1 < count && (values[flat + stride] - values[flat]).norm() > pi
            });
        if let Some(flat) = jump {
            return Err(Error::InsufficientResolution(format!(
                "action jump > pi between samples {flat} and {} along {:?}",
                flat + stride,
                grid.axes()[k].axis
            )));
        }
    }

    let spatial: Vec<usize> = grid.spatial_axis_positions();
    let spatial_axes: Vec<Axis> = spatial.iter().map(|&k| grid.axes()[k].axis).collect();
    let i = Cx::new(T::zero(), T::one());
    let one = Cx::new(T::one(), T::zero());

    sweep_residual(action, stencil, move |pt, d| {
        let (e, u, a) = match potentials {
            Some(pot) => (
                pot.charge(),
                pot.u(pt.space(), pt.t),
                pot.a(pt.space(), pt.t),
            ),
            None => (T::zero(), T::zero(), vec3::zero()),
        };
        let st = d.d1[t_pos] + Cx::new(e * u, T::zero());
        let mut grad2 = Cx::new(T::zero(), T::zero());
        let mut lap = Cx::new(T::zero(), T::zero());
        for (kk, &k) in spatial.iter().enumerate() {
            let comp = match spatial_axes[kk] {
                Axis::X => a[0],
                Axis::Y => a[1],
                Axis::Z => a[2],
                Axis::T => unreachable!(),
            };
            let g = d.d1[k] - Cx::new(e * comp, T::zero());
            grad2 = grad2 + g * g;
            lap = lap + d.d2[k];
        }
        st * st - grad2 - one - i * (d.d2[t_pos] - lap)
    })
}

/// Least-squares slope of `ln(err)` against `ln(h)`: the measured
/// convergence order of a refinement sweep.
pub fn fit_order<T: Real>(hs: &[T], errs: &[T]) -> Result<T> {
    if hs.len() != errs.len() || hs.len() < 2 {
        return Err(Error::rejected(
            "order fit needs matching h/error lists with at least 2 levels",
        ));
    }
    if hs.iter().chain(errs).any(|&v| !(v > T::zero())) {
        return Err(Error::rejected("order fit needs positive h and errors"));
    }
    let n = T::of_count(hs.len());
    let lx: Vec<T> = hs.iter().map(|h| h.ln()).collect();
    let ly: Vec<T> = errs.iter().map(|e| e.ln()).collect();
    let mx = lx.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = ly.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mut num = T::zero();
    let mut den = T::zero();
    for (x, y) in lx.iter().zip(&ly) {
        num += (*x - mx) * (*y - my);
        den += (*x - mx) * (*x - mx);
    }
    Ok(num / den)
}
