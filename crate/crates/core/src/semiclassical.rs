//! Slowly varying fields: classical trajectories and actions, the
//! first-order semiclassical correction transported along characteristics,
//! and the uniform asymptotic breather action in the nonrelativistic window.
//!
//! The construction is trajectory-centric: characteristics are integrated
//! with fixed-step RK4, the correction is accumulated along them, and grids
//! enter only for residual verification.

use std::io::Write;

use crate::action::ActionValue;
use crate::analytic::{breather_action, locked_wavenumber, BreatherSpec};
use crate::error::{Error, Result};
use crate::grid::{Axis, ComplexField, Grid, SampledAxis, SpacetimePoint};
use crate::io;
use crate::potential::EMPotential;
use crate::residual::{sweep_residual, ResidualReport, StencilSpec};
use crate::scalar::{cis, Cx, Real};
use crate::special::spherical_bessel;
use crate::vec3::{self, Vec3};

/// Nonrelativistic momentum window for the trajectory form.
pub const MAX_MOMENTUM: f64 = 0.1;

/// One classical characteristic: times, positions, canonical momenta and the
/// action accumulated along the path.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    times: Vec<T>,
    positions: Vec<Vec3<T>>,
    momenta: Vec<Vec3<T>>,
    action: Vec<Cx<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn positions(&self) -> &[Vec3<T>] {
        &self.positions
    }

    pub fn momenta(&self) -> &[Vec3<T>] {
        &self.momenta
    }

    pub fn action(&self) -> &[Cx<T>] {
        &self.action
    }

    /// Add a complex offset to the recorded action (e.g. a transported
    /// correction computed elsewhere).
    pub fn with_action_offset(mut self, offset: &[Cx<T>]) -> Result<Self> {
        if offset.len() != self.action.len() {
            return Err(Error::rejected("offset length mismatch"));
        }
        for (a, o) in self.action.iter_mut().zip(offset) {
            *a += *o;
        }
        Ok(self)
    }

    /// Linear interpolation of `(position, momentum, action)` at `t`.
    pub fn sample(&self, t: T) -> Result<(Vec3<T>, Vec3<T>, Cx<T>)> {
        let n = self.times.len();
        if n == 0 || t < self.times[0] || t > self.times[n - 1] {
            return Err(Error::rejected(format!(
                "time {} outside trajectory range",
                t.as_f64()
            )));
        }
        let mut hi = match self
            .times
            .binary_search_by(|probe| probe.partial_cmp(&t).unwrap())
        {
            Ok(i) => return Ok((self.positions[i], self.momenta[i], self.action[i])),
            Err(i) => i,
        };
        if hi == 0 {
            hi = 1;
        }
        let lo = hi - 1;
        let w = (t - self.times[lo]) / (self.times[hi] - self.times[lo]);
        let lerp3 = |a: Vec3<T>, b: Vec3<T>| {
            [
                a[0] + (b[0] - a[0]) * w,
                a[1] + (b[1] - a[1]) * w,
                a[2] + (b[2] - a[2]) * w,
            ]
        };
        let s = self.action[lo] + (self.action[hi] - self.action[lo]) * w;
        Ok((
            lerp3(self.positions[lo], self.positions[hi]),
            lerp3(self.momenta[lo], self.momenta[hi]),
            s,
        ))
    }

    /// Dump as CSV: `t, x, y, z, px, py, pz, re_s, im_s`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        io::csv_header(w, &["t", "x", "y", "z", "px", "py", "pz", "re_s", "im_s"])?;
        for i in 0..self.times.len() {
            io::csv_line(
                w,
                &[
                    io::fmt_full(self.times[i].as_f64()),
                    io::fmt_full(self.positions[i][0].as_f64()),
                    io::fmt_full(self.positions[i][1].as_f64()),
                    io::fmt_full(self.positions[i][2].as_f64()),
                    io::fmt_full(self.momenta[i][0].as_f64()),
                    io::fmt_full(self.momenta[i][1].as_f64()),
                    io::fmt_full(self.momenta[i][2].as_f64()),
                    io::fmt_full(self.action[i].re.as_f64()),
                    io::fmt_full(self.action[i].im.as_f64()),
                ],
            )?;
        }
        Ok(())
    }
}

/// Fixed-step RK4 integration of the canonical equations
/// `dx/dt = p - e A`, `dp_i/dt = -e dU/dx_i + e (dA_j/dx_i) dx_j/dt`,
/// accumulating the action by quadrature of the Lagrangian
/// `p . xdot - H` along the path (initial action `p0 . x0`).
pub fn integrate_trajectory<T: Real>(
    pot: &EMPotential<T>,
    x0: Vec3<T>,
    p0: Vec3<T>,
    t_span: (T, T),
    dt: T,
) -> Result<Trajectory<T>> {
    let (t0, t1) = t_span;
    if !(t1 > t0) || !(dt > T::zero()) {
        return Err(Error::rejected("need t1 > t0 and dt > 0"));
    }
    if pot.scale().is_finite() && dt > pot.scale() / T::of(100.0) {
        return Err(Error::rejected(format!(
            "dt = {} does not resolve the potential scale {} (need dt <= scale/100)",
            dt.as_f64(),
            pot.scale().as_f64()
        )));
    }
    if vec3::norm(p0) > T::of(MAX_MOMENTUM) {
        return Err(Error::rejected(format!(
            "|p0| = {} outside the nonrelativistic window {MAX_MOMENTUM}",
            vec3::norm(p0).as_f64()
        )));
    }
    let steps = ((t1 - t0) / dt).ceil().as_f64() as usize;
    let steps = steps.max(1);
    let h = (t1 - t0) / T::of_count(steps);

    let e = pot.charge();
    let deriv = |x: Vec3<T>, p: Vec3<T>, t: T| -> Result<(Vec3<T>, Vec3<T>, Cx<T>)> {
        let u = pot.u(x, t);
        let a = pot.a(x, t);
        let gu = pot.grad_u(x, t);
        let ga = pot.grad_a(x, t);
        if !u.is_finite() || !vec3::is_finite(a) || !vec3::is_finite(gu) {
            return Err(Error::rejected(format!(
                "non-finite potential at t = {}",
                t.as_f64()
            )));
        }
        let vel = vec3::sub(p, vec3::scale(a, e));
        let mut dp = vec3::scale(gu, -e);
        for i in 0..3 {
            for j in 0..3 {
                dp[i] += e * ga[i][j] * vel[j];
            }
        }
        let lagrangian = vec3::dot(p, vel) - (vec3::norm2(vel) / T::of(2.0) + e * u);
        Ok((vel, dp, Cx::new(lagrangian, T::zero())))
    };

    let mut x = x0;
    let mut p = p0;
    let mut s = Cx::new(vec3::dot(p0, x0), T::zero());
    let mut times = Vec::with_capacity(steps + 1);
    let mut positions = Vec::with_capacity(steps + 1);
    let mut momenta = Vec::with_capacity(steps + 1);
    let mut action = Vec::with_capacity(steps + 1);
    times.push(t0);
    positions.push(x);
    momenta.push(p);
    action.push(s);

    let half = h / T::of(2.0);
    let sixth = h / T::of(6.0);
    for n in 0..steps {
        let t = t0 + h * T::of_count(n);
        let (k1x, k1p, k1s) = deriv(x, p, t)?;
        let (k2x, k2p, k2s) = deriv(
            vec3::add(x, vec3::scale(k1x, half)),
            vec3::add(p, vec3::scale(k1p, half)),
            t + half,
        )?;
        let (k3x, k3p, k3s) = deriv(
            vec3::add(x, vec3::scale(k2x, half)),
            vec3::add(p, vec3::scale(k2p, half)),
            t + half,
        )?;
        let (k4x, k4p, k4s) = deriv(
            vec3::add(x, vec3::scale(k3x, h)),
            vec3::add(p, vec3::scale(k3p, h)),
            t + h,
        )?;
        let two = T::of(2.0);
        for i in 0..3 {
            x[i] += sixth * (k1x[i] + two * k2x[i] + two * k3x[i] + k4x[i]);
            p[i] += sixth * (k1p[i] + two * k2p[i] + two * k3p[i] + k4p[i]);
        }
        s += (k1s + (k2s + k3s) * two + k4s) * sixth;
        times.push(t0 + h * T::of_count(n + 1));
        positions.push(x);
        momenta.push(p);
        action.push(s);
    }
    Ok(Trajectory {
        times,
        positions,
        momenta,
        action,
    })
}

/// Residual of the classical action equation
/// `S_t + (grad S - e A)^2 / 2 + e U` on a sampled grid.
pub fn classical_action_residual<T: Real>(
    s_c: &ComplexField<T>,
    pot: &EMPotential<T>,
    stencil: &StencilSpec,
) -> Result<ResidualReport<T>> {
    let grid = s_c.grid();
    let t_pos = grid
        .axis_position(Axis::T)
        .ok_or_else(|| Error::rejected("classical residual needs a sampled t axis"))?;
    let spatial: Vec<usize> = grid.spatial_axis_positions();
    let spatial_axes: Vec<Axis> = spatial.iter().map(|&k| grid.axes()[k].axis).collect();
    let e = pot.charge();
    sweep_residual(s_c, stencil, move |pt, d| {
        let u = pot.u(pt.space(), pt.t);
        let a = pot.a(pt.space(), pt.t);
        let mut grad2 = Cx::new(T::zero(), T::zero());
        for (kk, &k) in spatial.iter().enumerate() {
            let comp = match spatial_axes[kk] {
                Axis::X => a[0],
                Axis::Y => a[1],
                Axis::Z => a[2],
                Axis::T => unreachable!(),
            };
            let g = d.d1[k] - Cx::new(e * comp, T::zero());
            grad2 = grad2 + g * g;
        }
        d.d1[t_pos] + grad2 / T::of(2.0) + Cx::new(e * u, T::zero())
    })
}

/// First-order semiclassical correction on a `(t, x)` grid.
///
/// Writes `S_sc = S_c + sigma` and transports `sigma` along the
/// characteristics of the classical equation:
/// `d sigma / dt = -i lap S_c` evaluated on the trajectory
/// (`dx/dt = grad S_c - e A`). Characteristics are launched from every
/// usable x node of the first time level and integrated with RK4 substeps;
/// `sigma` is interpolated back onto grid nodes. The returned field lives on
/// the x subrange covered by the characteristic fan at all time levels.
///
/// Crossing characteristics (detected by an ordering flip of the fan) abort
/// with a caustic error naming the time.
pub fn semiclassical_correction<T: Real>(
    s_c: &ComplexField<T>,
    pot: &EMPotential<T>,
    stencil: &StencilSpec,
    substeps: usize,
) -> Result<ComplexField<T>> {
    let grid = s_c.grid();
    let axes = grid.axes();
    if axes.len() != 2 || axes[0].axis != Axis::T || axes[1].axis != Axis::X {
        return Err(Error::rejected(
            "characteristic transport expects a (t, x) grid with t slowest",
        ));
    }
    let substeps = substeps.max(1);
    let nt = axes[0].count;
    let nx = axes[1].count;
    let margin = stencil.margin();
    if nx < 2 * margin + 3 || nt < 2 {
        return Err(Error::rejected("grid too small for transport"));
    }
    let ht = axes[0].spacing;
    let hx = axes[1].spacing;
    let x_of = |j: usize| grid.coord(1, j);
    let values = s_c.values();
    let order = stencil.order();

    // Derivative tables per time level over the differentiable x range.
    let j_lo = margin;
    let j_hi = nx - margin; // exclusive
    let mut d1 = vec![vec![Cx::new(T::zero(), T::zero()); nx]; nt];
    let mut d2 = vec![vec![Cx::new(T::zero(), T::zero()); nx]; nt];
    for i in 0..nt {
        let row = i * nx;
        for j in j_lo..j_hi {
            let f = |k: usize| values[row + k];
            let (g1, g2) = if order == 2 {
                (
                    (f(j + 1) - f(j - 1)) / (hx + hx),
                    (f(j + 1) - f(j) - f(j) + f(j - 1)) / (hx * hx),
                )
            } else {
                let twelve_h = T::of(12.0) * hx;
                let twelve_h2 = T::of(12.0) * hx * hx;
                (
                    (f(j - 2) - f(j - 1) * T::of(8.0) + f(j + 1) * T::of(8.0) - f(j + 2))
                        / twelve_h,
                    (-f(j - 2) + f(j - 1) * T::of(16.0) - f(j) * T::of(30.0)
                        + f(j + 1) * T::of(16.0)
                        - f(j + 2))
                        / twelve_h2,
                )
            };
            d1[i][j] = g1;
            d2[i][j] = g2;
        }
    }

    let x_min = x_of(j_lo);
    let x_max = x_of(j_hi - 1);
    // Linear-in-x, linear-in-t interpolation of a derivative table.
    let interp = |table: &Vec<Vec<Cx<T>>>, x: T, tau: T| -> Option<Cx<T>> {
        if x < x_min || x > x_max {
            return None;
        }
        let fj = ((x - x_min) / hx).as_f64().floor() as usize + j_lo;
        let fj = fj.min(j_hi - 2).max(j_lo);
        let wx = (x - x_of(fj)) / hx;
        let ti = (tau / ht).as_f64().floor() as usize;
        let ti = ti.min(nt - 2);
        let wt = (tau - ht * T::of_count(ti)) / ht;
        let at = |i: usize| table[i][fj] + (table[i][fj + 1] - table[i][fj]) * wx;
        Some(at(ti) + (at(ti + 1) - at(ti)) * wt)
    };

    let e = pot.charge();
    let t_base = grid.base().t;
    let minus_i = Cx::new(T::zero(), -T::one());

    // Characteristic fan from the usable x nodes of level 0.
    let launch: Vec<usize> = (j_lo..j_hi).collect();
    let mut xs: Vec<T> = launch.iter().map(|&j| x_of(j)).collect();
    let mut sig: Vec<Cx<T>> = vec![Cx::new(T::zero(), T::zero()); xs.len()];
    let mut alive: Vec<bool> = vec![true; xs.len()];

    // sigma on nodes per level, and the covered j range.
    let mut sigma_grid = vec![vec![Cx::new(T::zero(), T::zero()); nx]; nt];
    let mut cov_lo = j_lo;
    let mut cov_hi = j_hi; // exclusive

    let record_level = |level: usize,
                        xs: &[T],
                        sig: &[Cx<T>],
                        alive: &[bool],
                        sigma_grid: &mut Vec<Vec<Cx<T>>>,
                        cov_lo: &mut usize,
                        cov_hi: &mut usize|
     -> Result<()> {
        let live: Vec<usize> = (0..xs.len()).filter(|&k| alive[k]).collect();
        if live.len() < 2 {
            return Err(Error::rejected(
                "characteristic fan collapsed; enlarge the grid",
            ));
        }
        for w in live.windows(2) {
            if xs[w[1]] <= xs[w[0]] {
                return Err(Error::Caustic {
                    time: (t_base + ht * T::of_count(level)).as_f64(),
                });
            }
        }
        let lo_pos = xs[live[0]];
        let hi_pos = xs[*live.last().unwrap()];
        let mut level_lo = None;
        let mut level_hi = None;
        for j in j_lo..j_hi {
            let x = x_of(j);
            if x < lo_pos || x > hi_pos {
                continue;
            }
            if level_lo.is_none() {
                level_lo = Some(j);
            }
            level_hi = Some(j);
            // Binary search of the bracketing pair in the live fan.
            let mut a = 0usize;
            let mut b = live.len() - 1;
            while b - a > 1 {
                let m = (a + b) / 2;
                if xs[live[m]] <= x {
                    a = m;
                } else {
                    b = m;
                }
            }
            let (ka, kb) = (live[a], live[b]);
            let w = (x - xs[ka]) / (xs[kb] - xs[ka]);
            sigma_grid[level][j] = sig[ka] + (sig[kb] - sig[ka]) * w;
        }
        match (level_lo, level_hi) {
            (Some(lo), Some(hi)) => {
                *cov_lo = (*cov_lo).max(lo);
                *cov_hi = (*cov_hi).min(hi + 1);
                Ok(())
            }
            _ => Err(Error::rejected("characteristic fan covers no node")),
        }
    };

    record_level(0, &xs, &sig, &alive, &mut sigma_grid, &mut cov_lo, &mut cov_hi)?;

    let h_sub = ht / T::of_count(substeps);
    for level in 0..nt - 1 {
        for sub in 0..substeps {
            let tau0 = ht * T::of_count(level) + h_sub * T::of_count(sub);
            for k in 0..xs.len() {
                if !alive[k] {
                    continue;
                }
                // RK4 on (x, sigma) with field-interpolated drift and source.
                let drift = |x: T, tau: T| -> Option<(T, Cx<T>)> {
                    let g = interp(&d1, x, tau)?;
                    let lap = interp(&d2, x, tau)?;
                    let t_abs = t_base + tau;
                    let vel = g.re - e * pot.a([x, T::zero(), T::zero()], t_abs)[0];
                    Some((vel, minus_i * lap))
                };
                let x0 = xs[k];
                let step = (|| -> Option<(T, Cx<T>)> {
                    let half = h_sub / T::of(2.0);
                    let (k1x, k1s) = drift(x0, tau0)?;
                    let (k2x, k2s) = drift(x0 + half * k1x, tau0 + half)?;
                    let (k3x, k3s) = drift(x0 + half * k2x, tau0 + half)?;
                    let (k4x, k4s) = drift(x0 + h_sub * k3x, tau0 + h_sub)?;
                    let two = T::of(2.0);
                    let sixth = h_sub / T::of(6.0);
                    Some((
                        x0 + sixth * (k1x + two * k2x + two * k3x + k4x),
                        sig[k] + (k1s + (k2s + k3s) * two + k4s) * sixth,
                    ))
                })();
                match step {
                    Some((x_new, s_new)) => {
                        xs[k] = x_new;
                        sig[k] = s_new;
                    }
                    None => alive[k] = false,
                }
            }
        }
        record_level(
            level + 1,
            &xs,
            &sig,
            &alive,
            &mut sigma_grid,
            &mut cov_lo,
            &mut cov_hi,
        )?;
    }

    if cov_hi <= cov_lo + 1 {
        return Err(Error::rejected("no x nodes remain covered at all levels"));
    }
    let mut base = grid.base();
    base.set(Axis::X, x_of(cov_lo));
    let out_grid = Grid::new(
        base,
        vec![
            SampledAxis {
                axis: Axis::T,
                count: nt,
                spacing: ht,
            },
            SampledAxis {
                axis: Axis::X,
                count: cov_hi - cov_lo,
                spacing: hx,
            },
        ],
    )?;
    let mut out = Vec::with_capacity(nt * (cov_hi - cov_lo));
    for i in 0..nt {
        for j in cov_lo..cov_hi {
            out.push(values[i * nx + j] + sigma_grid[i][j]);
        }
    }
    ComplexField::new(out_grid, out)
}

/// Breather action dressed by a slowly varying potential (rest frame,
/// spherical mode): `S = -(1 + e U) t + e A . x - i ln(1 + alpha e^{-i t} j0(sqrt3 r))`.
///
/// The clock factor in the log term keeps unit frequency regardless of the
/// field; only the regular part shifts.
pub fn slowly_varying_breather_action<T: Real>(
    pot: &EMPotential<T>,
    spec: &BreatherSpec<T>,
    pt: SpacetimePoint<T>,
) -> Result<ActionValue<T>> {
    if spec.l != 0 || spec.n != 0 || vec3::norm2(spec.boost_v) != T::zero() {
        return Err(Error::rejected(
            "slowly varying form is stated for the rest spherical mode",
        ));
    }
    let x = pt.space();
    let rel = vec3::sub(x, spec.center);
    let r = vec3::norm(rel);
    let w = spec.alpha * cis(-pt.t) * spherical_bessel(0, locked_wavenumber::<T>() * r)?;
    let arg = Cx::new(T::one(), T::zero()) + w;
    if arg.norm_sqr() == T::zero() {
        return Err(Error::Singular {
            location: format!("dressed action at t = {}", pt.t.as_f64()),
        });
    }
    let e = pot.charge();
    let u = pot.u(x, pt.t);
    let a = pot.a(x, pt.t);
    let regular = -(T::one() + e * u) * pt.t + e * vec3::dot(a, x);
    let value = Cx::new(regular, T::zero()) - Cx::new(T::zero(), T::one()) * arg.ln();
    Ok(ActionValue::new(value, 0))
}

/// Uniformly valid asymptotic action in the nonrelativistic window:
/// `S = -t + S_sc - i ln(1 + alpha e^{i(p.x - (1 + v^2/2) t)} j0(sqrt3 |x - x_p(t)|))`
/// with `x_p`, `p` and the outer action interpolated from the trajectory.
/// The outer action at the field point is expanded to first order about the
/// trajectory: `S_sc(x, t) = S(t) + p(t) . (x - x_p(t))`.
pub fn uniform_asymptotic_action<T: Real>(
    pot: &EMPotential<T>,
    traj: &Trajectory<T>,
    spec: &BreatherSpec<T>,
    pt: SpacetimePoint<T>,
) -> Result<ActionValue<T>> {
    let _ = pot; // the field enters through the trajectory
    if spec.l != 0 || spec.n != 0 || vec3::norm2(spec.boost_v) != T::zero() {
        return Err(Error::rejected(
            "uniform asymptotic form is stated for the rest spherical mode",
        ));
    }
    let (x_p, p, s_traj) = traj.sample(pt.t)?;
    let v2 = vec3::norm2(p);
    if v2.sqrt() > T::of(MAX_MOMENTUM) * (T::one() + T::of(1e-9)) {
        return Err(Error::rejected(
            "trajectory momentum outside the nonrelativistic window",
        ));
    }
    let x = pt.space();
    let rel = vec3::sub(x, x_p);
    let dist = vec3::norm(rel);
    if dist > T::of(20.0) {
        return Err(Error::rejected(format!(
            "point {} Compton units from the core; use the outer solution",
            dist.as_f64()
        )));
    }
    let phase = vec3::dot(p, x) - (T::one() + v2 / T::of(2.0)) * pt.t;
    let w = spec.alpha * cis(phase) * spherical_bessel(0, locked_wavenumber::<T>() * dist)?;
    let arg = Cx::new(T::one(), T::zero()) + w;
    if arg.norm_sqr() == T::zero() {
        return Err(Error::Singular {
            location: format!("asymptotic action at t = {}", pt.t.as_f64()),
        });
    }
    let s_sc = s_traj + Cx::new(vec3::dot(p, rel), T::zero());
    let value =
        Cx::new(-pt.t, T::zero()) + s_sc - Cx::new(T::zero(), T::one()) * arg.ln();
    Ok(ActionValue::new(value, 0))
}

/// Free-particle reduction: with no field and a resting trajectory the
/// asymptotic form coincides with the closed-form breather action.
pub fn asymptotic_reduces_to_breather<T: Real>(
    spec: &BreatherSpec<T>,
    pt: SpacetimePoint<T>,
) -> Result<(ActionValue<T>, ActionValue<T>)> {
    let pot = EMPotential::free();
    let traj = integrate_trajectory(
        &pot,
        vec3::zero(),
        vec3::zero(),
        (pt.t - T::one(), pt.t + T::one()),
        T::of(0.25),
    )?;
    let a = uniform_asymptotic_action(&pot, &traj, spec, pt)?;
    let b = breather_action(spec, pt)?;
    Ok((a, b))
}
