//! Complex action samples with explicit branch bookkeeping.
//!
//! The action `S` and the wave function are related by `psi = exp(i S)`
//! (internal units, `hbar = 1`), so `S = -i ln(psi)` is defined only up to
//! `2 pi k`. [`ActionValue`] carries the winding index `k` explicitly;
//! [`action_from_psi`] selects branches by continuity along a sample path.

use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// One action sample: complex value plus the winding index of the logarithm.
///
/// Gauge: `(value + 2 pi k, branch + k)` describes the same physical state
/// for any integer `k`; `psi()` is branch-independent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionValue<T> {
    pub value: Cx<T>,
    pub branch: i32,
}

impl<T: Real> ActionValue<T> {
    pub fn new(value: Cx<T>, branch: i32) -> Self {
        ActionValue { value, branch }
    }

    /// Principal-branch action of a nonzero wave-function sample.
    pub fn principal(psi: Cx<T>) -> Result<Self> {
        if psi.norm_sqr() == T::zero() {
            return Err(Error::Singular {
                location: "principal branch of psi = 0".into(),
            });
        }
        // S = -i ln(psi) = arg(psi) - i ln|psi|
        let value = Cx::new(psi.arg(), -psi.norm().ln());
        Ok(ActionValue { value, branch: 0 })
    }

    /// Wave function `exp(i S)`; independent of the branch representative.
    pub fn psi(&self) -> Cx<T> {
        (Cx::new(T::zero(), T::one()) * self.value).exp()
    }

    /// Same state on another branch representative.
    pub fn rebranch(&self, k: i32) -> Self {
        let two_pi = T::PI() + T::PI();
        ActionValue {
            value: self.value + Cx::new(two_pi * T::of(k as f64), T::zero()),
            branch: self.branch + k,
        }
    }
}

/// Branch-tracked action along a sample path of the wave function.
///
/// The first sample takes the principal branch; every later sample continues
/// the phase by the nearest branch. Fails if any sample is exactly zero
/// (action undefined there) or if neighboring samples are separated by a
/// phase step of `pi` or more (direction of winding is ambiguous).
pub fn action_from_psi<T: Real>(psi: &[Cx<T>]) -> Result<Vec<ActionValue<T>>> {
    let two_pi = T::PI() + T::PI();
    let mut out = Vec::with_capacity(psi.len());
    let mut phase = T::zero();
    for (i, &z) in psi.iter().enumerate() {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite {
                location: format!("path sample {i}"),
            });
        }
        if z.norm_sqr() == T::zero() {
            return Err(Error::Singular {
                location: format!("path sample {i}"),
            });
        }
        let principal = z.arg();
        if i == 0 {
            phase = principal;
        } else {
            let prev = psi[i - 1];
            let step = (z / prev).arg();
            if !(step.abs() < T::PI()) {
                return Err(Error::InsufficientResolution(format!(
                    "|phase step| >= pi between path samples {} and {}",
                    i - 1,
                    i
                )));
            }
            phase += step;
        }
        let branch_f = ((phase - principal) / two_pi).round();
        let branch = branch_f.as_f64() as i32;
        out.push(ActionValue {
            value: Cx::new(phase, -z.norm().ln()),
            branch,
        });
    }
    Ok(out)
}
