//! Conformal mapping of an equal-order FOPID controller between the
//! s-plane and the w-plane (`w = s^q`).
//!
//! In the w-plane the controller numerator `kd w² + kp w + ki` is an
//! ordinary quadratic. Its complex zeros are mapped back to the primary
//! Riemann sheet of the s-plane, where an integer-order PID with the same
//! zeros gives the equivalent gains.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pole_placement::PidGains;

/// Shared integral/derivative order `q`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub const INTEGER: FractionalOrder = FractionalOrder(1.0);

    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q <= 2.0 {
            Ok(Self(q))
        } else {
            Err(Error::InvalidInput(format!("fractional order must be in (0, 2], got {q}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Complex-conjugate controller zeros in the w-plane in polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WZeros {
    pub w1: Complex64,
    pub w2: Complex64,
    pub r: f64,
    pub phi: f64,
}

/// Region of the w-plane a zero angle falls into for a given order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WedgeClass {
    Unstable,
    UnderDamped,
    HyperDamped,
    UltraDamped,
}

impl WedgeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            WedgeClass::Unstable => "unstable",
            WedgeClass::UnderDamped => "under-damped",
            WedgeClass::HyperDamped => "hyper-damped",
            WedgeClass::UltraDamped => "ultra-damped",
        }
    }
}

impl fmt::Display for WedgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn w_zeros(gains: &PidGains) -> Result<WZeros> {
    let PidGains { kp, ki, kd } = *gains;
    if !(kd > 0.0 && ki > 0.0) {
        return Err(Error::InvalidInput(format!(
            "w-plane zeros need kd > 0 and ki > 0 (got kd = {kd}, ki = {ki})"
        )));
    }
    let disc = 4.0 * ki * kd - kp * kp;
    if disc.is_nan() || disc <= 0.0 {
        return Err(Error::RealZeros);
    }
    let root = disc.sqrt();
    let w1 = Complex64::new(-kp / (2.0 * kd), root / (2.0 * kd));
    Ok(WZeros {
        w1,
        w2: w1.conj(),
        r: (ki / kd).sqrt(),
        // second quadrant for kp > 0, first quadrant for kp < 0
        phi: root.atan2(-kp),
    })
}

/// Under-damped only strictly inside `(πq/2, πq)`; the lower edge counts as
/// unstable and the upper edge as ultra-damped.
pub fn classify_wedge(phi: f64, q: FractionalOrder) -> WedgeClass {
    let lower = PI * q.0 / 2.0;
    let upper = PI * q.0;
    if phi <= lower {
        WedgeClass::Unstable
    } else if phi < upper {
        WedgeClass::UnderDamped
    } else if phi == upper {
        WedgeClass::UltraDamped
    } else {
        WedgeClass::HyperDamped
    }
}

fn require_underdamped(gains: &PidGains, q: FractionalOrder) -> Result<WZeros> {
    let w = w_zeros(gains)?;
    match classify_wedge(w.phi, q) {
        WedgeClass::UnderDamped => Ok(w),
        _ => Err(Error::OutsideWedge { phi: w.phi, q: q.0 }),
    }
}

/// s-plane zeros of the FOPID on the primary sheet, upper one first.
pub fn s_zeros(gains: &PidGains, q: FractionalOrder) -> Result<[Complex64; 2]> {
    let w = require_underdamped(gains, q)?;
    let upper = mapped_zero(gains, &w, q);
    Ok([upper, upper.conj()])
}

fn mapped_zero(gains: &PidGains, w: &WZeros, q: FractionalOrder) -> Complex64 {
    Complex64::from_polar((gains.ki / gains.kd).powf(0.5 / q.0), w.phi / q.0)
}

/// Integer-order PID whose zeros coincide with the FOPID's s-plane zeros.
pub fn equivalent_pid(gains: &PidGains, q: FractionalOrder) -> Result<PidGains> {
    let w = require_underdamped(gains, q)?;
    Ok(equivalent_pid_from(gains, &w, q))
}

/// Equivalent gains for any complex w-zero pair, without the wedge check.
/// Outside the wedge the result no longer describes stable zeros.
pub fn equivalent_pid_unchecked(gains: &PidGains, q: FractionalOrder) -> Result<PidGains> {
    let w = w_zeros(gains)?;
    Ok(equivalent_pid_from(gains, &w, q))
}

/// Mapped s-plane zero in the upper half plane, without the wedge check.
pub fn s_zero_unchecked(gains: &PidGains, q: FractionalOrder) -> Result<Complex64> {
    let w = w_zeros(gains)?;
    Ok(mapped_zero(gains, &w, q))
}

fn equivalent_pid_from(gains: &PidGains, w: &WZeros, q: FractionalOrder) -> PidGains {
    let inv = 1.0 / q.0;
    PidGains {
        kp: -2.0 * (gains.ki * gains.kd).powf(0.5 * inv) * (w.phi * inv).cos(),
        ki: gains.ki.powf(inv),
        kd: gains.kd.powf(inv),
    }
}
