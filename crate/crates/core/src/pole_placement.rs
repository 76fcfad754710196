//! Dominant pole placement for a second-order plant under PID control.
//!
//! The closed loop is third order. Its characteristic polynomial is matched
//! to `(s + m ζ ωn)(s² + 2ζ ωn s + ωn²)`, which puts a complex pair at the
//! requested damping and frequency and a real pole `m` times further left.

use num_complex::Complex64;

use crate::error::{Error, Result, Warning};
use crate::numerics::{solve_cubic, Cubic, RootTriple};
use crate::simulate::{metrics, simulate_closed_loop, ResponseMetrics, ScenarioSpec};

/// Relative dominance used throughout unless overridden.
pub const DEFAULT_DOMINANCE: f64 = 10.0;

/// Below this relative dominance the real pole visibly shapes the response.
pub const MIN_RECOMMENDED_DOMINANCE: f64 = 3.0;

/// `K / (s² + 2ζ ωn s + ωn²)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plant {
    pub gain: f64,
    pub zeta: f64,
    pub omega_n: f64,
}

impl Plant {
    pub fn new(gain: f64, zeta: f64, omega_n: f64) -> Result<Self> {
        let plant = Self { gain, zeta, omega_n };
        plant.validate()?;
        Ok(plant)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gain.is_finite() && self.gain != 0.0) {
            return Err(Error::InvalidInput(format!("plant gain must be non-zero, got {}", self.gain)));
        }
        if !(self.zeta.is_finite() && self.zeta >= 0.0) {
            return Err(Error::InvalidInput(format!("plant damping must be >= 0, got {}", self.zeta)));
        }
        if !(self.omega_n.is_finite() && self.omega_n > 0.0) {
            return Err(Error::InvalidInput(format!(
                "plant natural frequency must be > 0, got {}",
                self.omega_n
            )));
        }
        Ok(())
    }
}

/// Desired dominant pair and relative dominance of the real pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedLoopTarget {
    pub zeta: f64,
    pub omega_n: f64,
    pub m: f64,
}

impl ClosedLoopTarget {
    pub fn new(zeta: f64, omega_n: f64, m: f64) -> Result<Self> {
        let target = Self { zeta, omega_n, m };
        target.validate()?;
        Ok(target)
    }

    pub fn with_default_dominance(zeta: f64, omega_n: f64) -> Result<Self> {
        Self::new(zeta, omega_n, DEFAULT_DOMINANCE)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return Err(Error::InvalidInput(format!("target damping must be in (0, 1], got {}", self.zeta)));
        }
        if !(self.omega_n.is_finite() && self.omega_n > 0.0) {
            return Err(Error::InvalidInput(format!(
                "target natural frequency must be > 0, got {}",
                self.omega_n
            )));
        }
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(Error::InvalidInput(format!("relative dominance must be > 0, got {}", self.m)));
        }
        Ok(())
    }

    /// Location of the non-dominant real pole.
    pub fn real_pole(&self) -> f64 {
        -self.m * self.zeta * self.omega_n
    }
}

/// Parallel-form PID gains, `kp + ki/s + kd s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

impl PidGains {
    pub fn new(kp: f64, ki: f64, kd: f64) -> Self {
        Self { kp, ki, kd }
    }

    /// Gains in the state-feedback order `(ki, kp, kd)`.
    pub fn as_feedback_row(&self) -> [f64; 3] {
        [self.ki, self.kp, self.kd]
    }

    pub fn warnings(&self) -> Vec<Warning> {
        [("kp", self.kp), ("ki", self.ki), ("kd", self.kd)]
            .into_iter()
            .filter(|(_, v)| v.is_nan() || *v <= 0.0)
            .map(|(name, value)| Warning::NonPositiveGain { name, value })
            .collect()
    }

    /// Routh test on the closed-loop cubic.
    pub fn is_stabilizing(&self, plant: &Plant) -> bool {
        let c = closed_loop_characteristic(plant, self);
        c.a2 > 0.0 && c.a1 > 0.0 && c.a0 > 0.0 && c.a2 * c.a1 > c.a0
    }
}

/// Closed-loop pole pattern and its dominant-pair summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleReport {
    pub roots: RootTriple,
    pub dominant_zeta: f64,
    pub dominant_omega_n: f64,
    pub real_pole: f64,
    pub dominance_ratio: f64,
}

impl PoleReport {
    /// Dominant pole in the upper half plane (on the real axis when all
    /// three poles are real).
    pub fn dominant_pole(&self) -> Complex64 {
        self.roots.upper_complex().unwrap_or(self.roots.0[0])
    }

    pub fn dominance_warning(&self) -> Option<Warning> {
        (self.dominance_ratio < MIN_RECOMMENDED_DOMINANCE)
            .then_some(Warning::WeakDominance { m_actual: self.dominance_ratio })
    }
}

/// PID gains that place the closed-loop poles at `target`.
pub fn place_gains(plant: &Plant, target: &ClosedLoopTarget) -> PidGains {
    let (z, w, m) = (target.zeta, target.omega_n, target.m);
    let k = plant.gain;
    PidGains {
        kp: (w * w * (1.0 + 2.0 * m * z * z) - plant.omega_n * plant.omega_n) / k,
        ki: m * z * w.powi(3) / k,
        kd: ((2.0 + m) * z * w - 2.0 * plant.zeta * plant.omega_n) / k,
    }
}

pub fn desired_characteristic(target: &ClosedLoopTarget) -> Cubic {
    let (z, w, m) = (target.zeta, target.omega_n, target.m);
    Cubic::monic((2.0 + m) * z * w, w * w * (1.0 + 2.0 * m * z * z), m * z * w.powi(3))
}

/// Denominator of the closed-loop transfer function.
pub fn closed_loop_characteristic(plant: &Plant, gains: &PidGains) -> Cubic {
    let k = plant.gain;
    Cubic::monic(
        2.0 * plant.zeta * plant.omega_n + k * gains.kd,
        plant.omega_n * plant.omega_n + k * gains.kp,
        k * gains.ki,
    )
}

pub fn closed_loop_poles(plant: &Plant, gains: &PidGains) -> Result<PoleReport> {
    let roots = solve_cubic(&closed_loop_characteristic(plant, gains))?;
    let max_real = roots.max_real();
    if max_real.is_nan() || max_real >= 0.0 {
        return Err(Error::UnstableClosedLoop { max_real });
    }
    let report = match roots.upper_complex() {
        Some(pair) => {
            let real_pole = roots.iter().find(|r| r.im == 0.0).map_or(f64::NAN, |r| r.re);
            let omega_n = pair.norm();
            PoleReport {
                roots,
                dominant_zeta: -pair.re / omega_n,
                dominant_omega_n: omega_n,
                real_pole,
                dominance_ratio: real_pole.abs() / pair.re.abs(),
            }
        }
        None => {
            // all real: the slowest root dominates as a critically damped pair
            let slow = roots.0[0].re;
            let fast = roots.0[2].re;
            PoleReport {
                roots,
                dominant_zeta: 1.0,
                dominant_omega_n: slow.abs(),
                real_pole: fast,
                dominance_ratio: fast.abs() / slow.abs(),
            }
        }
    };
    Ok(report)
}

/// One row of a relative-dominance study.
#[derive(Debug, Clone, PartialEq)]
pub struct MStudyRecord {
    pub m: f64,
    pub gains: PidGains,
    pub metrics: ResponseMetrics,
}

/// Place gains for each `m` and record the unit-step response metrics.
/// `scenario` defaults to [`ScenarioSpec::for_design`].
pub fn m_study(
    plant: &Plant,
    zeta_cl: f64,
    omega_n_cl: f64,
    m_values: &[f64],
    scenario: Option<ScenarioSpec>,
) -> Result<Vec<MStudyRecord>> {
    let scenario = scenario.unwrap_or_else(|| ScenarioSpec::for_design(plant, zeta_cl, omega_n_cl));
    m_values
        .iter()
        .map(|&m| {
            let target = ClosedLoopTarget::new(zeta_cl, omega_n_cl, m)?;
            let gains = place_gains(plant, &target);
            let trace = simulate_closed_loop(plant, &gains, &scenario)?;
            let metrics = metrics(&trace, &gains, &scenario)?;
            Ok(MStudyRecord { m, gains, metrics })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn plant(k: f64, z: f64, w: f64) -> Plant {
        Plant::new(k, z, w).unwrap()
    }

    fn target(z: f64, w: f64, m: f64) -> ClosedLoopTarget {
        ClosedLoopTarget::new(z, w, m).unwrap()
    }

    fn assert_gains(g: PidGains, want: (f64, f64, f64), rel: f64) {
        assert_relative_eq!(g.kp, want.0, max_relative = rel);
        assert_relative_eq!(g.ki, want.1, max_relative = rel);
        assert_relative_eq!(g.kd, want.2, max_relative = rel);
    }

    #[test]
    fn reference_gain_sets() {
        assert_gains(
            place_gains(&plant(9.0, 0.2, 3.0), &target(0.75, 7.0, 10.0)),
            (65.6944, 285.8333, 6.8667),
            1e-5,
        );
        assert_gains(
            place_gains(&plant(1.0, 0.2, 0.1), &target(0.98, 2.0, 10.0)),
            (80.822, 78.400, 23.480),
            1e-6,
        );
        assert_gains(
            place_gains(&plant(1.0, 5.0, 1.0), &target(0.75, 5.0, 10.0)),
            (305.25, 937.5, 35.0),
            1e-12,
        );
        assert_gains(
            place_gains(&plant(25.0, 1.0, 5.0), &target(0.75, 10.0, 10.0)),
            (48.0, 300.0, 3.2),
            1e-12,
        );
    }

    #[test]
    fn desired_polynomial_expansion() {
        // (s + 52.5)(s² + 10.5 s + 49)
        let c = desired_characteristic(&target(0.75, 7.0, 10.0));
        assert_relative_eq!(c.a2, 63.0, max_relative = 1e-14);
        assert_relative_eq!(c.a1, 600.25, max_relative = 1e-14);
        assert_relative_eq!(c.a0, 2572.5, max_relative = 1e-14);
        assert_eq!(desired_characteristic(&target(1.0, 1.0, 1.0)).coefficients(), [1.0, 3.0, 3.0, 1.0]);
    }

    #[test]
    fn desired_polynomial_roots() {
        let r = solve_cubic(&desired_characteristic(&target(0.934, 8.88, 10.0))).unwrap();
        let pair = r.upper_complex().unwrap();
        assert_relative_eq!(pair.re, -0.934 * 8.88, max_relative = 1e-9);
        assert_relative_eq!(pair.im, 8.88 * (1.0 - 0.934f64.powi(2)).sqrt(), max_relative = 1e-9);
        assert_relative_eq!(r.0[2].re, -82.9392, max_relative = 1e-9);
    }

    #[test]
    fn design_point_is_reproduced() {
        let p = plant(9.0, 0.2, 3.0);
        let rep = closed_loop_poles(&p, &PidGains::new(65.6944, 285.8333, 6.8667)).unwrap();
        assert_relative_eq!(rep.dominant_zeta, 0.75, max_relative = 1e-5);
        assert_relative_eq!(rep.dominant_omega_n, 7.0, max_relative = 1e-5);
        assert_relative_eq!(rep.real_pole, -52.5, max_relative = 1e-5);
        assert_relative_eq!(rep.dominance_ratio, 10.0, max_relative = 1e-4);
        assert!(rep.dominance_warning().is_none());
    }

    #[test]
    fn suboptimal_dominant_poles() {
        let rep = closed_loop_poles(&plant(9.0, 0.2, 3.0), &PidGains::new(120.4848, 535.8142, 8.5059)).unwrap();
        assert_relative_eq!(rep.dominant_zeta, 0.934, max_relative = 1e-3);
        assert_relative_eq!(rep.dominant_omega_n, 8.88, max_relative = 1e-3);
    }

    #[test]
    fn marginal_loop_rejected() {
        let err = closed_loop_poles(&plant(1.0, 0.2, 0.1), &PidGains::new(0.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::UnstableClosedLoop { .. }));
    }

    #[test]
    fn all_real_poles_report_critical_damping() {
        // gains chosen so the closed loop is (s+1)(s+4)(s+10)
        let p = plant(1.0, 0.5, 1.0);
        let g = PidGains::new(54.0 - 1.0, 40.0, 15.0 - 1.0);
        let rep = closed_loop_poles(&p, &g).unwrap();
        assert_eq!(rep.dominant_zeta, 1.0);
        assert_relative_eq!(rep.dominant_omega_n, 1.0, max_relative = 1e-10);
        assert_relative_eq!(rep.real_pole, -10.0, max_relative = 1e-10);
        assert_relative_eq!(rep.dominance_ratio, 10.0, max_relative = 1e-9);
    }

    #[test]
    fn weak_dominance_warns() {
        let p = plant(9.0, 0.2, 3.0);
        let rep = closed_loop_poles(&p, &place_gains(&p, &target(0.75, 7.0, 1.0))).unwrap();
        assert!(matches!(rep.dominance_warning(), Some(Warning::WeakDominance { .. })));
        let rep = closed_loop_poles(&p, &place_gains(&p, &target(0.75, 7.0, 3.5))).unwrap();
        assert!(rep.dominance_warning().is_none());
    }

    #[test]
    fn non_positive_gain_is_a_warning() {
        // target slower than the plant itself
        let p = plant(1.0, 0.9, 10.0);
        let g = place_gains(&p, &target(0.5, 1.0, 10.0));
        let w = g.warnings();
        assert!(w.iter().any(|w| matches!(w, Warning::NonPositiveGain { name: "kp", .. })));
        assert!(w.iter().any(|w| matches!(w, Warning::NonPositiveGain { name: "kd", .. })));
    }

    #[test]
    fn invalid_domain_values() {
        assert!(Plant::new(0.0, 0.2, 1.0).is_err());
        assert!(Plant::new(1.0, -0.1, 1.0).is_err());
        assert!(Plant::new(1.0, 0.2, 0.0).is_err());
        assert!(ClosedLoopTarget::new(0.0, 1.0, 10.0).is_err());
        assert!(ClosedLoopTarget::new(1.2, 1.0, 10.0).is_err());
        assert!(ClosedLoopTarget::new(0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn routh_matches_pole_check() {
        let p = plant(9.0, 0.2, 3.0);
        let good = place_gains(&p, &target(0.75, 7.0, 10.0));
        assert!(good.is_stabilizing(&p));
        let bad = PidGains::new(0.1, 500.0, 0.01);
        assert!(!bad.is_stabilizing(&p));
        assert!(closed_loop_poles(&p, &bad).is_err());
    }
}
