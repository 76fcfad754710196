//! M-curve sweeps and the two-stage sub-optimal tuning procedure.
//!
//! Stage one places the poles at a modest damping. Stage two lowers the
//! FOPID order `q` from 1, replacing the controller with its integer-order
//! equivalent at each step, until the dominant damping reaches the request.
//! The result is compared with a single-stage placement at the same poles
//! through the reconstructed Riccati solutions of both controllers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fractional_map::{
    classify_wedge, equivalent_pid, equivalent_pid_unchecked, s_zero_unchecked, w_zeros, FractionalOrder,
    WedgeClass,
};
use crate::lqr_inverse::{delta_p_eigenvalues, RiccatiPackage, DEFAULT_R};
use crate::pole_placement::{closed_loop_poles, place_gains, ClosedLoopTarget, PidGains, Plant};

/// One sample of the M-curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCurvePoint {
    pub q: f64,
    /// `None` when the stage-one zeros are real in the w-plane.
    pub equivalent_gains: Option<PidGains>,
    /// Upper mapped controller zero on the primary sheet.
    pub s_zero: Option<Complex64>,
    pub wedge: Option<WedgeClass>,
    pub dominant_zeta: Option<f64>,
    pub dominant_omega_n: Option<f64>,
    /// Under-damped wedge and a Hurwitz closed loop.
    pub stable: bool,
}

/// Descending grid `q_from, q_from - step, ...` down to `q_to` inclusive.
/// Empty when `q_to > q_from`.
pub fn q_grid(q_from: f64, q_to: f64, q_step: f64) -> Result<Vec<f64>> {
    if !(q_step > 0.0 && q_step.is_finite()) {
        return Err(Error::InvalidInput(format!("q step must be positive, got {q_step}")));
    }
    for q in [q_from, q_to] {
        FractionalOrder::new(q)?;
    }
    if q_to > q_from {
        return Ok(Vec::new());
    }
    let n = ((q_from - q_to) / q_step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| round_grid(q_from - k as f64 * q_step)).collect())
}

// keeps grid values such as 1 - 20·0.005 printing as 0.9
fn round_grid(q: f64) -> f64 {
    (q * 1e12).round() / 1e12
}

pub fn mcurve_point(plant: &Plant, stage1: &PidGains, q: FractionalOrder) -> MCurvePoint {
    let mut point = MCurvePoint {
        q: q.value(),
        equivalent_gains: None,
        s_zero: None,
        wedge: None,
        dominant_zeta: None,
        dominant_omega_n: None,
        stable: false,
    };
    let Ok(w) = w_zeros(stage1) else {
        return point;
    };
    let wedge = classify_wedge(w.phi, q);
    point.wedge = Some(wedge);
    point.equivalent_gains = equivalent_pid_unchecked(stage1, q).ok();
    point.s_zero = s_zero_unchecked(stage1, q).ok();
    if wedge != WedgeClass::UnderDamped {
        return point;
    }
    if let Some(gains) = point.equivalent_gains {
        if let Ok(poles) = closed_loop_poles(plant, &gains) {
            point.dominant_zeta = Some(poles.dominant_zeta);
            point.dominant_omega_n = Some(poles.dominant_omega_n);
            point.stable = true;
        }
    }
    point
}

/// Equivalent controllers and dominant poles over a descending `q` grid.
pub fn mcurve(plant: &Plant, stage1: &PidGains, q_from: f64, q_to: f64, q_step: f64) -> Result<Vec<MCurvePoint>> {
    let grid = q_grid(q_from, q_to, q_step)?;
    grid.into_iter()
        .map(|q| Ok(mcurve_point(plant, stage1, FractionalOrder::new(q)?)))
        .collect()
}

/// Knobs for [`two_stage_tune`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneOptions {
    pub q_step: f64,
    pub r_weight: f64,
    /// Halve the last search interval twice after the grid search.
    pub refine: bool,
    /// Round the achieved `(ζ, ωn)` to this many significant digits before
    /// the single-stage comparator is placed.
    pub achieved_sig_digits: Option<u32>,
    /// Slack on the damping test, absolute.
    pub zeta_tolerance: f64,
}

impl Default for TuneOptions {
    fn default() -> Self {
        Self {
            q_step: 0.005,
            r_weight: DEFAULT_R,
            refine: false,
            achieved_sig_digits: None,
            zeta_tolerance: 1e-6,
        }
    }
}

/// Everything produced by the two-stage procedure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningReport {
    pub stage1_target: ClosedLoopTarget,
    pub stage1_gains: PidGains,
    pub chosen_q: f64,
    pub suboptimal_gains: PidGains,
    pub achieved_zeta: f64,
    pub achieved_omega_n: f64,
    /// Target used for the single-stage comparator.
    pub comparator_target: ClosedLoopTarget,
    pub single_stage_gains: PidGains,
    pub riccati_lqr: RiccatiPackage,
    pub riccati_subopt: RiccatiPackage,
    pub delta_p_eigs: [f64; 3],
    /// `P_lqr − P_subopt` is positive definite.
    pub cost_verdict: bool,
    pub initial_control_lqr: f64,
    pub initial_control_subopt: f64,
}

struct Candidate {
    gains: PidGains,
    zeta: f64,
    omega_n: f64,
}

fn evaluate(plant: &Plant, stage1: &PidGains, q: f64) -> Result<Option<Candidate>> {
    let order = FractionalOrder::new(q)?;
    let gains = equivalent_pid(stage1, order)?;
    Ok(closed_loop_poles(plant, &gains).ok().map(|p| Candidate {
        gains,
        zeta: p.dominant_zeta,
        omega_n: p.dominant_omega_n,
    }))
}

pub fn two_stage_tune(
    plant: &Plant,
    stage1_target: &ClosedLoopTarget,
    desired_zeta: f64,
    options: &TuneOptions,
) -> Result<TuningReport> {
    plant.validate()?;
    stage1_target.validate()?;
    if !(desired_zeta > stage1_target.zeta && desired_zeta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "desired damping {desired_zeta} must lie in ({}, 1)",
            stage1_target.zeta
        )));
    }
    if !(options.q_step > 0.0 && options.q_step < 1.0) {
        return Err(Error::InvalidInput(format!("q step must be in (0, 1), got {}", options.q_step)));
    }

    // Step 1
    let stage1_gains = place_gains(plant, stage1_target);
    let meets = |c: &Candidate| c.zeta >= desired_zeta - options.zeta_tolerance;

    // Step 2
    let mut found = None;
    for k in 0.. {
        let q = round_grid(1.0 - k as f64 * options.q_step);
        if q <= 0.0 {
            break;
        }
        if let Some(c) = evaluate(plant, &stage1_gains, q)? {
            if meets(&c) {
                found = Some((q, c));
                break;
            }
        }
    }
    let Some((mut chosen_q, mut best)) = found else {
        return Err(Error::TargetUnreachable { desired: desired_zeta });
    };
    if options.refine && chosen_q < 1.0 {
        let mut h = options.q_step;
        for _ in 0..2 {
            h /= 2.0;
            let q = chosen_q + h;
            if let Ok(Some(c)) = evaluate(plant, &stage1_gains, q) {
                if meets(&c) {
                    chosen_q = q;
                    best = c;
                }
            }
        }
    }

    // Step 3
    let round = |v: f64| options.achieved_sig_digits.map_or(v, |d| round_sig(v, d));
    let comparator_target = ClosedLoopTarget::new(round(best.zeta).min(1.0), round(best.omega_n), stage1_target.m)?;
    let single_stage_gains = place_gains(plant, &comparator_target);

    // Steps 4 and 5
    let riccati_lqr = RiccatiPackage::from_gains(plant, &single_stage_gains, options.r_weight)?;
    let riccati_subopt = RiccatiPackage::from_gains(plant, &best.gains, options.r_weight)?;
    let cmp = delta_p_eigenvalues(&riccati_lqr.p, &riccati_subopt.p)?;

    // Step 6: from rest, u(0⁺) = kp for a unit step
    Ok(TuningReport {
        stage1_target: *stage1_target,
        stage1_gains,
        chosen_q,
        suboptimal_gains: best.gains,
        achieved_zeta: best.zeta,
        achieved_omega_n: best.omega_n,
        comparator_target,
        single_stage_gains,
        riccati_lqr,
        riccati_subopt,
        delta_p_eigs: cmp.eigenvalues,
        cost_verdict: cmp.positive_definite,
        initial_control_lqr: single_stage_gains.kp,
        initial_control_subopt: best.gains.kp,
    })
}

/// Round to `digits` significant figures.
pub fn round_sig(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exp = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits as i32 - 1 - exp);
    (x * factor).round() / factor
}
