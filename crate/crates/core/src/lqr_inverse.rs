//! Inverse LQR reconstruction for PID state feedback.
//!
//! With states `x = (∫e, e, ė)` a PID law is the state feedback
//! `u = -R⁻¹BᵀP x`. Given the gains, the third row of `P` follows directly,
//! the remaining entries of `P` come from the off-diagonal CARE equations
//! and the diagonal ones then define `Q`. No Riccati iteration is involved.

use crate::error::{Error, Result, Warning};
use crate::numerics::{eig_sym3, Sym3};
use crate::pole_placement::{closed_loop_poles, ClosedLoopTarget, PidGains, Plant};

/// Control weight used unless the caller overrides it.
pub const DEFAULT_R: f64 = 1.0;

/// CARE residual accepted for a package built from gains.
pub const CARE_TOLERANCE: f64 = 1e-8;

/// Error-coordinate state-space model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpace3 {
    pub a: [[f64; 3]; 3],
    pub b: [f64; 3],
}

pub fn system_matrices(plant: &Plant) -> StateSpace3 {
    StateSpace3 {
        a: [
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, -plant.omega_n * plant.omega_n, -2.0 * plant.zeta * plant.omega_n],
        ],
        b: [0.0, 0.0, -plant.gain],
    }
}

/// Diagonal state weight and scalar control weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub q: [f64; 3],
    pub r: f64,
}

impl Weights {
    pub fn q_matrix(&self) -> Sym3 {
        Sym3::diag(self.q)
    }

    pub fn warnings(&self) -> Vec<Warning> {
        self.q
            .iter()
            .enumerate()
            .filter(|(_, v)| **v < 0.0)
            .map(|(index, &value)| Warning::IndefiniteWeights { index, value })
            .collect()
    }
}

/// Riccati solution, weights and how well they satisfy the CARE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiPackage {
    pub p: Sym3,
    pub weights: Weights,
    pub care_residual: f64,
}

impl RiccatiPackage {
    /// Reconstruct `(P, Q, R)` for which `gains` are the optimal feedback.
    pub fn from_gains(plant: &Plant, gains: &PidGains, r: f64) -> Result<Self> {
        let p = p_from_gains(plant, gains, r)?;
        let weights = q_from_p(plant, &p, r);
        let care_residual = care_residual(&system_matrices(plant), &p, &weights.q, r);
        Ok(Self { p, weights, care_residual })
    }

    pub fn gains(&self, plant: &Plant) -> PidGains {
        gains_from_p(&self.p, plant.gain, self.weights.r)
    }
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("control weight R must be positive, got {r}")))
    }
}

/// `(P13, P23, P33)` straight from the plant and the pole-placement target.
pub fn p_third_row(plant: &Plant, target: &ClosedLoopTarget, r: f64) -> [f64; 3] {
    let (z, w, m) = (target.zeta, target.omega_n, target.m);
    let scale = r / (plant.gain * plant.gain);
    [
        m * z * w.powi(3) * scale,
        (w * w * (1.0 + 2.0 * m * z * z) - plant.omega_n * plant.omega_n) * scale,
        ((2.0 + m) * z * w - 2.0 * plant.zeta * plant.omega_n) * scale,
    ]
}

/// Full Riccati solution whose feedback reproduces `gains`.
pub fn p_from_gains(plant: &Plant, gains: &PidGains, r: f64) -> Result<Sym3> {
    check_r(r)?;
    if closed_loop_poles(plant, gains).is_err() {
        return Err(Error::UnstableGains);
    }
    let k = plant.gain;
    let (w2, z2w) = (plant.omega_n * plant.omega_n, 2.0 * plant.zeta * plant.omega_n);
    let p13 = gains.ki * r / k;
    let p23 = gains.kp * r / k;
    let p33 = gains.kd * r / k;
    let g = k * k / r;
    Ok(Sym3 {
        m11: w2 * p13 + g * p13 * p23,
        m12: z2w * p13 + g * p13 * p33,
        m13: p13,
        m22: z2w * p23 + g * p23 * p33 + w2 * p33 - p13,
        m23: p23,
        m33: p33,
    })
}

/// Diagonal weights implied by `p` (the diagonal CARE equations).
pub fn q_from_p(plant: &Plant, p: &Sym3, r: f64) -> Weights {
    let g = plant.gain * plant.gain / r;
    let (w2, z2w) = (plant.omega_n * plant.omega_n, 2.0 * plant.zeta * plant.omega_n);
    Weights {
        q: [
            g * p.m13 * p.m13,
            g * p.m23 * p.m23 - 2.0 * (p.m12 - w2 * p.m23),
            g * p.m33 * p.m33 - 2.0 * (p.m23 - z2w * p.m33),
        ],
        r,
    }
}

/// `‖AᵀP + PA − PBR⁻¹BᵀP + Q‖_F / max(1, ‖Q‖_F)`
pub fn care_residual(ss: &StateSpace3, p: &Sym3, q_diag: &[f64; 3], r: f64) -> f64 {
    let pm = p.to_dense();
    let a = &ss.a;
    let pb = p.mul_vec(&ss.b);
    let mut sum = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let mut v = 0.0;
            for k in 0..3 {
                v += a[k][i] * pm[k][j] + pm[i][k] * a[k][j];
            }
            v -= pb[i] * pb[j] / r;
            if i == j {
                v += q_diag[i];
            }
            sum += v * v;
        }
    }
    let q_norm = q_diag.iter().map(|q| q * q).sum::<f64>().sqrt();
    sum.sqrt() / q_norm.max(1.0)
}

/// PID gains encoded in the third row of `p`.
pub fn gains_from_p(p: &Sym3, k: f64, r: f64) -> PidGains {
    PidGains {
        ki: k * p.m13 / r,
        kp: k * p.m23 / r,
        kd: k * p.m33 / r,
    }
}

/// Quadratic cost `x0ᵀ P x0` of regulating from `x0`.
pub fn cost_for_initial_state(p: &Sym3, x0: &[f64; 3]) -> f64 {
    p.quad_form(x0)
}

/// Eigenvalues of `P_a − P_b` and whether the difference is positive definite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostComparison {
    pub eigenvalues: [f64; 3],
    pub positive_definite: bool,
}

pub fn delta_p_eigenvalues(p_a: &Sym3, p_b: &Sym3) -> Result<CostComparison> {
    let eigenvalues = eig_sym3(&(*p_a - *p_b))?;
    Ok(CostComparison {
        eigenvalues,
        positive_definite: eigenvalues.iter().all(|&l| l > 0.0),
    })
}
