//! Oracles that share no code path with the library.
#![allow(dead_code)]

use fotune_core::{Complex64, PidGains, Plant};
use nalgebra::{Matrix3, Matrix4, Vector4};

/// Roots of a monic cubic as eigenvalues of its companion matrix.
pub fn companion_roots(a2: f64, a1: f64, a0: f64) -> Vec<Complex64> {
    let m = Matrix3::new(0.0, 0.0, -a0, 1.0, 0.0, -a1, 0.0, 1.0, -a2);
    m.complex_eigenvalues().iter().map(|z| Complex64::new(z.re, z.im)).collect()
}

/// Distance between two root multisets after greedy matching, relative
/// to `max(1, |root|)`.
pub fn root_set_error(got: &[Complex64], want: &[Complex64]) -> f64 {
    let mut pool: Vec<Complex64> = want.to_vec();
    let mut worst = 0.0_f64;
    for g in got {
        let (idx, dist) = pool
            .iter()
            .enumerate()
            .map(|(i, w)| (i, (g - w).norm() / w.norm().max(1.0)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        worst = worst.max(dist);
        pool.remove(idx);
    }
    worst
}

/// Closed-loop output sampled every `dt` by exact propagation of the
/// augmented linear system `[x; 1]` with `x = (y, ẏ, ∫e)`. The input
/// disturbance switches on at sample `k_d`.
pub fn expm_output(
    plant: &Plant,
    gains: &PidGains,
    step: f64,
    disturbance: f64,
    k_d: usize,
    dt: f64,
    samples: usize,
) -> Vec<f64> {
    let (k, w2, z2w) = (plant.gain, plant.omega_n * plant.omega_n, 2.0 * plant.zeta * plant.omega_n);
    let build = |d: f64| {
        Matrix4::new(
            0.0, 1.0, 0.0, 0.0,
            -w2 - k * gains.kp, -z2w - k * gains.kd, k * gains.ki, k * (gains.kp * step + d),
            -1.0, 0.0, 0.0, step,
            0.0, 0.0, 0.0, 0.0,
        ) * dt
    };
    let before = build(0.0).exp();
    let after = build(disturbance).exp();
    let mut x = Vector4::new(0.0, 0.0, 0.0, 1.0);
    let mut y = Vec::with_capacity(samples);
    for i in 0..samples {
        y.push(x[0]);
        x = if i >= k_d { after * x } else { before * x };
    }
    y
}

/// State of `ẋ = A x` at `t` via the matrix exponential.
pub fn expm_state(a: &[[f64; 3]; 3], x0: [f64; 3], t: f64) -> [f64; 3] {
    let m = Matrix3::from_fn(|i, j| a[i][j] * t).exp();
    let x = m * nalgebra::Vector3::from(x0);
    [x[0], x[1], x[2]]
}
