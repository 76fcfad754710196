use crate::error::{Error, Result};

/// States sampled on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    pub x: Vec<[f64; N]>,
}

impl<const N: usize> Trajectory<N> {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn last(&self) -> Option<&[f64; N]> {
        self.x.last()
    }
}

/// Number of whole steps of size `dt` that fit in `span`, tolerant of
/// representation error in the quotient.
pub fn step_count(span: f64, dt: f64) -> usize {
    (span / dt * (1.0 + 4.0 * f64::EPSILON)).floor() as usize
}

/// One classical Runge-Kutta step.
pub fn rk4_step<const N: usize, F>(deriv: &mut F, t: f64, x: &[f64; N], dt: f64) -> [f64; N]
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let axpy = |x: &[f64; N], k: &[f64; N], h: f64| -> [f64; N] {
        let mut out = *x;
        for (o, ki) in out.iter_mut().zip(k) {
            *o += h * ki;
        }
        out
    };
    let k1 = deriv(t, x);
    let k2 = deriv(t + 0.5 * dt, &axpy(x, &k1, 0.5 * dt));
    let k3 = deriv(t + 0.5 * dt, &axpy(x, &k2, 0.5 * dt));
    let k4 = deriv(t + dt, &axpy(x, &k3, dt));
    let mut out = *x;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrate `steps` RK4 steps from `(t0, x0)`; returns `steps + 1` samples.
pub fn integrate_steps<const N: usize, F>(
    mut deriv: F,
    x0: [f64; N],
    t0: f64,
    dt: f64,
    steps: usize,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("step size must be positive, got {dt}")));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { t: t0 });
    }
    let mut t = Vec::with_capacity(steps + 1);
    let mut x = Vec::with_capacity(steps + 1);
    t.push(t0);
    x.push(x0);
    let mut state = x0;
    for k in 0..steps {
        let tk = t0 + k as f64 * dt;
        state = rk4_step(&mut deriv, tk, &state, dt);
        let t_next = t0 + (k + 1) as f64 * dt;
        if state.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { t: t_next });
        }
        t.push(t_next);
        x.push(state);
    }
    Ok(Trajectory { t, x })
}

/// Fixed-step RK4 from `t = 0` to `t_end`; `floor(t_end/dt) + 1` samples.
pub fn integrate_fixed_step<const N: usize, F>(
    deriv: F,
    x0: [f64; N],
    t_end: f64,
    dt: f64,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("step size must be positive, got {dt}")));
    }
    if !(t_end >= dt && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("t_end = {t_end} must be at least dt = {dt}")));
    }
    integrate_steps(deriv, x0, 0.0, dt, step_count(t_end, dt))
}
