//! Closed-loop step and load-disturbance simulation.
//!
//! States are `(y, ẏ, ∫e)`. The derivative term acts on `ė = -ẏ` so the
//! set-point step produces no impulse and `u(0⁺) = kp · step`.

use crate::error::{Error, Result};
use crate::numerics::{integrate_steps, step_count};
use crate::pole_placement::{closed_loop_poles, PidGains, Plant};

/// Simulation horizon, step size and excitation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub t_end: f64,
    pub dt: f64,
    pub step_amplitude: f64,
    pub disturbance_amplitude: f64,
    pub disturbance_time: f64,
}

impl ScenarioSpec {
    /// Unit step, no disturbance.
    pub fn step(t_end: f64, dt: f64) -> Self {
        Self {
            t_end,
            dt,
            step_amplitude: 1.0,
            disturbance_amplitude: 0.0,
            disturbance_time: t_end,
        }
    }

    /// Default grid for a loop designed at `(zeta, omega_n)`: twenty time
    /// constants of the dominant pair, `dt = min(1 ms, 0.01/ωn_ol)`.
    pub fn for_design(plant: &Plant, zeta: f64, omega_n: f64) -> Self {
        Self::step(20.0 / (zeta * omega_n), default_dt(plant))
    }

    pub fn with_disturbance(mut self, amplitude: f64, time: f64) -> Self {
        self.disturbance_amplitude = amplitude;
        self.disturbance_time = time;
        self
    }

    /// Input load disturbance of half the step size at 60% of the horizon.
    pub fn with_default_disturbance(self) -> Self {
        let amplitude = 0.5 * self.step_amplitude;
        let time = 0.6 * self.t_end;
        self.with_disturbance(amplitude, time)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return bad(format!("t_end = {} must be at least dt = {}", self.t_end, self.dt));
        }
        if !(self.step_amplitude.is_finite() && self.step_amplitude != 0.0) {
            return bad(format!("step amplitude must be non-zero, got {}", self.step_amplitude));
        }
        if !self.disturbance_amplitude.is_finite() {
            return bad("disturbance amplitude must be finite".into());
        }
        if !(self.disturbance_time >= 0.0 && self.disturbance_time <= self.t_end) {
            return bad(format!(
                "disturbance time {} outside [0, {}]",
                self.disturbance_time, self.t_end
            ));
        }
        Ok(())
    }

    pub fn has_disturbance(&self) -> bool {
        self.disturbance_amplitude != 0.0
    }

    /// Number of samples in a trace.
    pub fn samples(&self) -> usize {
        step_count(self.t_end, self.dt) + 1
    }

    /// First sample index at which the disturbance is applied.
    pub fn disturbance_index(&self) -> usize {
        let k = (self.disturbance_time / self.dt * (1.0 - 4.0 * f64::EPSILON)).ceil() as usize;
        k.min(self.samples())
    }
}

pub fn default_dt(plant: &Plant) -> f64 {
    1e-3_f64.min(0.01 / plant.omega_n)
}

/// Sampled closed-loop signals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub d: Vec<f64>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Largest pointwise output difference to another trace on the same grid.
    pub fn max_output_difference(&self, other: &Trace) -> f64 {
        self.y.iter().zip(&other.y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Step-response and effort figures extracted from a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseMetrics {
    pub percent_overshoot: f64,
    /// 10% to 90% of the step; `None` if 90% is never reached.
    pub rise_time_10_90: Option<f64>,
    /// Entry into the ±2% band for good; `None` if the response never settles.
    pub settling_time_2pct: Option<f64>,
    pub peak_control: f64,
    pub initial_control: f64,
    pub iae: f64,
    pub control_ise: f64,
}

impl ResponseMetrics {
    pub fn settled(&self) -> bool {
        self.settling_time_2pct.is_some()
    }
}

/// Largest step size accepted relative to the loop's characteristic
/// frequency.
const MAX_DT_TIMES_OMEGA: f64 = 0.05;

pub fn simulate_closed_loop(plant: &Plant, gains: &PidGains, scenario: &ScenarioSpec) -> Result<Trace> {
    scenario.validate()?;
    let poles = closed_loop_poles(plant, gains)?;
    let omega = poles.dominant_omega_n.max(plant.omega_n);
    if scenario.dt * omega > MAX_DT_TIMES_OMEGA {
        return Err(Error::InvalidScenario(format!(
            "dt = {} is too coarse for a loop at {omega:.4} rad/s (need dt <= {:.3e})",
            scenario.dt,
            MAX_DT_TIMES_OMEGA / omega
        )));
    }

    let (k, z2w, w2) = (plant.gain, 2.0 * plant.zeta * plant.omega_n, plant.omega_n * plant.omega_n);
    let r = scenario.step_amplitude;
    let control = |x: &[f64; 3]| gains.kp * (r - x[0]) + gains.ki * x[2] - gains.kd * x[1];
    let dynamics = |d: f64| {
        move |_t: f64, x: &[f64; 3]| {
            let u = gains.kp * (r - x[0]) + gains.ki * x[2] - gains.kd * x[1];
            [x[1], -z2w * x[1] - w2 * x[0] + k * (u + d), r - x[0]]
        }
    };

    let n = scenario.samples();
    let k_d = if scenario.has_disturbance() { scenario.disturbance_index() } else { n };
    let dt = scenario.dt;

    let first = integrate_steps(dynamics(0.0), [0.0; 3], 0.0, dt, k_d.min(n - 1))?;
    let mut states = first.x;
    if k_d < n {
        let start = *states.last().expect("segment has at least one sample");
        let t0 = (states.len() - 1) as f64 * dt;
        let second = integrate_steps(dynamics(scenario.disturbance_amplitude), start, t0, dt, n - states.len())?;
        states.extend_from_slice(&second.x[1..]);
    }

    let mut trace = Trace::default();
    for (i, x) in states.iter().enumerate() {
        trace.t.push(i as f64 * dt);
        trace.r.push(r);
        trace.y.push(x[0]);
        trace.u.push(control(x));
        trace.d.push(if i >= k_d { scenario.disturbance_amplitude } else { 0.0 });
    }
    Ok(trace)
}

pub fn metrics(trace: &Trace, gains: &PidGains, scenario: &ScenarioSpec) -> Result<ResponseMetrics> {
    if trace.is_empty() {
        return Err(Error::InvalidInput("empty trace".into()));
    }
    let amp = scenario.step_amplitude;
    let window = if scenario.has_disturbance() {
        scenario.disturbance_index().clamp(1, trace.len())
    } else {
        trace.len()
    };
    let t = &trace.t[..window];
    let y: Vec<f64> = trace.y[..window].iter().map(|v| v / amp).collect();

    let peak = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let percent_overshoot = ((peak - 1.0) * 100.0).max(0.0);

    let rise_time_10_90 = match (first_crossing(t, &y, 0.1), first_crossing(t, &y, 0.9)) {
        (Some(t10), Some(t90)) => Some(t90 - t10),
        _ => None,
    };

    let settling_time_2pct = settling_time(t, &y, 0.02);

    let peak_control = trace.u.iter().fold(0.0_f64, |m, u| m.max(u.abs()));
    let initial_control = trace.u[0];
    debug_assert!((initial_control - gains.kp * amp).abs() <= 1e-9 * (gains.kp * amp).abs().max(1.0));

    let iae = trapezoid(&trace.t, trace.y.iter().zip(&trace.r).map(|(y, r)| (r - y).abs()));
    let control_ise = simpson(&trace.t, trace.u.iter().map(|u| u * u));

    Ok(ResponseMetrics {
        percent_overshoot,
        rise_time_10_90,
        settling_time_2pct,
        peak_control,
        initial_control,
        iae,
        control_ise,
    })
}

fn first_crossing(t: &[f64], y: &[f64], level: f64) -> Option<f64> {
    if y[0] >= level {
        return Some(t[0]);
    }
    y.windows(2).zip(t.windows(2)).find_map(|(yw, tw)| {
        (yw[0] < level && yw[1] >= level)
            .then(|| tw[0] + (level - yw[0]) / (yw[1] - yw[0]) * (tw[1] - tw[0]))
    })
}

fn settling_time(t: &[f64], y: &[f64], band: f64) -> Option<f64> {
    let excess = |v: f64| (v - 1.0).abs() - band;
    let Some(last_out) = y.iter().rposition(|&v| excess(v) > 0.0) else {
        return Some(t[0]);
    };
    if last_out + 1 >= y.len() {
        return None;
    }
    let (e0, e1) = (excess(y[last_out]), excess(y[last_out + 1]));
    let frac = if e0 - e1 > 0.0 { e0 / (e0 - e1) } else { 1.0 };
    Some(t[last_out] + frac * (t[last_out + 1] - t[last_out]))
}

fn trapezoid(t: &[f64], f: impl Iterator<Item = f64>) -> f64 {
    let f: Vec<f64> = f.collect();
    t.windows(2).zip(f.windows(2)).map(|(tw, fw)| 0.5 * (fw[0] + fw[1]) * (tw[1] - tw[0])).sum()
}

// Composite Simpson over pairs of intervals; a trailing odd interval falls
// back to the trapezoid rule.
fn simpson(t: &[f64], f: impl Iterator<Item = f64>) -> f64 {
    let f: Vec<f64> = f.collect();
    let pairs = (t.len().saturating_sub(1)) / 2;
    let mut total = 0.0;
    for k in 0..pairs {
        let i = 2 * k;
        let (h0, h1) = (t[i + 1] - t[i], t[i + 2] - t[i + 1]);
        let h = h0 + h1;
        total += h / 6.0
            * ((2.0 - h1 / h0) * f[i] + h * h / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
    }
    let last = 2 * pairs;
    if last + 1 < t.len() {
        total += 0.5 * (f[last] + f[last + 1]) * (t[last + 1] - t[last]);
    }
    total
}
