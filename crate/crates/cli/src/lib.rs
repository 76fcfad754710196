//! Command-line front end for the `fotune` PID tuning toolkit.

pub mod config;
pub mod format;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fotune_core::pole_placement::{closed_loop_poles, place_gains};
use fotune_core::simulate::{default_dt, metrics, simulate_closed_loop};
use fotune_core::tuner::{mcurve, two_stage_tune, TuneOptions, TuningReport};
use fotune_core::{Error, PidGains, Plant, ResponseMetrics, RiccatiPackage, ScenarioSpec, Trace};

use config::{ConfigError, RunConfig};
use format::{g, opt};

pub const MCURVE_HEADER: &str = "q,kp_hat,ki_hat,kd_hat,zero_re,zero_im,zeta_cl,omega_n_cl,wedge,stable";
pub const TRACE_HEADER: &str = "t,r,y,u,d";
pub const TUNE_HEADER: &str = "controller,q,zeta_cl,omega_n_cl,kp,ki,kd,q1,q2,q3,r,p11,p12,p13,p22,p23,p33";

const DEFAULT_Q_TO: f64 = 0.5;
const DEFAULT_Q_STEP: f64 = 0.005;

#[derive(Debug, Parser)]
#[command(name = "fotune", version, about = "Dominant pole placement, inverse LQR and fractional-order PID tuning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Place the closed-loop poles and print the PID gains.
    Place(Source),
    /// Two-stage tuning: fractional-order sweep, then inverse LQR comparison.
    Tune {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        desired_zeta: Option<f64>,
        #[arg(long)]
        q_step: Option<f64>,
    },
    /// Equivalent controllers and dominant poles over a grid of q.
    Mcurve {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        q_from: Option<f64>,
        #[arg(long)]
        q_to: Option<f64>,
        #[arg(long)]
        q_step: Option<f64>,
    },
    /// Step and load-disturbance response of one or two controllers.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Riccati solution and weights for which the gains are optimal.
    Inverse(Source),
}

#[derive(Debug, Args)]
struct Source {
    /// TOML run configuration, layered over the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in plant: p1, p2, p3 or wang-oscillatory.
    #[arg(long)]
    preset: Option<String>,
    /// Write CSV output here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Core(Error),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Core(e) => match e {
                Error::UnstableClosedLoop { .. } | Error::NonFiniteState { .. } | Error::UnstableGains => 3,
                Error::TargetUnreachable { .. } | Error::OutsideWedge { .. } => 4,
                _ => 2,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(msg) => f.write_str(msg),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("i/o: {e}"))
    }
}

type Outcome = Result<(), Failure>;

/// Run the CLI with `args` (including the program name) and return the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Place(source) => cmd_place(&source, out, err),
        Command::Tune { source, desired_zeta, q_step } => cmd_tune(&source, desired_zeta, q_step, out),
        Command::Mcurve { source, q_from, q_to, q_step } => cmd_mcurve(&source, q_from, q_to, q_step, out),
        Command::Simulate { source, dt, t_end } => cmd_simulate(&source, dt, t_end, out),
        Command::Inverse(source) => cmd_inverse(&source, out, err),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.exit_code()
        }
    }
}

fn load(source: &Source) -> Result<RunConfig, Failure> {
    let text = match &source.config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?,
        ),
        None => None,
    };
    if source.preset.is_none() && text.is_none() {
        return Err(Failure::Config("no configuration given (use --preset and/or --config)".into()));
    }
    let path = source.config.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
    Ok(config::load(source.preset.as_deref(), text.as_deref().map(|t| (path.as_str(), t)))?)
}

fn out_path(source: &Source, cfg: &RunConfig) -> Option<PathBuf> {
    source.out.clone().or_else(|| cfg.output.csv.as_ref().map(PathBuf::from))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Outcome {
    std::fs::write(path, bytes).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
}

fn gains_line(label: &str, gains: &PidGains) -> String {
    format!("{label}: kp = {}, ki = {}, kd = {}\n", g(gains.kp), g(gains.ki), g(gains.kd))
}

fn plant_line(plant: &Plant) -> String {
    format!("plant: K = {}, zeta = {}, omega_n = {}\n", g(plant.gain), g(plant.zeta), g(plant.omega_n))
}

fn stage1_gains(cfg: &RunConfig, plant: &Plant) -> Result<PidGains, Failure> {
    match cfg.gains {
        Some(gains) => Ok(gains.resolve("gains")?),
        None => Ok(place_gains(plant, &cfg.target()?)),
    }
}

fn cmd_place(source: &Source, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let cfg = load(source)?;
    let plant = cfg.plant()?;
    let target = cfg.target()?;
    let gains = place_gains(&plant, &target);
    let poles = closed_loop_poles(&plant, &gains)?;

    let mut text = plant_line(&plant);
    text += &format!("target: zeta = {}, omega_n = {}, m = {}\n", g(target.zeta), g(target.omega_n), g(target.m));
    text += &gains_line("gains", &gains);
    for (i, root) in poles.roots.iter().enumerate() {
        let sign = if root.im < 0.0 { '-' } else { '+' };
        text += &format!("pole {}: {} {sign} {}i\n", i + 1, g(root.re), g(root.im.abs()));
    }
    text += &format!(
        "dominant: zeta = {}, omega_n = {}, real pole = {}, dominance = {}\n",
        g(poles.dominant_zeta),
        g(poles.dominant_omega_n),
        g(poles.real_pole),
        g(poles.dominance_ratio)
    );
    out.write_all(text.as_bytes())?;
    if let Some(path) = out_path(source, &cfg) {
        write_file(&path, &text)?;
    }
    for w in gains.warnings().into_iter().chain(poles.dominance_warning()) {
        writeln!(err, "warning: {w}")?;
    }
    Ok(())
}

fn tune_rows(rep: &TuningReport) -> String {
    let row = |name: &str, q: f64, zeta: f64, wn: f64, gains: &PidGains, pkg: &RiccatiPackage| {
        let mut fields = vec![name.to_string(), g(q), g(zeta), g(wn), g(gains.kp), g(gains.ki), g(gains.kd)];
        fields.extend(pkg.weights.q.iter().map(|&v| g(v)));
        fields.push(g(pkg.weights.r));
        fields.extend(pkg.p.entries().iter().map(|&v| g(v)));
        fields.join(",") + "\n"
    };
    let c = &rep.comparator_target;
    format!(
        "{TUNE_HEADER}\n{}{}",
        row("lqr", 1.0, c.zeta, c.omega_n, &rep.single_stage_gains, &rep.riccati_lqr),
        row("suboptimal", rep.chosen_q, rep.achieved_zeta, rep.achieved_omega_n, &rep.suboptimal_gains, &rep.riccati_subopt),
    )
}

fn cmd_tune(source: &Source, desired: Option<f64>, q_step: Option<f64>, out: &mut dyn Write) -> Outcome {
    let cfg = load(source)?;
    let plant = cfg.plant()?;
    let target = cfg.target()?;
    let desired = desired
        .or(cfg.tune.desired_zeta)
        .ok_or_else(|| Failure::Config("desired damping not set ([tune] desired_zeta or --desired-zeta)".into()))?;
    let defaults = TuneOptions::default();
    let opts = TuneOptions {
        q_step: q_step.or(cfg.tune.q_step).unwrap_or(defaults.q_step),
        r_weight: cfg.tune.r.unwrap_or(defaults.r_weight),
        refine: cfg.tune.refine.unwrap_or(defaults.refine),
        achieved_sig_digits: cfg.tune.achieved_sig_digits.or(defaults.achieved_sig_digits),
        ..defaults
    };
    let rep = two_stage_tune(&plant, &target, desired, &opts)?;

    let rows = tune_rows(&rep);
    let mut text = plant_line(&plant);
    let t = &rep.stage1_target;
    text += &format!("stage 1 target: zeta = {}, omega_n = {}, m = {}\n", g(t.zeta), g(t.omega_n), g(t.m));
    text += &gains_line("stage 1 gains", &rep.stage1_gains);
    text += &format!("desired zeta: {}\nchosen q: {}\n", g(desired), g(rep.chosen_q));
    text += &gains_line("suboptimal gains", &rep.suboptimal_gains);
    text += &format!("achieved: zeta = {}, omega_n = {}\n", g(rep.achieved_zeta), g(rep.achieved_omega_n));
    let c = &rep.comparator_target;
    text += &format!("comparator target: zeta = {}, omega_n = {}, m = {}\n", g(c.zeta), g(c.omega_n), g(c.m));
    text += &gains_line("single-stage lqr gains", &rep.single_stage_gains);
    text += &format!(
        "eig(P_lqr - P_subopt): {}, {}, {}\nsuboptimal cost lower: {}\n",
        g(rep.delta_p_eigs[0]),
        g(rep.delta_p_eigs[1]),
        g(rep.delta_p_eigs[2]),
        rep.cost_verdict
    );
    text += &format!(
        "initial control: lqr = {}, suboptimal = {}\n",
        g(rep.initial_control_lqr),
        g(rep.initial_control_subopt)
    );
    text += &format!(
        "care residual: lqr = {}, suboptimal = {}\n\n",
        g(rep.riccati_lqr.care_residual),
        g(rep.riccati_subopt.care_residual)
    );
    text += &rows;
    out.write_all(text.as_bytes())?;
    if let Some(path) = out_path(source, &cfg) {
        write_file(&path, &rows)?;
    }
    Ok(())
}

fn cmd_mcurve(source: &Source, q_from: Option<f64>, q_to: Option<f64>, q_step: Option<f64>, out: &mut dyn Write) -> Outcome {
    let cfg = load(source)?;
    let plant = cfg.plant()?;
    let stage1 = stage1_gains(&cfg, &plant)?;
    let m = &cfg.mcurve;
    let points = mcurve(
        &plant,
        &stage1,
        q_from.or(m.q_from).unwrap_or(1.0),
        q_to.or(m.q_to).unwrap_or(DEFAULT_Q_TO),
        q_step.or(m.q_step).unwrap_or(DEFAULT_Q_STEP),
    )?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(MCURVE_HEADER.split(',')).map_err(csv_failure)?;
    for p in &points {
        let gains = p.equivalent_gains;
        csv.write_record([
            g(p.q),
            opt(gains.map(|k| k.kp)),
            opt(gains.map(|k| k.ki)),
            opt(gains.map(|k| k.kd)),
            opt(p.s_zero.map(|z| z.re)),
            opt(p.s_zero.map(|z| z.im)),
            opt(p.dominant_zeta),
            opt(p.dominant_omega_n),
            p.wedge.map(|w| w.as_str().to_string()).unwrap_or_default(),
            p.stable.to_string(),
        ])
        .map_err(csv_failure)?;
    }
    let bytes = csv.into_inner().map_err(|e| Failure::Config(e.to_string()))?;
    emit_csv(source, &cfg, &bytes, out)
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure::Config(format!("csv: {e}"))
}

fn emit_csv(source: &Source, cfg: &RunConfig, bytes: &[u8], out: &mut dyn Write) -> Outcome {
    match out_path(source, cfg) {
        Some(path) => write_file(&path, bytes),
        None => Ok(out.write_all(bytes)?),
    }
}

fn trace_csv(trace: &Trace) -> Result<Vec<u8>, Failure> {
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(TRACE_HEADER.split(',')).map_err(csv_failure)?;
    for i in 0..trace.len() {
        csv.write_record([g(trace.t[i]), g(trace.r[i]), g(trace.y[i]), g(trace.u[i]), g(trace.d[i])])
            .map_err(csv_failure)?;
    }
    csv.into_inner().map_err(|e| Failure::Config(e.to_string()))
}

fn metrics_block(label: &str, gains: &PidGains, m: &ResponseMetrics) -> String {
    format!(
        "[{label}]\nkp = {}\nki = {}\nkd = {}\npercent_overshoot = {}\nrise_time_10_90 = {}\n\
         settling_time_2pct = {}\npeak_control = {}\ninitial_control = {}\niae = {}\ncontrol_ise = {}\n",
        g(gains.kp),
        g(gains.ki),
        g(gains.kd),
        g(m.percent_overshoot),
        opt(m.rise_time_10_90),
        opt(m.settling_time_2pct),
        g(m.peak_control),
        g(m.initial_control),
        g(m.iae),
        g(m.control_ise)
    )
}

/// `trace.csv` -> `trace-compare.csv`
fn compare_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-compare.{}", ext.to_string_lossy()),
        None => format!("{stem}-compare"),
    };
    path.with_file_name(name)
}

fn cmd_simulate(source: &Source, dt: Option<f64>, t_end: Option<f64>, out: &mut dyn Write) -> Outcome {
    let mut cfg = load(source)?;
    let plant = cfg.plant()?;
    let primary = stage1_gains(&cfg, &plant)?;
    let poles = closed_loop_poles(&plant, &primary)?;
    let default_t_end = 20.0 / (poles.dominant_zeta * poles.dominant_omega_n);
    let mut default_step = default_dt(&plant);
    while default_step * poles.dominant_omega_n > 0.05 {
        default_step /= 10.0;
    }
    if dt.is_some() {
        cfg.scenario.dt = dt;
    }
    if t_end.is_some() {
        cfg.scenario.t_end = t_end;
    }
    let scenario: ScenarioSpec = cfg.scenario(default_t_end, default_step);

    let trace = simulate_closed_loop(&plant, &primary, &scenario)?;
    let m = metrics(&trace, &primary, &scenario)?;
    let mut text = plant_line(&plant);
    text += &format!(
        "scenario: t_end = {}, dt = {}, step = {}, disturbance = {} at t = {}\n\n",
        g(scenario.t_end),
        g(scenario.dt),
        g(scenario.step_amplitude),
        g(scenario.disturbance_amplitude),
        g(scenario.disturbance_time)
    );
    text += &metrics_block("primary", &primary, &m);

    let path = out_path(source, &cfg);
    if let Some(path) = &path {
        write_file(path, &trace_csv(&trace)?)?;
    }
    if let Some(other) = cfg.compare.map(|c| c.resolve("compare")).transpose()? {
        let other_trace = simulate_closed_loop(&plant, &other, &scenario)?;
        let om = metrics(&other_trace, &other, &scenario)?;
        text += "\n";
        text += &metrics_block("compare", &other, &om);
        text += &format!(
            "\n[comparison]\ninitial_control_ratio = {}\npeak_control_ratio = {}\ncontrol_ise_ratio = {}\nmax_output_difference = {}\n",
            g(m.initial_control / om.initial_control),
            g(m.peak_control / om.peak_control),
            g(m.control_ise / om.control_ise),
            g(trace.max_output_difference(&other_trace))
        );
        if let Some(path) = &path {
            write_file(&compare_path(path), &trace_csv(&other_trace)?)?;
        }
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn cmd_inverse(source: &Source, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let cfg = load(source)?;
    let plant = cfg.plant()?;
    let gains = stage1_gains(&cfg, &plant)?;
    let pkg = RiccatiPackage::from_gains(&plant, &gains, cfg.tune.r.unwrap_or(fotune_core::lqr_inverse::DEFAULT_R))?;
    let p = &pkg.p;
    let mut text = plant_line(&plant);
    text += &gains_line("gains", &gains);
    text += &format!("R = {}\n", g(pkg.weights.r));
    text += &format!("Q = diag({}, {}, {})\n", g(pkg.weights.q[0]), g(pkg.weights.q[1]), g(pkg.weights.q[2]));
    text += "P =\n";
    for row in [[p.m11, p.m12, p.m13], [p.m12, p.m22, p.m23], [p.m13, p.m23, p.m33]] {
        text += &format!("  {} {} {}\n", g(row[0]), g(row[1]), g(row[2]));
    }
    text += &format!("care residual = {}\n", g(pkg.care_residual));
    out.write_all(text.as_bytes())?;
    if let Some(path) = out_path(source, &cfg) {
        write_file(&path, &text)?;
    }
    for w in pkg.weights.warnings() {
        writeln!(err, "warning: {w}")?;
    }
    Ok(())
}
