use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use optpgg::dynamics::{classify_long_run, integrate, ClassifyControls, IntegrationControls, SampleCadence, Trajectory};
use optpgg::equilibria::{edge_reports_json, equilibria_json, invasion_map, stationary_points, SeedOutcome};
use optpgg::format::fmt_f64;
use optpgg::sweep::{run_sweep, SweepConfig};
use optpgg::{brute_force_payoffs, mean_payoffs, payoff_gap, population_mean, GameParams, SimplexState};

use crate::args::{AnalysisArgs, Command, Common, Format, OracleArgs, PayoffArgs, SimulateArgs, SweepArgs};

/// Deviation above which `payoff --oracle --strict` fails.
const STRICT_ORACLE_TOL: f64 = 1e-8;

#[derive(Debug)]
pub enum Failure {
    Clap(clap::Error),
    /// Bad arguments or parameters; exit code 2.
    Usage(anyhow::Error),
    /// Integration or verification failed; exit code 3.
    Numerical(anyhow::Error),
    /// Anything else, mostly I/O; exit code 1.
    Other(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Clap(_) | Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Other(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Clap(e) => write!(f, "{e}"),
            Failure::Usage(e) | Failure::Numerical(e) | Failure::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<optpgg::Error> for Failure {
    fn from(e: optpgg::Error) -> Self {
        use optpgg::Error as E;
        match e {
            E::InvalidParameter { .. }
            | E::InvalidState { .. }
            | E::Domain { .. }
            | E::UndefinedOrientation
            | E::Precondition(_)
            | E::GeometryMismatch(_) => Failure::Usage(e.into()),
            E::StepSizeUnderflow { .. } | E::StepLimit { .. } | E::TrajectoryTooShort(_) => Failure::Numerical(e.into()),
            E::Io(_) | E::Json(_) => Failure::Other(e.into()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.into())
    }
}

type Outcome = Result<(), Failure>;

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Payoff(a) => payoff(a),
        Command::Simulate(a) => simulate(a),
        Command::Equilibria(a) => equilibria(a),
        Command::Invasion(a) => invasion(a),
        Command::Sweep(a) => sweep(a),
        Command::OracleCheck(a) => oracle_check(a),
    }
}

fn game_params(c: &Common) -> Result<GameParams, Failure> {
    Ok(GameParams::new(c.m, c.r, c.alpha, c.beta, c.mu)?)
}

fn integration_controls(c: &Common) -> IntegrationControls {
    IntegrationControls::default().with_tolerances(c.rel_tol, c.abs_tol)
}

fn resolved(c: &Common, command: &str, format: Format) -> Value {
    json!({
        "command": command,
        "M": c.m,
        "r": c.r,
        "alpha": c.alpha,
        "beta": c.beta,
        "mu": c.mu,
        "t_max": c.t_max,
        "rel_tol": c.rel_tol,
        "abs_tol": c.abs_tol,
        "seed": c.seed,
        "format": format.as_str(),
        "output": c.output.as_ref().map(|p| p.display().to_string()),
    })
}

/// `run.csv` -> `run.meta.json`
pub fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension("meta.json")
}

fn emit(c: &Common, body: &str) -> Result<(), Failure> {
    match &c.output {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())).map_err(Failure::Other),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn emit_sidecar(c: &Common, meta: &Value) -> Result<(), Failure> {
    if let Some(path) = &c.output {
        let side = sidecar_path(path);
        let text = serde_json::to_string_pretty(meta).map_err(|e| Failure::Other(e.into()))? + "\n";
        fs::write(&side, text).with_context(|| format!("writing {}", side.display())).map_err(Failure::Other)?;
    }
    Ok(())
}

/// Human-readable notes go to stdout when the data went to a file.
fn note(c: &Common, text: &str) {
    if c.output.is_some() {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
}

fn json_text(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serialisable") + "\n"
}

fn payoff(a: PayoffArgs) -> Outcome {
    let c = &a.common;
    let format = c.format.unwrap_or(Format::Json);
    let params = game_params(c)?;
    let state = SimplexState::from_xy(a.x, a.y)?;
    let p = mean_payoffs(&params, &state);
    let mean = population_mean(&state, &p);
    let gap = payoff_gap(&params, state.z())?;
    let oracle = a.oracle.then(|| {
        let q = brute_force_payoffs(&params, &state);
        (q, p.max_abs_diff(&q))
    });

    let body = match format {
        Format::Json => {
            let mut v = json!({
                "config": resolved(c, "payoff", format),
                "state": state.as_array(),
                "pi_c": p.pi_c,
                "pi_d": p.pi_d,
                "pi_n": p.pi_n,
                "mean": mean,
                "gap": gap,
            });
            if let Some((q, dev)) = &oracle {
                v["oracle"] = json!({"pi_c": q.pi_c, "pi_d": q.pi_d, "pi_n": q.pi_n, "max_deviation": dev});
            }
            json_text(&v)
        }
        Format::Csv => {
            let mut header = "x,y,z,pi_c,pi_d,pi_n,mean,gap".to_string();
            let mut row: Vec<f64> = vec![state.x(), state.y(), state.z(), p.pi_c, p.pi_d, p.pi_n, mean, gap];
            if let Some((q, dev)) = &oracle {
                header.push_str(",oracle_pi_c,oracle_pi_d,oracle_pi_n,max_deviation");
                row.extend([q.pi_c, q.pi_d, q.pi_n, *dev]);
            }
            let row: Vec<String> = row.into_iter().map(fmt_f64).collect();
            format!("{header}\n{}\n", row.join(","))
        }
    };
    emit(c, &body)?;
    emit_sidecar(c, &json!({"config": resolved(c, "payoff", format), "x": a.x, "y": a.y, "oracle": a.oracle}))?;

    if let (true, Some((_, dev))) = (a.strict, oracle) {
        if dev > STRICT_ORACLE_TOL {
            return Err(Failure::Numerical(anyhow!(
                "closed form and enumeration differ by {dev:e} (> {STRICT_ORACLE_TOL:e})"
            )));
        }
    }
    Ok(())
}

fn trajectory_body(traj: &Trajectory, format: Format) -> Result<String, Failure> {
    Ok(match format {
        Format::Csv => {
            let mut buf = Vec::new();
            traj.write_csv(&mut buf)?;
            String::from_utf8(buf).expect("ASCII output")
        }
        Format::Json => json_text(&json!({
            "times": traj.times,
            "states": traj.states.iter().map(|s| s.as_array()).collect::<Vec<_>>(),
        })),
    })
}

fn simulate(a: SimulateArgs) -> Outcome {
    let c = &a.common;
    let format = c.format.unwrap_or(Format::Csv);
    let params = game_params(c)?;
    let initial = match (a.x0, a.y0) {
        (None, None) => SimplexState::BARYCENTER,
        (Some(x), Some(y)) => SimplexState::from_xy(x, y)?,
        _ => return Err(Failure::Usage(anyhow!("--x0 and --y0 must be given together"))),
    };
    let controls = integration_controls(c).with_cadence(SampleCadence::Interval(a.sample_dt));

    let (traj, failure) = match integrate(&params, &initial, c.t_max, &controls) {
        Ok(t) => (t, None),
        Err(optpgg::Error::StepSizeUnderflow { t, h, partial }) => {
            (*partial, Some(format!("step size underflow at t = {t} (h = {h:e})")))
        }
        Err(optpgg::Error::StepLimit { t, partial }) => (*partial, Some(format!("step limit reached at t = {t}"))),
        Err(e) => return Err(e.into()),
    };
    emit(c, &trajectory_body(&traj, format)?)?;

    let classification = if failure.is_none() {
        Some(classify_long_run(&traj, &ClassifyControls::default()))
    } else {
        None
    };
    let class_json = match &classification {
        Some(Ok(run)) => json!({
            "regime": run.regime.as_str(),
            "F_C": run.f_c,
            "final_state": run.final_state.as_array(),
            "tail_mean": run.tail_mean.as_array(),
            "tail_variation": run.tail_variation,
            "amplitude": run.amplitude,
            "extinct": run.extinct,
        }),
        Some(Err(e)) => json!({"unavailable": e.to_string()}),
        None => Value::Null,
    };
    let mut config = resolved(c, "simulate", format);
    config["x0"] = json!(initial.x());
    config["y0"] = json!(initial.y());
    config["sample_dt"] = json!(a.sample_dt);
    emit_sidecar(
        c,
        &json!({
            "config": config,
            "initial": initial.as_array(),
            "status": if failure.is_some() { "partial" } else { "complete" },
            "partial": failure.is_some(),
            "error": failure,
            "t_reached": traj.t_max(),
            "samples": traj.len(),
            "classification": class_json,
            "stats": traj.stats,
        }),
    )?;

    if let Some(msg) = failure {
        return Err(Failure::Numerical(anyhow!("{msg}; partial trajectory written")));
    }
    match classification {
        Some(Ok(run)) => {
            let f = run.final_state;
            note(
                c,
                &format!(
                    "regime: {}\nF_C: {}\nfinal: {} {} {}",
                    run.regime,
                    fmt_f64(run.f_c),
                    fmt_f64(f.x()),
                    fmt_f64(f.y()),
                    fmt_f64(f.z())
                ),
            );
        }
        Some(Err(e)) => note(c, &format!("regime: unavailable ({e})")),
        None => {}
    }
    Ok(())
}

fn equilibria(a: AnalysisArgs) -> Outcome {
    let c = &a.common;
    let format = c.format.unwrap_or(Format::Json);
    let params = game_params(c)?;
    let found = stationary_points(&params);
    let body = match format {
        Format::Json => json_text(&equilibria_json(&found.equilibria)),
        Format::Csv => {
            let mut s = String::from("kind,x,y,z,re1,im1,re2,im2,stability\n");
            for e in &found.equilibria {
                let [x, y, z] = e.location.as_array();
                let [(r1, i1), (r2, i2)] = e.eigenvalues;
                let nums: Vec<String> = [x, y, z, r1, i1, r2, i2].into_iter().map(fmt_f64).collect();
                s.push_str(&format!("{},{},{}\n", e.kind.as_str(), nums.join(","), e.stability.as_str()));
            }
            s
        }
    };
    emit(c, &body)?;
    let mut config = resolved(c, "equilibria", format);
    config["analysis_mu"] = json!(0.0);
    emit_sidecar(c, &json!({"config": config, "newton": found.newton}))?;
    let failed = found
        .newton
        .iter()
        .filter(|s| !matches!(s.outcome, SeedOutcome::Converged { .. } | SeedOutcome::Exterior { .. }))
        .count();
    if failed > 0 {
        note(c, &format!("note: {failed} of {} Newton seeds did not converge", found.newton.len()));
    }
    Ok(())
}

fn invasion(a: AnalysisArgs) -> Outcome {
    let c = &a.common;
    let format = c.format.unwrap_or(Format::Json);
    let params = game_params(c)?;
    let reports = invasion_map(&params);
    let body = match format {
        Format::Json => json_text(&edge_reports_json(&reports)),
        Format::Csv => {
            let mut s = String::from("edge,label,root_s,root_x,root_y,root_z,root_stability,nonhyperbolic\n");
            for r in &reports {
                let root = match &r.interior_root {
                    Some(root) => {
                        let [x, y, z] = root.location.as_array();
                        let stab = serde_json::to_value(root.stability).expect("serialisable");
                        format!(
                            "{},{},{},{},{}",
                            fmt_f64(root.s),
                            fmt_f64(x),
                            fmt_f64(y),
                            fmt_f64(z),
                            stab.as_str().unwrap_or("")
                        )
                    }
                    None => ",,,,".to_string(),
                };
                s.push_str(&format!("{},{},{root},{}\n", r.edge, r.label, r.nonhyperbolic));
            }
            s
        }
    };
    emit(c, &body)?;
    let mut config = resolved(c, "invasion", format);
    config["analysis_mu"] = json!(0.0);
    emit_sidecar(c, &json!({"config": config}))?;
    Ok(())
}

fn sweep(a: SweepArgs) -> Outcome {
    let c = &a.common;
    let format = c.format.unwrap_or(Format::Csv);
    let base = GameParams::new(c.m, c.r, 0.0, 0.0, c.mu)?;
    let mut config = SweepConfig::new(base);
    config.alpha_range = (a.alpha_min, a.alpha_max);
    config.beta_range = (a.beta_min, a.beta_max);
    config.grid_n = a.grid_n;
    config.t_max = c.t_max;
    config.integration = integration_controls(c);
    config.threshold = a.threshold;
    if !a.starts.is_empty() {
        config.initial_conditions = a
            .starts
            .iter()
            .map(|&(x, y)| SimplexState::from_xy(x, y))
            .collect::<optpgg::Result<_>>()?;
    }
    config.validate()?;

    let grid = match c.jobs {
        Some(0) => return Err(Failure::Usage(anyhow!("--jobs must be at least 1"))),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Other(e.into()))?
            .install(|| run_sweep(&config))?,
        None => run_sweep(&config)?,
    };

    let body = match format {
        Format::Csv => grid.to_csv_string(),
        Format::Json => json_text(&json!(grid
            .cells
            .iter()
            .map(|cell| json!({
                "alpha": cell.alpha,
                "beta": cell.beta,
                "F_C": if cell.f_c.is_nan() { Value::Null } else { json!(cell.f_c) },
                "regime": cell.regime.as_str(),
                "theta_deg": if cell.theta_deg.is_nan() { Value::Null } else { json!(cell.theta_deg) },
                "svo": cell.svo_str(),
            }))
            .collect::<Vec<_>>())),
    };
    emit(c, &body)?;

    let mut meta = config.metadata();
    meta["command"] = json!("sweep");
    meta["format"] = json!(format.as_str());
    emit_sidecar(c, &meta)?;

    let survivors = grid.survivors(config.threshold).count();
    let errors: Vec<_> = grid.cells.iter().filter(|cell| cell.error.is_some()).collect();
    note(
        c,
        &format!(
            "cells: {}, F_C > {}: {survivors}, failed: {}",
            grid.cells.len(),
            config.threshold,
            errors.len()
        ),
    );
    if let Some(first) = errors.first() {
        return Err(Failure::Numerical(anyhow!(
            "{} cells failed to integrate, first at alpha = {}, beta = {}: {}",
            errors.len(),
            first.alpha,
            first.beta,
            first.error.as_deref().unwrap_or("")
        )));
    }
    Ok(())
}

fn random_case(rng: &mut ChaCha8Rng) -> (GameParams, SimplexState) {
    loop {
        let m = rng.gen_range(3..=8u32);
        let r = rng.gen_range(1.0..m as f64);
        let alpha = rng.gen_range(-1.0..=1.0);
        let beta = rng.gen_range(-1.0..=1.0);
        let Ok(params) = GameParams::new(m, r, alpha, beta, 0.0) else {
            continue;
        };
        // uniform on the simplex
        let e: [f64; 3] = std::array::from_fn(|_| -(1.0 - rng.gen::<f64>()).ln());
        let sum: f64 = e.iter().sum();
        if let Some(state) = SimplexState::project(e.map(|v| v / sum)) {
            return (params, state);
        }
    }
}

fn oracle_check(a: OracleArgs) -> Outcome {
    let c = &a.common;
    if a.trials == 0 {
        return Err(Failure::Usage(anyhow!("--trials must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut worst = (0.0f64, None);
    let mut worst_gap = 0.0f64;
    for _ in 0..a.trials {
        let (params, state) = random_case(&mut rng);
        let p = mean_payoffs(&params, &state);
        let dev = p.max_abs_diff(&brute_force_payoffs(&params, &state));
        let gap = ((p.pi_d - p.pi_c) - payoff_gap(&params, state.z())?).abs();
        worst_gap = worst_gap.max(gap);
        if dev >= worst.0 {
            worst = (dev, Some((params, state)));
        }
    }
    let pass = worst.0 <= a.tol;
    let (params, state) = worst.1.expect("at least one trial");
    let report = json!({
        "config": resolved(c, "oracle-check", Format::Json),
        "trials": a.trials,
        "tolerance": a.tol,
        "max_deviation": worst.0,
        "max_gap_deviation": worst_gap,
        "worst_case": {
            "M": params.group_size(),
            "r": params.enhancement(),
            "alpha": params.alpha(),
            "beta": params.beta(),
            "state": state.as_array(),
        },
        "pass": pass,
    });
    emit(c, &json_text(&report))?;
    if !pass {
        return Err(Failure::Numerical(anyhow!(
            "max deviation {:e} exceeds tolerance {:e}",
            worst.0,
            a.tol
        )));
    }
    Ok(())
}
