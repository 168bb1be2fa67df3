//! `ttc`: time-to-collision from the command line.
//!
//! Exit status is 0 on success, 1 on I/O or computation errors and 2 on
//! malformed arguments.

mod output;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;
use ttc_core::dataset::{analyze_pair, load_csv};
use ttc_core::evaluation::{compare_trials, run_trials, TrialSpec};
use ttc_core::scenarios::builtin;
use ttc_core::{first_order_ttc, second_order_ttc, SearchConfig, Vec2, VehicleState};

use output::{num, sink, ttc, ttc_text, write_json};

type BoxError = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(name = "ttc", version, about = "First- and second-order time-to-collision for vehicle pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// TTC for a single pair of vehicle snapshots.
    Pair(PairArgs),
    /// Rolling TTC series for a built-in scenario.
    Scenario(ScenarioArgs),
    /// Compare the search against the fixed-step oracle on random trials.
    Evaluate(EvaluateArgs),
    /// TTC series for two vehicles of a trajectory file.
    Dataset(DatasetArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

/// Contents of a `--config` file. Keys under `[search]` override the
/// search defaults; command-line flags override the file.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CliConfig {
    #[serde(default)]
    search: Option<SearchConfig>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Args)]
struct Common {
    /// Write output here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format; each subcommand has its own default.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// TOML file with `out`, `format` and a `[search]` table.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Vehicle footprint diameter (m); also sets the region radius to twice it.
    #[arg(long, value_parser = positive)]
    phi: Option<f64>,
    /// Slack on the contact distance (m).
    #[arg(long, value_parser = non_negative)]
    contact_tol: Option<f64>,
    /// Half-width of the search region around a candidate point (m).
    #[arg(long, value_parser = positive)]
    region_radius: Option<f64>,
    /// Lateral acceleration below which motion counts as straight (m/s^2).
    #[arg(long, value_parser = non_negative)]
    lateral_threshold: Option<f64>,
    /// Relative tolerance of the adaptive integrator.
    #[arg(long, value_parser = positive)]
    rel_tol: Option<f64>,
    /// Absolute position tolerance of the adaptive integrator (m).
    #[arg(long, value_parser = positive)]
    abs_tol: Option<f64>,
    /// Width to which a collision time is refined (s).
    #[arg(long, value_parser = positive)]
    refine_tol: Option<f64>,
}

struct Settings {
    search: SearchConfig,
    out: Option<PathBuf>,
    format: Option<Format>,
}

impl Common {
    fn resolve(&self) -> Result<Settings, BoxError> {
        let file: CliConfig = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
            }
            None => CliConfig::default(),
        };
        let mut search = file.search.unwrap_or_default();
        if let Some(phi) = self.phi {
            search = search.with_phi(phi);
        }
        let set = |field: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *field = v;
            }
        };
        set(&mut search.contact_tol, self.contact_tol);
        set(&mut search.region_radius, self.region_radius);
        set(&mut search.lateral_threshold, self.lateral_threshold);
        set(&mut search.integrator_rel_tol, self.rel_tol);
        set(&mut search.integrator_abs_tol, self.abs_tol);
        set(&mut search.refine_tol, self.refine_tol);
        search.validate()?;
        Ok(Settings { search, out: self.out.clone().or(file.out), format: self.format.or(file.format) })
    }
}

#[derive(Args)]
struct PairArgs {
    /// Position of vehicle i, `x,y` (m).
    #[arg(long = "pi", value_parser = vec2, allow_hyphen_values = true)]
    p_i: Vec2,
    /// Velocity of vehicle i, `x,y` (m/s).
    #[arg(long = "vi", value_parser = vec2, allow_hyphen_values = true)]
    v_i: Vec2,
    /// Acceleration of vehicle i, `x,y` (m/s^2).
    #[arg(long = "ai", value_parser = vec2, allow_hyphen_values = true)]
    a_i: Vec2,
    /// Position of vehicle j, `x,y` (m).
    #[arg(long = "pj", value_parser = vec2, allow_hyphen_values = true)]
    p_j: Vec2,
    /// Velocity of vehicle j, `x,y` (m/s).
    #[arg(long = "vj", value_parser = vec2, allow_hyphen_values = true)]
    v_j: Vec2,
    /// Acceleration of vehicle j, `x,y` (m/s^2).
    #[arg(long = "aj", value_parser = vec2, allow_hyphen_values = true)]
    a_j: Vec2,
    /// 1 for constant-velocity extrapolation, 2 for the turning model.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    order: u8,
    /// Search horizon (s) [default: the config file's, else 100].
    #[arg(long, value_parser = positive)]
    horizon: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario number, 1 to 5.
    #[arg(long)]
    id: u32,
    /// Spacing of the TTC evaluations (s).
    #[arg(long, default_value_t = 0.1, value_parser = positive)]
    dt: f64,
    /// Length of the simulated run (s).
    #[arg(long, default_value_t = 10.0, value_parser = positive)]
    duration: f64,
    /// Search horizon of each evaluation (s).
    #[arg(long, default_value_t = 20.0, value_parser = positive)]
    horizon: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Number of random encounters.
    #[arg(long, default_value_t = 1001)]
    trials: usize,
    /// Seed of the trial generator.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Step of the fixed-step oracle (s).
    #[arg(long, default_value_t = 1e-3, value_parser = positive)]
    oracle_dt: f64,
    /// Search horizon (s) [default: the config file's, else 100].
    #[arg(long, value_parser = positive)]
    horizon: Option<f64>,
    /// Time both methods one trial at a time. Timings vary between runs.
    #[arg(long)]
    timing: bool,
    /// Keep only trials where both methods find a contact.
    #[arg(long)]
    only_finite: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DatasetArgs {
    /// Trajectory CSV with header `vehicle_id,t,x,y,vx,vy`.
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// The two vehicle ids, `A,B`.
    #[arg(long, value_parser = id_pair)]
    pair: (String, String),
    /// TTC values below this count as critical (s).
    #[arg(long, default_value_t = 5.0, value_parser = positive)]
    critical: f64,
    /// Search horizon (s) [default: the config file's, else 100].
    #[arg(long, value_parser = positive)]
    horizon: Option<f64>,
    /// Also write the JSON summary here when the main output is CSV.
    #[arg(long, value_name = "PATH")]
    summary: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

fn vec2(s: &str) -> Result<Vec2, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    let v = Vec2::new(parse(x)?, parse(y)?);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn id_pair(s: &str) -> Result<(String, String), String> {
    match s.split_once(',') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
        _ => Err(format!("expected `A,B`, got `{s}`")),
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err(format!("`{s}` must be positive")),
        Err(e) => Err(e.to_string()),
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err(format!("`{s}` must be non-negative")),
        Err(e) => Err(e.to_string()),
    }
}

fn pair(args: &PairArgs) -> Result<(), BoxError> {
    let settings = args.common.resolve()?;
    let cfg = settings.search.with_horizon(args.horizon.unwrap_or(settings.search.horizon));
    let si = VehicleState::new(args.p_i, args.v_i, args.a_i, 0.0)?;
    let sj = VehicleState::new(args.p_j, args.v_j, args.a_j, 0.0)?;
    let outcome = match args.order {
        1 => first_order_ttc(&si, &sj, cfg.phi),
        _ => second_order_ttc(&si, &sj, &cfg)?.outcome,
    };
    let mut out = sink(settings.out.as_deref())?;
    match settings.format.unwrap_or(Format::Csv) {
        Format::Csv => writeln!(out, "{}", ttc_text(outcome))?,
        Format::Json => write_json(&mut out, &json!({ "order": args.order, "ttc": ttc(outcome) }))?,
    }
    out.flush()?;
    Ok(())
}

fn scenario(args: &ScenarioArgs) -> Result<(), BoxError> {
    let settings = args.common.resolve()?;
    let mut sc = builtin(args.id)?;
    sc.step = args.dt;
    sc.sim_duration = args.duration;
    sc.prediction_horizon = args.horizon;
    let series = ttc_core::scenarios::run_series(&sc, &settings.search)?;
    let mut out = sink(settings.out.as_deref())?;
    match settings.format.unwrap_or(Format::Csv) {
        Format::Csv => series.write_csv(&mut out)?,
        Format::Json => {
            let rows: Vec<_> =
                series.rows.iter().map(|r| json!({ "t": num(r.t), "ttc1": ttc(r.ttc1), "ttc2": ttc(r.ttc2) })).collect();
            write_json(&mut out, &json!({ "scenario": sc.id, "rows": rows }))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn evaluate(args: &EvaluateArgs) -> Result<(), BoxError> {
    let settings = args.common.resolve()?;
    let mut spec = TrialSpec::new(args.seed, args.trials);
    spec.phi = settings.search.phi;
    spec.horizon = args.horizon.unwrap_or(settings.search.horizon);
    let report = if args.timing {
        let mut r = run_trials(&spec, args.oracle_dt)?;
        if args.only_finite {
            r.records.retain(|x| x.abs_error().is_some());
        }
        r
    } else {
        compare_trials(&spec, args.oracle_dt, args.only_finite)?
    };
    let mut out = sink(settings.out.as_deref())?;
    match settings.format.unwrap_or(Format::Json) {
        Format::Json => {
            let records: Vec<_> = report.records.iter().map(output::record).collect();
            let doc = json!({
                "seed": spec.seed,
                "oracle_dt": num(report.oracle_dt),
                "stats": output::stats(&report.stats),
                "trials": records,
            });
            write_json(&mut out, &doc)?;
        }
        Format::Csv => {
            writeln!(out, "index,star,oracle,abs_error")?;
            for r in &report.records {
                let err = r.abs_error().map_or_else(String::new, |e| ttc_core::format_sig(e, output::DIGITS));
                writeln!(out, "{},{},{},{err}", r.index, ttc_text(r.star), ttc_text(r.oracle))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn dataset(args: &DatasetArgs) -> Result<(), BoxError> {
    let settings = args.common.resolve()?;
    let data = load_csv(&args.input)?;
    let (a, b) = &args.pair;
    let get = |id: &String| data.get(id).ok_or_else(|| format!("{}: no vehicle `{id}`", args.input.display()));
    let cfg = settings.search.with_horizon(args.horizon.unwrap_or(settings.search.horizon));
    let analysis = analyze_pair(get(a)?, get(b)?, &cfg, args.critical)?;
    let summary = json!({
        "pair": [a, b],
        "steps": analysis.series.len(),
        "critical": num(analysis.critical),
        "count_below_critical_1d": analysis.count_below_critical_1d,
        "count_below_critical_2d": analysis.count_below_critical_2d,
    });
    let mut out = sink(settings.out.as_deref())?;
    match settings.format.unwrap_or(Format::Csv) {
        Format::Csv => analysis.series.write_csv(&mut out)?,
        Format::Json => write_json(&mut out, &summary)?,
    }
    out.flush()?;
    if let Some(path) = &args.summary {
        let mut s = sink(Some(path.as_path()))?;
        write_json(&mut s, &summary)?;
        s.flush()?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), BoxError> {
    match &cli.command {
        Command::Pair(a) => pair(a),
        Command::Scenario(a) => scenario(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Dataset(a) => dataset(a),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors and 0 for --help
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
