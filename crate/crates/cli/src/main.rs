use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wgs_core::design::{design, design_reduced_gravity, Constraint, DesignMode, StorageInput};
use wgs_core::particle::Catalog;
use wgs_core::pipeline::{run_sensitivity, simulate};
use wgs_core::qr::{QrModel, QrTable};
use wgs_core::scenario::{self, Scenario};
use wgs_core::{Error, Result};

mod sweep;

/// Environment variable for the worker thread count.
const ENV_THREADS: &str = "WGS_THREADS";
/// Environment variable for the default output directory.
const ENV_OUT_DIR: &str = "WGS_OUT_DIR";

#[derive(Parser)]
#[command(name = "wgs", version, about = "Gravitational and whispering-gallery quantum state simulator")]
struct Cli {
    /// TOML file with `[[particle]]` tables added to the built-in catalog.
    #[arg(long, global = true)]
    particles: Option<PathBuf>,
    /// Worker threads (overrides WGS_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mirror geometry from survival or transit requirements.
    Design(DesignArgs),
    /// Run a scene and write its patterns as CSV.
    Simulate(SimulateArgs),
    /// Cramér-Rao bound of a scene's acceleration measurement.
    Sensitivity(SensitivityArgs),
    /// Run a scene over a grid of key values and tabulate metrics.
    Sweep(sweep::SweepArgs),
    /// List, show or export the shipped scenes.
    Scenes(ScenesArgs),
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long)]
    particle: String,
    /// Quasi-classical bounces per state formation.
    #[arg(long)]
    beta: Option<f64>,
    /// Number of state energies below the absorber cut.
    #[arg(long, default_value_t = 10.0)]
    gamma: f64,
    /// Mirror length (m).
    #[arg(long = "L")]
    length: Option<f64>,
    /// Mirror radius (m).
    #[arg(long = "R")]
    radius: Option<f64>,
    /// Beam velocity (m/s).
    #[arg(long = "v")]
    velocity: Option<f64>,
    /// Normal acceleration (m/s^2); selects the decaying-particle design.
    #[arg(long)]
    accel: Option<f64>,
    /// Mirror length in decay lengths for the decaying-particle design.
    #[arg(long, default_value_t = 3.0)]
    lifetimes: f64,
    /// Wall model: `hard`, a shipped table name or a table path. Defaults by particle.
    #[arg(long)]
    qr: Option<String>,
    /// Reduced-gravity storage bookkeeping on top of the transit design.
    #[arg(long)]
    reduced: bool,
    #[arg(long, default_value_t = 1.0)]
    storage_width: f64,
    #[arg(long, default_value_t = 2e-3)]
    loss_per_bounce: f64,
    #[arg(long, default_value_t = 5.0)]
    collision_rate: f64,
    #[arg(long)]
    observation_cap: Option<f64>,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    Up,
    Down,
}

#[derive(Args)]
pub(crate) struct SceneArgs {
    /// Shipped scene name or path to a scene file.
    scene: String,
    /// Override a scene key, e.g. `--set detector.distance_m=5.0` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Mirror orientation; `down` reverses the gravity component.
    #[arg(long, value_enum)]
    orientation: Option<OrientationArg>,
    /// Use the stationary-phase map even below z/z0 = 20.
    #[arg(long)]
    force_far_field: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// Output directory (overrides WGS_OUT_DIR; default `.`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SensitivityArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// Event count; default from the scene.
    #[arg(long)]
    events: Option<f64>,
    /// Finite-difference step (m/s^2); default from the scene or automatic.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ScenesArgs {
    /// Print the TOML of this scene.
    #[arg(long)]
    show: Option<String>,
    /// Write every shipped scene into this directory.
    #[arg(long)]
    export: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let threads = match cli.threads {
        Some(t) => Some(t),
        None => match std::env::var(ENV_THREADS) {
            Ok(s) => Some(s.parse().map_err(|_| Error::Validation(format!("{ENV_THREADS} must be an integer, got `{s}`")))?),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    }
    let catalog = match &cli.particles {
        Some(p) => Catalog::with_overrides(p)?,
        None => Catalog::default(),
    };
    match cli.command {
        Command::Design(a) => cmd_design(&catalog, a),
        Command::Simulate(a) => cmd_simulate(&catalog, a),
        Command::Sensitivity(a) => cmd_sensitivity(&catalog, a),
        Command::Sweep(a) => sweep::cmd_sweep(&catalog, a),
        Command::Scenes(a) => cmd_scenes(a),
    }
}

pub(crate) fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(ENV_OUT_DIR).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."))
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        }
    }
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

pub(crate) fn split_assignment(s: &str) -> Result<(&str, &str)> {
    s.split_once('=').ok_or_else(|| Error::Validation(format!("expected KEY=VALUE, got `{s}`")))
}

pub(crate) fn load_scene(a: &SceneArgs) -> Result<Scenario> {
    let mut scn = Scenario::resolve(&a.scene)?;
    for kv in &a.set {
        let (k, v) = split_assignment(kv)?;
        scn.set_key(k.trim(), v.trim())?;
    }
    if let Some(o) = a.orientation {
        let v = match o {
            OrientationArg::Up => "\"up\"",
            OrientationArg::Down => "\"down\"",
        };
        scn.set_key("mirror.orientation", v)?;
    }
    if a.force_far_field {
        scn.set_key("detector.force_far_field", "true")?;
    }
    Ok(scn)
}

fn qr_model(name: &str) -> Result<QrModel> {
    if name == "hard" {
        return Ok(QrModel::HardWall);
    }
    match scenario::shipped_table(name) {
        Some(t) => Ok(QrModel::Tabulated(t?)),
        None => Ok(QrModel::Tabulated(QrTable::load(Path::new(name))?)),
    }
}

fn default_table(particle: &str) -> Option<&'static str> {
    match particle {
        "H" | "hydrogen" => Some("silica_h"),
        "Hbar" | "hbar" | "antihydrogen" => Some("silica_hbar"),
        "Mu" | "mu" | "muonium" => Some("silica_mu"),
        _ => None,
    }
}

fn cmd_design(catalog: &Catalog, a: DesignArgs) -> Result<()> {
    let particle = catalog.get(&a.particle)?;
    let mut lines = Vec::new();
    let rows: Vec<(&str, f64, &str)>;
    let flags: Vec<String>;
    if let Some(accel) = a.accel {
        let v = a.velocity.ok_or_else(|| Error::Validation("acceleration design needs --v".into()))?;
        let qr = a.qr.as_deref().or(default_table(&a.particle)).map(qr_model).transpose()?;
        let r = design(particle, &DesignMode::Acceleration { accel, velocity: v, lifetimes: a.lifetimes, qr })?;
        rows = r.rows();
        flags = r.flags;
    } else if let Some(v) = a.velocity {
        let mut missing = Vec::new();
        if a.length.is_none() {
            missing.push("--L");
        }
        if a.beta.is_none() {
            missing.push("--beta");
        }
        if !missing.is_empty() {
            return Err(Error::Validation(format!("transit design is not closed; unset: {}", missing.join(", "))));
        }
        let (length, beta) = (a.length.unwrap(), a.beta.unwrap());
        if a.reduced {
            let storage = StorageInput {
                width: a.storage_width,
                loss_per_bounce: a.loss_per_bounce,
                collision_rate: a.collision_rate,
                observation_cap: a.observation_cap,
            };
            let r = design_reduced_gravity(particle, length, beta, v, a.gamma, &storage)?;
            flags = r.base.flags.clone();
            rows = r.rows();
        } else {
            let r = design(particle, &DesignMode::Transit { length, beta, velocity: v, gamma: a.gamma })?;
            rows = r.rows();
            flags = r.flags;
        }
    } else {
        let mut missing = Vec::new();
        if a.beta.is_none() {
            missing.push("--beta");
        }
        if a.length.is_none() && a.radius.is_none() {
            missing.push("--L or --R");
        }
        let table = a.qr.clone().or(default_table(&a.particle).map(String::from));
        if table.is_none() {
            missing.push("--qr");
        }
        if !missing.is_empty() {
            return Err(Error::Validation(format!("material design is not closed; unset: {}", missing.join(", "))));
        }
        let constraint = match (a.length, a.radius) {
            (_, Some(r)) => Constraint::Radius(r),
            (Some(l), None) => Constraint::Length(l),
            _ => unreachable!(),
        };
        let mirror_length = if a.radius.is_some() { a.length } else { None };
        let r = design(
            particle,
            &DesignMode::Material { qr: qr_model(&table.unwrap())?, beta: a.beta.unwrap(), gamma: a.gamma, constraint, mirror_length },
        )?;
        rows = r.rows();
        flags = r.flags;
    }
    lines.push(format!("particle = {}", particle.name));
    for (name, value, unit) in rows {
        lines.push(format!("{name} = {value:.6e} {unit}"));
    }
    for f in flags {
        lines.push(format!("flag = {f}"));
    }
    let text = lines.join("\n") + "\n";
    print!("{text}");
    if let Some(p) = a.out {
        write_file(&p, &text)?;
    }
    Ok(())
}

fn cmd_simulate(catalog: &Catalog, a: SimulateArgs) -> Result<()> {
    let scn = load_scene(&a.scene)?;
    let sim = simulate(&scn, catalog)?;
    let dir = out_dir(a.out_dir);
    for p in &sim.patterns {
        let path = dir.join(format!("{}.csv", p.stem));
        write_file(&path, &p.pattern.to_csv())?;
        println!("wrote = {}", path.display());
    }
    for (k, v) in &sim.summary {
        println!("{k} = {v}");
    }
    Ok(())
}

fn cmd_sensitivity(catalog: &Catalog, a: SensitivityArgs) -> Result<()> {
    let scn = load_scene(&a.scene)?;
    let out = run_sensitivity(&scn, catalog, a.events, a.step)?;
    let dir = out_dir(a.out_dir);
    let mut report = String::new();
    for (k, v) in &out.summary {
        report.push_str(&format!("{k} = {v}\n"));
    }
    print!("{report}");
    write_file(&dir.join(format!("{}-sensitivity.txt", scn.name)), &report)?;
    write_file(&dir.join(format!("{}-dpda.csv", scn.name)), &out.derivative.to_csv())?;
    if let Some(sh) = &out.shift {
        write_file(&dir.join(format!("{}-shift.csv", scn.name)), &sh.difference.to_csv())?;
    }
    Ok(())
}

fn cmd_scenes(a: ScenesArgs) -> Result<()> {
    if let Some(name) = a.show {
        let text = scenario::shipped_text(&name).ok_or_else(|| Error::Validation(format!("unknown scene `{name}`")))?;
        print!("{text}");
        return Ok(());
    }
    for name in scenario::shipped_names() {
        let s = Scenario::shipped(name)?;
        println!("{name} particle={} hash={}", s.particle, s.hash());
        if let Some(dir) = &a.export {
            write_file(&dir.join(format!("{name}.toml")), scenario::shipped_text(name).expect("shipped"))?;
        }
    }
    Ok(())
}
