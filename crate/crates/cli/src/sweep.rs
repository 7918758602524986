use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::sync::mpsc;

use clap::Args;
use rayon::prelude::*;

use wgs_core::particle::Catalog;
use wgs_core::pipeline::{run_sensitivity, simulate};
use wgs_core::propagation::{fringe_contrast, Axis};
use wgs_core::scenario::Scenario;
use wgs_core::{Error, Result};

use crate::{load_scene, out_dir, split_assignment, write_file, SceneArgs};

#[derive(Args)]
pub(crate) struct SweepArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// `key=v1,v2,...` or `key=start:stop:count` (repeatable; Cartesian product, first slowest).
    #[arg(long = "param", value_name = "KEY=VALUES", required = true)]
    params: Vec<String>,
    /// Also compute the sensitivity bound at every point.
    #[arg(long)]
    sensitivity: bool,
    /// Result CSV; default `<out-dir>/<scene>-sweep.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Completed-row journal; default `<out>.journal`. Rerunning resumes from it.
    #[arg(long)]
    journal: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

const METRICS: [&str; 8] = [
    "status",
    "populated_states_min",
    "populated_states_max",
    "z_over_z0_min",
    "total_flux",
    "fringe_contrast",
    "fringe_contrast_convolved",
    "sigma_relative",
];

fn parse_values(spec: &str) -> Result<Vec<String>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Validation(format!("not a number in range `{spec}`")));
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let n: usize = parts[2].trim().parse().map_err(|_| Error::Validation(format!("bad count in range `{spec}`")))?;
        if n == 0 {
            return Err(Error::Validation(format!("empty range `{spec}`")));
        }
        return Ok((0..n)
            .map(|i| if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 })
            .map(|v| format!("{v:e}"))
            .collect());
    }
    let vals: Vec<String> = spec.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if vals.is_empty() {
        return Err(Error::Validation(format!("no values in `{spec}`")));
    }
    Ok(vals)
}

fn cartesian(axes: &[(String, Vec<String>)]) -> Vec<Vec<String>> {
    let mut points = vec![Vec::new()];
    for (_, vals) in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                vals.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v.clone());
                    q
                })
            })
            .collect();
    }
    points
}

fn clean(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

fn metrics(base: &Scenario, catalog: &Catalog, keys: &[String], values: &[String], with_sens: bool) -> BTreeMap<&'static str, String> {
    let mut m: BTreeMap<&'static str, String> = METRICS.iter().map(|k| (*k, String::new())).collect();
    let mut run = || -> Result<()> {
        let mut scn = base.clone();
        for (k, v) in keys.iter().zip(values) {
            scn.set_key(k, v)?;
        }
        let sim = simulate(&scn, catalog)?;
        let first_x = sim.patterns.iter().find(|p| p.pattern.axis == Axis::X && !p.stem.ends_with("-convolved"));
        let first_c = sim.patterns.iter().find(|p| p.stem.ends_with("-convolved"));
        // variants of one point are pooled: extremes over all of them
        let ends = |k: &'static str| sim.summary.iter().filter(move |(key, _)| key.ends_with(k)).map(|(_, v)| v.as_str());
        let ns: Vec<usize> = ends("populated_states").flat_map(|v| v.split(';')).filter_map(|s| s.parse().ok()).collect();
        m.insert("populated_states_min", ns.iter().min().map_or(String::new(), |n| n.to_string()));
        m.insert("populated_states_max", ns.iter().max().map_or(String::new(), |n| n.to_string()));
        let ratio = ends("z_over_z0_min").filter_map(|v| v.parse::<f64>().ok()).reduce(f64::min);
        m.insert("z_over_z0_min", ratio.map_or(String::new(), |r| format!("{r:.4e}")));
        if let Some(p) = sim.patterns.first() {
            m.insert("total_flux", format!("{:.6e}", p.pattern.total()));
        }
        if let Some(p) = first_x {
            m.insert("fringe_contrast", format!("{:.6e}", fringe_contrast(&p.pattern)));
        }
        if let Some(p) = first_c {
            m.insert("fringe_contrast_convolved", format!("{:.6e}", fringe_contrast(&p.pattern)));
        }
        if with_sens {
            let s = run_sensitivity(&scn, catalog, None, None)?;
            m.insert("sigma_relative", format!("{:.6e}", s.relative));
        }
        Ok(())
    };
    let status = match run() {
        Ok(()) => "ok".to_string(),
        Err(e) => clean(&format!("error({}): {e}", e.exit_code())),
    };
    m.insert("status", status);
    m
}

pub(crate) fn cmd_sweep(catalog: &Catalog, a: SweepArgs) -> Result<()> {
    let base = load_scene(&a.scene)?;
    base.validate(catalog)?;
    let mut axes = Vec::new();
    for p in &a.params {
        let (k, v) = split_assignment(p)?;
        let vals = parse_values(v)?;
        // reject unknown keys before launching the grid
        base.clone().set_key(k.trim(), &vals[0])?;
        axes.push((k.trim().to_string(), vals));
    }
    let keys: Vec<String> = axes.iter().map(|(k, _)| k.clone()).collect();
    let points = cartesian(&axes);
    let out = a.out.unwrap_or_else(|| out_dir(a.out_dir.clone()).join(format!("{}-sweep.csv", base.name)));
    let journal = a.journal.unwrap_or_else(|| {
        let mut p = out.clone().into_os_string();
        p.push(".journal");
        PathBuf::from(p)
    });
    let signature = format!("# sweep scene_hash={} params={} sensitivity={}", base.hash(), a.params.join(" "), a.sensitivity);

    let mut done: BTreeMap<usize, String> = BTreeMap::new();
    if journal.exists() {
        let text = std::fs::read_to_string(&journal).map_err(|e| Error::io(journal.display().to_string(), e))?;
        let mut lines = text.lines();
        if lines.next() != Some(signature.as_str()) {
            return Err(Error::Validation(format!(
                "journal {} belongs to a different sweep; remove it to start over",
                journal.display()
            )));
        }
        for line in lines {
            // a torn final line from an interrupted run is skipped and recomputed
            let Some((idx, _)) = line.split_once(',') else { continue };
            let Ok(i) = idx.parse::<usize>() else { continue };
            if line.split(',').count() == 1 + keys.len() + METRICS.len() && i < points.len() {
                done.insert(i, line.to_string());
            }
        }
    } else {
        write_file(&journal, &format!("{signature}\n"))?;
    }
    let pending: Vec<usize> = (0..points.len()).filter(|i| !done.contains_key(i)).collect();
    eprintln!("sweep: {} points, {} already in journal", points.len(), done.len());

    let mut file = std::fs::OpenOptions::new()
        .append(true)
        .open(&journal)
        .map_err(|e| Error::io(journal.display().to_string(), e))?;
    let (tx, rx) = mpsc::channel::<(usize, String)>();
    let io_result = std::thread::scope(|s| {
        s.spawn(|| {
            pending.par_iter().for_each_with(tx, |tx, &i| {
                let m = metrics(&base, catalog, &keys, &points[i], a.sensitivity);
                let mut row = vec![i.to_string()];
                row.extend(points[i].iter().map(|v| clean(v)));
                row.extend(METRICS.iter().map(|k| m[k].clone()));
                let _ = tx.send((i, row.join(",")));
            });
        });
        // single writer: every completed row is appended and flushed before the next
        for (i, line) in rx {
            writeln!(file, "{line}").and_then(|_| file.flush()).map_err(|e| Error::io(journal.display().to_string(), e))?;
            done.insert(i, line);
        }
        Ok::<(), Error>(())
    });
    io_result?;

    let mut csv = String::new();
    csv.push_str(&format!("# scene = {}\n# scene_hash = {}\n", base.name, base.hash()));
    csv.push_str(&format!("# params = {}\n", a.params.join(" ")));
    csv.push_str(&format!("index,{},{}\n", keys.join(","), METRICS.join(",")));
    for line in done.values() {
        csv.push_str(line);
        csv.push('\n');
    }
    write_file(&out, &csv)?;
    println!("wrote = {}", out.display());
    Ok(())
}
