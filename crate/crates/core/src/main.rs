use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use atxy::model::classify_phase;
use atxy::sweep::{self, fmt_float, write_csv, Manifest, ScanKind, SweepConfig};
use atxy::{Error, ModelParams, Result};

#[derive(Parser)]
#[command(
    name = "atxy",
    version,
    about = "Entanglement scans of the alternating-field XY ring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Zero-temperature phase over (γ, λ1, λ2) grids.
    Phase(RunArgs),
    /// Factorization-surface fields, phase and 𝓛 of the cold state.
    Fs(RunArgs),
    /// 𝓛(β_S) with revival/collapse detection.
    ThermalSweep(RunArgs),
    /// 𝓛 = 0 cells on a two-axis plane.
    ZeroRegion(RunArgs),
    /// 𝓛(t, λ1) after the field quench.
    ClosedScan(RunArgs),
    /// 𝓛 ≠ 0 masks on the (β_S, γ) plane at fixed times.
    Snapshot(RunArgs),
    /// Open-system trajectories of nearest-neighbour pairs.
    OpenRun(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Flat `key = value` configuration file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides as `key=value`, applied after the file.
    overrides: Vec<String>,
}

impl Command {
    fn parts(&self) -> (&'static str, ScanKind, &RunArgs) {
        match self {
            Command::Phase(a) => ("phase", ScanKind::Phase, a),
            Command::Fs(a) => ("fs", ScanKind::Fs, a),
            Command::ThermalSweep(a) => ("thermal-sweep", ScanKind::ThermalBeta, a),
            Command::ZeroRegion(a) => ("zero-region", ScanKind::ThermalRegion, a),
            Command::ClosedScan(a) => ("closed-scan", ScanKind::ClosedScan, a),
            Command::Snapshot(a) => ("snapshot", ScanKind::SnapshotGrid, a),
            Command::OpenRun(a) => ("open-run", ScanKind::OpenRun, a),
        }
    }
}

fn load_config(kind: ScanKind, args: &RunArgs) -> Result<SweepConfig> {
    let mut pairs = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            sweep::parse_key_values(&text)?
        }
        None => vec![],
    };
    for o in &args.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{o}` is not key=value")))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    SweepConfig::from_pairs(kind, &pairs)
}

fn run(command: &Command) -> Result<()> {
    let (name, kind, args) = command.parts();
    let cfg = load_config(kind, args)?;
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let start = Instant::now();
    let csv = cfg.out_dir.join(format!("{}.csv", cfg.stem()));
    let mut manifest = Manifest::new(name, &cfg);
    manifest.summary = match kind {
        ScanKind::Phase => {
            let rows = sweep::phase_map(&cfg)?;
            write_csv(
                &csv,
                &["gamma", "lambda1", "lambda2", "phase"],
                rows.iter().map(|(p, ph)| {
                    let mut r = [p.gamma, p.lambda1, p.lambda2].map(fmt_float).to_vec();
                    r.push(ph.to_string());
                    r
                }),
            )?;
            json!({ "points": rows.len() })
        }
        ScanKind::Fs => {
            let sweep = sweep::thermal_beta_sweep(&cfg)?;
            write_csv(
                &csv,
                &["gamma", "lambda1", "lambda2", "phase", "beta_s", "ln"],
                sweep.rows.iter().map(|r| {
                    let phase = ModelParams::new(r.gamma, r.lambda1, r.lambda2, 4)
                        .map(|p| classify_phase(&p).to_string());
                    let mut row = [r.gamma, r.lambda1, r.lambda2].map(fmt_float).to_vec();
                    row.push(phase.unwrap_or_default());
                    row.extend([r.beta_s, r.ln].map(fmt_float));
                    row
                }),
            )?;
            let max_ln = sweep.rows.iter().map(|r| r.ln).fold(0.0, f64::max);
            json!({ "max_ln": max_ln, "infeasible": sweep.infeasible, "unconverged": sweep.unconverged })
        }
        ScanKind::ThermalBeta => {
            let sweep = sweep::thermal_beta_sweep(&cfg)?;
            sweep.write_csv(&csv)?;
            for (p, r) in &sweep.reports {
                println!(
                    "gamma={} lambda1={:.6} lambda2={} humps={} lm1={:?} lm2={:?}",
                    p.gamma, p.lambda1, p.lambda2, r.hump_count, r.lm1, r.lm2
                );
            }
            serde_json::to_value(&sweep)?
        }
        ScanKind::ThermalRegion => {
            let map = sweep::zero_region_map(&cfg)?;
            map.write_csv(&csv)?;
            serde_json::to_value(&map)?
        }
        ScanKind::ClosedScan => {
            let scan = sweep::closed_scan(&cfg)?;
            scan.write_csv(&csv)?;
            serde_json::to_value(&scan)?
        }
        ScanKind::SnapshotGrid => {
            let grid = sweep::snapshot_grid(&cfg)?;
            grid.write_csv(&csv)?;
            serde_json::to_value(&grid)?
        }
        ScanKind::OpenRun => {
            let run = sweep::open_run(&cfg)?;
            run.write_csv(&csv)?;
            for pt in &run.points {
                for s in &pt.summaries {
                    println!(
                        "gamma={} lambda1={} beta_s={} pair=({},{}) max_ln={:.6e} support={:.3}",
                        pt.point.gamma,
                        pt.point.lambda1,
                        pt.beta_s,
                        s.pair.0,
                        s.pair.1,
                        s.max_ln,
                        s.support
                    );
                }
            }
            serde_json::to_value(&run)?
        }
    };
    manifest.outputs.push(csv.clone());
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    let manifest_path = cfg.out_dir.join(format!("{}.manifest.json", cfg.stem()));
    manifest.write(&manifest_path)?;
    report(&csv, &manifest_path);
    Ok(())
}

fn report(csv: &Path, manifest: &Path) {
    println!("wrote {}", csv.display());
    println!("wrote {}", manifest.display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
