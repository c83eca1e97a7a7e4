//! bicgrate: bound states in the radiation continuum for periodic double
//! arrays of thin dielectric cylinders (TM polarization), and the associated
//! scattering observables.
//!
//! Subcommands: `thresholds`, `bound-search`, `scatter-sweep`, `field-map`,
//! `diophantine`. Grids/sweeps go to CSV, record sets to JSON; every output
//! file gets a `.manifest.json` sidecar. Exit codes: 0 success, 2 usage,
//! 3 existence gate failed, 4 no-root / singular-only result.
//!
//! All physical inputs are in period units. `BICGRATE_THREADS` caps the
//! sweep parallelism.

mod manifest;

use bicgrate_core::bound_states::{
    diophantine_n, find_below, find_continuum_c1, find_continuum_c2, BoundStateRecord,
};
use bicgrate_core::channels::{thresholds, BlochPoint};
use bicgrate_core::error::Error as CoreError;
use bicgrate_core::fields::{bound_field, bloch_residual, scattering_field, FieldGrid, GridSpec};
use bicgrate_core::lattice_sums::ArrayConfig;
use bicgrate_core::scattering::{solve, Direction};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_USAGE: u8 = 2;
const EXIT_GATE: u8 = 3;
const EXIT_NO_RESULT: u8 = 4;

#[derive(Parser)]
#[command(name = "bicgrate", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Diffraction thresholds 𝓔_{±n}(kx) in nondecreasing order (CSV).
    Thresholds(ThresholdsArgs),
    /// Locate bound states (JSON records).
    BoundSearch(BoundSearchArgs),
    /// Specular-reflection sweep over (h, k) (CSV).
    ScatterSweep(ScatterSweepArgs),
    /// Field map E(x, z) for a bound-state record or a driven solve (CSV).
    FieldMap(FieldMapArgs),
    /// Diophantine tuples for three or four open channels (CSV).
    Diophantine(DiophantineArgs),
}

#[derive(Args)]
struct ThresholdsArgs {
    /// Bloch wavenumber kx.
    #[arg(long)]
    kx: f64,
    /// Highest threshold pair index n.
    #[arg(long)]
    nmax: u32,
    /// Output CSV path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct GeometryArgs {
    /// Array shift a in [0, 1/2].
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    /// Cylinder radius R (period units).
    #[arg(long = "R", default_value_t = 0.1)]
    radius: f64,
    /// Dielectric constant of the cylinders.
    #[arg(long = "eps", default_value_t = 1.5)]
    eps_c: f64,
    /// Half-distance h between the arrays.
    #[arg(long, default_value_t = 1.0)]
    h: f64,
}

impl GeometryArgs {
    fn config(&self) -> Result<ArrayConfig, CoreError> {
        ArrayConfig::new(self.radius, self.eps_c, self.a, self.h)
    }
}

#[derive(Args)]
struct BoundSearchArgs {
    /// Spectral region: below | c1 | c2.
    #[arg(long)]
    region: String,
    #[command(flatten)]
    geom: GeometryArgs,
    /// Bloch wavenumber kx (regions below and c1; c2 searches over kx).
    #[arg(long, default_value_t = 0.0)]
    kx: f64,
    /// Largest standing-wave index n.
    #[arg(long, default_value_t = 4)]
    nmax: u32,
    /// Largest second-quantization index l (region c2).
    #[arg(long, default_value_t = 8)]
    lmax: u32,
    /// Output JSON path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScatterSweepArgs {
    #[command(flatten)]
    geom: GeometryArgs,
    #[arg(long)]
    kx: f64,
    /// h range as lo:hi.
    #[arg(long = "h-range")]
    h_range: String,
    /// k range as lo:hi.
    #[arg(long = "k-range")]
    k_range: String,
    /// Grid as NHxNK.
    #[arg(long, default_value = "64x64")]
    grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FieldMapArgs {
    /// JSON file with bound-state records (as written by bound-search).
    #[arg(long = "record-file", conflicts_with = "scatter_at")]
    record_file: Option<PathBuf>,
    /// Record index within the file.
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Driven solve at this wavenumber k instead of a bound state.
    #[arg(long = "scatter-at")]
    scatter_at: Option<f64>,
    #[command(flatten)]
    geom: GeometryArgs,
    #[arg(long, default_value_t = 0.0)]
    kx: f64,
    /// x range as lo:hi (default one period).
    #[arg(long = "x-range", default_value = "0:1")]
    x_range: String,
    /// z range as lo:hi (default ±(h+2)).
    #[arg(long = "z-range", allow_hyphen_values = true)]
    z_range: Option<String>,
    #[arg(long, default_value_t = 256)]
    nx: usize,
    #[arg(long, default_value_t = 512)]
    nz: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiophantineArgs {
    /// Open-channel count: 3 or 4.
    #[arg(long)]
    channels: u32,
    /// Upper bound on the standing-wave integers.
    #[arg(long)]
    bound: u32,
    /// Report ε_c realizing each curve constant at this radius.
    #[arg(long = "R")]
    radius: Option<f64>,
    #[arg(long = "eps")]
    eps_c: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("BICGRATE_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().collect();
    let code = match cli.cmd {
        Cmd::Thresholds(args) => cmd_thresholds(args, argv),
        Cmd::BoundSearch(args) => cmd_bound_search(args, argv),
        Cmd::ScatterSweep(args) => cmd_scatter_sweep(args, argv),
        Cmd::FieldMap(args) => cmd_field_map(args, argv),
        Cmd::Diophantine(args) => cmd_diophantine(args, argv),
    };
    match code {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

type CmdResult = Result<ExitCode, Box<dyn std::error::Error>>;

fn emit(out: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn cmd_thresholds(args: ThresholdsArgs, argv: Vec<String>) -> CmdResult {
    let t = thresholds(args.kx, args.nmax);
    let mut text = String::from("label,energy\n");
    let mut labels = vec!["E0".to_string()];
    for n in 1..=args.nmax {
        labels.push(format!("E-{n}"));
        labels.push(format!("E+{n}"));
    }
    for (label, e) in labels.iter().zip(&t) {
        text.push_str(&format!("{label},{e:.16e}\n"));
    }
    emit(&args.out, &text)?;
    if let Some(path) = &args.out {
        manifest::write_manifest(
            path,
            argv,
            serde_json::json!({"kx": args.kx, "nmax": args.nmax}),
            serde_json::json!({"kind": "thresholds"}),
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct BoundSearchOutput<'a> {
    config: &'a ArrayConfig,
    region: &'a str,
    kx: f64,
    records: &'a [BoundStateRecord],
}

fn cmd_bound_search(args: BoundSearchArgs, argv: Vec<String>) -> CmdResult {
    let cfg = args.geom.config()?;
    let records = match args.region.as_str() {
        "below" => find_below(&cfg, args.kx),
        "c1" => find_continuum_c1(&cfg, args.kx, args.nmax),
        "c2" => find_continuum_c2(&cfg, args.nmax, args.lmax),
        other => {
            eprintln!("error: unknown region '{other}' (expected below|c1|c2)");
            return Ok(ExitCode::from(EXIT_USAGE));
        }
    };
    let records = match records {
        Ok(r) => r,
        Err(CoreError::GateFailed { lhs, rhs }) => {
            eprintln!("existence gate failed: positivity condition lhs = {lhs:.6e} <= rhs = {rhs:.6e}");
            return Ok(ExitCode::from(EXIT_GATE));
        }
        Err(CoreError::NoBracket { .. }) | Err(CoreError::NoRoot(_)) => {
            return Ok(ExitCode::from(EXIT_NO_RESULT));
        }
        Err(e) => return Err(e.into()),
    };
    let payload = BoundSearchOutput {
        config: &cfg,
        region: &args.region,
        kx: args.kx,
        records: &records,
    };
    let text = serde_json::to_string_pretty(&payload)? + "\n";
    emit(&args.out, &text)?;
    if let Some(path) = &args.out {
        manifest::write_manifest(path, argv, cfg, serde_json::json!({"kind": "bound-search", "count": records.len()}))?;
    }
    if records.is_empty() {
        return Ok(ExitCode::from(EXIT_NO_RESULT));
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err(format!("range '{s}' must be lo:hi"));
    }
    let lo: f64 = parts[0].parse().map_err(|e| format!("bad range '{s}': {e}"))?;
    let hi: f64 = parts[1].parse().map_err(|e| format!("bad range '{s}': {e}"))?;
    if !(hi >= lo) {
        return Err(format!("range '{s}' must have hi >= lo"));
    }
    Ok((lo, hi))
}

fn cmd_scatter_sweep(args: ScatterSweepArgs, argv: Vec<String>) -> CmdResult {
    let cfg = args.geom.config()?;
    let (h_lo, h_hi) = parse_range(&args.h_range).map_err(usage)?;
    let (k_lo, k_hi) = parse_range(&args.k_range).map_err(usage)?;
    let (nh, nk) = {
        let parts: Vec<&str> = args.grid.split('x').collect();
        if parts.len() != 2 {
            return Err(usage(format!("grid '{}' must be NHxNK", args.grid)).into());
        }
        let nh = parts[0].parse::<usize>().map_err(|e| usage(e.to_string()))?;
        let nk = parts[1].parse::<usize>().map_err(|e| usage(e.to_string()))?;
        if nh == 0 || nk == 0 {
            return Err(usage(format!("grid '{}' must be at least 1x1", args.grid)).into());
        }
        (nh, nk)
    };
    let kx = args.kx;
    use rayon::prelude::*;
    let cells: Vec<(f64, f64, Option<(f64, f64)>)> = (0..nh * nk)
        .into_par_iter()
        .map(|idx| {
            let (ih, ik) = (idx / nk, idx % nk);
            let h = if nh > 1 { h_lo + (h_hi - h_lo) * ih as f64 / (nh - 1) as f64 } else { h_lo };
            let k = if nk > 1 { k_lo + (k_hi - k_lo) * ik as f64 / (nk - 1) as f64 } else { k_lo };
            let pt = BlochPoint::new(k, kx);
            match solve(&cfg.with_half_gap(h), &pt, Direction::FromBelow) {
                Ok(sol) => (h, k, Some((sol.refl[&0].norm_sqr(), sol.flux_error))),
                Err(_) => (h, k, None), // bound state / threshold: sentinel
            }
        })
        .collect();
    let mut text = String::from("h,k,r0_squared,flux_error\n");
    let mut any_regular = false;
    for (h, k, cell) in &cells {
        match cell {
            Some((r0, fe)) => {
                any_regular = true;
                text.push_str(&format!("{h:.16e},{k:.16e},{r0:.16e},{fe:.16e}\n"));
            }
            None => text.push_str(&format!("{h:.16e},{k:.16e},NaN,NaN\n")),
        }
    }
    emit(&args.out, &text)?;
    if let Some(path) = &args.out {
        manifest::write_manifest(
            path,
            argv,
            cfg,
            serde_json::json!({"kind": "scatter-sweep", "kx": kx, "cells": nh * nk}),
        )?;
    }
    if !any_regular {
        return Ok(ExitCode::from(EXIT_NO_RESULT));
    }
    Ok(ExitCode::SUCCESS)
}

fn usage(msg: String) -> std::io::Error {
    std::io::Error::new(std::io::ErrorKind::InvalidInput, msg)
}

#[derive(serde::Deserialize)]
struct RecordFile {
    records: Vec<BoundStateRecord>,
}

fn cmd_field_map(args: FieldMapArgs, argv: Vec<String>) -> CmdResult {
    let cfg = args.geom.config()?;
    let (x_lo, x_hi) = parse_range(&args.x_range).map_err(usage)?;
    let grid_for = |half_gap: f64| -> Result<GridSpec, String> {
        let (z_lo, z_hi) = match &args.z_range {
            Some(s) => parse_range(s)?,
            None => (-half_gap - 2.0, half_gap + 2.0),
        };
        Ok(GridSpec {
            x_min: x_lo,
            x_max: x_hi,
            z_min: z_lo,
            z_max: z_hi,
            nx: args.nx,
            nz: args.nz,
        })
    };

    let (grid, provenance): (FieldGrid, serde_json::Value) = if let Some(path) = &args.record_file {
        let data = std::fs::read_to_string(path)?;
        let file: RecordFile = serde_json::from_str(&data)?;
        let record = file
            .records
            .get(args.index)
            .ok_or_else(|| usage(format!("record index {} out of range", args.index)))?;
        let spec = grid_for(record.h).map_err(usage)?;
        let grid = bound_field(&cfg, record, &spec)?;
        let prov = serde_json::json!({"kind": "bound-field", "record": record});
        (grid, prov)
    } else if let Some(k) = args.scatter_at {
        let pt = BlochPoint::new(k, args.kx);
        let sol = match solve(&cfg, &pt, Direction::FromBelow) {
            Ok(s) => s,
            Err(CoreError::SingularSystem { .. }) => return Ok(ExitCode::from(EXIT_NO_RESULT)),
            Err(e) => return Err(e.into()),
        };
        let spec = grid_for(cfg.half_gap).map_err(usage)?;
        let grid = scattering_field(&cfg, &sol, &spec)?;
        let prov = serde_json::json!({"kind": "scattering-field", "solution": sol});
        (grid, prov)
    } else {
        return Err(usage("one of --record-file or --scatter-at is required".into()).into());
    };

    let mut csv = Vec::new();
    grid.write_csv(&mut csv)?;
    match &args.out {
        Some(path) => std::fs::write(path, &csv)?,
        None => std::io::stdout().write_all(&csv)?,
    }
    if let Some(path) = &args.out {
        let bloch = bloch_residual(&grid);
        manifest::write_manifest(
            path,
            argv,
            cfg,
            serde_json::json!({
                "kind": "field-map",
                "grid": grid.spec,
                "k": grid.k,
                "kx": grid.kx,
                "trunc_error": grid.trunc_error,
                "bloch_residual": if bloch.is_finite() { Some(bloch) } else { None },
                "inside_scatterer_samples": grid.inside.iter().filter(|&&b| b).count(),
                "provenance": provenance,
            }),
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_diophantine(args: DiophantineArgs, argv: Vec<String>) -> CmdResult {
    let records = match diophantine_n(args.channels, args.bound) {
        Ok(r) => r,
        Err(CoreError::InvalidConfig(msg)) => {
            eprintln!("error: {msg}");
            return Ok(ExitCode::from(EXIT_USAGE));
        }
        Err(e) => return Err(e.into()),
    };
    let mut text =
        String::from("tuple,kx,h,k,open_count,consistent,shift,c_curve,delta_residual,eps_c_at_R\n");
    for r in &records {
        let tuple = r
            .tuple
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join("+");
        let shift = r.shift.map(|a| format!("{a}")).unwrap_or_default();
        let c = r
            .c_curve
            .map(|c| format!("{c:.16e}"))
            .unwrap_or_else(|| "NaN".into());
        // realize ε_c on the curve at the requested radius, when possible
        let eps_at = match (args.radius, r.c_curve) {
            (Some(radius), Some(cc)) => {
                let denom = cc - (2.0 * std::f64::consts::PI * radius).ln();
                if denom > 0.0 {
                    format!("{:.16e}", 1.0 + 2.0 / (r.k * r.k * radius * radius * denom))
                } else {
                    "NaN".into()
                }
            }
            _ => "NaN".into(),
        };
        text.push_str(&format!(
            "{tuple},{:.16e},{:.16e},{:.16e},{},{},{shift},{c},{:.16e},{eps_at}\n",
            r.kx, r.h, r.k, r.open_count, r.consistent, r.delta_residual
        ));
    }
    emit(&args.out, &text)?;
    if let Some(path) = &args.out {
        manifest::write_manifest(
            path,
            argv,
            serde_json::json!({"channels": args.channels, "bound": args.bound, "radius": args.radius, "eps": args.eps_c}),
            serde_json::json!({"kind": "diophantine", "count": records.len()}),
        )?;
    }
    if records.is_empty() {
        return Ok(ExitCode::from(EXIT_NO_RESULT));
    }
    Ok(ExitCode::SUCCESS)
}
