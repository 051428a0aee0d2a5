//! Command-line front end for the in-memory XOR cipher simulator: round-trip
//! demos, Monte Carlo margin analysis, bench tables, workload traffic sweeps,
//! and replay of recorded threshold-voltage maps.
//!
//! Every command writes its results as files under `--out` (CSV matrices plus
//! a `report.json` stamped with a hash of the exact configuration) and prints
//! a one-line summary. Outputs carry no timestamps, so identical invocations
//! produce byte-identical files.
//!
//! Exit codes: 0 on success, 1 for invalid input (arguments, files, shapes),
//! 2 for runtime failures. Errors are also emitted as a JSON record on
//! stderr for scripting.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fexor::cipher::{decrypt_matrix, encrypt_store, xor_encrypt, SenseThresholds};
use fexor::io::{
    bundled_mlc_8x6, config_hash_hex, emit_symbol_matrix_csv, emit_volt_matrix_csv,
    replay_experiment, to_sorted_pretty_json, ReplayFixture,
};
use fexor::perf::{
    area_report, bundled_topologies, parse_topology_csv, row_cycles, speedup_latency,
    speedup_throughput, throughput_mbps, workload_traffic, CipherOp, SchemeTiming, SenseAmpConfig,
    AES_MODULE_AREA_MM2, DEFAULT_PE_COLS, DEFAULT_PE_ROWS,
};
use fexor::variation::{
    histogram_csv, run_mc, run_mc_parallel, sense_margin, sl_samples_csv, vth_samples_csv,
    McConfig,
};
use fexor::{
    ArrayGeometry, FeArray, FerroProfile, Matrix, Mode, SymbolMatrix, PRESET_28NM_EXPERIMENTAL,
};

#[derive(Parser)]
#[command(name = "fexor", version, about = "Simulator for a one-transistor in-memory XOR cipher")]
struct Cli {
    /// Directory for reports and CSV dumps.
    #[arg(long, global = true, default_value = "fexor-out")]
    out: PathBuf,

    /// RNG seed. Falls back to the FEXOR_SEED environment variable, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Device profile: a preset name (sim-default, 28nm-experimental) or a
    /// path to a profile JSON file.
    #[arg(long, global = true, default_value = "sim-default")]
    profile: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two-level round trip: random plaintext and key, encrypt, store,
    /// decrypt in one read cycle per row.
    DemoSlc(DemoArgs),
    /// Four-level round trip with the fixed three-cycle decrypt.
    DemoMlc(DemoArgs),
    /// Monte Carlo threshold-voltage spread and worst-case sense margin.
    Mc(McArgs),
    /// Cycle, throughput, and area comparison against the two-transistor
    /// scheme and the AES baseline.
    Bench,
    /// Cipher traffic and latency for accelerator workload topologies.
    Workload(WorkloadArgs),
    /// Replay a recorded threshold-voltage map through the read path.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, default_value_t = 8)]
    rows: usize,
    #[arg(long, default_value_t = 6)]
    cols: usize,
    /// Vth spread in volts applied when programming.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
}

#[derive(Args)]
struct McArgs {
    /// Samples per ciphertext state.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0.04)]
    sigma: f64,
    #[arg(long, default_value_t = 1.1)]
    v_read: f64,
    /// Run the sampling in parallel (bit-identical to the serial runner).
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct WorkloadArgs {
    /// Topology CSV files (name, ifmap h/w, filter h/w, channels, filters,
    /// stride per line).
    paths: Vec<PathBuf>,
    /// Analyze the seven bundled workloads.
    #[arg(long)]
    bundled: bool,
    /// Bits per weight/activation word element.
    #[arg(long, default_value_t = 8)]
    bitwidth: u32,
}

#[derive(Args)]
struct ReplayArgs {
    /// Fixture JSON with vth, key, and reference plaintext matrices.
    path: Option<PathBuf>,
    /// Replay the bundled 8x6 four-level map.
    #[arg(long)]
    bundled: bool,
}

enum CliError {
    Lib(fexor::Error),
    File { path: PathBuf, source: std::io::Error },
    BadArgs(String),
}

impl From<fexor::Error> for CliError {
    fn from(e: fexor::Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::File { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::BadArgs(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_validation() => 1,
            CliError::BadArgs(_) => 1,
            _ => 2,
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = i32::from(e.use_stderr());
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        let kind = if e.exit_code() == 1 { "validation" } else { "runtime" };
        let record = serde_json::json!({ "error": e.to_string(), "kind": kind });
        eprintln!("{record}");
        std::process::exit(e.exit_code());
    }
}

fn resolve_seed(cli: &Cli) -> Result<u64, CliError> {
    if let Some(seed) = cli.seed {
        return Ok(seed);
    }
    match std::env::var("FEXOR_SEED") {
        Ok(text) => text
            .parse()
            .map_err(|_| CliError::BadArgs(format!("FEXOR_SEED is not a valid seed: {text:?}"))),
        Err(_) => Ok(0),
    }
}

/// Resolve `--profile` to a device profile plus the matching sense window.
fn resolve_profile(name: &str) -> Result<(FerroProfile, SenseThresholds), CliError> {
    if let Some(profile) = FerroProfile::preset(name) {
        let thresholds = if name == PRESET_28NM_EXPERIMENTAL {
            SenseThresholds::experimental()
        } else {
            SenseThresholds::sim(profile.v_dd)
        };
        return Ok((profile, thresholds));
    }
    let path = Path::new(name);
    if path.exists() {
        let text = read_file(path)?;
        let profile = FerroProfile::from_json(&text)?;
        let thresholds = SenseThresholds::sim(profile.v_dd);
        return Ok((profile, thresholds));
    }
    Err(CliError::BadArgs(format!(
        "unknown profile {name:?}: not a preset (sim-default, 28nm-experimental) or a file"
    )))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|source| CliError::File { path: path.to_path_buf(), source })
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| CliError::File { path, source })
}

fn write_report(dir: &Path, report: &serde_json::Value) -> Result<(), CliError> {
    let text = to_sorted_pretty_json(report).map_err(CliError::Lib)?;
    write_file(dir, "report.json", &(text + "\n"))
}

fn csv_of_u8(m: &Matrix<u8>) -> String {
    let mut out = String::new();
    for row in m.iter_rows() {
        let line: Vec<String> = row.iter().map(u8::to_string).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// CSV with `x` marking cells that have no value (unclassifiable or
/// undecodable).
fn csv_of_optional(m: &Matrix<Option<u8>>) -> String {
    let mut out = String::new();
    for row in m.iter_rows() {
        let line: Vec<String> = row
            .iter()
            .map(|v| v.map_or_else(|| "x".to_string(), |s| s.to_string()))
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn run(cli: Cli) -> Result<(), CliError> {
    std::fs::create_dir_all(&cli.out)
        .map_err(|source| CliError::File { path: cli.out.clone(), source })?;
    let seed = resolve_seed(&cli)?;
    let (profile, thresholds) = resolve_profile(&cli.profile)?;

    match &cli.command {
        Command::DemoSlc(args) => demo(&cli, args, Mode::Slc, seed, &profile, &thresholds),
        Command::DemoMlc(args) => demo(&cli, args, Mode::Mlc, seed, &profile, &thresholds),
        Command::Mc(args) => mc(&cli, args, seed, &profile),
        Command::Bench => bench(&cli),
        Command::Workload(args) => workload(&cli, args),
        Command::Replay(args) => replay(&cli, args),
    }
}

fn demo(
    cli: &Cli,
    args: &DemoArgs,
    mode: Mode,
    seed: u64,
    base_profile: &FerroProfile,
    thresholds: &SenseThresholds,
) -> Result<(), CliError> {
    if args.sigma < 0.0 || !args.sigma.is_finite() {
        return Err(CliError::BadArgs(format!("sigma must be finite and nonnegative, got {}", args.sigma)));
    }
    let mut profile = base_profile.clone();
    profile.sigma_vth = args.sigma;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pt = SymbolMatrix::random(mode, args.rows, args.cols, &mut rng)?;
    let key = SymbolMatrix::random(mode, args.rows, args.cols, &mut rng)?;
    let ct = xor_encrypt(&pt, &key)?;

    let geometry = ArrayGeometry::new(args.rows, args.cols)?;
    let mut array = FeArray::new(geometry, mode, profile.clone(), &mut rng)?;
    encrypt_store(&mut array, &pt, &key, &mut rng)?;
    let (decoded, traces) = decrypt_matrix(&array, &key, thresholds)?;

    let cells = args.rows * args.cols;
    let errors = decoded.count_diff(&pt)?;
    let accuracy = 1.0 - errors as f64 / cells as f64;

    let command = match mode {
        Mode::Slc => "demo-slc",
        Mode::Mlc => "demo-mlc",
    };
    let config = serde_json::json!({
        "command": command,
        "rows": args.rows,
        "cols": args.cols,
        "sigma": args.sigma,
        "seed": seed,
        "profile": profile,
        "sense_thresholds": thresholds,
    });
    let report = serde_json::json!({
        "command": command,
        "mode": mode,
        "rows": args.rows,
        "cols": args.cols,
        "seed": seed,
        "sigma": args.sigma,
        "cells": cells,
        "errors": errors,
        "accuracy": accuracy,
        "config": config,
        "config_hash": config_hash_hex(&config)?,
    });

    write_file(&cli.out, "pt.csv", &emit_symbol_matrix_csv(&pt))?;
    write_file(&cli.out, "key.csv", &emit_symbol_matrix_csv(&key))?;
    write_file(&cli.out, "ct.csv", &emit_symbol_matrix_csv(&ct))?;
    write_file(&cli.out, "stored_levels.csv", &emit_symbol_matrix_csv(&array.levels()))?;
    write_file(&cli.out, "vth.csv", &emit_volt_matrix_csv(&array.vth_map()))?;
    write_file(&cli.out, "pt_decoded.csv", &emit_symbol_matrix_csv(&decoded))?;
    write_file(&cli.out, "traces.json", &(to_sorted_pretty_json(&traces).map_err(CliError::Lib)? + "\n"))?;
    write_report(&cli.out, &report)?;

    println!(
        "{command}: {cells} cells, {errors} errors, accuracy {accuracy:.4} (out: {})",
        cli.out.display()
    );
    Ok(())
}

fn mc(cli: &Cli, args: &McArgs, seed: u64, profile: &FerroProfile) -> Result<(), CliError> {
    let cfg = McConfig { n_samples: args.n, sigma_vth: args.sigma, v_read: args.v_read, seed };
    let report = if args.parallel { run_mc_parallel(cfg, profile) } else { run_mc(cfg, profile) }?;
    let margin = sense_margin(&report)?;

    let config = serde_json::json!({
        "command": "mc",
        "n": args.n,
        "sigma": args.sigma,
        "v_read": args.v_read,
        "seed": seed,
        "parallel": args.parallel,
        "profile": profile,
    });
    let combos: Vec<serde_json::Value> = report
        .combos
        .iter()
        .map(|c| {
            serde_json::json!({
                "ct": c.ct,
                "key": c.key,
                "expected_pt": c.expected_pt,
                "samples": c.v_sl.len(),
            })
        })
        .collect();
    let summary = serde_json::json!({
        "command": "mc",
        "n_samples": args.n,
        "sigma_vth": args.sigma,
        "v_read": args.v_read,
        "seed": seed,
        "parallel": args.parallel,
        "worst_case_margin_v": margin,
        "overlap_free": margin > 0.0,
        "combos": combos,
        "config": config,
        "config_hash": config_hash_hex(&config)?,
    });

    write_file(&cli.out, "vth_samples.csv", &vth_samples_csv(&report))?;
    write_file(&cli.out, "sl_samples.csv", &sl_samples_csv(&report))?;
    write_file(&cli.out, "histogram.csv", &histogram_csv(&report))?;
    write_report(&cli.out, &summary)?;

    println!(
        "mc: n={} sigma={:.3} margin={margin:.3} V (out: {})",
        args.n,
        args.sigma,
        cli.out.display()
    );
    Ok(())
}

fn bench(cli: &Cli) -> Result<(), CliError> {
    let sa = SenseAmpConfig::default();
    let schemes = [SchemeTiming::this_work(), SchemeTiming::prior_fefet(), SchemeTiming::aes()];
    let aes = SchemeTiming::aes();

    let mut csv = String::from(
        "scheme,op,cycles_per_word,throughput_mbps,speedup_vs_aes_throughput,speedup_vs_aes_latency\n",
    );
    let mut rows = Vec::new();
    for scheme in &schemes {
        for op in [CipherOp::Encrypt, CipherOp::Decrypt] {
            let cycles = row_cycles(scheme, op, &sa);
            let mbps = throughput_mbps(scheme, op, &sa);
            let s_tp = speedup_throughput(scheme, &aes, op, &sa);
            let s_lat = speedup_latency(scheme, &aes, op, &sa);
            let op_name = match op {
                CipherOp::Encrypt => "encrypt",
                CipherOp::Decrypt => "decrypt",
            };
            csv.push_str(&format!(
                "{},{op_name},{cycles},{mbps:.2},{s_tp:.2},{s_lat:.2}\n",
                scheme.name
            ));
            rows.push(serde_json::json!({
                "scheme": scheme.name,
                "op": op_name,
                "cycles_per_word": cycles,
                "throughput_mbps": mbps,
                "speedup_vs_aes_throughput": s_tp,
                "speedup_vs_aes_latency": s_lat,
            }));
        }
    }

    let areas: Vec<serde_json::Value> = schemes
        .iter()
        .map(|s| serde_json::to_value(area_report(s, 128, 128)).map_err(fexor::Error::from))
        .collect::<Result<_, _>>()
        .map_err(CliError::Lib)?;
    let config = serde_json::json!({
        "command": "bench",
        "num_sa": sa.num_sa(),
        "word_bits": sa.word_bits(),
    });
    let report = serde_json::json!({
        "command": "bench",
        "word_bits": sa.word_bits(),
        "num_sa": sa.num_sa(),
        "rows": rows,
        "array_area_128x128": areas,
        "aes_module_area_mm2": AES_MODULE_AREA_MM2,
        "config": config,
        "config_hash": config_hash_hex(&config)?,
    });

    write_file(&cli.out, "bench.csv", &csv)?;
    write_report(&cli.out, &report)?;

    print!("{csv}");
    println!("bench: wrote {}", cli.out.display());
    Ok(())
}

fn workload(cli: &Cli, args: &WorkloadArgs) -> Result<(), CliError> {
    let mut sources: Vec<(String, String)> = Vec::new();
    if args.bundled {
        for (name, csv) in bundled_topologies() {
            sources.push((name.to_string(), csv.to_string()));
        }
    }
    for path in &args.paths {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        sources.push((name, read_file(path)?));
    }
    if sources.is_empty() {
        return Err(CliError::BadArgs(
            "no workloads given: pass topology CSV paths or --bundled".into(),
        ));
    }

    let sa = SenseAmpConfig::default();
    let tw = SchemeTiming::this_work();
    let prior = SchemeTiming::prior_fefet();
    let aes = SchemeTiming::aes();

    let mut csv = String::from(
        "workload,layers,dec_bits,enc_bits,cycles_this_work,cycles_prior_fefet,cycles_aes,latency_ratio_vs_prior,reduction_vs_aes\n",
    );
    let mut entries = Vec::new();
    let mut reductions = Vec::new();
    for (name, text) in &sources {
        let layers = parse_topology_csv(text, args.bitwidth)?;
        let traffic = workload_traffic(&layers, DEFAULT_PE_ROWS, DEFAULT_PE_COLS)?;
        let ours = fexor::perf::latency_of_traffic(&traffic, &tw, &sa);
        let twot = fexor::perf::latency_of_traffic(&traffic, &prior, &sa);
        let base = fexor::perf::latency_of_traffic(&traffic, &aes, &sa);
        let ratio = ours.cycles / twot.cycles;
        let reduction = 1.0 - ours.cycles / base.cycles;
        reductions.push(reduction);
        csv.push_str(&format!(
            "{name},{},{},{},{},{},{},{ratio},{reduction:.4}\n",
            layers.len(),
            traffic.dec_bits,
            traffic.enc_bits,
            ours.cycles,
            twot.cycles,
            base.cycles,
        ));
        entries.push(serde_json::json!({
            "workload": name,
            "layers": layers.len(),
            "dec_bits": traffic.dec_bits,
            "enc_bits": traffic.enc_bits,
            "cycles_this_work": ours.cycles,
            "seconds_this_work": ours.seconds,
            "cycles_prior_fefet": twot.cycles,
            "cycles_aes": base.cycles,
            "latency_ratio_vs_prior": ratio,
            "reduction_vs_aes": reduction,
        }));
        println!("{name}: ratio-vs-prior {ratio} reduction-vs-aes {reduction:.4}");
    }
    let mean_reduction = reductions.iter().sum::<f64>() / reductions.len() as f64;

    let config = serde_json::json!({
        "command": "workload",
        "bundled": args.bundled,
        "paths": args.paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "bitwidth": args.bitwidth,
        "pe_rows": DEFAULT_PE_ROWS,
        "pe_cols": DEFAULT_PE_COLS,
        "num_sa": sa.num_sa(),
        "word_bits": sa.word_bits(),
    });
    let report = serde_json::json!({
        "command": "workload",
        "workloads": entries,
        "mean_reduction_vs_aes": mean_reduction,
        "config": config,
        "config_hash": config_hash_hex(&config)?,
    });

    write_file(&cli.out, "workloads.csv", &csv)?;
    write_report(&cli.out, &report)?;

    println!(
        "workload: {} workloads, mean reduction vs aes {mean_reduction:.4} (out: {})",
        sources.len(),
        cli.out.display()
    );
    Ok(())
}

fn replay(cli: &Cli, args: &ReplayArgs) -> Result<(), CliError> {
    let fixture = match (&args.path, args.bundled) {
        (Some(_), true) => {
            return Err(CliError::BadArgs("pass either a fixture path or --bundled, not both".into()))
        }
        (Some(path), false) => ReplayFixture::from_json(&read_file(path)?)?,
        (None, true) => bundled_mlc_8x6(),
        (None, false) => {
            return Err(CliError::BadArgs("no fixture given: pass a path or --bundled".into()))
        }
    };

    let profile = fixture.profile();
    let thresholds = if fixture.band_preset == PRESET_28NM_EXPERIMENTAL {
        SenseThresholds::experimental()
    } else {
        SenseThresholds::sim(profile.v_dd)
    };
    let outcome = replay_experiment(&fixture, &profile, &thresholds)?;

    let config = serde_json::json!({
        "command": "replay",
        "band_preset": fixture.band_preset,
        "bundled": args.bundled,
        "path": args.path.as_ref().map(|p| p.display().to_string()),
        "dims": fixture.dims(),
        "mode": fixture.mode,
    });
    let report = serde_json::json!({
        "command": "replay",
        "band_preset": fixture.band_preset,
        "provenance": fixture.provenance,
        "mode": fixture.mode,
        "cells": outcome.cells,
        "errors": outcome.errors,
        "error_rate": outcome.error_rate,
        "unclassified": outcome.unclassified,
        "error_cells": outcome.error_cells,
        "config": config,
        "config_hash": config_hash_hex(&config)?,
    });

    write_file(&cli.out, "vth.csv", &emit_volt_matrix_csv(&fixture.vth))?;
    write_file(&cli.out, "key.csv", &emit_symbol_matrix_csv(&fixture.key))?;
    write_file(&cli.out, "reference_pt.csv", &emit_symbol_matrix_csv(&fixture.reference_pt))?;
    write_file(&cli.out, "classified_ct.csv", &csv_of_optional(&outcome.classified_ct))?;
    write_file(&cli.out, "decoded_pt.csv", &csv_of_optional(&outcome.decoded_pt))?;
    write_file(&cli.out, "error_map.csv", &csv_of_u8(&outcome.error_map))?;
    write_report(&cli.out, &report)?;

    println!(
        "replay: {}/{} cells in error ({:.2}%) (out: {})",
        outcome.errors,
        outcome.cells,
        outcome.error_rate * 100.0,
        cli.out.display()
    );
    Ok(())
}
