use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use spinsurf::clifford::CliffordConvention;
use spinsurf::report::{default_presets, run, Command, Format, Outcome, RunConfig, Tolerances, SCHEMA};
use spinsurf::{Error, Result};

/// Spin-geometric surface checks: convention audit, spinor round trips and
/// discrepancy reports.
#[derive(Debug, Parser)]
#[command(name = "spinsurf", version)]
struct Cli {
    /// audit, roundtrip, reconstruct, adjudicate or report
    #[arg(required_unless_present = "list_presets", default_value = "")]
    command: String,
    /// Preset name; repeatable. `all` selects the catalog, `none` nothing.
    #[arg(long = "preset")]
    presets: Vec<String>,
    /// Grid size as NxM.
    #[arg(long, default_value = "64x64")]
    grid: String,
    /// Tolerance override KEY=VAL; repeatable.
    #[arg(long = "tol")]
    tol: Vec<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = spinsurf::clifford::audit::DEFAULT_SEED)]
    seed: u64,
    /// Random samples per audit case.
    #[arg(long, default_value_t = spinsurf::clifford::audit::DEFAULT_SAMPLES)]
    samples: usize,
    /// json or csv
    #[arg(long, default_value = "json")]
    format: String,
    /// Write the reconstructed embedding as Wavefront OBJ.
    #[arg(long)]
    export_obj: Option<PathBuf>,
    /// Judge the audit against SIGMA,TAU instead of the frozen convention.
    #[arg(long, allow_hyphen_values = true)]
    force_convention: Option<String>,
    /// Relative perturbation of the shape operator fed to the transport.
    #[arg(long, allow_hyphen_values = true)]
    perturb: Option<f64>,
    /// Print the preset catalog and exit.
    #[arg(long)]
    list_presets: bool,
}

fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Parse(format!("grid '{s}' is not NxM")))?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("grid '{s}' is not NxM")));
    Ok((n(a)?, n(b)?))
}

fn parse_convention(s: &str) -> Result<CliffordConvention> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("convention '{s}' is not SIGMA,TAU")))?;
    let n = |t: &str| t.trim().parse::<i8>().map_err(|_| Error::Parse(format!("convention '{s}' is not SIGMA,TAU")));
    CliffordConvention::new(n(a)?, n(b)?)
}

fn config(cli: &Cli) -> Result<RunConfig> {
    let command: Command = cli.command.parse()?;
    let mut cfg = RunConfig::new(command);
    cfg.grid = parse_grid(&cli.grid)?;
    cfg.seed = cli.seed;
    cfg.samples = cli.samples;
    cfg.format = cli.format.parse::<Format>()?;
    cfg.out = cli.out.clone();
    cfg.export_obj = cli.export_obj.clone();
    cfg.perturb = cli.perturb;
    cfg.force_convention = cli.force_convention.as_deref().map(parse_convention).transpose()?;
    let mut tol = Tolerances::default();
    for t in &cli.tol {
        tol.set(t)?;
    }
    cfg.tolerances = tol;
    cfg.presets = match cli.presets.as_slice() {
        [] if matches!(command, Command::Audit | Command::Adjudicate | Command::Report) => default_presets(),
        [one] if one == "all" => default_presets(),
        [one] if one == "none" => Vec::new(),
        list => list.to_vec(),
    };
    Ok(cfg)
}

fn emit(cfg: &RunConfig, outcome: &Outcome) -> Result<()> {
    let text = outcome.render(cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    if let (Some(path), Some(obj)) = (&cfg.export_obj, &outcome.obj) {
        std::fs::write(path, obj)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_presets {
        for p in spinsurf::ambient::presets::CATALOG {
            println!("{:<24} {:<16} {}", p.name, p.ambient, p.description);
        }
        return ExitCode::SUCCESS;
    }
    let cfg = match config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("spinsurf: {e}");
            println!("{}", serde_json::json!({ "schema": SCHEMA, "command": cli.command, "error": e.to_string() }));
            return ExitCode::from(2);
        }
    };
    let outcome = run(&cfg);
    if let Some(err) = outcome.json.get("error").and_then(|e| e.as_str()) {
        eprintln!("spinsurf: {err}");
    }
    if let Err(e) = emit(&cfg, &outcome) {
        eprintln!("spinsurf: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.exit)
}
