use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use harvest_core::harvest;
use harvestcli::checks::{run_check, CHECK_NAMES};
use harvestcli::output::{write_csv_to, write_json_to};
use harvestcli::scenario::{flatten_toml, parse_override};
use harvestcli::{preset, run_sweep, write_csv, write_json, ConfigError, SweepSpec, Table, PRESET_NAMES};

const EXIT_POINT_ERRORS: u8 = 1;
const EXIT_FATAL: u8 = 2;
const EXIT_WARNINGS: u8 = 3;

#[derive(Parser)]
#[command(name = "harvestcli", version, about = "Entanglement harvesting near static and accelerating mirrors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML file with dotted keys, e.g. `trajectory.kind = "cw"`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key; applied after the config file, in order.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute one configuration and print the result as JSON.
    Point {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Sweep one variable over a grid.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// d_A, x_A, dx, omega, t_A, lambda, sigma_scale or d.
        #[arg(long)]
        var: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        stop: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        /// Logarithmic spacing.
        #[arg(long)]
        log: bool,
        /// harvest, p_static_1p1 or p_3p1.
        #[arg(long)]
        observable: Option<String>,
        /// Output file; standard output if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run the sweeps behind one figure, one file per curve.
    Preset {
        name: Option<String>,
        /// List presets with their parameters.
        #[arg(long)]
        list: bool,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Grid points per curve.
        #[arg(long)]
        count: Option<usize>,
        /// Override one key in every curve.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run a grid of the one-dimensional static-boundary reductions.
    Appendix {
        /// oracle-grid, rate-limit, asymptote-3p1 or growth-1p1.
        check: String,
    },
}

#[derive(Debug, thiserror::Error)]
enum Fatal {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Output(#[from] harvestcli::output::OutputError),
    #[error("{0}")]
    Other(String),
}

fn read_settings(args: &ConfigArgs) -> Result<Vec<(String, String)>, Fatal> {
    let mut out = Vec::new();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| Fatal::Other(format!("{}: {e}", path.display())))?;
        out.extend(flatten_toml(&text).map_err(|e| Fatal::Other(format!("{}: {e}", path.display())))?);
    }
    for s in &args.set {
        out.push(parse_override(s)?);
    }
    Ok(out)
}

fn status(table: &Table) -> u8 {
    if table.rows.iter().any(|r| r.is_error()) {
        EXIT_POINT_ERRORS
    } else if table.rows.iter().any(|r| r.has_warnings()) {
        EXIT_WARNINGS
    } else {
        0
    }
}

fn emit(table: &Table, format: Format, path: Option<&Path>) -> Result<(), Fatal> {
    match (path, format) {
        (Some(p), Format::Csv) => write_csv(table, p)?,
        (Some(p), Format::Json) => write_json(table, p)?,
        (None, f) => {
            let stdout = std::io::stdout().lock();
            let r = match f {
                Format::Csv => write_csv_to(table, stdout),
                Format::Json => write_json_to(table, stdout),
            };
            r.map_err(|e| Fatal::Other(format!("stdout: {e}")))?;
        }
    }
    Ok(())
}

fn point(config: &ConfigArgs) -> Result<u8, Fatal> {
    let mut spec = SweepSpec::default();
    for (k, v) in read_settings(config)? {
        spec.scenario.set(&k, &v)?;
    }
    let s = &spec.scenario;
    let result = harvest(&s.pair()?, &s.request()?, &s.resolved_regulators(), &s.quad);
    match result {
        Ok(r) => {
            let doc = serde_json::json!({ "scenario": s, "regulators": s.resolved_regulators(), "result": r });
            println!("{}", serde_json::to_string_pretty(&doc).map_err(|e| Fatal::Other(e.to_string()))?);
            Ok(if r.warnings.is_empty() { 0 } else { EXIT_WARNINGS })
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(EXIT_POINT_ERRORS)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    config: &ConfigArgs,
    var: Option<String>,
    start: Option<f64>,
    stop: Option<f64>,
    count: Option<usize>,
    log: bool,
    observable: Option<String>,
    output: Option<PathBuf>,
    format: Format,
) -> Result<u8, Fatal> {
    let mut spec = SweepSpec::default();
    for (k, v) in read_settings(config)? {
        spec.set(&k, &v)?;
    }
    let flags = [
        ("sweep.variable", var),
        ("sweep.start", start.map(|v| v.to_string())),
        ("sweep.stop", stop.map(|v| v.to_string())),
        ("sweep.count", count.map(|v| v.to_string())),
        ("sweep.spacing", log.then(|| "log".to_string())),
        ("sweep.observable", observable),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            spec.set(k, &v)?;
        }
    }
    let table = run_sweep(&spec)?;
    emit(&table, format, output.as_deref())?;
    Ok(status(&table))
}

fn run_preset(
    name: Option<String>,
    list: bool,
    out_dir: &Path,
    format: Format,
    count: Option<usize>,
    set: &[String],
) -> Result<u8, Fatal> {
    if list {
        for n in PRESET_NAMES {
            println!("{n}: {}", preset(n).expect("listed preset").help);
        }
        return Ok(0);
    }
    let name = name.ok_or_else(|| Fatal::Other("a preset name or --list is required".into()))?;
    let p = preset(&name).ok_or_else(|| Fatal::Other(format!("unknown preset `{name}`; try --list")))?;
    let mut overrides = Vec::new();
    for s in set {
        overrides.push(parse_override(s)?);
    }
    if let Some(c) = count {
        overrides.push(("sweep.count".into(), c.to_string()));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Fatal::Other(format!("{}: {e}", out_dir.display())))?;
    let mut code = 0;
    for series in p.series {
        let mut spec = series.spec;
        for (k, v) in &overrides {
            spec.set(k, v)?;
        }
        let table = run_sweep(&spec)?;
        let path = out_dir.join(format!("{}_{}.{}", p.name, series.label, format.extension()));
        emit(&table, format, Some(&path))?;
        println!("{}", path.display());
        code = code.max(match status(&table) {
            EXIT_POINT_ERRORS => 2,
            EXIT_WARNINGS => 1,
            _ => 0,
        });
    }
    Ok([0, EXIT_WARNINGS, EXIT_POINT_ERRORS][code])
}

fn appendix(check: &str) -> Result<u8, Fatal> {
    let report = run_check(check)
        .ok_or_else(|| Fatal::Other(format!("unknown check `{check}`; one of {}", CHECK_NAMES.join(", "))))??;
    let mut out = std::io::stdout().lock();
    for line in &report.lines {
        writeln!(out, "{line}").map_err(|e| Fatal::Other(e.to_string()))?;
    }
    writeln!(out, "{} {check}", if report.pass { "PASS" } else { "FAIL" }).map_err(|e| Fatal::Other(e.to_string()))?;
    Ok(if report.pass { 0 } else { EXIT_POINT_ERRORS })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Point { config } => point(&config),
        Command::Sweep { config, var, start, stop, count, log, observable, output, format } => {
            sweep(&config, var, start, stop, count, log, observable, output, format)
        }
        Command::Preset { name, list, out_dir, format, count, set } => {
            run_preset(name, list, &out_dir, format, count, &set)
        }
        Command::Appendix { check } => appendix(&check),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FATAL)
        }
    }
}
