use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use divgreen_cli::commands::{self, CommandError, GaussArgs, TraceMode};
use divgreen_cli::config::RunConfig;
use divgreen_cli::fixtures::{listing, parse_point};
use divgreen_cli::report::Report;
use divgreen_cli::suite;

#[derive(Parser)]
#[command(name = "divgreen", version, about = "Numerical checks of generalized Gauss-Green formulas in the plane")]
struct Cli {
    /// Config file (key=value or JSON); overrides DIVGREEN_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the k-traces as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Directory for two-column plot-data files.
    #[arg(long)]
    plots: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// List fields, regions, approximations, config keys and suites.
    Fixtures {
        #[arg(long)]
        json: bool,
    },
    /// Check the Gauss formula for a bounded field.
    Gauss {
        #[arg(long)]
        field: String,
        #[arg(long)]
        region: String,
        #[arg(long)]
        approx: String,
        /// Field centre as x,y.
        #[arg(long, allow_hyphen_values = true)]
        center: Option<String>,
        /// Vector of the constant field as x,y.
        #[arg(long, allow_hyphen_values = true)]
        vector: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate the density-at-zero measure on a set.
    Density {
        /// sector:THETA, strip:J, a region name or a JSON region tree.
        #[arg(long)]
        set: String,
        #[command(flatten)]
        output: Output,
    },
    /// Shell-gradient sweeps and the pure-part detector.
    #[command(group(ArgGroup::new("mode").args(["detect", "ramp"])))]
    Trace {
        #[arg(long)]
        field: String,
        #[arg(long)]
        region: String,
        #[arg(long, allow_hyphen_values = true)]
        center: Option<String>,
        /// Classify the normal trace (the default).
        #[arg(long)]
        detect: bool,
        /// Sweep S_k with the ramp off the vertical axis or off the boundary.
        #[arg(long, value_parser = ["axis", "boundary"])]
        ramp: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Run a verification suite: acceptance or quick.
    Suite {
        #[arg(value_parser = suite::SUITES.to_vec())]
        name: String,
        #[command(flatten)]
        output: Output,
    },
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<CommandError> for Failure {
    fn from(e: CommandError) -> Self {
        match e {
            CommandError::Compute(m) => Failure::Check(m),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn point(s: &Option<String>) -> Result<Option<divgreen::Point>, Failure> {
    s.as_deref().map(parse_point).transpose().map_err(|e| Failure::Usage(e.to_string()))
}

/// Writes to stdout, ignoring a closed pipe.
fn stdout(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn emit(rep: &Report, out: &Output, cfg: &RunConfig) -> Result<bool, Failure> {
    match out.out.as_ref().or(cfg.output_json.as_ref()) {
        Some(p) => write(p, &rep.to_json())?,
        None => stdout(&rep.to_json()),
    }
    if let Some(p) = out.csv.as_ref().or(cfg.output_csv.as_ref()) {
        write(p, &rep.to_csv())?;
    }
    if let Some(dir) = out.plots.as_ref().or(cfg.output_plots.as_ref()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
        for (name, body) in rep.plot_files() {
            write(&dir.join(name), &body)?;
        }
    }
    Ok(rep.pass())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let cfg = RunConfig::load(cli.config.as_deref()).map_err(|e| Failure::Usage(e.to_string()))?;
    match cli.command {
        Command::Fixtures { json } => {
            let l = listing();
            if json {
                stdout(&format!("{}\n", serde_json::to_string_pretty(&l).expect("listing serializes")));
            } else {
                let mut s = String::from("fields:\n");
                for f in &l.fields {
                    s += &format!("  {:<22} {} [{}; {}]\n", f.name, f.formula, f.integrability, f.parameters);
                }
                for (title, rows) in [
                    ("regions", &l.regions),
                    ("approximations", &l.approximations),
                    ("config keys", &l.config_keys),
                    ("suites", &l.suites),
                ] {
                    s += &format!("{title}:\n");
                    for r in rows {
                        s += &format!("  {:<22} {}\n", r.name, r.description);
                    }
                }
                stdout(&s);
            }
            Ok(true)
        }
        Command::Gauss { field, region, approx, center, vector, output } => {
            let args = GaussArgs { field: &field, center: point(&center)?, vector: point(&vector)?, region: &region, approx: &approx };
            emit(&commands::gauss(&args, &cfg)?, &output, &cfg)
        }
        Command::Density { set, output } => emit(&commands::density(&set, &cfg)?, &output, &cfg),
        Command::Trace { field, region, center, detect: _, ramp, output } => {
            let mode = match ramp {
                Some(r) => TraceMode::Ramp(commands::parse_ramp(&r)?),
                None => TraceMode::Detect,
            };
            emit(&commands::trace(&field, point(&center)?, &region, &mode, &cfg)?, &output, &cfg)
        }
        Command::Suite { name, output } => {
            let rep = suite::run_suite(&name, &cfg, |c, o| {
                eprintln!(
                    "criterion {:>2} {:<24} {} {:.2}s",
                    c.id,
                    c.name,
                    if o.pass { "pass" } else { "FAIL" },
                    o.elapsed.as_secs_f64()
                );
            })
            .ok_or_else(|| Failure::Usage(format!("unknown suite `{name}`")))?;
            emit(&rep, &output, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
