use std::path::PathBuf;
use std::process::ExitCode;

use chowflop_cli::{render, run_suite, CliError, Settings};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chowflop", version, about = "Verify Chow ring identities for blow-ups and Mukai flops")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and report one line per check.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// binomial, projbundle, blowup, charclass, flop or all
    #[arg(value_name = "SUITE")]
    positional: Option<String>,
    #[arg(long)]
    suite: Option<String>,
    /// Run a single r (overrides --r-max).
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    r_max: Option<String>,
    /// formal or numeric
    #[arg(long)]
    mode: Option<String>,
    /// Random instances per r in numeric mode.
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Truncation degree for numeric base rings.
    #[arg(long)]
    dim_bound: Option<String>,
    /// text or json
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `linear:n,m` or a path to an embedding file.
    #[arg(long)]
    case: Option<String>,
    /// `key=value` file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn settings(args: VerifyArgs) -> Result<Settings, CliError> {
    let mut base = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Settings::parse_file(&text)?
        }
        None => Settings::new(),
    };
    let mut flags = Settings::new();
    if let (Some(a), Some(b)) = (&args.positional, &args.suite) {
        if a != b {
            return Err(CliError::Usage(format!("suite given twice: `{a}` and `{b}`")));
        }
    }
    let pairs = [
        ("suite", args.positional.or(args.suite)),
        ("r", args.r),
        ("r-max", args.r_max),
        ("mode", args.mode),
        ("trials", args.trials),
        ("seed", args.seed),
        ("dim-bound", args.dim_bound),
        ("format", args.format),
        ("out", args.out.map(|p| p.display().to_string())),
        ("case", args.case),
    ];
    for (k, v) in pairs {
        if let Some(v) = v {
            flags.set(k, v)?;
        }
    }
    base.overlay(&flags);
    Ok(base)
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
    let Command::Verify(args) = cli.command;
    let cfg = match settings(args).and_then(Settings::into_config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run_suite(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = render(&report, cfg.format);
    match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
