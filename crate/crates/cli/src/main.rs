use clap::Parser;
use jdisc_cli::report::write_atomic;
use jdisc_cli::runner::run_command;
use jdisc_cli::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

/// Bishop-type pseudoholomorphic discs in wedges: solvers and certifications.
///
/// Exit codes: 0 success, 1 certification failure, 2 config error,
/// 3 solver error.
#[derive(Parser, Debug)]
#[command(name = "jdisc", version, about)]
struct Cli {
    /// Command to run.
    #[arg(value_parser = [
        "verify-structure", "normalize", "flatten", "solve-disc",
        "sweep", "cover", "hessian", "uniqueness-demo", "operators-selftest",
    ])]
    command: String,
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (defaults to the config's `out_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the grid as `n_r,n_theta`.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Suppress the per-check summary on stdout.
    #[arg(long)]
    quiet: bool,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| "expected n_r,n_theta".to_string())?;
    let n_r = a.trim().parse().map_err(|_| format!("bad n_r {a:?}"))?;
    let n_theta = b.trim().parse().map_err(|_| format!("bad n_theta {b:?}"))?;
    Ok((n_r, n_theta))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match RunConfig::from_file(&cli.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some((n_r, n_theta)) = cli.grid {
        cfg.grid.n_r = n_r;
        cfg.grid.n_theta = n_theta;
    }
    let out_dir = cli.out.unwrap_or_else(|| PathBuf::from(&cfg.out_dir));
    match run_command(&cli.command, &cfg, &out_dir) {
        Ok(report) => {
            report.print_summary(cli.quiet);
            let path = out_dir.join(format!("{}-report.json", cli.command));
            if let Err(e) = write_atomic(&path, &report.to_json()) {
                eprintln!("failed to write report: {e}");
                return ExitCode::from(3);
            }
            if !cli.quiet {
                println!("report: {}", path.display());
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{}: {e}", cli.command);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
