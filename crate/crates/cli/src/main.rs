use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use cantor_spec::config::{parse_config_for, Command};
use cantor_spec::records::{write_records, write_table};
use cantor_spec::svg::emit_svg;
use cantor_spec::sweep::{run_sweep, EXIT_ERROR};
use cantor_spec::{resolve_workers, WORKERS_ENV};
use clap::Parser;

/// Spectral sweeps for quasi-periodic Schrödinger operators with a monotone
/// sampling function.
#[derive(Parser, Debug)]
#[command(name = "cantor-spec", version)]
struct Cli {
    /// bands, lyapunov, gapflow, winding, hull, cantor-trend, gap-filling or verify
    command: Command,
    /// Job file
    #[arg(long)]
    config: PathBuf,
    /// Records output (JSON lines); stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Tab-separated table of the scalar record fields
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: Cli) -> Result<u8, String> {
    let text = fs::read_to_string(&cli.config).map_err(|e| format!("{}: {e}", cli.config.display()))?;
    let mut cfg = parse_config_for(&text, Some(cli.command)).map_err(|e| format!("{}: {e}", cli.config.display()))?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let env = std::env::var(WORKERS_ENV).ok();
    let workers = resolve_workers(cli.workers, cfg.workers, env.as_deref());
    let out = run_sweep(&cfg, workers).map_err(|e| e.to_string())?;

    match cli.out.or(cfg.records.clone()) {
        Some(path) => {
            let f = fs::File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            write_records(&out.records, BufWriter::new(f)).map_err(|e| e.to_string())?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_records(&out.records, &mut lock).and_then(|()| lock.flush()).map_err(|e| e.to_string())?;
        }
    }
    if let Some(path) = cli.svg.or(cfg.svg.clone()) {
        let doc = emit_svg(&out.records)?;
        fs::write(&path, doc).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if let Some(path) = cli.table.or(cfg.table.clone()) {
        let f = fs::File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        write_table(&out.records, BufWriter::new(f)).map_err(|e| e.to_string())?;
    }
    Ok(out.exit_code as u8)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("cantor-spec: {msg}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
