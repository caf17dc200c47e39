use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use polariton_engine_cli::config::{load_config_str, peek_output_directory, Command, Format};
use polariton_engine_cli::{emit_config, run, RunError, RunManifest};

/// Steady states, gain curves and phase diagrams of the three-level
/// condensate heat engine.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// Overrides `command` from the config file.
    #[arg(value_enum)]
    command: Option<Command>,

    /// TOML config; the GaAs preset is used when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,

    /// Override a config field, e.g. `--set hot.temperature="300 K"`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output directory (overrides `output.directory`).
    #[arg(short, long)]
    out_dir: Option<PathBuf>,

    /// Output format (overrides `output.format`).
    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Print the resolved config in canonical form and exit.
    #[arg(long)]
    print_config: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => String::new(),
    };
    let mut overrides = args.overrides.clone();
    if let Some(c) = args.command {
        overrides.push(format!("command=\"{}\"", c.name()));
    }
    if let Some(f) = args.format {
        overrides.push(format!("output.format=\"{}\"", if f == Format::Csv { "csv" } else { "json" }));
    }

    let config = match load_config_str(&text, &overrides) {
        Ok(mut c) => {
            if let Some(d) = &args.out_dir {
                c.output.directory = d.clone();
            }
            c
        }
        Err(e) => {
            eprintln!("error: {e}");
            let dir = args
                .out_dir
                .clone()
                .or_else(|| peek_output_directory(&text, &overrides))
                .unwrap_or_else(|| PathBuf::from("out"));
            let err = RunError::Config(e);
            if let Err(io) = RunManifest::failed(&err, None).write(&dir) {
                eprintln!("error: cannot write manifest: {io}");
            }
            return ExitCode::from(err.status().exit_code() as u8);
        }
    };

    if args.print_config {
        print!("{}", emit_config(&config));
        return ExitCode::SUCCESS;
    }

    let manifest = run(&config, &config.output.directory);
    if let Some(e) = &manifest.error {
        eprintln!("error: {e}");
    }
    for f in &manifest.failures {
        eprintln!("warning: point {:?} failed: {}", f.at, f.error);
    }
    eprintln!(
        "{}: {} file(s) in {} ({:.2} s)",
        config.command.name(),
        manifest.files.len(),
        config.output.directory.display(),
        manifest.wall_time_seconds
    );
    ExitCode::from(manifest.exit_code as u8)
}
