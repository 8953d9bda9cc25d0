use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nanofall::ensemble::EnsembleStats;
use nanofall::scenario::{self, Preset, RunConfig, RunOutput, PRESET_NAMES};
use nanofall::Error;

/// Gaussian free-fall simulations of nanospheres under self-gravity and
/// spontaneous localization.
#[derive(Parser)]
#[command(name = "nanofall", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs a preset or a JSON run document and writes one file per curve.
    Run(RunOpts),
    /// Prints the decoherence tables and their reference comparison as JSON.
    Tables,
    /// Lists the preset names.
    Presets,
    /// Prints the run document of a preset.
    Preset { name: String },
}

#[derive(Parser)]
struct RunOpts {
    /// Built-in preset.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// Path to a JSON run document.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the document).
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectories per localized curve (overrides the document).
    #[arg(long)]
    trajectories: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Drop trajectories in which a `gas` channel fired.
    #[arg(long)]
    filter_gas_collisions: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Error> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes one curve's statistics.
fn emit_plotdata(stats: &EnsembleStats, path: &Path, format: Format) -> Result<(), Error> {
    match format {
        Format::Csv => {
            let mut w = BufWriter::new(File::create(path)?);
            stats.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
        Format::Json => write_json(path, stats),
    }
}

fn print_summary(out: &RunOutput) {
    let t_end = out.config.duration;
    println!("{}: {} curves", out.config.name, out.curves.len());
    for c in &out.curves {
        if let Some(r) = c.stats.rows.last() {
            println!(
                "  {:<24} spread {:.4e} m at {t_end} s ({} trajectories)",
                c.label, r.total_spread, c.stats.trajectory_count
            );
        }
    }
    for g in &out.gaps {
        let to = g.to.map_or("analytic", |k| k.name());
        println!(
            "  gap {} -> {to} (initial {:.3e} m): {:+.4e} +- {:.1e} m",
            g.from.name(),
            g.initial_spread,
            g.value,
            g.standard_error
        );
    }
}

fn run(opts: &RunOpts) -> Result<(), Error> {
    let mut cfg: RunConfig = match (&opts.preset, &opts.config) {
        (Some(name), _) => match scenario::preset(name) {
            Some(Preset::Run(cfg)) => *cfg,
            Some(Preset::Tables) => {
                fs::create_dir_all(&opts.out)?;
                let path = opts.out.join("tables.json");
                write_json(&path, &scenario::tables()?)?;
                println!("wrote {}", path.display());
                return Ok(());
            }
            None => {
                return Err(Error::Config {
                    path: "preset".into(),
                    message: format!("unknown preset `{name}`; one of {}", PRESET_NAMES.join(", ")),
                })
            }
        },
        (None, Some(path)) => scenario::parse_config(path)?,
        (None, None) => unreachable!("clap requires one of --preset and --config"),
    };
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    if let Some(n) = opts.trajectories {
        cfg.trajectories = n;
    }
    cfg.filter_gas_collisions |= opts.filter_gas_collisions;
    cfg.validate()?;

    let out = scenario::run(&cfg, opts.workers)?;
    fs::create_dir_all(&opts.out)?;
    write_json(&opts.out.join("config.json"), &out.config)?;
    for c in &out.curves {
        let path = opts.out.join(format!("{}.{}", c.label, opts.format.extension()));
        emit_plotdata(&c.stats, &path, opts.format)?;
    }
    #[derive(serde::Serialize)]
    struct Summary<'a> {
        gaps: &'a [scenario::Gap],
        histograms: &'a [nanofall::ensemble::VelocityHistogram],
    }
    write_json(
        &opts.out.join("summary.json"),
        &Summary {
            gaps: &out.gaps,
            histograms: &out.histograms,
        },
    )?;
    print_summary(&out);
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    if e.is_numeric() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Run(opts) => run(opts),
        Command::Tables => scenario::tables().and_then(|t| {
            println!("{}", serde_json::to_string_pretty(&t)?);
            Ok(())
        }),
        Command::Presets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            Ok(())
        }
        Command::Preset { name } => match scenario::preset(name) {
            Some(Preset::Run(cfg)) => serde_json::to_string_pretty(&cfg)
                .map_err(Error::from)
                .map(|s| println!("{s}")),
            Some(Preset::Tables) => Err(Error::Config {
                path: "preset".into(),
                message: "`tables` has no run document".into(),
            }),
            None => Err(Error::Config {
                path: "preset".into(),
                message: format!("unknown preset `{name}`"),
            }),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
