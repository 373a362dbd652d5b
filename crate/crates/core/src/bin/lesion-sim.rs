use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lesion_sim::presets::{describe, load_preset, PRESET_NAMES};
use lesion_sim::sim::{run, run_sweep, RunOptions};
use lesion_sim::{Error, ExperimentConfig, Result};

#[derive(Parser)]
#[command(name = "lesion-sim", version, about = "Tumour lesion / immune response simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation.
    Run(RunArgs),
    /// Run every point of the config's sweep grid.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Run the grid points one after another.
        #[arg(long)]
        serial: bool,
    },
    /// Inspect the built-in experiment presets.
    Preset {
        #[command(subcommand)]
        command: PresetCommand,
    },
    /// Check a config file and print the resolved configuration.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum PresetCommand {
    /// List preset names.
    List,
    /// Print a preset as a config file.
    Show { name: String },
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset name (see `preset list`).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    duration_days: Option<f64>,
    /// Linear size factor in (0, 1].
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long)]
    snapshot_every_days: Option<f64>,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::from_file(path)?,
            (None, Some(name)) => load_preset(name)?,
            (None, None) => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(d) = self.duration_days {
            cfg.duration_days = d;
        }
        if let Some(s) = self.scale {
            cfg.scale = s;
        }
        if let Some(s) = self.snapshot_every_days {
            cfg.output.snapshot_every_days = Some(s);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.load()?;
            let opts = RunOptions { out_dir: Some(args.out_dir.clone()), ..Default::default() };
            let result = run(&cfg, &opts)?;
            let s = &result.summary;
            println!(
                "outcome={} final_day={:.2} population={} ctl={} max_H={:.4} max_M={:.4} out={}",
                s.outcome.map_or("inconclusive".to_string(), |o| o.to_string()),
                s.final_day,
                s.final_population,
                s.final_ctl,
                s.max_h,
                s.max_m,
                args.out_dir.display()
            );
        }
        Command::Sweep { run: args, serial } => {
            let cfg = args.load()?;
            if cfg.sweep.is_none() {
                return Err(Error::config("config has no [sweep] section"));
            }
            let report = run_sweep(&cfg, Some(&args.out_dir), !serial)?;
            let failed = report.points.iter().filter(|(_, r)| r.is_err()).count();
            println!("points={} failed={failed} out={}", report.points.len(), args.out_dir.display());
            for c in &report.correlations {
                let rho = c.rho.map_or("NaN".to_string(), |v| format!("{v:.4}"));
                println!("spearman {} vs {}: {rho} (n={})", c.param, c.target, c.n);
            }
        }
        Command::Preset { command: PresetCommand::List } => {
            for name in PRESET_NAMES {
                println!("{name:<22} {}", describe(name).unwrap_or_default());
            }
        }
        Command::Preset { command: PresetCommand::Show { name } } => {
            print!("{}", load_preset(&name)?.to_toml_string()?);
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            print!("{}", cfg.to_toml_string()?);
            eprintln!("{}: ok", config.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
