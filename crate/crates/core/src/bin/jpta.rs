use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jpta::experiment::{self, exit_code, ExperimentConfig};

#[derive(Parser)]
#[command(name = "jpta", version, about = "JPTA beamformer design and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args, Default)]
struct Overrides {
    /// Output directory (overrides output.directory).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Use 256 subcarriers.
    #[arg(long)]
    fast: bool,
    /// Number of subcarriers.
    #[arg(long)]
    k: Option<usize>,
    /// Number of TTDs.
    #[arg(long)]
    n: Option<usize>,
    /// TTD range in units of 1/W.
    #[arg(long)]
    kappa: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Design one beamformer and write it with its fit report and gain map.
    Design(Common),
    /// Run the config's sweep block and write sweep.csv.
    Sweep(Common),
    /// F_obj versus RF-chain count for FC/PC hybrid beamforming.
    CompareHbf {
        #[command(flatten)]
        common: Common,
        /// Comma-separated RF-chain counts.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64")]
        n_rf: Vec<usize>,
    },
    /// Regenerate a figure's data with the reference parameters.
    Reproduce {
        /// One of fig4, fig5, fig6, fig7, fig8, fig9, fig11.
        figure: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use 256 subcarriers instead of 2048.
        #[arg(long)]
        fast: bool,
    },
    /// Gain maps of the ideal target and the designed beams.
    GainMap(Common),
}

fn load(common: &Common) -> jpta::Result<(ExperimentConfig, PathBuf)> {
    let mut cfg = ExperimentConfig::from_path(&common.config)?;
    let o = &common.overrides;
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if o.fast {
        cfg.system.k = 256;
    }
    if let Some(k) = o.k {
        cfg.system.k = k;
    }
    if let Some(n) = o.n {
        cfg.system.n = n;
    }
    if let Some(kappa) = o.kappa {
        cfg.system.kappa = kappa;
    }
    cfg.validate()?;
    let out = o.out.clone().unwrap_or_else(|| cfg.output.directory.clone());
    Ok((cfg, out))
}

fn run(cli: Cli) -> jpta::Result<Vec<PathBuf>> {
    match cli.command {
        Command::Design(c) => {
            let (cfg, out) = load(&c)?;
            let result = experiment::run_design(&cfg, &out)?;
            println!("F_obj = {:.6}", result.evaluated.report.f_obj);
            Ok(result.files)
        }
        Command::Sweep(c) => {
            let (cfg, out) = load(&c)?;
            Ok(vec![experiment::run_sweep(&cfg, &out)?.0])
        }
        Command::CompareHbf { common, n_rf } => {
            let (cfg, out) = load(&common)?;
            Ok(vec![experiment::compare_hbf(&cfg, &n_rf, &out)?.0])
        }
        Command::Reproduce {
            figure,
            out,
            seed,
            fast,
        } => {
            if fast {
                eprintln!("warning: --fast uses K=256 subcarriers instead of 2048");
            }
            experiment::reproduce(&figure, fast, seed, &out)
        }
        Command::GainMap(c) => {
            let (cfg, out) = load(&c)?;
            experiment::run_gain_map(&cfg, &out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = exit_code(&e);
            ExitCode::from(code as u8)
        }
    }
}
