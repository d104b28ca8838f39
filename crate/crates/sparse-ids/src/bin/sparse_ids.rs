//! Thin command-line front end over the experiment harness.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use sparse_ids::analysis::{delta_cap, regret_bound, BoundInputs, BoundRegime};
use sparse_ids::error::{Error, Result};
use sparse_ids::experiment::{
    run_experiment, run_offline_check, write_bound_curves, ExperimentConfig, ExperimentOutputs,
};

#[derive(Parser)]
#[command(name = "sparse-ids", version, about = "Sparse linear bandit experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a bandit experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads for parallel trials (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Override the config's output directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the offline posterior concentration check.
    OfflineCheck {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print closed-form regret-bound reference values.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s: usize,
        #[arg(long = "K", alias = "k")]
        k: usize,
        /// Exploratory constant of the action set.
        #[arg(long)]
        cmin: f64,
        /// Absolute constant inside the information cap's log term.
        #[arg(long, default_value_t = 1.0)]
        constant: f64,
        /// Also write per-round bound curves to this CSV path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run { config, threads, output } => {
            let mut config = ExperimentConfig::load(&config)?;
            if let Some(dir) = output {
                config.output_dir = dir;
            }
            let outputs = match threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?
                    .install(|| run_experiment(&config))?,
                None => run_experiment(&config)?,
            };
            report(&outputs);
            Ok(())
        }
        Command::OfflineCheck { config } => {
            let config = ExperimentConfig::load(&config)?;
            let outputs = run_offline_check(&config)?;
            report(&outputs);
            Ok(())
        }
        Command::Bounds { n, d, s, k, cmin, constant, csv } => {
            let inputs = BoundInputs::new(n, d, s, k, cmin)?.with_metric_constant(constant);
            println!("information cap:     {}", delta_cap(&inputs));
            println!("bound (arbitrary):   {}", regret_bound(&inputs, BoundRegime::Arbitrary));
            println!("bound (exploratory): {}", regret_bound(&inputs, BoundRegime::Exploratory));
            if let Some(path) = csv {
                let mut w = BufWriter::new(File::create(&path)?);
                write_bound_curves(&mut w, &inputs)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn report(outputs: &ExperimentOutputs) {
    for file in &outputs.files {
        println!("wrote {}", file.display());
    }
}
