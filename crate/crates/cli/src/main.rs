use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use probrep_cli::{run, validate, CliError, ExperimentConfig, Format, REGISTRY};

#[derive(Parser)]
#[command(
    name = "probrep",
    version,
    about = "Seeded experiments on probability representations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its table.
    Run(ConfigArgs),
    /// Check a configuration without running it.
    Validate(ConfigArgs),
    /// Print the experiment registry.
    List,
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    experiment: Option<String>,
    /// Experiment parameter as key=value; repeatable.
    #[arg(long = "param", value_parser = ExperimentConfig::parse_param)]
    params: Vec<(String, String)>,
    /// JSON file with experiment, parameters, output_path and format.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; the table goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
}

impl ConfigArgs {
    /// File values first, command-line values on top.
    fn resolve(self) -> Result<ExperimentConfig, CliError> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(e) = self.experiment {
            config.experiment = e;
        }
        config.parameters.extend(self.params);
        if let Some(out) = self.out {
            config.output_path = Some(out);
        }
        if let Some(f) = self.format {
            config.format = f;
        }
        Ok(config)
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error[{}]: {e}", e.code());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for e in REGISTRY {
                let seed = if e.randomized { " (seed required)" } else { "" };
                println!("{:<11} {}{seed}", e.name, e.summary);
                println!("{:<11} parameters: {}", "", e.keys.join(", "));
            }
            ExitCode::SUCCESS
        }
        Command::Validate(args) => {
            let config = match args.resolve() {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let problems = validate(&config);
            if problems.is_empty() {
                println!("ok");
                ExitCode::SUCCESS
            } else {
                for p in &problems {
                    println!("{p}");
                }
                ExitCode::from(2)
            }
        }
        Command::Run(args) => {
            let config = match args.resolve() {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let start = Instant::now();
            match run(&config) {
                Ok(table) => {
                    if config.output_path.is_none() {
                        match table.render(config.format) {
                            Ok(text) => print!("{text}"),
                            Err(e) => return fail(&e),
                        }
                    }
                    eprintln!(
                        "{}: {} rows in {:.3} s",
                        config.experiment,
                        table.rows().len(),
                        start.elapsed().as_secs_f64()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
    }
}
