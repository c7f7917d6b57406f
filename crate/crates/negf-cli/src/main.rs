use std::path::PathBuf;
use std::process::ExitCode;

use negf_cli::{load_config, run, RunOptions, EXIT_COMPUTATION, EXIT_VALIDATION};

const USAGE: &str = "\
negf - spin-polarized coherent transport for tight-binding junctions

USAGE:
  negf run <CONFIG.toml> [OPTIONS]

OPTIONS:
  --out <DIR>       Override the configured output directory
  --threads <N>     Worker threads (0 = automatic; default from NEGF_THREADS)
  --validate-only   Parse and validate the configuration, write nothing

EXIT CODES:
  0  success
  1  validation failure (all problems listed on stderr)
  2  computation failure (details in manifest.json)
";

struct CliArgs {
    config_path: PathBuf,
    options: RunOptions,
}

fn parse_args(args: &[String]) -> Result<CliArgs, String> {
    let mut iter = args.iter();
    match iter.next().map(String::as_str) {
        Some("run") => {}
        Some(other) => return Err(format!("unknown subcommand `{other}`")),
        None => return Err("missing subcommand".into()),
    }
    let mut config_path: Option<PathBuf> = None;
    let mut options = RunOptions {
        threads: default_threads(),
        ..RunOptions::default()
    };
    while let Some(arg) = iter.next() {
        match arg.as_str() {
            "--out" => {
                let value = iter.next().ok_or("--out requires a directory argument")?;
                options.out_override = Some(PathBuf::from(value));
            }
            "--threads" => {
                let value = iter.next().ok_or("--threads requires a number")?;
                options.threads = value
                    .parse::<usize>()
                    .map_err(|_| format!("--threads: `{value}` is not a nonnegative integer"))?;
            }
            "--validate-only" => options.validate_only = true,
            other if other.starts_with("--") => return Err(format!("unknown flag `{other}`")),
            other => {
                if config_path.is_some() {
                    return Err(format!("unexpected extra argument `{other}`"));
                }
                config_path = Some(PathBuf::from(other));
            }
        }
    }
    let config_path = config_path.ok_or("missing <CONFIG.toml> argument")?;
    Ok(CliArgs {
        config_path,
        options,
    })
}

fn default_threads() -> usize {
    std::env::var("NEGF_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or(0)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help" {
        print!("{USAGE}");
        return ExitCode::from(if args.is_empty() { EXIT_VALIDATION as u8 } else { 0 });
    }
    let cli = match parse_args(&args) {
        Ok(cli) => cli,
        Err(message) => {
            eprintln!("error: {message}\n\n{USAGE}");
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    };
    let config = match load_config(&cli.config_path) {
        Ok(config) => config,
        Err(errors) => {
            eprintln!("configuration invalid ({} problems):", errors.len());
            for error in errors {
                eprintln!("  - {error}");
            }
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    };
    if cli.options.validate_only {
        println!(
            "configuration valid: {} task(s), output dir {}",
            config.tasks.len(),
            cli.options
                .out_override
                .as_deref()
                .unwrap_or(&config.output.dir)
                .display()
        );
        return ExitCode::SUCCESS;
    }
    match run(&config, &cli.options) {
        Ok(code) => ExitCode::from(code as u8),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_COMPUTATION as u8)
        }
    }
}
