//! Command-line front end for the transport engine: declarative TOML
//! configuration, deterministic CSV emission, and a JSON run manifest.

pub mod config;
pub mod format;
pub mod manifest;
pub mod tasks;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use config::RunConfig;
use manifest::{RunManifest, TaskReport};

/// Process exit codes of the `negf` binary.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_COMPUTATION: i32 = 2;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_override: Option<PathBuf>,
    /// 0 selects the automatic thread count.
    pub threads: usize,
    pub validate_only: bool,
}

/// Load and validate a configuration file; all problems are reported.
pub fn load_config(path: &Path) -> Result<RunConfig, Vec<String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| vec![format!("cannot read {}: {e}", path.display())])?;
    config::parse_config(&text)
}

/// Execute a validated configuration. No file is written unless validation
/// already succeeded; CSVs are byte-identical across thread counts.
pub fn run(config: &RunConfig, options: &RunOptions) -> Result<i32, String> {
    let out_dir = options
        .out_override
        .clone()
        .unwrap_or_else(|| config.output.dir.clone());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads)
        .build()
        .map_err(|e| format!("thread pool: {e}"))?;

    fs::create_dir_all(&out_dir)
        .map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;

    let mut reports = Vec::with_capacity(config.tasks.len());
    let mut all_ok = true;
    for task in &config.tasks {
        let started = Instant::now();
        let output = pool.install(|| tasks::execute(task, config));
        let wall_ms = started.elapsed().as_millis();
        let file = task.file_name().to_string();
        let status = match (&output.fatal, output.rows_failed) {
            (Some(message), _) => {
                all_ok = false;
                format!("error: {message}")
            }
            (None, 0) => "ok".to_string(),
            (None, n) => {
                all_ok = false;
                format!("partial: {n} rows failed")
            }
        };
        if output.fatal.is_none() {
            let path = out_dir.join(&file);
            fs::write(&path, output.csv.as_bytes())
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        }
        reports.push(TaskReport {
            kind: task.kind().to_string(),
            file,
            status,
            wall_ms,
            rows_written: output.rows_written,
            rows_failed: output.rows_failed,
            notes: output.notes,
        });
    }

    let manifest = RunManifest {
        engine_version: env!("CARGO_PKG_VERSION"),
        created_unix_ms: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0),
        threads_requested: options.threads,
        status: if all_ok { "ok".into() } else { "failed".into() },
        resolved: manifest::resolved_config(config),
        tasks: reports,
    };
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| format!("manifest serialization: {e}"))?;
    let manifest_path = out_dir.join("manifest.json");
    fs::write(&manifest_path, manifest_json)
        .map_err(|e| format!("cannot write {}: {e}", manifest_path.display()))?;

    Ok(if all_ok { EXIT_OK } else { EXIT_COMPUTATION })
}
