use std::env;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub const OUT_DIR_ENV: &str = "FSHADOW_OUT_DIR";
pub const TOOL: &str = "fshadow";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance shared by every artifact of one invocation.
pub struct Provenance {
    pub command: &'static str,
    pub config: Value,
    pub seed: u64,
    pub povm_hash: Option<String>,
}

impl Provenance {
    pub fn new<C: Serialize>(command: &'static str, config: &C, seed: u64) -> Self {
        Self {
            command,
            config: serde_json::to_value(config).expect("config serialises"),
            seed,
            povm_hash: None,
        }
    }

    pub fn envelope(&self, result: Value) -> String {
        let value = json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "povm_hash": self.povm_hash,
            "result": result,
        });
        let mut text = serde_json::to_string_pretty(&value).expect("envelope serialises");
        text.push('\n');
        text
    }

    /// `#`-prefixed provenance line for CSV files.
    pub fn csv_header(&self) -> String {
        let meta = json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "povm_hash": self.povm_hash,
        });
        format!("# {meta}\n")
    }
}

/// Relative paths land in `FSHADOW_OUT_DIR` when it is set.
pub fn resolve_path(path: &Path) -> PathBuf {
    match env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes the main artifact to `--out`, to `FSHADOW_OUT_DIR/<default_name>`,
/// or to stdout, in that order of preference. Returns the file written.
pub fn emit(out: Option<&Path>, default_name: &str, text: &str) -> CliResult<Option<PathBuf>> {
    let target = match out {
        Some(p) => Some(resolve_path(p)),
        None => env::var_os(OUT_DIR_ENV).map(|dir| Path::new(&dir).join(default_name)),
    };
    match target {
        Some(path) => {
            write_file(&path, text)?;
            Ok(Some(path))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(None)
        }
    }
}

/// Writes a secondary artifact (always a file).
pub fn emit_file(path: &Path, text: &str) -> CliResult<PathBuf> {
    let path = resolve_path(path);
    write_file(&path, text)?;
    Ok(path)
}
