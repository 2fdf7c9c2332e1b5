use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};

/// Stage of the pipeline a failure belongs to; decides the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Config,
    Trace,
    Ortho,
    Verify,
    Plot,
}

impl Stage {
    pub fn exit_code(self) -> i32 {
        match self {
            Stage::Config => 64,
            Stage::Trace => 2,
            Stage::Ortho => 3,
            Stage::Verify => 4,
            Stage::Plot => 5,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Trace => "trace",
            Stage::Ortho => "ortho",
            Stage::Verify => "verify",
            Stage::Plot => "plot",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub stage: Stage,
    pub message: String,
    /// Extra machine-readable fields merged into the error document.
    pub details: Value,
}

impl CliError {
    pub fn new(stage: Stage, message: impl ToString) -> Self {
        Self {
            stage,
            message: message.to_string(),
            details: Value::Null,
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn to_json(&self) -> Value {
        let mut doc = json!({
            "error": self.stage.name(),
            "exit_code": self.stage.exit_code(),
            "message": self.message,
        });
        if let Value::Object(extra) = &self.details {
            for (k, v) in extra {
                doc[k] = v.clone();
            }
        }
        doc
    }
}

impl From<crate::config::ConfigError> for CliError {
    fn from(e: crate::config::ConfigError) -> Self {
        CliError::new(Stage::Config, e)
    }
}

/// The output directory plus progress reporting.
pub struct Output {
    dir: PathBuf,
    quiet: bool,
}

impl Output {
    pub fn new(dir: &Path, quiet: bool) -> Self {
        Self {
            dir: dir.to_path_buf(),
            quiet,
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&self, stage: Stage, name: &str, contents: &str) -> Result<(), CliError> {
        fs::create_dir_all(&self.dir).map_err(|e| CliError::new(stage, format!("{}: {e}", self.dir.display())))?;
        let path = self.path(name);
        fs::write(&path, contents).map_err(|e| CliError::new(stage, format!("{}: {e}", path.display())))?;
        self.note(&format!("wrote {}", path.display()));
        Ok(())
    }

    pub fn write_json(&self, stage: Stage, name: &str, value: &Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
        text.push('\n');
        self.write(stage, name, &text)
    }

    pub fn note(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }
}
