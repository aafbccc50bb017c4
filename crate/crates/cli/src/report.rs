use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Command;

/// Version of the report layout.
pub const SCHEMA: &str = "intw-report/1";

/// Environment variable naming a directory that receives every report.
pub const OUTPUT_DIR_ENV: &str = "INTW_OUTPUT_DIR";

/// The result of one command before it is wrapped in a [`Report`].
#[derive(Debug)]
pub struct Outcome {
    pub exit_code: u8,
    pub result: serde_json::Value,
    /// Embedded algebra configuration, when one was loaded.
    pub algebra: Option<serde_json::Value>,
    pub summary: String,
    pub error: Option<String>,
}

impl Outcome {
    pub fn failure(message: String) -> Self {
        Outcome {
            exit_code: crate::EXIT_MALFORMED,
            result: serde_json::Value::Null,
            algebra: None,
            summary: String::new(),
            error: Some(message),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool: String,
    pub config: Command,
    #[serde(default)]
    pub algebra: Option<serde_json::Value>,
    pub exit_code: u8,
    #[serde(default)]
    pub error: Option<String>,
    pub result: serde_json::Value,
}

impl Report {
    pub fn new(config: Command, outcome: &Outcome) -> Self {
        Report {
            schema: SCHEMA.to_string(),
            tool: format!("intw {}", env!("CARGO_PKG_VERSION")),
            config,
            algebra: outcome.algebra.clone(),
            exit_code: outcome.exit_code,
            error: outcome.error.clone(),
            result: outcome.result.clone(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let report: Report = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if report.schema != SCHEMA {
            return Err(format!("unsupported report schema {:?}", report.schema));
        }
        Ok(report)
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    fn command_name(&self) -> &'static str {
        match &self.config {
            Command::Algebra { .. } => "algebra",
            Command::Fusion(_) => "fusion",
            Command::Kz(_) => "kz",
            Command::Candidate(_) => "candidate",
            Command::Batch(_) => "batch",
        }
    }

    /// `<command>-<digest of the config>.json`.
    pub fn file_name(&self) -> String {
        let config = serde_json::to_string(&self.config).expect("configs serialize");
        let digest = Sha256::digest(config.as_bytes());
        let hex: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
        format!("{}-{hex}.json", self.command_name())
    }
}

pub fn output_path(report: &Report, explicit: Option<&PathBuf>) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUTPUT_DIR_ENV)?;
    Some(PathBuf::from(dir).join(report.file_name()))
}
