//! File formats and command logic behind the `higs-ni` binary.
//!
//! The computational core is the `higs-ni` library crate; this crate adds
//! everything that touches the filesystem: JSON schemas ([`json`]), CSV
//! writers ([`csvfmt`]), bundled example data ([`data`]), and the
//! subcommands ([`commands`]).

use std::fs;
use std::path::Path;

use higs_ni::lti::StateSpace;

pub mod cli;
pub mod commands;
pub mod csvfmt;
pub mod data;
pub mod json;

/// Errors that map onto process exit codes.
#[derive(Debug)]
pub enum CmdError {
    /// Command-line misuse (exit 64).
    Usage(String),
    /// Unreadable or invalid input data (exit 65).
    Data(String),
    /// Chattering abort from the simulator (exit 4).
    Chattering,
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Usage(m) => write!(f, "usage error: {m}"),
            CmdError::Data(m) => write!(f, "data error: {m}"),
            CmdError::Chattering => write!(f, "chattering abort"),
        }
    }
}

/// Load a state-space model from a JSON file.
pub fn read_system(path: &Path) -> Result<StateSpace, CmdError> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CmdError::Data(format!("{}: {e}", path.display())))?;
    let json: json::StateSpaceJson = serde_json::from_str(&raw)
        .map_err(|e| CmdError::Data(format!("{}: {e}", path.display())))?;
    json.to_state_space()
}

/// Write to the given path, or stdout when `None`.
pub fn write_text(out: Option<&Path>, text: &str) -> Result<(), CmdError> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)
                        .map_err(|e| CmdError::Data(format!("{}: {e}", parent.display())))?;
                }
            }
            fs::write(path, text).map_err(|e| CmdError::Data(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
