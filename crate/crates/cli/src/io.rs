use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use sparsedom::dyadic::dgf;
use sparsedom::sparse::{FamilyJson, SparseFamily};
use sparsedom::GridFunction;

use crate::CliError;

pub fn read_dgf(path: &Path) -> Result<GridFunction, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    dgf::read_function(BufReader::new(file)).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn read_family(path: &Path) -> Result<SparseFamily, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let json: FamilyJson =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    SparseFamily::from_json(&json).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

pub fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}
