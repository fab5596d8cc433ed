pub mod calibrate;
pub mod detect;
pub mod ghi;
pub mod index_series;
pub mod simulate;

use std::path::Path;

use nimbus_core::fsio::write_atomic;

use crate::CliError;

/// Write `content` atomically to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, content.as_bytes()).map_err(CliError::Core),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
