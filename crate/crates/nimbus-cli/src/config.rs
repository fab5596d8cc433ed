//! Configuration resolution.
//!
//! Every tunable resolves in this precedence order: explicit flag, then the
//! dataset manifest (when the input carries one), then the config file, then
//! a `NIMBUS_*` environment variable, then the built-in default. The config
//! file path itself comes from `--config` or `NIMBUS_CONFIG`.

use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::CliError;

pub const CONFIG_ENV: &str = "NIMBUS_CONFIG";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub lat: Option<f64>,
    pub lon: Option<f64>,
    pub tz_offset_min: Option<i32>,
    pub threshold: Option<f64>,
    pub window_min: Option<f64>,
    pub merge_gap_min: Option<f64>,
    pub crop_side: Option<u32>,
    pub pattern: Option<String>,
    pub step_minutes: Option<u32>,
    pub max_zenith: Option<f64>,
    pub grid_start: Option<f64>,
    pub grid_end: Option<f64>,
    pub grid_step: Option<f64>,
}

pub fn load(flag: Option<&Path>) -> Result<FileConfig, CliError> {
    let env_path = std::env::var(CONFIG_ENV).ok();
    let path = match (flag, env_path.as_deref()) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) if !p.is_empty() => p.into(),
        _ => return Ok(FileConfig::default()),
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

/// Resolve one setting: flag > manifest > config file > environment > default.
pub fn resolve<T>(
    flag: Option<T>,
    manifest: Option<T>,
    file: Option<T>,
    env_key: &str,
    default: Option<T>,
) -> Result<Option<T>, CliError>
where
    T: FromStr,
{
    if flag.is_some() {
        return Ok(flag);
    }
    if manifest.is_some() {
        return Ok(manifest);
    }
    if file.is_some() {
        return Ok(file);
    }
    if let Ok(raw) = std::env::var(env_key) {
        if !raw.is_empty() {
            return raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("{env_key}={raw:?} is not a valid value")));
        }
    }
    Ok(default)
}

/// Like [`resolve`] but the setting is mandatory.
pub fn require<T>(
    flag: Option<T>,
    manifest: Option<T>,
    file: Option<T>,
    env_key: &str,
    what: &str,
) -> Result<T, CliError>
where
    T: FromStr,
{
    resolve(flag, manifest, file, env_key, None)?.ok_or_else(|| {
        CliError::Usage(format!(
            "{what} is required: pass the flag, set it in the config file, or export {env_key}"
        ))
    })
}
