//! `nimbus index` — clearness luminance index series as CSV.

use nimbus_core::index::{build_index_series, DetectionConfig, DEFAULT_CRITICAL_INDEX};

use crate::commands::emit;
use crate::config::FileConfig;
use crate::inputs::{load, resolve_calibration};
use crate::{CliError, IndexArgs};

pub const CSV_HEADER: &str = "timestamp,l_m,g_c,l_c,index";

pub fn run(args: &IndexArgs, cfg: &FileConfig) -> Result<(), CliError> {
    let input = load(&args.input, cfg)?;
    let calibration = resolve_calibration(&args.input, &input)?;
    let detection = DetectionConfig::new(DEFAULT_CRITICAL_INDEX, input.max_zenith_deg)
        .map_err(CliError::Core)?;
    let series = build_index_series(&input.samples, &input.location, &calibration, &detection)
        .map_err(CliError::Core)?;

    let offset = input.offset();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &series.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.timestamp
                .with_timezone(&offset)
                .to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            row.l_m,
            row.g_c_wm2,
            row.l_c,
            row.index
        ));
    }
    emit(args.out.as_deref(), &out)?;
    eprintln!(
        "index: samples={} excluded={}",
        series.rows.len(),
        series.excluded
    );
    Ok(())
}
