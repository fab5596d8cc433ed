//! `nimbus detect` — per-image onset flags against a critical index.

use nimbus_core::index::{
    build_index_series, detect_onset, DetectionConfig, DEFAULT_CRITICAL_INDEX,
};

use crate::commands::emit;
use crate::config::{resolve, FileConfig};
use crate::inputs::{load, resolve_calibration};
use crate::{CliError, DetectArgs};

pub const CSV_HEADER: &str = "timestamp,index,onset_flag";

pub fn run(args: &DetectArgs, cfg: &FileConfig) -> Result<(), CliError> {
    let threshold = resolve(
        args.threshold,
        None,
        cfg.threshold,
        "NIMBUS_THRESHOLD",
        Some(DEFAULT_CRITICAL_INDEX),
    )?
    .expect("has default");
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(CliError::Usage(format!(
            "--threshold must lie in (0, 1], got {threshold}"
        )));
    }

    let input = load(&args.input, cfg)?;
    let calibration = resolve_calibration(&args.input, &input)?;
    let detection =
        DetectionConfig::new(threshold, input.max_zenith_deg).map_err(CliError::Core)?;
    let series = build_index_series(&input.samples, &input.location, &calibration, &detection)
        .map_err(CliError::Core)?;

    let offset = input.offset();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let mut onset = 0usize;
    for row in &series.rows {
        let flagged = detect_onset(row.index, &detection);
        if flagged {
            onset += 1;
        }
        out.push_str(&format!(
            "{},{},{}\n",
            row.timestamp
                .with_timezone(&offset)
                .to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            row.index,
            flagged
        ));
    }
    emit(args.out.as_deref(), &out)?;

    let summary = format!(
        "detect: threshold={} samples={} onset={} clear={} excluded={}",
        threshold,
        series.rows.len(),
        onset,
        series.rows.len() - onset,
        series.excluded
    );
    // keep stdout clean when the CSV itself goes there
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}
