//! `nimbus calibrate` — the full threshold-calibration procedure: label the
//! index series by the rain window, build per-class CDFs, sweep the OC
//! curve, and select the elbow.

use std::path::PathBuf;

use serde::Serialize;

use nimbus_core::calibration::{
    build_events, label_samples, oc_curve, select_elbow, threshold_grid, EmpiricalCdf,
    DEFAULT_GRID_END, DEFAULT_GRID_START, DEFAULT_GRID_STEP, DEFAULT_MERGE_GAP_MIN,
    DEFAULT_WINDOW_MIN,
};
use nimbus_core::fsio::write_atomic;
use nimbus_core::index::{
    build_index_series, minutes_to_nearest_event, DetectionConfig, IndexSample,
    DEFAULT_CRITICAL_INDEX,
};
use nimbus_core::ingest::parse_gauge_csv;
use nimbus_core::Error;

use crate::config::{resolve, FileConfig};
use crate::inputs::{load, resolve_calibration};
use crate::{CalibrateArgs, CliError};

pub const CDF_FILE: &str = "cdf.csv";
pub const OC_FILE: &str = "oc.csv";
pub const SUMMARY_FILE: &str = "summary.json";

pub const CDF_HEADER: &str = "x,cdf_within,cdf_outside";
pub const OC_HEADER: &str = "threshold,pct_within_below,pct_outside_below";

#[derive(Serialize)]
struct Summary {
    selected_threshold: f64,
    n_within: usize,
    n_outside: usize,
}

pub fn run(args: &CalibrateArgs, cfg: &FileConfig) -> Result<(), CliError> {
    let window_min = resolve(
        args.window_min,
        None,
        cfg.window_min,
        "NIMBUS_WINDOW_MIN",
        Some(DEFAULT_WINDOW_MIN),
    )?
    .expect("has default");
    let merge_gap_min = resolve(
        args.merge_gap_min,
        None,
        cfg.merge_gap_min,
        "NIMBUS_MERGE_GAP_MIN",
        Some(DEFAULT_MERGE_GAP_MIN),
    )?
    .expect("has default");
    let grid_start = resolve(
        args.grid_start,
        None,
        cfg.grid_start,
        "NIMBUS_GRID_START",
        Some(DEFAULT_GRID_START),
    )?
    .expect("has default");
    let grid_end = resolve(
        args.grid_end,
        None,
        cfg.grid_end,
        "NIMBUS_GRID_END",
        Some(DEFAULT_GRID_END),
    )?
    .expect("has default");
    let grid_step = resolve(
        args.grid_step,
        None,
        cfg.grid_step,
        "NIMBUS_GRID_STEP",
        Some(DEFAULT_GRID_STEP),
    )?
    .expect("has default");
    if window_min < 0.0 {
        return Err(CliError::Usage(format!(
            "--window-min must be >= 0, got {window_min}"
        )));
    }

    let input = load(&args.input, cfg)?;
    let gauge_path: PathBuf = match (&args.gauge, &input.manifest) {
        (Some(path), _) => path.clone(),
        (None, Some(manifest)) => match &manifest.gauge_csv {
            Some(rel) => input.root.join(rel),
            None => {
                return Err(CliError::Usage(
                    "--gauge is required (the dataset manifest names no gauge file)".into(),
                ))
            }
        },
        (None, None) => return Err(CliError::Usage("--gauge is required".into())),
    };

    let calibration = resolve_calibration(&args.input, &input)?;
    let detection = DetectionConfig::new(DEFAULT_CRITICAL_INDEX, input.max_zenith_deg)
        .map_err(CliError::Core)?;
    let series = build_index_series(&input.samples, &input.location, &calibration, &detection)
        .map_err(CliError::Core)?;

    let gauge = parse_gauge_csv(&gauge_path).map_err(CliError::Core)?;
    let events = build_events(&gauge, merge_gap_min).map_err(CliError::Core)?;

    let samples: Vec<IndexSample> = series
        .rows
        .iter()
        .map(|row| IndexSample {
            timestamp: row.timestamp,
            index: row.index,
            minutes_to_nearest_rain: minutes_to_nearest_event(row.timestamp, &events),
        })
        .collect();
    let labeled = label_samples(&samples, &events, window_min);

    let grid = threshold_grid(grid_start, grid_end, grid_step).map_err(CliError::Core)?;
    let curve = oc_curve(&labeled, &grid).map_err(CliError::Core)?;
    let selected = select_elbow(&curve).map_err(CliError::Core)?;

    // per-class CDFs evaluated on the union of observed index values
    let within: Vec<f64> = labeled
        .iter()
        .filter(|s| s.within_window)
        .map(|s| s.index)
        .collect();
    let outside: Vec<f64> = labeled
        .iter()
        .filter(|s| !s.within_window)
        .map(|s| s.index)
        .collect();
    let cdf_within = EmpiricalCdf::new(&within).map_err(CliError::Core)?;
    let cdf_outside = EmpiricalCdf::new(&outside).map_err(CliError::Core)?;
    let mut xs: Vec<f64> = within.iter().chain(outside.iter()).copied().collect();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite indices"));
    xs.dedup();

    let mut cdf_csv = String::from(CDF_HEADER);
    cdf_csv.push('\n');
    for x in &xs {
        cdf_csv.push_str(&format!(
            "{},{},{}\n",
            x,
            cdf_within.query(*x),
            cdf_outside.query(*x)
        ));
    }

    let mut oc_csv = String::from(OC_HEADER);
    oc_csv.push('\n');
    for point in &curve {
        oc_csv.push_str(&format!(
            "{},{},{}\n",
            point.threshold, point.pct_within_below, point.pct_outside_below
        ));
    }

    let summary = Summary {
        selected_threshold: selected,
        n_within: within.len(),
        n_outside: outside.len(),
    };
    let mut summary_json = serde_json::to_string_pretty(&summary).map_err(|e| {
        CliError::Core(Error::Json {
            path: args.out_dir.join(SUMMARY_FILE),
            source: e,
        })
    })?;
    summary_json.push('\n');

    write_atomic(&args.out_dir.join(CDF_FILE), cdf_csv.as_bytes()).map_err(CliError::Core)?;
    write_atomic(&args.out_dir.join(OC_FILE), oc_csv.as_bytes()).map_err(CliError::Core)?;
    write_atomic(&args.out_dir.join(SUMMARY_FILE), summary_json.as_bytes())
        .map_err(CliError::Core)?;

    println!(
        "calibrate: selected_threshold={} n_within={} n_outside={} events={} excluded={} out_dir={}",
        selected,
        within.len(),
        outside.len(),
        events.len(),
        series.excluded,
        args.out_dir.display()
    );
    Ok(())
}
