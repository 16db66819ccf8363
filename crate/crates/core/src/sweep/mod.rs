//! Parameter grids, revival/collapse detection, zero-entanglement maps and
//! open-system presets, with CSV and JSON persistence.
//!
//! A [`SweepConfig`] is read from a flat `key = value` file (blank lines and
//! `#` comments ignored) followed by command-line overrides in the same
//! syntax. Grid values accept a single number, a comma list, `lin:a:b:n` or
//! `log:a:b:n`.

mod config;
mod output;
mod revival;
mod scans;

pub use config::{
    parse_key_values, Axis, FsConstraint, Grid, ProtocolKind, ScanKind, SweepConfig, SystemSize,
    DEFAULT_EPSILON,
};
pub use output::{fmt_float, write_csv, Manifest};
pub use revival::{count_intervals, detect_revivals, Hump, RevivalReport};
pub use scans::{
    closed_scan, default_pairs, ln_grid, open_run, param_points, phase_map, snapshot_grid,
    thermal_beta_sweep, zero_region_map, ClosedScan, ClosedSummary, LnGrid, OpenPoint, OpenRun,
    PairSummary, ParamPoint, RegionCell, RegionRow, SnapshotCell, SnapshotGrid, SnapshotSummary,
    ThermalRow, ThermalSweep, ZeroRegionMap,
};
