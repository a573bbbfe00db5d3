//! Experiment configuration, drivers for every CLI subcommand, CSV output and
//! on-disk persistence of compressed maps and reference fields.

mod cache;
mod commands;
mod config;
mod output;

pub use cache::{
    load_cache, load_field, save_cache, save_field, MapCache, StoredField, FIELD_MAGIC, FORMAT_VERSION, MAP_MAGIC,
};
pub use commands::{
    build_maps, cmd_homog_check, cmd_offline, cmd_rank_sweep, cmd_reference, cmd_run, cmd_spectrum, dense_spectrum,
    ensure_reference, load_maps, out_dir, reference_key, reference_path, run_online, velocity_average, BackendChoice,
    HomogReport, OfflineReport, OnlineRun, RankRow, RankSweepReport, ReferenceReport, RunReport, SpectrumMap,
    SpectrumReport, MAP_CACHE_FILE, MIN_NODES_PER_PERIOD, SPECTRUM_DIM_CAP,
};
pub use config::{parse_fraction, ExperimentConfig, InflowSelector, MediaSelector};
pub use output::{read_csv, write_atomic, write_plot_manifest, Cell, CsvTable};

#[cfg(test)]
mod tests;
