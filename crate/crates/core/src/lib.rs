//! Clustering of extremely-low-frequency magnetic-field spectra into ordered
//! emission levels.
//!
//! The crate ingests spectrum measurements of laptop AC adapters taken at six
//! positions around the device, averages repeated sweeps into per-frequency
//! instances, clusters the field values with a one-dimensional
//! self-organizing map, and names each cluster as an emission level
//! (`very low` through `very high`) with its field and frequency ranges
//! flagged against a safety limit (0.2 µT by default). Equal-width and
//! equal-frequency binning baselines are included for comparison, along with
//! a deterministic synthetic corpus for demonstrations and tests.
//!
//! The pipeline: [`spectrum::parse_spectrum_csv`] →
//! [`spectrum::build_dataset`] → [`som::train`] →
//! [`report::build_level_report`] → [`report::render_report`]. Training is
//! deterministic: a dataset, a configuration, and a seed fully determine the
//! trained network and every downstream report byte.

pub mod binning;
pub mod report;
pub mod sample;
pub mod som;
pub mod spectrum;

pub use binning::{equal_frequency_bins, equal_width_bins, BinAssignment, BinningError};
pub use report::{
    build_level_report, emit_plot_data, order_clusters, render_plot_series, render_report,
    safety_flag, EmissionLevel, LevelRange, LevelReport, LevelRow, PlotSeries, RenderFormat,
    ReportError, SafetyFlag, DEFAULT_LIMIT_UT,
};
pub use sample::{adapter_sample_csv, adapter_samples, sample_frequencies, DEMO_SEED};
pub use som::{
    default_epochs, from_model_string, to_model_string, train, train_step, InitMode,
    NeighborhoodKernel, SomConfig, SomError, SomNetwork, TrainingTrace,
};
pub use spectrum::{
    build_dataset, parse_spectrum_csv, summarize_adapters, write_spectrum_csv, AdapterSummary,
    DatasetError, EmissionDataset, EmissionInstance, MeasurementPosition, ParseError,
    PositionParseError, PositionStats, SpectrumSample, CSV_HEADER,
};
