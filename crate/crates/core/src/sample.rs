//! Bundled synthetic measurement corpus for the demonstration pipeline and
//! for tests that need a realistic dataset without external files.
//!
//! The corpus covers three adapters (`AC1`, `AC2`, `AC3`), all six
//! measurement positions, 51 spectrum lines from 30 to 300 Hz, and four
//! repeated sweeps half a second apart. Every value comes from a closed-form
//! rule — no randomness — so the corpus is identical on every call and every
//! platform.
//!
//! The shape mirrors what bench measurements of commercial laptop adapters
//! show: each spectrum peaks at 30 Hz and decays geometrically toward
//! 300 Hz, the top and bottom faces radiate an order of magnitude more than
//! the four lateral positions at 30 cm, and repeated sweeps drift slightly
//! downward. Per-side peaks sit exactly at the corpus constants below, so
//! summaries over the corpus reproduce them byte-for-byte.

use crate::spectrum::{write_spectrum_csv, MeasurementPosition, SpectrumSample};

/// Training seed used by the demonstration pipeline.
pub const DEMO_SEED: u64 = 42;

/// Adapter identifiers paired with the factor applied to the 300 Hz floor.
const ADAPTERS: [(&str, f64); 3] = [("AC1", 1.00), ("AC2", 0.97), ("AC3", 1.03)];

/// Peak field in microtesla at 30 Hz, per adapter (rows) and position
/// (columns, in [`MeasurementPosition::ALL`] order).
const PEAKS_UT: [[f64; 6]; 3] = [
    [4.910, 4.220, 0.350, 0.348, 0.348, 0.348],
    [4.360, 4.210, 0.350, 0.348, 0.364, 0.345],
    [15.400, 4.260, 0.460, 0.462, 0.452, 0.451],
];

/// Field floor in microtesla reached at 300 Hz, per position, before the
/// adapter factor.
const FLOORS_UT: [f64; 6] = [0.32, 0.29, 0.050, 0.048, 0.052, 0.046];

/// Frequency steps between consecutive spectrum lines, cycled ten times.
const STEP_PATTERN: [u32; 5] = [5, 6, 5, 5, 6];

const TIMES_MS: [i64; 4] = [0, 500, 1000, 1500];

/// Slight downward drift across the four sweeps.
const TIME_FACTORS: [f64; 4] = [1.0, 0.995, 0.99, 0.985];

/// The 51 spectrum-line frequencies: 30 Hz up to 300 Hz in the stepped grid
/// a swept analyzer produces.
pub fn sample_frequencies() -> Vec<f64> {
    let mut freqs = Vec::with_capacity(51);
    let mut f = 30u32;
    freqs.push(f as f64);
    for _ in 0..10 {
        for step in STEP_PATTERN {
            f += step;
            freqs.push(f as f64);
        }
    }
    freqs
}

/// The full corpus: one row per (adapter, position, frequency, sweep).
pub fn adapter_samples() -> Vec<SpectrumSample> {
    let freqs = sample_frequencies();
    let mut samples = Vec::with_capacity(
        ADAPTERS.len() * MeasurementPosition::ALL.len() * freqs.len() * TIMES_MS.len(),
    );
    for (adapter_index, (adapter_id, floor_factor)) in ADAPTERS.iter().enumerate() {
        for (position_index, position) in MeasurementPosition::ALL.iter().enumerate() {
            let peak = PEAKS_UT[adapter_index][position_index];
            let floor = FLOORS_UT[position_index] * floor_factor;
            let ratio = floor / peak;
            for &freq in &freqs {
                // exponent 0 at 30 Hz makes the peak value exact
                let shape = ratio.powf((freq - 30.0) / 270.0);
                for (sweep, &timestamp_ms) in TIMES_MS.iter().enumerate() {
                    let b = peak * shape * TIME_FACTORS[sweep];
                    samples.push(SpectrumSample {
                        adapter_id: adapter_id.to_string(),
                        position: *position,
                        frequency_hz: freq,
                        timestamp_ms,
                        b_total_ut: b,
                        b_x_ut: Some(0.6 * b),
                        b_y_ut: Some(0.5 * b),
                        b_z_ut: Some(0.39f64.sqrt() * b),
                    });
                }
            }
        }
    }
    samples
}

/// The corpus rendered as CSV, ready for `parse_spectrum_csv` or a file.
pub fn adapter_sample_csv() -> String {
    write_spectrum_csv(&adapter_samples())
}
