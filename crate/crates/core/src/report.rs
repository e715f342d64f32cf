//! Emission-level reports: order trained clusters into named levels, tabulate
//! per-level field and frequency ranges with safety flags, and emit plot-ready
//! spectrum series.
//!
//! Clusters are ranked by ascending prototype value — for one-dimensional
//! features the prototype is the cluster's representative field level — and
//! the ranks become levels `very low` through `very high` (or `level 0..k-1`
//! for a non-five-cluster network). Each level row carries the min/max field
//! value and frequency over its members plus a flag against a configurable
//! safety limit (0.2 µT by default): `below` when the whole range sits at or
//! under the limit, `above` when even the minimum exceeds it, `borderline`
//! when the limit falls inside the range.

use std::fmt;

use serde_json::json;
use thiserror::Error;

use crate::som::{SomError, SomNetwork};
use crate::spectrum::{EmissionDataset, MeasurementPosition, SpectrumSample};

/// Default safety reference limit in microtesla.
pub const DEFAULT_LIMIT_UT: f64 = 0.2;

/// A level's rank within the total level count; ordering follows the rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EmissionLevel {
    rank: usize,
    count: usize,
}

impl EmissionLevel {
    /// Level at `rank` out of `count` (0 = lowest emission).
    pub fn new(rank: usize, count: usize) -> Self {
        assert!(rank < count, "rank {rank} out of range for {count} levels");
        EmissionLevel { rank, count }
    }

    pub fn rank(self) -> usize {
        self.rank
    }

    pub fn count(self) -> usize {
        self.count
    }

    /// Human name: the five-level scale gets the conventional names, other
    /// scales fall back to `level <rank>`.
    pub fn label(self) -> String {
        if self.count == 5 {
            ["very low", "low", "middle", "high", "very high"][self.rank].to_string()
        } else {
            format!("level {}", self.rank)
        }
    }
}

impl fmt::Display for EmissionLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Position of a level's value range relative to the safety limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SafetyFlag {
    /// The whole range sits at or below the limit.
    Below,
    /// The range straddles the limit.
    Borderline,
    /// Even the minimum exceeds the limit.
    Above,
}

impl SafetyFlag {
    pub fn token(self) -> &'static str {
        match self {
            SafetyFlag::Below => "below",
            SafetyFlag::Borderline => "borderline",
            SafetyFlag::Above => "above",
        }
    }
}

impl fmt::Display for SafetyFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Flag for a value range against a limit: `Below` iff `b_max <= limit`,
/// `Above` iff `b_min > limit`, `Borderline` otherwise.
pub fn safety_flag(b_min_ut: f64, b_max_ut: f64, limit_ut: f64) -> SafetyFlag {
    if b_max_ut <= limit_ut {
        SafetyFlag::Below
    } else if b_min_ut > limit_ut {
        SafetyFlag::Above
    } else {
        SafetyFlag::Borderline
    }
}

/// Field and frequency extent of a non-empty level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRange {
    pub b_min_ut: f64,
    pub b_max_ut: f64,
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub safety: SafetyFlag,
}

/// One report row; `range` is absent when the level has no members.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRow {
    pub level: EmissionLevel,
    pub member_count: usize,
    pub range: Option<LevelRange>,
}

/// Per-position level table, rows ascending from the lowest level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub position: MeasurementPosition,
    pub limit_ut: f64,
    pub rows: Vec<LevelRow>,
}

/// Report output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RenderFormat {
    #[default]
    Markdown,
    Csv,
    Json,
}

impl RenderFormat {
    pub fn token(self) -> &'static str {
        match self {
            RenderFormat::Markdown => "markdown",
            RenderFormat::Csv => "csv",
            RenderFormat::Json => "json",
        }
    }

    pub fn parse_token(s: &str) -> Option<Self> {
        match s {
            "markdown" => Some(RenderFormat::Markdown),
            "csv" => Some(RenderFormat::Csv),
            "json" => Some(RenderFormat::Json),
            _ => None,
        }
    }
}

/// A named spectrum line: `(frequency_hz, value_ut)` points in ascending
/// frequency order.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("level ordering needs a one-dimensional network, found dimension {dim}")]
    NotOneDimensional { dim: usize },
    #[error("safety limit must be finite, found {limit}")]
    InvalidLimit { limit: f64 },
    #[error(transparent)]
    Som(#[from] SomError),
    #[error("no samples for adapter `{adapter_id}` at position {position}")]
    MissingSeries {
        adapter_id: String,
        position: MeasurementPosition,
    },
    #[error("positions {position_a} and {position_b} have different frequency grids")]
    GridMismatch {
        position_a: MeasurementPosition,
        position_b: MeasurementPosition,
    },
}

/// Rank clusters by ascending prototype value (ties by lower neuron index)
/// and return each neuron's level, indexed by neuron.
pub fn order_clusters(network: &SomNetwork) -> Result<Vec<EmissionLevel>, ReportError> {
    if network.input_dim() != 1 {
        return Err(ReportError::NotOneDimensional {
            dim: network.input_dim(),
        });
    }
    let k = network.neuron_count();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        network.prototypes()[a][0]
            .total_cmp(&network.prototypes()[b][0])
            .then(a.cmp(&b))
    });
    let mut levels = vec![EmissionLevel::new(0, k); k];
    for (rank, &neuron) in order.iter().enumerate() {
        levels[neuron] = EmissionLevel::new(rank, k);
    }
    Ok(levels)
}

/// Classify every instance, fold members into their level's row, and flag
/// each non-empty row against `limit_ut`. Levels without members keep a row
/// with zero members and no range.
pub fn build_level_report(
    dataset: &EmissionDataset,
    network: &SomNetwork,
    limit_ut: f64,
) -> Result<LevelReport, ReportError> {
    if !limit_ut.is_finite() {
        return Err(ReportError::InvalidLimit { limit: limit_ut });
    }
    let levels = order_clusters(network)?;
    let k = network.neuron_count();

    struct Accumulator {
        b_min: f64,
        b_max: f64,
        f_min: f64,
        f_max: f64,
        count: usize,
    }
    let mut per_rank: Vec<Accumulator> = (0..k)
        .map(|_| Accumulator {
            b_min: f64::INFINITY,
            b_max: f64::NEG_INFINITY,
            f_min: f64::INFINITY,
            f_max: f64::NEG_INFINITY,
            count: 0,
        })
        .collect();

    for instance in dataset.instances() {
        let neuron = network.classify(&[instance.b_mean_ut])?;
        let acc = &mut per_rank[levels[neuron].rank()];
        acc.b_min = acc.b_min.min(instance.b_mean_ut);
        acc.b_max = acc.b_max.max(instance.b_mean_ut);
        acc.f_min = acc.f_min.min(instance.frequency_hz);
        acc.f_max = acc.f_max.max(instance.frequency_hz);
        acc.count += 1;
    }

    let rows = per_rank
        .into_iter()
        .enumerate()
        .map(|(rank, acc)| LevelRow {
            level: EmissionLevel::new(rank, k),
            member_count: acc.count,
            range: (acc.count > 0).then(|| LevelRange {
                b_min_ut: acc.b_min,
                b_max_ut: acc.b_max,
                f_min_hz: acc.f_min,
                f_max_hz: acc.f_max,
                safety: safety_flag(acc.b_min, acc.b_max, limit_ut),
            }),
        })
        .collect();

    Ok(LevelReport {
        position: dataset.position(),
        limit_ut,
        rows,
    })
}

/// Render a report as byte-stable text in the requested format.
pub fn render_report(report: &LevelReport, format: RenderFormat) -> String {
    match format {
        RenderFormat::Markdown => render_markdown(report),
        RenderFormat::Csv => render_csv(report),
        RenderFormat::Json => render_json(report),
    }
}

fn render_markdown(report: &LevelReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "## Emission levels: {} (limit {} µT)\n\n",
        report.position, report.limit_ut
    ));
    out.push_str(
        "| level | members | b_min (µT) | b_max (µT) | f_min (Hz) | f_max (Hz) | safety |\n",
    );
    out.push_str("|---|---|---|---|---|---|---|\n");
    for row in &report.rows {
        match &row.range {
            Some(r) => out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} |\n",
                row.level,
                row.member_count,
                r.b_min_ut,
                r.b_max_ut,
                r.f_min_hz,
                r.f_max_hz,
                r.safety
            )),
            None => out.push_str(&format!("| {} | 0 | - | - | - | - | - |\n", row.level)),
        }
    }
    out
}

fn render_csv(report: &LevelReport) -> String {
    let mut out =
        String::from("position,level,members,b_min_ut,b_max_ut,f_min_hz,f_max_hz,safety\n");
    for row in &report.rows {
        match &row.range {
            Some(r) => out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                report.position,
                row.level,
                row.member_count,
                r.b_min_ut,
                r.b_max_ut,
                r.f_min_hz,
                r.f_max_hz,
                r.safety
            )),
            None => out.push_str(&format!("{},{},0,,,,,\n", report.position, row.level)),
        }
    }
    out
}

fn render_json(report: &LevelReport) -> String {
    let rows: Vec<serde_json::Value> = report
        .rows
        .iter()
        .map(|row| match &row.range {
            Some(r) => json!({
                "level": row.level.label(),
                "rank": row.level.rank(),
                "member_count": row.member_count,
                "b_min_ut": r.b_min_ut,
                "b_max_ut": r.b_max_ut,
                "f_min_hz": r.f_min_hz,
                "f_max_hz": r.f_max_hz,
                "safety": r.safety.token(),
            }),
            None => json!({
                "level": row.level.label(),
                "rank": row.level.rank(),
                "member_count": 0,
            }),
        })
        .collect();
    let value = json!({
        "position": report.position.token(),
        "limit_ut": report.limit_ut,
        "rows": rows,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("report JSON cannot fail");
    text.push('\n');
    text
}

/// Mean spectrum (over timestamps) for one adapter and position, ascending in
/// frequency.
fn mean_spectrum(
    samples: &[SpectrumSample],
    adapter_id: &str,
    position: MeasurementPosition,
) -> Result<Vec<(f64, f64)>, ReportError> {
    let mut pairs: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.adapter_id == adapter_id && s.position == position)
        .map(|s| (s.frequency_hz, s.b_total_ut))
        .collect();
    if pairs.is_empty() {
        return Err(ReportError::MissingSeries {
            adapter_id: adapter_id.to_string(),
            position,
        });
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut series = Vec::new();
    let mut start = 0;
    while start < pairs.len() {
        let freq = pairs[start].0;
        let mut end = start;
        let mut total = 0.0;
        while end < pairs.len() && pairs[end].0 == freq {
            total += pairs[end].1;
            end += 1;
        }
        series.push((freq, total / (end - start) as f64));
        start = end;
    }
    Ok(series)
}

/// Build the two mean spectra for `adapter_id` at the given positions plus
/// their pointwise difference (A − B). Both positions must cover the same
/// frequency grid.
pub fn emit_plot_data(
    samples: &[SpectrumSample],
    adapter_id: &str,
    position_a: MeasurementPosition,
    position_b: MeasurementPosition,
) -> Result<[PlotSeries; 3], ReportError> {
    let series_a = mean_spectrum(samples, adapter_id, position_a)?;
    let series_b = mean_spectrum(samples, adapter_id, position_b)?;
    let grid_matches =
        series_a.len() == series_b.len() && series_a.iter().zip(&series_b).all(|(a, b)| a.0 == b.0);
    if !grid_matches {
        return Err(ReportError::GridMismatch {
            position_a,
            position_b,
        });
    }
    let difference: Vec<(f64, f64)> = series_a
        .iter()
        .zip(&series_b)
        .map(|(a, b)| (a.0, a.1 - b.1))
        .collect();
    Ok([
        PlotSeries {
            label: format!("{adapter_id} {position_a}"),
            points: series_a,
        },
        PlotSeries {
            label: format!("{adapter_id} {position_b}"),
            points: series_b,
        },
        PlotSeries {
            label: format!("{adapter_id} {position_a} minus {position_b}"),
            points: difference,
        },
    ])
}

/// Render a series as plot-tool-ready text: one `frequency value` pair per
/// line, whitespace-separated.
pub fn render_plot_series(series: &PlotSeries) -> String {
    let mut out = String::new();
    for (freq, value) in &series.points {
        out.push_str(&format!("{freq} {value}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{build_dataset, parse_spectrum_csv, CSV_HEADER};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chain(values: &[f64]) -> SomNetwork {
        SomNetwork::from_prototypes(values.iter().map(|&v| vec![v]).collect()).unwrap()
    }

    fn dataset_from_rows(rows: &[(f64, f64)]) -> EmissionDataset {
        // one adapter per row so every (frequency, value) pair survives as
        // its own instance
        let mut csv = String::from(CSV_HEADER);
        csv.push('\n');
        for (i, (freq, value)) in rows.iter().enumerate() {
            csv.push_str(&format!("A{i},top,{freq},0,{value},,,\n"));
        }
        let samples = parse_spectrum_csv(&csv).unwrap();
        build_dataset(&samples, MeasurementPosition::Top).unwrap()
    }

    #[test]
    fn level_labels_five_point_scale() {
        let labels: Vec<String> = (0..5).map(|r| EmissionLevel::new(r, 5).label()).collect();
        assert_eq!(labels, ["very low", "low", "middle", "high", "very high"]);
        assert_eq!(EmissionLevel::new(2, 7).label(), "level 2");
        assert!(EmissionLevel::new(0, 5) < EmissionLevel::new(4, 5));
    }

    #[test]
    fn safety_flag_rule() {
        assert_eq!(safety_flag(0.1, 0.15, 0.2), SafetyFlag::Below);
        assert_eq!(safety_flag(0.1, 0.2, 0.2), SafetyFlag::Below); // max == limit
        assert_eq!(safety_flag(0.15, 0.25, 0.2), SafetyFlag::Borderline);
        assert_eq!(safety_flag(0.2, 0.25, 0.2), SafetyFlag::Borderline); // min == limit
        assert_eq!(safety_flag(0.21, 0.5, 0.2), SafetyFlag::Above);
    }

    #[test]
    fn order_clusters_by_prototype_value() {
        let net = chain(&[5.0, 0.1, 2.0, 9.0, 0.5]);
        let levels = order_clusters(&net).unwrap();
        let ranks: Vec<usize> = levels.iter().map(|l| l.rank()).collect();
        // neuron 1 lowest, then 4, 2, 0, 3
        assert_eq!(ranks, vec![3, 0, 2, 4, 1]);
        assert_eq!(levels[1].label(), "very low");
        assert_eq!(levels[4].label(), "low");
        assert_eq!(levels[2].label(), "middle");
        assert_eq!(levels[0].label(), "high");
        assert_eq!(levels[3].label(), "very high");
    }

    #[test]
    fn order_clusters_sorted_is_identity() {
        let net = chain(&[0.1, 0.2, 0.3, 0.4, 0.5]);
        let levels = order_clusters(&net).unwrap();
        for (i, level) in levels.iter().enumerate() {
            assert_eq!(level.rank(), i);
        }
    }

    #[test]
    fn order_clusters_ties_break_by_index() {
        let net = chain(&[2.0, 1.0, 1.0]);
        let levels = order_clusters(&net).unwrap();
        assert_eq!(levels[1].rank(), 0); // lower index wins the tie
        assert_eq!(levels[2].rank(), 1);
        assert_eq!(levels[0].rank(), 2);
    }

    #[test]
    fn order_clusters_permutation_invariant() {
        let base = [5.0, 0.1, 2.0, 9.0, 0.5];
        let base_levels = order_clusters(&chain(&base)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut perm: Vec<usize> = (0..base.len()).collect();
        for _ in 0..20 {
            perm.shuffle(&mut rng);
            let permuted: Vec<f64> = perm.iter().map(|&i| base[i]).collect();
            let levels = order_clusters(&chain(&permuted)).unwrap();
            for (j, &i) in perm.iter().enumerate() {
                assert_eq!(levels[j], base_levels[i], "perm {perm:?} slot {j}");
            }
        }
    }

    #[test]
    fn order_clusters_rejects_multidimensional() {
        let net = SomNetwork::from_prototypes(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(
            order_clusters(&net),
            Err(ReportError::NotOneDimensional { dim: 2 })
        );
    }

    #[test]
    fn report_very_high_row_above_limit() {
        let dataset = dataset_from_rows(&[
            (100.0, 0.1),
            (90.0, 0.21),
            (80.0, 0.3),
            (70.0, 0.4),
            (50.0, 36.51),
            (60.0, 49.99),
        ]);
        let net = chain(&[0.1, 0.21, 0.3, 0.4, 40.0]);
        let report = build_level_report(&dataset, &net, DEFAULT_LIMIT_UT).unwrap();
        let top = report.rows.last().unwrap();
        assert_eq!(top.level.label(), "very high");
        assert_eq!(top.member_count, 2);
        let range = top.range.unwrap();
        assert_eq!(range.b_min_ut, 36.51);
        assert_eq!(range.b_max_ut, 49.99);
        assert_eq!(range.f_min_hz, 50.0);
        assert_eq!(range.f_max_hz, 60.0);
        assert_eq!(range.safety, SafetyFlag::Above);
    }

    #[test]
    fn report_all_below_when_under_limit() {
        let dataset = dataset_from_rows(&[(50.0, 0.1), (60.0, 0.1), (70.0, 0.1)]);
        let net = chain(&[0.05, 0.1, 0.5]);
        let report = build_level_report(&dataset, &net, 0.2).unwrap();
        for row in &report.rows {
            if let Some(range) = &row.range {
                assert_eq!(range.safety, SafetyFlag::Below);
            }
        }
    }

    #[test]
    fn report_borderline_when_straddling_limit() {
        let dataset = dataset_from_rows(&[(50.0, 0.15), (60.0, 0.25)]);
        let net = chain(&[0.2]);
        let report = build_level_report(&dataset, &net, 0.2).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].range.unwrap().safety, SafetyFlag::Borderline);
    }

    #[test]
    fn report_empty_level_has_no_range() {
        let dataset = dataset_from_rows(&[(50.0, 1.0), (60.0, 2.0)]);
        let net = chain(&[1.0, 2.0, 100.0]);
        let report = build_level_report(&dataset, &net, 0.2).unwrap();
        assert_eq!(report.rows[2].member_count, 0);
        assert!(report.rows[2].range.is_none());
        assert_eq!(report.rows[0].member_count, 1);
        assert_eq!(report.rows[1].member_count, 1);
    }

    #[test]
    fn report_member_counts_conserve_dataset_size() {
        let rows: Vec<(f64, f64)> = (0..40)
            .map(|i| (30.0 + i as f64, 0.1 + 0.37 * (i % 7) as f64))
            .collect();
        let dataset = dataset_from_rows(&rows);
        let net = chain(&[0.1, 0.5, 1.0, 1.8, 2.4]);
        let report = build_level_report(&dataset, &net, 0.2).unwrap();
        let total: usize = report.rows.iter().map(|r| r.member_count).sum();
        assert_eq!(total, dataset.len());
    }

    #[test]
    fn report_rows_ascend_and_ranges_are_ordered() {
        let rows: Vec<(f64, f64)> = (0..30)
            .map(|i| (30.0 + i as f64, (i as f64 * 0.73).sin().abs() + 0.01))
            .collect();
        let dataset = dataset_from_rows(&rows);
        let net = chain(&[0.05, 0.3, 0.6, 0.9, 1.1]);
        let report = build_level_report(&dataset, &net, 0.2).unwrap();
        for w in report.rows.windows(2) {
            assert!(w[0].level < w[1].level);
        }
        for row in &report.rows {
            if let Some(range) = &row.range {
                assert!(range.b_min_ut <= range.b_max_ut);
                assert!(range.f_min_hz <= range.f_max_hz);
            }
        }
    }

    #[test]
    fn report_rejects_non_finite_limit() {
        let dataset = dataset_from_rows(&[(50.0, 1.0)]);
        let net = chain(&[1.0]);
        assert!(matches!(
            build_level_report(&dataset, &net, f64::NAN),
            Err(ReportError::InvalidLimit { .. })
        ));
    }

    fn small_report() -> LevelReport {
        LevelReport {
            position: MeasurementPosition::Top,
            limit_ut: 0.2,
            rows: vec![
                LevelRow {
                    level: EmissionLevel::new(0, 2),
                    member_count: 2,
                    range: Some(LevelRange {
                        b_min_ut: 0.1,
                        b_max_ut: 0.30000000000000004,
                        f_min_hz: 150.0,
                        f_max_hz: 300.0,
                        safety: SafetyFlag::Borderline,
                    }),
                },
                LevelRow {
                    level: EmissionLevel::new(1, 2),
                    member_count: 0,
                    range: None,
                },
            ],
        }
    }

    #[test]
    fn markdown_layout() {
        let text = render_report(&small_report(), RenderFormat::Markdown);
        let expected = "## Emission levels: top (limit 0.2 µT)\n\n\
            | level | members | b_min (µT) | b_max (µT) | f_min (Hz) | f_max (Hz) | safety |\n\
            |---|---|---|---|---|---|---|\n\
            | level 0 | 2 | 0.1 | 0.30000000000000004 | 150 | 300 | borderline |\n\
            | level 1 | 0 | - | - | - | - | - |\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn csv_layout() {
        let text = render_report(&small_report(), RenderFormat::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "position,level,members,b_min_ut,b_max_ut,f_min_hz,f_max_hz,safety"
        );
        assert_eq!(
            lines[1],
            "top,level 0,2,0.1,0.30000000000000004,150,300,borderline"
        );
        assert_eq!(lines[2], "top,level 1,0,,,,,");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn json_round_trips_numbers_exactly() {
        let report = small_report();
        let text = render_report(&report, RenderFormat::Json);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["position"], "top");
        assert_eq!(value["limit_ut"].as_f64().unwrap(), 0.2);
        let rows = value["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 2);
        let b_max = rows[0]["b_max_ut"].as_f64().unwrap();
        assert_eq!(b_max.to_bits(), 0.30000000000000004f64.to_bits());
        assert_eq!(rows[0]["safety"], "borderline");
        assert_eq!(rows[1]["member_count"], 0);
        assert!(rows[1].get("b_min_ut").is_none());
    }

    #[test]
    fn rendering_is_deterministic() {
        let report = small_report();
        for format in [
            RenderFormat::Markdown,
            RenderFormat::Csv,
            RenderFormat::Json,
        ] {
            assert_eq!(
                render_report(&report, format),
                render_report(&report, format)
            );
        }
    }

    #[test]
    fn empty_report_renders_header_only() {
        let report = LevelReport {
            position: MeasurementPosition::Left30,
            limit_ut: 0.2,
            rows: vec![],
        };
        let markdown = render_report(&report, RenderFormat::Markdown);
        assert!(markdown.ends_with("|---|---|---|---|---|---|---|\n"));
        let csv = render_report(&report, RenderFormat::Csv);
        assert_eq!(csv.lines().count(), 1);
    }

    fn sample(
        adapter: &str,
        position: MeasurementPosition,
        freq: f64,
        value: f64,
    ) -> SpectrumSample {
        SpectrumSample {
            adapter_id: adapter.to_string(),
            position,
            frequency_hz: freq,
            timestamp_ms: 0,
            b_total_ut: value,
            b_x_ut: None,
            b_y_ut: None,
            b_z_ut: None,
        }
    }

    #[test]
    fn plot_difference_of_identical_spectra_is_zero() {
        let samples = vec![
            sample("AC1", MeasurementPosition::Top, 50.0, 4.0),
            sample("AC1", MeasurementPosition::Top, 60.0, 3.0),
            sample("AC1", MeasurementPosition::Bottom, 50.0, 4.0),
            sample("AC1", MeasurementPosition::Bottom, 60.0, 3.0),
        ];
        let [a, b, diff] = emit_plot_data(
            &samples,
            "AC1",
            MeasurementPosition::Top,
            MeasurementPosition::Bottom,
        )
        .unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(diff.points, vec![(50.0, 0.0), (60.0, 0.0)]);
    }

    #[test]
    fn plot_difference_subtracts_pointwise() {
        let samples = vec![
            sample("AC1", MeasurementPosition::Top, 50.0, 4.0),
            sample("AC1", MeasurementPosition::Bottom, 50.0, 1.5),
        ];
        let [_, _, diff] = emit_plot_data(
            &samples,
            "AC1",
            MeasurementPosition::Top,
            MeasurementPosition::Bottom,
        )
        .unwrap();
        assert_eq!(diff.points, vec![(50.0, 2.5)]);
    }

    #[test]
    fn plot_averages_timestamps_and_sorts_frequencies() {
        let mut top1 = sample("AC1", MeasurementPosition::Top, 60.0, 4.0);
        top1.timestamp_ms = 500;
        let samples = vec![
            sample("AC1", MeasurementPosition::Top, 60.0, 2.0),
            top1,
            sample("AC1", MeasurementPosition::Top, 50.0, 1.0),
            sample("AC1", MeasurementPosition::Bottom, 50.0, 1.0),
            sample("AC1", MeasurementPosition::Bottom, 60.0, 1.0),
        ];
        let [a, _, _] = emit_plot_data(
            &samples,
            "AC1",
            MeasurementPosition::Top,
            MeasurementPosition::Bottom,
        )
        .unwrap();
        assert_eq!(a.points, vec![(50.0, 1.0), (60.0, 3.0)]);
    }

    #[test]
    fn plot_ignores_other_adapters() {
        let samples = vec![
            sample("AC1", MeasurementPosition::Top, 50.0, 4.0),
            sample("AC1", MeasurementPosition::Bottom, 50.0, 1.0),
            sample("AC2", MeasurementPosition::Top, 50.0, 99.0),
        ];
        let [a, _, _] = emit_plot_data(
            &samples,
            "AC1",
            MeasurementPosition::Top,
            MeasurementPosition::Bottom,
        )
        .unwrap();
        assert_eq!(a.points, vec![(50.0, 4.0)]);
    }

    #[test]
    fn plot_grid_mismatch_detected() {
        let samples = vec![
            sample("AC1", MeasurementPosition::Top, 50.0, 4.0),
            sample("AC1", MeasurementPosition::Bottom, 60.0, 1.0),
        ];
        assert!(matches!(
            emit_plot_data(
                &samples,
                "AC1",
                MeasurementPosition::Top,
                MeasurementPosition::Bottom,
            ),
            Err(ReportError::GridMismatch { .. })
        ));
    }

    #[test]
    fn plot_missing_position_detected() {
        let samples = vec![sample("AC1", MeasurementPosition::Top, 50.0, 4.0)];
        let err = emit_plot_data(
            &samples,
            "AC1",
            MeasurementPosition::Top,
            MeasurementPosition::Bottom,
        )
        .unwrap_err();
        assert_eq!(
            err,
            ReportError::MissingSeries {
                adapter_id: "AC1".to_string(),
                position: MeasurementPosition::Bottom,
            }
        );
    }

    #[test]
    fn plot_series_rendering() {
        let series = PlotSeries {
            label: "AC1 top".to_string(),
            points: vec![(30.0, 4.91), (35.0, 4.5)],
        };
        assert_eq!(render_plot_series(&series), "30 4.91\n35 4.5\n");
    }
}
