//! Converts a dual trace into segmentation trees and temporal metrics:
//! the five pinyin interval categories, alphabetic within/between-word
//! intervals, dwell/flight/rollover decomposition, outlier filtering and
//! summary statistics.

mod alphabetic;
mod ikis;
mod report;
mod segment;
mod stats;
mod timing;
mod tree;

pub use alphabetic::{classify_alphabetic, AlphaCategory, AlphaSample};
pub use ikis::{
    analyze_pinyin, build_confirmation_trees, compute_alt_ikis, compute_ikis, AltIkiCategory,
    AltIkiSample, ConfirmationTree, IkiCategory, IkiSample, PinyinAnalysis,
};
pub use report::{CategoryRow, MetricsReport};
pub use segment::{segment_words, MaxMatchSegmenter, Segmenter};
pub use stats::{filter_outliers, mean, median, population_sd, summarize, FilterOutcome, SummaryStats};
pub use timing::{decompose_timing, DwellSample, GapSample, TimingDecomposition};
pub use tree::{build_tree, propagate_timestamps, split_syllables, NodeLevel, SegmentationNode};

use crate::error::AnalysisError;
use crate::hybridizer::{replay_dual_trace, Diagnostics};
use crate::trace::{DualTraceEvent, KeyEvent};

/// Everything the analyze stage produces for one dual trace.
#[derive(Debug, Clone)]
pub struct AnalysisOutput {
    pub diagnostics: Diagnostics,
    pub pinyin: Option<PinyinAnalysis>,
    pub alphabetic: Option<Vec<AlphaSample>>,
    pub timing: TimingDecomposition,
    pub report: MetricsReport,
}

/// Analyze a dual trace end to end. Traces containing confirmations take
/// the pinyin path; traces without any take the alphabetic path, deriving
/// the produced text by replaying the corrected positions.
pub fn analyze_dual_trace(
    trace: &[DualTraceEvent],
    segmenter: &dyn Segmenter,
    outlier_sd: f64,
) -> Result<AnalysisOutput, AnalysisError> {
    let diagnostics = Diagnostics::from_trace(trace);
    let keys: Vec<KeyEvent> = trace.iter().map(|e| e.base.clone()).collect();
    let timing = decompose_timing(&keys);

    let has_confirmations = trace.iter().any(DualTraceEvent::is_confirmation);
    let mut report = MetricsReport::default();

    let (pinyin, alphabetic) = if has_confirmations {
        let analysis = analyze_pinyin(trace, segmenter)?;
        for category in [
            IkiCategory::LatinLetter,
            IkiCategory::PinyinSyllable,
            IkiCategory::Word,
            IkiCategory::ImeBefore,
            IkiCategory::ImeAfter,
        ] {
            report.push(category.as_str(), summarize(&analysis.values(category), outlier_sd));
        }
        for category in [
            AltIkiCategory::WordOnsetFromPrevConfirmation,
            AltIkiCategory::ConfirmationFromCompositionStart,
            AltIkiCategory::FlightBeforeConfirmation,
            AltIkiCategory::FlightAfterConfirmation,
        ] {
            let values: Vec<f64> = analysis
                .alt_samples
                .iter()
                .filter(|s| s.category == category)
                .map(|s| s.value_ms as f64)
                .collect();
            report.push(category.as_str(), summarize(&values, outlier_sd));
        }
        (Some(analysis), None)
    } else {
        let text = replay_dual_trace(trace).map_err(|e| AnalysisError::Segmentation {
            text: String::new(),
            msg: format!("cannot derive text from trace: {e}"),
        })?;
        let samples = classify_alphabetic(&keys, &text);
        for category in [AlphaCategory::WithinWord, AlphaCategory::BetweenWord] {
            let values: Vec<f64> = samples
                .iter()
                .filter(|s| s.category == category)
                .map(|s| s.value_ms as f64)
                .collect();
            report.push(category.as_str(), summarize(&values, outlier_sd));
        }
        (None, Some(samples))
    };

    let dwell: Vec<f64> = timing.dwell.iter().map(|d| d.value_ms as f64).collect();
    let positive: Vec<f64> = timing.positive_iki.iter().map(|g| g.value_ms as f64).collect();
    let rollover: Vec<f64> = timing.rollover.iter().map(|g| g.value_ms as f64).collect();
    report.push("dwell", summarize(&dwell, outlier_sd));
    report.push("positive_iki", summarize(&positive, outlier_sd));
    report.push("rollover", summarize(&rollover, outlier_sd));

    Ok(AnalysisOutput { diagnostics, pinyin, alphabetic, timing, report })
}
