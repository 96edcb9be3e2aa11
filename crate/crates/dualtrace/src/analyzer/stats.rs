//! Summary statistics and the single-pass outlier filter.
//!
//! Standard deviation uses the population convention (n denominator)
//! throughout; medians of even-sized samples average the two middle values.

use serde::Serialize;

pub fn mean(samples: &[f64]) -> Option<f64> {
    if samples.is_empty() {
        None
    } else {
        Some(samples.iter().sum::<f64>() / samples.len() as f64)
    }
}

pub fn median(samples: &[f64]) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = sorted.len();
    Some(if n % 2 == 1 { sorted[n / 2] } else { (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0 })
}

pub fn population_sd(samples: &[f64]) -> Option<f64> {
    let mu = mean(samples)?;
    let var = samples.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / samples.len() as f64;
    Some(var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub kept: Vec<f64>,
    pub removed: Vec<f64>,
}

/// One pass only: mean and SD are computed once over all samples, and every
/// value strictly outside `mean ± k*sd` is removed. Re-running the filter on
/// the kept samples may remove more; this function never does.
pub fn filter_outliers(samples: &[f64], k: f64) -> FilterOutcome {
    if samples.is_empty() {
        return FilterOutcome { kept: Vec::new(), removed: Vec::new() };
    }
    let mu = mean(samples).expect("nonempty");
    let sd = population_sd(samples).expect("nonempty");
    let bound = k * sd;
    let (kept, removed) = samples.iter().partition(|x| (**x - mu).abs() <= bound);
    FilterOutcome { kept, removed }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub sd: Option<f64>,
    pub outlier_count: usize,
    pub outlier_pct: f64,
    pub filtered_mean: Option<f64>,
    pub filtered_median: Option<f64>,
    pub filtered_sd: Option<f64>,
}

pub fn summarize(samples: &[f64], k: f64) -> SummaryStats {
    if samples.is_empty() {
        return SummaryStats::default();
    }
    let outcome = filter_outliers(samples, k);
    SummaryStats {
        count: samples.len(),
        mean: mean(samples),
        median: median(samples),
        sd: population_sd(samples),
        outlier_count: outcome.removed.len(),
        outlier_pct: 100.0 * outcome.removed.len() as f64 / samples.len() as f64,
        filtered_mean: mean(&outcome.kept),
        filtered_median: median(&outcome.kept),
        filtered_sd: population_sd(&outcome.kept),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct-computation oracle for the filter: recompute the bound from
    /// scratch and classify each sample.
    fn oracle_filter(samples: &[f64], k: f64) -> (Vec<f64>, Vec<f64>) {
        let n = samples.len() as f64;
        let mu = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / n;
        let bound = k * var.sqrt();
        let mut kept = Vec::new();
        let mut removed = Vec::new();
        for &x in samples {
            if (x - mu).abs() > bound {
                removed.push(x);
            } else {
                kept.push(x);
            }
        }
        (kept, removed)
    }

    #[test]
    fn spread_of_small_samples_keeps_a_lone_spike_inside_two_sd() {
        // With only four small values, one spike dominates the SD so much
        // that it stays within two SD of the mean: nothing is removed.
        let samples = [100.0, 110.0, 90.0, 105.0, 5000.0];
        let (kept, removed) = oracle_filter(&samples, 2.0);
        assert!(removed.is_empty());
        let outcome = filter_outliers(&samples, 2.0);
        assert_eq!(outcome.kept, kept);
        assert_eq!(outcome.removed, removed);
    }

    #[test]
    fn a_genuine_outlier_is_removed() {
        let samples = [100.0, 110.0, 90.0, 105.0, 5000.0, 100.0, 95.0, 102.0];
        let (kept, removed) = oracle_filter(&samples, 2.0);
        assert_eq!(removed, vec![5000.0]);
        let outcome = filter_outliers(&samples, 2.0);
        assert_eq!(outcome.removed, removed);
        assert_eq!(outcome.kept, kept);
    }

    #[test]
    fn all_equal_samples_remove_nothing() {
        let outcome = filter_outliers(&[42.0, 42.0, 42.0], 2.0);
        assert!(outcome.removed.is_empty());
        assert_eq!(outcome.kept.len(), 3);
    }

    #[test]
    fn single_sample_is_kept() {
        let outcome = filter_outliers(&[7.0], 2.0);
        assert_eq!(outcome.kept, vec![7.0]);
        assert!(outcome.removed.is_empty());
    }

    #[test]
    fn filter_runs_exactly_once() {
        // After removing 1000, a second pass would also remove 200; the
        // single-pass contract keeps it.
        let samples = [10.0, 10.0, 10.0, 10.0, 10.0, 10.0, 10.0, 10.0, 200.0, 1000.0];
        let first = filter_outliers(&samples, 2.0);
        assert_eq!(first.removed, vec![1000.0]);
        assert!(first.kept.contains(&200.0));
        let second = filter_outliers(&first.kept, 2.0);
        assert_eq!(second.removed, vec![200.0]);
    }

    #[test]
    fn single_value_summary() {
        let stats = summarize(&[37.0], 2.0);
        assert_eq!(stats.mean, Some(37.0));
        assert_eq!(stats.median, Some(37.0));
        assert_eq!(stats.sd, Some(0.0));
        assert_eq!(stats.outlier_count, 0);
    }

    #[test]
    fn even_count_median_averages_the_middle_pair() {
        assert_eq!(median(&[1.0, 2.0, 10.0, 4.0]), Some(3.0));
        assert_eq!(median(&[556.0, 557.0]), Some(556.5));
    }

    #[test]
    fn empty_summary_has_zero_count_and_no_fields() {
        let stats = summarize(&[], 2.0);
        assert_eq!(stats.count, 0);
        assert!(stats.mean.is_none() && stats.median.is_none() && stats.sd.is_none());
    }
}
