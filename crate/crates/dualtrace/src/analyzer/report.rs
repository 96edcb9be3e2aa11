//! Per-category metric tables in structured text and CSV.

use super::stats::SummaryStats;

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryRow {
    pub name: String,
    pub stats: SummaryStats,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsReport {
    pub rows: Vec<CategoryRow>,
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.2}"),
        None => "-".to_string(),
    }
}

fn fmt_opt_csv(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.2}"),
        None => String::new(),
    }
}

impl MetricsReport {
    pub fn push(&mut self, name: &str, stats: SummaryStats) {
        self.rows.push(CategoryRow { name: name.to_string(), stats });
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "category,count,mean,median,sd,outlier_count,outlier_pct,mean_filtered,median_filtered,sd_filtered\n",
        );
        for row in &self.rows {
            let s = &row.stats;
            out.push_str(&format!(
                "{},{},{},{},{},{},{:.2},{},{},{}\n",
                row.name,
                s.count,
                fmt_opt_csv(s.mean),
                fmt_opt_csv(s.median),
                fmt_opt_csv(s.sd),
                s.outlier_count,
                s.outlier_pct,
                fmt_opt_csv(s.filtered_mean),
                fmt_opt_csv(s.filtered_median),
                fmt_opt_csv(s.filtered_sd),
            ));
        }
        out
    }

    pub fn to_table(&self) -> String {
        let header = format!(
            "{:<36} {:>6} {:>10} {:>10} {:>10} {:>9} {:>7} {:>10} {:>10} {:>10}\n",
            "category",
            "count",
            "mean",
            "median",
            "sd",
            "outliers",
            "out%",
            "mean(f)",
            "median(f)",
            "sd(f)"
        );
        let mut out = header;
        out.push_str(&"-".repeat(136));
        out.push('\n');
        for row in &self.rows {
            let s = &row.stats;
            out.push_str(&format!(
                "{:<36} {:>6} {:>10} {:>10} {:>10} {:>9} {:>7.2} {:>10} {:>10} {:>10}\n",
                row.name,
                s.count,
                fmt_opt(s.mean),
                fmt_opt(s.median),
                fmt_opt(s.sd),
                s.outlier_count,
                s.outlier_pct,
                fmt_opt(s.filtered_mean),
                fmt_opt(s.filtered_median),
                fmt_opt(s.filtered_sd),
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::stats::summarize;

    #[test]
    fn csv_has_one_line_per_category_plus_header() {
        let mut report = MetricsReport::default();
        report.push("within_words", summarize(&[100.0, 120.0], 2.0));
        report.push("between_words", summarize(&[], 2.0));
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("within_words,2,110.00"));
        assert!(lines[2].starts_with("between_words,0,,"));
    }

    #[test]
    fn table_renders_missing_stats_as_dashes() {
        let mut report = MetricsReport::default();
        report.push("empty", summarize(&[], 2.0));
        let table = report.to_table();
        assert!(table.contains("empty"));
        assert!(table.contains('-'));
    }
}
