//! Per-iteration report rows and their CSV form.

use crate::recommenders::Algorithm;

/// CSV header of a trajectory file. Metrics that are not applicable in
/// an iteration (for example a group with no ratings) appear as `NA`.
pub const CSV_HEADER: &str = "t,algorithm,avg_pop_data,avg_pop_rec,agg_div,theta_abs,theta_rel,drift_all,drift_M,drift_F,kld_MF,kld_pop_M,kld_pop_F,K";

/// All measurements of one iteration. The CSV row carries the fixed
/// column set; the remaining fields support audits, among them the
/// frozen-popularity bookkeeping that lets the popularity update
/// arithmetic be checked per iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iteration: u32,
    pub algorithm: Algorithm,
    pub users_recommended: usize,
    /// Users whose recommendation list came back empty.
    pub users_skipped: usize,
    /// Committed selections K.
    pub committed: u64,
    /// Draws of items the user already had (held out of training but
    /// present in the profile); nothing is committed for these.
    pub rejected: u64,
    /// |D^t| before the commit.
    pub data_size: u64,
    /// Ratings held out by this iteration's split (surfaced, not used).
    pub test_ratings: u64,
    pub avg_pop_data: f64,
    pub avg_pop_rec: Option<f64>,
    pub agg_div: f64,
    pub theta_abs: Option<f64>,
    pub theta_rel: Option<f64>,
    pub drift_all: Option<f64>,
    pub drift_m: Option<f64>,
    pub drift_f: Option<f64>,
    pub kld_mf: Option<f64>,
    pub kld_pop_m: Option<f64>,
    pub kld_pop_f: Option<f64>,
    /// Mean popularity (at this iteration's table) of the committed
    /// selections; `NA` when K = 0.
    pub selection_pop: Option<f64>,
    /// Popularity of the post-commit data measured against this
    /// iteration's table.
    pub next_data_pop_frozen: f64,
}

impl IterationReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.iteration,
            self.algorithm,
            self.avg_pop_data,
            fmt_opt(self.avg_pop_rec),
            self.agg_div,
            fmt_opt(self.theta_abs),
            fmt_opt(self.theta_rel),
            fmt_opt(self.drift_all),
            fmt_opt(self.drift_m),
            fmt_opt(self.drift_f),
            fmt_opt(self.kld_mf),
            fmt_opt(self.kld_pop_m),
            fmt_opt(self.kld_pop_f),
            self.committed,
        )
    }
}

fn fmt_opt(value: Option<f64>) -> String {
    match value {
        Some(v) => v.to_string(),
        None => "NA".to_string(),
    }
}
