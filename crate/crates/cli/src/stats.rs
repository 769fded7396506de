//! Statistical verdicts for randomized trials.
//!
//! An empirical success frequency over `N` independent Bernoulli
//! trials deviates from its mean by more than the Hoeffding half-width
//! `sqrt(ln(2/(1 - confidence)) / (2 N))` with probability at most
//! `1 - confidence`. A claimed lower bound `b` therefore passes only
//! when `estimate - half_width >= b`, and an upper bound `b` passes
//! when `estimate <= b + half_width`; anything else is a fail at the
//! stated confidence.

use serde::Serialize;

/// Which side of the bound a claim sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Claim: the true probability is at least `bound`.
    LowerBound,
    /// Claim: the true probability is at most `bound`.
    UpperBound,
    /// No claim; the estimate is reported without a verdict.
    ReportOnly,
}

/// Two-sided Hoeffding half-width for `trials` Bernoulli samples at
/// the given confidence level.
///
/// Panics if `trials == 0` or `confidence` is outside `(0, 1)`.
pub fn hoeffding_half_width(trials: u64, confidence: f64) -> f64 {
    assert!(trials > 0, "half-width needs at least one trial");
    assert!(
        confidence > 0.0 && confidence < 1.0,
        "confidence must lie strictly between 0 and 1"
    );
    let delta = 1.0 - confidence;
    ((2.0 / delta).ln() / (2.0 * trials as f64)).sqrt()
}

/// Outcome of an estimation run: the empirical frequency, its
/// concentration radius, and the verdict against the claimed bound.
#[derive(Debug, Clone, Serialize)]
pub struct StatReport {
    pub schema: &'static str,
    /// Human-readable name of the probability being estimated.
    pub claim: String,
    pub successes: u64,
    pub trials: u64,
    /// Exact empirical frequency as `successes / trials`.
    pub estimate_exact: [u64; 2],
    pub estimate: f64,
    pub confidence: f64,
    pub half_width: f64,
    pub direction: Direction,
    /// The claimed bound; absent for report-only estimates.
    pub bound: Option<f64>,
    /// `"pass"` or `"fail"`; absent for report-only estimates.
    pub verdict: Option<&'static str>,
}

impl StatReport {
    /// Build a report and decide the verdict.
    ///
    /// `bound` must be present exactly when `direction` makes a claim.
    pub fn new(
        claim: impl Into<String>,
        successes: u64,
        trials: u64,
        confidence: f64,
        direction: Direction,
        bound: Option<f64>,
    ) -> StatReport {
        assert!(successes <= trials, "more successes than trials");
        assert_eq!(
            bound.is_some(),
            direction != Direction::ReportOnly,
            "bound must accompany a directional claim and only then"
        );
        let half_width = hoeffding_half_width(trials, confidence);
        let estimate = successes as f64 / trials as f64;
        let verdict = match direction {
            Direction::LowerBound => {
                Some(if estimate - half_width >= bound.expect("checked") {
                    "pass"
                } else {
                    "fail"
                })
            }
            Direction::UpperBound => {
                Some(if estimate <= bound.expect("checked") + half_width {
                    "pass"
                } else {
                    "fail"
                })
            }
            Direction::ReportOnly => None,
        };
        StatReport {
            schema: "patcov/v1/estimate",
            claim: claim.into(),
            successes,
            trials,
            estimate_exact: [successes, trials],
            estimate,
            confidence,
            half_width,
            direction,
            bound,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Some("pass")
    }
}
