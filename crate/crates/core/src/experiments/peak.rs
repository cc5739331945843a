//! First-peak detection on success-probability traces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Thresholds that decide when a local maximum counts as the first peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakRule {
    /// The peak must reach at least `min_gain · P(0)`.
    pub min_gain: f64,
    /// Samples after the peak that must all stay below it (the first may tie).
    pub decline: usize,
}

impl Default for PeakRule {
    fn default() -> Self {
        Self {
            min_gain: 5.0,
            decline: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakResult {
    pub step: usize,
    pub probability: f64,
    pub rule: PeakRule,
}

impl PeakRule {
    /// Whether index `t` is a qualifying peak. Needs `trace[t + decline]`.
    fn qualifies(&self, trace: &[f64], t: usize) -> bool {
        if t == 0 || t + self.reach() >= trace.len() {
            return false;
        }
        let p = trace[t];
        if p < trace[t - 1] || p < trace[t + 1] || p < self.min_gain * trace[0] {
            return false;
        }
        // the walk's trace zigzags with period two, so the decline is checked
        // against the peak value rather than sample to sample; P(t+1) = P(t)
        // is allowed so a flat top resolves to its first index
        (t + 2..=t + self.reach()).all(|k| trace[k] < p)
    }

    /// Samples needed after a candidate; at least one for the local-max test.
    fn reach(&self) -> usize {
        self.decline.max(1)
    }

    /// Earliest qualifying peak of `trace`.
    pub fn detect(&self, trace: &[f64]) -> Result<PeakResult> {
        if trace.len() < 3 {
            return Err(Error::domain(format!(
                "peak detection needs at least 3 samples, got {}",
                trace.len()
            )));
        }
        (1..trace.len())
            .find(|&t| self.qualifies(trace, t))
            .map(|t| PeakResult {
                step: t,
                probability: trace[t],
                rule: *self,
            })
            .ok_or_else(|| Error::NoPeak {
                steps: trace.len() - 1,
                max_probability: trace.iter().copied().fold(0.0, f64::max),
            })
    }
}

/// Earliest qualifying peak under the default rule.
pub fn detect_first_peak(trace: &[f64]) -> Result<PeakResult> {
    PeakRule::default().detect(trace)
}

/// Incremental form of [`PeakRule::detect`] for stopping a walk as soon as
/// its first peak is confirmed.
#[derive(Debug, Clone)]
pub struct PeakTracker {
    rule: PeakRule,
    trace: Vec<f64>,
    found: Option<PeakResult>,
}

impl PeakTracker {
    pub fn new(rule: PeakRule) -> Self {
        Self {
            rule,
            trace: Vec::new(),
            found: None,
        }
    }

    /// Appends `P(t)` and returns the peak once it is confirmed.
    pub fn push(&mut self, p: f64) -> Option<PeakResult> {
        self.trace.push(p);
        if self.found.is_none() && self.trace.len() > self.rule.reach() + 1 {
            // each candidate becomes decidable exactly when its last decline sample arrives
            let t = self.trace.len() - 1 - self.rule.reach();
            if self.rule.qualifies(&self.trace, t) {
                self.found = Some(PeakResult {
                    step: t,
                    probability: self.trace[t],
                    rule: self.rule,
                });
            }
        }
        self.found
    }

    pub fn found(&self) -> Option<PeakResult> {
        self.found
    }

    pub fn trace(&self) -> &[f64] {
        &self.trace
    }

    /// The confirmed peak, or the "no peak" error for the samples seen so far.
    pub fn finish(&self) -> Result<PeakResult> {
        self.found.ok_or_else(|| Error::NoPeak {
            steps: self.trace.len().saturating_sub(1),
            max_probability: self.trace.iter().copied().fold(0.0, f64::max),
        })
    }
}
