//! Revisit detection for deterministic dynamics.
//!
//! States are compared after rounding every coordinate to
//! [`SIGNIFICANT_DIGITS`] significant decimal digits. Together with the
//! policy phase (which agent moves next) a rounded state determines the
//! rest of the run, so the first revisit fixes the entry time and period.

use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};

use crate::contest::ActionProfile;

pub const SIGNIFICANT_DIGITS: i32 = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct CycleReport {
    pub entry_time: u64,
    pub period: u64,
    /// States at `entry_time .. entry_time + period`.
    pub cycle_states: Vec<ActionProfile>,
}

fn pow10(k: i32) -> f64 {
    10f64.powi(k)
}

/// `(mantissa, exponent)` with `|mantissa| < 10^12` and
/// `v ~= mantissa * 10^(exponent - 11)`.
fn rounded(v: f64) -> (i64, i32) {
    if v == 0.0 {
        return (0, 0);
    }
    let digits = SIGNIFICANT_DIGITS - 1;
    let mut e = v.abs().log10().floor() as i32;
    let scale = |v: f64, e: i32| {
        let k = digits - e;
        // Split the scaling so neither factor over- or underflows.
        if k > 300 {
            v * pow10(300) * pow10(k - 300)
        } else {
            v * pow10(k)
        }
    };
    let mut m = scale(v, e).round();
    if m.abs() >= pow10(SIGNIFICANT_DIGITS) {
        e += 1;
        m = scale(v, e).round();
    }
    (m as i64, e)
}

/// 64-bit fingerprint of the rounded state and phase.
pub fn fingerprint(outputs: &[f64], phase: usize) -> u64 {
    let mut h = DefaultHasher::new();
    phase.hash(&mut h);
    for &v in outputs {
        rounded(v).hash(&mut h);
    }
    h.finish()
}

/// Online revisit detector keyed by [`fingerprint`].
#[derive(Debug, Default, Clone)]
pub struct CycleDetector {
    seen: HashMap<u64, u64>,
}

impl CycleDetector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records the state at time `t`; returns `(entry_time, period)` on the
    /// first revisit.
    pub fn observe(&mut self, t: u64, outputs: &[f64], phase: usize) -> Option<(u64, u64)> {
        match self.seen.entry(fingerprint(outputs, phase)) {
            std::collections::hash_map::Entry::Occupied(e) => Some((*e.get(), t - *e.get())),
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(t);
                None
            }
        }
    }
}

/// Scans a recorded run of a deterministic policy whose mover depends on
/// `t mod phase_len` (use 1 for purely state-driven policies). Fixed points
/// are not cycles and are skipped.
pub fn detect_cycle<'a>(
    profiles: impl IntoIterator<Item = &'a ActionProfile>,
    phase_len: usize,
) -> Option<CycleReport> {
    let phase_len = phase_len.max(1);
    let mut detector = CycleDetector::new();
    let mut history: Vec<&ActionProfile> = Vec::new();
    for (t, x) in profiles.into_iter().enumerate() {
        let t = t as u64;
        history.push(x);
        if let Some((entry, period)) = detector.observe(t, x.outputs(), t as usize % phase_len) {
            if period >= 2 {
                let cycle_states = history[entry as usize..(entry + period) as usize]
                    .iter()
                    .map(|&p| p.clone())
                    .collect();
                return Some(CycleReport {
                    entry_time: entry,
                    period,
                    cycle_states,
                });
            }
            detector
                .seen
                .insert(fingerprint(x.outputs(), t as usize % phase_len), t);
        }
    }
    None
}
