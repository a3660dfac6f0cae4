//! Grid-refinement convergence: successive error ratios against the expected
//! order, with an absolute floor below which a residual counts as converged
//! (round-off, not truncation, dominates there).

use serde::Serialize;

/// Expected ratio for a second-order scheme under h → h/2.
pub const SECOND_ORDER_RATIO: f64 = 4.0;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ConvergenceReport {
    pub errors: Vec<f64>,
    pub ratios: Vec<f64>,
    pub observed_order: Option<f64>,
    pub pass: bool,
    pub note: String,
}

/// Judge a sequence of errors from successively halved grids.
///
/// Passes when each ratio e_k/e_{k+1} lies within `expected·(1 ± band)`, or
/// when the finer error of a pair is already at or below `floor`.
pub fn judge(errors: &[f64], expected: f64, band: f64, floor: f64) -> ConvergenceReport {
    let mut ratios = Vec::new();
    let mut pass = errors.len() >= 2 && errors.iter().all(|e| e.is_finite());
    let mut note = String::new();
    if errors.len() < 2 {
        note = "need at least two refinement levels".into();
    }
    for (k, w) in errors.windows(2).enumerate() {
        let r = if w[1] > 0.0 { w[0] / w[1] } else { f64::INFINITY };
        ratios.push(r);
        if w[1] <= floor {
            continue;
        }
        if !(r >= expected * (1.0 - band) && r <= expected * (1.0 + band)) {
            pass = false;
            if note.is_empty() {
                note = format!("ratio {r:.3} at level {k}->{} outside {expected}±{:.0}%", k + 1, band * 100.0);
            }
        }
    }
    if errors.iter().any(|e| !e.is_finite()) {
        note = "non-finite error".into();
    }
    let observed_order = ratios.last().filter(|r| r.is_finite() && **r > 0.0).map(|r| r.log2());
    ConvergenceReport { errors: errors.to_vec(), ratios, observed_order, pass, note }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_order_sequence_passes() {
        let r = judge(&[1.6e-3, 4.1e-4, 1.02e-4], 4.0, 0.2, 1e-13);
        assert!(r.pass, "{r:?}");
        assert!((r.observed_order.unwrap() - 2.0).abs() < 0.1);
    }

    #[test]
    fn first_order_sequence_fails() {
        let r = judge(&[1e-2, 5e-3, 2.5e-3], 4.0, 0.25, 1e-13);
        assert!(!r.pass);
        assert!(r.note.contains("ratio"));
    }

    #[test]
    fn floor_rescues_roundoff_levels() {
        let r = judge(&[1e-14, 2e-14, 1e-14], 4.0, 0.25, 1e-12);
        assert!(r.pass);
        assert!(!judge(&[1e-3], 4.0, 0.25, 0.0).pass);
        assert!(!judge(&[1e-3, f64::NAN], 4.0, 0.25, 0.0).pass);
    }
}
