//! Per-condition evidence records shared by the membership and admissibility checks.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    /// Condition identifier, e.g. `upper-functional`.
    pub condition: String,
    /// Family of results the condition belongs to.
    pub family: String,
    pub pass: bool,
    /// The `k` of a k-indexed condition, 1-based.
    pub witness_k: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

impl Evidence {
    pub fn new(condition: &str, tag: &str, pass: bool, witness_k: Option<usize>, lhs: f64, rhs: f64) -> Self {
        Evidence {
            condition: condition.to_string(),
            family: tag.to_string(),
            pass,
            witness_k,
            lhs,
            rhs,
        }
    }
}

/// Checks `lhs ≥ rhs − tol` for `k = 1..=horizon` and records the first failure
/// (or the tightest passing `k` when everything holds).
pub(crate) fn k_family<F>(condition: &str, tag: &str, ks: impl Iterator<Item = usize>, mut sides: F, pass: impl Fn(f64, f64) -> bool) -> crate::Result<Evidence>
where
    F: FnMut(usize) -> crate::Result<(f64, f64)>,
{
    let mut tightest: Option<(usize, f64, f64)> = None;
    for k in ks {
        let (lhs, rhs) = sides(k)?;
        if !pass(lhs, rhs) {
            return Ok(Evidence::new(condition, tag, false, Some(k), lhs, rhs));
        }
        let margin = lhs - rhs;
        if tightest.is_none_or(|(_, l, r)| margin < l - r) {
            tightest = Some((k, lhs, rhs));
        }
    }
    Ok(match tightest {
        Some((k, lhs, rhs)) => Evidence::new(condition, tag, true, Some(k), lhs, rhs),
        None => Evidence::new(condition, tag, true, None, 0.0, 0.0),
    })
}
