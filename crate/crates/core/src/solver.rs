//! Exact level solver for piecewise-linear monotone sums.
//!
//! The classical rules and the historical operator all need a scalar level
//! at which a clamped sum hits a target:
//!
//! * capped form: `sum_i min(caps_i, base_i + level) = target`
//!   (constrained equal awards, the Talmud half-claims branch, and the
//!   balancing shift of the historical operator);
//! * loss form: `sum_i max(0, base_i - level) = target`
//!   (constrained equal losses and the Talmud upper branch).
//!
//! Both sums are piecewise linear in the level with breakpoints at
//! `caps_i - base_i` (resp. `base_i`). Sorting the breakpoints and solving on
//! the piece that contains the target gives the exact level in
//! `O(n log n)`. Where the sum is flat at the target, the smallest such
//! level is returned.

use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelForm {
    Cap,
    Loss,
}

/// A solved level (`delta`, `gamma` or `lambda` depending on the caller).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SolveParam {
    pub value: Amount,
}

/// `sum_i min(caps_i, base_i + level)`.
pub fn capped_sum(base: &[Amount], caps: &[Amount], level: &Amount) -> Amount {
    base.iter()
        .zip(caps)
        .map(|(b, c)| {
            let shifted = b + level;
            if &shifted < c {
                shifted
            } else {
                c.clone()
            }
        })
        .sum()
}

/// `sum_i max(0, base_i - level)`.
pub fn loss_sum(base: &[Amount], level: &Amount) -> Amount {
    base.iter().filter(|b| *b > level).map(|b| b - level).sum()
}

/// Smallest `level >= 0` with `capped_sum(base, caps, level) == target`.
pub fn solve_capped_level(base: &[Amount], caps: &[Amount], target: &Amount) -> Result<Amount> {
    debug_assert_eq!(base.len(), caps.len());
    let zero = Amount::zero();
    let mut value = capped_sum(base, caps, &zero);
    let high: Amount = caps.iter().sum();
    if target < &value || target > &high {
        return Err(Error::TargetUnreachable {
            target: target.clone(),
            low: value,
            high,
        });
    }
    if &value == target {
        return Ok(zero);
    }

    let mut breakpoints: Vec<Amount> = base
        .iter()
        .zip(caps)
        .map(|(b, c)| c - b)
        .filter(Amount::is_positive)
        .collect();
    breakpoints.sort_unstable();

    let mut level = zero;
    let mut active = breakpoints.len();
    for bp in breakpoints {
        let slope = Amount::from_integer(active as i64);
        let reach = &value + &slope * (&bp - &level);
        if &reach >= target {
            return Ok(&level + (target - &value) / slope);
        }
        value = reach;
        level = bp;
        active -= 1;
    }
    unreachable!("target within [f(0), sum caps] is attained by the last breakpoint")
}

/// Smallest `level >= 0` with `loss_sum(base, level) == target`.
pub fn solve_loss_level(base: &[Amount], target: &Amount) -> Result<Amount> {
    let zero = Amount::zero();
    let mut value = loss_sum(base, &zero);
    if target.is_negative() || target > &value {
        return Err(Error::TargetUnreachable {
            target: target.clone(),
            low: zero,
            high: value,
        });
    }
    if &value == target {
        return Ok(zero);
    }

    let mut breakpoints: Vec<Amount> = base.iter().filter(|b| b.is_positive()).cloned().collect();
    breakpoints.sort_unstable();

    let mut level = zero;
    let mut active = breakpoints.len();
    for bp in breakpoints {
        let slope = Amount::from_integer(active as i64);
        let reach = &value - &slope * (&bp - &level);
        if &reach <= target {
            return Ok(&level + (&value - target) / slope);
        }
        value = reach;
        level = bp;
        active -= 1;
    }
    unreachable!("loss sum reaches zero at the largest breakpoint")
}

/// Dispatches on `form`; `caps` is ignored for the loss form.
pub fn solve_monotone_level(form: LevelForm, base: &[Amount], caps: &[Amount], target: &Amount) -> Result<SolveParam> {
    let value = match form {
        LevelForm::Cap => solve_capped_level(base, caps, target)?,
        LevelForm::Loss => solve_loss_level(base, target)?,
    };
    Ok(SolveParam { value })
}
