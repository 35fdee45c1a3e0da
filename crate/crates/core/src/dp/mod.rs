//! Polynomial-time offline algorithms for special cases of the problem.
//!
//! | solver | class | objective |
//! |---|---|---|
//! | [`dp_wjcj_unit`] | `p_j = 1`, constant `s` | `sum w_j C_j + c_Q` |
//! | [`dp_equalp`] | `p_j = p`, constant `s`, unit weights | `sum C_j + c_Q` or `F_max + c_Q` |
//! | [`dp_fmax_s1`] | `s = 1` | `F_max + c_Q` |
//! | [`fmax_unit_distinct`] | `s = 1`, `p_j = 1`, distinct `r_j` | `F_max + c_Q` |

mod fmax;
mod layered;

pub use fmax::{dp_fmax_s1, fmax_unit_distinct, FmaxStateKey};
pub use layered::{DpStats, SumStateKey};

use crate::error::{Error, Result};
use crate::eval::normalize_replenishments;
use crate::model::{Instance, Objective, Solution};

/// Optimal `sum w_j C_j + c_Q` for unit processing times.
pub fn dp_wjcj_unit(instance: &Instance) -> Result<Solution> {
    dp_wjcj_unit_with_stats(instance).map(|(sol, _)| sol)
}

pub fn dp_wjcj_unit_with_stats(instance: &Instance) -> Result<(Solution, DpStats)> {
    if let Some(j) = instance.jobs().iter().find(|j| j.processing != 1) {
        return Err(Error::Precondition(format!(
            "job {} has processing time {}, expected 1",
            j.id, j.processing
        )));
    }
    layered::solve(instance, layered::Scheme::UnitWeighted)
}

/// Optimal `sum C_j + c_Q` or `F_max + c_Q` when every job has the same
/// processing time. Weighted instances are rejected for the min-sum case.
pub fn dp_equalp(instance: &Instance, objective: Objective) -> Result<Solution> {
    dp_equalp_with_stats(instance, objective).map(|(sol, _)| sol)
}

pub fn dp_equalp_with_stats(
    instance: &Instance,
    objective: Objective,
) -> Result<(Solution, DpStats)> {
    if !matches!(objective, Objective::TotalCompletion | Objective::MaxFlow) {
        return Err(Error::UnsupportedObjective(objective.name().to_string()));
    }
    let Some(first) = instance.jobs().first() else {
        return Ok((Solution::empty(objective), DpStats::default()));
    };
    let p = first.processing;
    if let Some(j) = instance.jobs().iter().find(|j| j.processing != p) {
        return Err(Error::Precondition(format!(
            "job {} has processing time {}, expected the common value {p}",
            j.id, j.processing
        )));
    }
    if objective == Objective::TotalCompletion {
        if let Some(j) = instance.jobs().iter().find(|j| j.weight != 1) {
            return Err(Error::Precondition(format!(
                "job {} has weight {}; the equal-processing solver handles unit weights only",
                j.id, j.weight
            )));
        }
    }
    let (sol, stats) = layered::solve(instance, layered::Scheme::EqualProcessing { p, objective })?;
    // block ends may fall between release dates; pull orders back onto the grid
    Ok((normalize_replenishments(instance, &sol)?, stats))
}
