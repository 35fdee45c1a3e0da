//! Cost evaluation, readiness, feasibility checking and normalization of
//! replenishment times onto the release grid.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    Cost, Instance, JobId, Objective, Replenishment, ReplenishmentStructure, ResourceSet, Schedule,
    Solution, Time,
};

/// True iff every resource job `job` needs was ordered at some moment in `[r_j, t]`.
pub fn ready_at(
    instance: &Instance,
    q: &ReplenishmentStructure,
    job: JobId,
    t: Time,
) -> Result<bool> {
    let j = instance.job(job).ok_or(Error::UnknownJob(job))?;
    Ok(j.resources.is_subset(q.ordered_between(j.release, t)))
}

pub fn replenishment_cost(instance: &Instance, q: &ReplenishmentStructure) -> Result<Cost> {
    let full = ResourceSet::full(instance.s());
    q.events().iter().try_fold(0, |acc, e| {
        if !e.resources.is_subset(full) {
            let index = e.resources.iter().find(|&i| i > instance.s()).unwrap_or(0) as i64;
            return Err(Error::ResourceOutOfRange {
                index,
                s: instance.s(),
            });
        }
        Ok(acc + instance.order_cost(e.resources))
    })
}

pub fn scheduling_cost(
    instance: &Instance,
    schedule: &Schedule,
    objective: Objective,
) -> Result<Cost> {
    for &id in schedule.starts.keys() {
        if instance.job(id).is_none() {
            return Err(Error::UnknownJob(id));
        }
    }
    instance.jobs().iter().try_fold(0, |acc, j| {
        let start = schedule.start(j.id).ok_or(Error::Unscheduled(j.id))?;
        Ok(objective.combine(acc, objective.job_term(j, start + j.processing)))
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Overlap { first: JobId, second: JobId },
    NotReady { job: JobId, start: Time },
    Unscheduled { job: JobId },
    UnknownJob { job: JobId },
    NegativeStart { job: JobId, start: Time },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the jobs present in `schedule` for overlaps and readiness.
/// Unlike [`check_feasible`] it does not require every job to be scheduled.
pub fn check_partial(
    instance: &Instance,
    schedule: &Schedule,
    q: &ReplenishmentStructure,
) -> FeasibilityReport {
    let mut violations = Vec::new();
    let mut placed = Vec::with_capacity(schedule.len());
    for (&id, &start) in &schedule.starts {
        let Some(job) = instance.job(id) else {
            violations.push(Violation::UnknownJob { job: id });
            continue;
        };
        if start < 0 {
            violations.push(Violation::NegativeStart { job: id, start });
        }
        if !job
            .resources
            .is_subset(q.ordered_between(job.release, start))
        {
            violations.push(Violation::NotReady { job: id, start });
        }
        placed.push((start, start + job.processing, id));
    }
    placed.sort_unstable();
    // sweep keeping the interval that reaches furthest
    let mut reach: Option<(Time, JobId)> = None;
    for &(start, end, id) in &placed {
        if let Some((far, other)) = reach {
            if far > start {
                violations.push(Violation::Overlap {
                    first: other,
                    second: id,
                });
            }
            if end > far {
                reach = Some((end, id));
            }
        } else {
            reach = Some((end, id));
        }
    }
    FeasibilityReport { violations }
}

pub fn check_schedule(
    instance: &Instance,
    schedule: &Schedule,
    q: &ReplenishmentStructure,
) -> FeasibilityReport {
    let mut report = check_partial(instance, schedule, q);
    for j in instance.jobs() {
        if schedule.start(j.id).is_none() {
            report.violations.push(Violation::Unscheduled { job: j.id });
        }
    }
    report
}

pub fn check_feasible(instance: &Instance, sol: &Solution) -> FeasibilityReport {
    check_schedule(instance, sol.schedule(), sol.replenishments())
}

/// Moves every replenishment to the latest release date not after it,
/// dropping events that precede all releases and merging collisions.
pub fn normalize_replenishments(instance: &Instance, sol: &Solution) -> Result<Solution> {
    let report = check_feasible(instance, sol);
    if !report.is_feasible() {
        return Err(Error::Infeasible(format!(
            "cannot normalize an infeasible solution: {:?}",
            report.violations
        )));
    }
    let grid = instance.release_grid();
    let lowered = sol
        .replenishments()
        .events()
        .iter()
        .filter_map(|e| {
            let k = grid.partition_point(|&r| r <= e.time);
            (k > 0).then(|| Replenishment {
                time: grid[k - 1],
                resources: e.resources,
            })
        })
        .collect();
    let q = ReplenishmentStructure::merged(lowered);
    Solution::evaluate(instance, sol.objective(), sol.schedule().clone(), q)
}
