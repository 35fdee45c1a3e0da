//! Decision logs, replenishment blocks and the trigger certificates of the
//! min-sum policies.

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::model::{Cost, Instance, JobId, Objective, ResourceSet, Solution, Time};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionRecord {
    pub t: Time,
    pub replenish: Option<ResourceSet>,
    pub start: Vec<JobId>,
}

impl DecisionRecord {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "t": self.t,
            "replenish": self.replenish.map(|r| r.to_vec()),
            "start": self.start,
        })
    }
}

/// Jobs starting in `[t_i, t_{i+1})` for the `i`-th order at `t_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub t: Time,
    pub b: usize,
    /// Members released before `t`.
    pub y: usize,
    /// Members released exactly at `t`.
    pub z: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub decisions: Vec<DecisionRecord>,
    pub blocks: Vec<Block>,
    pub objective: Objective,
    pub scheduling_cost: Cost,
    pub replenishment_cost: Cost,
}

/// `G(a) = a (a + 1) / 2`.
pub fn g(a: usize) -> Cost {
    let a = a as Cost;
    a * (a + 1) / 2
}

impl Trace {
    pub fn new(instance: &Instance, solution: &Solution, decisions: Vec<DecisionRecord>) -> Self {
        let times = solution.replenishments().times();
        let mut blocks: Vec<Block> = times
            .iter()
            .map(|&t| Block {
                t,
                b: 0,
                y: 0,
                z: 0,
            })
            .collect();
        for job in instance.jobs() {
            let Some(start) = solution.schedule().start(job.id) else {
                continue;
            };
            let k = times.partition_point(|&t| t <= start);
            if k == 0 {
                continue;
            }
            let block = &mut blocks[k - 1];
            block.b += 1;
            if job.release < block.t {
                block.y += 1;
            } else if job.release == block.t {
                block.z += 1;
            }
        }
        Trace {
            decisions,
            blocks,
            objective: solution.objective(),
            scheduling_cost: solution.scheduling_cost(),
            replenishment_cost: solution.replenishment_cost(),
        }
    }

    pub fn total(&self) -> Cost {
        self.scheduling_cost + self.replenishment_cost
    }

    /// One JSON object per decision, then a summary line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for d in &self.decisions {
            out.push_str(&d.to_json().to_string());
            out.push('\n');
        }
        let summary = json!({
            "summary": {
                "objective": self.objective,
                "blocks": self.blocks,
                "scheduling_cost": self.scheduling_cost,
                "replenishment_cost": self.replenishment_cost,
                "total": self.total(),
            }
        });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// `y (t - 1) + G(y) < K`.
    SumCj,
    /// `sum (t - 1 - r_j) + G(y) < K` over the `y` waiting jobs.
    SumFj,
}

/// One evaluated certificate: an order at `t` after an idle unit
/// `[t - 1, t)`, with `y` jobs that had been waiting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateCheck {
    pub t: Time,
    pub y: usize,
    pub lhs: Cost,
    pub k: Cost,
}

impl CertificateCheck {
    pub fn holds(&self) -> bool {
        self.lhs < self.k
    }
}

/// Evaluates the trigger certificate at every order time `t >= 1` that
/// follows an idle unit. The waiting jobs are the block members released
/// before `t`; when the machine was idle at `t - 1` the policies start all
/// of them at `t`.
pub fn check_certificates(
    instance: &Instance,
    solution: &Solution,
    kind: CertificateKind,
) -> Result<Vec<CertificateCheck>> {
    if instance.s() != 1 {
        return Err(Error::Precondition(format!(
            "certificates are defined for one resource, got s = {}",
            instance.s()
        )));
    }
    let k = instance.single_order_cost();
    let times = solution.replenishments().times();
    let mut runs: Vec<(Time, Time)> = Vec::with_capacity(instance.len());
    let mut members: Vec<Vec<Time>> = vec![Vec::new(); times.len()];
    for job in instance.jobs() {
        let start = solution
            .schedule()
            .start(job.id)
            .ok_or(Error::Unscheduled(job.id))?;
        runs.push((start, start + job.processing));
        let b = times.partition_point(|&t| t <= start);
        if b > 0 && job.release < times[b - 1] {
            members[b - 1].push(job.release);
        }
    }
    runs.sort_unstable();

    let mut checks = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        if t < 1 {
            continue;
        }
        // the only run that can cover t - 1 is the last one starting before t
        let before = runs.partition_point(|&(s, _)| s < t);
        if before > 0 && runs[before - 1].1 > t - 1 {
            continue;
        }
        let y = members[i].len();
        let lhs = match kind {
            CertificateKind::SumCj => y as Cost * (t - 1) + g(y),
            CertificateKind::SumFj => members[i].iter().map(|&r| t - 1 - r).sum::<Cost>() + g(y),
        };
        checks.push(CertificateCheck { t, y, lhs, k });
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Job, ReplenishmentStructure, Schedule};

    #[test]
    fn blocks_split_by_order_times() {
        let one = ResourceSet::singleton(1);
        let inst = Instance::single_resource(
            2,
            vec![
                Job::new(1, 0, 1, one),
                Job::new(2, 2, 1, one),
                Job::new(3, 2, 1, one),
            ],
        )
        .unwrap();
        let sol = Solution::evaluate(
            &inst,
            Objective::TotalCompletion,
            Schedule::from_pairs([(1, 2), (2, 3), (3, 4)]),
            ReplenishmentStructure::at_times(&[2]).unwrap(),
        )
        .unwrap();
        let trace = Trace::new(&inst, &sol, vec![]);
        assert_eq!(
            trace.blocks,
            vec![Block {
                t: 2,
                b: 3,
                y: 1,
                z: 2
            }]
        );

        let checks = check_certificates(&inst, &sol, CertificateKind::SumCj).unwrap();
        assert_eq!(
            checks,
            vec![CertificateCheck {
                t: 2,
                y: 1,
                lhs: 2,
                k: 2
            }]
        );
        assert!(!checks[0].holds());
        let checks = check_certificates(&inst, &sol, CertificateKind::SumFj).unwrap();
        assert_eq!(checks[0].lhs, 2);
    }

    #[test]
    fn free_orders_leave_nothing_waiting() {
        // with K = 0 a lone arrival is served at its release: y = 0 and the
        // strict inequality reads 0 < 0
        let inst = Instance::single_resource(0, vec![Job::new(1, 3, 1, ResourceSet::singleton(1))])
            .unwrap();
        let sol = Solution::evaluate(
            &inst,
            Objective::TotalCompletion,
            Schedule::from_pairs([(1, 3)]),
            ReplenishmentStructure::at_times(&[3]).unwrap(),
        )
        .unwrap();
        let checks = check_certificates(&inst, &sol, CertificateKind::SumCj).unwrap();
        assert_eq!(
            checks,
            vec![CertificateCheck {
                t: 3,
                y: 0,
                lhs: 0,
                k: 0
            }]
        );
        assert!(!checks[0].holds());
    }

    #[test]
    fn jsonl_has_one_line_per_decision_plus_summary() {
        let inst = Instance::single_resource(1, vec![Job::new(1, 0, 1, ResourceSet::singleton(1))])
            .unwrap();
        let sol = Solution::evaluate(
            &inst,
            Objective::TotalCompletion,
            Schedule::from_pairs([(1, 0)]),
            ReplenishmentStructure::at_times(&[0]).unwrap(),
        )
        .unwrap();
        let rec = DecisionRecord {
            t: 0,
            replenish: Some(ResourceSet::singleton(1)),
            start: vec![1],
        };
        let text = Trace::new(&inst, &sol, vec![rec]).to_jsonl();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], r#"{"t":0,"replenish":[1],"start":[1]}"#);
        let summary: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(summary["summary"]["total"], 2);
    }
}
