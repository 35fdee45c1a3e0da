//! Discrete-time online simulation with irrevocable decisions.
//!
//! At every integer time `t` the simulator reveals the jobs released at
//! `t`, hands the policy an [`Observation`] and applies its [`Decision`]:
//! an optional order, then a list of jobs started back to back from `t`.
//! Orders and starts are never revised. Jobs arriving while the machine is
//! busy simply wait in the pending list.

pub mod adversary;
pub mod policies;
pub mod trace;

pub use adversary::{adversary_run, AdversaryKind, AdversaryReport, AdversarySpec};
pub use policies::{MaxFlowPolicy, SumCjPolicy, SumFjPolicy};
pub use trace::{
    check_certificates, Block, CertificateCheck, CertificateKind, DecisionRecord, Trace,
};

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::{
    Instance, Job, JobId, Objective, Replenishment, ReplenishmentStructure, ResourceSet, Schedule,
    Solution, Time,
};

/// What a policy sees at time `now`.
#[derive(Clone, Copy, Debug)]
pub struct Observation<'a> {
    pub now: Time,
    /// Jobs with `r_j = now`.
    pub arrivals: &'a [Job],
    pub machine_busy_until: Time,
    /// Revealed jobs that have not started, by release date then id.
    pub pending: &'a [Job],
    /// Set when the stream carries an end signal and nothing arrives from
    /// `now` on.
    pub stream_ended: bool,
}

impl Observation<'_> {
    pub fn machine_idle(&self) -> bool {
        self.machine_busy_until <= self.now
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decision {
    pub replenish: Option<ResourceSet>,
    /// Jobs to run back to back starting at `now`.
    pub start: Vec<JobId>,
}

impl Decision {
    pub fn wait() -> Self {
        Decision::default()
    }

    pub fn is_empty(&self) -> bool {
        self.replenish.is_none() && self.start.is_empty()
    }
}

pub trait Policy {
    fn name(&self) -> &'static str;

    /// Objective the policy is designed for; used to price its run.
    fn objective(&self) -> Objective;

    /// Rejects jobs the policy cannot handle.
    fn admits(&self, s: usize, job: &Job) -> Result<()>;

    fn decide(&mut self, obs: &Observation<'_>) -> Decision;
}

/// Supplies jobs over time, possibly reacting to past decisions.
pub trait ArrivalSource {
    /// Jobs released at `t`. `history` holds every non-empty decision made
    /// before `t`.
    fn arrivals(&mut self, t: Time, history: &[DecisionRecord]) -> Vec<Job>;

    /// True once no job will be released after `t`.
    fn exhausted(&self, t: Time, history: &[DecisionRecord]) -> bool;
}

/// Replays the jobs of a fixed instance.
#[derive(Clone, Debug)]
pub struct StaticSource {
    jobs: Vec<Job>,
    next: usize,
}

impl StaticSource {
    pub fn new(instance: &Instance) -> Self {
        let mut jobs = instance.jobs().to_vec();
        jobs.sort_by_key(|j| (j.release, j.id));
        StaticSource { jobs, next: 0 }
    }
}

impl ArrivalSource for StaticSource {
    fn arrivals(&mut self, t: Time, _: &[DecisionRecord]) -> Vec<Job> {
        let start = self.next;
        while self.next < self.jobs.len() && self.jobs[self.next].release <= t {
            self.next += 1;
        }
        self.jobs[start..self.next].to_vec()
    }

    fn exhausted(&self, t: Time, _: &[DecisionRecord]) -> bool {
        self.jobs.last().is_none_or(|j| j.release <= t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimConfig {
    /// Expose "nothing arrives at `t`" as the end of the stream.
    pub end_signal: bool,
    /// Re-check the whole partial solution after every accepted decision.
    pub audit: bool,
    /// Give up after this many consecutive steps in which jobs wait but
    /// nothing arrives and nothing is decided.
    pub stall_limit: Time,
    /// Price the run with this objective instead of the policy's own.
    pub objective: Option<Objective>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            end_signal: true,
            audit: false,
            stall_limit: 1 << 24,
            objective: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OnlineRun {
    /// Every job that was revealed during the run.
    pub instance: Instance,
    pub solution: Solution,
    pub trace: Trace,
}

/// Runs `policy` on the jobs of `instance`.
pub fn run_online(
    instance: &Instance,
    policy: &mut dyn Policy,
    cfg: &SimConfig,
) -> Result<OnlineRun> {
    let template = Instance::new(
        instance.s(),
        instance.joint_cost(),
        instance.item_costs().to_vec(),
        Vec::new(),
    )?;
    simulate(&template, &mut StaticSource::new(instance), policy, cfg)
}

/// Runs `policy` against an arbitrary arrival source. `template` supplies
/// the resource count and order costs; its jobs are ignored.
pub fn simulate(
    template: &Instance,
    source: &mut dyn ArrivalSource,
    policy: &mut dyn Policy,
    cfg: &SimConfig,
) -> Result<OnlineRun> {
    let s = template.s();
    let full = ResourceSet::full(s);
    let mut revealed: Vec<Job> = Vec::new();
    let mut seen: HashSet<JobId> = HashSet::new();
    let mut pending: Vec<Job> = Vec::new();
    let mut q = ReplenishmentStructure::empty();
    let mut schedule = Schedule::new();
    let mut history: Vec<DecisionRecord> = Vec::new();
    let mut busy_until: Time = 0;
    let mut last_progress: Time = 0;

    let mut t: Time = 0;
    loop {
        let mut arrivals = source.arrivals(t, &history);
        arrivals.sort_by_key(|j| j.id);
        for job in &arrivals {
            job.validate(s)?;
            if job.release != t {
                return Err(Error::InvalidJob {
                    id: job.id,
                    field: "release",
                    reason: format!("revealed at {t} but released at {}", job.release),
                });
            }
            if !seen.insert(job.id) {
                return Err(Error::DuplicateJob(job.id));
            }
            policy.admits(s, job)?;
        }
        if !arrivals.is_empty() {
            last_progress = t;
        }
        revealed.extend(arrivals.iter().cloned());
        pending.extend(arrivals.iter().cloned());

        let stream_ended = cfg.end_signal && arrivals.is_empty() && source.exhausted(t, &history);
        let decision = policy.decide(&Observation {
            now: t,
            arrivals: &arrivals,
            machine_busy_until: busy_until,
            pending: &pending,
            stream_ended,
        });

        if !decision.is_empty() {
            let illegal = |reason: String| Error::IllegalDecision { t, reason };
            if let Some(set) = decision.replenish {
                if set.is_empty() {
                    return Err(illegal("empty replenishment".into()));
                }
                if !set.is_subset(full) {
                    return Err(illegal(format!("resources {set:?} outside 1..={s}")));
                }
                q.push(Replenishment {
                    time: t,
                    resources: set,
                });
            }
            if !decision.start.is_empty() && busy_until > t {
                return Err(illegal(format!("machine busy until {busy_until}")));
            }
            let mut cursor = t;
            for &id in &decision.start {
                let Some(pos) = pending.iter().position(|j| j.id == id) else {
                    return Err(illegal(format!("job {id} is not pending")));
                };
                let job = &pending[pos];
                if !job
                    .resources
                    .is_subset(q.ordered_between(job.release, cursor))
                {
                    return Err(illegal(format!("job {id} is not ready at {cursor}")));
                }
                schedule.set(id, cursor);
                cursor += job.processing;
                pending.remove(pos);
            }
            busy_until = busy_until.max(cursor);
            history.push(DecisionRecord {
                t,
                replenish: decision.replenish,
                start: decision.start,
            });
            last_progress = t;

            if cfg.audit {
                let realized = Instance::new(
                    s,
                    template.joint_cost(),
                    template.item_costs().to_vec(),
                    revealed.clone(),
                )?;
                let report = crate::eval::check_partial(&realized, &schedule, &q);
                if !report.is_feasible() {
                    return Err(illegal(format!("audit failed: {:?}", report.violations)));
                }
            }
        }

        if pending.is_empty() && source.exhausted(t, &history) {
            break;
        }
        if pending.is_empty() {
            last_progress = t;
        } else if t - last_progress > cfg.stall_limit {
            return Err(Error::Stalled(format!(
                "{} made no progress between t={last_progress} and t={t}",
                policy.name()
            )));
        }
        t += 1;
    }

    let instance = Instance::new(
        s,
        template.joint_cost(),
        template.item_costs().to_vec(),
        revealed,
    )?;
    let objective = cfg.objective.unwrap_or_else(|| policy.objective());
    let solution = Solution::evaluate(&instance, objective, schedule, q)?;
    let trace = Trace::new(&instance, &solution, history);
    Ok(OnlineRun {
        instance,
        solution,
        trace,
    })
}
