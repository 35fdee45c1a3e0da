//! Problem model: jobs, instances, replenishment structures, schedules and
//! solutions, together with their JSON document forms.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Time = i64;
pub type Cost = i64;
pub type JobId = u32;

/// Largest number of resource types a [`ResourceSet`] can hold.
pub const MAX_RESOURCES: usize = 64;

/// A set of resource indices drawn from `1..=s`, stored as a bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResourceSet(u64);

impl ResourceSet {
    pub const EMPTY: ResourceSet = ResourceSet(0);

    pub fn singleton(index: usize) -> Self {
        debug_assert!((1..=MAX_RESOURCES).contains(&index));
        ResourceSet(1u64 << (index - 1))
    }

    /// All resources `1..=s`.
    pub fn full(s: usize) -> Self {
        if s >= MAX_RESOURCES {
            ResourceSet(u64::MAX)
        } else {
            ResourceSet((1u64 << s) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> Self {
        ResourceSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, index: usize) -> bool {
        (1..=MAX_RESOURCES).contains(&index) && self.0 & (1u64 << (index - 1)) != 0
    }

    pub fn is_subset(self, other: ResourceSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: ResourceSet) -> Self {
        ResourceSet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (1..=MAX_RESOURCES).filter(move |&i| bits & (1u64 << (i - 1)) != 0)
    }

    /// Every subset of `1..=s`, including the empty set, in increasing bit order.
    pub fn all_subsets(s: usize) -> impl Iterator<Item = ResourceSet> {
        assert!(s < MAX_RESOURCES, "subset enumeration needs s < 64");
        (0..(1u64 << s)).map(ResourceSet)
    }

    /// Builds a set from raw indices, checking each lies in `1..=s`.
    pub fn from_indices(indices: &[i64], s: usize) -> Result<Self> {
        let mut bits = 0u64;
        for &i in indices {
            if i < 1 || i as usize > s || i as usize > MAX_RESOURCES {
                return Err(Error::ResourceOutOfRange { index: i, s });
            }
            bits |= 1u64 << (i - 1);
        }
        Ok(ResourceSet(bits))
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for ResourceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for ResourceSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(ResourceSet::EMPTY, |acc, i| {
            acc.union(ResourceSet::singleton(i))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Job {
    pub id: JobId,
    pub release: Time,
    pub processing: Time,
    pub weight: Cost,
    pub resources: ResourceSet,
}

impl Job {
    /// Unit-weight job.
    pub fn new(id: JobId, release: Time, processing: Time, resources: ResourceSet) -> Self {
        Job {
            id,
            release,
            processing,
            weight: 1,
            resources,
        }
    }

    pub fn with_weight(mut self, weight: Cost) -> Self {
        self.weight = weight;
        self
    }

    pub(crate) fn validate(&self, s: usize) -> Result<()> {
        let bad = |field, reason: &str| Error::InvalidJob {
            id: self.id,
            field,
            reason: reason.to_string(),
        };
        if self.release < 0 {
            return Err(bad("release", "negative release"));
        }
        if self.processing < 1 {
            return Err(bad("processing", "zero processing"));
        }
        if self.weight < 1 {
            return Err(bad("weight", "non-positive weight"));
        }
        if self.resources.is_empty() {
            return Err(bad("resources", "empty resource set"));
        }
        if !self.resources.is_subset(ResourceSet::full(s)) {
            return Err(bad("resources", "resource index out of range"));
        }
        Ok(())
    }
}

/// A validated problem instance. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    s: usize,
    joint_cost: Cost,
    item_costs: Vec<Cost>,
    jobs: Vec<Job>,
    index: HashMap<JobId, usize>,
}

impl Instance {
    pub fn new(s: usize, joint_cost: Cost, item_costs: Vec<Cost>, jobs: Vec<Job>) -> Result<Self> {
        if s == 0 || s > MAX_RESOURCES {
            return Err(Error::InvalidInstance(format!(
                "number of resource types must be in 1..={MAX_RESOURCES}, got {s}"
            )));
        }
        if item_costs.len() != s {
            return Err(Error::InvalidInstance(format!(
                "item_costs has length {}, expected {s}",
                item_costs.len()
            )));
        }
        if joint_cost < 0 || item_costs.iter().any(|&c| c < 0) {
            return Err(Error::InvalidInstance("negative replenishment cost".into()));
        }
        let mut index = HashMap::with_capacity(jobs.len());
        for (k, job) in jobs.iter().enumerate() {
            job.validate(s)?;
            if index.insert(job.id, k).is_some() {
                return Err(Error::DuplicateJob(job.id));
            }
        }
        Ok(Instance {
            s,
            joint_cost,
            item_costs,
            jobs,
            index,
        })
    }

    /// Single-resource instance with replenishment cost `k` charged as the joint cost.
    pub fn single_resource(k: Cost, jobs: Vec<Job>) -> Result<Self> {
        Instance::new(1, k, vec![0], jobs)
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn joint_cost(&self) -> Cost {
        self.joint_cost
    }

    pub fn item_costs(&self) -> &[Cost] {
        &self.item_costs
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn job(&self, id: JobId) -> Option<&Job> {
        self.index.get(&id).map(|&k| &self.jobs[k])
    }

    pub fn position(&self, id: JobId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Cost of one replenishment of `resources`: `K_0 + sum K_i`.
    pub fn order_cost(&self, resources: ResourceSet) -> Cost {
        self.joint_cost
            + resources
                .iter()
                .map(|i| self.item_costs[i - 1])
                .sum::<Cost>()
    }

    /// `K_0 + K_1`, the single-resource replenishment cost.
    pub fn single_order_cost(&self) -> Cost {
        self.order_cost(ResourceSet::full(self.s))
    }

    /// Sorted distinct release dates.
    pub fn release_grid(&self) -> Vec<Time> {
        let mut grid: Vec<Time> = self.jobs.iter().map(|j| j.release).collect();
        grid.sort_unstable();
        grid.dedup();
        grid
    }

    pub fn total_processing(&self) -> Time {
        self.jobs.iter().map(|j| j.processing).sum()
    }

    /// Last release date plus the total processing time; no job of an
    /// active schedule completes later.
    pub fn horizon_end(&self) -> Time {
        self.jobs.iter().map(|j| j.release).max().unwrap_or(0) + self.total_processing()
    }

    pub fn all_unit(&self) -> bool {
        self.jobs.iter().all(|j| j.processing == 1)
    }

    /// Same jobs with every release date shifted by `delta`.
    pub fn shifted_releases(&self, delta: Time) -> Result<Instance> {
        let jobs = self
            .jobs
            .iter()
            .map(|j| Job {
                release: j.release + delta,
                ..j.clone()
            })
            .collect();
        Instance::new(self.s, self.joint_cost, self.item_costs.clone(), jobs)
    }

    pub fn to_doc(&self) -> InstanceDoc {
        InstanceDoc {
            s: self.s as i64,
            joint_cost: self.joint_cost,
            item_costs: self.item_costs.clone(),
            jobs: self
                .jobs
                .iter()
                .map(|j| JobDoc {
                    id: j.id as i64,
                    release: j.release,
                    processing: j.processing,
                    weight: Some(j.weight),
                    resources: j.resources.iter().map(|i| i as i64).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("instance serializes")
    }
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc =
        serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    Instance::try_from(doc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobDoc {
    pub id: i64,
    pub release: i64,
    pub processing: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<i64>,
    pub resources: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub s: i64,
    pub joint_cost: i64,
    pub item_costs: Vec<i64>,
    pub jobs: Vec<JobDoc>,
}

impl TryFrom<InstanceDoc> for Instance {
    type Error = Error;

    fn try_from(doc: InstanceDoc) -> Result<Instance> {
        if doc.s < 1 || doc.s as usize > MAX_RESOURCES {
            return Err(Error::InvalidInstance(format!(
                "s must be in 1..={MAX_RESOURCES}, got {}",
                doc.s
            )));
        }
        let s = doc.s as usize;
        let mut jobs = Vec::with_capacity(doc.jobs.len());
        for j in doc.jobs {
            let id = JobId::try_from(j.id).map_err(|_| Error::InvalidJob {
                id: 0,
                field: "id",
                reason: format!("id {} is not a non-negative 32-bit integer", j.id),
            })?;
            let bad = |field, reason: String| Error::InvalidJob { id, field, reason };
            if j.resources.is_empty() {
                return Err(bad("resources", "empty resource set".into()));
            }
            let resources = ResourceSet::from_indices(&j.resources, s)
                .map_err(|e| bad("resources", e.to_string()))?;
            jobs.push(Job {
                id,
                release: j.release,
                processing: j.processing,
                weight: j.weight.unwrap_or(1),
                resources,
            });
        }
        Instance::new(s, doc.joint_cost, doc.item_costs, jobs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Replenishment {
    pub time: Time,
    pub resources: ResourceSet,
}

/// Ordering events with strictly increasing times and non-empty resource sets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReplenishmentStructure {
    events: Vec<Replenishment>,
}

impl ReplenishmentStructure {
    pub fn new(events: Vec<Replenishment>) -> Result<Self> {
        for (k, e) in events.iter().enumerate() {
            if e.time < 0 {
                return Err(Error::InvalidReplenishments(format!(
                    "negative time {}",
                    e.time
                )));
            }
            if e.resources.is_empty() {
                return Err(Error::InvalidReplenishments(format!(
                    "empty resource set at time {}",
                    e.time
                )));
            }
            if k > 0 && events[k - 1].time >= e.time {
                return Err(Error::InvalidReplenishments(format!(
                    "times not strictly increasing at {}",
                    e.time
                )));
            }
        }
        Ok(ReplenishmentStructure { events })
    }

    pub fn empty() -> Self {
        ReplenishmentStructure::default()
    }

    /// Builds a structure from events in any order; events sharing a time
    /// are merged and empty sets dropped.
    pub fn merged(mut events: Vec<Replenishment>) -> Self {
        events.retain(|e| !e.resources.is_empty());
        events.sort_by_key(|e| e.time);
        let mut out: Vec<Replenishment> = Vec::with_capacity(events.len());
        for e in events {
            match out.last_mut() {
                Some(last) if last.time == e.time => {
                    last.resources = last.resources.union(e.resources)
                }
                _ => out.push(e),
            }
        }
        ReplenishmentStructure { events: out }
    }

    /// Single-resource structure replenishing resource 1 at each time.
    pub fn at_times(times: &[Time]) -> Result<Self> {
        ReplenishmentStructure::new(
            times
                .iter()
                .map(|&time| Replenishment {
                    time,
                    resources: ResourceSet::singleton(1),
                })
                .collect(),
        )
    }

    pub fn events(&self) -> &[Replenishment] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn times(&self) -> Vec<Time> {
        self.events.iter().map(|e| e.time).collect()
    }

    /// Union of the resources ordered at times in `[from, to]`.
    pub fn ordered_between(&self, from: Time, to: Time) -> ResourceSet {
        if from > to {
            return ResourceSet::EMPTY;
        }
        let lo = self.events.partition_point(|e| e.time < from);
        self.events[lo..]
            .iter()
            .take_while(|e| e.time <= to)
            .fold(ResourceSet::EMPTY, |acc, e| acc.union(e.resources))
    }

    pub(crate) fn push(&mut self, event: Replenishment) {
        debug_assert!(self.events.last().is_none_or(|l| l.time < event.time));
        self.events.push(event);
    }
}

/// Start time of each scheduled job.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Schedule {
    pub starts: BTreeMap<JobId, Time>,
}

impl Schedule {
    pub fn new() -> Self {
        Schedule::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (JobId, Time)>>(pairs: I) -> Self {
        Schedule {
            starts: pairs.into_iter().collect(),
        }
    }

    pub fn start(&self, id: JobId) -> Option<Time> {
        self.starts.get(&id).copied()
    }

    pub fn set(&mut self, id: JobId, start: Time) {
        self.starts.insert(id, start);
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Sum of w_j C_j.
    TotalWeightedCompletion,
    /// Sum of C_j.
    TotalCompletion,
    /// Sum of F_j = C_j - r_j.
    TotalFlow,
    /// Sum of w_j F_j.
    TotalWeightedFlow,
    /// max F_j.
    MaxFlow,
}

impl Objective {
    pub const ALL: [Objective; 5] = [
        Objective::TotalWeightedCompletion,
        Objective::TotalCompletion,
        Objective::TotalFlow,
        Objective::TotalWeightedFlow,
        Objective::MaxFlow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Objective::TotalWeightedCompletion => "total_weighted_completion",
            Objective::TotalCompletion => "total_completion",
            Objective::TotalFlow => "total_flow",
            Objective::TotalWeightedFlow => "total_weighted_flow",
            Objective::MaxFlow => "max_flow",
        }
    }

    pub fn is_min_sum(self) -> bool {
        !matches!(self, Objective::MaxFlow)
    }

    /// Contribution of one job completing at `completion`; combined by sum
    /// for min-sum objectives and by max for [`Objective::MaxFlow`].
    pub fn job_term(self, job: &Job, completion: Time) -> Cost {
        match self {
            Objective::TotalWeightedCompletion => job.weight * completion,
            Objective::TotalCompletion => completion,
            Objective::TotalFlow => completion - job.release,
            Objective::TotalWeightedFlow => job.weight * (completion - job.release),
            Objective::MaxFlow => completion - job.release,
        }
    }

    pub fn combine(self, acc: Cost, term: Cost) -> Cost {
        if self.is_min_sum() {
            acc + term
        } else {
            acc.max(term)
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        Ok(match norm.as_str() {
            "total_weighted_completion" | "wc" | "sum_wc" | "wjcj" => {
                Objective::TotalWeightedCompletion
            }
            "total_completion" | "c" | "sum_c" | "cj" => Objective::TotalCompletion,
            "total_flow" | "f" | "sum_f" | "fj" => Objective::TotalFlow,
            "total_weighted_flow" | "wf" | "sum_wf" | "wjfj" => Objective::TotalWeightedFlow,
            "max_flow" | "fmax" | "f_max" => Objective::MaxFlow,
            _ => return Err(Error::UnsupportedObjective(s.to_string())),
        })
    }
}

/// A schedule paired with a replenishment structure and its exact cost breakdown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    schedule: Schedule,
    replenishments: ReplenishmentStructure,
    objective: Objective,
    scheduling_cost: Cost,
    replenishment_cost: Cost,
}

impl Solution {
    /// Prices `schedule` and `replenishments` on `instance`.
    pub fn evaluate(
        instance: &Instance,
        objective: Objective,
        schedule: Schedule,
        replenishments: ReplenishmentStructure,
    ) -> Result<Solution> {
        let scheduling_cost = crate::eval::scheduling_cost(instance, &schedule, objective)?;
        let replenishment_cost = crate::eval::replenishment_cost(instance, &replenishments)?;
        Ok(Solution {
            schedule,
            replenishments,
            objective,
            scheduling_cost,
            replenishment_cost,
        })
    }

    pub fn empty(objective: Objective) -> Solution {
        Solution {
            schedule: Schedule::new(),
            replenishments: ReplenishmentStructure::empty(),
            objective,
            scheduling_cost: 0,
            replenishment_cost: 0,
        }
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn replenishments(&self) -> &ReplenishmentStructure {
        &self.replenishments
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn scheduling_cost(&self) -> Cost {
        self.scheduling_cost
    }

    pub fn replenishment_cost(&self) -> Cost {
        self.replenishment_cost
    }

    pub fn total(&self) -> Cost {
        self.scheduling_cost + self.replenishment_cost
    }

    /// Same schedule and structure priced under another objective.
    pub fn reprice(&self, instance: &Instance, objective: Objective) -> Result<Solution> {
        Solution::evaluate(
            instance,
            objective,
            self.schedule.clone(),
            self.replenishments.clone(),
        )
    }

    pub fn to_doc(&self) -> SolutionDoc {
        SolutionDoc {
            objective: self.objective,
            starts: self
                .schedule
                .starts
                .iter()
                .map(|(&id, &t)| (id.to_string(), t))
                .collect(),
            replenishments: self
                .replenishments
                .events()
                .iter()
                .map(|e| ReplenishmentDoc {
                    time: e.time,
                    resources: e.resources.iter().map(|i| i as i64).collect(),
                })
                .collect(),
            scheduling_cost: self.scheduling_cost,
            replenishment_cost: self.replenishment_cost,
            total: self.total(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("solution serializes")
    }

    /// Rebuilds a solution from its document, re-pricing it on `instance`
    /// and rejecting documents whose reported costs disagree.
    pub fn from_doc(instance: &Instance, doc: &SolutionDoc) -> Result<Solution> {
        let (schedule, q) = doc.parts(instance.s())?;
        let sol = Solution::evaluate(instance, doc.objective, schedule, q)?;
        if sol.scheduling_cost != doc.scheduling_cost
            || sol.replenishment_cost != doc.replenishment_cost
            || sol.total() != doc.total
        {
            return Err(Error::CostMismatch(format!(
                "reported ({}, {}, {}), recomputed ({}, {}, {})",
                doc.scheduling_cost,
                doc.replenishment_cost,
                doc.total,
                sol.scheduling_cost,
                sol.replenishment_cost,
                sol.total()
            )));
        }
        Ok(sol)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplenishmentDoc {
    pub time: i64,
    pub resources: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDoc {
    pub objective: Objective,
    pub starts: BTreeMap<String, i64>,
    pub replenishments: Vec<ReplenishmentDoc>,
    pub scheduling_cost: i64,
    pub replenishment_cost: i64,
    pub total: i64,
}

impl SolutionDoc {
    pub fn parse(text: &str) -> Result<SolutionDoc> {
        serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
    }

    /// Decodes the schedule and replenishment structure without pricing them.
    pub fn parts(&self, s: usize) -> Result<(Schedule, ReplenishmentStructure)> {
        let mut schedule = Schedule::new();
        for (key, &t) in &self.starts {
            let id: JobId = key
                .parse()
                .map_err(|_| Error::Malformed(format!("bad job id key {key:?}")))?;
            schedule.set(id, t);
        }
        let events = self
            .replenishments
            .iter()
            .map(|r| {
                Ok(Replenishment {
                    time: r.time,
                    resources: ResourceSet::from_indices(&r.resources, s)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((schedule, ReplenishmentStructure::new(events)?))
    }
}
