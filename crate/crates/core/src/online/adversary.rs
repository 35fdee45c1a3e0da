//! Adaptive adversaries that watch a policy's decisions and release jobs
//! to punish them.
//!
//! All adversaries use one resource, unit jobs and order cost `K` (as
//! `K_0 = K`, `K_1 = 0`). Each starts with a job released at 0 (at 1 for
//! the regular-input adversary) and reacts to the policy's first start or
//! first order at time `t`:
//!
//! | kind | reaction |
//! |---|---|
//! | `sum_cj_3_2`, `sum_fj_3_2` | one more job at `t + 1` |
//! | `weighted_golden` | one more job of weight `w2` at `t + 1` |
//! | `fmax_general_golden` | `t` more jobs at `t + 1` |
//! | `fmax_regular_4_3` | keeps releasing job `j` at `j` until the first order at `t`, then job `t + 1` and stops |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dp::dp_fmax_s1;
use crate::error::{Error, Result};
use crate::model::{Cost, Instance, Job, JobId, Objective, ResourceSet, Solution, Time};
use crate::online::{simulate, ArrivalSource, DecisionRecord, OnlineRun, Policy, SimConfig, Trace};
use crate::oracle::{exact_solve, OracleLimits};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AdversaryKind {
    #[serde(rename = "sum_cj_3_2")]
    SumCj32,
    #[serde(rename = "weighted_golden")]
    WeightedGolden,
    #[serde(rename = "sum_fj_3_2")]
    SumFj32,
    #[serde(rename = "fmax_regular_4_3")]
    FmaxRegular43,
    #[serde(rename = "fmax_general_golden")]
    FmaxGeneralGolden,
}

impl AdversaryKind {
    pub const ALL: [AdversaryKind; 5] = [
        AdversaryKind::SumCj32,
        AdversaryKind::WeightedGolden,
        AdversaryKind::SumFj32,
        AdversaryKind::FmaxRegular43,
        AdversaryKind::FmaxGeneralGolden,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AdversaryKind::SumCj32 => "sum_cj_3_2",
            AdversaryKind::WeightedGolden => "weighted_golden",
            AdversaryKind::SumFj32 => "sum_fj_3_2",
            AdversaryKind::FmaxRegular43 => "fmax_regular_4_3",
            AdversaryKind::FmaxGeneralGolden => "fmax_general_golden",
        }
    }

    /// Objective the realized instance is priced with.
    pub fn objective(self) -> Objective {
        match self {
            AdversaryKind::SumCj32 => Objective::TotalCompletion,
            AdversaryKind::WeightedGolden => Objective::TotalWeightedCompletion,
            AdversaryKind::SumFj32 => Objective::TotalFlow,
            AdversaryKind::FmaxRegular43 | AdversaryKind::FmaxGeneralGolden => Objective::MaxFlow,
        }
    }
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AdversaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('-', "_");
        AdversaryKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::Malformed(format!("unknown adversary kind `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversarySpec {
    pub kind: AdversaryKind,
    pub k: Cost,
    /// Weight of the second job; only used by [`AdversaryKind::WeightedGolden`].
    pub w2: Option<Cost>,
}

impl AdversarySpec {
    pub fn new(kind: AdversaryKind, k: Cost) -> Self {
        AdversarySpec { kind, k, w2: None }
    }

    pub fn weighted(k: Cost, w2: Cost) -> Self {
        AdversarySpec {
            kind: AdversaryKind::WeightedGolden,
            k,
            w2: Some(w2),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::Precondition(format!(
                "K must be at least 1, got {}",
                self.k
            )));
        }
        match (self.kind, self.w2) {
            (AdversaryKind::WeightedGolden, None) => {
                Err(Error::Precondition("weighted_golden needs w2".into()))
            }
            (AdversaryKind::WeightedGolden, Some(w)) if w < 1 => {
                Err(Error::Precondition(format!("w2 must be positive, got {w}")))
            }
            _ => Ok(()),
        }
    }
}

fn unit_job(id: JobId, release: Time, weight: Cost) -> Job {
    Job::new(id, release, 1, ResourceSet::singleton(1)).with_weight(weight)
}

struct Adversary {
    spec: AdversarySpec,
    /// Time the reaction was triggered, once it has been.
    reacted_at: Option<Time>,
    done: bool,
}

impl Adversary {
    fn trigger(&self, history: &[DecisionRecord]) -> Option<Time> {
        match self.spec.kind {
            AdversaryKind::FmaxRegular43 => history.iter().find(|d| d.replenish.is_some()),
            _ => history.iter().find(|d| !d.start.is_empty()),
        }
        .map(|d| d.t)
    }
}

impl ArrivalSource for Adversary {
    fn arrivals(&mut self, t: Time, history: &[DecisionRecord]) -> Vec<Job> {
        if self.done {
            return Vec::new();
        }
        if self.reacted_at.is_none() {
            self.reacted_at = self.trigger(history);
        }
        let regular = self.spec.kind == AdversaryKind::FmaxRegular43;
        match self.reacted_at {
            None if regular => (t >= 1)
                .then(|| unit_job(t as JobId, t, 1))
                .into_iter()
                .collect(),
            None => (t == 0).then(|| unit_job(1, 0, 1)).into_iter().collect(),
            Some(at) if t == at + 1 => {
                self.done = true;
                match self.spec.kind {
                    AdversaryKind::FmaxRegular43 => vec![unit_job(t as JobId, t, 1)],
                    AdversaryKind::FmaxGeneralGolden => {
                        (0..at).map(|k| unit_job(k as JobId + 2, t, 1)).collect()
                    }
                    AdversaryKind::WeightedGolden => {
                        vec![unit_job(2, t, self.spec.w2.unwrap_or(1))]
                    }
                    AdversaryKind::SumCj32 | AdversaryKind::SumFj32 => vec![unit_job(2, t, 1)],
                }
            }
            Some(_) => Vec::new(),
        }
    }

    fn exhausted(&self, t: Time, history: &[DecisionRecord]) -> bool {
        self.done || self.trigger(history).is_some_and(|at| t > at + 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryReport {
    pub spec: AdversarySpec,
    pub policy: &'static str,
    /// The instance the adversary ended up releasing.
    pub instance: Instance,
    pub online: Solution,
    pub offline: Solution,
    pub trace: Trace,
    pub ratio: f64,
}

/// Plays `policy` against the adversary of `spec` and compares the result
/// with the offline optimum of the realized instance.
pub fn adversary_run(spec: AdversarySpec, policy: &mut dyn Policy) -> Result<AdversaryReport> {
    spec.validate()?;
    if policy.name() == "max-flow" && spec.kind != AdversaryKind::FmaxRegular43 {
        return Err(Error::Incompatible(format!(
            "max-flow assumes regular input, which {} does not produce",
            spec.kind
        )));
    }
    let template = Instance::single_resource(spec.k, Vec::new())?;
    let mut source = Adversary {
        spec,
        reacted_at: None,
        done: false,
    };
    let cfg = SimConfig {
        objective: Some(spec.kind.objective()),
        ..SimConfig::default()
    };
    let OnlineRun {
        instance,
        solution,
        trace,
    } = simulate(&template, &mut source, policy, &cfg)?;

    let offline = match spec.kind.objective() {
        Objective::MaxFlow => dp_fmax_s1(&instance)?,
        objective => exact_solve(&instance, objective, OracleLimits::default())?,
    };
    let ratio = solution.total() as f64 / offline.total() as f64;
    Ok(AdversaryReport {
        spec,
        policy: policy.name(),
        instance,
        online: solution,
        offline,
        trace,
        ratio,
    })
}
