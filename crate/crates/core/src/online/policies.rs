//! Online policies for a single resource and unit jobs.

use crate::error::{Error, Result};
use crate::model::{Cost, Job, Objective, ResourceSet, Time};
use crate::online::trace::g;
use crate::online::{Decision, Observation, Policy};

fn unit_single_resource(policy: &str, s: usize, job: &Job) -> Result<()> {
    if s != 1 {
        return Err(Error::Precondition(format!(
            "{policy} needs s = 1, got {s}"
        )));
    }
    if job.processing != 1 {
        return Err(Error::Precondition(format!(
            "{policy} needs unit jobs, job {} has p = {}",
            job.id, job.processing
        )));
    }
    Ok(())
}

fn order_and_start_all(obs: &Observation<'_>) -> Decision {
    Decision {
        replenish: Some(ResourceSet::singleton(1)),
        start: obs.pending.iter().map(|j| j.id).collect(),
    }
}

/// Orders and starts every waiting job once `t |B| + G(|B|) >= K`, the
/// total completion time the batch would incur, reaches the order cost.
#[derive(Clone, Debug)]
pub struct SumCjPolicy {
    k: Cost,
}

impl SumCjPolicy {
    pub fn new(k: Cost) -> Self {
        SumCjPolicy { k }
    }
}

impl Policy for SumCjPolicy {
    fn name(&self) -> &'static str {
        "sum-cj"
    }

    fn objective(&self) -> Objective {
        Objective::TotalCompletion
    }

    fn admits(&self, s: usize, job: &Job) -> Result<()> {
        unit_single_resource(self.name(), s, job)
    }

    fn decide(&mut self, obs: &Observation<'_>) -> Decision {
        if !obs.machine_idle() || obs.pending.is_empty() {
            return Decision::wait();
        }
        let b = obs.pending.len();
        if obs.now * b as Cost + g(b) >= self.k {
            order_and_start_all(obs)
        } else {
            Decision::wait()
        }
    }
}

/// Like [`SumCjPolicy`] but weighs the waiting already accumulated:
/// triggers once `sum (t - r_j) + G(|B|) >= K`.
#[derive(Clone, Debug)]
pub struct SumFjPolicy {
    k: Cost,
}

impl SumFjPolicy {
    pub fn new(k: Cost) -> Self {
        SumFjPolicy { k }
    }
}

impl Policy for SumFjPolicy {
    fn name(&self) -> &'static str {
        "sum-fj"
    }

    fn objective(&self) -> Objective {
        Objective::TotalFlow
    }

    fn admits(&self, s: usize, job: &Job) -> Result<()> {
        unit_single_resource(self.name(), s, job)
    }

    fn decide(&mut self, obs: &Observation<'_>) -> Decision {
        if !obs.machine_idle() || obs.pending.is_empty() {
            return Decision::wait();
        }
        let waited: Cost = obs.pending.iter().map(|j| obs.now - j.release).sum();
        if waited + g(obs.pending.len()) >= self.k {
            order_and_start_all(obs)
        } else {
            Decision::wait()
        }
    }
}

/// Orders on a fixed grid meant for regular input (`r_j = j`):
/// `t_i = i (i + 1) / 2` when `K = 1` and `t_i = K (i^2 + 3i) / 2`
/// otherwise, plus once more when the stream ends.
#[derive(Clone, Debug)]
pub struct MaxFlowPolicy {
    k: Cost,
    i: Time,
}

impl MaxFlowPolicy {
    pub fn new(k: Cost) -> Self {
        MaxFlowPolicy { k, i: 1 }
    }

    pub fn grid_point(k: Cost, i: Time) -> Time {
        if k <= 1 {
            i * (i + 1) / 2
        } else {
            k * (i * i + 3 * i) / 2
        }
    }

    fn next_point(&self) -> Time {
        Self::grid_point(self.k, self.i)
    }
}

impl Policy for MaxFlowPolicy {
    fn name(&self) -> &'static str {
        "max-flow"
    }

    fn objective(&self) -> Objective {
        Objective::MaxFlow
    }

    fn admits(&self, s: usize, job: &Job) -> Result<()> {
        unit_single_resource(self.name(), s, job)
    }

    fn decide(&mut self, obs: &Observation<'_>) -> Decision {
        if obs.now < self.next_point() && !obs.stream_ended {
            return Decision::wait();
        }
        if !obs.machine_idle() {
            return Decision::wait();
        }
        while self.next_point() <= obs.now {
            self.i += 1;
        }
        if obs.pending.is_empty() {
            Decision::wait()
        } else {
            order_and_start_all(obs)
        }
    }
}
