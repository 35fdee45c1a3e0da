//! Layered dynamic program over replenishment histories.
//!
//! A state records, per job class (jobs sharing the same required resource
//! set), how many jobs have been scheduled; per resource, the time of its
//! last order and how many times it was ordered; and the total number of
//! order events; and the set of jobs scheduled so far. Among partial
//! solutions mapping to the same state only the one with the smallest
//! scheduling cost is kept.
//!
//! The job set matters when weights differ: two histories may schedule the
//! same number of jobs per class but leave jobs of different weight
//! behind, and the cheaper prefix is then not always the better one. With
//! every ready job taken at once (equal processing times) the set follows
//! from the other fields and adds no states.
//!
//! Two layer schemes are supported:
//! * unit processing times: one layer per release date; between two
//!   consecutive release dates the largest-weight ready jobs fill the gap;
//! * a common processing time `p`: layers over `{tau + lambda p}` for
//!   release dates `tau` and `lambda <= 2n` (a block starts at most `n - 1`
//!   jobs into its busy period and holds at most `n` jobs), and each
//!   expansion starts every ready job as one block.

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::model::{
    Cost, Instance, Objective, Replenishment, ReplenishmentStructure, ResourceSet, Schedule,
    Solution, Time,
};

/// Key identifying a layered-DP state within its layer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SumStateKey {
    /// Jobs scheduled so far, per job class.
    pub alpha: Vec<u32>,
    /// Time of the last order of each resource.
    pub beta: Vec<Option<Time>>,
    /// Number of orders of each resource.
    pub gamma: Vec<u32>,
    /// Number of order events.
    pub delta: u32,
    /// Scheduled jobs as a bitset over instance positions.
    pub scheduled: Vec<u64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DpStats {
    pub layers: usize,
    pub max_layer_states: usize,
    pub total_states: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Scheme {
    UnitWeighted,
    EqualProcessing { p: Time, objective: Objective },
}

#[derive(Clone, Debug)]
struct Node {
    cost: Cost,
    parent: Option<(usize, usize)>,
    ordered: ResourceSet,
    started: Vec<(usize, Time)>,
}

fn is_set(bits: &[u64], j: usize) -> bool {
    bits[j / 64] & (1u64 << (j % 64)) != 0
}

fn set_bit(bits: &mut [u64], j: usize) {
    bits[j / 64] |= 1u64 << (j % 64);
}

pub(crate) fn solve(instance: &Instance, scheme: Scheme) -> Result<(Solution, DpStats)> {
    let objective = match scheme {
        Scheme::UnitWeighted => Objective::TotalWeightedCompletion,
        Scheme::EqualProcessing { objective, .. } => objective,
    };
    let n = instance.len();
    if n == 0 {
        return Ok((Solution::empty(objective), DpStats::default()));
    }
    let s = instance.s();
    if s >= 20 {
        return Err(Error::Precondition(format!(
            "subset enumeration over {s} resources is not supported"
        )));
    }
    let jobs = instance.jobs();

    // job classes keyed by required resource set, in first-appearance order
    let mut class_sets: Vec<ResourceSet> = Vec::new();
    let class_of: Vec<usize> = jobs
        .iter()
        .map(
            |j| match class_sets.iter().position(|&c| c == j.resources) {
                Some(c) => c,
                None => {
                    class_sets.push(j.resources);
                    class_sets.len() - 1
                }
            },
        )
        .collect();

    let grid = instance.release_grid();
    let layers: Vec<Time> = match scheme {
        Scheme::UnitWeighted => {
            let mut l = grid.clone();
            l.push(grid[grid.len() - 1] + instance.total_processing());
            l
        }
        Scheme::EqualProcessing { p, .. } => {
            let mut l: Vec<Time> = grid
                .iter()
                .flat_map(|&tau| (0..=2 * n as Time).map(move |lambda| tau + lambda * p))
                .collect();
            l.sort_unstable();
            l.dedup();
            l
        }
    };

    // selection order among ready jobs
    let mut priority: Vec<usize> = (0..n).collect();
    match scheme {
        Scheme::UnitWeighted => priority.sort_by_key(|&j| (-jobs[j].weight, jobs[j].id)),
        Scheme::EqualProcessing { .. } => priority.sort_by_key(|&j| (jobs[j].release, jobs[j].id)),
    }

    let words = n.div_ceil(64);
    let root_key = SumStateKey {
        alpha: vec![0; class_sets.len()],
        beta: vec![None; s],
        gamma: vec![0; s],
        delta: 0,
        scheduled: vec![0; words],
    };
    let mut table: Vec<IndexMap<SumStateKey, Node>> = vec![IndexMap::new(); layers.len()];
    table[0].insert(
        root_key,
        Node {
            cost: 0,
            parent: None,
            ordered: ResourceSet::EMPTY,
            started: Vec::new(),
        },
    );
    let order_cost = |key: &SumStateKey| -> Cost {
        instance.joint_cost() * key.delta as Cost
            + key
                .gamma
                .iter()
                .zip(instance.item_costs())
                .map(|(&g, &c)| g as Cost * c)
                .sum::<Cost>()
    };

    let mut finals: Vec<(Cost, usize, usize)> = Vec::new();
    let mut stats = DpStats {
        layers: layers.len(),
        ..DpStats::default()
    };

    for k in 0..layers.len() {
        let layer = std::mem::take(&mut table[k]);
        stats.max_layer_states = stats.max_layer_states.max(layer.len());
        stats.total_states += layer.len();
        let tau = layers[k];
        for (idx, (key, node)) in layer.iter().enumerate() {
            if key.alpha.iter().sum::<u32>() as usize == n {
                finals.push((node.cost + order_cost(key), k, idx));
                continue;
            }
            if k + 1 == layers.len() && scheme == Scheme::UnitWeighted {
                continue;
            }
            for subset in ResourceSet::all_subsets(s) {
                let mut beta = key.beta.clone();
                let mut gamma = key.gamma.clone();
                for i in subset.iter() {
                    beta[i - 1] = Some(tau);
                    gamma[i - 1] += 1;
                }
                let delta = key.delta + u32::from(!subset.is_empty());

                let ready = |j: usize| {
                    !is_set(&key.scheduled, j)
                        && jobs[j]
                            .resources
                            .iter()
                            .all(|i| beta[i - 1].is_some_and(|b| jobs[j].release <= b))
                };
                let (chosen, next): (Vec<usize>, Option<usize>) = match scheme {
                    Scheme::UnitWeighted => {
                        let slots = (layers[k + 1] - tau) as usize;
                        let chosen = priority
                            .iter()
                            .copied()
                            .filter(|&j| ready(j))
                            .take(slots)
                            .collect();
                        (chosen, Some(k + 1))
                    }
                    Scheme::EqualProcessing { p, .. } => {
                        let chosen: Vec<usize> =
                            priority.iter().copied().filter(|&j| ready(j)).collect();
                        let next = if chosen.is_empty() {
                            (k + 1 < layers.len()).then_some(k + 1)
                        } else {
                            let end = tau + chosen.len() as Time * p;
                            let at = layers.partition_point(|&t| t < end);
                            (layers.get(at) == Some(&end)).then_some(at)
                        };
                        (chosen, next)
                    }
                };
                let Some(next) = next else { continue };

                let mut scheduled = key.scheduled.clone();
                let mut alpha = key.alpha.clone();
                let mut cost = node.cost;
                let mut started = Vec::with_capacity(chosen.len());
                let mut t = tau;
                for &j in &chosen {
                    set_bit(&mut scheduled, j);
                    alpha[class_of[j]] += 1;
                    started.push((j, t));
                    t += jobs[j].processing;
                    cost = objective.combine(cost, objective.job_term(&jobs[j], t));
                }
                let new_key = SumStateKey {
                    alpha,
                    beta,
                    gamma,
                    delta,
                    scheduled,
                };
                let candidate = Node {
                    cost,
                    parent: Some((k, idx)),
                    ordered: subset,
                    started,
                };
                match table[next].get_mut(&new_key) {
                    Some(existing) if existing.cost <= candidate.cost => {}
                    Some(existing) => *existing = candidate,
                    None => {
                        table[next].insert(new_key, candidate);
                    }
                }
            }
        }
        table[k] = layer;
    }

    let &(best_total, layer, idx) = finals
        .iter()
        .min_by_key(|f| f.0)
        .ok_or_else(|| Error::Infeasible("no state schedules every job".into()))?;

    let mut schedule = Schedule::new();
    let mut events = Vec::new();
    let mut cursor = Some((layer, idx));
    while let Some((k, i)) = cursor {
        let node = &table[k][i];
        for &(j, t) in &node.started {
            schedule.set(jobs[j].id, t);
        }
        if let Some((pk, _)) = node.parent {
            if !node.ordered.is_empty() {
                events.push(Replenishment {
                    time: layers[pk],
                    resources: node.ordered,
                });
            }
        }
        cursor = node.parent;
    }
    events.reverse();
    let sol = Solution::evaluate(
        instance,
        objective,
        schedule,
        ReplenishmentStructure::new(events)?,
    )?;
    debug_assert_eq!(sol.total(), best_total);
    Ok((sol, stats))
}
