//! Single-resource maximum flow time.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{
    Cost, Instance, Objective, Replenishment, ReplenishmentStructure, ResourceSet, Schedule,
    Solution, Time,
};

/// Key of a state in the `F_max` dynamic program. The layer of a state is
/// the release group at which the resource was last ordered.
///
/// A run of back-to-back jobs starting at `β` with first group `γ` ends at
/// `P = β + Σ p` over the run, and only `P` affects the rest of the
/// schedule, so states are keyed by `P` rather than by `(β, γ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FmaxStateKey {
    /// End of the current run of back-to-back jobs.
    pub end: Time,
    /// Number of orders so far.
    pub u: u32,
}

#[derive(Clone, Copy, Debug)]
struct FmaxNode {
    layer: usize,
    key: FmaxStateKey,
    fmax: Time,
    parent: Option<usize>,
    /// Start of the first job of the groups added by the transition.
    block_start: Time,
}

fn require_single_resource(instance: &Instance) -> Result<()> {
    if instance.s() != 1 {
        return Err(Error::Precondition(format!(
            "expected a single resource, got s = {}",
            instance.s()
        )));
    }
    Ok(())
}

/// Drops every node that another node dominates: at most as many orders,
/// an earlier or equal run end and an at most equal `F_max`. Equal nodes
/// keep the one listed first.
fn retain_undominated(nodes: &mut Vec<FmaxNode>) {
    nodes.sort_by_key(|n| (n.key.u, n.key.end, n.fmax));
    // staircase of the nodes kept with fewer orders: end ascending, fmax descending
    let mut front: BTreeMap<Time, Time> = BTreeMap::new();
    let mut kept: Vec<FmaxNode> = Vec::new();
    let mut group_start = 0;
    for node in nodes.drain(..) {
        if kept.get(group_start).is_some_and(|k| k.key.u != node.key.u) {
            for k in &kept[group_start..] {
                insert_front(&mut front, k.key.end, k.fmax);
            }
            group_start = kept.len();
        }
        // kept nodes with this u have ascending ends and descending fmax
        let dominated = kept[group_start..]
            .last()
            .is_some_and(|k| k.fmax <= node.fmax)
            || front
                .range(..=node.key.end)
                .next_back()
                .is_some_and(|(_, &f)| f <= node.fmax);
        if !dominated {
            kept.push(node);
        }
    }
    *nodes = kept;
}

fn insert_front(front: &mut BTreeMap<Time, Time>, end: Time, fmax: Time) {
    if front
        .range(..=end)
        .next_back()
        .is_some_and(|(_, &f)| f <= fmax)
    {
        return;
    }
    let stale: Vec<Time> = front
        .range(end..)
        .take_while(|(_, &f)| f >= fmax)
        .map(|(&e, _)| e)
        .collect();
    for e in stale {
        front.remove(&e);
    }
    front.insert(end, fmax);
}

/// Optimal `F_max + c_Q` for one resource and arbitrary processing times.
///
/// Jobs are handled in groups of equal release date. A transition from
/// layer `i` to layer `j > i` orders the resource at the release `d` of
/// group `j - 1` and runs groups `i..j` back to back from `max(P, d)`,
/// where `P` is the end of the current run.
///
/// Layers are filled in order. Each layer keeps only states that no other
/// state of the layer dominates, and a state stops being extended once its
/// `F_max` plus the cost of one more order exceeds the best complete
/// solution seen; both only discard states that cannot do better.
pub fn dp_fmax_s1(instance: &Instance) -> Result<Solution> {
    require_single_resource(instance)?;
    if instance.is_empty() {
        return Ok(Solution::empty(Objective::MaxFlow));
    }
    let k_cost = instance.single_order_cost();
    let jobs = instance.jobs();

    let releases = instance.release_grid();
    let m = releases.len();
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (idx, j) in jobs.iter().enumerate() {
        let g = releases.binary_search(&j.release).expect("release on grid");
        groups[g].push(idx);
    }
    for g in &mut groups {
        g.sort_by_key(|&idx| jobs[idx].id);
    }
    // work[g] = total processing of groups 0..g
    let mut work = vec![0; m + 1];
    for g in 0..m {
        work[g + 1] = work[g]
            + groups[g]
                .iter()
                .map(|&idx| jobs[idx].processing)
                .sum::<Time>();
    }
    // the last job of group g has the largest flow in its group; started
    // from time work[0] = 0 without gaps it would complete at work[g + 1]
    let lateness: Vec<Time> = (0..m).map(|g| work[g + 1] - releases[g]).collect();

    // layer 0 is the empty prefix; layer g + 1 ends with group g
    let mut arena = vec![FmaxNode {
        layer: 0,
        key: FmaxStateKey { end: 0, u: 0 },
        fmax: 0,
        parent: None,
        block_start: 0,
    }];
    // (node, largest lateness among the groups after its layer so far)
    let mut active: Vec<(usize, Time)> = vec![(0, Time::MIN)];
    let mut bound = Cost::MAX;
    let mut candidates = Vec::new();
    let mut last = Vec::new();
    for j in 1..=m {
        let d = releases[j - 1];
        active.retain_mut(|(idx, peak)| {
            let node = arena[*idx];
            *peak = (*peak).max(lateness[j - 1]);
            let start = node.key.end.max(d);
            let fmax = node.fmax.max(start + *peak - work[node.layer]);
            let total = fmax + k_cost * (node.key.u as Cost + 1);
            // fmax never decreases along the extensions of a node
            if total > bound {
                return false;
            }
            if j == m {
                bound = bound.min(total);
            }
            candidates.push(FmaxNode {
                layer: j,
                key: FmaxStateKey {
                    end: start + work[j] - work[node.layer],
                    u: node.key.u + 1,
                },
                fmax,
                parent: Some(*idx),
                block_start: start,
            });
            true
        });
        retain_undominated(&mut candidates);
        for node in candidates.drain(..) {
            if j == m {
                last.push(arena.len());
            } else {
                active.push((arena.len(), Time::MIN));
            }
            arena.push(node);
        }
    }

    let best = last
        .iter()
        .copied()
        .min_by_key(|&idx| arena[idx].fmax + k_cost * arena[idx].key.u as Cost)
        .expect("last layer is reachable");

    let mut schedule = Schedule::new();
    let mut times = Vec::new();
    let mut node = arena[best];
    while let Some(parent) = node.parent {
        let i = arena[parent].layer;
        times.push(releases[node.layer - 1]);
        let mut t = node.block_start;
        for group in &groups[i..node.layer] {
            for &jx in group {
                schedule.set(jobs[jx].id, t);
                t += jobs[jx].processing;
            }
        }
        node = arena[parent];
    }
    times.reverse();
    let q = ReplenishmentStructure::at_times(&times)?;
    Solution::evaluate(instance, Objective::MaxFlow, schedule, q)
}

/// Optimal `F_max + c_Q` for one resource, unit jobs and pairwise distinct
/// release dates.
///
/// Some optimal solution gives every job the same flow time `F`. For a
/// fixed `F` each job starts at `r_j + F - 1`, and the fewest orders are
/// found by repeatedly ordering at the release of the last uncovered job.
/// The order count only drops when `F` reaches some `r_j - r_i + 1`, so
/// those values together with `1..=n` are the candidates. Ties go to the
/// smallest `F`.
pub fn fmax_unit_distinct(instance: &Instance) -> Result<Solution> {
    require_single_resource(instance)?;
    let jobs = instance.jobs();
    if let Some(j) = jobs.iter().find(|j| j.processing != 1) {
        return Err(Error::Precondition(format!(
            "job {} has processing time {}, expected 1",
            j.id, j.processing
        )));
    }
    let releases = instance.release_grid();
    if releases.len() != jobs.len() {
        return Err(Error::Precondition(
            "release dates are not pairwise distinct".into(),
        ));
    }
    if jobs.is_empty() {
        return Ok(Solution::empty(Objective::MaxFlow));
    }
    let n = releases.len();
    let mut candidates: BTreeSet<Time> = (1..=n as Time).collect();
    for a in 0..n {
        for b in a + 1..n {
            candidates.insert(releases[b] - releases[a] + 1);
        }
    }

    let k_cost = instance.single_order_cost();
    let mut best: Option<(Cost, Time, Vec<Time>)> = None;
    for &f in &candidates {
        let orders = greedy_cover(&releases, f);
        let value = f + k_cost * orders.len() as Cost;
        if best.as_ref().is_none_or(|(v, _, _)| value < *v) {
            best = Some((value, f, orders));
        }
    }
    let (_, f, orders) = best.expect("candidate set is non-empty");
    let schedule = Schedule::from_pairs(jobs.iter().map(|j| (j.id, j.release + f - 1)));
    let q = ReplenishmentStructure::new(
        orders
            .into_iter()
            .map(|time| Replenishment {
                time,
                resources: ResourceSet::singleton(1),
            })
            .collect(),
    )?;
    Solution::evaluate(instance, Objective::MaxFlow, schedule, q)
}

/// Order times covering every job when each starts `f - 1` after release.
fn greedy_cover(releases: &[Time], f: Time) -> Vec<Time> {
    let mut orders = Vec::new();
    let mut k = releases.len();
    while k > 0 {
        let at = releases[k - 1];
        orders.push(at);
        k = releases.partition_point(|&r| r < at - f + 1);
    }
    orders.reverse();
    orders
}
