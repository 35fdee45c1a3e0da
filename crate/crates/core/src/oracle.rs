//! Brute-force optimum for desk-scale instances.
//!
//! Every assignment of a resource subset to each candidate replenishment
//! time is enumerated. A fixed structure turns each job's release date into
//! an effective release `r'_j`, the first candidate time at which all of its
//! resources have been ordered since `r_j`; the remaining single-machine
//! problem with releases `r'` is then solved by exhaustive sequencing with
//! earliest-start placement. Results are cached per `r'` vector since many
//! structures induce the same effective releases.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exec::{fold_range, Exec};
use crate::model::{
    Cost, Instance, Objective, Replenishment, ReplenishmentStructure, ResourceSet, Schedule,
    Solution, Time,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_jobs: usize,
    /// Cap on the number of enumerated structures, `(2^s)^(#candidate times)`.
    pub max_grid_subsets: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_jobs: 8,
            max_grid_subsets: 1 << 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub limits: OracleLimits,
    pub exec: Exec,
    /// Sequence single-resource `F_max` residuals in effective-release order
    /// instead of enumerating permutations.
    pub edd_shortcut: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            limits: OracleLimits::default(),
            exec: Exec::default(),
            edd_shortcut: true,
        }
    }
}

impl OracleConfig {
    pub fn with_limits(limits: OracleLimits) -> Self {
        OracleConfig {
            limits,
            ..OracleConfig::default()
        }
    }
}

/// Optimum with replenishments restricted to release dates.
pub fn exact_solve(
    instance: &Instance,
    objective: Objective,
    limits: OracleLimits,
) -> Result<Solution> {
    exact_solve_with(instance, objective, &OracleConfig::with_limits(limits))
}

pub fn exact_solve_with(
    instance: &Instance,
    objective: Objective,
    cfg: &OracleConfig,
) -> Result<Solution> {
    solve_on_points(instance, objective, &instance.release_grid(), cfg)
}

/// Optimum with replenishments allowed at every integer time in
/// `[0, max r_j + sum p_j]`. Only meant for very small instances.
pub fn exact_solve_fine_grid(
    instance: &Instance,
    objective: Objective,
    limits: OracleLimits,
) -> Result<Solution> {
    exact_solve_fine_grid_with(instance, objective, &OracleConfig::with_limits(limits))
}

pub fn exact_solve_fine_grid_with(
    instance: &Instance,
    objective: Objective,
    cfg: &OracleConfig,
) -> Result<Solution> {
    let points: Vec<Time> = if instance.is_empty() {
        Vec::new()
    } else {
        (0..=instance.horizon_end()).collect()
    };
    solve_on_points(instance, objective, &points, cfg)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Best {
    total: Cost,
    times: Vec<Time>,
    starts: Vec<Time>,
    subsets: Vec<u64>,
}

#[derive(Clone, Debug)]
struct Residual {
    cost: Cost,
    starts: Vec<Time>,
}

struct Acc {
    cache: HashMap<Vec<Time>, Residual>,
    best: Option<Best>,
}

fn better(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

fn solve_on_points(
    instance: &Instance,
    objective: Objective,
    points: &[Time],
    cfg: &OracleConfig,
) -> Result<Solution> {
    let n = instance.len();
    if n > cfg.limits.max_jobs {
        return Err(Error::LimitExceeded(format!(
            "{n} jobs exceed the oracle cap of {}",
            cfg.limits.max_jobs
        )));
    }
    if n == 0 {
        return Ok(Solution::empty(objective));
    }
    let s = instance.s();
    let digit_bits = s as u32;
    let total = (points.len() as u32)
        .checked_mul(digit_bits)
        .filter(|&bits| bits < 63)
        .map(|bits| 1u64 << bits)
        .filter(|&c| c <= cfg.limits.max_grid_subsets)
        .ok_or_else(|| {
            Error::LimitExceeded(format!(
                "(2^{s})^{} replenishment structures exceed the cap of {}",
                points.len(),
                cfg.limits.max_grid_subsets
            ))
        })?;
    let mask = (1u64 << digit_bits) - 1;

    let jobs = instance.jobs();
    // first candidate index at or after each release
    let first_point: Vec<usize> = jobs
        .iter()
        .map(|j| points.partition_point(|&t| t < j.release))
        .collect();
    let order_costs: Vec<Cost> = (0..=mask)
        .map(|bits| instance.order_cost(ResourceSet::from_bits(bits)))
        .collect();
    let use_edd = cfg.edd_shortcut && s == 1 && objective == Objective::MaxFlow;

    let evaluate = |mut acc: Acc, code: u64| -> Acc {
        let digit = |k: usize| (code >> (digit_bits as usize * k)) & mask;
        let mut rep_cost = 0;
        for k in 0..points.len() {
            let d = digit(k);
            if d != 0 {
                rep_cost += order_costs[d as usize];
            }
        }
        let mut eff = Vec::with_capacity(n);
        for (j, job) in jobs.iter().enumerate() {
            let need = job.resources.bits();
            let mut have = 0u64;
            let mut found = None;
            for (k, &t) in points.iter().enumerate().skip(first_point[j]) {
                have |= digit(k);
                if need & !have == 0 {
                    found = Some(t);
                    break;
                }
            }
            match found {
                Some(t) => eff.push(t),
                None => return acc,
            }
        }
        let lower = jobs.iter().zip(&eff).fold(0, |a, (job, &r)| {
            objective.combine(a, objective.job_term(job, r + job.processing))
        });
        if let Some(best) = &acc.best {
            if rep_cost + lower > best.total {
                return acc;
            }
        }
        let residual = acc
            .cache
            .entry(eff)
            .or_insert_with_key(|eff| {
                if use_edd {
                    sequence_edd(instance, eff)
                } else {
                    sequence_exhaustive(instance, eff, objective)
                }
            })
            .clone();
        let mut times = Vec::new();
        let mut subsets = Vec::new();
        for (k, &t) in points.iter().enumerate() {
            let d = digit(k);
            if d != 0 {
                times.push(t);
                subsets.push(d);
            }
        }
        let candidate = Best {
            total: rep_cost + residual.cost,
            times,
            starts: residual.starts,
            subsets,
        };
        acc.best = better(acc.best.take(), Some(candidate));
        acc
    };

    let acc = fold_range(
        cfg.exec,
        total,
        || Acc {
            cache: HashMap::new(),
            best: None,
        },
        evaluate,
        |a, b| Acc {
            cache: a.cache,
            best: better(a.best, b.best),
        },
    );
    let best = acc
        .best
        .ok_or_else(|| Error::Infeasible("no replenishment structure serves every job".into()))?;

    let schedule = Schedule::from_pairs(jobs.iter().zip(&best.starts).map(|(j, &t)| (j.id, t)));
    let q = ReplenishmentStructure::new(
        best.times
            .iter()
            .zip(&best.subsets)
            .map(|(&time, &bits)| Replenishment {
                time,
                resources: ResourceSet::from_bits(bits),
            })
            .collect(),
    )?;
    let sol = Solution::evaluate(instance, objective, schedule, q)?;
    debug_assert_eq!(sol.total(), best.total);
    Ok(sol)
}

/// Effective-release order, ties by original release then position.
fn sequence_edd(instance: &Instance, eff: &[Time]) -> Residual {
    let jobs = instance.jobs();
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by_key(|&j| (eff[j], jobs[j].release, j));
    let mut starts = vec![0; jobs.len()];
    let mut t = Time::MIN;
    let mut cost = 0;
    for j in order {
        let start = t.max(eff[j]);
        starts[j] = start;
        t = start + jobs[j].processing;
        cost = cost.max(Objective::MaxFlow.job_term(&jobs[j], t));
    }
    Residual { cost, starts }
}

struct Search<'a> {
    instance: &'a Instance,
    eff: &'a [Time],
    objective: Objective,
    used: Vec<bool>,
    starts: Vec<Time>,
    best: Option<(Cost, Vec<Time>)>,
}

impl Search<'_> {
    fn bound_rest(&self, t: Time) -> Cost {
        let jobs = self.instance.jobs();
        (0..jobs.len()).filter(|&k| !self.used[k]).fold(0, |a, k| {
            let c = t.max(self.eff[k]) + jobs[k].processing;
            self.objective
                .combine(a, self.objective.job_term(&jobs[k], c))
        })
    }

    fn dfs(&mut self, t: Time, partial: Cost, depth: usize) {
        let jobs = self.instance.jobs();
        if depth == jobs.len() {
            let improves = match &self.best {
                None => true,
                Some((cost, starts)) => (partial, &self.starts) < (*cost, starts),
            };
            if improves {
                self.best = Some((partial, self.starts.clone()));
            }
            return;
        }
        for (j, job) in jobs.iter().enumerate() {
            if self.used[j] {
                continue;
            }
            let start = t.max(self.eff[j]);
            let end = start + job.processing;
            let next = self
                .objective
                .combine(partial, self.objective.job_term(job, end));
            self.used[j] = true;
            let bound = self.objective.combine(next, self.bound_rest(end));
            if self.best.as_ref().is_none_or(|(b, _)| bound <= *b) {
                self.starts[j] = start;
                self.dfs(end, next, depth + 1);
            }
            self.used[j] = false;
        }
    }
}

fn sequence_exhaustive(instance: &Instance, eff: &[Time], objective: Objective) -> Residual {
    let n = instance.len();
    let mut search = Search {
        instance,
        eff,
        objective,
        used: vec![false; n],
        starts: vec![0; n],
        best: None,
    };
    search.dfs(Time::MIN, 0, 0);
    let (cost, starts) = search.best.expect("some sequence exists");
    Residual { cost, starts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::check_feasible;
    use crate::model::Job;

    fn one() -> ResourceSet {
        ResourceSet::singleton(1)
    }

    fn example_one(k0: Cost, k1: Cost) -> Instance {
        Instance::new(
            1,
            k0,
            vec![k1],
            vec![
                Job::new(1, 0, 4, one()),
                Job::new(2, 3, 1, one()),
                Job::new(3, 7, 1, one()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn example_one_optimum() {
        let inst = example_one(4, 6);
        let sol = exact_solve(&inst, Objective::TotalCompletion, OracleLimits::default()).unwrap();
        // one order at 7 with the long job last beats ordering at 0 and 7 (41)
        assert_eq!(sol.total(), 40);
        assert_eq!(sol.replenishments().times(), vec![7]);
        assert_eq!(sol.scheduling_cost(), 30);
        assert_eq!(sol.schedule().start(1), Some(9));
        assert!(check_feasible(&inst, &sol).is_feasible());
        let two = Solution::evaluate(
            &inst,
            Objective::TotalCompletion,
            Schedule::from_pairs([(1, 0), (2, 7), (3, 8)]),
            ReplenishmentStructure::at_times(&[0, 7]).unwrap(),
        )
        .unwrap();
        assert_eq!(two.total(), 41);
        let fine =
            exact_solve_fine_grid(&inst, Objective::TotalCompletion, OracleLimits::default())
                .unwrap();
        assert_eq!(fine.total(), 40);
    }

    #[test]
    fn single_job_and_empty() {
        let inst = Instance::single_resource(5, vec![Job::new(1, 0, 1, one())]).unwrap();
        for solve in [exact_solve, exact_solve_fine_grid] {
            let sol = solve(&inst, Objective::TotalCompletion, OracleLimits::default()).unwrap();
            assert_eq!(sol.total(), 6);
        }
        let empty = Instance::single_resource(5, vec![]).unwrap();
        let sol = exact_solve(&empty, Objective::MaxFlow, OracleLimits::default()).unwrap();
        assert_eq!(sol.total(), 0);
        assert!(sol.schedule().is_empty() && sol.replenishments().is_empty());
    }

    #[test]
    fn limits_are_enforced() {
        let jobs = (0..9).map(|i| Job::new(i, i as Time, 1, one())).collect();
        let inst = Instance::single_resource(1, jobs).unwrap();
        assert!(matches!(
            exact_solve(&inst, Objective::TotalCompletion, OracleLimits::default()),
            Err(Error::LimitExceeded(_))
        ));
        let small = example_one(1, 1);
        let tight = OracleLimits {
            max_jobs: 8,
            max_grid_subsets: 4,
        };
        assert!(matches!(
            exact_solve(&small, Objective::TotalCompletion, tight),
            Err(Error::LimitExceeded(_))
        ));
    }

    #[test]
    fn edd_shortcut_matches_enumeration() {
        let inst = example_one(1, 1);
        let full = OracleConfig {
            edd_shortcut: false,
            ..OracleConfig::default()
        };
        let a = exact_solve_with(&inst, Objective::MaxFlow, &OracleConfig::default()).unwrap();
        let b = exact_solve_with(&inst, Objective::MaxFlow, &full).unwrap();
        assert_eq!(a.total(), b.total());
        assert_eq!(a.total(), 9);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let inst = example_one(2, 3);
        for obj in Objective::ALL {
            let seq = OracleConfig {
                exec: Exec::Sequential,
                ..OracleConfig::default()
            };
            let a = exact_solve_with(&inst, obj, &seq).unwrap();
            let b = exact_solve_with(&inst, obj, &OracleConfig::default()).unwrap();
            assert_eq!(a, b);
        }
    }
}
