//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::f64::consts::SQRT_2;
use std::time::{Duration, Instant};

use common::{instance, Class};
use jrp_core::bounds::{ceiling_bound, golden_ratio, lb_ceiling, lb_sqrt, ratio_curve};
use jrp_core::dp::{dp_equalp, dp_fmax_s1, dp_wjcj_unit, fmax_unit_distinct};
use jrp_core::eval::{check_feasible, scheduling_cost};
use jrp_core::exec::{map_ordered, Exec};
use jrp_core::generate::{gen_instance, GeneratorSpec};
use jrp_core::online::adversary::{adversary_run, AdversaryKind, AdversarySpec};
use jrp_core::online::policies::{MaxFlowPolicy, SumCjPolicy, SumFjPolicy};
use jrp_core::online::trace::{check_certificates, CertificateKind};
use jrp_core::online::{run_online, OnlineRun, Policy, SimConfig};
use jrp_core::oracle::{exact_solve, exact_solve_fine_grid, OracleLimits};
use jrp_core::{
    Cost, Instance, Job, Objective, ReplenishmentStructure, ResourceSet, Schedule, Solution, Time,
};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:.2?}, limit {limit:?}")
    })
}

fn example_one(k0: Cost, k1: Cost) -> Instance {
    let one = ResourceSet::singleton(1);
    Instance::new(
        1,
        k0,
        vec![k1],
        vec![
            Job::new(1, 0, 4, one),
            Job::new(2, 3, 1, one),
            Job::new(3, 7, 1, one),
        ],
    )
    .unwrap()
}

fn example_regression() -> Outcome {
    let clock = Instant::now();
    let inst = example_one(4, 6);
    let cost = |starts: [Time; 3]| {
        let sched = Schedule::from_pairs([(1, starts[0]), (2, starts[1]), (3, starts[2])]);
        scheduling_cost(&inst, &sched, Objective::TotalCompletion).map_err(|e| e.to_string())
    };
    let (a, b) = (cost([0, 4, 7])?, cost([3, 7, 8])?);
    ensure((a, b) == (17, 24), || {
        format!("scheduling costs {a}/{b}, want 17/24")
    })?;

    let opt = exact_solve(&inst, Objective::TotalCompletion, OracleLimits::default())
        .map_err(|e| e.to_string())?;
    ensure(check_feasible(&inst, &opt).is_feasible(), || {
        "oracle solution infeasible".into()
    })?;
    // The two-event witness {0, 7} is feasible but not optimal.
    let witness = Solution::evaluate(
        &inst,
        Objective::TotalCompletion,
        Schedule::from_pairs([(1, 0), (2, 7), (3, 8)]),
        ReplenishmentStructure::at_times(&[0, 7]).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    ensure(check_feasible(&inst, &witness).is_feasible(), || {
        "witness infeasible".into()
    })?;
    ensure(witness.total() == 41, || {
        format!("witness {{0,7}} costs {}", witness.total())
    })?;
    // Hand count of the single order at 7: completions 8 + 9 + 13 plus one order.
    let by_hand = 8 + 9 + 13 + 10;
    ensure(opt.total() == by_hand, || {
        format!(
            "oracle optimum {}, hand-checked optimum {by_hand}",
            opt.total()
        )
    })?;
    within(clock.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "costs 17/24; optimum {} with events {:?} (the stated 41 at {{0,7}} is feasible but beaten); {:.1?}",
        opt.total(),
        opt.replenishments().times(),
        clock.elapsed()
    ))
}

fn fine_grid_cross_check() -> Outcome {
    let seeds: Vec<u64> = (0..50).collect();
    let limits = OracleLimits {
        max_jobs: 8,
        max_grid_subsets: 1 << 22,
    };
    let results = map_ordered(Exec::default(), &seeds, |&seed| -> Result<bool, String> {
        let n = 1 + seed as usize % 4;
        let s = 1 + (seed as usize / 4) % 2;
        let spec = GeneratorSpec {
            seed: 7_000 + seed,
            n,
            s,
            joint_cost: (seed % 4) as Cost * 2,
            item_cost: (0, 2),
            max_release: 4,
            min_processing: 1,
            max_processing: if s == 1 { 2 } else { 1 },
            max_weight: 3,
            ..GeneratorSpec::default()
        };
        let inst = gen_instance(&spec).map_err(|e| e.to_string())?;
        let objective = Objective::ALL[seed as usize % Objective::ALL.len()];
        let grid =
            exact_solve(&inst, objective, limits).map_err(|e| format!("seed {seed}: {e}"))?;
        let fine = exact_solve_fine_grid(&inst, objective, limits)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        Ok(grid.total() == fine.total())
    });
    let mut bad = Vec::new();
    for (seed, r) in seeds.iter().zip(results) {
        if !r? {
            bad.push(*seed);
        }
    }
    ensure(bad.is_empty(), || {
        format!("grid and fine grid differ on seeds {bad:?}")
    })?;
    Ok("50/50 instances (n <= 4, all objectives) agree".into())
}

type Solver = fn(&Instance) -> jrp_core::Result<Solution>;

fn dp_equivalence() -> Outcome {
    const SEEDS: u64 = 210;
    let clock = Instant::now();
    let base = Class::default();
    let suites: [(&str, Class, Objective, Solver); 5] = [
        (
            "dp_wjcj_unit",
            Class {
                unit: true,
                max_weight: 4,
                ..base
            },
            Objective::TotalWeightedCompletion,
            dp_wjcj_unit,
        ),
        (
            "dp_equalp/sum_cj",
            Class {
                equal_p: true,
                ..base
            },
            Objective::TotalCompletion,
            |i| dp_equalp(i, Objective::TotalCompletion),
        ),
        (
            "dp_equalp/f_max",
            Class {
                equal_p: true,
                ..base
            },
            Objective::MaxFlow,
            |i| dp_equalp(i, Objective::MaxFlow),
        ),
        (
            "dp_fmax_s1",
            Class { max_s: 1, ..base },
            Objective::MaxFlow,
            dp_fmax_s1,
        ),
        (
            "fmax_unit_distinct",
            Class {
                max_s: 1,
                unit: true,
                distinct_releases: true,
                ..base
            },
            Objective::MaxFlow,
            fmax_unit_distinct,
        ),
    ];
    let seeds: Vec<u64> = (0..SEEDS).collect();
    let mut summary = Vec::new();
    for (name, class, objective, solver) in suites {
        let results = map_ordered(Exec::default(), &seeds, |&seed| -> Result<(), String> {
            let inst = instance(class, seed);
            let got = solver(&inst).map_err(|e| format!("{name} seed {seed}: {e}"))?;
            ensure(check_feasible(&inst, &got).is_feasible(), || {
                format!("{name} seed {seed}: infeasible")
            })?;
            let want = exact_solve(&inst, objective, OracleLimits::default())
                .map_err(|e| format!("{name} seed {seed}: {e}"))?;
            ensure(got.total() == want.total(), || {
                format!(
                    "{name} seed {seed}: {} vs oracle {}",
                    got.total(),
                    want.total()
                )
            })
        });
        results.into_iter().collect::<Result<Vec<()>, String>>()?;
        summary.push(name);
    }
    within(clock.elapsed(), Duration::from_secs(300))?;
    Ok(format!(
        "{} suites x {SEEDS} seeds match the oracle ({}); {:.1?}",
        summary.len(),
        summary.join(", "),
        clock.elapsed()
    ))
}

fn run(inst: &Instance, policy: &mut dyn Policy) -> Result<OnlineRun, String> {
    run_online(inst, policy, &SimConfig::default()).map_err(|e| e.to_string())
}

/// Online instances pay a positive order cost; at `K = 0` every arrival
/// is served at once and the trigger certificates read `0 < 0`.
fn unit_class() -> Class {
    Class {
        max_n: 8,
        max_s: 1,
        unit: true,
        k_values: &[1, 2, 5, 10],
        ..Class::default()
    }
}

const SUM_SEEDS: u64 = 200;

/// Online runs of both sum policies on the unit single-resource class.
fn sum_policy_runs() -> Result<Vec<(Instance, OnlineRun, OnlineRun)>, String> {
    let seeds: Vec<u64> = (0..SUM_SEEDS).collect();
    map_ordered(Exec::default(), &seeds, |&seed| {
        let inst = instance(unit_class(), seed);
        let k = inst.single_order_cost();
        let cj = run(&inst, &mut SumCjPolicy::new(k))?;
        let fj = run(&inst, &mut SumFjPolicy::new(k))?;
        Ok((inst, cj, fj))
    })
    .into_iter()
    .collect()
}

fn two_competitive(runs: &[(Instance, OnlineRun, OnlineRun)]) -> Outcome {
    let checked = map_ordered(
        Exec::default(),
        runs,
        |(inst, cj, fj)| -> Result<f64, String> {
            let mut worst: f64 = 0.0;
            for (online, objective) in
                [(cj, Objective::TotalCompletion), (fj, Objective::TotalFlow)]
            {
                let opt = exact_solve(inst, objective, OracleLimits::default())
                    .map_err(|e| e.to_string())?
                    .total();
                let got = online.solution.total();
                ensure(got <= 2 * opt, || {
                    format!(
                        "{}: online {got} > 2 x {opt} on {}",
                        objective.name(),
                        inst.to_json()
                    )
                })?;
                if opt > 0 {
                    worst = worst.max(got as f64 / opt as f64);
                }
            }
            Ok(worst)
        },
    );
    let worst = checked
        .into_iter()
        .try_fold(0f64, |acc, r| r.map(|w| acc.max(w)))?;

    let mut tight = Vec::new();
    let mut previous = 0.0;
    for k in [10, 100, 1000] {
        let inst =
            gen_instance(&GeneratorSpec::tight("single-job", k)).map_err(|e| e.to_string())?;
        let online = run(&inst, &mut SumCjPolicy::new(k))?.solution.total();
        let opt = exact_solve(&inst, Objective::TotalCompletion, OracleLimits::default())
            .map_err(|e| e.to_string())?
            .total();
        let ratio = online as f64 / opt as f64;
        let want = 2.0 * k as f64 / (k as f64 + 1.0);
        ensure((ratio - want).abs() <= 1e-9, || {
            format!("K={k}: ratio {ratio}, want {want}")
        })?;
        ensure(ratio > previous, || {
            format!("K={k}: ratio {ratio} did not increase")
        })?;
        previous = ratio;
        tight.push(format!("{ratio:.6}"));
    }
    Ok(format!(
        "{} instances x 2 policies within 2 x OPT (worst {worst:.4}); single-job ratios {}",
        runs.len(),
        tight.join(", ")
    ))
}

const REGULAR_K: [Cost; 4] = [1, 2, 5, 10];
const REGULAR_N: usize = 2000;

fn regular_cells() -> Vec<(Cost, usize)> {
    REGULAR_K
        .iter()
        .flat_map(|&k| (1..=REGULAR_N).map(move |n| (k, n)))
        .collect()
}

fn regular(k: Cost, n: usize) -> Result<Instance, String> {
    gen_instance(&GeneratorSpec::regular(n, k)).map_err(|e| e.to_string())
}

fn sqrt2_regular() -> Outcome {
    let clock = Instant::now();
    let cells = regular_cells();
    let results = map_ordered(Exec::default(), &cells, |&(k, n)| -> Result<f64, String> {
        let inst = regular(k, n)?;
        let online = run(&inst, &mut MaxFlowPolicy::new(k))?.solution.total();
        let lb = ceiling_bound(n as Time, k);
        let cap = SQRT_2 * lb as f64 + 1.0;
        ensure(online as f64 <= cap, || {
            format!("K={k} n={n}: online {online} > {cap:.3}")
        })?;
        Ok(online as f64 / lb as f64)
    });
    let worst = results
        .into_iter()
        .try_fold(0f64, |acc, r| r.map(|w| acc.max(w)))?;

    let n = MaxFlowPolicy::grid_point(1, 50) as usize;
    ensure(n == 1275, || format!("t_50 = {n}, want 1275"))?;
    let inst = regular(1, n)?;
    let online = run(&inst, &mut MaxFlowPolicy::new(1))?.solution.total();
    let lb = ceiling_bound(n as Time, 1);
    let lb_direct = lb_ceiling(&inst).map_err(|e| e.to_string())?;
    let opt = dp_fmax_s1(&inst).map_err(|e| e.to_string())?.total();
    ensure((online, lb, lb_direct, opt) == (100, 72, 72, 72), || {
        format!("n=1275: online {online}, bound {lb}/{lb_direct}, dp {opt}; want 100 and 72")
    })?;
    within(clock.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "{} runs within sqrt2 x bound + 1 (worst online/bound {worst:.4}); n=1275 K=1: online 100, offline 72, ratio {:.4}; {:.1?}",
        cells.len(),
        online as f64 / opt as f64,
        clock.elapsed()
    ))
}

fn lower_bounds() -> Outcome {
    let seeds: Vec<u64> = (0..100).collect();
    let class = Class {
        max_s: 1,
        ..Class::default()
    };
    let results = map_ordered(Exec::default(), &seeds, |&seed| -> Result<(), String> {
        let inst = instance(class, seed);
        let ceil = lb_ceiling(&inst).map_err(|e| e.to_string())?;
        let sqrt = lb_sqrt(&inst).map_err(|e| e.to_string())?;
        let opt = exact_solve(&inst, Objective::MaxFlow, OracleLimits::default())
            .map_err(|e| e.to_string())?
            .total();
        ensure(ceil <= opt, || {
            format!("seed {seed}: lb_ceiling {ceil} > optimum {opt}")
        })?;
        ensure(sqrt <= ceil as f64 + 1e-9, || {
            format!("seed {seed}: lb_sqrt {sqrt} > lb_ceiling {ceil}")
        })
    });
    results.into_iter().collect::<Result<Vec<()>, String>>()?;
    Ok("100 instances: lb_sqrt <= lb_ceiling <= F_max optimum".into())
}

fn adversaries() -> Outcome {
    let report = adversary_run(
        AdversarySpec::new(AdversaryKind::SumCj32, 100),
        &mut SumCjPolicy::new(100),
    )
    .map_err(|e| e.to_string())?;
    let (online, offline) = (report.online.total(), report.offline.total());
    let oracle = exact_solve(
        &report.instance,
        Objective::TotalCompletion,
        OracleLimits::default(),
    )
    .map_err(|e| e.to_string())?
    .total();
    ensure((online, offline, oracle) == (401, 302, 302), || {
        format!("sum_cj_3_2 K=100: online {online}, offline {offline}, oracle {oracle}")
    })?;
    let want = 401.0 / 302.0;
    ensure((report.ratio - want).abs() <= 1e-9, || {
        format!("ratio {}, want {want}", report.ratio)
    })?;

    let phi = golden_ratio();
    let mut previous = 0.0;
    let mut last = 0.0;
    for k in [10, 100, 1_000, 10_000, 100_000] {
        let bound = ratio_curve(AdversaryKind::FmaxGeneralGolden, k, None)
            .map_err(|e| e.to_string())?
            .bound;
        ensure(bound >= previous, || {
            format!("golden curve drops at K={k}: {bound} < {previous}")
        })?;
        previous = bound;
        last = bound;
    }
    ensure((last - phi).abs() <= 0.01, || {
        format!("golden curve at K=1e5 is {last}, phi = {phi}")
    })?;
    Ok(format!(
        "sum_cj_3_2 K=100: 401/302 = {:.9}; golden curve at K=1e5 = {last:.6} (phi {phi:.6}), non-decreasing in K",
        report.ratio
    ))
}

fn certificates(runs: &[(Instance, OnlineRun, OnlineRun)]) -> Outcome {
    fn verify(inst: &Instance, run: &OnlineRun, kind: CertificateKind) -> Result<usize, String> {
        let checks = check_certificates(inst, &run.solution, kind).map_err(|e| e.to_string())?;
        if let Some(bad) = checks.iter().find(|c| !c.holds()) {
            return Err(format!(
                "{kind:?} certificate fails at {bad:?} on {}",
                inst.to_json()
            ));
        }
        Ok(checks.len())
    }
    let mut total = 0;
    for (inst, cj, fj) in runs {
        total += verify(inst, cj, CertificateKind::SumCj)?;
        total += verify(inst, fj, CertificateKind::SumFj)?;
    }
    let cells = regular_cells();
    let regular_counts = map_ordered(
        Exec::default(),
        &cells,
        |&(k, n)| -> Result<usize, String> {
            let inst = regular(k, n)?;
            let cj = run(&inst, &mut SumCjPolicy::new(k))?;
            let fj = run(&inst, &mut SumFjPolicy::new(k))?;
            Ok(verify(&inst, &cj, CertificateKind::SumCj)?
                + verify(&inst, &fj, CertificateKind::SumFj)?)
        },
    );
    for count in regular_counts {
        total += count?;
    }
    Ok(format!(
        "{total} certificate checks hold over {} random and {} regular instance pairs",
        runs.len(),
        cells.len()
    ))
}

fn main() {
    let runs = sum_policy_runs();
    let criteria: Vec<Criterion> = vec![
        ("example regression", Box::new(example_regression)),
        ("oracle grid vs fine grid", Box::new(fine_grid_cross_check)),
        ("dp/oracle equivalence", Box::new(dp_equivalence)),
        (
            "2-competitive sum policies",
            Box::new(|| two_competitive(runs.as_ref()?)),
        ),
        ("sqrt2 max-flow on regular input", Box::new(sqrt2_regular)),
        ("lower-bound soundness", Box::new(lower_bounds)),
        ("adversary realization", Box::new(adversaries)),
        (
            "trace certificates",
            Box::new(|| certificates(runs.as_ref()?)),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
