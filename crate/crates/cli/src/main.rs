//! `jrp`: generate instances, solve them offline, simulate online
//! policies, play adversaries and compare against offline optima.
//!
//! Documents go to stdout as JSON (traces as JSON lines); diagnostics go
//! to stderr. Exit status is 0 on success, 1 when solving or validation
//! fails and 2 on usage errors.

mod ratio;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use jrp_core::bounds::{lb_ceiling, lb_sqrt, ratio_curve};
use jrp_core::dp::{dp_equalp, dp_fmax_s1, dp_wjcj_unit, fmax_unit_distinct};
use jrp_core::eval::check_schedule;
use jrp_core::generate::{gen_instance, Family, GeneratorSpec};
use jrp_core::online::{
    adversary_run, run_online, AdversaryKind, AdversarySpec, Policy, SimConfig,
};
use jrp_core::online::{MaxFlowPolicy, SumCjPolicy, SumFjPolicy};
use jrp_core::oracle::{exact_solve, exact_solve_fine_grid, OracleLimits};
use jrp_core::{parse_instance, Cost, Instance, Objective, Solution, SolutionDoc};

#[derive(Parser, Debug)]
#[command(
    name = "jrp",
    version,
    about = "Single-machine scheduling with joint replenishment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an instance document.
    Gen(GenArgs),
    /// Solve an instance offline.
    Solve(SolveArgs),
    /// Run an online policy on an instance and emit its decision trace.
    Online(OnlineArgs),
    /// Play an online policy against an adaptive adversary.
    Adversary(AdversaryArgs),
    /// Lower bounds for an instance and/or a lower-bound ratio curve.
    Bounds(BoundsArgs),
    /// Online total against the offline optimum, for one instance or a sweep.
    Ratio(ratio::RatioArgs),
    /// Check a solution against an instance.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "random")]
    family: FamilyArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// Joint order cost K_0.
    #[arg(long, default_value_t = 1)]
    k0: Cost,
    #[arg(long, default_value_t = 0)]
    item_cost_min: Cost,
    #[arg(long, default_value_t = 0)]
    item_cost_max: Cost,
    #[arg(long, default_value_t = 10)]
    max_release: i64,
    #[arg(long, default_value_t = 1)]
    min_p: i64,
    #[arg(long, default_value_t = 1)]
    max_p: i64,
    #[arg(long, default_value_t = 1)]
    max_weight: Cost,
    /// Tight sub-family: single-job or example-1.
    #[arg(long)]
    tight: Option<String>,
    #[arg(long)]
    distinct_releases: bool,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Random,
    Regular,
    Tight,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Random => Family::Random,
            FamilyArg::Regular => Family::Regular,
            FamilyArg::Tight => Family::Tight,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Oracle,
    DpWjcjUnit,
    DpEqualp,
    DpFmaxS1,
    FmaxUnitDistinct,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    /// Defaults to the algorithm's native objective.
    #[arg(long)]
    objective: Option<Objective>,
    /// Oracle only: allow orders at every integer time, not just releases.
    #[arg(long)]
    fine_grid: bool,
    /// Oracle only: refuse instances with more jobs.
    #[arg(long, default_value_t = OracleLimits::default().max_jobs)]
    max_jobs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum PolicyArg {
    SumCj,
    SumFj,
    MaxFlow,
}

impl PolicyArg {
    pub(crate) fn build(self, k: Cost) -> Box<dyn Policy + Send> {
        match self {
            PolicyArg::SumCj => Box::new(SumCjPolicy::new(k)),
            PolicyArg::SumFj => Box::new(SumFjPolicy::new(k)),
            PolicyArg::MaxFlow => Box::new(MaxFlowPolicy::new(k)),
        }
    }
}

#[derive(Args, Debug)]
struct OnlineArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    policy: PolicyArg,
    /// Order cost; re-costs the instance to K_0 = K, K_1 = 0. Defaults to
    /// the instance's K_0 + K_1.
    #[arg(long = "K")]
    k: Option<Cost>,
    /// Shift every release by one (orders then only serve earlier arrivals).
    #[arg(long)]
    lead_one: bool,
    /// Do not signal the end of the arrival stream.
    #[arg(long)]
    no_end_signal: bool,
    /// Also write the realized solution document here.
    #[arg(long)]
    solution_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AdversaryArgs {
    #[arg(long)]
    kind: AdversaryKind,
    #[arg(long = "K")]
    k: Cost,
    /// Weight of the second job (weighted_golden only).
    #[arg(long)]
    w2: Option<Cost>,
    /// Defaults to the policy the adversary was designed against.
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    /// Instance for lb_ceiling and lb_sqrt.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Adversary kind whose ratio curve to evaluate.
    #[arg(long)]
    kind: Option<AdversaryKind>,
    #[arg(long = "K")]
    k: Option<Cost>,
    #[arg(long)]
    w2: Option<f64>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    solution: PathBuf,
}

/// Failure that maps to exit status 1 after its report was printed.
#[derive(Debug)]
struct Rejected;

impl std::fmt::Display for Rejected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("solution rejected")
    }
}

impl std::error::Error for Rejected {}

pub(crate) fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn gen(args: GenArgs) -> Result<()> {
    let spec = GeneratorSpec {
        family: args.family.into(),
        seed: args.seed,
        n: args.n,
        s: args.s,
        joint_cost: args.k0,
        item_cost: (args.item_cost_min, args.item_cost_max),
        max_release: args.max_release,
        min_processing: args.min_p,
        max_processing: args.max_p,
        max_weight: args.max_weight,
        tight: args.tight,
        distinct_releases: args.distinct_releases,
    };
    eprintln!("seed: {}", spec.seed);
    let inst = gen_instance(&spec)?;
    emit(args.out.as_deref(), &inst.to_json())
}

fn solve(args: SolveArgs) -> Result<()> {
    let inst = read_instance(&args.input)?;
    let native = match args.algo {
        Algo::Oracle | Algo::DpEqualp => Objective::TotalCompletion,
        Algo::DpWjcjUnit => Objective::TotalWeightedCompletion,
        Algo::DpFmaxS1 | Algo::FmaxUnitDistinct => Objective::MaxFlow,
    };
    let objective = args.objective.unwrap_or(native);
    if args.fine_grid && args.algo != Algo::Oracle {
        bail!("--fine-grid only applies to the oracle");
    }
    let fixed = |expected: Objective| -> Result<()> {
        if objective != expected {
            bail!("{:?} only optimizes {expected}", args.algo);
        }
        Ok(())
    };
    let sol = match args.algo {
        Algo::Oracle => {
            let limits = OracleLimits {
                max_jobs: args.max_jobs,
                ..OracleLimits::default()
            };
            if args.fine_grid {
                exact_solve_fine_grid(&inst, objective, limits)?
            } else {
                exact_solve(&inst, objective, limits)?
            }
        }
        Algo::DpWjcjUnit => {
            fixed(Objective::TotalWeightedCompletion)?;
            dp_wjcj_unit(&inst)?
        }
        Algo::DpEqualp => dp_equalp(&inst, objective)?,
        Algo::DpFmaxS1 => {
            fixed(Objective::MaxFlow)?;
            dp_fmax_s1(&inst)?
        }
        Algo::FmaxUnitDistinct => {
            fixed(Objective::MaxFlow)?;
            fmax_unit_distinct(&inst)?
        }
    };
    eprintln!("total: {}", sol.total());
    emit(None, &sol.to_json())
}

/// Replaces the order costs with `K_0 = k`, `K_1 = 0`.
pub(crate) fn recost(inst: &Instance, k: Cost) -> Result<Instance> {
    if inst.s() != 1 {
        bail!("--K needs a single-resource instance, got s = {}", inst.s());
    }
    Ok(Instance::new(1, k, vec![0], inst.jobs().to_vec())?)
}

fn online(args: OnlineArgs) -> Result<()> {
    let mut inst = read_instance(&args.input)?;
    if let Some(k) = args.k {
        inst = recost(&inst, k)?;
    }
    if args.lead_one {
        inst = inst.shifted_releases(1)?;
    }
    let k = args.k.unwrap_or_else(|| inst.single_order_cost());
    let mut policy = args.policy.build(k);
    let cfg = SimConfig {
        end_signal: !args.no_end_signal,
        ..SimConfig::default()
    };
    let run = run_online(&inst, policy.as_mut(), &cfg)?;
    if let Some(path) = &args.solution_out {
        emit(Some(path), &run.solution.to_json())?;
    }
    eprintln!("total: {}", run.solution.total());
    print!("{}", run.trace.to_jsonl());
    Ok(())
}

fn adversary(args: AdversaryArgs) -> Result<()> {
    let spec = AdversarySpec {
        kind: args.kind,
        k: args.k,
        w2: args.w2,
    };
    let policy = args.policy.unwrap_or(match args.kind {
        AdversaryKind::SumFj32 => PolicyArg::SumFj,
        AdversaryKind::FmaxRegular43 => PolicyArg::MaxFlow,
        _ => PolicyArg::SumCj,
    });
    let report = adversary_run(spec, policy.build(args.k).as_mut())?;
    let curve = ratio_curve(args.kind, args.k, args.w2.map(|w| w as f64)).ok();
    let doc = json!({
        "kind": args.kind,
        "K": args.k,
        "w2": args.w2,
        "policy": report.policy,
        "instance": report.instance.to_doc(),
        "online": report.online.to_doc(),
        "offline": report.offline.to_doc(),
        "ratio": report.ratio,
        "curve": curve,
    });
    emit(None, &serde_json::to_string_pretty(&doc)?)
}

fn bounds(args: BoundsArgs) -> Result<()> {
    if args.input.is_none() && args.kind.is_none() {
        bail!("give --input, --kind, or both");
    }
    let mut doc = serde_json::Map::new();
    if let Some(path) = &args.input {
        let inst = read_instance(path)?;
        doc.insert("lb_ceiling".into(), json!(lb_ceiling(&inst)?));
        doc.insert("lb_sqrt".into(), json!(lb_sqrt(&inst)?));
    }
    if let Some(kind) = args.kind {
        let k = args.k.context("--kind needs --K")?;
        doc.insert(
            "curve".into(),
            serde_json::to_value(ratio_curve(kind, k, args.w2)?)?,
        );
    }
    emit(None, &serde_json::to_string_pretty(&doc)?)
}

fn validate(args: ValidateArgs) -> Result<()> {
    let inst = read_instance(&args.input)?;
    let text = fs::read_to_string(&args.solution)
        .with_context(|| format!("reading {}", args.solution.display()))?;
    let doc = SolutionDoc::parse(&text)?;
    let (schedule, q) = doc.parts(inst.s())?;
    let report = check_schedule(&inst, &schedule, &q);
    let mut out = json!({
        "feasible": report.is_feasible(),
        "violations": report.violations,
    });
    let mut ok = report.is_feasible();
    if ok {
        let sol = Solution::evaluate(&inst, doc.objective, schedule, q)?;
        let matches = sol.scheduling_cost() == doc.scheduling_cost
            && sol.replenishment_cost() == doc.replenishment_cost
            && sol.total() == doc.total;
        out["costs_match"] = json!(matches);
        out["recomputed"] = json!({
            "scheduling_cost": sol.scheduling_cost(),
            "replenishment_cost": sol.replenishment_cost(),
            "total": sol.total(),
        });
        ok = matches;
    }
    emit(None, &serde_json::to_string_pretty(&out)?)?;
    if ok {
        Ok(())
    } else {
        Err(Rejected.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Online(a) => online(a),
        Command::Adversary(a) => adversary(a),
        Command::Bounds(a) => bounds(a),
        Command::Ratio(a) => ratio::run(a),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Rejected>() => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
