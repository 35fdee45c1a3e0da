use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use jrp_core::bounds::ceiling_bound;
use jrp_core::dp::dp_fmax_s1;
use jrp_core::exec::{map_ordered, Exec};
use jrp_core::generate::{gen_instance, GeneratorSpec};
use jrp_core::online::{run_online, SimConfig};
use jrp_core::oracle::{exact_solve, OracleLimits};
use jrp_core::{Cost, Instance, Objective, Solution};

use crate::{read_instance, recost, PolicyArg};

#[derive(Args, Debug)]
pub(crate) struct RatioArgs {
    #[arg(long, value_enum)]
    policy: PolicyArg,
    /// Single instance to evaluate. Without it a sweep is run.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Order cost(s). Single mode re-costs the instance; sweeps accept a
    /// comma-separated list.
    #[arg(long = "K", value_delimiter = ',')]
    k: Vec<Cost>,
    #[arg(long)]
    lead_one: bool,
    /// Sweep family.
    #[arg(long, value_enum, default_value = "random")]
    family: SweepFamily,
    /// Job counts: comma-separated values or inclusive ranges `a-b`.
    #[arg(long, default_value = "6")]
    n: String,
    /// First seed of a random sweep.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seeds per (n, K) pair in a random sweep.
    #[arg(long, default_value_t = 10)]
    count: u64,
    /// Emit CSV rows instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Evaluate sweep rows on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SweepFamily {
    /// Unit jobs with random releases in `[0, 2n]`, one resource.
    Random,
    /// `r_j = j`; seeds are irrelevant.
    Regular,
}

#[derive(Clone, Copy, Debug, Serialize)]
struct Row {
    seed: u64,
    n: usize,
    #[serde(rename = "K")]
    k: Cost,
    online: Cost,
    offline: Cost,
    ratio: f64,
}

fn parse_counts(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.parse()?, b.parse()?);
                if a > b {
                    bail!("empty range {part}");
                }
                out.extend(a..=b);
            }
            None => out.push(
                part.parse()
                    .with_context(|| format!("bad job count {part:?}"))?,
            ),
        }
    }
    if out.is_empty() {
        bail!("no job counts given");
    }
    Ok(out)
}

fn offline(inst: &Instance, objective: Objective) -> Result<Solution> {
    Ok(match objective {
        Objective::MaxFlow => dp_fmax_s1(inst)?,
        _ => exact_solve(inst, objective, OracleLimits::default())?,
    })
}

pub(crate) fn run(args: RatioArgs) -> Result<()> {
    match &args.input {
        Some(path) => single(&args, path.clone()),
        None => sweep(&args),
    }
}

fn single(args: &RatioArgs, path: PathBuf) -> Result<()> {
    let mut inst = read_instance(&path)?;
    if args.k.len() > 1 {
        bail!("a single instance takes one --K");
    }
    if let Some(&k) = args.k.first() {
        inst = recost(&inst, k)?;
    }
    if args.lead_one {
        inst = inst.shifted_releases(1)?;
    }
    let k = inst.single_order_cost();
    let mut policy = args.policy.build(k);
    let run = run_online(&inst, policy.as_mut(), &SimConfig::default())?;
    let best = offline(&inst, run.solution.objective())?;
    let doc = json!({
        "policy": policy.name(),
        "K": k,
        "online": run.solution.to_doc(),
        "offline": best.to_doc(),
        "ratio": run.solution.total() as f64 / best.total() as f64,
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}

fn sweep(args: &RatioArgs) -> Result<()> {
    if args.k.is_empty() {
        bail!("a sweep needs --K");
    }
    let counts = parse_counts(&args.n)?;
    let seeds: Vec<u64> = match args.family {
        SweepFamily::Random => (args.seed..args.seed + args.count).collect(),
        SweepFamily::Regular => vec![0],
    };
    let mut cells = Vec::new();
    for &k in &args.k {
        for &n in &counts {
            for &seed in &seeds {
                cells.push((seed, n, k));
            }
        }
    }
    let exec = if args.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    let policy = args.policy;
    let family = args.family;
    let rows = map_ordered(exec, &cells, |&(seed, n, k)| -> Result<Row> {
        let spec = match family {
            SweepFamily::Regular => GeneratorSpec::regular(n, k),
            SweepFamily::Random => GeneratorSpec {
                joint_cost: k,
                max_release: 2 * n as i64,
                ..GeneratorSpec::random(seed, n, 1)
            },
        };
        let inst = gen_instance(&spec)?;
        let run = run_online(&inst, policy.build(k).as_mut(), &SimConfig::default())?;
        let objective = run.solution.objective();
        let best = if family == SweepFamily::Regular && objective == Objective::MaxFlow {
            ceiling_bound(n as i64, k)
        } else {
            offline(&inst, objective)?.total()
        };
        let online = run.solution.total();
        Ok(Row {
            seed,
            n,
            k,
            online,
            offline: best,
            ratio: online as f64 / best as f64,
        })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    if args.csv {
        let mut w = csv::Writer::from_writer(std::io::stdout());
        for row in &rows {
            w.serialize(row)?;
        }
        w.flush()?;
    } else {
        println!("{}", serde_json::to_string_pretty(&rows)?);
    }
    Ok(())
}
