//! Seeded instance generation.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Cost, Instance, Job, JobId, ResourceSet, Time, MAX_RESOURCES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Independent uniform draws within the spec's ranges.
    Random,
    /// `n` unit jobs with `r_j = j`, one resource.
    Regular,
    /// Hand-built instances on which the online policies are tight.
    Tight,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Family::Random),
            "regular" => Ok(Family::Regular),
            "tight" => Ok(Family::Tight),
            other => Err(Error::Malformed(format!("unknown family `{other}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Random => "random",
            Family::Regular => "regular",
            Family::Tight => "tight",
        })
    }
}

pub const TIGHT_FAMILIES: [&str; 2] = ["single-job", "example-1"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub seed: u64,
    pub n: usize,
    pub s: usize,
    /// `K_0`.
    pub joint_cost: Cost,
    /// Inclusive range for each `K_i`.
    pub item_cost: (Cost, Cost),
    pub max_release: Time,
    pub min_processing: Time,
    pub max_processing: Time,
    pub max_weight: Cost,
    /// Sub-family for [`Family::Tight`].
    pub tight: Option<String>,
    /// Draw pairwise distinct release dates (random family only).
    pub distinct_releases: bool,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            family: Family::Random,
            seed: 0,
            n: 5,
            s: 1,
            joint_cost: 1,
            item_cost: (0, 0),
            max_release: 10,
            min_processing: 1,
            max_processing: 1,
            max_weight: 1,
            tight: None,
            distinct_releases: false,
        }
    }
}

impl GeneratorSpec {
    pub fn random(seed: u64, n: usize, s: usize) -> Self {
        GeneratorSpec {
            seed,
            n,
            s,
            ..GeneratorSpec::default()
        }
    }

    pub fn regular(n: usize, k: Cost) -> Self {
        GeneratorSpec {
            family: Family::Regular,
            n,
            joint_cost: k,
            ..GeneratorSpec::default()
        }
    }

    pub fn tight(name: &str, k: Cost) -> Self {
        GeneratorSpec {
            family: Family::Tight,
            joint_cost: k,
            tight: Some(name.to_string()),
            ..GeneratorSpec::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Malformed(msg));
        if self.joint_cost < 0 {
            return bad(format!("joint cost {} is negative", self.joint_cost));
        }
        if self.item_cost.0 < 0 || self.item_cost.0 > self.item_cost.1 {
            return bad(format!("invalid item cost range {:?}", self.item_cost));
        }
        if self.family != Family::Random {
            return Ok(());
        }
        if self.s == 0 || self.s > MAX_RESOURCES {
            return bad(format!("s = {} outside 1..={MAX_RESOURCES}", self.s));
        }
        if self.max_release < 0 {
            return bad(format!("max release {} is negative", self.max_release));
        }
        if self.min_processing < 1 || self.min_processing > self.max_processing {
            return bad(format!(
                "invalid processing range [{}, {}]",
                self.min_processing, self.max_processing
            ));
        }
        if self.max_weight < 1 {
            return bad(format!("max weight {} is below 1", self.max_weight));
        }
        if self.distinct_releases && (self.max_release as u128 + 1) < self.n as u128 {
            return bad(format!(
                "{} distinct releases do not fit in [0, {}]",
                self.n, self.max_release
            ));
        }
        Ok(())
    }
}

/// Builds the instance described by `spec`. The same spec always yields
/// the same instance.
pub fn gen_instance(spec: &GeneratorSpec) -> Result<Instance> {
    spec.validate()?;
    match spec.family {
        Family::Regular => {
            let jobs = (1..=spec.n)
                .map(|j| Job::new(j as JobId, j as Time, 1, ResourceSet::singleton(1)))
                .collect();
            Instance::new(1, spec.joint_cost, vec![spec.item_cost.0], jobs)
        }
        Family::Tight => match spec.tight.as_deref() {
            Some("single-job") => Instance::new(
                1,
                spec.joint_cost,
                vec![spec.item_cost.0],
                vec![Job::new(1, 0, 1, ResourceSet::singleton(1))],
            ),
            Some("example-1") => {
                let one = ResourceSet::singleton(1);
                Instance::new(
                    1,
                    spec.joint_cost,
                    vec![spec.item_cost.0],
                    vec![
                        Job::new(1, 0, 4, one),
                        Job::new(2, 3, 1, one),
                        Job::new(3, 7, 1, one),
                    ],
                )
            }
            Some(other) => Err(Error::Malformed(format!(
                "unknown tight family `{other}`, expected one of {TIGHT_FAMILIES:?}"
            ))),
            None => Err(Error::Malformed(
                "tight family requires a sub-family name".into(),
            )),
        },
        Family::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let item_costs = (0..spec.s)
                .map(|_| rng.gen_range(spec.item_cost.0..=spec.item_cost.1))
                .collect();
            let releases: Vec<Time> = if spec.distinct_releases {
                let mut r: Vec<Time> = sample(&mut rng, spec.max_release as usize + 1, spec.n)
                    .into_iter()
                    .map(|x| x as Time)
                    .collect();
                r.sort_unstable();
                r
            } else {
                (0..spec.n)
                    .map(|_| rng.gen_range(0..=spec.max_release))
                    .collect()
            };
            let subsets = if spec.s >= 64 {
                u64::MAX
            } else {
                (1u64 << spec.s) - 1
            };
            let jobs = releases
                .into_iter()
                .enumerate()
                .map(|(k, release)| {
                    let processing = rng.gen_range(spec.min_processing..=spec.max_processing);
                    let weight = rng.gen_range(1..=spec.max_weight);
                    let resources = ResourceSet::from_bits(rng.gen_range(1..=subsets));
                    Job::new(k as JobId + 1, release, processing, resources).with_weight(weight)
                })
                .collect();
            Instance::new(spec.s, spec.joint_cost, item_costs, jobs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_family() {
        let inst = gen_instance(&GeneratorSpec::regular(6, 1)).unwrap();
        let r: Vec<Time> = inst.jobs().iter().map(|j| j.release).collect();
        assert_eq!(r, vec![1, 2, 3, 4, 5, 6]);
        assert!(inst.all_unit());
        assert_eq!(inst.s(), 1);
    }

    #[test]
    fn tight_single_job() {
        let inst = gen_instance(&GeneratorSpec::tight("single-job", 5)).unwrap();
        assert_eq!(inst.len(), 1);
        assert_eq!((inst.jobs()[0].release, inst.jobs()[0].processing), (0, 1));
        assert_eq!(inst.single_order_cost(), 5);
        assert!(gen_instance(&GeneratorSpec::tight("nope", 5)).is_err());
    }

    #[test]
    fn random_is_deterministic() {
        let spec = GeneratorSpec {
            max_processing: 5,
            max_weight: 4,
            item_cost: (0, 3),
            ..GeneratorSpec::random(42, 7, 2)
        };
        let a = gen_instance(&spec).unwrap().to_json();
        let b = gen_instance(&spec).unwrap().to_json();
        assert_eq!(a, b);
        let other = gen_instance(&GeneratorSpec { seed: 43, ..spec })
            .unwrap()
            .to_json();
        assert_ne!(a, other);
    }

    #[test]
    fn distinct_releases_and_invalid_ranges() {
        let spec = GeneratorSpec {
            distinct_releases: true,
            max_release: 9,
            ..GeneratorSpec::random(1, 10, 1)
        };
        let inst = gen_instance(&spec).unwrap();
        assert_eq!(inst.release_grid().len(), 10);
        assert!(gen_instance(&GeneratorSpec {
            n: 11,
            ..spec.clone()
        })
        .is_err());
        assert!(gen_instance(&GeneratorSpec {
            min_processing: 0,
            ..spec.clone()
        })
        .is_err());
        assert!(gen_instance(&GeneratorSpec {
            item_cost: (3, 1),
            ..spec
        })
        .is_err());
    }
}
