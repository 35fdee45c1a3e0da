#![allow(dead_code)]

use jrp_core::generate::{gen_instance, GeneratorSpec};
use jrp_core::{Cost, Instance, Time};

pub const K_VALUES: [Cost; 5] = [0, 1, 2, 5, 10];

/// Seeded instance drawn from a small class; `seed` also picks `n`, `s`
/// and `K` so that one loop covers the whole grid.
#[derive(Clone, Copy, Debug)]
pub struct Class {
    pub max_n: usize,
    pub max_s: usize,
    pub unit: bool,
    /// All jobs share one processing time drawn from `1..=5`.
    pub equal_p: bool,
    pub max_weight: Cost,
    pub distinct_releases: bool,
    pub max_release: Time,
    pub k_values: &'static [Cost],
}

impl Default for Class {
    fn default() -> Self {
        Class {
            max_n: 7,
            max_s: 2,
            unit: false,
            equal_p: false,
            max_weight: 1,
            distinct_releases: false,
            max_release: 8,
            k_values: &K_VALUES,
        }
    }
}

pub fn instance(class: Class, seed: u64) -> Instance {
    let n = 1 + (seed as usize) % class.max_n;
    let s = 1 + (seed as usize / class.max_n) % class.max_s;
    let k = class.k_values[(seed as usize / 3) % class.k_values.len()];
    let p = if class.unit {
        1
    } else {
        1 + ((seed / 5) % 5) as Time
    };
    let (min_p, max_p) = if class.unit || class.equal_p {
        (p, p)
    } else {
        (1, 5)
    };
    let spec = GeneratorSpec {
        seed: seed.wrapping_mul(0x9E37_79B9_7F4A_7C15),
        n,
        s,
        joint_cost: k,
        item_cost: (0, k.min(3)),
        max_release: class.max_release.max(n as Time),
        min_processing: min_p,
        max_processing: max_p,
        max_weight: class.max_weight,
        distinct_releases: class.distinct_releases,
        ..GeneratorSpec::default()
    };
    gen_instance(&spec).expect("valid generator spec")
}
