//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Fairness, Instance, Job};

#[derive(Clone, Debug, PartialEq)]
pub struct GenOptions {
    pub n: usize,
    pub m: usize,
    pub max_p: u64,
    /// Due dates are drawn from `p..=max(max_d, p)`.
    pub max_d: u64,
    /// Uniform requirement; drawn from `0..=m` when `None`.
    pub k: Option<usize>,
    pub unit_p: bool,
    pub day_independent_p: bool,
    pub day_independent_d: bool,
    /// Due dates non-decreasing along a random client order on every day.
    pub agreeable: bool,
    /// Probability that a job is absent.
    pub absent: f64,
    pub machines: usize,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            n: 4,
            m: 3,
            max_p: 4,
            max_d: 8,
            k: None,
            unit_p: false,
            day_independent_p: false,
            day_independent_d: false,
            agreeable: false,
            absent: 0.0,
            machines: 1,
        }
    }
}

pub fn random_instance(opts: &GenOptions, rng: &mut impl Rng) -> Instance {
    let (n, m) = (opts.n, opts.m);
    let max_p = if opts.unit_p { 1 } else { opts.max_p.max(1) };
    let max_d = opts.max_d.max(max_p);

    let fixed_p: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=max_p)).collect();
    let fixed_d: Vec<u64> = (0..n).map(|_| rng.gen_range(max_p..=max_d)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let p: Vec<u64> = if opts.day_independent_p {
            fixed_p.clone()
        } else {
            (0..n).map(|_| rng.gen_range(1..=max_p)).collect()
        };
        let d: Vec<u64> = if opts.day_independent_d {
            fixed_d.clone()
        } else if opts.agreeable {
            let mut dues: Vec<u64> = (0..n).map(|_| rng.gen_range(max_p..=max_d)).collect();
            dues.sort_unstable();
            let mut d = vec![0; n];
            for (pos, &c) in order.iter().enumerate() {
                d[c] = dues[pos];
            }
            d
        } else {
            (0..n).map(|c| rng.gen_range(p[c]..=max_d)).collect()
        };
        let row: Vec<Option<Job>> = (0..n)
            .map(|c| {
                let absent = opts.absent > 0.0 && rng.gen_bool(opts.absent.min(1.0));
                (!absent).then(|| Job::pd(p[c], d[c]))
            })
            .collect();
        rows.push(row);
    }
    let k = opts.k.unwrap_or_else(|| rng.gen_range(0..=m));
    Instance::new(n, m, rows, Fairness::Uniform(k), opts.machines.max(1)).expect("generated instance is valid")
}

pub fn random_instance_seeded(opts: &GenOptions, seed: u64) -> Instance {
    random_instance(opts, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::classify;

    #[test]
    fn seeded_is_deterministic() {
        let o = GenOptions::default();
        assert_eq!(random_instance_seeded(&o, 7), random_instance_seeded(&o, 7));
    }

    #[test]
    fn class_flags_hold() {
        for seed in 0..50 {
            let unit = random_instance_seeded(&GenOptions { unit_p: true, ..Default::default() }, seed);
            assert!(classify(&unit).unit_processing);
            let did = random_instance_seeded(&GenOptions { day_independent_d: true, ..Default::default() }, seed);
            assert!(classify(&did).day_independent_d);
            let both = GenOptions {
                day_independent_d: true,
                day_independent_p: true,
                ..Default::default()
            };
            let c = classify(&random_instance_seeded(&both, seed));
            assert!(c.day_independent_d && c.day_independent_p);
            let agr = random_instance_seeded(&GenOptions { agreeable: true, ..Default::default() }, seed);
            assert!(classify(&agr).agreeable);
        }
    }
}
