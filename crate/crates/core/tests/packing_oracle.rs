//! Independent search for the Euclidean planar packing at A = 1.
//!
//! Works on the integer lattice of pitch 1/32: the ball of radius 2 is
//! `i^2 + j^2 <= 4096` and separation 1/2 is `di^2 + dj^2 >= 256`, so every
//! check is exact. Simulated annealing on the overlap energy decides whether
//! `k` points fit. The frozen value below was established by this search;
//! it failed to place 63 points in every run tried.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ORACLE_L2_A1: usize = 62;

const R2: i64 = 64 * 64;
const SEP2: i64 = 16 * 16;

fn overlap(a: (i64, i64), b: (i64, i64)) -> i64 {
    let d2 = (a.0 - b.0).pow(2) + (a.1 - b.1).pow(2);
    (SEP2 - d2).max(0)
}

fn random_site(rng: &mut ChaCha8Rng) -> (i64, i64) {
    loop {
        let p = (rng.random_range(-64..=64), rng.random_range(-64..=64));
        if p.0 * p.0 + p.1 * p.1 <= R2 {
            return p;
        }
    }
}

/// A conflict-free placement of `k` lattice points, if annealing finds one.
fn anneal(k: usize, steps: usize, seed: u64) -> Option<Vec<(i64, i64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<(i64, i64)> = (0..k).map(|_| random_site(&mut rng)).collect();
    let energy_of = |pts: &[(i64, i64)], i: usize, at: (i64, i64)| -> i64 {
        pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &q)| overlap(at, q)).sum()
    };
    let mut energy: i64 = (0..k).map(|i| energy_of(&pts, i, pts[i])).sum::<i64>() / 2;
    let (t0, t1) = (40.0f64, 0.3f64);
    for step in 0..steps {
        if energy == 0 {
            return Some(pts);
        }
        let temp = t0 * (t1 / t0).powf(step as f64 / steps as f64);
        let i = rng.random_range(0..k);
        let cand = if rng.random_bool(0.9) {
            let c = (pts[i].0 + rng.random_range(-3..=3), pts[i].1 + rng.random_range(-3..=3));
            if c.0 * c.0 + c.1 * c.1 > R2 {
                continue;
            }
            c
        } else {
            random_site(&mut rng)
        };
        let delta = energy_of(&pts, i, cand) - energy_of(&pts, i, pts[i]);
        if delta <= 0 || rng.random::<f64>() < (-(delta as f64) / temp).exp() {
            pts[i] = cand;
            energy += delta;
        }
    }
    (energy == 0).then_some(pts)
}

fn valid(pts: &[(i64, i64)]) -> bool {
    pts.iter().all(|p| p.0 * p.0 + p.1 * p.1 <= R2)
        && pts.iter().enumerate().all(|(i, &a)| pts[..i].iter().all(|&b| overlap(a, b) == 0))
}

#[test]
fn lattice_search_reaches_the_frozen_value() {
    let found = (0..16u64).find_map(|s| anneal(ORACLE_L2_A1, 40_000_000, s));
    let pts = found.expect("annealing places the frozen number of points");
    assert!(valid(&pts));
}

#[test]
#[ignore = "tens of minutes; records that one more point was never placed"]
fn lattice_search_stops_at_the_frozen_value() {
    assert!((100..116u64).all(|s| anneal(ORACLE_L2_A1 + 1, 150_000_000, s).is_none()));
}

#[test]
fn lattice_search_small_instances() {
    let pts = (0..4u64).find_map(|s| anneal(40, 2_000_000, s)).expect("40 points fit easily");
    assert!(valid(&pts));
    assert_eq!(pts.len(), 40);
}
