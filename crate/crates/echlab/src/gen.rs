//! Seeded generators for orbit pools, towers and sample points.

use echlab_core::orbit::{CurveData, EndGroup, OrbitError, OrbitSet, SimpleOrbit, Tower};
use echlab_core::Rotation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Elliptic orbits with θ ∈ (0.2, 0.8) + {0, 0, 1} and actions in [1, 1.01).
pub fn scan_orbits(rng: &mut ChaCha8Rng, count: usize) -> Vec<SimpleOrbit> {
    (0..count)
        .map(|i| {
            let theta = rng.gen_range(0.2..0.8) + [0.0, 0.0, 1.0][rng.gen_range(0..3)];
            let action = 1.0 + rng.gen_range(0.0..0.01);
            SimpleOrbit::new(i as u32 + 1, action, Rotation::real(theta)).expect("irrational sample")
        })
        .collect()
}

/// Three elliptic orbits and one positive hyperbolic orbit.
pub fn tower_pool(rng: &mut ChaCha8Rng) -> Vec<SimpleOrbit> {
    let mut pool: Vec<SimpleOrbit> = (0..3)
        .map(|i| {
            let theta = rng.gen_range(0.05..2.95);
            SimpleOrbit::new(i + 1, 1.0 + rng.gen_range(0.0..1.0), Rotation::real(theta)).expect("sample")
        })
        .collect();
    pool.push(SimpleOrbit::new(4, 1.0 + rng.gen_range(0.0..1.0), Rotation::exact(1, 1)).expect("hyperbolic"));
    pool
}

fn random_set(rng: &mut ChaCha8Rng, pool: &[SimpleOrbit]) -> Vec<u32> {
    pool.iter().map(|o| if o.kind.is_hyperbolic() { rng.gen_range(0..2) } else { rng.gen_range(0..5) }).collect()
}

fn action(pool: &[SimpleOrbit], m: &[u32]) -> f64 {
    pool.iter().zip(m).map(|(o, &k)| o.action * k as f64).sum()
}

fn to_set(pool: &[SimpleOrbit], m: &[u32]) -> Result<OrbitSet, OrbitError> {
    OrbitSet::new(pool.iter().zip(m).filter(|(_, &k)| k > 0).map(|(o, &k)| (o.clone(), k)).collect())
}

fn random_ends(rng: &mut ChaCha8Rng, pool: &[SimpleOrbit], m: &[u32]) -> Vec<EndGroup> {
    let mut out = Vec::new();
    for (o, &k) in pool.iter().zip(m) {
        if k == 0 || rng.gen_bool(0.3) {
            continue;
        }
        let total = rng.gen_range(1..=k);
        let mut left = total;
        let mut mults = Vec::new();
        while left > 0 {
            let x = rng.gen_range(1..=left);
            mults.push(x);
            left -= x;
        }
        out.push(EndGroup { orbit: o.id, mults, c0_present: total < k });
    }
    out
}

/// A tower of n curves whose orbit sets have nondecreasing action.
pub fn random_tower(rng: &mut ChaCha8Rng, pool: &[SimpleOrbit], n: usize) -> Result<Tower, OrbitError> {
    let mut prev = random_set(rng, pool);
    let mut curves = Vec::with_capacity(n);
    for _ in 0..n {
        let mut next = None;
        for _ in 0..16 {
            let cand = random_set(rng, pool);
            if action(pool, &cand) >= action(pool, &prev) {
                next = Some(cand);
                break;
            }
        }
        let next = next.unwrap_or_else(|| {
            let mut m = prev.clone();
            let elliptic: Vec<usize> = (0..pool.len()).filter(|&i| !pool[i].kind.is_hyperbolic()).collect();
            m[elliptic[rng.gen_range(0..elliptic.len())]] += 1;
            m
        });
        let genus = rng.gen_range(0..3);
        let pos = random_ends(rng, pool, &next);
        let neg = random_ends(rng, pool, &prev);
        curves.push(CurveData::new(genus, pos, neg, 0, to_set(pool, &next)?, to_set(pool, &prev)?)?);
        prev = next;
    }
    Tower::new(curves)
}

/// Section points (radius fraction in [0, 1), angle in [0, 2π)).
pub fn section_points(rng: &mut ChaCha8Rng, count: usize) -> Vec<(f64, f64)> {
    (0..count).map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn towers_are_valid_and_seeded() {
        let mut r = rng(5);
        let pool = tower_pool(&mut r);
        let t = random_tower(&mut r, &pool, 200).unwrap();
        assert_eq!(t.len(), 200);
        let mut r2 = rng(5);
        let pool2 = tower_pool(&mut r2);
        assert_eq!(random_tower(&mut r2, &pool2, 200).unwrap(), t);
    }
}
