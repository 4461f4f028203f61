//! Seeded random instances. Every module draws from its own ChaCha stream
//! derived from one 64-bit seed, so adding draws in one suite leaves the
//! others unchanged.

use num_complex::Complex64;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bohr_bourgain::{intersect, BourgainSystem};
use crate::fourier::GFunction;
use crate::group::{make_group, Group};
use crate::sets::GSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Fourier = 1,
    Bohr = 2,
    Bourgain = 3,
    Local = 4,
    Spectrum = 5,
    Freiman = 6,
    Increment = 7,
    Scan = 8,
}

/// The generator for `stream` under `seed`.
pub fn stream(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// The generator for instance `index` of `stream`, independent of how many
/// draws earlier instances made.
pub fn instance(seed: u64, s: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = stream(seed, s);
    rng.set_word_pos(u128::from(index) << 40);
    rng
}

/// A cyclic group or a small product, of order between 2 and `max`.
pub fn random_group(rng: &mut impl Rng, max: usize) -> Group {
    let max = max.max(2) as u64;
    loop {
        let shape: Vec<u64> = match rng.random_range(0..4) {
            0 | 1 => vec![rng.random_range(2..=max)],
            2 => {
                let a = rng.random_range(2..=max.min(64));
                let b = rng.random_range(2..=(max / a).max(2));
                vec![a, b]
            }
            _ => {
                let p = *[2u64, 3, 5, 7].choose(rng).unwrap();
                let mut k = 1;
                while p.pow(k + 1) <= max && k < 10 && rng.random_bool(0.7) {
                    k += 1;
                }
                vec![p; k as usize]
            }
        };
        if shape.iter().product::<u64>() <= max {
            if let Ok(g) = make_group(&shape) {
                return g;
            }
        }
    }
}

/// A cyclic group of odd order in `[lo, hi]`.
pub fn random_odd_cyclic(rng: &mut impl Rng, lo: u64, hi: u64) -> Group {
    let n = rng.random_range(lo..=hi) | 1;
    make_group(&[n]).expect("order within budget")
}

/// Values with real and imaginary parts uniform in `[−1, 1]`.
pub fn random_function(rng: &mut impl Rng, g: &Group) -> GFunction {
    let values = (0..g.cardinality())
        .map(|_| Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
        .collect();
    GFunction::from_values(g, values).expect("length matches")
}

/// Each element kept independently with probability `p`.
pub fn random_set(rng: &mut impl Rng, g: &Group, p: f64) -> GSet {
    GSet::from_predicate(g, |_| rng.random_bool(p))
}

/// A nonempty random subset.
pub fn random_nonempty_set(rng: &mut impl Rng, g: &Group, p: f64) -> GSet {
    let mut a = random_set(rng, g, p);
    if a.is_empty() {
        a.insert(rng.random_range(0..g.cardinality()));
    }
    a
}

/// A Bohr system with `1..=max_freqs` frequencies and radius in `[0.05, 0.5]`.
pub fn random_bohr(rng: &mut impl Rng, g: &Group, max_freqs: usize) -> BourgainSystem {
    let k = rng.random_range(1..=max_freqs);
    let freqs: Vec<usize> = (0..k)
        .map(|_| rng.random_range(0..g.cardinality()))
        .collect();
    let delta = rng.random_range(0.05..=0.5);
    BourgainSystem::bohr(g, &freqs, delta).expect("valid Bohr parameters")
}

/// A Bohr system, or a dilate, double, or pairwise intersection of Bohr systems.
pub fn random_system(rng: &mut impl Rng, g: &Group) -> BourgainSystem {
    let base = random_bohr(rng, g, 2);
    match rng.random_range(0..4) {
        0 => base,
        1 => base
            .dilate(rng.random_range(0.25..=1.0))
            .expect("factor in range"),
        2 => base.double(),
        _ => intersect(&[base, random_bohr(rng, g, 2)]).expect("same group"),
    }
}

/// A regular dilate of [`random_system`].
pub fn random_regular(rng: &mut impl Rng, g: &Group) -> BourgainSystem {
    let s = random_system(rng, g);
    s.regular_dilate()
        .map(|(_, r)| r)
        .expect("regular dilate exists")
}
