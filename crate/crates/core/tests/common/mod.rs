#![allow(dead_code)]

use qbgame::{GameSpec, PayoffBlock, Scalar};
use rand::Rng;

pub fn random_strategy<R: Rng>(rng: &mut R) -> [f64; 4] {
    std::array::from_fn(|_| rng.random::<f64>())
}

fn block<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> PayoffBlock {
    let mut m =
        || std::array::from_fn(|_| std::array::from_fn(|_| Scalar::int(rng.random_range(lo..=hi))));
    PayoffBlock {
        alice: m(),
        bob: m(),
    }
}

/// Integer payoffs in `lo..=hi`, prior with strictly positive rational weights.
pub fn random_game<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> GameSpec {
    let w: [i64; 4] = std::array::from_fn(|_| rng.random_range(1..=9));
    let total: i64 = w.iter().sum();
    let mut g = GameSpec::with_blocks(std::array::from_fn(|_| {
        std::array::from_fn(|_| block(rng, lo, hi))
    }));
    g.prior = [
        [Scalar::ratio(w[0], total), Scalar::ratio(w[1], total)],
        [Scalar::ratio(w[2], total), Scalar::ratio(w[3], total)],
    ];
    g
}
