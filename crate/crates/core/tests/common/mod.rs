#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sre_core::gallery::{self, GalleryGame};
use sre_core::{AffineBlock, PopulationGame, PopulationSpec, StateVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random affine game with small integer payoff data, so ties and
/// per-block constant gradients occur with positive probability.
pub fn random_game(rng: &mut ChaCha8Rng, pops: usize, max_n: usize) -> PopulationGame {
    let sizes: Vec<usize> = (0..pops).map(|_| rng.gen_range(1..=max_n)).collect();
    let dim: usize = sizes.iter().sum();
    let labels = ["a", "b", "c", "d", "e", "f"];
    let populations = sizes
        .iter()
        .enumerate()
        .map(|(p, &n)| {
            let mass = [1.0, 1.0, 2.0, 0.5][rng.gen_range(0..4)];
            PopulationSpec::new(format!("p{p}"), mass, &labels[..n])
        })
        .collect();
    let payoffs = sizes
        .iter()
        .map(|&n| AffineBlock {
            rows: (0..n)
                .map(|_| (0..dim).map(|_| rng.gen_range(-2..=2) as f64).collect())
                .collect(),
            offsets: (0..n).map(|_| rng.gen_range(-2..=2) as f64).collect(),
        })
        .collect();
    PopulationGame::new(populations, payoffs).expect("valid random game")
}

/// Random state whose blocks are supported on random non-empty subsets.
pub fn random_state(rng: &mut ChaCha8Rng, game: &PopulationGame, boundary: bool) -> StateVector {
    let mut coords = Vec::with_capacity(game.dim());
    for p in 0..game.num_populations() {
        let n = game.num_strategies(p);
        let mut weights: Vec<f64> = (0..n)
            .map(|_| {
                if boundary && rng.gen_bool(0.4) {
                    0.0
                } else {
                    rng.gen_range(1..=6) as f64
                }
            })
            .collect();
        if weights.iter().all(|w| *w == 0.0) {
            weights[rng.gen_range(0..n)] = 1.0;
        }
        let total: f64 = weights.iter().sum();
        coords.extend(weights.iter().map(|w| game.mass(p) * w / total));
    }
    game.state(coords).expect("valid random state")
}

/// Random interior state.
pub fn random_interior(rng: &mut ChaCha8Rng, game: &PopulationGame) -> StateVector {
    random_state(rng, game, false)
}

/// Shifts the offsets so that every strategy in the support of `x`, plus
/// each off-support strategy with probability 1/2, earns the same payoff at
/// `x`, and the remaining strategies earn strictly less. The result has `x`
/// as a Nash state with zero gaps.
pub fn tie_at(rng: &mut ChaCha8Rng, game: &PopulationGame, x: &StateVector) -> PopulationGame {
    let payoffs = game.evaluate_payoffs(x).unwrap();
    let offsets = (0..game.num_populations())
        .map(|p| {
            let support = game.support(x, p);
            let block = &game.payoffs()[p];
            (0..game.num_strategies(p))
                .map(|i| {
                    let linear = payoffs[p][i] - block.offsets[i];
                    let drop = if support.contains(&i) || rng.gen_bool(0.5) {
                        0.0
                    } else {
                        rng.gen_range(1..=3) as f64
                    };
                    -linear - drop
                })
                .collect()
        })
        .collect();
    game.with_offsets(offsets).unwrap()
}

pub fn all_gallery() -> Vec<GalleryGame> {
    let mut out: Vec<GalleryGame> = gallery::NAMES
        .iter()
        .map(|n| gallery::by_name(n, &Default::default()).unwrap())
        .collect();
    for n in [2, 4] {
        out.push(gallery::coordination(n).unwrap());
    }
    for lambda in [1.0, 2.0, 4.0] {
        out.push(gallery::standards(&[3.0, 2.0, 0.0], lambda).unwrap());
    }
    out.push(gallery::binary_symmetric(-1.0, 2.0, 0.0, 1.0).unwrap());
    out.push(gallery::binary_symmetric(2.0, 2.0, 0.0, 0.0).unwrap());
    out
}

/// Gallery candidates: every named state plus every support-enumeration
/// candidate.
pub fn gallery_candidates() -> Vec<(String, PopulationGame, StateVector)> {
    let mut out = Vec::new();
    for g in all_gallery() {
        let mut states: Vec<StateVector> = g.states.iter().map(|(_, s)| s.clone()).collect();
        let nash = sre_core::nash::nash_support_enumeration(&g.game, 1e-7, 100_000).unwrap();
        for c in nash.candidates {
            if !states.iter().any(|s| s.distance_inf(&c.state) < 1e-9) {
                states.push(c.state);
            }
        }
        for s in states {
            out.push((g.name.clone(), g.game.clone(), s));
        }
    }
    out
}
