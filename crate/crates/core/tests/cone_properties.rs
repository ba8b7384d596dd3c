mod common;

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sre_core::cone::{normal_cone_contains, tangent_cone};
use sre_core::diagnostics::{psi, tangent_maximum, DiagnosticConfig};
use sre_core::lp::LpConfig;
use sre_core::{PopulationGame, StateVector};

use common::{all_gallery, random_game, random_interior, random_state, rng, tie_at};

/// Random ambient vector that is per-block constant on the support with
/// probability 1/2 and otherwise perturbed, so both polarity outcomes occur.
fn structured_vector(r: &mut ChaCha8Rng, g: &PopulationGame, x: &StateVector) -> Vec<f64> {
    let mut a = vec![0.0; g.dim()];
    for p in 0..g.num_populations() {
        let range = g.block_range(p);
        let support = g.support(x, p);
        let level = r.gen_range(-3..=3) as f64;
        for j in 0..range.len() {
            let on = support.contains(&j);
            a[range.start + j] = match (on, r.gen_bool(0.5)) {
                (true, true) => level,
                (false, true) => level - r.gen_range(0..=2) as f64,
                _ => r.gen_range(-3..=3) as f64,
            };
        }
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normal_cone_is_polar_of_tangent_cone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_game(&mut r, 2, 4);
        let x = random_state(&mut r, &g, true);
        let a = structured_vector(&mut r, &g, &x);
        let member = normal_cone_contains(&g, &x, &a, 1e-9).unwrap().contains;
        let max = tangent_maximum(&g, &x, &a, &LpConfig::default()).unwrap();
        prop_assert_eq!(member, max.value <= 1e-8, "value {}", max.value);
    }

    #[test]
    fn block_constants_change_neither_membership_nor_psi(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_game(&mut r, 2, 3);
        let x = random_state(&mut r, &g, true);
        let g = tie_at(&mut r, &g, &x);
        let cfg = DiagnosticConfig::default();
        for dev in g.deviations() {
            let a = g.gap_gradient(&x, dev).unwrap();
            let mut shifted = a.clone();
            for p in 0..g.num_populations() {
                let c = r.gen_range(-5.0..5.0);
                for k in g.block_range(p) {
                    shifted[k] += c;
                }
            }
            let m0 = normal_cone_contains(&g, &x, &a, 1e-9).unwrap().contains;
            let m1 = normal_cone_contains(&g, &x, &shifted, 1e-9).unwrap().contains;
            prop_assert_eq!(m0, m1);
            let v0 = psi(&g, &x, dev, &cfg).unwrap().value;
            let v1 = tangent_maximum(&g, &x, &shifted, &cfg.lp).unwrap().value;
            prop_assert!((v0 - v1).abs() <= 1e-8, "{} vs {}", v0, v1);
        }
    }

    #[test]
    fn small_steps_along_relative_interior_stay_interior(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_game(&mut r, 2, 4);
        let x = random_state(&mut r, &g, true);
        let cone = tangent_cone(&g, &x);
        // Random d in ri(T): strictly positive at inactive coordinates,
        // block sums zero.
        let mut d = vec![0.0; g.dim()];
        for p in 0..g.num_populations() {
            let range = g.block_range(p);
            for k in range.clone() {
                d[k] = if cone.inactive().any(|j| j == k) {
                    r.gen_range(0.1..1.0)
                } else {
                    r.gen_range(-1.0..1.0)
                };
            }
            let support = g.support(&x, p);
            let sum: f64 = d[range.clone()].iter().sum();
            let share = sum / support.len() as f64;
            for j in support {
                d[range.start + j] -= share;
            }
        }
        prop_assert!(cone.in_relative_interior(&d).unwrap());
        let m_min = (0..g.num_populations()).map(|p| g.mass(p)).fold(f64::INFINITY, f64::min);
        let t = 1e-6 * m_min;
        let y: Vec<f64> = x.coords().iter().zip(&d).map(|(a, b)| a + t * b).collect();
        let y = g.state(y).unwrap();
        prop_assert!(g.is_interior(&y));
    }
}

#[test]
fn interior_states_give_relative_interior_directions() {
    let mut r = rng(5);
    for g in all_gallery() {
        for (_, x) in &g.states {
            let cone = tangent_cone(&g.game, x);
            for _ in 0..20 {
                let y = random_interior(&mut r, &g.game);
                let d: Vec<f64> = y.coords().iter().zip(x.coords()).map(|(a, b)| a - b).collect();
                assert!(cone.in_relative_interior(&d).unwrap(), "{}", g.name);
            }
        }
    }
}
