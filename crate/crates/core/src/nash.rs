//! Nash candidate generation by support enumeration.
//!
//! For each support profile (one non-empty strategy subset per population),
//! the state is pinned down by the square linear system
//!
//! * block masses on the support,
//! * zero off the support,
//! * equal payoffs across the support of each population.
//!
//! Solutions that are feasible and Nash are kept. A rank-deficient system
//! describes a continuum; its minimum-norm solution is kept as a single
//! flagged representative, so this is a candidate generator rather than a
//! complete description of the Nash set.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{PopulationGame, StateVector, FEASIBILITY_TOL};

pub const DEFAULT_PROFILE_CAP: u64 = 100_000;

/// Candidates closer than this (sup norm) are merged.
pub const DUPLICATE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NashError {
    #[error("{profiles} support profiles exceed the cap of {cap}")]
    CapExceeded { profiles: f64, cap: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentKind {
    Isolated,
    ContinuumRepresentative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashCandidate {
    pub state: StateVector,
    pub kind: ComponentKind,
    /// Support profile that produced the candidate, as strategy indices.
    pub support: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashEnumeration {
    pub candidates: Vec<NashCandidate>,
    pub profiles_examined: u64,
    /// Profiles whose system could not be solved, with the reason.
    pub failures: Vec<(Vec<Vec<usize>>, String)>,
}

pub fn support_profile_count(game: &PopulationGame) -> f64 {
    (0..game.num_populations())
        .map(|p| 2f64.powi(game.num_strategies(p) as i32) - 1.0)
        .product()
}

pub fn nash_support_enumeration(
    game: &PopulationGame,
    zero_tol: f64,
    cap: u64,
) -> Result<NashEnumeration, NashError> {
    let profiles = support_profile_count(game);
    if profiles > cap as f64 {
        return Err(NashError::CapExceeded { profiles, cap });
    }
    let pops = game.num_populations();
    let limits: Vec<u64> = (0..pops)
        .map(|p| (1u64 << game.num_strategies(p)) - 1)
        .collect();
    // Mixed-radix counter over per-population masks 1..=limit.
    let mut masks = vec![1u64; pops];
    let mut out = NashEnumeration {
        candidates: Vec::new(),
        profiles_examined: 0,
        failures: Vec::new(),
    };
    loop {
        out.profiles_examined += 1;
        let support: Vec<Vec<usize>> = masks
            .iter()
            .enumerate()
            .map(|(p, m)| {
                (0..game.num_strategies(p))
                    .filter(|j| m & (1 << j) != 0)
                    .collect()
            })
            .collect();
        match solve_profile(game, &support) {
            Ok(Some((coords, kind))) => {
                if let Ok(state) = game.state(coords) {
                    let nash = game.is_nash(&state, zero_tol).map(|c| c.is_nash);
                    let duplicate = out
                        .candidates
                        .iter()
                        .any(|c| c.state.distance_inf(&state) < DUPLICATE_TOL);
                    if nash == Ok(true) && !duplicate {
                        out.candidates.push(NashCandidate {
                            state,
                            kind,
                            support,
                        });
                    }
                }
            }
            Ok(None) => {}
            Err(reason) => out.failures.push((support, reason)),
        }

        let mut p = 0;
        loop {
            if p == pops {
                return Ok(out);
            }
            if masks[p] < limits[p] {
                masks[p] += 1;
                break;
            }
            masks[p] = 1;
            p += 1;
        }
    }
}

/// Solves the support system; `None` when it is inconsistent or infeasible.
fn solve_profile(
    game: &PopulationGame,
    support: &[Vec<usize>],
) -> Result<Option<(Vec<f64>, ComponentKind)>, String> {
    let n = game.dim();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut rhs: Vec<f64> = Vec::with_capacity(n);
    for (p, sup) in support.iter().enumerate() {
        let range = game.block_range(p);
        let mut mass_row = vec![0.0; n];
        for &j in sup {
            mass_row[range.start + j] = 1.0;
        }
        rows.push(mass_row);
        rhs.push(game.mass(p));
        for j in (0..range.len()).filter(|j| !sup.contains(j)) {
            let mut row = vec![0.0; n];
            row[range.start + j] = 1.0;
            rows.push(row);
            rhs.push(0.0);
        }
        let block = &game.payoffs()[p];
        let anchor = sup[0];
        for &j in &sup[1..] {
            let row = block.rows[j]
                .iter()
                .zip(&block.rows[anchor])
                .map(|(a, b)| a - b)
                .collect();
            rows.push(row);
            rhs.push(block.offsets[anchor] - block.offsets[j]);
        }
    }
    let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let b = DVector::from_vec(rhs);
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = 1e-10 * smax.max(1.0);
    let rank = svd.rank(eps);
    let x = svd.solve(&b, eps).map_err(|e| e.to_string())?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err("non-finite solution".into());
    }
    let residual = (&m * &x - &b).amax();
    let scale = 1.0 + b.amax() + m.amax() * x.amax();
    if residual > 1e-9 * scale {
        return Ok(None);
    }
    if x.iter().any(|v| *v < -FEASIBILITY_TOL) {
        return Ok(None);
    }
    let kind = if rank < n {
        ComponentKind::ContinuumRepresentative
    } else {
        ComponentKind::Isolated
    };
    Ok(Some((x.iter().copied().collect(), kind)))
}
