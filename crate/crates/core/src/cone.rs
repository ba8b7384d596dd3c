//! Tangent and normal cones of the product simplex.
//!
//! At a state `x`, the tangent cone is the product over populations of
//! `{d_q : sum_j d_qj = 0, d_qj >= 0 where x_qj = 0}`. Its relative interior
//! makes the sign constraints strict. The normal cone is the product of
//! `{z_q : z_qj = a_q on supp(x_q), z_qj <= a_q off it}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{PopulationGame, StateVector};

/// Threshold for strict positivity at inactive coordinates. Matches
/// [`crate::game::SUPPORT_TOL`].
pub const STRICTNESS_TOL: f64 = 1e-9;

/// Tolerance on the zero-sum equalities when testing a direction.
pub const EQUALITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConeError {
    #[error("direction has {got} coordinates, cone expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("direction block {population} sums to {sum}, not zero")]
    NotZeroSum { population: usize, sum: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeBlock {
    /// Ambient index range of the population block.
    pub start: usize,
    pub len: usize,
    /// Ambient indices `j` with `x_j = 0`, carrying `d_j >= 0`.
    pub inactive: Vec<usize>,
}

/// H-representation of `T_x X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentConeRep {
    pub dim: usize,
    pub blocks: Vec<ConeBlock>,
}

impl TangentConeRep {
    pub fn inactive(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().flat_map(|b| b.inactive.iter().copied())
    }

    pub fn num_sign_constraints(&self) -> usize {
        self.blocks.iter().map(|b| b.inactive.len()).sum()
    }

    fn check_equalities(&self, d: &[f64], tol: f64) -> Result<(), ConeError> {
        if d.len() != self.dim {
            return Err(ConeError::DimensionMismatch {
                expected: self.dim,
                got: d.len(),
            });
        }
        for (q, block) in self.blocks.iter().enumerate() {
            let sum: f64 = d[block.start..block.start + block.len].iter().sum();
            if sum.abs() > tol {
                return Err(ConeError::NotZeroSum {
                    population: q,
                    sum,
                });
            }
        }
        Ok(())
    }

    /// Whether `d` lies in `T_x X`, with tolerance `tol` on every constraint.
    pub fn contains(&self, d: &[f64], tol: f64) -> bool {
        self.check_equalities(d, tol).is_ok() && self.inactive().all(|j| d[j] >= -tol)
    }

    /// Whether `d` lies in `ri(T_x X)`.
    ///
    /// Blocks with no inactive coordinate impose nothing beyond the equality,
    /// so a single-strategy population (tangent block `{0}`) accepts `d_q = 0`.
    pub fn in_relative_interior(&self, d: &[f64]) -> Result<bool, ConeError> {
        self.check_equalities(d, EQUALITY_TOL)?;
        Ok(self.inactive().all(|j| d[j] > STRICTNESS_TOL))
    }
}

pub fn tangent_cone(game: &PopulationGame, x: &StateVector) -> TangentConeRep {
    let blocks = (0..game.num_populations())
        .map(|q| {
            let range = game.block_range(q);
            let support = game.support(x, q);
            let inactive = (0..range.len())
                .filter(|j| !support.contains(j))
                .map(|j| range.start + j)
                .collect();
            ConeBlock {
                start: range.start,
                len: range.len(),
                inactive,
            }
        })
        .collect();
    TangentConeRep {
        dim: game.dim(),
        blocks,
    }
}

/// A relative-interior direction of `T_x X`: the barycenter minus `x`.
pub fn interior_direction(game: &PopulationGame, x: &StateVector) -> Vec<f64> {
    game.barycenter()
        .coords()
        .iter()
        .zip(x.coords())
        .map(|(w, v)| w - v)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalConeCheck {
    pub contains: bool,
    /// Per population, the common value of `a` on the support.
    pub levels: Vec<f64>,
}

/// Per-block constancy test for `a in N_X(x)`.
pub fn normal_cone_contains(
    game: &PopulationGame,
    x: &StateVector,
    a: &[f64],
    tol: f64,
) -> Result<NormalConeCheck, ConeError> {
    if a.len() != game.dim() {
        return Err(ConeError::DimensionMismatch {
            expected: game.dim(),
            got: a.len(),
        });
    }
    let mut contains = true;
    let mut levels = Vec::with_capacity(game.num_populations());
    for q in 0..game.num_populations() {
        let block = &a[game.block_range(q)];
        let support = game.support(x, q);
        let (lo, hi) = support
            .iter()
            .map(|&j| block[j])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        let level = if support.len() == 1 { hi } else { 0.5 * (lo + hi) };
        if hi - lo > tol {
            contains = false;
        }
        let off_ok = (0..block.len())
            .filter(|j| !support.contains(j))
            .all(|j| block[j] <= level + tol);
        if !off_ok {
            contains = false;
        }
        levels.push(level);
    }
    Ok(NormalConeCheck { contains, levels })
}
