//! Algebraic screens that follow from the support-equality restriction:
//! payoff identity on the simplex, the full-support test, row-additivity for
//! one-population matrix games, and the generic binary sign diagram.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Deviation, GameError, PopulationGame, StateVector};

/// Tolerance of the exact algebraic identity tests.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub holds: bool,
    /// Per population block, the constant value of `A_{p,i.} - A_{p,j.}`
    /// (the block mean when the block is not constant).
    pub block_constants: Vec<f64>,
    /// Largest spread of the row difference within one block.
    pub max_spread: f64,
    /// `sum_q lambda_q m_q + (b_{p,i} - b_{p,j})`.
    pub balance_residual: f64,
}

/// Whether `F_{p,i} = F_{p,j}` on all of `X`.
///
/// The difference of the two affine payoffs vanishes on the product simplex
/// iff its linear part is constant on each population block and the
/// constants, weighted by masses, cancel the offset difference.
pub fn payoff_identity(
    game: &PopulationGame,
    p: usize,
    i: usize,
    j: usize,
) -> Result<IdentityCheck, GameError> {
    game.check_deviation(Deviation::new(p, i))?;
    game.check_deviation(Deviation::new(p, j))?;
    let block = &game.payoffs()[p];
    let diff: Vec<f64> = block.rows[i]
        .iter()
        .zip(&block.rows[j])
        .map(|(a, b)| a - b)
        .collect();
    let mut block_constants = Vec::with_capacity(game.num_populations());
    let mut max_spread: f64 = 0.0;
    let mut balance = block.offsets[i] - block.offsets[j];
    for q in 0..game.num_populations() {
        let part = &diff[game.block_range(q)];
        let lo = part.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = part.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mean = part.iter().sum::<f64>() / part.len() as f64;
        max_spread = max_spread.max(hi - lo);
        balance += mean * game.mass(q);
        block_constants.push(mean);
    }
    Ok(IdentityCheck {
        holds: max_spread <= IDENTITY_TOL && balance.abs() <= IDENTITY_TOL,
        block_constants,
        max_spread,
        balance_residual: balance,
    })
}

/// Support pairs `(p, i, j)`, `i < j`, that are not payoff-identical. A
/// non-empty result rules out SRE at a mixed `x`.
pub fn support_equality_audit(
    game: &PopulationGame,
    x: &StateVector,
) -> Result<Vec<(usize, usize, usize)>, GameError> {
    let mut failures = Vec::new();
    for p in 0..game.num_populations() {
        let support = game.support(x, p);
        for (k, &i) in support.iter().enumerate() {
            for &j in &support[k + 1..] {
                if !payoff_identity(game, p, i, j)?.holds {
                    failures.push((p, i, j));
                }
            }
        }
    }
    Ok(failures)
}

/// Whether some full-support state could be SRE: every pair of strategies in
/// every population must be payoff-identical on `X`.
pub fn full_support_sre_possible(game: &PopulationGame) -> bool {
    (0..game.num_populations()).all(|p| {
        let n = game.num_strategies(p);
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                payoff_identity(game, p, i, j)
                    .map(|c| c.holds)
                    .unwrap_or(false)
            })
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowAdditivity {
    pub holds: bool,
    /// `A_ij ~ u_i + r_j` with `u_1 = 0`.
    pub u: Vec<f64>,
    pub r: Vec<f64>,
    /// `u_1 + b_1`; equal to every `u_i + b_i` when the test holds.
    pub c: f64,
    /// Largest `|A_ij - A_i1 - A_1j + A_11|`.
    pub max_residual: f64,
    /// Largest deviation of `u_i + b_i` from `c`.
    pub max_offset_residual: f64,
}

/// Row-additivity test for a square one-population payoff matrix.
pub fn row_additive_check(a: &[Vec<f64>], b: &[f64]) -> Result<RowAdditivity, GameError> {
    let n = a.len();
    let bad_shape = |what: String| GameError::PayoffShape {
        population: "<matrix>".into(),
        what,
    };
    if n == 0 {
        return Err(bad_shape("empty matrix".into()));
    }
    if let Some(row) = a.iter().find(|row| row.len() != n) {
        return Err(bad_shape(format!("row of length {} in {n}x{n} matrix", row.len())));
    }
    if b.len() != n {
        return Err(bad_shape(format!("offset vector of length {} for n = {n}", b.len())));
    }
    let r: Vec<f64> = a[0].clone();
    let u: Vec<f64> = a.iter().map(|row| row[0] - a[0][0]).collect();
    let mut max_residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            max_residual = max_residual.max((a[i][j] - u[i] - r[j]).abs());
        }
    }
    let c = u[0] + b[0];
    let max_offset_residual = u
        .iter()
        .zip(b)
        .map(|(ui, bi)| (ui + bi - c).abs())
        .fold(0.0, f64::max);
    Ok(RowAdditivity {
        holds: max_residual <= IDENTITY_TOL && max_offset_residual <= IDENTITY_TOL,
        u,
        r,
        c,
        max_residual,
        max_offset_residual,
    })
}

/// Row-additivity for a one-population, unit-mass game.
pub fn row_additive_game(game: &PopulationGame) -> Result<RowAdditivity, GameError> {
    if game.num_populations() != 1 || game.mass(0) != 1.0 {
        return Err(GameError::InvalidParameter(
            "row-additivity needs a one-population unit-mass game".into(),
        ));
    }
    let block = &game.payoffs()[0];
    row_additive_check(&block.rows, &block.offsets)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinaryCase {
    Dominance1,
    Dominance2,
    Coordination,
    AntiCoordination,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("binary game is not generic ({0}); use the full linear-program battery instead")]
pub struct NonGenericBinary(pub String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryDiagnostic {
    pub case: BinaryCase,
    /// SRE states as `(x_1, x_2)`.
    pub sre: Vec<[f64; 2]>,
}

/// Strict inequality threshold for the genericity conditions.
pub const BINARY_TIE_TOL: f64 = 1e-12;

/// Sign-diagram classification of a generic binary symmetric game.
pub fn binary_classify(
    m11: f64,
    m12: f64,
    m21: f64,
    m22: f64,
) -> Result<BinaryDiagnostic, NonGenericBinary> {
    // Advantage of strategy 1 when everyone plays 1, resp. 2.
    let at_e1 = m11 - m21;
    let at_e2 = m12 - m22;
    if at_e1.abs() <= BINARY_TIE_TOL {
        return Err(NonGenericBinary("m11 = m21".into()));
    }
    if at_e2.abs() <= BINARY_TIE_TOL {
        return Err(NonGenericBinary("m22 = m12".into()));
    }
    let (case, sre) = match (at_e1 > 0.0, at_e2 > 0.0) {
        (true, true) => (BinaryCase::Dominance1, vec![[1.0, 0.0]]),
        (false, false) => (BinaryCase::Dominance2, vec![[0.0, 1.0]]),
        (true, false) => (BinaryCase::Coordination, vec![[1.0, 0.0], [0.0, 1.0]]),
        (false, true) => (BinaryCase::AntiCoordination, vec![]),
    };
    Ok(BinaryDiagnostic { case, sre })
}
