//! Reported-state validity over polyhedral uncertainty regions.
//!
//! A candidate `x` is valid on a region `U` when every pure gap
//! `h_{p,i}(y; x)` is nonpositive for all `y` in `U ∩ X`. Since the gap is
//! affine in `y`, each worst case is a linear program.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::DiagnosticConfig;
use crate::game::{dot, Deviation, GameError, PopulationGame, StateVector, FEASIBILITY_TOL};
use crate::lp::{self, LinearProgram, LpError, LpStatus};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UncertaintyError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("halfspace {index} has {got} coefficients, expected {expected}")]
    HalfspaceDimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("halfspace {0} has non-finite data")]
    NonFiniteHalfspace(usize),
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("need at least one shrinking level")]
    NoLevels,
    #[error("worst-case program for {0:?} is unbounded")]
    Unbounded(Deviation),
}

/// `coeffs . y <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

/// Halfspaces intersected with the state space.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PolyhedralRegion {
    pub halfspaces: Vec<Halfspace>,
}

impl PolyhedralRegion {
    pub fn new(halfspaces: Vec<Halfspace>) -> Self {
        Self { halfspaces }
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.halfspaces
            .iter()
            .all(|h| dot(&h.coeffs, y) <= h.rhs + tol)
    }

    fn validate(&self, dim: usize) -> Result<(), UncertaintyError> {
        for (index, h) in self.halfspaces.iter().enumerate() {
            if h.coeffs.len() != dim {
                return Err(UncertaintyError::HalfspaceDimension {
                    index,
                    expected: dim,
                    got: h.coeffs.len(),
                });
            }
            if !h.rhs.is_finite() || h.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(UncertaintyError::NonFiniteHalfspace(index));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub deviation: Deviation,
    /// `max { h_{p,i}(y; x) : y in U ∩ X }`.
    pub worst_value: f64,
    pub worst_state: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UValidityReport {
    /// All worst values are within `zero_tol` of zero or below. An empty
    /// region is vacuously valid; check `empty_region`.
    pub valid: bool,
    pub empty_region: bool,
    /// Whether `x` itself satisfies the halfspaces.
    pub candidate_in_region: bool,
    /// One entry per pure strategy, empty when the region is empty.
    pub entries: Vec<WorstCase>,
}

impl UValidityReport {
    /// The entry with the largest worst value.
    pub fn worst(&self) -> Option<&WorstCase> {
        self.entries
            .iter()
            .fold(None, |best: Option<&WorstCase>, e| match best {
                Some(b) if b.worst_value >= e.worst_value => Some(b),
                _ => Some(e),
            })
    }
}

fn region_program(game: &PopulationGame, region: &PolyhedralRegion, objective: Vec<f64>) -> LinearProgram {
    let n = game.dim();
    let mut lp = LinearProgram::new(objective);
    for p in 0..game.num_populations() {
        let mut row = vec![0.0; n];
        for v in &mut row[game.block_range(p)] {
            *v = 1.0;
        }
        lp = lp.equality(row, game.mass(p));
        for k in game.block_range(p) {
            lp = lp.bound(k, 0.0, game.mass(p));
        }
    }
    for h in &region.halfspaces {
        lp = lp.inequality(h.coeffs.clone(), h.rhs);
    }
    lp
}

pub fn u_validity(
    game: &PopulationGame,
    x: &StateVector,
    region: &PolyhedralRegion,
    cfg: &DiagnosticConfig,
) -> Result<UValidityReport, UncertaintyError> {
    if x.len() != game.dim() {
        return Err(GameError::DimensionMismatch {
            expected: game.dim(),
            got: x.len(),
        }
        .into());
    }
    region.validate(game.dim())?;
    let candidate_in_region = region.contains(x.coords(), FEASIBILITY_TOL);

    let feasibility = lp::solve_with(&region_program(game, region, vec![0.0; game.dim()]), &cfg.lp)?;
    if feasibility.status == LpStatus::Infeasible {
        return Ok(UValidityReport {
            valid: true,
            empty_region: true,
            candidate_in_region,
            entries: Vec::new(),
        });
    }

    let entries: Vec<WorstCase> = game
        .deviations()
        .into_par_iter()
        .map(|dev| {
            let a = game.gap_gradient_raw(x, dev);
            let sol = lp::solve_with(&region_program(game, region, a), &cfg.lp)?;
            match sol.status {
                LpStatus::Optimal => Ok(WorstCase {
                    deviation: dev,
                    worst_value: game.gap_raw(&sol.point, x, dev),
                    worst_state: sol.point,
                }),
                _ => Err(UncertaintyError::Unbounded(dev)),
            }
        })
        .collect::<Result<_, _>>()?;
    let valid = entries.iter().all(|e| e.worst_value <= cfg.zero_tol);
    Ok(UValidityReport {
        valid,
        empty_region: false,
        candidate_in_region,
        entries,
    })
}

/// The sup-norm box `{ y : |y_k - x_k| <= r }`; the simplex constraints are
/// added by [`u_validity`].
pub fn box_region(
    game: &PopulationGame,
    x: &StateVector,
    r: f64,
) -> Result<PolyhedralRegion, UncertaintyError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(UncertaintyError::InvalidRadius(r));
    }
    let n = game.dim();
    if x.len() != n {
        return Err(GameError::DimensionMismatch {
            expected: n,
            got: x.len(),
        }
        .into());
    }
    let mut halfspaces = Vec::with_capacity(2 * n);
    for (k, v) in x.coords().iter().enumerate() {
        let mut up = vec![0.0; n];
        up[k] = 1.0;
        let down = up.iter().map(|c| -c).collect();
        halfspaces.push(Halfspace {
            coeffs: up,
            rhs: v + r,
        });
        halfspaces.push(Halfspace {
            coeffs: down,
            rhs: r - v,
        });
    }
    Ok(PolyhedralRegion { halfspaces })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkLevel {
    pub level: u32,
    pub radius: f64,
    pub valid: bool,
    /// Largest worst value over all pure strategies at this level.
    pub worst: Option<WorstCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkingReport {
    pub levels: Vec<ShrinkLevel>,
    /// Verdict at the finest level.
    pub verdict: bool,
    /// The last three levels agree (or all levels, when fewer than three).
    pub stable: bool,
}

/// U-validity on boxes of radius `r0 * 2^-m` for `m = 0..=m_max`.
pub fn shrinking_diagnostic(
    game: &PopulationGame,
    x: &StateVector,
    r0: f64,
    m_max: u32,
    cfg: &DiagnosticConfig,
) -> Result<ShrinkingReport, UncertaintyError> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(UncertaintyError::InvalidRadius(r0));
    }
    if m_max < 1 {
        return Err(UncertaintyError::NoLevels);
    }
    let levels: Vec<ShrinkLevel> = (0..=m_max)
        .into_par_iter()
        .map(|m| {
            let radius = r0 * 0.5f64.powi(m as i32);
            let report = u_validity(game, x, &box_region(game, x, radius)?, cfg)?;
            Ok(ShrinkLevel {
                level: m,
                radius,
                valid: report.valid,
                worst: report.worst().cloned(),
            })
        })
        .collect::<Result<_, UncertaintyError>>()?;
    let verdict = levels.last().map(|l| l.valid).unwrap_or(true);
    let tail = &levels[levels.len().saturating_sub(3)..];
    let stable = tail.iter().all(|l| l.valid == verdict);
    Ok(ShrinkingReport {
        levels,
        verdict,
        stable,
    })
}
