//! The finite SRE test battery for affine games.
//!
//! For a candidate `x` and every pure strategy `(p, i)`, the gap
//! `h_{p,i}(x; x)` is classified by sign. Gaps inside `[-zero_tol, zero_tol]`
//! are treated as ties, and for those the tangent program
//!
//! ```text
//! Psi_{p,i}(x) = max { a_{p,i}(x) . d : d in T_x X, |d|_inf <= 1 }
//! ```
//!
//! decides whether the tie is protected (`Psi = 0`) or exposed (`Psi > 0`).
//! `x` is state-robust exactly when no gap is positive and no tie is exposed.
//! Each exposed tie comes with a certificate: an interior evaluation state
//! near `x` where the deviation is strictly profitable, re-verified before it
//! is emitted.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{interior_direction, tangent_cone, TangentConeRep};
use crate::game::{dot, Deviation, GameError, PopulationGame, StateVector, SUPPORT_TOL};
use crate::lp::{self, LinearProgram, LpConfig, LpError, LpStatus};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagnosticError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("tangent program for {deviation:?} ended with status {status:?}")]
    UnexpectedStatus {
        deviation: Option<Deviation>,
        status: LpStatus,
    },
    #[error("exposure of {deviation:?} has Psi = {psi:e} but no verifiable witness: {reason}")]
    UnverifiedExposure {
        deviation: Deviation,
        psi: f64,
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticConfig {
    /// Gaps with `|h| <= zero_tol` count as ties.
    pub zero_tol: f64,
    /// A tie is exposed when `Psi > psi_tol`.
    pub psi_tol: f64,
    pub lp: LpConfig,
}

impl Default for DiagnosticConfig {
    fn default() -> Self {
        Self {
            zero_tol: 1e-7,
            psi_tol: 1e-7,
            lp: LpConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeviationKind {
    StrictlyWorse,
    ProtectedZeroGap,
    ExposedZeroGap,
    PositiveGap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentDirection {
    pub coords: Vec<f64>,
    pub in_relative_interior: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationVerdict {
    pub deviation: Deviation,
    pub gap: f64,
    pub kind: DeviationKind,
    pub psi: Option<f64>,
    /// LP maximizer, present for exposed ties. One witness among possibly many.
    pub direction: Option<TangentDirection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExposureCertificate {
    pub deviation: Deviation,
    /// Direction in `ri(T_x X)` along which the gap grows.
    pub direction: Vec<f64>,
    /// Weight given to the fixed interior direction when blending.
    pub blend: f64,
    pub step: f64,
    /// `x + step * direction`, an interior state.
    pub witness: Vec<f64>,
    /// `h_{p,i}(witness; x)`, strictly positive.
    pub witnessed_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SreVerdict {
    pub is_nash: bool,
    pub is_sre: bool,
    pub deviations: Vec<DeviationVerdict>,
    pub witnesses: Vec<ExposureCertificate>,
}

impl SreVerdict {
    pub fn exposed(&self) -> impl Iterator<Item = &DeviationVerdict> {
        self.deviations
            .iter()
            .filter(|v| v.kind == DeviationKind::ExposedZeroGap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentMaximum {
    pub value: f64,
    pub direction: Vec<f64>,
}

/// The tangent program `max { a . d : d in cone, -1 <= d <= 1 }`.
pub fn tangent_program(cone: &TangentConeRep, a: &[f64]) -> LinearProgram {
    let mut lp = LinearProgram::new(a.to_vec());
    for block in &cone.blocks {
        let mut row = vec![0.0; cone.dim];
        for v in &mut row[block.start..block.start + block.len] {
            *v = 1.0;
        }
        lp = lp.equality(row, 0.0);
    }
    for k in 0..cone.dim {
        lp = lp.bound(k, -1.0, 1.0);
    }
    for j in cone.inactive() {
        lp = lp.bound(j, 0.0, 1.0);
    }
    lp
}

/// Maximizes `a . d` over the unit-box slice of `T_x X` for any ambient `a`.
pub fn tangent_maximum(
    game: &PopulationGame,
    x: &StateVector,
    a: &[f64],
    cfg: &LpConfig,
) -> Result<TangentMaximum, DiagnosticError> {
    let cone = tangent_cone(game, x);
    if a.len() != cone.dim {
        return Err(GameError::DimensionMismatch {
            expected: cone.dim,
            got: a.len(),
        }
        .into());
    }
    let sol = lp::solve_with(&tangent_program(&cone, a), cfg)?;
    if sol.status != LpStatus::Optimal {
        return Err(DiagnosticError::UnexpectedStatus {
            deviation: None,
            status: sol.status,
        });
    }
    Ok(TangentMaximum {
        value: sol.value.max(0.0),
        direction: sol.point,
    })
}

/// `Psi_{p,i}(x)` and a maximizing direction.
pub fn psi(
    game: &PopulationGame,
    x: &StateVector,
    dev: Deviation,
    cfg: &DiagnosticConfig,
) -> Result<TangentMaximum, DiagnosticError> {
    let a = game.gap_gradient(x, dev)?;
    tangent_maximum(game, x, &a, &cfg.lp).map_err(|e| match e {
        DiagnosticError::UnexpectedStatus { status, .. } => DiagnosticError::UnexpectedStatus {
            deviation: Some(dev),
            status,
        },
        other => other,
    })
}

pub fn classify_deviation(
    game: &PopulationGame,
    x: &StateVector,
    dev: Deviation,
    cfg: &DiagnosticConfig,
) -> Result<DeviationVerdict, DiagnosticError> {
    game.check_deviation(dev)?;
    let gap = game.pure_gap(x, x, dev)?;
    let verdict = |kind, psi, direction| DeviationVerdict {
        deviation: dev,
        gap,
        kind,
        psi,
        direction,
    };
    if gap < -cfg.zero_tol {
        return Ok(verdict(DeviationKind::StrictlyWorse, None, None));
    }
    if gap > cfg.zero_tol {
        return Ok(verdict(DeviationKind::PositiveGap, None, None));
    }
    let max = psi(game, x, dev, cfg)?;
    if max.value > cfg.psi_tol {
        let cone = tangent_cone(game, x);
        let interior = cone.in_relative_interior(&max.direction).unwrap_or(false);
        Ok(verdict(
            DeviationKind::ExposedZeroGap,
            Some(max.value),
            Some(TangentDirection {
                coords: max.direction,
                in_relative_interior: interior,
            }),
        ))
    } else {
        Ok(verdict(DeviationKind::ProtectedZeroGap, Some(max.value), None))
    }
}

const MAX_BLEND_HALVINGS: i32 = 40;

/// Turns an exposing LP maximizer into a verified interior witness.
///
/// A maximizer on the boundary of the tangent cone is blended with the fixed
/// interior direction `barycenter - x`, halving the blend weight from 1/2
/// until the directional derivative is at least `Psi / 2` and the direction
/// is strictly feasible. The step is half the distance to the nearest face.
pub fn exposure_certificate(
    game: &PopulationGame,
    x: &StateVector,
    dev: Deviation,
    raw_direction: &[f64],
    cfg: &DiagnosticConfig,
) -> Result<ExposureCertificate, DiagnosticError> {
    let a = game.gap_gradient(x, dev)?;
    let psi_value = dot(&a, raw_direction);
    let fail = |reason: String| DiagnosticError::UnverifiedExposure {
        deviation: dev,
        psi: psi_value,
        reason,
    };
    if !(psi_value > cfg.psi_tol) {
        return Err(fail("direction does not increase the gap".into()));
    }
    let cone = tangent_cone(game, x);
    let in_ri = |d: &[f64]| cone.in_relative_interior(d).unwrap_or(false);

    let (blend, direction) = if in_ri(raw_direction) {
        (0.0, raw_direction.to_vec())
    } else {
        let r = interior_direction(game, x);
        (1..=MAX_BLEND_HALVINGS)
            .map(|k| {
                let lambda = 0.5f64.powi(k);
                let d: Vec<f64> = raw_direction
                    .iter()
                    .zip(&r)
                    .map(|(u, v)| (1.0 - lambda) * u + lambda * v)
                    .collect();
                (lambda, d)
            })
            .find(|(_, d)| dot(&a, d) >= 0.5 * psi_value && in_ri(d))
            .ok_or_else(|| fail("no blend with the interior direction stays exposing".into()))?
    };

    let step = direction
        .iter()
        .zip(x.coords())
        .filter(|(d, _)| **d < 0.0)
        .map(|(d, v)| v / -d)
        .fold(2.0f64, f64::min)
        * 0.5;
    let witness: Vec<f64> = x
        .coords()
        .iter()
        .zip(&direction)
        .map(|(v, d)| v + step * d)
        .collect();
    if !witness.iter().all(|v| *v > SUPPORT_TOL) {
        return Err(fail("witness state is not interior".into()));
    }
    let witnessed_gap = game.gap_raw(&witness, x, dev);
    if !(witnessed_gap > 0.0 && witnessed_gap >= 0.5 * cfg.psi_tol * step) {
        return Err(fail(format!(
            "recomputed gap {witnessed_gap:e} at the witness is not positive"
        )));
    }
    Ok(ExposureCertificate {
        deviation: dev,
        direction,
        blend,
        step,
        witness,
        witnessed_gap,
    })
}

/// Runs the full battery at `x`: one classification per pure strategy and a
/// verified certificate for every exposed tie. Results are in `(p, i)` order.
pub fn sre_membership(
    game: &PopulationGame,
    x: &StateVector,
    cfg: &DiagnosticConfig,
) -> Result<SreVerdict, DiagnosticError> {
    let deviations: Vec<DeviationVerdict> = game
        .deviations()
        .into_par_iter()
        .map(|dev| classify_deviation(game, x, dev, cfg))
        .collect::<Result<_, _>>()?;
    let witnesses: Vec<ExposureCertificate> = deviations
        .par_iter()
        .filter(|v| v.kind == DeviationKind::ExposedZeroGap)
        .map(|v| {
            let d = &v.direction.as_ref().expect("exposed verdict carries a direction").coords;
            exposure_certificate(game, x, v.deviation, d, cfg)
        })
        .collect::<Result<_, _>>()?;
    let is_nash = deviations
        .iter()
        .all(|v| v.kind != DeviationKind::PositiveGap);
    let is_sre = is_nash && witnesses.is_empty();
    Ok(SreVerdict {
        is_nash,
        is_sre,
        deviations,
        witnesses,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// For every pure strategy, the indices of candidates in its exposed
    /// indifference set `K_{p,i}`.
    pub sets: Vec<(Deviation, Vec<usize>)>,
    /// Candidates that are not Nash, skipped.
    pub non_nash: Vec<usize>,
    /// Nash candidates that pass the battery.
    pub robust: Vec<usize>,
}

impl Decomposition {
    /// Candidates lying in at least one `K_{p,i}`, sorted.
    pub fn union(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.sets.iter().flat_map(|(_, v)| v.iter().copied()).collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn set(&self, dev: Deviation) -> &[usize] {
        self.sets
            .iter()
            .find(|(d, _)| *d == dev)
            .map(|(_, v)| v.as_slice())
            .unwrap_or(&[])
    }
}

/// Sorts Nash candidates into the exposed indifference sets.
pub fn exposed_indifference_sets(
    game: &PopulationGame,
    candidates: &[StateVector],
    cfg: &DiagnosticConfig,
) -> Result<Decomposition, DiagnosticError> {
    let verdicts: Vec<SreVerdict> = candidates
        .par_iter()
        .map(|x| sre_membership(game, x, cfg))
        .collect::<Result<_, _>>()?;
    let mut sets: Vec<(Deviation, Vec<usize>)> =
        game.deviations().into_iter().map(|d| (d, Vec::new())).collect();
    let mut non_nash = Vec::new();
    let mut robust = Vec::new();
    for (k, verdict) in verdicts.iter().enumerate() {
        if !verdict.is_nash {
            non_nash.push(k);
            continue;
        }
        if verdict.is_sre {
            robust.push(k);
        }
        for v in verdict.exposed() {
            if let Some((_, list)) = sets.iter_mut().find(|(d, _)| *d == v.deviation) {
                list.push(k);
            }
        }
    }
    Ok(Decomposition {
        sets,
        non_nash,
        robust,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn cfg() -> DiagnosticConfig {
        DiagnosticConfig::default()
    }

    #[test]
    fn psi_examples() {
        let rps = gallery::rps();
        let m = psi(&rps.game, &rps.game.barycenter(), Deviation::new(0, 0), &cfg()).unwrap();
        assert!((m.value - 2.0).abs() < 1e-12);
        for (got, want) in m.direction.iter().zip([0.0, -1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }

        let b = gallery::boundary_example();
        let e1 = b.state("e1").unwrap();
        let m = psi(&b.game, e1, Deviation::new(0, 1), &cfg()).unwrap();
        assert_eq!(m.value, 0.0);

        let hd = gallery::hawk_dove(2.0, 4.0).unwrap();
        let x = hd.state("mixed").unwrap();
        assert_eq!(hd.game.gap_gradient(x, Deviation::new(0, 1)).unwrap(), vec![1.0, 0.0]);
        let m = psi(&hd.game, x, Deviation::new(0, 1), &cfg()).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12);
        assert!((m.direction[0] - 1.0).abs() < 1e-12 && (m.direction[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn classification_examples() {
        let c = gallery::coordination(3).unwrap();
        let v = classify_deviation(&c.game, c.state("e1").unwrap(), Deviation::new(0, 1), &cfg())
            .unwrap();
        assert_eq!(v.kind, DeviationKind::StrictlyWorse);
        assert_eq!(v.gap, -1.0);
        assert!(v.psi.is_none());

        let pl = gallery::platform(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let v = classify_deviation(&pl.game, pl.state("xo").unwrap(), Deviation::new(1, 0), &cfg())
            .unwrap();
        assert_eq!(v.kind, DeviationKind::ExposedZeroGap);
        let d = v.direction.unwrap().coords;
        assert!(d[0] > 0.0, "buyer-A component {d:?}");

        let id = gallery::identity_example();
        let v = classify_deviation(&id.game, id.state("half").unwrap(), Deviation::new(0, 1), &cfg())
            .unwrap();
        assert_eq!(v.kind, DeviationKind::ProtectedZeroGap);
        assert_eq!(v.psi, Some(0.0));
    }

    #[test]
    fn positive_gap_at_non_nash_state() {
        let s = gallery::standards(&[3.0, 2.0, 0.0], 0.5).unwrap();
        let e2 = s.state("e2").unwrap();
        let v = classify_deviation(&s.game, e2, Deviation::new(0, 0), &cfg()).unwrap();
        assert_eq!(v.kind, DeviationKind::PositiveGap);
        let verdict = sre_membership(&s.game, e2, &cfg()).unwrap();
        assert!(!verdict.is_nash && !verdict.is_sre);
    }

    #[test]
    fn membership_examples() {
        let hd = gallery::hawk_dove(2.0, 4.0).unwrap();
        let v = sre_membership(&hd.game, hd.state("mixed").unwrap(), &cfg()).unwrap();
        assert!(v.is_nash && !v.is_sre);
        assert_eq!(v.witnesses.len(), 2);

        let b = gallery::boundary_example();
        let v = sre_membership(&b.game, b.state("e1").unwrap(), &cfg()).unwrap();
        assert!(v.is_nash && v.is_sre);

        let pl = gallery::platform(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        assert!(sre_membership(&pl.game, pl.state("xA").unwrap(), &cfg()).unwrap().is_sre);
        assert!(!sre_membership(&pl.game, pl.state("xo").unwrap(), &cfg()).unwrap().is_sre);
    }

    #[test]
    fn rps_certificate_matches_hand_computation() {
        let rps = gallery::rps();
        let x = rps.game.barycenter();
        let cert =
            exposure_certificate(&rps.game, &x, Deviation::new(0, 0), &[0.0, -1.0, 1.0], &cfg())
                .unwrap();
        assert_eq!(cert.blend, 0.0);
        assert!((cert.step - 1.0 / 6.0).abs() < 1e-15);
        for (got, want) in cert.witness.iter().zip([1.0 / 3.0, 1.0 / 6.0, 0.5]) {
            assert!((got - want).abs() < 1e-15);
        }
        // h_R(y; x*) = F_R(y) = -y_P + y_S
        assert!((cert.witnessed_gap - (0.5 - 1.0 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn boundary_certificate_needs_blending() {
        let c = gallery::coordination(3).unwrap();
        let x = c.game.state(vec![0.5, 0.5, 0.0]).unwrap();
        let cert =
            exposure_certificate(&c.game, &x, Deviation::new(0, 0), &[1.0, -1.0, 0.0], &cfg())
                .unwrap();
        assert!(cert.blend > 0.0 && cert.blend <= 0.5);
        assert!(cert.witness.iter().all(|v| *v > 0.0));
        assert!(cert.witnessed_gap > 0.0);
        let cone = tangent_cone(&c.game, &x);
        assert!(cone.in_relative_interior(&cert.direction).unwrap());
    }

    #[test]
    fn certificate_refuses_non_exposing_direction() {
        let b = gallery::boundary_example();
        let e1 = b.state("e1").unwrap();
        let err = exposure_certificate(&b.game, e1, Deviation::new(0, 1), &[-1.0, 1.0], &cfg());
        assert!(matches!(err, Err(DiagnosticError::UnverifiedExposure { .. })));
    }

    #[test]
    fn decomposition_examples() {
        let pl = gallery::platform(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let cands: Vec<StateVector> = pl.states.iter().map(|(_, s)| s.clone()).collect();
        let dec = exposed_indifference_sets(&pl.game, &cands, &cfg()).unwrap();
        assert_eq!(dec.set(Deviation::new(0, 0)), &[2]);
        assert_eq!(dec.set(Deviation::new(1, 0)), &[2]);
        assert_eq!(dec.set(Deviation::new(0, 1)), &[2]);
        assert_eq!(dec.set(Deviation::new(1, 1)), &[2]);
        assert_eq!(dec.robust, vec![0, 1]);
        assert_eq!(dec.union(), vec![2]);

        let hd = gallery::hawk_dove(2.0, 4.0).unwrap();
        let dec =
            exposed_indifference_sets(&hd.game, &[hd.state("mixed").unwrap().clone()], &cfg())
                .unwrap();
        assert_eq!(dec.set(Deviation::new(0, 0)), &[0]);
        assert_eq!(dec.set(Deviation::new(0, 1)), &[0]);

        let b = gallery::boundary_example();
        let cands: Vec<StateVector> = b.states.iter().map(|(_, s)| s.clone()).collect();
        let dec = exposed_indifference_sets(&b.game, &cands, &cfg()).unwrap();
        assert!(dec.union().is_empty());
        // e2 is not Nash: F_2(e2) = -1 < F_1 = 0.
        assert_eq!(dec.non_nash, vec![1]);
    }
}
