//! Finite-strategy population games with affine payoffs.
//!
//! A game is a list of populations, each with a positive mass and an ordered
//! strategy set. The joint state lives in the product of simplices `X`, stored
//! in ambient coordinates as one contiguous block per population, in
//! declaration order. Payoffs are affine: `F_p(y) = A_p y + b_p`, where `A_p`
//! has one row per own strategy and one column per ambient coordinate.
//!
//! Payoffs are reported in aggregate form. The pure gap
//! `h_{p,i}(y; x) = m_p F_{p,i}(y) - x_p . F_p(y)` compares the aggregate
//! payoff of moving all of population `p` to strategy `i` with the aggregate
//! payoff of the candidate distribution `x_p`, both evaluated at `y`. Dividing
//! by `m_p` gives the per-capita version; no comparison changes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// States are accepted when every coordinate is at least `-FEASIBILITY_TOL`
/// and each block sums to its mass within `FEASIBILITY_TOL`.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// A coordinate belongs to the support when it exceeds this threshold.
pub const SUPPORT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("population {population}: mass must be positive and finite, got {mass}")]
    NonPositiveMass { population: String, mass: f64 },
    #[error("population {0}: needs at least one strategy")]
    NoStrategies(String),
    #[error("population {population}: duplicate strategy label {label:?}")]
    DuplicateStrategy { population: String, label: String },
    #[error("game needs at least one population")]
    NoPopulations,
    #[error("population {population}: {what}")]
    PayoffShape { population: String, what: String },
    #[error("population {population}: payoff entries must be finite")]
    NonFinitePayoff { population: String },
    #[error("state has {got} coordinates, game expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state coordinate {index} is {value}, below the feasibility tolerance")]
    NegativeCoordinate { index: usize, value: f64 },
    #[error("state coordinate {index} is not finite")]
    NonFiniteCoordinate { index: usize },
    #[error("population {population}: block sums to {sum}, expected mass {mass}")]
    BlockSum { population: usize, sum: f64, mass: f64 },
    #[error("no pure strategy ({population}, {strategy})")]
    BadIndex { population: usize, strategy: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationSpec {
    pub name: String,
    pub mass: f64,
    pub strategies: Vec<String>,
}

impl PopulationSpec {
    pub fn new<S: Into<String>>(name: S, mass: f64, strategies: &[&str]) -> Self {
        Self {
            name: name.into(),
            mass,
            strategies: strategies.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }
}

/// Payoff coefficients of one population: `rows[i]` is `A_{p,i.}` over all
/// ambient coordinates, `offsets[i]` is `b_{p,i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineBlock {
    pub rows: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationGame {
    populations: Vec<PopulationSpec>,
    payoffs: Vec<AffineBlock>,
    block_offsets: Vec<usize>,
    dim: usize,
}

/// A point of the product simplex in ambient coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    coords: Vec<f64>,
}

impl StateVector {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn distance_inf(&self, other: &StateVector) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A pure strategy of one population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Deviation {
    pub population: usize,
    pub strategy: usize,
}

impl Deviation {
    pub fn new(population: usize, strategy: usize) -> Self {
        Self {
            population,
            strategy,
        }
    }
}

/// `h_{p,i}(x; x)` for every pure strategy, in `(p, i)` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapTable {
    pub entries: Vec<(Deviation, f64)>,
}

impl GapTable {
    pub fn get(&self, dev: Deviation) -> Option<f64> {
        self.entries
            .iter()
            .find(|(d, _)| *d == dev)
            .map(|(_, v)| *v)
    }

    pub fn max_gap(&self) -> f64 {
        self.entries
            .iter()
            .map(|(_, v)| *v)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashCheck {
    pub is_nash: bool,
    /// Pure strategies whose gap exceeds the tolerance, with the gap.
    pub violations: Vec<(Deviation, f64)>,
}

impl PopulationGame {
    pub fn new(
        populations: Vec<PopulationSpec>,
        payoffs: Vec<AffineBlock>,
    ) -> Result<Self, GameError> {
        if populations.is_empty() {
            return Err(GameError::NoPopulations);
        }
        for pop in &populations {
            if !(pop.mass.is_finite() && pop.mass > 0.0) {
                return Err(GameError::NonPositiveMass {
                    population: pop.name.clone(),
                    mass: pop.mass,
                });
            }
            if pop.strategies.is_empty() {
                return Err(GameError::NoStrategies(pop.name.clone()));
            }
            for (k, label) in pop.strategies.iter().enumerate() {
                if pop.strategies[..k].contains(label) {
                    return Err(GameError::DuplicateStrategy {
                        population: pop.name.clone(),
                        label: label.clone(),
                    });
                }
            }
        }
        let mut block_offsets = Vec::with_capacity(populations.len());
        let mut dim = 0;
        for pop in &populations {
            block_offsets.push(dim);
            dim += pop.len();
        }
        if payoffs.len() != populations.len() {
            return Err(GameError::PayoffShape {
                population: "<game>".into(),
                what: format!(
                    "{} payoff blocks for {} populations",
                    payoffs.len(),
                    populations.len()
                ),
            });
        }
        for (pop, block) in populations.iter().zip(&payoffs) {
            let shape_err = |what: String| GameError::PayoffShape {
                population: pop.name.clone(),
                what,
            };
            if block.rows.len() != pop.len() {
                return Err(shape_err(format!(
                    "A has {} rows, expected {}",
                    block.rows.len(),
                    pop.len()
                )));
            }
            if block.offsets.len() != pop.len() {
                return Err(shape_err(format!(
                    "b has {} entries, expected {}",
                    block.offsets.len(),
                    pop.len()
                )));
            }
            for (i, row) in block.rows.iter().enumerate() {
                if row.len() != dim {
                    return Err(shape_err(format!(
                        "row {} of A has {} columns, expected {}",
                        i,
                        row.len(),
                        dim
                    )));
                }
            }
            let finite = block.rows.iter().flatten().all(|v| v.is_finite())
                && block.offsets.iter().all(|v| v.is_finite());
            if !finite {
                return Err(GameError::NonFinitePayoff {
                    population: pop.name.clone(),
                });
            }
        }
        Ok(Self {
            populations,
            payoffs,
            block_offsets,
            dim,
        })
    }

    pub fn populations(&self) -> &[PopulationSpec] {
        &self.populations
    }

    pub fn payoffs(&self) -> &[AffineBlock] {
        &self.payoffs
    }

    pub fn num_populations(&self) -> usize {
        self.populations.len()
    }

    /// Ambient dimension `n = sum_p n_p`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mass(&self, p: usize) -> f64 {
        self.populations[p].mass
    }

    pub fn num_strategies(&self, p: usize) -> usize {
        self.populations[p].len()
    }

    pub fn block_range(&self, p: usize) -> std::ops::Range<usize> {
        let start = self.block_offsets[p];
        start..start + self.populations[p].len()
    }

    /// Ambient index of strategy `i` of population `p`.
    pub fn index_of(&self, p: usize, i: usize) -> usize {
        self.block_offsets[p] + i
    }

    /// All pure strategies in `(p, i)` order.
    pub fn deviations(&self) -> Vec<Deviation> {
        (0..self.num_populations())
            .flat_map(|p| (0..self.num_strategies(p)).map(move |i| Deviation::new(p, i)))
            .collect()
    }

    pub fn check_deviation(&self, dev: Deviation) -> Result<(), GameError> {
        if dev.population < self.num_populations()
            && dev.strategy < self.num_strategies(dev.population)
        {
            Ok(())
        } else {
            Err(GameError::BadIndex {
                population: dev.population,
                strategy: dev.strategy,
            })
        }
    }

    pub fn label(&self, dev: Deviation) -> String {
        let pop = &self.populations[dev.population];
        format!("{}:{}", pop.name, pop.strategies[dev.strategy])
    }

    /// Validates raw coordinates and returns an exactly feasible state.
    ///
    /// Coordinates at or below [`SUPPORT_TOL`] are set to zero and each block
    /// is rescaled to sum to its mass, so the support set is unambiguous.
    pub fn state(&self, coords: Vec<f64>) -> Result<StateVector, GameError> {
        if coords.len() != self.dim {
            return Err(GameError::DimensionMismatch {
                expected: self.dim,
                got: coords.len(),
            });
        }
        for (index, &value) in coords.iter().enumerate() {
            if !value.is_finite() {
                return Err(GameError::NonFiniteCoordinate { index });
            }
            if value < -FEASIBILITY_TOL {
                return Err(GameError::NegativeCoordinate { index, value });
            }
        }
        let mut coords = coords;
        for p in 0..self.num_populations() {
            let range = self.block_range(p);
            let mass = self.mass(p);
            let sum: f64 = coords[range.clone()].iter().sum();
            if (sum - mass).abs() > FEASIBILITY_TOL {
                return Err(GameError::BlockSum {
                    population: p,
                    sum,
                    mass,
                });
            }
            let block = &mut coords[range];
            for v in block.iter_mut() {
                if *v <= SUPPORT_TOL {
                    *v = 0.0;
                }
            }
            let kept: f64 = block.iter().sum();
            if kept <= 0.0 {
                return Err(GameError::BlockSum {
                    population: p,
                    sum: kept,
                    mass,
                });
            }
            let scale = mass / kept;
            for v in block.iter_mut() {
                *v *= scale;
            }
        }
        Ok(StateVector { coords })
    }

    /// The pure state putting all of each population on `profile[p]`.
    pub fn pure_state(&self, profile: &[usize]) -> Result<StateVector, GameError> {
        if profile.len() != self.num_populations() {
            return Err(GameError::DimensionMismatch {
                expected: self.num_populations(),
                got: profile.len(),
            });
        }
        let mut coords = vec![0.0; self.dim];
        for (p, &i) in profile.iter().enumerate() {
            self.check_deviation(Deviation::new(p, i))?;
            coords[self.index_of(p, i)] = self.mass(p);
        }
        self.state(coords)
    }

    /// Each population spread evenly over its strategies.
    pub fn barycenter(&self) -> StateVector {
        let mut coords = vec![0.0; self.dim];
        for p in 0..self.num_populations() {
            let share = self.mass(p) / self.num_strategies(p) as f64;
            for v in &mut coords[self.block_range(p)] {
                *v = share;
            }
        }
        StateVector { coords }
    }

    pub fn block<'a>(&self, x: &'a StateVector, p: usize) -> &'a [f64] {
        &x.coords[self.block_range(p)]
    }

    /// Indices (within the block) of strategies with positive mass.
    pub fn support(&self, x: &StateVector, p: usize) -> Vec<usize> {
        self.block(x, p)
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > SUPPORT_TOL)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn is_interior(&self, x: &StateVector) -> bool {
        x.coords.iter().all(|v| *v > SUPPORT_TOL)
    }

    fn check_dim(&self, y: &[f64]) -> Result<(), GameError> {
        if y.len() == self.dim {
            Ok(())
        } else {
            Err(GameError::DimensionMismatch {
                expected: self.dim,
                got: y.len(),
            })
        }
    }

    pub(crate) fn payoff_raw(&self, y: &[f64], p: usize, i: usize) -> f64 {
        let block = &self.payoffs[p];
        dot(&block.rows[i], y) + block.offsets[i]
    }

    pub(crate) fn payoffs_raw(&self, y: &[f64], p: usize) -> Vec<f64> {
        (0..self.num_strategies(p))
            .map(|i| self.payoff_raw(y, p, i))
            .collect()
    }

    /// `F_p(y) = A_p y + b_p` for every population.
    pub fn evaluate_payoffs(&self, y: &StateVector) -> Result<Vec<Vec<f64>>, GameError> {
        self.check_dim(&y.coords)?;
        Ok((0..self.num_populations())
            .map(|p| self.payoffs_raw(&y.coords, p))
            .collect())
    }

    pub(crate) fn gap_raw(&self, y: &[f64], x: &StateVector, dev: Deviation) -> f64 {
        let p = dev.population;
        let payoffs = self.payoffs_raw(y, p);
        self.mass(p) * payoffs[dev.strategy] - dot(self.block(x, p), &payoffs)
    }

    /// `h_{p,i}(y; x) = m_p F_{p,i}(y) - x_p . F_p(y)`.
    pub fn pure_gap(
        &self,
        x: &StateVector,
        y: &StateVector,
        dev: Deviation,
    ) -> Result<f64, GameError> {
        self.check_dim(&x.coords)?;
        self.check_dim(&y.coords)?;
        self.check_deviation(dev)?;
        Ok(self.gap_raw(&y.coords, x, dev))
    }

    pub fn gap_table(&self, x: &StateVector) -> Result<GapTable, GameError> {
        self.check_dim(&x.coords)?;
        let entries = self
            .deviations()
            .into_iter()
            .map(|dev| (dev, self.gap_raw(&x.coords, x, dev)))
            .collect();
        Ok(GapTable { entries })
    }

    /// Pure strategies within `tol` of the best payoff at `y`.
    pub fn best_response_set(
        &self,
        y: &StateVector,
        p: usize,
        tol: f64,
    ) -> Result<Vec<usize>, GameError> {
        self.check_dim(&y.coords)?;
        self.check_deviation(Deviation::new(p, 0))?;
        let payoffs = self.payoffs_raw(&y.coords, p);
        let best = payoffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(payoffs
            .iter()
            .enumerate()
            .filter(|(_, v)| **v >= best - tol)
            .map(|(i, _)| i)
            .collect())
    }

    pub fn is_nash(&self, x: &StateVector, tol: f64) -> Result<NashCheck, GameError> {
        let table = self.gap_table(x)?;
        let violations: Vec<_> = table
            .entries
            .into_iter()
            .filter(|(_, gap)| *gap > tol)
            .collect();
        Ok(NashCheck {
            is_nash: violations.is_empty(),
            violations,
        })
    }

    /// Ambient representative of the derivative of `h_{p,i}(.; x)`:
    /// `a_{p,i}(x) = m_p A_{p,i.} - x_p^T A_p`.
    pub fn gap_gradient(&self, x: &StateVector, dev: Deviation) -> Result<Vec<f64>, GameError> {
        self.check_dim(&x.coords)?;
        self.check_deviation(dev)?;
        Ok(self.gap_gradient_raw(x, dev))
    }

    pub(crate) fn gap_gradient_raw(&self, x: &StateVector, dev: Deviation) -> Vec<f64> {
        let p = dev.population;
        let block = &self.payoffs[p];
        let mass = self.mass(p);
        let mut grad: Vec<f64> = block.rows[dev.strategy].iter().map(|a| mass * a).collect();
        for (xj, row) in self.block(x, p).iter().zip(&block.rows) {
            if *xj == 0.0 {
                continue;
            }
            for (g, a) in grad.iter_mut().zip(row) {
                *g -= xj * a;
            }
        }
        grad
    }

    /// Replaces the payoff offsets `b_p`, keeping everything else.
    pub fn with_offsets(&self, offsets: Vec<Vec<f64>>) -> Result<Self, GameError> {
        let payoffs = self
            .payoffs
            .iter()
            .zip(offsets)
            .map(|(block, b)| AffineBlock {
                rows: block.rows.clone(),
                offsets: b,
            })
            .collect();
        Self::new(self.populations.clone(), payoffs)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn hawk_dove_payoffs_at_half() {
        let g = gallery::hawk_dove(2.0, 4.0).unwrap();
        let y = g.game.state(vec![0.5, 0.5]).unwrap();
        let f = g.game.evaluate_payoffs(&y).unwrap();
        assert!(close(f[0][0], 0.5) && close(f[0][1], 0.5));
    }

    #[test]
    fn rps_payoffs_vanish_at_barycenter() {
        let g = gallery::rps();
        let f = g.game.evaluate_payoffs(&g.game.barycenter()).unwrap();
        assert!(f[0].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn standards_payoffs_at_first_vertex() {
        let g = gallery::standards(&[3.0, 2.0, 0.0], 0.5).unwrap();
        let y = g.game.pure_state(&[0]).unwrap();
        assert_eq!(g.game.evaluate_payoffs(&y).unwrap()[0], vec![3.5, 2.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = gallery::rps();
        assert!(matches!(
            g.game.state(vec![1.0, 0.0]),
            Err(GameError::DimensionMismatch { .. })
        ));
        let other = gallery::boundary_example();
        let y = other.game.pure_state(&[0]).unwrap();
        assert!(g.game.evaluate_payoffs(&y).is_err());
    }

    #[test]
    fn pure_gap_examples() {
        let hd = gallery::hawk_dove(2.0, 4.0).unwrap();
        let x = hd.game.state(vec![0.5, 0.5]).unwrap();
        let y = hd.game.state(vec![0.75, 0.25]).unwrap();
        let h = hd.game.pure_gap(&x, &y, Deviation::new(0, 1)).unwrap();
        assert!(close(h, 0.25));

        let b = gallery::boundary_example();
        let e1 = b.game.pure_state(&[0]).unwrap();
        let y = b.game.state(vec![0.9, 0.1]).unwrap();
        assert!(close(b.game.pure_gap(&e1, &y, Deviation::new(0, 1)).unwrap(), -0.1));
        assert_eq!(b.game.pure_gap(&e1, &e1, Deviation::new(0, 0)).unwrap(), 0.0);

        assert!(matches!(
            b.game.pure_gap(&e1, &e1, Deviation::new(0, 2)),
            Err(GameError::BadIndex { .. })
        ));
    }

    #[test]
    fn gap_table_examples() {
        let rps = gallery::rps();
        let t = rps.game.gap_table(&rps.game.barycenter()).unwrap();
        assert_eq!(t.entries.len(), 3);
        assert!(t.entries.iter().all(|(_, v)| v.abs() < 1e-15));

        let c = gallery::coordination(3).unwrap();
        let e1 = c.game.pure_state(&[0]).unwrap();
        let t = c.game.gap_table(&e1).unwrap();
        let gaps: Vec<f64> = t.entries.iter().map(|(_, v)| *v).collect();
        assert_eq!(gaps, vec![0.0, -1.0, -1.0]);

        let pl = gallery::platform(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let xo = pl.game.state(vec![0.5, 0.5, 0.5, 0.5]).unwrap();
        let t = pl.game.gap_table(&xo).unwrap();
        assert!(t.entries.iter().all(|(_, v)| v.abs() < 1e-15));
    }

    #[test]
    fn best_response_examples() {
        let hd = gallery::hawk_dove(2.0, 4.0).unwrap();
        let half = hd.game.state(vec![0.5, 0.5]).unwrap();
        assert_eq!(hd.game.best_response_set(&half, 0, 1e-12).unwrap(), vec![0, 1]);
        let y = hd.game.state(vec![0.75, 0.25]).unwrap();
        assert_eq!(hd.game.best_response_set(&y, 0, 1e-12).unwrap(), vec![1]);

        let id = gallery::identity_example();
        let y = id.game.state(vec![0.6, 0.39, 0.01]).unwrap();
        assert_eq!(id.game.best_response_set(&y, 0, 1e-12).unwrap(), vec![0, 1]);
    }

    #[test]
    fn nash_examples() {
        let pl = gallery::platform(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let xa = pl.game.pure_state(&[0, 0]).unwrap();
        assert!(pl.game.is_nash(&xa, 1e-7).unwrap().is_nash);

        let c = gallery::coordination(2).unwrap();
        let x = c.game.state(vec![0.7, 0.3]).unwrap();
        let check = c.game.is_nash(&x, 1e-7).unwrap();
        assert!(!check.is_nash);
        assert_eq!(check.violations.len(), 1);
        assert_eq!(check.violations[0].0, Deviation::new(0, 0));
        assert!((check.violations[0].1 - 0.12).abs() < 1e-12);

        let s = gallery::standards(&[3.0, 2.0, 0.0], 0.5).unwrap();
        let e2 = s.game.pure_state(&[1]).unwrap();
        let check = s.game.is_nash(&e2, 1e-7).unwrap();
        assert_eq!(check.violations.len(), 1);
        assert_eq!(check.violations[0].0, Deviation::new(0, 0));
        assert!((check.violations[0].1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gradient_examples() {
        let rps = gallery::rps();
        let a = rps
            .game
            .gap_gradient(&rps.game.barycenter(), Deviation::new(0, 0))
            .unwrap();
        for (got, want) in a.iter().zip([0.0, -1.0, 1.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        let b = gallery::boundary_example();
        let e1 = b.game.pure_state(&[0]).unwrap();
        assert_eq!(
            b.game.gap_gradient(&e1, Deviation::new(0, 1)).unwrap(),
            vec![0.0, -1.0]
        );
    }

    #[test]
    fn gradient_vanishes_for_single_strategy_population() {
        let game = PopulationGame::new(
            vec![
                PopulationSpec::new("solo", 2.0, &["only"]),
                PopulationSpec::new("other", 1.0, &["a", "b"]),
            ],
            vec![
                AffineBlock {
                    rows: vec![vec![1.0, 3.0, -2.0]],
                    offsets: vec![0.5],
                },
                AffineBlock {
                    rows: vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]],
                    offsets: vec![0.0, 0.0],
                },
            ],
        )
        .unwrap();
        let x = game.state(vec![2.0, 0.3, 0.7]).unwrap();
        let a = game.gap_gradient(&x, Deviation::new(0, 0)).unwrap();
        assert!(a.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn validation_errors() {
        let bad_mass = PopulationGame::new(
            vec![PopulationSpec::new("p", 0.0, &["a"])],
            vec![AffineBlock {
                rows: vec![vec![0.0]],
                offsets: vec![0.0],
            }],
        );
        assert!(matches!(bad_mass, Err(GameError::NonPositiveMass { .. })));

        let dup = PopulationGame::new(
            vec![PopulationSpec::new("p", 1.0, &["a", "a"])],
            vec![AffineBlock {
                rows: vec![vec![0.0, 0.0]; 2],
                offsets: vec![0.0; 2],
            }],
        );
        assert!(matches!(dup, Err(GameError::DuplicateStrategy { .. })));

        let shape = PopulationGame::new(
            vec![PopulationSpec::new("p", 1.0, &["a", "b"])],
            vec![AffineBlock {
                rows: vec![vec![0.0]; 2],
                offsets: vec![0.0; 2],
            }],
        );
        assert!(matches!(shape, Err(GameError::PayoffShape { .. })));

        let g = gallery::coordination(2).unwrap().game;
        assert!(matches!(
            g.state(vec![1.1, -0.1]),
            Err(GameError::NegativeCoordinate { .. })
        ));
        assert!(matches!(
            g.state(vec![0.5, 0.6]),
            Err(GameError::BlockSum { .. })
        ));
    }

    #[test]
    fn states_are_snapped_to_exact_feasibility() {
        let g = gallery::coordination(3).unwrap().game;
        let x = g.state(vec![0.5 + 4e-10, 0.5, -5e-10]).unwrap();
        assert_eq!(x.coords()[2], 0.0);
        assert_eq!(g.support(&x, 0), vec![0, 1]);
        let sum: f64 = x.coords().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }
}
