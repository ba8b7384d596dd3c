//! The game document: populations with their affine payoff blocks, plus
//! optional named states and polyhedral regions.
//!
//! ```json
//! {
//!   "name": "boundary",
//!   "populations": [
//!     { "name": "p", "mass": 1.0, "strategies": ["1", "2"],
//!       "A": [[0.0, 0.0], [0.0, -1.0]], "b": [0.0, 0.0] }
//!   ],
//!   "states": { "e1": [1.0, 0.0] },
//!   "regions": { "near": [ { "coeffs": [0.0, 1.0], "rhs": 0.1 } ] }
//! }
//! ```
//!
//! Ambient coordinates are the population blocks in declaration order, and
//! each `A` has one column per ambient coordinate.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sre_core::gallery::GalleryGame;
use sre_core::uncertainty::{Halfspace, PolyhedralRegion};
use sre_core::{AffineBlock, PopulationGame, PopulationSpec, StateVector};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationDoc {
    pub name: String,
    pub mass: f64,
    pub strategies: Vec<String>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDocument {
    #[serde(default)]
    pub name: String,
    pub populations: Vec<PopulationDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub states: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub regions: BTreeMap<String, Vec<Halfspace>>,
}

/// Only the `regions` of a document; everything else is ignored.
#[derive(Debug, Deserialize)]
struct RegionsOnly {
    #[serde(default)]
    regions: BTreeMap<String, Vec<Halfspace>>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn parse_error(path: &str, e: serde_json::Error) -> CliError {
    CliError::Input(format!(
        "{path}: line {}, column {}: {e}",
        e.line(),
        e.column()
    ))
}

impl GameDocument {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| parse_error(origin, e))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read(path)?, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn from_game(
        name: &str,
        game: &PopulationGame,
        states: impl IntoIterator<Item = (String, Vec<f64>)>,
    ) -> Self {
        let populations = game
            .populations()
            .iter()
            .zip(game.payoffs())
            .map(|(spec, block)| PopulationDoc {
                name: spec.name.clone(),
                mass: spec.mass,
                strategies: spec.strategies.clone(),
                a: block.rows.clone(),
                b: block.offsets.clone(),
            })
            .collect();
        Self {
            name: name.to_string(),
            populations,
            states: states.into_iter().collect(),
            regions: BTreeMap::new(),
        }
    }

    pub fn from_gallery(g: &GalleryGame) -> Self {
        Self::from_game(
            &g.name,
            &g.game,
            g.states
                .iter()
                .map(|(n, s)| (n.clone(), s.coords().to_vec())),
        )
    }

    /// Builds and validates the game, then checks every named state and
    /// region against it.
    pub fn to_game(&self) -> Result<PopulationGame, CliError> {
        let field = |k: usize, f: &str, msg: String| CliError::Input(format!("populations[{k}].{f}: {msg}"));
        if self.populations.is_empty() {
            return Err(CliError::Input("populations: at least one population is required".into()));
        }
        let dim: usize = self.populations.iter().map(|p| p.strategies.len()).sum();
        for (k, p) in self.populations.iter().enumerate() {
            if !(p.mass > 0.0 && p.mass.is_finite()) {
                return Err(field(k, "mass", format!("must be positive, got {}", p.mass)));
            }
            if p.strategies.is_empty() {
                return Err(field(k, "strategies", "must not be empty".into()));
            }
            if p.a.len() != p.strategies.len() {
                return Err(field(
                    k,
                    "A",
                    format!("has {} rows, expected {}", p.a.len(), p.strategies.len()),
                ));
            }
            if let Some(r) = p.a.iter().position(|row| row.len() != dim) {
                return Err(field(
                    k,
                    &format!("A[{r}]"),
                    format!("has {} columns, expected {dim}", p.a[r].len()),
                ));
            }
            if p.b.len() != p.strategies.len() {
                return Err(field(
                    k,
                    "b",
                    format!("has {} entries, expected {}", p.b.len(), p.strategies.len()),
                ));
            }
        }
        let specs = self
            .populations
            .iter()
            .map(|p| {
                let labels: Vec<&str> = p.strategies.iter().map(String::as_str).collect();
                PopulationSpec::new(p.name.clone(), p.mass, &labels)
            })
            .collect();
        let blocks = self
            .populations
            .iter()
            .map(|p| AffineBlock {
                rows: p.a.clone(),
                offsets: p.b.clone(),
            })
            .collect();
        let game = PopulationGame::new(specs, blocks)
            .map_err(|e| CliError::Input(format!("populations: {e}")))?;
        for (name, coords) in &self.states {
            game.state(coords.clone())
                .map_err(|e| CliError::Input(format!("states.{name}: {e}")))?;
        }
        for (name, halfspaces) in &self.regions {
            check_region(name, halfspaces, dim)?;
        }
        Ok(game)
    }

    pub fn state(&self, game: &PopulationGame, name: &str) -> Result<StateVector, CliError> {
        let coords = self.states.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.states.keys().map(String::as_str).collect();
            CliError::Input(format!(
                "no state named {name:?}; known states: {}",
                if known.is_empty() { "none".to_string() } else { known.join(", ") }
            ))
        })?;
        game.state(coords.clone())
            .map_err(|e| CliError::Input(format!("states.{name}: {e}")))
    }

    pub fn region(&self, name: &str) -> Result<PolyhedralRegion, CliError> {
        self.regions
            .get(name)
            .map(|h| PolyhedralRegion::new(h.clone()))
            .ok_or_else(|| CliError::Input(format!("no region named {name:?}")))
    }
}

fn check_region(name: &str, halfspaces: &[Halfspace], dim: usize) -> Result<(), CliError> {
    for (k, h) in halfspaces.iter().enumerate() {
        if h.coeffs.len() != dim {
            return Err(CliError::Input(format!(
                "regions.{name}[{k}].coeffs: has {} entries, expected {dim}",
                h.coeffs.len()
            )));
        }
    }
    Ok(())
}

/// Reads the named region from the `regions` table of another document.
pub fn load_region(path: &Path, name: &str, dim: usize) -> Result<PolyhedralRegion, CliError> {
    let origin = path.display().to_string();
    let doc: RegionsOnly = serde_json::from_str(&read(path)?).map_err(|e| parse_error(&origin, e))?;
    let halfspaces = doc
        .regions
        .get(name)
        .ok_or_else(|| CliError::Input(format!("{origin}: no region named {name:?}")))?;
    check_region(name, halfspaces, dim)?;
    Ok(PolyhedralRegion::new(halfspaces.clone()))
}
