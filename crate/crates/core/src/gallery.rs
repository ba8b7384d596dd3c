//! Canonical example games in ambient affine form, each with named states.
//!
//! Closed-form payoffs are rewritten as `F_p(y) = A_p y + b_p` by choosing a
//! representative: where a formula uses `1 - x_H`, the complementary ambient
//! coordinate is used instead, and constants go into `b_p`. The chosen
//! representative is noted on each constructor.

use std::collections::BTreeMap;

use crate::game::{AffineBlock, GameError, PopulationGame, PopulationSpec, StateVector};

/// A gallery game together with documented candidate states.
#[derive(Debug, Clone)]
pub struct GalleryGame {
    pub name: String,
    pub game: PopulationGame,
    pub states: Vec<(String, StateVector)>,
}

impl GalleryGame {
    pub fn state(&self, name: &str) -> Option<&StateVector> {
        self.states.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }
}

pub const NAMES: &[&str] = &[
    "hawk_dove",
    "rps",
    "coordination",
    "binary_symmetric",
    "platform",
    "standards",
    "boundary_example",
    "identity_example",
];

fn one_population(
    name: &str,
    labels: &[&str],
    rows: Vec<Vec<f64>>,
    offsets: Vec<f64>,
) -> Result<PopulationGame, GameError> {
    PopulationGame::new(
        vec![PopulationSpec::new(name, 1.0, labels)],
        vec![AffineBlock { rows, offsets }],
    )
}

fn invalid(msg: &str) -> GameError {
    GameError::InvalidParameter(msg.to_string())
}

fn vertex_states(game: &PopulationGame) -> Result<Vec<(String, StateVector)>, GameError> {
    (0..game.num_strategies(0))
        .map(|i| Ok((format!("e{}", i + 1), game.pure_state(&[i])?)))
        .collect()
}

/// Hawk-Dove with value `v` and cost `c`, requiring `c > v > 0`.
///
/// Coordinates `(x_H, x_D)`. Both payoffs load only on `x_H`:
/// `A_H = (-(V+C)/2, 0)`, `b_H = V` and `A_D = (-V/2, 0)`, `b_D = V/2`.
pub fn hawk_dove(v: f64, c: f64) -> Result<GalleryGame, GameError> {
    if !(v > 0.0 && c > v && c.is_finite()) {
        return Err(invalid("hawk_dove needs C > V > 0"));
    }
    let game = one_population(
        "population",
        &["H", "D"],
        vec![vec![-(v + c) / 2.0, 0.0], vec![-v / 2.0, 0.0]],
        vec![v, v / 2.0],
    )?;
    let mixed = game.state(vec![v / c, 1.0 - v / c])?;
    Ok(GalleryGame {
        name: "hawk_dove".into(),
        game,
        states: vec![("mixed".into(), mixed)],
    })
}

/// Rock-paper-scissors, `F(x) = A x` with the standard cyclic matrix.
pub fn rps() -> GalleryGame {
    let game = one_population(
        "population",
        &["R", "P", "S"],
        vec![
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ],
        vec![0.0; 3],
    )
    .expect("static game");
    let barycenter = game.barycenter();
    GalleryGame {
        name: "rps".into(),
        game,
        states: vec![("barycenter".into(), barycenter)],
    }
}

/// Pure coordination, `F_i(x) = x_i`.
pub fn coordination(n: usize) -> Result<GalleryGame, GameError> {
    if n < 2 {
        return Err(invalid("coordination needs n >= 2"));
    }
    let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let rows = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let game = one_population("population", &refs, rows, vec![0.0; n])?;
    let mut states = vertex_states(&game)?;
    states.push(("uniform".into(), game.barycenter()));
    Ok(GalleryGame {
        name: "coordination".into(),
        game,
        states,
    })
}

/// Binary symmetric game with payoff matrix `(m_ij)`.
///
/// Coordinates `(x_1, x_2)`, so `F_i = m_i1 x_1 + m_i2 x_2`. A `mixed` state
/// is added when the payoff difference crosses zero inside the simplex.
pub fn binary_symmetric(m11: f64, m12: f64, m21: f64, m22: f64) -> Result<GalleryGame, GameError> {
    if ![m11, m12, m21, m22].iter().all(|v| v.is_finite()) {
        return Err(invalid("binary_symmetric entries must be finite"));
    }
    let game = one_population(
        "population",
        &["1", "2"],
        vec![vec![m11, m12], vec![m21, m22]],
        vec![0.0, 0.0],
    )?;
    let mut states = vertex_states(&game)?;
    let (d1, d2) = (m11 - m21, m12 - m22);
    if d1 * d2 < 0.0 {
        let q = d1 / (d1 - d2);
        states.push(("mixed".into(), game.state(vec![1.0 - q, q])?));
    }
    Ok(GalleryGame {
        name: "binary_symmetric".into(),
        game,
        states,
    })
}

/// Two-sided platform adoption: buyers (population 1) and sellers
/// (population 2) choose platform A or B.
///
/// Coordinates `(x_1A, x_1B, x_2A, x_2B)`; `F_1A = alpha x_2A`,
/// `F_1B = beta x_2B`, `F_2A = gamma x_1A - phi`, `F_2B = delta x_1B`.
pub fn platform(
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    phi: f64,
) -> Result<GalleryGame, GameError> {
    let positive = [alpha, beta, gamma, delta]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0);
    if !positive || !(0.0..gamma).contains(&phi) {
        return Err(invalid(
            "platform needs alpha, beta, gamma, delta > 0 and 0 <= phi < gamma",
        ));
    }
    let game = PopulationGame::new(
        vec![
            PopulationSpec::new("buyers", 1.0, &["A", "B"]),
            PopulationSpec::new("sellers", 1.0, &["A", "B"]),
        ],
        vec![
            AffineBlock {
                rows: vec![vec![0.0, 0.0, alpha, 0.0], vec![0.0, 0.0, 0.0, beta]],
                offsets: vec![0.0, 0.0],
            },
            AffineBlock {
                rows: vec![vec![gamma, 0.0, 0.0, 0.0], vec![0.0, delta, 0.0, 0.0]],
                offsets: vec![-phi, 0.0],
            },
        ],
    )?;
    let tau1 = (delta + phi) / (gamma + delta);
    let tau2 = beta / (alpha + beta);
    let states = vec![
        ("xA".into(), game.pure_state(&[0, 0])?),
        ("xB".into(), game.pure_state(&[1, 1])?),
        (
            "xo".into(),
            game.state(vec![tau1, 1.0 - tau1, tau2, 1.0 - tau2])?,
        ),
    ];
    Ok(GalleryGame {
        name: "platform".into(),
        game,
        states,
    })
}

/// Standards adoption, `F_i(x) = q_i + lambda x_i`.
pub fn standards(quality: &[f64], lambda: f64) -> Result<GalleryGame, GameError> {
    let n = quality.len();
    if n < 2 {
        return Err(invalid("standards needs at least two qualities"));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("standards needs lambda > 0"));
    }
    let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let rows = (0..n)
        .map(|i| (0..n).map(|j| if i == j { lambda } else { 0.0 }).collect())
        .collect();
    let game = one_population("population", &refs, rows, quality.to_vec())?;
    let states = vertex_states(&game)?;
    Ok(GalleryGame {
        name: "standards".into(),
        game,
        states,
    })
}

/// `F_1 = 0`, `F_2 = -y_2`: a weak pure equilibrium at `e1`.
pub fn boundary_example() -> GalleryGame {
    let game = one_population(
        "population",
        &["1", "2"],
        vec![vec![0.0, 0.0], vec![0.0, -1.0]],
        vec![0.0, 0.0],
    )
    .expect("static game");
    let states = vertex_states(&game).expect("static states");
    GalleryGame {
        name: "boundary_example".into(),
        game,
        states,
    }
}

/// `F_1 = F_2 = 0`, `F_3 = -1 - y_3`: strategies 1 and 2 are payoff-identical.
pub fn identity_example() -> GalleryGame {
    let game = one_population(
        "population",
        &["1", "2", "3"],
        vec![vec![0.0; 3], vec![0.0; 3], vec![0.0, 0.0, -1.0]],
        vec![0.0, 0.0, -1.0],
    )
    .expect("static game");
    let mut states = vertex_states(&game).expect("static states");
    states.push((
        "half".into(),
        game.state(vec![0.5, 0.5, 0.0]).expect("static state"),
    ));
    GalleryGame {
        name: "identity_example".into(),
        game,
        states,
    }
}

/// Named parameters, each a list of numbers (scalars are one-element lists).
pub type Params = BTreeMap<String, Vec<f64>>;

fn scalar(params: &Params, key: &str, default: f64) -> Result<f64, GameError> {
    match params.get(key) {
        None => Ok(default),
        Some(v) if v.len() == 1 => Ok(v[0]),
        Some(_) => Err(invalid(&format!("parameter {key} must be a single number"))),
    }
}

fn reject_unknown(params: &Params, allowed: &[&str]) -> Result<(), GameError> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(invalid(&format!("unknown parameter {k}"))),
        None => Ok(()),
    }
}

/// Builds a gallery game by name. Missing parameters take the defaults used
/// throughout the documentation (Hawk-Dove `V=2, C=4`, coordination `n=3`,
/// platform all ones with `phi=0`, standards `q=3,2,0, lambda=0.5`, binary
/// `1,0,0,1`).
pub fn by_name(name: &str, params: &Params) -> Result<GalleryGame, GameError> {
    match name {
        "hawk_dove" => {
            reject_unknown(params, &["V", "C"])?;
            hawk_dove(scalar(params, "V", 2.0)?, scalar(params, "C", 4.0)?)
        }
        "rps" => {
            reject_unknown(params, &[])?;
            Ok(rps())
        }
        "coordination" => {
            reject_unknown(params, &["n"])?;
            let n = scalar(params, "n", 3.0)?;
            if n.fract() != 0.0 || n < 0.0 {
                return Err(invalid("n must be a whole number"));
            }
            coordination(n as usize)
        }
        "binary_symmetric" => {
            reject_unknown(params, &["m11", "m12", "m21", "m22"])?;
            binary_symmetric(
                scalar(params, "m11", 1.0)?,
                scalar(params, "m12", 0.0)?,
                scalar(params, "m21", 0.0)?,
                scalar(params, "m22", 1.0)?,
            )
        }
        "platform" => {
            reject_unknown(params, &["alpha", "beta", "gamma", "delta", "phi"])?;
            platform(
                scalar(params, "alpha", 1.0)?,
                scalar(params, "beta", 1.0)?,
                scalar(params, "gamma", 1.0)?,
                scalar(params, "delta", 1.0)?,
                scalar(params, "phi", 0.0)?,
            )
        }
        "standards" => {
            reject_unknown(params, &["q", "lambda"])?;
            let q = params.get("q").cloned().unwrap_or_else(|| vec![3.0, 2.0, 0.0]);
            standards(&q, scalar(params, "lambda", 0.5)?)
        }
        "boundary_example" => {
            reject_unknown(params, &[])?;
            Ok(boundary_example())
        }
        "identity_example" => {
            reject_unknown(params, &[])?;
            Ok(identity_example())
        }
        other => Err(invalid(&format!(
            "unknown gallery game {other:?}; known: {}",
            NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hawk_dove_representation_matches_closed_form() {
        let (v, c) = (2.0, 4.0);
        let g = hawk_dove(v, c).unwrap();
        assert_eq!(g.game.payoffs()[0].rows, vec![vec![-3.0, 0.0], vec![-1.0, 0.0]]);
        assert_eq!(g.game.payoffs()[0].offsets, vec![2.0, 1.0]);
        for k in 0..5 {
            let xh = k as f64 / 4.0;
            let y = g.game.state(vec![xh, 1.0 - xh]).unwrap();
            let f = g.game.evaluate_payoffs(&y).unwrap();
            assert!((f[0][0] - (v - (v + c) / 2.0 * xh)).abs() < 1e-12);
            assert!((f[0][1] - v / 2.0 * (1.0 - xh)).abs() < 1e-12);
        }
    }

    #[test]
    fn platform_layout() {
        let g = platform(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(g.game.num_populations(), 2);
        assert!(g.game.populations().iter().all(|p| p.mass == 1.0 && p.len() == 2));
        assert_eq!(g.state("xo").unwrap().coords(), &[0.5, 0.5, 0.5, 0.5]);
    }

    #[test]
    fn parameter_restrictions() {
        assert!(hawk_dove(4.0, 2.0).is_err());
        assert!(platform(1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(standards(&[1.0, 2.0], 0.0).is_err());
        assert!(coordination(1).is_err());
        let mut p = Params::new();
        p.insert("bogus".into(), vec![1.0]);
        assert!(by_name("rps", &p).is_err());
        assert!(by_name("nope", &Params::new()).is_err());
    }

    #[test]
    fn every_name_builds_with_defaults() {
        for name in NAMES {
            let g = by_name(name, &Params::new()).unwrap();
            assert!(!g.states.is_empty(), "{name}");
        }
    }
}
