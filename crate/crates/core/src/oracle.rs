//! Sampling and brute-force oracles.
//!
//! Nothing here touches the cone or linear-programming code: exposure is
//! probed by evaluating gaps at random interior states near the candidate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{sre_membership, DiagnosticConfig, DiagnosticError};
use crate::game::{dot, Deviation, GameError, PopulationGame, StateVector, SUPPORT_TOL};
use crate::structure::{binary_classify, BinaryCase, NonGenericBinary};

/// A sampled gap counts as positive only above this margin.
pub const SAMPLING_MARGIN: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Diagnostic(#[from] DiagnosticError),
    #[error(transparent)]
    NonGeneric(#[from] NonGenericBinary),
    #[error("invalid sampling configuration: {0}")]
    Config(String),
    #[error("state is not a strict pure Nash equilibrium: {0}")]
    NotStrictPure(String),
    #[error("perturbation fraction must lie in [0, 1), got {0}")]
    InvalidFraction(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    /// Strictly decreasing, positive.
    pub radii: Vec<f64>,
    pub samples_per_radius: usize,
    pub seed: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            radii: vec![1e-2, 1e-3, 1e-4],
            samples_per_radius: 2000,
            seed: 0,
        }
    }
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<(), OracleError> {
        if self.radii.is_empty() {
            return Err(OracleError::Config("no radii".into()));
        }
        if self.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(OracleError::Config("radii must be positive".into()));
        }
        if self.radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(OracleError::Config("radii must be strictly decreasing".into()));
        }
        if self.samples_per_radius == 0 {
            return Err(OracleError::Config("need at least one sample".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Evidence {
    /// Positive gaps were hit at every radius; the witness comes from the
    /// smallest one.
    ExposedEvidence { witness: Vec<f64> },
    NoPositiveFound,
}

impl Evidence {
    pub fn is_exposed(&self) -> bool {
        matches!(self, Evidence::ExposedEvidence { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEvidence {
    pub deviation: Deviation,
    /// Number of positive-gap samples at each radius.
    pub hits: Vec<usize>,
    pub evidence: Evidence,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for draw `counter` of `seed`.
fn stream(seed: u64, counter: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(splitmix64(seed) ^ counter))
}

/// Interior state with each block drawn from the flat Dirichlet.
fn random_interior(game: &PopulationGame, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(game.dim());
    for p in 0..game.num_populations() {
        let draws: Vec<f64> = (0..game.num_strategies(p))
            .map(|_| rng.sample::<f64, _>(Exp1) + f64::MIN_POSITIVE)
            .collect();
        let total: f64 = draws.iter().sum();
        out.extend(draws.iter().map(|v| game.mass(p) * v / total));
    }
    out
}

/// A state `(1-t) x + t w` with `w` interior and `|y - x|_inf <= r`.
fn nearby_state(game: &PopulationGame, x: &StateVector, r: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let w = random_interior(game, rng);
    let spread = w
        .iter()
        .zip(x.coords())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let u: f64 = rng.gen_range(0.5..=1.0);
    let t = if spread > 0.0 { (u * r / spread).min(1.0) } else { 1.0 };
    x.coords()
        .iter()
        .zip(&w)
        .map(|(a, b)| (1.0 - t) * a + t * b)
        .collect()
}

/// Probes every pure strategy for positive gaps near `x`.
pub fn sample_exposure(
    game: &PopulationGame,
    x: &StateVector,
    config: &SamplingConfig,
) -> Result<Vec<SampleEvidence>, OracleError> {
    config.validate()?;
    if x.len() != game.dim() {
        return Err(GameError::DimensionMismatch {
            expected: game.dim(),
            got: x.len(),
        }
        .into());
    }
    let deviations = game.deviations();
    let per_sample = config.samples_per_radius as u64;
    // For each radius, per deviation: (hit count, first hit).
    let levels: Vec<Vec<(usize, Option<Vec<f64>>)>> = config
        .radii
        .iter()
        .enumerate()
        .map(|(level, &r)| {
            let samples: Vec<Vec<f64>> = (0..per_sample)
                .into_par_iter()
                .map(|s| {
                    let mut rng = stream(config.seed, level as u64 * per_sample + s);
                    nearby_state(game, x, r, &mut rng)
                })
                .collect();
            deviations
                .iter()
                .map(|&dev| {
                    let mut hits = 0;
                    let mut first = None;
                    for y in &samples {
                        if game.gap_raw(y, x, dev) > SAMPLING_MARGIN {
                            hits += 1;
                            if first.is_none() {
                                first = Some(y.clone());
                            }
                        }
                    }
                    (hits, first)
                })
                .collect()
        })
        .collect();
    Ok(deviations
        .iter()
        .enumerate()
        .map(|(k, &deviation)| {
            let hits: Vec<usize> = levels.iter().map(|l| l[k].0).collect();
            let evidence = if hits.iter().all(|h| *h > 0) {
                Evidence::ExposedEvidence {
                    witness: levels.last().and_then(|l| l[k].1.clone()).unwrap_or_default(),
                }
            } else {
                Evidence::NoPositiveFound
            };
            SampleEvidence {
                deviation,
                hits,
                evidence,
            }
        })
        .collect())
}

/// Played strategy per population and the smallest per-capita payoff
/// advantage over any alternative.
pub fn strict_pure_margin(
    game: &PopulationGame,
    x: &StateVector,
) -> Result<(Vec<usize>, f64), OracleError> {
    let payoffs = game.evaluate_payoffs(x)?;
    let mut played = Vec::with_capacity(game.num_populations());
    let mut margin = f64::INFINITY;
    for (p, f) in payoffs.iter().enumerate() {
        let support = game.support(x, p);
        if support.len() != 1 {
            return Err(OracleError::NotStrictPure(format!(
                "population {p} plays {} strategies",
                support.len()
            )));
        }
        let i = support[0];
        for (j, v) in f.iter().enumerate().filter(|(j, _)| *j != i) {
            let diff = f[i] - v;
            if diff <= SUPPORT_TOL {
                return Err(OracleError::NotStrictPure(format!(
                    "population {p}: strategy {j} does at least as well as {i}"
                )));
            }
            margin = margin.min(diff);
        }
        played.push(i);
    }
    Ok((played, margin))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub margin: f64,
    /// Sup-norm bound on the payoff perturbation, `fraction * margin / 4`.
    pub eta: f64,
    pub trials: usize,
    pub failures: usize,
    pub preserved: bool,
}

/// Perturbs the offsets `b_p` uniformly inside `fraction * margin / 4` and
/// re-runs the full battery at `x` for each draw.
pub fn payoff_perturbation_check(
    game: &PopulationGame,
    x: &StateVector,
    fraction: f64,
    trials: usize,
    seed: u64,
    cfg: &DiagnosticConfig,
) -> Result<PerturbationReport, OracleError> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(OracleError::InvalidFraction(fraction));
    }
    let (_, margin) = strict_pure_margin(game, x)?;
    let eta = fraction * margin / 4.0;
    let outcomes: Vec<bool> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, t);
            let offsets = game
                .payoffs()
                .iter()
                .map(|block| {
                    block
                        .offsets
                        .iter()
                        .map(|b| if eta > 0.0 { b + rng.gen_range(-eta..eta) } else { *b })
                        .collect()
                })
                .collect();
            let perturbed = game.with_offsets(offsets)?;
            Ok(sre_membership(&perturbed, x, cfg)?.is_sre)
        })
        .collect::<Result<_, OracleError>>()?;
    let failures = outcomes.iter().filter(|ok| !**ok).count();
    Ok(PerturbationReport {
        margin,
        eta,
        trials,
        failures,
        preserved: failures == 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsnbReport {
    pub blocking_found: bool,
    pub singleton_improvement: bool,
    /// The two flags agree.
    pub consistent: bool,
    /// A blocking coalition, as population indices, when one was found.
    pub coalition: Option<Vec<usize>>,
}

/// Whether `z_p` strictly improves on `x_p` for population `p` at `x`.
fn improves(f: &[f64], z: &[f64], xp: &[f64]) -> bool {
    dot(z, f) > dot(xp, f) + SAMPLING_MARGIN
}

/// Searches for candidate-state blocking coalitions at `x` and compares the
/// outcome with the singleton pure-improvement test.
///
/// Coalitions are enumerated exhaustively against pure proposals when there
/// are at most 16 populations, then `trials` random coalitions receive random
/// mixed proposals.
pub fn csnb_property(
    game: &PopulationGame,
    x: &StateVector,
    trials: usize,
    seed: u64,
) -> Result<CsnbReport, OracleError> {
    let payoffs = game.evaluate_payoffs(x)?;
    let pops = game.num_populations();
    let singleton_improvement = (0..pops).any(|p| {
        let xp = game.block(x, p);
        (0..game.num_strategies(p)).any(|i| {
            let mut z = vec![0.0; xp.len()];
            z[i] = game.mass(p);
            improves(&payoffs[p], &z, xp)
        })
    });

    let pure_block = |p: usize| {
        let xp = game.block(x, p);
        (0..game.num_strategies(p)).any(|i| {
            let mut z = vec![0.0; xp.len()];
            z[i] = game.mass(p);
            improves(&payoffs[p], &z, xp)
        })
    };
    let mut coalition = None;
    if pops <= 16 {
        for mask in 1u32..(1 << pops) {
            let members: Vec<usize> = (0..pops).filter(|p| mask & (1 << p) != 0).collect();
            if members.iter().all(|&p| pure_block(p)) {
                coalition = Some(members);
                break;
            }
        }
    }
    if coalition.is_none() {
        let mut rng = stream(seed, u64::MAX);
        for _ in 0..trials {
            let members: Vec<usize> = loop {
                let m: Vec<usize> = (0..pops).filter(|_| rng.gen_bool(0.5)).collect();
                if !m.is_empty() {
                    break m;
                }
            };
            let point = random_interior(game, &mut rng);
            let blocks = members.iter().all(|&p| {
                let range = game.block_range(p);
                improves(&payoffs[p], &point[range], game.block(x, p))
            });
            if blocks {
                coalition = Some(members);
                break;
            }
        }
    }
    let blocking_found = coalition.is_some();
    Ok(CsnbReport {
        blocking_found,
        singleton_improvement,
        consistent: blocking_found == singleton_improvement,
        coalition,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssReport {
    pub case: BinaryCase,
    /// ESS states as `(x_1, x_2)`.
    pub pure_ess: Vec<[f64; 2]>,
    pub mixed_ess: Option<[f64; 2]>,
    pub sre: Vec<[f64; 2]>,
    /// Some ESS is not SRE, or the reverse.
    pub divergence: bool,
}

const ESS_GRID: usize = 200;
const ESS_WINDOW: f64 = 0.05;

/// Evolutionary stability in a generic binary symmetric game.
///
/// With `q` the share of strategy 2 and `D(q)` the payoff advantage of
/// strategy 1, an incumbent `q0` beats every nearby mutant `q` when
/// `(q - q0) D(q) > 0`. The check runs on a grid of mutants within
/// `ESS_WINDOW` of each candidate, so it is a finite test, not a proof.
pub fn ess_binary(m11: f64, m12: f64, m21: f64, m22: f64) -> Result<EssReport, OracleError> {
    let diag = binary_classify(m11, m12, m21, m22)?;
    let d1 = m11 - m21;
    let d2 = m12 - m22;
    let advantage = |q: f64| d1 * (1.0 - q) + d2 * q;
    let is_ess = |q0: f64| {
        (1..=ESS_GRID)
            .flat_map(|k| {
                let step = ESS_WINDOW * k as f64 / ESS_GRID as f64;
                [q0 - step, q0 + step]
            })
            .filter(|q| (0.0..=1.0).contains(q))
            .all(|q| (q - q0) * advantage(q) > 0.0)
    };
    let as_state = |q: f64| [1.0 - q, q];
    let pure_ess: Vec<[f64; 2]> = [0.0, 1.0]
        .into_iter()
        .filter(|q| is_ess(*q))
        .map(as_state)
        .collect();
    let mixed_ess = if d1 * d2 < 0.0 {
        let q_star = d1 / (d1 - d2);
        is_ess(q_star).then(|| as_state(q_star))
    } else {
        None
    };
    let mut ess = pure_ess.clone();
    ess.extend(mixed_ess);
    let same = |a: &[f64; 2], b: &[f64; 2]| (a[0] - b[0]).abs() < 1e-12;
    let divergence = ess.len() != diag.sre.len()
        || ess.iter().any(|e| !diag.sre.iter().any(|s| same(e, s)));
    Ok(EssReport {
        case: diag.case,
        pure_ess,
        mixed_ess,
        sre: diag.sre,
        divergence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn quick() -> SamplingConfig {
        SamplingConfig {
            radii: vec![1e-2, 1e-3, 1e-4],
            samples_per_radius: 200,
            seed: 7,
        }
    }

    #[test]
    fn rps_rock_is_exposed() {
        let g = gallery::rps();
        let ev = sample_exposure(&g.game, &g.game.barycenter(), &quick()).unwrap();
        assert!(ev.iter().all(|e| e.evidence.is_exposed()));
        for e in &ev {
            if let Evidence::ExposedEvidence { witness } = &e.evidence {
                let dist = witness
                    .iter()
                    .map(|v| (v - 1.0 / 3.0).abs())
                    .fold(0.0, f64::max);
                assert!(dist <= 1e-4 + 1e-15 && witness.iter().all(|v| *v > 0.0));
            }
        }
    }

    #[test]
    fn boundary_finds_nothing() {
        let g = gallery::boundary_example();
        let ev = sample_exposure(&g.game, g.state("e1").unwrap(), &quick()).unwrap();
        assert!(ev.iter().all(|e| !e.evidence.is_exposed()));
    }

    #[test]
    fn strict_pure_finds_nothing() {
        let g = gallery::coordination(3).unwrap();
        let ev = sample_exposure(&g.game, g.state("e1").unwrap(), &quick()).unwrap();
        assert!(ev.iter().all(|e| !e.evidence.is_exposed()));
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = gallery::hawk_dove(2.0, 4.0).unwrap();
        let x = g.state("mixed").unwrap();
        assert_eq!(
            sample_exposure(&g.game, x, &quick()).unwrap(),
            sample_exposure(&g.game, x, &quick()).unwrap()
        );
    }

    #[test]
    fn bad_config_rejected() {
        let g = gallery::rps();
        let mut c = quick();
        c.radii = vec![1e-3, 1e-2];
        assert!(sample_exposure(&g.game, &g.game.barycenter(), &c).is_err());
    }

    #[test]
    fn perturbation_examples() {
        let cfg = DiagnosticConfig::default();
        let c = gallery::coordination(3).unwrap();
        let r = payoff_perturbation_check(&c.game, c.state("e1").unwrap(), 0.9, 50, 1, &cfg).unwrap();
        assert_eq!(r.margin, 1.0);
        assert!(r.preserved);

        let pl = gallery::platform(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let r = payoff_perturbation_check(&pl.game, pl.state("xA").unwrap(), 0.9, 50, 1, &cfg).unwrap();
        assert_eq!(r.margin, 1.0);
        assert!(r.preserved);

        let r = payoff_perturbation_check(&c.game, c.state("e1").unwrap(), 0.0, 5, 1, &cfg).unwrap();
        assert!(r.preserved && r.eta == 0.0);

        let hd = gallery::hawk_dove(2.0, 4.0).unwrap();
        assert!(matches!(
            payoff_perturbation_check(&hd.game, hd.state("mixed").unwrap(), 0.5, 5, 1, &cfg),
            Err(OracleError::NotStrictPure(_))
        ));
    }

    #[test]
    fn csnb_examples() {
        let c = gallery::coordination(2).unwrap();
        let x = c.game.state(vec![0.7, 0.3]).unwrap();
        let r = csnb_property(&c.game, &x, 100, 3).unwrap();
        assert!(r.blocking_found && r.singleton_improvement && r.consistent);

        let pl = gallery::platform(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let r = csnb_property(&pl.game, pl.state("xo").unwrap(), 100, 3).unwrap();
        assert!(!r.blocking_found && !r.singleton_improvement && r.consistent);
    }

    #[test]
    fn ess_examples() {
        let hd = ess_binary(-1.0, 2.0, 0.0, 1.0).unwrap();
        assert_eq!(hd.case, BinaryCase::AntiCoordination);
        assert_eq!(hd.mixed_ess, Some([0.5, 0.5]));
        assert!(hd.pure_ess.is_empty() && hd.sre.is_empty() && hd.divergence);

        let co = ess_binary(1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(co.pure_ess, vec![[1.0, 0.0], [0.0, 1.0]]);
        assert!(co.mixed_ess.is_none() && !co.divergence);

        let dom = ess_binary(2.0, 2.0, 0.0, 0.0).unwrap();
        assert_eq!(dom.pure_ess, vec![[1.0, 0.0]]);
        assert!(!dom.divergence);

        assert!(ess_binary(1.0, 0.0, 1.0, 2.0).is_err());
    }
}
