mod common;

use proptest::prelude::*;
use rand::Rng;
use sre_core::diagnostics::{classify_deviation, sre_membership, DeviationKind, DiagnosticConfig};
use sre_core::oracle::{
    payoff_perturbation_check, sample_exposure, strict_pure_margin, SamplingConfig,
};
use sre_core::uncertainty::{box_region, shrinking_diagnostic, u_validity};

use common::{gallery_candidates, random_game, random_state, rng, tie_at};

fn cfg() -> DiagnosticConfig {
    DiagnosticConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn validity_is_monotone_under_inclusion(seed in any::<u64>(), r0 in 0.01f64..0.5) {
        let mut r = rng(seed);
        let g = random_game(&mut r, 2, 3);
        let x = random_state(&mut r, &g, true);
        let g = if r.gen_bool(0.7) { tie_at(&mut r, &g, &x) } else { g };
        let outer = u_validity(&g, &x, &box_region(&g, &x, r0).unwrap(), &cfg()).unwrap();
        let inner = u_validity(&g, &x, &box_region(&g, &x, r0 / 3.0).unwrap(), &cfg()).unwrap();
        if outer.valid {
            prop_assert!(inner.valid);
        }
        for (o, i) in outer.entries.iter().zip(&inner.entries) {
            prop_assert!(i.worst_value <= o.worst_value + 1e-9);
        }
    }

    #[test]
    fn worst_states_reproduce_worst_values(seed in any::<u64>(), radius in 0.01f64..1.0) {
        let mut r = rng(seed);
        let g = random_game(&mut r, 2, 3);
        let x = random_state(&mut r, &g, true);
        let report = u_validity(&g, &x, &box_region(&g, &x, radius).unwrap(), &cfg()).unwrap();
        prop_assert!(!report.empty_region && report.candidate_in_region);
        for e in &report.entries {
            let y = g.state(e.worst_state.clone()).unwrap();
            let gap = g.pure_gap(&x, &y, e.deviation).unwrap();
            prop_assert!((gap - e.worst_value).abs() <= 1e-8);
            // The worst value dominates the value at the candidate itself.
            prop_assert!(e.worst_value >= g.pure_gap(&x, &x, e.deviation).unwrap() - 1e-9);
        }
    }
}

#[test]
fn shrinking_verdict_agrees_with_battery() {
    for (name, g, x) in gallery_candidates() {
        let report = shrinking_diagnostic(&g, &x, 0.5, 12, &cfg()).unwrap();
        let sre = sre_membership(&g, &x, &cfg()).unwrap().is_sre;
        assert_eq!(report.verdict, sre, "{name} at {:?}", x.coords());
    }
}

#[test]
fn sampling_agrees_with_classification() {
    let config = SamplingConfig {
        seed: 2024,
        ..SamplingConfig::default()
    };
    for (name, g, x) in gallery_candidates() {
        let evidence = sample_exposure(&g, &x, &config).unwrap();
        for e in evidence {
            let v = classify_deviation(&g, &x, e.deviation, &cfg()).unwrap();
            let exposed = matches!(
                v.kind,
                DeviationKind::ExposedZeroGap | DeviationKind::PositiveGap
            );
            assert_eq!(
                e.evidence.is_exposed(),
                exposed,
                "{name} at {:?}, {:?}: hits {:?}",
                x.coords(),
                e.deviation,
                e.hits
            );
        }
    }
}

#[test]
fn sampling_is_reproducible() {
    let config = SamplingConfig {
        samples_per_radius: 300,
        seed: 99,
        ..SamplingConfig::default()
    };
    for (_, g, x) in gallery_candidates().into_iter().take(12) {
        let a = sample_exposure(&g, &x, &config).unwrap();
        let b = sample_exposure(&g, &x, &config).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}

#[test]
fn perturbations_below_margin_preserve_strict_pure_sre() {
    for (name, g, x) in gallery_candidates() {
        if strict_pure_margin(&g, &x).is_err() {
            continue;
        }
        for fraction in [0.0, 0.5, 0.9] {
            let report = payoff_perturbation_check(&g, &x, fraction, 25, 3, &cfg()).unwrap();
            assert!(report.preserved, "{name} at {:?}", x.coords());
        }
    }
}
