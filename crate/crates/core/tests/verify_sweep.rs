use eop_core::verify::{run_verify, VerifyConfig};
use eop_core::{Error, WeightSpec};

/// Thresholds must not depend on a lucky seed.
#[test]
fn default_weights_pass_for_several_seeds() {
    for w in [WeightSpec::Unity, WeightSpec::ExpP(0.5), WeightSpec::ExpPPrime(0.3)] {
        for seed in 0..4 {
            let cfg = VerifyConfig {
                weight: w.clone(),
                seed,
                ..VerifyConfig::default()
            };
            let rep = run_verify(&cfg).unwrap();
            let failed: Vec<_> = rep
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| (&c.name, c.value))
                .collect();
            assert!(rep.passed, "{w} seed {seed}: {failed:?}");
        }
    }
}

#[test]
fn other_tau_passes() {
    for tau_im in [0.8, 1.3] {
        let rep = run_verify(&VerifyConfig {
            tau_im,
            ..VerifyConfig::default()
        })
        .unwrap();
        let failed: Vec<_> = rep
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| (&c.name, c.value))
            .collect();
        assert!(rep.passed, "tau {tau_im}: {failed:?}");
    }
}

#[test]
fn perturbation_is_caught() {
    let rep = run_verify(&VerifyConfig {
        perturb: true,
        ..VerifyConfig::default()
    })
    .unwrap();
    assert!(!rep.passed);
    assert!(!rep.criterion_passed(5));
    assert!(!rep.criterion_passed(6));
    // the perturbation only touches the coefficients handed to 5 and 6
    for c in [1, 2, 3, 4, 7, 8, 9, 10, 11] {
        assert!(rep.criterion_passed(c), "criterion {c}");
    }
}

#[test]
fn symmetric_suite_requires_symmetric_weight() {
    let cfg = VerifyConfig {
        weight: WeightSpec::ExpPPrime(0.3),
        symmetric_suite: true,
        ..VerifyConfig::default()
    };
    assert!(matches!(run_verify(&cfg), Err(Error::NotSymmetric)));
    let rep = run_verify(&VerifyConfig {
        weight: WeightSpec::ExpPPrime(0.3),
        ..VerifyConfig::default()
    })
    .unwrap();
    assert!(rep.checks.iter().all(|c| c.criterion != 10));
}

#[test]
fn report_is_deterministic() {
    let cfg = VerifyConfig {
        seed: 11,
        ..VerifyConfig::default()
    };
    let a = serde_json::to_string(&run_verify(&cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&run_verify(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}
