use decolab::channels::{evolve_analytic, evolve_numeric, ChannelKind, ChannelSpec};
use decolab::convexroof::{roof_minimize, RoofSettings};
use decolab::linalg::numerical_rank;
use decolab::measures::{cut_terms, tau3};
use decolab::qsys::{BipartiteCut, InitialState};
use decolab::separability::ppt_report;
use proptest::prelude::*;

const STATES: [InitialState; 2] = [InitialState::Ghz, InitialState::W];

fn pair() -> impl Strategy<Value = (InitialState, ChannelKind)> {
    (
        prop::sample::select(STATES.to_vec()),
        prop::sample::select(ChannelKind::ALL.to_vec()),
    )
}

#[test]
fn normalized_bound_never_increases() {
    for state in STATES {
        for kind in ChannelKind::ALL {
            let mut prev = f64::INFINITY;
            for i in 0..200 {
                let kt = 1.5 * i as f64 / 199.0;
                let value = tau3(&evolve_analytic(state, kind, kt).unwrap(), state.into())
                    .unwrap()
                    .normalized;
                assert!(
                    value <= prev + 1e-12,
                    "{}/{kind} rises at kt={kt}",
                    state.name()
                );
                prev = value;
            }
        }
    }
}

#[test]
fn pure_initial_states_are_strongly_npt() {
    for state in STATES {
        let report = ppt_report(&state.pure().density()).unwrap();
        assert!(report.npt);
        assert!(report.min_eigenvalue() <= -0.2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bound_terms_are_nonnegative_and_bounded((state, kind) in pair(), kt in 0.0f64..3.0) {
        let rho = evolve_analytic(state, kind, kt).unwrap();
        for cut in BipartiteCut::ALL {
            prop_assert!(cut_terms(&rho, cut).unwrap().terms.iter().all(|&c| c >= 0.0));
        }
        let bound = tau3(&rho, state.into()).unwrap();
        prop_assert!(bound.raw >= 0.0);
        prop_assert!(bound.normalized <= 1.0 + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn integration_preserves_trace((state, kind) in pair(), t in 0.05f64..2.0) {
        let spec = ChannelSpec::new(kind, 1.0).unwrap();
        let rho = evolve_numeric(&state.pure().density(), &spec, t, 0.01).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-9);
        prop_assert_eq!(rho.matrix().hermitian_deviation(), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn roof_sits_above_bound(
        (state, kind) in prop::sample::select(vec![
            (InitialState::Ghz, ChannelKind::PauliZ),
            (InitialState::Ghz, ChannelKind::PauliX),
            (InitialState::W, ChannelKind::PauliZ),
        ]),
        kt in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let rho = evolve_analytic(state, kind, kt).unwrap();
        prop_assume!(numerical_rank(rho.matrix(), None).unwrap() <= 4);
        let settings = RoofSettings { restarts: 2, seed, max_iterations: 200, ..RoofSettings::default() };
        let roof = roof_minimize(&rho, state.into(), &settings).unwrap();
        let bound = tau3(&rho, state.into()).unwrap().normalized;
        prop_assert!(roof.value_normalized >= bound - 5e-3);
        prop_assert!(roof.best_ensemble.reconstruct().distance(rho.matrix()) < 1e-8);
    }
}
