mod common;

use std::collections::{BTreeMap, BTreeSet};

use probe_machine::aggregation::{Aggregation, CanonicalForm};
use probe_machine::detector::{is_true_solution, prefilter, recycle, separate, ProbeOperationGraph};
use probe_machine::engine::{enumerate_exhaustive, EngineConfig, LoadRequest, Mode, PlatformState};
use probe_machine::encoders::{encode_hamilton, EncodeError};
use probe_machine::model::{
    max_probe_count, validate_data_library, validate_probe_library, DataLibrary, FiberType, ProbeKind, ProbeLibrary,
    ProbeType,
};
use probe_machine::oracles::{brute_aggregations, brute_coloring, brute_hamilton};
use probe_machine::solve::{solve_coloring, solve_hamilton, SolveError, SolveOptions, TableChoice};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn kind_strategy() -> impl Strategy<Value = ProbeKind> {
    prop_oneof![Just(ProbeKind::Connective), Just(ProbeKind::Transitive)]
}

/// A small random instance: data, probes and a target within oracle limits.
fn instance(seed: u64) -> (DataLibrary, ProbeLibrary, ProbeOperationGraph) {
    let mut r = rng(seed);
    let n = r.gen_range(2..=6);
    let data = common::random_data(&mut r, n, 3);
    let probes = common::random_probes(&mut r, &data, ProbeKind::Connective, 8);
    let target = common::random_target(&mut r, &data, 5);
    (data, probes, target)
}

fn canonical(theta: &[Aggregation]) -> BTreeSet<CanonicalForm> {
    theta.iter().map(Aggregation::canonical_form).collect()
}

fn run_platform(
    data: &DataLibrary,
    probes: &ProbeLibrary,
    target: &ProbeOperationGraph,
    copies: u64,
    seed: u64,
) -> (PlatformState, Vec<Aggregation>) {
    let request = LoadRequest::uniform(data, probes, copies);
    let mut state = PlatformState::load(data, probes, &request, target, seed).expect("uniform loads fit");
    let config = EngineConfig { mode: Mode::Stochastic, seed, max_steps: u64::MAX };
    let theta = state.run(&config, |_, s| assert!(s.audit().is_ok()));
    (state, theta)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn probe_libraries_respect_the_bound(seed in any::<u64>(), n in 1usize..7, kind in kind_strategy()) {
        let mut r = rng(seed);
        let data = common::random_data(&mut r, n, 4);
        let probes = common::random_probes(&mut r, &data, kind, 400);
        let report = validate_probe_library(&data, &probes).unwrap();
        prop_assert!(report.probe_types as u64 <= max_probe_count(&data, kind));
        let lib = validate_data_library(&data).unwrap();
        let sizes: Vec<u64> = lib.fiber_counts.iter().map(|&(_, c)| c as u64).collect();
        prop_assert_eq!(sizes.iter().sum::<u64>(), lib.p as u64);
        let mut pairs = 0;
        for i in 0..sizes.len() {
            for t in i + 1..sizes.len() {
                pairs += sizes[i] * sizes[t];
            }
        }
        prop_assert_eq!(pairs, max_probe_count(&data, ProbeKind::Connective));
        prop_assert_eq!(2 * pairs, max_probe_count(&data, ProbeKind::Transitive));
    }

    #[test]
    fn connective_equality_ignores_order(a in (1u32..5, 1u32..4), b in (5u32..9, 1u32..4)) {
        let (x, y) = (FiberType::new(a.0, a.1), FiberType::new(b.0, b.1));
        prop_assert_eq!(ProbeType::connective(x, y), ProbeType::connective(y, x));
        prop_assert_ne!(ProbeType::transitive(x, y), ProbeType::transitive(y, x));
        let mut lib = ProbeLibrary::new(ProbeKind::Connective);
        lib.insert(ProbeType::connective(x, y), Default::default());
        lib.insert(ProbeType::connective(y, x), Default::default());
        prop_assert_eq!(lib.len(), 1);
    }

    #[test]
    fn prefilter_is_implied_by_isomorphism(seed in any::<u64>()) {
        let (data, probes, target) = instance(seed);
        for m in brute_aggregations(&data, &probes, target.threshold()).unwrap() {
            if is_true_solution(&m, &target) {
                prop_assert!(prefilter(&m, &target));
            }
        }
    }

    #[test]
    fn exhaustive_engine_matches_brute_force(seed in any::<u64>()) {
        let (data, probes, target) = instance(seed);
        let engine = enumerate_exhaustive(&data, &probes, &target);
        prop_assert_eq!(engine.len(), canonical(&engine).len(), "duplicates in Θ");
        let oracle: Vec<Aggregation> = brute_aggregations(&data, &probes, target.threshold())
            .unwrap()
            .into_iter()
            .filter(|m| is_true_solution(m, &target))
            .collect();
        prop_assert_eq!(canonical(&engine), canonical(&oracle));
        for m in &engine {
            prop_assert!(m.check(data.discipline).is_ok());
        }
    }

    #[test]
    fn separation_is_a_partition(seed in any::<u64>()) {
        let (data, probes, target) = instance(seed);
        let theta = brute_aggregations(&data, &probes, target.threshold()).unwrap();
        let total = theta.len();
        let store = separate(theta, &target);
        prop_assert_eq!(store.accepted.len() + store.residues.len(), total);
        prop_assert!(store.accepted.iter().all(|m| is_true_solution(m, &target)));
        prop_assert!(store.residues.iter().all(|m| !is_true_solution(m, &target)));
    }

    #[test]
    fn stochastic_runs_conserve_data_and_probes(seed in any::<u64>(), copies in 1u64..5) {
        let (data, probes, target) = instance(seed);
        let (state, theta) = run_platform(&data, &probes, &target, copies, seed);
        let audit = state.audit().unwrap();
        prop_assert_eq!(audit.data_loaded, audit.data_on_platform);
        prop_assert_eq!(audit.probes_loaded, audit.probes_free + audit.probes_bound);
        prop_assert!(audit.max_order <= target.threshold());
        let held: u64 = theta.iter().map(|m| m.order() as u64).sum();
        prop_assert_eq!(held, audit.data_loaded);
        // Load, run, separate, recycle: every instance is either in Q or refunded.
        let store = separate(theta, &target);
        let in_q: u64 = store.accepted.iter().map(|m| m.order() as u64).sum();
        let refund = recycle(&store);
        prop_assert_eq!(in_q + refund.total_data(), audit.data_loaded);
        let by_body: BTreeMap<u32, u64> = store.residues.iter().flat_map(|m| m.members().iter().map(|x| x.body)).fold(
            BTreeMap::new(),
            |mut acc, b| {
                *acc.entry(b).or_default() += 1;
                acc
            },
        );
        prop_assert_eq!(refund.data, by_body);
    }

    #[test]
    fn stochastic_runs_are_deterministic(seed in any::<u64>()) {
        let (data, probes, target) = instance(seed);
        let (_, first) = run_platform(&data, &probes, &target, 3, seed);
        let (_, second) = run_platform(&data, &probes, &target, 3, seed);
        prop_assert_eq!(first, second);
    }

    #[test]
    fn stochastic_solutions_are_exhaustive_solutions(seed in any::<u64>()) {
        let (data, probes, target) = instance(seed);
        let (_, theta) = run_platform(&data, &probes, &target, 2, seed);
        let found = canonical(&separate(theta, &target).accepted);
        let all = canonical(&enumerate_exhaustive(&data, &probes, &target));
        prop_assert!(found.is_subset(&all));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coloring_round_trip(seed in any::<u64>(), n in 1usize..=8, k in 3u32..=4, p in 0.25f64..0.75) {
        let g = common::gnp(&mut rng(seed), n, p);
        let full = solve_coloring(&g, k, &TableChoice::Full, &SolveOptions::default(), &mut |_| {}).unwrap();
        let oracle: Vec<_> = brute_coloring(&g, k, &BTreeMap::new()).unwrap().into_iter().collect();
        prop_assert_eq!(&full.solutions, &oracle);
        prop_assert_eq!(full.stats.accepted + full.stats.residues, full.stats.theta);
    }

    #[test]
    fn hamilton_round_trip(seed in any::<u64>(), n in 5usize..=7) {
        let g = common::connected_gnp(&mut rng(seed), n, 0.5);
        let oracle: Vec<_> = brute_hamilton(&g).unwrap().into_iter().collect();
        match solve_hamilton(&g, None, &SolveOptions::default(), &mut |_| {}) {
            Ok(report) => {
                prop_assert_eq!(&report.solutions, &oracle);
                prop_assert_eq!(report.stats.accepted + report.stats.residues, report.stats.theta);
            }
            Err(SolveError::Encode(e @ (EncodeError::CoverTooSmall { .. } | EncodeError::NoTwoPaths(_)))) => {
                prop_assert!(oracle.is_empty(), "{} but the oracle found cycles", e);
            }
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn hamilton_data_match_two_paths(seed in any::<u64>(), n in 5usize..=9) {
        let g = common::connected_gnp(&mut rng(seed), n, 0.5);
        if let Ok(enc) = encode_hamilton(&g, None) {
            let expected: usize = enc.cover.vertices.iter().map(|&v| {
                let d = g.degree(v);
                d * d.saturating_sub(1) / 2
            }).sum();
            prop_assert_eq!(enc.data.types.len(), expected);
            prop_assert_eq!(enc.data.total_fibers(), 2 * expected);
        }
    }
}
