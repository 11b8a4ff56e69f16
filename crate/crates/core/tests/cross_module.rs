use std::f64::consts::TAU;

use exclusion_core::cfs::{cfs_excludable, states_with_overlaps};
use exclusion_core::family::{family_states, ExcludedPairParams, FamilyParams};
use exclusion_core::linalg::{haar_random_state_with, seeded_rng, CVec, PureState};
use exclusion_core::qcqp::{min_over_assignments, QcqpConfig};
use exclusion_core::sdp::{
    reduce_to_extremal, solve_exclusion_sdp, validate_povm, ExclusionInstance, SolverConfig,
    StateSpec,
};
use exclusion_core::EPS_ZERO;

use rand::Rng;

fn family_instance(seed: u64) -> Vec<PureState> {
    let mut rng = seeded_rng(seed);
    let p = FamilyParams::new(
        rng.random_range(0.05..0.95),
        10f64.powf(rng.random_range(-1.0..1.0)),
        rng.random_range(0.0..TAU),
    )
    .unwrap();
    let b1 = rng.random_range(0.1..0.9) * p.b1_bound();
    let c1 = rng.random_range(0.1..0.9) * p.c1_bound();
    let q = ExcludedPairParams::new(
        &p,
        b1,
        c1,
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
    )
    .unwrap();
    family_states(&p, &q).unwrap().to_vec()
}

#[test]
fn pairs_agree_in_every_dimension() {
    let mut rng = seeded_rng(11);
    for dim in 2..=6 {
        for k in 0..6 {
            let a = haar_random_state_with(dim, &mut rng).unwrap();
            let b = if k % 2 == 0 {
                haar_random_state_with(dim, &mut rng).unwrap()
            } else {
                // Gram-Schmidt a random vector against a.
                let r = haar_random_state_with(dim, &mut rng).unwrap();
                let ov = a.inner(&r);
                let diff = r
                    .vec()
                    .entries()
                    .iter()
                    .zip(a.vec().entries())
                    .map(|(x, y)| x - y * ov)
                    .collect();
                PureState::normalized(CVec::new(diff).unwrap()).unwrap()
            };
            let states = vec![a, b];
            let sdp = solve_exclusion_sdp(
                &ExclusionInstance::pure(states.clone()).unwrap(),
                &SolverConfig::default(),
            )
            .unwrap();
            let proj = min_over_assignments(&states, &QcqpConfig::default()).unwrap();
            assert_eq!(
                sdp.verdict(EPS_ZERO),
                proj.verdict(EPS_ZERO),
                "dim {dim} trial {k}"
            );
            assert_eq!(
                sdp.verdict(EPS_ZERO),
                Some(k % 2 == 1),
                "dim {dim} trial {k}"
            );
        }
    }
}

#[test]
fn family_instances_are_excluded_by_every_method() {
    for seed in 0..8 {
        let states = family_instance(seed);
        assert!(
            cfs_excludable(&states[0], &states[1], &states[2], EPS_ZERO)
                .unwrap()
                .excludable
        );

        let instance = ExclusionInstance::pure(states.clone()).unwrap();
        let sol = solve_exclusion_sdp(&instance, &SolverConfig::default()).unwrap();
        assert_eq!(
            sol.verdict(EPS_ZERO),
            Some(true),
            "seed {seed}: {}",
            sol.primal_value
        );

        let proj = min_over_assignments(&states, &QcqpConfig::default()).unwrap();
        assert!(proj.value <= EPS_ZERO, "seed {seed}: {}", proj.value);
    }
}

#[test]
fn optimal_povms_reduce_to_at_most_one_heavy_element() {
    for seed in 0..8 {
        let states = family_instance(100 + seed);
        let instance = ExclusionInstance::pure(states).unwrap();
        let costs = instance.costs();
        let sol = solve_exclusion_sdp(&instance, &SolverConfig::default()).unwrap();
        let reduced = reduce_to_extremal(&sol.povm, &costs);
        let report = validate_povm(&reduced);
        assert!(report.valid, "{report:?}");
        assert!(reduced.objective(&costs) <= sol.povm.objective(&costs) + 1e-12);
        assert!(
            report.ranks.iter().filter(|&&r| r >= 2).count() <= 1,
            "{:?}",
            report.ranks
        );
    }
}

#[test]
fn weights_do_not_change_the_verdict() {
    let mut rng = seeded_rng(5);
    let mut cases: Vec<Vec<PureState>> = (0..4).map(|s| family_instance(200 + s)).collect();
    cases.extend((0..4).map(|_| {
        (0..3)
            .map(|_| haar_random_state_with(3, &mut rng).unwrap())
            .collect()
    }));
    for states in cases {
        let uniform = ExclusionInstance::pure(states.clone()).unwrap();
        let base = solve_exclusion_sdp(&uniform, &SolverConfig::default())
            .unwrap()
            .verdict(EPS_ZERO);
        let specs: Vec<StateSpec> = states.iter().cloned().map(StateSpec::Pure).collect();
        let weighted = ExclusionInstance::new(specs, Some(vec![0.2, 0.3, 0.5])).unwrap();
        let sol = solve_exclusion_sdp(&weighted, &SolverConfig::default()).unwrap();
        assert_eq!(sol.verdict(EPS_ZERO), base);
    }
}

#[test]
fn interior_cfs_triple_is_excluded_by_the_sdp() {
    // Equal overlaps j with 3j² + 2j³ = 0.999, found by bisection.
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if 3.0 * mid * mid + 2.0 * mid.powi(3) < 0.999 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let states = states_with_overlaps(lo, lo, lo).unwrap();
    let lhs = cfs_excludable(&states[0], &states[1], &states[2], EPS_ZERO)
        .unwrap()
        .lhs;
    assert!((lhs - 0.999).abs() < 1e-12, "{lhs}");
    let sol = solve_exclusion_sdp(
        &ExclusionInstance::pure(states.to_vec()).unwrap(),
        &SolverConfig::default(),
    )
    .unwrap();
    assert_eq!(sol.verdict(EPS_ZERO), Some(true), "{}", sol.primal_value);
}
