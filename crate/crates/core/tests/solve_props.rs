mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resonance_core::model::{build_example51, NonlinearitySpec};
use resonance_core::operator::{lowest_eigenpairs, DiscreteOperator, Grid};
use resonance_core::solve::{
    continue_branch, energy, energy_identity_bound, energy_identity_check, find_nontrivial, newton_solve,
    nonexistence_probe, positivity_shift, residual, shifted_fixed_point_defect, BranchOutcome, ContinuationOptions,
    NewtonOptions, ProbeOptions,
};

fn random_op(seed: u64, n: usize) -> DiscreteOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    DiscreteOperator::from_samples(Grid::new(1, 4.0, n).unwrap(), v, 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_decreases_linearly_in_lambda(seed in any::<u64>(), l1 in -3.0f64..3.0, dl in 0.0f64..3.0) {
        let op = random_op(seed, 40);
        let nl = build_example51(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 7);
        let u: Vec<f64> = (0..40).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let l2 = l1 + dl;
        let norm2 = op.grid.inner(&u, &u);
        let drop = energy(&op, &nl, l2, &u) - energy(&op, &nl, l1, &u);
        prop_assert!(drop <= 1e-12);
        prop_assert!((drop + 0.5 * dl * norm2).abs() <= 1e-10 * (1.0 + norm2));
    }

    #[test]
    fn linear_residual_is_bounded_below_by_the_gap(seed in any::<u64>(), lambda in -4.0f64..4.0) {
        let op = random_op(seed, 50);
        let dense = dense_eigs(dense_1d(&op.q(), op.grid.spacing()));
        let gap = dense.iter().map(|mu| (mu - lambda).abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(gap > 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let u: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = residual(&op, &NonlinearitySpec::zero(), lambda, &u);
        prop_assert!(op.grid.l2_norm(&f) >= gap * op.grid.l2_norm(&u) * (1.0 - 1e-9));
    }
}

#[test]
fn newton_solutions_are_fixed_points_of_the_shifted_map() {
    let op = branch_operator(479);
    let nl = build_example51(4.0).unwrap();
    let opts = NewtonOptions::default();
    let mu1 = lowest_eigenpairs(&op, 1).unwrap().eigenvalues[0];
    let m = positivity_shift(mu1);
    assert!(m + mu1 > 0.0);
    for lambda in [-0.2, -0.1, 0.0] {
        let s = find_nontrivial(&op, &nl, lambda, 3, &[1.0, 2.0, 4.0, 8.0], &opts).unwrap().unwrap();
        let defect = shifted_fixed_point_defect(&op, &nl, lambda, &s.u, m).unwrap();
        assert!(defect < 1e-9, "lambda {lambda}: defect {defect}");
        // A random perturbation is not a fixed point.
        let bumped: Vec<f64> = s.u.iter().enumerate().map(|(i, v)| v + 0.01 * (i as f64).sin()).collect();
        assert!(shifted_fixed_point_defect(&op, &nl, lambda, &bumped, m).unwrap() > 1e-4);
    }
}

#[test]
fn branch_crosses_sigma0_without_degenerating() {
    let op = branch_operator(239);
    let nl = build_example51(4.0).unwrap();
    let opts = ContinuationOptions::default();
    let start = find_nontrivial(&op, &nl, -0.2, 3, &[1.0, 2.0, 4.0, 8.0], &opts.newton).unwrap().unwrap();
    let branch = continue_branch(&op, &nl, -0.2, 0.05, 50, &start.u, &opts).unwrap();
    assert_eq!(branch.outcome, BranchOutcome::ReachedSigma0);
    assert_eq!(branch.nondegenerate_through, Some(branch.states.last().unwrap().lambda));
    assert!(branch.states.iter().all(|s| s.margin > 1e-6));
    assert!(branch.states.windows(2).all(|w| w[0].lambda < w[1].lambda));
    // Neighbouring nondegenerate states share their Morse index.
    for w in branch.states.windows(2) {
        assert_eq!(w[0].morse_m, w[1].morse_m);
    }
    for s in &branch.states {
        let bound = energy_identity_bound(&op, &nl, s.lambda, &s.u);
        assert!(energy_identity_check(s, &op, &nl) <= bound + 1e-8);
        assert!(s.energy > 0.0);
    }
}

#[test]
fn probe_reports_premises() {
    let op = branch_operator(119);
    let zero = nonexistence_probe(&op, &NonlinearitySpec::zero(), 0.0, 4, &ProbeOptions::default()).unwrap();
    assert!(!zero.strict_slope_premise);
    assert!(!zero.premises_hold());
    let nl = build_example51(0.5).unwrap();
    let quiet = nonexistence_probe(&op, &nl, 0.0, 8, &ProbeOptions::default()).unwrap();
    assert_eq!(quiet.k, 3);
    assert!(quiet.premises_hold());
    assert!(quiet.counter_witnesses.is_empty());
}

#[test]
fn zero_seed_stays_at_zero() {
    let op = branch_operator(119);
    let nl = build_example51(4.0).unwrap();
    let s = newton_solve(&op, &nl, -0.1, &vec![0.0; op.dofs()], &NewtonOptions::default()).unwrap();
    assert_eq!(s.iterations, 0);
    assert_eq!(s.energy, 0.0);
    assert_eq!(energy_identity_check(&s, &op, &nl), 0.0);
}
