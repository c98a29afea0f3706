mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resonance_core::linalg::dot;
use resonance_core::model::{PotentialSpec, Well, WellShape};
use resonance_core::operator::{
    assemble, compare_spectra, lowest_eigenpairs, minmax_verify, morse_index, DiscreteOperator, EigenOptions, Grid,
    MinmaxOptions,
};

fn random_1d(seed: u64, n: usize, half_width: f64) -> DiscreteOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = Grid::new(1, half_width, n).unwrap();
    let v = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    DiscreteOperator::from_samples(grid, v, 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constant_shift_moves_spectrum_only(seed in any::<u64>(), n in 20usize..90, c in -5.0f64..5.0) {
        let op = random_1d(seed, n, 4.0);
        let a = lowest_eigenpairs(&op, 4).unwrap();
        let b = lowest_eigenpairs(&op.with_constant_offset(c), 4).unwrap();
        for j in 0..4 {
            prop_assert!((b.eigenvalues[j] - a.eigenvalues[j] - c).abs() < 1e-10);
            let overlap = op.grid.inner(&a.eigenvectors[j], &b.eigenvectors[j]).abs();
            prop_assert!((overlap - 1.0).abs() < 1e-8, "overlap {overlap}");
        }
    }

    #[test]
    fn morse_index_is_stable_under_small_perturbations(seed in any::<u64>(), shift in -3.0f64..3.0) {
        let op = random_1d(seed, 60, 3.0).with_constant_offset(shift);
        let base = morse_index(&op, 1e-9).unwrap();
        prop_assume!(base.margin > 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let delta: Vec<f64> = (0..op.dofs()).map(|_| rng.gen_range(-0.49..0.49) * base.margin).collect();
        let moved = morse_index(&op.with_potential_offset(&delta), 1e-9).unwrap();
        prop_assert_eq!(moved.m, base.m);
    }

    #[test]
    fn stencil_is_symmetric_and_shift_makes_it_definite(seed in any::<u64>()) {
        let op = random_1d(seed, 50, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(!seed);
        let v: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (av, aw) = (op.apply_vec(&v), op.apply_vec(&w));
        let scale = dot(&v, &v).sqrt() * dot(&w, &w).sqrt() * 1e4;
        prop_assert!((dot(&av, &w) - dot(&v, &aw)).abs() < 1e-12 * scale);
        let mu1 = lowest_eigenpairs(&op, 1).unwrap().eigenvalues[0];
        let shifted = op.with_constant_offset(1.0 - mu1);
        prop_assert!(dot(&shifted.apply_vec(&v), &v) > 0.0);
    }
}

#[test]
fn sturm_oracle_agrees_on_random_potentials() {
    for seed in 0..5 {
        let op = random_1d(seed, 300, 6.0);
        let h = op.grid.spacing();
        let d: Vec<f64> = op.q().iter().map(|v| 2.0 / (h * h) + v).collect();
        let report = lowest_eigenpairs(&op, 6).unwrap();
        for j in 0..6 {
            let oracle = sturm_eigenvalue(&d, -1.0 / (h * h), j + 1);
            assert!((report.eigenvalues[j] - oracle).abs() < 1e-8 * oracle.abs().max(1.0), "seed {seed} j {j}");
        }
    }
}

#[test]
fn square_well_ground_state_converges_at_second_order() {
    let exact = box_square_well_levels(10.0, 1.0, 20.0, 1)[0];
    let pot = square_well(0.0, 10.0, 1.0);
    let errors: Vec<f64> = [399, 799]
        .iter()
        .map(|&n| {
            let op = assemble(Grid::new(1, 20.0, n).unwrap(), &pot, 0.0).unwrap();
            (lowest_eigenpairs(&op, 1).unwrap().eigenvalues[0] - exact).abs()
        })
        .collect();
    let ratio = errors[0] / errors[1];
    assert!((2.8..=5.2).contains(&ratio), "error ratio {ratio}, errors {errors:?}");
}

#[test]
fn rayleigh_quotients_bound_the_ground_state() {
    let op = random_1d(7, 120, 5.0);
    let mu1 = lowest_eigenpairs(&op, 1).unwrap().eigenvalues[0];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let v: Vec<f64> = (0..120).map(|_| rng.gen_range(-1.0..1.0)).collect();
        assert!(op.rayleigh_quotient(&v) >= mu1 - 1e-10);
    }
}

#[test]
fn minmax_holds_for_square_well() {
    let op = assemble(Grid::new(1, 8.0, 199).unwrap(), &square_well(0.0, 10.0, 1.0), 0.0).unwrap();
    let report = lowest_eigenpairs(&op, 3).unwrap();
    let record = minmax_verify(&op, &report, &MinmaxOptions::default());
    assert!(record.pass, "{record:?}");
}

#[test]
fn deepening_one_well_lowers_the_ground_state() {
    let grid = Grid::new(1, 8.0, 159).unwrap();
    let double = |left: f64| PotentialSpec {
        sigma0: 0.0,
        wells: vec![
            Well { shape: WellShape::Square, depth: left, radius: 1.0, center: vec![-3.0] },
            Well { shape: WellShape::Square, depth: 4.0, radius: 1.0, center: vec![3.0] },
        ],
    };
    let deep = assemble(grid, &double(6.0), 0.0).unwrap();
    let shallow = assemble(grid, &double(4.0), 0.0).unwrap();
    let record = compare_spectra(&deep, &shallow, 2, &EigenOptions::default()).unwrap();
    assert!(record.pass());
    assert!(record.entries[0].strict);
    let dense = dense_eigs(dense_1d(&deep.q(), grid.spacing()));
    assert!((record.entries[0].mu1 - dense[0]).abs() < 1e-9);
}

/// A bump above `σ₀` against the flat potential: the gap in `μ₁` stays
/// positive at every box size while both levels sink to the box bottom.
#[test]
fn bump_counterexample_stays_strict_as_the_box_grows() {
    let sigma0 = 1.0;
    let mut gaps = Vec::new();
    for half_width in [10.0, 20.0, 40.0] {
        let n = (2.0 * half_width / 0.1) as usize - 1;
        let grid = Grid::new(1, half_width, n).unwrap();
        let bump = PotentialSpec {
            sigma0,
            wells: vec![Well { shape: WellShape::Gaussian, depth: 0.5, radius: 1.0, center: vec![0.0] }],
        };
        let lower = assemble(grid, &bump, 0.0).unwrap();
        let flat = assemble(grid, &PotentialSpec::constant(sigma0), 0.0).unwrap();
        let record = compare_spectra(&lower, &flat, 1, &EigenOptions::default()).unwrap();
        assert!(record.pass() && record.entries[0].strict, "L = {half_width}: {record:?}");
        gaps.push((record.entries[0].mu1, record.entries[0].diff));
    }
    assert!(gaps.iter().all(|&(mu, _)| mu < sigma0));
    assert!(gaps.windows(2).all(|w| w[1].0 < w[0].0), "{gaps:?}");
}
