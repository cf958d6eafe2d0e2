mod common;

use colsel::linalg;
use colsel::oracle::{self, brute_force};
use colsel::selector::isotropic_lower_bound;
use colsel::{
    build_isotropic, gen, greedy_select, is_real_rooted, min_singular_check, smallest_root, verify_bound,
    Polynomial, SelectionReport, DEFAULT_RANK_TOL,
};
use common::{max_coeff_diff, random_blocks, random_isotropic, random_subset};
use rand::Rng;

const EPS: f64 = 1e-6;

#[test]
fn isotropic_guarantee_and_trace_monotonicity() {
    for seed in 0..200u64 {
        let blocks = random_blocks(seed, 12);
        for k in blocks.valid_ks() {
            let prob = blocks.problem(k, EPS);
            let inst = build_isotropic(&prob).unwrap();
            let report = greedy_select(&prob).unwrap();
            let floor = isotropic_lower_bound(&inst, DEFAULT_RANK_TOL).unwrap();

            let achieved = min_singular_check(&inst, &report.subset).unwrap();
            assert!(achieved >= floor - 10.0 * EPS, "seed {seed} k {k}: {achieved} < {floor}");

            let root = smallest_root(&inst.expected_poly(&[]).unwrap(), EPS).unwrap();
            assert!(root >= floor - EPS, "seed {seed} k {k}: root {root} below {floor}");

            let mut prev = root;
            for step in &report.trace {
                assert!(step.lambda_min >= prev - 2.0 * EPS, "seed {seed} k {k}: {:?}", report.trace);
                prev = step.lambda_min;
            }
        }
    }
}

#[test]
fn greedy_sits_between_optimum_and_bound() {
    for seed in 0..60u64 {
        let blocks = random_blocks(500 + seed, 9);
        for k in blocks.valid_ks() {
            let prob = blocks.problem(k, EPS);
            let best = brute_force(&prob).unwrap();
            let report = greedy_select(&prob).unwrap();
            let slack = 1.0 + 1e-9;
            assert!(report.frob_sq * slack >= best.best_frob_sq);
            assert!(report.spec_sq * slack >= best.best_spec_sq);
            assert!(report.bound_holds(1e-7));

            let mut key = report.subset.clone();
            key.sort();
            let listed = best.all_values[&key];
            assert!((listed.frob_sq - report.frob_sq).abs() <= 1e-9 * report.frob_sq);

            let check = verify_bound(&prob, &report.subset, true).unwrap();
            assert!(check.holds, "seed {} k {k}: {check:?}", blocks.seed);
        }
    }
}

#[test]
fn enumeration_covers_every_subset() {
    let blocks = random_blocks(42, 8);
    let k = *blocks.valid_ks().start();
    let prob = blocks.problem(k, EPS);
    let res = brute_force(&prob).unwrap();
    assert_eq!(res.all_values.len() as u128, oracle::binomial(blocks.m, k));
}

#[test]
fn enumeration_guard() {
    let mut rng = gen::rng(1);
    let b = gen::gaussian_matrix(&mut rng, 2, 30);
    let prob = colsel::SelectionProblem::without_fixed(b, 15, 1e-6).unwrap();
    assert!(matches!(brute_force(&prob), Err(colsel::Error::TooLarge { .. })));
}

#[test]
fn expectation_consistency_for_partial_assignments() {
    let mut rng = gen::rng(4);
    for _ in 0..150 {
        let n = rng.random_range(2..=4);
        let m = rng.random_range((n + 2)..=8);
        let ell = rng.random_range(0..=2);
        let k = rng.random_range((n - ell)..m);
        let inst = random_isotropic(&mut rng, n, m, ell, k);
        let t = rng.random_range(0..=k);
        let partial = random_subset(&mut rng, m, t);
        let closed = inst.expected_poly(&partial).unwrap();
        let enumerated = oracle::enumerated_expected_poly(&inst, &partial).unwrap();
        assert!(max_coeff_diff(&closed, &enumerated) <= 1e-8, "{closed:?} vs {enumerated:?}");
        assert_eq!(closed.degree(), Some(n));
        assert!(is_real_rooted(&closed), "{closed:?}");
    }
}

#[test]
fn closed_form_at_tree_root() {
    let mut rng = gen::rng(12);
    for _ in 0..100 {
        let n = rng.random_range(2..=4);
        let m = rng.random_range((n + 2)..=10);
        let ell = rng.random_range(0..=2);
        let k = rng.random_range((n - ell)..m);
        let inst = random_isotropic(&mut rng, n, m, ell, k);

        let mut roots = vec![0.0; n - inst.r()];
        if ell > 0 {
            let svd = linalg::thin_svd(&inst.fixed_block(), DEFAULT_RANK_TOL).unwrap();
            roots.extend(svd.sigma.iter().map(|s| s * s));
        }
        let base = (m - n) as i64;
        let f = Polynomial::from_roots(&roots)
            .shift_power(base, 1e-8)
            .unwrap()
            .derivative(k)
            .shift_power(-(base - k as i64), 1e-8)
            .unwrap()
            .monic();
        let got = inst.expected_poly(&[]).unwrap();
        assert!(max_coeff_diff(&got, &f) <= 1e-8, "{got:?} vs {f:?}");
    }
}

#[test]
fn leaf_polynomials_are_characteristic_polynomials() {
    let mut rng = gen::rng(13);
    let inst = random_isotropic(&mut rng, 3, 6, 1, 3);
    let s = [0, 2, 5];
    let leaf = inst.leaf_poly(&s).unwrap();
    let companion = oracle::companion_roots(&leaf).unwrap();
    let eig = linalg::symmetric_eigenvalues(&inst.gram_for(&s).unwrap()).unwrap();
    for (a, b) in companion.iter().zip(&eig) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn report_json_round_trip() {
    let blocks = random_blocks(9, 10);
    let prob = blocks.problem(*blocks.valid_ks().end(), EPS);
    let report = greedy_select(&prob).unwrap();
    let text = serde_json::to_string(&report).unwrap();
    let back: SelectionReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut keys: Vec<_> = value.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    assert_eq!(
        keys,
        [
            "baseline_frob_sq",
            "baseline_spec_sq",
            "bound_factor",
            "eps",
            "frob_sq",
            "gamma",
            "spec_sq",
            "subset",
            "trace"
        ]
    );
    assert!(value["trace"][0].get("index").is_some());
    assert!(value["trace"][0].get("lambda_min").is_some());
}

#[test]
fn large_instances_stay_within_bound() {
    // the literal (x-1)^(m-n-t) expansion loses every digit well before m = 200
    for (seed, n, m, k) in [(1, 3, 64, 6), (2, 5, 180, 12), (3, 2, 240, 238)] {
        let mut rng = gen::rng(seed);
        let b = gen::gaussian_matrix(&mut rng, n, m);
        let prob = colsel::SelectionProblem::without_fixed(b, k, EPS).unwrap();
        let report = greedy_select(&prob).unwrap();
        assert!(report.warnings.is_empty(), "{:?}", report.warnings);
        assert!(report.bound_holds(1e-7));

        let inst = build_isotropic(&prob).unwrap();
        let floor = isotropic_lower_bound(&inst, DEFAULT_RANK_TOL).unwrap();
        assert!(min_singular_check(&inst, &report.subset).unwrap() >= floor - 10.0 * EPS);
    }
}
