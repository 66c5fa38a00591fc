use diagpair_core::certificate::{verify, Certificate};
use diagpair_core::congruence::oracle_subset_solution;
use diagpair_core::generate::{random_system, Profile};
use diagpair_core::hensel::{check_solution, lift};
use diagpair_core::pipeline::{solve, theorem_min_s, Mode, Route, SolveOptions};
use diagpair_core::{Error, System};

const OPPORTUNISTIC: SolveOptions = SolveOptions { mode: Mode::Opportunistic, strict_constants: false };

#[test]
fn three_column_example_inside_a_larger_system() {
    let mut cols = vec![[1u128, 3], [3, 1], [5, 5]];
    cols.extend((0..60u128).map(|i| [3 * i + 1, 9 * i + 2]));
    let sys = System::new(3, 1, 8, &cols).unwrap();
    assert!(verify(&sys, &Certificate::new(vec![0, 1, 2])));
    let report = solve(&sys, &OPPORTUNISTIC).unwrap();
    let solved = report.solved_system(&sys);
    assert!(verify(solved, &report.certificate));
    assert!(oracle_subset_solution(solved).is_some());
}

#[test]
fn theorem_sized_runs_certify_and_lift() {
    for (p, tau, seeds) in [(5u64, 1u32, 0..10u64), (7, 1, 0..3), (7, 2, 0..2)] {
        let s = theorem_min_s(p, tau, false) as usize;
        for seed in seeds {
            let sys = random_system(p, tau, tau + 10, s, seed, Profile::Normalized).unwrap();
            let report = solve(&sys, &SolveOptions::default()).unwrap();
            assert!(matches!(report.route, Route::Pipeline { .. }));
            assert!(report.normalized.is_none());
            assert!(verify(&sys, &report.certificate), "p={p} tau={tau} seed={seed}");
            let sol = lift(&sys, &report.certificate, tau + 9).unwrap();
            assert!(check_solution(&sys, &sol.values, tau + 9));
        }
    }
}

#[test]
fn oracle_agrees_whenever_the_pipeline_succeeds() {
    for seed in 0..10 {
        let sys = random_system(5, 1, 6, 1541, 100 + seed, Profile::Normalized).unwrap();
        let report = solve(&sys, &SolveOptions::default()).unwrap();
        let oracle = oracle_subset_solution(&sys).expect("pipeline found a certificate");
        assert!(verify(&sys, &oracle));
        assert!(verify(&sys, &report.certificate));
    }
}

#[test]
fn raw_systems_solve_through_normalization_and_pull_back() {
    let mut pulled = 0;
    for seed in 0..20 {
        let sys = random_system(3, 1, 40, 120, seed, Profile::Raw).unwrap();
        let report = match solve(&sys, &OPPORTUNISTIC) {
            Ok(r) => r,
            Err(Error::Unsolvable(_)) => continue,
            Err(e) => panic!("seed {seed}: {e}"),
        };
        let solved = report.solved_system(&sys);
        assert!(verify(solved, &report.certificate));
        let Some(norm) = &report.normalized else { continue };
        let k = solved.precision();
        let sol = lift(solved, &report.certificate, k).unwrap();
        let (x, valid) = norm.pull_back(&sys, &sol.values, k);
        if valid >= 1 {
            assert!(check_solution(&sys, &x, valid), "seed {seed}");
            pulled += 1;
        }
    }
    assert!(pulled > 0);
}

#[test]
fn guaranteed_mode_refuses_systems_below_the_bound() {
    let sys = random_system(5, 1, 6, 1540, 0, Profile::Normalized).unwrap();
    assert!(matches!(solve(&sys, &SolveOptions::default()), Err(Error::InsufficientVariables(_))));
    let sys = random_system(3, 1, 6, 2000, 0, Profile::Normalized).unwrap();
    assert!(matches!(solve(&sys, &SolveOptions::default()), Err(Error::InsufficientVariables(_))));
}

#[test]
fn unsolvable_systems_are_reported() {
    // x^d = y^d = 0 has no solution with a unit
    let sys = System::new(3, 1, 6, &[[1, 0], [0, 1]]).unwrap();
    assert!(matches!(solve(&sys, &OPPORTUNISTIC), Err(Error::Unsolvable(_))));
}
