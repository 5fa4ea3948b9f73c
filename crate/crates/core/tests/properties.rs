use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use lsimplex::cli::solve;
use lsimplex::iterative::run_iterative;
use lsimplex::linalg::{self, RationalMatrix};
use lsimplex::oracle::PivotRule;
use lsimplex::paths::{cost_bits, scale_cost, Algorithm};
use lsimplex::polytope::{self, Instance};
use lsimplex::preprocess::{frank_tardos_int, is_lll_reduced, lll_reduce, simultaneous_approximation};
use lsimplex::trace::Trace;
use lsimplex::verify;

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn matrix(rows: &[Vec<i64>]) -> RationalMatrix {
    let cols = rows.first().map_or(0, |r| r.len());
    let r: Vec<Vec<BigInt>> = rows.iter().map(|r| ints(r)).collect();
    RationalMatrix::from_int_rows(cols, &r).unwrap()
}

fn small_instances() -> Vec<Instance> {
    vec![
        polytope::gen_hypercube(2, 2).unwrap(),
        polytope::gen_hypercube(3, 1).unwrap(),
        polytope::gen_degenerate_hypercube(3, 1).unwrap(),
        polytope::gen_degenerate_hypercube(2, 2).unwrap(),
        polytope::gen_odd_cycle_stable_set(5).unwrap(),
        polytope::gen_transportation(&[2, 1], &[1, 2], 2).unwrap(),
    ]
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_is_transpose_invariant(rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 0..5)) {
        let m = matrix(&rows);
        if rows.is_empty() {
            prop_assert_eq!(linalg::rank(&m), 0);
        } else {
            prop_assert_eq!(linalg::rank(&m), linalg::rank(&m.transpose()));
            prop_assert!(linalg::rank(&m) <= 3.min(rows.len()));
        }
    }

    #[test]
    fn projection_is_orthogonal_and_idempotent(
        rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 1..3),
        c in prop::collection::vec(-20i64..=20, 4),
    ) {
        let m = matrix(&rows);
        prop_assume!(linalg::rank(&m) == rows.len());
        let c: Vec<BigRational> = c.into_iter().map(q).collect();
        let p = linalg::project_orthogonal(&c, &m).unwrap();
        prop_assert!(m.mul_vec(&p).iter().all(Zero::is_zero));
        prop_assert_eq!(linalg::project_orthogonal(&p, &m).unwrap(), p.clone());
        let diff: Vec<BigRational> = c.iter().zip(&p).map(|(a, b)| a - b).collect();
        prop_assert!(linalg::in_row_space(&diff, &m));
    }

    #[test]
    fn solve_system_solutions_satisfy(
        rows in prop::collection::vec(prop::collection::vec(-5i64..=5, 3), 3),
        x in prop::collection::vec(-5i64..=5, 3),
    ) {
        let m = matrix(&rows);
        let x: Vec<BigRational> = x.into_iter().map(q).collect();
        let rhs = m.mul_vec(&x);
        let sol = linalg::solve_system(&m, &rhs).unwrap();
        prop_assert_eq!(m.mul_vec(&sol), rhs);
    }

    #[test]
    fn lll_output_is_reduced_and_unimodular(rows in prop::collection::vec(prop::collection::vec(-1000i64..=1000, 3), 3)) {
        let basis: Vec<Vec<BigInt>> = rows.iter().map(|r| ints(r)).collect();
        let m = matrix(&rows);
        prop_assume!(linalg::rank(&m) == 3);
        let red = lll_reduce(&basis).unwrap();
        prop_assert!(is_lll_reduced(&red));
        let det = |b: &[Vec<BigInt>]| {
            &b[0][0] * (&b[1][1] * &b[2][2] - &b[1][2] * &b[2][1])
                - &b[0][1] * (&b[1][0] * &b[2][2] - &b[1][2] * &b[2][0])
                + &b[0][2] * (&b[1][0] * &b[2][1] - &b[1][1] * &b[2][0])
        };
        prop_assert_eq!(det(&basis).abs(), det(&red).abs());
    }

    #[test]
    fn simultaneous_approximation_meets_tolerance(
        num in prop::collection::vec(-1000i64..=1000, 1..5),
        den in 1i64..=997,
        big_n in 2i64..=30,
    ) {
        let alpha: Vec<BigRational> = num.iter().map(|&a| BigRational::new(a.into(), den.into())).collect();
        let bn = BigInt::from(big_n);
        let (qq, p) = simultaneous_approximation(&alpha, &bn);
        prop_assert!(qq.is_positive());
        let tol = BigRational::new(1.into(), bn.clone());
        for (a, pj) in alpha.iter().zip(&p) {
            prop_assert!((BigRational::from_integer(qq.clone()) * a - BigRational::from_integer(pj.clone())).abs() <= tol);
        }
        let n = alpha.len();
        let qmax = (BigInt::one() << (n * (n + 1)).div_ceil(4)) * num_traits::pow(bn, n);
        prop_assert!(qq <= qmax);
    }

    #[test]
    fn rounding_preserves_signs(c in prop::collection::vec(-50i64..=50, 1..=3), big_n in 1i64..=5) {
        let c = ints(&c);
        let r = frank_tardos_int(&c, &BigInt::from(big_n));
        prop_assert!(r.within_bound());
        let n = c.len() as u32;
        let side = 2 * (big_n - 1) + 1;
        for idx in 0..side.pow(n) {
            let mut z = Vec::new();
            let mut t = idx;
            for _ in 0..n {
                z.push(t % side - (big_n - 1));
                t /= side;
            }
            if z.iter().map(|v| v.abs()).sum::<i64>() > big_n - 1 {
                continue;
            }
            let z = ints(&z);
            prop_assert_eq!(dot(&c, &z).signum(), dot(&r.cbreve, &z).signum());
        }
    }

    #[test]
    fn rounding_is_stable_on_its_output(c in prop::collection::vec(-30i64..=30, 1..=3), big_n in 2i64..=4) {
        // rounding c̆ again keeps the sign pattern on the same ball
        let c = ints(&c);
        let bn = BigInt::from(big_n);
        let r1 = frank_tardos_int(&c, &bn);
        let r2 = frank_tardos_int(&r1.cbreve, &bn);
        for z in [vec![1i64, 0, 0], vec![0, 1, 0], vec![1, -1, 0], vec![0, 0, 1]] {
            let z = ints(&z[..c.len()]);
            prop_assert_eq!(dot(&r1.cbreve, &z).signum(), dot(&r2.cbreve, &z).signum());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn scaled_costs_grow_by_doubling(c in prop::collection::vec(-1_000_000_000i64..=1_000_000_000, 1..=8)) {
        let c = ints(&c);
        if let Some(ell) = cost_bits(&c) {
            let mut prev: Option<Vec<BigInt>> = None;
            for t in 0..=ell {
                let ct = scale_cost(&c, t, ell);
                prop_assert!(ct.iter().all(|x| x.abs() <= BigInt::one() << t));
                if let Some(p) = prev {
                    for (a, b) in p.iter().zip(&ct) {
                        let d = BigInt::from(2) * a - b;
                        prop_assert!(d.is_zero() || d.is_one());
                    }
                }
                prev = Some(ct);
            }
            prop_assert_eq!(prev.unwrap(), c);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_algorithm_reaches_the_optimum(which in 0usize..6, c in prop::collection::vec(-1000i64..=1000, 6), rule in 0usize..3) {
        let base = &small_instances()[which];
        let inst = base.with_cost(ints(&c[..base.n()])).unwrap();
        let bf = verify::brute_force_optimum(&inst, inst.cost()).unwrap();
        for alg in Algorithm::ALL {
            let s = solve(&inst, alg, PivotRule::ALL[rule]).unwrap();
            prop_assert_eq!(inst.cost_value(inst.cost(), &s.vertex.coords), bf.value.clone());
            let rep = verify::check_path(&inst, inst.cost(), &s.path).unwrap();
            prop_assert!(rep.all_satisfied(), "{:?}", rep);
        }
    }

    #[test]
    fn fixed_rows_hold_at_every_optimum(which in 0usize..6, c in prop::collection::vec(-1000i64..=1000, 6)) {
        let base = &small_instances()[which];
        let inst = base.with_cost(ints(&c[..base.n()])).unwrap();
        let bf = verify::brute_force_optimum(&inst, inst.cost()).unwrap();
        let run = run_iterative(&inst, PivotRule::FirstImproving).unwrap();
        for rec in &run.iterations {
            for x in &bf.witnesses {
                for &i in &rec.e_after {
                    prop_assert_eq!(inst.row_value(i, x), inst.b()[i].clone());
                }
            }
        }
    }

    #[test]
    fn adjacency_is_symmetric(which in 0usize..6, i in 0usize..64, j in 0usize..64) {
        let inst = &small_instances()[which];
        let vs = verify::enumerate_vertices(inst).unwrap();
        let (x, y) = (&vs[i % vs.len()].coords, &vs[j % vs.len()].coords);
        prop_assert_eq!(verify::check_adjacent(inst, x, y).unwrap(), verify::check_adjacent(inst, y, x).unwrap());
    }

    #[test]
    fn traces_round_trip(which in 0usize..6, c in prop::collection::vec(-100_000i64..=100_000, 6), alg in 0usize..4) {
        let base = &small_instances()[which];
        let inst = base.with_cost(ints(&c[..base.n()])).unwrap();
        let s = solve(&inst, Algorithm::ALL[alg], PivotRule::BestImprovement).unwrap();
        let t = Trace::new(&inst, &s.path).with_iterations(&s.iterations);
        let back = Trace::from_json(&t.to_json()).unwrap();
        prop_assert_eq!(back.to_path(), s.path);
        prop_assert_eq!(back, t);
    }
}
