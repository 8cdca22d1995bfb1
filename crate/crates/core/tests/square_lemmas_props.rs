use kloost_core::modarith::{rat_is_square_closure, PrimeModulus};
use kloost_core::square_lemmas::{
    exception_set, f_alpha_beta, pole_sum, three_pole_necessary, two_pole_is_square, TwoPoleSpec,
    LISTED_PAIRS,
};
use rayon::prelude::*;

#[test]
fn soundness_of_exception_set() {
    for q in [5u64, 7, 11, 13] {
        let pm = PrimeModulus::new(q).unwrap();
        let set = exception_set(&pm).unwrap();
        for alpha in 0..q {
            for beta in 0..q {
                let Ok(f) = f_alpha_beta(alpha, beta, &pm) else {
                    continue;
                };
                if f.is_zero() || rat_is_square_closure(&f).unwrap().is_square {
                    assert!(set.contains(alpha, beta), "q={q}: ({alpha},{beta}) missing");
                }
            }
        }
        for (a, b) in LISTED_PAIRS {
            assert!(
                set.contains(pm.reduce(a), pm.reduce(b)),
                "q={q}: listed ({a},{b})"
            );
        }
        assert!(set.len() <= 14);
    }
}

#[test]
fn two_pole_matches_oracle() {
    for q in [5u64, 7] {
        for a in 1..q {
            for b in 1..q {
                for r1 in 0..q {
                    for r2 in (0..q).filter(|&r| r != r1) {
                        let spec = TwoPoleSpec::new(a, b, r1, r2, q).unwrap();
                        let oracle = rat_is_square_closure(&spec.function()).unwrap().is_square;
                        assert_eq!(two_pole_is_square(&spec), oracle, "q={q} {spec:?}");
                    }
                }
            }
        }
    }
}

/// Every three-pole function with poles failing the criterion is a non-square.
#[test]
fn three_pole_criterion_is_necessary() {
    for q in [5u64, 7, 11, 13] {
        let pm = PrimeModulus::new(q).unwrap();
        let mut triples = Vec::new();
        for r1 in 0..q {
            for r2 in r1 + 1..q {
                for r3 in r2 + 1..q {
                    triples.push((r1, r2, r3));
                }
            }
        }
        let violations: Vec<_> = triples
            .par_iter()
            .filter(|&&(r1, r2, r3)| !three_pole_necessary(r1, r2, r3, &pm).unwrap())
            .flat_map_iter(|&(r1, r2, r3)| {
                let mut bad = Vec::new();
                for a in 1..q {
                    for b in 1..q {
                        for c in 1..q {
                            let f = pole_sum(&[(a, r1), (b, r2), (c, r3)], q);
                            if rat_is_square_closure(&f).unwrap().is_square {
                                bad.push((r1, r2, r3, a, b, c));
                            }
                        }
                    }
                }
                bad
            })
            .collect();
        assert!(
            violations.is_empty(),
            "q={q}: {:?}",
            &violations[..violations.len().min(5)]
        );
    }
}
