use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use e7sp6::coeff::{is_supported, katsurada_poly, tilde};
use e7sp6::jordan::{HalfIntegralSym3, JordanElement};
use e7sp6::lattice::{shell_full, triple_histogram};
use e7sp6::octonion::Octonion;
use e7sp6::qseries::PowerSeries;
use e7sp6::restriction::{enumerate_fiber, NamedIndex};
use e7sp6::solver::{solve_expansion, BasisTable, CoefficientTable, Entry};

fn integral() -> impl Strategy<Value = Octonion> {
    prop::array::uniform8(-3i32..=3).prop_map(|c| (0..8).fold(Octonion::ZERO, |acc, i| acc + Octonion::alpha(i).scale(c[i])))
}

fn small_integral() -> impl Strategy<Value = Octonion> {
    prop::array::uniform8(-1i32..=1).prop_map(|c| (0..8).fold(Octonion::ZERO, |acc, i| acc + Octonion::alpha(i).scale(c[i])))
}

fn element() -> impl Strategy<Value = JordanElement> {
    (prop::array::uniform3(-3i64..=3), small_integral(), small_integral(), small_integral())
        .prop_map(|(d, x, y, z)| JordanElement::from_integers(d, [x, y, z]))
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, ..ProptestConfig::default() })]

    #[test]
    fn norm_is_multiplicative(x in integral(), y in integral()) {
        let p = x * y;
        prop_assert!(p.is_integral());
        prop_assert_eq!(p.norm(), x.norm() * y.norm());
        prop_assert_eq!((x * y).conj(), y.conj() * x.conj());
    }

    #[test]
    fn alternative_laws(x in integral(), y in integral()) {
        prop_assert_eq!((x * x) * y, x * (x * y));
        prop_assert_eq!((y * x) * x, y * (x * x));
    }

    #[test]
    fn real_part_of_conj_product(x in integral(), y in integral()) {
        // Re(x̄y) = ⟨x, y⟩
        prop_assert_eq!(i64::from((x.conj() * y).real_doubled()), x.dot_doubled(&y) / 2);
    }

    #[test]
    fn adjoint_identities(t in element()) {
        let d = t.det();
        let c = t.cross();
        prop_assert_eq!(c.det(), &d * &d);
        prop_assert_eq!(t.trace_pairing(&c), rat(3) * &d);
    }

    #[test]
    fn split_reassembles(t in element()) {
        let (s, t2) = t.split().unwrap();
        let e = s.embed();
        prop_assert!(t2.diag().iter().all(|v| v.is_zero()));
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            prop_assert!(t2.off(i, j).is_imaginary());
            prop_assert_eq!(e.off(i, j) + t2.off(i, j), t.off(i, j));
        }
        prop_assert_eq!(e.diag(), t.diag());
    }

    #[test]
    fn permutation_preserves_det(t in element(), k in 0usize..6) {
        let perms = [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        prop_assert_eq!(t.permuted(perms[k]).det(), t.det());
        let it = t.to_integral().unwrap();
        prop_assert_eq!(it.permuted(perms[k]).det(), it.det());
        prop_assert_eq!(it.permuted(perms[k]).content(), it.content());
    }

    #[test]
    fn series_ring_laws(a in prop::collection::vec(-9i64..=9, 8), b in prop::collection::vec(-9i64..=9, 8), c in prop::collection::vec(-9i64..=9, 8)) {
        let (a, b, c) = (PowerSeries::from_integers(a), PowerSeries::from_integers(b), PowerSeries::from_integers(c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.coeff(0).is_zero() {
            prop_assert_eq!(&a * &a.inverse().unwrap(), PowerSeries::one(8));
        }
    }

    #[test]
    fn fiber_members_split_to_base(d in prop::array::uniform3(1i64..=2), o in prop::array::uniform3(-1i64..=1)) {
        let s = HalfIntegralSym3::new(d, o);
        prop_assume!(s.is_pd() && d.iter().sum::<i64>() <= 5);
        for t in enumerate_fiber(&s, true).unwrap() {
            prop_assert!(t.is_pd());
            let (s2, _) = JordanElement::from(t).split().unwrap();
            prop_assert_eq!(&s2, &s);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn solver_round_trip(
        d in 1usize..=6,
        entries in prop::collection::vec((-20i64..=20, 1i64..=5), 36),
        coeffs in prop::collection::vec((-50i64..=50, 1i64..=9), 6),
    ) {
        let cols: Vec<NamedIndex> = [NamedIndex::O, NamedIndex::U2, NamedIndex::U4, NamedIndex::U6, NamedIndex::W, NamedIndex::S1][..d].to_vec();
        let a: Vec<Vec<BigRational>> = (0..d)
            .map(|i| (0..d).map(|j| { let (n, m) = entries[i * 6 + j]; BigRational::new(n.into(), m.into()) }).collect())
            .collect();
        let c: Vec<BigRational> = coeffs[..d].iter().map(|&(n, m)| BigRational::new(n.into(), m.into())).collect();
        let table = BasisTable {
            weight: None,
            forms: (0..d).map(|i| format!("f{i}")).collect(),
            columns: cols.clone(),
            entries: a.iter().map(|r| r.iter().cloned().map(Entry::exact).collect()).collect(),
        };
        prop_assume!(table.rank_report().is_full());
        let b: Vec<(NamedIndex, BigRational)> = (0..d)
            .map(|j| (cols[j], (0..d).fold(BigRational::zero(), |s, i| s + &c[i] * &a[i][j])))
            .collect();
        let r = solve_expansion(&table, &CoefficientTable::new("F", b)).unwrap();
        prop_assert_eq!(r.coefficients, c);
        prop_assert!(r.residuals.iter().all(|(_, v)| v.is_zero()));
    }
}

#[test]
fn unit_shell_closed_under_products() {
    let shell = shell_full(1);
    for x in shell.iter() {
        for y in shell.iter() {
            let p = *x * *y;
            assert!(p.is_integral());
            assert_eq!(p.norm(), BigRational::one());
        }
    }
}

#[test]
fn triple_histogram_symmetries() {
    for norms in [(1, 1, 1), (2, 1, 1), (2, 2, 1)] {
        let (a, b, c) = norms;
        let h = triple_histogram(a, b, c).unwrap();
        for (t, n) in &h {
            assert_eq!(h.get(&-t), Some(n), "{norms:?} at ±{t}");
        }
        for p in [(b, a, c), (a, c, b), (c, b, a), (b, c, a), (c, a, b)] {
            assert_eq!(triple_histogram(p.0, p.1, p.2).unwrap(), h, "{p:?}");
        }
    }
}

#[test]
fn tilde_is_symmetric() {
    let mut checked = 0;
    for t2 in 0..=4u32 {
        for t3 in t2..=6u32 {
            for tau in [[0, t2, t3], [1, 1, 1]] {
                if !is_supported(tau) {
                    continue;
                }
                for p in [2u64, 3, 5, 7, 11, 13] {
                    let f = katsurada_poly(tau, p).unwrap();
                    assert_eq!(f[0], BigInt::one());
                    assert!(tilde(&f).is_symmetric(), "{tau:?} at {p}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn fiber_invariant_under_permutation() {
    let s = HalfIntegralSym3::new([1, 2, 2], [1, 0, 0]);
    let n = enumerate_fiber(&s, true).unwrap().len();
    for (d, o) in [([2, 1, 2], [1, 0, 0]), ([2, 2, 1], [0, 0, 1]), ([1, 2, 2], [0, 1, 0])] {
        assert_eq!(enumerate_fiber(&HalfIntegralSym3::new(d, o), true).unwrap().len(), n, "{d:?} {o:?}");
    }
}
