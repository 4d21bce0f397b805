use std::collections::BTreeSet;

use proptest::prelude::*;

use wbk_core::cli::{emit_json, Format, Report};
use wbk_core::qfield::{BigRational, LinearSystem, Matrix, Poly, RationalFn};
use wbk_core::repcalc::{conformal_weight, edges, weyl_dim, Bundle, Rank, SpnWeight};
use wbk_core::spectra::{vanishing_set, Scope};
use wbk_core::stability::{theorem_a, EigenDim, WolfTable};
use wbk_core::wbk::{
    derive_identity, input_expr, scalar_solve, universal_exprs, CheckStatus, Database,
    IdentityCheck, OpExpr, OpSymbol,
};

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-6i64..=6, 1..4).prop_map(|c| Poly::from_ints(&c))
}

fn ratfn() -> impl Strategy<Value = RationalFn> {
    (poly(), poly()).prop_filter_map("zero denominator", |(p, q)| {
        RationalFn::normalize(p, q).ok()
    })
}

fn linear_ratfn() -> impl Strategy<Value = RationalFn> {
    let lin = || prop::collection::vec(-6i64..=6, 1..3).prop_map(|c| Poly::from_ints(&c));
    (lin(), lin()).prop_filter_map("zero denominator", |(p, q)| {
        RationalFn::normalize(p, q).ok()
    })
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn bundle() -> impl Strategy<Value = Bundle> {
    (0u32..4, prop::collection::vec(0u32..4, 0..4)).prop_map(|(k, mut parts)| {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Bundle::new(k, SpnWeight::new(parts).unwrap())
    })
}

fn alias() -> impl Strategy<Value = Bundle> {
    let all: Vec<Bundle> = Bundle::aliases().map(|(_, b)| b).collect();
    prop::sample::select(all)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn evaluation_is_a_ring_map(p in ratfn(), r in ratfn(), n in 2i64..=32) {
        let (Ok(pv), Ok(rv)) = (p.evaluate(n), r.evaluate(n)) else { return Ok(()); };
        prop_assert_eq!((&p + &r).evaluate(n).unwrap(), &pv + &rv);
        prop_assert_eq!((&p - &r).evaluate(n).unwrap(), &pv - &rv);
        prop_assert_eq!((&p * &r).evaluate(n).unwrap(), &pv * &rv);
        if rv != q(0, 1) {
            let quotient = p.checked_div(&r).unwrap();
            prop_assert_eq!(quotient.evaluate(n).unwrap(), &pv / &rv);
        }
    }

    #[test]
    fn normalize_idempotent(p in poly(), d in poly(), n in 2i64..=32) {
        let Ok(f) = RationalFn::normalize(p.clone(), d.clone()) else { return Ok(()); };
        let again = RationalFn::normalize(f.numer().clone(), f.denom().clone()).unwrap();
        prop_assert_eq!(&again, &f);
        let dv = d.eval_int(n);
        if dv != q(0, 1) {
            prop_assert_eq!(f.evaluate(n).unwrap(), p.eval_int(n) / dv);
        }
    }

    #[test]
    fn grammar_round_trip(f in ratfn()) {
        let back: RationalFn = f.to_grammar().parse().unwrap();
        prop_assert_eq!(back, f);
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conformal_weights_pair_to_2n(b in bundle(), n in 2i64..=10) {
        prop_assume!(b.min_rank() <= n);
        for nu in 1..=n as i32 {
            let s = &conformal_weight(&b, nu, Rank::At(n)) + &conformal_weight(&b, -nu, Rank::At(n));
            prop_assert_eq!(s, RationalFn::from_int(2 * n));
        }
    }

    #[test]
    fn edges_are_distinct_and_reversible(b in bundle(), n in 2i64..=8) {
        prop_assume!(b.min_rank() <= n);
        let es = edges(&b, Rank::At(n)).unwrap();
        let targets: BTreeSet<&Bundle> = es.iter().map(|e| &e.target).collect();
        prop_assert_eq!(targets.len(), es.len());
        for e in &es {
            let parts = e.target.weight.parts();
            prop_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
            let back = e.reversed().unwrap();
            prop_assert_eq!(&back.target, &b);
            let product = &e.relative_dim_constant().unwrap() * &back.relative_dim_constant().unwrap();
            prop_assert!(product.is_one());
        }
    }

    #[test]
    fn dim_poly_matches_weyl_dim(b in bundle(), n in 2i64..=32) {
        prop_assume!(b.min_rank() <= n);
        prop_assert_eq!(b.dim_poly().eval_int(n), BigRational::from_integer(b.dim(n).unwrap()));
    }

    #[test]
    fn vanishing_set_shrinks_as_lambda_grows(
        b in alias(),
        n in 2i64..=12,
        l1 in 0i64..=40,
        step in 0i64..=20,
        strict in any::<bool>(),
    ) {
        prop_assume!(b.min_rank() <= n);
        let lo = RationalFn::ratio(l1, 16 * n);
        let hi = RationalFn::ratio(l1 + step, 16 * n);
        let small = vanishing_set(&b, &lo, strict, Scope::At(n)).unwrap().vanishing;
        let big = vanishing_set(&b, &hi, strict, Scope::At(n)).unwrap().vanishing;
        prop_assert!(big.is_subset(&small));
        let commuting: BTreeSet<_> = edges(&b, Rank::At(n)).unwrap().into_iter().filter(|e| e.commuting).map(|e| e.index).collect();
        prop_assert!(small.is_subset(&commuting));
    }

    #[test]
    fn zero_dimensional_eigenvalues_do_not_change_verdicts(
        n in 2i64..=12,
        extra in prop::collection::vec((1i64..=64, 1i64..=64), 0..4),
    ) {
        let table = WolfTable::builtin();
        for rec in table.records.iter().filter(|r| r.exists_at(n)) {
            let input = rec.spectral_input(n).unwrap();
            let base = theorem_a(&input).unwrap();
            let mut padded = input.clone();
            for &(a, d) in &extra {
                padded.eigenvalue_dims.push(EigenDim { lambda: RationalFn::ratio(a, d * n), dim: 0 });
            }
            if let Ok(r) = theorem_a(&padded) {
                prop_assert_eq!(r.verdict, base.verdict);
                prop_assert_eq!(r.ied_dim, base.ied_dim);
                prop_assert_eq!(r.destabilising_dim, base.destabilising_dim);
            }
        }
    }

    #[test]
    fn report_json_round_trips(
        rows in prop::collection::vec(("[a-z0-9:-]{1,10}", any::<bool>(), "[ -~]{0,20}", "[ -~]{0,20}"), 0..6),
        with_bounds in any::<bool>(),
    ) {
        let mut r = Report::new(Format::Json);
        if with_bounds {
            r = r.with_bounds().unwrap();
        }
        for (id, ok, expected, actual) in rows {
            r.entries.push(IdentityCheck {
                id,
                bundle: "HE".into(),
                status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
                expected,
                actual,
                provenance: "derived:test".into(),
                notes: vec![],
            });
        }
        let back: Report = serde_json::from_str(&emit_json(&r)).unwrap();
        prop_assert_eq!(back, r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solve_commutes_with_evaluation(
        entries in prop::collection::vec(linear_ratfn(), 9),
        rhs in prop::collection::vec(linear_ratfn(), 3),
        n in 2i64..=32,
    ) {
        let rows: Vec<Vec<RationalFn>> = entries.chunks(3).map(<[RationalFn]>::to_vec).collect();
        let m = Matrix::from_rows(rows);
        let Ok(sys) = LinearSystem::new(m.clone(), rhs.clone()) else { return Ok(()); };
        let Ok(sol) = sys.solve() else { return Ok(()); };
        prop_assume!(sol.is_unique());
        let Some(x) = sol.particular.iter().map(|v| v.specialize(n).ok()).collect::<Option<Vec<_>>>() else {
            return Ok(());
        };
        let Ok(ms) = m.specialize(n) else { return Ok(()); };
        prop_assume!(ms.rank() == 3);
        let Some(bs) = rhs.iter().map(|v| v.specialize(n).ok()).collect::<Option<Vec<_>>>() else {
            return Ok(());
        };
        let direct = LinearSystem::new(ms, bs).unwrap().solve().unwrap();
        prop_assert_eq!(direct.particular, x);
    }

    #[test]
    fn scalar_solutions_back_substitute(num in -12i64..=12, den in 1i64..=12, which in 0usize..3) {
        let db = Database::builtin();
        let (b, assume): (Bundle, &[&str]) = [
            (Bundle::he(), &["B[+1,+2]", "B[+1,-1]", "B[-1,+1]"][..]),
            (Bundle::sym2h(), &[][..]),
            (Bundle::l20e(), &["B[+1,+3]"][..]),
        ][which].clone();
        let assume: BTreeSet<OpSymbol> = assume.iter().map(|s| s.parse().unwrap()).collect();
        let lambda = RationalFn::ratio(num, den);
        let Ok(sol) = scalar_solve(&db, &b, &assume, Some(&lambda)) else { return Ok(()); };
        for id in &sol.active {
            let e: OpExpr = input_expr(&db, id, &b, Rank::Generic).unwrap().without(&assume);
            let v = sol.evaluate(&e).unwrap();
            prop_assert!(v.is_zero(), "{} leaves {}", id, v);
        }
    }
}

#[test]
fn weyl_dim_positive_on_small_weights() {
    for n in 1..=8i64 {
        for a in 0..=4u32 {
            for b in 0..=a {
                for c in 0..=b {
                    for d in 0..=c {
                        let w = SpnWeight::new(vec![a, b, c, d]).unwrap();
                        if w.len() as i64 > n {
                            continue;
                        }
                        let dim = weyl_dim(&w, n).unwrap();
                        assert!(dim > 0.into(), "{w} at n = {n}");
                    }
                }
            }
        }
    }
}

#[test]
fn laplacian_is_rough_plus_curvature() {
    for (name, b) in Bundle::aliases() {
        for rank in [Rank::Generic, Rank::At(b.min_rank().max(2)), Rank::At(7)] {
            let u = universal_exprs(&b, rank).unwrap();
            let mut sum = u.rough.clone();
            sum.add_scaled(&u.qr, &RationalFn::one());
            assert_eq!(sum, u.lap, "{name}");
        }
    }
}

#[test]
fn derivations_are_scale_canonical() {
    let db = Database::builtin();
    for ident in db.iter().filter(|i| i.is_derived()) {
        let a = derive_identity(&db, &ident.id, Rank::Generic).unwrap();
        let b = derive_identity(&db, &ident.id, Rank::Generic).unwrap();
        assert_eq!(a.expr, b.expr, "{}", ident.id);
        assert_eq!(a.expr.canonical(), a.expr, "{}", ident.id);
    }
}
