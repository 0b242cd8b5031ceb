use nielsen_core::autgroup::{endo_of, AutExpr, ElemAut, ElemKind};
use nielsen_core::glrep::{ab5, evaluate, mu, nu, rewrite, sigma_star, stabilizes};
use nielsen_core::intmat::IntMatrix;
use nielsen_core::{Letter, Word};
use proptest::prelude::*;

fn even_word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((1..=3u32, any::<bool>()), 0..max_len).prop_map(|v| {
        let w = Word::reduce(3, v.into_iter().map(|(i, s)| if s { Letter::gen(i) } else { Letter::inv_gen(i) })).unwrap();
        if nu(&w).unwrap() == 1 {
            w.mul(&Word::generator(3, 3).unwrap()).unwrap()
        } else {
            w
        }
    })
}

/// Elementary automorphisms preserving the parity of the `a3`-exponent.
fn stabilizing_elem() -> impl Strategy<Value = ElemAut> {
    use ElemKind::*;
    prop::sample::select(vec![
        NielsenLeft(1, 2),
        NielsenLeft(2, 1),
        NielsenRight(1, 2),
        NielsenRight(2, 1),
        NielsenLeft(3, 1),
        NielsenLeft(3, 2),
        NielsenRight(3, 1),
        NielsenRight(3, 2),
        Inversion(1),
        Inversion(2),
        Inversion(3),
        Transposition(1, 2),
    ])
    .prop_map(|k| ElemAut::new(k, 3).unwrap())
}

fn stabilizing(max_len: usize) -> impl Strategy<Value = AutExpr> {
    prop::collection::vec((stabilizing_elem(), prop_oneof![Just(-1i64), Just(1)]), 0..=max_len).prop_map(|fs| {
        fs.into_iter().fold(AutExpr::identity(3), |acc, (e, k)| acc.mul(&AutExpr::elem(e).pow(k)).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rewrite_round_trips(w in even_word(41)) {
        let x = rewrite(&w).unwrap();
        prop_assert_eq!(x.rank(), 5);
        prop_assert_eq!(evaluate(&x).unwrap(), w);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ab5_and_mu_are_multiplicative(x in stabilizing(6), y in stabilizing(6)) {
        let (ex, ey) = (endo_of(&x), endo_of(&y));
        prop_assert!(stabilizes(&ex).unwrap() && stabilizes(&ey).unwrap());
        let exy = ex.compose(&ey).unwrap();
        prop_assert_eq!(ab5(&exy).unwrap(), &ab5(&ex).unwrap() * &ab5(&ey).unwrap());
        let m = mu(&exy).unwrap();
        prop_assert_eq!(&m, &(&mu(&ex).unwrap() * &mu(&ey).unwrap()));
        prop_assert_eq!(m.det().abs(), 1);
    }

    #[test]
    fn ab5_commutes_with_galois(x in stabilizing(6)) {
        let a = ab5(&endo_of(&x)).unwrap();
        prop_assert_eq!(&a * &sigma_star(), &sigma_star() * &a);
    }
}

#[test]
fn powers_of_nielsen_maps_give_elementary_matrices() {
    let l12 = AutExpr::lambda(3, 1, 2).unwrap();
    let l21 = AutExpr::lambda(3, 2, 1).unwrap();
    let m12 = mu(&endo_of(&l12)).unwrap();
    for p in 1..=5i64 {
        let a = mu(&endo_of(&l12.pow(p))).unwrap();
        let b = mu(&endo_of(&l21.pow(p))).unwrap();
        assert_eq!(a, IntMatrix::elementary2(0, p));
        assert_eq!(b, IntMatrix::elementary2(p, 0));
        let mut acc = IntMatrix::identity(2);
        for _ in 0..p {
            acc = &acc * &m12;
        }
        assert_eq!(acc, a);
    }
}

#[test]
fn galois_involution() {
    let s = sigma_star();
    assert_eq!(&s * &s, IntMatrix::identity(5));
    let k = s.add_identity(1).kernel();
    assert_eq!(k.len(), 2);
}
