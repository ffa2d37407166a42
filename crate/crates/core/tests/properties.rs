use centext::abelian::{build_cocycle_cover, recognize_abelian, schur_multiplier, AbelianType};
use centext::engine::{
    derived_subgroup, is_isomorphic, load_group, quotient, Group, GroupSpec, IsoVerdict,
};
use centext::lab::{k_group, ktilde};
use centext::Limits;
use proptest::prelude::*;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn moduli(max_product: u64) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(2u32..=9, 1..=3).prop_filter("small product", move |d| {
        d.iter().map(|&x| x as u64).product::<u64>() <= max_product
    })
}

fn group(d: &[u32]) -> Group {
    load_group(&GroupSpec::abelian(d), &Limits::default()).unwrap()
}

fn perm(deg: usize, gens: &[&str]) -> Group {
    load_group(
        &GroupSpec::permutation(deg, gens).unwrap(),
        &Limits::default(),
    )
    .unwrap()
}

fn small_nonabelian() -> Vec<Group> {
    vec![
        perm(3, &["(1 2 3)", "(1 2)"]),
        perm(4, &["(1 2 3 4)", "(1 3)"]),
        perm(4, &["(1 2 3)", "(2 3 4)"]),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reordering_factors_preserves_isomorphism_type(mut d in moduli(200), rot in 0usize..3) {
        let a = group(&d);
        let k = rot % d.len();
        d.rotate_left(k);
        let b = group(&d);
        prop_assert_eq!(recognize_abelian(&a).unwrap(), recognize_abelian(&b).unwrap());
        prop_assert_eq!(is_isomorphic(&a, &b, &Limits::default()), IsoVerdict::Isomorphic);
        prop_assert_eq!(is_isomorphic(&b, &a, &Limits::default()), IsoVerdict::Isomorphic);
    }

    #[test]
    fn abelian_k_group_is_a_power(d in moduli(60), n in 2usize..=3) {
        let g = group(&d);
        let k = k_group(&g, n, &Limits::default()).unwrap();
        prop_assert_eq!(k.order() as u64, (g.order() as u64).pow(n as u32 - 1));
        let t = recognize_abelian(&g).unwrap();
        prop_assert_eq!(recognize_abelian(k.group()).unwrap(), t.power(n - 1));
    }

    #[test]
    fn cocycle_cover_commutators_match_gcd_formula(d in moduli(100)) {
        let divisors: Vec<u64> = d.iter().map(|&x| x as u64).collect();
        let t = AbelianType::from_divisors(&divisors).unwrap();
        let c = build_cocycle_cover(&t, None, &Limits::default()).unwrap();
        let mut expected = 1;
        let canon = t.divisors();
        for i in 0..canon.len() {
            for j in i + 1..canon.len() {
                expected *= gcd(canon[i], canon[j]);
            }
        }
        prop_assert_eq!(derived_subgroup(c.total()).order() as u64, expected);
        prop_assert_eq!(c.multiplier(), &schur_multiplier(&t));
        prop_assert!(c.kernel().is_central());
    }

    #[test]
    fn central_sequence_orders(d in moduli(36), n in 2usize..=3) {
        let g = group(&d);
        let r = ktilde(&g, n, None, &Limits::default()).unwrap();
        let t = recognize_abelian(&g).unwrap();
        let m = schur_multiplier(&t).order() as usize;
        prop_assert_eq!(r.order(), m * g.order().pow(n as u32 - 1));
        prop_assert_eq!(r.h2_image().order(), m);
        prop_assert!(r.h2_image().is_central());
        prop_assert!(r.onto_k().kernel().same_members(r.h2_image()));
    }

    #[test]
    fn commutator_identity_in_k(which in 0usize..3, n in 3usize..=4, h1 in 0usize..24, h2 in 0usize..24) {
        let g = &small_nonabelian()[which];
        let (h1, h2) = (h1 % g.order(), h2 % g.order());
        let k = k_group(g, n, &Limits::default()).unwrap();
        let mut a = vec![0u32; n];
        a[0] = h1 as u32;
        a[1] = g.inv(h1) as u32;
        let mut b = vec![0u32; n];
        b[0] = h2 as u32;
        b[2] = g.inv(h2) as u32;
        let mut c = vec![0u32; n];
        c[0] = g.commutator(h1, h2) as u32;
        let kg = k.group();
        let lhs = kg.commutator(k.index_of_tuple(&a).unwrap(), k.index_of_tuple(&b).unwrap());
        prop_assert_eq!(Some(lhs), k.index_of_tuple(&c));
    }

    #[test]
    fn quotients_by_derived_are_abelian(which in 0usize..3) {
        let g = &small_nonabelian()[which];
        let d = derived_subgroup(g);
        let (q, pi) = quotient(g, &d).unwrap();
        prop_assert!(q.is_abelian());
        prop_assert_eq!(q.order() * d.order(), g.order());
        prop_assert!(pi.kernel().same_members(&d));
    }
}

#[test]
fn k_order_matches_brute_force_count() {
    for g in small_nonabelian() {
        let d = derived_subgroup(&g);
        for n in 2..=3 {
            let mut count = 0usize;
            let mut t = vec![0usize; n];
            loop {
                let p = t.iter().fold(0, |acc, &x| g.mul(acc, x));
                count += d.contains(p) as usize;
                let mut i = 0;
                while i < n {
                    t[i] += 1;
                    if t[i] < g.order() {
                        break;
                    }
                    t[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
            assert_eq!(k_group(&g, n, &Limits::default()).unwrap().order(), count);
        }
    }
}
