use hdr_core::combinatorics::{coeff_a, enumerate_t, sign_e, JMatrix, SVector};
use hdr_core::modp::reduce_mod_p;
use hdr_core::operators::{op_d, op_nabla, op_theta, Operators};
use hdr_core::ring::random::{random_element, RandomShape};
use hdr_core::ring::{parse_element_json, parse_text, Element, ScalarField, Sign, TruncationParams};
use hdr_core::solution::{phi_initial, phi_summand};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

const Q: ScalarField = ScalarField::Rational;

fn params(n: u32, k: u32, m: u32) -> TruncationParams {
    TruncationParams::new(n, k, m).unwrap()
}

fn elements<const N: usize>(seed: u64, p: TruncationParams) -> [Element; N] {
    let mut rng = StdRng::seed_from_u64(seed);
    let shape = RandomShape::for_params(&p);
    std::array::from_fn(|_| random_element(&mut rng, p, Q, &shape))
}

/// Clears denominators so the element reduces modulo any prime.
fn integral(x: &Element) -> Element {
    let terms = x.terms().map(|(m, c)| (m.clone(), BigRational::from_integer(c.numer().clone())));
    Element::from_terms(terms, x.params(), x.field()).unwrap()
}

fn shapes() -> impl Strategy<Value = TruncationParams> {
    (1u32..=3, 1u32..=2, 1u32..=4).prop_map(|(n, k, m)| params(n, k, m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(seed in any::<u64>(), p in shapes()) {
        let [a, b, c] = elements::<3>(seed, p);
        let one = Element::one(p, Q);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &one, a.clone());
        prop_assert_eq!(&one * &a, a.clone());
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a + &b, &b + &a);
    }

    #[test]
    fn odd_generators_anticommute(seed in any::<u64>(), k in 0u32..=2, l in 1u32..=2, k2 in 0u32..=2, l2 in 1u32..=2) {
        let p = params(2, 2, 3);
        let [x] = elements::<1>(seed, p);
        let z = parse_text(&format!("z[{k},{l}]"), p, Q).unwrap();
        let w = parse_text(&format!("z[{k2},{l2}]"), p, Q).unwrap();
        prop_assert_eq!(&z * &w, -&(&w * &z));
        prop_assert!((&z * &z).is_zero());
        let h = parse_text(&format!("th{l}·h[1,{l2}]"), p, Q).unwrap();
        prop_assert_eq!(&h * &x, &x * &h);
    }

    #[test]
    fn e_ideal_squares_to_zero(seed in any::<u64>()) {
        let p = params(2, 1, 3);
        let [x, y] = elements::<2>(seed, p);
        let ex = &parse_text("e{1}", p, Q).unwrap() * &x;
        let ey = &parse_text("e{}", p, Q).unwrap() * &y;
        prop_assert!((&ex * &ey).is_zero());
    }

    #[test]
    fn truncation_is_a_quotient(seed in any::<u64>(), n in 1u32..=2, k in 1u32..=2, m in 2u32..=4) {
        let p = params(n, k, m);
        let low = m - 1;
        let [a, b] = elements::<2>(seed, p);
        let pr = |x: &Element| x.project(low).unwrap();
        prop_assert_eq!(pr(&(&a * &b)), &pr(&a) * &pr(&b));
        prop_assert_eq!(pr(&op_d(&a)), op_d(&pr(&a)));
        prop_assert_eq!(pr(&op_nabla(&a)), op_nabla(&pr(&a)));
        prop_assert_eq!(pr(&op_theta(&a)), op_theta(&pr(&a)));
        let ops = Operators::new(p, Q);
        let low_ops = Operators::new(p.with_m(low).unwrap(), Q);
        let shape = RandomShape { max_row: k - 1, ..RandomShape::for_params(&p) };
        let c = random_element(&mut StdRng::seed_from_u64(seed ^ 1), p, Q, &shape);
        for s in 0..=k {
            prop_assert_eq!(pr(&ops.delta(s, &c).unwrap()), low_ops.delta(s, &pr(&c)).unwrap());
        }
    }

    #[test]
    fn leibniz_rule(seed in any::<u64>(), odd in any::<bool>()) {
        let p = params(2, 2, 4);
        let [a, b] = elements::<2>(seed, p);
        let terms = a.terms().filter(|(m, _)| (m.zeta_degree() % 2 == 1) == odd);
        let a = Element::from_terms(terms.map(|(m, c)| (m.clone(), c.clone())), p, Q).unwrap();
        let sign = if odd { -1 } else { 1 };
        prop_assert_eq!(op_d(&(&a * &b)), &(&op_d(&a) * &b) + &(&a * &op_d(&b)).scale_int(sign));
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>(), p in shapes()) {
        let [a] = elements::<1>(seed, p);
        prop_assert_eq!(parse_text(&a.to_text(), p, Q).unwrap(), a.clone());
        prop_assert_eq!(parse_element_json(&a.to_json_string()).unwrap(), a.clone());
        let b = reduce_mod_p(&integral(&a), 5).unwrap();
        prop_assert_eq!(parse_element_json(&b.to_json_string()).unwrap(), b);
    }

    #[test]
    fn reduction_commutes_with_operators(seed in any::<u64>(), prime in prop::sample::select(vec![2u64, 3, 5])) {
        let p = params(2, 2, prime as u32);
        let [a, b] = elements::<2>(seed, p);
        let (a, b) = (integral(&a), integral(&b));
        let red = |x: &Element| reduce_mod_p(x, prime).unwrap();
        prop_assert_eq!(red(&(&a * &b)), &red(&a) * &red(&b));
        prop_assert_eq!(red(&(&a + &b)), &red(&a) + &red(&b));
        prop_assert_eq!(red(&op_nabla(&a)), op_nabla(&red(&a)));
        prop_assert_eq!(red(&op_theta(&a)), op_theta(&red(&a)));
    }

    #[test]
    fn coeff_a_ignores_zero_padding(
        entries in prop::collection::vec((1u32..=3, 1u32..=3, 0u32..=3), 0..5),
        s in prop::collection::vec(0u32..=3, 0..4),
        pad in 1usize..4,
    ) {
        let j = JMatrix::from_entries(entries.iter().map(|&(k, l, v)| ((k, l), v)));
        let padded = JMatrix::from_entries(
            entries.iter().map(|&(k, l, v)| ((k, l), v)).chain((1..=pad as u32).map(|k| ((k + 3, 1), 0))),
        );
        let sv = SVector::new(s.clone());
        let spad = SVector::new(s.iter().copied().chain(std::iter::repeat_n(0, pad)));
        prop_assert_eq!(coeff_a(&j, &sv), coeff_a(&padded, &spad));
    }

    #[test]
    fn sign_e_swap(a in prop::collection::btree_set(1u32..=6, 0..4), b in prop::collection::btree_set(1u32..=6, 0..4)) {
        let a: Vec<u32> = a.into_iter().collect();
        let b: Vec<u32> = b.into_iter().collect();
        match (sign_e(&a, &b), sign_e(&b, &a)) {
            (None, None) => prop_assert!(a.iter().any(|x| b.contains(x))),
            (Some((s1, u1)), Some((s2, u2))) => {
                prop_assert_eq!(&u1, &u2);
                prop_assert!(u1.windows(2).all(|w| w[0] < w[1]));
                let flip = if (a.len() * b.len()) % 2 == 1 { -1 } else { 1 };
                prop_assert_eq!(s1.as_i64() * flip, s2.as_i64());
            }
            _ => prop_assert!(false, "asymmetric overlap detection"),
        }
    }
}

#[test]
fn row_zero_summands_are_initial_values() {
    for n in 1..=3 {
        let p = params(n, 1, 4);
        for s in 0..=n {
            let total = enumerate_t(0, s, &p)
                .iter()
                .map(|t| phi_summand(0, t, p))
                .fold(Element::zero(p, Q), |acc, x| &acc + &x);
            assert_eq!(total, phi_initial(s as i64, p), "n={n} s={s}");
        }
    }
}

#[test]
fn sign_e_example() {
    assert_eq!(sign_e(&[2], &[1]), Some((Sign::Minus, vec![1, 2])));
    assert_eq!(sign_e(&[1], &[1]), None);
}
