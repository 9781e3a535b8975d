mod common;

use proptest::prelude::*;
use svetlichny::coeffs::{closed_form_exponent, mermin_coeffs_double_step, q_of};
use svetlichny::{mermin_coeffs, svetlichny_coeffs, ExactScalar, Method};

use common::{mermin_poly, s4_sign, svetlichny_poly};

fn mask(m: usize) -> u32 {
    (1u32 << m) - 1
}

#[test]
fn four_party_table_matches_written_expansion() {
    let mu = svetlichny_coeffs(4, Method::Closed).unwrap();
    for x in 0..16 {
        assert_eq!(mu.value(x), ExactScalar::new(s4_sign(x) as i64, 2), "x = {x:04b}");
    }
    let f = mermin_coeffs(4).unwrap();
    assert_eq!(f.values(), mu.values());
}

#[test]
fn small_values() {
    let f2 = mermin_coeffs(2).unwrap();
    assert_eq!(f2.value(0b00), ExactScalar::new(1, 1));
    assert_eq!(f2.value(0b11), ExactScalar::new(-1, 1));
    let f3 = mermin_coeffs(3).unwrap();
    assert_eq!(f3.value(0b000), ExactScalar::ZERO);
    assert_eq!(f3.value(0b100), ExactScalar::new(1, 1));
    let mu3 = svetlichny_coeffs(3, Method::Recursive).unwrap();
    assert_eq!(mu3.value(0), ExactScalar::new(-1, 2));
    let mu4 = svetlichny_coeffs(4, Method::Closed).unwrap();
    assert_eq!(mu4.value(0b0000), ExactScalar::new(-1, 2));
    assert_eq!(mu4.value(0b1000), ExactScalar::new(1, 2));
}

#[test]
fn operator_algebra_oracle() {
    for m in 2..=10 {
        let poly = mermin_poly(m);
        let f = mermin_coeffs(m).unwrap();
        for x in 0..1u32 << m {
            assert_eq!(f.value(x).to_f64(), poly.get(&x).copied().unwrap_or(0.0), "F_{m}({x:b})");
        }
        let oracle = svetlichny_poly(m);
        let mu = svetlichny_coeffs(m, Method::Closed).unwrap();
        for x in 0..1u32 << m {
            assert_eq!(mu.value(x).to_f64(), oracle[x as usize], "mu_{m}({x:b})");
        }
    }
}

#[test]
fn closed_equals_recursive() {
    for m in 2..=12 {
        let a = svetlichny_coeffs(m, Method::Closed).unwrap();
        let b = svetlichny_coeffs(m, Method::Recursive).unwrap();
        assert_eq!(a.values(), b.values(), "m = {m}");
    }
}

#[test]
fn two_step_recursion_agrees() {
    for m in (2..=12).step_by(2) {
        assert_eq!(mermin_coeffs_double_step(m).unwrap().values(), mermin_coeffs(m).unwrap().values());
    }
    assert!(mermin_coeffs_double_step(5).is_err());
}

#[test]
fn uniform_magnitude() {
    for m in 2..=12 {
        let mu = svetlichny_coeffs(m, Method::Closed).unwrap();
        let q = q_of(m);
        assert!(mu.values().iter().all(|v| v.abs() == ExactScalar::pow2_neg(q)), "m = {m}");
        assert_eq!(mu.uniform_magnitude(), Some(ExactScalar::pow2_neg(q)));
    }
}

#[test]
fn four_party_exponent() {
    for x in 0..16u32 {
        let bits: Vec<u32> = (0..4).map(|i| x >> i & 1).collect();
        let pairs: u32 = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).map(|(i, j)| bits[i] * bits[j]).sum();
        let expected = (pairs + bits.iter().sum::<u32>() + 1) % 2;
        assert_eq!(closed_form_exponent(4, x) as u32, expected);
    }
}

#[test]
fn out_of_range() {
    assert!(svetlichny_coeffs(1, Method::Closed).is_err());
    assert!(svetlichny_coeffs(13, Method::Recursive).is_err());
    assert!(mermin_coeffs(0).is_err());
}

proptest! {
    #[test]
    fn flip_identity_even(k in 1usize..=6, seed in any::<u32>()) {
        let m = 2 * k;
        let f = mermin_coeffs(m).unwrap();
        let x = seed & mask(m);
        let sign = if (x.count_ones() as usize + k).is_multiple_of(2) { 1 } else { -1 };
        let flipped = f.value(!x & mask(m));
        prop_assert_eq!(f.value(x), if sign == 1 { flipped } else { -flipped });
    }

    #[test]
    fn odd_from_even(k in 1usize..=5, seed in any::<u32>()) {
        let m = 2 * k + 1;
        let f_odd = mermin_coeffs(m).unwrap();
        let f_even = mermin_coeffs(2 * k).unwrap();
        let x = seed & mask(m);
        let head = x & mask(2 * k);
        let e = head.count_ones() + (x >> (2 * k)) + k as u32;
        let factor = if e.is_multiple_of(2) { 2 } else { 0 };
        let expected = f_even.value(head) * ExactScalar::from_int(factor);
        prop_assert_eq!(f_odd.value(x), expected.halve());
    }

    #[test]
    fn odd_mu_is_symmetrized_mermin(k in 1usize..=5, seed in any::<u32>()) {
        let m = 2 * k + 1;
        let f = mermin_coeffs(m).unwrap();
        let mu = svetlichny_coeffs(m, Method::Closed).unwrap();
        let x = seed & mask(m);
        prop_assert_eq!(mu.value(x), (f.value(x) + f.value(!x & mask(m))).halve());
    }

    #[test]
    fn closed_form_depends_on_weight_only(m in 2usize..=12, a in any::<u32>(), b in any::<u32>()) {
        let (x, y) = (a & mask(m), b & mask(m));
        if x.count_ones() == y.count_ones() {
            prop_assert_eq!(closed_form_exponent(m, x), closed_form_exponent(m, y));
        }
    }
}
