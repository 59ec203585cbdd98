//! Arithmetic-progression extraction and the binomial congruence check.
//!
//! Extraction is the workhorse move of every dissection proof: keep the
//! coefficients whose exponent is `r (mod m)` and compress `q^m -> q`.
//! [`reconstruct`] is its inverse and exists mostly so the round-trip can
//! be property-tested.

use crate::eta::eta_power;
use crate::report::{Counterexample, VerificationReport};
use crate::series::Series;
use std::time::Instant;

/// Extract the progression `m*n + r`: the result `T` has
/// `T[n] = a[m*n + r]`, valid to order `floor((a.order - r) / m)`.
///
/// # Panics
/// Panics when `r >= m` or when `a.order < r` (no coefficient of the
/// class is known).
pub fn extract_progression(a: &Series, r: usize, m: usize) -> Series {
    assert!(m >= 1 && r < m, "extract residue must satisfy 0 <= r < m");
    assert!(a.order() >= r, "series too short for residue class {r}");
    let new_order = (a.order() - r) / m;
    let mut out = Vec::with_capacity(new_order + 1);
    for n in 0..=new_order {
        out.push(a.coeff(m * n + r).expect("within extracted range"));
    }
    Series::from_bigint_coeffs(out, a.modulus())
}

/// Interleave `m` series back together: `sum_r q^r * parts[r](q^m)`.
///
/// Valid to the largest order at which every residue class is still
/// covered by its part, so `reconstruct(extract(a, 0..m), m) == a`
/// exactly, including the recorded order.
///
/// # Panics
/// Panics when `parts.len() != m`, `m == 0`, or the parts disagree on
/// modulus.
pub fn reconstruct(parts: &[Series], m: usize) -> Series {
    assert!(m >= 1 && parts.len() == m, "need exactly m residue parts");
    let modulus = parts[0].modulus();
    // First exponent not covered in class r is m*(order_r + 1) + r.
    let order = parts
        .iter()
        .enumerate()
        .map(|(r, p)| {
            assert_eq!(p.modulus(), modulus, "modulus mismatch");
            m * (p.order() + 1) + r
        })
        .min()
        .expect("m >= 1")
        - 1;
    let mut out = Vec::with_capacity(order + 1);
    for e in 0..=order {
        out.push(parts[e % m].coeff(e / m).expect("within part order"));
    }
    Series::from_bigint_coeffs(out, modulus)
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Check the binomial congruence `f_m^{p^k} = f_{mp}^{p^{k-1}} (mod p^k)`
/// to order `n`, expanding both sides independently.
///
/// # Panics
/// Panics when `p` is not prime or `m`, `k` are zero.
pub fn binomial_reduce_check(m: u32, p: u64, k: u32, n: usize) -> VerificationReport {
    assert!(is_prime(p), "binomial congruence requires a prime");
    assert!(m >= 1 && k >= 1);
    let start = Instant::now();
    let pk = p.pow(k);
    let lhs = eta_power(m, pk as i64, n, pk);
    let rhs = eta_power(m * p as u32, p.pow(k - 1) as i64, n, pk);
    let id = format!("2-9[m={m},p={p},k={k}]");
    match lhs.first_difference(&rhs) {
        None => VerificationReport::pass(id, n as u64, start.elapsed()),
        Some(i) => {
            let l = lhs.coeff(i).expect("in range");
            let r = rhs.coeff(i).expect("in range");
            VerificationReport::fail(
                id,
                n as u64,
                Counterexample::new(i as u64, format!("{l} != {r} (mod {pk})")),
                start.elapsed(),
            )
        }
    }
}

/// Convenience used by tests and the acceptance suite: first index where
/// `lhs` and `rhs` differ, as a report.
pub fn compare_series(id: &str, lhs: &Series, rhs: &Series, range: u64) -> VerificationReport {
    let start = Instant::now();
    match lhs.first_difference(rhs) {
        None => VerificationReport::pass(id.to_string(), range, start.elapsed()),
        Some(i) => {
            let l = lhs.coeff(i).expect("in range");
            let r = rhs.coeff(i).expect("in range");
            VerificationReport::fail(
                id.to_string(),
                range,
                Counterexample::new(i as u64, format!("{l} != {r}")),
                start.elapsed(),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    #[test]
    fn extract_all_ones() {
        let ones = Series::from_coeffs(&[1; 11], 0);
        let even = extract_progression(&ones, 0, 2);
        assert_eq!(even, Series::from_coeffs(&[1; 6], 0));
    }

    #[test]
    fn extract_f1_class_one_mod_five() {
        // Pentagonal exponents <= 30 are 0,1,2,5,7,12,15,22,26 with signs
        // +,-,-,+,+,-,-,+,+; classes 1 mod 5 are exponents 1 and 26.
        let f1 = eta_power(1, 1, 30, 0);
        let got = extract_progression(&f1, 1, 5);
        assert_eq!(got, Series::from_coeffs(&[-1, 0, 0, 0, 0, 1], 0));
    }

    #[test]
    #[should_panic(expected = "0 <= r < m")]
    fn extract_rejects_bad_residue() {
        let a = Series::one(4, 0);
        let _ = extract_progression(&a, 3, 3);
    }

    #[test]
    fn reconstruct_small_cases() {
        let a = Series::from_coeffs(&[1, 1, 1], 0);
        let parts = [extract_progression(&a, 0, 2), extract_progression(&a, 1, 2)];
        assert_eq!(reconstruct(&parts, 2), a);

        let c = Series::one(0, 0);
        assert_eq!(
            reconstruct(&[c.clone(), c], 2),
            Series::from_coeffs(&[1, 1], 0)
        );
    }

    #[test]
    fn reconstruct_three_dissection_of_psi_like_quotient() {
        // f2^2/f1 splits into classes 0 and 1 mod 3; class 2 is empty.
        // Reassembling the extracted classes must reproduce the quotient.
        let n = 240;
        let s = eta_power(2, 2, n, 0).mul(&eta_power(1, -1, n, 0));
        let parts: Vec<Series> = (0..3).map(|r| extract_progression(&s, r, 3)).collect();
        assert!(parts[2].is_zero());
        assert_eq!(reconstruct(&parts, 3), s);
    }

    #[test]
    fn binomial_congruence_examples() {
        for (m, p, k) in [(1u32, 2u64, 1u32), (1, 2, 6), (1, 3, 1)] {
            let rep = binomial_reduce_check(m, p, k, 500);
            assert_eq!(rep.status, Status::Pass, "(m,p,k)=({m},{p},{k})");
        }
    }

    #[test]
    fn binomial_congruence_detects_wrong_modulus() {
        // f_1^2 = f_2 holds mod 2 but not mod 4; checking the same pair
        // mod 4 by hand must show a difference.
        let lhs = eta_power(1, 2, 50, 4);
        let rhs = eta_power(2, 1, 50, 4);
        assert!(lhs.first_difference(&rhs).is_some());
    }

    #[test]
    #[should_panic(expected = "prime")]
    fn binomial_rejects_composite() {
        let _ = binomial_reduce_check(1, 4, 1, 10);
    }

    #[test]
    fn compare_series_reports_first_bad_index() {
        let a = Series::from_coeffs(&[1, 2, 3], 0);
        let b = Series::from_coeffs(&[1, 2, 4], 0);
        let rep = compare_series("demo", &a, &b, 2);
        assert_eq!(rep.status, Status::Fail);
        let ce = rep.counterexample.unwrap();
        assert_eq!(ce.argument, 2);
    }

    #[test]
    fn shifted_substitution_lands_in_one_class() {
        // extract(a(q^m) * q^s, r, m) is zero unless s = r (mod m), in
        // which case it is a shifted copy of a.
        let a = Series::from_coeffs(&[3, -1, 4, 1, -5], 0);
        let m = 3;
        for s in 0..4usize {
            let spread = a.substitute_power(m).mul(&Series::monomial(
                1,
                s,
                a.substitute_power(m).order(),
                0,
            ));
            for r in 0..m {
                let got = extract_progression(&spread, r, m);
                if r == s % m {
                    let shift = s / m;
                    for i in 0..=(got.order() - shift) {
                        assert_eq!(
                            got.coeff(i + shift).unwrap(),
                            a.coeff(i).map(BigInt::from).unwrap_or_default()
                        );
                    }
                    for i in 0..shift {
                        assert!(got.coeff(i).unwrap() == BigInt::from(0));
                    }
                } else {
                    assert!(got.is_zero(), "class {r} should be empty");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn roundtrip_all_classes(cs in proptest::collection::vec(-20i64..=20, 1..40), m in prop_oneof![Just(2usize), Just(3), Just(4), Just(8)]) {
            prop_assume!(cs.len() > m);
            let a = Series::from_coeffs(&cs, 0);
            let parts: Vec<Series> = (0..m).map(|r| extract_progression(&a, r, m)).collect();
            prop_assert_eq!(reconstruct(&parts, m), a);
        }

        #[test]
        fn extraction_is_linear(a in proptest::collection::vec(-20i64..=20, 12..30), b in proptest::collection::vec(-20i64..=20, 12..30), r in 0usize..3) {
            let m = 3;
            let (x, y) = (Series::from_coeffs(&a, 0), Series::from_coeffs(&b, 0));
            let lhs = extract_progression(&x.add(&y), r, m);
            let rhs = extract_progression(&x, r, m).add(&extract_progression(&y, r, m));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
