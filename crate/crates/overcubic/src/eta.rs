//! Eta-product and theta-function expansions.
//!
//! - [`EtaExpr`]: a monomial `c * q^s * prod f_k^{e_k}` over the eta
//!   factors `f_k = prod_{n>=1} (1 - q^{nk})`, with an expansion routine
//!   built on the pentagonal number theorem.
//! - [`eta_power`]: expansion of a single `f_k^e`.
//! - [`theta_sum`]: direct lattice-sum expansions of the Ramanujan theta
//!   functions `phi(q)`, `phi(-q)` and `psi(q)`, kept independent of the
//!   eta machinery so the two roads can be checked against each other.

use crate::series::Series;
use std::collections::BTreeMap;
use std::fmt;

/// Sparse support of `f_k` up to `order`: pentagonal exponents
/// `k * j(3j-1)/2` for `j = 0, 1, -1, 2, -2, ...` with sign `(-1)^j`,
/// sorted by exponent.
pub(crate) fn pentagonal_support(k: u32, order: usize) -> Vec<(usize, i8)> {
    let k = k as usize;
    let mut sup = vec![(0usize, 1i8)];
    let mut j = 1usize;
    loop {
        let g1 = j * (3 * j - 1) / 2; // j > 0
        let g2 = j * (3 * j + 1) / 2; // j < 0 mirrored
        let sign = if j % 2 == 1 { -1 } else { 1 };
        let mut pushed = false;
        if k * g1 <= order {
            sup.push((k * g1, sign));
            pushed = true;
        }
        if k * g2 <= order {
            sup.push((k * g2, sign));
            pushed = true;
        }
        if !pushed {
            break;
        }
        j += 1;
    }
    sup.sort_unstable_by_key(|&(g, _)| g);
    sup
}

/// Expansion of `f_k^e` to `order` in the requested ring (`modulus == 0`
/// for exact integers).
///
/// Small exponents are applied as `|e|` sparse pentagonal passes (each
/// linear in `order * support`); large exponents fall back to dense
/// binary powering. The crossover is chosen by an operation-count
/// estimate of the two routes.
pub fn eta_power(k: u32, e: i64, order: usize, modulus: u64) -> Series {
    apply_eta_factor(Series::one(order, modulus), k, e)
}

/// Multiply `acc` by `f_k^e`, choosing between sparse passes and dense
/// binary powering.
fn apply_eta_factor(acc: Series, k: u32, e: i64) -> Series {
    if e == 0 {
        return acc;
    }
    let order = acc.order();
    let sup = pentagonal_support(k, order);
    let passes = e.unsigned_abs() as u128;
    let sparse_cost = passes * (order as u128) * (sup.len() as u128);
    let bits = 64 - e.unsigned_abs().leading_zeros() as u128;
    let dense_cost = (2 * bits + 2) * (order as u128) * (order as u128) / 2;
    if sparse_cost <= dense_cost {
        let mut acc = acc;
        for _ in 0..e.unsigned_abs() {
            acc = if e > 0 {
                acc.mul_support(&sup)
            } else {
                acc.div_support(&sup)
            };
        }
        acc
    } else {
        let fk = Series::one(order, acc.modulus()).mul_support(&sup);
        let p = fk.try_pow(e).expect("f_k has unit constant term");
        acc.mul(&p)
    }
}

/// A monomial `coefficient * q^qshift * prod f_k^{e_k}`.
///
/// Every eta quotient that appears in a dissection identity is one of
/// these; expression trees that are built purely from eta factors,
/// powers of `q`, integer scalars and `* / ^` fold into a single
/// `EtaExpr` so they can be expanded with sparse passes only.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EtaExpr {
    pub coefficient: i64,
    pub qshift: u32,
    /// Map from factor index `k` to its (nonzero) exponent.
    pub factors: BTreeMap<u32, i32>,
}

impl EtaExpr {
    pub fn one() -> EtaExpr {
        EtaExpr::constant(1)
    }

    pub fn constant(c: i64) -> EtaExpr {
        EtaExpr {
            coefficient: c,
            qshift: 0,
            factors: BTreeMap::new(),
        }
    }

    /// The bare variable `q`.
    pub fn q() -> EtaExpr {
        EtaExpr {
            coefficient: 1,
            qshift: 1,
            factors: BTreeMap::new(),
        }
    }

    /// A single factor `f_k^e`.
    pub fn factor(k: u32, e: i32) -> EtaExpr {
        assert!(k >= 1, "eta factor index must be positive");
        let mut factors = BTreeMap::new();
        if e != 0 {
            factors.insert(k, e);
        }
        EtaExpr {
            coefficient: 1,
            qshift: 0,
            factors,
        }
    }

    /// Product of two monomials; `None` on integer overflow of the
    /// scalar part.
    pub fn mul(&self, other: &EtaExpr) -> Option<EtaExpr> {
        let coefficient = self.coefficient.checked_mul(other.coefficient)?;
        let qshift = self.qshift.checked_add(other.qshift)?;
        let mut factors = self.factors.clone();
        for (&k, &e) in &other.factors {
            let slot = factors.entry(k).or_insert(0);
            *slot = slot.checked_add(e)?;
            if *slot == 0 {
                factors.remove(&k);
            }
        }
        Some(EtaExpr {
            coefficient,
            qshift,
            factors,
        })
    }

    /// Quotient of two monomials; `None` unless the scalar divides
    /// exactly and the `q`-shift stays non-negative.
    pub fn div(&self, other: &EtaExpr) -> Option<EtaExpr> {
        if other.coefficient == 0 || self.coefficient % other.coefficient != 0 {
            return None;
        }
        let coefficient = self.coefficient / other.coefficient;
        let qshift = self.qshift.checked_sub(other.qshift)?;
        let mut factors = self.factors.clone();
        for (&k, &e) in &other.factors {
            let slot = factors.entry(k).or_insert(0);
            *slot = slot.checked_sub(e)?;
            if *slot == 0 {
                factors.remove(&k);
            }
        }
        Some(EtaExpr {
            coefficient,
            qshift,
            factors,
        })
    }

    /// Integer power of a monomial; `None` on overflow, on a negative
    /// power of a scalar other than `+-1`, or when the shift would go
    /// negative.
    pub fn pow(&self, e: i64) -> Option<EtaExpr> {
        if e == 0 {
            return Some(EtaExpr::one());
        }
        let e32 = i32::try_from(e).ok()?;
        if e < 0 && (self.coefficient.abs() != 1 || self.qshift != 0) {
            // 1/c and 1/q^s are not integer eta monomials.
            return None;
        }
        let coefficient = if self.coefficient == 1 {
            1
        } else if self.coefficient == -1 {
            if e32 % 2 == 0 {
                1
            } else {
                -1
            }
        } else {
            let mut c: i64 = 1;
            for _ in 0..e32 {
                c = c.checked_mul(self.coefficient)?;
            }
            c
        };
        let qshift = self.qshift.checked_mul(u32::try_from(e).unwrap_or(0))?;
        let mut factors = BTreeMap::new();
        for (&k, &fe) in &self.factors {
            factors.insert(k, fe.checked_mul(e32)?);
        }
        Some(EtaExpr {
            coefficient,
            qshift,
            factors,
        })
    }

    /// Expand the monomial to `order` in the requested ring.
    pub fn evaluate(&self, order: usize, modulus: u64) -> Series {
        if self.qshift as usize > order {
            return Series::zero(order, modulus);
        }
        let mut acc = Series::monomial(self.coefficient, self.qshift as usize, order, modulus);
        for (&k, &e) in &self.factors {
            acc = apply_eta_factor(acc, k, e as i64);
        }
        acc
    }
}

impl fmt::Display for EtaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.coefficient != 1 || (self.qshift == 0 && self.factors.is_empty()) {
            parts.push(self.coefficient.to_string());
        }
        if self.qshift == 1 {
            parts.push("q".into());
        } else if self.qshift > 1 {
            parts.push(format!("q^{}", self.qshift));
        }
        for (&k, &e) in &self.factors {
            if e == 1 {
                parts.push(format!("f{k}"));
            } else {
                parts.push(format!("f{k}^{e}"));
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// The three theta atoms used in the identity chains.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ThetaKind {
    /// `phi(q) = sum_{n in Z} q^{n^2}`
    Phi,
    /// `phi(-q) = sum_{n in Z} (-1)^n q^{n^2}`
    PhiNeg,
    /// `psi(q) = sum_{n >= 0} q^{n(n+1)/2}`
    Psi,
}

/// Direct lattice-sum expansion of `phi(q^k)`, `phi(-q^k)` or `psi(q^k)`
/// to `order`.
///
/// The sums are assembled over exact integers and reduced into the
/// requested ring at the end, so modular evaluation never has to pick
/// sign representatives term by term.
pub fn theta_sum(kind: ThetaKind, k: u32, order: usize, modulus: u64) -> Series {
    let k = k as usize;
    assert!(k >= 1, "theta argument scale must be positive");
    let mut c = vec![0i64; order + 1];
    match kind {
        ThetaKind::Phi | ThetaKind::PhiNeg => {
            c[0] = 1;
            let mut n = 1usize;
            while k * n * n <= order {
                let sign = if kind == ThetaKind::PhiNeg && n % 2 == 1 {
                    -2
                } else {
                    2
                };
                c[k * n * n] = sign;
                n += 1;
            }
        }
        ThetaKind::Psi => {
            let mut n = 0usize;
            while k * n * (n + 1) / 2 <= order {
                c[k * n * (n + 1) / 2] = 1;
                n += 1;
            }
        }
    }
    Series::from_coeffs(&c, modulus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    /// Brute-force oracle: multiply out (1 - q^k)(1 - q^{2k})... directly.
    fn eta_by_product(k: u32, order: usize) -> Series {
        let mut acc = Series::one(order, 0);
        let mut n = k as usize;
        while n <= order {
            let factor = Series::monomial(1, 0, order, 0).sub(&Series::monomial(1, n, order, 0));
            acc = acc.mul(&factor);
            n += k as usize;
        }
        acc
    }

    #[test]
    fn f1_small_expansion() {
        let expected = Series::from_coeffs(&[1, -1, -1, 0, 0, 1, 0, 1, 0], 0);
        assert_eq!(eta_by_product(1, 8), expected);
        assert_eq!(eta_power(1, 1, 8, 0), expected);
    }

    #[test]
    fn zeroth_power_is_one() {
        assert_eq!(eta_power(3, 0, 10, 0), Series::one(10, 0));
        assert_eq!(eta_power(7, 0, 10, 128), Series::one(10, 128));
    }

    #[test]
    fn sixth_inverse_power_counts_colored_partitions() {
        // 1/f1^6 = 1 + 6q + 27q^2 + ...
        let s = eta_power(1, -6, 2, 0);
        assert_eq!(s.coeff(0).unwrap(), BigInt::from(1));
        assert_eq!(s.coeff(1).unwrap(), BigInt::from(6));
        assert_eq!(s.coeff(2).unwrap(), BigInt::from(27));
        // Oracle route: sixth power of the partition series.
        let p = eta_power(1, 1, 2, 0).try_inv().unwrap();
        assert_eq!(p.try_pow(6).unwrap(), s);
    }

    #[test]
    fn pentagonal_matches_product_all_k() {
        // Spot-check a deeper order for small k and the full range k <= 16
        // at a moderate order.
        for k in [1u32, 2, 3] {
            assert_eq!(eta_power(k, 1, 600, 0), eta_by_product(k, 600), "k={k}");
        }
        for k in 1..=16u32 {
            assert_eq!(eta_power(k, 1, 200, 0), eta_by_product(k, 200), "k={k}");
        }
    }

    #[test]
    fn sparse_and_dense_powering_agree() {
        // Exponent far above the crossover vs. repeated sparse passes.
        let order = 120;
        let dense = eta_power(2, 37, order, 128);
        let mut sparse = Series::one(order, 128);
        let sup = pentagonal_support(2, order);
        for _ in 0..37 {
            sparse = sparse.mul_support(&sup);
        }
        assert_eq!(dense, sparse);
        let inv_route = eta_power(1, -9, order, 0);
        let direct = eta_power(1, 9, order, 0).try_inv().unwrap();
        assert_eq!(inv_route, direct);
    }

    #[test]
    fn eta_expr_folding_algebra() {
        let bt = EtaExpr::factor(4, 3)
            .mul(&EtaExpr::factor(1, -6))
            .unwrap()
            .mul(&EtaExpr::factor(2, -3))
            .unwrap();
        assert_eq!(bt.to_string(), "f1^-6*f2^-3*f4^3");
        let sq = bt.pow(2).unwrap();
        assert_eq!(sq.factors[&4], 6);
        let back = sq.div(&bt).unwrap();
        assert_eq!(back, bt);
        assert!(EtaExpr::q().pow(-1).is_none());
    }

    #[test]
    fn eta_expr_evaluate_matches_componentwise() {
        let e = EtaExpr {
            coefficient: 8,
            qshift: 1,
            factors: BTreeMap::from([(2, 7), (4, 3), (8, 2), (1, -22)]),
        };
        let order = 80;
        let direct = e.evaluate(order, 0);
        let mut manual = Series::monomial(8, 1, order, 0);
        for (k, e) in [(2u32, 7i64), (4, 3), (8, 2), (1, -22)] {
            manual = manual.mul(&eta_power(k, e, order, 0));
        }
        assert_eq!(direct, manual);
    }

    #[test]
    fn psi_triangular_numbers() {
        let s = theta_sum(ThetaKind::Psi, 1, 10, 0);
        assert_eq!(s, Series::from_coeffs(&[1, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1], 0));
    }

    #[test]
    fn phi_neg_signs_at_squares() {
        let s = theta_sum(ThetaKind::PhiNeg, 1, 9, 0);
        assert_eq!(s, Series::from_coeffs(&[1, -2, 0, 0, 2, 0, 0, 0, 0, -2], 0));
    }

    #[test]
    fn phi_recombines_from_even_odd_classes() {
        // phi(q) = phi(q^4) + 2q psi(q^8): the classical 2-dissection of
        // the square exponents by parity.
        let n = 400;
        let phi = theta_sum(ThetaKind::Phi, 1, n, 0);
        let rhs = theta_sum(ThetaKind::Phi, 4, n, 0)
            .add(&theta_sum(ThetaKind::Psi, 8, n, 0).mul(&Series::monomial(2, 1, n, 0)));
        assert_eq!(phi, rhs);
    }

    #[test]
    fn theta_eta_forms_agree_on_a_sample() {
        // phi(-q) = f1^2/f2 at a moderate order (the full order-2000 run
        // lives in the acceptance suite).
        let n = 300;
        let lhs = theta_sum(ThetaKind::PhiNeg, 1, n, 0);
        let rhs = eta_power(1, 2, n, 0).mul(&eta_power(2, -1, n, 0));
        assert_eq!(lhs, rhs);
    }
}
