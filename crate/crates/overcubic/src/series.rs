//! Truncated formal power series over `Z` and over residue rings `Z/mZ`.
//!
//! A [`Series`] stores a dense coefficient vector for `q^0 .. q^order`
//! together with the ring it lives in: `modulus == 0` means exact
//! arbitrary-precision integers, `modulus == m > 0` means `Z/mZ` with
//! machine-word representatives in `[0, m)`.
//!
//! Order bookkeeping is strict: every operation records the order to which
//! the result is guaranteed valid (binary operations truncate to the
//! minimum of the operand orders), so equality checks never compare
//! coefficients beyond what both sides actually know.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Largest supported modulus. Keeping representatives below 2^32 lets the
/// modular convolution accumulate 64-bit products without overflow.
pub const MAX_MODULUS: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("constant term is not a unit in the coefficient ring")]
    NonUnitConstant,
    #[error("coefficient index {index} exceeds series order {order}")]
    CoeffOutOfRange { index: usize, order: usize },
    #[error("modulus {new} does not divide existing modulus {old}")]
    IncompatibleModulus { old: u64, new: u64 },
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Coeffs {
    Exact(Vec<BigInt>),
    Mod(Vec<u64>),
}

/// A truncated formal power series in `q`.
#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    modulus: u64,
    coeffs: Coeffs,
}

#[inline]
fn addm(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
fn subm(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

#[inline]
fn mulm(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn i64_rep(v: i64, m: u64) -> u64 {
    (v.rem_euclid(m as i64 as i64)) as u64
}

/// Modular inverse via extended Euclid; `None` when `gcd(a, m) != 1`.
fn invm(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some((e.x.rem_euclid(m as i128)) as u64)
}

impl Series {
    fn check_modulus(modulus: u64) {
        assert!(
            modulus < MAX_MODULUS,
            "modulus {modulus} out of range (must be < 2^32)"
        );
    }

    /// The zero series, valid to `order`.
    pub fn zero(order: usize, modulus: u64) -> Series {
        Series::constant(0, order, modulus)
    }

    /// The constant series 1, valid to `order`.
    pub fn one(order: usize, modulus: u64) -> Series {
        Series::constant(1, order, modulus)
    }

    /// The constant series `c`, valid to `order`.
    pub fn constant(c: i64, order: usize, modulus: u64) -> Series {
        Series::monomial(c, 0, order, modulus)
    }

    /// The monomial `c * q^exponent`, valid to `order`.
    ///
    /// # Panics
    /// Panics when `exponent > order` (the term would lie beyond the
    /// recorded precision).
    pub fn monomial(c: i64, exponent: usize, order: usize, modulus: u64) -> Series {
        Series::check_modulus(modulus);
        assert!(exponent <= order, "monomial exponent exceeds order");
        let coeffs = if modulus == 0 {
            let mut v = vec![BigInt::zero(); order + 1];
            v[exponent] = BigInt::from(c);
            Coeffs::Exact(v)
        } else {
            let mut v = vec![0u64; order + 1];
            v[exponent] = i64_rep(c, modulus);
            Coeffs::Mod(v)
        };
        Series { modulus, coeffs }
    }

    /// Build a series from the coefficients of `q^0 .. q^n`; the order is
    /// `cs.len() - 1`.
    pub fn from_coeffs(cs: &[i64], modulus: u64) -> Series {
        Series::check_modulus(modulus);
        assert!(!cs.is_empty(), "a series needs at least the q^0 coefficient");
        let coeffs = if modulus == 0 {
            Coeffs::Exact(cs.iter().map(|&c| BigInt::from(c)).collect())
        } else {
            Coeffs::Mod(cs.iter().map(|&c| i64_rep(c, modulus)).collect())
        };
        Series { modulus, coeffs }
    }

    /// As [`from_coeffs`](Series::from_coeffs) but with big-integer input.
    pub fn from_bigint_coeffs(cs: Vec<BigInt>, modulus: u64) -> Series {
        Series::check_modulus(modulus);
        assert!(!cs.is_empty(), "a series needs at least the q^0 coefficient");
        let coeffs = if modulus == 0 {
            Coeffs::Exact(cs)
        } else {
            let m = BigInt::from(modulus);
            Coeffs::Mod(
                cs.into_iter()
                    .map(|c| c.mod_floor(&m).to_u64().expect("reduced value fits u64"))
                    .collect(),
            )
        };
        Series { modulus, coeffs }
    }

    /// Largest exponent whose coefficient is known.
    pub fn order(&self) -> usize {
        match &self.coeffs {
            Coeffs::Exact(v) => v.len() - 1,
            Coeffs::Mod(v) => v.len() - 1,
        }
    }

    /// 0 for exact integer coefficients, `m` for `Z/mZ`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_exact(&self) -> bool {
        self.modulus == 0
    }

    /// Coefficient of `q^n` as a big integer (modular representatives are
    /// returned as their canonical value in `[0, m)`).
    pub fn coeff(&self, n: usize) -> Result<BigInt, SeriesError> {
        if n > self.order() {
            return Err(SeriesError::CoeffOutOfRange {
                index: n,
                order: self.order(),
            });
        }
        Ok(match &self.coeffs {
            Coeffs::Exact(v) => v[n].clone(),
            Coeffs::Mod(v) => BigInt::from(v[n]),
        })
    }

    /// All known coefficients as big integers.
    pub fn coeffs_bigint(&self) -> Vec<BigInt> {
        match &self.coeffs {
            Coeffs::Exact(v) => v.clone(),
            Coeffs::Mod(v) => v.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.coeffs {
            Coeffs::Exact(v) => v.iter().all(|c| c.is_zero()),
            Coeffs::Mod(v) => v.iter().all(|&c| c == 0),
        }
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn first_nonzero(&self) -> Option<usize> {
        match &self.coeffs {
            Coeffs::Exact(v) => v.iter().position(|c| !c.is_zero()),
            Coeffs::Mod(v) => v.iter().position(|&c| c != 0),
        }
    }

    /// First exponent `<= min(order)` where the two series disagree.
    ///
    /// # Panics
    /// Panics on modulus mismatch.
    pub fn first_difference(&self, other: &Series) -> Option<usize> {
        assert_eq!(self.modulus, other.modulus, "modulus mismatch");
        let n = self.order().min(other.order());
        match (&self.coeffs, &other.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => (0..=n).find(|&i| a[i] != b[i]),
            (Coeffs::Mod(a), Coeffs::Mod(b)) => (0..=n).find(|&i| a[i] != b[i]),
            _ => unreachable!("equal moduli imply equal representations"),
        }
    }

    /// Forget coefficients beyond `order` (which must not exceed the
    /// current order).
    pub fn truncated(&self, order: usize) -> Series {
        assert!(order <= self.order(), "cannot extend a series by truncation");
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v[..=order].to_vec()),
            Coeffs::Mod(v) => Coeffs::Mod(v[..=order].to_vec()),
        };
        Series {
            modulus: self.modulus,
            coeffs,
        }
    }

    /// Coefficientwise sum; the result is valid to the minimum of the two
    /// orders.
    ///
    /// # Panics
    /// Panics on modulus mismatch.
    pub fn add(&self, other: &Series) -> Series {
        assert_eq!(self.modulus, other.modulus, "modulus mismatch");
        let n = self.order().min(other.order());
        let m = self.modulus;
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => {
                Coeffs::Exact((0..=n).map(|i| &a[i] + &b[i]).collect())
            }
            (Coeffs::Mod(a), Coeffs::Mod(b)) => {
                Coeffs::Mod((0..=n).map(|i| addm(a[i], b[i], m)).collect())
            }
            _ => unreachable!(),
        };
        Series { modulus: m, coeffs }
    }

    /// Coefficientwise difference, truncated like [`add`](Series::add).
    pub fn sub(&self, other: &Series) -> Series {
        assert_eq!(self.modulus, other.modulus, "modulus mismatch");
        let n = self.order().min(other.order());
        let m = self.modulus;
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => {
                Coeffs::Exact((0..=n).map(|i| &a[i] - &b[i]).collect())
            }
            (Coeffs::Mod(a), Coeffs::Mod(b)) => {
                Coeffs::Mod((0..=n).map(|i| subm(a[i], b[i], m)).collect())
            }
            _ => unreachable!(),
        };
        Series { modulus: m, coeffs }
    }

    pub fn neg(&self) -> Series {
        let m = self.modulus;
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v.iter().map(|c| -c).collect()),
            Coeffs::Mod(v) => Coeffs::Mod(v.iter().map(|&c| if c == 0 { 0 } else { m - c }).collect()),
        };
        Series { modulus: m, coeffs }
    }

    /// Multiply every coefficient by the integer scalar `c`.
    pub fn scale(&self, c: i64) -> Series {
        let m = self.modulus;
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v.iter().map(|x| x * c).collect()),
            Coeffs::Mod(v) => {
                let cr = i64_rep(c, m);
                Coeffs::Mod(v.iter().map(|&x| mulm(x, cr, m)).collect())
            }
        };
        Series { modulus: m, coeffs }
    }

    /// Cauchy product, truncated to the minimum operand order.
    ///
    /// # Panics
    /// Panics on modulus mismatch.
    pub fn mul(&self, other: &Series) -> Series {
        assert_eq!(self.modulus, other.modulus, "modulus mismatch");
        let n = self.order().min(other.order());
        let m = self.modulus;
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => {
                let mut out = vec![BigInt::zero(); n + 1];
                for (i, ai) in a.iter().enumerate().take(n + 1) {
                    if ai.is_zero() {
                        continue;
                    }
                    for (j, bj) in b.iter().enumerate().take(n + 1 - i) {
                        if !bj.is_zero() {
                            out[i + j] += ai * bj;
                        }
                    }
                }
                Coeffs::Exact(out)
            }
            (Coeffs::Mod(a), Coeffs::Mod(b)) => {
                let mut out = vec![0u64; n + 1];
                for (i, &ai) in a.iter().enumerate().take(n + 1) {
                    if ai == 0 {
                        continue;
                    }
                    for (j, &bj) in b.iter().enumerate().take(n + 1 - i) {
                        out[i + j] = addm(out[i + j], mulm(ai, bj, m), m);
                    }
                }
                Coeffs::Mod(out)
            }
            _ => unreachable!(),
        };
        Series { modulus: m, coeffs }
    }

    /// Multiplicative inverse to the full order.
    ///
    /// Fails unless the constant term is a unit (`+-1` over `Z`,
    /// invertible mod `m`). Uses the standard recurrence
    /// `c[n] = -(1/a0) * sum_{k=1..n} a[k] c[n-k]`.
    pub fn try_inv(&self) -> Result<Series, SeriesError> {
        let n = self.order();
        let m = self.modulus;
        match &self.coeffs {
            Coeffs::Exact(a) => {
                let a0 = &a[0];
                if !a0.magnitude().is_one() {
                    return Err(SeriesError::NonUnitConstant);
                }
                // a0 = +-1 is its own inverse.
                let inv0 = a0.clone();
                let mut c = vec![BigInt::zero(); n + 1];
                c[0] = inv0.clone();
                for i in 1..=n {
                    let mut acc = BigInt::zero();
                    for k in 1..=i {
                        if !a[k].is_zero() {
                            acc += &a[k] * &c[i - k];
                        }
                    }
                    c[i] = -&inv0 * acc;
                }
                Ok(Series {
                    modulus: 0,
                    coeffs: Coeffs::Exact(c),
                })
            }
            Coeffs::Mod(a) => {
                let inv0 = invm(a[0], m).ok_or(SeriesError::NonUnitConstant)?;
                let mut c = vec![0u64; n + 1];
                c[0] = inv0;
                for i in 1..=n {
                    let mut acc = 0u64;
                    for k in 1..=i {
                        if a[k] != 0 {
                            acc = addm(acc, mulm(a[k], c[i - k], m), m);
                        }
                    }
                    c[i] = subm(0, mulm(inv0, acc, m), m);
                }
                Ok(Series {
                    modulus: m,
                    coeffs: Coeffs::Mod(c),
                })
            }
        }
    }

    /// Integer power by repeated squaring; `a^0 = 1`, negative exponents
    /// invert first (and fail on a non-unit constant term).
    pub fn try_pow(&self, e: i64) -> Result<Series, SeriesError> {
        if e == 0 {
            return Ok(Series::one(self.order(), self.modulus));
        }
        let base = if e < 0 { self.try_inv()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut result: Option<Series> = None;
        let mut power = base;
        loop {
            if exp & 1 == 1 {
                result = Some(match result {
                    Some(r) => r.mul(&power),
                    None => power.clone(),
                });
            }
            exp >>= 1;
            if exp == 0 {
                break;
            }
            power = power.mul(&power);
        }
        Ok(result.expect("nonzero exponent"))
    }

    /// Substitute `q -> q^k`: the coefficient of `q^{k n}` becomes this
    /// series' coefficient of `q^n`. The result is valid to order
    /// `k * (order + 1) - 1`, the full extent determined by the input.
    ///
    /// # Panics
    /// Panics when `k == 0`.
    pub fn substitute_power(&self, k: usize) -> Series {
        assert!(k >= 1, "substitution power must be at least 1");
        if k == 1 {
            return self.clone();
        }
        let n = self.order();
        let new_order = k * (n + 1) - 1;
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => {
                let mut out = vec![BigInt::zero(); new_order + 1];
                for (i, c) in v.iter().enumerate() {
                    out[k * i] = c.clone();
                }
                Coeffs::Exact(out)
            }
            Coeffs::Mod(v) => {
                let mut out = vec![0u64; new_order + 1];
                for (i, &c) in v.iter().enumerate() {
                    out[k * i] = c;
                }
                Coeffs::Mod(out)
            }
        };
        Series {
            modulus: self.modulus,
            coeffs,
        }
    }

    /// Substitute `q -> -q`, i.e. negate the coefficients of odd powers.
    pub fn alternate_signs(&self) -> Series {
        let m = self.modulus;
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(
                v.iter()
                    .enumerate()
                    .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                    .collect(),
            ),
            Coeffs::Mod(v) => Coeffs::Mod(
                v.iter()
                    .enumerate()
                    .map(|(i, &c)| if i % 2 == 1 && c != 0 { m - c } else { c })
                    .collect(),
            ),
        };
        Series { modulus: m, coeffs }
    }

    /// Reduce the coefficients into `Z/mZ`.
    ///
    /// Allowed from the exact ring, or from `Z/MZ` when `m` divides `M`.
    pub fn reduce_mod(&self, m: u64) -> Result<Series, SeriesError> {
        assert!(m >= 1, "target modulus must be positive");
        Series::check_modulus(m);
        match &self.coeffs {
            Coeffs::Exact(v) => {
                let mb = BigInt::from(m);
                let out = v
                    .iter()
                    .map(|c| c.mod_floor(&mb).to_u64().expect("reduced value fits u64"))
                    .collect();
                Ok(Series {
                    modulus: m,
                    coeffs: Coeffs::Mod(out),
                })
            }
            Coeffs::Mod(v) => {
                if self.modulus % m != 0 {
                    return Err(SeriesError::IncompatibleModulus {
                        old: self.modulus,
                        new: m,
                    });
                }
                Ok(Series {
                    modulus: m,
                    coeffs: Coeffs::Mod(v.iter().map(|&c| c % m).collect()),
                })
            }
        }
    }

    /// Multiply by a sparse signed 0/1 polynomial given as
    /// `(exponent, sign)` pairs. Linear in `order * support`.
    pub(crate) fn mul_support(&self, support: &[(usize, i8)]) -> Series {
        let n = self.order();
        let m = self.modulus;
        let coeffs = match &self.coeffs {
            Coeffs::Exact(a) => {
                let mut out = vec![BigInt::zero(); n + 1];
                for &(g, s) in support {
                    if g > n {
                        break;
                    }
                    if s > 0 {
                        for i in 0..=(n - g) {
                            out[i + g] += &a[i];
                        }
                    } else {
                        for i in 0..=(n - g) {
                            out[i + g] -= &a[i];
                        }
                    }
                }
                Coeffs::Exact(out)
            }
            Coeffs::Mod(a) => {
                let mut out = vec![0u64; n + 1];
                for &(g, s) in support {
                    if g > n {
                        break;
                    }
                    if s > 0 {
                        for i in 0..=(n - g) {
                            out[i + g] = addm(out[i + g], a[i], m);
                        }
                    } else {
                        for i in 0..=(n - g) {
                            out[i + g] = subm(out[i + g], a[i], m);
                        }
                    }
                }
                Coeffs::Mod(out)
            }
        };
        Series { modulus: m, coeffs }
    }

    /// Divide by a sparse signed 0/1 polynomial whose support starts with
    /// `(0, +1)`, via the forward recurrence. Linear in `order * support`.
    pub(crate) fn div_support(&self, support: &[(usize, i8)]) -> Series {
        assert!(
            support.first() == Some(&(0, 1)),
            "sparse divisor must have constant term 1"
        );
        let n = self.order();
        let m = self.modulus;
        let tail = &support[1..];
        let coeffs = match &self.coeffs {
            Coeffs::Exact(a) => {
                let mut c = vec![BigInt::zero(); n + 1];
                for i in 0..=n {
                    let mut acc = a[i].clone();
                    for &(g, s) in tail {
                        if g > i {
                            break;
                        }
                        if s > 0 {
                            acc -= &c[i - g];
                        } else {
                            acc += &c[i - g];
                        }
                    }
                    c[i] = acc;
                }
                Coeffs::Exact(c)
            }
            Coeffs::Mod(a) => {
                let mut c = vec![0u64; n + 1];
                for i in 0..=n {
                    let mut acc = a[i];
                    for &(g, s) in tail {
                        if g > i {
                            break;
                        }
                        if s > 0 {
                            acc = subm(acc, c[i - g], m);
                        } else {
                            acc = addm(acc, c[i - g], m);
                        }
                    }
                    c[i] = acc;
                }
                Coeffs::Mod(c)
            }
        };
        Series { modulus: m, coeffs }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for n in 0..=self.order() {
            let c = self.coeff(n).expect("in range");
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -&c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            if mag.is_one() && n > 0 {
                // coefficient 1 is implicit next to a power of q
            } else {
                write!(f, "{mag}")?;
                if n > 0 {
                    write!(f, "*")?;
                }
            }
            if n == 1 {
                write!(f, "q")?;
            } else if n > 1 {
                write!(f, "q^{n}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[mod {}]({})", self.modulus, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(cs: &[i64], m: u64) -> Series {
        Series::from_coeffs(cs, m)
    }

    /// Independent partition-count oracle: p(n) by recursive enumeration
    /// over a bounded largest part. Shares nothing with Series.
    fn partitions(n: usize) -> u64 {
        fn count(n: usize, max: usize) -> u64 {
            if n == 0 {
                return 1;
            }
            (1..=max.min(n)).map(|p| count(n - p, p)).sum()
        }
        count(n, n.max(1))
    }

    /// All-ones geometric series 1/(1-q).
    fn ones(order: usize, m: u64) -> Series {
        Series::from_coeffs(&vec![1; order + 1], m)
    }

    #[test]
    fn add_cancellation() {
        let a = s(&[1, 1], 0);
        let b = s(&[1, -1], 0);
        assert_eq!(a.add(&b), s(&[2, 0], 0));
    }

    #[test]
    fn add_identity_and_truncation() {
        let a = s(&[3, 7, -2], 0);
        assert_eq!(a.add(&Series::zero(2, 0)), a);
        let long = s(&[1, 1, 1], 0);
        let short = s(&[3, 5], 0);
        let sum = long.add(&short);
        assert_eq!(sum, s(&[4, 6], 0));
        assert_eq!(sum.order(), 1);
    }

    #[test]
    #[should_panic(expected = "modulus mismatch")]
    fn add_modulus_mismatch_panics() {
        let _ = s(&[1], 0).add(&s(&[1], 5));
    }

    #[test]
    fn mul_geometric() {
        let n = 40;
        let one_minus_q = Series::monomial(1, 0, n, 0).sub(&Series::monomial(1, 1, n, 0));
        assert_eq!(one_minus_q.mul(&ones(n, 0)), Series::one(n, 0));
        let a = s(&[2, -3, 5, 0, 1], 0);
        assert_eq!(a.mul(&Series::one(4, 0)), a);
    }

    #[test]
    fn inv_geometric_and_partitions() {
        let n = 30;
        let one_minus_q = Series::monomial(1, 0, n, 0).sub(&Series::monomial(1, 1, n, 0));
        assert_eq!(one_minus_q.try_inv().unwrap(), ones(n, 0));

        // inv(f1) has the partition numbers as coefficients.
        let f1 = crate::eta::eta_power(1, 1, n, 0);
        let p = f1.try_inv().unwrap();
        assert_eq!(p.coeff(5).unwrap(), BigInt::from(7));
        assert_eq!(p.coeff(4).unwrap(), BigInt::from(5));
        for k in 0..=12 {
            assert_eq!(p.coeff(k).unwrap(), BigInt::from(partitions(k)), "p({k})");
        }
        // ...and multiplies back to 1 against the pentagonal expansion.
        assert_eq!(p.mul(&f1), Series::one(n, 0));
    }

    #[test]
    fn partition_series_times_f1_is_one_to_50() {
        let n = 50;
        let p: Vec<i64> = (0..=n).map(|k| partitions(k) as i64).collect();
        let pseries = Series::from_coeffs(&p, 0);
        let f1 = crate::eta::eta_power(1, 1, n, 0);
        assert_eq!(pseries.mul(&f1), Series::one(n, 0));
    }

    #[test]
    fn inv_constant_mod() {
        let three = Series::constant(3, 0, 128);
        let inv = three.try_inv().unwrap();
        assert_eq!(inv.coeff(0).unwrap(), BigInt::from(43u32));
    }

    #[test]
    fn inv_non_unit() {
        assert_eq!(s(&[2, 1], 0).try_inv(), Err(SeriesError::NonUnitConstant));
        assert_eq!(s(&[2, 1], 6).try_inv(), Err(SeriesError::NonUnitConstant));
        assert!(s(&[-1, 4], 0).try_inv().is_ok());
    }

    #[test]
    fn pow_basics() {
        let a = s(&[1, 1], 0);
        assert_eq!(a.try_pow(2).unwrap(), s(&[1, 2], 0));
        let b = s(&[1, 2, 1, 0, 3], 0);
        assert_eq!(b.try_pow(0).unwrap(), Series::one(4, 0));
        let sq = s(&[1, 2, 1], 0);
        assert_eq!(sq.try_pow(2).unwrap().coeff(2).unwrap(), BigInt::from(6));
    }

    #[test]
    fn pow_binomial_congruence_instance() {
        // f1^64 = f2^32 (mod 64) to order 200, both via independent powering.
        let n = 200;
        let f1 = crate::eta::eta_power(1, 1, n, 64);
        let f2 = crate::eta::eta_power(2, 1, n, 64);
        assert_eq!(f1.try_pow(64).unwrap(), f2.try_pow(32).unwrap());
    }

    #[test]
    fn substitute_power_basics() {
        let a = s(&[1, 1], 0);
        let b = a.substitute_power(3);
        assert_eq!(b.order(), 5);
        assert_eq!(b.coeff(0).unwrap(), BigInt::from(1));
        assert_eq!(b.coeff(3).unwrap(), BigInt::from(1));
        assert!(b.coeff(1).unwrap().is_zero() && b.coeff(5).unwrap().is_zero());
        assert_eq!(a.substitute_power(1), a);
    }

    #[test]
    fn substitute_matches_direct_eta_expansion() {
        let n = 60;
        let f1 = crate::eta::eta_power(1, 1, n, 0);
        let f2 = crate::eta::eta_power(2, 1, n, 0);
        assert_eq!(f1.substitute_power(2).truncated(n), f2);
    }

    #[test]
    fn reduce_mod_basics() {
        let a = Series::monomial(128, 1, 3, 0);
        assert!(a.reduce_mod(128).unwrap().is_zero());
        let b = Series::constant(-1, 0, 0);
        assert_eq!(b.reduce_mod(64).unwrap().coeff(0).unwrap(), BigInt::from(63));
        // 384 -> 128 is allowed, 384 -> 100 is not.
        let c = s(&[5, 200], 384);
        assert_eq!(c.reduce_mod(128).unwrap(), s(&[5, 72], 128));
        assert_eq!(
            c.reduce_mod(100),
            Err(SeriesError::IncompatibleModulus { old: 384, new: 100 })
        );
    }

    #[test]
    fn coeff_range() {
        let a = s(&[1, 2], 0);
        assert_eq!(a.coeff(1).unwrap(), BigInt::from(2));
        assert_eq!(
            a.coeff(2),
            Err(SeriesError::CoeffOutOfRange { index: 2, order: 1 })
        );
    }

    #[test]
    fn display_reads_naturally() {
        let f1 = crate::eta::eta_power(1, 1, 8, 0);
        assert_eq!(f1.to_string(), "1 - q - q^2 + q^5 + q^7 + O(q^9)");
    }

    #[test]
    fn sparse_support_matches_dense() {
        let a = s(&[3, 1, 4, 1, 5, 9, 2, 6], 0);
        let sup = [(0usize, 1i8), (2, -1), (5, 1)];
        let dense = s(&[1, 0, -1, 0, 0, 1, 0, 0], 0);
        assert_eq!(a.mul_support(&sup), a.mul(&dense));
        assert_eq!(a.div_support(&sup).mul(&dense), a);
        let am = s(&[3, 1, 4, 1, 5, 9, 2, 6], 97);
        let densem = s(&[1, 0, -1, 0, 0, 1, 0, 0], 97);
        assert_eq!(am.mul_support(&sup), am.mul(&densem));
        assert_eq!(am.div_support(&sup).mul(&densem), am);
    }

    proptest! {
        #[test]
        fn mul_by_inverse_is_one(cs in proptest::collection::vec(-9i64..=9, 1..24), unit in prop_oneof![Just(1i64), Just(-1i64)]) {
            let mut cs = cs;
            cs[0] = unit;
            let a = Series::from_coeffs(&cs, 0);
            prop_assert_eq!(a.mul(&a.try_inv().unwrap()), Series::one(a.order(), 0));
            // Same sequence in Z/384Z (the constant becomes a unit there too).
            let am = Series::from_coeffs(&cs, 384);
            prop_assert_eq!(am.mul(&am.try_inv().unwrap()), Series::one(am.order(), 384));
        }

        #[test]
        fn pow_is_additive(cs in proptest::collection::vec(-5i64..=5, 1..12), e in -5i64..=5, f in -5i64..=5) {
            let mut cs = cs;
            cs[0] = 1;
            let a = Series::from_coeffs(&cs, 0);
            let lhs = a.try_pow(e + f).unwrap();
            let rhs = a.try_pow(e).unwrap().mul(&a.try_pow(f).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn reduce_commutes_with_ring_ops(a in proptest::collection::vec(-50i64..=50, 1..16), b in proptest::collection::vec(-50i64..=50, 1..16)) {
            let (x, y) = (Series::from_coeffs(&a, 0), Series::from_coeffs(&b, 0));
            let m = 384;
            let (xm, ym) = (x.reduce_mod(m).unwrap(), y.reduce_mod(m).unwrap());
            prop_assert_eq!(x.mul(&y).reduce_mod(m).unwrap(), xm.mul(&ym));
            prop_assert_eq!(x.add(&y).reduce_mod(m).unwrap(), xm.add(&ym));
        }

        #[test]
        fn substitute_then_extract_roundtrips(cs in proptest::collection::vec(-9i64..=9, 1..20), k in 1usize..=5) {
            let a = Series::from_coeffs(&cs, 0);
            let spread = a.substitute_power(k);
            prop_assert_eq!(crate::dissect::extract_progression(&spread, 0, k), a);
        }
    }
}
