//! Coefficient rings used by the elimination engines.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub trait Ring: Clone + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_unit(&self, a: &Self::Elem) -> bool;
    /// `a / b`, assuming `b` divides `a`.
    fn quotient(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

pub trait Field: Ring {
    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        self.quotient(&self.one(), a)
    }
}

/// ℤ with arbitrary precision.
#[derive(Clone, Copy, Debug, Default)]
pub struct Integers;

impl Ring for Integers {
    type Elem = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_i64(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }
    fn from_bigint(&self, v: &BigInt) -> BigInt {
        v.clone()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn is_unit(&self, a: &BigInt) -> bool {
        a.abs().is_one()
    }
    fn quotient(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a / b
    }
}

/// ℤ in `i64` with an overflow flag. On overflow results are garbage and the
/// flag is raised; callers rerun over [`Integers`].
#[derive(Clone, Debug, Default)]
pub struct CheckedIntegers {
    overflow: Arc<AtomicBool>,
}

impl CheckedIntegers {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn overflowed(&self) -> bool {
        self.overflow.load(Ordering::Relaxed)
    }

    fn flag<T: Default>(&self, v: Option<T>) -> T {
        v.unwrap_or_else(|| {
            self.overflow.store(true, Ordering::Relaxed);
            T::default()
        })
    }
}

impl Ring for CheckedIntegers {
    type Elem = i64;
    fn zero(&self) -> i64 {
        0
    }
    fn one(&self) -> i64 {
        1
    }
    fn from_i64(&self, v: i64) -> i64 {
        v
    }
    fn from_bigint(&self, v: &BigInt) -> i64 {
        self.flag(v.to_i64())
    }
    fn is_zero(&self, a: &i64) -> bool {
        *a == 0
    }
    fn add(&self, a: &i64, b: &i64) -> i64 {
        self.flag(a.checked_add(*b))
    }
    fn mul(&self, a: &i64, b: &i64) -> i64 {
        self.flag(a.checked_mul(*b))
    }
    fn neg(&self, a: &i64) -> i64 {
        self.flag(a.checked_neg())
    }
    fn is_unit(&self, a: &i64) -> bool {
        *a == 1 || *a == -1
    }
    fn quotient(&self, a: &i64, b: &i64) -> i64 {
        self.flag(a.checked_div(*b))
    }
}

/// ℤ/p for a prime p < 2³¹, residues in `[0, p)`.
#[derive(Clone, Debug)]
pub struct PrimeField {
    p: u64,
    inverses: Arc<Vec<u64>>,
}

const INVERSE_TABLE_LIMIT: u64 = 1 << 16;

impl PrimeField {
    /// `p` must be prime; see [`crate::linalg::RingTag::mod_p`] for a checked constructor.
    pub fn new(p: u64) -> Self {
        let inverses = if p <= INVERSE_TABLE_LIMIT {
            let mut t = vec![0u64; p as usize];
            if p > 1 {
                t[1] = 1;
            }
            for a in 2..p {
                // inv(a) = -(p / a) * inv(p mod a)
                t[a as usize] = (p - (p / a) * t[(p % a) as usize] % p) % p;
            }
            t
        } else {
            Vec::new()
        };
        Self {
            p,
            inverses: Arc::new(inverses),
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        acc
    }
}

impl Ring for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_i64(&self, v: i64) -> u64 {
        self.reduce_i64(v)
    }
    fn from_bigint(&self, v: &BigInt) -> u64 {
        let r = v % BigInt::from(self.p);
        let r = if r.is_negative() { r + BigInt::from(self.p) } else { r };
        r.to_u64().expect("residue fits")
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn is_unit(&self, a: &u64) -> bool {
        *a != 0
    }
    fn quotient(&self, a: &u64, b: &u64) -> u64 {
        self.mul(a, &self.inv(b))
    }
}

impl Field for PrimeField {
    fn inv(&self, a: &u64) -> u64 {
        if self.p <= INVERSE_TABLE_LIMIT {
            self.inverses[*a as usize]
        } else {
            self.pow(*a, self.p - 2)
        }
    }
}

/// ℚ with arbitrary precision.
#[derive(Clone, Copy, Debug, Default)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn is_unit(&self, a: &BigRational) -> bool {
        !a.is_zero()
    }
    fn quotient(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a / b
    }
}

impl Field for Rationals {}

/// ℚ as reduced `i64` fractions with an overflow flag, like [`CheckedIntegers`].
/// Callers rerun over [`Rationals`] when the flag is raised.
#[derive(Clone, Debug, Default)]
pub struct CheckedRationals {
    overflow: Arc<AtomicBool>,
}

impl CheckedRationals {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn overflowed(&self) -> bool {
        self.overflow.load(Ordering::Relaxed)
    }

    fn reduce(&self, n: i128, d: i128) -> (i64, i64) {
        if n == 0 {
            return (0, 1);
        }
        let g = num_integer::gcd(n, d);
        let (mut n, mut d) = (n / g, d / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => (n, d),
            _ => {
                self.overflow.store(true, Ordering::Relaxed);
                (0, 1)
            }
        }
    }
}

impl Ring for CheckedRationals {
    type Elem = (i64, i64);
    fn zero(&self) -> (i64, i64) {
        (0, 1)
    }
    fn one(&self) -> (i64, i64) {
        (1, 1)
    }
    fn from_i64(&self, v: i64) -> (i64, i64) {
        (v, 1)
    }
    fn from_bigint(&self, v: &BigInt) -> (i64, i64) {
        match v.to_i64() {
            Some(v) => (v, 1),
            None => {
                self.overflow.store(true, Ordering::Relaxed);
                (0, 1)
            }
        }
    }
    fn is_zero(&self, a: &(i64, i64)) -> bool {
        a.0 == 0
    }
    fn add(&self, a: &(i64, i64), b: &(i64, i64)) -> (i64, i64) {
        if a.1 == b.1 {
            return self.reduce(i128::from(a.0) + i128::from(b.0), i128::from(a.1));
        }
        let n = i128::from(a.0) * i128::from(b.1) + i128::from(b.0) * i128::from(a.1);
        self.reduce(n, i128::from(a.1) * i128::from(b.1))
    }
    fn mul(&self, a: &(i64, i64), b: &(i64, i64)) -> (i64, i64) {
        self.reduce(i128::from(a.0) * i128::from(b.0), i128::from(a.1) * i128::from(b.1))
    }
    fn neg(&self, a: &(i64, i64)) -> (i64, i64) {
        self.reduce(-i128::from(a.0), i128::from(a.1))
    }
    fn is_unit(&self, a: &(i64, i64)) -> bool {
        a.0 != 0
    }
    fn quotient(&self, a: &(i64, i64), b: &(i64, i64)) -> (i64, i64) {
        self.reduce(i128::from(a.0) * i128::from(b.1), i128::from(a.1) * i128::from(b.0))
    }
}

impl Field for CheckedRationals {}

/// ℤ/p^N with p^N < 2⁶², used to follow p-adic valuations through elimination.
///
/// `quotient(a, b)` needs `v(b) ≤ v(a)`; the result is exact modulo `p^(N - v(b))`,
/// which is all the Bockstein elimination ever multiplies back up.
#[derive(Clone, Debug)]
pub struct TruncatedPadic {
    p: u128,
    digits: u32,
    modulus: u128,
}

impl TruncatedPadic {
    pub fn new(p: u64) -> Self {
        let p = u128::from(p);
        let mut modulus = 1u128;
        let mut digits = 0;
        while modulus * p < (1u128 << 62) {
            modulus *= p;
            digits += 1;
        }
        Self { p, digits, modulus }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn prime(&self) -> u64 {
        self.p as u64
    }

    /// p-adic valuation, `None` for zero.
    pub fn valuation(&self, a: &u128) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        let mut v = 0;
        let mut x = *a;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        Some(v)
    }

    fn inv_unit(&self, u: u128) -> u128 {
        // Extended Euclid on (u, p^N).
        let m = self.modulus as i128;
        let (mut r0, mut r1) = (m, u as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        t0.rem_euclid(m) as u128
    }
}

impl Ring for TruncatedPadic {
    type Elem = u128;
    fn zero(&self) -> u128 {
        0
    }
    fn one(&self) -> u128 {
        1
    }
    fn from_i64(&self, v: i64) -> u128 {
        (i128::from(v)).rem_euclid(self.modulus as i128) as u128
    }
    fn from_bigint(&self, v: &BigInt) -> u128 {
        let m = BigInt::from(self.modulus);
        let r = ((v % &m) + &m) % &m;
        r.to_u128().expect("residue fits")
    }
    fn is_zero(&self, a: &u128) -> bool {
        *a == 0
    }
    fn add(&self, a: &u128, b: &u128) -> u128 {
        (a + b) % self.modulus
    }
    fn mul(&self, a: &u128, b: &u128) -> u128 {
        a * b % self.modulus
    }
    fn neg(&self, a: &u128) -> u128 {
        (self.modulus - a) % self.modulus
    }
    fn is_unit(&self, a: &u128) -> bool {
        a % self.p != 0
    }
    fn quotient(&self, a: &u128, b: &u128) -> u128 {
        let mut a = *a;
        let mut b = *b;
        while b % self.p == 0 {
            b /= self.p;
            a /= self.p;
        }
        self.mul(&a, &self.inv_unit(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverses() {
        for p in [2u64, 3, 5, 7, 65521, 2147483647] {
            let f = PrimeField::new(p);
            for a in [1u64, 2, 3, p - 1] {
                let a = a % p;
                if a == 0 {
                    continue;
                }
                assert_eq!(f.mul(&a, &f.inv(&a)), 1, "p={p} a={a}");
            }
        }
        let f = PrimeField::new(5);
        assert_eq!(f.from_i64(-7), 3);
        assert_eq!(f.from_bigint(&BigInt::from(-7)), 3);
    }

    #[test]
    fn checked_rationals_reduce_and_flag() {
        let q = CheckedRationals::new();
        let half = q.quotient(&(1, 1), &(2, 1));
        assert_eq!(half, (1, 2));
        assert_eq!(q.add(&half, &(-1, 3)), (1, 6));
        assert_eq!(q.quotient(&(1, 1), &(-2, 1)), (-1, 2));
        assert!(!q.overflowed());
        let _ = q.mul(&(i64::MAX, 1), &(3, 1));
        assert!(q.overflowed());
    }

    #[test]
    fn checked_integers_flag_overflow() {
        let z = CheckedIntegers::new();
        assert_eq!(z.mul(&3, &-4), -12);
        assert!(!z.overflowed());
        let _ = z.mul(&i64::MAX, &2);
        assert!(z.overflowed());
        // Clones share the flag.
        let z2 = CheckedIntegers::new();
        let z3 = z2.clone();
        let _ = z3.add(&i64::MAX, &1);
        assert!(z2.overflowed());
    }

    #[test]
    fn truncated_padic_quotients() {
        let r = TruncatedPadic::new(2);
        assert_eq!(r.digits(), 61);
        assert_eq!(r.valuation(&12), Some(2));
        assert_eq!(r.valuation(&0), None);
        // 12 / 4 = 3
        assert_eq!(r.quotient(&12, &4), 3);
        // 6 / (-2) = -3, known modulo 2^60
        let m2 = r.from_i64(-2);
        let low = (1u128 << 60) - 1;
        assert_eq!(r.quotient(&6, &m2) & low, r.from_i64(-3) & low);
        let r3 = TruncatedPadic::new(3);
        let five = r3.from_i64(5);
        let inv = r3.quotient(&1, &five);
        assert_eq!(r3.mul(&inv, &five), 1);
    }
}
