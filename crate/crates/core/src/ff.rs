//! Arithmetic in the prime field F_p.
//!
//! Elements are canonical residues in `[0, p)` tagged with their modulus, so
//! mixing elements of different fields is caught at the operation site.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest modulus accepted. Products of two residues must fit in a `u64`.
pub const MAX_PRIME: u64 = 1 << 20;

/// The prime field F_p with `p >= 5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FpField {
    p: u64,
}

impl FpField {
    /// Validates `p` (prime, `5 <= p <= 2^20`).
    pub fn new(p: u64) -> Result<Self> {
        if p < 5 || !is_prime(p) {
            return Err(Error::BadPrime(p));
        }
        if p > MAX_PRIME {
            return Err(Error::BadPrime(p));
        }
        Ok(FpField { p })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Order of the field as a `usize`, convenient for indexing signals.
    #[inline]
    pub fn size(&self) -> usize {
        self.p as usize
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn elem(&self, v: i64) -> Fp {
        Fp {
            value: v.rem_euclid(self.p as i64) as u64,
            p: self.p,
        }
    }

    #[inline]
    pub fn zero(&self) -> Fp {
        Fp { value: 0, p: self.p }
    }

    #[inline]
    pub fn one(&self) -> Fp {
        Fp { value: 1, p: self.p }
    }

    /// All elements in canonical order `0, 1, ..., p-1`.
    pub fn elements(&self) -> impl Iterator<Item = Fp> + '_ {
        (0..self.p).map(move |v| Fp { value: v, p: self.p })
    }

    /// `1/2` in F_p.
    #[inline]
    pub fn half(&self) -> Fp {
        Fp {
            value: self.p.div_ceil(2),
            p: self.p,
        }
    }

    /// Smallest positive integer generating the cyclic group F_p^×.
    pub fn mult_generator(&self) -> Fp {
        let n = self.p - 1;
        let divisors = prime_divisors(n);
        (2..self.p)
            .map(|r| self.elem(r as i64))
            .find(|r| divisors.iter().all(|q| r.pow(n / q).value != 1))
            .unwrap_or_else(|| self.one()) // unreachable for prime p
    }
}

/// An element of F_p.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp {
    value: u64,
    p: u64,
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.p)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Fp {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.value as usize
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn field(&self) -> FpField {
        FpField { p: self.p }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &Fp) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn try_add(self, rhs: Fp) -> Result<Fp> {
        self.check(&rhs)?;
        Ok(Fp {
            value: (self.value + rhs.value) % self.p,
            p: self.p,
        })
    }

    pub fn try_sub(self, rhs: Fp) -> Result<Fp> {
        self.check(&rhs)?;
        Ok(Fp {
            value: (self.value + self.p - rhs.value) % self.p,
            p: self.p,
        })
    }

    pub fn try_mul(self, rhs: Fp) -> Result<Fp> {
        self.check(&rhs)?;
        Ok(Fp {
            value: (self.value * rhs.value) % self.p,
            p: self.p,
        })
    }

    pub fn pow(self, mut e: u64) -> Fp {
        let mut base = self.value;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        Fp { value: acc, p: self.p }
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(self) -> Result<Fp> {
        if self.is_zero() {
            return Err(Error::NonInvertible);
        }
        Ok(self.pow(self.p - 2))
    }

    /// Legendre symbol: `0` for zero, `+1` for nonzero squares, `-1` otherwise.
    pub fn legendre(self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        if self.pow((self.p - 1) / 2).value == 1 {
            1
        } else {
            -1
        }
    }

    /// Multiplicative order; divides `p - 1`.
    pub fn order(self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::NonInvertible);
        }
        let n = self.p - 1;
        let mut ord = n;
        for q in prime_divisors(n) {
            while ord.is_multiple_of(q) && self.pow(ord / q).value == 1 {
                ord /= q;
            }
        }
        Ok(ord)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.try_add(rhs).expect("F_p modulus mismatch")
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self.try_sub(rhs).expect("F_p modulus mismatch")
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.try_mul(rhs).expect("F_p modulus mismatch")
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            value: (self.p - self.value) % self.p,
            p: self.p,
        }
    }
}

/// Deterministic trial-division primality test; adequate for `p <= 2^20`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime divisors in increasing order.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
