//! Exact integer/rational arithmetic, p-adic valuations and residue rings
//! `Z/p^e`.
//!
//! Rationals are `num_rational::BigRational`, which is always kept in lowest
//! terms with a positive denominator. Everything congruence-shaped in the
//! crate bottoms out in [`ord_p`] or in a [`Residue`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Exponent of a prime in a rational; `Infinite` is the valuation of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn finite(&self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinite => None,
        }
    }

    /// True iff the valuation is at least `e`.
    pub fn at_least(&self, e: i64) -> bool {
        match self {
            Valuation::Finite(v) => *v >= e,
            Valuation::Infinite => true,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Valuation of a nonzero integer, counting factors by repeated division.
pub fn ord_p_int(x: &BigInt, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut cur = x.clone();
    loop {
        let (q, r) = cur.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        v += 1;
        cur = q;
    }
    Valuation::Finite(v)
}

pub fn ord_p(x: &Rational, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    match (ord_p_int(x.numer(), p), ord_p_int(x.denom(), p)) {
        (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a - b),
        _ => unreachable!("numerator and denominator of a nonzero rational are nonzero"),
    }
}

fn denominator_coprime(x: &Rational, p: u64) -> Result<()> {
    if (x.denom() % BigInt::from(p)).is_zero() {
        Err(Error::DenominatorDivisibleByP { p })
    } else {
        Ok(())
    }
}

/// The modulus `p^e` with `p >= 5` prime and `e >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimePowerModulus {
    p: u64,
    e: u32,
    value: BigInt,
}

impl PrimePowerModulus {
    pub fn new(p: u64, e: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p < 5 {
            return Err(Error::PrimeTooSmall(p));
        }
        if e == 0 {
            return Err(Error::ZeroExponent);
        }
        Ok(PrimePowerModulus {
            p,
            e,
            value: num_traits::pow(BigInt::from(p), e as usize),
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.e
    }

    /// `p^e` itself.
    pub fn value(&self) -> &BigInt {
        &self.value
    }

    /// Same prime, different exponent.
    pub fn with_exponent(&self, e: u32) -> Result<Self> {
        PrimePowerModulus::new(self.p, e)
    }
}

impl fmt::Display for PrimePowerModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.e)
    }
}

/// An element of `Z/p^e`. Arithmetic between residues of different moduli is
/// rejected with [`Error::ModulusMismatch`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Residue {
    value: BigInt,
    modulus: PrimePowerModulus,
}

impl Residue {
    pub fn from_int(x: &BigInt, modulus: &PrimePowerModulus) -> Residue {
        Residue {
            value: x.mod_floor(modulus.value()),
            modulus: modulus.clone(),
        }
    }

    pub fn zero(modulus: &PrimePowerModulus) -> Residue {
        Residue { value: BigInt::zero(), modulus: modulus.clone() }
    }

    pub fn one(modulus: &PrimePowerModulus) -> Residue {
        Residue::from_int(&BigInt::one(), modulus)
    }

    /// Representative in `[0, p^e)`.
    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn modulus(&self) -> &PrimePowerModulus {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn check(&self, other: &Residue) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.to_string(),
                right: other.modulus.to_string(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Residue) -> Result<Residue> {
        self.check(other)?;
        Ok(Residue::from_int(&(&self.value + &other.value), &self.modulus))
    }

    pub fn try_sub(&self, other: &Residue) -> Result<Residue> {
        self.check(other)?;
        Ok(Residue::from_int(&(&self.value - &other.value), &self.modulus))
    }

    pub fn try_mul(&self, other: &Residue) -> Result<Residue> {
        self.check(other)?;
        Ok(Residue::from_int(&(&self.value * &other.value), &self.modulus))
    }

    pub fn neg(&self) -> Residue {
        Residue::from_int(&-&self.value, &self.modulus)
    }

    pub fn inverse(&self) -> Result<Residue> {
        self.value
            .modinv(self.modulus.value())
            .map(|v| Residue::from_int(&v, &self.modulus))
            .ok_or_else(|| Error::NotInvertible {
                value: self.value.to_string(),
                modulus: self.modulus.to_string(),
            })
    }

    /// Image under the projection `Z/p^e -> Z/p^f` for `f <= e`.
    pub fn project(&self, e: u32) -> Result<Residue> {
        if e > self.modulus.exponent() {
            return Err(Error::InvalidParams(format!(
                "cannot lift a residue mod {} to exponent {e}",
                self.modulus
            )));
        }
        let target = self.modulus.with_exponent(e)?;
        Ok(Residue::from_int(&self.value, &target))
    }

    /// `ord_p` of the representative, reported as `e` when the residue is 0
    /// (the true valuation is then only known to be `>= e`).
    pub fn valuation_capped(&self) -> u32 {
        match ord_p_int(&self.value, self.modulus.prime()) {
            Valuation::Finite(v) => v as u32,
            Valuation::Infinite => self.modulus.exponent(),
        }
    }

    /// Valuation of `self - other`, capped at the common exponent.
    pub fn agreement(&self, other: &Residue) -> Result<u32> {
        Ok(self.try_sub(other)?.valuation_capped())
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

/// `x ≡ y (mod p^e)` for rationals with `p`-free denominators.
pub fn rational_congruent(x: &Rational, y: &Rational, modulus: &PrimePowerModulus) -> Result<bool> {
    denominator_coprime(x, modulus.prime())?;
    denominator_coprime(y, modulus.prime())?;
    Ok(ord_p(&(x - y), modulus.prime()).at_least(modulus.exponent() as i64))
}

pub fn reduce_mod(x: &Rational, modulus: &PrimePowerModulus) -> Result<Residue> {
    denominator_coprime(x, modulus.prime())?;
    let inv = x
        .denom()
        .modinv(modulus.value())
        .expect("denominator coprime to p is a unit mod p^e");
    Ok(Residue::from_int(&(x.numer() * inv), modulus))
}

/// `(⌊k/p^m⌋, {k/p^m})`.
pub fn floor_div_and_remainder(k: u64, p: u64, m: u32) -> (u64, u64) {
    let pm = p.pow(m);
    (k / pm, k % pm)
}

/// Integer `p^e` as a `BigInt`.
pub fn big_pow(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(x: BigInt) -> Rational {
    Rational::from_integer(x)
}

/// Human-readable rational, `n` or `n/d`.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Integer quotient `x / p^e` when exact.
pub fn exact_div_pow(x: &BigInt, p: u64, e: u32) -> Option<BigInt> {
    let (q, r) = x.div_rem(&big_pow(p, e));
    r.is_zero().then_some(q)
}
