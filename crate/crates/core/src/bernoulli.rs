//! Exact Bernoulli numbers (convention `B_1 = -1/2`) and `B_{p-3} mod p`.

use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{is_prime, rat, reduce_mod, PrimePowerModulus, Rational, Residue};
use crate::binomial::BinomialRow;
use crate::error::{Error, Result};

pub const DEFAULT_CAP: u64 = 2000;

/// Bernoulli numbers `B_0..=B_len-1`, grown on demand up to `cap`.
#[derive(Debug, Clone)]
pub struct BernoulliTable {
    values: Vec<Rational>,
    cap: u64,
}

impl BernoulliTable {
    pub fn new(cap: u64) -> Self {
        BernoulliTable { values: vec![Rational::one()], cap }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, n: u64) -> Option<&Rational> {
        self.values.get(n as usize)
    }

    /// Extends the table through index `n` with
    /// `B_n = -1/(n+1) * sum_{j<n} C(n+1, j) B_j`.
    pub fn extend_to(&mut self, n: u64) -> Result<()> {
        if n > self.cap {
            return Err(Error::CapExceeded { requested: n, cap: self.cap });
        }
        while (self.values.len() as u64) <= n {
            let idx = self.values.len() as u64;
            let next = if idx >= 3 && idx % 2 == 1 {
                Rational::zero()
            } else {
                let row = BinomialRow::new(idx + 1);
                let mut acc = Rational::zero();
                for (j, b) in self.values.iter().enumerate() {
                    if !b.is_zero() {
                        acc += b * row.get(j as i64);
                    }
                }
                -acc / Rational::from_integer(BigInt::from(idx + 1))
            };
            self.values.push(next);
        }
        Ok(())
    }

    /// Checks `B_0 = 1`, `B_1 = -1/2`, the vanishing of odd entries and the
    /// von Staudt–Clausen denominator of every even entry.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for (n, b) in self.values.iter().enumerate() {
            let n = n as u64;
            match n {
                0 if !b.is_one() => return Err("B_0 != 1".into()),
                1 if *b != rat(-1, 2) => return Err("B_1 != -1/2".into()),
                _ if n >= 3 && n % 2 == 1 && !b.is_zero() => return Err(format!("B_{n} != 0")),
                _ if n >= 2 && n.is_multiple_of(2) && *b.denom() != von_staudt_clausen_denominator(n) => {
                    return Err(format!("denominator of B_{n} is {}", b.denom()))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Product of the primes `q` with `(q - 1) | n`, for even `n >= 2`.
pub fn von_staudt_clausen_denominator(n: u64) -> BigInt {
    (2..=n + 1)
        .filter(|&q| is_prime(q) && n.is_multiple_of(q - 1))
        .fold(BigInt::one(), |acc, q| acc * q)
}

fn shared_table() -> &'static RwLock<BernoulliTable> {
    static TABLE: OnceLock<RwLock<BernoulliTable>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(BernoulliTable::new(DEFAULT_CAP)))
}

/// Exact `B_n` from the process-wide table (default cap 2000).
pub fn bernoulli_exact(n: u64) -> Result<Rational> {
    {
        let table = shared_table().read().expect("bernoulli table poisoned");
        if let Some(b) = table.get(n) {
            return Ok(b.clone());
        }
    }
    let mut table = shared_table().write().expect("bernoulli table poisoned");
    table.extend_to(n)?;
    Ok(table.get(n).expect("extended").clone())
}

/// `B_{p-3} mod p` through `-(1/2) sum_{k=1}^{(p-1)/2} k^{-3}`, in machine
/// integers.
pub fn b_pm3_harmonic_route(p: u64) -> Result<u64> {
    check_prime(p)?;
    let p128 = p as u128;
    let mut sum = 0u128;
    for k in 1..=(p - 1) / 2 {
        let cube = (k as u128).pow(3) % p128;
        sum = (sum + mod_pow(cube, p128 - 2, p128)) % p128;
    }
    let half = p128.div_ceil(2);
    Ok(((p128 - sum) % p128 * half % p128) as u64)
}

fn mod_pow(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1u128;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p < 5 {
        return Err(Error::PrimeTooSmall(p));
    }
    Ok(())
}

/// How a `B_{p-3}` residue was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Exact table value, cross-checked against the harmonic route.
    Exact,
    /// Harmonic route only (index beyond the exact table cap).
    Harmonic,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Exact => "exact",
            Provenance::Harmonic => "harmonic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliResidue {
    pub residue: Residue,
    pub provenance: Provenance,
    /// `B_{p-3}` itself when it came from the exact table.
    pub exact: Option<Rational>,
}

/// `B_{p-3} mod p`, by both the exact table and the half-range cubic harmonic
/// sum whenever `p - 3` is within the table cap.
pub fn b_pm3_mod_p(p: u64) -> Result<BernoulliResidue> {
    check_prime(p)?;
    let modulus = PrimePowerModulus::new(p, 1)?;
    let harmonic = Residue::from_int(&BigInt::from(b_pm3_harmonic_route(p)?), &modulus);
    if p - 3 > DEFAULT_CAP {
        return Ok(BernoulliResidue { residue: harmonic, provenance: Provenance::Harmonic, exact: None });
    }
    let exact = bernoulli_exact(p - 3)?;
    let from_table = reduce_mod(&exact, &modulus)?;
    if from_table != harmonic {
        return Err(Error::InternalMismatch(format!(
            "B_{} mod {p}: table gives {}, harmonic sum gives {}",
            p - 3,
            from_table.value(),
            harmonic.value()
        )));
    }
    Ok(BernoulliResidue { residue: from_table, provenance: Provenance::Exact, exact: Some(exact) })
}
