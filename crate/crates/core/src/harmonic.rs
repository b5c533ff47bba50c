//! Primed harmonic sums `Σ' 1/j^d` (indices prime to `p`) and the block and
//! nested block sums built from them.
//!
//! Every term has a `p`-free denominator, so all sums are accumulated by
//! termwise modular inversion in `Z/p^{e+GUARD}` and then projected to
//! `Z/p^e`. No rational accumulation happens here.

use num_bigint::BigInt;

use crate::arith::{PrimePowerModulus, Residue};
use crate::error::{Error, Result};

/// Extra `p`-adic digits carried while accumulating.
pub const GUARD: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Half {
    /// `{k/p^m} < p^m/2`
    Lower,
    /// `{k/p^m} > p^m/2`
    Upper,
}

impl Half {
    /// Whether remainder `rem` of `k` by `pm` lies in this half. The boundary
    /// `2 rem = pm` cannot occur for odd `p`.
    pub fn contains(&self, rem: u64, pm: u64) -> bool {
        match self {
            Half::Lower => 2 * rem < pm,
            Half::Upper => 2 * rem > pm,
        }
    }
}

/// Upper limit of the inner harmonic sum in a nested block sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InnerLimit {
    /// `⌊k/p^l⌋`
    KOverPl,
    /// `⌊2k/p^l⌋`
    TwoKOverPl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimedSumQuery {
    pub upper: u64,
    pub power: u32,
    pub p: u64,
    pub exponent: u32,
}

/// `Z/p^e` on machine words, for accumulation loops.
#[derive(Debug, Clone, Copy)]
pub(crate) struct WordRing {
    p: u64,
    modulus: u128,
}

impl WordRing {
    pub(crate) fn new(p: u64, e: u32) -> Result<Self> {
        let modulus = (p as u128)
            .checked_pow(e)
            .filter(|&m| m <= u64::MAX as u128)
            .ok_or_else(|| Error::InvalidParams(format!("{p}^{e} exceeds the word-size accumulator")))?;
        Ok(WordRing { p, modulus })
    }

    pub(crate) fn add(&self, a: u128, b: u128) -> u128 {
        (a + b) % self.modulus
    }

    pub(crate) fn sub(&self, a: u128, b: u128) -> u128 {
        (a + self.modulus - b % self.modulus) % self.modulus
    }

    pub(crate) fn mul(&self, a: u128, b: u128) -> u128 {
        a % self.modulus * (b % self.modulus) % self.modulus
    }

    /// Inverse of `x` with `p ∤ x`.
    pub(crate) fn inv(&self, x: u64) -> u128 {
        debug_assert!(!x.is_multiple_of(self.p));
        let (mut old_r, mut r) = ((x as u128 % self.modulus) as i128, self.modulus as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        old_s.rem_euclid(self.modulus as i128) as u128
    }

    /// `x^{-d}`.
    pub(crate) fn inv_pow(&self, x: u64, d: u32) -> u128 {
        let inv = self.inv(x);
        (0..d).fold(1u128, |acc, _| self.mul(acc, inv))
    }

    fn residue(&self, value: u128, e: u32) -> Result<Residue> {
        let modulus = PrimePowerModulus::new(self.p, e)?;
        Ok(Residue::from_int(&BigInt::from(value), &modulus))
    }
}

fn accumulator(p: u64, e: u32) -> Result<WordRing> {
    // validates p before any arithmetic happens
    PrimePowerModulus::new(p, e)?;
    WordRing::new(p, e + GUARD)
}

/// Prefix sums `H'[x] = Σ'_{j<=x} 1/j` for `x = 0..=max`.
fn primed_harmonic_prefix(ring: &WordRing, max: u64) -> Vec<u128> {
    let mut out = Vec::with_capacity(max as usize + 1);
    let mut acc = 0u128;
    out.push(acc);
    for j in 1..=max {
        if j % ring.p != 0 {
            acc = ring.add(acc, ring.inv(j));
        }
        out.push(acc);
    }
    out
}

/// `Σ'_{j=1}^{upper} 1/j^d mod p^e`.
pub fn primed_power_sum(q: &PrimedSumQuery) -> Result<Residue> {
    if q.power == 0 {
        return Err(Error::InvalidParams("power must be positive".into()));
    }
    let ring = accumulator(q.p, q.exponent)?;
    let sum = (1..=q.upper)
        .filter(|j| j % q.p != 0)
        .fold(0u128, |acc, j| ring.add(acc, ring.inv_pow(j, q.power)));
    ring.residue(sum, q.exponent)
}

/// Indices `k` with `⌊k/p^m⌋ = n`, `p ∤ k`, in the requested half.
fn block_indices(n: u64, p: u64, m: u32, half: Half) -> impl Iterator<Item = u64> {
    let pm = p.pow(m);
    (0..pm)
        .filter(move |&rem| half.contains(rem, pm))
        .map(move |rem| n * pm + rem)
        .filter(move |k| k % p != 0)
}

/// `Σ' 1/k^d` over the block `⌊k/p^m⌋ = n` restricted to one half, mod `p^e`.
pub fn block_power_sum(n: u64, p: u64, m: u32, half: Half, power: u32, e: u32) -> Result<Residue> {
    let ring = accumulator(p, e)?;
    let sum = block_indices(n, p, m, half).fold(0u128, |acc, k| ring.add(acc, ring.inv_pow(k, power)));
    ring.residue(sum, e)
}

/// `Σ' 1/k^2` over one half of the block `⌊k/p^m⌋ = n`, mod `p^{m+1}`.
pub fn block_inverse_square_sum(n: u64, p: u64, m: u32, half: Half) -> Result<Residue> {
    if m == 0 {
        return Err(Error::InvalidParams("block sums need m >= 1".into()));
    }
    block_power_sum(n, p, m, half, 2, m + 1)
}

/// `Σ' (1/k^2) Σ'_{j <= L(k)} 1/j` over one half of `⌊k/p^{l+1}⌋ = n`, with
/// `L(k)` either `⌊k/p^l⌋` or `⌊2k/p^l⌋`; mod `p^{l+1}`.
pub fn nested_block_sum(n: u64, p: u64, l: u32, inner: InnerLimit, half: Half) -> Result<Residue> {
    nested_block_sum_mod(n, p, l, inner, half, l + 1)
}

/// [`nested_block_sum`] reduced mod `p^e` instead of `p^{l+1}`.
pub fn nested_block_sum_mod(n: u64, p: u64, l: u32, inner: InnerLimit, half: Half, e: u32) -> Result<Residue> {
    let ring = accumulator(p, e)?;
    let pl = p.pow(l);
    let top = (n + 1) * p.pow(l + 1);
    let prefix = primed_harmonic_prefix(&ring, 2 * top / pl);
    let sum = block_indices(n, p, l + 1, half).fold(0u128, |acc, k| {
        let limit = match inner {
            InnerLimit::KOverPl => k / pl,
            InnerLimit::TwoKOverPl => 2 * k / pl,
        };
        ring.add(acc, ring.mul(ring.inv_pow(k, 2), prefix[limit as usize]))
    });
    ring.residue(sum, e)
}

/// `Σ'_{k=1}^{(p^m-1)/2} 1/k^d mod p^e`.
pub fn half_range_power_sum(p: u64, m: u32, power: u32, e: u32) -> Result<Residue> {
    if m == 0 {
        return Err(Error::InvalidParams("half-range sums need m >= 1".into()));
    }
    primed_power_sum(&PrimedSumQuery { upper: (p.pow(m) - 1) / 2, power, p, exponent: e })
}

/// `Σ'_{k=1}^{(p^m-1)/2} (-1)^k / k^3 mod p`.
pub fn alternating_cubic_sum(p: u64, m: u32) -> Result<Residue> {
    alternating_cubic_sum_mod(p, m, 1)
}

/// [`alternating_cubic_sum`] reduced mod `p^e`.
pub fn alternating_cubic_sum_mod(p: u64, m: u32, e: u32) -> Result<Residue> {
    if m == 0 {
        return Err(Error::InvalidParams("alternating sums need m >= 1".into()));
    }
    let ring = accumulator(p, e)?;
    let sum = (1..=(p.pow(m) - 1) / 2).filter(|k| k % p != 0).fold(0u128, |acc, k| {
        let term = ring.inv_pow(k, 3);
        if k % 2 == 0 {
            ring.add(acc, term)
        } else {
            ring.sub(acc, term)
        }
    });
    ring.residue(sum, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, reduce_mod, Rational};
    use crate::bernoulli::bernoulli_exact;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn md(p: u64, e: u32) -> PrimePowerModulus {
        PrimePowerModulus::new(p, e).unwrap()
    }

    /// Rational oracle: exact `Σ' 1/k^d` over an explicit index set.
    fn exact_sum(indices: impl Iterator<Item = u64>, p: u64, d: u32) -> Rational {
        indices
            .filter(|k| k % p != 0)
            .fold(Rational::zero(), |acc, k| acc + rat(1, (k as i64).pow(d)))
    }

    fn b_pm3(p: u64) -> Rational {
        bernoulli_exact(p - 3).unwrap()
    }

    #[test]
    fn full_range_reciprocals_vanish_mod_p() {
        for p in [5u64, 7, 11, 13, 101] {
            for d in 1..=3 {
                let r = primed_power_sum(&PrimedSumQuery { upper: p - 1, power: d, p, exponent: 1 }).unwrap();
                assert!(r.is_zero(), "p={p} d={d}");
            }
        }
    }

    #[test]
    fn primed_sum_examples() {
        let r = primed_power_sum(&PrimedSumQuery { upper: 2, power: 2, p: 5, exponent: 2 }).unwrap();
        assert_eq!(r, reduce_mod(&rat(5, 4), &md(5, 2)).unwrap());
        // Σ'_{k<p^m} 1/k^2 ≡ (2/3) p^m B_{p-3} mod p^{m+1}, at m = 1 and m = 2
        let m1 = primed_power_sum(&PrimedSumQuery { upper: 4, power: 2, p: 5, exponent: 2 }).unwrap();
        assert_eq!(m1, reduce_mod(&(rat(2, 3) * rat(5, 1) * b_pm3(5)), &md(5, 2)).unwrap());
        let m2 = primed_power_sum(&PrimedSumQuery { upper: 24, power: 2, p: 5, exponent: 3 }).unwrap();
        assert_eq!(m2, reduce_mod(&(rat(2, 3) * rat(25, 1) * b_pm3(5)), &md(5, 3)).unwrap());
        assert!(primed_power_sum(&PrimedSumQuery { upper: 4, power: 0, p: 5, exponent: 1 }).is_err());
    }

    #[test]
    fn modular_route_matches_rational_oracle() {
        for (p, upper, d, e) in [(5u64, 40u64, 1u32, 3u32), (7, 60, 2, 2), (11, 30, 3, 4), (13, 200, 2, 3)] {
            let modular = primed_power_sum(&PrimedSumQuery { upper, power: d, p, exponent: e }).unwrap();
            let exact = exact_sum(1..=upper, p, d);
            assert_eq!(modular, reduce_mod(&exact, &md(p, e)).unwrap(), "p={p} upper={upper}");
        }
    }

    #[test]
    fn block_examples() {
        let lower = block_inverse_square_sum(0, 5, 1, Half::Lower).unwrap();
        assert_eq!(lower, reduce_mod(&rat(5, 4), &md(5, 2)).unwrap());
        let rhs = rat(7, 3) * rat(5, 1) * b_pm3(5);
        assert_eq!(rhs, rat(35, 18));
        assert_eq!(lower, reduce_mod(&rhs, &md(5, 2)).unwrap());
        let upper = block_inverse_square_sum(0, 5, 1, Half::Upper).unwrap();
        assert_eq!(upper, reduce_mod(&(rat(1, 9) + rat(1, 16)), &md(5, 2)).unwrap());
        assert!(block_inverse_square_sum(0, 5, 0, Half::Lower).is_err());
    }

    #[test]
    fn block_halves_partition_the_primed_range() {
        for (p, m) in [(5u64, 1u32), (7, 2), (11, 1)] {
            let pm = p.pow(m);
            let blocks = 3u64;
            let md3 = md(p, m + 1);
            let mut total = Residue::zero(&md3);
            for n in 0..blocks {
                for half in [Half::Lower, Half::Upper] {
                    total = total.try_add(&block_inverse_square_sum(n, p, m, half).unwrap()).unwrap();
                }
            }
            let whole = primed_power_sum(&PrimedSumQuery { upper: blocks * pm - 1, power: 2, p, exponent: m + 1 });
            assert_eq!(total, whole.unwrap());
        }
    }

    #[test]
    fn nested_examples() {
        // k in {1, 2}: 1/1 * H'(1) + 1/4 * H'(2) = 1 + 3/8
        let low = nested_block_sum(0, 5, 0, InnerLimit::KOverPl, Half::Lower).unwrap();
        assert_eq!(low, reduce_mod(&rat(11, 8), &md(5, 1)).unwrap());
        assert_eq!(low, reduce_mod(&(rat(1, 3) * b_pm3(5)), &md(5, 1)).unwrap());

        // 21-term block k in 25..=48, p ∤ k, against an exact rational oracle
        let up = nested_block_sum(0, 7, 1, InnerLimit::TwoKOverPl, Half::Upper).unwrap();
        let oracle = (25..49u64)
            .filter(|k| k % 7 != 0)
            .fold(Rational::zero(), |acc, k| {
                let inner = exact_sum(1..=(2 * k / 7), 7, 1);
                acc + rat(1, (k * k) as i64) * inner
            });
        assert_eq!(up, reduce_mod(&oracle, &md(7, 2)).unwrap());
        assert_eq!(up, reduce_mod(&(rat(4, 3) * rat(7, 1) * b_pm3(7)), &md(7, 2)).unwrap());
    }

    #[test]
    fn alternating_examples() {
        let five = alternating_cubic_sum(5, 1).unwrap();
        // -1 + 1/8 = -7/8 ≡ 1 (mod 5), and -B_2/4 = -1/24 ≡ 1 as well
        assert_eq!(five, reduce_mod(&rat(-7, 8), &md(5, 1)).unwrap());
        assert_eq!(five.value(), &BigInt::from(1));
        assert_eq!(five, reduce_mod(&(rat(-1, 4) * b_pm3(5)), &md(5, 1)).unwrap());
        let seven = alternating_cubic_sum(7, 1).unwrap();
        let oracle = rat(-1, 1) + rat(1, 8) - rat(1, 27);
        assert_eq!(seven, reduce_mod(&oracle, &md(7, 1)).unwrap());
        assert_eq!(alternating_cubic_sum(5, 2).unwrap(), five);
    }

    #[test]
    fn half_range_identities() {
        for p in [5u64, 7, 11, 13] {
            let b = b_pm3(p);
            for m in [1u32, 2] {
                let pm = rat(p.pow(m) as i64, 1);
                let sq = half_range_power_sum(p, m, 2, m + 1).unwrap();
                assert_eq!(sq, reduce_mod(&(rat(7, 3) * &pm * &b), &md(p, m + 1)).unwrap());
                let cube = half_range_power_sum(p, m, 3, 1).unwrap();
                assert_eq!(cube, reduce_mod(&(rat(-2, 1) * &b), &md(p, 1)).unwrap());
            }
        }
    }

    #[test]
    fn per_block_cubic_sums() {
        for p in [5u64, 7, 11, 13] {
            let b = b_pm3(p);
            for n in 0..4 {
                let lower = block_power_sum(n, p, 1, Half::Lower, 3, 1).unwrap();
                let upper = block_power_sum(n, p, 1, Half::Upper, 3, 1).unwrap();
                assert_eq!(lower, reduce_mod(&(rat(-2, 1) * &b), &md(p, 1)).unwrap());
                assert_eq!(upper, reduce_mod(&(rat(2, 1) * &b), &md(p, 1)).unwrap());
            }
        }
    }

    #[test]
    fn word_ring_rejects_oversized_moduli() {
        assert!(WordRing::new(13, 17).is_ok());
        assert!(WordRing::new(13, 18).is_err());
    }

    proptest! {
        #[test]
        fn primed_sums_depend_on_upper_mod_p(a in 0u64..1000, b in 0u64..1000, d in 1u32..=3, p in prop::sample::select(vec![5u64, 7, 11, 13])) {
            let b = b - b % p + a % p;
            let sa = primed_power_sum(&PrimedSumQuery { upper: a, power: d, p, exponent: 1 }).unwrap();
            let sb = primed_power_sum(&PrimedSumQuery { upper: b, power: d, p, exponent: 1 }).unwrap();
            prop_assert_eq!(sa, sb);
        }
    }
}
