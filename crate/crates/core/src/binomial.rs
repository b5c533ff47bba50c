//! Binomial coefficients with the combinatorial conventions the binomial sums
//! rely on: `C(top, bottom) = 0` whenever `bottom < 0`, `bottom > top >= 0`
//! or `top < 0`, and `x^0 = 1` even for `x = 0`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub fn binom(top: i64, bottom: i64) -> BigInt {
    if bottom < 0 || top < 0 || bottom > top {
        return BigInt::zero();
    }
    let k = bottom.min(top - bottom);
    let mut acc = BigInt::one();
    // the running product of i consecutive integers is divisible by i!
    for i in 1..=k {
        acc *= top - k + i;
        acc /= i;
    }
    acc
}

pub fn pow_conv(x: &BigInt, t: u32) -> BigInt {
    num_traits::pow(x.clone(), t as usize)
}

/// `C(n,k)^r C(n+k,k)^s C(2k,n)^t`.
pub fn summand(n: u64, k: u64, r: u32, s: u32, t: u32) -> BigInt {
    let (n, k) = (n as i64, k as i64);
    pow_conv(&binom(n, k), r) * pow_conv(&binom(n + k, k), s) * pow_conv(&binom(2 * k, n), t)
}

/// The full row `C(top, 0..=top)`, built by the multiplicative recurrence.
#[derive(Debug, Clone)]
pub struct BinomialRow {
    top: u64,
    values: Vec<BigInt>,
}

impl BinomialRow {
    pub fn new(top: u64) -> Self {
        let mut values = Vec::with_capacity(top as usize + 1);
        let mut cur = BigInt::one();
        values.push(cur.clone());
        for k in 0..top {
            cur = cur * (top - k) / (k + 1);
            values.push(cur.clone());
        }
        BinomialRow { top, values }
    }

    pub fn top(&self) -> u64 {
        self.top
    }

    /// `C(top, bottom)` under the zero conventions.
    pub fn get(&self, bottom: i64) -> BigInt {
        if bottom < 0 || bottom as u64 > self.top {
            BigInt::zero()
        } else {
            self.values[bottom as usize].clone()
        }
    }

    pub fn as_slice(&self) -> &[BigInt] {
        &self.values
    }
}

/// Streams `(C(n,k), C(n+k,k), C(2k,n))` for `k = 0..=n`, each step updating
/// the three factors multiplicatively instead of recomputing them.
#[derive(Debug, Clone)]
pub struct SummandFactors {
    n: u64,
    k: u64,
    choose_nk: BigInt,
    choose_npk_k: BigInt,
    choose_2k_n: BigInt,
}

impl SummandFactors {
    pub fn new(n: u64) -> Self {
        SummandFactors {
            n,
            k: 0,
            choose_nk: BigInt::one(),
            choose_npk_k: BigInt::one(),
            choose_2k_n: binom(0, n as i64),
        }
    }
}

impl Iterator for SummandFactors {
    type Item = (u64, BigInt, BigInt, BigInt);

    fn next(&mut self) -> Option<Self::Item> {
        if self.k > self.n {
            return None;
        }
        let (n, k) = (self.n, self.k);
        let item = (k, self.choose_nk.clone(), self.choose_npk_k.clone(), self.choose_2k_n.clone());
        if k < n {
            self.choose_nk = &self.choose_nk * (n - k) / (k + 1);
            self.choose_npk_k = &self.choose_npk_k * (n + k + 1) / (k + 1);
            let next_top = 2 * (k + 1);
            self.choose_2k_n = if next_top < n {
                BigInt::zero()
            } else if self.choose_2k_n.is_zero() {
                binom(next_top as i64, n as i64)
            } else {
                // C(2k+2, n) = C(2k, n) (2k+1)(2k+2) / ((2k+1-n)(2k+2-n))
                &self.choose_2k_n * (2 * k + 1) * (2 * k + 2) / ((2 * k + 1 - n) * (2 * k + 2 - n))
            };
        }
        self.k += 1;
        Some(item)
    }
}
