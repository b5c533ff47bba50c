//! The order-3 Gauss congruence for `A_n^(r,s,t)` and its refinement modulo
//! `p^{3m+1}` by the correction term `p^{3m} B_{p-3} 𝒜_n^(r,s,t)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{big_pow, exact_div_pow, ord_p, ord_p_int, rat, rat_int, reduce_mod, PrimePowerModulus, Rational};
use crate::arith::{Residue, Valuation};
use crate::bernoulli::{b_pm3_mod_p, BernoulliResidue};
use crate::binomial::{binom, pow_conv};
use crate::error::{Error, Result};
use crate::sequences::oss_term_at;

/// `𝒜_n^(r,s,t)`, by the branch for `r = 2`, `r = 3` or `r >= 4`.
pub fn correction_term(n: u64, r: u32, s: u32, t: u32) -> Result<Rational> {
    if r < 2 {
        return Err(Error::InvalidParams(format!("correction term needs r >= 2, got r = {r}")));
    }
    let ni = n as i64;
    let (ri, si, ti) = (r as i64, s as i64, t as i64);
    let weight = |k: i64, top_shift: i64| {
        pow_conv(&binom(ni, k), r) * pow_conv(&binom(ni + k, k), s) * pow_conv(&binom(2 * k + top_shift, ni), t)
    };

    let mut leading = BigInt::zero();
    for k in 0..=ni {
        let linear = ni * k * (si * ni + si * k + ri * ni - ri * k + 4 * ti * k - 2 * ti * ni);
        leading += weight(k, 0) * linear;
    }
    let leading = rat_int(leading) * rat(-1, 3);

    match r {
        2 => {
            let mut second = BigInt::zero();
            let mut third = BigInt::zero();
            for k in 0..ni {
                let sq = (ni - k) * (ni - k);
                second += weight(k, 0) * sq * (9 * ni * ti - 3 * ni * si + 24 * k - 18 * ni + 14);
                third += weight(k, 1) * sq * (9 * ni * si + 15 * ni * ti - 24 * k + 6 * ni - 10);
            }
            Ok(leading + rat_int(second) * rat(1, 6) + rat_int(third) * rat(1, 6))
        }
        3 => {
            let mut tail = BigInt::zero();
            for k in 0..ni {
                let cube = (ni - k).pow(3);
                let base = pow_conv(&binom(ni, k), 3) * pow_conv(&binom(ni + k, k), s);
                let pair = pow_conv(&binom(2 * k, ni), t) + pow_conv(&binom(2 * k + 1, ni), t);
                tail += base * pair * cube;
            }
            Ok(leading + rat_int(tail) * rat(1, 4))
        }
        _ => Ok(leading),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Gauss3,
    Theorem1,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Gauss3 => "gauss3",
            Mode::Theorem1 => "theorem1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CongruenceTask {
    pub p: u64,
    pub n: u64,
    pub m: u32,
    pub r: u32,
    pub s: u32,
    pub t: u32,
    pub mode: Mode,
}

impl CongruenceTask {
    pub fn validate(&self) -> Result<()> {
        PrimePowerModulus::new(self.p, 1)?;
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidParams(format!("need n, m >= 1, got n = {}, m = {}", self.n, self.m)));
        }
        if self.r < 2 {
            return Err(Error::InvalidParams(format!("need r >= 2, got r = {}", self.r)));
        }
        Ok(())
    }

    /// `(n p^m, n p^{m-1})`, or `None` on overflow.
    pub fn indices(&self) -> Option<(u64, u64)> {
        let lower = self.p.checked_pow(self.m - 1)?.checked_mul(self.n)?;
        Some((lower.checked_mul(self.p)?, lower))
    }

    pub fn run(&self, cap: u64) -> Result<CongruenceReport> {
        match self.mode {
            Mode::Gauss3 => verify_gauss3(self, cap),
            Mode::Theorem1 => verify_theorem1(self, cap),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceReport {
    pub task: CongruenceTask,
    /// `A_{np^m}` and `A_{np^{m-1}}`.
    pub lhs_terms: (BigInt, BigInt),
    /// `𝒜_n`, present in theorem mode.
    pub correction: Option<Rational>,
    pub bernoulli: BernoulliResidue,
    pub required_exponent: i64,
    pub achieved_exponent: Valuation,
    pub pass: bool,
}

fn term_pair(task: &CongruenceTask, cap: u64) -> Result<(BigInt, BigInt)> {
    task.validate()?;
    let (upper, lower) = task.indices().ok_or(Error::CapExceeded { requested: u64::MAX, cap })?;
    if upper > cap {
        return Err(Error::CapExceeded { requested: upper, cap });
    }
    let CongruenceTask { r, s, t, .. } = *task;
    Ok((oss_term_at(r, s, t, upper, cap)?, oss_term_at(r, s, t, lower, cap)?))
}

/// `A_{np^m} ≡ A_{np^{m-1}} (mod p^{3m})`, reporting `ord_p` of the difference.
pub fn verify_gauss3(task: &CongruenceTask, cap: u64) -> Result<CongruenceReport> {
    let task = CongruenceTask { mode: Mode::Gauss3, ..*task };
    let (upper, lower) = term_pair(&task, cap)?;
    let achieved = ord_p_int(&(&upper - &lower), task.p);
    let required = 3 * task.m as i64;
    Ok(CongruenceReport {
        task,
        bernoulli: b_pm3_mod_p(task.p)?,
        lhs_terms: (upper, lower),
        correction: None,
        required_exponent: required,
        achieved_exponent: achieved,
        pass: achieved.at_least(required),
    })
}

/// `A_{np^m} ≡ A_{np^{m-1}} + p^{3m} B_{p-3} 𝒜_n (mod p^{3m+1})`.
pub fn verify_theorem1(task: &CongruenceTask, cap: u64) -> Result<CongruenceReport> {
    let correction = correction_term(task.n, task.r, task.s, task.t)?;
    theorem1_with_correction(task, cap, correction)
}

/// The refined congruence with an arbitrary stand-in for `𝒜_n`.
pub fn theorem1_with_correction(task: &CongruenceTask, cap: u64, correction: Rational) -> Result<CongruenceReport> {
    let task = CongruenceTask { mode: Mode::Theorem1, ..*task };
    let (upper, lower) = term_pair(&task, cap)?;
    let bernoulli = b_pm3_mod_p(task.p)?;
    let required = 3 * task.m as i64 + 1;
    let achieved = residual_valuation(&(&upper - &lower), &task, &bernoulli, &correction)?;
    Ok(CongruenceReport {
        task,
        lhs_terms: (upper, lower),
        correction: Some(correction),
        bernoulli,
        required_exponent: required,
        achieved_exponent: achieved,
        pass: achieved.at_least(required),
    })
}

/// `ord_p(diff - p^{3m} B 𝒜)`: exact when `B_{p-3}` is known exactly,
/// otherwise read modulo `p^{3m+1}` and capped there.
fn residual_valuation(diff: &BigInt, task: &CongruenceTask, bernoulli: &BernoulliResidue, correction: &Rational) -> Result<Valuation> {
    let scale = big_pow(task.p, 3 * task.m);
    if let Some(b) = &bernoulli.exact {
        return Ok(ord_p(&(rat_int(diff.clone()) - rat_int(scale) * b * correction), task.p));
    }
    let top = 3 * task.m + 1;
    let work = PrimePowerModulus::new(task.p, top)?;
    let b = Residue::from_int(bernoulli.residue.value(), &work);
    let shifted = Residue::from_int(&scale, &work).try_mul(&reduce_mod(correction, &work)?)?.try_mul(&b)?;
    let residual = Residue::from_int(diff, &work).try_sub(&shifted)?;
    Ok(Valuation::Finite(if residual.is_zero() { top as i64 } else { residual.valuation_capped() as i64 }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsistencyStatus {
    Agree,
    /// The extracted residue differs from `𝒜_n mod p`.
    Disagree { extracted: BigInt, expected: BigInt },
    /// `p^{3m}` does not divide the difference, so nothing can be extracted.
    GaussFailure { valuation: Valuation },
    /// `B_{p-3} ≡ 0 (mod p)`.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyEntry {
    pub p: u64,
    pub m: u32,
    pub status: ConsistencyStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub n: u64,
    pub rst: (u32, u32, u32),
    pub correction: Rational,
    pub entries: Vec<ConsistencyEntry>,
}

impl ConsistencyReport {
    pub fn consistent(&self) -> bool {
        self.entries.iter().all(|e| matches!(e.status, ConsistencyStatus::Agree | ConsistencyStatus::Skipped))
    }
}

/// Reads `𝒜_n mod p` off `(A_{np^m} - A_{np^{m-1}}) / p^{3m}` for every
/// `(p, m)` and compares it with the single rational `𝒜_n`.
pub fn consistency_sweep(n: u64, r: u32, s: u32, t: u32, primes: &[u64], ms: &[u32], cap: u64) -> Result<ConsistencyReport> {
    let correction = correction_term(n, r, s, t)?;
    let mut entries = Vec::new();
    for &p in primes {
        let bernoulli = b_pm3_mod_p(p)?;
        let modulus = PrimePowerModulus::new(p, 1)?;
        let expected = reduce_mod(&correction, &modulus)?;
        for &m in ms {
            if m == 0 {
                return Err(Error::InvalidParams("need m >= 1".into()));
            }
            let status = if bernoulli.residue.is_zero() {
                ConsistencyStatus::Skipped
            } else {
                let lower = n * p.pow(m - 1);
                let upper = lower * p;
                if upper > cap {
                    return Err(Error::CapExceeded { requested: upper, cap });
                }
                let diff = oss_term_at(r, s, t, upper, cap)? - oss_term_at(r, s, t, lower, cap)?;
                match exact_div_pow(&diff, p, 3 * m) {
                    None => ConsistencyStatus::GaussFailure { valuation: ord_p_int(&diff, p) },
                    Some(q) => {
                        let extracted = Residue::from_int(&q, &modulus).try_mul(&bernoulli.residue.inverse()?)?;
                        if extracted == expected {
                            ConsistencyStatus::Agree
                        } else {
                            ConsistencyStatus::Disagree {
                                extracted: extracted.value().clone(),
                                expected: expected.value().clone(),
                            }
                        }
                    }
                }
            };
            entries.push(ConsistencyEntry { p, m, status });
        }
    }
    Ok(ConsistencyReport { n, rst: (r, s, t), correction, entries })
}

pub const DEFAULT_PRIMES: [u64; 4] = [5, 7, 11, 13];
pub const DEFAULT_NS: [u64; 2] = [1, 2];
pub const DEFAULT_MS: [u32; 2] = [1, 2];
/// The six special-case rows, then one extra row per correction branch.
pub const DEFAULT_RST: [(u32, u32, u32); 9] =
    [(2, 0, 0), (2, 1, 0), (2, 2, 0), (3, 0, 0), (2, 0, 2), (4, 0, 0), (2, 2, 1), (3, 1, 1), (5, 0, 0)];

/// Tasks for every `(rst, n, p, m)` of the default grid, in that nesting order.
pub fn default_tasks(mode: Mode) -> Vec<CongruenceTask> {
    grid_tasks(&DEFAULT_PRIMES, &DEFAULT_NS, &DEFAULT_MS, &DEFAULT_RST, mode)
}

pub fn grid_tasks(primes: &[u64], ns: &[u64], ms: &[u32], rsts: &[(u32, u32, u32)], mode: Mode) -> Vec<CongruenceTask> {
    let mut tasks = Vec::new();
    for &(r, s, t) in rsts {
        for &n in ns {
            for &p in primes {
                for &m in ms {
                    tasks.push(CongruenceTask { p, n, m, r, s, t, mode });
                }
            }
        }
    }
    tasks
}

/// `(n, r, s, t, 𝒜_n)`.
pub type DenominatorException = (u64, u32, u32, u32, Rational);

/// `(n, r, s, t)` with `n <= max_n`, `2 <= r <= max_r`, `s, t <= max_st`
/// whose `𝒜_n` denominator does not divide 12.
pub fn denominator_exceptions(max_n: u64, max_r: u32, max_st: u32) -> Result<Vec<DenominatorException>> {
    let twelve = BigInt::from(12);
    let mut out = Vec::new();
    for n in 0..=max_n {
        for r in 2..=max_r {
            for s in 0..=max_st {
                for t in 0..=max_st {
                    let a = correction_term(n, r, s, t)?;
                    if !(&twelve % a.denom()).is_zero() {
                        out.push((n, r, s, t, a));
                    }
                }
            }
        }
    }
    Ok(out)
}

impl CongruenceReport {
    /// `A_{np^m} - A_{np^{m-1}}`.
    pub fn difference(&self) -> BigInt {
        &self.lhs_terms.0 - &self.lhs_terms.1
    }

    /// `p^{3m}` as the congruence sees it.
    pub fn gauss_modulus(&self) -> BigInt {
        big_pow(self.task.p, 3 * self.task.m)
    }
}
