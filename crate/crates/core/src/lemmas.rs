//! Verifiers for the auxiliary congruences: Granville's ratio, the binomial
//! shift, the block/half-range harmonic sums and the alternating cubic sum.
//!
//! Left-hand sides come from exact binomials or from [`crate::harmonic`];
//! right-hand sides come from [`crate::bernoulli`]. The two never share a
//! code path. Reports carry the achieved `p`-adic agreement next to the
//! required one.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{
    big_pow, format_rational, ord_p, ord_p_int, rat, rat_int, reduce_mod, PrimePowerModulus, Rational, Residue,
    Valuation,
};
use crate::bernoulli::{b_pm3_mod_p, bernoulli_exact, Provenance, DEFAULT_CAP};
use crate::binomial::{binom, pow_conv};
use crate::error::{Error, Result};
use crate::harmonic::{
    alternating_cubic_sum_mod, block_power_sum, half_range_power_sum, nested_block_sum_mod, primed_power_sum, Half,
    InnerLimit, PrimedSumQuery, GUARD,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LemmaId {
    GranvilleB1,
    ShiftB2,
    BlockB7,
    BlockB8,
    FullB9,
    HalfCubicB12,
    HalfSquareB13,
    NestedB14,
    NestedB15,
    NestedB16,
    NestedB17,
    AltB23,
}

impl LemmaId {
    pub const ALL: [LemmaId; 12] = [
        LemmaId::GranvilleB1,
        LemmaId::ShiftB2,
        LemmaId::BlockB7,
        LemmaId::BlockB8,
        LemmaId::FullB9,
        LemmaId::HalfCubicB12,
        LemmaId::HalfSquareB13,
        LemmaId::NestedB14,
        LemmaId::NestedB15,
        LemmaId::NestedB16,
        LemmaId::NestedB17,
        LemmaId::AltB23,
    ];

    pub fn short(&self) -> &'static str {
        match self {
            LemmaId::GranvilleB1 => "b1",
            LemmaId::ShiftB2 => "b2",
            LemmaId::BlockB7 => "b7",
            LemmaId::BlockB8 => "b8",
            LemmaId::FullB9 => "b9",
            LemmaId::HalfCubicB12 => "b12",
            LemmaId::HalfSquareB13 => "b13",
            LemmaId::NestedB14 => "b14",
            LemmaId::NestedB15 => "b15",
            LemmaId::NestedB16 => "b16",
            LemmaId::NestedB17 => "b17",
            LemmaId::AltB23 => "b23",
        }
    }

    /// Whether this lemma is one of the harmonic block identities with a
    /// `coefficient · p^j · B_{p-3}` right-hand side.
    pub fn is_block(&self) -> bool {
        !matches!(self, LemmaId::GranvilleB1 | LemmaId::ShiftB2)
    }

    /// Rational coefficient `c` of the right-hand side `c p^j B_{p-3}` for
    /// block lemmas.
    pub fn coefficient(&self, n: u64) -> Option<Rational> {
        let n = n as i64;
        Some(match self {
            LemmaId::BlockB7 => rat(12 * n + 7, 3),
            LemmaId::BlockB8 => rat(-(12 * n + 5), 3),
            LemmaId::FullB9 => rat(2, 3),
            LemmaId::HalfCubicB12 => rat(-2, 1),
            LemmaId::HalfSquareB13 => rat(7, 3),
            LemmaId::NestedB14 | LemmaId::NestedB15 => rat(1, 3),
            LemmaId::NestedB16 | LemmaId::NestedB17 => rat(4, 3),
            LemmaId::AltB23 => rat(-1, 4),
            LemmaId::GranvilleB1 | LemmaId::ShiftB2 => return None,
        })
    }

    /// The `p`-power index `j` on the right-hand side and the modulus
    /// exponent, given the lemma's `m` (or `l`).
    fn shape(&self, index: u32) -> (u32, u32) {
        match self {
            LemmaId::BlockB7 | LemmaId::BlockB8 | LemmaId::FullB9 | LemmaId::HalfSquareB13 => (index, index + 1),
            LemmaId::NestedB14 | LemmaId::NestedB15 | LemmaId::NestedB16 | LemmaId::NestedB17 => {
                (index, index + 1)
            }
            LemmaId::HalfCubicB12 | LemmaId::AltB23 => (0, 1),
            LemmaId::GranvilleB1 | LemmaId::ShiftB2 => unreachable!("not a block lemma"),
        }
    }

    /// Whether the lemma's index is `l >= 0` (nested sums) rather than
    /// `m >= 1`.
    pub fn index_may_be_zero(&self) -> bool {
        matches!(self, LemmaId::NestedB14 | LemmaId::NestedB15 | LemmaId::NestedB16 | LemmaId::NestedB17)
    }

    /// Whether the block index `n` enters the statement.
    pub fn uses_block_index(&self) -> bool {
        matches!(
            self,
            LemmaId::BlockB7
                | LemmaId::BlockB8
                | LemmaId::NestedB14
                | LemmaId::NestedB15
                | LemmaId::NestedB16
                | LemmaId::NestedB17
        )
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .into_iter()
            .find(|id| id.short().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown lemma `{s}`")))
    }
}

/// The two sides of a checked congruence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sides {
    Rationals { lhs: Rational, rhs: Rational },
    Residues { lhs: Residue, rhs: Residue },
}

impl Sides {
    pub fn lhs_string(&self) -> String {
        match self {
            Sides::Rationals { lhs, .. } => format_rational(lhs),
            Sides::Residues { lhs, .. } => lhs.value().to_string(),
        }
    }

    pub fn rhs_string(&self) -> String {
        match self {
            Sides::Rationals { rhs, .. } => format_rational(rhs),
            Sides::Residues { rhs, .. } => rhs.value().to_string(),
        }
    }

    /// Modulus the residues live in, if any.
    pub fn working_modulus(&self) -> Option<&PrimePowerModulus> {
        match self {
            Sides::Rationals { .. } => None,
            Sides::Residues { lhs, .. } => Some(lhs.modulus()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub params: Vec<(&'static str, i64)>,
    pub sides: Sides,
    pub required_exponent: i64,
    /// `ord_p(lhs - rhs)`; for residue sides, capped at the working
    /// exponent.
    pub achieved_exponent: Valuation,
    pub provenance: Provenance,
    pub pass: bool,
}

impl LemmaReport {
    fn new(
        lemma: LemmaId,
        params: Vec<(&'static str, i64)>,
        sides: Sides,
        required_exponent: i64,
        achieved_exponent: Valuation,
        provenance: Provenance,
    ) -> Self {
        LemmaReport {
            lemma,
            params,
            sides,
            required_exponent,
            achieved_exponent,
            provenance,
            pass: achieved_exponent.at_least(required_exponent),
        }
    }

    pub fn param(&self, name: &str) -> Option<i64> {
        self.params.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }
}

fn check_prime(p: u64) -> Result<()> {
    PrimePowerModulus::new(p, 1).map(|_| ())
}

fn exact_b_pm3(p: u64) -> Result<Rational> {
    if p - 3 > DEFAULT_CAP {
        return Err(Error::CapExceeded { requested: p - 3, cap: DEFAULT_CAP });
    }
    bernoulli_exact(p - 3)
}

/// `C(np, kp)/C(n, k) ≡ 1 - nk(n-k) p^3 B_{p-3}/3 (mod p^{ord_p(nk(n-k)) + 4})`.
pub fn verify_granville(n: u64, k: u64, p: u64) -> Result<LemmaReport> {
    granville_with_coefficient(n, k, p, &rat(1, 3))
}

/// Granville's ratio with `1/3` replaced by `coefficient`.
pub fn granville_with_coefficient(n: u64, k: u64, p: u64, coefficient: &Rational) -> Result<LemmaReport> {
    check_prime(p)?;
    if k == 0 || k >= n {
        return Err(Error::DegenerateArgs(format!("need 1 <= k < n, got n = {n}, k = {k}")));
    }
    let (ni, ki, pi) = (n as i64, k as i64, p as i64);
    let lhs = Rational::new(binom(ni * pi, ki * pi), binom(ni, ki));
    let weight = BigInt::from(ni * ki * (ni - ki));
    let b = exact_b_pm3(p)?;
    let rhs = Rational::one() - rat_int(&weight * big_pow(p, 3)) * coefficient * &b;
    let required = ord_p_int(&weight, p).finite().expect("nonzero weight") + 4;
    let achieved = ord_p(&(&lhs - &rhs), p);
    Ok(LemmaReport::new(
        LemmaId::GranvilleB1,
        vec![("n", ni), ("k", ki), ("p", pi)],
        Sides::Rationals { lhs, rhs },
        required,
        achieved,
        Provenance::Exact,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShiftArgs {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub n: u64,
    pub m: u32,
    pub p: u64,
    pub r: u32,
    pub s: u32,
    pub t: u32,
}

/// Both sides of the binomial shift congruence modulo `p^{m+1}`: the left
/// from exact binomials at `np^m`, the right from floor-reduced binomials at
/// `np^{m-1}` times `1 - rnp^m H'(a) + snp^m H'(b) + tnp^m H'(c)`.
pub fn verify_binom_shift(args: &ShiftArgs) -> Result<LemmaReport> {
    binom_shift_with_weights(args, [-(args.r as i64), args.s as i64, args.t as i64])
}

/// The binomial shift congruence with the harmonic weights `(-r, s, t)`
/// replaced by `weights`.
pub fn binom_shift_with_weights(args: &ShiftArgs, weights: [i64; 3]) -> Result<LemmaReport> {
    let ShiftArgs { a, b, c, n, m, p, r, s, t } = *args;
    check_prime(p)?;
    if n == 0 || m == 0 {
        return Err(Error::InvalidParams("binomial shift needs n, m >= 1".into()));
    }
    let required = m + 1;
    let work = PrimePowerModulus::new(p, required + GUARD)?;
    let npm = (n * p.pow(m)) as i64;
    let npm1 = (n * p.pow(m - 1)) as i64;
    let (a, b, c) = (a as i64, b as i64, c as i64);
    let pi = p as i64;

    let lhs_int = pow_conv(&binom(npm - 1, a), r) * pow_conv(&binom(npm + b, b), s) * pow_conv(&binom(c, npm), t);
    let lhs = Residue::from_int(&lhs_int, &work);

    let sign = if (r as i64 * (a + a / pi)) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    let reduced = sign
        * pow_conv(&binom(npm1 - 1, a / pi), r)
        * pow_conv(&binom(npm1 + b / pi, b / pi), s)
        * pow_conv(&binom(c / pi, npm1), t);
    let h = |upper: i64| {
        primed_power_sum(&PrimedSumQuery { upper: upper as u64, power: 1, p, exponent: work.exponent() })
    };
    let scale = Residue::from_int(&BigInt::from(npm), &work);
    let coeff = |x: i64| Residue::from_int(&BigInt::from(x), &work);
    let [wa, wb, wc] = weights;
    let correction = Residue::one(&work)
        .try_add(&coeff(wa).try_mul(&scale)?.try_mul(&h(a)?)?)?
        .try_add(&coeff(wb).try_mul(&scale)?.try_mul(&h(b)?)?)?
        .try_add(&coeff(wc).try_mul(&scale)?.try_mul(&h(c)?)?)?;
    let rhs = Residue::from_int(&reduced, &work).try_mul(&correction)?;

    let achieved = Valuation::Finite(lhs.agreement(&rhs)? as i64);
    Ok(LemmaReport::new(
        LemmaId::ShiftB2,
        vec![
            ("a", a),
            ("b", b),
            ("c", c),
            ("n", n as i64),
            ("m", m as i64),
            ("p", pi),
            ("r", r as i64),
            ("s", s as i64),
            ("t", t as i64),
        ],
        Sides::Residues { lhs, rhs },
        required as i64,
        achieved,
        Provenance::Exact,
    ))
}

/// Verifies one harmonic block identity. `index` is `m` for b7–b13 and b23,
/// `l` for b14–b17; `n` is the block index (ignored where the statement has
/// none).
pub fn verify_block_lemma(which: LemmaId, p: u64, index: u32, n: u64) -> Result<LemmaReport> {
    let coefficient = which
        .coefficient(n)
        .ok_or_else(|| Error::InvalidParams(format!("{which} is not a block lemma")))?;
    block_lemma_with_coefficient(which, p, index, n, &coefficient)
}

/// [`verify_block_lemma`] with the right-hand coefficient replaced.
pub fn block_lemma_with_coefficient(
    which: LemmaId,
    p: u64,
    index: u32,
    n: u64,
    coefficient: &Rational,
) -> Result<LemmaReport> {
    if !which.is_block() {
        return Err(Error::InvalidParams(format!("{which} is not a block lemma")));
    }
    check_prime(p)?;
    if index == 0 && !which.index_may_be_zero() {
        return Err(Error::InvalidParams(format!("{which} needs m >= 1")));
    }
    let (rhs_power, required) = which.shape(index);

    // exact B_{p-3} buys GUARD extra digits of diagnostic resolution
    let (bernoulli, work_e, provenance) = if p - 3 <= DEFAULT_CAP {
        (exact_b_pm3(p)?, required + GUARD, Provenance::Exact)
    } else {
        let r = b_pm3_mod_p(p)?;
        (rat_int(r.residue.value().clone()), required, r.provenance)
    };

    let lhs = match which {
        LemmaId::BlockB7 => block_power_sum(n, p, index, Half::Lower, 2, work_e)?,
        LemmaId::BlockB8 => block_power_sum(n, p, index, Half::Upper, 2, work_e)?,
        LemmaId::FullB9 => primed_power_sum(&PrimedSumQuery {
            upper: p.pow(index) - 1,
            power: 2,
            p,
            exponent: work_e,
        })?,
        LemmaId::HalfCubicB12 => half_range_power_sum(p, index, 3, work_e)?,
        LemmaId::HalfSquareB13 => half_range_power_sum(p, index, 2, work_e)?,
        LemmaId::NestedB14 => nested_block_sum_mod(n, p, index, InnerLimit::KOverPl, Half::Lower, work_e)?,
        LemmaId::NestedB15 => nested_block_sum_mod(n, p, index, InnerLimit::KOverPl, Half::Upper, work_e)?,
        LemmaId::NestedB16 => nested_block_sum_mod(n, p, index, InnerLimit::TwoKOverPl, Half::Lower, work_e)?,
        LemmaId::NestedB17 => nested_block_sum_mod(n, p, index, InnerLimit::TwoKOverPl, Half::Upper, work_e)?,
        LemmaId::AltB23 => alternating_cubic_sum_mod(p, index, work_e)?,
        LemmaId::GranvilleB1 | LemmaId::ShiftB2 => unreachable!(),
    };
    let rhs_value = coefficient * rat_int(big_pow(p, rhs_power)) * &bernoulli;
    let rhs = reduce_mod(&rhs_value, lhs.modulus())?;
    let achieved = Valuation::Finite(lhs.agreement(&rhs)? as i64);

    let index_name = if which.index_may_be_zero() { "l" } else { "m" };
    let mut params = vec![("p", p as i64), (index_name, index as i64)];
    if which.uses_block_index() {
        params.push(("n", n as i64));
    }
    Ok(LemmaReport::new(
        which,
        params,
        Sides::Residues { lhs, rhs },
        required as i64,
        achieved,
        provenance,
    ))
}

/// One grid point of a lemma sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LemmaTask {
    Granville { n: u64, k: u64, p: u64 },
    Shift(ShiftArgs),
    Block { which: LemmaId, p: u64, index: u32, n: u64 },
}

impl LemmaTask {
    pub fn lemma(&self) -> LemmaId {
        match self {
            LemmaTask::Granville { .. } => LemmaId::GranvilleB1,
            LemmaTask::Shift(_) => LemmaId::ShiftB2,
            LemmaTask::Block { which, .. } => *which,
        }
    }

    pub fn run(&self) -> Result<LemmaReport> {
        match *self {
            LemmaTask::Granville { n, k, p } => verify_granville(n, k, p),
            LemmaTask::Shift(args) => verify_binom_shift(&args),
            LemmaTask::Block { which, p, index, n } => verify_block_lemma(which, p, index, n),
        }
    }
}

pub const DEFAULT_PRIMES: [u64; 4] = [5, 7, 11, 13];
pub const DEFAULT_MS: [u32; 2] = [1, 2];
pub const DEFAULT_LS: [u32; 3] = [0, 1, 2];
pub const DEFAULT_NS: [u64; 3] = [0, 1, 2];
pub const SHIFT_SAMPLES: usize = 50;
pub const SHIFT_SEED: u64 = 0x6a09_e667_f3bc_c908;

/// Grid ranges for a lemma sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaGrid {
    pub primes: Vec<u64>,
    /// `m` values for b7–b13, b23 and b2.
    pub ms: Vec<u32>,
    /// `l` values for b14–b17.
    pub ls: Vec<u32>,
    /// Block indices.
    pub ns: Vec<u64>,
    /// Granville's `n` runs over `2..=granville_max_n`, `k` over `1..n`.
    pub granville_max_n: u64,
    pub granville_primes: Vec<u64>,
    pub shift_samples: usize,
    pub seed: u64,
}

impl Default for LemmaGrid {
    fn default() -> Self {
        LemmaGrid {
            primes: DEFAULT_PRIMES.to_vec(),
            ms: DEFAULT_MS.to_vec(),
            ls: DEFAULT_LS.to_vec(),
            ns: DEFAULT_NS.to_vec(),
            granville_max_n: 6,
            granville_primes: vec![5, 7, 11],
            shift_samples: SHIFT_SAMPLES,
            seed: SHIFT_SEED,
        }
    }
}

/// Random binomial-shift instances for one `(p, m)`, reproducible from
/// `seed`.
pub fn shift_samples(p: u64, m: u32, count: usize, seed: u64) -> Vec<ShiftArgs> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p << 8) ^ m as u64);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=2u64);
            let npm = n * p.pow(m);
            ShiftArgs {
                a: rng.gen_range(0..=3 * p.pow(m)),
                b: rng.gen_range(0..=3 * p.pow(m)),
                c: rng.gen_range(0..=3 * npm),
                n,
                m,
                p,
                r: rng.gen_range(0..=4),
                s: rng.gen_range(0..=3),
                t: rng.gen_range(0..=3),
            }
        })
        .collect()
}

impl LemmaGrid {
    /// Tasks for one lemma, in a fixed order.
    pub fn tasks(&self, which: LemmaId) -> Vec<LemmaTask> {
        let mut out = Vec::new();
        match which {
            LemmaId::GranvilleB1 => {
                for &p in &self.granville_primes {
                    for n in 2..=self.granville_max_n {
                        for k in 1..n {
                            out.push(LemmaTask::Granville { n, k, p });
                        }
                    }
                }
            }
            LemmaId::ShiftB2 => {
                for &p in &self.primes {
                    for &m in &self.ms {
                        out.extend(shift_samples(p, m, self.shift_samples, self.seed).into_iter().map(LemmaTask::Shift));
                    }
                }
            }
            _ => {
                let indices = if which.index_may_be_zero() { &self.ls } else { &self.ms };
                let ns: &[u64] = if which.uses_block_index() { &self.ns } else { &[0] };
                for &p in &self.primes {
                    for &index in indices {
                        for &n in ns {
                            out.push(LemmaTask::Block { which, p, index, n });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn all_tasks(&self) -> Vec<LemmaTask> {
        LemmaId::ALL.iter().flat_map(|&id| self.tasks(id)).collect()
    }
}
