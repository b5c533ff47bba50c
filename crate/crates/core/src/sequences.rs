//! Apéry-like sequences: the three recurrence families, the fifteen named
//! sporadic rows with their binomial-sum closed forms, and the
//! `A_n^(r,s,t)` family.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::Rational;
use crate::binomial::{binom, pow_conv, SummandFactors};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_INDEX: u64 = 5000;

/// The fifteen rows of the Zagier and Cooper tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedId {
    A,
    B,
    C,
    D,
    E,
    F,
    Delta,
    Eta,
    Alpha,
    Epsilon,
    Zeta,
    Gamma,
    S7,
    S10,
    S18,
}

impl NamedId {
    pub const ALL: [NamedId; 15] = [
        NamedId::A,
        NamedId::B,
        NamedId::C,
        NamedId::D,
        NamedId::E,
        NamedId::F,
        NamedId::Delta,
        NamedId::Eta,
        NamedId::Alpha,
        NamedId::Epsilon,
        NamedId::Zeta,
        NamedId::Gamma,
        NamedId::S7,
        NamedId::S10,
        NamedId::S18,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            NamedId::A => "A",
            NamedId::B => "B",
            NamedId::C => "C",
            NamedId::D => "D",
            NamedId::E => "E",
            NamedId::F => "F",
            NamedId::Delta => "delta",
            NamedId::Eta => "eta",
            NamedId::Alpha => "alpha",
            NamedId::Epsilon => "epsilon",
            NamedId::Zeta => "zeta",
            NamedId::Gamma => "gamma",
            NamedId::S7 => "s7",
            NamedId::S10 => "s10",
            NamedId::S18 => "s18",
        }
    }

    /// Recurrence parameters exactly as tabulated: Zagier triples for
    /// `A..F`, Cooper quadruples for the rest.
    pub fn recurrence(&self) -> Recurrence {
        use Recurrence::{Cooper, Zagier};
        match self {
            NamedId::A => Zagier { a: 7, b: -8, lambda: 2 },
            NamedId::B => Zagier { a: 9, b: 27, lambda: 3 },
            NamedId::C => Zagier { a: 10, b: 9, lambda: 3 },
            NamedId::D => Zagier { a: 11, b: -1, lambda: 3 },
            NamedId::E => Zagier { a: 12, b: 32, lambda: 4 },
            NamedId::F => Zagier { a: 17, b: 72, lambda: 6 },
            NamedId::Delta => Cooper { a: 7, b: 3, c: 81, d: 0 },
            NamedId::Eta => Cooper { a: 11, b: 5, c: 125, d: 0 },
            NamedId::Alpha => Cooper { a: 10, b: 4, c: 64, d: 0 },
            NamedId::Epsilon => Cooper { a: 12, b: 4, c: 16, d: 0 },
            NamedId::Zeta => Cooper { a: 9, b: 3, c: -27, d: 0 },
            NamedId::Gamma => Cooper { a: 17, b: 5, c: 1, d: 0 },
            NamedId::S7 => Cooper { a: 13, b: 4, c: -27, d: 3 },
            NamedId::S10 => Cooper { a: 6, b: 2, c: -64, d: 4 },
            NamedId::S18 => Cooper { a: 14, b: 6, c: 192, d: -12 },
        }
    }

    /// The `(r,s,t)` of the `A_n^(r,s,t)` special-case table, when the row
    /// is one of them.
    pub fn oss_triple(&self) -> Option<(u32, u32, u32)> {
        match self {
            NamedId::A => Some((3, 0, 0)),
            NamedId::D => Some((2, 1, 0)),
            NamedId::Epsilon => Some((2, 0, 2)),
            NamedId::Gamma => Some((2, 2, 0)),
            NamedId::S7 => Some((2, 1, 1)),
            NamedId::S10 => Some((4, 0, 0)),
            _ => None,
        }
    }

    pub fn from_oss_triple(r: u32, s: u32, t: u32) -> Option<NamedId> {
        NamedId::ALL.into_iter().find(|id| id.oss_triple() == Some((r, s, t)))
    }

    /// Closed-form term as tabulated.
    pub fn closed_form(&self, n: u64) -> BigInt {
        let ni = n as i64;
        let sign = |k: i64| if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let pow = |base: i64, e: i64| pow_conv(&BigInt::from(base), e as u32);
        let sum = |f: &dyn Fn(i64) -> BigInt| (0..=ni).map(f).sum::<BigInt>();
        match self {
            NamedId::A => sum(&|k| pow_conv(&binom(ni, k), 3)),
            NamedId::B => sum(&|k| {
                if 3 * k > ni {
                    return BigInt::zero();
                }
                sign(k) * pow(3, ni - 3 * k) * binom(ni, 3 * k) * binom(3 * k, 2 * k) * binom(2 * k, k)
            }),
            NamedId::C => sum(&|k| pow_conv(&binom(ni, k), 2) * binom(2 * k, k)),
            NamedId::D => sum(&|k| pow_conv(&binom(ni, k), 2) * binom(ni + k, k)),
            NamedId::E => sum(&|k| {
                if 2 * k > ni {
                    return BigInt::zero();
                }
                pow(4, ni - 2 * k) * binom(ni, 2 * k) * pow_conv(&binom(2 * k, k), 2)
            }),
            NamedId::F => {
                let franel: Vec<BigInt> = (0..=n).map(|k| NamedId::A.closed_form(k)).collect();
                sum(&|k| sign(k) * pow(8, ni - k) * binom(ni, k) * &franel[k as usize])
            }
            NamedId::Delta => sum(&|k| {
                if 3 * k > ni {
                    return BigInt::zero();
                }
                sign(k)
                    * pow(3, ni - 3 * k)
                    * binom(ni, 3 * k)
                    * binom(ni + k, k)
                    * binom(3 * k, 2 * k)
                    * binom(2 * k, k)
            }),
            NamedId::Eta => sum(&|k| {
                sign(k)
                    * pow_conv(&binom(ni, k), 3)
                    * (binom(4 * ni - 5 * k - 1, 3 * ni) + binom(4 * ni - 5 * k, 3 * ni))
            }),
            NamedId::Alpha => sum(&|k| {
                pow_conv(&binom(ni, k), 2) * binom(2 * k, k) * binom(2 * ni - 2 * k, ni - k)
            }),
            NamedId::Epsilon => sum(&|k| pow_conv(&binom(ni, k), 2) * pow_conv(&binom(2 * k, ni), 2)),
            NamedId::Zeta => sum(&|k| {
                (0..=ni)
                    .map(|l| pow_conv(&binom(ni, k), 2) * binom(ni, l) * binom(k, l) * binom(k + l, ni))
                    .sum::<BigInt>()
            }),
            NamedId::Gamma => sum(&|k| pow_conv(&binom(ni, k), 2) * pow_conv(&binom(ni + k, k), 2)),
            NamedId::S7 => sum(&|k| pow_conv(&binom(ni, k), 2) * binom(ni + k, k) * binom(2 * k, ni)),
            NamedId::S10 => sum(&|k| pow_conv(&binom(ni, k), 4)),
            NamedId::S18 => sum(&|k| {
                sign(k)
                    * binom(ni, k)
                    * binom(2 * k, k)
                    * binom(2 * ni - 2 * k, ni - k)
                    * (binom(2 * ni - 3 * k - 1, ni) + binom(2 * ni - 3 * k, ni))
            }),
        }
    }
}

impl fmt::Display for NamedId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NamedId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NamedId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown sequence name `{s}`")))
    }
}

/// A three-term recurrence with `u_{-1} = 0`, `u_0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Recurrence {
    /// `(n+1)^2 u_{n+1} - (A n^2 + A n + λ) u_n + B n^2 u_{n-1} = 0`
    Zagier { a: i64, b: i64, lambda: i64 },
    /// `(n+1)^3 u_{n+1} - (2n+1)(a n^2 + a n + b) u_n + c n^3 u_{n-1} = 0`
    AlmkvistZudilin { a: i64, b: i64, c: i64 },
    /// `(n+1)^3 u_{n+1} - (2n+1)(a n^2 + a n + b) u_n + n(c n^2 + d) u_{n-1} = 0`
    Cooper { a: i64, b: i64, c: i64, d: i64 },
}

impl Recurrence {
    /// Apéry's recurrence for `a_n = sum C(n,k)^2 C(n+k,k)^2`.
    pub const APERY_ZETA3: Recurrence = Recurrence::AlmkvistZudilin { a: 17, b: 5, c: 1 };
    /// Apéry's recurrence for `b_n = sum C(n,k)^2 C(n+k,k)`.
    pub const APERY_ZETA2: Recurrence = Recurrence::Zagier { a: 11, b: -1, lambda: 3 };

    /// `(leading, middle, trailing)` integer coefficients at step `n`, so
    /// that `leading * u_{n+1} = middle * u_n - trailing * u_{n-1}`.
    pub fn coefficients(&self, n: i64) -> (i64, i64, i64) {
        match *self {
            Recurrence::Zagier { a, b, lambda } => {
                ((n + 1) * (n + 1), a * n * n + a * n + lambda, b * n * n)
            }
            Recurrence::AlmkvistZudilin { a, b, c } => {
                ((n + 1).pow(3), (2 * n + 1) * (a * n * n + a * n + b), c * n.pow(3))
            }
            Recurrence::Cooper { a, b, c, d } => {
                ((n + 1).pow(3), (2 * n + 1) * (a * n * n + a * n + b), n * (c * n * n + d))
            }
        }
    }

    /// First `count` terms as exact rationals; integrality is not assumed.
    pub fn terms(&self, count: usize) -> Vec<Rational> {
        let mut out = Vec::with_capacity(count);
        let mut prev = Rational::zero();
        let mut cur = Rational::one();
        for n in 0..count as i64 {
            out.push(cur.clone());
            let (lead, mid, trail) = self.coefficients(n);
            let next = (&cur * BigInt::from(mid) - &prev * BigInt::from(trail)) / BigInt::from(lead);
            prev = std::mem::replace(&mut cur, next);
        }
        out
    }
}

/// What a sequence is: a closed-form family, a bare recurrence, or a named
/// table row carrying both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SequenceSpec {
    Oss { r: u32, s: u32, t: u32 },
    Rec(Recurrence),
    Named(NamedId),
}

impl SequenceSpec {
    pub fn oss(r: u32, s: u32, t: u32) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidParams(format!("A_n^(r,s,t) needs r >= 2, got r = {r}")));
        }
        Ok(SequenceSpec::Oss { r, s, t })
    }

    pub fn recurrence(&self) -> Result<Recurrence> {
        match self {
            SequenceSpec::Rec(rec) => Ok(*rec),
            SequenceSpec::Named(id) => Ok(id.recurrence()),
            SequenceSpec::Oss { r, s, t } => NamedId::from_oss_triple(*r, *s, *t)
                .map(|id| id.recurrence())
                .ok_or_else(|| Error::InvalidParams(format!("no recurrence known for {self}"))),
        }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::Oss { r, s, t } => write!(f, "oss:{r},{s},{t}"),
            SequenceSpec::Named(id) => write!(f, "named:{id}"),
            SequenceSpec::Rec(Recurrence::Zagier { a, b, lambda }) => write!(f, "zagier:{a},{b},{lambda}"),
            SequenceSpec::Rec(Recurrence::AlmkvistZudilin { a, b, c }) => write!(f, "az:{a},{b},{c}"),
            SequenceSpec::Rec(Recurrence::Cooper { a, b, c, d }) => write!(f, "cooper:{a},{b},{c},{d}"),
        }
    }
}

impl FromStr for SequenceSpec {
    type Err = Error;

    /// `named:D`, `oss:2,2,0`, `zagier:7,-8,2`, `az:17,5,1`,
    /// `cooper:13,4,-27,3`, `apery3` or `apery2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("cannot parse sequence spec `{s}`"));
        match s {
            "apery3" => return Ok(SequenceSpec::Rec(Recurrence::APERY_ZETA3)),
            "apery2" => return Ok(SequenceSpec::Rec(Recurrence::APERY_ZETA2)),
            _ => {}
        }
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        if kind == "named" {
            return Ok(SequenceSpec::Named(args.parse()?));
        }
        let nums: Vec<i64> = args
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (kind, nums.as_slice()) {
            ("oss", &[r, s2, t]) if r >= 0 && s2 >= 0 && t >= 0 => SequenceSpec::oss(r as u32, s2 as u32, t as u32),
            ("zagier", &[a, b, lambda]) => Ok(SequenceSpec::Rec(Recurrence::Zagier { a, b, lambda })),
            ("az", &[a, b, c]) => Ok(SequenceSpec::Rec(Recurrence::AlmkvistZudilin { a, b, c })),
            ("cooper", &[a, b, c, d]) => Ok(SequenceSpec::Rec(Recurrence::Cooper { a, b, c, d })),
            _ => Err(bad()),
        }
    }
}

pub fn term_by_recurrence(spec: &SequenceSpec, n: u64) -> Result<Rational> {
    Ok(spec.recurrence()?.terms(n as usize + 1).pop().expect("at least one term"))
}

pub fn terms_by_recurrence(spec: &SequenceSpec, count: usize) -> Result<Vec<Rational>> {
    Ok(spec.recurrence()?.terms(count))
}

pub fn term_by_formula(spec: &SequenceSpec, n: u64) -> Result<BigInt> {
    match spec {
        SequenceSpec::Oss { r, s, t } => oss_term_at(*r, *s, *t, n, DEFAULT_MAX_INDEX),
        SequenceSpec::Named(id) => Ok(id.closed_form(n)),
        SequenceSpec::Rec(_) => Err(Error::NoClosedForm(spec.to_string())),
    }
}

/// `A_N^(r,s,t)`, summed one streamed summand at a time.
pub fn oss_term_at(r: u32, s: u32, t: u32, n: u64, cap: u64) -> Result<BigInt> {
    if r < 2 {
        return Err(Error::InvalidParams(format!("A_n^(r,s,t) needs r >= 2, got r = {r}")));
    }
    if n > cap {
        return Err(Error::CapExceeded { requested: n, cap });
    }
    Ok(SummandFactors::new(n)
        .map(|(_, c_nk, c_npk, c_2kn)| pow_conv(&c_nk, r) * pow_conv(&c_npk, s) * pow_conv(&c_2kn, t))
        .sum())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub spec: SequenceSpec,
    pub horizon: u64,
    pub first_mismatch: Option<u64>,
    pub first_non_integral: Option<u64>,
}

impl ValidationReport {
    pub fn agrees(&self) -> bool {
        self.first_mismatch.is_none() && self.first_non_integral.is_none()
    }
}

/// Compares recurrence terms against closed-form terms for `n < horizon`.
/// OSS triples are paired with the recurrence of their special-case row.
pub fn cross_validate(spec: &SequenceSpec, horizon: u64) -> Result<ValidationReport> {
    let rec_terms = terms_by_recurrence(spec, horizon as usize)?;
    let mut first_mismatch = None;
    let mut first_non_integral = None;
    for (n, rec) in rec_terms.iter().enumerate() {
        let n = n as u64;
        if first_non_integral.is_none() && !rec.is_integer() {
            first_non_integral = Some(n);
        }
        if first_mismatch.is_none() && *rec != Rational::from_integer(term_by_formula(spec, n)?) {
            first_mismatch = Some(n);
        }
    }
    Ok(ValidationReport { spec: *spec, horizon, first_mismatch, first_non_integral })
}
