//! Integrality searches over boxes of Zagier and Cooper recurrence
//! parameters, with hits classified against the named rows.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sequences::{NamedId, Recurrence};

pub const DEFAULT_BUDGET: u64 = 10_000_000;
pub const MIN_HORIZON: usize = 10;
/// Terms compared when classifying a hit.
pub const CLASSIFY_TERMS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Zagier,
    Cooper,
}

impl Family {
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Family::Zagier => &["A", "B", "lambda"],
            Family::Cooper => &["a", "b", "c", "d"],
        }
    }

    pub fn recurrence(&self, params: &[i64]) -> Recurrence {
        match (self, params) {
            (Family::Zagier, &[a, b, lambda]) => Recurrence::Zagier { a, b, lambda },
            (Family::Cooper, &[a, b, c, d]) => Recurrence::Cooper { a, b, c, d },
            _ => panic!("{self} takes {} parameters, got {}", self.param_names().len(), params.len()),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Zagier => "zagier",
            Family::Cooper => "cooper",
        })
    }
}

/// Inclusive parameter ranges for one family and the number of terms that
/// must come out integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBox {
    family: Family,
    ranges: Vec<(i64, i64)>,
    horizon: usize,
}

impl SearchBox {
    pub fn new(family: Family, ranges: Vec<(i64, i64)>, horizon: usize) -> Result<Self> {
        if ranges.len() != family.param_names().len() {
            return Err(Error::InvalidParams(format!("{family} needs {} ranges", family.param_names().len())));
        }
        if let Some((lo, hi)) = ranges.iter().find(|(lo, hi)| lo > hi) {
            return Err(Error::InvalidParams(format!("empty range {lo}..{hi}")));
        }
        if horizon < MIN_HORIZON {
            return Err(Error::InvalidParams(format!("horizon must be at least {MIN_HORIZON}, got {horizon}")));
        }
        Ok(SearchBox { family, ranges, horizon })
    }

    /// `A ∈ [0,20]`, `B ∈ [-100,100]`, `λ ∈ [0,10]`, 50 terms.
    pub fn default_zagier() -> Self {
        SearchBox::new(Family::Zagier, vec![(0, 20), (-100, 100), (0, 10)], 50).expect("valid box")
    }

    /// `a ∈ [0,20]`, `b ∈ [0,10]`, `c ∈ [-250,250]`, `d ∈ [-15,15]`, 30 terms.
    pub fn default_cooper() -> Self {
        SearchBox::new(Family::Cooper, vec![(0, 20), (0, 10), (-250, 250), (-15, 15)], 30).expect("valid box")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn ranges(&self) -> &[(i64, i64)] {
        &self.ranges
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Number of tuples, saturating.
    pub fn size(&self) -> u64 {
        self.ranges
            .iter()
            .map(|(lo, hi)| (hi - lo + 1) as u64)
            .fold(1u64, |acc, w| acc.saturating_mul(w))
    }

    pub fn contains(&self, params: &[i64]) -> bool {
        params.len() == self.ranges.len() && params.iter().zip(&self.ranges).all(|(x, (lo, hi))| lo <= x && x <= hi)
    }

    /// The `index`-th tuple in lexicographic order.
    pub fn tuple(&self, mut index: u64) -> Vec<i64> {
        let mut out = vec![0; self.ranges.len()];
        for (slot, (lo, hi)) in out.iter_mut().zip(&self.ranges).rev() {
            let width = (hi - lo + 1) as u64;
            *slot = lo + (index % width) as i64;
            index /= width;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    KnownSporadic(NamedId),
    Degenerate,
    Unclassified,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::KnownSporadic(id) => write!(f, "known:{id}"),
            Classification::Degenerate => f.write_str("degenerate"),
            Classification::Unclassified => f.write_str("unclassified"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchHit {
    pub family: Family,
    pub params: Vec<i64>,
    pub first_terms: Vec<BigInt>,
    pub classification: Classification,
}

impl SearchHit {
    pub fn recurrence(&self) -> Recurrence {
        self.family.recurrence(&self.params)
    }
}

/// The first `n < horizon` with `u_n` non-integral, or `None` when
/// `u_0..u_{horizon-1}` are all integers.
pub fn first_non_integral(rec: &Recurrence, horizon: usize) -> Option<usize> {
    let (mut prev, mut cur) = (0i128, 1i128);
    for n in 0..horizon.saturating_sub(1) {
        let (lead, mid, trail) = rec.coefficients(n as i64);
        let step = (mid as i128)
            .checked_mul(cur)
            .zip((trail as i128).checked_mul(prev))
            .and_then(|(x, y)| x.checked_sub(y));
        match step {
            Some(num) => {
                if num % lead as i128 != 0 {
                    return Some(n + 1);
                }
                prev = cur;
                cur = num / lead as i128;
            }
            None => return first_non_integral_big(rec, horizon, n, BigInt::from(prev), BigInt::from(cur)),
        }
    }
    None
}

fn first_non_integral_big(rec: &Recurrence, horizon: usize, start: usize, mut prev: BigInt, mut cur: BigInt) -> Option<usize> {
    for n in start..horizon - 1 {
        let (lead, mid, trail) = rec.coefficients(n as i64);
        let (q, r) = (&cur * mid - &prev * trail).div_rem(&BigInt::from(lead));
        if !r.is_zero() {
            return Some(n + 1);
        }
        prev = std::mem::replace(&mut cur, q);
    }
    None
}

fn named_prefixes() -> &'static [(NamedId, Vec<BigInt>)] {
    static PREFIXES: OnceLock<Vec<(NamedId, Vec<BigInt>)>> = OnceLock::new();
    PREFIXES.get_or_init(|| {
        NamedId::ALL
            .into_iter()
            .map(|id| (id, (0..CLASSIFY_TERMS as u64).map(|n| id.closed_form(n)).collect()))
            .collect()
    })
}

/// Matches the first ten terms against the named rows; zero tails and
/// constant term ratios are degenerate.
pub fn classify(terms: &[BigInt]) -> Classification {
    let head = &terms[..terms.len().min(CLASSIFY_TERMS)];
    if head.len() == CLASSIFY_TERMS {
        if let Some((id, _)) = named_prefixes().iter().find(|(_, p)| p.as_slice() == head) {
            return Classification::KnownSporadic(*id);
        }
    }
    if has_zero_tail(terms) || has_constant_ratio(head) {
        return Classification::Degenerate;
    }
    Classification::Unclassified
}

fn has_zero_tail(terms: &[BigInt]) -> bool {
    terms.len() >= 2 && terms[1..].iter().rev().take(terms.len() / 2).all(Zero::is_zero)
}

/// `u_{n+1} u_{n-1} = u_n^2` throughout, with no zero term.
fn has_constant_ratio(terms: &[BigInt]) -> bool {
    terms.len() >= 3
        && terms.iter().all(|u| !u.is_zero())
        && terms.windows(3).all(|w| &w[2] * &w[0] == &w[1] * &w[1])
}

fn integer_terms(rec: &Recurrence, count: usize) -> Vec<BigInt> {
    rec.terms(count)
        .into_iter()
        .map(|u| {
            assert!(u.is_integer(), "{rec:?} passed the integrality filter but has term {u}");
            u.to_integer()
        })
        .collect()
}

/// Every tuple of the box whose recurrence stays integral through the
/// horizon, in lexicographic parameter order.
pub fn run_search(search: &SearchBox, budget: u64) -> Result<Vec<SearchHit>> {
    let size = search.size();
    if size > budget {
        return Err(Error::BudgetExceeded { requested: size, budget });
    }
    let family = search.family;
    let horizon = search.horizon;
    Ok((0..size)
        .into_par_iter()
        .filter_map(|i| {
            let params = search.tuple(i);
            let rec = family.recurrence(&params);
            if first_non_integral(&rec, horizon).is_some() {
                return None;
            }
            let first_terms = integer_terms(&rec, horizon);
            let classification = classify(&first_terms);
            Some(SearchHit { family, params, first_terms, classification })
        })
        .collect())
}

/// Parameters of the named rows that fall inside `search`.
pub fn table_rows_in(search: &SearchBox) -> Vec<(NamedId, Vec<i64>)> {
    NamedId::ALL
        .into_iter()
        .filter_map(|id| {
            let params = match (search.family, id.recurrence()) {
                (Family::Zagier, Recurrence::Zagier { a, b, lambda }) => vec![a, b, lambda],
                (Family::Cooper, Recurrence::Cooper { a, b, c, d }) => vec![a, b, c, d],
                _ => return None,
            };
            search.contains(&params).then_some((id, params))
        })
        .collect()
}
