//! Grid syntax: comma lists whose items are integers or inclusive ranges
//! `a..b`, and `r,s,t` triples.

use std::fmt;
use std::str::FromStr;

/// Largest number of values one list may expand to.
pub const MAX_LIST_LEN: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridError(pub String);

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for GridError {}

fn parse_int(s: &str) -> Result<i64, GridError> {
    s.trim().parse().map_err(|_| GridError(format!("`{s}` is not an integer")))
}

/// `lo..hi` or a single integer `x` (read as `x..x`).
pub fn parse_range(s: &str) -> Result<(i64, i64), GridError> {
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (parse_int(lo)?, parse_int(hi)?),
        None => {
            let x = parse_int(s)?;
            (x, x)
        }
    };
    if lo > hi {
        return Err(GridError(format!("range `{s}` is empty")));
    }
    Ok((lo, hi))
}

/// A comma list of integers and inclusive ranges, expanded in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct List<T>(pub Vec<T>);

impl<T> FromStr for List<T>
where
    T: TryFrom<i64>,
{
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, GridError> {
        let mut out = Vec::new();
        for item in s.split(',') {
            let (lo, hi) = parse_range(item)?;
            if (out.len() as u64).saturating_add((hi - lo) as u64) >= MAX_LIST_LEN {
                return Err(GridError(format!("list `{s}` expands to more than {MAX_LIST_LEN} values")));
            }
            for x in lo..=hi {
                out.push(T::try_from(x).map_err(|_| GridError(format!("{x} is out of range")))?);
            }
        }
        if out.is_empty() {
            return Err(GridError("empty list".into()));
        }
        Ok(List(out))
    }
}

/// An `r,s,t` triple with `r >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rst(pub u32, pub u32, pub u32);

impl FromStr for Rst {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, GridError> {
        let parts: Vec<u32> = s
            .split(',')
            .map(|x| x.trim().parse().map_err(|_| GridError(format!("`{x}` is not a nonnegative integer"))))
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [r, s, t] if r >= 2 => Ok(Rst(r, s, t)),
            [_, _, _] => Err(GridError(format!("`{s}`: r must be at least 2"))),
            _ => Err(GridError(format!("`{s}` is not an r,s,t triple"))),
        }
    }
}

/// `name=lo..hi`, a named search range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedRange {
    pub name: String,
    pub range: (i64, i64),
}

impl FromStr for NamedRange {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, GridError> {
        let (name, range) = s.split_once('=').ok_or_else(|| GridError(format!("`{s}` is not name=lo..hi")))?;
        Ok(NamedRange { name: name.trim().to_string(), range: parse_range(range)? })
    }
}
