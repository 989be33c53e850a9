use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One-dimensional route encoding `[0 r1 0 r2 0 ... rR 0]`.
///
/// Zeros are depot separators and adjacent zeros denote empty routes. A valid
/// string over `n` locations holds each location `1..=n` exactly once and
/// exactly `n + 1` zeros, so every partition into at most `n` routes is
/// representable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SolutionString {
    entries: Vec<usize>,
}

impl SolutionString {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        validate(&entries)?;
        Ok(Self { entries })
    }

    /// Builds a string from explicit routes, padding with empty routes at the
    /// end. Empty inner vectors are allowed and become adjacent zeros.
    pub fn from_routes<R: AsRef<[usize]>>(routes: &[R], n_customers: usize) -> Result<Self> {
        let mut entries = Vec::with_capacity(2 * n_customers + 1);
        entries.push(0);
        let mut zeros = 1;
        for route in routes {
            entries.extend_from_slice(route.as_ref());
            entries.push(0);
            zeros += 1;
        }
        while zeros < n_customers + 1 {
            entries.push(0);
            zeros += 1;
        }
        let s = Self::new(entries)?;
        if s.n_customers() != n_customers {
            return Err(Error::InvalidSolution(format!(
                "routes cover {} locations, expected {n_customers}",
                s.n_customers()
            )));
        }
        Ok(s)
    }

    /// The unique string over one location.
    pub fn single() -> Self {
        Self {
            entries: vec![0, 1, 0],
        }
    }

    pub(crate) fn from_entries_unchecked(entries: Vec<usize>) -> Self {
        debug_assert!(validate(&entries).is_ok(), "{entries:?}");
        Self { entries }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut Vec<usize> {
        &mut self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_customers(&self) -> usize {
        (self.entries.len() - 1) / 2
    }

    /// Non-empty routes in string order, without the depot separators.
    pub fn routes(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.entries.split(|&e| e == 0).filter(|r| !r.is_empty())
    }

    pub fn route_count(&self) -> usize {
        self.routes().count()
    }
}

fn validate(entries: &[usize]) -> Result<()> {
    let fail = |msg: String| Err(Error::InvalidSolution(msg));
    if entries.len() < 3 || entries.len().is_multiple_of(2) {
        return fail(format!(
            "length {} is not 2n + 1 for some n >= 1",
            entries.len()
        ));
    }
    if entries[0] != 0 || entries[entries.len() - 1] != 0 {
        return fail("string must begin and end at the depot".into());
    }
    let n = (entries.len() - 1) / 2;
    let mut seen = vec![false; n + 1];
    let mut zeros = 0;
    for &e in entries {
        if e == 0 {
            zeros += 1;
        } else if e > n {
            return fail(format!("location {e} out of range 1..={n}"));
        } else if std::mem::replace(&mut seen[e], true) {
            return fail(format!("location {e} appears more than once"));
        }
    }
    if zeros != n + 1 {
        return fail(format!("expected {} depot zeros, found {zeros}", n + 1));
    }
    Ok(())
}

impl TryFrom<Vec<usize>> for SolutionString {
    type Error = Error;

    fn try_from(entries: Vec<usize>) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<SolutionString> for Vec<usize> {
    fn from(s: SolutionString) -> Self {
        s.entries
    }
}

impl fmt::Display for SolutionString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, e) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for SolutionString {
    type Err = Error;

    /// Accepts `[0 1 2 0]`, `0 1 2 0` or comma-separated forms.
    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .trim()
            .trim_start_matches('[')
            .trim_end_matches(']')
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::InvalidSolution(format!("`{t}` is not a location index")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }
}
