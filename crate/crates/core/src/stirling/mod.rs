//! Exact Stirling cycle, subset and 2-associated subset numbers.
//!
//! Each kind is held in a triangular table of exact integers built once by
//! its two-term recurrence. Values are unsigned; the series evaluators apply
//! the alternating signs themselves. The generating-function expansion in
//! [`egf`] is an independent route to the same numbers and is what
//! [`StirlingTable::egf_check`] compares against.

pub mod egf;

use std::fmt;

use rug::Integer;

use crate::error::{Error, Result};

/// Table bound used when none is configured.
pub const DEFAULT_MAX_N: usize = 64;

/// Exact nonnegative integer of unbounded size.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BigCardinal(Integer);

impl BigCardinal {
    pub fn zero() -> Self {
        BigCardinal(Integer::new())
    }

    pub fn one() -> Self {
        BigCardinal(Integer::from(1))
    }

    /// Binomial coefficient `C(n, k)`, zero when `k > n`.
    pub fn binomial(n: u32, k: u32) -> Self {
        if k > n {
            return Self::zero();
        }
        BigCardinal(Integer::from(n).binomial(k))
    }

    pub fn factorial(n: u32) -> Self {
        BigCardinal(Integer::from(Integer::factorial(n)))
    }

    pub fn as_integer(&self) -> &Integer {
        &self.0
    }

    pub fn into_integer(self) -> Integer {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl From<u64> for BigCardinal {
    fn from(v: u64) -> Self {
        BigCardinal(Integer::from(v))
    }
}

impl TryFrom<Integer> for BigCardinal {
    type Error = Error;

    fn try_from(v: Integer) -> Result<Self> {
        if v < 0 {
            return Err(Error::Domain(format!("{v} is negative")));
        }
        Ok(BigCardinal(v))
    }
}

impl PartialEq<u64> for BigCardinal {
    fn eq(&self, other: &u64) -> bool {
        self.0 == *other
    }
}

impl std::ops::Add for &BigCardinal {
    type Output = BigCardinal;
    fn add(self, rhs: &BigCardinal) -> BigCardinal {
        BigCardinal(Integer::from(&self.0 + &rhs.0))
    }
}

impl std::ops::Mul for &BigCardinal {
    type Output = BigCardinal;
    fn mul(self, rhs: &BigCardinal) -> BigCardinal {
        BigCardinal(Integer::from(&self.0 * &rhs.0))
    }
}

impl fmt::Display for BigCardinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StirlingKind {
    /// `[n, m]`: permutations of `n` elements with `m` cycles.
    Cycle,
    /// `{n, m}`: partitions of an `n`-set into `m` nonempty blocks.
    Subset,
    /// `{n, m}_{>=2}`: partitions of an `n`-set into `m` blocks of size at least 2.
    Assoc2,
}

impl StirlingKind {
    pub const ALL: [StirlingKind; 3] = [StirlingKind::Cycle, StirlingKind::Subset, StirlingKind::Assoc2];

    pub fn name(self) -> &'static str {
        match self {
            StirlingKind::Cycle => "cycle",
            StirlingKind::Subset => "subset",
            StirlingKind::Assoc2 => "assoc2",
        }
    }
}

impl fmt::Display for StirlingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for StirlingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cycle" => Ok(StirlingKind::Cycle),
            "subset" => Ok(StirlingKind::Subset),
            "assoc2" => Ok(StirlingKind::Assoc2),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "expected one of cycle, subset, assoc2".into(),
            }),
        }
    }
}

/// Triangular table of one Stirling kind, rows `0..=max_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StirlingTable {
    kind: StirlingKind,
    max_n: usize,
    rows: Vec<Vec<BigCardinal>>,
    zero: BigCardinal,
}

impl StirlingTable {
    pub fn new(kind: StirlingKind, max_n: usize) -> Self {
        let mut rows: Vec<Vec<Integer>> = Vec::with_capacity(max_n + 1);
        rows.push(vec![Integer::from(1)]);
        for n in 0..max_n {
            // Row n + 1 from rows n and n - 1.
            let mut next = vec![Integer::new(); n + 2];
            for (m, slot) in next.iter_mut().enumerate().skip(1) {
                let same = rows[n].get(m).cloned().unwrap_or_default();
                *slot = match kind {
                    // [n+1, m] = n [n, m] + [n, m-1]
                    StirlingKind::Cycle => same * n as u64 + &rows[n][m - 1],
                    // {n+1, m} = m {n, m} + {n, m-1}
                    StirlingKind::Subset => same * m as u64 + &rows[n][m - 1],
                    // Element n+1 joins one of the m blocks, or pairs with one of
                    // the other n elements to open a new block:
                    // {n+1, m} = m {n, m} + n {n-1, m-1}
                    StirlingKind::Assoc2 => {
                        let paired = if n >= 1 {
                            rows[n - 1].get(m - 1).cloned().unwrap_or_default() * n as u64
                        } else {
                            Integer::new()
                        };
                        same * m as u64 + paired
                    }
                };
            }
            rows.push(next);
        }
        let rows = rows
            .into_iter()
            .map(|row| row.into_iter().map(BigCardinal).collect())
            .collect();
        StirlingTable {
            kind,
            max_n,
            rows,
            zero: BigCardinal::zero(),
        }
    }

    pub fn kind(&self) -> StirlingKind {
        self.kind
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// Entry `(n, m)`; zero above the diagonal.
    pub fn get(&self, n: usize, m: usize) -> Result<&BigCardinal> {
        let worst = n.max(m);
        if worst > self.max_n {
            return Err(Error::Capacity {
                table: self.kind.name(),
                requested: worst,
                bound: self.max_n,
            });
        }
        Ok(self.rows[n].get(m).unwrap_or(&self.zero))
    }

    pub fn row(&self, n: usize) -> Result<&[BigCardinal]> {
        self.get(n, 0)?;
        Ok(&self.rows[n])
    }

    /// Compares rows `m..=n_max` of column `m` with the coefficients of the
    /// defining generating function expanded in exact rationals.
    pub fn egf_check(&self, m: usize, n_max: usize) -> Result<bool> {
        if n_max < m {
            return Err(Error::Domain(format!("n_max = {n_max} must be at least m = {m}")));
        }
        self.get(n_max, m)?;
        let expected = egf::column(self.kind, m, n_max);
        for (n, want) in expected.iter().enumerate() {
            if self.get(n, m)?.as_integer() != want {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The three tables built to a common bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StirlingTables {
    cycle: StirlingTable,
    subset: StirlingTable,
    assoc2: StirlingTable,
}

impl Default for StirlingTables {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_N)
    }
}

impl StirlingTables {
    pub fn new(max_n: usize) -> Self {
        StirlingTables {
            cycle: StirlingTable::new(StirlingKind::Cycle, max_n),
            subset: StirlingTable::new(StirlingKind::Subset, max_n),
            assoc2: StirlingTable::new(StirlingKind::Assoc2, max_n),
        }
    }

    pub fn max_n(&self) -> usize {
        self.cycle.max_n()
    }

    pub fn table(&self, kind: StirlingKind) -> &StirlingTable {
        match kind {
            StirlingKind::Cycle => &self.cycle,
            StirlingKind::Subset => &self.subset,
            StirlingKind::Assoc2 => &self.assoc2,
        }
    }

    pub fn cycle(&self, n: usize, m: usize) -> Result<&BigCardinal> {
        self.cycle.get(n, m)
    }

    pub fn subset(&self, n: usize, m: usize) -> Result<&BigCardinal> {
        self.subset.get(n, m)
    }

    pub fn assoc2(&self, n: usize, m: usize) -> Result<&BigCardinal> {
        self.assoc2.get(n, m)
    }

    pub fn egf_check(&self, kind: StirlingKind, m: usize, n_max: usize) -> Result<bool> {
        self.table(kind).egf_check(m, n_max)
    }

    /// Right-hand side of the expression of a cycle number through
    /// 2-associated subset numbers:
    /// `sum_{p=0}^{l-m} (-1)^{p+l-m} {p+l-m, p}_{>=2} C(p+l-1, p+l-m)`.
    pub fn cycle_via_assoc2(&self, l: usize, m: usize) -> Result<Integer> {
        if m < 1 || m > l {
            return Err(Error::Domain(format!("need 1 <= m <= l, got l = {l}, m = {m}")));
        }
        let d = l - m;
        let mut total = Integer::new();
        for p in 0..=d {
            let assoc = self.assoc2(p + d, p)?.as_integer();
            let binom = Integer::from(p + l - 1).binomial((p + d) as u32);
            let term = binom * assoc;
            if (p + d).is_multiple_of(2) {
                total += term;
            } else {
                total -= term;
            }
        }
        Ok(total)
    }

    /// True iff [`Self::cycle_via_assoc2`] reproduces `[l, m]` exactly.
    pub fn identity_3c_check(&self, l: usize, m: usize) -> Result<bool> {
        let rhs = self.cycle_via_assoc2(l, m)?;
        Ok(self.cycle(l, m)?.as_integer() == &rhs)
    }
}
