use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize};

use super::VarSet;
use crate::{Error, Result};

/// A conditional-independence claim `U ⟂ V | W` in canonical form.
///
/// `U` and `V` are nonempty, and the three sets are pairwise disjoint. The
/// lexicographically smaller of `U` and `V` is stored first, so the two
/// symmetric spellings of a claim compare equal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CiStatement {
    u: VarSet,
    v: VarSet,
    w: VarSet,
}

impl CiStatement {
    pub fn new(u: VarSet, v: VarSet, w: VarSet) -> Result<Self> {
        if u.is_empty() || v.is_empty() {
            return Err(Error::InvalidStatement(
                "both sides of a statement must be nonempty".into(),
            ));
        }
        if !u.is_disjoint(v) || !u.is_disjoint(w) || !v.is_disjoint(w) {
            return Err(Error::InvalidStatement(format!(
                "sets must be pairwise disjoint: {u} ⟂ {v} | {w}"
            )));
        }
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        Ok(CiStatement { u, v, w })
    }

    /// Convenience constructor from index slices.
    pub fn of(u: &[usize], v: &[usize], w: &[usize]) -> Result<Self> {
        Self::new(
            VarSet::from_indices(u.iter().copied()),
            VarSet::from_indices(v.iter().copied()),
            VarSet::from_indices(w.iter().copied()),
        )
    }

    pub fn u(&self) -> VarSet {
        self.u
    }

    pub fn v(&self) -> VarSet {
        self.v
    }

    pub fn w(&self) -> VarSet {
        self.w
    }

    /// `U ∪ V ∪ W`.
    pub fn scope(&self) -> VarSet {
        self.u.union(self.v).union(self.w)
    }

    /// Smallest variable count the statement is defined over.
    pub fn min_vars(&self) -> usize {
        self.scope().bound()
    }
}

impl fmt::Debug for CiStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⟂ {} | {}", self.u, self.v, self.w)
    }
}

impl fmt::Display for CiStatement {
    /// Renders in the CLI grammar: `u|v||w` with comma-separated indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: VarSet| {
            s.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}|{}||{}", join(self.u), join(self.v), join(self.w))
    }
}

fn parse_indices(part: &str) -> Result<VarSet> {
    let part = part.trim();
    if part.is_empty() {
        return Ok(VarSet::EMPTY);
    }
    part.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let i: usize = tok
                .parse()
                .map_err(|_| Error::InvalidStatement(format!("bad variable index `{tok}`")))?;
            if i >= super::MAX_VARS {
                return Err(Error::InvalidStatement(format!("index {i} out of range")));
            }
            Ok(i)
        })
        .collect::<Result<Vec<_>>>()
        .map(VarSet::from_indices)
}

impl FromStr for CiStatement {
    type Err = Error;

    /// Parses `u|v||w` (the `||w` part is optional), e.g. `0|1||2` or `0,1|2`.
    fn from_str(s: &str) -> Result<Self> {
        let (left, w) = match s.split_once("||") {
            Some((l, w)) => (l, w),
            None => (s, ""),
        };
        let (u, v) = left
            .split_once('|')
            .ok_or_else(|| Error::InvalidStatement(format!("expected `u|v||w`, got `{s}`")))?;
        if v.contains('|') || w.contains('|') {
            return Err(Error::InvalidStatement(format!(
                "expected `u|v||w`, got `{s}`"
            )));
        }
        CiStatement::new(parse_indices(u)?, parse_indices(v)?, parse_indices(w)?)
    }
}

impl<'de> Deserialize<'de> for CiStatement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            u: VarSet,
            v: VarSet,
            #[serde(default)]
            w: VarSet,
        }
        let raw = Raw::deserialize(deserializer)?;
        CiStatement::new(raw.u, raw.v, raw.w).map_err(serde::de::Error::custom)
    }
}

/// Every canonical statement over `k` variables, in canonical order.
///
/// Each variable is assigned to `U`, `V`, `W` or left out; assignments with an
/// empty side are dropped and symmetric duplicates collapse.
pub fn statement_universe(k: usize) -> Vec<CiStatement> {
    let mut out = BTreeSet::new();
    let total = 4usize.pow(k as u32);
    for code in 0..total {
        let (mut u, mut v, mut w) = (VarSet::EMPTY, VarSet::EMPTY, VarSet::EMPTY);
        let mut c = code;
        for i in 0..k {
            match c % 4 {
                1 => u = u.with(i),
                2 => v = v.with(i),
                3 => w = w.with(i),
                _ => {}
            }
            c /= 4;
        }
        if let Ok(s) = CiStatement::new(u, v, w) {
            out.insert(s);
        }
    }
    out.into_iter().collect()
}

/// A set of canonical statements; serializes as a list in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StatementSet(BTreeSet<CiStatement>);

impl StatementSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, s: CiStatement) -> bool {
        self.0.insert(s)
    }

    pub fn contains(&self, s: &CiStatement) -> bool {
        self.0.contains(s)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &StatementSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_strict_subset(&self, other: &StatementSet) -> bool {
        self.0.len() < other.0.len() && self.0.is_subset(&other.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CiStatement> {
        self.0.iter()
    }

    pub fn difference<'a>(
        &'a self,
        other: &'a StatementSet,
    ) -> impl Iterator<Item = &'a CiStatement> {
        self.0.difference(&other.0)
    }

    /// Canonical JSON rendering, used as a stable tiebreak key.
    pub fn canonical_key(&self) -> String {
        serde_json::to_string(self).expect("statement sets always serialize")
    }
}

impl FromIterator<CiStatement> for StatementSet {
    fn from_iter<I: IntoIterator<Item = CiStatement>>(iter: I) -> Self {
        StatementSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a StatementSet {
    type Item = &'a CiStatement;
    type IntoIter = std::collections::btree_set::Iter<'a, CiStatement>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
