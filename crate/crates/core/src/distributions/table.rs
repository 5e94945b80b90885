use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::graphs::{CiStatement, VarSet, MAX_VARS};
use crate::{Error, Result};

/// Sum-to-one tolerance for tables and CPT rows.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Named categorical variables with their cardinalities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VariableSet {
    names: Vec<String>,
    cards: Vec<usize>,
}

impl VariableSet {
    pub fn new(names: Vec<String>, cards: Vec<usize>) -> Result<Self> {
        if cards.is_empty() {
            return Err(Error::InvalidTable("variable set must be nonempty".into()));
        }
        if cards.len() > MAX_VARS {
            return Err(Error::InvalidTable(format!("at most {MAX_VARS} variables")));
        }
        if names.len() != cards.len() {
            return Err(Error::InvalidTable(format!(
                "{} names for {} cardinalities",
                names.len(),
                cards.len()
            )));
        }
        if let Some(c) = cards.iter().find(|&&c| c < 2) {
            return Err(Error::InvalidTable(format!("cardinality {c} < 2")));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidTable(format!(
                    "duplicate variable name `{n}`"
                )));
            }
        }
        Ok(VariableSet { names, cards })
    }

    /// Variables named `X0, X1, ...`.
    pub fn with_cards(cards: Vec<usize>) -> Result<Self> {
        let names = default_names(cards.len());
        Self::new(names, cards)
    }

    pub fn binary(k: usize) -> Self {
        Self::with_cards(vec![2; k]).expect("binary variables are valid")
    }

    pub fn len(&self) -> usize {
        self.cards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cards.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn has_default_names(&self) -> bool {
        self.names == default_names(self.cards.len())
    }

    /// Number of joint cells, the product of cardinalities.
    pub fn cell_count(&self) -> usize {
        self.cards.iter().product()
    }

    /// Number of joint cells over the variables in `mask`.
    pub fn cell_count_of(&self, mask: VarSet) -> usize {
        mask.iter().map(|i| self.cards[i]).product()
    }

    /// Mixed-radix index of a full assignment (last variable fastest).
    pub fn encode(&self, assignment: &[usize]) -> usize {
        debug_assert_eq!(assignment.len(), self.cards.len());
        assignment
            .iter()
            .zip(&self.cards)
            .fold(0, |acc, (&x, &c)| acc * c + x)
    }

    pub fn decode(&self, mut cell: usize) -> Vec<usize> {
        let mut out = vec![0; self.cards.len()];
        for i in (0..self.cards.len()).rev() {
            out[i] = cell % self.cards[i];
            cell /= self.cards[i];
        }
        out
    }

    /// Index into the marginal table over `mask` for a full assignment.
    pub(crate) fn project(&self, assignment: &[usize], mask: VarSet) -> usize {
        mask.iter()
            .fold(0, |acc, i| acc * self.cards[i] + assignment[i])
    }
}

pub(crate) fn default_names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("X{i}")).collect()
}

/// An exact joint distribution over categorical variables.
///
/// Cells are in mixed-radix row-major order with the last variable varying
/// fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTable {
    vars: VariableSet,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn new(vars: VariableSet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != vars.cell_count() {
            return Err(Error::InvalidTable(format!(
                "expected {} cells, got {}",
                vars.cell_count(),
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidTable(format!("invalid cell probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidTable(format!("cells sum to {total}, not 1")));
        }
        Ok(JointTable { vars, probs })
    }

    pub fn from_cards(cards: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        Self::new(VariableSet::with_cards(cards)?, probs)
    }

    pub fn uniform(vars: VariableSet) -> Self {
        let n = vars.cell_count();
        JointTable {
            vars,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(vars: VariableSet, cell: usize) -> Result<Self> {
        let n = vars.cell_count();
        if cell >= n {
            return Err(Error::InvalidTable(format!("cell {cell} out of range")));
        }
        let mut probs = vec![0.0; n];
        probs[cell] = 1.0;
        Ok(JointTable { vars, probs })
    }

    pub(crate) fn from_parts_unchecked(vars: VariableSet, probs: Vec<f64>) -> Self {
        JointTable { vars, probs }
    }

    pub fn vars(&self) -> &VariableSet {
        &self.vars
    }

    pub fn k(&self) -> usize {
        self.vars.len()
    }

    pub fn cards(&self) -> &[usize] {
        self.vars.cards()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, assignment: &[usize]) -> f64 {
        self.probs[self.vars.encode(assignment)]
    }

    pub fn same_shape(&self, other: &JointTable) -> bool {
        self.cards() == other.cards()
    }

    /// Marginal table over `mask`, indexed in mixed radix over the members of
    /// `mask` in ascending order.
    pub fn marginal(&self, mask: VarSet) -> Vec<f64> {
        let mut out = vec![0.0; self.vars.cell_count_of(mask)];
        for (cell, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let a = self.vars.decode(cell);
            out[self.vars.project(&a, mask)] += p;
        }
        out
    }

    /// For each value combination `(u, v, w)` of the statement's scope, the
    /// pair `(P(w), P(u,v,w)·P(w) − P(u,w)·P(v,w))`.
    pub fn factorization_residuals(&self, s: &CiStatement) -> Vec<(f64, f64)> {
        assert!(
            s.min_vars() <= self.k(),
            "statement {s:?} is not over a {}-variable table",
            self.k()
        );
        let scope = s.scope();
        let uw = s.u().union(s.w());
        let vw = s.v().union(s.w());
        let p_all = self.marginal(scope);
        let p_uw = self.marginal(uw);
        let p_vw = self.marginal(vw);
        let p_w = self.marginal(s.w());

        let scope_vars: Vec<usize> = scope.to_vec();
        let scope_cards: Vec<usize> = scope_vars.iter().map(|&i| self.cards()[i]).collect();
        let mut full = vec![0usize; self.k()];
        let mut out = Vec::with_capacity(p_all.len());
        for (idx, &puvw) in p_all.iter().enumerate() {
            let mut rem = idx;
            for j in (0..scope_vars.len()).rev() {
                full[scope_vars[j]] = rem % scope_cards[j];
                rem /= scope_cards[j];
            }
            let pw = p_w[self.vars.project(&full, s.w())];
            let puw = p_uw[self.vars.project(&full, uw)];
            let pvw = p_vw[self.vars.project(&full, vw)];
            out.push((pw, puvw * pw - puw * pvw));
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
    cards: Vec<usize>,
    probs: Vec<f64>,
}

impl Serialize for JointTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TableJson {
            names: (!self.vars.has_default_names()).then(|| self.vars.names().to_vec()),
            cards: self.vars.cards().to_vec(),
            probs: self.probs.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for JointTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = TableJson::deserialize(deserializer)?;
        let names = raw.names.unwrap_or_else(|| default_names(raw.cards.len()));
        let vars = VariableSet::new(names, raw.cards).map_err(serde::de::Error::custom)?;
        JointTable::new(vars, raw.probs).map_err(serde::de::Error::custom)
    }
}
