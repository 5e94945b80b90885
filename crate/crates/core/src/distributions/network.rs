use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::table::{default_names, JointTable, VariableSet, SUM_TOLERANCE};
use crate::graphs::Dag;
use crate::{Error, Result};

/// A Bayesian network: a DAG plus one conditional probability table per
/// variable.
///
/// `cpts[i][r][x]` is `P(X_i = x | parents = r)`, where `r` is the mixed-radix
/// index of the parent assignment over `parents(i)` in ascending order, last
/// parent fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct CptNetwork {
    dag: Dag,
    vars: VariableSet,
    cpts: Vec<Vec<Vec<f64>>>,
}

impl CptNetwork {
    pub fn new(dag: Dag, vars: VariableSet, cpts: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if dag.k() != vars.len() {
            return Err(Error::DimensionMismatch(format!(
                "graph over {} variables, {} cardinalities",
                dag.k(),
                vars.len()
            )));
        }
        if cpts.len() != vars.len() {
            return Err(Error::InvalidTable(format!(
                "{} CPTs for {} variables",
                cpts.len(),
                vars.len()
            )));
        }
        for (i, cpt) in cpts.iter().enumerate() {
            let rows = vars.cell_count_of(dag.parents(i));
            if cpt.len() != rows {
                return Err(Error::InvalidTable(format!(
                    "CPT {i} has {} rows, expected {rows}",
                    cpt.len()
                )));
            }
            for row in cpt {
                if row.len() != vars.cards()[i] {
                    return Err(Error::InvalidTable(format!(
                        "CPT {i} row has {} entries, expected {}",
                        row.len(),
                        vars.cards()[i]
                    )));
                }
                if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(Error::InvalidTable(format!("CPT {i} has an invalid entry")));
                }
                let total: f64 = row.iter().sum();
                if (total - 1.0).abs() > SUM_TOLERANCE {
                    return Err(Error::InvalidTable(format!("CPT {i} row sums to {total}")));
                }
            }
        }
        Ok(CptNetwork { dag, vars, cpts })
    }

    /// CPT rows drawn uniformly from the probability simplex.
    pub fn random<R: Rng + ?Sized>(dag: Dag, vars: VariableSet, rng: &mut R) -> Result<Self> {
        let cpts = (0..vars.len())
            .map(|i| {
                let rows = vars.cell_count_of(dag.parents(i));
                (0..rows)
                    .map(|_| super::random_simplex_point(vars.cards()[i], rng))
                    .collect()
            })
            .collect();
        Self::new(dag, vars, cpts)
    }

    /// Conditionals of `p` read off along `dag`'s parent sets.
    ///
    /// Rows for parent assignments of probability zero are uniform. When `dag`
    /// is Markov to `p`, `joint_of` of the result reproduces `p`.
    pub fn from_joint(dag: Dag, p: &JointTable) -> Result<Self> {
        if dag.k() != p.k() {
            return Err(Error::DimensionMismatch(format!(
                "graph over {} variables, table over {}",
                dag.k(),
                p.k()
            )));
        }
        let vars = p.vars().clone();
        let mut cpts = Vec::with_capacity(vars.len());
        for i in 0..vars.len() {
            let pa = dag.parents(i);
            let family = pa.with(i);
            let fam = p.marginal(family);
            let par = p.marginal(pa);
            let card = vars.cards()[i];
            let rows: Vec<Vec<f64>> = (0..par.len())
                .map(|r| {
                    if par[r] <= 0.0 {
                        return vec![1.0 / card as f64; card];
                    }
                    let mut row: Vec<f64> = (0..card)
                        .map(|x| fam[family_index(&vars, pa, i, r, x)] / par[r])
                        .collect();
                    let total: f64 = row.iter().sum();
                    row.iter_mut().for_each(|v| *v /= total);
                    row
                })
                .collect();
            cpts.push(rows);
        }
        Self::new(dag, vars, cpts)
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn vars(&self) -> &VariableSet {
        &self.vars
    }

    pub fn cpts(&self) -> &[Vec<Vec<f64>>] {
        &self.cpts
    }

    pub fn into_parts(self) -> (Dag, VariableSet, Vec<Vec<Vec<f64>>>) {
        (self.dag, self.vars, self.cpts)
    }

    /// Exact joint distribution by the chain-rule factorization along `dag`.
    pub fn joint_of(&self) -> JointTable {
        let n = self.vars.cell_count();
        let mut probs = Vec::with_capacity(n);
        for cell in 0..n {
            let a = self.vars.decode(cell);
            let p: f64 = (0..self.vars.len())
                .map(|i| {
                    let r = self.vars.project(&a, self.dag.parents(i));
                    self.cpts[i][r][a[i]]
                })
                .product();
            probs.push(p);
        }
        // renormalize away float drift so the sum-to-one invariant holds tightly
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        JointTable::from_parts_unchecked(self.vars.clone(), probs)
    }
}

/// Index into the family marginal over `pa ∪ {i}` for parent row `r` and
/// child value `x`.
fn family_index(
    vars: &VariableSet,
    pa: crate::graphs::VarSet,
    i: usize,
    r: usize,
    x: usize,
) -> usize {
    let mut a = vec![0usize; vars.len()];
    let members: Vec<usize> = pa.iter().collect();
    let mut rem = r;
    for &j in members.iter().rev() {
        a[j] = rem % vars.cards()[j];
        rem /= vars.cards()[j];
    }
    a[i] = x;
    vars.project(&a, pa.with(i))
}

pub fn joint_of(net: &CptNetwork) -> JointTable {
    net.joint_of()
}

#[derive(Serialize, Deserialize)]
struct NetworkJson {
    dag: Dag,
    cards: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
    cpts: Vec<Vec<Vec<f64>>>,
}

impl Serialize for CptNetwork {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        NetworkJson {
            dag: self.dag.clone(),
            cards: self.vars.cards().to_vec(),
            names: (!self.vars.has_default_names()).then(|| self.vars.names().to_vec()),
            cpts: self.cpts.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CptNetwork {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = NetworkJson::deserialize(deserializer)?;
        let names = raw.names.unwrap_or_else(|| default_names(raw.cards.len()));
        let vars = VariableSet::new(names, raw.cards).map_err(serde::de::Error::custom)?;
        CptNetwork::new(raw.dag, vars, raw.cpts).map_err(serde::de::Error::custom)
    }
}
