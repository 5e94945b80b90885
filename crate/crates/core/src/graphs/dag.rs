use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{size_cap, VarSet, MAX_VARS};
use crate::{Error, Result};

/// A directed acyclic graph over variables `0..k`.
///
/// Parent sets are stored per node. Construction validates index bounds,
/// self-loops and acyclicity, so every `Dag` value has a topological order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    k: usize,
    parents: Vec<VarSet>,
}

impl Dag {
    pub fn new(k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if k == 0 || k > MAX_VARS {
            return Err(Error::InvalidGraph(format!(
                "variable count must be in 1..={MAX_VARS}, got {k}"
            )));
        }
        let mut parents = vec![VarSet::EMPTY; k];
        for &(from, to) in edges {
            if from >= k || to >= k {
                return Err(Error::InvalidGraph(format!(
                    "edge {from}->{to} out of range for k={k}"
                )));
            }
            if from == to {
                return Err(Error::InvalidGraph(format!("self-loop at {from}")));
            }
            parents[to] = parents[to].with(from);
        }
        let dag = Dag { k, parents };
        if dag.topological_order().is_none() {
            return Err(Error::InvalidGraph("edge relation has a cycle".into()));
        }
        Ok(dag)
    }

    pub fn empty(k: usize) -> Self {
        Dag::new(k, &[]).expect("empty graph is acyclic")
    }

    /// The complete DAG consistent with the order `0, 1, ..., k-1`.
    pub fn complete(k: usize) -> Self {
        let edges: Vec<_> = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .collect();
        Dag::new(k, &edges).expect("forward edges are acyclic")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn parents(&self, i: usize) -> VarSet {
        self.parents[i]
    }

    pub fn children(&self, i: usize) -> VarSet {
        (0..self.k)
            .filter(|&j| self.parents[j].contains(i))
            .collect()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        to < self.k && self.parents[to].contains(from)
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(|p| p.len()).sum()
    }

    /// Edges as `(parent, child)` pairs, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = (0..self.k)
            .flat_map(|c| self.parents[c].iter().map(move |p| (p, c)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Reflexive-transitive closure of the child relation from `i`.
    pub fn descendants(&self, i: usize) -> VarSet {
        let mut seen = VarSet::singleton(i);
        let mut stack = vec![i];
        while let Some(x) = stack.pop() {
            for c in self.children(x).iter() {
                if !seen.contains(c) {
                    seen = seen.with(c);
                    stack.push(c);
                }
            }
        }
        seen
    }

    /// Every node with a directed path into `set`, including `set` itself.
    pub fn ancestors_of(&self, set: VarSet) -> VarSet {
        let mut seen = set;
        let mut stack: Vec<usize> = set.iter().collect();
        while let Some(x) = stack.pop() {
            for p in self.parents[x].iter() {
                if !seen.contains(p) {
                    seen = seen.with(p);
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Kahn's algorithm; `None` if the edge relation has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indegree: Vec<usize> = self.parents.iter().map(|p| p.len()).collect();
        let mut ready: Vec<usize> = (0..self.k).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.k);
        while let Some(x) = ready.pop() {
            order.push(x);
            for c in self.children(x).iter() {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(c);
                }
            }
        }
        (order.len() == self.k).then_some(order)
    }

    /// The same graph with every edge reversed.
    pub fn reversed(&self) -> Dag {
        let edges: Vec<_> = self.edges().into_iter().map(|(a, b)| (b, a)).collect();
        Dag::new(self.k, &edges).expect("reversing a DAG keeps it acyclic")
    }

    fn enumeration_key(&self) -> (usize, Vec<(usize, usize)>) {
        (self.edge_count(), self.edges())
    }
}

impl Ord for Dag {
    /// Variable count, then edge count, then lexicographic edge list.
    fn cmp(&self, other: &Self) -> Ordering {
        self.k
            .cmp(&other.k)
            .then_with(|| self.enumeration_key().cmp(&other.enumeration_key()))
    }
}

impl PartialOrd for Dag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dag(k={}, ", self.k)?;
        let parts: Vec<String> = self
            .edges()
            .iter()
            .map(|(a, b)| format!("{a}->{b}"))
            .collect();
        write!(f, "[{}])", parts.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct DagJson {
    k: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for Dag {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DagJson {
            k: self.k,
            edges: self.edges().into_iter().map(|(a, b)| [a, b]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Dag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = DagJson::deserialize(deserializer)?;
        let edges: Vec<_> = raw.edges.iter().map(|e| (e[0], e[1])).collect();
        Dag::new(raw.k, &edges).map_err(serde::de::Error::custom)
    }
}

pub fn check_cap(k: usize) -> Result<()> {
    let cap = size_cap();
    if k > cap {
        return Err(Error::CapExceeded { k, cap });
    }
    Ok(())
}

/// Every labeled DAG on `k` nodes exactly once, ordered by edge count and then
/// lexicographic edge list.
///
/// Each unordered pair `{i, j}` is absent, `i→j` or `j→i`; the `3^(k(k-1)/2)`
/// configurations are filtered by topological sort.
pub fn enumerate_dags(k: usize) -> Result<Vec<Dag>> {
    if k == 0 {
        return Err(Error::InvalidGraph(
            "variable count must be at least 1".into(),
        ));
    }
    check_cap(k)?;
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    let mut edges = Vec::with_capacity(pairs.len());
    for code in 0..total {
        edges.clear();
        let mut c = code;
        for &(i, j) in &pairs {
            match c % 3 {
                1 => edges.push((i, j)),
                2 => edges.push((j, i)),
                _ => {}
            }
            c /= 3;
        }
        if let Ok(g) = Dag::new(k, &edges) {
            out.push(g);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Dag {
        Dag::new(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn collider() -> Dag {
        Dag::new(3, &[(0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn parents_examples() {
        assert_eq!(chain().parents(1).to_vec(), vec![0]);
        assert!(Dag::empty(3).parents(0).is_empty());
        assert_eq!(collider().parents(2).to_vec(), vec![0, 1]);
    }

    #[test]
    fn descendants_are_reflexive() {
        assert_eq!(chain().descendants(0).to_vec(), vec![0, 1, 2]);
        assert_eq!(chain().descendants(2).to_vec(), vec![2]);
        assert_eq!(collider().descendants(1).to_vec(), vec![1, 2]);
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(Dag::new(2, &[(0, 0)]).is_err());
        assert!(Dag::new(2, &[(0, 1), (1, 0)]).is_err());
        assert!(Dag::new(3, &[(0, 1), (1, 2), (2, 0)]).is_err());
        assert!(Dag::new(2, &[(0, 2)]).is_err());
        assert!(Dag::new(0, &[]).is_err());
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_dags(1).unwrap().len(), 1);
        assert_eq!(enumerate_dags(2).unwrap().len(), 3);
        assert_eq!(enumerate_dags(3).unwrap().len(), 25);
    }

    #[test]
    fn enumeration_order_is_by_edge_count() {
        let dags = enumerate_dags(3).unwrap();
        assert_eq!(dags[0], Dag::empty(3));
        assert!(dags
            .windows(2)
            .all(|w| w[0].edge_count() <= w[1].edge_count()));
        assert!(dags.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn json_is_sorted_edges() {
        let g = Dag::new(3, &[(1, 2), (0, 2)]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"k":3,"edges":[[0,2],[1,2]]}"#);
        let back: Dag = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<Dag>(r#"{"k":2,"edges":[[0,1],[1,0]]}"#).is_err());
    }

    #[test]
    fn reversal() {
        let r = chain().reversed();
        assert_eq!(r.edges(), vec![(1, 0), (2, 1)]);
    }
}
