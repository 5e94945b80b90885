//! Independent reference implementations used by several test targets.
#![allow(dead_code)]

use std::collections::BTreeSet;

pub type Edges = Vec<(usize, usize)>;

/// Boolean matrix product over `k × k` adjacency matrices.
fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let k = a.len();
    (0..k)
        .map(|i| (0..k).map(|j| (0..k).any(|m| a[i][m] && b[m][j])).collect())
        .collect()
}

/// All DAGs on `k` labelled nodes: every off-diagonal adjacency matrix whose
/// `k`-th power vanishes (nilpotent ⇔ acyclic).
pub fn brute_force_dags(k: usize) -> Vec<Edges> {
    let slots: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << slots.len()) {
        let mut a = vec![vec![false; k]; k];
        let mut edges = Vec::new();
        for (bit, &(i, j)) in slots.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                a[i][j] = true;
                edges.push((i, j));
            }
        }
        let mut power = a.clone();
        for _ in 1..k {
            power = bool_mul(&power, &a);
        }
        if k == 0 || power.iter().all(|row| row.iter().all(|&x| !x)) {
            edges.sort();
            out.push(edges);
        }
    }
    out
}

pub type EquivalenceKey = (BTreeSet<(usize, usize)>, BTreeSet<(usize, usize, usize)>);

/// Skeleton plus unshielded colliders; equal keys ⇔ Markov equivalent.
pub fn verma_pearl_key(k: usize, edges: &[(usize, usize)]) -> EquivalenceKey {
    let adj = |a: usize, b: usize| edges.contains(&(a, b)) || edges.contains(&(b, a));
    let skeleton = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let mut colliders = BTreeSet::new();
    for c in 0..k {
        for a in 0..k {
            for b in a + 1..k {
                if edges.contains(&(a, c)) && edges.contains(&(b, c)) && !adj(a, b) {
                    colliders.insert((a, c, b));
                }
            }
        }
    }
    (skeleton, colliders)
}

/// Number of Markov-equivalence classes by the skeleton/v-structure
/// criterion.
pub fn verma_pearl_class_count(k: usize) -> usize {
    brute_force_dags(k)
        .iter()
        .map(|e| verma_pearl_key(k, e))
        .collect::<BTreeSet<_>>()
        .len()
}

/// `U ⟂ V | W` by the moralization criterion: restrict to the ancestors of
/// `U ∪ V ∪ W`, marry co-parents, drop directions, delete `W`, and test
/// whether `U` can reach `V`.
pub fn moral_separated(
    k: usize,
    edges: &[(usize, usize)],
    u: &[usize],
    v: &[usize],
    w: &[usize],
) -> bool {
    let mut anc: BTreeSet<usize> = u.iter().chain(v).chain(w).copied().collect();
    loop {
        let before = anc.len();
        for &(a, b) in edges {
            if anc.contains(&b) {
                anc.insert(a);
            }
        }
        if anc.len() == before {
            break;
        }
    }
    let mut adj = vec![vec![false; k]; k];
    for &(a, b) in edges {
        if anc.contains(&a) && anc.contains(&b) {
            adj[a][b] = true;
            adj[b][a] = true;
        }
    }
    for c in &anc {
        let pa: Vec<usize> = edges.iter().filter(|e| e.1 == *c).map(|e| e.0).collect();
        for &x in &pa {
            for &y in &pa {
                if x != y {
                    adj[x][y] = true;
                }
            }
        }
    }
    let mut seen: BTreeSet<usize> = u.iter().copied().collect();
    let mut stack: Vec<usize> = u.to_vec();
    while let Some(x) = stack.pop() {
        for (y, &linked) in adj[x].iter().enumerate() {
            if linked && anc.contains(&y) && !w.contains(&y) && seen.insert(y) {
                stack.push(y);
            }
        }
    }
    v.iter().all(|y| !seen.contains(y))
}
