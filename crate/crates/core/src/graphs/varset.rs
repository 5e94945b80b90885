use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest variable index representable in a [`VarSet`].
pub const MAX_VARS: usize = 32;

/// A set of variable indices, stored as a bitmask.
///
/// Ordering is lexicographic on the ascending member lists, so `{0,2} < {1}`
/// and `{0} < {0,1}`. Serializes as a sorted JSON list of indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct VarSet(u32);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn from_bits(bits: u32) -> Self {
        VarSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_VARS, "variable index {i} out of range");
        VarSet(1 << i)
    }

    /// All indices `0..k`.
    pub fn full(k: usize) -> Self {
        assert!(k <= MAX_VARS);
        if k == MAX_VARS {
            VarSet(u32::MAX)
        } else {
            VarSet((1u32 << k) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(VarSet::EMPTY, |s, i| s.with(i))
    }

    pub fn with(self, i: usize) -> Self {
        VarSet(self.0 | VarSet::singleton(i).0)
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_VARS && self.0 & (1 << i) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VarSet) -> VarSet {
        VarSet(self.0 & other.0)
    }

    pub fn difference(self, other: VarSet) -> VarSet {
        VarSet(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: VarSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Largest member plus one, or 0 for the empty set.
    pub fn bound(self) -> usize {
        MAX_VARS - self.0.leading_zeros() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_VARS).filter(move |i| bits & (1 << i) != 0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl Ord for VarSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for VarSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromIterator<usize> for VarSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VarSet::from_indices(iter)
    }
}

impl Serialize for VarSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for VarSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let items = Vec::<usize>::deserialize(deserializer)?;
        if let Some(bad) = items.iter().find(|&&i| i >= MAX_VARS) {
            return Err(serde::de::Error::custom(format!(
                "variable index {bad} out of range"
            )));
        }
        Ok(VarSet::from_indices(items))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order() {
        let a = VarSet::from_indices([0, 2]);
        let b = VarSet::from_indices([1]);
        let c = VarSet::from_indices([0]);
        assert!(a < b);
        assert!(c < a);
        assert!(VarSet::EMPTY < c);
    }

    #[test]
    fn set_algebra() {
        let a = VarSet::from_indices([0, 1]);
        let b = VarSet::from_indices([1, 2]);
        assert_eq!(a.union(b).to_vec(), vec![0, 1, 2]);
        assert_eq!(a.intersection(b).to_vec(), vec![1]);
        assert_eq!(a.difference(b).to_vec(), vec![0]);
        assert!(!a.is_disjoint(b));
        assert!(VarSet::singleton(1).is_subset(a));
        assert_eq!(b.bound(), 3);
        assert_eq!(VarSet::full(3).len(), 3);
    }

    #[test]
    fn json_round_trip() {
        let a = VarSet::from_indices([3, 0]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[0,3]");
        let back: VarSet = serde_json::from_str(&s).unwrap();
        assert_eq!(a, back);
        assert!(serde_json::from_str::<VarSet>("[40]").is_err());
    }
}
