//! d-separation by active-trail reachability.

use super::{CiStatement, Dag, VarSet};

/// Nodes reachable from `sources` along trails that are active given
/// `given`.
///
/// A trail passes a non-collider only if it is not in `given`, and passes a
/// collider only if the collider is an ancestor of (or in) `given`.
pub fn reachable(g: &Dag, sources: VarSet, given: VarSet) -> VarSet {
    // direction: true = arrived from a child (moving up), false = from a parent
    let anc = g.ancestors_of(given);
    let mut visited_up = VarSet::EMPTY;
    let mut visited_down = VarSet::EMPTY;
    let mut reached = VarSet::EMPTY;
    let mut stack: Vec<(usize, bool)> = sources.iter().map(|s| (s, true)).collect();

    while let Some((y, up)) = stack.pop() {
        let seen = if up {
            &mut visited_up
        } else {
            &mut visited_down
        };
        if seen.contains(y) {
            continue;
        }
        *seen = seen.with(y);

        let observed = given.contains(y);
        if !observed {
            reached = reached.with(y);
        }
        if up {
            if !observed {
                for p in g.parents(y).iter() {
                    stack.push((p, true));
                }
                for c in g.children(y).iter() {
                    stack.push((c, false));
                }
            }
        } else {
            if !observed {
                for c in g.children(y).iter() {
                    stack.push((c, false));
                }
            }
            if anc.contains(y) {
                for p in g.parents(y).iter() {
                    stack.push((p, true));
                }
            }
        }
    }
    reached
}

/// Whether `u` and `v` are d-separated given `w`, for arbitrary (possibly
/// non-canonical) disjoint sets.
pub fn d_separated_sets(g: &Dag, u: VarSet, v: VarSet, w: VarSet) -> bool {
    reachable(g, u, w).is_disjoint(v)
}

pub fn d_separated(g: &Dag, s: &CiStatement) -> bool {
    d_separated_sets(g, s.u(), s.v(), s.w())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(u: &[usize], v: &[usize], w: &[usize]) -> CiStatement {
        CiStatement::of(u, v, w).unwrap()
    }

    #[test]
    fn chain_blocks_on_middle() {
        let g = Dag::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(d_separated(&g, &st(&[0], &[2], &[1])));
        assert!(!d_separated(&g, &st(&[0], &[2], &[])));
    }

    #[test]
    fn collider_opens_on_conditioning() {
        let g = Dag::new(3, &[(0, 2), (1, 2)]).unwrap();
        assert!(d_separated(&g, &st(&[0], &[1], &[])));
        assert!(!d_separated(&g, &st(&[0], &[1], &[2])));
    }

    #[test]
    fn collider_descendant_opens() {
        // 0 -> 2 <- 1, 2 -> 3
        let g = Dag::new(4, &[(0, 2), (1, 2), (2, 3)]).unwrap();
        assert!(d_separated(&g, &st(&[0], &[1], &[])));
        assert!(!d_separated(&g, &st(&[0], &[1], &[3])));
    }

    #[test]
    fn set_statements() {
        let g = Dag::new(3, &[(0, 1)]).unwrap();
        assert!(d_separated(&g, &st(&[2], &[0, 1], &[])));
        assert!(!d_separated(&g, &st(&[0], &[1, 2], &[])));
    }
}
