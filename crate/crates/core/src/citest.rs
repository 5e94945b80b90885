//! The L1 distance-from-independence test and the super-test built from it.
//!
//! For a statement `U ⟂ V | W` the statistic is
//! `Σ_{u,v,w} |P(u,v,w)·P(w) − P(u,w)·P(v,w)|`, evaluated on the empirical
//! table. The statement is accepted when the statistic is below
//! `c · n^(−1/4)` (`c = 1` by default).

use serde::{Deserialize, Serialize};

use crate::distributions::{tv_distance, JointTable};
use crate::graphs::{CiStatement, StatementSet};
use crate::sampling::{empirical, Sample};
use crate::{Error, Result};

/// Threshold configuration for the per-statement test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub threshold_constant: f64,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            threshold_constant: 1.0,
        }
    }
}

impl TestConfig {
    pub fn new(threshold_constant: f64) -> Result<Self> {
        if !(threshold_constant.is_finite() && threshold_constant > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "threshold constant must be positive, got {threshold_constant}"
            )));
        }
        Ok(TestConfig { threshold_constant })
    }

    pub fn threshold(&self, n: usize) -> f64 {
        self.threshold_constant * (n as f64).powf(-0.25)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CiVerdict {
    pub statement: CiStatement,
    pub statistic: f64,
    pub threshold: f64,
    pub accepted: bool,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuperTestOutput {
    /// Accepted statements.
    pub s: StatementSet,
    pub verdicts: Vec<CiVerdict>,
}

/// The L1 distance of `p` from satisfying `s`.
pub fn l1_stat(p: &JointTable, s: &CiStatement) -> f64 {
    p.factorization_residuals(s)
        .into_iter()
        .map(|(_, r)| r.abs())
        .sum()
}

fn verdict(table: &JointTable, n: usize, s: &CiStatement, cfg: &TestConfig) -> CiVerdict {
    let statistic = l1_stat(table, s);
    let threshold = cfg.threshold(n);
    CiVerdict {
        statement: *s,
        statistic,
        threshold,
        accepted: statistic < threshold,
        n,
    }
}

fn check_scope(sample: &Sample, s: &CiStatement) -> Result<()> {
    if s.min_vars() > sample.vars().len() {
        return Err(Error::DimensionMismatch(format!(
            "statement {s} needs {} variables, sample has {}",
            s.min_vars(),
            sample.vars().len()
        )));
    }
    Ok(())
}

pub fn ci_test(sample: &Sample, s: &CiStatement, cfg: &TestConfig) -> Result<CiVerdict> {
    check_scope(sample, s)?;
    let e = empirical(sample)?;
    Ok(verdict(e.table(), sample.len(), s, cfg))
}

/// Runs every statement's test against one shared empirical table.
pub fn super_test(
    sample: &Sample,
    universe: &[CiStatement],
    cfg: &TestConfig,
) -> Result<SuperTestOutput> {
    let e = empirical(sample)?;
    for s in universe {
        check_scope(sample, s)?;
    }
    let verdicts: Vec<CiVerdict> = universe
        .iter()
        .map(|s| verdict(e.table(), sample.len(), s, cfg))
        .collect();
    let s = verdicts
        .iter()
        .filter(|v| v.accepted)
        .map(|v| v.statement)
        .collect();
    Ok(SuperTestOutput { s, verdicts })
}

/// `(|L1(p) − L1(q)|, 8·TV(p, q))`; the first never exceeds the second.
pub fn lipschitz_gap(p: &JointTable, q: &JointTable, s: &CiStatement) -> (f64, f64) {
    let gap = (l1_stat(p, s) - l1_stat(q, s)).abs();
    (gap, 8.0 * tv_distance(p, q))
}

/// `1 − 2^cells · e^(−2nε²)` clamped to `[0, 1]`: a lower bound on
/// `P(TV(P̂_n, P) < ε)` for a distribution over `cells` outcomes.
pub fn hoeffding_envelope(n: usize, epsilon: f64, cells: usize) -> f64 {
    1.0 - union_tail(cells, 2.0 * n as f64 * epsilon * epsilon)
}

/// `2^cells · e^(−exponent)`, clamped to `[0, 1]`, computed in log space.
fn union_tail(cells: usize, exponent: f64) -> f64 {
    let log = cells as f64 * std::f64::consts::LN_2 - exponent;
    log.exp().clamp(0.0, 1.0)
}

/// Lower bound on accepting a true statement: `1 − 2^K e^(−√n/32)`.
pub fn null_acceptance_bound(n: usize, cells: usize) -> f64 {
    1.0 - union_tail(cells, (n as f64).sqrt() / 32.0)
}

/// Lower bound on rejecting a false statement with population statistic
/// `l1`, valid once `n^(−1/4) ≤ l1/4`: `1 − 2^K e^(−n·l1²/128)`.
pub fn rejection_bound(n: usize, l1: f64, cells: usize) -> f64 {
    1.0 - union_tail(cells, n as f64 * l1 * l1 / 128.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{ci_holds_with, VariableSet};

    fn st(u: &[usize], v: &[usize], w: &[usize]) -> CiStatement {
        CiStatement::of(u, v, w).unwrap()
    }

    #[test]
    fn product_distribution_has_zero_statistic() {
        let p = JointTable::from_cards(vec![2, 2], vec![0.06, 0.14, 0.24, 0.56]).unwrap();
        assert!(l1_stat(&p, &st(&[0], &[1], &[])) < 1e-15);
    }

    #[test]
    fn correlated_pair_statistic_is_one() {
        let p = JointTable::from_cards(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((l1_stat(&p, &st(&[0], &[1], &[])) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_statistic_iff_exact_ci() {
        let tables = [
            JointTable::from_cards(vec![2, 2], vec![0.25; 4]).unwrap(),
            JointTable::from_cards(vec![2, 2], vec![0.1, 0.2, 0.3, 0.4]).unwrap(),
        ];
        for t in &tables {
            let s = st(&[0], &[1], &[]);
            assert_eq!(l1_stat(t, &s) == 0.0, ci_holds_with(t, &s, 0.0));
        }
    }

    #[test]
    fn threshold_arithmetic() {
        assert_eq!(TestConfig::default().threshold(16), 0.5);
        assert!((TestConfig::default().threshold(10_000) - 0.1).abs() < 1e-15);
        assert!(TestConfig::new(0.0).is_err());
        let vars = VariableSet::binary(2);
        let s = Sample::from_rows(vars, &vec![vec![0, 1]; 16]).unwrap();
        let v = ci_test(&s, &st(&[0], &[1], &[]), &TestConfig::default()).unwrap();
        assert_eq!(v.threshold, 0.5);
        assert_eq!(v.n, 16);
        assert!(v.accepted);
    }

    #[test]
    fn super_test_edges() {
        let vars = VariableSet::binary(3);
        let s = Sample::from_rows(vars.clone(), &vec![vec![1, 0, 1]; 10]).unwrap();
        let all = crate::graphs::statement_universe(3);
        let out = super_test(&s, &all, &TestConfig::default()).unwrap();
        assert_eq!(out.s.len(), 9);
        assert!(out.verdicts.iter().all(|v| v.statistic == 0.0));
        let none = super_test(&s, &[], &TestConfig::default()).unwrap();
        assert!(none.s.is_empty());
        let empty = Sample::from_rows(vars, &[]).unwrap();
        assert!(matches!(
            super_test(&empty, &all, &TestConfig::default()),
            Err(Error::EmptySample)
        ));
    }

    #[test]
    fn statement_outside_sample_is_rejected() {
        let s = Sample::from_rows(VariableSet::binary(2), &[vec![0, 0]]).unwrap();
        assert!(ci_test(&s, &st(&[0], &[2], &[]), &TestConfig::default()).is_err());
    }

    #[test]
    fn envelope_arithmetic() {
        let b = hoeffding_envelope(1000, 0.1, 4);
        assert!((b - (1.0 - 16.0 * (-20.0f64).exp())).abs() < 1e-15);
        assert_eq!(hoeffding_envelope(10, 100.0, 4), 1.0);
        assert_eq!(hoeffding_envelope(1, 1e-6, 4), 0.0);
        // huge cell counts must not overflow
        assert_eq!(hoeffding_envelope(10, 0.1, 5000), 0.0);
    }

    #[test]
    fn lipschitz_identity() {
        let p = JointTable::from_cards(vec![2, 2], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(lipschitz_gap(&p, &p, &st(&[0], &[1], &[])), (0.0, 0.0));
    }
}
