//! Seeded IID sampling from joint tables and empirical distributions.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distributions::{JointTable, VariableSet};
use crate::{Error, Result};

/// IID observations, stored as mixed-radix cell indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    vars: VariableSet,
    cells: Vec<usize>,
}

impl Sample {
    pub fn from_rows(vars: VariableSet, rows: &[Vec<usize>]) -> Result<Self> {
        let mut cells = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            if row.len() != vars.len() {
                return Err(Error::InvalidArgument(format!(
                    "row {r} has {} values, expected {}",
                    row.len(),
                    vars.len()
                )));
            }
            if let Some((i, &x)) = row.iter().enumerate().find(|(i, &x)| x >= vars.cards()[*i]) {
                return Err(Error::InvalidArgument(format!(
                    "row {r}: value {x} out of range for variable {i}"
                )));
            }
            cells.push(vars.encode(row));
        }
        Ok(Sample { vars, cells })
    }

    pub fn vars(&self) -> &VariableSet {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn row(&self, i: usize) -> Vec<usize> {
        self.vars.decode(self.cells[i])
    }

    pub fn rows(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.cells.iter().map(|&c| self.vars.decode(c))
    }

    /// Writes a header of variable names and one row per observation.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.vars.names())?;
        for row in self.rows() {
            w.write_record(row.iter().map(|x| x.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV layout written by [`Sample::write_csv`].
    ///
    /// Cardinalities default to `max(2, largest observed value + 1)` per
    /// column unless given.
    pub fn read_csv<R: Read>(input: R, cards: Option<Vec<usize>>) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input);
        let names: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|v| {
                    v.parse::<usize>().map_err(|_| {
                        Error::InvalidArgument(format!("data row {}: bad value `{v}`", line + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let cards = match cards {
            Some(c) => c,
            None => (0..names.len())
                .map(|i| {
                    rows.iter()
                        .filter_map(|row: &Vec<usize>| row.get(i).copied())
                        .max()
                        .map_or(2, |m| (m + 1).max(2))
                })
                .collect(),
        };
        let vars = VariableSet::new(names, cards)?;
        Sample::from_rows(vars, &rows)
    }
}

/// `n` IID draws from `p` by inverse CDF over the cells.
pub fn draw(p: &JointTable, n: usize, seed: u64) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw_with(p, n, &mut rng)
}

pub fn draw_with<R: Rng + ?Sized>(p: &JointTable, n: usize, rng: &mut R) -> Sample {
    let mut cdf = Vec::with_capacity(p.probs().len());
    let mut acc = 0.0;
    for &q in p.probs() {
        acc += q;
        cdf.push(acc);
    }
    // the last cell with positive mass absorbs rounding at the top of the CDF
    let last = p.probs().iter().rposition(|&q| q > 0.0).unwrap_or(0);
    let cells = (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            cdf.partition_point(|&c| c <= u).min(last)
        })
        .collect();
    Sample {
        vars: p.vars().clone(),
        cells,
    }
}

/// Cell frequencies of a sample, together with the raw counts.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalTable {
    table: JointTable,
    counts: Vec<u64>,
}

impl EmpiricalTable {
    pub fn table(&self) -> &JointTable {
        &self.table
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn into_table(self) -> JointTable {
        self.table
    }
}

pub fn empirical(s: &Sample) -> Result<EmpiricalTable> {
    if s.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut counts = vec![0u64; s.vars.cell_count()];
    for &c in &s.cells {
        counts[c] += 1;
    }
    let n = s.len() as f64;
    let probs = counts.iter().map(|&c| c as f64 / n).collect();
    let table = JointTable::new(s.vars.clone(), probs)?;
    Ok(EmpiricalTable { table, counts })
}

/// Mixes a base seed with stream coordinates into an independent 64-bit seed
/// (SplitMix64 finalizer chained over the parts).
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    parts.iter().fold(mix(base), |acc, &p| mix(acc ^ mix(p)))
}
