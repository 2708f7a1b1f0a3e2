//! Sparse column reduction over GF(p).

use std::collections::HashMap;

use crate::chain::Chain;
use crate::field::PrimeField;

/// Incremental column echelon form keyed by the largest row index ("low")
/// of each reduced column.
#[derive(Debug, Clone)]
pub struct ColumnBasis {
    field: PrimeField,
    pivots: HashMap<usize, Chain>,
}

impl ColumnBasis {
    pub fn new(field: PrimeField) -> Self {
        ColumnBasis {
            field,
            pivots: HashMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `col` against the stored pivots. Returns the reduced column,
    /// zero iff `col` was in the span.
    pub fn reduce(&self, col: &Chain) -> Chain {
        let f = self.field;
        let mut col = col.clone();
        while let Some(&(low, c)) = col.terms().last() {
            match self.pivots.get(&low) {
                Some(p) => {
                    let pc = p.terms().last().unwrap().1;
                    let s = f.neg(f.mul(c, f.inv(pc).unwrap()));
                    col = col.add_scaled(p, s, f);
                }
                None => break,
            }
        }
        col
    }

    /// Adds `col` to the basis; returns its pivot row if it was independent.
    pub fn insert(&mut self, col: &Chain) -> Option<usize> {
        let r = self.reduce(col);
        let low = r.terms().last()?.0;
        self.pivots.insert(low, r);
        Some(low)
    }

    pub fn contains(&self, col: &Chain) -> bool {
        self.reduce(col).is_zero()
    }
}

/// Rank of the span of `columns`.
pub fn rank<'a>(field: PrimeField, columns: impl IntoIterator<Item = &'a Chain>) -> usize {
    let mut basis = ColumnBasis::new(field);
    for c in columns {
        basis.insert(c);
    }
    basis.rank()
}
