use std::collections::HashMap;

use crate::field::PrimeField;

/// A sparse chain: cell indices with nonzero coefficients, sorted by index.
///
/// Indices refer to the cells of one particular complex; the chain itself
/// does not remember which.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Chain {
    terms: Vec<(usize, u32)>,
}

impl Chain {
    pub fn zero() -> Self {
        Chain { terms: Vec::new() }
    }

    pub fn basis(cell: usize) -> Self {
        Chain {
            terms: vec![(cell, 1)],
        }
    }

    /// Collects terms, combining repeated indices and dropping zeros.
    pub fn from_terms(field: PrimeField, terms: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut terms: Vec<(usize, u32)> = terms.into_iter().collect();
        terms.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(usize, u32)> = Vec::with_capacity(terms.len());
        for (i, c) in terms {
            let c = c % field.modulus();
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 = field.add(last.1, c),
                _ => out.push((i, c)),
            }
        }
        out.retain(|t| t.1 != 0);
        Chain { terms: out }
    }

    pub fn terms(&self) -> &[(usize, u32)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(usize, u32)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, cell: usize) -> u32 {
        match self.terms.binary_search_by_key(&cell, |t| t.0) {
            Ok(k) => self.terms[k].1,
            Err(_) => 0,
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().map(|t| t.0)
    }

    /// `self + scalar * other`.
    pub fn add_scaled(&self, other: &Chain, scalar: u32, field: PrimeField) -> Chain {
        if scalar.is_multiple_of(field.modulus()) || other.is_zero() {
            return self.clone();
        }
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, field.mul(b[j].1, scalar)));
                j += 1;
            } else {
                let c = field.add(a[i].1, field.mul(b[j].1, scalar));
                if c != 0 {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Chain { terms: out }
    }

    pub fn add(&self, other: &Chain, field: PrimeField) -> Chain {
        self.add_scaled(other, 1, field)
    }

    pub fn sub(&self, other: &Chain, field: PrimeField) -> Chain {
        self.add_scaled(other, field.neg(1), field)
    }

    pub fn scale(&self, scalar: u32, field: PrimeField) -> Chain {
        let s = scalar % field.modulus();
        if s == 0 {
            return Chain::zero();
        }
        Chain {
            terms: self.terms.iter().map(|&(i, c)| (i, field.mul(c, s))).collect(),
        }
    }

    /// Keeps the terms whose index satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(usize) -> bool) -> Chain {
        Chain {
            terms: self.terms.iter().copied().filter(|t| keep(t.0)).collect(),
        }
    }

    /// Re-indexes every term; terms mapped to `None` are dropped.
    pub fn reindex(&self, mut map: impl FnMut(usize) -> Option<usize>) -> Chain {
        let mut terms: Vec<(usize, u32)> =
            self.terms.iter().filter_map(|&(i, c)| map(i).map(|j| (j, c))).collect();
        terms.sort_unstable_by_key(|t| t.0);
        Chain { terms }
    }
}

/// Mutable accumulator for chains built from many small updates.
#[derive(Debug, Clone)]
pub struct ChainAccumulator {
    field: PrimeField,
    coeffs: HashMap<usize, u32>,
}

impl ChainAccumulator {
    pub fn new(field: PrimeField) -> Self {
        ChainAccumulator {
            field,
            coeffs: HashMap::new(),
        }
    }

    pub fn from_chain(field: PrimeField, chain: &Chain) -> Self {
        let mut acc = ChainAccumulator::new(field);
        for &(i, c) in chain.terms() {
            acc.coeffs.insert(i, c);
        }
        acc
    }

    /// Adds `c` at `cell` and returns the new coefficient.
    #[inline]
    pub fn add_term(&mut self, cell: usize, c: u32) -> u32 {
        let f = self.field;
        let entry = self.coeffs.entry(cell).or_insert(0);
        *entry = f.add(*entry, c);
        let v = *entry;
        if v == 0 {
            self.coeffs.remove(&cell);
        }
        v
    }

    pub fn coefficient(&self, cell: usize) -> u32 {
        self.coeffs.get(&cell).copied().unwrap_or(0)
    }

    pub fn add_chain(&mut self, chain: &Chain, scalar: u32) {
        let f = self.field;
        for &(i, c) in chain.terms() {
            self.add_term(i, f.mul(c, scalar));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn into_chain(self) -> Chain {
        let mut terms: Vec<(usize, u32)> = self.coeffs.into_iter().collect();
        terms.sort_unstable_by_key(|t| t.0);
        Chain { terms }
    }
}
