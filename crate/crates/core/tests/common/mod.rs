#![allow(dead_code)]

use std::sync::Arc;

use conley_core::conley::{self, ConleyResult};
use conley_core::{GradedComplex, PrimeField, Poset};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn gf(p: u32) -> PrimeField {
    PrimeField::new(p).unwrap()
}

/// The graded complex after every stage of the tower, starting with the
/// input. Each target cell keeps the grade of the source cell it came from.
pub fn stages(input: &GradedComplex, r: &ConleyResult) -> Vec<GradedComplex> {
    let mut out = vec![input.clone()];
    for red in &r.tower {
        let prev = out.last().unwrap();
        let critical = red.critical_cells().expect("tower stages are Morse reductions");
        let grades = critical.iter().map(|&i| prev.grades()[i]).collect();
        out.push(GradedComplex::new(red.target().clone(), prev.poset().clone(), grades).unwrap());
    }
    out
}

/// A uniformly chosen topological order of the poset elements.
pub fn random_extension(rng: &mut impl Rng, poset: &Poset) -> Vec<usize> {
    let n = poset.len();
    let mut placed = vec![false; n];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let ready: Vec<usize> = (0..n)
            .filter(|&x| !placed[x] && (0..n).all(|y| y == x || !poset.leq(y, x) || placed[y]))
            .collect();
        let &x = ready.choose(rng).unwrap();
        placed[x] = true;
        out.push(x);
    }
    out
}

pub fn fiber_labels(g: &GradedComplex) -> Vec<(String, String)> {
    let fg = g.fiber_graph();
    fg.labels
        .iter()
        .zip(&fg.polynomials)
        .map(|(l, p)| (l.clone(), p.fiber_label()))
        .collect()
}

pub fn connect(g: &GradedComplex, strategy: conley::Strategy) -> ConleyResult {
    conley::connection_matrix(g, conley::ConleyOptions::with_strategy(strategy)).unwrap()
}

pub fn arc<T>(t: T) -> Arc<T> {
    Arc::new(t)
}
