//! Persistent homology of lattice-filtered complexes: persistent Betti
//! numbers for arbitrary pairs of down-sets, diagrams for linear
//! extensions, and the comparison between a complex and its Conley complex.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::chain::Chain;
use crate::conley::{self, ConleyError, ConleyOptions};
use crate::graded::GradedComplex;
use crate::linalg;
use crate::order::{DownSet, OrderError, DEFAULT_LATTICE_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PersistenceError {
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error("first down-set is not contained in the second")]
    NotNested,
    #[error(transparent)]
    Conley(#[from] ConleyError),
}

/// `β_j^{a,b}`: rank of `H_j(ν⁻¹(a)) → H_j(ν⁻¹(b))` for down-sets `a ⊆ b`.
///
/// Evaluated as `dim Z_j(a) − dim(B_j(b) ∩ C_j(a))`, where the intersection
/// has dimension `rank ∂_{j+1}|b − rank π_{b∖a} ∂_{j+1}|b`.
pub fn persistent_betti(g: &GradedComplex, a: &DownSet, b: &DownSet, j: u32) -> Result<usize, PersistenceError> {
    if !g.poset().is_down_set(a.members()) || !g.poset().is_down_set(b.members()) {
        return Err(OrderError::NotDownSet.into());
    }
    if !a.is_subset(b) {
        return Err(PersistenceError::NotNested);
    }
    let x = g.complex();
    let f = x.field();
    let in_a = |i: usize| a.contains(g.grade(i));
    let in_b = |i: usize| b.contains(g.grade(i));
    let n_j = (0..x.len()).filter(|&i| x.dim(i) == j && in_a(i)).count();
    let d_j: Vec<Chain> = (0..x.len())
        .filter(|&i| x.dim(i) == j && in_a(i))
        .map(|i| x.boundary_chain(i))
        .collect();
    let z = n_j - linalg::rank(f, &d_j);
    let d_next: Vec<Chain> = (0..x.len())
        .filter(|&i| x.dim(i) == j + 1 && in_b(i))
        .map(|i| x.boundary_chain(i))
        .collect();
    let outside: Vec<Chain> = d_next.iter().map(|c| c.filter(|i| !in_a(i))).collect();
    let boundaries_in_a = linalg::rank(f, &d_next) - linalg::rank(f, &outside);
    Ok(z - boundaries_in_a)
}

/// Death index of an essential class.
pub const INFINITY: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub dim: u32,
    pub birth: usize,
    /// [`INFINITY`] for essential classes.
    pub death: usize,
}

/// Half-open intervals `[birth, death)` over the steps of a filtration.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PersistenceDiagram {
    pub intervals: Vec<Interval>,
    /// The down-set reached at each step, as element labels.
    pub steps: Vec<Vec<String>>,
}

impl PersistenceDiagram {
    /// `#{intervals of dim j with birth ≤ a and death > b}`.
    pub fn betti(&self, j: u32, a: usize, b: usize) -> usize {
        self.intervals
            .iter()
            .filter(|iv| iv.dim == j && iv.birth <= a && iv.death > b)
            .count()
    }

    /// CSV `dim,birth,death`, with `inf` for essential classes.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("dim,birth,death\n");
        for iv in &self.intervals {
            s.push_str(&iv.to_string());
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.death == INFINITY {
            write!(f, "{},{},inf", self.dim, self.birth)
        } else {
            write!(f, "{},{},{}", self.dim, self.birth, self.death)
        }
    }
}

/// The standard persistence pairing of the filtration by the down-sets
/// `↓{e_1} ⊆ ↓{e_1, e_2} ⊆ …` of a linear extension `e`. Cells enter in
/// order (step, dim, input order); zero-length intervals are dropped.
pub fn diagram_total_order(g: &GradedComplex, extension: &[usize]) -> Result<PersistenceDiagram, PersistenceError> {
    let poset = g.poset();
    poset.check_linear_extension(extension)?;
    let mut step = vec![0usize; poset.len()];
    for (k, &e) in extension.iter().enumerate() {
        step[e] = k;
    }
    let x = g.complex();
    let f = x.field();
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by_key(|&i| (step[g.grade(i)], x.dim(i), i));
    let mut pos = vec![0usize; x.len()];
    for (k, &i) in order.iter().enumerate() {
        pos[i] = k;
    }
    let cell_step = |k: usize| step[g.grade(order[k])];
    // columns indexed by filtration position; `pivot_of[low]` is the column
    // whose reduced form ends at `low`
    let mut reduced: Vec<Chain> = Vec::with_capacity(x.len());
    let mut pivot_of = vec![usize::MAX; x.len()];
    let mut killed = vec![false; x.len()];
    let mut intervals = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        let mut col = x.boundary_chain(i).reindex(|j| Some(pos[j]));
        while let Some(&(low, c)) = col.terms().last() {
            let p = pivot_of[low];
            if p == usize::MAX {
                break;
            }
            let pc = reduced[p].terms().last().unwrap().1;
            let s = f.neg(f.mul(c, f.inv(pc).unwrap()));
            col = col.add_scaled(&reduced[p], s, f);
        }
        if let Some(&(low, _)) = col.terms().last() {
            pivot_of[low] = k;
            killed[low] = true;
            let (birth, death) = (cell_step(low), cell_step(k));
            if birth < death {
                intervals.push(Interval {
                    dim: x.dim(order[low]),
                    birth,
                    death,
                });
            }
        }
        reduced.push(col);
    }
    for k in 0..order.len() {
        if reduced[k].is_zero() && !killed[k] {
            intervals.push(Interval {
                dim: x.dim(order[k]),
                birth: cell_step(k),
                death: INFINITY,
            });
        }
    }
    intervals.sort();
    let mut acc = Vec::new();
    let steps = extension
        .iter()
        .map(|&e| {
            acc.push(poset.label(e).to_string());
            acc.clone()
        })
        .collect();
    Ok(PersistenceDiagram { intervals, steps })
}

/// One persistent Betti number that differs between a complex and its
/// Conley complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub a: DownSet,
    pub b: DownSet,
    pub dim: u32,
    pub direct: usize,
    pub conley: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhReport {
    pub pairs_checked: usize,
    pub values_checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl PhReport {
    pub fn is_consistent(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// All nested pairs `a ⊆ b` of down-sets (needs the lattice to be
/// enumerable).
pub fn nested_pairs(g: &GradedComplex) -> Result<Vec<(DownSet, DownSet)>, PersistenceError> {
    let lattice = g.poset().down_set_lattice(DEFAULT_LATTICE_CAP)?;
    let mut out = Vec::new();
    for a in &lattice {
        for b in &lattice {
            if a.is_subset(b) {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(out)
}

/// Compares `β_j^{a,b}` of `g` with that of its Conley complex on the given
/// pairs (all nested pairs when `None`) and every degree.
pub fn verify_persistence_routes(
    g: &GradedComplex,
    pairs: Option<&[(DownSet, DownSet)]>,
    options: ConleyOptions,
) -> Result<PhReport, PersistenceError> {
    let owned;
    let pairs = match pairs {
        Some(p) => p,
        None => {
            owned = nested_pairs(g)?;
            &owned
        }
    };
    let result = conley::connection_matrix(g, options)?;
    let m = &result.result;
    let top = g.complex().max_dim().unwrap_or(0);
    let rows: Vec<Result<Vec<Mismatch>, PersistenceError>> = pairs
        .par_iter()
        .map(|(a, b)| {
            let mut bad = Vec::new();
            for j in 0..=top {
                let direct = persistent_betti(g, a, b, j)?;
                let conley = persistent_betti(m, a, b, j)?;
                if direct != conley {
                    bad.push(Mismatch {
                        a: a.clone(),
                        b: b.clone(),
                        dim: j,
                        direct,
                        conley,
                    });
                }
            }
            Ok(bad)
        })
        .collect();
    let mut mismatches = Vec::new();
    for r in rows {
        mismatches.extend(r?);
    }
    Ok(PhReport {
        pairs_checked: pairs.len(),
        values_checked: pairs.len() * (top as usize + 1),
        mismatches,
    })
}

/// Routes a graded complex through its Conley complex, keeping the poset.
pub fn conley_complex(g: &GradedComplex, options: ConleyOptions) -> Result<GradedComplex, PersistenceError> {
    Ok(conley::connection_matrix(g, options)?.result)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::complex::ComplexBuilder;
    use crate::order::Poset;

    // v0 (0), v2 (1), {e0, v1, e1} (2) over the chain 0 < 1 < 2
    fn filtration() -> GradedComplex {
        let mut b = ComplexBuilder::new(crate::field::PrimeField::new(2).unwrap());
        for v in ["v0", "v1", "v2"] {
            b.add_cell(v, 0).unwrap();
        }
        b.add_cell("e0", 1).unwrap();
        b.add_cell("e1", 1).unwrap();
        for (e, v) in [("e0", "v0"), ("e0", "v1"), ("e1", "v1"), ("e1", "v2")] {
            b.add_incidence_by_id(e, v, 1).unwrap();
        }
        let q = Poset::chain(vec!["0".into(), "1".into(), "2".into()]).unwrap();
        GradedComplex::new(Arc::new(b.build()), Arc::new(q), vec![0, 2, 1, 2, 2]).unwrap()
    }

    #[test]
    fn betti_numbers_of_the_filtration() {
        let g = filtration();
        let p = g.poset();
        let down = |k: usize| p.principal_down_set(k);
        assert_eq!(persistent_betti(&g, &down(0), &down(1), 0).unwrap(), 1);
        assert_eq!(persistent_betti(&g, &down(1), &down(2), 0).unwrap(), 1);
        assert_eq!(persistent_betti(&g, &down(1), &down(1), 0).unwrap(), 2);
        assert_eq!(persistent_betti(&g, &down(2), &down(2), 1).unwrap(), 0);
        assert!(matches!(
            persistent_betti(&g, &down(2), &down(1), 0),
            Err(PersistenceError::NotNested)
        ));
    }

    #[test]
    fn diagram_of_the_filtration() {
        let g = filtration();
        let d = diagram_total_order(&g, &[0, 1, 2]).unwrap();
        assert_eq!(d.to_csv(), "dim,birth,death\n0,0,inf\n0,1,2\n");
        for a in 0..3 {
            for b in a..3 {
                for j in 0..2 {
                    let p = g.poset();
                    let want = persistent_betti(&g, &p.principal_down_set(a), &p.principal_down_set(b), j).unwrap();
                    assert_eq!(d.betti(j, a, b), want);
                }
            }
        }
        assert!(diagram_total_order(&g, &[1, 0, 2]).is_err());
    }

    #[test]
    fn empty_and_single_vertex() {
        let b = ComplexBuilder::new(crate::field::PrimeField::new(2).unwrap());
        let g = GradedComplex::trivial(Arc::new(b.build()));
        assert!(diagram_total_order(&g, &[0]).unwrap().intervals.is_empty());
        let mut b = ComplexBuilder::new(crate::field::PrimeField::new(2).unwrap());
        b.add_cell("v", 0).unwrap();
        let g = GradedComplex::trivial(Arc::new(b.build()));
        assert_eq!(diagram_total_order(&g, &[0]).unwrap().to_csv(), "dim,birth,death\n0,0,inf\n");
    }

    #[test]
    fn routes_agree_on_the_filtration() {
        let g = filtration();
        let r = verify_persistence_routes(&g, None, ConleyOptions::default()).unwrap();
        assert!(r.is_consistent());
        assert_eq!(r.pairs_checked, 10);
    }
}
