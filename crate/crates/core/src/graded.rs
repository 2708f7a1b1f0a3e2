//! Poset-graded cell complexes: fibers, filtered pieces, strictness and
//! fiber graphs.

use std::sync::Arc;

use thiserror::Error;

use crate::bitset::BitSet;
use crate::chain::Chain;
use crate::complex::{CellComplex, ComplexError, Restriction};
use crate::order::{DownSet, OrderError, Poset};
use crate::poly::IntPolynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradedError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error("{got} grades for {expected} cells")]
    GradeCount { expected: usize, got: usize },
    #[error("grade index {0} out of range")]
    GradeOutOfRange(u32),
    #[error("map between posets is not order-preserving")]
    MapNotOrderPreserving,
    #[error("grading is not order-preserving: face `{face}` has grade `{face_grade}`, not below grade `{cell_grade}` of `{cell}`")]
    NotOrderPreserving {
        cell: String,
        face: String,
        cell_grade: String,
        face_grade: String,
    },
}

/// A cell complex with an order-preserving grading `ν: X → P`.
#[derive(Debug, Clone)]
pub struct GradedComplex {
    complex: Arc<CellComplex>,
    poset: Arc<Poset>,
    grades: Vec<u32>,
}

/// The Hasse diagram of `P` annotated with fiber f-polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberGraph {
    pub labels: Vec<String>,
    pub polynomials: Vec<IntPolynomial>,
    /// Cover relations `(lower, upper)`.
    pub covers: Vec<(usize, usize)>,
}

impl FiberGraph {
    pub fn polynomial_of(&self, label: &str) -> Option<&IntPolynomial> {
        let k = self.labels.iter().position(|l| l == label)?;
        Some(&self.polynomials[k])
    }

    pub fn total(&self) -> IntPolynomial {
        self.polynomials
            .iter()
            .fold(IntPolynomial::zero(), |acc, p| acc.sum(p))
    }
}

impl GradedComplex {
    /// Validates that `grades` is order-preserving on the face order.
    pub fn new(complex: Arc<CellComplex>, poset: Arc<Poset>, grades: Vec<u32>) -> Result<Self, GradedError> {
        if grades.len() != complex.len() {
            return Err(GradedError::GradeCount {
                expected: complex.len(),
                got: grades.len(),
            });
        }
        if let Some(&g) = grades.iter().find(|&&g| g as usize >= poset.len()) {
            return Err(GradedError::GradeOutOfRange(g));
        }
        let g = GradedComplex {
            complex,
            poset,
            grades,
        };
        g.check_order_preserving()?;
        Ok(g)
    }

    /// Skips validation; the caller guarantees the grading is order-preserving.
    pub(crate) fn new_unchecked(complex: Arc<CellComplex>, poset: Arc<Poset>, grades: Vec<u32>) -> Self {
        debug_assert_eq!(complex.len(), grades.len());
        GradedComplex {
            complex,
            poset,
            grades,
        }
    }

    /// Every cell in the single element of the trivial poset.
    pub fn trivial(complex: Arc<CellComplex>) -> Self {
        let n = complex.len();
        GradedComplex {
            complex,
            poset: Arc::new(Poset::trivial()),
            grades: vec![0; n],
        }
    }

    fn check_order_preserving(&self) -> Result<(), GradedError> {
        let x = &self.complex;
        for i in 0..x.len() {
            let gi = self.grades[i] as usize;
            for j in x.order_faces(i) {
                let gj = self.grades[j] as usize;
                if !self.poset.leq(gj, gi) {
                    return Err(GradedError::NotOrderPreserving {
                        cell: x.id(i).to_string(),
                        face: x.id(j).to_string(),
                        cell_grade: self.poset.label(gi).to_string(),
                        face_grade: self.poset.label(gj).to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn grades(&self) -> &[u32] {
        &self.grades
    }

    #[inline]
    pub fn grade(&self, cell: usize) -> usize {
        self.grades[cell] as usize
    }

    pub fn len(&self) -> usize {
        self.complex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.complex.is_empty()
    }

    /// Position of each poset element in the poset's fixed linear extension.
    pub fn grade_positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.poset.len()];
        for (k, &x) in self.poset.topological_order().iter().enumerate() {
            pos[x] = k;
        }
        pos
    }

    /// Regrades along `rho: P → Q`, which must be order-preserving.
    pub fn regrade(&self, target: Arc<Poset>, rho: &[usize]) -> Result<GradedComplex, GradedError> {
        let map: Vec<Option<usize>> = rho.iter().map(|&q| Some(q)).collect();
        if !crate::order::order_preserving(&self.poset, &target, &map)? {
            return Err(GradedError::MapNotOrderPreserving);
        }
        let grades = self.grades.iter().map(|&g| rho[g as usize] as u32).collect();
        GradedComplex::new(self.complex.clone(), target, grades)
    }

    pub fn fiber_cells(&self, p: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.grade(i) == p).collect()
    }

    /// `X^p = ν⁻¹(p)` as a complex; fibers are convex, hence subcomplexes.
    pub fn fiber(&self, p: usize) -> Result<Restriction, GradedError> {
        if p >= self.poset.len() {
            return Err(GradedError::GradeOutOfRange(p as u32));
        }
        let s = BitSet::from_indices(self.len(), self.fiber_cells(p));
        Ok(self.complex.restrict_unchecked(&s))
    }

    pub fn fiber_by_label(&self, label: &str) -> Result<Restriction, GradedError> {
        self.fiber(self.poset.index_of(label)?)
    }

    /// Cells graded in the poset subset `s`.
    pub fn cells_over(&self, s: &BitSet) -> BitSet {
        BitSet::from_indices(self.len(), (0..self.len()).filter(|&i| s.contains(self.grade(i))))
    }

    /// The closed subcomplex `ν⁻¹(a)` for a down-set `a`.
    pub fn filtered_piece(&self, a: &DownSet) -> Restriction {
        self.complex.restrict_unchecked(&self.cells_over(a.members()))
    }

    /// Restriction to the cells over a convex subset of `P`.
    pub fn convex_piece(&self, s: &BitSet) -> Result<GradedComplex, GradedError> {
        if !self.poset.is_convex(s) {
            return Err(GradedError::Complex(ComplexError::NotConvex("poset subset".into())));
        }
        let r = self.complex.restrict_unchecked(&self.cells_over(s));
        let grades = r.parent.iter().map(|&i| self.grades[i]).collect();
        Ok(GradedComplex::new_unchecked(Arc::new(r.complex), self.poset.clone(), grades))
    }

    /// Every fiber has zero internal boundary.
    pub fn is_strict(&self) -> bool {
        (0..self.len()).all(|i| {
            self.complex
                .boundary_of(i)
                .iter()
                .all(|&(j, _)| self.grades[j as usize] != self.grades[i])
        })
    }

    /// For every join-irreducible `↓s` of `O(P)`, `∂` maps `ν⁻¹(↓s)` into
    /// `ν⁻¹(←↓s)`.
    pub fn is_strict_filtering(&self) -> bool {
        (0..self.poset.len()).all(|s| {
            let piece = self.poset.principal_down_set(s);
            let pred = self.poset.strict_down_set(s);
            (0..self.len())
                .filter(|&i| piece.contains(self.grade(i)))
                .all(|i| {
                    self.complex
                        .boundary_of(i)
                        .iter()
                        .all(|&(j, _)| pred.contains(self.grade(j as usize)))
                })
        })
    }

    pub fn fiber_graph(&self) -> FiberGraph {
        let mut polynomials = vec![IntPolynomial::zero(); self.poset.len()];
        for i in 0..self.len() {
            polynomials[self.grade(i)].add_to(self.complex.dim(i) as usize, 1);
        }
        FiberGraph {
            labels: self.poset.labels().to_vec(),
            polynomials,
            covers: self.poset.hasse_covers().to_vec(),
        }
    }
}

/// Checks `π^p ∘ f ∘ π^q ≠ 0 ⇒ p ≤ q` for a map given by its columns on the
/// source basis. Both complexes must be graded by the same poset.
pub fn is_p_filtered(src: &GradedComplex, dst: &GradedComplex, column: impl Fn(usize) -> Chain) -> bool {
    let poset = src.poset();
    (0..src.len()).all(|i| {
        let q = src.grade(i);
        column(i).indices().all(|j| poset.leq(dst.grade(j), q))
    })
}
