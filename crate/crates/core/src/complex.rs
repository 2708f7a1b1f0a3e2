//! Finite cell complexes `(X, ≤, κ, dim)` over GF(p) and their chain
//! complexes.
//!
//! The incidence function is stored sparsely per cell in compressed rows
//! (faces with coefficients), together with a reverse coboundary index. The
//! face order is the reflexive-transitive closure of the support of κ plus
//! any explicitly supplied face relations; it is never materialized, queries
//! walk the two adjacency structures instead.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::bitset::BitSet;
use crate::chain::{Chain, ChainAccumulator};
use crate::field::PrimeField;
use crate::poly::IntPolynomial;

/// Violations reported by [`CellComplex::validate`] before truncation.
pub const MAX_REPORTED_VIOLATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("duplicate cell id `{0}`")]
    DuplicateId(String),
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("cell index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("subset is not convex in the face order (`{0}` lies between two members)")]
    NotConvex(String),
    #[error("complex is invalid: {0}")]
    Invalid(String),
    #[error("cubical coordinates must have {expected} entries per cell, got {got}")]
    CoordinateArity { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cell {
    pub id: String,
    pub dim: u32,
}

/// Compressed adjacency rows: `entries[offsets[i]..offsets[i + 1]]`.
#[derive(Debug, Clone, Default)]
struct Rows {
    offsets: Vec<usize>,
    entries: Vec<(u32, u32)>,
}

impl Rows {
    fn from_lists(lists: Vec<Vec<(u32, u32)>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let total = lists.iter().map(Vec::len).sum();
        let mut entries = Vec::with_capacity(total);
        offsets.push(0);
        for l in lists {
            entries.extend(l);
            offsets.push(entries.len());
        }
        Rows { offsets, entries }
    }

    fn transpose(&self, n: usize) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(j, _) in &self.entries {
            counts[j as usize + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut fill = counts;
        let mut entries = vec![(0u32, 0u32); self.entries.len()];
        for i in 0..n {
            for &(j, c) in self.row(i) {
                let slot = &mut fill[j as usize];
                entries[*slot] = (i as u32, c);
                *slot += 1;
            }
        }
        Rows { offsets, entries }
    }

    #[inline]
    fn row(&self, i: usize) -> &[(u32, u32)] {
        &self.entries[self.offsets[i]..self.offsets[i + 1]]
    }
}

/// Cubical cell coordinates in doubled form: along each axis an even value
/// `2k` is the point `k`, an odd value `2k + 1` the interval `[k, k + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeCoords {
    axes: usize,
    data: Vec<u32>,
}

impl CubeCoords {
    pub fn new(axes: usize, data: Vec<u32>) -> Self {
        assert!(axes > 0 && data.len().is_multiple_of(axes));
        CubeCoords { axes, data }
    }

    pub fn axes(&self) -> usize {
        self.axes
    }

    #[inline]
    pub fn of(&self, cell: usize) -> &[u32] {
        &self.data[cell * self.axes..(cell + 1) * self.axes]
    }

    fn select(&self, cells: &[usize]) -> CubeCoords {
        let mut data = Vec::with_capacity(cells.len() * self.axes);
        for &c in cells {
            data.extend_from_slice(self.of(c));
        }
        CubeCoords {
            axes: self.axes,
            data,
        }
    }
}

/// An immutable cell complex.
#[derive(Debug)]
pub struct CellComplex {
    field: PrimeField,
    cells: Vec<Cell>,
    boundary: Rows,
    coboundary: Rows,
    extra_faces: Option<(Rows, Rows)>,
    coords: Option<CubeCoords>,
    index: OnceLock<HashMap<String, usize>>,
}

impl Clone for CellComplex {
    fn clone(&self) -> Self {
        CellComplex {
            field: self.field,
            cells: self.cells.clone(),
            boundary: self.boundary.clone(),
            coboundary: self.coboundary.clone(),
            extra_faces: self.extra_faces.clone(),
            coords: self.coords.clone(),
            index: OnceLock::new(),
        }
    }
}

/// Incremental construction of a [`CellComplex`].
#[derive(Debug, Clone)]
pub struct ComplexBuilder {
    field: PrimeField,
    cells: Vec<Cell>,
    index: HashMap<String, usize>,
    boundary: Vec<Vec<(u32, i64)>>,
    faces: Vec<Vec<u32>>,
    has_faces: bool,
    coords: Option<(usize, Vec<u32>)>,
}

impl ComplexBuilder {
    pub fn new(field: PrimeField) -> Self {
        ComplexBuilder {
            field,
            cells: Vec::new(),
            index: HashMap::new(),
            boundary: Vec::new(),
            faces: Vec::new(),
            has_faces: false,
            coords: None,
        }
    }

    pub fn with_capacity(field: PrimeField, n: usize) -> Self {
        let mut b = ComplexBuilder::new(field);
        b.cells.reserve(n);
        b.index.reserve(n);
        b.boundary.reserve(n);
        b
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn add_cell(&mut self, id: impl Into<String>, dim: u32) -> Result<usize, ComplexError> {
        let id = id.into();
        let idx = self.cells.len();
        if self.index.insert(id.clone(), idx).is_some() {
            return Err(ComplexError::DuplicateId(id));
        }
        self.cells.push(Cell { id, dim });
        self.boundary.push(Vec::new());
        self.faces.push(Vec::new());
        Ok(idx)
    }

    pub fn index_of(&self, id: &str) -> Result<usize, ComplexError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| ComplexError::UnknownCell(id.to_string()))
    }

    /// Adds `coeff` to `κ(cell, face)`.
    pub fn add_incidence(&mut self, cell: usize, face: usize, coeff: i64) -> Result<(), ComplexError> {
        let n = self.cells.len();
        if cell >= n {
            return Err(ComplexError::IndexOutOfRange(cell));
        }
        if face >= n {
            return Err(ComplexError::IndexOutOfRange(face));
        }
        self.boundary[cell].push((face as u32, coeff));
        Ok(())
    }

    pub fn add_incidence_by_id(&mut self, cell: &str, face: &str, coeff: i64) -> Result<(), ComplexError> {
        let c = self.index_of(cell)?;
        let f = self.index_of(face)?;
        self.add_incidence(c, f, coeff)
    }

    /// Declares `face ≤ cell` in the face order independently of κ.
    pub fn add_face(&mut self, cell: usize, face: usize) -> Result<(), ComplexError> {
        let n = self.cells.len();
        if cell >= n || face >= n {
            return Err(ComplexError::IndexOutOfRange(cell.max(face)));
        }
        self.faces[cell].push(face as u32);
        self.has_faces = true;
        Ok(())
    }

    /// Attaches doubled cubical coordinates, `axes` values per cell.
    pub fn set_coords(&mut self, axes: usize, data: Vec<u32>) -> Result<(), ComplexError> {
        if axes == 0 || data.len() != axes * self.cells.len() {
            return Err(ComplexError::CoordinateArity {
                expected: axes * self.cells.len(),
                got: data.len(),
            });
        }
        self.coords = Some((axes, data));
        Ok(())
    }

    pub fn build(self) -> CellComplex {
        let field = self.field;
        let lists: Vec<Vec<(u32, u32)>> = self
            .boundary
            .into_iter()
            .map(|row| {
                Chain::from_terms(field, row.into_iter().map(|(j, c)| (j as usize, field.reduce(c))))
                    .into_terms()
                    .into_iter()
                    .map(|(j, c)| (j as u32, c))
                    .collect()
            })
            .collect();
        let extra = if self.has_faces {
            Some(
                self.faces
                    .into_iter()
                    .map(|mut f| {
                        f.sort_unstable();
                        f.dedup();
                        f.into_iter().map(|j| (j, 0)).collect()
                    })
                    .collect(),
            )
        } else {
            None
        };
        let mut complex = CellComplex::from_parts(field, self.cells, lists, extra);
        if let Some((axes, data)) = self.coords {
            complex.coords = Some(CubeCoords::new(axes, data));
        }
        let index = self.index;
        let _ = complex.index.set(index);
        complex
    }
}

impl CellComplex {
    /// Builds a complex from per-cell boundary rows `(face, coefficient)`;
    /// rows must be sorted by face, free of zeros and already reduced.
    pub(crate) fn from_parts(
        field: PrimeField,
        cells: Vec<Cell>,
        boundary: Vec<Vec<(u32, u32)>>,
        extra_faces: Option<Vec<Vec<(u32, u32)>>>,
    ) -> Self {
        let n = cells.len();
        let boundary = Rows::from_lists(boundary);
        let coboundary = boundary.transpose(n);
        let extra_faces = extra_faces.map(|f| {
            let rows = Rows::from_lists(f);
            let rev = rows.transpose(n);
            (rows, rev)
        });
        CellComplex {
            field,
            cells,
            boundary,
            coboundary,
            extra_faces,
            coords: None,
            index: OnceLock::new(),
        }
    }

    pub(crate) fn with_coords(mut self, coords: Option<CubeCoords>) -> Self {
        self.coords = coords;
        self
    }

    pub fn empty(field: PrimeField) -> Self {
        CellComplex::from_parts(field, Vec::new(), Vec::new(), None)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn id(&self, i: usize) -> &str {
        &self.cells[i].id
    }

    #[inline]
    pub fn dim(&self, i: usize) -> u32 {
        self.cells[i].dim
    }

    pub fn max_dim(&self) -> Option<u32> {
        self.cells.iter().map(|c| c.dim).max()
    }

    pub fn coords(&self) -> Option<&CubeCoords> {
        self.coords.as_ref()
    }

    pub fn has_explicit_faces(&self) -> bool {
        self.extra_faces.is_some()
    }

    fn id_index(&self) -> &HashMap<String, usize> {
        self.index.get_or_init(|| {
            self.cells
                .iter()
                .enumerate()
                .map(|(i, c)| (c.id.clone(), i))
                .collect()
        })
    }

    pub fn index_of(&self, id: &str) -> Result<usize, ComplexError> {
        self.id_index()
            .get(id)
            .copied()
            .ok_or_else(|| ComplexError::UnknownCell(id.to_string()))
    }

    /// `(face, κ(cell, face))` for every nonzero incidence.
    #[inline]
    pub fn boundary_of(&self, cell: usize) -> &[(u32, u32)] {
        self.boundary.row(cell)
    }

    /// `(coface, κ(coface, cell))` for every nonzero incidence.
    #[inline]
    pub fn coboundary_of(&self, cell: usize) -> &[(u32, u32)] {
        self.coboundary.row(cell)
    }

    pub fn kappa(&self, cell: usize, face: usize) -> u32 {
        self.boundary_of(cell)
            .iter()
            .find(|e| e.0 as usize == face)
            .map_or(0, |e| e.1)
    }

    /// Explicit face relations beyond the support of κ.
    pub fn explicit_faces_of(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        self.extra_faces
            .iter()
            .flat_map(move |(rows, _)| rows.row(cell).iter().map(|e| e.0 as usize))
    }

    fn explicit_cofaces_of(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        self.extra_faces
            .iter()
            .flat_map(move |(_, rev)| rev.row(cell).iter().map(|e| e.0 as usize))
    }

    /// Immediate predecessors of `cell` in the face order.
    pub fn order_faces(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        self.boundary_of(cell)
            .iter()
            .map(|e| e.0 as usize)
            .chain(self.explicit_faces_of(cell))
    }

    /// Immediate successors of `cell` in the face order.
    pub fn order_cofaces(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        self.coboundary_of(cell)
            .iter()
            .map(|e| e.0 as usize)
            .chain(self.explicit_cofaces_of(cell))
    }

    /// The boundary operator on chains of this complex.
    pub fn boundary(&self, chain: &Chain) -> Result<Chain, ComplexError> {
        let mut acc = ChainAccumulator::new(self.field);
        for &(i, c) in chain.terms() {
            if i >= self.len() {
                return Err(ComplexError::IndexOutOfRange(i));
            }
            for &(j, k) in self.boundary_of(i) {
                acc.add_term(j as usize, self.field.mul(c, k));
            }
        }
        Ok(acc.into_chain())
    }

    /// Boundary of a single cell as a chain.
    pub fn boundary_chain(&self, cell: usize) -> Chain {
        Chain::from_terms(
            self.field,
            self.boundary_of(cell).iter().map(|&(j, c)| (j as usize, c)),
        )
    }

    /// Checks the cell complex axioms and reports every violation found (up
    /// to [`MAX_REPORTED_VIOLATIONS`]).
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let f = self.field;
        for i in 0..self.len() {
            for &(j, _) in self.boundary_of(i) {
                let j = j as usize;
                if self.dim(i) != self.dim(j) + 1 {
                    report.push(Violation::IncidenceDimension {
                        cell: self.id(i).to_string(),
                        face: self.id(j).to_string(),
                        cell_dim: self.dim(i),
                        face_dim: self.dim(j),
                    });
                }
            }
            let mut acc = ChainAccumulator::new(f);
            for &(j, a) in self.boundary_of(i) {
                for &(k, b) in self.boundary_of(j as usize) {
                    acc.add_term(k as usize, f.mul(a, b));
                }
            }
            for (k, c) in acc.into_chain().into_terms() {
                report.push(Violation::BoundarySquared {
                    cell: self.id(i).to_string(),
                    face: self.id(k).to_string(),
                    coefficient: c,
                });
            }
            for j in self.explicit_faces_of(i) {
                if j != i && self.dim(j) > self.dim(i) {
                    report.push(Violation::OrderDimension {
                        cell: self.id(i).to_string(),
                        face: self.id(j).to_string(),
                    });
                }
            }
        }
        if self.extra_faces.is_some() {
            if let Some(c) = self.order_cycle() {
                report.push(Violation::OrderCycle {
                    cell: self.id(c).to_string(),
                });
            }
        }
        report
    }

    // Kahn's algorithm on the face relation; returns a cell on a cycle.
    fn order_cycle(&self) -> Option<usize> {
        let n = self.len();
        let mut indeg = vec![0usize; n];
        for i in 0..n {
            for j in self.order_faces(i) {
                if j != i {
                    indeg[j] += 1;
                }
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(i) = queue.pop_front() {
            seen += 1;
            for j in self.order_faces(i) {
                if j != i {
                    indeg[j] -= 1;
                    if indeg[j] == 0 {
                        queue.push_back(j);
                    }
                }
            }
        }
        if seen == n {
            None
        } else {
            (0..n).find(|&i| indeg[i] > 0)
        }
    }

    pub fn f_polynomial(&self) -> IntPolynomial {
        let mut p = IntPolynomial::zero();
        for c in &self.cells {
            p.add_to(c.dim as usize, 1);
        }
        p
    }

    /// `Σ dim H_i t^i`, computed by the Morse-theoretic homology algorithm.
    pub fn poincare_polynomial(&self) -> Result<IntPolynomial, ComplexError> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(ComplexError::Invalid(report.to_string()));
        }
        let result = crate::conley::homology(std::sync::Arc::new(self.clone()));
        Ok(result.result.complex().f_polynomial())
    }

    /// `st(ξ) = ↑ξ`, sorted by index.
    pub fn star(&self, cell: usize) -> Result<Vec<usize>, ComplexError> {
        self.walk(cell, true)
    }

    /// `cl(ξ) = ↓ξ`, sorted by index.
    pub fn closure(&self, cell: usize) -> Result<Vec<usize>, ComplexError> {
        self.walk(cell, false)
    }

    fn walk(&self, cell: usize, up: bool) -> Result<Vec<usize>, ComplexError> {
        if cell >= self.len() {
            return Err(ComplexError::IndexOutOfRange(cell));
        }
        let mut seen = BitSet::new(self.len());
        seen.insert(cell);
        let mut stack = vec![cell];
        while let Some(x) = stack.pop() {
            let next: Vec<usize> = if up {
                self.order_cofaces(x).collect()
            } else {
                self.order_faces(x).collect()
            };
            for y in next {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        Ok(seen.iter().collect())
    }

    /// Maximal cells of the face order.
    pub fn top_cells(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.order_cofaces(i).all(|j| j == i))
            .collect()
    }

    /// Tests convexity of `subset` in the face order: no upward path leaves
    /// the subset and comes back. Returns an offending cell if not convex.
    pub fn convexity_witness(&self, subset: &BitSet) -> Option<usize> {
        let mut seen = BitSet::new(self.len());
        let mut stack = Vec::new();
        for s in subset.iter() {
            for y in self.order_cofaces(s) {
                if !subset.contains(y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        while let Some(x) = stack.pop() {
            for y in self.order_cofaces(x) {
                if subset.contains(y) {
                    return Some(x);
                }
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        None
    }

    /// Restriction of `(≤, κ, dim)` to a convex subset. The boundary of the
    /// result is the restricted κ, not the ambient ∂.
    pub fn restrict(&self, subset: &BitSet) -> Result<Restriction, ComplexError> {
        if let Some(w) = self.convexity_witness(subset) {
            return Err(ComplexError::NotConvex(self.id(w).to_string()));
        }
        Ok(self.restrict_unchecked(subset))
    }

    pub(crate) fn restrict_unchecked(&self, subset: &BitSet) -> Restriction {
        let parent: Vec<usize> = subset.iter().filter(|&i| i < self.len()).collect();
        let mut local = vec![u32::MAX; self.len()];
        for (k, &i) in parent.iter().enumerate() {
            local[i] = k as u32;
        }
        self.restrict_with(parent, |j| match local[j] {
            u32::MAX => None,
            k => Some(k),
        })
    }

    /// Restriction to the cells `parent`, where `local(j)` gives the position
    /// of ambient cell `j` in `parent`, or `None` if it is not kept.
    pub(crate) fn restrict_with(&self, parent: Vec<usize>, local: impl Fn(usize) -> Option<u32>) -> Restriction {
        let cells: Vec<Cell> = parent.iter().map(|&i| self.cells[i].clone()).collect();
        let boundary: Vec<Vec<(u32, u32)>> = parent
            .iter()
            .map(|&i| {
                let mut row: Vec<(u32, u32)> = self
                    .boundary_of(i)
                    .iter()
                    .filter_map(|&(j, c)| local(j as usize).map(|k| (k, c)))
                    .collect();
                row.sort_unstable_by_key(|e| e.0);
                row
            })
            .collect();
        let extra = self.extra_faces.as_ref().map(|_| {
            parent
                .iter()
                .map(|&i| {
                    let mut row: Vec<(u32, u32)> =
                        self.explicit_faces_of(i).filter_map(|j| local(j).map(|k| (k, 0))).collect();
                    row.sort_unstable_by_key(|e| e.0);
                    row
                })
                .collect()
        });
        let coords = self.coords.as_ref().map(|c| c.select(&parent));
        let complex = CellComplex::from_parts(self.field, cells, boundary, extra).with_coords(coords);
        Restriction { complex, parent }
    }
}

/// A restricted complex with the ambient index of each of its cells.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub complex: CellComplex,
    pub parent: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// κ(cell, face) ≠ 0 but `dim cell ≠ dim face + 1`.
    IncidenceDimension {
        cell: String,
        face: String,
        cell_dim: u32,
        face_dim: u32,
    },
    /// `Σ κ(cell, ξ')κ(ξ', face) ≠ 0`.
    BoundarySquared {
        cell: String,
        face: String,
        coefficient: u32,
    },
    /// An explicit face has larger dimension than its cell.
    OrderDimension { cell: String, face: String },
    /// Explicit face relations are not antisymmetric.
    OrderCycle { cell: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IncidenceDimension {
                cell,
                face,
                cell_dim,
                face_dim,
            } => write!(
                f,
                "incidence ({cell}, {face}) is nonzero but dimensions are {cell_dim} and {face_dim}"
            ),
            Violation::BoundarySquared {
                cell,
                face,
                coefficient,
            } => write!(f, "boundary of boundary of {cell} has coefficient {coefficient} on {face}"),
            Violation::OrderDimension { cell, face } => {
                write!(f, "face {face} of {cell} has larger dimension")
            }
            Violation::OrderCycle { cell } => write!(f, "face order has a cycle through {cell}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub truncated: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, v: Violation) {
        if self.violations.len() < MAX_REPORTED_VIOLATIONS {
            self.violations.push(v);
        } else {
            self.truncated = true;
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        if self.truncated {
            write!(f, "\n(further violations omitted)")?;
        }
        Ok(())
    }
}
