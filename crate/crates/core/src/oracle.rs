//! Dense brute-force reference computations over GF(p), independent of the
//! sparse algorithms they are used to check.

use thiserror::Error;

use crate::chain::Chain;
use crate::complex::CellComplex;
use crate::field::PrimeField;
use crate::graded::GradedComplex;
use crate::morse::{self, Matching, Reduction};
use crate::order::DownSet;

pub const HOMOLOGY_CAP: usize = 2000;
pub const ASSEMBLY_CAP: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{size} exceeds the dense oracle cap of {cap}")]
    TooLarge { size: usize, cap: usize },
}

fn cap(size: usize, cap: usize) -> Result<(), OracleError> {
    if size > cap {
        Err(OracleError::TooLarge { size, cap })
    } else {
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl std::fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}x{} over GF({})", self.rows, self.cols, self.field.modulus())?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl DenseMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        DenseMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = DenseMatrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = DenseMatrix::zeros(field, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, field.reduce(v));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.modulus();
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let f = self.field;
        let mut out = DenseMatrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let v = f.add(out.get(i, j), f.mul(a, b));
                        out.data[i * other.cols + j] = v;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        let mut out = self.clone();
        for (x, &y) in out.data.iter_mut().zip(&other.data) {
            *x = f.add(*x, y);
        }
        out
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        let mut out = self.clone();
        for (x, &y) in out.data.iter_mut().zip(&other.data) {
            *x = f.sub(*x, y);
        }
        out
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    /// Columns `cols` of `self` followed by the columns of `other`.
    pub fn hconcat(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = DenseMatrix::zeros(self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        out
    }

    /// Row echelon form by Gaussian elimination scanning pivot rows top to
    /// bottom; returns the echelon matrix and its pivot columns.
    fn echelon(&self) -> (DenseMatrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| m.get(r, col) != 0) else { continue };
            for c in 0..m.cols {
                m.data.swap(p * m.cols + c, row * m.cols + c);
            }
            let inv = f.inv(m.get(row, col)).unwrap();
            for c in 0..m.cols {
                let v = f.mul(m.get(row, c), inv);
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                let factor = m.get(r, col);
                if r != row && factor != 0 {
                    for c in 0..m.cols {
                        let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    /// Rank by column elimination with pivots taken from the bottom row
    /// upwards, an independent pivoting order for self-consistency checks.
    pub fn rank_by_columns(&self) -> usize {
        let f = self.field;
        let mut m = self.clone();
        let mut rank = 0;
        let mut used = vec![false; m.cols];
        for r in (0..m.rows).rev() {
            let Some(p) = (0..m.cols).rev().find(|&c| !used[c] && m.get(r, c) != 0) else { continue };
            used[p] = true;
            rank += 1;
            let inv = f.inv(m.get(r, p)).unwrap();
            for c in 0..m.cols {
                let factor = m.get(r, c);
                if c != p && factor != 0 {
                    let s = f.mul(factor, inv);
                    for rr in 0..m.rows {
                        let v = f.sub(m.get(rr, c), f.mul(s, m.get(rr, p)));
                        m.set(rr, c, v);
                    }
                }
            }
        }
        rank
    }

    /// A basis of the null space `{x : Mx = 0}`, as the columns of a matrix.
    pub fn nullspace(&self) -> DenseMatrix {
        let f = self.field;
        let (e, pivots) = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = DenseMatrix::zeros(f, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            out.set(fc, k, 1);
            for (r, &pc) in pivots.iter().enumerate() {
                out.set(pc, k, f.neg(e.get(r, fc)));
            }
        }
        out
    }

    pub fn column(&self, c: usize) -> Chain {
        Chain::from_terms(self.field, (0..self.rows).map(|r| (r, self.get(r, c))))
    }
}

/// Dense matrix of a linear map given by its columns.
pub fn assemble(
    field: PrimeField,
    rows: usize,
    cols: usize,
    column: impl Fn(usize) -> Chain,
) -> Result<DenseMatrix, OracleError> {
    cap(rows.max(cols), ASSEMBLY_CAP)?;
    let mut m = DenseMatrix::zeros(field, rows, cols);
    for c in 0..cols {
        for &(r, v) in column(c).terms() {
            m.set(r, c, v);
        }
    }
    Ok(m)
}

/// The full boundary matrix of a complex in its cell order.
pub fn boundary_matrix(x: &CellComplex) -> Result<DenseMatrix, OracleError> {
    assemble(x.field(), x.len(), x.len(), |i| x.boundary_chain(i))
}

// Boundary from the dimension-`j` cells of `cols` to every dimension-`(j-1)`
// cell, together with the row cells.
fn degree_block(x: &CellComplex, j: u32, cols: &[usize]) -> DenseMatrix {
    let rows: Vec<usize> = (0..x.len()).filter(|&i| j > 0 && x.dim(i) == j - 1).collect();
    let mut m = DenseMatrix::zeros(x.field(), rows.len(), cols.len());
    for (c, &cell) in cols.iter().enumerate() {
        for &(face, v) in x.boundary_of(cell) {
            let r = rows.binary_search(&(face as usize)).expect("face of adjacent dimension");
            m.set(r, c, v);
        }
    }
    m
}

/// Betti numbers `β_n = dim ker ∂_n − rank ∂_{n+1}` by dense elimination.
pub fn dense_homology(x: &CellComplex) -> Result<Vec<usize>, OracleError> {
    cap(x.len(), HOMOLOGY_CAP)?;
    let top = match x.max_dim() {
        Some(d) => d,
        None => return Ok(Vec::new()),
    };
    let cells = |j: u32| -> Vec<usize> { (0..x.len()).filter(|&i| x.dim(i) == j).collect() };
    let ranks: Vec<usize> = (0..=top + 1).map(|j| degree_block(x, j, &cells(j)).rank()).collect();
    let mut betti: Vec<usize> = (0..=top)
        .map(|j| cells(j).len() - ranks[j as usize] - ranks[j as usize + 1])
        .collect();
    while betti.last() == Some(&0) {
        betti.pop();
    }
    Ok(betti)
}

/// `β_j^{a,b} = rank [B | Z] − rank B` with `Z` an explicit basis of the
/// cycles of `ν⁻¹(a)` and `B` the boundaries of `ν⁻¹(b)`, both in the
/// coordinates of all `j`-cells.
pub fn dense_persistent_betti(g: &GradedComplex, a: &DownSet, b: &DownSet, j: u32) -> Result<usize, OracleError> {
    let x = g.complex();
    cap(x.len(), HOMOLOGY_CAP)?;
    let f = x.field();
    let j_cells: Vec<usize> = (0..x.len()).filter(|&i| x.dim(i) == j).collect();
    let a_cols: Vec<usize> = j_cells.iter().copied().filter(|&i| a.contains(g.grade(i))).collect();
    let z_local = degree_block(x, j, &a_cols).nullspace();
    // embed cycle coordinates from a's j-cells into all j-cells
    let mut z = DenseMatrix::zeros(f, j_cells.len(), z_local.cols());
    for (k, &cell) in a_cols.iter().enumerate() {
        let r = j_cells.binary_search(&cell).unwrap();
        for c in 0..z_local.cols() {
            z.set(r, c, z_local.get(k, c));
        }
    }
    let b_cols: Vec<usize> = (0..x.len())
        .filter(|&i| x.dim(i) == j + 1 && b.contains(g.grade(i)))
        .collect();
    let bd = degree_block(x, j + 1, &b_cols);
    let bd = if bd.rows() == j_cells.len() {
        bd
    } else {
        DenseMatrix::zeros(f, j_cells.len(), 0)
    };
    Ok(bd.hconcat(&z).rank() - bd.rank())
}

/// `Σ_{i≥0} V(id − ∂V)^i`, summed until the terms vanish.
pub fn splitting_homotopy_series(x: &CellComplex, matching: &Matching) -> Result<DenseMatrix, OracleError> {
    let n = x.len();
    let f = x.field();
    let v = assemble(f, n, n, |i| morse::v_map(x, matching, i))?;
    let d = boundary_matrix(x)?;
    let step = DenseMatrix::identity(f, n).sub(&d.mul(&v));
    let mut term = v;
    let mut sum = DenseMatrix::zeros(f, n, n);
    for _ in 0..=n + 1 {
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term);
        term = term.mul(&step);
    }
    Ok(sum)
}

/// Dense matrices `(ψ, φ, γ, ∂, ∂')` of a reduction.
pub struct ReductionMatrices {
    pub psi: DenseMatrix,
    pub phi: DenseMatrix,
    pub gamma: DenseMatrix,
    pub source_boundary: DenseMatrix,
    pub target_boundary: DenseMatrix,
}

pub fn reduction_matrices(r: &Reduction) -> Result<ReductionMatrices, OracleError> {
    let (s, t) = (r.source(), r.target());
    let f = s.field();
    Ok(ReductionMatrices {
        psi: assemble(f, t.len(), s.len(), |i| r.psi_col(i))?,
        phi: assemble(f, s.len(), t.len(), |a| r.phi_col(a))?,
        gamma: assemble(f, s.len(), s.len(), |i| r.gamma_col(i))?,
        source_boundary: boundary_matrix(s)?,
        target_boundary: boundary_matrix(t)?,
    })
}

/// Verifies by full matrix assembly that `ψ` and `φ` are chain maps and
/// `ψφ = id`, `φψ = id − (γ∂ + ∂γ)`, `γ² = γφ = ψγ = 0`, `∂'² = 0`.
/// Returns the list of failed identities.
pub fn check_reduction(r: &Reduction) -> Result<Vec<&'static str>, OracleError> {
    let m = reduction_matrices(r)?;
    let f = r.source().field();
    let (ns, nt) = (r.source().len(), r.target().len());
    let (d, dt) = (&m.source_boundary, &m.target_boundary);
    let mut failed = Vec::new();
    if m.psi.mul(&m.phi) != DenseMatrix::identity(f, nt) {
        failed.push("psi phi = id");
    }
    let homotopy = m.gamma.mul(d).add(&d.mul(&m.gamma));
    if m.phi.mul(&m.psi) != DenseMatrix::identity(f, ns).sub(&homotopy) {
        failed.push("phi psi = id - (gamma d + d gamma)");
    }
    if !m.gamma.mul(&m.gamma).is_zero() {
        failed.push("gamma gamma = 0");
    }
    if !m.gamma.mul(&m.phi).is_zero() {
        failed.push("gamma phi = 0");
    }
    if !m.psi.mul(&m.gamma).is_zero() {
        failed.push("psi gamma = 0");
    }
    if !dt.mul(dt).is_zero() {
        failed.push("target d d = 0");
    }
    if m.psi.mul(d) != dt.mul(&m.psi) {
        failed.push("psi is a chain map");
    }
    if d.mul(&m.phi) != m.phi.mul(dt) {
        failed.push("phi is a chain map");
    }
    Ok(failed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::ComplexBuilder;

    fn gf(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn two_pivot_orders_agree() {
        let f = gf(3);
        let m = DenseMatrix::from_rows(f, &[vec![1, 2, 0, 1], vec![2, 1, 0, 2], vec![0, 0, 1, 1]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.rank_by_columns(), 2);
        let n = m.nullspace();
        assert_eq!(n.cols(), 2);
        assert!(m.mul(&n).is_zero());
    }

    #[test]
    fn homology_of_small_complexes() {
        let mut b = ComplexBuilder::new(gf(2));
        b.add_cell("v", 0).unwrap();
        assert_eq!(dense_homology(&b.build()).unwrap(), vec![1]);

        // interval v0 - e0 - v1 - e1 - v2: ∂1 has rank 2, so β0 = 3 - 2 = 1
        let x = crate::cubical::interval_complex(gf(2), 2);
        assert_eq!(dense_homology(&x).unwrap(), vec![1]);
    }

    #[test]
    fn identity_assembles_to_identity() {
        let f = gf(5);
        assert_eq!(assemble(f, 4, 4, Chain::basis).unwrap(), DenseMatrix::identity(f, 4));
        assert!(assemble(f, 2000, 1, |_| Chain::zero()).is_err());
    }

    #[test]
    fn disjoint_union_doubles_b0() {
        let f = gf(2);
        let mut b = ComplexBuilder::new(f);
        b.add_cell("a", 0).unwrap();
        b.add_cell("c", 0).unwrap();
        let x = std::sync::Arc::new(b.build());
        let g = GradedComplex::trivial(x);
        let full = g.poset().full_down_set();
        assert_eq!(dense_persistent_betti(&g, &full, &full, 0).unwrap(), 2);
    }
}
