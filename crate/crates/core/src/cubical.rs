//! Cubical complexes built from values on top cells, interval complexes,
//! and coordinate-direction matchings.
//!
//! Cells use doubled coordinates: along each axis an even value `2k` is the
//! point `k` and an odd value `2k + 1` the interval `[k, k + 1]`.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::complex::{CellComplex, ComplexBuilder};
use crate::field::PrimeField;
use crate::graded::{GradedComplex, GradedError};
use crate::morse::{Matching, MorseError};
use crate::order::Poset;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubicalError {
    #[error("grid has {got} values, shape needs {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("grid shape must have at least one positive extent per axis")]
    EmptyShape,
    #[error("open axis {0} is out of range")]
    OpenAxis(usize),
    #[error("bad grid header: {0}")]
    Header(String),
    #[error("bad grid value `{0}`")]
    Value(String),
    #[error("complex has no cubical coordinates")]
    NotCubical,
    #[error("axis {axis} out of range for a {axes}-dimensional complex")]
    Axis { axis: usize, axes: usize },
    #[error("coordinates too large to pack into a key")]
    KeyOverflow,
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Morse(#[from] MorseError),
}

/// Values on the top cells of a box, row-major with the last axis fastest.
/// `None` marks an absent top cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicalGrid {
    shape: Vec<usize>,
    open: Vec<bool>,
    values: Vec<Option<f64>>,
}

impl CubicalGrid {
    pub fn new(shape: Vec<usize>, open_axes: &[usize], values: Vec<Option<f64>>) -> Result<Self, CubicalError> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(CubicalError::EmptyShape);
        }
        let expected: usize = shape.iter().product();
        if values.len() != expected {
            return Err(CubicalError::ShapeMismatch {
                expected,
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().flatten().find(|v| v.is_nan()) {
            return Err(CubicalError::Value(v.to_string()));
        }
        let mut open = vec![false; shape.len()];
        for &a in open_axes {
            *open.get_mut(a).ok_or(CubicalError::OpenAxis(a))? = true;
        }
        Ok(CubicalGrid { shape, open, values })
    }

    /// Parses `shape: n1 n2 ... [open: a1 ...]` followed by the values;
    /// `-` marks an absent top cell and `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CubicalError> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| CubicalError::Header("missing".into()))?;
        let rest = header
            .strip_prefix("shape:")
            .ok_or_else(|| CubicalError::Header(header.to_string()))?;
        let (dims, open) = match rest.split_once("open:") {
            Some((d, o)) => (d, Some(o)),
            None => (rest, None),
        };
        let num = |t: &str| t.parse::<usize>().map_err(|_| CubicalError::Header(t.to_string()));
        let shape = dims.split_whitespace().map(num).collect::<Result<Vec<_>, _>>()?;
        let open = match open {
            Some(o) => o.split_whitespace().map(num).collect::<Result<Vec<_>, _>>()?,
            None => Vec::new(),
        };
        let mut values = Vec::new();
        for line in lines {
            for tok in line.split_whitespace() {
                if tok == "-" {
                    values.push(None);
                } else {
                    let v: f64 = tok.parse().map_err(|_| CubicalError::Value(tok.to_string()))?;
                    values.push(Some(v));
                }
            }
        }
        CubicalGrid::new(shape, &open, values)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn open(&self) -> &[bool] {
        &self.open
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }
}

/// Interval notation for doubled coordinates, e.g. `[1]x[0,1]`.
pub fn cell_label(coords: &[u32]) -> String {
    let parts: Vec<String> = coords
        .iter()
        .map(|&c| {
            if c % 2 == 0 {
                format!("[{}]", c / 2)
            } else {
                format!("[{},{}]", c / 2, c / 2 + 1)
            }
        })
        .collect();
    parts.join("x")
}

/// Mixed-radix index of doubled coordinates within `0..=2n` per axis.
struct Lattice {
    extent: Vec<usize>,
}

impl Lattice {
    fn new(shape: &[usize]) -> Self {
        Lattice {
            extent: shape.iter().map(|&n| 2 * n + 1).collect(),
        }
    }

    fn size(&self) -> usize {
        self.extent.iter().product()
    }

    fn coords(&self, mut pos: usize, out: &mut [u32]) {
        for k in (0..self.extent.len()).rev() {
            out[k] = (pos % self.extent[k]) as u32;
            pos /= self.extent[k];
        }
    }

    fn position(&self, c: &[u32]) -> usize {
        c.iter().zip(&self.extent).fold(0, |acc, (&x, &e)| acc * e + x as usize)
    }
}

// Top cells whose closure contains the cell at `c`, as flat value indices.
fn star_tops(shape: &[usize], c: &[u32], out: &mut Vec<usize>) {
    out.clear();
    out.push(0);
    for (k, &x) in c.iter().enumerate() {
        let n = shape[k];
        let choices: &[i64] = if x % 2 == 1 { &[0] } else { &[-1, 0] };
        let base = (x / 2) as i64;
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for &acc in out.iter() {
            for &d in choices {
                let i = base + d;
                if i >= 0 && (i as usize) < n {
                    next.push(acc * n + i as usize);
                }
            }
        }
        *out = next;
    }
}

/// The cubical complex of the present top cells and all their faces,
/// minus cells on the upper boundary of open axes. Cells are listed in
/// row-major order of their doubled coordinates. Returns the complex and,
/// per cell, the value index of the minimal top cell in its star (by
/// `key`).
fn cubical_cells(
    field: PrimeField,
    shape: &[usize],
    open: &[bool],
    present: impl Fn(usize) -> bool,
    key: impl Fn(usize) -> f64,
) -> (CellComplex, Vec<usize>) {
    let d = shape.len();
    let lattice = Lattice::new(shape);
    let mut index = vec![u32::MAX; lattice.size()];
    let mut coords = Vec::new();
    let mut min_top = Vec::new();
    let mut c = vec![0u32; d];
    let mut tops = Vec::new();
    let mut b = ComplexBuilder::new(field);
    for pos in 0..lattice.size() {
        lattice.coords(pos, &mut c);
        if (0..d).any(|k| open[k] && c[k] as usize == 2 * shape[k]) {
            continue;
        }
        star_tops(shape, &c, &mut tops);
        let best = tops
            .iter()
            .copied()
            .filter(|&t| present(t))
            .min_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
        let Some(best) = best else { continue };
        let dim = c.iter().filter(|&&x| x % 2 == 1).count() as u32;
        let idx = b.add_cell(cell_label(&c), dim).expect("labels are unique");
        index[pos] = idx as u32;
        coords.extend_from_slice(&c);
        min_top.push(best);
    }
    let n = min_top.len();
    for i in 0..n {
        let c = &coords[i * d..(i + 1) * d];
        let mut preceding = 0;
        let mut f = c.to_vec();
        for k in 0..d {
            if c[k] % 2 == 0 {
                continue;
            }
            let sign: i64 = if preceding % 2 == 0 { 1 } else { -1 };
            for (delta, s) in [(1i64, sign), (-1, -sign)] {
                f[k] = (c[k] as i64 + delta) as u32;
                let j = index[lattice.position(&f)];
                if j != u32::MAX {
                    b.add_incidence(i, j as usize, s).expect("in range");
                }
            }
            f[k] = c[k];
            preceding += 1;
        }
    }
    b.set_coords(d, coords).expect("one coordinate tuple per cell");
    (b.build(), min_top)
}

/// Ungraded cubical complex on the present top cells.
pub fn cubical_complex(field: PrimeField, shape: &[usize], open: &[bool], present: &[bool]) -> CellComplex {
    cubical_cells(field, shape, open, |t| present[t], |_| 0.0).0
}

/// The graded cubical complex of a grid: every cell is graded by the
/// minimum value over the top cells in its star, with the distinct values
/// forming a chain poset.
pub fn build_complex(grid: &CubicalGrid, field: PrimeField) -> Result<GradedComplex, CubicalError> {
    let vals = &grid.values;
    let (complex, min_top) = cubical_cells(
        field,
        &grid.shape,
        &grid.open,
        |t| vals[t].is_some(),
        |t| vals[t].unwrap_or(f64::INFINITY),
    );
    let mut distinct: Vec<f64> = vals.iter().flatten().copied().collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let labels: Vec<String> = distinct.iter().map(|v| v.to_string()).collect();
    let poset = Poset::chain(labels).map_err(GradedError::from)?;
    let grades = min_top
        .iter()
        .map(|&t| {
            let v = vals[t].unwrap();
            distinct.binary_search_by(|x| x.total_cmp(&v)).unwrap() as u32
        })
        .collect();
    Ok(GradedComplex::new(Arc::new(complex), Arc::new(poset), grades)?)
}

/// The complex on `[0, n]` with vertices `v0..vn` and edges `e0..e(n-1)`,
/// `∂e_k = v_{k+1} − v_k`.
pub fn interval_complex(field: PrimeField, n_edges: usize) -> CellComplex {
    let mut b = ComplexBuilder::with_capacity(field, 2 * n_edges + 1);
    for k in 0..=n_edges {
        b.add_cell(format!("v{k}"), 0).expect("unique");
    }
    for k in 0..n_edges {
        let e = b.add_cell(format!("e{k}"), 1).expect("unique");
        b.add_incidence(e, k + 1, 1).expect("in range");
        b.add_incidence(e, k, -1).expect("in range");
    }
    b.build()
}

/// [`interval_complex`] graded by `vertex(k)` on `v_k` and `edge(k)` on `e_k`.
pub fn interval_graded(
    field: PrimeField,
    n_edges: usize,
    poset: Arc<Poset>,
    vertex: impl Fn(usize) -> usize,
    edge: impl Fn(usize) -> usize,
) -> Result<GradedComplex, CubicalError> {
    let complex = interval_complex(field, n_edges);
    let grades = (0..=n_edges)
        .map(|k| vertex(k) as u32)
        .chain((0..n_edges).map(|k| edge(k) as u32))
        .collect();
    Ok(GradedComplex::new(Arc::new(complex), poset, grades)?)
}

fn pack(c: &[u32], bits: u32) -> Option<u64> {
    let mut key = 0u64;
    for &x in c {
        if bits < 32 && x >> bits != 0 {
            return None;
        }
        key = (key << bits) | x as u64;
    }
    Some(key)
}

/// Pairs every cell that is a point along `axis` with its coface one step
/// in the positive `axis` direction, when that coface is present, in the
/// same fiber, and has nonzero incidence. Pairs on cycles of `≪` are
/// dropped.
pub fn coordinate_matching(g: &GradedComplex, axis: usize) -> Result<Matching, CubicalError> {
    let x = g.complex();
    let coords = x.coords().ok_or(CubicalError::NotCubical)?;
    let axes = coords.axes();
    if axis >= axes {
        return Err(CubicalError::Axis { axis, axes });
    }
    let bits = (64 / axes as u32).min(32);
    let mut keys = HashMap::with_capacity(x.len());
    for i in 0..x.len() {
        keys.insert(pack(coords.of(i), bits).ok_or(CubicalError::KeyOverflow)?, i);
    }
    let mut pairs = Vec::new();
    let mut up = vec![0u32; axes];
    for i in 0..x.len() {
        let c = coords.of(i);
        if c[axis] % 2 == 1 {
            continue;
        }
        up.copy_from_slice(c);
        up[axis] += 1;
        let Some(key) = pack(&up, bits) else { continue };
        if let Some(&u) = keys.get(&key) {
            if g.grade(u) == g.grade(i) && x.kappa(u, i) != 0 {
                pairs.push((i, u));
            }
        }
    }
    Ok(Matching::from_pairs_pruned(x, &pairs)?)
}
