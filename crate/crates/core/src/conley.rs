//! Iterated graded Morse reduction down to a strict complex: homology when
//! the grading is trivial, a Conley complex and connection matrix otherwise.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::bitset::BitSet;
use crate::chain::Chain;
use crate::complex::CellComplex;
use crate::cubical;
use crate::graded::{FiberGraph, GradedComplex};
use crate::linalg;
use crate::morse::{self, Matching, MorseError, Reduction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConleyError {
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error("the coordinate strategy needs cubical coordinates")]
    NotCubical,
    #[error(transparent)]
    Cubical(#[from] cubical::CubicalError),
    #[error("cell subset of the poset is not convex")]
    NotConvex,
    #[error("result is not strict")]
    NotStrict,
}

/// How each iteration picks its graded matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Coreduction inside every fiber.
    #[default]
    Coreduction,
    /// Match cells with their coface in the next coordinate direction,
    /// cycling through the axes; once a full round of axes makes no
    /// progress, continue with coreduction.
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConleyOptions {
    pub strategy: Strategy,
    /// Keep each stage of the tower. When off, only the composed reduction
    /// is kept and stage reductions do not memoize columns.
    pub retain_tower: bool,
}

impl Default for ConleyOptions {
    fn default() -> Self {
        ConleyOptions {
            strategy: Strategy::Coreduction,
            retain_tower: true,
        }
    }
}

impl ConleyOptions {
    pub fn with_strategy(strategy: Strategy) -> Self {
        ConleyOptions {
            strategy,
            ..Default::default()
        }
    }
}

/// The strict complex, the tower of reductions leading to it, and the
/// composed reduction from the input onto it.
#[derive(Debug, Clone)]
pub struct ConleyResult {
    pub result: GradedComplex,
    pub tower: Vec<Arc<Reduction>>,
    pub composed: Arc<Reduction>,
    /// Number of Morse stages, whether or not the tower was retained.
    pub stages: usize,
}

impl ConleyResult {
    /// Ids of the surviving cells after each stage.
    pub fn stage_cells(&self) -> Vec<Vec<String>> {
        self.tower
            .iter()
            .map(|r| r.target().cells().iter().map(|c| c.id.clone()).collect())
            .collect()
    }
}

/// Homology by iterated coreduction: the result has zero boundary and its
/// degree-`n` part has dimension `dim H_n`.
pub fn homology(complex: Arc<CellComplex>) -> ConleyResult {
    homology_with(complex, ConleyOptions::default()).expect("coreduction matchings are acyclic")
}

pub fn homology_with(complex: Arc<CellComplex>, options: ConleyOptions) -> Result<ConleyResult, ConleyError> {
    let r = connection_matrix(&GradedComplex::trivial(complex), options)?;
    debug_assert!((0..r.result.len()).all(|i| r.result.complex().boundary_of(i).is_empty()));
    Ok(r)
}

struct CoordinateState {
    axes: usize,
    axis: usize,
    idle: usize,
}

/// Repeats graded matching and reduction until no cell can be matched. The
/// result is strict and each of its fibers has the homology of the
/// corresponding input fiber as its chain groups.
pub fn connection_matrix(g: &GradedComplex, options: ConleyOptions) -> Result<ConleyResult, ConleyError> {
    let positions = g.grade_positions();
    let mut coord = match options.strategy {
        Strategy::Coreduction => None,
        Strategy::Coordinate => {
            let c = g.complex().coords().ok_or(ConleyError::NotCubical)?;
            Some(CoordinateState {
                axes: c.axes(),
                axis: 0,
                idle: 0,
            })
        }
    };
    let mut current = g.clone();
    let mut tower = Vec::new();
    let mut composed: Option<Arc<Reduction>> = None;
    let mut stages = 0;
    loop {
        let matching = match coord.as_mut() {
            Some(state) => {
                let m = cubical::coordinate_matching(&current, state.axis)?;
                state.axis = (state.axis + 1) % state.axes;
                if m.num_critical() == current.len() {
                    state.idle += 1;
                    if state.idle >= state.axes {
                        coord = None;
                    }
                    continue;
                }
                state.idle = 0;
                m
            }
            None => morse::matching_graded_coreduction(current.complex(), current.grades(), &positions),
        };
        if matching.num_critical() == current.len() {
            break;
        }
        let step = reduce(&current, matching, options.retain_tower)?;
        stages += 1;
        current = step.1;
        let red = Arc::new(step.0);
        composed = Some(match composed {
            None => red.clone(),
            Some(c) => Arc::new(morse::compose(c, red.clone())?),
        });
        if options.retain_tower {
            tower.push(red);
        }
    }
    if !current.is_strict() {
        return Err(ConleyError::NotStrict);
    }
    let composed = composed.unwrap_or_else(|| Arc::new(Reduction::identity(g.complex().clone())));
    Ok(ConleyResult {
        result: current,
        tower,
        composed,
        stages,
    })
}

fn reduce(g: &GradedComplex, matching: Matching, memoize: bool) -> Result<(Reduction, GradedComplex), ConleyError> {
    let critical = matching.critical();
    let mut red = morse::build_reduction(g.complex().clone(), matching)?;
    if !memoize {
        red = red.without_cache();
    }
    let grades = critical.iter().map(|&i| g.grades()[i]).collect();
    let next = GradedComplex::new_unchecked(red.target().clone(), g.poset().clone(), grades);
    Ok((red, next))
}

/// A block of a boundary matrix between two sets of cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// One chain per column, indexed by row position.
    pub columns: Vec<Chain>,
    field: crate::field::PrimeField,
}

impl Block {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn rank(&self) -> usize {
        linalg::rank(self.field, &self.columns)
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Chain::is_zero)
    }

    pub fn entry(&self, row: usize, col: usize) -> u32 {
        self.columns[col].coefficient(row)
    }
}

/// The block `π^I ∂ ι^J` of the boundary of `g`, for convex `I` (rows) and
/// `J` (columns). With `degree = Some(j)` only columns of dimension `j`
/// (and rows of dimension `j − 1`) are kept.
pub fn connecting_block(g: &GradedComplex, rows: &BitSet, cols: &BitSet, degree: Option<u32>) -> Result<Block, ConleyError> {
    let poset = g.poset();
    if !poset.is_convex(rows) || !poset.is_convex(cols) {
        return Err(ConleyError::NotConvex);
    }
    let x = g.complex();
    let col_ok = |i: usize| cols.contains(g.grade(i)) && degree.is_none_or(|d| x.dim(i) == d);
    let row_ok = |i: usize| rows.contains(g.grade(i)) && degree.is_none_or(|d| d >= 1 && x.dim(i) == d - 1);
    let row_cells: Vec<usize> = (0..g.len()).filter(|&i| row_ok(i)).collect();
    let col_cells: Vec<usize> = (0..g.len()).filter(|&i| col_ok(i)).collect();
    let mut pos = vec![usize::MAX; g.len()];
    for (k, &i) in row_cells.iter().enumerate() {
        pos[i] = k;
    }
    let columns = col_cells
        .iter()
        .map(|&j| {
            x.boundary_chain(j).reindex(|i| match pos[i] {
                usize::MAX => None,
                k => Some(k),
            })
        })
        .collect();
    Ok(Block {
        rows: row_cells,
        cols: col_cells,
        columns,
        field: x.field(),
    })
}

/// Ranks of the boundary restricted to every interval `[p, q] = ↑p ∩ ↓q`
/// of the poset, per degree: `(p, q, degree) ↦ rank`. For a strict complex
/// these are invariants of the Conley complex, independent of the basis.
pub fn interval_ranks(g: &GradedComplex) -> BTreeMap<(usize, usize, u32), usize> {
    let poset = g.poset();
    let max_dim = g.complex().max_dim().unwrap_or(0);
    let mut out = BTreeMap::new();
    for p in 0..poset.len() {
        for q in 0..poset.len() {
            if !poset.leq(p, q) {
                continue;
            }
            let interval = poset.principal_up_set(p).intersection(poset.principal_down_set(q).members());
            for d in 1..=max_dim {
                let b = connecting_block(g, &interval, &interval, Some(d)).expect("intervals are convex");
                out.insert((p, q, d), b.rank());
            }
        }
    }
    out
}

/// The fiber graph of the strict result.
pub fn conley_morse_graph(r: &ConleyResult) -> FiberGraph {
    r.result.fiber_graph()
}
