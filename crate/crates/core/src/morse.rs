//! Acyclic partial matchings, the splitting homotopy they induce, and the
//! resulting reductions `(ψ, φ, γ)`, including their composition into towers.

use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use thiserror::Error;

use crate::chain::{Chain, ChainAccumulator};
use crate::complex::{Cell, CellComplex};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorseError {
    #[error("matching is not acyclic (cycle through `{0}`)")]
    NotAcyclic(String),
    #[error("invalid pair ({lower}, {upper}): {reason}")]
    InvalidPair {
        lower: String,
        upper: String,
        reason: &'static str,
    },
    #[error("matching has {got} cells, complex has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("target of the first reduction is not the source of the second")]
    ComplexMismatch,
}

/// Role of a cell in a matching `(A, Q, K, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// In `A`.
    Critical,
    /// In `Q`, the domain of `w`.
    Lower,
    /// In `K = w(Q)`.
    Upper,
}

/// An acyclic partial matching on the cells of one complex.
///
/// `rank` is a linear extension of the `≪` order on `Q`: whenever
/// `κ(w(ξ), ξ'') ≠ 0` for some other `ξ'' ∈ Q`, `rank(ξ'') < rank(ξ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    roles: Vec<Role>,
    partner: Vec<u32>,
    rank: Vec<u64>,
}

impl Matching {
    /// The empty matching, `A = X`.
    pub fn trivial(n: usize) -> Self {
        Matching {
            roles: vec![Role::Critical; n],
            partner: vec![NONE; n],
            rank: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    #[inline]
    pub fn role(&self, cell: usize) -> Role {
        self.roles[cell]
    }

    #[inline]
    pub fn partner(&self, cell: usize) -> Option<usize> {
        match self.partner[cell] {
            NONE => None,
            p => Some(p as usize),
        }
    }

    #[inline]
    pub fn rank(&self, cell: usize) -> u64 {
        self.rank[cell]
    }

    pub fn is_critical(&self, cell: usize) -> bool {
        self.roles[cell] == Role::Critical
    }

    pub fn critical(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_critical(i)).collect()
    }

    pub fn num_critical(&self) -> usize {
        self.roles.iter().filter(|&&r| r == Role::Critical).count()
    }

    /// Matched pairs `(ξ, w(ξ))` in index order of `ξ`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len())
            .filter(|&i| self.roles[i] == Role::Lower)
            .map(|i| (i, self.partner[i] as usize))
    }

    /// Builds a matching from `(lower, upper)` pairs, ordering `Q` by a
    /// topological sort of `≪`. Fails if the pairs are inconsistent or `≪`
    /// has a cycle.
    pub fn from_pairs(complex: &CellComplex, pairs: &[(usize, usize)]) -> Result<Self, MorseError> {
        let mut m = Self::unranked(complex, pairs)?;
        let order = m.topological_q_order(complex);
        let q = m.roles.iter().filter(|&&r| r == Role::Lower).count();
        if order.len() < q {
            let bad = (0..m.len())
                .find(|&i| m.roles[i] == Role::Lower && !order.contains(&i))
                .unwrap();
            return Err(MorseError::NotAcyclic(complex.id(bad).to_string()));
        }
        for (k, &i) in order.iter().enumerate() {
            m.rank[i] = k as u64;
        }
        Ok(m)
    }

    /// Like [`Matching::from_pairs`], but pairs lying on a cycle of `≪` are
    /// dropped (their cells become critical) instead of failing.
    pub fn from_pairs_pruned(complex: &CellComplex, pairs: &[(usize, usize)]) -> Result<Self, MorseError> {
        let mut m = Self::unranked(complex, pairs)?;
        for i in m.cyclic_q_cells(complex) {
            let u = m.partner[i] as usize;
            m.roles[i] = Role::Critical;
            m.roles[u] = Role::Critical;
            m.partner[i] = NONE;
            m.partner[u] = NONE;
        }
        let order = m.topological_q_order(complex);
        for (k, &i) in order.iter().enumerate() {
            m.rank[i] = k as u64;
        }
        Ok(m)
    }

    fn unranked(complex: &CellComplex, pairs: &[(usize, usize)]) -> Result<Self, MorseError> {
        let n = complex.len();
        let mut m = Matching::trivial(n);
        for &(lo, up) in pairs {
            let err = |reason| MorseError::InvalidPair {
                lower: complex.id(lo.min(n - 1)).to_string(),
                upper: complex.id(up.min(n - 1)).to_string(),
                reason,
            };
            if lo >= n || up >= n {
                return Err(err("cell out of range"));
            }
            if lo == up || m.roles[lo] != Role::Critical || m.roles[up] != Role::Critical {
                return Err(err("cell matched twice"));
            }
            if complex.kappa(up, lo) == 0 {
                return Err(err("zero incidence"));
            }
            m.roles[lo] = Role::Lower;
            m.roles[up] = Role::Upper;
            m.partner[lo] = up as u32;
            m.partner[up] = lo as u32;
        }
        Ok(m)
    }

    /// Other `Q` cells in the boundary of `w(ξ)`, i.e. the `ξ''` with `ξ'' ≪ ξ`.
    fn below<'a>(&'a self, complex: &'a CellComplex, q: usize) -> impl Iterator<Item = usize> + 'a {
        let u = self.partner[q] as usize;
        complex
            .boundary_of(u)
            .iter()
            .map(|e| e.0 as usize)
            .filter(move |&f| f != q && self.roles[f] == Role::Lower)
    }

    // Kahn's algorithm on ≪, smallest first; cells on or above a cycle are
    // left out.
    fn topological_q_order(&self, complex: &CellComplex) -> Vec<usize> {
        let n = self.len();
        let mut indeg = vec![0usize; n];
        let mut above: Vec<Vec<usize>> = vec![Vec::new(); n];
        for q in (0..n).filter(|&i| self.roles[i] == Role::Lower) {
            for f in self.below(complex, q) {
                indeg[q] += 1;
                above[f].push(q);
            }
        }
        let mut queue: VecDeque<usize> = (0..n)
            .filter(|&i| self.roles[i] == Role::Lower && indeg[i] == 0)
            .collect();
        let mut order = Vec::new();
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in &above[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    queue.push_back(y);
                }
            }
        }
        order
    }

    // Cells of Q in strongly connected components of ≪ with more than one
    // element (iterative Tarjan).
    fn cyclic_q_cells(&self, complex: &CellComplex) -> Vec<usize> {
        let n = self.len();
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                if self.roles[i] == Role::Lower {
                    self.below(complex, i).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut counter = 0;
        let mut out = Vec::new();
        for root in (0..n).filter(|&i| self.roles[i] == Role::Lower) {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut k)) = call.last_mut() {
                if *k < succ[v].len() {
                    let w = succ[v][*k];
                    *k += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        if comp.len() > 1 {
                            out.extend(comp);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Checks the matching invariants against `complex`: partition, nonzero
    /// incidence of every pair, acyclicity of `≪`, and that `rank` is a
    /// linear extension of `≪`.
    pub fn validate(&self, complex: &CellComplex) -> Result<(), MorseError> {
        if self.len() != complex.len() {
            return Err(MorseError::SizeMismatch {
                expected: complex.len(),
                got: self.len(),
            });
        }
        for i in 0..self.len() {
            let bad = |reason| MorseError::InvalidPair {
                lower: complex.id(i).to_string(),
                upper: self
                    .partner(i)
                    .map_or_else(|| "-".to_string(), |p| complex.id(p).to_string()),
                reason,
            };
            match self.roles[i] {
                Role::Critical => {
                    if self.partner[i] != NONE {
                        return Err(bad("critical cell has a partner"));
                    }
                }
                Role::Lower => {
                    let u = self.partner(i).ok_or_else(|| bad("unpaired cell in Q"))?;
                    if self.roles[u] != Role::Upper || self.partner[u] as usize != i {
                        return Err(bad("partner is not symmetric"));
                    }
                    if complex.kappa(u, i) == 0 {
                        return Err(bad("zero incidence"));
                    }
                    for f in self.below(complex, i) {
                        if self.rank[f] >= self.rank[i] {
                            return Err(bad("rank is not a linear extension"));
                        }
                    }
                }
                Role::Upper => {
                    let q = self.partner(i).ok_or_else(|| bad("unpaired cell in K"))?;
                    if self.roles[q] != Role::Lower {
                        return Err(bad("partner is not symmetric"));
                    }
                }
            }
        }
        if let Some(&c) = self.cyclic_q_cells(complex).first() {
            return Err(MorseError::NotAcyclic(complex.id(c).to_string()));
        }
        Ok(())
    }

    /// True iff every pair lies within one fiber of `grades`.
    pub fn is_graded(&self, grades: &[u32]) -> bool {
        self.pairs().all(|(q, k)| grades[q] == grades[k])
    }
}

/// The coreduction matching: repeatedly excise a coreduction pair (a cell
/// with exactly one remaining face, together with that face) and, when none
/// is available, a free cell of minimal dimension.
pub fn matching_coreduction(complex: &CellComplex) -> Matching {
    let n = complex.len();
    let mut m = Matching::trivial(n);
    let mut remaining: Vec<u32> = (0..n).map(|i| complex.boundary_of(i).len() as u32).collect();
    let mut excised = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| remaining[i] == 1).collect();
    let mut by_dim: Vec<usize> = (0..n).collect();
    by_dim.sort_by_key(|&i| (complex.dim(i), i));
    let mut cursor = 0;
    let mut counter = 0u64;

    let excise = |x: usize, excised: &mut Vec<bool>, remaining: &mut Vec<u32>, queue: &mut VecDeque<usize>| {
        excised[x] = true;
        for &(c, _) in complex.coboundary_of(x) {
            let c = c as usize;
            if !excised[c] {
                remaining[c] -= 1;
                if remaining[c] == 1 {
                    queue.push_back(c);
                }
            }
        }
    };

    loop {
        while let Some(c) = queue.pop_front() {
            if excised[c] || remaining[c] != 1 {
                continue;
            }
            let f = complex
                .boundary_of(c)
                .iter()
                .map(|e| e.0 as usize)
                .find(|&f| !excised[f])
                .expect("remaining face");
            m.roles[f] = Role::Lower;
            m.roles[c] = Role::Upper;
            m.partner[f] = c as u32;
            m.partner[c] = f as u32;
            m.rank[f] = counter;
            m.rank[c] = counter;
            counter += 1;
            excise(f, &mut excised, &mut remaining, &mut queue);
            excise(c, &mut excised, &mut remaining, &mut queue);
        }
        while cursor < n && excised[by_dim[cursor]] {
            cursor += 1;
        }
        if cursor == n {
            break;
        }
        // every face of a remaining cell of minimal dimension is gone
        let x = by_dim[cursor];
        m.rank[x] = counter;
        counter += 1;
        excise(x, &mut excised, &mut remaining, &mut queue);
    }
    m
}

/// Coreduction run independently inside each fiber of `grades`, so no pair
/// crosses fibers. `position[g]` is the place of grade `g` in a linear
/// extension of the grading poset; it orders `≪` across fibers.
pub fn matching_graded_coreduction(complex: &CellComplex, grades: &[u32], position: &[usize]) -> Matching {
    let n = complex.len();
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); position.len()];
    let mut local = vec![0u32; n];
    for i in 0..n {
        let g = grades[i] as usize;
        local[i] = fibers[g].len() as u32;
        fibers[g].push(i);
    }
    let nonempty = fibers.iter().filter(|f| !f.is_empty()).count();
    if nonempty <= 1 {
        let mut m = matching_coreduction(complex);
        if let Some(g) = fibers.iter().position(|f| !f.is_empty()) {
            let base = (position[g] as u64) << 32;
            for r in &mut m.rank {
                *r |= base;
            }
        }
        return m;
    }
    let parts: Vec<(usize, Matching, Vec<usize>)> = fibers
        .into_par_iter()
        .enumerate()
        .filter(|(_, cells)| !cells.is_empty())
        .map(|(g, cells)| {
            let gg = g as u32;
            let sub = complex.restrict_with(cells, |j| (grades[j] == gg).then(|| local[j]));
            (g, matching_coreduction(&sub.complex), sub.parent)
        })
        .collect();
    let mut m = Matching::trivial(n);
    for (g, local_m, parent) in parts {
        let base = (position[g] as u64) << 32;
        for (k, &i) in parent.iter().enumerate() {
            m.roles[i] = local_m.roles[k];
            m.rank[i] = base | local_m.rank[k];
            if let Some(p) = local_m.partner(k) {
                m.partner[i] = parent[p] as u32;
            }
        }
    }
    m
}

/// `V(x) = κ(w(x), x)⁻¹ · w(x)` for `x ∈ Q`, zero otherwise.
pub fn v_map(complex: &CellComplex, matching: &Matching, x: usize) -> Chain {
    match (matching.role(x), matching.partner(x)) {
        (Role::Lower, Some(u)) => {
            let f = complex.field();
            let k = complex.kappa(u, x);
            Chain::from_terms(f, [(u, f.inv(k).expect("nonzero incidence"))])
        }
        _ => Chain::zero(),
    }
}

/// Result of running the splitting homotopy on a chain `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaOutput {
    /// `γ(x)`, supported on `K`.
    pub homotopy: Chain,
    /// `x − ∂γ(x)`, supported on `A ∪ K`.
    pub residual: Chain,
}

/// Evaluates the splitting homotopy of `matching` on `x` by repeatedly
/// clearing the `Q` term of largest rank.
pub fn gamma(complex: &CellComplex, matching: &Matching, x: &Chain) -> Result<GammaOutput, MorseError> {
    let f = complex.field();
    let mut acc = ChainAccumulator::from_chain(f, x);
    let mut hom = ChainAccumulator::new(f);
    let mut heap = BinaryHeap::new();
    let mut queued = HashSet::new();
    for &(i, _) in x.terms() {
        if matching.role(i) == Role::Lower && queued.insert(i) {
            heap.push((matching.rank(i), i));
        }
    }
    while let Some((r, q)) = heap.pop() {
        queued.remove(&q);
        let a = acc.coefficient(q);
        if a == 0 {
            continue;
        }
        let u = matching.partner[q] as usize;
        let s = f.mul(a, f.inv(complex.kappa(u, q)).expect("nonzero incidence"));
        hom.add_term(u, s);
        let ns = f.neg(s);
        for &(face, k) in complex.boundary_of(u) {
            let face = face as usize;
            let c = acc.add_term(face, f.mul(ns, k));
            if c != 0 && matching.role(face) == Role::Lower {
                if matching.rank(face) >= r {
                    return Err(MorseError::NotAcyclic(complex.id(face).to_string()));
                }
                if queued.insert(face) {
                    heap.push((matching.rank(face), face));
                }
            }
        }
    }
    Ok(GammaOutput {
        homotopy: hom.into_chain(),
        residual: acc.into_chain(),
    })
}

#[derive(Debug)]
struct MorseMaps {
    matching: Matching,
    to_target: Vec<u32>,
    from_target: Vec<usize>,
}

#[derive(Debug)]
enum Kind {
    Identity,
    Morse(MorseMaps),
    Composite(Arc<Reduction>, Arc<Reduction>),
}

#[derive(Debug, Default)]
struct Cache {
    psi: HashMap<usize, Chain>,
    gamma: HashMap<usize, Chain>,
    phi: HashMap<usize, Chain>,
}

/// A reduction `(ψ, φ, γ)` from `source` onto `target`.
///
/// Maps are evaluated lazily, one basis column at a time; columns are
/// memoized unless the reduction was built in low-memory mode.
#[derive(Debug)]
pub struct Reduction {
    source: Arc<CellComplex>,
    target: Arc<CellComplex>,
    kind: Kind,
    cache: Option<Mutex<Cache>>,
}

impl Reduction {
    pub fn identity(complex: Arc<CellComplex>) -> Self {
        Reduction {
            source: complex.clone(),
            target: complex,
            kind: Kind::Identity,
            cache: None,
        }
    }

    pub fn source(&self) -> &Arc<CellComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<CellComplex> {
        &self.target
    }

    /// The matching, for a single Morse step.
    pub fn matching(&self) -> Option<&Matching> {
        match &self.kind {
            Kind::Morse(m) => Some(&m.matching),
            _ => None,
        }
    }

    /// For a single Morse step, the source index of each target cell.
    pub fn critical_cells(&self) -> Option<&[usize]> {
        match &self.kind {
            Kind::Morse(m) => Some(&m.from_target),
            _ => None,
        }
    }

    /// Drops memoized columns and stops memoizing.
    pub fn without_cache(mut self) -> Self {
        self.cache = None;
        self
    }

    fn cached(&self, which: fn(&mut Cache) -> &mut HashMap<usize, Chain>, i: usize) -> Option<Chain> {
        let cache = self.cache.as_ref()?;
        let mut guard = cache.lock().unwrap();
        which(&mut guard).get(&i).cloned()
    }

    fn store(&self, which: fn(&mut Cache) -> &mut HashMap<usize, Chain>, i: usize, c: &Chain) {
        if let Some(cache) = &self.cache {
            which(&mut cache.lock().unwrap()).insert(i, c.clone());
        }
    }

    fn morse_columns(&self, maps: &MorseMaps, i: usize) -> (Chain, Chain) {
        match maps.matching.role(i) {
            Role::Critical => (Chain::basis(maps.to_target[i] as usize), Chain::zero()),
            Role::Upper => (Chain::zero(), Chain::zero()),
            Role::Lower => {
                let out = gamma(&self.source, &maps.matching, &Chain::basis(i)).expect("acyclic matching");
                let psi = project(&out.residual, &maps.to_target);
                (psi, out.homotopy)
            }
        }
    }

    /// `ψ` on the source basis cell `i`.
    pub fn psi_col(&self, i: usize) -> Chain {
        if let Some(c) = self.cached(|c| &mut c.psi, i) {
            return c;
        }
        let col = match &self.kind {
            Kind::Identity => Chain::basis(i),
            Kind::Morse(m) => {
                let (psi, gam) = self.morse_columns(m, i);
                self.store(|c| &mut c.gamma, i, &gam);
                psi
            }
            Kind::Composite(r1, r2) => r2.psi(&r1.psi_col(i)),
        };
        self.store(|c| &mut c.psi, i, &col);
        col
    }

    /// `γ` on the source basis cell `i`.
    pub fn gamma_col(&self, i: usize) -> Chain {
        if let Some(c) = self.cached(|c| &mut c.gamma, i) {
            return c;
        }
        let col = match &self.kind {
            Kind::Identity => Chain::zero(),
            Kind::Morse(m) => {
                let (psi, gam) = self.morse_columns(m, i);
                self.store(|c| &mut c.psi, i, &psi);
                gam
            }
            Kind::Composite(r1, r2) => {
                let f = self.source.field();
                let inner = r1.phi(&r2.gamma(&r1.psi_col(i)));
                r1.gamma_col(i).add(&inner, f)
            }
        };
        self.store(|c| &mut c.gamma, i, &col);
        col
    }

    /// `φ` on the target basis cell `a`.
    pub fn phi_col(&self, a: usize) -> Chain {
        if let Some(c) = self.cached(|c| &mut c.phi, a) {
            return c;
        }
        let col = match &self.kind {
            Kind::Identity => Chain::basis(a),
            Kind::Morse(m) => {
                let f = self.source.field();
                let x = m.from_target[a];
                let d = self.source.boundary_chain(x);
                let g = gamma(&self.source, &m.matching, &d).expect("acyclic matching");
                Chain::basis(x).sub(&g.homotopy, f)
            }
            Kind::Composite(r1, r2) => r1.phi(&r2.phi_col(a)),
        };
        self.store(|c| &mut c.phi, a, &col);
        col
    }

    pub fn psi(&self, x: &Chain) -> Chain {
        self.apply(x, |i| self.psi_col(i))
    }

    pub fn phi(&self, x: &Chain) -> Chain {
        self.apply(x, |i| self.phi_col(i))
    }

    pub fn gamma(&self, x: &Chain) -> Chain {
        self.apply(x, |i| self.gamma_col(i))
    }

    fn apply(&self, x: &Chain, col: impl Fn(usize) -> Chain) -> Chain {
        let f = self.source.field();
        match x.terms() {
            [] => Chain::zero(),
            [(i, 1)] => col(*i),
            terms => {
                let mut acc = ChainAccumulator::new(f);
                for &(i, c) in terms {
                    acc.add_chain(&col(i), c);
                }
                acc.into_chain()
            }
        }
    }

    /// `∂ = ∂γ∂` on every source basis cell; equivalently the target has
    /// zero boundary.
    pub fn is_perfect(&self) -> bool {
        let src = &self.source;
        (0..src.len()).into_par_iter().all(|i| {
            let d = src.boundary_chain(i);
            let dgd = src.boundary(&self.gamma(&d)).expect("in range");
            dgd == d
        })
    }

    /// Number of Morse steps in this reduction.
    pub fn depth(&self) -> usize {
        match &self.kind {
            Kind::Identity => 0,
            Kind::Morse(_) => 1,
            Kind::Composite(a, b) => a.depth() + b.depth(),
        }
    }
}

fn project(x: &Chain, to_target: &[u32]) -> Chain {
    x.reindex(|i| match to_target[i] {
        NONE => None,
        t => Some(t as usize),
    })
}

/// The reduction of `complex` onto its critical cells. The target boundary
/// is `∂^A(ξ) = π_A(∂ξ − ∂γ(∂ξ))`, computed in parallel per critical cell.
pub fn build_reduction(complex: Arc<CellComplex>, matching: Matching) -> Result<Reduction, MorseError> {
    if matching.len() != complex.len() {
        return Err(MorseError::SizeMismatch {
            expected: complex.len(),
            got: matching.len(),
        });
    }
    let from_target = matching.critical();
    let mut to_target = vec![NONE; complex.len()];
    for (k, &i) in from_target.iter().enumerate() {
        to_target[i] = k as u32;
    }
    let rows: Vec<Vec<(u32, u32)>> = from_target
        .par_iter()
        .map(|&x| {
            let d = complex.boundary_chain(x);
            let g = gamma(&complex, &matching, &d)?;
            Ok(project(&g.residual, &to_target)
                .into_terms()
                .into_iter()
                .map(|(j, c)| (j as u32, c))
                .collect())
        })
        .collect::<Result<_, MorseError>>()?;
    let cells: Vec<Cell> = from_target.iter().map(|&i| complex.cell(i).clone()).collect();
    let coords = complex.coords().map(|c| {
        let mut data = Vec::with_capacity(from_target.len() * c.axes());
        for &i in &from_target {
            data.extend_from_slice(c.of(i));
        }
        crate::complex::CubeCoords::new(c.axes(), data)
    });
    let target = CellComplex::from_parts(complex.field(), cells, rows, None).with_coords(coords);
    Ok(Reduction {
        source: complex,
        target: Arc::new(target),
        kind: Kind::Morse(MorseMaps {
            matching,
            to_target,
            from_target,
        }),
        cache: Some(Mutex::new(Cache::default())),
    })
}

fn same_complex(a: &Arc<CellComplex>, b: &Arc<CellComplex>) -> bool {
    if Arc::ptr_eq(a, b) {
        return true;
    }
    a.len() == b.len()
        && a.field() == b.field()
        && (0..a.len()).all(|i| a.cell(i) == b.cell(i) && a.boundary_of(i) == b.boundary_of(i))
}

/// `ψ'' = ψ'ψ`, `φ'' = φφ'`, `γ'' = γ + φγ'ψ`.
pub fn compose(first: Arc<Reduction>, second: Arc<Reduction>) -> Result<Reduction, MorseError> {
    if !same_complex(&first.target, &second.source) {
        return Err(MorseError::ComplexMismatch);
    }
    let memo = first.cache.is_some() || second.cache.is_some();
    Ok(Reduction {
        source: first.source.clone(),
        target: second.target.clone(),
        kind: Kind::Composite(first, second),
        cache: memo.then(|| Mutex::new(Cache::default())),
    })
}
