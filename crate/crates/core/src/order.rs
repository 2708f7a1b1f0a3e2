//! Finite posets, down-sets and the lattice of down-sets.
//!
//! Elements are addressed by index; labels are kept for I/O. The reflexive
//! transitive closure is materialized as one bit set per element on
//! construction, so `leq` is a single bit test.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::bitset::BitSet;

/// Default cap on the number of elements for full down-set enumeration.
pub const DEFAULT_LATTICE_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("unknown poset element `{0}`")]
    UnknownElement(String),
    #[error("duplicate poset element `{0}`")]
    DuplicateElement(String),
    #[error("order relation contains a cycle through `{0}`")]
    Cycle(String),
    #[error("poset has {size} elements, lattice enumeration is capped at {cap}")]
    LatticeCapExceeded { size: usize, cap: usize },
    #[error("map covers {given} of {expected} elements")]
    PartialMap { given: usize, expected: usize },
    #[error("set is not a down-set")]
    NotDownSet,
    #[error("not a linear extension: {0}")]
    NotLinearExtension(String),
}

#[derive(Debug, Clone)]
pub struct Poset {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    below: Vec<BitSet>,
    above: Vec<BitSet>,
    hasse: Vec<(usize, usize)>,
    topo: Vec<usize>,
}

/// A down-set of a poset, stored as a bit mask over element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DownSet {
    members: BitSet,
}

impl DownSet {
    pub fn members(&self) -> &BitSet {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    pub fn len(&self) -> usize {
        self.members.count()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter()
    }

    /// Union of down-sets is a down-set.
    pub fn union(&self, other: &DownSet) -> DownSet {
        DownSet {
            members: self.members.union(&other.members),
        }
    }

    /// Intersection of down-sets is a down-set.
    pub fn intersection(&self, other: &DownSet) -> DownSet {
        DownSet {
            members: self.members.intersection(&other.members),
        }
    }

    pub fn is_subset(&self, other: &DownSet) -> bool {
        self.members.is_subset(&other.members)
    }
}

impl Poset {
    /// Builds a poset from labels and generating relations `(lower, upper)`.
    /// The relations need not be covers; the Hasse diagram is recomputed.
    pub fn new<S: AsRef<str>>(labels: &[S], relations: &[(S, S)]) -> Result<Self, OrderError> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(OrderError::DuplicateElement(l.clone()));
            }
        }
        let mut pairs = Vec::with_capacity(relations.len());
        for (lo, hi) in relations {
            let lo = *index
                .get(lo.as_ref())
                .ok_or_else(|| OrderError::UnknownElement(lo.as_ref().to_string()))?;
            let hi = *index
                .get(hi.as_ref())
                .ok_or_else(|| OrderError::UnknownElement(hi.as_ref().to_string()))?;
            pairs.push((lo, hi));
        }
        Self::from_indices(labels, index, &pairs)
    }

    /// Builds a poset over `labels.len()` elements from index relations.
    pub fn from_relations(labels: Vec<String>, relations: &[(usize, usize)]) -> Result<Self, OrderError> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(OrderError::DuplicateElement(l.clone()));
            }
        }
        Self::from_indices(labels, index, relations)
    }

    fn from_indices(
        labels: Vec<String>,
        index: HashMap<String, usize>,
        relations: &[(usize, usize)],
    ) -> Result<Self, OrderError> {
        let n = labels.len();
        let mut ups: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for &(lo, hi) in relations {
            if lo == hi {
                continue;
            }
            ups[lo].push(hi);
            indeg[hi] += 1;
        }
        let mut topo = Vec::with_capacity(n);
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        while let Some(x) = queue.pop_front() {
            topo.push(x);
            for &y in &ups[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    queue.push_back(y);
                }
            }
        }
        if topo.len() != n {
            let bad = (0..n).find(|&i| indeg[i] > 0).unwrap();
            return Err(OrderError::Cycle(labels[bad].clone()));
        }
        let mut downs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (lo, list) in ups.iter().enumerate() {
            for &hi in list {
                downs[hi].push(lo);
            }
        }
        let mut below: Vec<BitSet> = (0..n).map(|_| BitSet::new(n)).collect();
        for &x in &topo {
            let mut b = BitSet::new(n);
            b.insert(x);
            for &lo in &downs[x] {
                b.union_with(&below[lo]);
            }
            below[x] = b;
        }
        let mut above: Vec<BitSet> = (0..n).map(|_| BitSet::new(n)).collect();
        for (x, b) in below.iter().enumerate() {
            for y in b.iter() {
                above[y].insert(x);
            }
        }
        // Hasse diagram: y covers x iff x < y and no z with x < z < y.
        let mut hasse = Vec::new();
        for y in 0..n {
            for x in below[y].iter() {
                if x == y {
                    continue;
                }
                let between = below[y]
                    .iter()
                    .any(|z| z != x && z != y && below[z].contains(x));
                if !between {
                    hasse.push((x, y));
                }
            }
        }
        Ok(Poset {
            labels,
            index,
            below,
            above,
            hasse,
            topo,
        })
    }

    /// The one-element poset, used when a complex carries no grading.
    pub fn trivial() -> Self {
        Poset::from_relations(vec!["0".to_string()], &[]).expect("trivial poset")
    }

    /// A chain `labels[0] < labels[1] < ...`.
    pub fn chain(labels: Vec<String>) -> Result<Self, OrderError> {
        let rel: Vec<(usize, usize)> = (1..labels.len()).map(|i| (i - 1, i)).collect();
        Poset::from_relations(labels, &rel)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, OrderError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| OrderError::UnknownElement(label.to_string()))
    }

    /// Cover relations `(lower, upper)` of the Hasse diagram.
    pub fn hasse_covers(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    /// One fixed linear extension of the order.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.below[y].contains(x)
    }

    pub fn leq_labels(&self, x: &str, y: &str) -> Result<bool, OrderError> {
        Ok(self.leq(self.index_of(x)?, self.index_of(y)?))
    }

    /// `↓q`.
    pub fn principal_down_set(&self, q: usize) -> DownSet {
        DownSet {
            members: self.below[q].clone(),
        }
    }

    /// `↑q` as a bit set.
    pub fn principal_up_set(&self, q: usize) -> &BitSet {
        &self.above[q]
    }

    /// `←(↓q) = ↓q \ {q}`, the unique lower cover of `↓q` in the lattice.
    pub fn strict_down_set(&self, q: usize) -> DownSet {
        let mut members = self.below[q].clone();
        members.remove(q);
        DownSet { members }
    }

    pub fn empty_down_set(&self) -> DownSet {
        DownSet {
            members: BitSet::new(self.len()),
        }
    }

    pub fn full_down_set(&self) -> DownSet {
        DownSet {
            members: BitSet::full(self.len()),
        }
    }

    /// Validates that `members` is downward closed.
    pub fn down_set(&self, members: BitSet) -> Result<DownSet, OrderError> {
        if !self.is_down_set(&members) {
            return Err(OrderError::NotDownSet);
        }
        Ok(DownSet { members })
    }

    pub fn down_set_of_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<DownSet, OrderError> {
        let mut members = BitSet::new(self.len());
        for l in labels {
            members.insert(self.index_of(l.as_ref())?);
        }
        self.down_set(members)
    }

    pub fn is_down_set(&self, s: &BitSet) -> bool {
        s.iter().all(|x| self.below[x].is_subset(s))
    }

    /// The down-set generated by an arbitrary subset.
    pub fn down_closure(&self, s: &BitSet) -> DownSet {
        let mut members = BitSet::new(self.len());
        for x in s.iter() {
            members.union_with(&self.below[x]);
        }
        DownSet { members }
    }

    /// `S` is convex iff every interval `[p, q]` with `p, q ∈ S` lies in `S`,
    /// equivalently `↑S ∩ ↓S ⊆ S`.
    pub fn is_convex(&self, s: &BitSet) -> bool {
        let mut up = BitSet::new(self.len());
        let mut down = BitSet::new(self.len());
        for x in s.iter() {
            up.union_with(&self.above[x]);
            down.union_with(&self.below[x]);
        }
        up.intersection(&down).is_subset(s)
    }

    /// All down-sets, sorted by cardinality then bit pattern (a linear
    /// order compatible with inclusion).
    pub fn down_set_lattice(&self, cap: usize) -> Result<Vec<DownSet>, OrderError> {
        if self.len() > cap {
            return Err(OrderError::LatticeCapExceeded {
                size: self.len(),
                cap,
            });
        }
        let mut out = Vec::new();
        let mut current = BitSet::new(self.len());
        self.enumerate_down_sets(0, &mut current, &mut out);
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    // Walk elements in topological order; an element may join only if its
    // strict down-set is already present, so each down-set is produced once.
    fn enumerate_down_sets(&self, k: usize, current: &mut BitSet, out: &mut Vec<DownSet>) {
        if k == self.topo.len() {
            out.push(DownSet {
                members: current.clone(),
            });
            return;
        }
        let x = self.topo[k];
        self.enumerate_down_sets(k + 1, current, out);
        let mut strict = self.below[x].clone();
        strict.remove(x);
        if strict.is_subset(current) {
            current.insert(x);
            self.enumerate_down_sets(k + 1, current, out);
            current.remove(x);
        }
    }

    /// A sequence of element indices is a linear extension iff it lists every
    /// element once and each prefix is a down-set.
    pub fn check_linear_extension(&self, order: &[usize]) -> Result<(), OrderError> {
        if order.len() != self.len() {
            return Err(OrderError::NotLinearExtension(format!(
                "expected {} elements, got {}",
                self.len(),
                order.len()
            )));
        }
        let mut seen = BitSet::new(self.len());
        for &x in order {
            if x >= self.len() || !seen.insert(x) {
                return Err(OrderError::NotLinearExtension("repeated or unknown element".into()));
            }
            let mut strict = self.below[x].clone();
            strict.remove(x);
            if !strict.is_subset(&seen) {
                return Err(OrderError::NotLinearExtension(format!(
                    "`{}` listed before an element below it",
                    self.labels[x]
                )));
            }
        }
        Ok(())
    }
}

/// Join-irreducible elements of a lattice of down-sets, each paired with its
/// unique lower cover. For `O(P)` these are exactly the `↓q`.
pub fn join_irreducibles(lattice: &[DownSet], poset: &Poset) -> Vec<(DownSet, DownSet)> {
    let present: HashSet<&DownSet> = lattice.iter().collect();
    let mut out = Vec::new();
    for d in lattice {
        // lower covers in O(P) differ by removing one maximal element
        let mut covers = Vec::new();
        for x in d.iter() {
            let mut m = d.members.clone();
            m.remove(x);
            let cand = DownSet { members: m };
            if poset.is_down_set(&cand.members) && present.contains(&cand) {
                covers.push(cand);
            }
        }
        if covers.len() == 1 {
            out.push((d.clone(), covers.pop().unwrap()));
        }
    }
    out
}

/// Checks `p ≤ q ⇒ map(p) ≤ map(q)`.
pub fn order_preserving(src: &Poset, dst: &Poset, map: &[Option<usize>]) -> Result<bool, OrderError> {
    let given = map.iter().filter(|m| m.is_some()).count();
    if map.len() != src.len() || given != src.len() {
        return Err(OrderError::PartialMap {
            given,
            expected: src.len(),
        });
    }
    for y in 0..src.len() {
        let my = map[y].unwrap();
        for x in src.below[y].iter() {
            if !dst.leq(map[x].unwrap(), my) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
