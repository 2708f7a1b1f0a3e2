//! Small worked complexes with known answers, and seeded generators of
//! random graded complexes for property checks and benchmarks.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::complex::{CellComplex, ComplexBuilder};
use crate::cubical;
use crate::field::PrimeField;
use crate::graded::GradedComplex;
use crate::order::Poset;

fn chain_poset(n: usize) -> Arc<Poset> {
    Arc::new(Poset::chain((0..n).map(|i| i.to_string()).collect()).expect("distinct labels"))
}

/// Two edges `e0 = [v0, v1]`, `e1 = [v1, v2]` over the poset `p < q > r`,
/// with `v0 ↦ p`, `v2 ↦ r` and the middle cells in `q`.
pub fn branching_interval(field: PrimeField) -> GradedComplex {
    let mut b = ComplexBuilder::new(field);
    for v in ["v0", "v1", "v2"] {
        b.add_cell(v, 0).expect("unique");
    }
    b.add_cell("e0", 1).expect("unique");
    b.add_cell("e1", 1).expect("unique");
    for (e, v, c) in [("e0", "v1", 1), ("e0", "v0", -1), ("e1", "v1", 1), ("e1", "v2", -1)] {
        b.add_incidence_by_id(e, v, c).expect("known ids");
    }
    let poset = Poset::new(&["p", "q", "r"], &[("p", "q"), ("r", "q")]).expect("acyclic");
    GradedComplex::new(Arc::new(b.build()), Arc::new(poset), vec![0, 1, 2, 1, 1]).expect("order preserving")
}

/// [`branching_interval`] pushed onto `0 < 1` by `p, r ↦ 0`, `q ↦ 1`: the
/// pair (interval, both endpoints).
pub fn branching_interval_pair(field: PrimeField) -> GradedComplex {
    branching_interval(field)
        .regrade(chain_poset(2), &[0, 1, 0])
        .expect("order preserving")
}

/// [`branching_interval`] pushed onto the chain `0 < 1 < 2` by
/// `p ↦ 0`, `r ↦ 1`, `q ↦ 2`: a filtration of the interval.
pub fn filtered_interval(field: PrimeField) -> GradedComplex {
    branching_interval(field)
        .regrade(chain_poset(3), &[0, 2, 1])
        .expect("order preserving")
}

/// The interval subdivided into `n` edges over `p < q > r`: the first third
/// goes to `p`, the last third to `r`, the middle to `q`. `n` must be a
/// positive multiple of three.
pub fn compression_interval(field: PrimeField, n: usize) -> GradedComplex {
    assert!(n > 0 && n.is_multiple_of(3), "n must be a positive multiple of 3");
    let m = n / 3;
    let poset = Poset::new(&["p", "q", "r"], &[("p", "q"), ("r", "q")]).expect("acyclic");
    let grade = |l: usize, r: usize| {
        if r <= m {
            0
        } else if l >= 2 * m {
            2
        } else {
            1
        }
    };
    cubical::interval_graded(field, n, Arc::new(poset), |k| grade(k, k), |k| grade(k, k + 1))
        .expect("order preserving")
}

/// The 3×2 cubical grid open on the right of the first axis, graded over
/// `0 < 1` with the middle column's two squares and the edge between them
/// in `1` and everything else in `0`.
pub fn slit_grid(field: PrimeField) -> GradedComplex {
    let x = cubical::cubical_complex(field, &[3, 2], &[true, false], &[true; 6]);
    let upper = ["[1,2]x[0,1]", "[1,2]x[1,2]", "[1,2]x[1]"];
    let grades = x
        .cells()
        .iter()
        .map(|c| u32::from(upper.contains(&c.id.as_str())))
        .collect();
    GradedComplex::new(Arc::new(x), chain_poset(2), grades).expect("order preserving")
}

/// The closed lower piece of [`slit_grid`]: 9 vertices, 14 edges and 4
/// squares, trivially graded, with cubical coordinates.
pub fn slit_grid_lower(field: PrimeField) -> GradedComplex {
    let g = slit_grid(field);
    let down = g.poset().principal_down_set(0);
    GradedComplex::trivial(Arc::new(g.filtered_piece(&down).complex))
}

/// The `n × n` periodic cubical torus, `n ≥ 2`.
pub fn torus(field: PrimeField, n: usize) -> CellComplex {
    assert!(n >= 2);
    let mut b = ComplexBuilder::with_capacity(field, 4 * n * n);
    let at = |i: usize, j: usize| (i % n) * n + j % n;
    for i in 0..n {
        for j in 0..n {
            b.add_cell(format!("v{i}_{j}"), 0).expect("unique");
        }
    }
    let (h0, v0, s0) = (n * n, 2 * n * n, 3 * n * n);
    for i in 0..n {
        for j in 0..n {
            let e = b.add_cell(format!("h{i}_{j}"), 1).expect("unique");
            b.add_incidence(e, at(i + 1, j), 1).expect("in range");
            b.add_incidence(e, at(i, j), -1).expect("in range");
        }
    }
    for i in 0..n {
        for j in 0..n {
            let e = b.add_cell(format!("u{i}_{j}"), 1).expect("unique");
            b.add_incidence(e, at(i, j + 1), 1).expect("in range");
            b.add_incidence(e, at(i, j), -1).expect("in range");
        }
    }
    for i in 0..n {
        for j in 0..n {
            let s = b.add_cell(format!("s{i}_{j}"), 2).expect("unique");
            debug_assert_eq!(s, s0 + at(i, j));
            b.add_incidence(s, h0 + at(i, j), 1).expect("in range");
            b.add_incidence(s, v0 + at(i + 1, j), 1).expect("in range");
            b.add_incidence(s, h0 + at(i, j + 1), -1).expect("in range");
            b.add_incidence(s, v0 + at(i, j), -1).expect("in range");
        }
    }
    b.build()
}

/// A random poset on `1..=max` elements labelled `0, 1, ...`, with each
/// index-increasing relation present with probability 0.4.
pub fn random_poset(rng: &mut impl Rng, max: usize) -> Poset {
    let n = rng.gen_range(1..=max.max(1));
    let mut relations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                relations.push((i, j));
            }
        }
    }
    Poset::from_relations((0..n).map(|i| i.to_string()).collect(), &relations).expect("index order is acyclic")
}

/// Closure of random simplices of dimension ≤ 3 on a few vertices, grown
/// towards a random size of at most `max_cells` cells. Oriented simplicial
/// signs are rescaled by random units per cell, which keeps `∂∂ = 0` for
/// any field.
pub fn random_simplicial(rng: &mut impl Rng, field: PrimeField, max_cells: usize) -> CellComplex {
    let nv = rng.gen_range(4..=9usize);
    let target = rng.gen_range(max_cells.min(nv)..=max_cells.max(1));
    let mut simplices: BTreeSet<Vec<usize>> = BTreeSet::new();
    for v in 0..nv {
        if simplices.len() < target && rng.gen_bool(0.9) {
            simplices.insert(vec![v]);
        }
    }
    for _ in 0..40 {
        let k = rng.gen_range(2..=4.min(nv));
        let mut verts: Vec<usize> = (0..nv).collect();
        verts.shuffle(rng);
        let mut s = verts[..k].to_vec();
        s.sort_unstable();
        let closure = faces_closure(&s);
        let new = closure.iter().filter(|f| !simplices.contains(*f)).count();
        if simplices.len() + new <= target {
            simplices.extend(closure);
        }
    }
    let mut sorted: Vec<Vec<usize>> = simplices.into_iter().collect();
    sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let p = field.modulus() as i64;
    let units: Vec<i64> = sorted.iter().map(|_| rng.gen_range(1..p)).collect();
    let mut b = ComplexBuilder::with_capacity(field, sorted.len());
    let name = |s: &[usize]| s.iter().map(usize::to_string).collect::<Vec<_>>().join("-");
    for s in &sorted {
        b.add_cell(name(s), (s.len() - 1) as u32).expect("unique");
    }
    for (i, s) in sorted.iter().enumerate() {
        if s.len() < 2 {
            continue;
        }
        for k in 0..s.len() {
            let mut f = s.clone();
            f.remove(k);
            let j = b.index_of(&name(&f)).expect("closed under faces");
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let inv = field.inv(field.reduce(units[j])).expect("unit") as i64;
            b.add_incidence(i, j, sign * units[i] * inv).expect("in range");
        }
    }
    b.build()
}

fn faces_closure(s: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << s.len()) {
        out.push(
            s.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect(),
        );
    }
    out
}

/// Grades top-down: every cell takes a random element below the grades of
/// all of its cofaces. `None` if some cell has no such element.
fn grade_top_down(rng: &mut impl Rng, x: &CellComplex, poset: &Poset) -> Option<Vec<u32>> {
    let n = poset.len();
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(x.dim(i)));
    let mut grades = vec![u32::MAX; x.len()];
    for i in order {
        let candidates: Vec<usize> = (0..n)
            .filter(|&e| x.coboundary_of(i).iter().all(|&(c, _)| poset.leq(e, grades[c as usize] as usize)))
            .collect();
        grades[i] = *candidates.choose(rng)? as u32;
    }
    Some(grades)
}

/// A random graded simplicial complex with at most `max_cells` cells over a
/// random poset of at most `max_poset` elements. When no grading is found
/// after a few attempts, element `0` is made the minimum, which always
/// admits one.
pub fn random_graded(rng: &mut impl Rng, field: PrimeField, max_cells: usize, max_poset: usize) -> GradedComplex {
    let x = random_simplicial(rng, field, max_cells);
    let poset = random_poset(rng, max_poset);
    for _ in 0..20 {
        if let Some(grades) = grade_top_down(rng, &x, &poset) {
            return GradedComplex::new(Arc::new(x), Arc::new(poset), grades).expect("order preserving");
        }
    }
    let mut relations: Vec<(usize, usize)> = (1..poset.len()).map(|j| (0, j)).collect();
    relations.extend_from_slice(poset.hasse_covers());
    let rooted = Poset::from_relations(poset.labels().to_vec(), &relations).expect("index order is acyclic");
    let grades = grade_top_down(rng, &x, &rooted).expect("the minimum is always a candidate");
    GradedComplex::new(Arc::new(x), Arc::new(rooted), grades).expect("order preserving")
}

/// A cubical grid of random shape (1 to 3 axes, extents up to `max_extent`)
/// with random open axes and some absent top cells, bifiltered over the
/// product of the chains `0 < 1` and `0 < 1 < 2`: top cells take random
/// levels and every other cell the componentwise minimum over its cofaces.
pub fn random_bifiltered_grid(rng: &mut impl Rng, field: PrimeField, max_extent: usize) -> GradedComplex {
    let axes = rng.gen_range(1..=3usize);
    let shape: Vec<usize> = (0..axes).map(|_| rng.gen_range(1..=max_extent)).collect();
    let open: Vec<bool> = (0..axes).map(|_| rng.gen_bool(0.25)).collect();
    let tops: usize = shape.iter().product();
    let mut present: Vec<bool> = (0..tops).map(|_| rng.gen_bool(0.85)).collect();
    present[0] = true;
    let x = cubical::cubical_complex(field, &shape, &open, &present);
    let (a_levels, b_levels) = (2u32, 3u32);
    let labels: Vec<String> = (0..a_levels)
        .flat_map(|a| (0..b_levels).map(move |b| format!("{a}{b}")))
        .collect();
    let mut relations = Vec::new();
    for a in 0..a_levels {
        for b in 0..b_levels {
            let i = (a * b_levels + b) as usize;
            if a + 1 < a_levels {
                relations.push((i, i + b_levels as usize));
            }
            if b + 1 < b_levels {
                relations.push((i, i + 1));
            }
        }
    }
    let poset = Poset::from_relations(labels, &relations).expect("product order");
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(x.dim(i)));
    let mut level = vec![(0u32, 0u32); x.len()];
    for i in order {
        let cof = x.coboundary_of(i);
        level[i] = if cof.is_empty() {
            (rng.gen_range(0..a_levels), rng.gen_range(0..b_levels))
        } else {
            cof.iter()
                .map(|&(c, _)| level[c as usize])
                .fold((u32::MAX, u32::MAX), |m, l| (m.0.min(l.0), m.1.min(l.1)))
        };
    }
    let grades = level.iter().map(|&(a, b)| a * b_levels + b).collect();
    GradedComplex::new(Arc::new(x), Arc::new(poset), grades).expect("meets are order preserving")
}

/// A closed `side × side` grid over `0 < 1` whose squares take a random
/// level and whose lower cells take the minimum level of their star.
pub fn random_two_level_grid(rng: &mut impl Rng, field: PrimeField, side: usize) -> GradedComplex {
    let values: Vec<Option<f64>> = (0..side * side).map(|_| Some(f64::from(rng.gen_range(0..2u8)))).collect();
    let grid = cubical::CubicalGrid::new(vec![side, side], &[], values).expect("shape matches");
    cubical::build_complex(&grid, field).expect("valid grid")
}
