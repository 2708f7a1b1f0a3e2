use std::fmt::Write;
use std::sync::Arc;

use conley_core::conley::{self, ConleyOptions, ConleyResult, Strategy};
use conley_core::persistence::{self, diagram_total_order, persistent_betti};
use conley_core::{cubical, BitSet, CubicalGrid, DownSet, GradedComplex, Poset, PrimeField};

use crate::document::ComplexDocument;
use crate::{dot, CliError};

fn semantic(e: impl std::fmt::Display) -> CliError {
    CliError::Semantic(e.to_string())
}

/// Parses and validates a document, returning it with its graded complex.
pub fn load(text: &str, field: Option<u32>) -> Result<(ComplexDocument, GradedComplex), CliError> {
    let doc = ComplexDocument::parse(text)?;
    let g = doc.to_graded(field)?;
    let report = g.complex().validate();
    if !report.is_valid() {
        return Err(CliError::Semantic(report.to_string()));
    }
    Ok((doc, g))
}

/// A one-line summary of a valid document.
pub fn validate(text: &str, field: Option<u32>) -> Result<String, CliError> {
    let (_, g) = load(text, field)?;
    Ok(format!(
        "valid: {} cells over GF({}), {} poset elements, f-polynomial {}\n",
        g.len(),
        g.complex().field().modulus(),
        g.poset().len(),
        g.complex().f_polynomial()
    ))
}

/// Primary output (a document or table) and trailing report lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Output {
    pub main: String,
    pub report: String,
}

pub fn homology(text: &str, field: Option<u32>, strategy: Strategy) -> Result<Output, CliError> {
    let (_, g) = load(text, field)?;
    let options = ConleyOptions {
        strategy,
        retain_tower: false,
    };
    let r = conley::homology_with(Arc::clone(g.complex()), options).map_err(semantic)?;
    let poincare = r.result.complex().f_polynomial();
    Ok(Output {
        main: ComplexDocument::from_graded(&r.result, false).emit(),
        report: format!("poincare: {poincare}\n"),
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ConnectFlags {
    pub strategy: Strategy,
    pub emit_tower: bool,
    pub blocks: bool,
}

fn run(g: &GradedComplex, strategy: Strategy, retain_tower: bool) -> Result<ConleyResult, CliError> {
    conley::connection_matrix(g, ConleyOptions { strategy, retain_tower }).map_err(semantic)
}

pub fn connect(text: &str, field: Option<u32>, flags: ConnectFlags) -> Result<Output, CliError> {
    let (doc, g) = load(text, field)?;
    let r = run(&g, flags.strategy, flags.emit_tower)?;
    let mut report = String::new();
    if flags.emit_tower {
        for (k, ids) in r.stage_cells().iter().enumerate() {
            let _ = writeln!(report, "stage {}: {}", k + 1, ids.join(" "));
        }
    }
    if flags.blocks {
        report.push_str(&blocks(&r.result)?);
    }
    Ok(Output {
        main: ComplexDocument::from_graded(&r.result, doc.is_graded()).emit(),
        report,
    })
}

/// `block q->p deg j: RxC rank r` for every nonzero block of the boundary
/// from fiber `q` in degree `j` to fiber `p` in degree `j - 1`.
pub fn blocks(g: &GradedComplex) -> Result<String, CliError> {
    let poset = g.poset();
    let n = poset.len();
    let top = g.complex().max_dim().unwrap_or(0);
    let mut out = String::new();
    for &q in poset.topological_order() {
        for &p in poset.topological_order() {
            for j in 1..=top {
                let rows = BitSet::from_indices(n, [p]);
                let cols = BitSet::from_indices(n, [q]);
                let b = conley::connecting_block(g, &rows, &cols, Some(j)).map_err(semantic)?;
                if b.is_zero() {
                    continue;
                }
                let (r, c) = b.shape();
                let _ = writeln!(
                    out,
                    "block {}->{} deg {j}: {r}x{c} rank {}",
                    poset.label(q),
                    poset.label(p),
                    b.rank()
                );
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stage {
    #[default]
    Input,
    Output,
}

pub fn graph(text: &str, field: Option<u32>, stage: Stage, strategy: Strategy) -> Result<String, CliError> {
    let (_, g) = load(text, field)?;
    let fibers = match stage {
        Stage::Input => g.fiber_graph(),
        Stage::Output => conley::conley_morse_graph(&run(&g, strategy, false)?),
    };
    Ok(dot::fiber_graph(&fibers))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Via {
    #[default]
    Direct,
    Conley,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Filtration {
    /// The poset's own topological order.
    #[default]
    Default,
    /// A linear extension given by element labels.
    Extension(Vec<String>),
    /// The text of a pairs file: one `a1,a2;b1,b2` line per pair, each side
    /// standing for the down-closure of the listed elements.
    Pairs(String),
}

pub fn persist(text: &str, field: Option<u32>, filtration: &Filtration, via: Via, strategy: Strategy) -> Result<String, CliError> {
    let (_, g) = load(text, field)?;
    let g = match via {
        Via::Direct => g,
        Via::Conley => persistence::conley_complex(&g, ConleyOptions { strategy, retain_tower: false }).map_err(semantic)?,
    };
    let poset = g.poset();
    let extension: Vec<usize> = match filtration {
        Filtration::Default => poset.topological_order().to_vec(),
        Filtration::Extension(labels) => labels
            .iter()
            .map(|l| poset.index_of(l))
            .collect::<Result<_, _>>()
            .map_err(semantic)?,
        Filtration::Pairs(pairs) => return pair_table(&g, pairs),
    };
    Ok(diagram_total_order(&g, &extension).map_err(semantic)?.to_csv())
}

fn down_set_name(poset: &Poset, d: &DownSet) -> String {
    if d.is_empty() {
        return "-".to_string();
    }
    d.iter().map(|x| poset.label(x)).collect::<Vec<_>>().join("+")
}

fn pair_table(g: &GradedComplex, pairs: &str) -> Result<String, CliError> {
    let poset = g.poset();
    let side = |s: &str| -> Result<DownSet, CliError> {
        let mut members = BitSet::new(poset.len());
        for label in s.split(',').map(str::trim).filter(|l| !l.is_empty()) {
            members.insert(poset.index_of(label).map_err(semantic)?);
        }
        Ok(poset.down_closure(&members))
    };
    let top = g.complex().max_dim().unwrap_or(0);
    let mut out = String::from("dim,a,b,betti\n");
    for (n, line) in pairs.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once(';')
            .ok_or_else(|| CliError::Parse(format!("pairs line {}: expected `a;b`", n + 1)))?;
        let (a, b) = (side(a)?, side(b)?);
        if !a.is_subset(&b) {
            return Err(CliError::Semantic(format!("pairs line {}: down-sets are not nested", n + 1)));
        }
        let (an, bn) = (down_set_name(poset, &a), down_set_name(poset, &b));
        for j in 0..=top {
            let beta = persistent_betti(g, &a, &b, j).map_err(semantic)?;
            let _ = writeln!(out, "{j},{an},{bn},{beta}");
        }
    }
    Ok(out)
}

pub fn cubical(text: &str, field: Option<u32>) -> Result<String, CliError> {
    let grid = CubicalGrid::parse(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let field = PrimeField::new(field.unwrap_or(2)).map_err(semantic)?;
    let g = cubical::build_complex(&grid, field).map_err(semantic)?;
    Ok(ComplexDocument::from_graded(&g, true).emit())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BRANCH: &str = r#"{"field": 2,
      "poset": {"elements": ["p", "q", "r"], "covers": [["p", "q"], ["r", "q"]]},
      "cells": [
        {"id": "v0", "dim": 0, "grade": "p"},
        {"id": "v1", "dim": 0, "grade": "q"},
        {"id": "v2", "dim": 0, "grade": "r"},
        {"id": "e0", "dim": 1, "grade": "q", "boundary": [["v0", 1], ["v1", 1]]},
        {"id": "e1", "dim": 1, "grade": "q", "boundary": [["v1", 1], ["v2", 1]]}]}"#;

    #[test]
    fn connect_branching_interval() {
        let flags = ConnectFlags {
            blocks: true,
            emit_tower: true,
            ..Default::default()
        };
        let out = connect(BRANCH, None, flags).unwrap();
        let doc = ComplexDocument::parse(&out.main).unwrap();
        let ids: Vec<&str> = doc.cells.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids.len(), 3);
        assert!(ids.contains(&"v0") && ids.contains(&"v2"));
        assert!(out.report.starts_with("stage 1: "));
        assert!(out.report.contains("block q->p deg 1: 1x1 rank 1\n"));
        assert!(out.report.contains("block q->r deg 1: 1x1 rank 1\n"));
    }

    #[test]
    fn strict_input_is_echoed() {
        let strict = connect(BRANCH, None, ConnectFlags::default()).unwrap().main;
        assert_eq!(connect(&strict, None, ConnectFlags::default()).unwrap().main, strict);
    }

    #[test]
    fn pair_table_and_default_extension() {
        let csv = persist(BRANCH, None, &Filtration::Pairs("p;p,q,r\n;q\n".into()), Via::Direct, Strategy::Coreduction).unwrap();
        assert_eq!(csv, "dim,a,b,betti\n0,p,p+q+r,1\n1,p,p+q+r,0\n0,-,p+q+r,0\n1,-,p+q+r,0\n");
        let direct = persist(BRANCH, None, &Filtration::Default, Via::Direct, Strategy::Coreduction).unwrap();
        let conley = persist(BRANCH, None, &Filtration::Default, Via::Conley, Strategy::Coreduction).unwrap();
        assert_eq!(direct, conley);
        let bad = persist(BRANCH, None, &Filtration::Pairs("q;p".into()), Via::Direct, Strategy::Coreduction);
        assert!(matches!(bad, Err(CliError::Semantic(_))));
        let bad = persist(BRANCH, None, &Filtration::Extension(vec!["q".into(), "p".into(), "r".into()]), Via::Direct, Strategy::Coreduction);
        assert!(matches!(bad, Err(CliError::Semantic(_))));
    }

    #[test]
    fn invalid_complexes_name_the_cells() {
        let text = r#"{"field": 3, "cells": [
          {"id": "a", "dim": 0}, {"id": "b", "dim": 0},
          {"id": "e", "dim": 1, "boundary": [["a", 1], ["b", -1]]},
          {"id": "s", "dim": 2, "boundary": [["e", 1]]}]}"#;
        let err = validate(text, None).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        let msg = err.to_string();
        assert!(msg.contains('s') && msg.contains('a'), "{msg}");
    }

    #[test]
    fn homology_of_a_circle() {
        let text = r#"{"field": 3, "cells": [
          {"id": "a", "dim": 0}, {"id": "b", "dim": 0},
          {"id": "e", "dim": 1, "boundary": [["a", 1], ["b", -1]]},
          {"id": "f", "dim": 1, "boundary": [["a", -1], ["b", 1]]}]}"#;
        assert_eq!(homology(text, None, Strategy::Coreduction).unwrap().report, "poincare: 1 + t^1\n");
    }
}
