//! The JSON complex document: field, optional poset, and cells with
//! boundaries given by face id and coefficient.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use conley_core::{ComplexBuilder, GradedComplex, Poset, PrimeField};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDocument {
    pub field: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poset: Option<PosetDocument>,
    pub cells: Vec<CellDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetDocument {
    pub elements: Vec<String>,
    /// `[lower, upper]` pairs; any generating set of relations is accepted,
    /// the Hasse covers are emitted.
    #[serde(default)]
    pub covers: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellDocument {
    pub id: String,
    pub dim: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grade: Option<String>,
    #[serde(default)]
    pub boundary: Vec<(String, i64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<u32>>,
}

impl ComplexDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("malformed document: {e}")))
    }

    pub fn is_graded(&self) -> bool {
        self.poset.is_some()
    }

    /// Builds the graded complex with cells in canonical `(dim, id)` order.
    /// `field` overrides the document's modulus. The complex itself is not
    /// validated here beyond id resolution and order preservation of the
    /// grading along boundaries and explicit faces.
    pub fn to_graded(&self, field: Option<u32>) -> Result<GradedComplex, CliError> {
        let modulus = field.unwrap_or(self.field);
        let field = PrimeField::new(modulus).map_err(|e| CliError::Semantic(e.to_string()))?;
        let mut order: Vec<&CellDocument> = self.cells.iter().collect();
        order.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.id.cmp(&b.id)));
        let mut b = ComplexBuilder::with_capacity(field, order.len());
        for c in &order {
            b.add_cell(c.id.clone(), c.dim).map_err(semantic)?;
        }
        for (i, c) in order.iter().enumerate() {
            for (face, coeff) in &c.boundary {
                let j = b.index_of(face).map_err(semantic)?;
                if field.reduce(*coeff) != 0 {
                    b.add_incidence(i, j, *coeff).map_err(semantic)?;
                }
            }
            for face in c.faces.iter().flatten() {
                let j = b.index_of(face).map_err(semantic)?;
                b.add_face(i, j).map_err(semantic)?;
            }
        }
        let with_coords = order.iter().filter(|c| c.coords.is_some()).count();
        if with_coords > 0 {
            if with_coords != order.len() {
                return Err(CliError::Semantic("either every cell or no cell has coords".into()));
            }
            let axes = order[0].coords.as_ref().map_or(0, Vec::len);
            let data = order.iter().flat_map(|c| c.coords.clone().unwrap_or_default()).collect();
            b.set_coords(axes, data).map_err(semantic)?;
        }
        let complex = Arc::new(b.build());
        let Some(pd) = &self.poset else {
            if let Some(c) = order.iter().find(|c| c.grade.is_some()) {
                return Err(CliError::Semantic(format!("cell `{}` has a grade but there is no poset", c.id)));
            }
            return Ok(GradedComplex::trivial(complex));
        };
        let relations: Vec<(&str, &str)> = pd.covers.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let labels: Vec<&str> = pd.elements.iter().map(String::as_str).collect();
        let poset = Poset::new(&labels, &relations).map_err(semantic)?;
        let mut grades = Vec::with_capacity(order.len());
        for c in &order {
            let label = c
                .grade
                .as_ref()
                .ok_or_else(|| CliError::Semantic(format!("cell `{}` has no grade", c.id)))?;
            grades.push(poset.index_of(label).map_err(semantic)? as u32);
        }
        GradedComplex::new(complex, Arc::new(poset), grades).map_err(semantic)
    }

    /// The canonical document of `g`; the poset and grades are written when
    /// `graded` is set.
    pub fn from_graded(g: &GradedComplex, graded: bool) -> Self {
        let x = g.complex();
        let poset = graded.then(|| PosetDocument {
            elements: g.poset().labels().to_vec(),
            covers: g
                .poset()
                .hasse_covers()
                .iter()
                .map(|&(a, b)| (g.poset().label(a).to_string(), g.poset().label(b).to_string()))
                .collect(),
        });
        let field = x.field();
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| x.dim(a).cmp(&x.dim(b)).then_with(|| x.id(a).cmp(x.id(b))));
        let cells = order
            .into_iter()
            .map(|i| {
                let mut boundary: Vec<(String, i64)> = x
                    .boundary_of(i)
                    .iter()
                    .map(|&(f, c)| (x.id(f as usize).to_string(), i64::from(c)))
                    .collect();
                boundary.sort();
                let faces = x.has_explicit_faces().then(|| {
                    let mut f: Vec<String> = x.explicit_faces_of(i).map(|j| x.id(j).to_string()).collect();
                    f.sort();
                    f
                });
                CellDocument {
                    id: x.id(i).to_string(),
                    dim: x.dim(i),
                    grade: graded.then(|| g.poset().label(g.grade(i)).to_string()),
                    boundary,
                    faces,
                    coords: x.coords().map(|c| c.of(i).to_vec()),
                }
            })
            .collect();
        ComplexDocument {
            field: field.modulus(),
            poset,
            cells,
        }
    }

    /// JSON with one cell per line.
    pub fn emit(&self) -> String {
        let mut s = String::from("{\n");
        s.push_str(&format!("  \"field\": {},\n", self.field));
        if let Some(p) = &self.poset {
            s.push_str(&format!("  \"poset\": {},\n", json(p)));
        }
        if self.cells.is_empty() {
            s.push_str("  \"cells\": []\n}\n");
            return s;
        }
        s.push_str("  \"cells\": [\n");
        let cells: Vec<String> = self.cells.iter().map(|c| format!("    {}", json(c))).collect();
        s.push_str(&cells.join(",\n"));
        s.push_str("\n  ]\n}\n");
        s
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("documents serialize")
}

fn semantic(e: impl std::fmt::Display) -> CliError {
    CliError::Semantic(e.to_string())
}
