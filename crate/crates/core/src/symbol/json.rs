use super::matrix::PhaseSpaceSymbol;
use super::scalar::{Grade, Monomial, Scalar};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Serialize, Deserialize)]
struct TermDoc {
    re: f64,
    im: f64,
    a: u32,
    b: u32,
    m: i32,
    n: i32,
    #[serde(default, skip_serializing_if = "is_zero")]
    hphase: i32,
}

fn is_zero(v: &i32) -> bool {
    *v == 0
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    row: usize,
    col: usize,
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
struct GradeDoc {
    half_order: u32,
    entries: Vec<EntryDoc>,
}

#[derive(Serialize, Deserialize)]
struct SymbolDoc {
    dim: usize,
    grades: Vec<GradeDoc>,
}

impl PhaseSpaceSymbol {
    pub fn to_json_value(&self) -> serde_json::Value {
        let d = self.dim();
        let mut by_grade: BTreeMap<u32, BTreeMap<(usize, usize), Vec<TermDoc>>> = BTreeMap::new();
        for r in 0..d {
            for c in 0..d {
                for (g, m, v) in self.get(r, c).iter() {
                    by_grade.entry(g.half_order).or_default().entry((r, c)).or_default().push(TermDoc {
                        re: v.re,
                        im: v.im,
                        a: m.a,
                        b: m.b,
                        m: m.m,
                        n: m.n,
                        hphase: g.hphase,
                    });
                }
            }
        }
        let grades = by_grade
            .into_iter()
            .map(|(half_order, entries)| GradeDoc {
                half_order,
                entries: entries.into_iter().map(|((row, col), terms)| EntryDoc { row, col, terms }).collect(),
            })
            .collect();
        serde_json::to_value(SymbolDoc { dim: d, grades }).expect("symbol serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("symbol serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SymbolDoc = serde_json::from_str(text)?;
        let mut out = PhaseSpaceSymbol::zeros(doc.dim);
        for g in doc.grades {
            for e in g.entries {
                if e.row >= doc.dim || e.col >= doc.dim {
                    return Err(Error::Form(format!("entry ({}, {}) outside dimension {}", e.row, e.col, doc.dim)));
                }
                let mut s: Scalar = out.get(e.row, e.col).clone();
                for t in e.terms {
                    s.add_term(
                        Grade { half_order: g.half_order, hphase: t.hphase },
                        Monomial::new(t.a, t.b, t.m, t.n),
                        Complex64::new(t.re, t.im),
                    );
                }
                out.set(e.row, e.col, s);
            }
        }
        Ok(out)
    }
}
