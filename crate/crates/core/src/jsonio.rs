//! JSON schemas for elements, series and pipeline results, plus the generic
//! representation input file.
//!
//! All exponents and half-integer weights appear doubled in JSON, rationals
//! as `"p/q"` strings.

use crate::error::{Error, Result};
use crate::laxop::LaxResult;
use crate::liealg::{build_from_rep, build_setup_from_triple, GradedSetup, Label, LieAlgebraModel};
use crate::matrix::QMat;
use crate::scalar::{parse, render, Rat};
use crate::series::Series;
use crate::uea::{Algebra, UeaElem};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    /// Model basis indices of the PBW monomial factors (0-based,
    /// nondecreasing in the PBW order).
    pub monomial: Vec<usize>,
    pub coeff: String,
}

pub fn elem_to_json(alg: &Algebra, e: &UeaElem) -> Vec<TermJson> {
    let mut terms: Vec<TermJson> = e
        .terms
        .iter()
        .map(|(w, c)| TermJson {
            monomial: alg.word_indices(*w),
            coeff: render(c),
        })
        .collect();
    terms.sort_by(|a, b| (a.monomial.len(), &a.monomial).cmp(&(b.monomial.len(), &b.monomial)));
    terms
}

pub fn elem_from_json(alg: &Algebra, terms: &[TermJson]) -> Result<UeaElem> {
    let mut out = UeaElem::zero();
    for t in terms {
        if t.monomial.iter().any(|&i| i >= alg.dim()) {
            return Err(Error::Other("basis index out of range".into()));
        }
        let w = alg.intern_indices(&t.monomial)?;
        let c = parse(&t.coeff).ok_or_else(|| Error::Other(format!("bad rational `{}`", t.coeff)))?;
        out.add_term(w, c);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesTermJson {
    /// Doubled exponent.
    pub exp: i64,
    pub value: Vec<TermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesJson {
    /// Doubled precision floor; null when the series is exact.
    pub floor: Option<i64>,
    pub terms: Vec<SeriesTermJson>,
}

pub fn series_to_json(alg: &Algebra, s: &Series) -> SeriesJson {
    SeriesJson {
        floor: s.floor,
        terms: s
            .terms
            .iter()
            .rev()
            .map(|(e, c)| SeriesTermJson { exp: *e, value: elem_to_json(alg, c) })
            .collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LaxEntriesJson {
    pub entries: Vec<Vec<SeriesJson>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LaxJson {
    pub d: i64,
    pub r1: usize,
    #[serde(rename = "D")]
    pub shift: Vec<Vec<String>>,
    #[serde(rename = "L")]
    pub lax: LaxEntriesJson,
}

pub fn lax_to_json(alg: &Algebra, res: &LaxResult) -> LaxJson {
    let entries = (0..res.l.rows)
        .map(|r| {
            (0..res.l.cols)
                .map(|c| series_to_json(alg, res.l.at(r, c)))
                .collect()
        })
        .collect();
    LaxJson {
        d: res.d2,
        r1: res.r1,
        shift: res.d_matrix.render_rows(),
        lax: LaxEntriesJson { entries },
    }
}

/// Generic representation input: basis labels, matrices, and either an
/// explicit sl2-triple (full pipeline) or just a grading (shift matrix only).
#[derive(Debug, Clone, Deserialize)]
pub struct RepFileJson {
    pub labels: Vec<String>,
    /// Per-basis N x N matrices of rationals.
    pub matrices: Vec<Vec<Vec<String>>>,
    /// Doubled ad-x weight per basis element; required when no triple is given.
    pub delta2: Option<Vec<i64>>,
    pub triple: Option<TripleJson>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TripleJson {
    pub f: Vec<String>,
    pub x: Vec<String>,
    pub e: Vec<String>,
}

pub enum RepInput {
    /// Full setup: the model with an sl2-triple.
    Graded(LieAlgebraModel, GradedSetup),
    /// Grading only: enough for the shift matrix.
    GradedWeights(LieAlgebraModel, Vec<i64>),
}

pub fn parse_rep_file(text: &str) -> Result<RepInput> {
    let file: RepFileJson =
        serde_json::from_str(text).map_err(|e| Error::Other(format!("rep file: {e}")))?;
    if file.labels.len() != file.matrices.len() || file.labels.is_empty() {
        return Err(Error::ShapeMismatch("labels/matrices mismatch in rep file".into()));
    }
    let labels: Vec<Label> = file
        .labels
        .iter()
        .enumerate()
        .map(|(ord, name)| Label::Named { ord, name: name.clone() })
        .collect();
    let mut matrices = Vec::new();
    for rows in &file.matrices {
        let n = rows.len();
        let mut q = QMat::zero(n, n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::ShapeMismatch("non-square matrix in rep file".into()));
            }
            for (c, v) in row.iter().enumerate() {
                q.set(r, c, parse(v).ok_or_else(|| Error::Other(format!("bad rational `{v}`")))?);
            }
        }
        matrices.push(q);
    }
    let model = build_from_rep(labels, matrices)?;
    if let Some(triple) = file.triple {
        let coords = |v: &[String]| -> Result<Vec<Rat>> {
            if v.len() != model.dim() {
                return Err(Error::ShapeMismatch("triple coordinate length".into()));
            }
            v.iter()
                .map(|s| parse(s).ok_or_else(|| Error::Other(format!("bad rational `{s}`"))))
                .collect()
        };
        let setup = build_setup_from_triple(
            &model,
            coords(&triple.f)?,
            coords(&triple.x)?,
            coords(&triple.e)?,
        )?;
        Ok(RepInput::Graded(model, setup))
    } else {
        let delta2 = file
            .delta2
            .ok_or_else(|| Error::Other("rep file needs either a triple or delta2".into()))?;
        if delta2.len() != model.dim() {
            return Err(Error::ShapeMismatch("delta2 length".into()));
        }
        Ok(RepInput::GradedWeights(model, delta2))
    }
}
