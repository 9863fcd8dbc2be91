//! JSON documents for elements, matrices and factor lists.
//!
//! ```json
//! {"weight": "factorial", "normalized": {"prefix": [[1, 0]], "cycle": [[0, 0]]}}
//! {"weight": "factorial", "raw_prefix": [[0, 0], [1, 0]], "tail": "zero"}
//! {"weight": "factorial", "rows": 2, "cols": 2, "entries": [[{..}, {..}], [{..}, {..}]]}
//! ```
//!
//! Raw prefixes are converted on load with `u(n) = p(n) * a_n`. Output always
//! uses the normalized form, so re-reading an emitted document gives back the
//! same canonical element. Floats are printed with the shortest digit string
//! that reads back to the same `f64`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::Element;
use crate::coeffseq::{EpSeq, EpSeqDoc};
use crate::error::{Error, Result};
use crate::matalg::{ElementaryFactor, MatElement};
use crate::weights::{Weight, WeightRegistry};
use crate::C64;

/// A complex number as `[re, im]` or a bare real.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Pair([f64; 2]),
    Real(f64),
}

impl From<Scalar> for C64 {
    fn from(s: Scalar) -> C64 {
        match s {
            Scalar::Pair([re, im]) => C64::new(re, im),
            Scalar::Real(re) => C64::new(re, 0.0),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ElementDoc {
    Normalized {
        weight: String,
        normalized: EpSeqDoc,
    },
    Raw {
        weight: String,
        raw_prefix: Vec<Scalar>,
        tail: String,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub weight: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<EpSeqDoc>>,
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

impl ElementDoc {
    pub fn into_element(self, registry: &WeightRegistry) -> Result<Element> {
        match self {
            ElementDoc::Normalized { weight, normalized } => {
                let w = registry.resolve(&weight)?;
                Ok(Element::from_normalized(w, EpSeq::try_from(normalized)?))
            }
            ElementDoc::Raw { weight, raw_prefix, tail } => {
                if tail != "zero" {
                    return Err(Error::Parse(format!("unsupported tail `{tail}`; only \"zero\" is accepted")));
                }
                let w = registry.resolve(&weight)?;
                let raw: Vec<C64> = raw_prefix.into_iter().map(C64::from).collect();
                Element::from_raw_prefix(w, &raw)
            }
        }
    }
}

/// Reads an element document.
pub fn element_from_value(v: &Value, registry: &WeightRegistry) -> Result<Element> {
    let doc: ElementDoc = serde_json::from_value(v.clone()).map_err(parse_err)?;
    doc.into_element(registry)
}

pub fn element_from_str(s: &str, registry: &WeightRegistry) -> Result<Element> {
    let v: Value = serde_json::from_str(s).map_err(parse_err)?;
    element_from_value(&v, registry)
}

/// Normalized-form document; generated elements have no finite form.
pub fn element_to_value(e: &Element) -> Result<Value> {
    Ok(json!({ "weight": e.weight().name(), "normalized": EpSeqDoc::from(e.u()?) }))
}

pub fn matrix_from_value(v: &Value, registry: &WeightRegistry) -> Result<MatElement> {
    let doc: MatrixDoc = serde_json::from_value(v.clone()).map_err(parse_err)?;
    let w = registry.resolve(&doc.weight)?;
    if doc.entries.len() != doc.rows || doc.entries.iter().any(|r| r.len() != doc.cols) {
        return Err(Error::Parse(format!("entries do not match rows={} cols={}", doc.rows, doc.cols)));
    }
    let entries = doc
        .entries
        .into_iter()
        .flatten()
        .map(|d| Ok(Element::from_normalized(w.clone(), EpSeq::try_from(d)?)))
        .collect::<Result<Vec<_>>>()?;
    MatElement::new(w, doc.rows, doc.cols, entries)
}

pub fn matrix_from_str(s: &str, registry: &WeightRegistry) -> Result<MatElement> {
    let v: Value = serde_json::from_str(s).map_err(parse_err)?;
    matrix_from_value(&v, registry)
}

pub fn matrix_to_value(m: &MatElement) -> Result<Value> {
    let mut rows = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let row = (0..m.cols()).map(|j| m.get(i, j).u().map(EpSeqDoc::from)).collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let doc = MatrixDoc { weight: m.weight().name().to_string(), rows: m.rows(), cols: m.cols(), entries: rows };
    serde_json::to_value(doc).map_err(|e| Error::Numerical(e.to_string()))
}

/// `[{"i": .., "j": .., "alpha": <element>}, ...]`
pub fn factors_to_value(factors: &[ElementaryFactor]) -> Result<Value> {
    factors
        .iter()
        .map(|f| Ok(json!({ "i": f.i, "j": f.j, "alpha": element_to_value(&f.alpha)? })))
        .collect::<Result<Vec<_>>>()
        .map(Value::Array)
}

pub fn factors_from_value(v: &Value, registry: &WeightRegistry) -> Result<Vec<ElementaryFactor>> {
    let items = v.as_array().ok_or_else(|| Error::Parse("factor list must be an array".into()))?;
    items
        .iter()
        .map(|item| {
            let index = |key: &str| {
                item.get(key)
                    .and_then(Value::as_u64)
                    .map(|x| x as usize)
                    .ok_or_else(|| Error::Parse(format!("factor needs a nonnegative integer `{key}`")))
            };
            let (i, j) = (index("i")?, index("j")?);
            if i == j {
                return Err(Error::Parse(format!("factor with i = j = {i} is not elementary")));
            }
            let alpha = element_from_value(item.get("alpha").ok_or_else(|| Error::Parse("factor needs `alpha`".into()))?, registry)?;
            Ok(ElementaryFactor { i, j, alpha })
        })
        .collect()
}

/// Convenience for callers with a plain weight in hand.
pub fn registry_with(weight: &Weight) -> WeightRegistry {
    let mut r = WeightRegistry::new();
    r.register(weight.clone());
    r
}
