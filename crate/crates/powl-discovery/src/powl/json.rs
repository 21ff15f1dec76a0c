//! Canonical JSON encoding of process models.
//!
//! The schema is fixed, field order included:
//!
//! ```text
//! {"kind":"transition","label":<string>}
//! {"kind":"silent"}
//! {"kind":"xor","children":[...]}
//! {"kind":"loop","do":{...},"redo":{...}}
//! {"kind":"order","children":[...],"edges":[[i,j],...]}
//! ```
//!
//! Children are serialized in canonical-key order and order edges refer to
//! 0-based positions into that order, so serialization is deterministic and
//! parse ∘ serialize is the identity on canonical models.

use super::{ModelError, PowlModel};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelJsonError {
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("expected a JSON object at {at}")]
    NotAnObject { at: String },
    #[error("missing field `{field}` in {kind} node")]
    MissingField { kind: String, field: &'static str },
    #[error("unknown node kind `{0}`")]
    UnknownKind(String),
    #[error("field `{field}` has the wrong type in {kind} node")]
    BadField { kind: String, field: &'static str },
    #[error("invalid model structure: {0}")]
    Structure(#[from] ModelError),
}

impl PowlModel {
    /// Serializes the canonicalized model to the fixed JSON schema. The same
    /// model always yields byte-identical output.
    pub fn to_canonical_json(&self) -> String {
        let canonical = self.canonicalize();
        let mut out = String::new();
        write_model(&canonical, &mut out);
        out
    }

    /// Parses a model from JSON, normalizing it to canonical form. Order
    /// edges are closed transitively; cyclic edge sets are rejected.
    pub fn from_json(input: &str) -> Result<PowlModel, ModelJsonError> {
        let value: Value = serde_json::from_str(input)?;
        let model = parse_value(&value, "$")?;
        Ok(model.canonicalize())
    }
}

fn write_model(model: &PowlModel, out: &mut String) {
    match model {
        PowlModel::Transition { label, .. } => {
            out.push_str("{\"kind\":\"transition\",\"label\":");
            out.push_str(&serde_json::to_string(label).expect("strings always serialize"));
            out.push('}');
        }
        PowlModel::Silent { .. } => out.push_str("{\"kind\":\"silent\"}"),
        PowlModel::Xor { children } => {
            out.push_str("{\"kind\":\"xor\",\"children\":[");
            for (i, child) in children.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_model(child, out);
            }
            out.push_str("]}");
        }
        PowlModel::Loop { do_part, redo_part } => {
            out.push_str("{\"kind\":\"loop\",\"do\":");
            write_model(do_part, out);
            out.push_str(",\"redo\":");
            write_model(redo_part, out);
            out.push('}');
        }
        PowlModel::Order { children, edges } => {
            out.push_str("{\"kind\":\"order\",\"children\":[");
            for (i, child) in children.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_model(child, out);
            }
            out.push_str("],\"edges\":[");
            for (i, (a, b)) in edges.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&format!("[{a},{b}]"));
            }
            out.push_str("]}");
        }
    }
}

fn parse_value(value: &Value, at: &str) -> Result<PowlModel, ModelJsonError> {
    let obj = value
        .as_object()
        .ok_or_else(|| ModelJsonError::NotAnObject { at: at.into() })?;
    let kind =
        obj.get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| ModelJsonError::MissingField {
                kind: at.into(),
                field: "kind",
            })?;
    match kind {
        "transition" => {
            let label = obj
                .get("label")
                .ok_or_else(|| ModelJsonError::MissingField {
                    kind: kind.into(),
                    field: "label",
                })?
                .as_str()
                .ok_or_else(|| ModelJsonError::BadField {
                    kind: kind.into(),
                    field: "label",
                })?;
            if label.is_empty() {
                return Err(ModelError::EmptyLabel.into());
            }
            Ok(PowlModel::transition(label))
        }
        "silent" => Ok(PowlModel::silent()),
        "xor" => {
            let children = parse_children(obj, kind, at)?;
            Ok(PowlModel::xor(children)?)
        }
        "loop" => {
            let do_part = obj.get("do").ok_or_else(|| ModelJsonError::MissingField {
                kind: kind.into(),
                field: "do",
            })?;
            let redo_part = obj
                .get("redo")
                .ok_or_else(|| ModelJsonError::MissingField {
                    kind: kind.into(),
                    field: "redo",
                })?;
            Ok(PowlModel::loop_model(
                parse_value(do_part, &format!("{at}.do"))?,
                parse_value(redo_part, &format!("{at}.redo"))?,
            ))
        }
        "order" => {
            let children = parse_children(obj, kind, at)?;
            let edges_value = obj
                .get("edges")
                .ok_or_else(|| ModelJsonError::MissingField {
                    kind: kind.into(),
                    field: "edges",
                })?
                .as_array()
                .ok_or_else(|| ModelJsonError::BadField {
                    kind: kind.into(),
                    field: "edges",
                })?;
            let mut edges = Vec::with_capacity(edges_value.len());
            for pair in edges_value {
                let pair = pair.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                    ModelJsonError::BadField {
                        kind: kind.into(),
                        field: "edges",
                    }
                })?;
                let a = pair[0].as_u64().ok_or_else(|| ModelJsonError::BadField {
                    kind: kind.into(),
                    field: "edges",
                })?;
                let b = pair[1].as_u64().ok_or_else(|| ModelJsonError::BadField {
                    kind: kind.into(),
                    field: "edges",
                })?;
                edges.push((a as usize, b as usize));
            }
            Ok(PowlModel::order(children, edges)?)
        }
        other => Err(ModelJsonError::UnknownKind(other.to_string())),
    }
}

fn parse_children(
    obj: &serde_json::Map<String, Value>,
    kind: &str,
    at: &str,
) -> Result<Vec<PowlModel>, ModelJsonError> {
    let children = obj
        .get("children")
        .ok_or_else(|| ModelJsonError::MissingField {
            kind: kind.into(),
            field: "children",
        })?
        .as_array()
        .ok_or_else(|| ModelJsonError::BadField {
            kind: kind.into(),
            field: "children",
        })?;
    children
        .iter()
        .enumerate()
        .map(|(i, c)| parse_value(c, &format!("{at}.children[{i}]")))
        .collect()
}
