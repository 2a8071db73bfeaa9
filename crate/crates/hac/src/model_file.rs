//! JSON model documents.

use std::fmt;

use hac_core::logic::{Alphabet, TablePredicate, UnaryPredicate};
use hac_core::numeric::{PrecisionMode, PrecisionPolicy, Rational, MIN_BITS};
use hac_core::runtime::{
    AffineMap, AttentionLayer, EncoderModel, Layer, LedgerEntry, ModelMetadata, PositionalComponent, Selector,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

#[derive(Debug)]
pub struct FormatError(pub String);

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for FormatError {}

fn err<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError(msg.into()))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    alphabet: String,
    positional: Vec<Json>,
    layers: Vec<LayerDoc>,
    acceptance: Vec<String>,
    precision: PrecisionDoc,
    #[serde(default)]
    metadata: Json,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    a: Option<AffineDoc>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    b: Option<AffineDoc>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    c: Option<AffineDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    selector: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    masked: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coord: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AffineDoc {
    matrix: Vec<Vec<String>>,
    bias: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PrecisionDoc {
    a: u32,
    b: u32,
    mode: String,
    #[serde(default = "min_bits", skip_serializing_if = "is_min_bits")]
    floor: u32,
}

fn min_bits() -> u32 {
    MIN_BITS
}

fn is_min_bits(v: &u32) -> bool {
    *v == MIN_BITS
}

fn rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(|r| r.to_string()).collect()
}

fn parse_rational(s: &str) -> Result<Rational, FormatError> {
    let r: Rational = s.parse().map_err(|e| FormatError(format!("bad rational {s:?}: {e}")))?;
    if r.to_string() != s {
        return err(format!("rational {s:?} is not in canonical form (expected {r})"));
    }
    Ok(r)
}

fn affine_doc(m: &AffineMap) -> AffineDoc {
    AffineDoc { matrix: m.to_dense().iter().map(|r| rationals(r)).collect(), bias: rationals(m.bias()) }
}

fn affine_from(doc: AffineDoc, cols: usize, name: &str) -> Result<AffineMap, FormatError> {
    let mut matrix = Vec::with_capacity(doc.matrix.len());
    for row in &doc.matrix {
        if row.len() != cols {
            return err(format!("{name}: row has {} entries, expected {cols}", row.len()));
        }
        matrix.push(row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?);
    }
    let bias = doc.bias.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
    if matrix.is_empty() {
        return AffineMap::from_entries(0, cols, [], bias).map_err(|e| FormatError(format!("{name}: {e}")));
    }
    AffineMap::from_dense(matrix, bias).map_err(|e| FormatError(format!("{name}: {e}")))
}

fn predicate_json(p: &UnaryPredicate) -> Json {
    match p {
        UnaryPredicate::Table(t) => json!({
            "name": "table",
            "params": [],
            "label": t.name(),
            "rows": t.rows().iter().map(|r| r.iter().map(|&b| b as u8).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
        other => json!({ "name": other.name(), "params": other.params() }),
    }
}

fn predicate_from(v: &Json) -> Result<UnaryPredicate, FormatError> {
    let obj = v.as_object().ok_or_else(|| FormatError("predicate descriptor must be an object".into()))?;
    for key in obj.keys() {
        if !["name", "params", "label", "rows"].contains(&key.as_str()) {
            return err(format!("unknown predicate field {key:?}"));
        }
    }
    let name = obj.get("name").and_then(Json::as_str).ok_or_else(|| FormatError("predicate needs a name".into()))?;
    let params: Vec<u64> = match obj.get("params") {
        None => Vec::new(),
        Some(p) => serde_json::from_value(p.clone()).map_err(|e| FormatError(format!("predicate params: {e}")))?,
    };
    let arity = |k: usize| -> Result<(), FormatError> {
        if params.len() != k {
            return err(format!("predicate {name} takes {k} parameters, got {}", params.len()));
        }
        Ok(())
    };
    Ok(match name {
        "even" => arity(0).map(|_| UnaryPredicate::Even)?,
        "midpoint" => arity(0).map(|_| UnaryPredicate::Midpoint)?,
        "primeshift" => arity(0).map(|_| UnaryPredicate::PrimeShift)?,
        "eq" => arity(1).map(|_| UnaryPredicate::Eq(params[0]))?,
        "geq" => arity(1).map(|_| UnaryPredicate::Geq(params[0]))?,
        "mod" => {
            arity(2)?;
            UnaryPredicate::modulo(params[0], params[1]).map_err(|e| FormatError(e.to_string()))?
        }
        "table" => {
            arity(0)?;
            let label = obj.get("label").and_then(Json::as_str).unwrap_or("table");
            let rows: Vec<Vec<u8>> = serde_json::from_value(obj.get("rows").cloned().unwrap_or(Json::Null))
                .map_err(|e| FormatError(format!("table rows: {e}")))?;
            let rows = rows.into_iter().map(|r| r.into_iter().map(|b| b != 0).collect()).collect();
            UnaryPredicate::Table(TablePredicate::new(label, rows).map_err(|e| FormatError(e.to_string()))?)
        }
        other => return err(format!("unknown predicate {other:?}")),
    })
}

fn positional_json(p: &PositionalComponent) -> Json {
    match p {
        PositionalComponent::Pred(q) => json!({ "pred": predicate_json(q) }),
        PositionalComponent::PredAtN(q) => json!({ "pred_at_n": predicate_json(q) }),
        other => Json::String(other.to_string()),
    }
}

fn positional_from(v: &Json) -> Result<PositionalComponent, FormatError> {
    if let Some(s) = v.as_str() {
        return Ok(match s {
            "index" => PositionalComponent::Index,
            "index_squared" => PositionalComponent::IndexSquared,
            "inv_index" => PositionalComponent::InvIndex,
            "alt_sign" => PositionalComponent::AltSign,
            "cos_geo" => PositionalComponent::CosGeo,
            "sin_geo" => PositionalComponent::SinGeo,
            other => return err(format!("unknown positional component {other:?}")),
        });
    }
    let obj = v.as_object().filter(|o| o.len() == 1).ok_or_else(|| FormatError(format!("bad positional descriptor {v}")))?;
    let (key, inner) = obj.iter().next().expect("one entry");
    match key.as_str() {
        "pred" => Ok(PositionalComponent::Pred(predicate_from(inner)?)),
        "pred_at_n" => Ok(PositionalComponent::PredAtN(predicate_from(inner)?)),
        other => err(format!("unknown positional component {other:?}")),
    }
}

fn metadata_json(m: &ModelMetadata) -> Json {
    json!({
        "source": m.source,
        "ledger": m.ledger.iter().map(|e| json!({"formula": e.formula, "coord": e.coord, "layer": e.layer})).collect::<Vec<_>>(),
        "layer_roles": m.layer_roles,
    })
}

/// Free-form on input; the known fields are picked up when present.
fn metadata_from(v: &Json) -> ModelMetadata {
    let mut m = ModelMetadata::default();
    if let Some(s) = v.get("source").and_then(Json::as_str) {
        m.source = s.to_string();
    }
    if let Some(entries) = v.get("ledger").and_then(Json::as_array) {
        for e in entries {
            let (Some(formula), Some(coord), Some(layer)) = (
                e.get("formula").and_then(Json::as_str),
                e.get("coord").and_then(Json::as_u64),
                e.get("layer").and_then(Json::as_u64),
            ) else {
                continue;
            };
            m.ledger.push(LedgerEntry { formula: formula.to_string(), coord: coord as usize, layer: layer as usize });
        }
    }
    if let Some(roles) = v.get("layer_roles").and_then(Json::as_array) {
        m.layer_roles = roles.iter().filter_map(|r| r.as_str().map(String::from)).collect();
    }
    m
}

pub fn mode_from_str(s: &str) -> Result<PrecisionMode, FormatError> {
    match s {
        "bigfloat" => Ok(PrecisionMode::BigFloat),
        "exact" | "exact-rational" => Ok(PrecisionMode::ExactRational),
        other => err(format!("unknown precision mode {other:?}")),
    }
}

pub fn model_to_json(model: &EncoderModel) -> Json {
    let layers: Vec<LayerDoc> = model
        .layers()
        .iter()
        .map(|l| match l {
            Layer::Attention(l) => LayerDoc {
                kind: Some("attention".into()),
                a: Some(affine_doc(&l.a)),
                b: Some(affine_doc(&l.b)),
                c: Some(affine_doc(&l.c)),
                selector: Some(l.selector.as_str().into()),
                masked: Some(l.masked),
                coord: None,
            },
            Layer::Relu { coord } => LayerDoc {
                kind: Some("relu".into()),
                a: None,
                b: None,
                c: None,
                selector: None,
                masked: None,
                coord: Some(*coord),
            },
        })
        .collect();
    let p = model.precision();
    let doc = ModelDoc {
        alphabet: model.alphabet().as_string(),
        positional: model.positional().iter().map(positional_json).collect(),
        layers,
        acceptance: rationals(model.acceptance()),
        precision: PrecisionDoc { a: p.a, b: p.b, mode: p.mode.as_str().into(), floor: p.floor },
        metadata: metadata_json(model.metadata()),
    };
    serde_json::to_value(doc).expect("model documents serialize")
}

pub fn model_to_string(model: &EncoderModel) -> String {
    let mut s = serde_json::to_string(&model_to_json(model)).expect("model documents serialize");
    s.push('\n');
    s
}

pub fn model_from_str(text: &str) -> Result<EncoderModel, FormatError> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| FormatError(format!("model document: {e}")))?;
    let alphabet = Alphabet::from_str(&doc.alphabet).map_err(|e| FormatError(format!("alphabet: {e}")))?;
    let positional = doc.positional.iter().map(positional_from).collect::<Result<Vec<_>, _>>()?;
    let mut width = alphabet.len() + positional.len();
    let mut layers = Vec::with_capacity(doc.layers.len());
    for (k, l) in doc.layers.into_iter().enumerate() {
        let kind = l.kind.as_deref().unwrap_or(if l.coord.is_some() { "relu" } else { "attention" });
        let layer = match kind {
            "relu" => {
                if l.a.is_some() || l.b.is_some() || l.c.is_some() || l.selector.is_some() || l.masked.is_some() {
                    return err(format!("layer {k}: relu layers only carry coord"));
                }
                let coord = l.coord.ok_or_else(|| FormatError(format!("layer {k}: relu layer needs coord")))?;
                Layer::Relu { coord }
            }
            "attention" => {
                if l.coord.is_some() {
                    return err(format!("layer {k}: attention layers do not carry coord"));
                }
                let missing = |n: &str| FormatError(format!("layer {k}: attention layer needs {n}"));
                let a = affine_from(l.a.ok_or_else(|| missing("A"))?, width, &format!("layer {k} A"))?;
                let b = affine_from(l.b.ok_or_else(|| missing("B"))?, width, &format!("layer {k} B"))?;
                let c = affine_from(l.c.ok_or_else(|| missing("C"))?, 2 * width, &format!("layer {k} C"))?;
                let selector = match l.selector.as_deref().ok_or_else(|| missing("selector"))? {
                    "unique" => Selector::Unique,
                    "average" => Selector::Average,
                    other => return err(format!("layer {k}: unknown selector {other:?}")),
                };
                Layer::Attention(AttentionLayer { a, b, c, selector, masked: l.masked.unwrap_or(false) })
            }
            other => return err(format!("layer {k}: unknown kind {other:?}")),
        };
        width = layer.output_width(width).map_err(|m| FormatError(format!("layer {k}: {m}")))?;
        layers.push(layer);
    }
    let acceptance = doc.acceptance.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
    let precision = PrecisionPolicy {
        a: doc.precision.a,
        b: doc.precision.b,
        floor: doc.precision.floor,
        mode: mode_from_str(&doc.precision.mode)?,
    };
    EncoderModel::new(alphabet, positional, layers, acceptance, precision, metadata_from(&doc.metadata))
        .map_err(|e| FormatError(e.to_string()))
}
