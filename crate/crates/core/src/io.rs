//! JSON encoding of matrices, states, channels, families, ensembles and
//! reports.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major:
//! `{"rows": n, "cols": m, "data": [[re, im], ...]}`. Parse errors carry
//! the JSON pointer of the offending value.

use serde_json::{json, Map, Value};

use crate::channels::{CqStructure, KrausChannel, CPTP_TOL};
use crate::criteria::{CriterionReport, GramReconstruction, KrausExtraction, OndDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, C64};
use crate::states::{DensityMatrix, DiscreteEnsemble, PureStateFamily};

fn schema(pointer: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        pointer: if pointer.is_empty() {
            "/".into()
        } else {
            pointer.into()
        },
        message: message.into(),
    }
}

fn field<'a>(value: &'a Value, pointer: &str, key: &str) -> Result<&'a Value> {
    let obj = value
        .as_object()
        .ok_or_else(|| schema(pointer, "expected an object"))?;
    obj.get(key)
        .ok_or_else(|| schema(pointer, format!("missing field \"{key}\"")))
}

fn as_usize(value: &Value, pointer: &str) -> Result<usize> {
    value
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| schema(pointer, "expected a non-negative integer"))
}

fn as_f64(value: &Value, pointer: &str) -> Result<f64> {
    value
        .as_f64()
        .ok_or_else(|| schema(pointer, "expected a number"))
}

fn as_array<'a>(value: &'a Value, pointer: &str) -> Result<&'a Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| schema(pointer, "expected an array"))
}

fn parse_complex(value: &Value, pointer: &str) -> Result<C64> {
    let pair = as_array(value, pointer)?;
    if pair.len() != 2 {
        return Err(schema(pointer, "expected [re, im]"));
    }
    Ok(c(
        as_f64(&pair[0], &format!("{pointer}/0"))?,
        as_f64(&pair[1], &format!("{pointer}/1"))?,
    ))
}

fn complex_to_json(z: C64) -> Value {
    json!([z.re, z.im])
}

fn parse_vector(value: &Value, pointer: &str) -> Result<CVector> {
    let entries = as_array(value, pointer)?;
    let data = entries
        .iter()
        .enumerate()
        .map(|(i, z)| parse_complex(z, &format!("{pointer}/{i}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(CVector::from_vec(data))
}

pub fn vector_to_json(v: &CVector) -> Value {
    Value::Array(v.iter().map(|z| complex_to_json(*z)).collect())
}

/// Parses `{"rows", "cols", "data"}` found at `pointer`.
pub fn parse_matrix_at(value: &Value, pointer: &str) -> Result<CMatrix> {
    let rows = as_usize(field(value, pointer, "rows")?, &format!("{pointer}/rows"))?;
    let cols = as_usize(field(value, pointer, "cols")?, &format!("{pointer}/cols"))?;
    let data_ptr = format!("{pointer}/data");
    let data = as_array(field(value, pointer, "data")?, &data_ptr)?;
    if data.len() != rows * cols {
        return Err(schema(
            &data_ptr,
            format!(
                "expected {} entries for a {rows}x{cols} matrix, found {}",
                rows * cols,
                data.len()
            ),
        ));
    }
    let entries = data
        .iter()
        .enumerate()
        .map(|(i, z)| parse_complex(z, &format!("{data_ptr}/{i}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(CMatrix::from_row_slice(rows, cols, &entries))
}

pub fn parse_matrix(value: &Value) -> Result<CMatrix> {
    parse_matrix_at(value, "")
}

pub fn matrix_to_json(m: &CMatrix) -> Value {
    let (rows, cols) = m.shape();
    let data: Vec<Value> = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .map(|(i, j)| complex_to_json(m[(i, j)]))
        .collect();
    json!({ "rows": rows, "cols": cols, "data": data })
}

pub fn parse_state(value: &Value) -> Result<DensityMatrix> {
    DensityMatrix::new(parse_matrix(value)?)
}

pub fn state_to_json(rho: &DensityMatrix) -> Value {
    matrix_to_json(rho.matrix())
}

/// Parses `{"dim_in", "dim_out", "kraus": [matrix, ...]}`.
pub fn parse_channel(value: &Value) -> Result<KrausChannel> {
    parse_channel_with_tol(value, CPTP_TOL)
}

/// [`parse_channel`] accepting a trace-preservation residual up to `tol`.
pub fn parse_channel_with_tol(value: &Value, tol: f64) -> Result<KrausChannel> {
    let dim_in = as_usize(field(value, "", "dim_in")?, "/dim_in")?;
    let dim_out = as_usize(field(value, "", "dim_out")?, "/dim_out")?;
    let list = as_array(field(value, "", "kraus")?, "/kraus")?;
    let mut kraus = Vec::with_capacity(list.len());
    for (k, item) in list.iter().enumerate() {
        let pointer = format!("/kraus/{k}");
        let m = parse_matrix_at(item, &pointer)?;
        if m.shape() != (dim_out, dim_in) {
            return Err(schema(
                &pointer,
                format!(
                    "Kraus operator is {}x{}, expected {dim_out}x{dim_in}",
                    m.nrows(),
                    m.ncols()
                ),
            ));
        }
        kraus.push(m);
    }
    if kraus.is_empty() {
        return Err(schema("/kraus", "at least one Kraus operator is required"));
    }
    KrausChannel::new_with_tol(dim_in, dim_out, kraus, tol)
}

pub fn channel_to_json(ch: &KrausChannel) -> Value {
    json!({
        "dim_in": ch.dim_in(),
        "dim_out": ch.dim_out(),
        "kraus": ch.kraus().iter().map(matrix_to_json).collect::<Vec<_>>(),
    })
}

/// Parses `{"dim", "vectors": [[[re, im], ...], ...]}` with optional `"labels"`.
pub fn parse_family(value: &Value) -> Result<PureStateFamily> {
    let dim = as_usize(field(value, "", "dim")?, "/dim")?;
    let list = as_array(field(value, "", "vectors")?, "/vectors")?;
    let vectors = list
        .iter()
        .enumerate()
        .map(|(i, v)| parse_vector(v, &format!("/vectors/{i}")))
        .collect::<Result<Vec<_>>>()?;
    let family = PureStateFamily::new(dim, vectors)?;
    match value.get("labels") {
        None | Some(Value::Null) => Ok(family),
        Some(labels) => {
            let labels = as_array(labels, "/labels")?
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    l.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| schema(&format!("/labels/{i}"), "expected a string"))
                })
                .collect::<Result<Vec<_>>>()?;
            family.with_labels(labels)
        }
    }
}

pub fn family_to_json(family: &PureStateFamily) -> Value {
    let mut obj = Map::new();
    obj.insert("dim".into(), json!(family.dim()));
    obj.insert(
        "vectors".into(),
        Value::Array(family.vectors().iter().map(vector_to_json).collect()),
    );
    if let Some(labels) = family.labels() {
        obj.insert("labels".into(), json!(labels));
    }
    Value::Object(obj)
}

/// Parses `{"weights": [...], "states": [matrix, ...]}`.
pub fn parse_ensemble(value: &Value) -> Result<DiscreteEnsemble> {
    let weights = as_array(field(value, "", "weights")?, "/weights")?
        .iter()
        .enumerate()
        .map(|(i, w)| as_f64(w, &format!("/weights/{i}")))
        .collect::<Result<Vec<_>>>()?;
    let states = as_array(field(value, "", "states")?, "/states")?
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let pointer = format!("/states/{i}");
            DensityMatrix::new(parse_matrix_at(s, &pointer)?).map_err(|e| match e {
                Error::InvalidState(msg) => Error::InvalidState(format!("{pointer}: {msg}")),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteEnsemble::new(weights, states)
}

pub fn ensemble_to_json(ensemble: &DiscreteEnsemble) -> Value {
    json!({
        "weights": ensemble.weights(),
        "states": ensemble.states().iter().map(state_to_json).collect::<Vec<_>>(),
    })
}

/// A real number, or `"+inf"`, `"-inf"`, `"nan"` when not finite.
pub fn finite_or_string(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("+inf")
    } else if x < 0.0 {
        json!("-inf")
    } else {
        json!("nan")
    }
}

pub fn cq_to_json(cq: &CqStructure) -> Value {
    json!({
        "projectors": cq.projectors.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "sigmas": cq.sigmas.iter().map(state_to_json).collect::<Vec<_>>(),
        "block_ranks": cq.block_ranks(),
        "residual": finite_or_string(cq.residual),
    })
}

pub fn ond_to_json(ond: &OndDecomposition) -> Value {
    json!({
        "components": ond.components,
        "projectors": ond.projectors.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "ambiguous_pairs": ond
            .ambiguous_pairs
            .iter()
            .map(|(i, j, o)| json!({ "i": i, "j": j, "overlap": o }))
            .collect::<Vec<_>>(),
    })
}

pub fn extraction_to_json(ext: &KrausExtraction) -> Value {
    json!({
        "kraus": ext.kraus.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "members": ext.members,
        "ranks": ext.ranks,
        "max_rank": ext.max_rank,
        "member_rank": ext.member_rank,
        "count": ext.count(),
        "budget": ext.budget,
        "m_value": ext.m_value,
        "span_dim": ext.span_dim,
        "reversibility_residual": finite_or_string(ext.reversibility_residual),
        "tp_residual": finite_or_string(ext.tp_residual),
        "reexpansion_distance": finite_or_string(ext.reexpansion_distance),
        "reversible": ext.reversible,
        "restricted": ext.restricted,
    })
}

pub fn gram_to_json(rec: &GramReconstruction) -> Value {
    json!({
        "projectors": rec.projectors.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "gram": matrix_to_json(&rec.gram),
        "witness": rec.witness.as_ref().map(matrix_to_json),
        "witness_residual": rec.witness_residual.map(finite_or_string),
    })
}

/// Witness objects of a report; absent witnesses are omitted.
pub fn witnesses_to_json(report: &CriterionReport) -> Value {
    let w = &report.witnesses;
    let mut obj = Map::new();
    if let Some(cq) = &w.cq {
        obj.insert("cq".into(), cq_to_json(cq));
    }
    if let Some(kraus) = &w.kraus {
        obj.insert(
            "kraus".into(),
            Value::Array(kraus.iter().map(matrix_to_json).collect()),
        );
    }
    if let Some(ranks) = &w.kraus_ranks {
        obj.insert("kraus_ranks".into(), json!(ranks));
    }
    if let Some(gram) = &w.gram {
        obj.insert("gram".into(), matrix_to_json(gram));
    }
    if let Some(isometry) = &w.isometry {
        obj.insert("isometry".into(), matrix_to_json(isometry));
    }
    if let Some(projectors) = &w.projectors {
        obj.insert(
            "projectors".into(),
            Value::Array(projectors.iter().map(matrix_to_json).collect()),
        );
    }
    if let Some(basis) = &w.ensemble_basis {
        obj.insert("ensemble_basis".into(), matrix_to_json(basis));
    }
    Value::Object(obj)
}

pub fn report_to_json(report: &CriterionReport) -> Value {
    let statements: Map<String, Value> = report
        .statements
        .iter()
        .map(|(k, s)| {
            let mut obj = Map::new();
            obj.insert("outcome".into(), json!(s.outcome.as_str()));
            if let Some(r) = s.residual {
                obj.insert("residual".into(), finite_or_string(r));
            }
            if let Some(note) = &s.note {
                obj.insert("note".into(), json!(note));
            }
            (k.clone(), Value::Object(obj))
        })
        .collect();
    let values: Map<String, Value> = report
        .values
        .iter()
        .map(|(k, v)| (k.clone(), finite_or_string(*v)))
        .collect();
    json!({
        "verdict": report.verdict.as_str(),
        "statements": statements,
        "values": values,
        "witnesses": witnesses_to_json(report),
        "m_value": report.m_value,
        "tolerance": report.tolerance,
        "restricted": report.restricted,
        "warnings": report.warnings,
    })
}

/// Parses JSON text, mapping syntax errors to a schema error at the root.
pub fn parse_text(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| schema("", format!("invalid JSON: {e}")))
}
