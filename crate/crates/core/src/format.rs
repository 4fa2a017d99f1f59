//! JSON interchange formats.
//!
//! Integers are written as JSON numbers when they fit in 64 bits and as
//! decimal strings otherwise; both forms are accepted on input. Objects are
//! emitted with sorted keys, so output is byte-stable.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::chardata::{Ambient, CharacteristicData, EulerCycle, OrbitType};
use crate::classify::{Certificate, Comparison, EquivalenceWitness, Fingerprint};
use crate::error::{Error, Result};
use crate::lattice::{IntMatrix, IntVector};
use crate::quasitoric::{CharacteristicFunction, SimplePolytope};
use crate::report::ValidationReport;
use crate::sponge::{Cell, HomologyResult, Incidence, SpongeComplex};
use crate::weights::WeightSystem;

/// Parses JSON text; syntax errors carry line and column.
pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::Input(format!("malformed JSON at line {} column {}: {}", e.line(), e.column(), e)))
}

/// Pretty-printed canonical form (sorted keys, trailing newline).
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn int_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(i) => Value::from(i),
        None => Value::String(x.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(Error::Input(format!("{} is not an integer", n)))
            }
        }
        Value::String(s) => s.trim().parse::<BigInt>().map_err(|_| Error::Input(format!("`{}` is not an integer", s))),
        other => Err(Error::Input(format!("expected an integer, found {}", other))),
    }
}

fn small_int(v: &Value, what: &str) -> Result<i64> {
    int_from_json(v)?.to_i64().ok_or_else(|| Error::Input(format!("{} is out of range", what)))
}

fn usize_field(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    let v = field(obj, key)?;
    let x = small_int(v, key)?;
    usize::try_from(x).map_err(|_| Error::Input(format!("`{}` must be nonnegative", key)))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::Input(format!("{} must be a JSON object", what)))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Input(format!("{} must be a JSON array", what)))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Input(format!("missing field `{}`", key)))
}

fn string(v: &Value, what: &str) -> Result<String> {
    v.as_str().map(str::to_string).ok_or_else(|| Error::Input(format!("{} must be a string", what)))
}

pub fn vector_to_json(v: &IntVector) -> Value {
    Value::Array(v.entries().iter().map(int_to_json).collect())
}

pub fn vector_from_json(v: &Value) -> Result<IntVector> {
    Ok(IntVector::new(array(v, "vector")?.iter().map(int_from_json).collect::<Result<_>>()?))
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(m.row_vectors().iter().map(vector_to_json).collect())
}

pub fn weights_to_json(ws: &WeightSystem) -> Value {
    let mut obj = Map::new();
    obj.insert("n".into(), Value::from(ws.n()));
    obj.insert("weights".into(), Value::Array(ws.weights().iter().map(vector_to_json).collect()));
    if let Some(s) = ws.signs() {
        obj.insert("signs".into(), Value::Array(s.iter().map(|&x| Value::from(x)).collect()));
    }
    Value::Object(obj)
}

/// `{"n", "weights": [[..], ..], "signs"?}`; signs, when present, record an
/// omniorientation already applied to the weights.
pub fn weights_from_json(v: &Value) -> Result<WeightSystem> {
    let obj = object(v, "weight system")?;
    let weights: Vec<IntVector> =
        array(field(obj, "weights")?, "weights")?.iter().map(vector_from_json).collect::<Result<_>>()?;
    if let Some(n) = obj.get("n") {
        let n = small_int(n, "n")?;
        if n != weights.len() as i64 {
            return Err(Error::DimensionMismatch(format!("n = {} but {} weights given", n, weights.len())));
        }
    }
    let ws = WeightSystem::new(weights)?;
    match obj.get("signs") {
        None | Some(Value::Null) => Ok(ws),
        Some(s) => {
            let signs: Vec<i8> =
                array(s, "signs")?.iter().map(|x| small_int(x, "sign").map(|k| k as i8)).collect::<Result<_>>()?;
            if signs.len() != ws.n() || signs.iter().any(|&x| x != 1 && x != -1) {
                return Err(Error::Input("signs must be n values in {+1, -1}".into()));
            }
            // Stored weights have the signs applied: undo, then re-apply so the
            // choice is recorded.
            let base = WeightSystem::new(
                ws.weights().iter().zip(&signs).map(|(w, &s)| if s < 0 { -w } else { w.clone() }).collect(),
            )?;
            base.with_signs(&signs)
        }
    }
}

pub fn sponge_to_json(s: &SpongeComplex) -> Value {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s.cell_dim(a).cmp(&s.cell_dim(b)).then_with(|| s.id(a).cmp(s.id(b))));
    let cells: Vec<Value> =
        order.iter().map(|&c| json!({"id": s.id(c), "dim": s.cell_dim(c), "label": s.cell(c).label})).collect();
    let mut inc = Map::new();
    for &c in &order {
        let mut faces: Vec<(String, i64)> = s.boundary_of(c).iter().map(|&(f, k)| (s.id(f).to_string(), k)).collect();
        faces.sort();
        if !faces.is_empty() {
            inc.insert(s.id(c).to_string(), Value::Array(faces.into_iter().map(|(f, k)| json!([f, k])).collect()));
        }
    }
    json!({"n": s.n(), "cells": cells, "incidence": inc})
}

fn cells_and_incidence(obj: &Map<String, Value>) -> Result<(Vec<Cell>, Incidence)> {
    let cells = array(field(obj, "cells")?, "cells")?
        .iter()
        .map(|c| {
            let o = object(c, "cell")?;
            Ok(Cell {
                id: string(field(o, "id")?, "cell id")?,
                dim: usize_field(o, "dim")?,
                label: o.get("label").and_then(Value::as_str).unwrap_or("").to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut incidence = BTreeMap::new();
    if let Some(inc) = obj.get("incidence") {
        for (id, faces) in object(inc, "incidence")? {
            let list = array(faces, "incidence list")?
                .iter()
                .map(|pair| {
                    let p = array(pair, "incidence entry")?;
                    if p.len() != 2 {
                        return Err(Error::Input(format!("incidence entry of {} must be [id, ±1]", id)));
                    }
                    Ok((string(&p[0], "face id")?, small_int(&p[1], "incidence")?))
                })
                .collect::<Result<Vec<_>>>()?;
            incidence.insert(id.clone(), list);
        }
    }
    Ok((cells, incidence))
}

/// `{"n", "cells": [{"id", "dim", "label"}], "incidence": {"id": [["face", ±1], ..]}}`.
pub fn sponge_from_json(v: &Value) -> Result<SpongeComplex> {
    let obj = object(v, "sponge")?;
    let n = usize_field(obj, "n")?;
    let (cells, incidence) = cells_and_incidence(obj)?;
    SpongeComplex::new(n, cells, &incidence)
}

/// Same layout as a sponge, with cells up to dimension `n - 1`.
pub fn cell_manifold_from_json(v: &Value) -> Result<crate::quasitoric::CellManifold> {
    let obj = object(v, "cell manifold")?;
    let n = usize_field(obj, "n")?;
    let (cells, incidence) = cells_and_incidence(obj)?;
    crate::quasitoric::CellManifold::new(n, cells, &incidence)
}

fn ambient_to_json(a: &Ambient) -> (Value, Option<Value>) {
    match a {
        Ambient::Product { boundary_trivial } => (Value::from("product"), Some(Value::from(*boundary_trivial))),
        other => (Value::from(other.name()), None),
    }
}

pub fn chardata_to_json(cd: &CharacteristicData) -> Value {
    let mu: Map<String, Value> = cd.mu.iter().map(|(k, v)| (k.clone(), vector_to_json(v))).collect();
    let signs: Map<String, Value> = cd.euler_sign.iter().map(|(k, &v)| (k.clone(), Value::from(v))).collect();
    let (ambient, trivial) = ambient_to_json(&cd.ambient);
    let mut obj = Map::new();
    obj.insert("n".into(), Value::from(cd.n));
    obj.insert("sponge".into(), sponge_to_json(&cd.sponge));
    obj.insert("mu".into(), Value::Object(mu));
    obj.insert("euler_sign".into(), Value::Object(signs));
    obj.insert("ambient".into(), ambient);
    if let Some(t) = trivial {
        obj.insert("boundary_trivial".into(), t);
    }
    Value::Object(obj)
}

/// `{"n", "sponge", "mu": {facet: [..]}, "euler_sign": {facet: ±1},
/// "ambient": "sphere" | "product" | "abstract", "boundary_trivial"?}`.
/// `boundary_trivial` defaults to `true` for product ambients.
pub fn chardata_from_json(v: &Value) -> Result<CharacteristicData> {
    let obj = object(v, "characteristic data")?;
    let sponge = sponge_from_json(field(obj, "sponge")?)?;
    if let Some(n) = obj.get("n") {
        let n = small_int(n, "n")?;
        if n != sponge.n() as i64 {
            return Err(Error::DimensionMismatch(format!("n = {} but the sponge has n = {}", n, sponge.n())));
        }
    }
    let mu = object(field(obj, "mu")?, "mu")?
        .iter()
        .map(|(k, x)| Ok((k.clone(), vector_from_json(x)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let signs = object(field(obj, "euler_sign")?, "euler_sign")?
        .iter()
        .map(|(k, x)| Ok((k.clone(), small_int(x, "euler sign")?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let ambient = match obj.get("ambient").and_then(Value::as_str).unwrap_or("abstract") {
        "sphere" => Ambient::Sphere,
        "product" => {
            Ambient::Product { boundary_trivial: obj.get("boundary_trivial").and_then(Value::as_bool).unwrap_or(true) }
        }
        "abstract" => Ambient::Abstract,
        other => return Err(Error::Input(format!("unknown ambient `{}`", other))),
    };
    CharacteristicData::new(sponge, mu, signs, ambient)
}

/// `{"n", "facets": [ids], "vertices": [[facet ids], ..]}`.
pub fn polytope_from_json(v: &Value) -> Result<SimplePolytope> {
    let obj = object(v, "polytope")?;
    let n = usize_field(obj, "n")?;
    let facets =
        array(field(obj, "facets")?, "facets")?.iter().map(|f| string(f, "facet id")).collect::<Result<Vec<_>>>()?;
    let vertices = array(field(obj, "vertices")?, "vertices")?
        .iter()
        .map(|vx| array(vx, "vertex")?.iter().map(|f| string(f, "facet id")).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    SimplePolytope::new(n, facets, &vertices)
}

pub fn polytope_to_json(p: &SimplePolytope) -> Value {
    let vertices: Vec<Value> = p
        .vertices()
        .iter()
        .map(|v| Value::Array(v.iter().map(|&f| Value::from(p.facets()[f].clone())).collect()))
        .collect();
    json!({"n": p.n(), "facets": p.facets(), "vertices": vertices})
}

/// `{"facet_id": [..], ..}`.
pub fn lambda_from_json(v: &Value) -> Result<CharacteristicFunction> {
    let lambda = object(v, "λ")?
        .iter()
        .map(|(k, x)| Ok((k.clone(), vector_from_json(x)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(CharacteristicFunction::new(lambda))
}

pub fn lambda_to_json(l: &CharacteristicFunction) -> Value {
    Value::Object(l.lambda.iter().map(|(k, v)| (k.clone(), vector_to_json(v))).collect())
}

pub fn report_to_json(r: &ValidationReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

pub fn homology_to_json(h: &HomologyResult) -> Value {
    json!({
        "betti": h.betti,
        "torsion": h.torsion.iter().map(|t| t.iter().map(int_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn euler_cycle_to_json(c: &EulerCycle) -> Value {
    let sigma: Map<String, Value> = c.sigma.iter().map(|(k, v)| (k.clone(), vector_to_json(v))).collect();
    let defects: Map<String, Value> = c.defects.iter().map(|(k, v)| (k.clone(), vector_to_json(v))).collect();
    json!({
        "sigma": sigma,
        "is_cycle": c.is_cycle,
        "defects": defects,
        "determines_euler_class": c.determines_euler_class,
    })
}

pub fn orbit_types_to_json(types: &[OrbitType]) -> Value {
    Value::Array(
        types
            .iter()
            .map(|t| {
                json!({
                    "face": t.face,
                    "stabilizer_span": t.stabilizer_span.iter().map(vector_to_json).collect::<Vec<_>>(),
                    "orbit_dim": t.orbit_dim,
                    "quotient_rank": t.quotient_rank,
                })
            })
            .collect(),
    )
}

pub fn witness_to_json(w: &EquivalenceWitness) -> Value {
    json!({
        "cell_map": w.cell_map,
        "orientation": w.orientation,
        "matrix": matrix_to_json(&w.matrix),
        "global_sign": w.global_sign,
    })
}

pub fn fingerprint_to_json(f: &Fingerprint) -> Value {
    json!({
        "n": f.n,
        "ambient": f.ambient,
        "cells_per_dim": f.cells_per_dim,
        "betti": f.betti,
        "torsion": f.torsion.iter().map(|t| t.iter().map(int_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "mu_profile": f.mu_profile.iter().map(|d| d.iter().map(|(r, s)| json!([r, int_to_json(s)])).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn comparison_to_json(c: &Comparison) -> Value {
    match c {
        Comparison::Equivalent(w) => json!({"verdict": "Equivalent", "witness": witness_to_json(w)}),
        Comparison::Inequivalent(Certificate::InvariantMismatch(d)) => {
            json!({"verdict": "Inequivalent", "certificate": {"kind": "invariant-mismatch", "detail": d}})
        }
        Comparison::Inequivalent(Certificate::NoWitness { isomorphisms_tried }) => json!({
            "verdict": "Inequivalent",
            "certificate": {"kind": "no-witness", "isomorphisms_tried": isomorphisms_tried},
        }),
        Comparison::Incomparable(reason) => json!({"verdict": "Incomparable", "reason": reason}),
    }
}
