//! JSON encoding shared by the library and the command line tool.
//!
//! Integers are emitted as JSON numbers while their magnitude stays
//! within 2^53 (the range every double based reader recovers exactly)
//! and as decimal strings beyond; parsers accept both forms. Exact
//! rationals travel as `"p/q"` strings. A fan is its list of maximal
//! cones, each given by generators; weights, when present, line up
//! with the maximal cones sorted lexicographically by their sorted
//! generator lists, which is also the order the writer emits.

use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::enumeration::{Constraint, CountProblem, CountResult, CrossRatio, EnumError};
use crate::fan::{Cone, Fan, FanError, ValidationConfig};
use crate::linalg::{Int, IntMat, IntVec, Rat, RatVec};
use crate::moduli::{Degree, ModuliError};
use crate::morphism::{FanMorphism, MorphismError};
use crate::tropical::WeightedFan;

/// largest integer magnitude emitted as a JSON number
const MAX_SAFE: i64 = 1 << 53;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error("field `{field}` expects {expected}, found {found}")]
    Expected {
        field: &'static str,
        expected: &'static str,
        found: String,
    },
    #[error("field `{field}`: cannot read `{text}` as an exact {kind}")]
    BadNumber {
        field: &'static str,
        kind: &'static str,
        text: String,
    },
    #[error("vector of length {got} where the ambient space needs {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("{got} weights for {expected} maximal cones")]
    WeightCount { expected: usize, got: usize },
    #[error("weight {0} is not a positive integer")]
    NonPositiveWeight(Int),
    #[error("weights require a pure fan")]
    NotPure,
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error(transparent)]
    Enumeration(#[from] EnumError),
}

fn int_to_json(x: &Int) -> Value {
    match x.to_i64() {
        Some(v) if (-MAX_SAFE..=MAX_SAFE).contains(&v) => Value::from(v),
        _ => Value::String(x.to_string()),
    }
}

fn int_from_json(v: &Value, field: &'static str) -> Result<Int, JsonError> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Int::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Int::from(u))
            } else {
                Err(JsonError::BadNumber {
                    field,
                    kind: "integer",
                    text: n.to_string(),
                })
            }
        }
        Value::String(s) => s.parse::<Int>().map_err(|_| JsonError::BadNumber {
            field,
            kind: "integer",
            text: s.clone(),
        }),
        other => Err(JsonError::Expected {
            field,
            expected: "an integer (number or decimal string)",
            found: other.to_string(),
        }),
    }
}

fn rat_to_json(x: &Rat) -> Value {
    Value::String(x.to_string())
}

fn rat_from_json(v: &Value, field: &'static str) -> Result<Rat, JsonError> {
    match v {
        Value::String(s) => s.parse::<Rat>().map_err(|_| JsonError::BadNumber {
            field,
            kind: "rational",
            text: s.clone(),
        }),
        Value::Number(_) => Ok(Rat::from_integer(int_from_json(v, field)?)),
        other => Err(JsonError::Expected {
            field,
            expected: "a rational (\"p/q\" string or integer)",
            found: other.to_string(),
        }),
    }
}

fn int_vec_to_json(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_to_json).collect())
}

fn rat_vec_to_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat_to_json).collect())
}

fn as_array<'a>(v: &'a Value, field: &'static str) -> Result<&'a Vec<Value>, JsonError> {
    v.as_array().ok_or(JsonError::Expected {
        field,
        expected: "an array",
        found: v.to_string(),
    })
}

fn int_vec_from_json(v: &Value, field: &'static str) -> Result<IntVec, JsonError> {
    as_array(v, field)?.iter().map(|x| int_from_json(x, field)).collect()
}

fn rat_vec_from_json(v: &Value, field: &'static str) -> Result<RatVec, JsonError> {
    as_array(v, field)?.iter().map(|x| rat_from_json(x, field)).collect()
}

fn get<'a>(v: &'a Value, field: &'static str) -> Result<&'a Value, JsonError> {
    v.get(field).ok_or(JsonError::Missing(field))
}

fn usize_from_json(v: &Value, field: &'static str) -> Result<usize, JsonError> {
    int_from_json(v, field)?.to_usize().ok_or(JsonError::Expected {
        field,
        expected: "a small nonnegative integer",
        found: v.to_string(),
    })
}

/// generators sorted inside the cone; the emission and weight order
/// sorts cones lexicographically by this key
fn cone_key(c: &Cone) -> Vec<IntVec> {
    let mut gens = c.generators();
    gens.sort();
    gens
}

fn cone_to_json(c: &Cone) -> Value {
    let key = cone_key(c);
    json!({ "generators": Value::Array(key.iter().map(|g| int_vec_to_json(g)).collect()) })
}

fn emission_order(fan: &Fan) -> Vec<(Vec<IntVec>, usize)> {
    let mut order: Vec<(Vec<IntVec>, usize)> = fan
        .maximal_cones()
        .enumerate()
        .map(|(i, c)| (cone_key(c), i))
        .collect();
    order.sort();
    order
}

pub fn fan_to_json(fan: &Fan) -> Value {
    let maximal: Vec<&Cone> = fan.maximal_cones().collect();
    let cones: Vec<Value> = emission_order(fan)
        .into_iter()
        .map(|(_, i)| cone_to_json(maximal[i]))
        .collect();
    json!({ "ambient_rank": fan.ambient_rank(), "cones": cones })
}

pub fn fan_from_json(v: &Value, config: &ValidationConfig) -> Result<Fan, JsonError> {
    let ambient_rank = usize_from_json(get(v, "ambient_rank")?, "ambient_rank")?;
    let mut cones = Vec::new();
    for entry in as_array(get(v, "cones")?, "cones")? {
        let gens_json = as_array(get(entry, "generators")?, "generators")?;
        let mut gens = Vec::with_capacity(gens_json.len());
        for g in gens_json {
            let g = int_vec_from_json(g, "generators")?;
            if g.len() != ambient_rank {
                return Err(JsonError::WrongLength {
                    expected: ambient_rank,
                    got: g.len(),
                });
            }
            gens.push(g);
        }
        cones.push(Cone::from_generators(&gens, ambient_rank));
    }
    if cones.is_empty() {
        return Ok(Fan::empty(ambient_rank));
    }
    Ok(Fan::from_cones(cones, config)?)
}

pub fn weighted_fan_to_json(x: &WeightedFan) -> Value {
    let mut v = fan_to_json(x.fan());
    let weights: Vec<Value> = emission_order(x.fan())
        .into_iter()
        .map(|(_, i)| int_to_json(&x.weights()[i]))
        .collect();
    v.as_object_mut()
        .expect("fan json is an object")
        .insert("weights".into(), Value::Array(weights));
    v
}

/// Reads a fan with optional weights; a missing `weights` field means
/// every maximal cone carries weight one.
pub fn weighted_fan_from_json(
    v: &Value,
    config: &ValidationConfig,
) -> Result<WeightedFan, JsonError> {
    let fan = fan_from_json(v, config)?;
    if !fan.is_pure() {
        return Err(JsonError::NotPure);
    }
    let Some(weights_json) = v.get("weights") else {
        return Ok(WeightedFan::with_unit_weights(fan));
    };
    let raw = int_vec_from_json(weights_json, "weights")?;
    let count = fan.maximal_cones().count();
    if raw.len() != count {
        return Err(JsonError::WeightCount {
            expected: count,
            got: raw.len(),
        });
    }
    if let Some(w) = raw.iter().find(|w| !w.is_positive()) {
        return Err(JsonError::NonPositiveWeight(w.clone()));
    }
    // given weights follow the sorted emission order; store them back
    // in the fan's own maximal cone order
    let mut weights = vec![Int::zero(); count];
    for (slot, (_, i)) in emission_order(&fan).into_iter().enumerate() {
        weights[i] = raw[slot].clone();
    }
    Ok(WeightedFan::new(fan, weights))
}

pub fn morphism_to_json(f: &FanMorphism) -> Value {
    let rows: Vec<Value> = (0..f.matrix().rows())
        .map(|i| int_vec_to_json(f.matrix().row(i)))
        .collect();
    json!({
        "matrix": rows,
        "source": weighted_fan_to_json(f.source()),
        "target": weighted_fan_to_json(f.target()),
    })
}

pub fn morphism_from_json(
    v: &Value,
    config: &ValidationConfig,
) -> Result<FanMorphism, JsonError> {
    let source = weighted_fan_from_json(get(v, "source")?, config)?;
    let target = weighted_fan_from_json(get(v, "target")?, config)?;
    let cols = source.fan().ambient_rank();
    let mut rows = Vec::new();
    for row in as_array(get(v, "matrix")?, "matrix")? {
        let row = int_vec_from_json(row, "matrix")?;
        if row.len() != cols {
            return Err(JsonError::WrongLength {
                expected: cols,
                got: row.len(),
            });
        }
        rows.push(row);
    }
    if rows.len() != target.fan().ambient_rank() {
        return Err(JsonError::WrongLength {
            expected: target.fan().ambient_rank(),
            got: rows.len(),
        });
    }
    let matrix = IntMat::from_rows(rows, cols);
    Ok(FanMorphism::new(source, target, matrix)?)
}

pub fn degree_to_json(d: &Degree) -> Value {
    json!({
        "r": d.r(),
        "entries": Value::Array(d.entries().iter().map(|e| int_vec_to_json(e)).collect()),
    })
}

pub fn degree_from_json(v: &Value) -> Result<Degree, JsonError> {
    let r = usize_from_json(get(v, "r")?, "r")?;
    let entries = as_array(get(v, "entries")?, "entries")?
        .iter()
        .map(|e| int_vec_from_json(e, "entries"))
        .collect::<Result<Vec<IntVec>, JsonError>>()?;
    Ok(Degree::new(r, entries)?)
}

/// Renders a finished count together with the seed that produced its
/// condition data; the exact values go out as strings.
pub fn count_result_to_json(result: &CountResult, seed: u64) -> Value {
    let solutions: Vec<Value> = result
        .solutions
        .iter()
        .map(|s| {
            json!({
                "splits": Value::Array(
                    s.tree.splits().iter().map(|&m| int_to_json(&Int::from(m))).collect(),
                ),
                "lengths": rat_vec_to_json(&s.lengths),
                "root": rat_vec_to_json(&s.root),
                "multiplicity": rat_to_json(&s.multiplicity),
            })
        })
        .collect();
    json!({
        "labeled": rat_to_json(&result.labeled),
        "group_order": int_to_json(&result.group_order),
        "unlabeled": rat_to_json(&result.unlabeled),
        "seed": seed,
        "solutions": solutions,
    })
}

fn constraint_from_json(v: &Value, contracted: usize) -> Result<Constraint, JsonError> {
    let end = usize_from_json(get(v, "end")?, "end")?;
    if end == 0 || end > contracted {
        return Err(JsonError::Expected {
            field: "end",
            expected: "a label between 1 and the number of contracted ends",
            found: end.to_string(),
        });
    }
    if let Some(p) = v.get("point") {
        return Ok(Constraint::point(end, rat_vec_from_json(p, "point")?));
    }
    let base = rat_vec_from_json(get(v, "base")?, "base")?;
    let directions = as_array(get(v, "directions")?, "directions")?
        .iter()
        .map(|d| int_vec_from_json(d, "directions"))
        .collect::<Result<Vec<IntVec>, JsonError>>()?;
    Ok(Constraint::subspace(end, base, directions))
}

fn cross_ratio_from_json(v: &Value) -> Result<CrossRatio, JsonError> {
    let labels = as_array(get(v, "side")?, "side")?
        .iter()
        .map(|x| usize_from_json(x, "side"))
        .collect::<Result<Vec<usize>, JsonError>>()?;
    if labels.len() != 2 || labels.iter().any(|&l| l == 0 || l > 4) {
        return Err(JsonError::Expected {
            field: "side",
            expected: "two labels among 1..4",
            found: format!("{labels:?}"),
        });
    }
    let mut side = labels.iter().fold(0u64, |m, &l| m | 1 << (l - 1));
    if side & 1 == 0 {
        // normalize to the side of the quartet containing the first end
        side = !side & 0b1111;
    }
    let length = rat_from_json(get(v, "length")?, "length")?;
    Ok(CrossRatio { side, length })
}

/// Reads a full counting problem: ambient rank, contracted end count,
/// degree, explicit conditions, and an optional cross-ratio given by
/// the pair of quartet labels on one side plus its length.
pub fn count_problem_from_json(v: &Value) -> Result<CountProblem, JsonError> {
    let r = usize_from_json(get(v, "r")?, "r")?;
    let contracted = usize_from_json(get(v, "contracted")?, "contracted")?;
    let delta = degree_from_json(get(v, "degree")?)?;
    let constraints = as_array(get(v, "constraints")?, "constraints")?
        .iter()
        .map(|c| constraint_from_json(c, contracted))
        .collect::<Result<Vec<Constraint>, JsonError>>()?;
    let cross_ratio = match v.get("cross_ratio") {
        Some(cr) => Some(cross_ratio_from_json(cr)?),
        None => None,
    };
    Ok(CountProblem::new(r, contracted, delta, constraints, cross_ratio)?)
}
