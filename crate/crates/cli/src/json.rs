//! JSON encodings shared by every report.

use std::str::FromStr;

use num_bigint::BigInt;
use qam_core::lattice::LatticeState;
use qam_core::rational::to_decimal;
use qam_core::{BitMask, Distribution, Rational};
use serde_json::{json, Map, Number, Value};

pub const DECIMAL_DIGITS: u32 = 12;

fn integer(n: &BigInt) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("integers are valid JSON numbers"))
}

pub fn rational(q: &Rational) -> Value {
    json!({
        "num": integer(q.numer()),
        "den": integer(q.denom()),
        "decimal": to_decimal(q, DECIMAL_DIGITS),
    })
}

/// Outcomes in token order, then the null outcome as its own field.
pub fn distribution(d: &Distribution) -> Value {
    let outcomes: Vec<Value> = d
        .iter()
        .map(|(o, p)| json!({ "outcome": o.as_str(), "probability": rational(p) }))
        .collect();
    json!({ "outcomes": outcomes, "null": rational(d.null_mass()) })
}

fn mask_or_null(m: Option<BitMask>) -> Value {
    m.map_or(Value::Null, |m| Value::String(m.to_string()))
}

/// One cell in canonical order; `include` adds the per-occurrence bits.
pub fn cell(state: &LatticeState, supra: BitMask, include: bool) -> Value {
    let c = state.cell(supra);
    let mut obj = Map::new();
    obj.insert("supracontext".into(), supra.to_string().into());
    if include {
        let bits: String = (0..state.processed())
            .map(|row| if state.include(row, supra) == Some(true) { '1' } else { '0' })
            .collect();
        obj.insert("include".into(), bits.into());
    }
    obj.insert("sum".into(), c.sum().into());
    obj.insert(
        "first_outcome".into(),
        state.first_outcome(supra).map_or(Value::Null, |o| o.as_str().into()),
    );
    obj.insert("plur_outcome".into(), c.plur_outcome().into());
    obj.insert("first_intersect".into(), mask_or_null(state.first_intersect(supra)));
    obj.insert("plur_intersect".into(), c.plur_intersect().into());
    obj.insert("hetero".into(), c.hetero().into());
    obj.insert("amplitude".into(), c.amplitude().into());
    Value::Object(obj)
}

pub fn lattice(state: &LatticeState, include: bool) -> Value {
    Value::Array(state.canonical_masks().into_iter().map(|m| cell(state, m, include)).collect())
}

pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
