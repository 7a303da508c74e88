//! Canonical JSON forms. Integers are decimal strings so nothing is lost.

use serde_json::{json, Value};

use crate::error::{AlgebraError, Result};
use crate::laurent::LaurentPoly;
use crate::ratfunc::RationalFunction;
use crate::registry::Registry;
use crate::series::TruncatedSeries;
use crate::shift::{Coefficient, ShiftOperator};
use crate::Rational;

fn bad(msg: impl Into<String>) -> AlgebraError {
    AlgebraError::Json(msg.into())
}

pub fn rational_to_json(c: &Rational) -> Value {
    json!({"num": c.numer().to_string(), "den": c.denom().to_string()})
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    let get = |k: &str| -> Result<num_bigint::BigInt> {
        v.get(k)
            .and_then(Value::as_str)
            .ok_or_else(|| bad(format!("missing string field `{k}`")))?
            .parse()
            .map_err(|_| bad(format!("field `{k}` is not an integer")))
    };
    let d = get("den")?;
    if d == 0.into() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(get("num")?, d))
}

fn strings(v: &Value, key: &str) -> Result<Vec<String>> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| bad(format!("missing array `{key}`")))?
        .iter()
        .map(|s| s.as_str().map(str::to_string).ok_or_else(|| bad(format!("`{key}` must hold strings"))))
        .collect()
}

fn ints<T: TryFrom<i64>>(v: &Value, key: &str) -> Result<Vec<T>> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| bad(format!("missing array `{key}`")))?
        .iter()
        .map(|x| {
            x.as_i64()
                .and_then(|x| T::try_from(x).ok())
                .ok_or_else(|| bad(format!("`{key}` must hold small integers")))
        })
        .collect()
}

pub fn poly_to_json(p: &LaurentPoly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(e, c)| json!({"exp": e, "num": c.numer().to_string(), "den": c.denom().to_string()}))
        .collect();
    json!({"vars": p.registry().names(), "terms": terms})
}

pub fn poly_from_json(v: &Value) -> Result<LaurentPoly> {
    let reg = Registry::new(&strings(v, "vars")?);
    let mut terms = Vec::new();
    for t in v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing `terms`"))? {
        let e: Vec<i32> = ints(t, "exp")?;
        if e.len() != reg.len() {
            return Err(bad("exponent length differs from `vars`"));
        }
        terms.push((e, rational_from_json(t)?));
    }
    Ok(LaurentPoly::from_terms(&reg, terms))
}

pub fn ratfunc_to_json(f: &RationalFunction) -> Value {
    json!({"num": poly_to_json(f.numerator()), "den": poly_to_json(&f.denominator())})
}

pub fn ratfunc_from_json(v: &Value) -> Result<RationalFunction> {
    let n = poly_from_json(v.get("num").ok_or_else(|| bad("missing `num`"))?)?;
    let d = poly_from_json(v.get("den").ok_or_else(|| bad("missing `den`"))?)?;
    RationalFunction::new(n, d)
}

pub fn series_to_json(s: &TruncatedSeries) -> Value {
    let terms: Vec<Value> = s
        .terms()
        .map(|(d, c)| json!({"deg": d, "coeff": ratfunc_to_json(c)}))
        .collect();
    json!({"small": s.small_vars(), "caps": s.caps(), "terms": terms})
}

pub fn series_from_json(v: &Value) -> Result<TruncatedSeries> {
    let small = strings(v, "small")?;
    let caps: Vec<u32> = ints(v, "caps")?;
    if caps.len() != small.len() {
        return Err(bad("`caps` and `small` differ in length"));
    }
    let mut s = TruncatedSeries::zero(&small, &caps, &Registry::new::<&str>(&[]));
    for t in v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing `terms`"))? {
        let d: Vec<u32> = ints(t, "deg")?;
        if d.len() != caps.len() {
            return Err(bad("degree length differs from `small`"));
        }
        s.insert(d, ratfunc_from_json(t.get("coeff").ok_or_else(|| bad("missing `coeff`"))?)?);
    }
    Ok(s)
}

/// Coefficient kinds with a JSON form.
pub trait JsonCoefficient: Coefficient {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl JsonCoefficient for RationalFunction {
    fn to_json(&self) -> Value {
        ratfunc_to_json(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        ratfunc_from_json(v)
    }
}

impl JsonCoefficient for TruncatedSeries {
    fn to_json(&self) -> Value {
        series_to_json(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        series_from_json(v)
    }
}

pub fn operator_to_json<C: JsonCoefficient>(op: &ShiftOperator<C>) -> Value {
    let terms: Vec<Value> = op
        .terms()
        .map(|(n, c)| json!({"shift": n, "coeff": c.to_json()}))
        .collect();
    json!({"coords": op.coords(), "q": op.shift_base(), "terms": terms})
}

pub fn operator_from_json<C: JsonCoefficient>(v: &Value) -> Result<ShiftOperator<C>> {
    let coords = strings(v, "coords")?;
    let q = v.get("q").and_then(Value::as_str).ok_or_else(|| bad("missing `q`"))?;
    let mut op = ShiftOperator::zero(&coords, q);
    for t in v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing `terms`"))? {
        let n: Vec<i32> = ints(t, "shift")?;
        if n.len() != coords.len() {
            return Err(bad("shift length differs from `coords`"));
        }
        op.add_term(n, C::from_json(t.get("coeff").ok_or_else(|| bad("missing `coeff`"))?)?);
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_rational_function as parse;

    #[test]
    fn big_integers_survive() {
        let reg = Registry::new(&["x"]);
        let f = parse(&reg, "123456789012345678901234567890*x^-2/(3 - x)").unwrap();
        let v = ratfunc_to_json(&f);
        assert_eq!(ratfunc_from_json(&v).unwrap(), f);
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.contains("123456789012345678901234567890\""));
    }

    #[test]
    fn operator_round_trip() {
        let reg = Registry::new(&["x1", "x2", "t"]);
        let mut op = ShiftOperator::zero(&["x1", "x2"], "q");
        op.add_term(vec![1, 0], parse(&reg, "(t*x1 - x2)/(x1 - x2)").unwrap());
        op.add_term(vec![0, 1], parse(&reg, "(t*x2 - x1)/(x2 - x1)").unwrap());
        let back: ShiftOperator<RationalFunction> = operator_from_json(&operator_to_json(&op)).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn series_round_trip() {
        let reg = Registry::new(&["x"]);
        let x = RationalFunction::var(&reg, "x").unwrap();
        let t = crate::special::theta_expand(&x, "p", 2).unwrap();
        assert_eq!(series_from_json(&series_to_json(&t)).unwrap(), t);
        assert!(poly_from_json(&json!({"vars": ["x"], "terms": [{"exp": [1, 2], "num": "1", "den": "1"}]})).is_err());
    }
}
