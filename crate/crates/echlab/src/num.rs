//! Parsing of numeric command-line values such as `1/5`, `sqrt2` or `golden`.

use echlab_core::{Rational, Rotation};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Exact(Rational),
    Real(f64),
}

impl Value {
    pub fn to_f64(self) -> f64 {
        match self {
            Value::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Value::Real(x) => x,
        }
    }

    pub fn rotation(self) -> Rotation {
        match self {
            Value::Exact(r) => Rotation::Exact(r),
            Value::Real(x) => Rotation::real(x),
        }
    }
}

fn parse_int(s: &str) -> Option<i64> {
    s.trim().parse::<i64>().ok()
}

/// Integers and `p/q` are exact; decimals and named constants are real.
pub fn parse_value(s: &str) -> Result<Value, String> {
    let t = s.trim().to_ascii_lowercase();
    if let Some(n) = parse_int(&t) {
        return Ok(Value::Exact(Rational::from_integer(n)));
    }
    if let Some((p, q)) = t.split_once('/') {
        if let (Some(p), Some(q)) = (parse_int(p), parse_int(q)) {
            if q == 0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            return Ok(Value::Exact(Rational::new(p, q)));
        }
        let (x, y) = (parse_value(p)?, parse_value(q)?);
        return Ok(Value::Real(x.to_f64() / y.to_f64()));
    }
    let named = match t.as_str() {
        "pi" => Some(std::f64::consts::PI),
        "e" => Some(std::f64::consts::E),
        "phi" | "golden" => Some((1.0 + 5f64.sqrt()) / 2.0),
        _ => None,
    };
    if let Some(x) = named {
        return Ok(Value::Real(x));
    }
    if let Some(rest) = t.strip_prefix("sqrt") {
        let inner = rest.trim_start_matches('(').trim_end_matches(')');
        let x = parse_value(inner)?.to_f64();
        if x < 0.0 {
            return Err(format!("negative square root in {s:?}"));
        }
        return Ok(Value::Real(x.sqrt()));
    }
    t.parse::<f64>().map(Value::Real).map_err(|_| format!("cannot parse number {s:?}"))
}
