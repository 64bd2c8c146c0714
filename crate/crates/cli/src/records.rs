//! Line-delimited JSON records with sorted keys.
//!
//! Values are converted explicitly so that non-finite numbers survive:
//! `∞` is written as `"inf"`, `-∞` as `"-inf"` and NaN as `"nan"`.

use std::io::Write;

use cantor_core::numerics::ExtendedReal;
use serde_json::{Map, Value};

/// One output record. `serde_json::Map` keeps keys sorted.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record(pub Map<String, Value>);

pub trait Field {
    fn to_field(&self) -> Value;
}

impl Field for f64 {
    fn to_field(&self) -> Value {
        if self.is_nan() {
            Value::from("nan")
        } else if *self == f64::INFINITY {
            Value::from("inf")
        } else if *self == f64::NEG_INFINITY {
            Value::from("-inf")
        } else {
            Value::from(*self)
        }
    }
}

impl Field for ExtendedReal {
    fn to_field(&self) -> Value {
        match self {
            ExtendedReal::Finite(x) => x.to_field(),
            ExtendedReal::Infinity => Value::from("inf"),
        }
    }
}

macro_rules! plain_field {
    ($($t:ty),*) => {$(
        impl Field for $t {
            fn to_field(&self) -> Value {
                Value::from(self.clone())
            }
        }
    )*};
}

plain_field!(bool, u32, u64, i64, usize, String);

impl Field for &str {
    fn to_field(&self) -> Value {
        Value::from(*self)
    }
}

impl<A: Field, B: Field> Field for (A, B) {
    fn to_field(&self) -> Value {
        Value::Array(vec![self.0.to_field(), self.1.to_field()])
    }
}

impl<T: Field> Field for Option<T> {
    fn to_field(&self) -> Value {
        self.as_ref().map_or(Value::Null, Field::to_field)
    }
}

impl<T: Field> Field for Vec<T> {
    fn to_field(&self) -> Value {
        Value::Array(self.iter().map(Field::to_field).collect())
    }
}

impl<T: Field> Field for [T] {
    fn to_field(&self) -> Value {
        Value::Array(self.iter().map(Field::to_field).collect())
    }
}

impl Field for Value {
    fn to_field(&self) -> Value {
        self.clone()
    }
}

impl Record {
    #[must_use]
    pub fn new() -> Self {
        Self::default()
    }

    #[must_use]
    pub fn with(mut self, key: &str, value: impl Field) -> Self {
        self.0.insert(key.to_string(), value.to_field());
        self
    }

    pub fn set(&mut self, key: &str, value: impl Field) {
        self.0.insert(key.to_string(), value.to_field());
    }

    #[must_use]
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    /// Numeric field, decoding the `"inf"` tokens.
    #[must_use]
    pub fn number(&self, key: &str) -> Option<f64> {
        decode(self.0.get(key)?)
    }

    #[must_use]
    pub fn to_line(&self) -> String {
        serde_json::to_string(&self.0).expect("maps of JSON values always serialise")
    }
}

/// A JSON number, or one of the tokens written for non-finite values.
#[must_use]
pub fn decode(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.as_str() {
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            _ => None,
        },
        _ => None,
    }
}

/// Writes one record per line.
///
/// # Errors
/// I/O failures.
pub fn write_records(records: &[Record], mut out: impl Write) -> std::io::Result<()> {
    for r in records {
        writeln!(out, "{}", r.to_line())?;
    }
    Ok(())
}

/// Tab-separated table of the scalar fields shared by all records, header
/// first; arrays and objects are skipped.
///
/// # Errors
/// I/O failures.
pub fn write_table(records: &[Record], mut out: impl Write) -> std::io::Result<()> {
    let Some(first) = records.first() else { return Ok(()) };
    let cols: Vec<&String> = first
        .0
        .iter()
        .filter(|(k, v)| !v.is_array() && !v.is_object() && records.iter().all(|r| r.0.contains_key(k.as_str())))
        .map(|(k, _)| k)
        .collect();
    writeln!(out, "{}", cols.iter().map(|c| c.as_str()).collect::<Vec<_>>().join("\t"))?;
    for r in records {
        let row: Vec<String> = cols
            .iter()
            .map(|c| match &r.0[c.as_str()] {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                v => v.to_string(),
            })
            .collect();
        writeln!(out, "{}", row.join("\t"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_sorted_and_infinity_token() {
        let r = Record::new().with("z", 1.5).with("a", f64::INFINITY).with("m", ExtendedReal::Infinity).with("n", (f64::NEG_INFINITY, 2.0));
        assert_eq!(r.to_line(), r#"{"a":"inf","m":"inf","n":["-inf",2.0],"z":1.5}"#);
        assert_eq!(r.number("a"), Some(f64::INFINITY));
    }

    #[test]
    fn table_skips_arrays() {
        let rs = vec![Record::new().with("a", 1u64).with("b", vec![1.0]), Record::new().with("a", 2u64).with("b", vec![2.0])];
        let mut buf = Vec::new();
        write_table(&rs, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a\n1\n2\n");
    }
}
