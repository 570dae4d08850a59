use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

/// A data tree value: the third ingredient, multiplied through templates.
///
/// Numbers are 64-bit signed integers only; template output is built from
/// identifiers and structure, not arithmetic, and rejecting reals keeps
/// rendering canonical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DataValue {
    Null,
    Bool(bool),
    Int(i64),
    Text(String),
    List(Vec<DataValue>),
    Record(IndexMap<String, DataValue>),
}

/// A data file failed to parse into a [`DataValue`].
#[derive(Debug, Error)]
pub enum DataError {
    #[error("data is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("non-integral number {value} at `{at}`: only 64-bit integers are supported")]
    NonIntegralNumber { value: String, at: String },
}

impl DataValue {
    pub fn record(fields: impl IntoIterator<Item = (&'static str, DataValue)>) -> DataValue {
        DataValue::Record(
            fields
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        )
    }

    pub fn text(s: impl Into<String>) -> DataValue {
        DataValue::Text(s.into())
    }

    pub fn list(items: impl IntoIterator<Item = DataValue>) -> DataValue {
        DataValue::List(items.into_iter().collect())
    }

    /// Parse a JSON document. Object key order is preserved; numbers must be
    /// integral and in `i64` range.
    pub fn from_json_str(source: &str) -> Result<DataValue, DataError> {
        let value: serde_json::Value = serde_json::from_str(source)?;
        Self::from_json(&value, "$")
    }

    fn from_json(value: &serde_json::Value, at: &str) -> Result<DataValue, DataError> {
        use serde_json::Value as J;
        Ok(match value {
            J::Null => DataValue::Null,
            J::Bool(b) => DataValue::Bool(*b),
            J::Number(n) => match n.as_i64() {
                Some(i) => DataValue::Int(i),
                None => {
                    return Err(DataError::NonIntegralNumber {
                        value: n.to_string(),
                        at: at.to_string(),
                    })
                }
            },
            J::String(s) => DataValue::Text(s.clone()),
            J::Array(items) => {
                let mut out = Vec::with_capacity(items.len());
                for (i, item) in items.iter().enumerate() {
                    out.push(Self::from_json(item, &format!("{at}[{i}]"))?);
                }
                DataValue::List(out)
            }
            J::Object(map) => {
                let mut out = IndexMap::with_capacity(map.len());
                for (k, v) in map {
                    out.insert(k.clone(), Self::from_json(v, &format!("{at}.{k}"))?);
                }
                DataValue::Record(out)
            }
        })
    }

    pub fn as_list(&self) -> Option<&[DataValue]> {
        match self {
            DataValue::List(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_record(&self) -> Option<&IndexMap<String, DataValue>> {
        match self {
            DataValue::Record(map) => Some(map),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            DataValue::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Canonical scalar rendering: decimal integers, verbatim text,
    /// `true`/`false`. Returns `None` for everything else.
    pub fn render_scalar(&self) -> Option<String> {
        match self {
            DataValue::Int(i) => Some(i.to_string()),
            DataValue::Text(s) => Some(s.clone()),
            DataValue::Bool(b) => Some(if *b { "true" } else { "false" }.to_string()),
            _ => None,
        }
    }

    /// Short kind name for error messages.
    pub fn kind(&self) -> &'static str {
        match self {
            DataValue::Null => "null",
            DataValue::Bool(_) => "bool",
            DataValue::Int(_) => "int",
            DataValue::Text(_) => "text",
            DataValue::List(_) => "list",
            DataValue::Record(_) => "record",
        }
    }
}

impl fmt::Display for DataValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.render_scalar() {
            Some(s) => f.write_str(&s),
            None => write!(f, "<{}>", self.kind()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_scalars_lists_records() {
        let v = DataValue::from_json_str(r#"{"b": true, "a": 1, "xs": ["s", null]}"#).unwrap();
        let rec = v.as_record().unwrap();
        // insertion order preserved
        let keys: Vec<_> = rec.keys().cloned().collect();
        assert_eq!(keys, ["b", "a", "xs"]);
        assert_eq!(rec["a"], DataValue::Int(1));
        assert_eq!(
            rec["xs"],
            DataValue::list([DataValue::text("s"), DataValue::Null])
        );
    }

    #[test]
    fn rejects_reals() {
        let err = DataValue::from_json_str(r#"{"x": [1, 2.5]}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("2.5") && msg.contains("$.x[1]"), "{msg}");
    }

    #[test]
    fn rejects_out_of_range_integers() {
        assert!(DataValue::from_json_str("18446744073709551615").is_err());
        assert_eq!(
            DataValue::from_json_str("-9223372036854775808").unwrap(),
            DataValue::Int(i64::MIN)
        );
    }

    #[test]
    fn scalar_rendering_is_canonical() {
        assert_eq!(DataValue::Int(-7).render_scalar().unwrap(), "-7");
        assert_eq!(DataValue::Bool(true).render_scalar().unwrap(), "true");
        assert_eq!(DataValue::text("x").render_scalar().unwrap(), "x");
        assert_eq!(DataValue::Null.render_scalar(), None);
        assert_eq!(DataValue::list([]).render_scalar(), None);
    }
}
