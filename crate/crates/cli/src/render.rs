//! Number rendering for text and JSON output.

use byzsel::numeric::{format_rational, format_significant};
use byzsel::{Rational, Scalar};
use serde_json::Value;

pub trait Render: Scalar {
    /// Text form: `digits` significant digits for floats, `a/b` for
    /// rationals.
    fn render(&self, digits: usize) -> String;

    /// JSON form: a number for floats, a fraction string for rationals.
    fn to_json(&self, digits: usize) -> Value;
}

impl Render for f64 {
    fn render(&self, digits: usize) -> String {
        format_significant(*self, digits)
    }

    fn to_json(&self, digits: usize) -> Value {
        let rounded: f64 = self.render(digits).parse().unwrap_or(*self);
        serde_json::Number::from_f64(rounded)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

impl Render for Rational {
    fn render(&self, _digits: usize) -> String {
        format_rational(self)
    }

    fn to_json(&self, digits: usize) -> Value {
        Value::String(self.render(digits))
    }
}

/// `{1,3,4}` with one-based indices.
pub fn render_set(indices: &[usize]) -> String {
    let parts: Vec<String> = indices.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

pub fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sets_are_one_based() {
        assert_eq!(render_set(&[0, 2]), "{1,3}");
        assert_eq!(render_set(&[]), "{}");
    }

    #[test]
    fn json_numbers_respect_precision() {
        assert_eq!((2.0f64 / 3.0).to_json(3), serde_json::json!(0.667));
        let q = byzsel::numeric::parse_rational("35/131").unwrap();
        assert_eq!(q.to_json(12), serde_json::json!("35/131"));
    }
}
