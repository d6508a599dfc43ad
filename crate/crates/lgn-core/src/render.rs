//! Shared text rendering for linear combinations `coeff * word`.

use std::fmt;

use crate::coeff_ring::Scalar;

/// Write `Σ c·w` as `c * w + …`, with `0` for the empty sum.
///
/// Single-monomial coefficients carry their sign into the joining operator;
/// multi-term coefficients are parenthesized.
pub fn write_sum(f: &mut fmt::Formatter<'_>, terms: &[(String, Scalar)]) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    let many = terms.len() > 1;
    for (k, (word, c)) in terms.iter().enumerate() {
        let s = c.to_string();
        let simple = !s[1..].contains(" + ") && !s[1..].contains(" - ");
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) if simple => (true, rest.to_string()),
            _ => (false, s.clone()),
        };
        let body = if simple || (word.is_empty() && !many) {
            body
        } else {
            format!("({body})")
        };
        let text = match (word.is_empty(), body.as_str()) {
            (true, _) => body.clone(),
            (false, "1") => word.clone(),
            (false, _) => format!("{body} * {word}"),
        };
        match (k, neg) {
            (0, false) => write!(f, "{text}")?,
            (0, true) => write!(f, "-{text}")?,
            (_, false) => write!(f, " + {text}")?,
            (_, true) => write!(f, " - {text}")?,
        }
    }
    Ok(())
}
