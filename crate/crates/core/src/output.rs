//! Number formatting shared by the CSV and JSON emitters.

use serde::Serializer;

/// Fixed 12-significant-digit scientific notation; `inf` for +infinity.
pub fn sig12(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.11e}")
    }
}

/// Serializes non-finite floats as JSON `null` ("unbounded").
pub fn finite_or_null<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}
