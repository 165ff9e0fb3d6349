//! Deterministic numeric formatting for emitted files.
//!
//! Value columns are written at 12 significant digits so repeated runs are
//! byte-identical across platforms.

/// Format at 12 significant digits (scientific form, stable across runs).
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{:.11e}", x)
}

/// Round to 12 significant digits (used before JSON serialization).
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    fmt12(x).parse().unwrap_or(x)
}
