//! Binary quantization-index modulation on a scalar coefficient.
//!
//! Bit `b` is carried by snapping the coefficient to the nearest multiple
//! `q * step` with `q mod 2 == b`.

/// Returns the nearest `q * step` with `q mod 2 == bit`. Moves at most `step`.
pub fn qim_embed(coeff: f64, bit: bool, step: f64) -> f64 {
    debug_assert!(step > 0.0);
    let q0 = (coeff / step).round() as i64;
    let q = if (q0.rem_euclid(2) == 1) == bit {
        q0
    } else if coeff >= q0 as f64 * step {
        q0 + 1
    } else {
        q0 - 1
    };
    q as f64 * step
}

pub fn qim_extract(coeff: f64, step: f64) -> bool {
    debug_assert!(step > 0.0);
    ((coeff / step).round() as i64).rem_euclid(2) == 1
}
