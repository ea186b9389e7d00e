//! dB and power-unit conversions.

/// Power ratio in dB to linear.
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power ratio to dB.
#[inline]
pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

#[inline]
pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w) + 30.0
}

/// Densities are configured per km² and used internally per m².
#[inline]
pub fn per_km2_to_per_m2(d: f64) -> f64 {
    d * 1e-6
}

#[inline]
pub fn per_m2_to_per_km2(d: f64) -> f64 {
    d * 1e6
}
