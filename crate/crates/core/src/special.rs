//! Modified Bessel function of the first kind, order zero.
//!
//! Small arguments use the power series Σ (t²/4)ᵏ/(k!)², whose terms are all
//! positive. Large arguments use the asymptotic expansion of e⁻ᵗ I₀(t),
//! truncated at its smallest term, which is below 1e-20 relative there.

const SERIES_LIMIT: f64 = 25.0;

fn i0_series(t: f64) -> f64 {
    let q = 0.25 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < sum * 1e-17 {
            return sum;
        }
        k += 1.0;
    }
}

fn i0e_asymptotic(t: f64) -> f64 {
    // e^{-t} I0(t) ~ 1/sqrt(2πt) · Σ [(2k-1)!!]² / (k! (8t)^k)
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        let next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (k * 8.0 * t);
        if next.abs() >= term.abs() {
            break;
        }
        sum += next;
        if next.abs() < 1e-18 * sum {
            break;
        }
        term = next;
        k += 1.0;
    }
    sum / (2.0 * std::f64::consts::PI * t).sqrt()
}

/// I₀(t). Even in t; overflows to +inf beyond t ≈ 713.
pub fn bessel_i0(t: f64) -> f64 {
    let a = t.abs();
    if a < SERIES_LIMIT {
        i0_series(a)
    } else {
        i0e_asymptotic(a) * a.exp()
    }
}

/// Exponentially scaled e^{−|t|} I₀(t), finite for every finite t.
pub fn bessel_i0e(t: f64) -> f64 {
    let a = t.abs();
    if a < SERIES_LIMIT {
        i0_series(a) * (-a).exp()
    } else {
        i0e_asymptotic(a)
    }
}
