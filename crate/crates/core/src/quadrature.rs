//! Adaptive one-dimensional integration and monotone root finding.
//!
//! Integration uses a 7-point Gauss / 15-point Kronrod pair on each panel and
//! global adaptive bisection: the panel with the largest error estimate is
//! split until the summed estimate meets the tolerance. The rule never
//! samples panel endpoints, so integrable endpoint singularities are fine.
//!
//! Semi-infinite ranges [a, ∞) are mapped to [0, 1) by r = a + c·u/(1−u),
//! where the scale c should match the width of the integrand's bulk.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum bisection depth of a single panel.
    pub max_depth: u32,
    /// Hard cap on the number of panels held at once.
    pub max_panels: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            rel_tol: 1e-6,
            abs_tol: 1e-12,
            max_depth: 60,
            max_panels: 4000,
        }
    }
}

impl QuadSpec {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        QuadSpec {
            rel_tol,
            abs_tol,
            ..QuadSpec::default()
        }
    }

    /// Same spec with both tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        QuadSpec {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationResult {
    pub value: f64,
    pub est_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl IntegrationResult {
    fn zero() -> Self {
        IntegrationResult {
            value: 0.0,
            est_error: 0.0,
            evaluations: 0,
            converged: true,
        }
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One Gauss–Kronrod panel: (Kronrod value, error estimate). The error
/// heuristic is the usual QUADPACK one, which scales |K − G| by the
/// smoothness of the integrand on the panel.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// ∫ₐᵇ f. For a > b the sign flips; a == b gives zero.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, spec: &QuadSpec) -> IntegrationResult {
    if a == b {
        return IntegrationResult::zero();
    }
    if a > b {
        let mut r = integrate_adaptive(f, b, a, spec);
        r.value = -r.value;
        return r;
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        error: e,
        depth: 0,
    });
    // panels that cannot be split further
    let mut done_value = 0.0;
    let mut done_error = 0.0;
    let mut total_value = v;
    let mut total_error = e;
    let mut steps = 0usize;
    loop {
        if !(total_value.is_finite() && total_error.is_finite()) {
            break;
        }
        if total_error <= spec.target(total_value) {
            break;
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        if worst.depth >= spec.max_depth || !(mid > worst.a && mid < worst.b) {
            done_value += worst.value;
            done_error += worst.error;
            continue;
        }
        if heap.len() + 2 > spec.max_panels {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evaluations += 30;
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        for (lo, hi, value, error) in [(worst.a, mid, v1, e1), (mid, worst.b, v2, e2)] {
            heap.push(Panel {
                a: lo,
                b: hi,
                value,
                error,
                depth: worst.depth + 1,
            });
        }
        steps += 1;
        if steps % 128 == 0 {
            // resum to stop drift of the running totals
            total_value = done_value + heap.iter().map(|p| p.value).sum::<f64>();
            total_error = done_error + heap.iter().map(|p| p.error).sum::<f64>();
        }
    }
    let total_value = done_value + heap.iter().map(|p| p.value).sum::<f64>();
    let total_error = done_error + heap.iter().map(|p| p.error).sum::<f64>();
    let converged = total_value.is_finite() && total_error <= spec.target(total_value);
    IntegrationResult {
        value: total_value,
        est_error: total_error.max(0.0),
        evaluations,
        converged,
    }
}

/// ∫ₐ^∞ f via r = a + c·u/(1−u).
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(mut f: F, a: f64, scale: f64, spec: &QuadSpec) -> IntegrationResult {
    assert!(scale > 0.0, "semi-infinite transform needs a positive scale");
    integrate_adaptive(
        |u| {
            let one_minus = 1.0 - u;
            let r = a + scale * u / one_minus;
            let jac = scale / (one_minus * one_minus);
            let v = f(r);
            if v == 0.0 {
                0.0
            } else {
                v * jac
            }
        },
        0.0,
        1.0,
        spec,
    )
}

/// ∫ₐ^∞ f for a > 0 via r = a·eᵗ, then the semi-infinite map on t. Suited
/// to power-law tails r^{−p}, p > 1, which become exponentials in t.
pub fn integrate_power_tail<F: FnMut(f64) -> f64>(mut f: F, a: f64, spec: &QuadSpec) -> IntegrationResult {
    assert!(a > 0.0, "power-tail transform needs a positive lower limit");
    integrate_semi_infinite(
        |t| {
            let r = a * t.exp();
            if !r.is_finite() {
                return 0.0;
            }
            let v = f(r);
            if v == 0.0 {
                0.0
            } else {
                v * r
            }
        },
        0.0,
        1.0,
        spec,
    )
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("target {target} not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NotBracketed {
        target: f64,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("non-finite value while bisecting at x = {0}")]
    NonFinite(f64),
}

/// Bisection for f(x) = target with f nonincreasing on [lo, hi].
///
/// Stops once |f(x) − target| ≤ tol, or when the bracket is narrower
/// than `x_tol`. On a flat segment at the target any point of the segment
/// may be returned.
pub fn find_root_monotone<F: FnMut(f64) -> f64>(
    mut f: F,
    target: f64,
    lo: f64,
    hi: f64,
    tol: f64,
    x_tol: f64,
) -> Result<f64, RootError> {
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo.is_finite() && f_hi.is_finite()) {
        return Err(RootError::NonFinite(if f_lo.is_finite() { hi } else { lo }));
    }
    if !(f_lo >= target - tol && target + tol >= f_hi) {
        return Err(RootError::NotBracketed {
            target,
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    if (f_lo - target).abs() <= tol {
        return Ok(lo);
    }
    if (f_hi - target).abs() <= tol {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if !fm.is_finite() {
            return Err(RootError::NonFinite(mid));
        }
        if (fm - target).abs() <= tol || (hi - lo) <= x_tol {
            return Ok(mid);
        }
        if fm > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
