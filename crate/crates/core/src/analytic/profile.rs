//! CDF of the Rician member distance for one hotspot-center distance.

use crate::geometry::rician_distance_density;

/// Mass of the Rician law outside [v0 − 12σ, v0 + 12σ] is below e⁻⁷².
pub(crate) const SUPPORT_SIGMAS: f64 = 12.0;

const PANELS_PER_SIGMA: f64 = 4.0;

// 8-point Gauss–Legendre on [−1, 1]
const GL_X: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_W: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

pub(crate) fn gauss_legendre_8<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    GL_X.iter().zip(GL_W).map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

/// Piecewise Gauss–Legendre CDF of f_S(·; v0, σ) on panels of width σ/4.
/// Within a panel the partial integral is evaluated afresh, so `cdf` is
/// exact to quadrature precision with no interpolation error.
#[derive(Debug, Clone)]
pub(crate) struct RicianProfile {
    pub v0: f64,
    pub sigma: f64,
    pub lo: f64,
    pub hi: f64,
    width: f64,
    /// cum[i] = ∫_lo^{lo + i·width} f_S.
    cum: Vec<f64>,
}

impl RicianProfile {
    pub fn new(v0: f64, sigma: f64) -> Self {
        let lo = (v0 - SUPPORT_SIGMAS * sigma).max(0.0);
        let hi = v0 + SUPPORT_SIGMAS * sigma;
        let n = (((hi - lo) / sigma) * PANELS_PER_SIGMA).ceil().max(1.0) as usize;
        let width = (hi - lo) / n as f64;
        let mut cum = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for i in 0..n {
            let a = lo + i as f64 * width;
            acc += gauss_legendre_8(|r| rician_distance_density(r, v0, sigma), a, a + width);
            cum.push(acc);
        }
        RicianProfile {
            v0,
            sigma,
            lo,
            hi,
            width,
            cum,
        }
    }

    #[inline]
    pub fn density(&self, r: f64) -> f64 {
        rician_distance_density(r, self.v0, self.sigma)
    }

    pub fn cdf(&self, r: f64) -> f64 {
        if r <= self.lo {
            return 0.0;
        }
        let last = self.cum.len() - 1;
        if r >= self.hi {
            return self.cum[last];
        }
        let i = (((r - self.lo) / self.width) as usize).min(last - 1);
        let a = self.lo + i as f64 * self.width;
        self.cum[i] + gauss_legendre_8(|t| self.density(t), a, r)
    }
}
