//! Per-link physics: LoS ball blockage, single-slope path loss, normalized
//! Gamma fading, the sectored antenna of interfering mmWave BSs, and
//! thermal noise.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::Serialize;

use crate::params::ChannelParams;
use crate::units::{dbm_to_watts, linear_to_db};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LinkClass {
    Sub6,
    MmLos,
    MmNlos,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChannelError {
    #[error("path loss undefined at distance {0} m")]
    BadDistance(f64),
    #[error("bandwidth must be > 0, got {0}")]
    BadBandwidth(f64),
}

/// Links shorter than this use the 1 m intercept.
pub const MIN_LINK_DISTANCE: f64 = 1.0;

pub fn los_probability(r: f64, params: &ChannelParams) -> f64 {
    if r < params.r_los_ball {
        params.p_los
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn class_constants(class: LinkClass, params: &ChannelParams) -> (f64, f64) {
    match class {
        LinkClass::Sub6 => (params.c_1, params.alpha_1),
        LinkClass::MmLos => (params.c_los, params.alpha_los),
        LinkClass::MmNlos => (params.c_nlos, params.alpha_nlos),
    }
}

/// C·max(r, 1 m)^{−α} for any r, including 0.
#[inline]
pub fn path_loss_clamped(intercept: f64, alpha: f64, r: f64) -> f64 {
    intercept * r.max(MIN_LINK_DISTANCE).powf(-alpha)
}

/// Same as [`path_loss_clamped`] from a squared distance.
#[inline]
pub(crate) fn path_loss_sq(intercept: f64, alpha: f64, r2: f64) -> f64 {
    let r2 = r2.max(MIN_LINK_DISTANCE * MIN_LINK_DISTANCE);
    if alpha == 2.0 {
        intercept / r2
    } else if alpha == 3.0 {
        intercept / (r2 * r2.sqrt())
    } else {
        intercept * r2.powf(-0.5 * alpha)
    }
}

/// ℓ_k(r) = C_k·r^{−α_k}. Distances below 1 m use the 1 m value; r = 0 is
/// rejected.
pub fn path_loss(class: LinkClass, r: f64, params: &ChannelParams) -> Result<f64, ChannelError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(ChannelError::BadDistance(r));
    }
    let (c, a) = class_constants(class, params);
    Ok(path_loss_clamped(c, a, r))
}

pub fn nakagami_order(class: LinkClass, params: &ChannelParams) -> u32 {
    match class {
        LinkClass::Sub6 => ChannelParams::N_SUB6,
        LinkClass::MmLos => params.n_los,
        LinkClass::MmNlos => params.n_nlos,
    }
}

/// Pre-built normalized Gamma(N, 1/N) samplers for the three link classes.
#[derive(Debug, Clone)]
pub struct FadingSampler {
    los: Option<Gamma<f64>>,
    nlos: Option<Gamma<f64>>,
}

impl FadingSampler {
    pub fn new(params: &ChannelParams) -> Self {
        let make = |n: u32| (n > 1).then(|| Gamma::new(n as f64, 1.0 / n as f64).expect("positive Gamma parameters"));
        FadingSampler {
            los: make(params.n_los),
            nlos: make(params.n_nlos),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, class: LinkClass, rng: &mut R) -> f64 {
        let g = match class {
            LinkClass::Sub6 => None,
            LinkClass::MmLos => self.los.as_ref(),
            LinkClass::MmNlos => self.nlos.as_ref(),
        };
        match g {
            Some(g) => g.sample(rng),
            // order one: unit-mean exponential
            None => Exp1.sample(rng),
        }
    }
}

/// One normalized fading power draw h ~ Γ(N_k, 1/N_k).
pub fn sample_fading_power<R: Rng + ?Sized>(class: LinkClass, params: &ChannelParams, rng: &mut R) -> f64 {
    FadingSampler::new(params).sample(class, rng)
}

/// Gain of a randomly oriented interfering mmWave BS: G_M with probability
/// θ_b/2π, G_m otherwise.
pub fn interferer_antenna_gain<R: Rng + ?Sized>(rng: &mut R, params: &ChannelParams) -> f64 {
    if rng.random::<f64>() < params.p_main() {
        params.g_main
    } else {
        params.g_side
    }
}

/// −174 dBm/Hz + 10·log₁₀(W) + NF, in watts.
pub fn noise_power(bandwidth_hz: f64, params: &ChannelParams) -> Result<f64, ChannelError> {
    if !(bandwidth_hz > 0.0) || !bandwidth_hz.is_finite() {
        return Err(ChannelError::BadBandwidth(bandwidth_hz));
    }
    Ok(dbm_to_watts(noise_power_dbm(bandwidth_hz, params.noise_figure_db)))
}

pub fn noise_power_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    -174.0 + linear_to_db(bandwidth_hz) + noise_figure_db
}
