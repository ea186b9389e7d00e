//! Serving-distance laws and association probabilities.

use std::f64::consts::PI;

use serde::Serialize;

use super::profile::RicianProfile;
use super::{AnalyticError, AnalyticModel, AnalyticReport, Budget};
use crate::association::{delta, Tier};
use crate::quadrature::{integrate_adaptive, integrate_semi_infinite, QuadSpec};

/// Distance laws at r for a hotspot center at v0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceLaws {
    /// CDF of the LoS-thinned member distance; tends to at most p_L.
    pub cdf_sl: f64,
    pub pdf_sl: f64,
    /// Nearest Sub-6GHz BS.
    pub cdf_r1: f64,
    pub pdf_r1: f64,
    /// Nearest LoS member of the typical hotspot.
    pub cdf_r2: f64,
    pub pdf_r2: f64,
}

impl AnalyticModel {
    pub(crate) fn profile(&self, v0: f64) -> RicianProfile {
        RicianProfile::new(v0, self.params.deployment.sigma_bs)
    }

    fn n_bs(&self) -> u32 {
        self.params.deployment.n_bs
    }

    pub(crate) fn cdf_sl(&self, prof: &RicianProfile, r: f64) -> f64 {
        let c = &self.params.channel;
        c.p_los * prof.cdf(r.min(c.r_los_ball))
    }

    pub(crate) fn pdf_sl(&self, prof: &RicianProfile, r: f64) -> f64 {
        let c = &self.params.channel;
        if r < c.r_los_ball {
            c.p_los * prof.density(r)
        } else {
            0.0
        }
    }

    pub(crate) fn pdf_r1(&self, r: f64) -> f64 {
        let l = self.params.deployment.lambda_1;
        2.0 * PI * l * r * (-PI * l * r * r).exp()
    }

    pub(crate) fn delta_12(&self, r: f64) -> f64 {
        delta(Tier::Sub6, Tier::MmWave, r, &self.assoc)
    }

    pub(crate) fn delta_21(&self, r: f64) -> f64 {
        delta(Tier::MmWave, Tier::Sub6, r, &self.assoc)
    }

    /// Probability that no member of the typical hotspot is a LoS BS
    /// closer than r.
    pub(crate) fn no_los_within(&self, prof: &RicianProfile, r: f64) -> f64 {
        (1.0 - self.cdf_sl(prof, r)).powi(self.n_bs() as i32)
    }

    /// A₁ᶜ(v0)·f_{X₁}(x; v0).
    pub(crate) fn sub6_unnorm(&self, prof: &RicianProfile, x: f64) -> f64 {
        let f = self.pdf_r1(x);
        if f == 0.0 {
            return 0.0;
        }
        f * self.no_los_within(prof, self.delta_12(x))
    }

    /// A₂ᶜ(v0)·f_{X₂}(x; v0).
    pub(crate) fn mm_unnorm(&self, prof: &RicianProfile, x: f64) -> f64 {
        let n = self.n_bs();
        let f = self.pdf_sl(prof, x);
        if n == 0 || f == 0.0 {
            return 0.0;
        }
        let d = self.delta_21(x);
        let l = self.params.deployment.lambda_1;
        n as f64 * f * (1.0 - self.cdf_sl(prof, x)).powi(n as i32 - 1) * (-PI * l * d * d).exp()
    }

    /// Serving distance beyond which δ₁₂(x) ≥ R_B, so the mmWave survival
    /// factor of the Sub-6GHz density is constant.
    pub(crate) fn sub6_switch(&self) -> f64 {
        let rb = self.params.channel.r_los_ball;
        if rb.is_finite() {
            self.delta_21(rb)
        } else {
            f64::INFINITY
        }
    }

    /// Support of the mmWave serving density, if any.
    pub(crate) fn mm_range(&self, prof: &RicianProfile) -> Option<(f64, f64)> {
        let c = &self.params.channel;
        let hi = prof.hi.min(c.r_los_ball);
        (self.n_bs() > 0 && c.p_los > 0.0 && prof.lo < hi).then_some((prof.lo, hi))
    }

    pub(crate) fn sub6_scale(&self) -> f64 {
        1.0 / (PI * self.params.deployment.lambda_1).sqrt()
    }

    /// ∫ u₁(x)·k(x) dx split at the switch distance; beyond it the survival
    /// factor is the constant `no_los_within(R_B)` and `tail` supplies
    /// ∫_{switch}^∞ f_R1·k when known.
    pub(crate) fn integrate_sub6<K: FnMut(f64) -> f64>(
        &self,
        prof: &RicianProfile,
        mut k: K,
        tail: Option<f64>,
        spec: &QuadSpec,
        b: &Budget,
    ) -> f64 {
        if self.params.deployment.lambda_1 <= 0.0 {
            return 0.0;
        }
        let scale = self.sub6_scale();
        let sw = self.sub6_switch();
        if !sw.is_finite() {
            return b.take(integrate_semi_infinite(|x| self.sub6_unnorm(prof, x) * k(x), 0.0, scale, spec));
        }
        let head = b.take(integrate_adaptive(|x| self.sub6_unnorm(prof, x) * k(x), 0.0, sw, spec));
        let rest = match tail {
            Some(t) => t,
            None => b.take(integrate_semi_infinite(|x| self.pdf_r1(x) * k(x), sw, scale, spec)),
        };
        head + self.no_los_within(prof, self.params.channel.r_los_ball) * rest
    }

    pub(crate) fn integrate_mm<K: FnMut(f64) -> f64>(&self, prof: &RicianProfile, mut k: K, spec: &QuadSpec, b: &Budget) -> f64 {
        match self.mm_range(prof) {
            Some((lo, hi)) => b.take(integrate_adaptive(|x| self.mm_unnorm(prof, x) * k(x), lo, hi, spec)),
            None => 0.0,
        }
    }

    fn assoc_spec(&self) -> QuadSpec {
        QuadSpec::new(1e-10, 1e-13)
    }

    fn conditional_assoc_with(&self, tier: Tier, prof: &RicianProfile, b: &Budget) -> f64 {
        let spec = self.assoc_spec();
        match tier {
            Tier::Sub6 => {
                let sw = self.sub6_switch();
                let tail = if sw.is_finite() {
                    let l = self.params.deployment.lambda_1;
                    Some((-PI * l * sw * sw).exp())
                } else {
                    None
                };
                self.integrate_sub6(prof, |_| 1.0, tail, &spec, b)
            }
            Tier::MmWave => self.integrate_mm(prof, |_| 1.0, &spec, b),
        }
    }

    pub fn serving_distance_laws(&self, r: f64, v0: f64) -> DistanceLaws {
        let prof = self.profile(v0);
        let l = self.params.deployment.lambda_1;
        let n = self.n_bs() as i32;
        let cdf_sl = self.cdf_sl(&prof, r);
        let pdf_sl = self.pdf_sl(&prof, r);
        DistanceLaws {
            cdf_sl,
            pdf_sl,
            cdf_r1: -(-PI * l * r * r).exp_m1(),
            pdf_r1: self.pdf_r1(r),
            cdf_r2: 1.0 - (1.0 - cdf_sl).powi(n),
            pdf_r2: if n == 0 { 0.0 } else { n as f64 * pdf_sl * (1.0 - cdf_sl).powi(n - 1) },
        }
    }

    /// A_kᶜ(v0).
    pub fn conditional_assoc_prob(&self, tier: Tier, v0: f64) -> AnalyticReport {
        let b = Budget::default();
        let v = self.conditional_assoc_with(tier, &self.profile(v0), &b);
        b.report_value(v)
    }

    /// A_k = E_{v0}[A_kᶜ(v0)].
    pub fn assoc_prob(&self, tier: Tier) -> AnalyticReport {
        let b = Budget::default();
        let outer = self.expect_v0(&QuadSpec::new(1e-9, 1e-12), |v| self.conditional_assoc_with(tier, &self.profile(v), &b));
        b.report(outer)
    }

    /// Probability that the typical UE has no admissible serving BS; zero
    /// whenever Sub-6GHz BSs exist.
    pub fn outage_prob(&self) -> AnalyticReport {
        if self.params.deployment.lambda_1 > 0.0 {
            return AnalyticReport::exact(0.0);
        }
        let rb = self.params.channel.r_los_ball;
        let b = Budget::default();
        let outer = self.expect_v0(&QuadSpec::new(1e-9, 1e-12), |v| self.no_los_within(&self.profile(v), rb));
        b.report(outer)
    }

    /// f_{X_k}(x; v0) = u_k(x; v0)/A_kᶜ(v0).
    pub fn conditional_distance_pdf(&self, tier: Tier, x: f64, v0: f64) -> Result<f64, AnalyticError> {
        let prof = self.profile(v0);
        let a = self.conditional_assoc_with(tier, &prof, &Budget::default());
        if !(a > 0.0) {
            return Err(AnalyticError::UndefinedDensity { tier, v0 });
        }
        let u = match tier {
            Tier::Sub6 => self.sub6_unnorm(&prof, x),
            Tier::MmWave => self.mm_unnorm(&prof, x),
        };
        Ok(u / a)
    }

    /// E[X_k | tier k, v0].
    pub fn conditional_mean_distance(&self, tier: Tier, v0: f64) -> Result<f64, AnalyticError> {
        let prof = self.profile(v0);
        let b = Budget::default();
        let spec = self.assoc_spec();
        let a = self.conditional_assoc_with(tier, &prof, &b);
        if !(a > 0.0) {
            return Err(AnalyticError::UndefinedDensity { tier, v0 });
        }
        let m = match tier {
            Tier::Sub6 => self.integrate_sub6(&prof, |x| x, None, &spec, &b),
            Tier::MmWave => self.integrate_mm(&prof, |x| x, &spec, &b),
        };
        Ok(m / a)
    }

    /// E[serving distance] over both tiers and v0; outage trials excluded.
    pub fn mean_serving_distance(&self) -> AnalyticReport {
        let b = Budget::default();
        let spec = self.opts.inner;
        let outer = self.expect_v0(&self.opts.outer, |v| {
            let prof = self.profile(v);
            self.integrate_sub6(&prof, |x| x, None, &spec, &b) + self.integrate_mm(&prof, |x| x, &spec, &b)
        });
        let served = 1.0 - self.outage_prob().value;
        let mut r = b.report(outer);
        r.value /= served;
        r.est_error /= served;
        r
    }

    /// Serving distance averaged over v0-conditioned UEs, with v0 pinned.
    pub fn conditional_mean_serving_distance(&self, v0: f64) -> f64 {
        let prof = self.profile(v0);
        let b = Budget::default();
        let spec = self.opts.inner;
        let m = self.integrate_sub6(&prof, |x| x, None, &spec, &b) + self.integrate_mm(&prof, |x| x, &spec, &b);
        let served = self.conditional_assoc_with(Tier::Sub6, &prof, &b) + self.conditional_assoc_with(Tier::MmWave, &prof, &b);
        m / served
    }
}
