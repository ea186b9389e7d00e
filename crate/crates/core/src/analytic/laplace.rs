//! Laplace transforms of the Sub-6GHz, intra-cluster and inter-cluster
//! interference fields.

use std::f64::consts::PI;

use super::profile::{RicianProfile, SUPPORT_SIGMAS};
use super::{AnalyticModel, Budget, InterClusterCount, IntraClusterModel, NlosExclusion};
use crate::channel::path_loss_clamped;
use crate::geometry::rician_distance_density;
use crate::quadrature::{integrate_adaptive, integrate_power_tail, QuadSpec};

/// Bound on memoized ρ values; the cache is cleared when it fills up.
const RHO_CACHE_LIMIT: usize = 1 << 14;

impl AnalyticModel {
    /// ρ(t) = ∫₁^∞ u/(1 + u^{α₁}/t) du, finite for α₁ > 2.
    pub(crate) fn rho(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        if let Some(&v) = self.rho_cache.lock().expect("rho cache").get(&t.to_bits()) {
            return v;
        }
        let a = self.params.channel.alpha_1;
        let f = |u: f64| u / (1.0 + u.powf(a) / t);
        let knee = t.powf(1.0 / a).max(1.0) * 4.0;
        let spec = QuadSpec::new(1e-11, 1e-300);
        let v = integrate_adaptive(f, 1.0, knee, &spec).value + integrate_power_tail(f, knee, &spec).value;
        let mut cache = self.rho_cache.lock().expect("rho cache");
        if cache.len() >= RHO_CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(t.to_bits(), v);
        v
    }

    /// E[exp(−s·I₁)] for the Sub-6GHz PPP beyond distance x, with Rayleigh
    /// fading and the 1 m path-loss clamp.
    pub fn laplace_i1(&self, s: f64, x: f64) -> f64 {
        let l = self.params.deployment.lambda_1;
        if s <= 0.0 || l <= 0.0 {
            return 1.0;
        }
        let c = &self.params.channel;
        let m = x.max(1.0);
        let t = s * self.params.p_1 * c.g_1 * path_loss_clamped(c.c_1, c.alpha_1, m);
        let mut area = m * m * self.rho(t);
        if x < 1.0 {
            area += 0.5 * (1.0 - x * x) * t / (1.0 + t);
        }
        (-2.0 * PI * l * area).exp()
    }

    /// 1 − E_{G,h}[exp(−s·P₂·G·h·ℓ(r))] for one mmWave interferer at r.
    #[inline]
    pub(crate) fn member_term(&self, s: f64, r: f64, los: bool) -> f64 {
        let c = &self.params.channel;
        let (ci, ai, ni) = if los {
            (c.c_los, c.alpha_los, c.n_los)
        } else {
            (c.c_nlos, c.alpha_nlos, c.n_nlos)
        };
        let n = ni as f64;
        let base = s * self.params.p_2 * path_loss_clamped(ci, ai, r) / n;
        let one = |g: f64| -(-n * (base * g).ln_1p()).exp_m1();
        if c.g_main == c.g_side {
            one(c.g_main)
        } else {
            let pm = c.p_main();
            pm * one(c.g_main) + (1.0 - pm) * one(c.g_side)
        }
    }

    /// ∫ density·(1 − g) over the typical hotspot's members: LoS members
    /// from `los_lower`, NLoS members from `nlos_lower`. With `r_weight`
    /// the integrand carries an extra factor r.
    #[allow(clippy::too_many_arguments)]
    fn member_integral(
        &self,
        s: f64,
        prof: &RicianProfile,
        los_lower: f64,
        nlos_lower: f64,
        nlos: bool,
        r_weight: bool,
        b: &Budget,
    ) -> f64 {
        let c = &self.params.channel;
        let spec = &self.opts.inner;
        let rb = c.r_los_ball;
        let w = |r: f64| if r_weight { r } else { 1.0 };
        let mut e = 0.0;
        let (lo, hi) = (los_lower.max(prof.lo), rb.min(prof.hi));
        if c.p_los > 0.0 && lo < hi {
            e += c.p_los * b.take(integrate_adaptive(|r| prof.density(r) * self.member_term(s, r, true) * w(r), lo, hi, spec));
        }
        if nlos {
            let (lo, hi) = (nlos_lower.max(prof.lo), rb.min(prof.hi));
            if c.p_los < 1.0 && lo < hi {
                e += (1.0 - c.p_los)
                    * b.take(integrate_adaptive(|r| prof.density(r) * self.member_term(s, r, false) * w(r), lo, hi, spec));
            }
            let lo = nlos_lower.max(rb).max(prof.lo);
            if lo < prof.hi {
                e += b.take(integrate_adaptive(|r| prof.density(r) * self.member_term(s, r, false) * w(r), lo, prof.hi, spec));
            }
        }
        e
    }

    /// Distance at which an NLoS member matches the LoS metric at x.
    fn nlos_boundary(&self, x: f64) -> f64 {
        let c = &self.params.channel;
        let ratio = (c.n_nlos as f64 * c.c_nlos) / (c.n_los as f64 * c.c_los);
        ratio.powf(1.0 / c.alpha_nlos) * x.powf(c.alpha_los / c.alpha_nlos)
    }

    /// Intra-cluster Laplace transform for `n_int` interfering members of
    /// the typical hotspot, none of which is a LoS BS closer than
    /// `los_lower`. `serving` is the LoS serving distance, or `None` when
    /// the UE is not served by this hotspot.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn intra_laplace(
        &self,
        s: f64,
        prof: &RicianProfile,
        los_lower: f64,
        serving: Option<f64>,
        n_int: u32,
        nlos: bool,
        b: &Budget,
    ) -> f64 {
        if n_int == 0 || s <= 0.0 {
            return 1.0;
        }
        let nlos_lower = match (self.opts.nlos_exclusion, serving) {
            (NlosExclusion::Boundary, Some(x)) => self.nlos_boundary(x),
            _ => 0.0,
        };
        let n = n_int as f64;
        match self.opts.intra_model {
            IntraClusterModel::Pgfl => (-n * self.member_integral(s, prof, los_lower, nlos_lower, nlos, false, b)).exp(),
            IntraClusterModel::Binomial => {
                let e = self.member_integral(s, prof, los_lower, nlos_lower, nlos, false, b);
                let mass = 1.0 - self.cdf_sl(prof, los_lower);
                if mass <= 0.0 {
                    return 1.0;
                }
                (1.0 - e / mass).clamp(0.0, 1.0).powi(n_int as i32)
            }
            IntraClusterModel::Literal => {
                (-2.0 * PI * n * self.member_integral(s, prof, los_lower, nlos_lower, nlos, true, b)).exp()
            }
        }
    }

    /// E[exp(−s·I₂^intra)] given v0, a LoS serving member at x and
    /// `n_members` BSs in the hotspot.
    pub fn laplace_i2_intra(&self, s: f64, v0: f64, x: f64, n_members: u32) -> f64 {
        let prof = self.profile(v0);
        self.intra_laplace(s, &prof, x, Some(x), n_members.saturating_sub(1), true, &Budget::default())
    }

    fn inter_count(&self) -> u32 {
        let n = self.params.deployment.n_bs;
        match self.opts.inter_count {
            InterClusterCount::NBsPlusOne => n,
            InterClusterCount::NBs => n.saturating_sub(1),
        }
    }

    /// E_c(s, v) = ∫ f_S(r; v)·[P_L(r)(1−g_L) + (1−P_L(r))(1−g_N)] dr for a
    /// hotspot whose center is at distance v.
    fn cluster_term(&self, s: f64, v: f64, nlos: bool, b: &Budget) -> f64 {
        let c = &self.params.channel;
        let sigma = self.params.deployment.sigma_bs;
        let spec = &self.opts.inner;
        let lo = (v - SUPPORT_SIGMAS * sigma).max(0.0);
        let hi = v + SUPPORT_SIGMAS * sigma;
        let rb = c.r_los_ball;
        let f = |r: f64| rician_distance_density(r, v, sigma);
        let mut e = 0.0;
        let top = rb.min(hi);
        if lo < top {
            e += b.take(integrate_adaptive(
                |r| {
                    let d = f(r);
                    if d == 0.0 {
                        return 0.0;
                    }
                    let mut t = c.p_los * self.member_term(s, r, true);
                    if nlos && c.p_los < 1.0 {
                        t += (1.0 - c.p_los) * self.member_term(s, r, false);
                    }
                    d * t
                },
                lo,
                top,
                spec,
            ));
        }
        let bottom = rb.max(lo);
        if nlos && bottom < hi {
            e += b.take(integrate_adaptive(|r| f(r) * self.member_term(s, r, false), bottom, hi, spec));
        }
        e
    }

    /// −ln E[exp(−s·I₂^inter)] by direct quadrature over hotspot centers.
    pub(crate) fn inter_exponent_direct(&self, s: f64, nlos: bool, b: &Budget) -> f64 {
        let d = &self.params.deployment;
        let count = self.inter_count() as f64;
        if s <= 0.0 || d.lambda_p <= 0.0 || count == 0.0 {
            return 0.0;
        }
        let c = &self.params.channel;
        let phi = |v: f64| -(-count * self.cluster_term(s, v, nlos, b)).exp_m1() * v;
        let rb = if c.r_los_ball.is_finite() { c.r_los_ball } else { 0.0 };
        // distance at which a main-lobe interferer's term is O(1)
        let (ci, ai) = if nlos { (c.c_nlos.max(c.c_los), c.alpha_nlos.min(c.alpha_los)) } else { (c.c_los, c.alpha_los) };
        let reach = (s * self.params.p_2 * c.g_main * ci).powf(1.0 / ai);
        let v1 = rb + SUPPORT_SIGMAS * d.sigma_bs + reach;
        let spec = &self.opts.inner;
        let head = b.take(integrate_adaptive(phi, 0.0, v1, spec));
        let tail = b.take(integrate_power_tail(phi, v1, spec));
        2.0 * PI * d.lambda_p * (head + tail)
    }

    /// E[exp(−s·I₂^inter)] evaluated directly (no table).
    pub fn laplace_i2_inter_direct(&self, s: f64) -> f64 {
        (-self.inter_exponent_direct(s, true, &Budget::default())).exp()
    }

    /// E[exp(−s·I₂^inter)] from a lazily filled table of ln E_inter on a
    /// log₁₀ s grid, with cubic interpolation.
    pub fn laplace_i2_inter(&self, s: f64) -> f64 {
        self.inter_laplace(s, true)
    }

    pub(crate) fn inter_laplace(&self, s: f64, nlos: bool) -> f64 {
        if s <= 0.0 || self.params.deployment.lambda_p <= 0.0 || self.inter_count() == 0 {
            return 1.0;
        }
        let npd = self.opts.inter_nodes_per_decade as f64;
        let t = s.log10() * npd;
        let k = t.floor();
        let u = t - k;
        let k = k as i64;
        let y: Vec<f64> = (-1..=2).map(|d| self.inter_node(k + d, nlos)).collect();
        // Lagrange basis on nodes −1, 0, 1, 2
        let l0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
        let l1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        let l2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
        let l3 = (u + 1.0) * u * (u - 1.0) / 6.0;
        let ln_e = l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3];
        (-ln_e.exp()).exp()
    }

    fn inter_node(&self, k: i64, nlos: bool) -> f64 {
        if let Some(&v) = self.inter_cache.lock().expect("inter cache").get(&(nlos, k)) {
            return v;
        }
        let s = 10f64.powf(k as f64 / self.opts.inter_nodes_per_decade as f64);
        let v = self.inter_exponent_direct(s, nlos, &Budget::default()).max(1e-300).ln();
        self.inter_cache.lock().expect("inter cache").insert((nlos, k), v);
        v
    }
}
