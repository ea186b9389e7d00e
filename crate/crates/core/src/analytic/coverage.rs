//! SINR/SNR coverage kernels, their averages, and rate.

use serde::Serialize;

use super::profile::RicianProfile;
use super::{AnalyticError, AnalyticModel, AnalyticReport, Budget};
use crate::association::Tier;
use crate::channel::path_loss_clamped;
use crate::quadrature::{find_root_monotone, integrate_adaptive, integrate_semi_infinite, QuadSpec};
use crate::units::db_to_linear;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CoverageKind {
    Sinr,
    /// SINR with mmWave NLoS interferers removed; an upper bound.
    SinrNoNlos,
    Snr,
}

impl CoverageKind {
    fn interference(self) -> bool {
        self != CoverageKind::Snr
    }

    fn nlos(self) -> bool {
        self == CoverageKind::Sinr
    }
}

/// Σ terms with Neumaier compensation.
fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// χ = N·(N!)^{−1/N}, the Alzer constant of a normalized Gamma(N).
pub(crate) fn alzer_chi(n: u32) -> f64 {
    let nf = n as f64;
    let ln_fact: f64 = (1..=n).map(|i| (i as f64).ln()).sum();
    nf * (-ln_fact / nf).exp()
}

impl AnalyticModel {
    /// P(SINR > τ | Sub-6GHz serving at distance x).
    fn sub6_kernel(&self, tau: f64, x: f64, prof: &RicianProfile, kind: CoverageKind, b: &Budget) -> f64 {
        let p = &self.params;
        let c = &p.channel;
        let s = tau / (p.p_1 * c.g_1 * path_loss_clamped(c.c_1, c.alpha_1, x));
        let mut v = (-s * self.noise[0]).exp();
        if v == 0.0 || !kind.interference() {
            return v;
        }
        v *= self.laplace_i1(s, x);
        if self.shared_band() {
            let n = p.deployment.n_bs;
            v *= self.intra_laplace(s, prof, self.delta_12(x), None, n, kind.nlos(), b);
            v *= self.inter_laplace(s, kind.nlos());
        }
        v
    }

    /// P(SINR > τ | mmWave serving at LoS distance x), Alzer approximation.
    fn mm_kernel(&self, tau: f64, x: f64, prof: &RicianProfile, kind: CoverageKind, b: &Budget) -> f64 {
        let p = &self.params;
        let c = &p.channel;
        let n_l = c.n_los;
        let base = tau * alzer_chi(n_l) / (p.p_2 * c.g_main * path_loss_clamped(c.c_los, c.alpha_los, x));
        let n_int = p.deployment.n_bs.saturating_sub(1);
        let terms = (1..=n_l).map(|j| {
            let s = base * j as f64;
            let mut v = (-s * self.noise[1]).exp();
            if v == 0.0 || !kind.interference() {
                return binomial_sign(n_l, j) * v;
            }
            v *= self.intra_laplace(s, prof, x, Some(x), n_int, kind.nlos(), b);
            v *= self.inter_laplace(s, kind.nlos());
            if self.shared_band() {
                v *= self.laplace_i1(s, self.delta_21(x));
            }
            binomial_sign(n_l, j) * v
        });
        compensated_sum(terms).clamp(0.0, 1.0)
    }

    /// ∫_{switch}^∞ f_R1·K₁ when K₁ does not depend on v0.
    fn sub6_tail(&self, tau: f64, kind: CoverageKind, b: &Budget) -> Option<f64> {
        let sw = self.sub6_switch();
        if self.shared_band() || !sw.is_finite() || self.params.deployment.lambda_1 <= 0.0 {
            return None;
        }
        let prof = self.profile(0.0);
        Some(b.take(integrate_semi_infinite(
            |x| self.pdf_r1(x) * self.sub6_kernel(tau, x, &prof, kind, b),
            sw,
            self.sub6_scale(),
            &self.opts.inner,
        )))
    }

    /// Unnormalized per-tier coverage at v0: ∫ u_k(x)·K_k(τ_k, x) dx.
    fn tier_parts(&self, taus: [f64; 2], v0: f64, kind: CoverageKind, tails: [Option<f64>; 2], weights: [f64; 2], b: &Budget) -> [f64; 2] {
        let prof = self.profile(v0);
        let spec = &self.opts.inner;
        let sub6 = if weights[0] != 0.0 {
            self.integrate_sub6(&prof, |x| self.sub6_kernel(taus[0], x, &prof, kind, b), tails[0], spec, b)
        } else {
            0.0
        };
        let mm = if weights[1] != 0.0 {
            self.integrate_mm(&prof, |x| self.mm_kernel(taus[1], x, &prof, kind, b), spec, b)
        } else {
            0.0
        };
        [sub6, mm]
    }

    /// Σ_k weight_k·A_kᶜ·C_k(τ_k), averaged over v0 or, with `at`, at a
    /// pinned v0.
    fn weighted_average(&self, taus: [f64; 2], kind: CoverageKind, weights: [f64; 2], spec: &QuadSpec, at: Option<f64>) -> AnalyticReport {
        let b = Budget::default();
        let tails = [if weights[0] != 0.0 { self.sub6_tail(taus[0], kind, &b) } else { None }, None];
        let f = |v: f64| {
            let [a, m] = self.tier_parts(taus, v, kind, tails, weights, &b);
            weights[0] * a + weights[1] * m
        };
        match at {
            Some(v0) => {
                let v = f(v0);
                b.report_value(v)
            }
            None => {
                let outer = self.expect_v0(spec, f);
                b.report(outer)
            }
        }
    }

    /// E_{v0}[A_kᶜ·C_k(τ)] per tier: the tier's share of the coverage.
    pub fn coverage_tiers(&self, tau: f64, kind: CoverageKind) -> [AnalyticReport; 2] {
        [
            self.weighted_average([tau; 2], kind, [1.0, 0.0], &self.opts.outer, None),
            self.weighted_average([tau; 2], kind, [0.0, 1.0], &self.opts.outer, None),
        ]
    }

    pub fn coverage_of(&self, tau: f64, kind: CoverageKind) -> AnalyticReport {
        self.coverage_at(tau, kind, None)
    }

    /// Σ_k A_kᶜ(v0)·C_k(τ; v0): coverage of the UEs at distance v0 from
    /// their hotspot center.
    pub fn coverage_at_v0(&self, tau: f64, v0: f64, kind: CoverageKind) -> AnalyticReport {
        self.coverage_at(tau, kind, Some(v0))
    }

    fn coverage_at(&self, tau: f64, kind: CoverageKind, at: Option<f64>) -> AnalyticReport {
        let mut r = self.weighted_average([tau; 2], kind, [1.0, 1.0], &self.opts.outer, at);
        r.value = r.value.clamp(0.0, 1.0);
        r
    }

    /// P(SINR > τ), τ linear.
    pub fn coverage(&self, tau: f64) -> AnalyticReport {
        self.coverage_of(tau, CoverageKind::Sinr)
    }

    pub fn coverage_no_nlos(&self, tau: f64) -> AnalyticReport {
        self.coverage_of(tau, CoverageKind::SinrNoNlos)
    }

    pub fn snr_coverage(&self, tau: f64) -> AnalyticReport {
        self.coverage_of(tau, CoverageKind::Snr)
    }

    fn conditional(&self, tier: Tier, tau: f64, v0: f64, kind: CoverageKind) -> Result<AnalyticReport, AnalyticError> {
        let a = self.conditional_assoc_prob(tier, v0).value;
        if !(a > 0.0) {
            return Err(AnalyticError::UndefinedDensity { tier, v0 });
        }
        let b = Budget::default();
        let w = match tier {
            Tier::Sub6 => [1.0, 0.0],
            Tier::MmWave => [0.0, 1.0],
        };
        let tails = [self.sub6_tail(tau, kind, &b), None];
        let parts = self.tier_parts([tau; 2], v0, kind, tails, w, &b);
        let mut r = b.report_value((parts[0] + parts[1]) / a);
        r.est_error /= a;
        Ok(r)
    }

    /// C₁(τ; v0) = P(SINR > τ | Sub-6GHz serving, v0).
    pub fn coverage_cond_sub6(&self, tau: f64, v0: f64) -> Result<AnalyticReport, AnalyticError> {
        self.conditional(Tier::Sub6, tau, v0, CoverageKind::Sinr)
    }

    /// C₂(τ; v0) = P(SINR > τ | mmWave serving, v0).
    pub fn coverage_cond_mm(&self, tau: f64, v0: f64) -> Result<AnalyticReport, AnalyticError> {
        self.conditional(Tier::MmWave, tau, v0, CoverageKind::Sinr)
    }

    pub fn conditional_coverage(&self, tier: Tier, tau: f64, v0: f64, kind: CoverageKind) -> Result<AnalyticReport, AnalyticError> {
        self.conditional(tier, tau, v0, kind)
    }

    /// P(W_k·log₂(1 + SINR) > rate) in bit/s.
    pub fn rate_coverage(&self, rate: f64) -> AnalyticReport {
        self.rate_coverage_at(rate, None)
    }

    pub fn rate_coverage_at_v0(&self, rate: f64, v0: f64) -> AnalyticReport {
        self.rate_coverage_at(rate, Some(v0))
    }

    fn rate_coverage_at(&self, rate: f64, at: Option<f64>) -> AnalyticReport {
        let c = &self.params.channel;
        let taus = [(rate / c.w_1).exp2() - 1.0, (rate / c.w_2).exp2() - 1.0];
        let mut r = self.weighted_average(taus, CoverageKind::Sinr, [1.0, 1.0], &self.opts.outer, at);
        r.value = r.value.clamp(0.0, 1.0);
        r
    }

    /// R = E_{v0} Σ_k W_k ∫₀^∞ A_kᶜ·C_k(2^ρ − 1) dρ, in bit/s.
    pub fn avg_rate(&self) -> AnalyticReport {
        self.avg_rate_at(None)
    }

    /// Mean rate of the UEs at distance v0 from their hotspot center.
    pub fn avg_rate_at_v0(&self, v0: f64) -> AnalyticReport {
        self.avg_rate_at(Some(v0))
    }

    fn avg_rate_at(&self, at: Option<f64>) -> AnalyticReport {
        let c = &self.params.channel;
        let w = [c.w_1, c.w_2];
        let spec = self.opts.outer;
        let level = |rho: f64| self.weighted_average([rho.exp2() - 1.0; 2], CoverageKind::Sinr, [1.0, 1.0], &spec, at).value;
        // spectral efficiency beyond which both tiers' coverage is negligible
        let mut rho_max = 8.0;
        while level(rho_max) > 1e-7 && rho_max < 256.0 {
            rho_max *= 2.0;
        }
        let b = Budget::default();
        let rate_spec = QuadSpec::new(spec.rel_tol.max(1e-4), 1.0);
        let outer = integrate_adaptive(
            |rho| {
                let r = self.weighted_average([rho.exp2() - 1.0; 2], CoverageKind::Sinr, w, &spec, at);
                b.inner_err.set(b.inner_err.get().max(r.est_error));
                b.evals.set(b.evals.get() + r.evaluations);
                if !r.converged {
                    b.unconverged.set(true);
                }
                r.value
            },
            0.0,
            rho_max,
            &rate_spec,
        );
        let mut r = b.report(outer);
        // tail truncation bound: coverage below 1e-7 over at most rho_max more units
        r.est_error += 1e-7 * (w[0] + w[1]) * rho_max;
        r
    }

    /// SINR threshold (dB) met by `100 − percentile` percent of UEs, e.g.
    /// percentile 5 gives the edge SINR.
    pub fn percentile_sinr_db(&self, percentile: f64, kind: CoverageKind) -> Result<f64, AnalyticError> {
        self.percentile_sinr_db_at(percentile, kind, None)
    }

    pub fn percentile_sinr_db_at_v0(&self, percentile: f64, v0: f64, kind: CoverageKind) -> Result<f64, AnalyticError> {
        self.percentile_sinr_db_at(percentile, kind, Some(v0))
    }

    fn percentile_sinr_db_at(&self, percentile: f64, kind: CoverageKind, at: Option<f64>) -> Result<f64, AnalyticError> {
        let target = 1.0 - percentile / 100.0;
        Ok(find_root_monotone(
            |t| self.coverage_at(db_to_linear(t), kind, at).value,
            target,
            -60.0,
            90.0,
            1e-6,
            1e-3,
        )?)
    }

    /// Rate (bit/s) met by `100 − percentile` percent of UEs.
    pub fn percentile_rate(&self, percentile: f64) -> Result<f64, AnalyticError> {
        self.percentile_rate_at(percentile, None)
    }

    pub fn percentile_rate_at_v0(&self, percentile: f64, v0: f64) -> Result<f64, AnalyticError> {
        self.percentile_rate_at(percentile, Some(v0))
    }

    fn percentile_rate_at(&self, percentile: f64, at: Option<f64>) -> Result<f64, AnalyticError> {
        let target = 1.0 - percentile / 100.0;
        let lg = find_root_monotone(|l| self.rate_coverage_at(10f64.powf(l), at).value, target, 0.0, 13.0, 1e-6, 1e-5)?;
        Ok(10f64.powf(lg))
    }
}

fn binomial_sign(n: u32, j: u32) -> f64 {
    let a = binomial(n, j);
    if j % 2 == 1 {
        a
    } else {
        -a
    }
}

#[cfg(test)]
mod tests {
    use super::super::AnalyticOptions;
    use super::*;
    use crate::params::{ScenarioKind, SystemParams};

    fn fast(p: &SystemParams, s: ScenarioKind) -> AnalyticModel {
        AnalyticModel::new(p, s, AnalyticOptions::fast()).unwrap()
    }

    #[test]
    fn pinned_v0_forms_average_to_unpinned() {
        let p = SystemParams::table_defaults();
        let m = fast(&p, ScenarioKind::IntegratedA);
        let tau = 1.0;
        let sig = p.deployment.sigma_ue;
        // Rayleigh(σ) average by the midpoint rule on [0, 8σ]
        let n = 64;
        let h = 8.0 * sig / n as f64;
        let avg: f64 = (0..n)
            .map(|i| {
                let v = (i as f64 + 0.5) * h;
                v / (sig * sig) * (-0.5 * v * v / (sig * sig)).exp() * h * m.coverage_at_v0(tau, v, CoverageKind::Sinr).value
            })
            .sum();
        let whole = m.coverage(tau).value;
        assert!((avg - whole).abs() < 2e-3, "{avg} vs {whole}");
        // UEs near the center see more LoS members
        let near = m.coverage_at_v0(tau, 0.0, CoverageKind::Sinr).value;
        let far = m.coverage_at_v0(tau, 4.0 * sig, CoverageKind::Sinr).value;
        assert!(near > far, "{near} vs {far}");
    }

    #[test]
    fn pinned_v0_is_irrelevant_without_hotspot_bss() {
        let p = SystemParams::table_defaults();
        let m = fast(&p, ScenarioKind::Sub6OnlyB);
        let tau = db_to_linear(3.0);
        let c = m.coverage(tau).value;
        let r = m.avg_rate().value;
        for v in [0.0, 300.0] {
            assert!((m.coverage_at_v0(tau, v, CoverageKind::Sinr).value - c).abs() < 1e-9);
            assert!((m.avg_rate_at_v0(v).value - r).abs() < 1e-9 * r);
            assert!((m.percentile_sinr_db_at_v0(50.0, v, CoverageKind::Sinr).unwrap() - m.percentile_sinr_db(50.0, CoverageKind::Sinr).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn alzer_constants() {
        assert_eq!(alzer_chi(1), 1.0);
        assert!((alzer_chi(3) - 3.0 / 6f64.powf(1.0 / 3.0)).abs() < 1e-14);
        assert_eq!(binomial(3, 2), 3.0);
        assert_eq!(compensated_sum([1e16, 1.0, -1e16]), 1.0);
    }

    #[test]
    fn single_term_alzer_is_exact_rayleigh() {
        // N_L = 1: the sum is exp(−sσ²)·L(s) with s = τ/(P₂G_M ℓ)
        let mut p = SystemParams::table_defaults();
        p.channel.n_los = 1;
        let m = fast(&p, ScenarioKind::IntegratedA);
        let prof = m.profile(100.0);
        let b = Budget::default();
        let (tau, x) = (2.0, 40.0);
        let c = &m.params.channel;
        let s = tau / (m.params.p_2 * c.g_main * path_loss_clamped(c.c_los, c.alpha_los, x));
        let want = (-s * m.noise[1]).exp() * m.intra_laplace(s, &prof, x, Some(x), 9, true, &b) * m.inter_laplace(s, true);
        let got = m.mm_kernel(tau, x, &prof, CoverageKind::Sinr, &b);
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn coverage_limits_and_monotone() {
        let m = fast(&SystemParams::table_defaults(), ScenarioKind::IntegratedA);
        assert!((m.coverage(1e-9).value - 1.0).abs() < 1e-4);
        let mut prev = 1.0;
        for db in [-10.0, 0.0, 10.0, 20.0] {
            let c = m.coverage(db_to_linear(db)).value;
            assert!(c <= prev + 1e-9 && (0.0..=1.0).contains(&c), "{db}: {c}");
            prev = c;
        }
    }

    #[test]
    fn conditional_coverage_monotone() {
        let m = fast(&SystemParams::table_defaults(), ScenarioKind::IntegratedA);
        for tier in [Tier::Sub6, Tier::MmWave] {
            let mut prev = 1.0 + 1e-9;
            for db in [-20.0, -5.0, 0.0, 5.0, 15.0] {
                let c = m.conditional_coverage(tier, db_to_linear(db), 80.0, CoverageKind::Sinr).unwrap().value;
                assert!(c <= prev, "{tier:?} {db}");
                prev = c;
            }
            let near_one = m.conditional_coverage(tier, 1e-8, 80.0, CoverageKind::Sinr).unwrap().value;
            assert!((near_one - 1.0).abs() < 1e-4, "{tier:?} {near_one}");
        }
    }

    #[test]
    fn tier_decomposition() {
        let m = fast(&SystemParams::table_defaults(), ScenarioKind::IntegratedA);
        let tau = 1.0;
        let [a, b] = m.coverage_tiers(tau, CoverageKind::Sinr);
        let c = m.coverage(tau);
        assert!((a.value + b.value - c.value).abs() < 1e-4 + a.est_error + b.est_error + c.est_error);
    }

    #[test]
    fn bound_and_snr_dominate() {
        let m = fast(&SystemParams::table_defaults(), ScenarioKind::IntegratedA);
        for db in [-5.0, 5.0, 15.0] {
            let t = db_to_linear(db);
            let c = m.coverage(t).value;
            assert!(m.coverage_no_nlos(t).value >= c - 1e-4);
            assert!(m.snr_coverage(t).value >= c - 1e-4);
        }
    }

    #[test]
    fn bandwidth_scales_rate_share() {
        // linearity of the rate in W_k for fixed coverage
        let mut p = SystemParams::table_defaults();
        p.deployment.lambda_1 = 0.0;
        let m1 = fast(&p, ScenarioKind::MmWaveOnlyC);
        let r1 = m1.avg_rate().value;
        // scale W₂ and shift noise back so the SINR law is unchanged
        p.channel.w_2 *= 2.0;
        p.channel.noise_figure_db -= 10.0 * 2f64.log10();
        let m2 = fast(&p, ScenarioKind::MmWaveOnlyC);
        let r2 = m2.avg_rate().value;
        assert!(((r2 / r1) - 2.0).abs() < 1e-3, "{r1} {r2}");
    }
}
