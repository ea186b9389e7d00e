//! Numerical evaluation of the stochastic-geometry expressions: serving
//! distance laws, association probabilities, interference Laplace
//! transforms, SINR coverage and rate.
//!
//! Everything is conditioned first on v0, the distance from the typical UE
//! to its hotspot center, and then averaged over v0 ~ Rayleigh(σ_UE). Per
//! tier the model works with the unnormalized serving densities
//! u_k(x; v0) = A_kᶜ(v0)·f_{X_k}(x; v0), so coverage is
//! E_{v0}[Σ_k ∫ u_k(x)·K_k(τ, x) dx] with no division by A_kᶜ.

mod coverage;
mod laplace;
mod laws;
mod profile;

pub use coverage::CoverageKind;
pub use laws::DistanceLaws;

use std::cell::Cell;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use serde::Serialize;

use crate::association::{AssociationParams, Tier};
use crate::channel::noise_power;
use crate::params::{ParamError, ScenarioKind, SystemParams};
use crate::quadrature::{integrate_adaptive, IntegrationResult, QuadSpec, RootError};
use crate::special::bessel_i0e;

/// J(t) = ∫_{−π}^{π} e^{t·cos θ} dθ = 2π·I₀(t); +inf once I₀ overflows.
pub fn j_factor(t: f64) -> f64 {
    let a = t.abs();
    let s = bessel_i0e(a);
    2.0 * std::f64::consts::PI * s * a.exp()
}

/// How the other members of the typical hotspot enter the intra-cluster
/// Laplace transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum IntraClusterModel {
    /// Poisson approximation exp(−(n−1)·E) with intensity (n−1)·f(r)dr.
    Pgfl,
    /// Exact for n − 1 i.i.d. members conditioned on the serving event:
    /// (1 − E/(1 − F_SL(x)))^{n−1}.
    #[default]
    Binomial,
    /// The printed intensity 2π·(n−1)·f(r)·r·dr, kept for comparison.
    Literal,
}

/// Number of interferers per foreign hotspot in the inter-cluster PGFL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum InterClusterCount {
    /// Intra transform evaluated with n_BS + 1 members, i.e. n_BS
    /// interferers; exact for Poisson(n_BS) members per hotspot.
    #[default]
    NBsPlusOne,
    /// n_BS members, one of which is dropped as if serving: n_BS − 1.
    NBs,
}

/// Lower limit of the NLoS part of the intra-cluster integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum NlosExclusion {
    /// NLoS BSs are never serving candidates, so none are excluded.
    #[default]
    None,
    /// NLoS members closer than δ_{L,N}(x) are excluded, where an NLoS BS
    /// at δ_{L,N}(x) matches the LoS metric at x.
    Boundary,
}

macro_rules! labeled_enum {
    ($t:ty, $what:literal, $($v:path => $s:literal),+) => {
        impl $t {
            pub fn label(self) -> &'static str {
                match self { $($v => $s),+ }
            }
        }
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }
        impl FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($s => Ok($v),)+
                    other => Err(format!(concat!("unknown ", $what, " '{}'; expected one of: {}"), other, [$($s),+].join(", "))),
                }
            }
        }
    };
}

labeled_enum!(IntraClusterModel, "intra-cluster model",
    IntraClusterModel::Pgfl => "pgfl",
    IntraClusterModel::Binomial => "binomial",
    IntraClusterModel::Literal => "literal");
labeled_enum!(InterClusterCount, "inter-cluster count",
    InterClusterCount::NBsPlusOne => "n_bs_plus_one",
    InterClusterCount::NBs => "n_bs");
labeled_enum!(NlosExclusion, "NLoS exclusion",
    NlosExclusion::None => "none",
    NlosExclusion::Boundary => "boundary");

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticOptions {
    /// Tolerances of the outermost integral of each quantity.
    #[serde(skip)]
    pub outer: QuadSpec,
    /// Tolerances of serving-distance and interferer-distance integrals.
    #[serde(skip)]
    pub inner: QuadSpec,
    pub intra_model: IntraClusterModel,
    pub inter_count: InterClusterCount,
    pub nlos_exclusion: NlosExclusion,
    /// The v0 average stops at this many σ_UE (Rayleigh tail e^{−c²/2}).
    pub v0_cutoff_sigmas: f64,
    /// Node density of the inter-cluster Laplace table in log₁₀ s.
    pub inter_nodes_per_decade: u32,
}

impl Default for AnalyticOptions {
    fn default() -> Self {
        AnalyticOptions {
            outer: QuadSpec::new(1e-5, 1e-8),
            inner: QuadSpec::new(1e-6, 1e-10),
            intra_model: IntraClusterModel::default(),
            inter_count: InterClusterCount::default(),
            nlos_exclusion: NlosExclusion::default(),
            v0_cutoff_sigmas: 9.0,
            inter_nodes_per_decade: 20,
        }
    }
}

impl AnalyticOptions {
    /// Looser tolerances for sweeps and root finding.
    pub fn fast() -> Self {
        AnalyticOptions {
            outer: QuadSpec::new(1e-4, 1e-6),
            inner: QuadSpec::new(1e-5, 1e-8),
            ..AnalyticOptions::default()
        }
    }

    /// Both tolerance sets with `rel_tol` as the outer relative tolerance
    /// and the inner one an order tighter.
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.outer = QuadSpec::new(rel_tol, rel_tol * 1e-3);
        self.inner = QuadSpec::new(rel_tol * 0.1, rel_tol * 1e-5);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticReport {
    pub value: f64,
    /// Outer quadrature estimate plus the largest inner estimate; ≥ 0.
    pub est_error: f64,
    pub evaluations: u64,
    pub converged: bool,
}

impl AnalyticReport {
    pub fn exact(value: f64) -> Self {
        AnalyticReport {
            value,
            est_error: 0.0,
            evaluations: 0,
            converged: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("conditional density of tier {tier:?} undefined at v0 = {v0}: association probability is zero")]
    UndefinedDensity { tier: Tier, v0: f64 },
    #[error(transparent)]
    Root(#[from] RootError),
}

/// Error and work accounting of the nested integrals behind one report.
#[derive(Debug, Default)]
pub(crate) struct Budget {
    inner_err: Cell<f64>,
    evals: Cell<u64>,
    unconverged: Cell<bool>,
}

impl Budget {
    pub fn take(&self, r: IntegrationResult) -> f64 {
        self.inner_err.set(self.inner_err.get().max(r.est_error));
        self.evals.set(self.evals.get() + r.evaluations as u64);
        if !r.converged {
            self.unconverged.set(true);
        }
        r.value
    }

    pub fn report(&self, outer: IntegrationResult) -> AnalyticReport {
        AnalyticReport {
            value: outer.value,
            est_error: outer.est_error + self.inner_err.get(),
            evaluations: outer.evaluations as u64 + self.evals.get(),
            converged: outer.converged && !self.unconverged.get(),
        }
    }

    pub fn report_value(&self, value: f64) -> AnalyticReport {
        self.report(IntegrationResult {
            value,
            est_error: 0.0,
            evaluations: 0,
            converged: true,
        })
    }
}

/// One parameter set and scenario with its numerical caches. Shareable
/// across threads; caches are behind mutexes.
#[derive(Debug)]
pub struct AnalyticModel {
    params: SystemParams,
    scenario: ScenarioKind,
    opts: AnalyticOptions,
    assoc: AssociationParams,
    noise: [f64; 2],
    rho_cache: Mutex<HashMap<u64, f64>>,
    inter_cache: Mutex<HashMap<(bool, i64), f64>>,
}

impl AnalyticModel {
    /// `params` are user parameters; the scenario substitutions are applied
    /// here.
    pub fn new(params: &SystemParams, scenario: ScenarioKind, opts: AnalyticOptions) -> Result<Self, AnalyticError> {
        params.validate()?;
        let p = scenario.effective_params(params);
        let noise = [
            noise_power(p.channel.w_1, &p.channel).expect("validated bandwidth"),
            noise_power(p.channel.w_2, &p.channel).expect("validated bandwidth"),
        ];
        Ok(AnalyticModel {
            assoc: AssociationParams::from(&p),
            params: p,
            scenario,
            opts,
            noise,
            rho_cache: Mutex::new(HashMap::new()),
            inter_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_defaults(params: &SystemParams, scenario: ScenarioKind) -> Result<Self, AnalyticError> {
        Self::new(params, scenario, AnalyticOptions::default())
    }

    /// Parameters after the scenario substitutions.
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn scenario(&self) -> ScenarioKind {
        self.scenario
    }

    pub fn options(&self) -> &AnalyticOptions {
        &self.opts
    }

    fn shared_band(&self) -> bool {
        self.scenario.shared_band()
    }

    /// E_{v0}[h(v0)] over Rayleigh(σ_UE). Without small cells nothing
    /// depends on v0 and h is evaluated once.
    fn expect_v0<F: FnMut(f64) -> f64>(&self, spec: &QuadSpec, mut h: F) -> IntegrationResult {
        let s = self.params.deployment.sigma_ue;
        if self.params.deployment.n_bs == 0 {
            return IntegrationResult {
                value: h(0.0),
                est_error: 0.0,
                evaluations: 1,
                converged: true,
            };
        }
        let s2 = s * s;
        integrate_adaptive(
            |v| {
                let w = v / s2 * (-0.5 * v * v / s2).exp();
                if w == 0.0 {
                    0.0
                } else {
                    w * h(v)
                }
            },
            0.0,
            self.opts.v0_cutoff_sigmas * s,
            spec,
        )
    }
}

/// Coverage of the two-tier Sub-6GHz baseline with default options.
pub fn coverage_two_tier_sub6(tau: f64, params: &SystemParams) -> Result<AnalyticReport, AnalyticError> {
    Ok(AnalyticModel::with_defaults(params, ScenarioKind::TwoTierSub6D)?.coverage(tau))
}

/// Coverage of the integrated network with default options.
pub fn coverage(tau: f64, params: &SystemParams) -> Result<AnalyticReport, AnalyticError> {
    Ok(AnalyticModel::with_defaults(params, ScenarioKind::IntegratedA)?.coverage(tau))
}

/// Association probability of `tier` in the integrated network.
pub fn assoc_prob(tier: Tier, params: &SystemParams) -> Result<AnalyticReport, AnalyticError> {
    Ok(AnalyticModel::with_defaults(params, ScenarioKind::IntegratedA)?.assoc_prob(tier))
}
