//! System parameters of the two-tier network.
//!
//! Everything is stored in SI units and linear scale; the configuration
//! layer converts from dB, dBm, MHz and per-km² densities.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::units::{db_to_linear, dbm_to_watts, per_km2_to_per_m2};

/// Largest Nakagami order accepted for the LoS link. The alternating
/// coverage sum has binomial coefficients that grow quickly with it.
pub const MAX_NAKAGAMI_LOS: u32 = 10;

/// Per-link physics shared by both tiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    /// Average LoS fraction inside the LoS ball.
    pub p_los: f64,
    /// LoS ball radius in meters. May be infinite.
    pub r_los_ball: f64,
    /// Path-loss intercepts at 1 m (linear).
    pub c_1: f64,
    pub c_los: f64,
    pub c_nlos: f64,
    pub alpha_1: f64,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    /// Nakagami orders of mmWave LoS and NLoS links; Sub-6GHz is Rayleigh.
    pub n_los: u32,
    pub n_nlos: u32,
    /// Antenna gains (linear).
    pub g_1: f64,
    pub g_main: f64,
    pub g_side: f64,
    /// Main-lobe beamwidth in radians.
    pub theta_b: f64,
    /// Carrier bandwidths in Hz.
    pub w_1: f64,
    pub w_2: f64,
    pub noise_figure_db: f64,
}

impl ChannelParams {
    /// Nakagami order of the Sub-6GHz tier (Rayleigh fading).
    pub const N_SUB6: u32 = 1;

    /// Probability that an interfering mmWave BS points its main lobe at the UE.
    pub fn p_main(&self) -> f64 {
        (self.theta_b / (2.0 * PI)).clamp(0.0, 1.0)
    }

    pub fn p_side(&self) -> f64 {
        1.0 - self.p_main()
    }
}

/// Spatial deployment of both tiers and of the hotspot users.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deployment {
    /// Sub-6GHz BS density per m².
    pub lambda_1: f64,
    /// Hotspot-center density per m².
    pub lambda_p: f64,
    /// mmWave BSs per hotspot.
    pub n_bs: u32,
    pub sigma_bs: f64,
    pub sigma_ue: f64,
}

/// A complete scenario description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    pub deployment: Deployment,
    pub channel: ChannelParams,
    /// Transmit powers in watts.
    pub p_1: f64,
    pub p_2: f64,
    /// Association biases (linear).
    pub bias_1: f64,
    pub bias_2: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::table_defaults()
    }
}

impl SystemParams {
    /// The default evaluation setting: 30 and 5 per km², ten BSs per
    /// hotspot, 40/30 dBm, 18/−2 dBi with a 10° beam, and so on. The
    /// Sub-6GHz antenna gain and the biases default to 0 dB.
    pub fn table_defaults() -> Self {
        SystemParams {
            deployment: Deployment {
                lambda_1: per_km2_to_per_m2(30.0),
                lambda_p: per_km2_to_per_m2(5.0),
                n_bs: 10,
                sigma_bs: 100.0,
                sigma_ue: 150.0,
            },
            channel: ChannelParams {
                p_los: 0.2,
                r_los_ball: 200.0,
                c_1: db_to_linear(-38.5),
                c_los: db_to_linear(-61.4),
                c_nlos: db_to_linear(-72.0),
                alpha_1: 3.0,
                alpha_los: 2.0,
                alpha_nlos: 2.92,
                n_los: 3,
                n_nlos: 2,
                g_1: db_to_linear(0.0),
                g_main: db_to_linear(18.0),
                g_side: db_to_linear(-2.0),
                theta_b: 10f64.to_radians(),
                w_1: 20e6,
                w_2: 1e9,
                noise_figure_db: 10.0,
            },
            p_1: dbm_to_watts(40.0),
            p_2: dbm_to_watts(30.0),
            bias_1: 1.0,
            bias_2: 1.0,
        }
    }

    /// Bias ratio B₂/B₁ (linear).
    pub fn bias_ratio(&self) -> f64 {
        self.bias_2 / self.bias_1
    }

    /// Replaces the mmWave small cells by Sub-6GHz small cells: every
    /// member is "LoS" with the Sub-6GHz path loss, omnidirectional gain
    /// G₁, Rayleigh fading and bandwidth W₁. Transmit power and bias of the
    /// small-cell tier are kept.
    pub fn with_sub6_small_cells(&self) -> Self {
        let mut p = *self;
        let c = &mut p.channel;
        c.p_los = 1.0;
        c.r_los_ball = f64::INFINITY;
        c.c_los = c.c_1;
        c.c_nlos = c.c_1;
        c.alpha_los = c.alpha_1;
        c.alpha_nlos = c.alpha_1;
        c.n_los = ChannelParams::N_SUB6;
        c.n_nlos = ChannelParams::N_SUB6;
        c.g_main = c.g_1;
        c.g_side = c.g_1;
        c.w_2 = c.w_1;
        p
    }

    /// All invariant violations, empty when the parameters are usable.
    pub fn violations(&self) -> Vec<ParamViolation> {
        let mut out = Vec::new();
        let d = &self.deployment;
        let c = &self.channel;
        let mut check = |ok: bool, field: &'static str, message: String| {
            if !ok {
                out.push(ParamViolation { field, message });
            }
        };
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        let pos = |x: f64| x.is_finite() && x > 0.0;

        check(finite_nonneg(d.lambda_1), "lambda_1", format!("density must be finite and >= 0, got {}", d.lambda_1));
        check(finite_nonneg(d.lambda_p), "lambda_p", format!("density must be finite and >= 0, got {}", d.lambda_p));
        check(pos(d.sigma_bs), "sigma_bs", format!("must be > 0, got {}", d.sigma_bs));
        check(pos(d.sigma_ue), "sigma_ue", format!("must be > 0, got {}", d.sigma_ue));
        check((0.0..=1.0).contains(&c.p_los), "p_los", format!("probability must lie in [0, 1], got {}", c.p_los));
        check(c.r_los_ball > 0.0 && !c.r_los_ball.is_nan(), "r_los_ball", format!("must be > 0, got {}", c.r_los_ball));
        for (name, v) in [("c_1", c.c_1), ("c_los", c.c_los), ("c_nlos", c.c_nlos)] {
            check(pos(v), name, format!("intercept must be > 0 (linear), got {v}"));
        }
        for (name, v) in [("g_1", c.g_1), ("g_main", c.g_main), ("g_side", c.g_side)] {
            check(pos(v), name, format!("gain must be > 0 (linear), got {v}"));
        }
        check(c.g_main >= c.g_side, "g_main", format!("main-lobe gain {} below side-lobe gain {}", c.g_main, c.g_side));
        check(
            c.theta_b > 0.0 && c.theta_b <= 2.0 * PI,
            "theta_b",
            format!("beamwidth must lie in (0, 2π] rad, got {}", c.theta_b),
        );
        check(c.alpha_1.is_finite() && c.alpha_1 > 2.0, "alpha_1", format!("Sub-6GHz exponent must exceed 2, got {}", c.alpha_1));
        check(pos(c.alpha_los), "alpha_los", format!("must be > 0, got {}", c.alpha_los));
        check(pos(c.alpha_nlos), "alpha_nlos", format!("must be > 0, got {}", c.alpha_nlos));
        check(
            (1..=MAX_NAKAGAMI_LOS).contains(&c.n_los),
            "n_los",
            format!("Nakagami order must lie in 1..={MAX_NAKAGAMI_LOS}, got {}", c.n_los),
        );
        check(c.n_nlos >= 1, "n_nlos", format!("Nakagami order must be >= 1, got {}", c.n_nlos));
        check(pos(c.w_1), "w_1", format!("bandwidth must be > 0, got {}", c.w_1));
        check(pos(c.w_2), "w_2", format!("bandwidth must be > 0, got {}", c.w_2));
        check(c.noise_figure_db.is_finite(), "noise_figure_db", "must be finite".to_string());
        check(pos(self.p_1), "p_1", format!("power must be > 0, got {}", self.p_1));
        check(pos(self.p_2), "p_2", format!("power must be > 0, got {}", self.p_2));
        check(pos(self.bias_1), "bias_1", format!("bias must be > 0 (linear), got {}", self.bias_1));
        check(pos(self.bias_2), "bias_2", format!("bias must be > 0 (linear), got {}", self.bias_2));
        out
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ParamError(v))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamViolation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid parameters: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ParamError(pub Vec<ParamViolation>);

/// Deployment variants compared in the coverage study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ScenarioKind {
    /// Sub-6GHz macro cells plus clustered mmWave small cells.
    IntegratedA,
    /// Only the Sub-6GHz macro cells of (a).
    Sub6OnlyB,
    /// Only the clustered mmWave small cells of (a); UEs without an
    /// intra-cluster LoS BS are in outage.
    MmWaveOnlyC,
    /// Clustered small cells operated at Sub-6GHz, sharing the macro band.
    TwoTierSub6D,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::IntegratedA,
        ScenarioKind::Sub6OnlyB,
        ScenarioKind::MmWaveOnlyC,
        ScenarioKind::TwoTierSub6D,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ScenarioKind::IntegratedA => "a",
            ScenarioKind::Sub6OnlyB => "b",
            ScenarioKind::MmWaveOnlyC => "c",
            ScenarioKind::TwoTierSub6D => "d",
        }
    }

    /// Parameters actually simulated for this deployment.
    pub fn effective_params(self, params: &SystemParams) -> SystemParams {
        let mut p = *params;
        match self {
            ScenarioKind::IntegratedA => p,
            ScenarioKind::Sub6OnlyB => {
                p.deployment.n_bs = 0;
                p
            }
            ScenarioKind::MmWaveOnlyC => {
                p.deployment.lambda_1 = 0.0;
                p
            }
            ScenarioKind::TwoTierSub6D => params.with_sub6_small_cells(),
        }
    }

    /// Whether both tiers transmit in the same band and interfere with each other.
    pub fn shared_band(self) -> bool {
        matches!(self, ScenarioKind::TwoTierSub6D)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" | "integrated" => Ok(ScenarioKind::IntegratedA),
            "b" | "sub6_only" => Ok(ScenarioKind::Sub6OnlyB),
            "c" | "mmwave_only" => Ok(ScenarioKind::MmWaveOnlyC),
            "d" | "two_tier_sub6" => Ok(ScenarioKind::TwoTierSub6D),
            other => Err(format!("unknown scenario `{other}` (expected a, b, c or d)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = SystemParams::table_defaults();
        assert!(p.validate().is_ok(), "{:?}", p.violations());
        assert!((p.channel.p_main() - 10.0 / 360.0).abs() < 1e-15);
        assert!((p.p_1 - 10.0).abs() < 1e-12);
        assert!((p.deployment.lambda_1 - 3e-5).abs() < 1e-20);
    }

    #[test]
    fn rejects_bad_probability() {
        let mut p = SystemParams::table_defaults();
        p.channel.p_los = 1.3;
        let err = p.validate().unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert_eq!(err.0[0].field, "p_los");
    }

    #[test]
    fn rejects_non_convergent_exponent() {
        let mut p = SystemParams::table_defaults();
        p.channel.alpha_1 = 2.0;
        assert!(p.violations().iter().any(|v| v.field == "alpha_1"));
    }

    #[test]
    fn sub6_small_cells_are_valid() {
        let p = SystemParams::table_defaults().with_sub6_small_cells();
        assert!(p.validate().is_ok(), "{:?}", p.violations());
        assert_eq!(p.channel.n_los, 1);
        assert_eq!(p.channel.g_main, p.channel.g_1);
    }

    #[test]
    fn scenario_parse() {
        for k in ScenarioKind::ALL {
            assert_eq!(k.label().parse::<ScenarioKind>().unwrap(), k);
        }
        assert!("e".parse::<ScenarioKind>().is_err());
    }
}
