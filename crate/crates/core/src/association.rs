//! Strongest-biased-average-power association between the nearest
//! Sub-6GHz BS and the nearest LoS mmWave BS of the UE's own hotspot.

use serde::Serialize;

use crate::channel::path_loss_clamped;
use crate::geometry::NetworkRealization;
use crate::params::{ChannelParams, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Tier {
    Sub6 = 1,
    MmWave = 2,
}

impl Tier {
    pub fn other(self) -> Tier {
        match self {
            Tier::Sub6 => Tier::MmWave,
            Tier::MmWave => Tier::Sub6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssociationParams {
    pub bias_1: f64,
    pub bias_2: f64,
    pub p_1: f64,
    pub p_2: f64,
    pub channel: ChannelParams,
}

impl From<&SystemParams> for AssociationParams {
    fn from(p: &SystemParams) -> Self {
        AssociationParams {
            bias_1: p.bias_1,
            bias_2: p.bias_2,
            p_1: p.p_1,
            p_2: p.p_2,
            channel: p.channel,
        }
    }
}

impl AssociationParams {
    /// B_k·P_k·G_k·N_k·C_k, the distance-free part of the metric. The
    /// mmWave tier uses the main-lobe gain and the LoS constants.
    pub fn weight(&self, tier: Tier) -> f64 {
        let c = &self.channel;
        match tier {
            Tier::Sub6 => self.bias_1 * self.p_1 * c.g_1 * ChannelParams::N_SUB6 as f64 * c.c_1,
            Tier::MmWave => self.bias_2 * self.p_2 * c.g_main * c.n_los as f64 * c.c_los,
        }
    }

    pub fn exponent(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Sub6 => self.channel.alpha_1,
            Tier::MmWave => self.channel.alpha_los,
        }
    }
}

/// B_k·P_k·G_k·N_k·ℓ_k(r), with ℓ clamped below 1 m.
pub fn biased_metric(tier: Tier, r: f64, params: &AssociationParams) -> f64 {
    path_loss_clamped(params.weight(tier), params.exponent(tier), r)
}

/// Distance at which tier `to` has the same biased metric as tier `from`
/// has at distance r (pure power laws, no clamp). δ₂,₁ inverts δ₁,₂.
pub fn delta(from: Tier, to: Tier, r: f64, params: &AssociationParams) -> f64 {
    if from == to {
        return r;
    }
    let ratio = params.weight(to) / params.weight(from);
    let a_to = params.exponent(to);
    ratio.powf(1.0 / a_to) * r.powf(params.exponent(from) / a_to)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ServingIndex {
    Sub6(usize),
    Mm { cluster: usize, member: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssociationOutcome {
    pub tier: Tier,
    pub serving_distance: f64,
    pub serving_index: ServingIndex,
}

/// The two admissible serving candidates of the typical UE.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Candidates {
    /// (index, distance) of the nearest Sub-6GHz BS.
    pub sub6: Option<(usize, f64)>,
    /// (member index, distance) of the nearest LoS BS in cluster 0.
    pub mm: Option<(usize, f64)>,
}

impl Candidates {
    pub fn of(realization: &NetworkRealization) -> Self {
        let sub6 = realization
            .sub6_points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.norm_sq()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, d2)| (i, d2.sqrt()));
        let mm = realization.clusters.first().and_then(|c| {
            let los = &realization.los[0];
            c.members
                .iter()
                .enumerate()
                .filter(|(j, _)| los[*j])
                .map(|(j, p)| (j, p.norm_sq()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(j, d2)| (j, d2.sqrt()))
        });
        Candidates { sub6, mm }
    }

    /// Argmax of the biased metric; ties go to Sub-6GHz. `None` only when
    /// neither candidate exists.
    pub fn select(&self, params: &AssociationParams) -> Option<AssociationOutcome> {
        let sub6 = self.sub6.map(|(i, r)| AssociationOutcome {
            tier: Tier::Sub6,
            serving_distance: r,
            serving_index: ServingIndex::Sub6(i),
        });
        let mm = self.mm.map(|(j, r)| AssociationOutcome {
            tier: Tier::MmWave,
            serving_distance: r,
            serving_index: ServingIndex::Mm { cluster: 0, member: j },
        });
        match (sub6, mm) {
            (Some(a), Some(b)) => {
                let ma = biased_metric(Tier::Sub6, a.serving_distance, params);
                let mb = biased_metric(Tier::MmWave, b.serving_distance, params);
                Some(if mb > ma { b } else { a })
            }
            (a, b) => a.or(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssociationError {
    #[error("realization has no Sub-6GHz BS")]
    NoSub6,
}

/// Serving BS of the typical UE. Requires at least one Sub-6GHz BS.
pub fn associate(realization: &NetworkRealization, params: &AssociationParams) -> Result<AssociationOutcome, AssociationError> {
    if realization.sub6_points.is_empty() {
        return Err(AssociationError::NoSub6);
    }
    Ok(Candidates::of(realization)
        .select(params)
        .expect("a Sub-6GHz candidate exists"))
}
