//! Monte Carlo trial engine.
//!
//! Every trial samples a fresh world around the typical UE, associates it,
//! and draws fading and interferer antenna gains for the serving band.
//!
//! Trial `i` of a run with master seed `s` uses `ChaCha8Rng::seed_from_u64(s)`
//! switched to stream `i`. Streams never overlap, so each trial is
//! reproducible on its own and the run does not depend on execution order
//! or on the number of worker threads.

mod estimate;

pub use estimate::*;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::association::{AssociationOutcome, AssociationParams, Candidates, ServingIndex, Tier};
use crate::channel::{class_constants, los_probability, noise_power, path_loss_sq, FadingSampler, LinkClass};
use crate::geometry::{
    poisson_count, sample_ppp, sample_thomas_cluster, sample_typical_offset, ClusterRealization, NetworkRealization,
    Point2D,
};
use crate::params::{ChannelParams, ScenarioKind, SystemParams};

/// Simulation disk radius used when nothing else is requested, in meters.
/// Sub-6GHz interference beyond it is below the Monte Carlo noise of 10⁵
/// trials at α₁ = 3.
pub const DEFAULT_WINDOW_RADIUS: f64 = 10_000.0;

/// Hotspot centers are sampled this many cluster standard deviations beyond
/// the window so that clusters straddling the boundary keep their members.
pub const CENTER_MARGIN_SIGMAS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum V0Sampling {
    /// V₀ ~ Rayleigh(σ_UE), the unconditioned typical UE.
    Rayleigh,
    /// Distance to the hotspot center pinned to the given value.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimOptions {
    pub scenario: ScenarioKind,
    pub n_trials: usize,
    pub seed: u64,
    pub window_radius: f64,
    pub v0: V0Sampling,
}

impl SimOptions {
    pub fn new(scenario: ScenarioKind, n_trials: usize, seed: u64) -> Self {
        SimOptions {
            scenario,
            n_trials,
            seed,
            window_radius: DEFAULT_WINDOW_RADIUS,
            v0: V0Sampling::Rayleigh,
        }
    }

    pub fn window(mut self, radius: f64) -> Self {
        self.window_radius = radius;
        self
    }

    pub fn pinned_v0(mut self, v0: f64) -> Self {
        self.v0 = V0Sampling::Fixed(v0);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialResult {
    /// `None` when the UE has no admissible serving BS (outage).
    pub outcome: Option<AssociationOutcome>,
    pub sinr: f64,
    pub snr: f64,
    /// W_k·log₂(1 + SINR) in bit/s.
    pub rate: f64,
    pub v0: f64,
}

impl TrialResult {
    pub fn tier(&self) -> Option<Tier> {
        self.outcome.map(|o| o.tier)
    }

    fn outage(v0: f64) -> Self {
        TrialResult {
            outcome: None,
            sinr: 0.0,
            snr: 0.0,
            rate: 0.0,
            v0,
        }
    }
}

/// Source of the per-link random quantities of one trial.
pub trait LinkDraws {
    /// Normalized fading power of a link of the given class.
    fn fading(&mut self, class: LinkClass) -> f64;
    /// Antenna gain of an interfering mmWave BS towards the UE.
    fn interferer_gain(&mut self) -> f64;
}

/// Gamma fading and sectored-antenna gains drawn from an rng.
pub struct RandomDraws<'a, R: Rng + ?Sized> {
    rng: &'a mut R,
    fading: FadingSampler,
    p_main: f64,
    g_main: f64,
    g_side: f64,
}

impl<'a, R: Rng + ?Sized> RandomDraws<'a, R> {
    pub fn new(rng: &'a mut R, channel: &ChannelParams) -> Self {
        RandomDraws {
            rng,
            fading: FadingSampler::new(channel),
            p_main: channel.p_main(),
            g_main: channel.g_main,
            g_side: channel.g_side,
        }
    }
}

impl<R: Rng + ?Sized> LinkDraws for RandomDraws<'_, R> {
    #[inline]
    fn fading(&mut self, class: LinkClass) -> f64 {
        self.fading.sample(class, self.rng)
    }

    #[inline]
    fn interferer_gain(&mut self) -> f64 {
        if self.rng.random::<f64>() < self.p_main {
            self.g_main
        } else {
            self.g_side
        }
    }
}

/// Unit fading and a fixed interferer gain; for hand-checked fixtures.
#[derive(Debug, Clone, Copy)]
pub struct FixedDraws {
    pub fading: f64,
    pub interferer_gain: f64,
}

impl LinkDraws for FixedDraws {
    fn fading(&mut self, _class: LinkClass) -> f64 {
        self.fading
    }

    fn interferer_gain(&mut self) -> f64 {
        self.interferer_gain
    }
}

/// RNG of trial `index` under master seed `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Samples one world for `scenario`. `params` are the user parameters; the
/// scenario's own substitutions are applied here.
pub fn sample_realization<R: Rng + ?Sized>(
    params: &SystemParams,
    scenario: ScenarioKind,
    window_radius: f64,
    v0: V0Sampling,
    rng: &mut R,
) -> NetworkRealization {
    let p = scenario.effective_params(params);
    let d = &p.deployment;
    let v0 = match v0 {
        V0Sampling::Rayleigh => sample_typical_offset(d.sigma_ue, rng).expect("validated sigma_ue"),
        V0Sampling::Fixed(v) => v,
    };
    let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    let c0 = Point2D::polar(v0, phi);

    let typical = sample_thomas_cluster(c0, d.sigma_bs, d.n_bs as usize, rng).expect("validated sigma_bs");
    let sub6_points = if d.lambda_1 > 0.0 {
        sample_ppp(d.lambda_1, window_radius, rng).expect("validated density")
    } else {
        Vec::new()
    };

    let mut clusters = vec![typical];
    if d.n_bs > 0 && d.lambda_p > 0.0 {
        let margin = CENTER_MARGIN_SIGMAS * d.sigma_bs.max(d.sigma_ue);
        let centers = sample_ppp(d.lambda_p, window_radius + margin, rng).expect("validated density");
        let r2 = window_radius * window_radius;
        for c in centers {
            let count = poisson_count(d.n_bs as f64, rng);
            let mut cl = sample_thomas_cluster(c, d.sigma_bs, count, rng).expect("validated sigma_bs");
            cl.members.retain(|m| m.norm_sq() <= r2);
            clusters.push(cl);
        }
    }

    let los = clusters
        .iter()
        .map(|cl| {
            cl.members
                .iter()
                .map(|m| rng.random::<f64>() < los_probability(m.norm(), &p.channel))
                .collect()
        })
        .collect();

    NetworkRealization {
        sub6_points,
        clusters,
        los,
        typical_offset_v0: v0,
        window_radius,
    }
}

/// SINR, SNR and rate of the typical UE served according to `outcome`.
///
/// `params` must already carry the scenario substitutions (see
/// [`ScenarioKind::effective_params`]). When the tiers use separate bands
/// only the serving tier interferes; with a shared band every other BS does.
pub fn sinr_of_realization<D: LinkDraws>(
    realization: &NetworkRealization,
    outcome: &AssociationOutcome,
    params: &SystemParams,
    shared_band: bool,
    draws: &mut D,
) -> TrialResult {
    let c = &params.channel;
    let (tx, gain, class, bandwidth) = match outcome.tier {
        Tier::Sub6 => (params.p_1, c.g_1, LinkClass::Sub6, c.w_1),
        Tier::MmWave => (params.p_2, c.g_main, LinkClass::MmLos, c.w_2),
    };
    let (ic, ia) = class_constants(class, c);
    let h = draws.fading(class);
    let d = outcome.serving_distance;
    let signal = tx * gain * h * path_loss_sq(ic, ia, d * d);

    let mut interference = 0.0;
    if shared_band || outcome.tier == Tier::Sub6 {
        let skip = match outcome.serving_index {
            ServingIndex::Sub6(i) => Some(i),
            _ => None,
        };
        interference += sub6_interference(&realization.sub6_points, skip, params, draws);
    }
    if shared_band || outcome.tier == Tier::MmWave {
        let skip = match outcome.serving_index {
            ServingIndex::Mm { cluster, member } => Some((cluster, member)),
            _ => None,
        };
        interference += mm_interference(&realization.clusters, &realization.los, skip, params, draws);
    }

    let noise = noise_power(bandwidth, c).expect("validated bandwidth");
    let sinr = signal / (noise + interference);
    let snr = signal / noise;
    TrialResult {
        outcome: Some(*outcome),
        sinr,
        snr,
        rate: bandwidth * (1.0 + sinr).log2(),
        v0: realization.typical_offset_v0,
    }
}

fn sub6_interference<D: LinkDraws>(points: &[Point2D], skip: Option<usize>, params: &SystemParams, draws: &mut D) -> f64 {
    let c = &params.channel;
    let scale = params.p_1 * c.g_1;
    let mut sum = 0.0;
    for (i, p) in points.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        sum += draws.fading(LinkClass::Sub6) * path_loss_sq(c.c_1, c.alpha_1, p.norm_sq());
    }
    scale * sum
}

fn mm_interference<D: LinkDraws>(
    clusters: &[ClusterRealization],
    los: &[Vec<bool>],
    skip: Option<(usize, usize)>,
    params: &SystemParams,
    draws: &mut D,
) -> f64 {
    let c = &params.channel;
    let mut sum = 0.0;
    for (k, (cl, labels)) in clusters.iter().zip(los).enumerate() {
        for (j, (m, &is_los)) in cl.members.iter().zip(labels).enumerate() {
            if Some((k, j)) == skip {
                continue;
            }
            let class = if is_los { LinkClass::MmLos } else { LinkClass::MmNlos };
            let (ic, ia) = class_constants(class, c);
            let g = draws.interferer_gain();
            sum += g * draws.fading(class) * path_loss_sq(ic, ia, m.norm_sq());
        }
    }
    params.p_2 * sum
}

/// One complete trial.
pub fn run_trial<R: Rng + ?Sized>(params: &SystemParams, opts: &SimOptions, rng: &mut R) -> TrialResult {
    let eff = opts.scenario.effective_params(params);
    let world = sample_realization(params, opts.scenario, opts.window_radius, opts.v0, rng);
    let assoc = AssociationParams::from(&eff);
    match Candidates::of(&world).select(&assoc) {
        Some(outcome) => {
            let mut draws = RandomDraws::new(rng, &eff.channel);
            sinr_of_realization(&world, &outcome, &eff, opts.scenario.shared_band(), &mut draws)
        }
        None => TrialResult::outage(world.typical_offset_v0),
    }
}

/// `n_trials` i.i.d. trials on the default window.
pub fn run_trials(params: &SystemParams, scenario: ScenarioKind, n_trials: usize, seed: u64) -> Vec<TrialResult> {
    run_trials_with(params, &SimOptions::new(scenario, n_trials, seed))
}

/// Trials run in parallel; the output is in trial order.
pub fn run_trials_with(params: &SystemParams, opts: &SimOptions) -> Vec<TrialResult> {
    (0..opts.n_trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(opts.seed, i);
            run_trial(params, opts, &mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::noise_power;

    fn single_sub6(r: f64, extra: &[f64]) -> NetworkRealization {
        let mut pts = vec![Point2D::new(r, 0.0)];
        pts.extend(extra.iter().map(|&x| Point2D::new(0.0, x)));
        NetworkRealization {
            sub6_points: pts,
            clusters: vec![ClusterRealization {
                center: Point2D::ORIGIN,
                members: vec![],
            }],
            los: vec![vec![]],
            typical_offset_v0: 0.0,
            window_radius: 1e4,
        }
    }

    fn serve_sub6(w: &NetworkRealization, p: &SystemParams) -> TrialResult {
        let o = Candidates::of(w).select(&AssociationParams::from(p)).unwrap();
        let mut d = FixedDraws {
            fading: 1.0,
            interferer_gain: p.channel.g_main,
        };
        sinr_of_realization(w, &o, p, false, &mut d)
    }

    #[test]
    fn hand_computed_sinr() {
        let p = SystemParams::table_defaults();
        let t = serve_sub6(&single_sub6(100.0, &[]), &p);
        let noise = noise_power(p.channel.w_1, &p.channel).unwrap();
        let want = p.p_1 * p.channel.g_1 * p.channel.c_1 * 100f64.powi(-3) / noise;
        assert!(((t.sinr - want) / want).abs() < 1e-12);
        assert_eq!(t.sinr, t.snr);
        assert!((t.rate - p.channel.w_1 * (1.0 + want).log2()).abs() < 1e-6);
    }

    #[test]
    fn interferer_lowers_sinr() {
        let p = SystemParams::table_defaults();
        let a = serve_sub6(&single_sub6(100.0, &[]), &p);
        let b = serve_sub6(&single_sub6(100.0, &[400.0]), &p);
        assert!(b.sinr < a.sinr);
        assert_eq!(a.snr, b.snr);
    }

    #[test]
    fn deterministic_per_seed() {
        let p = SystemParams::table_defaults();
        let o = SimOptions::new(ScenarioKind::IntegratedA, 40, 7).window(3000.0);
        let a = run_trials_with(&p, &o);
        let b = run_trials_with(&p, &o);
        assert_eq!(a, b);
        let c = run_trials_with(&p, &SimOptions { seed: 8, ..o });
        assert_ne!(a, c);
        // a trial does not depend on how many others run
        let short = run_trials_with(&p, &SimOptions { n_trials: 10, ..o });
        assert_eq!(&a[..10], &short[..]);
    }

    #[test]
    fn no_small_cells_means_sub6_everywhere() {
        let mut p = SystemParams::table_defaults();
        p.deployment.n_bs = 0;
        let r = run_trials_with(&p, &SimOptions::new(ScenarioKind::IntegratedA, 200, 1).window(3000.0));
        assert!(r.iter().all(|t| t.tier() == Some(Tier::Sub6)));
    }

    #[test]
    fn sinr_never_exceeds_snr() {
        let p = SystemParams::table_defaults();
        for s in ScenarioKind::ALL {
            let r = run_trials_with(&p, &SimOptions::new(s, 100, 3).window(3000.0));
            for t in &r {
                assert!(t.sinr <= t.snr);
                if let Some(o) = t.outcome {
                    assert!(o.serving_distance > 0.0);
                }
            }
        }
    }

    #[test]
    fn typical_cluster_has_fixed_size() {
        let p = SystemParams::table_defaults();
        let mut rng = trial_rng(5, 0);
        for _ in 0..20 {
            let w = sample_realization(&p, ScenarioKind::IntegratedA, 4000.0, V0Sampling::Rayleigh, &mut rng);
            assert_eq!(w.clusters[0].members.len(), 10);
            assert_eq!(w.los.len(), w.clusters.len());
            assert!(w.sub6_points.iter().all(|q| q.norm() <= 4000.0));
            assert!(w.clusters[1..].iter().flat_map(|c| &c.members).all(|q| q.norm() <= 4000.0));
        }
    }

    #[test]
    fn scenario_d_links_are_all_los() {
        let p = SystemParams::table_defaults();
        let mut rng = trial_rng(6, 0);
        let w = sample_realization(&p, ScenarioKind::TwoTierSub6D, 3000.0, V0Sampling::Rayleigh, &mut rng);
        assert!(w.los.iter().flatten().all(|&l| l));
    }

    #[test]
    fn pinned_offset_is_used() {
        let p = SystemParams::table_defaults();
        let r = run_trials_with(&p, &SimOptions::new(ScenarioKind::IntegratedA, 5, 1).window(2000.0).pinned_v0(321.0));
        assert!(r.iter().all(|t| t.v0 == 321.0));
    }
}
