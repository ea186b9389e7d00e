//! Analytic quantities against independent sampling oracles. Every sampler
//! here is written from the model definition with plain rand/rand_distr
//! draws, so it shares no code with the quadrature under test.

use std::f64::consts::PI;

use hetcov::analytic::{AnalyticModel, AnalyticOptions, InterClusterCount, IntraClusterModel};
use hetcov::association::{AssociationParams, Candidates};
use hetcov::geometry::Point2D;
use hetcov::montecarlo::{
    estimate_coverage, mean_rate, run_trials_with, sample_realization, trial_rng, SimOptions, V0Sampling,
};
use hetcov::quadrature::{integrate_adaptive, integrate_power_tail, QuadSpec};
use hetcov::{ScenarioKind, SystemParams, Tier};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson, StandardNormal};

/// Two-sided Kolmogorov statistic √n·D at significance 0.01.
const KS_CRITICAL_001: f64 = 1.628;

fn rng(seed: u64) -> ChaCha8Rng {
    trial_rng(0x0b5e_55ed, seed)
}

/// √n·D for a possibly defective law: infinite samples form an atom at
/// infinity, compared against the finite mass cdf(f64::MAX).
fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        if !x.is_finite() {
            d = d.max((cdf(f64::MAX) - i as f64 / n).abs());
            break;
        }
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    d * n.sqrt()
}

/// Tabulated CDF from a density on [0, hi] by the trapezoid rule.
fn tabulate_cdf(pdf: impl Fn(f64) -> f64, hi: f64, n: usize) -> impl Fn(f64) -> f64 {
    let h = hi / n as f64;
    let vals: Vec<f64> = (0..=n).map(|i| pdf(i as f64 * h)).collect();
    let mut cum = vec![0.0; n + 1];
    for i in 0..n {
        cum[i + 1] = cum[i] + 0.5 * h * (vals[i] + vals[i + 1]);
    }
    move |x: f64| {
        if x >= hi {
            return cum[n];
        }
        let t = x / h;
        let i = (t as usize).min(n - 1);
        cum[i] + (t - i as f64) * (cum[i + 1] - cum[i])
    }
}

fn mean_and_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

struct MemberDraw {
    r: f64,
    los: bool,
}

/// One Gaussian(σ) daughter of a center at `c`, with its blockage state.
fn draw_member<R: Rng>(c: (f64, f64), sigma: f64, p: &SystemParams, rng: &mut R) -> MemberDraw {
    let dx: f64 = rng.sample(StandardNormal);
    let dy: f64 = rng.sample(StandardNormal);
    let r = (c.0 + sigma * dx).hypot(c.1 + sigma * dy);
    let p_los = if r < p.channel.r_los_ball { p.channel.p_los } else { 0.0 };
    MemberDraw { r, los: rng.random::<f64>() < p_los }
}

/// Received power of one mmWave interferer with random lobe and fading.
fn mm_power<R: Rng>(m: &MemberDraw, p: &SystemParams, rng: &mut R) -> f64 {
    let c = &p.channel;
    let gain = if rng.random::<f64>() < c.theta_b / (2.0 * PI) { c.g_main } else { c.g_side };
    let (ci, ai, ni) = if m.los { (c.c_los, c.alpha_los, c.n_los) } else { (c.c_nlos, c.alpha_nlos, c.n_nlos) };
    let h: f64 = Gamma::new(ni as f64, 1.0 / ni as f64).unwrap().sample(rng);
    p.p_2 * gain * h * ci * m.r.max(1.0).powf(-ai)
}

#[test]
fn nearest_los_member_distance_matches_sampler() {
    let mut p = SystemParams::table_defaults();
    p.deployment.n_bs = 10;
    let (v0, sigma) = (150.0, 100.0);
    let m = AnalyticModel::with_defaults(&p, ScenarioKind::IntegratedA).unwrap();
    let mut r = rng(1);
    let mut samples: Vec<f64> = (0..20_000)
        .map(|_| {
            (0..10)
                .map(|_| draw_member((v0, 0.0), sigma, &p, &mut r))
                .filter(|d| d.los)
                .map(|d| d.r)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    // no LoS member at all is the atom at infinity
    let ks = ks_statistic(&mut samples, |x| m.serving_distance_laws(x.min(1e7), v0).cdf_r2);
    assert!(ks < KS_CRITICAL_001, "√n·D = {ks}");
}

fn association_only(p: &SystemParams, v0: f64, n: usize, seed: u64) -> Vec<(Tier, f64)> {
    let ap = AssociationParams::from(p);
    (0..n)
        .map(|i| {
            let mut r = trial_rng(seed, i as u64);
            // the nearest Sub-6GHz BS lies within 2 km with probability 1 − e^{−377}
            let w = sample_realization(p, ScenarioKind::IntegratedA, 2_000.0, V0Sampling::Fixed(v0), &mut r);
            let o = Candidates::of(&w).select(&ap).unwrap();
            (o.tier, o.serving_distance)
        })
        .collect()
}

#[test]
fn conditional_association_matches_pinned_sampler() {
    let p = SystemParams::table_defaults();
    let m = AnalyticModel::with_defaults(&p, ScenarioKind::IntegratedA).unwrap();
    for (v0, seed) in [(0.0, 2), (300.0, 3)] {
        let n = 20_000;
        let mm = association_only(&p, v0, n, seed).iter().filter(|t| t.0 == Tier::MmWave).count();
        let emp = mm as f64 / n as f64;
        let an = m.conditional_assoc_prob(Tier::MmWave, v0).value;
        assert!((emp - an).abs() < 0.01, "v0={v0}: sampler {emp} analytic {an}");
    }
}

#[test]
fn serving_distance_density_matches_sampler() {
    let p = SystemParams::table_defaults();
    let m = AnalyticModel::with_defaults(&p, ScenarioKind::IntegratedA).unwrap();
    let v0 = 150.0;
    let draws = association_only(&p, v0, 12_000, 4);
    for (tier, hi) in [(Tier::Sub6, 700.0), (Tier::MmWave, 250.0)] {
        let mut xs: Vec<f64> = draws.iter().filter(|d| d.0 == tier).map(|d| d.1).collect();
        assert!(xs.len() > 3_000);
        let cdf = tabulate_cdf(|x| m.conditional_distance_pdf(tier, x, v0).unwrap(), hi, 4_000);
        let ks = ks_statistic(&mut xs, cdf);
        assert!(ks < KS_CRITICAL_001, "{tier:?}: √n·D = {ks}");
    }
}

#[test]
fn sub6_laplace_matches_empirical_transform() {
    let p = SystemParams::table_defaults();
    let m = AnalyticModel::with_defaults(&p, ScenarioKind::IntegratedA).unwrap();
    let c = &p.channel;
    let lambda = p.deployment.lambda_1;
    let b1 = p.p_1 * c.g_1 * c.c_1;
    let outer = 2_000.0;
    let mut r = rng(5);
    for (x, tau) in [(40.0f64, 1.0), (100.0, 0.3), (100.0, 3.0)] {
        let s = tau * x.powf(c.alpha_1) / b1;
        // PPP independence over disjoint regions: beyond `outer` the
        // transform factorizes and is evaluated by quadrature
        let tail = integrate_power_tail(
            |t| {
                let q = s * b1 * t.powf(-c.alpha_1);
                q / (1.0 + q) * t
            },
            outer,
            &QuadSpec::new(1e-10, 1e-14),
        )
        .value;
        let tail_factor = (-2.0 * PI * lambda * tail).exp();
        let area = PI * (outer * outer - x * x);
        let poisson = Poisson::new(lambda * area).unwrap();
        let vals: Vec<f64> = (0..20_000)
            .map(|_| {
                let k: f64 = poisson.sample(&mut r);
                let i: f64 = (0..k as usize)
                    .map(|_| {
                        let u: f64 = r.random();
                        let d = (x * x + u * (outer * outer - x * x)).sqrt();
                        let h: f64 = Exp1.sample(&mut r);
                        b1 * h * d.powf(-c.alpha_1)
                    })
                    .sum();
                (-s * i).exp() * tail_factor
            })
            .collect();
        let (emp, se) = mean_and_stderr(&vals);
        let an = m.laplace_i1(s, x);
        assert!((emp - an).abs() <= 2.0 * se + 1e-6, "x={x} τ={tau}: empirical {emp}±{se} analytic {an}");
    }
}

fn intra_empirical(p: &SystemParams, v0: f64, x: f64, s: f64, n: usize, seed: u64) -> (f64, f64) {
    let sigma = p.deployment.sigma_bs;
    let others = p.deployment.n_bs as usize - 1;
    let mut r = rng(seed);
    let vals: Vec<f64> = (0..n)
        .map(|_| {
            let mut i = 0.0;
            for _ in 0..others {
                // the others are i.i.d. given that none is a closer LoS BS
                let d = loop {
                    let d = draw_member((v0, 0.0), sigma, p, &mut r);
                    if !(d.los && d.r < x) {
                        break d;
                    }
                };
                i += mm_power(&d, p, &mut r);
            }
            (-s * i).exp()
        })
        .collect();
    mean_and_stderr(&vals)
}

#[test]
fn intra_cluster_laplace_matches_empirical_transform() {
    let p = SystemParams::table_defaults();
    let m = AnalyticModel::with_defaults(&p, ScenarioKind::IntegratedA).unwrap();
    let literal = {
        let mut o = AnalyticOptions::default();
        o.intra_model = IntraClusterModel::Literal;
        AnalyticModel::new(&p, ScenarioKind::IntegratedA, o).unwrap()
    };
    let c = &p.channel;
    let b2 = p.p_2 * c.g_main * c.c_los;
    for (i, (v0, x, tau)) in [(150.0, 60.0f64, 1.0), (0.0, 30.0, 10.0), (300.0, 120.0, 1.0)].into_iter().enumerate() {
        let s = tau * x.powf(c.alpha_los) / b2;
        let (emp, se) = intra_empirical(&p, v0, x, s, 20_000, 10 + i as u64);
        let an = m.laplace_i2_intra(s, v0, x, p.deployment.n_bs);
        assert!((emp - an).abs() <= 2.0 * se + 1e-5, "v0={v0} x={x}: empirical {emp}±{se} analytic {an}");
        // the printed 2π·r-weighted intensity is far off
        let lit = literal.laplace_i2_intra(s, v0, x, p.deployment.n_bs);
        assert!((emp - lit).abs() > 10.0 * se, "literal {lit} vs {emp}");
    }
}

#[test]
fn inter_cluster_laplace_matches_empirical_transform() {
    let p = SystemParams::table_defaults();
    let m = AnalyticModel::with_defaults(&p, ScenarioKind::IntegratedA).unwrap();
    let one_less = {
        let mut o = AnalyticOptions::default();
        o.inter_count = InterClusterCount::NBs;
        AnalyticModel::new(&p, ScenarioKind::IntegratedA, o).unwrap()
    };
    let d = &p.deployment;
    let c = &p.channel;
    let b2 = p.p_2 * c.g_main * c.c_los;
    // clusters beyond 3 km change the exponent by less than 1e-5
    let outer = 3_000.0;
    let centers = Poisson::new(d.lambda_p * PI * outer * outer).unwrap();
    let members = Poisson::new(d.n_bs as f64).unwrap();
    let mut r = rng(20);
    for (x, tau) in [(60.0f64, 1.0), (30.0, 10.0), (100.0, 30.0)] {
        let s = tau * x.powf(c.alpha_los) / b2;
        let vals: Vec<f64> = (0..20_000)
            .map(|_| {
                let k: f64 = centers.sample(&mut r);
                let mut i = 0.0;
                for _ in 0..k as usize {
                    let rad = outer * r.random::<f64>().sqrt();
                    let ang = 2.0 * PI * r.random::<f64>();
                    let ctr = Point2D::polar(rad, ang);
                    let nm: f64 = members.sample(&mut r);
                    for _ in 0..nm as usize {
                        let dm = draw_member((ctr.x, ctr.y), d.sigma_bs, &p, &mut r);
                        i += mm_power(&dm, &p, &mut r);
                    }
                }
                (-s * i).exp()
            })
            .collect();
        let (emp, se) = mean_and_stderr(&vals);
        let an = m.laplace_i2_inter(s);
        assert!((emp - an).abs() <= 2.0 * se + 1e-5, "τ={tau}: empirical {emp}±{se} analytic {an}");
        let alt = one_less.laplace_i2_inter(s);
        assert!((emp - alt).abs() > (emp - an).abs(), "n_BS − 1 count {alt} fits {emp} better than {an}");
    }
}

#[test]
fn conditional_coverage_matches_pinned_simulation() {
    let p = SystemParams::table_defaults();
    let m = AnalyticModel::new(&p, ScenarioKind::IntegratedA, AnalyticOptions::fast()).unwrap();
    let v0 = 150.0;
    let grid = [-5.0, 0.0, 5.0, 10.0];
    let runs = run_trials_with(&p, &SimOptions::new(ScenarioKind::IntegratedA, 10_000, 30).window(10_000.0).pinned_v0(v0));
    let mc = estimate_coverage(&runs, &grid).unwrap();
    let (s6, mm) = (mc.sub6.unwrap(), mc.mmwave.unwrap());
    for (i, db) in grid.iter().enumerate() {
        let tau = 10f64.powf(db / 10.0);
        if *db <= 5.0 {
            let an = m.coverage_cond_sub6(tau, v0).unwrap().value;
            assert!((an - s6.probabilities[i]).abs() < 0.02, "Sub6 {db} dB: {an} vs {}", s6.probabilities[i]);
        }
        if *db >= 0.0 {
            let an = m.coverage_cond_mm(tau, v0).unwrap().value;
            assert!((an - mm.probabilities[i]).abs() < 0.03, "mm {db} dB: {an} vs {}", mm.probabilities[i]);
        }
    }
}

#[test]
fn sub6_only_rate_matches_simulation() {
    let mut p = SystemParams::table_defaults();
    p.deployment.n_bs = 0;
    p.deployment.lambda_p = 0.0;
    let m = AnalyticModel::new(&p, ScenarioKind::IntegratedA, AnalyticOptions::fast()).unwrap();
    let an = m.avg_rate().value;
    let runs = run_trials_with(&p, &SimOptions::new(ScenarioKind::IntegratedA, 6_000, 40).window(10_000.0));
    let mc = mean_rate(&runs).unwrap();
    assert!(runs.iter().all(|t| t.tier() == Some(Tier::Sub6)));
    assert!((an - mc.value).abs() / mc.value < 0.05, "analytic {an} vs MC {}±{}", mc.value, mc.stderr);
}

#[test]
fn sub6_only_coverage_is_classic_ppp_form() {
    // noise-free single-tier PPP with Rayleigh fading: C(τ) = 1/(1 + 2ρ(τ)),
    // ρ(τ) = ∫₁^∞ u/(1 + u^α/τ) du
    let mut p = SystemParams::table_defaults();
    p.deployment.n_bs = 0;
    p.deployment.lambda_p = 0.0;
    p.p_1 = 1e9;
    let m = AnalyticModel::with_defaults(&p, ScenarioKind::IntegratedA).unwrap();
    for tau in [0.1, 1.0, 10.0] {
        let rho = integrate_adaptive(|u| u / (1.0 + u.powi(3) / tau), 1.0, 1e3, &QuadSpec::new(1e-12, 1e-15)).value
            + integrate_power_tail(|u| u / (1.0 + u.powi(3) / tau), 1e3, &QuadSpec::new(1e-12, 1e-15)).value;
        let want = 1.0 / (1.0 + 2.0 * rho);
        let got = m.coverage(tau).value;
        assert!((got - want).abs() < 1e-4, "τ={tau}: {got} vs {want}");
    }
}
