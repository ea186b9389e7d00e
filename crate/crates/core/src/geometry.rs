//! Spatial point processes: homogeneous PPP on a disk, Thomas clusters,
//! the Rayleigh offset of a clustered UE, and the Rician law of the
//! distance from the UE to a member of its cluster.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::Serialize;

use crate::special::bessel_i0e;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("density must be finite and >= 0, got {0}")]
    BadDensity(f64),
    #[error("window radius must be finite and > 0, got {0}")]
    BadWindow(f64),
    #[error("standard deviation must be finite and > 0, got {0}")]
    BadSigma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point2D { x, y }
    }

    pub fn polar(r: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Point2D { x: r * c, y: r * s }
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn angle(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn offset(&self, dx: f64, dy: f64) -> Self {
        Point2D {
            x: self.x + dx,
            y: self.y + dy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterRealization {
    pub center: Point2D,
    pub members: Vec<Point2D>,
}

/// One sampled world around the typical UE, which sits at the origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkRealization {
    pub sub6_points: Vec<Point2D>,
    /// Cluster 0 is the typical UE's own hotspot.
    pub clusters: Vec<ClusterRealization>,
    /// LoS labels, parallel to `clusters[i].members`.
    pub los: Vec<Vec<bool>>,
    /// Distance from the typical UE to its hotspot center.
    pub typical_offset_v0: f64,
    pub window_radius: f64,
}

impl NetworkRealization {
    pub fn typical_cluster(&self) -> Option<&ClusterRealization> {
        self.clusters.first()
    }

    pub fn mm_count(&self) -> usize {
        self.clusters.iter().map(|c| c.members.len()).sum()
    }
}

fn check_sigma(sigma: f64) -> Result<(), GeometryError> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(GeometryError::BadSigma(sigma))
    }
}

/// Homogeneous PPP of the given density (per m²) on the disk of radius
/// `window_radius` centered at the origin.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, window_radius: f64, rng: &mut R) -> Result<Vec<Point2D>, GeometryError> {
    if !(density.is_finite() && density >= 0.0) {
        return Err(GeometryError::BadDensity(density));
    }
    if !(window_radius.is_finite() && window_radius > 0.0) {
        return Err(GeometryError::BadWindow(window_radius));
    }
    let mean = density * PI * window_radius * window_radius;
    let count = poisson_count(mean, rng);
    let mut pts = Vec::with_capacity(count);
    let r2 = window_radius * window_radius;
    while pts.len() < count {
        // rejection from the bounding square is cheaper than polar sampling
        let x = window_radius * (2.0 * rng.random::<f64>() - 1.0);
        let y = window_radius * (2.0 * rng.random::<f64>() - 1.0);
        if x * x + y * y <= r2 {
            pts.push(Point2D { x, y });
        }
    }
    Ok(pts)
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("finite positive Poisson mean");
    let n: f64 = dist.sample(rng);
    n as usize
}

/// `count` daughters with i.i.d. N(0, σ²) offsets per axis from `center`.
pub fn sample_thomas_cluster<R: Rng + ?Sized>(
    center: Point2D,
    sigma: f64,
    count: usize,
    rng: &mut R,
) -> Result<ClusterRealization, GeometryError> {
    check_sigma(sigma)?;
    let members = (0..count)
        .map(|_| {
            let dx: f64 = rng.sample(StandardNormal);
            let dy: f64 = rng.sample(StandardNormal);
            center.offset(sigma * dx, sigma * dy)
        })
        .collect();
    Ok(ClusterRealization { center, members })
}

/// Distance from a clustered UE to its hotspot center: Rayleigh(σ_UE),
/// density (v/σ²)·exp(−v²/2σ²).
pub fn sample_typical_offset<R: Rng + ?Sized>(sigma_ue: f64, rng: &mut R) -> Result<f64, GeometryError> {
    check_sigma(sigma_ue)?;
    let u: f64 = rng.random();
    // 1 - u lies in (0, 1]
    Ok(sigma_ue * (-2.0 * (1.0 - u).ln()).sqrt())
}

/// Density of the distance from the origin to a Gaussian(σ) daughter of a
/// center at distance `v0`:
/// (r/2πσ²)·exp(−(r²+v0²)/2σ²)·J(v0·r/σ²) with J(t) = 2π·I₀(t).
///
/// Evaluated in the scaled form (r/σ²)·exp(−(r−v0)²/2σ²)·e^{−t}I₀(t), which
/// cannot overflow.
pub fn rician_distance_density(r: f64, v0: f64, sigma: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let s2 = sigma * sigma;
    let d = r - v0;
    r / s2 * (-0.5 * d * d / s2).exp() * bessel_i0e(v0 * r / s2)
}
