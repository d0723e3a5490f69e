//! Monte-Carlo simulation of the cluster model behind the MGF.
//!
//! Each of the `μ` clusters contributes `X² + Y²` with
//! `X ~ N(√ξ·pᵢ, σ²ₓ)`, `Y ~ N(√ξ·qᵢ, σ²ᵧ)` and a common unit-mean
//! `ξ ~ Gamma(m, 1/m)` that makes the line-of-sight power fluctuate.
//!
//! Samples are drawn in fixed-size chunks. Chunk `k` uses its own ChaCha
//! stream (`seed`, stream `k`), and chunk statistics are merged in index
//! order, so an estimate depends only on `(seed, chunk_size, n_samples)` and
//! not on how chunks are scheduled.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::params::ChannelParams;

/// Default samples per chunk (2¹⁶).
pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;

/// Line-of-sight means and scatter variances of the clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterGeometry {
    pub p_components: Vec<f64>,
    pub q_components: Vec<f64>,
    pub sigma_x2: f64,
    pub sigma_y2: f64,
    /// Mean of `W = Σ (Xᵢ² + Yᵢ²)`.
    pub normalization: f64,
}

impl ClusterGeometry {
    pub fn clusters(&self) -> usize {
        self.p_components.len()
    }

    fn p2(&self) -> f64 {
        self.p_components.iter().map(|p| p * p).sum()
    }

    fn q2(&self) -> f64 {
        self.q_components.iter().map(|q| q * q).sum()
    }

    pub fn kappa(&self) -> f64 {
        (self.p2() + self.q2()) / (self.clusters() as f64 * (self.sigma_x2 + self.sigma_y2))
    }

    pub fn eta(&self) -> f64 {
        self.sigma_x2 / self.sigma_y2
    }

    /// `p²/q²`, or `None` when there is no quadrature LoS power.
    pub fn rho2(&self) -> Option<f64> {
        let q2 = self.q2();
        (q2 > 0.0).then(|| self.p2() / q2)
    }
}

fn cluster_count(mu: f64) -> Result<usize> {
    let r = libm::round(mu);
    if libm::fabs(mu - r) > 1e-9 * r.max(1.0) || r < 1.0 {
        return Err(Error::NonIntegerClusters(mu));
    }
    Ok(r as usize)
}

/// `σ²ᵧ = 1`, `σ²ₓ = η`, `q² = κμ(1+η)/(1+ϱ²)`, `p² = ϱ²q²`, LoS power split
/// evenly across clusters.
pub fn geometry_from_params(params: &ChannelParams) -> Result<ClusterGeometry> {
    params.validate()?;
    let n = cluster_count(params.mu)?;
    let mu = n as f64;
    let sigma_y2 = 1.0;
    let sigma_x2 = params.eta;
    let q2 = params.kappa * mu * (1.0 + params.eta) / (1.0 + params.rho2);
    let p2 = params.rho2 * q2;
    let per = libm::sqrt(mu);
    let p = libm::sqrt(p2) / per;
    let q = libm::sqrt(q2) / per;
    Ok(ClusterGeometry {
        p_components: alloc::vec![p; n],
        q_components: alloc::vec![q; n],
        sigma_x2,
        sigma_y2,
        normalization: (1.0 + params.kappa) * mu * (sigma_x2 + sigma_y2),
    })
}

/// Draws instantaneous SNR values for one channel.
#[derive(Debug, Clone)]
pub struct SnrSampler {
    geometry: ClusterGeometry,
    sigma_x: f64,
    sigma_y: f64,
    scale: f64,
    /// `None` for `m = ∞` (no fluctuation).
    shadowing: Option<Gamma<f64>>,
}

impl SnrSampler {
    pub fn new(params: &ChannelParams) -> Result<Self> {
        let geometry = geometry_from_params(params)?;
        let shadowing = if params.m.is_infinite() {
            None
        } else {
            Some(
                Gamma::new(params.m, 1.0 / params.m)
                    .map_err(|_| Error::InvalidArgument("invalid shadowing shape"))?,
            )
        };
        Ok(Self {
            sigma_x: libm::sqrt(geometry.sigma_x2),
            sigma_y: libm::sqrt(geometry.sigma_y2),
            scale: params.gamma_bar / geometry.normalization,
            geometry,
            shadowing,
        })
    }

    pub fn geometry(&self) -> &ClusterGeometry {
        &self.geometry
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let amp = match &self.shadowing {
            Some(g) => libm::sqrt(g.sample(rng)),
            None => 1.0,
        };
        let mut w = 0.0;
        for (p, q) in self
            .geometry
            .p_components
            .iter()
            .zip(&self.geometry.q_components)
        {
            let nx: f64 = StandardNormal.sample(rng);
            let ny: f64 = StandardNormal.sample(rng);
            let x = amp * p + self.sigma_x * nx;
            let y = amp * q + self.sigma_y * ny;
            w += x * x + y * y;
        }
        self.scale * w
    }
}

/// One SNR draw; see [`SnrSampler`] for repeated sampling.
pub fn sample_snr<R: Rng + ?Sized>(params: &ChannelParams, rng: &mut R) -> Result<f64> {
    Ok(SnrSampler::new(params)?.sample(rng))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub chunk_size: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_samples: 1_000_000,
            seed: 42,
            chunk_size: DEFAULT_CHUNK_SIZE,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::InvalidArgument(
                "Monte-Carlo needs at least two samples",
            ));
        }
        if self.chunk_size == 0 {
            return Err(Error::InvalidArgument("chunk size must be positive"));
        }
        Ok(())
    }

    /// `(chunk index, samples in chunk)` for every chunk.
    pub fn chunks(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        let full = self.n_samples / self.chunk_size;
        let rest = self.n_samples % self.chunk_size;
        (0..full)
            .map(move |k| (k, self.chunk_size))
            .chain((rest > 0).then_some((full, rest)))
    }

    /// Below this the estimate is flagged as unreliable.
    pub fn is_small(&self) -> bool {
        self.n_samples < 1_000
    }
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChunkStats {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl ChunkStats {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Pairwise merge; applied in chunk order it is deterministic.
    pub fn merge(self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let (na, nb, nf) = (self.count as f64, other.count as f64, n as f64);
        Self {
            count: n,
            mean: self.mean + delta * nb / nf,
            m2: self.m2 + other.m2 + delta * delta * na * nb / nf,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        libm::sqrt(self.variance() / self.count as f64)
    }
}

/// Statistics of `f(γ)` over one chunk.
pub fn run_chunk<F: Fn(f64) -> f64>(
    sampler: &SnrSampler,
    seed: u64,
    chunk_index: u64,
    len: u64,
    f: &F,
) -> ChunkStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk_index);
    let mut stats = ChunkStats::default();
    for _ in 0..len {
        stats.push(f(sampler.sample(&mut rng)));
    }
    stats
}

/// Mean and standard error of `f(γ)`, chunks run sequentially.
pub fn estimate_mean<F: Fn(f64) -> f64>(
    params: &ChannelParams,
    config: &McConfig,
    f: F,
) -> Result<ChunkStats> {
    config.validate()?;
    let sampler = SnrSampler::new(params)?;
    Ok(config
        .chunks()
        .map(|(k, len)| run_chunk(&sampler, config.seed, k, len, &f))
        .fold(ChunkStats::default(), ChunkStats::merge))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub j_hat: f64,
    pub j_stderr: f64,
    pub rate_hat: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_stats(stats: ChunkStats, a: f64, seed: u64) -> Self {
        Self {
            j_hat: stats.mean,
            j_stderr: stats.std_error(),
            rate_hat: -libm::log2(stats.mean) / a,
            n_samples: stats.count,
            seed,
        }
    }
}

/// Rejects `A` that is not finite and positive.
pub fn check_exponent(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "delay exponent A must be finite and positive",
        ))
    }
}

/// `(1+γ)^{−A}`, the quantity averaged by [`estimate_er`].
pub fn discount(gamma: f64, a: f64) -> f64 {
    libm::pow(1.0 + gamma, -a)
}

/// Estimates `𝒥 = E[(1+γ)^{−A}]` and the effective rate.
pub fn estimate_er(params: &ChannelParams, a: f64, config: &McConfig) -> Result<McEstimate> {
    check_exponent(a)?;
    let stats = estimate_mean(params, config, |g| discount(g, a))?;
    Ok(McEstimate::from_stats(stats, a, config.seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rayleigh_geometry() {
        let g = geometry_from_params(&ChannelParams::new(1.0, 1.0, 0.0, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(g.p_components, [0.0]);
        assert_eq!(g.q_components, [0.0]);
        assert_eq!((g.sigma_x2, g.sigma_y2, g.normalization), (1.0, 1.0, 2.0));
    }

    #[test]
    fn reference_geometry_round_trip() {
        let p = ChannelParams::new(2.0, 1.0, 1.0, 0.1, 0.1, 1.0);
        let g = geometry_from_params(&p).unwrap();
        let q2: f64 = g.q_components.iter().map(|q| q * q).sum();
        let p2: f64 = g.p_components.iter().map(|p| p * p).sum();
        assert!((q2 - 2.0).abs() < 1e-14);
        assert!((p2 - 0.2).abs() < 1e-14);
        assert!((g.normalization - 4.4).abs() < 1e-14);
        assert!((g.kappa() - 1.0).abs() < 1e-12);
        assert!((g.eta() - 0.1).abs() < 1e-12);
        assert!((g.rho2().unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn symmetric_los_geometry() {
        let g = geometry_from_params(&ChannelParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)).unwrap();
        assert!((g.p_components[0] - 1.0).abs() < 1e-15);
        assert!((g.q_components[0] - 1.0).abs() < 1e-15);
        assert_eq!(g.normalization, 4.0);
    }

    #[test]
    fn rejects_fractional_clusters_and_bad_exponent() {
        let p = ChannelParams::new(1.5, 1.0, 1.0, 0.1, 0.1, 1.0);
        assert_eq!(
            geometry_from_params(&p),
            Err(Error::NonIntegerClusters(1.5))
        );
        let p = ChannelParams::new(1.0, 1.0, 0.0, 1.0, 1.0, 1.0);
        assert!(estimate_er(&p, 0.0, &McConfig::default()).is_err());
    }

    #[test]
    fn chunk_layout_covers_all_samples() {
        let c = McConfig {
            n_samples: 10,
            seed: 1,
            chunk_size: 4,
        };
        let v: Vec<_> = c.chunks().collect();
        assert_eq!(v, [(0, 4), (1, 4), (2, 2)]);
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs = [0.3, 1.2, -0.7, 2.2, 0.0, 5.5, 1.1];
        let mut all = ChunkStats::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut a = ChunkStats::default();
        let mut b = ChunkStats::default();
        xs[..3].iter().for_each(|&x| a.push(x));
        xs[3..].iter().for_each(|&x| b.push(x));
        let m = a.merge(b);
        assert_eq!(m.count, all.count);
        assert!((m.mean - all.mean).abs() < 1e-15);
        assert!((m.m2 - all.m2).abs() < 1e-13);
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let p = ChannelParams::new(2.0, 0.5, 1.0, 0.1, 0.1, 1.0);
        let c = McConfig {
            n_samples: 5_000,
            seed: 9,
            chunk_size: 1_000,
        };
        let a = estimate_er(&p, 2.0, &c).unwrap();
        let b = estimate_er(&p, 2.0, &c).unwrap();
        assert_eq!(a, b);
        let other = estimate_er(&p, 2.0, &McConfig { seed: 10, ..c }).unwrap();
        assert_ne!(a.j_hat, other.j_hat);
    }

    #[test]
    fn rayleigh_mean_is_gamma_bar() {
        let p = ChannelParams::new(1.0, f64::INFINITY, 0.0, 1.0, 1.0, 2.0);
        let c = McConfig {
            n_samples: 200_000,
            ..Default::default()
        };
        let s = estimate_mean(&p, &c, |g| g).unwrap();
        assert!((s.mean - 2.0).abs() < 4.0 * s.std_error());
    }
}
