//! Seeded random instance generation.
//!
//! Links land in a square: the sender uniform, the direction uniform on the
//! circle, the length log-uniform in `[1, l_max)` so short links dominate,
//! and the weight log-uniform in `[1, 100)`. Receivers may fall outside the
//! square; only the link placement itself is constrained to it. Every trial
//! draws from its own stream derived from `(seed, trial)`, so any trial can
//! be regenerated bit-identically in isolation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use linksched_core::model::{Instance, Link, LinkId, Point};

/// Parameters of one generated instance family.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    /// Number of links.
    pub n: usize,
    /// Upper bound of the log-uniform length distribution; must exceed 1.
    pub l_max: f64,
    /// Side of the placement square.
    pub side: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// SIR threshold range `[lo, hi]`; equal endpoints pin it.
    pub beta_range: (f64, f64),
    /// Base seed; combined with the trial index per instance.
    pub seed: u64,
}

impl GenConfig {
    /// Fixed-threshold configuration over a 1000 x 1000 square.
    pub fn fixed_beta(n: usize, l_max: f64, alpha: f64, beta: f64, seed: u64) -> Self {
        GenConfig {
            n,
            l_max,
            side: 1000.0,
            alpha,
            beta_range: (beta, beta),
            seed,
        }
    }
}

fn stream(seed: u64, trial: u32) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..12].copy_from_slice(&trial.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Generate the instance of one trial. Deterministic in `(cfg, trial)`.
pub fn gen_random_instance(cfg: &GenConfig, trial: u32) -> Instance {
    assert!(cfg.l_max > 1.0, "l_max must exceed 1");
    let mut rng = stream(cfg.seed, trial);
    let ln_lmax = cfg.l_max.ln();
    let ln_wmax = 100.0f64.ln();
    let links: Vec<Link> = (0..cfg.n)
        .map(|i| {
            let sx = rng.random_range(0.0..cfg.side);
            let sy = rng.random_range(0.0..cfg.side);
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            let len = rng.random_range(0.0..ln_lmax).exp();
            let weight = rng.random_range(0.0..ln_wmax).exp();
            let beta = if cfg.beta_range.0 == cfg.beta_range.1 {
                cfg.beta_range.0
            } else {
                rng.random_range(cfg.beta_range.0..=cfg.beta_range.1)
            };
            Link::new(
                i as LinkId,
                Point::new(sx, sy),
                Point::new(sx + len * angle.cos(), sy + len * angle.sin()),
                beta,
                weight,
            )
            .expect("generated link parameters are valid")
        })
        .collect();
    Instance::new(cfg.alpha, links).expect("generated instance parameters are valid")
}
