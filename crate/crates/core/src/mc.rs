//! Finite-N Monte Carlo: independent plaquette matrices in SO(N) drawn from
//! the density ∝ exp(Nβ Tr Q), used to estimate Wilson loops through their
//! gauge words and to look at the eigenvalue angle distribution.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::hash::Hash;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::freeprob::FreeWord;
use crate::gauge::loop_to_word;
use crate::lattice::Loop;

pub type OrthMatrix = DMatrix<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct McConfig {
    pub n: usize,
    pub beta: f64,
    pub burn_in: usize,
    pub thin: usize,
    pub samples: usize,
    pub proposal_scale: f64,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { n: 40, beta: 0.1, burn_in: 5000, thin: 20, samples: 1000, proposal_scale: 0.1, seed: 1 }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Invalid(format!("matrix size must be at least 2, got {}", self.n)));
        }
        if self.thin == 0 || self.samples < 2 || !(self.proposal_scale > 0.0) || !self.beta.is_finite() {
            return Err(Error::Invalid("thin, samples and proposal scale must be positive".into()));
        }
        Ok(())
    }
}

/// Mean with a batch-means standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_eff: f64,
}

impl Estimate {
    pub fn from_series(xs: &[f64]) -> Estimate {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n.max(2) - 1) as f64;
        let batches = ((n as f64).sqrt() as usize).clamp(2, 50).min(n);
        let size = n / batches;
        let means: Vec<f64> = (0..batches).map(|b| xs[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64).collect();
        let bm = means.iter().sum::<f64>() / batches as f64;
        let bvar = means.iter().map(|m| (m - bm).powi(2)).sum::<f64>() / (batches - 1) as f64;
        let stderr = (bvar / batches as f64).sqrt().max(f64::MIN_POSITIVE);
        let n_eff = if var > 0.0 { (var / (stderr * stderr)).min(n as f64) } else { n as f64 };
        Estimate { mean, stderr, n_eff }
    }

    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target) / self.stderr
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal))
}

/// Haar random element of SO(N): QR of a Gaussian matrix with the signs of
/// R's diagonal moved into Q, then one column flipped if det = −1.
pub fn haar_sample<R: Rng>(n: usize, rng: &mut R) -> Result<OrthMatrix> {
    if n < 2 {
        return Err(Error::Invalid(format!("matrix size must be at least 2, got {n}")));
    }
    let qr = gaussian_matrix(n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    Ok(q)
}

pub fn haar_sample_seeded(n: usize, seed: u64) -> Result<OrthMatrix> {
    haar_sample(n, &mut rng_from_seed(seed))
}

/// Nearest orthogonal matrix.
pub fn reproject(q: &OrthMatrix) -> OrthMatrix {
    let svd = q.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v requested");
    u * vt
}

pub fn orthogonality_defect(q: &OrthMatrix) -> f64 {
    let n = q.nrows();
    (q.transpose() * q - DMatrix::<f64>::identity(n, n)).amax()
}

const PROJECT_EVERY: usize = 1000;
const TUNE_WINDOW: usize = 100;

/// Metropolis chain for one plaquette matrix.
pub struct PlaquetteChain {
    cfg: McConfig,
    q: OrthMatrix,
    trace: f64,
    rng: ChaCha8Rng,
    eps: f64,
    proposed: u64,
    accepted: u64,
    since_projection: usize,
}

impl PlaquetteChain {
    /// Start from a Haar draw and run the burn-in, tuning the proposal scale.
    pub fn new(cfg: &McConfig, seed: u64) -> Result<PlaquetteChain> {
        cfg.validate()?;
        let mut rng = rng_from_seed(seed);
        let q = haar_sample(cfg.n, &mut rng)?;
        let mut c = PlaquetteChain {
            cfg: cfg.clone(),
            trace: q.trace(),
            q,
            rng,
            eps: cfg.proposal_scale,
            proposed: 0,
            accepted: 0,
            since_projection: 0,
        };
        let mut window = 0u64;
        for i in 1..=cfg.burn_in {
            window += c.step() as u64;
            if i % TUNE_WINDOW == 0 {
                let rate = window as f64 / TUNE_WINDOW as f64;
                if rate < 0.3 {
                    c.eps *= 0.8;
                } else if rate > 0.5 {
                    c.eps = (c.eps * 1.25).min(PI);
                }
                window = 0;
            }
        }
        c.proposed = 0;
        c.accepted = 0;
        Ok(c)
    }

    fn step(&mut self) -> bool {
        let n = self.cfg.n;
        let g = gaussian_matrix(n, &mut self.rng);
        let a = (&g - g.transpose()) * (self.eps / (2.0 * n as f64).sqrt());
        let qn = a.exp() * &self.q;
        let tn = qn.trace();
        let log_ratio = n as f64 * self.cfg.beta * (tn - self.trace);
        self.proposed += 1;
        let accept = log_ratio >= 0.0 || self.rng.gen::<f64>() < log_ratio.exp();
        if accept {
            self.q = qn;
            self.trace = tn;
            self.accepted += 1;
        }
        self.since_projection += 1;
        if self.since_projection >= PROJECT_EVERY {
            self.q = reproject(&self.q);
            self.trace = self.q.trace();
            self.since_projection = 0;
        }
        accept
    }

    /// Advance by `thin` steps and return the current matrix.
    pub fn draw(&mut self) -> &OrthMatrix {
        for _ in 0..self.cfg.thin {
            self.step();
        }
        &self.q
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            return f64::NAN;
        }
        self.accepted as f64 / self.proposed as f64
    }

    pub fn proposal_scale(&self) -> f64 {
        self.eps
    }

    /// At β = 0 every proposal is accepted by construction, so only β ≠ 0
    /// chains can be miscalibrated.
    pub fn check_calibration(&self) -> Result<()> {
        let r = self.acceptance_rate();
        if self.cfg.beta != 0.0 && !(0.01..=0.99).contains(&r) {
            return Err(Error::Calibration(format!("acceptance rate {r:.4} with proposal scale {:.3e}", self.eps)));
        }
        Ok(())
    }
}

fn chain_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `cfg.samples` thinned draws from one chain.
pub fn plaquette_samples(cfg: &McConfig) -> Result<Vec<OrthMatrix>> {
    let mut c = PlaquetteChain::new(cfg, chain_seed(cfg.seed, 0))?;
    let out = (0..cfg.samples).map(|_| c.draw().clone()).collect();
    c.check_calibration()?;
    Ok(out)
}

/// (1/N) Tr of the word with each generator replaced by its matrix.
pub fn word_trace<G: Clone + Eq + Hash>(w: &FreeWord<G>, mats: &HashMap<G, OrthMatrix>) -> f64 {
    let n = mats.values().next().map(|m| m.nrows()).unwrap_or(1);
    let mut acc = DMatrix::<f64>::identity(n, n);
    for (g, e) in w.letters() {
        let m = &mats[g];
        let m = if *e < 0 { m.transpose() } else { m.clone() };
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &m;
        }
    }
    acc.trace() / n as f64
}

/// Estimate φ of a word by running one chain per distinct generator in
/// lockstep. `transform` is applied to every draw before use.
pub fn estimate_word_with<G, F>(w: &FreeWord<G>, cfg: &McConfig, mut transform: F) -> Result<Estimate>
where
    G: Clone + Eq + Hash + Ord,
    F: FnMut(&OrthMatrix) -> OrthMatrix,
{
    cfg.validate()?;
    let mut gens: Vec<G> = w.letters().iter().map(|(g, _)| g.clone()).collect();
    gens.sort();
    gens.dedup();
    if gens.is_empty() {
        return Ok(Estimate { mean: 1.0, stderr: f64::MIN_POSITIVE, n_eff: cfg.samples as f64 });
    }
    let mut chains = gens
        .iter()
        .enumerate()
        .map(|(i, _)| PlaquetteChain::new(cfg, chain_seed(cfg.seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let mut series = Vec::with_capacity(cfg.samples);
    for _ in 0..cfg.samples {
        let mats: HashMap<G, OrthMatrix> =
            gens.iter().cloned().zip(chains.iter_mut().map(|c| transform(c.draw()))).collect();
        series.push(word_trace(w, &mats));
    }
    for c in &chains {
        c.check_calibration()?;
    }
    Ok(Estimate::from_series(&series))
}

pub fn estimate_word<G: Clone + Eq + Hash + Ord>(w: &FreeWord<G>, cfg: &McConfig) -> Result<Estimate> {
    estimate_word_with(w, cfg, |q| q.clone())
}

/// Wilson loop estimate (1/N)⟨Tr W_ℓ⟩ through the planar gauge word.
pub fn estimate_wilson(l: &Loop, cfg: &McConfig) -> Result<Estimate> {
    estimate_word(&loop_to_word(l)?.cyclically_reduced(), cfg)
}

/// Eigenvalue angles in (−π, π].
pub fn eigen_angles(q: &OrthMatrix) -> Vec<f64> {
    q.complex_eigenvalues().iter().map(|z| z.im.atan2(z.re)).collect()
}

/// (1/N) Tr Sᵏ for S = (Q + Qᵀ)/2, i.e. the mean of cosᵏ over eigenangles.
pub fn cos_moments(q: &OrthMatrix, k_max: usize) -> Vec<f64> {
    let n = q.nrows();
    let s = (q + q.transpose()) * 0.5;
    let mut p = DMatrix::<f64>::identity(n, n);
    (1..=k_max)
        .map(|_| {
            p = &p * &s;
            p.trace() / n as f64
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct SpectralTable {
    /// Bin centres and empirical densities on [−π, π).
    pub bins: Vec<(f64, f64)>,
    /// E cosᵏΘ for k = 1..=k_max.
    pub moments: Vec<Estimate>,
    /// Largest difference between the density at θ and at −θ.
    pub asymmetry: f64,
    pub acceptance: f64,
}

/// Limiting angle density (1 + 2β cos θ)/2π.
pub fn limit_density(beta: f64, theta: f64) -> f64 {
    (1.0 + 2.0 * beta * theta.cos()) / (2.0 * PI)
}

pub fn spectral_histogram(cfg: &McConfig, bins: usize, k_max: usize) -> Result<SpectralTable> {
    if bins == 0 || bins % 2 == 1 {
        return Err(Error::Invalid("bin count must be even and positive".into()));
    }
    let mut chain = PlaquetteChain::new(cfg, chain_seed(cfg.seed, 0))?;
    let mut counts = vec![0u64; bins];
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.samples); k_max];
    let width = 2.0 * PI / bins as f64;
    let mut total = 0u64;
    for _ in 0..cfg.samples {
        let q = chain.draw();
        for t in eigen_angles(q) {
            let b = (((t + PI) / width).floor() as usize).min(bins - 1);
            counts[b] += 1;
            total += 1;
        }
        for (k, m) in cos_moments(q, k_max).into_iter().enumerate() {
            series[k].push(m);
        }
    }
    chain.check_calibration()?;
    let dens: Vec<f64> = counts.iter().map(|&c| c as f64 / (total as f64 * width)).collect();
    let asymmetry = (0..bins).map(|b| (dens[b] - dens[bins - 1 - b]).abs()).fold(0.0, f64::max);
    Ok(SpectralTable {
        bins: dens.iter().enumerate().map(|(b, &d)| (-PI + (b as f64 + 0.5) * width, d)).collect(),
        moments: series.iter().map(|s| Estimate::from_series(s)).collect(),
        asymmetry,
        acceptance: chain.acceptance_rate(),
    })
}

/// Kolmogorov–Smirnov statistic against the uniform law on [lo, hi), with
/// the asymptotic p-value.
pub fn ks_uniform(xs: &[f64], lo: f64, hi: f64) -> (f64, f64) {
    let mut v: Vec<f64> = xs.iter().map(|x| ((x - lo) / (hi - lo)).clamp(0.0, 1.0)).collect();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let d = v
        .iter()
        .enumerate()
        .map(|(i, &u)| (u - i as f64 / n).max((i as f64 + 1.0) / n - u))
        .fold(0.0, f64::max);
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let p = (1..=100)
        .map(|j| {
            let j = j as f64;
            2.0 * (-1f64).powf(j - 1.0) * (-2.0 * j * j * lambda * lambda).exp()
        })
        .sum::<f64>()
        .clamp(0.0, 1.0);
    (d, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_is_special_orthogonal() {
        let mut rng = rng_from_seed(7);
        for n in [2, 3, 8] {
            let q = haar_sample(n, &mut rng).unwrap();
            assert!(orthogonality_defect(&q) < 1e-10);
            assert!((q.determinant() - 1.0).abs() < 1e-8);
        }
        assert!(haar_sample(1, &mut rng).is_err());
    }

    #[test]
    fn batch_means() {
        let xs: Vec<f64> = (0..400).map(|i| (i % 2) as f64).collect();
        let e = Estimate::from_series(&xs);
        assert!((e.mean - 0.5).abs() < 1e-12);
        assert!(e.stderr < 1e-6);
    }

    #[test]
    fn chain_stays_orthogonal() {
        let cfg = McConfig { n: 6, beta: 0.3, burn_in: 200, thin: 5, samples: 50, ..McConfig::default() };
        for q in plaquette_samples(&cfg).unwrap() {
            assert!(orthogonality_defect(&q) < 1e-10);
            assert!((q.determinant() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn ks_detects_shift() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_uniform(&xs, 0.0, 1.0).1 > 0.99);
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!(ks_uniform(&ys, 0.0, 1.0).1 < 1e-6);
    }
}
