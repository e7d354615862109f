//! Empirical verification of the projection LDPs: naive and exponentially
//! tilted tail estimation under a quenched frame, the per-frame average
//! F_n, and statistical checks of the Gaussian-approximation and tightness
//! lemmas.
//!
//! Tilting works coordinatewise. With a frame a and direction u = v*·e₁,
//! each coordinate i gets the tilt (λᵢ, c) where λᵢ = ⟨u, √n·aᵢ⟩, and the
//! product measure has Radon–Nikodym derivative
//!
//!   dμ̃/dμ (x) = exp(n·(⟨u, W_X⟩ + c·L − F_n(u, a, c))),
//!
//! with W_X the projection of x, L = n^{−1}Σ|xᵢ|^p, and F_n the average
//! log-MGF over rows. The importance weight is the reciprocal, so estimates
//! stay unbiased for any tilt; the rate-function argmax merely minimizes
//! the variance. Frames are quenched: drawn once per frame seed and held
//! fixed across all samples, matching the fixed-frame probability
//! statements being tested.
//!
//! Sampling splits into contiguous shards over per-worker streams derived
//! from the master seed (worker w uses stream 1 + w); the reduction order
//! is fixed, so a given worker count reproduces results bit for bit.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{haar_frame, project, StiefelFrame};
use crate::mgf::{LogMGFOracle, TiltParams, TiltedDist};
use crate::num::fmath;
use crate::rates;
use crate::stream::{seeded, FRAME_STREAM, AUX_STREAM0, WORKER_STREAM0};

/// Estimation strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Naive,
    Tilted,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::Tilted => "tilted",
        }
    }
}

/// Which random vector the projection norm is measured on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// Uniform on the l_p sphere of radius n^{1/p}: event ‖W_X‖·L^{−1/p} ≥ r.
    Sphere,
    /// Uniform in the ball: the sphere point scaled by U^{1/n}.
    Ball,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::Sphere => "sphere",
            Target::Ball => "ball",
        }
    }
}

/// A coordinatewise exponential tilt, cached for a fixed frame.
#[derive(Clone, Debug)]
pub struct TiltSpec {
    /// Tilt direction in ℝ^k, already scaled: u = v*·e₁.
    pub u: Vec<f64>,
    /// η-tilt, strictly below T.
    pub c: f64,
    /// λᵢ = ⟨u, √n·aᵢ⟩ per row.
    pub lambda: Vec<f64>,
    /// Cached F_n(u, a, c).
    pub f_n: f64,
}

impl TiltSpec {
    /// Build the tilt toward direction v*·e₁ with η-tilt c.
    pub fn new(
        frame: &StiefelFrame,
        v_star: f64,
        c_star: f64,
        oracle: &LogMGFOracle,
    ) -> Result<Self> {
        if !(v_star >= 0.0) {
            return Err(Error::InvalidParameter("tilt magnitude must be >= 0"));
        }
        if c_star >= oracle.t_bound() {
            return Err(Error::DomainViolation {
                what: "c",
                value: c_star,
                bound: oracle.t_bound(),
            });
        }
        let n = frame.n();
        let mut u = alloc::vec![0.0; frame.k()];
        u[0] = v_star;
        let sqrt_n = fmath::sqrt(n as f64);
        let lambda: Vec<f64> =
            (0..n).map(|i| v_star * sqrt_n * frame.entry(i, 0)).collect();
        let mut total = 0.0;
        for &l in &lambda {
            total += oracle.logmgf_joint(l, c_star)?;
        }
        Ok(TiltSpec { u, c: c_star, lambda, f_n: total / n as f64 })
    }
}

/// Result of a tail-probability run.
#[derive(Clone, Debug)]
pub struct TailEstimate {
    pub p_hat: f64,
    /// −(1/n)·log p_hat; +∞ when no hits landed.
    pub log_rate: f64,
    /// Batch-means standard error of p_hat (32 batches).
    pub stderr: f64,
    /// Delta-method standard error of log_rate.
    pub log_rate_stderr: f64,
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub r: f64,
    pub samples: usize,
    pub method: Method,
    pub target: Target,
    /// (Σw)²/Σw² over all sample weights; equals `samples` for naive runs.
    pub ess: f64,
    /// True when no sample hit the event (p_hat = 0).
    pub zero_hits: bool,
    pub seed: u64,
    pub frame_seed: u64,
}

/// Inputs of `estimate_tail`; seeds are explicit so runs are reproducible.
#[derive(Clone, Copy, Debug)]
pub struct TailConfig {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    /// Threshold on the (normalized) projection norm.
    pub r: f64,
    pub samples: usize,
    pub method: Method,
    pub target: Target,
    /// Master seed for sample streams (worker w draws from stream 1 + w).
    pub seed: u64,
    /// Seed of the quenched frame (stream 0).
    pub frame_seed: u64,
    /// Shard count; estimates are bit-identical for a fixed count.
    pub workers: usize,
}

/// F_n(u, a, c) = (1/n)·Σᵢ Λ̄(⟨u, √n·aᵢ⟩, c): the per-frame average that
/// converges to Λ(‖u‖, c) as n grows.
pub fn f_n(u: &[f64], frame: &StiefelFrame, c: f64, oracle: &LogMGFOracle) -> Result<f64> {
    if u.len() != frame.k() {
        return Err(Error::DimensionMismatch { expected: frame.k(), got: u.len() });
    }
    let n = frame.n();
    let sqrt_n = fmath::sqrt(n as f64);
    let mut total = 0.0;
    for i in 0..n {
        let row = frame.row(i);
        let dot: f64 = row.iter().zip(u).map(|(&a, &v)| a * v).sum();
        total += oracle.logmgf_joint(sqrt_n * dot, c)?;
    }
    Ok(total / n as f64)
}

/// Event kinds shared by the tail and tightness estimators.
#[derive(Clone, Copy, Debug)]
enum EventKind {
    /// ‖W_X‖·L^{−1/p} ≥ r (uniform sphere vector).
    Sphere(f64),
    /// ‖W_X‖·L^{−1/p}·U^{1/n} ≥ r (uniform ball vector).
    Ball(f64),
    /// ‖W_X‖ ≥ r on the raw i.i.d. vector (tightness exceedance).
    RawNorm(f64),
}

impl EventKind {
    fn needs_radial(self) -> bool {
        matches!(self, EventKind::Ball(_))
    }

    fn holds(self, w_norm: f64, l: f64, u_radial: f64, n: usize, p: f64) -> bool {
        match self {
            EventKind::Sphere(r) => w_norm * fmath::powf(l, -1.0 / p) >= r,
            EventKind::Ball(r) => {
                let radial = fmath::powf(u_radial, 1.0 / n as f64);
                w_norm * fmath::powf(l, -1.0 / p) * radial >= r
            }
            EventKind::RawNorm(r) => w_norm >= r,
        }
    }
}

const BATCHES: usize = 32;

struct RawEstimate {
    p_hat: f64,
    stderr: f64,
    ess: f64,
    zero_hits: bool,
}

/// Core sampling loop: i.i.d. (or coordinatewise tilted) coordinates,
/// projection, event indicator, importance weight, batch-means accumulation
/// by global sample index.
fn run_estimate(
    frame: &StiefelFrame,
    tilt: Option<(&TiltSpec, &[TiltedDist])>,
    event: EventKind,
    samples: usize,
    seed: u64,
    workers: usize,
    oracle: &LogMGFOracle,
) -> RawEstimate {
    let n = frame.n();
    let p = oracle.p();
    let dist = oracle.dist();
    let mut batch_sum = [0.0f64; BATCHES];
    let mut weight_sum = 0.0f64;
    let mut weight_sq = 0.0f64;
    let mut hits = 0u64;
    let nf = n as f64;
    let mut x = alloc::vec![0.0; n];
    for w in 0..workers {
        let lo = w * samples / workers;
        let hi = (w + 1) * samples / workers;
        if lo >= hi {
            continue;
        }
        let mut rng = seeded(seed, WORKER_STREAM0 + w as u64);
        for idx in lo..hi {
            match tilt {
                None => dist.sample_into(&mut x, &mut rng),
                Some((_, tables)) => {
                    for (slot, table) in x.iter_mut().zip(tables) {
                        *slot = table.sample(&mut rng);
                    }
                }
            }
            let u_radial: f64 =
                if event.needs_radial() { rng.random() } else { 0.0 };
            let l: f64 =
                x.iter().map(|&v| fmath::abs_powf(v, p)).sum::<f64>() / nf;
            let wx = project(frame, &x).expect("dimensions fixed by construction");
            let w_norm = fmath::sqrt(wx.iter().map(|&v| v * v).sum());
            let weight = match tilt {
                None => 1.0,
                Some((spec, _)) => {
                    // The indicator, L, and ‖wx‖ are all even in x while the
                    // tilt ν is not, so the estimator is averaged over the
                    // sign flip x → −x: the effective sampler is the even
                    // mixture with density μ·e^{n(cL−F_n)}·cosh(n⟨u,wx⟩),
                    // and the weight is its reciprocal Radon-Nikodym factor.
                    // This costs nothing (even statistics have the same law
                    // under ν and its even part) and covers both caps of the
                    // two-sided event; the bare one-directional weight
                    // recovers the mirror cap only through samples of
                    // probability e^{−2n·v*·r}, a factor-2 practical bias
                    // at k = 1.
                    let dot: f64 =
                        spec.u.iter().zip(&wx).map(|(&a, &b)| a * b).sum();
                    let a = nf * (spec.c * l - spec.f_n);
                    let b = nf * fmath::abs(dot);
                    fmath::exp(-(a + b)) * 2.0 / (1.0 + fmath::exp(-2.0 * b))
                }
            };
            weight_sum += weight;
            weight_sq += weight * weight;
            if event.holds(w_norm, l, u_radial, n, p) {
                hits += 1;
                let b = idx * BATCHES / samples;
                batch_sum[b] += weight;
            }
        }
    }
    let p_hat: f64 = batch_sum.iter().sum::<f64>() / samples as f64;
    // Batch means over near-equal batch sizes; 32 batches keep the variance
    // estimate stable under heavy-tailed weights.
    let mut means = [0.0f64; BATCHES];
    let mut nonempty = 0usize;
    for b in 0..BATCHES {
        let size = (b + 1) * samples / BATCHES - b * samples / BATCHES;
        if size > 0 {
            means[nonempty] = batch_sum[b] / size as f64;
            nonempty += 1;
        }
    }
    let stderr = if nonempty > 1 {
        let mean: f64 = means[..nonempty].iter().sum::<f64>() / nonempty as f64;
        let var: f64 = means[..nonempty]
            .iter()
            .map(|&m| (m - mean) * (m - mean))
            .sum::<f64>()
            / (nonempty - 1) as f64;
        fmath::sqrt(var / nonempty as f64)
    } else {
        f64::NAN
    };
    let ess = if weight_sq > 0.0 { weight_sum * weight_sum / weight_sq } else { 0.0 };
    RawEstimate { p_hat, stderr, ess, zero_hits: hits == 0 }
}

/// Estimate P(‖W‖₂ ≥ r) for the projection of a uniform sphere or ball
/// vector under a quenched Haar frame.
///
/// The tilted method centers the sampling measure on the rate-function
/// argmax: direction u = v*·e₁ (the estimator's law is invariant under
/// right-rotations of the frame, so a fixed axis loses nothing) and
/// coordinate tilts (λᵢ, c*). A divergent rate at r refuses the tilt.
pub fn estimate_tail(cfg: &TailConfig, oracle: &LogMGFOracle) -> Result<TailEstimate> {
    if cfg.p != oracle.p() {
        return Err(Error::InvalidParameter("estimate_tail: p must match the oracle"));
    }
    if cfg.k == 0 || cfg.k > cfg.n {
        return Err(Error::InvalidParameter("estimate_tail requires 1 <= k <= n"));
    }
    if cfg.samples < BATCHES {
        return Err(Error::InvalidParameter("estimate_tail requires samples >= 32"));
    }
    if cfg.workers == 0 {
        return Err(Error::InvalidParameter("estimate_tail requires workers >= 1"));
    }
    if !(cfg.r >= 0.0) {
        return Err(Error::InvalidParameter("estimate_tail requires r >= 0"));
    }
    let mut frame_rng = seeded(cfg.frame_seed, FRAME_STREAM);
    let frame = haar_frame(cfg.n, cfg.k, &mut frame_rng)?;
    let event = match cfg.target {
        Target::Sphere => EventKind::Sphere(cfg.r),
        Target::Ball => EventKind::Ball(cfg.r),
    };
    let raw = match cfg.method {
        Method::Naive => {
            run_estimate(&frame, None, event, cfg.samples, cfg.seed, cfg.workers, oracle)
        }
        Method::Tilted => {
            // r = 0 is the sure event: the optimal tilt is exactly null and
            // the optimizer's placement of it must not leak rounding into
            // the weights, which are identically 1 there.
            let (v_star, c_star) = if cfg.r == 0.0 {
                (0.0, 0.0)
            } else {
                let ball = rates::rate_ball(&[0.0], cfg.r, cfg.p, oracle)?;
                match ball.argmax {
                    Some((v, c)) => (v, c.min(oracle.t_bound() - 1e-6)),
                    None => return Err(Error::TiltRefused { r: cfg.r }),
                }
            };
            let spec = TiltSpec::new(&frame, v_star, c_star, oracle)?;
            let tables = build_tables(&spec, oracle)?;
            run_estimate(
                &frame,
                Some((&spec, &tables)),
                event,
                cfg.samples,
                cfg.seed,
                cfg.workers,
                oracle,
            )
        }
    };
    Ok(finish_estimate(cfg, raw))
}

fn build_tables(spec: &TiltSpec, oracle: &LogMGFOracle) -> Result<Vec<TiltedDist>> {
    spec.lambda
        .iter()
        .map(|&l| oracle.tilt(TiltParams { s1: l, s2: spec.c }))
        .collect()
}

fn finish_estimate(cfg: &TailConfig, raw: RawEstimate) -> TailEstimate {
    let nf = cfg.n as f64;
    let (log_rate, log_rate_stderr) = if raw.p_hat > 0.0 {
        (-fmath::ln(raw.p_hat) / nf, raw.stderr / (nf * raw.p_hat))
    } else {
        (f64::INFINITY, f64::NAN)
    };
    TailEstimate {
        p_hat: raw.p_hat,
        log_rate,
        stderr: raw.stderr,
        log_rate_stderr,
        n: cfg.n,
        k: cfg.k,
        p: cfg.p,
        r: cfg.r,
        samples: cfg.samples,
        method: cfg.method,
        target: cfg.target,
        ess: raw.ess,
        zero_hits: raw.zero_hits,
        seed: cfg.seed,
        frame_seed: cfg.frame_seed,
    }
}

/// One row of the LDP slope table.
#[derive(Clone, Copy, Debug)]
pub struct SlopeRow {
    pub n: usize,
    pub k: usize,
    pub log_rate: f64,
    /// Standard error of log_rate.
    pub stderr: f64,
    /// The limiting rate from the rates module (same for every row).
    pub rate_prediction: f64,
}

/// Tilted tail estimates along n_list with k = ⌈n^γ⌉, for convergence
/// studies of −(1/n)·log P toward the norm rate. Row i derives its seeds
/// from (seed + i, frame_seed + i).
pub fn ldp_slope_table(
    n_list: &[usize],
    gamma: f64,
    p: f64,
    r: f64,
    samples: usize,
    target: Target,
    seed: u64,
    frame_seed: u64,
    oracle: &LogMGFOracle,
) -> Result<Vec<SlopeRow>> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter("ldp_slope_table requires gamma in (0, 1)"));
    }
    let prediction = rates::rate_norm2(r, p, oracle)?.value;
    let mut rows = Vec::with_capacity(n_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        let k = fmath::ceil(fmath::powf(n as f64, gamma)) as usize;
        let k = k.clamp(1, n);
        let cfg = TailConfig {
            n,
            k,
            p,
            r,
            samples,
            method: Method::Tilted,
            target,
            seed: seed.wrapping_add(i as u64),
            frame_seed: frame_seed.wrapping_add(i as u64),
            workers: 1,
        };
        let est = estimate_tail(&cfg, oracle)?;
        rows.push(SlopeRow {
            n,
            k,
            log_rate: est.log_rate,
            stderr: est.log_rate_stderr,
            rate_prediction: prediction,
        });
    }
    Ok(rows)
}

/// Sup over sampled directions of |F_n(v, a, c) − Λ(D, c)|: the quantity
/// the Gaussian-approximation lemma drives to zero uniformly over direction
/// collections of subexponential size.
///
/// Directions are drawn uniformly on the radius-D sphere in ℝ^k from an
/// auxiliary stream; the frame is Haar-sampled once from the frame stream.
pub fn gaussian_approx_stat(
    n: usize,
    k: usize,
    d: f64,
    c: f64,
    directions: usize,
    p: f64,
    seed: u64,
    frame_seed: u64,
    oracle: &LogMGFOracle,
) -> Result<f64> {
    if p != oracle.p() {
        return Err(Error::InvalidParameter("gaussian_approx_stat: p must match the oracle"));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter("gaussian_approx_stat requires 1 <= k <= n"));
    }
    if directions == 0 || fmath::ln(directions as f64) > k as f64 {
        return Err(Error::InvalidParameter(
            "direction count must be in 1..=e^k (the lemma's collection bound)",
        ));
    }
    if !(d >= 0.0) {
        return Err(Error::InvalidParameter("gaussian_approx_stat requires D >= 0"));
    }
    if c >= oracle.t_bound() {
        return Err(Error::DomainViolation { what: "c", value: c, bound: oracle.t_bound() });
    }
    if d == 0.0 {
        // Both sides are Λ̄(0, c) identically.
        return Ok(0.0);
    }
    let mut frame_rng = seeded(frame_seed, FRAME_STREAM);
    let frame = haar_frame(n, k, &mut frame_rng)?;
    let lam = rates::lambda_d(d, c, oracle)?;
    let mut dir_rng = seeded(seed, AUX_STREAM0);
    let normal = rand_distr::StandardNormal;
    let mut sup = 0.0f64;
    let mut v = alloc::vec![0.0; k];
    for _ in 0..directions {
        loop {
            for slot in v.iter_mut() {
                *slot = rand_distr::Distribution::sample(&normal, &mut dir_rng);
            }
            let norm = fmath::sqrt(v.iter().map(|&z| z * z).sum());
            if norm > 0.0 {
                let scale = d / norm;
                for slot in v.iter_mut() {
                    *slot *= scale;
                }
                break;
            }
        }
        let dev = fmath::abs(f_n(&v, &frame, c, oracle)? - lam);
        sup = sup.max(dev);
    }
    Ok(sup)
}

/// One exceedance measurement of the tightness diagnostic.
#[derive(Clone, Copy, Debug)]
pub struct ExceedancePoint {
    /// Offset t: the event is ‖n^{−1/2}aᵀX‖² ≥ 1 + t.
    pub t: f64,
    pub p_hat: f64,
    /// −(1/n)·log p_hat.
    pub log_rate: f64,
    /// Standard error of log_rate.
    pub stderr: f64,
}

/// Output of `tightness_check`.
#[derive(Clone, Debug)]
pub struct TightnessReport {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub samples: usize,
    /// Empirical mean of ‖n^{−1/2}aᵀX‖² over i.i.d. X.
    pub mean: f64,
    /// σ_p²·k/n, the trace identity (equal to k/n at p = 2).
    pub mean_target: f64,
    pub mean_se: f64,
    /// |mean − target| ≤ 3·SE.
    pub mean_within_3se: bool,
    /// Exceedance estimates at t ∈ {0.25, 0.5} (tilted importance sampling:
    /// these probabilities are far beyond naive reach).
    pub exceedances: [ExceedancePoint; 2],
    /// Fitted exponential decay rate of the exceedance in t; positive decay
    /// is the testable content of the tightness lemma at finite n.
    pub gamma_hat: f64,
}

/// Check the two finite-n footprints of exponential tightness: the trace
/// identity for the mean of ‖n^{−1/2}aᵀX‖², and a strictly positive
/// exponential decay rate of P(‖n^{−1/2}aᵀX‖² ≥ 1 + t) in t.
pub fn tightness_check(
    n: usize,
    k: usize,
    samples: usize,
    seed: u64,
    frame_seed: u64,
    oracle: &LogMGFOracle,
) -> Result<TightnessReport> {
    let p = oracle.p();
    if !(p >= 2.0) {
        return Err(Error::InvalidParameter("tightness_check requires p >= 2"));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter("tightness_check requires 1 <= k <= n"));
    }
    if samples < BATCHES {
        return Err(Error::InvalidParameter("tightness_check requires samples >= 32"));
    }
    let mut frame_rng = seeded(frame_seed, FRAME_STREAM);
    let frame = haar_frame(n, k, &mut frame_rng)?;

    // (i) Mean of the squared projection norm over i.i.d. coordinates.
    let dist = oracle.dist();
    let mut rng = seeded(seed, WORKER_STREAM0);
    let mut x = alloc::vec![0.0; n];
    let mut sum = 0.0f64;
    let mut sumsq = 0.0f64;
    for _ in 0..samples {
        dist.sample_into(&mut x, &mut rng);
        let wx = project(&frame, &x).expect("dimensions fixed");
        let sq: f64 = wx.iter().map(|&v| v * v).sum();
        sum += sq;
        sumsq += sq * sq;
    }
    let mean = sum / samples as f64;
    let var = (sumsq / samples as f64 - mean * mean).max(0.0);
    let mean_se = fmath::sqrt(var / samples as f64);
    let mean_target = oracle.sigma2() * k as f64 / n as f64;
    let mean_within_3se = fmath::abs(mean - mean_target) <= 3.0 * mean_se;

    // (ii) Exceedance decay, tilted at the raw-norm rate argmax.
    let mut points = [ExceedancePoint { t: 0.0, p_hat: 0.0, log_rate: 0.0, stderr: 0.0 }; 2];
    for (slot, &t) in points.iter_mut().zip(&[0.25f64, 0.5]) {
        let r_t = fmath::sqrt(1.0 + t);
        let (v_star, c_star, _) = rates::raw_norm_tilt(r_t, oracle)?;
        let spec = TiltSpec::new(&frame, v_star, c_star, oracle)?;
        let tables = build_tables(&spec, oracle)?;
        let raw = run_estimate(
            &frame,
            Some((&spec, &tables)),
            EventKind::RawNorm(r_t),
            samples,
            seed.wrapping_add(1 + (t * 8.0) as u64),
            1,
            oracle,
        );
        let nf = n as f64;
        let (log_rate, stderr) = if raw.p_hat > 0.0 {
            (-fmath::ln(raw.p_hat) / nf, raw.stderr / (nf * raw.p_hat))
        } else {
            (f64::INFINITY, f64::NAN)
        };
        *slot = ExceedancePoint { t, p_hat: raw.p_hat, log_rate, stderr };
    }
    let gamma_hat = (points[1].log_rate - points[0].log_rate) / (points[1].t - points[0].t);

    Ok(TightnessReport {
        n,
        k,
        p,
        samples,
        mean,
        mean_target,
        mean_se,
        mean_within_3se,
        exceedances: points,
        gamma_hat,
    })
}
