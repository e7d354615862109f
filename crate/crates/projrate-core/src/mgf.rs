//! The p-generalized normal distribution, its samplers, the joint
//! log-moment generating function of (X, |X|^p), and exponentially tilted
//! one-dimensional measures.
//!
//! Density: f_p(x) = exp(-|x|^p / p) / (2 p^{1/p} Γ(1 + 1/p)). At p = 2 this
//! is exactly the standard normal. For a random variable X with this density
//! the joint transform
//!
//!   Λ̄(t1, t2) = log E[exp(t1 X + t2 |X|^p)]
//!
//! is finite precisely for t2 < T = 1/p (and every t1, for p > 1), and
//! reduces to a one-parameter family by the substitution x -> x (1 - p t2)^{-1/p}:
//!
//!   Λ̄(t1, t2) = -(1/p) log(1 - p t2) + Λ̂(t1 (1 - p t2)^{-1/p}),
//!
//! where Λ̂(t) = log ∫ e^{tx} f_p(x) dx. All derivative queries route through
//! Λ̂ and its first two derivatives, which are tilted moments of the scaled
//! one-parameter family computed by adaptive quadrature and memoized with
//! certified Chebyshev tables (the rate optimizer evaluates them inside
//! nested loops). For p = 2 the closed form Λ̂(t) = t^2 / 2 is mandatory; the
//! quadrature path stays available for cross-checks.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::num::cheb::PiecewiseCheb;
use crate::num::fmath;
use crate::num::gamma::{gamma, ln_gamma};
use crate::num::quad;

/// Largest |t| covered by the memoized Λ̂ tables; beyond it the oracle falls
/// back to direct quadrature (rare: only divergence probes reach that far).
const LHAT_CACHE_MAX: f64 = 256.0;

/// log-density drop at which integration brackets are truncated; e^{-46}
/// is ~1e-20 relative to the peak, leaving omitted mass far below 1e-12.
const LOG_TAIL_CUT: f64 = 46.0;

/// The p-generalized normal distribution.
#[derive(Clone, Debug)]
pub struct PGaussDist {
    p: f64,
    norm_const: f64,
}

/// Density of the p-generalized normal at `x`.
///
/// Errors with `InvalidParameter` for p < 1.
pub fn pdf_p(x: f64, p: f64) -> Result<f64> {
    Ok(PGaussDist::new(p)?.pdf(x))
}

impl PGaussDist {
    /// Construct the distribution; requires p >= 1.
    pub fn new(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter("p-generalized normal requires p >= 1"));
        }
        let norm_const = 1.0 / (2.0 * fmath::powf(p, 1.0 / p) * gamma(1.0 + 1.0 / p));
        Ok(PGaussDist { p, norm_const })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// 1 / (2 p^{1/p} Γ(1 + 1/p)).
    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    /// Density at `x`; even in `x` by construction.
    pub fn pdf(&self, x: f64) -> f64 {
        self.norm_const * fmath::exp(-fmath::abs_powf(x, self.p) / self.p)
    }

    /// Variance p^{2/p} Γ(3/p) / Γ(1/p); equals 1 at p = 2.
    pub fn variance(&self) -> f64 {
        fmath::exp(
            (2.0 / self.p) * fmath::ln(self.p) + ln_gamma(3.0 / self.p)
                - ln_gamma(1.0 / self.p),
        )
    }

    /// One draw: X = ε (p G)^{1/p} with ε uniform on {-1, +1} and G gamma
    /// with shape 1/p and unit scale (shapes below one are handled by the
    /// boosted sampler: draw shape + 1, multiply by U^{1/shape}).
    ///
    /// Draw order per sample is fixed (sign, then magnitude) so streams are
    /// reproducible.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let negative: bool = rng.random();
        let g = Gamma::new(1.0 / self.p, 1.0)
            .expect("gamma shape 1/p is positive")
            .sample(rng);
        let mag = fmath::powf(self.p * g, 1.0 / self.p);
        if negative {
            -mag
        } else {
            mag
        }
    }

    /// Cached gamma sampler for bulk draws.
    fn magnitude_law(&self) -> Gamma<f64> {
        Gamma::new(1.0 / self.p, 1.0).expect("gamma shape 1/p is positive")
    }

    /// Fill `out` with i.i.d. draws.
    pub fn sample_into<R: Rng + ?Sized>(&self, out: &mut [f64], rng: &mut R) {
        let law = self.magnitude_law();
        for slot in out.iter_mut() {
            let negative: bool = rng.random();
            let g = law.sample(rng);
            let mag = fmath::powf(self.p * g, 1.0 / self.p);
            *slot = if negative { -mag } else { mag };
        }
    }

    /// Uniform point on the l_p sphere of radius n^{1/p}: i.i.d. draws
    /// renormalized so that Σ |Y_i|^p = n exactly. The all-zero draw
    /// (probability zero) is resampled.
    pub fn sample_sphere<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        assert!(n >= 1, "sphere dimension must be positive");
        let mut x = alloc::vec![0.0; n];
        loop {
            self.sample_into(&mut x, rng);
            let s: f64 = x.iter().map(|&v| fmath::abs_powf(v, self.p)).sum();
            if s > 0.0 {
                let scale = fmath::powf(n as f64 / s, 1.0 / self.p);
                for v in x.iter_mut() {
                    *v *= scale;
                }
                return x;
            }
        }
    }

    /// Uniform point in the l_p ball of radius n^{1/p}: a sphere point scaled
    /// by U^{1/n}. Draw order: sphere coordinates first, then the radial
    /// uniform.
    pub fn sample_ball<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let mut y = self.sample_sphere(n, rng);
        let u: f64 = rng.random();
        let radial = fmath::powf(u, 1.0 / n as f64);
        for v in y.iter_mut() {
            *v *= radial;
        }
        y
    }
}

/// Evaluation strategy for Λ̂ and its derivatives.
#[derive(Clone, Debug)]
enum LhatEval {
    /// p = 2 closed form: Λ̂(t) = t²/2, Λ̂'(t) = t, Λ̂''(t) = 1.
    Gaussian,
    /// Certified Chebyshev tables over [0, LHAT_CACHE_MAX]. `shift` is the
    /// fitted value at 0, subtracted so Λ̂(0) = 0 holds exactly (null tilts
    /// must produce unit importance weights bit for bit).
    Cached {
        value: PiecewiseCheb,
        d1: PiecewiseCheb,
        d2: PiecewiseCheb,
        shift: f64,
    },
}

/// Joint log-MGF oracle for (X, |X|^p) with X p-generalized normal.
///
/// Immutable after construction and safe to share across threads.
#[derive(Clone, Debug)]
pub struct LogMGFOracle {
    dist: PGaussDist,
    t_bound: f64,
    sigma2: f64,
    lhat: LhatEval,
}

/// Tilt parameters (s1, s2); requires s2 < T.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TiltParams {
    pub s1: f64,
    pub s2: f64,
}

/// Mean, variance, and E|X|^p of a tilted measure, computed by direct
/// quadrature against the tilted density. Reference path for tests and
/// diagnostics; the fast path goes through the memoized Λ̂ tables.
#[derive(Clone, Copy, Debug)]
pub struct TiltedMoments {
    pub mean: f64,
    pub var: f64,
    pub eta_mean: f64,
}

impl LogMGFOracle {
    /// Build the oracle for exponent `p`. Requires p > 1: the joint
    /// transform is finite for all t1 only when the |x|^p tail beats the
    /// linear tilt, which fails at p = 1.
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(
                "log-MGF oracle requires p > 1 (finite transform for all t1)",
            ));
        }
        let dist = PGaussDist::new(p)?;
        let sigma2 = dist.variance();
        let t_bound = 1.0 / p;
        let lhat = if p == 2.0 {
            LhatEval::Gaussian
        } else {
            let breaks = [0.0, 1.0, 4.0, 16.0, 64.0, LHAT_CACHE_MAX];
            let d = dist.clone();
            let value = PiecewiseCheb::build(|t| lhat_direct(&d, t)[0], &breaks, 1e-11)?;
            let d = dist.clone();
            let d1 = PiecewiseCheb::build(|t| lhat_direct(&d, t)[1], &breaks, 1e-11)?;
            let d = dist.clone();
            let d2 = PiecewiseCheb::build(|t| lhat_direct(&d, t)[2], &breaks, 1e-11)?;
            let shift = value.eval(0.0);
            LhatEval::Cached { value, d1, d2, shift }
        };
        Ok(LogMGFOracle { dist, t_bound, sigma2, lhat })
    }

    pub fn dist(&self) -> &PGaussDist {
        &self.dist
    }

    pub fn p(&self) -> f64 {
        self.dist.p()
    }

    /// Domain threshold T = 1/p for the second argument.
    pub fn t_bound(&self) -> f64 {
        self.t_bound
    }

    /// Variance of X.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// The companion statistic η(x) = |x|^p.
    pub fn eta(&self, x: f64) -> f64 {
        fmath::abs_powf(x, self.dist.p())
    }

    fn check_t2(&self, t2: f64) -> Result<f64> {
        if t2 < self.t_bound {
            Ok(1.0 - self.dist.p() * t2)
        } else {
            Err(Error::DomainViolation { what: "t2", value: t2, bound: self.t_bound })
        }
    }

    /// Λ̂(t), Λ̂'(t), Λ̂''(t) for t >= 0, through the memoized tables when in
    /// range and by direct quadrature beyond them.
    fn lhat3(&self, t: f64) -> [f64; 3] {
        debug_assert!(t >= 0.0);
        match &self.lhat {
            LhatEval::Gaussian => [0.5 * t * t, t, 1.0],
            LhatEval::Cached { value, d1, d2, shift } => {
                if t <= LHAT_CACHE_MAX {
                    [value.eval(t) - shift, d1.eval(t), d2.eval(t)]
                } else {
                    lhat_direct(&self.dist, t)
                }
            }
        }
    }

    /// Λ̄(t1, t2). Errors with a typed domain violation for t2 >= T, which
    /// optimizers treat as a barrier rather than a numerical failure.
    ///
    /// Implemented through |t1| so the evenness Λ̄(t1, t2) = Λ̄(-t1, t2) is
    /// exact in floating point.
    pub fn logmgf_joint(&self, t1: f64, t2: f64) -> Result<f64> {
        let lam = self.check_t2(t2)?;
        let p = self.dist.p();
        let u = fmath::abs(t1) * fmath::powf(lam, -1.0 / p);
        Ok(-fmath::ln(lam) / p + self.lhat3(u)[0])
    }

    /// Partial derivative ∂₁^α ∂₂^β Λ̄(t1, t2) for α + β <= 2.
    ///
    /// These are tilted moments: ∂₁Λ̄ is the tilted mean of X, ∂₂Λ̄ the tilted
    /// mean of |X|^p, ∂₁²Λ̄ the tilted variance of X.
    pub fn logmgf_deriv(&self, t1: f64, t2: f64, order: (u8, u8)) -> Result<f64> {
        let lam = self.check_t2(t2)?;
        let p = self.dist.p();
        let sign = if t1 < 0.0 { -1.0 } else { 1.0 };
        let lam_mp = fmath::powf(lam, -1.0 / p);
        let u = fmath::abs(t1) * lam_mp;
        let [_, l1, l2] = self.lhat3(u);
        match order {
            (0, 0) => self.logmgf_joint(t1, t2),
            (1, 0) => Ok(sign * l1 * lam_mp),
            (0, 1) => Ok((1.0 + u * l1) / lam),
            (2, 0) => Ok(l2 * lam_mp * lam_mp),
            (1, 1) => Ok(sign * lam_mp / lam * (u * l2 + l1)),
            (0, 2) => Ok((p * (1.0 + u * l1) + u * (l1 + u * l2)) / (lam * lam)),
            _ => Err(Error::InvalidParameter("derivative order must satisfy α + β <= 2")),
        }
    }

    /// Λ̂(t) by the memoized fast path (closed form at p = 2).
    pub fn logmgf_1d(&self, t: f64) -> f64 {
        self.lhat3(fmath::abs(t))[0]
    }

    /// Λ̂(t) by direct adaptive quadrature: the reference path the tables
    /// are certified against.
    pub fn logmgf_1d_quadrature(&self, t: f64) -> f64 {
        lhat_direct(&self.dist, fmath::abs(t))[0]
    }

    /// Laplace asymptotic for Λ̂(t) as t -> ∞:
    /// (p-1)/p t^{p/(p-1)} + (2-p)/(2(p-1)) log t + log c̄_p + ½ log(2π/(p-1)).
    /// Exact for p = 2; a large-|t| cross-check otherwise.
    pub fn logmgf_1d_asymptotic(&self, t: f64) -> f64 {
        let p = self.dist.p();
        let t = fmath::abs(t);
        if p == 2.0 {
            return 0.5 * t * t;
        }
        let lead = (p - 1.0) / p * fmath::powf(t, p / (p - 1.0));
        let logterm = (2.0 - p) / (2.0 * (p - 1.0)) * fmath::ln(t);
        let konst = fmath::ln(self.dist.norm_const())
            + 0.5 * fmath::ln(2.0 * core::f64::consts::PI / (p - 1.0));
        lead + logterm + konst
    }

    /// Mean, variance, and E|X|^p under the (s1, s2)-tilted measure, by
    /// direct quadrature against the tilted density.
    pub fn tilted_moments(&self, tp: TiltParams) -> Result<TiltedMoments> {
        self.check_t2(tp.s2)?;
        let p = self.dist.p();
        let kappa = 1.0 / p - tp.s2;
        let (lo, hi, phi_max, x_star) = tilted_support(p, tp.s1, kappa);
        let integrand = |x: f64| {
            let w = fmath::exp(tp.s1 * x - kappa * fmath::abs_powf(x, p) - phi_max);
            let dx = x - x_star;
            [w, dx * w, dx * dx * w, fmath::abs_powf(x, p) * w]
        };
        let (vals, _) = quad::integrate(integrand, lo, hi, 1e-12, 4096);
        let mean = x_star + vals[1] / vals[0];
        let var = vals[2] / vals[0] - (vals[1] / vals[0]) * (vals[1] / vals[0]);
        let eta_mean = vals[3] / vals[0];
        Ok(TiltedMoments { mean, var, eta_mean })
    }

    /// Build a reusable sampler for the (s1, s2)-tilted measure.
    pub fn tilt(&self, tp: TiltParams) -> Result<TiltedDist> {
        TiltedDist::new(self, tp)
    }
}

/// One draw from the tilted measure; convenience wrapper that builds the
/// inverse-CDF table and samples once. Hot paths should hold a `TiltedDist`
/// and reuse it.
pub fn tilted_sample<R: Rng + ?Sized>(
    tp: TiltParams,
    oracle: &LogMGFOracle,
    rng: &mut R,
) -> Result<f64> {
    Ok(oracle.tilt(tp)?.sample(rng))
}

/// Λ̂ and its first two derivatives at t >= 0 by adaptive quadrature.
///
/// Works in log space around the mode x* of S(x) = t x - |x|^p / p. The
/// moments are centered at x* and measured in units of the saddle width
/// σ ≈ S''(x*)^{-1/2}, which keeps all three integrand components O(1):
/// centering kills cancellation for large t, scaling keeps the absolute
/// quadrature target meaningful so repeated evaluations are smooth enough
/// to certify a Chebyshev fit against.
fn lhat_direct(dist: &PGaussDist, t: f64) -> [f64; 3] {
    let p = dist.p();
    debug_assert!(t >= 0.0);
    // S is unimodal: increasing on x < x*, decreasing beyond.
    let x_star = if t == 0.0 { 0.0 } else { fmath::powf(t, 1.0 / (p - 1.0)) };
    let s = |x: f64| t * x - fmath::abs_powf(x, p) / p;
    let s_max = s(x_star);
    // Saddle width; clamped because the curvature degenerates at x* -> 0
    // (p < 2 blows up, p > 2 vanishes) where the O(1) distribution scale
    // takes over. Any positive value is exact here, only conditioning moves.
    let sigma = if x_star > 0.0 {
        let curv = (p - 1.0) * fmath::powf(x_star, p - 2.0);
        fmath::sqrt(1.0 / curv).max(0.25)
    } else {
        1.0
    };
    let lo = bracket_down(&s, s_max, x_star, -1.0);
    let hi = bracket_down(&s, s_max, x_star, 1.0);
    let norm = 1.0 / (sigma * fmath::sqrt(2.0 * core::f64::consts::PI));
    // S(x) - S(x*) by direct subtraction cancels catastrophically for large
    // t (both terms grow like t^{p/(p-1)}); for x, x* > 0 rewrite it as
    // x*^p (u - expm1(p ln1p(u))/p) with u = x/x* - 1, which is exact in
    // the exponent to O(eps * |x - x*| * t).
    let xsp = x_star * t;
    let log_rel = |x: f64| {
        if x_star > 0.0 && x > 0.0 {
            let u = (x - x_star) / x_star;
            xsp * (u - fmath::expm1(p * fmath::ln_1p(u)) / p)
        } else {
            s(x) - s_max
        }
    };
    let integrand = |x: f64| {
        let w = norm * fmath::exp(log_rel(x));
        let z = (x - x_star) / sigma;
        [w, z * w, z * z * w]
    };
    let (vals, _) = quad::integrate(integrand, lo, hi, 1e-13, 4096);
    let ratio1 = vals[1] / vals[0];
    let ratio2 = vals[2] / vals[0];
    let mean = x_star + sigma * ratio1;
    let var = sigma * sigma * (ratio2 - ratio1 * ratio1);
    let value = fmath::ln(dist.norm_const())
        + s_max
        + fmath::ln(vals[0] / norm);
    [value, mean, var]
}

/// March outward from `x0` in direction `dir` until f has dropped LOG_TAIL_CUT
/// below `f_max`, then bisect the crossing to ~1e-3 width.
fn bracket_down(f: &impl Fn(f64) -> f64, f_max: f64, x0: f64, dir: f64) -> f64 {
    let target = f_max - LOG_TAIL_CUT;
    let mut step = 0.5 * (1.0 + fmath::abs(x0) * 1e-3);
    let mut far = x0 + dir * step;
    let mut guard = 0;
    while f(far) > target {
        step *= 2.0;
        far = x0 + dir * step;
        guard += 1;
        debug_assert!(guard < 2000, "tail bracket failed to close");
    }
    let mut near = x0;
    for _ in 0..60 {
        let mid = 0.5 * (near + far);
        if f(mid) > target {
            near = mid;
        } else {
            far = mid;
        }
        if fmath::abs(far - near) <= 1e-3 * (1.0 + fmath::abs(far)) {
            break;
        }
    }
    far
}

/// Support of the tilted density exp(s1 x - κ |x|^p): mode and the interval
/// where the log-density sits within LOG_TAIL_CUT of its peak.
fn tilted_support(p: f64, s1: f64, kappa: f64) -> (f64, f64, f64, f64) {
    debug_assert!(kappa > 0.0);
    let x_star = if s1 == 0.0 {
        0.0
    } else {
        fmath::copysign(fmath::powf(fmath::abs(s1) / (kappa * p), 1.0 / (p - 1.0)), s1)
    };
    let phi = |x: f64| s1 * x - kappa * fmath::abs_powf(x, p);
    let phi_max = phi(x_star);
    let lo = bracket_down(&phi, phi_max, x_star, -1.0);
    let hi = bracket_down(&phi, phi_max, x_star, 1.0);
    (lo, hi, phi_max, x_star)
}

/// Number of knots in the tabulated inverse CDF.
const TILT_KNOTS: usize = 4096;

/// A tilted one-dimensional measure with a tabulated inverse CDF.
///
/// The grid range adapts to the tilt so the omitted tail mass is below
/// 1e-12; sampling inverts the CDF with monotone cubic interpolation.
/// Immutable after construction; safe to share across threads.
#[derive(Clone, Debug)]
pub struct TiltedDist {
    params: TiltParams,
    /// Knot positions (uniform over the adaptive support).
    x: Vec<f64>,
    /// Normalized CDF at the knots; cdf[0] = 0, cdf[last] = 1.
    cdf: Vec<f64>,
    /// dx/dF at the knots (reciprocal of the normalized density).
    slope: Vec<f64>,
}

impl TiltedDist {
    fn new(oracle: &LogMGFOracle, tp: TiltParams) -> Result<Self> {
        oracle.check_t2(tp.s2)?;
        let p = oracle.dist.p();
        let kappa = 1.0 / p - tp.s2;
        let (lo, hi, phi_max, _) = tilted_support(p, tp.s1, kappa);
        let h = |x: f64| fmath::exp(tp.s1 * x - kappa * fmath::abs_powf(x, p) - phi_max);

        let n = TILT_KNOTS;
        let step = (hi - lo) / (n - 1) as f64;
        let mut x = Vec::with_capacity(n);
        let mut hx = Vec::with_capacity(n);
        for i in 0..n {
            let xi = lo + step * i as f64;
            x.push(xi);
            hx.push(h(xi));
        }
        // Composite Simpson per cell: fifth-order accurate on these narrow
        // cells, far beyond what inversion accuracy requires.
        let mut cdf = Vec::with_capacity(n);
        cdf.push(0.0);
        let mut acc = 0.0;
        for i in 0..n - 1 {
            let mid = h(0.5 * (x[i] + x[i + 1]));
            acc += step / 6.0 * (hx[i] + 4.0 * mid + hx[i + 1]);
            cdf.push(acc);
        }
        let total = acc;
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Numerical("tilted density table degenerate"));
        }
        for v in cdf.iter_mut() {
            *v /= total;
        }
        cdf[n - 1] = 1.0;
        // Slopes dx/dF = total / h(x); clamped by the monotone limiter at
        // sample time, so tail underflow is harmless.
        let slope: Vec<f64> = hx
            .iter()
            .map(|&v| if v > 0.0 { total / v } else { f64::INFINITY })
            .collect();
        Ok(TiltedDist { params: tp, x, cdf, slope })
    }

    pub fn params(&self) -> TiltParams {
        self.params
    }

    /// Invert the CDF at `u` in [0, 1) with monotone cubic interpolation
    /// (Fritsch-Carlson limited Hermite, which preserves monotonicity).
    fn inverse_cdf(&self, u: f64) -> f64 {
        let n = self.x.len();
        // First index with cdf > u, minus one.
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.cdf[mid] <= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let df = self.cdf[hi] - self.cdf[lo];
        if df <= 0.0 {
            return self.x[lo];
        }
        let t = (u - self.cdf[lo]) / df;
        let dx = self.x[hi] - self.x[lo];
        let delta = dx / df;
        let m0 = self.slope[lo].min(3.0 * delta);
        let m1 = self.slope[hi].min(3.0 * delta);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.x[lo] + h10 * df * m0 + h01 * self.x[hi] + h11 * df * m1
    }

    /// One draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.inverse_cdf(u)
    }
}
