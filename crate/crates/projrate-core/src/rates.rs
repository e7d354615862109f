//! Rate functions for low-dimensional projections: the averaged transform
//! Λ(D, c) = E[Λ̄(D·g, c)] over a standard Gaussian g, its Legendre
//! transform J, and the derived rate functions for the norm, the ball, and
//! the maximum coordinate.
//!
//! The vector form Λ(α, b, c) = E[Λ̄(⟨α,g⟩ + b·g₀, c)] depends on (α, b)
//! only through D = ‖(α, b)‖₂, because the auxiliary Gaussian linear form
//! has law N(0, D²). The supremum defining the Legendre transform is then
//! attained with the dual variables aligned to the primal point, so the full
//! rate I(w, r, s) collapses to J(r, s) = sup_{v ≥ 0, c < T} {v·r + c·s −
//! Λ(v, c)}: a two-dimensional concave maximization. A direct
//! multi-dimensional maximization oracle in the test suite guards this
//! reduction.
//!
//! The ball rate is the contraction 𝓘_p(w, r) = inf_{s > 0} J(s^{1/p}·r, s).
//! The scaling s^{1/p} follows the y^{−1/p} density representation; the
//! alternative x^{1/p} reading fails the consistency check against the
//! closed-form ℓ₂ norm rate and is therefore rejected. Similarly the radial
//! argument uses √(r² − ‖w‖²): only the r² reading is dimensionally
//! consistent with the norm decomposition that motivates it.
//!
//! inf_s I_p(w, r, s) without the s^{1/p} rescaling (a plain infimum over
//! the third argument) appears as a definition but in no theorem, and is
//! deliberately not implemented.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mgf::LogMGFOracle;
use crate::num::fmath;

/// Nodes and weights for expectations against the standard normal law
/// (Gauss–Hermite in the probabilists' convention), exact on polynomials of
/// degree 2n − 1.
///
/// Λ̄ grows quadratically in its first argument, so 128 nodes integrate
/// E[Λ̄(D·g, c)] far below the optimizer tolerances.
#[derive(Clone, Debug)]
pub struct GaussianQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Nonnegative nodes with doubled weights, for even integrands.
    pos_nodes: Vec<f64>,
    pos_weights: Vec<f64>,
}

impl GaussianQuadrature {
    /// Golub–Welsch on the Jacobi matrix (zero diagonal, off-diagonal √k),
    /// eigenvalues polished by Newton on the orthonormal recurrence and
    /// weights from the Christoffel numbers 1/Σ_k p_k(x)². Nodes are
    /// symmetrized in ± pairs so even integrands fold exactly.
    pub fn standard_normal(n: usize) -> Result<Self> {
        if n == 0 || n > 512 {
            return Err(Error::InvalidParameter("quadrature size must be in 1..=512"));
        }
        let mut jac = nalgebra::DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let off = fmath::sqrt(k as f64);
            jac[(k - 1, k)] = off;
            jac[(k, k - 1)] = off;
        }
        let mut nodes: Vec<f64> = jac.symmetric_eigen().eigenvalues.iter().copied().collect();
        nodes.sort_by(f64::total_cmp);
        // Orthonormal recurrence p_{k+1} = (x p_k − √k p_{k−1}) / √(k+1),
        // with p_n'(x) = √n p_{n−1}(x); one or two Newton steps pin each
        // node to machine precision.
        let eval = |x: f64| -> (f64, f64, f64) {
            let mut prev = 0.0f64;
            let mut cur = 1.0f64;
            let mut christoffel = 1.0f64;
            for k in 0..n {
                let next = (x * cur - fmath::sqrt(k as f64) * prev) / fmath::sqrt(k as f64 + 1.0);
                prev = cur;
                cur = next;
                if k + 1 < n {
                    christoffel += cur * cur;
                }
            }
            (cur, fmath::sqrt(n as f64) * prev, christoffel)
        };
        for x in nodes.iter_mut() {
            for _ in 0..2 {
                let (pn, dpn, _) = eval(*x);
                if dpn != 0.0 {
                    *x -= pn / dpn;
                }
            }
        }
        // Exact ± symmetry: average each outer pair.
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let mag = 0.5 * (nodes[j] - nodes[i]);
            nodes[i] = -mag;
            nodes[j] = mag;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        let mut weights = Vec::with_capacity(n);
        for &x in &nodes {
            let (_, _, chr) = eval(x);
            weights.push(1.0 / chr);
        }
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let w = 0.5 * (weights[i] + weights[j]);
            weights[i] = w;
            weights[j] = w;
        }
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        let mut pos_nodes = Vec::new();
        let mut pos_weights = Vec::new();
        for i in 0..n {
            if nodes[i] > 0.0 {
                pos_nodes.push(nodes[i]);
                pos_weights.push(2.0 * weights[i]);
            } else if nodes[i] == 0.0 {
                pos_nodes.push(0.0);
                pos_weights.push(weights[i]);
            }
        }
        Ok(GaussianQuadrature { nodes, weights, pos_nodes, pos_weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// E[f(g)] for g standard normal.
    pub fn expect(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// E[f(g)] for even f, folding the ± pairs.
    fn expect_even(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.pos_nodes.iter().zip(&self.pos_weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Outcome classification of a rate evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateStatus {
    /// Converged interior maximum; first-order conditions hold to 1e−6.
    Finite,
    /// The supremum is +∞ (iterates diverge along an ascent path).
    Infinite,
    /// Converged with c* pinned against the domain boundary T.
    BoundaryT,
    /// Optimizer failed to certify first-order conditions.
    NotConverged,
    /// The queried point lies outside the space (‖w‖₂ > r).
    InvalidPoint,
}

impl RateStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RateStatus::Finite => "finite",
            RateStatus::Infinite => "infinite",
            RateStatus::BoundaryT => "boundary-T",
            RateStatus::NotConverged => "not-converged",
            RateStatus::InvalidPoint => "invalid-point",
        }
    }
}

impl core::fmt::Display for RateStatus {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Value and maximizer of a rate evaluation.
#[derive(Clone, Copy, Debug)]
pub struct RateResult {
    /// The rate; +∞ when the supremum diverges or the point is invalid.
    pub value: f64,
    /// (v*, c*) attaining the supremum, when finite.
    pub argmax: Option<(f64, f64)>,
    pub status: RateStatus,
    /// Optimal auxiliary scale s for the ball and max rates.
    pub s_opt: Option<f64>,
}

impl RateResult {
    fn infinite() -> Self {
        RateResult {
            value: f64::INFINITY,
            argmax: None,
            status: RateStatus::Infinite,
            s_opt: None,
        }
    }

    fn invalid() -> Self {
        RateResult {
            value: f64::INFINITY,
            argmax: None,
            status: RateStatus::InvalidPoint,
            s_opt: None,
        }
    }
}

/// Λ(D, c) = E[Λ̄(D·g, c)] over a standard Gaussian g.
pub fn lambda_d(d: f64, c: f64, oracle: &LogMGFOracle) -> Result<f64> {
    let quad = GaussianQuadrature::standard_normal(128)?;
    let eng = Engine::new(oracle, &quad);
    eng.check(d, c)?;
    Ok(eng.lambda(d, c))
}

/// Gradient (∂_D, ∂_c) of Λ(D, c), by quadrature of the oracle derivatives.
pub fn lambda_d_grad(d: f64, c: f64, oracle: &LogMGFOracle) -> Result<(f64, f64)> {
    let quad = GaussianQuadrature::standard_normal(128)?;
    let eng = Engine::new(oracle, &quad);
    eng.check(d, c)?;
    Ok(eng.grad(d, c))
}

/// ∇Λ_m(û, b, c) = (ŵ, t, s) through the radial structure: with
/// D = ‖(û, b)‖₂ the u- and b-components are ∂_D Λ·(û/D, b/D) (zero when
/// D = 0) and s = ∂_c Λ.
pub fn grad_lambda_m(
    u_hat: &[f64],
    b: f64,
    c: f64,
    oracle: &LogMGFOracle,
) -> Result<(Vec<f64>, f64, f64)> {
    let d2: f64 = u_hat.iter().map(|&v| v * v).sum::<f64>() + b * b;
    let d = fmath::sqrt(d2);
    let (dd, dc) = lambda_d_grad(d, c, oracle)?;
    if d == 0.0 {
        return Ok((alloc::vec![0.0; u_hat.len()], 0.0, dc));
    }
    let w_hat: Vec<f64> = u_hat.iter().map(|&v| dd * v / d).collect();
    Ok((w_hat, dd * b / d, dc))
}

/// J(r, s) = sup_{v ≥ 0, c < T} {v·r + c·s − Λ(v, c)}: the Legendre
/// transform that every rate function reduces to. Divergence is a status,
/// not an error.
pub fn legendre_j(r: f64, s: f64, oracle: &LogMGFOracle) -> Result<RateResult> {
    if !(r >= 0.0) || !(s >= 0.0) {
        return Err(Error::InvalidParameter("legendre_j requires r >= 0 and s >= 0"));
    }
    let quad = GaussianQuadrature::standard_normal(128)?;
    Ok(Engine::new(oracle, &quad).maximize(r, s, None))
}

/// I(w, r, s): validates ‖w‖₂ ≤ r (invalid points get the invalid-point
/// status with value +∞) and evaluates J(r, s); the w-dependence provably
/// cancels through the alignment of the dual variables.
pub fn rate_i(w: &[f64], r: f64, s: f64, oracle: &LogMGFOracle) -> Result<RateResult> {
    if !(r >= 0.0) || !(s >= 0.0) {
        return Err(Error::InvalidParameter("rate_i requires r >= 0 and s >= 0"));
    }
    let norm = fmath::sqrt(w.iter().map(|&v| v * v).sum());
    if norm > r * (1.0 + 1e-12) {
        return Ok(RateResult::invalid());
    }
    legendre_j(r, s, oracle)
}

/// Ball rate 𝓘_p(w, r) = inf_{s > 0} I(s^{1/p}w, s^{1/p}r, s), by a coarse
/// scan plus golden-section refinement on log s over [−8, 8].
pub fn rate_ball(w: &[f64], r: f64, p: f64, oracle: &LogMGFOracle) -> Result<RateResult> {
    if p != oracle.p() {
        return Err(Error::InvalidParameter("rate_ball: p must match the oracle"));
    }
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter("rate_ball requires r >= 0"));
    }
    let norm = fmath::sqrt(w.iter().map(|&v| v * v).sum());
    if norm > r * (1.0 + 1e-12) {
        return Ok(RateResult::invalid());
    }
    let quad = GaussianQuadrature::standard_normal(128)?;
    let eng = Engine::new(oracle, &quad);
    infimum_over_scale(&eng, |s| fmath::powf(s, 1.0 / p) * r)
}

/// ℓ₂-norm rate 𝕀_p(r) = sup_{v, c} {v·r + c − Λ(v, c)}: J with the
/// s-coefficient fixed to 1.
pub fn rate_norm2(r: f64, p: f64, oracle: &LogMGFOracle) -> Result<RateResult> {
    if p != oracle.p() {
        return Err(Error::InvalidParameter("rate_norm2: p must match the oracle"));
    }
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter("rate_norm2 requires r >= 0"));
    }
    let quad = GaussianQuadrature::standard_normal(128)?;
    Ok(Engine::new(oracle, &quad).maximize(r, 1.0, None))
}

/// Max-coordinate rate 𝓘_max(r) = 𝓘_p((r, 0, …), r). Even in r: Λ̄ is even
/// in its first argument, so only |r| matters.
pub fn rate_max(r: f64, p: f64, oracle: &LogMGFOracle) -> Result<RateResult> {
    let r = fmath::abs(r);
    rate_ball(&[r], r, p, oracle)
}

/// Tilt parameters for raw-norm exceedance events ‖W_X‖ ≥ r over i.i.d.
/// coordinates. The empirical p-th moment is unconstrained there, so the
/// dominant point minimizes J(r, s) over s with r held fixed. Returns
/// (v*, c*, rate) with c* clamped strictly inside the domain. At p = 2 the
/// minimum sits at s* = 1 + r², where v* = r and c* = 0.
pub(crate) fn raw_norm_tilt(r: f64, oracle: &LogMGFOracle) -> Result<(f64, f64, f64)> {
    let quad = GaussianQuadrature::standard_normal(128)?;
    let eng = Engine::new(oracle, &quad);
    let res = infimum_over_scale(&eng, |_| r)?;
    match res.argmax {
        Some((v, c)) => Ok((v, c.min(oracle.t_bound() - 1e-6), res.value)),
        None => Err(Error::TiltRefused { r }),
    }
}

/// Shared optimizer state: an oracle plus a Gaussian quadrature.
struct Engine<'a> {
    oracle: &'a LogMGFOracle,
    quad: &'a GaussianQuadrature,
    t_bound: f64,
}

/// Objective values above this certify a divergent supremum.
const DIVERGE_VALUE: f64 = 1e6;
/// Iterate magnitudes beyond this, with a live gradient, certify divergence
/// (covers log-slow escapes like the norm rate exactly at r = 1).
const DIVERGE_ITERATE: f64 = 1e10;
/// First-order tolerance for declaring a finite maximum.
const KKT_TOL: f64 = 1e-6;

impl<'a> Engine<'a> {
    fn new(oracle: &'a LogMGFOracle, quad: &'a GaussianQuadrature) -> Self {
        Engine { oracle, quad, t_bound: oracle.t_bound() }
    }

    fn check(&self, d: f64, c: f64) -> Result<()> {
        if !(d >= 0.0) {
            return Err(Error::InvalidParameter("lambda_d requires D >= 0"));
        }
        if c >= self.t_bound {
            return Err(Error::DomainViolation {
                what: "c",
                value: c,
                bound: self.t_bound,
            });
        }
        Ok(())
    }

    /// Λ(v, c); assumes c < T. Integrands are even in the Gaussian node.
    fn lambda(&self, v: f64, c: f64) -> f64 {
        let o = self.oracle;
        self.quad
            .expect_even(|x| o.logmgf_joint(v * x, c).expect("c < T by construction"))
    }

    fn grad(&self, v: f64, c: f64) -> (f64, f64) {
        let o = self.oracle;
        let dd = self
            .quad
            .expect_even(|x| x * o.logmgf_deriv(v * x, c, (1, 0)).expect("c < T"));
        let dc = self
            .quad
            .expect_even(|x| o.logmgf_deriv(v * x, c, (0, 1)).expect("c < T"));
        (dd, dc)
    }

    fn hess(&self, v: f64, c: f64) -> (f64, f64, f64) {
        let o = self.oracle;
        let dvv = self
            .quad
            .expect_even(|x| x * x * o.logmgf_deriv(v * x, c, (2, 0)).expect("c < T"));
        let dvc = self
            .quad
            .expect_even(|x| x * o.logmgf_deriv(v * x, c, (1, 1)).expect("c < T"));
        let dcc = self
            .quad
            .expect_even(|x| o.logmgf_deriv(v * x, c, (0, 2)).expect("c < T"));
        (dvv, dvc, dcc)
    }

    /// sup_{v ≥ 0, c < T} {v·r + c·s − Λ(v, c)} by projected damped Newton
    /// with a fading log-barrier at c = T, multi-started from (0, 0),
    /// (r, 0), the s-matched pure-η tilt (0, (1 − 1/s)/p), and optionally a
    /// warm start.
    fn maximize(&self, r: f64, s: f64, warm: Option<(f64, f64)>) -> RateResult {
        let t = self.t_bound;
        let p = self.oracle.p();
        // Attainability gate: every tilted law is non-degenerate, so its
        // moments obey E|X|^p > |E X|^p strictly. Levels with r^p ≥ s (or
        // with no mass scale at all) lie outside the closure of reachable
        // (mean, p-th moment) pairs and the supremum runs away along a
        // direction where the objective grows without bound, only at a
        // logarithmic pace. Classify them instead of iterating; the relative
        // slack absorbs powf round-trips (sections arrive as s^{1/p}·r) and
        // only swallows a sliver where the rate already exceeds ~13.
        if s <= 0.0 || (r > 0.0 && fmath::powf(r, p) >= s * (1.0 - 1e-12)) {
            return RateResult::infinite();
        }
        let c_matched = if s > 0.0 {
            ((1.0 - 1.0 / s) / p).clamp(-50.0, t - 1e-6)
        } else {
            -50.0
        };
        let mut starts: Vec<(f64, f64)> = Vec::with_capacity(4);
        if let Some(wstart) = warm {
            starts.push((wstart.0.max(0.0), wstart.1.min(t - 1e-9)));
        }
        starts.push((0.0, 0.0));
        starts.push((r, 0.0));
        starts.push((0.0, c_matched));

        let mut best: Option<(f64, (f64, f64), f64)> = None;
        for &start in &starts {
            match self.newton_from(start, r, s) {
                Ascent::Diverged => return RateResult::infinite(),
                Ascent::Reached { v, c, value, kkt } => {
                    let replace = match best {
                        None => true,
                        Some((bv, _, bk)) => {
                            value > bv + 1e-12 || (kkt < bk && value >= bv - 1e-9)
                        }
                    };
                    if replace {
                        best = Some((value, (v, c), kkt));
                    }
                    if kkt <= KKT_TOL * 0.01 {
                        break;
                    }
                }
            }
        }
        let (mut value, (mut v, mut c), mut kkt) = best.expect("at least one start ran");
        if kkt > KKT_TOL {
            // Coordinate-ascent fallback: alternate 1-d Newton steps.
            let refined = self.coordinate_ascent(v, c, r, s);
            match refined {
                Ascent::Diverged => return RateResult::infinite(),
                Ascent::Reached { v: rv, c: rc, value: rval, kkt: rk } => {
                    if rval >= value {
                        v = rv;
                        c = rc;
                        value = rval;
                        kkt = rk;
                    }
                }
            }
        }
        let status = if kkt <= KKT_TOL {
            if t - c <= 1e-8 {
                RateStatus::BoundaryT
            } else {
                RateStatus::Finite
            }
        } else {
            RateStatus::NotConverged
        };
        RateResult { value, argmax: Some((v, c)), status, s_opt: None }
    }

    /// KKT residual: gradient sup-norm with the v ≥ 0 constraint active.
    fn kkt_residual(&self, v: f64, c: f64, r: f64, s: f64) -> f64 {
        let (dd, dc) = self.grad(v, c);
        let gv = r - dd;
        let gc = s - dc;
        let gv_eff = if v <= 0.0 { gv.max(0.0) } else { gv };
        fmath::abs(gv_eff).max(fmath::abs(gc))
    }

    fn objective(&self, v: f64, c: f64, r: f64, s: f64) -> f64 {
        v * r + c * s - self.lambda(v, c)
    }

    fn newton_from(&self, start: (f64, f64), r: f64, s: f64) -> Ascent {
        let t = self.t_bound;
        let mut v = start.0.max(0.0);
        let mut c = start.1.min(t - 1e-9);
        for &mu in &[1e-4, 1e-8, 0.0] {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    break;
                }
                let (dd, dc) = self.grad(v, c);
                let mut gv = r - dd;
                let gc = s - dc - if mu > 0.0 { mu / (t - c) } else { 0.0 };
                let (mut hvv, hvc, mut hcc) = self.hess(v, c);
                if mu > 0.0 {
                    hcc += mu / ((t - c) * (t - c));
                }
                // Active set: v pinned at 0 when the ascent direction points
                // outward.
                let pinned = v <= 0.0 && gv <= 0.0;
                if pinned {
                    gv = 0.0;
                    hvv = 1.0;
                }
                let kkt = fmath::abs(gv).max(fmath::abs(gc));
                if kkt <= KKT_TOL * 1e-2 {
                    break;
                }
                // Solve H Δ = g for the concave Newton ascent step; ridge
                // the (positive semidefinite) Hessian if near-singular.
                let (dv, dcs) = if pinned {
                    (0.0, gc / hcc.max(1e-300))
                } else {
                    let det = hvv * hcc - hvc * hvc;
                    let scale = hvv.abs().max(hcc.abs()).max(1.0);
                    if det <= 1e-13 * scale * scale {
                        let ridge = 1e-8 * scale;
                        let det2 = (hvv + ridge) * (hcc + ridge) - hvc * hvc;
                        (((hcc + ridge) * gv - hvc * gc) / det2,
                         ((hvv + ridge) * gc - hvc * gv) / det2)
                    } else {
                        ((hcc * gv - hvc * gc) / det, (hvv * gc - hvc * gv) / det)
                    }
                };
                // Cap the step at the constraint boundaries, then backtrack.
                let mut alpha: f64 = 1.0;
                if dcs > 0.0 {
                    alpha = alpha.min((t - 1e-12 - c) / dcs);
                }
                if dv < 0.0 && v > 0.0 {
                    alpha = alpha.min(v / -dv);
                }
                if dv < 0.0 && v <= 0.0 {
                    alpha = 0.0;
                }
                let base = self.objective(v, c, r, s)
                    + if mu > 0.0 { mu * fmath::ln(t - c) } else { 0.0 };
                let slope = gv * dv + gc * dcs;
                let mut accepted = false;
                for _ in 0..45 {
                    if alpha <= 0.0 {
                        break;
                    }
                    let nv = (v + alpha * dv).max(0.0);
                    let nc = c + alpha * dcs;
                    if nc < t {
                        let cand = self.objective(nv, nc, r, s)
                            + if mu > 0.0 { mu * fmath::ln(t - nc) } else { 0.0 };
                        if cand >= base + 1e-4 * alpha * slope.max(0.0) && cand.is_finite() {
                            v = nv;
                            c = nc;
                            accepted = true;
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
                if !accepted {
                    break;
                }
                let value = self.objective(v, c, r, s);
                if value > DIVERGE_VALUE {
                    return Ascent::Diverged;
                }
                if (fmath::abs(c) > DIVERGE_ITERATE || v > DIVERGE_ITERATE)
                    && self.kkt_residual(v, c, r, s) > 1e-9
                {
                    return Ascent::Diverged;
                }
            }
        }
        let value = self.objective(v, c, r, s);
        if value > DIVERGE_VALUE {
            return Ascent::Diverged;
        }
        Ascent::Reached { v, c, value, kkt: self.kkt_residual(v, c, r, s) }
    }

    fn coordinate_ascent(&self, v0: f64, c0: f64, r: f64, s: f64) -> Ascent {
        let t = self.t_bound;
        let mut v = v0.max(0.0);
        let mut c = c0.min(t - 1e-9);
        for _ in 0..200 {
            let (dd, dc) = self.grad(v, c);
            let (hvv, _, hcc) = self.hess(v, c);
            let gv = r - dd;
            let gc = s - dc;
            let mut nv = v + gv / hvv.max(1e-300);
            if nv < 0.0 {
                nv = 0.0;
            }
            if self.objective(nv, c, r, s) >= self.objective(v, c, r, s) {
                v = nv;
            }
            let mut ncs = c + gc / hcc.max(1e-300);
            let mut step = ncs - c;
            for _ in 0..60 {
                if ncs < t && self.objective(v, ncs, r, s) >= self.objective(v, c, r, s) {
                    c = ncs;
                    break;
                }
                step *= 0.5;
                ncs = c + step;
            }
            let value = self.objective(v, c, r, s);
            if value > DIVERGE_VALUE {
                return Ascent::Diverged;
            }
            if (fmath::abs(c) > DIVERGE_ITERATE || v > DIVERGE_ITERATE)
                && self.kkt_residual(v, c, r, s) > 1e-9
            {
                return Ascent::Diverged;
            }
            if self.kkt_residual(v, c, r, s) <= KKT_TOL * 0.1 {
                break;
            }
        }
        Ascent::Reached {
            v,
            c,
            value: self.objective(v, c, r, s),
            kkt: self.kkt_residual(v, c, r, s),
        }
    }
}

enum Ascent {
    Reached { v: f64, c: f64, value: f64, kkt: f64 },
    Diverged,
}

/// inf over s of J(section_r(s), s): coarse scan over log s ∈ [−8, 8], then
/// golden-section refinement to 1e−8 in log s, warm-starting each probe
/// from the previous maximizer. The ball rate passes section_r(s) =
/// s^{1/p}·r; raw-norm tilts pass the constant r.
fn infimum_over_scale(
    eng: &Engine<'_>,
    section_r: impl Fn(f64) -> f64,
) -> Result<RateResult> {
    let mut warm: Option<(f64, f64)> = None;
    let probe = |x: f64, warm: &mut Option<(f64, f64)>| -> RateResult {
        let s = fmath::exp(x);
        let rs = section_r(s);
        let res = eng.maximize(rs, s, *warm);
        if let Some(am) = res.argmax {
            if res.status == RateStatus::Finite {
                *warm = Some(am);
            }
        }
        res
    };
    const LO: f64 = -8.0;
    const HI: f64 = 8.0;
    const COARSE: usize = 33;
    let mut best_idx = 0usize;
    let mut best_val = f64::INFINITY;
    let mut coarse: Vec<RateResult> = Vec::with_capacity(COARSE);
    for i in 0..COARSE {
        let x = LO + (HI - LO) * i as f64 / (COARSE - 1) as f64;
        let res = probe(x, &mut warm);
        if res.value < best_val {
            best_val = res.value;
            best_idx = i;
        }
        coarse.push(res);
    }
    if !best_val.is_finite() {
        // Every section diverges: the ball event is impossible at this level.
        return Ok(RateResult::infinite());
    }
    let step = (HI - LO) / (COARSE - 1) as f64;
    let x_best = LO + step * best_idx as f64;
    let mut a = (x_best - step).max(LO);
    let mut b = (x_best + step).min(HI);
    // Golden-section over the bracket.
    let phi = 0.618_033_988_749_894_9;
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = probe(x1, &mut warm);
    let mut f2 = probe(x2, &mut warm);
    while b - a > 1e-8 {
        if f1.value <= f2.value {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = probe(x1, &mut warm);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = probe(x2, &mut warm);
        }
    }
    let (x_opt, mut res) = if f1.value <= f2.value { (x1, f1) } else { (x2, f2) };
    // The coarse minimum may beat the refined bracket when the infimum sits
    // at the scan boundary.
    if coarse[best_idx].value < res.value {
        res = coarse[best_idx];
        res.s_opt = Some(fmath::exp(x_best));
    } else {
        res.s_opt = Some(fmath::exp(x_opt));
    }
    Ok(res)
}

/// Closed-form ℓ₂ rate at p = 2: 𝕀₂(r) = −½ log(1 − r²) for |r| < 1.
#[cfg(test)]
fn i2_closed_form(r: f64) -> f64 {
    -0.5 * fmath::ln_1p(-r * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle(p: f64) -> LogMGFOracle {
        LogMGFOracle::new(p).unwrap()
    }

    #[test]
    fn quadrature_invariants() {
        let q = GaussianQuadrature::standard_normal(128).unwrap();
        assert_eq!(q.len(), 128);
        let total: f64 = q.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
        let m2 = q.expect(|x| x * x);
        assert!((m2 - 1.0).abs() < 1e-12, "second moment {m2}");
        let m4 = q.expect(|x| x * x * x * x);
        assert!((m4 - 3.0).abs() < 1e-10, "fourth moment {m4}");
        let m6 = q.expect(|x| x.powi(6));
        assert!((m6 - 15.0).abs() < 1e-9, "sixth moment {m6}");
        for (i, &x) in q.nodes().iter().enumerate() {
            assert_eq!(x, -q.nodes()[q.len() - 1 - i]);
        }
        let even = q.expect_even(|x| x * x);
        assert!((even - 1.0).abs() < 1e-12);
        assert!(GaussianQuadrature::standard_normal(0).is_err());
    }

    #[test]
    fn quadrature_odd_size_has_center_node() {
        let q = GaussianQuadrature::standard_normal(17).unwrap();
        assert_eq!(q.nodes()[8], 0.0);
        let total: f64 = q.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert!((q.expect(|x| x * x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_d_p2_closed_form() {
        let o = oracle(2.0);
        assert_eq!(lambda_d(0.0, 0.0, &o).unwrap(), 0.0);
        for &(d, c) in &[(0.5, 0.0), (1.7, 0.3), (0.9, -1.0), (2.5, 0.45)] {
            let got = lambda_d(d, c, &o).unwrap();
            let want = -0.5 * fmath::ln(1.0 - 2.0 * c) + d * d / (2.0 * (1.0 - 2.0 * c));
            assert!((got - want).abs() < 1e-10 * want.abs().max(1.0), "({d}, {c})");
        }
        assert!(matches!(
            lambda_d(1.0, 0.5, &o),
            Err(Error::DomainViolation { .. })
        ));
        assert!(lambda_d(-1.0, 0.0, &o).is_err());
    }

    #[test]
    fn lambda_d_gradient_matches_finite_differences() {
        for &p in &[2.0, 3.0] {
            let o = oracle(p);
            let dc_origin = lambda_d_grad(0.0, 0.0, &o).unwrap().1;
            assert!((dc_origin - 1.0).abs() < 1e-9, "p = {p}: ∂_c at origin {dc_origin}");
            for &(d, c) in &[(0.8, 0.1), (1.5, -0.5), (0.3, 0.2)] {
                let (gd, gc) = lambda_d_grad(d, c, &o).unwrap();
                let h = 1e-5;
                let fd_d =
                    (lambda_d(d + h, c, &o).unwrap() - lambda_d(d - h, c, &o).unwrap())
                        / (2.0 * h);
                let fd_c =
                    (lambda_d(d, c + h, &o).unwrap() - lambda_d(d, c - h, &o).unwrap())
                        / (2.0 * h);
                assert!((gd - fd_d).abs() < 1e-5 * fd_d.abs().max(1.0), "p = {p} ({d},{c})");
                assert!((gc - fd_c).abs() < 1e-5 * fd_c.abs().max(1.0), "p = {p} ({d},{c})");
            }
        }
    }

    #[test]
    fn grad_lambda_m_examples() {
        let o = oracle(2.0);
        let (w, t, s) = grad_lambda_m(&[0.0, 0.0, 0.0], 0.0, 0.0, &o).unwrap();
        assert!(w.iter().all(|&x| x == 0.0));
        assert_eq!(t, 0.0);
        assert!((s - 1.0).abs() < 1e-9);

        // Output u-part parallel to the input.
        let u = [0.6, -0.2, 0.3];
        let (w, _, _) = grad_lambda_m(&u, 0.4, 0.1, &o).unwrap();
        let cross01 = w[0] * u[1] - w[1] * u[0];
        let cross12 = w[1] * u[2] - w[2] * u[1];
        assert!(cross01.abs() < 1e-12 && cross12.abs() < 1e-12);

        // Finite differences on the full Λ_m (radial form).
        let o3 = oracle(3.0);
        let b = 0.4;
        let c = 0.05;
        let lam = |u: &[f64], b: f64, c: f64| {
            let d = (u.iter().map(|&x| x * x).sum::<f64>() + b * b).sqrt();
            lambda_d(d, c, &o3).unwrap()
        };
        let (w, t, s) = grad_lambda_m(&u, b, c, &o3).unwrap();
        let h = 1e-5;
        for i in 0..3 {
            let mut up = u;
            up[i] += h;
            let mut dn = u;
            dn[i] -= h;
            let fd = (lam(&up, b, c) - lam(&dn, b, c)) / (2.0 * h);
            assert!((w[i] - fd).abs() < 1e-5 * fd.abs().max(1.0), "component {i}");
        }
        let fd_b = (lam(&u, b + h, c) - lam(&u, b - h, c)) / (2.0 * h);
        assert!((t - fd_b).abs() < 1e-5 * fd_b.abs().max(1.0));
        let fd_c = (lam(&u, b, c + h) - lam(&u, b, c - h)) / (2.0 * h);
        assert!((s - fd_c).abs() < 1e-5 * fd_c.abs().max(1.0));
    }

    #[test]
    fn legendre_j_origin_and_nonnegativity() {
        for &p in &[2.0, 3.0] {
            let o = oracle(p);
            let res = legendre_j(0.0, 1.0, &o).unwrap();
            assert_eq!(res.status, RateStatus::Finite);
            assert!(res.value.abs() < 1e-10, "p = {p}: J(0,1) = {}", res.value);
            let (v, c) = res.argmax.unwrap();
            assert!(v.abs() < 1e-6 && c.abs() < 1e-6);
            for &(r, s) in &[(0.3, 1.2), (0.7, 2.0), (0.1, 0.8)] {
                let res = legendre_j(r, s, &o).unwrap();
                assert!(res.value >= -1e-12, "p = {p} ({r},{s})");
            }
        }
    }

    #[test]
    fn legendre_j_p2_closed_form() {
        let o = oracle(2.0);
        // J(r, s) = (s−1)/2 − ½ log(s − r²) for s > r², with maximizer
        // v* = r/(s−r²), c* = ½(1 − 1/(s−r²)).
        let res = legendre_j(0.5, 1.5, &o).unwrap();
        let want = 0.25 - 0.5 * fmath::ln(1.25);
        assert_eq!(res.status, RateStatus::Finite);
        assert!((res.value - want).abs() < 1e-8, "{} vs {want}", res.value);
        assert!((want - 0.13843).abs() < 1e-5);
        let (v, c) = res.argmax.unwrap();
        assert!((v - 0.4).abs() < 1e-6, "v* = {v}");
        assert!((c - 0.1).abs() < 1e-6, "c* = {c}");

        for &(r, s) in &[(0.0, 0.5), (0.2, 1.1), (0.9, 2.5), (1.4, 3.0)] {
            let res = legendre_j(r, s, &o).unwrap();
            let want = (s - 1.0) / 2.0 - 0.5 * fmath::ln(s - r * r);
            assert!(
                (res.value - want).abs() < 1e-7 * want.abs().max(1.0),
                "({r}, {s}): {} vs {want}",
                res.value
            );
        }
    }

    #[test]
    fn legendre_j_divergence_detected() {
        let o = oracle(2.0);
        // s < r²: the p = 2 transform has no finite supremum.
        let res = legendre_j(1.2, 1.0, &o).unwrap();
        assert_eq!(res.status, RateStatus::Infinite);
        assert!(res.value.is_infinite());
        // s = 0 with r > 0 diverges along c → −∞ (log-slow escape).
        let res = legendre_j(0.5, 0.0, &o).unwrap();
        assert_eq!(res.status, RateStatus::Infinite);
    }

    #[test]
    fn rate_i_matches_j_and_validates_membership() {
        let o = oracle(2.0);
        let a = rate_i(&[0.0, 0.0], 0.0, 1.0, &o).unwrap();
        assert!(a.value.abs() < 1e-10);
        let b = rate_i(&[0.3, 0.1], 0.5, 1.5, &o).unwrap();
        let c = rate_i(&[0.0, 0.45], 0.5, 1.5, &o).unwrap();
        assert!((b.value - c.value).abs() < 1e-10);
        let bad = rate_i(&[0.6, 0.0], 0.5, 1.5, &o).unwrap();
        assert_eq!(bad.status, RateStatus::InvalidPoint);
        assert!(bad.value.is_infinite());
    }

    #[test]
    fn rate_norm2_examples() {
        let o = oracle(2.0);
        let res = rate_norm2(0.5, 2.0, &o).unwrap();
        let want = i2_closed_form(0.5);
        assert!((want - 0.143841).abs() < 1e-6);
        assert!((res.value - want).abs() < 1e-7, "{} vs {want}", res.value);
        let zero = rate_norm2(0.0, 2.0, &o).unwrap();
        assert!(zero.value.abs() < 1e-10);
        assert!(rate_norm2(-0.1, 2.0, &o).is_err());
        assert!(rate_norm2(0.5, 3.0, &o).is_err());
    }

    #[test]
    fn rate_norm2_p2_closed_form_grid() {
        let o = oracle(2.0);
        for i in 1..9 {
            let r = i as f64 / 10.0;
            let res = rate_norm2(r, 2.0, &o).unwrap();
            let want = i2_closed_form(r);
            assert!(
                (res.value - want).abs() < 1e-6 * want.max(1e-6),
                "r = {r}: {} vs {want}",
                res.value
            );
        }
    }

    #[test]
    fn rate_norm2_is_midpoint_convex() {
        let o = oracle(2.0);
        let vals: Vec<f64> = (0..10)
            .map(|i| rate_norm2(i as f64 / 10.0, 2.0, &o).unwrap().value)
            .collect();
        for i in 0..8 {
            assert!(
                vals[i + 1] <= 0.5 * (vals[i] + vals[i + 2]) + 1e-8,
                "midpoint convexity at r = {}",
                (i + 1) as f64 / 10.0
            );
        }
    }

    #[test]
    fn rate_ball_matches_norm_rate_at_p2() {
        let o = oracle(2.0);
        for &r in &[0.2, 0.5, 0.7] {
            let ball = rate_ball(&[0.0, 0.0], r, 2.0, &o).unwrap();
            let want = i2_closed_form(r);
            assert!(
                (ball.value - want).abs() < 1e-5 * want.max(1e-5),
                "r = {r}: {} vs {want}",
                ball.value
            );
            assert_eq!(ball.status, RateStatus::Finite);
            let s = ball.s_opt.unwrap();
            assert!((s - 1.0).abs() < 0.05, "s* = {s} should sit near 1");
        }
    }

    #[test]
    fn rate_ball_zero_and_divergence() {
        let o = oracle(2.0);
        let zero = rate_ball(&[0.0], 0.0, 2.0, &o).unwrap();
        assert!(zero.value.abs() < 1e-9);
        for &r in &[1.0, 1.3] {
            let res = rate_ball(&[0.0], r, 2.0, &o).unwrap();
            assert_eq!(res.status, RateStatus::Infinite, "r = {r}");
            assert!(res.value.is_infinite());
        }
        let bad = rate_ball(&[0.6], 0.5, 2.0, &o).unwrap();
        assert_eq!(bad.status, RateStatus::InvalidPoint);
    }

    #[test]
    fn rate_ball_contraction_consistency_p3() {
        // inf_s J(s^{1/p} r, s) must reproduce the norm rate J(r, 1)'s
        // infimum structure; the two agree for the pure-norm event.
        let o = oracle(3.0);
        let r = 0.4;
        let ball = rate_ball(&[0.0], r, 3.0, &o).unwrap();
        let norm = rate_norm2(r, 3.0, &o).unwrap();
        assert!(
            (ball.value - norm.value).abs() < 1e-4 * norm.value.max(1e-4),
            "ball {} vs norm {}",
            ball.value,
            norm.value
        );
    }

    #[test]
    fn rate_max_examples() {
        let o = oracle(2.0);
        let zero = rate_max(0.0, 2.0, &o).unwrap();
        assert!(zero.value.abs() < 1e-9);
        let a = rate_max(0.5, 2.0, &o).unwrap();
        let b = rate_norm2(0.5, 2.0, &o).unwrap();
        assert!((a.value - b.value).abs() < 1e-5 * b.value, "{} vs {}", a.value, b.value);
        let neg = rate_max(-0.5, 2.0, &o).unwrap();
        assert!((neg.value - a.value).abs() < 1e-12);
    }

    #[test]
    fn duality_involution_spot_checks() {
        for &p in &[2.0, 3.0] {
            let o = oracle(p);
            for &(d, c) in &[(0.7, 0.1), (1.4, -0.8), (0.2, 0.2)] {
                let (r, s) = lambda_d_grad(d, c, &o).unwrap();
                let res = legendre_j(r, s, &o).unwrap();
                assert_eq!(res.status, RateStatus::Finite, "p = {p} ({d}, {c})");
                let (v, cc) = res.argmax.unwrap();
                assert!((v - d).abs() < 1e-4, "p = {p}: v* {v} vs {d}");
                assert!((cc - c).abs() < 1e-4, "p = {p}: c* {cc} vs {c}");
                let want = d * r + c * s - lambda_d(d, c, &o).unwrap();
                assert!((res.value - want).abs() < 1e-7, "p = {p}: {} vs {want}", res.value);
            }
        }
    }

    #[test]
    fn legendre_j_monotone_in_r() {
        let o = oracle(3.0);
        for &s in &[0.8, 1.0, 1.5] {
            let mut prev = -1.0;
            for i in 0..8 {
                let r = i as f64 * 0.15;
                let val = legendre_j(r, s, &o).unwrap().value;
                assert!(val >= prev - 1e-9, "s = {s}, r = {r}");
                prev = val;
            }
        }
    }

    #[test]
    fn raw_norm_tilt_closed_form() {
        // p = 2: inf_s J(r, s) sits at s* = 1 + r² with v* = r, c* = 0 and
        // value r²/2 (the χ² tail rate of the raw projection norm).
        let o = oracle(2.0);
        for &r in &[0.8, 1.118033988749895] {
            let (v, c, rate) = raw_norm_tilt(r, &o).unwrap();
            assert!((v - r).abs() < 1e-5, "r = {r}: v* {v}");
            assert!(c.abs() < 1e-5, "r = {r}: c* {c}");
            assert!((rate - r * r / 2.0).abs() < 1e-6, "r = {r}: rate {rate}");
            assert!(c < o.t_bound());
        }
    }
}
