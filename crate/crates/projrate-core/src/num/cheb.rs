//! Piecewise Chebyshev interpolation used to memoize expensive univariate
//! maps (the one-argument log-MGF and its first two derivatives). Each panel
//! doubles its degree until an out-of-node verification grid meets the target
//! accuracy, so the stored table is certified rather than assumed.

#![allow(dead_code)]

use alloc::vec::Vec;

use super::fmath;
use crate::error::{Error, Result};

/// One Chebyshev expansion on [a, b].
#[derive(Clone, Debug)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    coeffs: Vec<f64>,
}

impl Panel {
    /// Fit `f` on [a, b] with `n` first-kind Chebyshev nodes.
    fn fit(f: &impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Panel {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let pi = core::f64::consts::PI;
        let mut fx = Vec::with_capacity(n);
        for k in 0..n {
            let theta = pi * (k as f64 + 0.5) / n as f64;
            fx.push(f(mid + half * fmath::cos(theta)));
        }
        let mut coeffs = Vec::with_capacity(n);
        for j in 0..n {
            let mut s = 0.0;
            for (k, fk) in fx.iter().enumerate() {
                s += fk * fmath::cos(pi * j as f64 * (k as f64 + 0.5) / n as f64);
            }
            coeffs.push(2.0 * s / n as f64);
        }
        coeffs[0] *= 0.5;
        Panel { a, b, coeffs }
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let t2 = 2.0 * t;
        let mut d = 0.0;
        let mut dd = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let sv = d;
            d = t2 * d - dd + c;
            dd = sv;
        }
        t * d - dd + self.coeffs[0]
    }
}

/// A map memoized panel by panel over [0, t_max].
#[derive(Clone, Debug)]
pub struct PiecewiseCheb {
    panels: Vec<Panel>,
    pub t_max: f64,
}

impl PiecewiseCheb {
    /// Build panels over the given breakpoints. Each panel's degree doubles
    /// (starting at 17 nodes, capped at 513) until the interpolant matches
    /// `f` on a shifted verification grid within `tol` in the mixed
    /// absolute/relative sense |err| <= tol * max(1, |f|).
    pub fn build(
        f: impl Fn(f64) -> f64,
        breakpoints: &[f64],
        tol: f64,
    ) -> Result<PiecewiseCheb> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidParameter("need at least one panel"));
        }
        let mut panels = Vec::with_capacity(breakpoints.len() - 1);
        for w in breakpoints.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut n = 17usize;
            let panel = loop {
                let candidate = Panel::fit(&f, a, b, n);
                // Verify off the fitting nodes: 33 equispaced interior points.
                let mut ok = true;
                for j in 1..=33 {
                    let x = a + (b - a) * j as f64 / 34.0;
                    let want = f(x);
                    let got = candidate.eval(x);
                    if (want - got).abs() > tol * fmath::abs(want).max(1.0) {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    break candidate;
                }
                n *= 2;
                if n > 513 {
                    return Err(Error::Numerical("chebyshev panel failed to converge"));
                }
            };
            panels.push(panel);
        }
        Ok(PiecewiseCheb { t_max: breakpoints[breakpoints.len() - 1], panels })
    }

    /// Evaluate; the caller guarantees 0 <= x <= t_max.
    pub fn eval(&self, x: f64) -> f64 {
        // Panels are few (typically 5); a linear scan beats branch-heavy
        // binary search at this size.
        for p in &self.panels {
            if x <= p.b {
                return p.eval(x);
            }
        }
        self.panels[self.panels.len() - 1].eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_smooth_function_to_tolerance() {
        let f = |x: f64| fmath::exp(-0.3 * x) * (1.0 + x * x).ln() + 0.1 * x;
        let interp = PiecewiseCheb::build(f, &[0.0, 2.0, 8.0, 32.0], 1e-11).unwrap();
        let mut worst = 0.0f64;
        let mut x = 0.0;
        while x <= 32.0 {
            let err = (interp.eval(x) - f(x)).abs() / f(x).abs().max(1.0);
            worst = worst.max(err);
            x += 0.0173;
        }
        assert!(worst < 1e-10, "worst relative error {worst}");
    }

    #[test]
    fn rejects_degenerate_breakpoints() {
        assert!(PiecewiseCheb::build(|x| x, &[0.0], 1e-10).is_err());
    }
}
