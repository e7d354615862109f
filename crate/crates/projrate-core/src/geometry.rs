//! Haar-distributed frames on the Stiefel manifold, the projection map
//! y ↦ n^{−1/2} Aᵀy, and the ordered-sequence space 𝒳 with its metric.
//!
//! 𝒳 collects pairs (w, r) where w is a finite sequence, nonincreasing in
//! absolute value, and ‖w‖₂ ≤ r. Projections land there through Π, which
//! sorts the nonzero coordinates and records the Euclidean norm. Ordered
//! sequences are stored truncated to their support; every input here is
//! finite-dimensional, so ℓ² tails never materialize.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::num::fmath;

/// An n×k matrix with orthonormal columns (a k-frame in ℝⁿ).
///
/// Entries are stored row-major so that the rows aᵢ, the per-coordinate
/// weights used by tilted samplers, are contiguous. Immutable after
/// construction; safe to share across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct StiefelFrame {
    n: usize,
    k: usize,
    /// Row-major n×k entries.
    data: Vec<f64>,
}

impl StiefelFrame {
    /// Wrap explicit column data (row-major), validating shape and
    /// orthonormality (colsᵀ·cols = I_k to 1e−12 in max absolute deviation).
    pub fn from_cols(n: usize, k: usize, data: Vec<f64>) -> Result<Self> {
        if k == 0 || k > n || data.len() != n * k {
            return Err(Error::InvalidParameter("frame shape must satisfy 1 <= k <= n"));
        }
        let frame = StiefelFrame { n, k, data };
        let dev = frame.orthonormality_deviation();
        if dev > 1e-12 {
            return Err(Error::Numerical("frame columns are not orthonormal"));
        }
        Ok(frame)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Row i as a slice of length k.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.k + j]
    }

    /// max |(colsᵀ·cols − I)_{jl}|.
    pub fn orthonormality_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for j in 0..self.k {
            for l in j..self.k {
                let mut dot = 0.0;
                for i in 0..self.n {
                    dot += self.entry(i, j) * self.entry(i, l);
                }
                let target = if j == l { 1.0 } else { 0.0 };
                dev = dev.max(fmath::abs(dot - target));
            }
        }
        dev
    }
}

/// Draw a Haar-distributed k-frame in ℝⁿ: thin QR of an n×k matrix of
/// i.i.d. standard Gaussians, with the sign convention that the triangular
/// factor has positive diagonal. The sign fix is what makes the law exactly
/// Haar; an unfixed QR is not (the moment tests against the exact Haar
/// integrals would catch it).
///
/// Gaussians are drawn column by column, so the draw order is reproducible
/// for a given stream. The (probability zero) rank-deficient draw resamples.
pub fn haar_frame<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<StiefelFrame> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter("haar_frame requires 1 <= k <= n"));
    }
    loop {
        let g = DMatrix::from_iterator(
            n,
            k,
            core::iter::repeat_with(|| StandardNormal.sample(rng)).take(n * k),
        );
        let qr = g.qr();
        let r = qr.r();
        if (0..k).any(|j| fmath::abs(r[(j, j)]) < 1e-9) {
            continue;
        }
        let q = qr.q();
        let mut data = alloc::vec![0.0; n * k];
        for i in 0..n {
            for j in 0..k {
                let sign = if r[(j, j)] < 0.0 { -1.0 } else { 1.0 };
                data[i * k + j] = sign * q[(i, j)];
            }
        }
        debug_assert!(
            StiefelFrame { n, k, data: data.clone() }.orthonormality_deviation() <= 1e-12
        );
        return Ok(StiefelFrame { n, k, data });
    }
}

/// n^{−1/2}·colsᵀ·y: the k-dimensional projection of y ∈ ℝⁿ.
pub fn project(frame: &StiefelFrame, y: &[f64]) -> Result<Vec<f64>> {
    if y.len() != frame.n {
        return Err(Error::DimensionMismatch { expected: frame.n, got: y.len() });
    }
    let mut w = alloc::vec![0.0; frame.k];
    for i in 0..frame.n {
        let row = frame.row(i);
        let yi = y[i];
        for j in 0..frame.k {
            w[j] += row[j] * yi;
        }
    }
    let scale = 1.0 / fmath::sqrt(frame.n as f64);
    for v in w.iter_mut() {
        *v *= scale;
    }
    Ok(w)
}

/// A point of 𝒳: an ordered finite sequence and a norm bound.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderedProjection {
    /// Nonzero entries, nonincreasing in absolute value; ties in magnitude
    /// are resolved in decreasing signed order.
    pub w: Vec<f64>,
    /// Euclidean norm of the original vector; ‖w‖₂ ≤ r.
    pub r: f64,
}

/// The representative map Π: sort the nonzero entries of x by decreasing
/// absolute value (ties: decreasing signed order, stable), and record
/// r = ‖x‖₂. Invariant under permutations of the input.
pub fn pi_map(x: &[f64]) -> OrderedProjection {
    let mut w: Vec<f64> = x.iter().copied().filter(|&v| v != 0.0).collect();
    w.sort_by(|a, b| {
        fmath::abs(*b)
            .total_cmp(&fmath::abs(*a))
            .then_with(|| b.total_cmp(a))
    });
    let r = fmath::sqrt(x.iter().map(|&v| v * v).sum());
    OrderedProjection { w, r }
}

/// Metric on 𝒳: ‖a.w − b.w‖_∞ + |a.r − b.r|, sequences zero-padded to a
/// common length.
pub fn dist_x(a: &OrderedProjection, b: &OrderedProjection) -> f64 {
    let len = a.w.len().max(b.w.len());
    let mut sup = 0.0f64;
    for i in 0..len {
        let av = a.w.get(i).copied().unwrap_or(0.0);
        let bv = b.w.get(i).copied().unwrap_or(0.0);
        sup = sup.max(fmath::abs(av - bv));
    }
    sup + fmath::abs(a.r - b.r)
}
