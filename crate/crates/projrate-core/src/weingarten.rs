//! Exact moments of Haar orthogonal frames via the Weingarten calculus,
//! plus Wick moments of independent Gaussians for comparison.
//!
//! A mixed moment E[a_{i₁j₁}···a_{i_{2d}j_{2d}}] over the Haar measure equals
//!
//!   Σ_{𝔪,𝔫 ∈ ℳ(2d)} Wg(𝔪,𝔫) · Π_{(a,b)∈𝔪} δ_{i_a i_b} · Π_{(a,b)∈𝔫} δ_{j_a j_b},
//!
//! where ℳ(2d) is the set of pair partitions of {1,…,2d} and the Weingarten
//! matrix Wg is the pseudo-inverse of the Gram matrix with entries
//! n^{loop(𝔪,𝔫)}. The Gram matrix is inverted in floating point with a
//! singular-value cutoff (degrees are capped at d = 5, so the matrices stay
//! at most 945 by 945, and every value used downstream is cross-checked
//! against independent closed forms).
//!
//! The asymptotic entry magnitude is (Π c_{ρᵢ−1}) n^{−2d+ℓ(ρ)} with Catalan
//! numbers c. The sign of the printed leading coefficient does not match the
//! exact d = 2 off-type entry (which is negative), so `weingarten_asymptotic`
//! returns the magnitude only; every bound that consumes it sums absolute
//! values anyway.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::num::fmath;

/// Largest supported half-degree; |ℳ(10)| = 945 keeps every table small.
pub const MAX_HALF_DEGREE: usize = 5;

/// A pair partition of {1,…,2d} in canonical form: within each pair the
/// smaller element comes first, and pairs are sorted by their first element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairPartition {
    d: usize,
    /// 1-based index pairs (lo, hi).
    pairs: Vec<(u8, u8)>,
}

impl PairPartition {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn pairs(&self) -> &[(u8, u8)] {
        &self.pairs
    }

    /// True when `idx` (0-based positions 1,…,2d) is constant on every pair.
    fn matches(&self, idx: &[usize]) -> bool {
        self.pairs
            .iter()
            .all(|&(a, b)| idx[a as usize - 1] == idx[b as usize - 1])
    }
}

/// All pair partitions of {1,…,2d}, canonical and lexicographically sorted;
/// there are (2d−1)!! of them.
pub fn pair_partitions(d: usize) -> Result<Vec<PairPartition>> {
    if d == 0 || d > MAX_HALF_DEGREE {
        return Err(Error::UnsupportedDegree { degree: d, max: MAX_HALF_DEGREE });
    }
    let mut out = Vec::new();
    let mut used = alloc::vec![false; 2 * d + 1];
    let mut pairs: Vec<(u8, u8)> = Vec::with_capacity(d);
    // Always pair the smallest unused index with each larger unused partner,
    // in increasing order: this emits exactly the canonical forms, sorted.
    fn recurse(
        used: &mut [bool],
        pairs: &mut Vec<(u8, u8)>,
        out: &mut Vec<PairPartition>,
        d: usize,
    ) {
        let lo = match (1..=2 * d).find(|&i| !used[i]) {
            Some(i) => i,
            None => {
                out.push(PairPartition { d, pairs: pairs.clone() });
                return;
            }
        };
        used[lo] = true;
        for hi in (lo + 1)..=(2 * d) {
            if used[hi] {
                continue;
            }
            used[hi] = true;
            pairs.push((lo as u8, hi as u8));
            recurse(used, pairs, out, d);
            pairs.pop();
            used[hi] = false;
        }
        used[lo] = false;
    }
    recurse(&mut used, &mut pairs, &mut out, d);
    Ok(out)
}

/// Loop count and coset type of a pair of pair partitions: the union graph
/// Γ(𝔪,𝔫) on {1,…,2d} with both edge sets decomposes into even cycles; the
/// coset type ρ lists the halved component sizes in decreasing order, and
/// `loops` is the number of components ℓ(ρ).
pub fn coset_type(m: &PairPartition, nn: &PairPartition) -> (usize, Vec<usize>) {
    assert_eq!(m.d, nn.d, "coset_type requires equal half-degrees");
    let verts = 2 * m.d;
    let mut parent: Vec<usize> = (0..verts).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(a, b) in m.pairs.iter().chain(nn.pairs.iter()) {
        let ra = find(&mut parent, a as usize - 1);
        let rb = find(&mut parent, b as usize - 1);
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut size = alloc::vec![0usize; verts];
    for v in 0..verts {
        let r = find(&mut parent, v);
        size[r] += 1;
    }
    let mut rho: Vec<usize> = size.into_iter().filter(|&s| s > 0).map(|s| s / 2).collect();
    rho.sort_unstable_by(|a, b| b.cmp(a));
    (rho.len(), rho)
}

/// Gram and Weingarten matrices for half-degree d in dimension n, with the
/// coset type of every entry and the Catalan numbers c₀,…,c_{d−1}.
///
/// Immutable after construction; safe to share and cache.
#[derive(Clone, Debug)]
pub struct WeingartenTable {
    d: usize,
    n: usize,
    partitions: Vec<PairPartition>,
    gram: DMatrix<f64>,
    wg: DMatrix<f64>,
    /// coset_ids[i·m + j] indexes into rho_list.
    coset_ids: Vec<u8>,
    rho_list: Vec<Vec<usize>>,
    catalan: Vec<u64>,
}

/// Build the Weingarten table: Gram entries n^{loop(𝔪,𝔫)}, pseudo-inverse by
/// symmetric eigendecomposition with eigenvalues below 1e−10 of the largest
/// magnitude treated as zero. The Gram matrix is invertible for n ≥ 2d; the
/// pseudo-inverse covers smaller n as well.
pub fn weingarten_table(d: usize, n: usize) -> Result<WeingartenTable> {
    if n == 0 {
        return Err(Error::InvalidParameter("weingarten_table requires n >= 1"));
    }
    let partitions = pair_partitions(d)?;
    let m = partitions.len();
    let mut gram = DMatrix::<f64>::zeros(m, m);
    let mut coset_ids = alloc::vec![0u8; m * m];
    let mut rho_list: Vec<Vec<usize>> = Vec::new();
    for i in 0..m {
        for j in i..m {
            let (loops, rho) = coset_type(&partitions[i], &partitions[j]);
            let id = match rho_list.iter().position(|r| *r == rho) {
                Some(p) => p,
                None => {
                    rho_list.push(rho);
                    rho_list.len() - 1
                }
            };
            coset_ids[i * m + j] = id as u8;
            coset_ids[j * m + i] = id as u8;
            let entry = fmath::powi(n as f64, loops as u32);
            gram[(i, j)] = entry;
            gram[(j, i)] = entry;
        }
    }
    let eig = gram.clone().symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().fold(0.0f64, |a, &v| a.max(fmath::abs(v)));
    let cutoff = 1e-10 * max_ev;
    let mut inv = eig.eigenvalues.clone();
    for v in inv.iter_mut() {
        *v = if fmath::abs(*v) > cutoff { 1.0 / *v } else { 0.0 };
    }
    let vt = eig.eigenvectors.transpose();
    let mut scaled = eig.eigenvectors.clone();
    for (c, &iv) in inv.iter().enumerate() {
        scaled.column_mut(c).scale_mut(iv);
    }
    let wg = scaled * vt;
    let mut catalan = Vec::with_capacity(d);
    let mut c = 1u64;
    for k in 0..d {
        catalan.push(c);
        c = c * 2 * (2 * k as u64 + 1) / (k as u64 + 2);
    }
    Ok(WeingartenTable { d, n, partitions, gram, wg, coset_ids, rho_list, catalan })
}

impl WeingartenTable {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn partitions(&self) -> &[PairPartition] {
        &self.partitions
    }

    pub fn size(&self) -> usize {
        self.partitions.len()
    }

    pub fn gram_entry(&self, i: usize, j: usize) -> f64 {
        self.gram[(i, j)]
    }

    pub fn wg_entry(&self, i: usize, j: usize) -> f64 {
        self.wg[(i, j)]
    }

    /// Coset type ρ of the entry (i, j).
    pub fn coset(&self, i: usize, j: usize) -> &[usize] {
        &self.rho_list[self.coset_ids[i * self.size() + j] as usize]
    }

    /// c₀,…,c_{d−1}.
    pub fn catalan(&self) -> &[u64] {
        &self.catalan
    }

    /// Max relative deviations of (gram·wg·gram, wg·gram·wg) from (gram, wg).
    pub fn pseudo_inverse_deviation(&self) -> (f64, f64) {
        let gwg = &self.gram * &self.wg * &self.gram;
        let wgw = &self.wg * &self.gram * &self.wg;
        let scale_g = self.gram.amax();
        let scale_w = self.wg.amax();
        let dev_g = (&gwg - &self.gram).amax() / scale_g;
        let dev_w = (&wgw - &self.wg).amax() / scale_w;
        (dev_g, dev_w)
    }

    /// Σ_𝔪 Wg(𝔪,𝔫) for each 𝔫: the row-index sum that appears in moments
    /// where all row indices coincide.
    fn wg_column_totals(&self) -> Vec<f64> {
        (0..self.size())
            .map(|j| (0..self.size()).map(|i| self.wg[(i, j)]).sum())
            .collect()
    }

    /// Exact Haar moment with this table; index slices must have length 2d.
    fn moment(&self, row_idx: &[usize], col_idx: &[usize]) -> f64 {
        let row_ok: Vec<bool> =
            self.partitions.iter().map(|p| p.matches(row_idx)).collect();
        let col_ok: Vec<bool> =
            self.partitions.iter().map(|p| p.matches(col_idx)).collect();
        let mut total = 0.0;
        for i in 0..self.size() {
            if !row_ok[i] {
                continue;
            }
            for j in 0..self.size() {
                if col_ok[j] {
                    total += self.wg[(i, j)];
                }
            }
        }
        total
    }
}

/// Exact Haar expectation E[Π_s a_{i_s j_s}] for an n×n Haar orthogonal
/// matrix (or the first k columns of one; only the indices matter). Indices
/// are 0-based. Odd degree returns 0 (the defining sum is empty).
pub fn haar_moment(row_idx: &[usize], col_idx: &[usize], n: usize) -> Result<f64> {
    if row_idx.len() != col_idx.len() {
        return Err(Error::DimensionMismatch { expected: row_idx.len(), got: col_idx.len() });
    }
    if row_idx.iter().chain(col_idx.iter()).any(|&i| i >= n) {
        return Err(Error::InvalidParameter("moment index exceeds matrix dimension"));
    }
    if row_idx.is_empty() {
        return Ok(1.0);
    }
    if row_idx.len() % 2 == 1 {
        return Ok(0.0);
    }
    let d = row_idx.len() / 2;
    let table = weingarten_table(d, n)?;
    Ok(table.moment(row_idx, col_idx))
}

/// Wick moment E[Π_s g_{l_s}] for independent standard Gaussians labeled by
/// `labels`: the sum over pair partitions of products of pair covariances,
/// which collapses to Π_label (count − 1)!! when every label has even
/// multiplicity and to 0 otherwise.
pub fn wick_moment(labels: &[usize]) -> f64 {
    if labels.len() % 2 == 1 {
        return 0.0;
    }
    let mut sorted: Vec<usize> = labels.to_vec();
    sorted.sort_unstable();
    let mut total = 1.0f64;
    let mut i = 0;
    while i < sorted.len() {
        let mut count = 1;
        while i + count < sorted.len() && sorted[i + count] == sorted[i] {
            count += 1;
        }
        if count % 2 == 1 {
            return 0.0;
        }
        let mut df = 1.0f64;
        let mut v = count as i64 - 1;
        while v > 1 {
            df *= v as f64;
            v -= 2;
        }
        total *= df;
        i += count;
    }
    total
}

/// Leading-order magnitude of the Weingarten entry of coset type ρ:
/// (Π c_{ρᵢ−1}) · n^{−2d+ℓ(ρ)} with d = Σρᵢ and Catalan numbers c.
/// Magnitude only: the exact entries alternate in sign (the d = 2 off-type
/// entry is negative), and every downstream bound sums absolute values.
pub fn weingarten_asymptotic(rho: &[usize], n: usize) -> f64 {
    let d: usize = rho.iter().sum();
    let ell = rho.len();
    let mut coeff = 1.0f64;
    for &part in rho {
        let mut c = 1.0f64;
        for k in 0..part.saturating_sub(1) {
            c = c * 2.0 * (2.0 * k as f64 + 1.0) / (k as f64 + 2.0);
        }
        coeff *= c;
    }
    coeff * fmath::powf(n as f64, ell as f64 - 2.0 * d as f64)
}

/// Exact and Gaussian-surrogate values of a mixed frame-row moment.
#[derive(Clone, Copy, Debug)]
pub struct MomentMatch {
    /// E[(√n a₁ⱼ)^α ⟨u, √n a₁⟩^β] over the Haar measure.
    pub exact: f64,
    /// E[gⱼ^α ⟨u, g⟩^β] for g a standard Gaussian vector.
    pub gaussian: f64,
    /// exact / gaussian; NaN when both vanish.
    pub ratio: f64,
}

/// Compare the exact mixed moment of a Haar frame row against its Gaussian
/// surrogate. The inner product is expanded multinomially, grouped by the
/// multiset of coordinate labels; each pure moment goes through the
/// Weingarten table (exact) and the Wick formula (Gaussian). Coordinates
/// where u vanishes, and label multisets with an odd count (zero on both
/// sides by sign symmetry), are pruned.
pub fn moment_match_check(
    alpha: usize,
    beta: usize,
    j: usize,
    u: &[f64],
    n: usize,
    k: usize,
) -> Result<MomentMatch> {
    if u.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: u.len() });
    }
    if j >= k || k > n {
        return Err(Error::InvalidParameter("moment_match_check requires j < k <= n"));
    }
    let degree = alpha + beta;
    if degree > 2 * MAX_HALF_DEGREE {
        return Err(Error::UnsupportedDegree { degree, max: 2 * MAX_HALF_DEGREE });
    }
    if degree == 0 {
        return Ok(MomentMatch { exact: 1.0, gaussian: 1.0, ratio: 1.0 });
    }
    if degree % 2 == 1 {
        // Every monomial has odd total degree: zero on both sides.
        return Ok(MomentMatch { exact: 0.0, gaussian: 0.0, ratio: f64::NAN });
    }
    let d = degree / 2;
    let table = weingarten_table(d, n)?;
    let col_totals = table.wg_column_totals();
    let support: Vec<usize> = (0..k).filter(|&l| u[l] != 0.0).collect();
    let n_pow_d = fmath::powi(n as f64, d as u32);

    let mut exact = 0.0f64;
    let mut gaussian = 0.0f64;
    let mut counts = alloc::vec![0usize; k];
    // Assign even multiplicities to each supported coordinate (label j takes
    // the parity of alpha); odd assignments vanish on both sides.
    fn recurse(
        pos: usize,
        remaining: usize,
        support: &[usize],
        u: &[f64],
        alpha: usize,
        j: usize,
        counts: &mut [usize],
        table: &WeingartenTable,
        col_totals: &[f64],
        n_pow_d: f64,
        exact: &mut f64,
        gaussian: &mut f64,
    ) {
        if pos == support.len() {
            if remaining != 0 {
                return;
            }
            let mut coeff = 1.0f64;
            let mut assigned = 0usize;
            let mut labels: Vec<usize> = Vec::with_capacity(alpha + assigned);
            for &l in support.iter() {
                let m = counts[l];
                // Multinomial factor C(assigned + m, m), exact at these sizes.
                for t in 1..=m {
                    coeff *= (assigned + t) as f64 / t as f64;
                }
                assigned += m;
                coeff *= fmath::powf(u[l], m as f64);
                labels.extend(core::iter::repeat(l).take(m));
            }
            labels.extend(core::iter::repeat(j).take(alpha));
            // All row indices coincide, so every row partition matches and
            // the exact moment needs only the column-matching partitions.
            let mut haar = 0.0f64;
            for (idx, part) in table.partitions().iter().enumerate() {
                if part.matches(&labels) {
                    haar += col_totals[idx];
                }
            }
            *exact += coeff * n_pow_d * haar;
            *gaussian += coeff * wick_moment(&labels);
            return;
        }
        let l = support[pos];
        let parity = if l == j { alpha % 2 } else { 0 };
        let mut m = parity;
        while m <= remaining {
            counts[l] = m;
            recurse(
                pos + 1,
                remaining - m,
                support,
                u,
                alpha,
                j,
                counts,
                table,
                col_totals,
                n_pow_d,
                exact,
                gaussian,
            );
            counts[l] = 0;
            m += 2;
        }
    }
    // When j is unsupported and alpha is odd, no assignment survives and the
    // recursion contributes nothing, leaving 0/0 below.
    if support.iter().all(|&l| l != j) && alpha % 2 == 1 {
        return Ok(MomentMatch { exact: 0.0, gaussian: 0.0, ratio: f64::NAN });
    }
    recurse(
        0,
        beta,
        &support,
        u,
        alpha,
        j,
        &mut counts,
        &table,
        &col_totals,
        n_pow_d,
        &mut exact,
        &mut gaussian,
    );
    let ratio = exact / gaussian;
    Ok(MomentMatch { exact, gaussian, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts_and_canonical_form() {
        assert_eq!(pair_partitions(1).unwrap().len(), 1);
        assert_eq!(pair_partitions(2).unwrap().len(), 3);
        assert_eq!(pair_partitions(3).unwrap().len(), 15);
        assert_eq!(pair_partitions(4).unwrap().len(), 105);
        assert_eq!(pair_partitions(5).unwrap().len(), 945);
        assert!(matches!(pair_partitions(6), Err(Error::UnsupportedDegree { .. })));
        assert!(pair_partitions(0).is_err());

        let d1 = pair_partitions(1).unwrap();
        assert_eq!(d1[0].pairs(), &[(1, 2)]);
        for part in pair_partitions(4).unwrap() {
            let mut seen = alloc::vec![false; 9];
            let mut prev_lo = 0;
            for &(a, b) in part.pairs() {
                assert!(a < b);
                assert!(a > prev_lo, "first elements must increase");
                prev_lo = a;
                for v in [a, b] {
                    assert!(!seen[v as usize]);
                    seen[v as usize] = true;
                }
            }
        }
    }

    #[test]
    fn partitions_are_lexicographically_sorted() {
        let parts = pair_partitions(3).unwrap();
        for w in parts.windows(2) {
            assert!(w[0].pairs() < w[1].pairs());
        }
    }

    #[test]
    fn coset_type_examples() {
        let d2 = pair_partitions(2).unwrap();
        // Partitions of {1,2,3,4} in lexicographic order:
        // {(1,2),(3,4)}, {(1,3),(2,4)}, {(1,4),(2,3)}.
        assert_eq!(d2[0].pairs(), &[(1, 2), (3, 4)]);
        let (loops, rho) = coset_type(&d2[0], &d2[0]);
        assert_eq!((loops, rho), (2, alloc::vec![1, 1]));
        let (loops, rho) = coset_type(&d2[0], &d2[1]);
        assert_eq!((loops, rho), (1, alloc::vec![2]));
        let d1 = pair_partitions(1).unwrap();
        let (loops, rho) = coset_type(&d1[0], &d1[0]);
        assert_eq!((loops, rho), (1, alloc::vec![1]));
    }

    #[test]
    fn gram_structure() {
        for &(d, n) in &[(1usize, 5usize), (2, 7), (3, 11)] {
            let t = weingarten_table(d, n).unwrap();
            let m = t.size();
            for i in 0..m {
                assert_eq!(t.gram_entry(i, i), (n as f64).powi(d as i32));
                for j in 0..m {
                    assert_eq!(t.gram_entry(i, j), t.gram_entry(j, i));
                }
            }
        }
    }

    #[test]
    fn d1_and_d2_closed_forms() {
        let t1 = weingarten_table(1, 9).unwrap();
        assert!((t1.wg_entry(0, 0) - 1.0 / 9.0).abs() < 1e-14);

        for &n in &[10usize, 50] {
            let nf = n as f64;
            let t2 = weingarten_table(2, n).unwrap();
            let diag = (nf + 1.0) / (nf * (nf - 1.0) * (nf + 2.0));
            let off = -1.0 / (nf * (nf - 1.0) * (nf + 2.0));
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { diag } else { off };
                    assert!(
                        (t2.wg_entry(i, j) - want).abs() < 1e-12 * diag,
                        "n = {n}, entry ({i},{j})"
                    );
                    let rho = t2.coset(i, j);
                    if i == j {
                        assert_eq!(rho, &[1, 1]);
                    } else {
                        assert_eq!(rho, &[2]);
                    }
                }
            }
        }
    }

    #[test]
    fn pseudo_inverse_identities() {
        // n >= 2d (invertible) and n < 2d (rank-deficient) both satisfy the
        // Moore-Penrose identities.
        for &(d, n) in &[(2usize, 10usize), (3, 7), (2, 2), (3, 2)] {
            let t = weingarten_table(d, n).unwrap();
            let (dg, dw) = t.pseudo_inverse_deviation();
            assert!(dg < 1e-8, "d = {d}, n = {n}: gram dev {dg}");
            assert!(dw < 1e-8, "d = {d}, n = {n}: wg dev {dw}");
        }
    }

    #[test]
    fn wg_depends_only_on_coset_type() {
        for d in 1..=3usize {
            let t = weingarten_table(d, 8).unwrap();
            let m = t.size();
            let mut by_type: alloc::collections::BTreeMap<Vec<usize>, f64> =
                alloc::collections::BTreeMap::new();
            for i in 0..m {
                for j in 0..m {
                    let rho = t.coset(i, j).to_vec();
                    let v = t.wg_entry(i, j);
                    let entry = by_type.entry(rho).or_insert(v);
                    assert!(
                        (v - *entry).abs() <= 1e-12 * entry.abs().max(1e-300),
                        "d = {d}, entry ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn catalan_values() {
        let t = weingarten_table(5, 12).unwrap();
        assert_eq!(t.catalan(), &[1, 1, 2, 5, 14]);
    }

    #[test]
    fn haar_moment_examples() {
        for &n in &[4usize, 9, 50] {
            let nf = n as f64;
            let m2 = haar_moment(&[0, 0], &[0, 0], n).unwrap();
            assert!((m2 - 1.0 / nf).abs() < 1e-13);
            let cross = haar_moment(&[0, 0], &[0, 1], n).unwrap();
            assert!(cross.abs() < 1e-13);
            let m4 = haar_moment(&[0; 4], &[0; 4], n).unwrap();
            let want = 3.0 / (nf * (nf + 2.0));
            assert!((m4 - want).abs() < 1e-12 * want, "n = {n}: {m4} vs {want}");
        }
        // Odd degree vanishes; empty degree is 1.
        assert_eq!(haar_moment(&[0, 1, 2], &[0, 0, 0], 5).unwrap(), 0.0);
        assert_eq!(haar_moment(&[], &[], 3).unwrap(), 1.0);
        assert!(haar_moment(&[0, 7], &[0, 0], 5).is_err());
        assert!(haar_moment(&[0, 1], &[0], 5).is_err());
    }

    #[test]
    fn haar_moment_equals_table_total_for_constant_indices() {
        // With all indices equal, every delta matches: the moment is the
        // full sum of Weingarten entries.
        let n = 13;
        let t = weingarten_table(2, n).unwrap();
        let mut total = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                total += t.wg_entry(i, j);
            }
        }
        let m4 = haar_moment(&[1; 4], &[2; 4], n).unwrap();
        assert!((m4 - total).abs() < 1e-15);
    }

    #[test]
    fn haar_moment_relabeling_invariance() {
        let n = 12;
        let a = haar_moment(&[0, 0, 1, 1], &[2, 3, 2, 3], n).unwrap();
        let b = haar_moment(&[5, 5, 0, 0], &[7, 1, 7, 1], n).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn orthonormality_through_moments() {
        // Σ_i E[a_{i1}²] = 1 (unit column) and Σ_i E[a_{i1} a_{i2}] = 0.
        let n = 7;
        let mut unit = 0.0;
        let mut cross = 0.0;
        for i in 0..n {
            unit += haar_moment(&[i, i], &[0, 0], n).unwrap();
            cross += haar_moment(&[i, i], &[0, 1], n).unwrap();
        }
        assert!((unit - 1.0).abs() < 1e-12);
        assert!(cross.abs() < 1e-12);
    }

    #[test]
    fn wick_examples() {
        assert_eq!(wick_moment(&[0, 0, 0, 0]), 3.0);
        assert_eq!(wick_moment(&[0, 0, 1, 1]), 1.0);
        assert_eq!(wick_moment(&[0; 6]), 15.0);
        assert_eq!(wick_moment(&[0, 0, 0]), 0.0);
        assert_eq!(wick_moment(&[0, 0, 1]), 0.0);
        assert_eq!(wick_moment(&[]), 1.0);
    }

    #[test]
    fn wick_matches_pair_partition_enumeration() {
        // The closed form is the partition sum it stands for.
        for labels in [
            alloc::vec![0usize, 0, 1, 1],
            alloc::vec![0, 0, 0, 0, 1, 1],
            alloc::vec![2, 2, 2, 2, 2, 2],
            alloc::vec![0, 1, 0, 1, 2, 2],
        ] {
            let d = labels.len() / 2;
            let brute: f64 = pair_partitions(d)
                .unwrap()
                .iter()
                .filter(|p| p.matches(&labels))
                .count() as f64;
            assert_eq!(wick_moment(&labels), brute, "{labels:?}");
        }
    }

    #[test]
    fn asymptotic_magnitudes() {
        assert!((weingarten_asymptotic(&[1], 9) - 1.0 / 9.0).abs() < 1e-15);

        let n = 100usize;
        let nf = n as f64;
        let t = weingarten_table(2, n).unwrap();
        let asym_diag = weingarten_asymptotic(&[1, 1], n);
        assert!((asym_diag - 1e-4).abs() < 1e-18);
        let exact_diag = t.wg_entry(0, 0);
        assert!((asym_diag / exact_diag - 1.0).abs() < 3.0 / nf);

        let asym_off = weingarten_asymptotic(&[2], n);
        assert!((asym_off - 1e-6).abs() < 1e-20);
        let exact_off = t.wg_entry(0, 1).abs();
        assert!((asym_off / exact_off - 1.0).abs() < 3.0 / nf);
    }

    #[test]
    fn moment_match_examples() {
        let u = [1.0, 0.0, 0.0];
        let mm = moment_match_check(2, 0, 0, &u, 50, 3).unwrap();
        assert!((mm.exact - 1.0).abs() < 1e-12);
        assert!((mm.gaussian - 1.0).abs() < 1e-15);
        assert!((mm.ratio - 1.0).abs() < 1e-12);

        let mm = moment_match_check(4, 0, 0, &u, 50, 3).unwrap();
        assert!((mm.exact - 3.0 * 50.0 / 52.0).abs() < 1e-10);
        assert!((mm.exact - 2.8846).abs() < 1e-4);
        assert_eq!(mm.gaussian, 3.0);
        assert!((mm.ratio - 50.0 / 52.0).abs() < 1e-12);
        assert!((mm.ratio - 0.9615).abs() < 1e-4);

        let mm = moment_match_check(3, 0, 0, &u, 50, 3).unwrap();
        assert_eq!(mm.exact, 0.0);
        assert_eq!(mm.gaussian, 0.0);
        assert!(mm.ratio.is_nan());
    }

    #[test]
    fn moment_match_mixed_and_sixth_degree() {
        // α=1, β=1, u = e_j: E[n a₁ⱼ²] = 1 against E[gⱼ²] = 1.
        let u = [1.0, 0.0];
        let mm = moment_match_check(1, 1, 0, &u, 20, 2).unwrap();
        assert!((mm.exact - 1.0).abs() < 1e-12);
        assert!((mm.ratio - 1.0).abs() < 1e-12);

        // Orthogonal direction: E[n a₁₁ a₁₂] = 0 on both sides.
        let v = [0.0, 1.0];
        let mm = moment_match_check(1, 1, 0, &v, 20, 2).unwrap();
        assert_eq!(mm.exact, 0.0);
        assert_eq!(mm.gaussian, 0.0);

        // Sixth moment: E[(√n a₁₁)⁶] = 15 n² / ((n+2)(n+4)).
        let n = 10.0;
        let mm = moment_match_check(6, 0, 0, &[1.0], 10, 1).unwrap();
        let want = 15.0 * n * n / ((n + 2.0) * (n + 4.0));
        assert!((mm.exact - want).abs() < 1e-10, "{} vs {want}", mm.exact);
        assert_eq!(mm.gaussian, 15.0);

        // Dense u cross-check at degree 4: E[⟨u, √n a₁⟩⁴] against the exact
        // sphere formula 3 n² ‖u‖⁴ / (n (n+2)) = 3 n ‖u‖⁴ / (n+2).
        let u = [0.6, -0.3, 1.1];
        let norm2: f64 = u.iter().map(|&x| x * x).sum();
        let n = 30usize;
        let mm = moment_match_check(0, 4, 0, &u, n, 3).unwrap();
        let want = 3.0 * (n as f64) * norm2 * norm2 / (n as f64 + 2.0);
        assert!(
            (mm.exact - want).abs() < 1e-10 * want,
            "exact {} vs {want}",
            mm.exact
        );
        assert!((mm.gaussian - 3.0 * norm2 * norm2).abs() < 1e-12);

        assert!(matches!(
            moment_match_check(11, 0, 0, &[1.0], 10, 1),
            Err(Error::UnsupportedDegree { .. })
        ));
    }

    #[test]
    fn moment_match_ratio_error_scales_like_inverse_n() {
        // n |ratio − 1| stays bounded across n for degrees up to 6.
        for (alpha, beta) in [(2usize, 2usize), (4, 0), (6, 0), (2, 4)] {
            let mut bound = 0.0f64;
            for &n in &[10usize, 50, 200] {
                let u = [0.8, 0.6];
                let mm = moment_match_check(alpha, beta, 0, &u, n, 2).unwrap();
                bound = bound.max(n as f64 * (mm.ratio - 1.0).abs());
            }
            assert!(bound < 50.0, "({alpha},{beta}): n-scaled error {bound}");
        }
    }
}
