//! Analytic fill model for the uniform-mesh stencil matrix: fill levels,
//! level magnitudes, exact-arithmetic nonzero counts, and predicted
//! subnormal / underflow-zero censuses, all without factoring anything.
//!
//! Every fill entry of the factor carries a level `k >= 1`; entries at level
//! `k` share the magnitude class `delta^(2(k+1)) * h` with `delta = eps / h`,
//! so on the uniform mesh (`h = 1/N`) the magnitudes decay geometrically in
//! `k` whenever `eps * N < 1`. Counting the levels whose magnitude falls
//! below the subnormal and underflow boundaries predicts how many stored
//! entries of the factor will be subnormal or exactly zero.

use crate::band::BandStorage;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Level sentinel for positions that are zero in exact arithmetic.
const LEVEL_INF: u32 = u32::MAX;

/// Fill levels of the lower band: 0 at positions nonzero in `A`, `k >= 1` for
/// fill of the `k`-th magnitude class, absent (`None`) for exact zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelMatrix {
    n_intervals: usize,
    levels: BandStorage<u32>,
}

impl LevelMatrix {
    pub fn n(&self) -> usize {
        self.levels.n()
    }

    pub fn bandwidth(&self) -> usize {
        self.levels.bandwidth()
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    /// Level of position `(i, j)`; `None` outside the band or where the
    /// exact factor is zero.
    pub fn level(&self, i: usize, j: usize) -> Option<u32> {
        match self.levels.get(i, j) {
            Some(LEVEL_INF) | None => None,
            Some(k) => Some(k),
        }
    }

    /// Number of positions with a finite level (the structural nonzeros of
    /// the exact-arithmetic factor).
    pub fn structural_nonzeros(&self) -> u64 {
        self.census().values().sum()
    }

    /// Count of positions per finite level.
    pub fn census(&self) -> BTreeMap<u32, u64> {
        let mut counts = BTreeMap::new();
        for (i, _j, o) in crate::band::lower_positions(self.n(), self.bandwidth()) {
            let k = self.levels.row(i)[o];
            if k != LEVEL_INF {
                *counts.entry(k).or_insert(0) += 1;
            }
        }
        counts
    }
}

/// Run the min-plus level recursion over the band pattern of the uniform-mesh
/// stencil matrix, visiting entries in the same column order as the numeric
/// factorization.
///
/// Position `(i, j)` starts at level 0 if `a(i, j) != 0` and infinity
/// otherwise, and each column update applies
/// `p(i, j) = min(p(i, j), p(i, k) + p(j, k) + 1)` over the columns `k < j`
/// shared by rows `i` and `j`.
pub fn symbolic_levels(n_intervals: usize) -> Result<LevelMatrix> {
    if n_intervals < 3 {
        return Err(Error::InvalidArgument(format!(
            "symbolic levels require N >= 3, got {n_intervals}"
        )));
    }
    let m = n_intervals - 1;
    let n = m * m;
    let bw = m;
    let stride = bw + 1;
    let mut levels = BandStorage::new(n, bw, LEVEL_INF);

    // pattern of A: diagonal, distance 1 within a block row, distance m
    for i in 0..n {
        levels.set(i, i, 0);
        if i % m != 0 {
            levels.set(i, i - 1, 0);
        }
        if i >= m {
            levels.set(i, i - m, 0);
        }
    }

    for j in 0..n {
        let lo = j.saturating_sub(bw);
        let off_j = lo + bw - j;
        let (head, tail) = levels.split_after_row(j);
        let row_j = &head[j * stride..(j + 1) * stride];
        let last = (j + bw).min(n - 1);
        for i in (j + 1)..=last {
            let row_i = &mut tail[(i - j - 1) * stride..(i - j) * stride];
            let lo_i = i.saturating_sub(bw);
            let len_i = j - lo_i;
            let off_i = lo_i + bw - i;
            let skip = lo_i - lo;
            let slot = bw + j - i;
            let mut best = row_i[slot];
            for t in 0..len_i {
                let pi = row_i[off_i + t];
                let pj = row_j[off_j + skip + t];
                if pi != LEVEL_INF && pj != LEVEL_INF {
                    best = best.min(pi + pj + 1);
                }
            }
            row_i[slot] = best;
        }
    }

    Ok(LevelMatrix {
        n_intervals,
        levels,
    })
}

/// Representative magnitude of a level, kept in log2 form so that levels far
/// below the underflow boundary remain expressible.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelMagnitude {
    pub level: u32,
    pub log2: f64,
}

impl LevelMagnitude {
    /// The magnitude as an `f64`; underflows to zero below `2^-1074`.
    pub fn value(&self) -> f64 {
        self.log2.exp2()
    }
}

/// Representative magnitude of level `k` for mesh width `h` and perturbation
/// parameter `epsilon`: `delta^(2(k+1)) * h` with `delta = eps / h`. Level 0
/// stands for the entries of `A` itself and returns `max(h, eps^2 / h)`.
pub fn level_magnitude(k: u32, epsilon: f64, h: f64) -> Result<LevelMagnitude> {
    if !(epsilon > 0.0) || !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "level magnitude requires epsilon > 0 and h > 0, got eps = {epsilon}, h = {h}"
        )));
    }
    let log2_h = h.log2();
    let log2_delta = epsilon.log2() - log2_h;
    let log2 = if k == 0 {
        log2_h.max(2.0 * log2_delta + log2_h)
    } else {
        2.0 * (k as f64 + 1.0) * log2_delta + log2_h
    };
    Ok(LevelMagnitude { level: k, log2 })
}

/// Exact-arithmetic nonzero count of the factor: `m^3 + m - 1` with
/// `m = N - 1`.
pub fn exact_nonzeros(n_intervals: usize) -> Result<u64> {
    if n_intervals < 2 {
        return Err(Error::InvalidArgument(format!(
            "exact nonzero count requires N >= 2, got {n_intervals}"
        )));
    }
    let m = (n_intervals - 1) as u64;
    Ok(m * m * m + m - 1)
}

fn bandwidth_checked(n_intervals: usize, what: &str, k: u32) -> Result<u64> {
    let m = n_intervals.saturating_sub(1) as u64;
    if n_intervals < 2 || k == 0 || k as u64 > m {
        return Err(Error::InvalidArgument(format!(
            "{what} requires 1 <= level <= {m}, got {k} (N = {n_intervals})"
        )));
    }
    Ok(m)
}

/// Number of fill entries at exactly level `k`, `1 <= k <= m`:
/// `(m-1)^2` for `k = 1`, `(m-1)(m-2)` for `k = 2`, and `(m-1)(2m - 2k + 1)`
/// for `k >= 3`.
pub fn per_level_count(n_intervals: usize, k: u32) -> Result<u64> {
    let m = bandwidth_checked(n_intervals, "per-level count", k)?;
    let k = k as u64;
    Ok(match k {
        1 => (m - 1) * (m - 1),
        2 => (m - 1) * (m - 2),
        _ => (m - 1) * (2 * m - 2 * k + 1),
    })
}

/// Number of fill entries at level `p` or deeper, `1 <= p <= m`:
/// `(m-1)^3` for `p = 1`, `(m-2)(m-1)^2` for `p = 2`, `(m-1)(m-p+1)^2` for
/// `p >= 3`.
pub fn cumulative_count(n_intervals: usize, p: u32) -> Result<u64> {
    let m = bandwidth_checked(n_intervals, "cumulative count", p)?;
    let p = p as u64;
    Ok(match p {
        1 => (m - 1) * (m - 1) * (m - 1),
        2 => (m - 2) * (m - 1) * (m - 1),
        _ => (m - 1) * (m - p + 1) * (m - p + 1),
    })
}

/// [`cumulative_count`] extended with `0` beyond the deepest level; `p = 0`
/// clamps to level 1.
fn cumulative_or_zero(n_intervals: usize, p: i64) -> u64 {
    let m = (n_intervals - 1) as i64;
    if p > m {
        return 0;
    }
    let p = p.max(1) as u32;
    cumulative_count(n_intervals, p).unwrap_or(0)
}

/// Real-valued level at which the representative entry magnitude crosses
/// `threshold` on the uniform mesh with `N` intervals.
///
/// Solves `rho^(k+1) * h = threshold` for `k`, where
/// `rho = eps^2 / (h^2 + 4 eps^2)` is the per-level magnitude ratio of the
/// factor: each deeper level scales by (off-diagonal / diagonal-root)^2 of
/// the unit-reaction stencil, whose diagonal is `4 eps^2 + h^2`. For
/// `eps * N << 1` this is `(eps N)^(2(k+1)) = threshold * N` up to the
/// `4 eps^2` diagonal term. Entries at integer levels above the returned
/// value fall below `threshold`.
pub fn threshold_level(n_intervals: usize, epsilon: f64, threshold: f64) -> Result<f64> {
    if n_intervals < 2 {
        return Err(Error::InvalidArgument(format!(
            "threshold level requires N >= 2, got {n_intervals}"
        )));
    }
    if !(epsilon > 0.0) || !(threshold > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold level requires epsilon > 0 and threshold > 0, got {epsilon}, {threshold}"
        )));
    }
    let n = n_intervals as f64;
    let delta = epsilon * n;
    if delta >= 1.0 {
        return Err(Error::NoSolution(format!(
            "eps * N = {delta} >= 1: entry magnitudes do not decay"
        )));
    }
    // log2 of rho = delta^2 / (1 + 4 delta^2); negative since delta < 1
    let log2_rho = 2.0 * delta.log2() - (1.0 + 4.0 * delta * delta).log2();
    Ok((threshold.log2() + n.log2()) / log2_rho - 1.0)
}

/// Predicted census for the uniform mesh: which levels fall below the
/// subnormal and underflow boundaries and how many entries that covers.
///
/// Serialized with the same field names as the observed factor census
/// (`n`, `bandwidth`, `nonzeros`, `subnormals`, `underflow_zeros`) plus the
/// crossing levels and the per-level count map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FillPrediction {
    #[serde(rename = "N")]
    pub n_intervals: u64,
    pub epsilon: f64,
    pub n: u64,
    pub bandwidth: u64,
    /// Predicted stored nonzeros: exact count minus predicted underflows.
    pub nonzeros: u64,
    /// Predicted stored subnormal entries.
    pub subnormals: u64,
    /// Predicted stored exact zeros inside the exact-arithmetic pattern.
    pub underflow_zeros: u64,
    /// Smallest level whose magnitude falls below the smallest normal
    /// number; `None` when no level does.
    pub k_subnormal: Option<u32>,
    /// Smallest level whose magnitude falls below the smallest subnormal
    /// number; `None` when no level does.
    pub k_zero: Option<u32>,
    /// Fill count per level (only nonzero counts are kept).
    pub per_level_counts: BTreeMap<u32, u64>,
}

impl FillPrediction {
    /// Exact-arithmetic nonzero count `m^3 + m - 1`.
    pub fn exact_nonzeros(&self) -> u64 {
        self.nonzeros + self.underflow_zeros
    }
}

/// Predict the factor census for the uniform mesh with `N` intervals in
/// double precision. When `eps * N >= 1` the magnitudes do not decay and the
/// prediction is zero subnormals and zero underflows.
pub fn predict(n_intervals: usize, epsilon: f64) -> Result<FillPrediction> {
    predict_with_thresholds(n_intervals, epsilon, f64::MIN_POSITIVE, f64::from_bits(1))
}

/// [`predict`] against explicit boundaries, e.g. those of a narrower float
/// format.
pub fn predict_with_thresholds(
    n_intervals: usize,
    epsilon: f64,
    min_normal: f64,
    min_subnormal: f64,
) -> Result<FillPrediction> {
    if n_intervals < 2 {
        return Err(Error::InvalidArgument(format!(
            "prediction requires N >= 2, got {n_intervals}"
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "prediction requires epsilon > 0, got {epsilon}"
        )));
    }
    let m = (n_intervals - 1) as u64;
    let exact = exact_nonzeros(n_intervals)?;

    let crossing = |threshold: f64| -> Option<u32> {
        match threshold_level(n_intervals, epsilon, threshold) {
            // first integer level strictly below the crossing magnitude,
            // clamped into the fill-level range
            Ok(k) => {
                let k = k.ceil().max(1.0);
                (k <= m as f64).then_some(k as u32)
            }
            Err(_) => None,
        }
    };
    let k_subnormal = crossing(min_normal);
    let k_zero = crossing(min_subnormal);

    let below =
        |k: Option<u32>| -> u64 { k.map_or(0, |k| cumulative_or_zero(n_intervals, k as i64)) };
    let underflow_zeros = below(k_zero);
    let subnormals = below(k_subnormal) - underflow_zeros;

    let mut per_level_counts = BTreeMap::new();
    for k in 1..=m as u32 {
        let c = per_level_count(n_intervals, k)?;
        if c > 0 {
            per_level_counts.insert(k, c);
        }
    }

    Ok(FillPrediction {
        n_intervals: n_intervals as u64,
        epsilon,
        n: m * m,
        bandwidth: m,
        nonzeros: exact - underflow_zeros,
        subnormals,
        underflow_zeros,
        k_subnormal,
        k_zero,
        per_level_counts,
    })
}

/// Largest `epsilon` for which a factor on the uniform mesh with `N`
/// intervals contains entries below the smallest normal number:
/// `g(N) = 2^(-511/N) * N^(1/(2N) - 1)`.
pub fn g_of_n(n_intervals: usize) -> Result<f64> {
    if n_intervals < 1 {
        return Err(Error::InvalidArgument("g(N) requires N >= 1".to_string()));
    }
    let n = n_intervals as f64;
    Ok(2.0f64.powf(-511.0 / n) * n.powf(1.0 / (2.0 * n) - 1.0))
}
