//! Column-oriented banded Cholesky factorization with floating-point
//! classification of every stored entry.
//!
//! The factorization runs in natural order (no fill-reducing permutation) and
//! never pivots: column `j` is finished before column `j + 1` starts, and
//! every inner product is a contiguous slice dot evaluated left to right, so
//! repeated runs produce bit-identical factors.
//!
//! Two arithmetic modes are supported. `Ieee` leaves every computed value
//! as produced. `FlushToZero` emulates flush-to-zero in software: any stored
//! entry with magnitude below the smallest positive normal number is replaced
//! by exact zero immediately after it is computed, so later columns consume
//! the flushed value.

use crate::assembly::{BandedSymmetricMatrix, RightHandSide};
use crate::band::{lower_positions, BandStorage};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::time::Instant;

/// Arithmetic mode of the factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorMode {
    #[serde(rename = "ieee")]
    Ieee,
    #[serde(rename = "ftz")]
    FlushToZero,
}

impl fmt::Display for FactorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorMode::Ieee => write!(f, "ieee"),
            FactorMode::FlushToZero => write!(f, "ftz"),
        }
    }
}

impl std::str::FromStr for FactorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ieee" => Ok(FactorMode::Ieee),
            "ftz" => Ok(FactorMode::FlushToZero),
            other => Err(Error::InvalidArgument(format!(
                "unknown mode {other:?} (expected \"ieee\" or \"ftz\")"
            ))),
        }
    }
}

/// Floating-point class of a stored entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FpClass {
    Zero,
    Subnormal,
    Normal,
}

/// Classify a finite value: `Zero` for +-0, `Subnormal` for
/// `0 < |v| < min_positive_normal`, `Normal` otherwise.
pub fn classify_entry<T: Scalar>(value: T) -> Result<FpClass> {
    if !value.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "cannot classify non-finite value {value}"
        )));
    }
    let mag = value.abs();
    if mag == T::zero() {
        Ok(FpClass::Zero)
    } else if mag < T::min_positive_normal() {
        Ok(FpClass::Subnormal)
    } else {
        Ok(FpClass::Normal)
    }
}

/// Lower-triangular band factor `L` with `A = L L^T`.
#[derive(Clone, Debug, PartialEq)]
pub struct CholeskyFactor<T> {
    storage: BandStorage<T>,
}

impl<T: Scalar> CholeskyFactor<T> {
    pub fn n(&self) -> usize {
        self.storage.n()
    }

    pub fn bandwidth(&self) -> usize {
        self.storage.bandwidth()
    }

    /// Value of `l(i, j)`; zero above the diagonal and outside the band.
    pub fn value(&self, i: usize, j: usize) -> T {
        self.storage.get(i, j).unwrap_or_else(T::zero)
    }

    pub(crate) fn storage(&self) -> &BandStorage<T> {
        &self.storage
    }

    /// Stored nonzeros as `(i, j, value)`.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        lower_positions(self.n(), self.bandwidth()).filter_map(move |(i, j, o)| {
            let v = self.storage.row(i)[o];
            (v != T::zero()).then_some((i, j, v))
        })
    }

    /// Entry `(i, j)` of `L L^T` (lower triangle), summed over the band.
    pub fn reconstruct(&self, i: usize, j: usize) -> T {
        debug_assert!(j <= i);
        let bw = self.bandwidth();
        let lo = i.saturating_sub(bw);
        let mut sum = T::zero();
        for k in lo..=j {
            sum += self.value(i, k) * self.value(j, k);
        }
        sum
    }
}

/// Census of the stored factor entries plus the factorization wall time.
///
/// `underflow_zeros` counts stored zeros at positions that are nonzero in
/// exact arithmetic. That pattern is the fill envelope of `A`: each row of
/// the factor fills from the row's first nonzero in `A` through the
/// diagonal. For the stencil system the envelope is bidiagonal in the first
/// block row and the full band afterwards, `m^3 + m - 1` positions in total,
/// so `nonzeros + underflow_zeros` is constant across `epsilon`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorStats {
    pub n: u64,
    pub bandwidth: u64,
    pub mode: FactorMode,
    pub nonzeros: u64,
    pub subnormals: u64,
    pub underflow_zeros: u64,
    pub elapsed_seconds: f64,
}

/// Factor `A = L L^T`, borrowing `A` (the band is copied once).
pub fn factor<T: Scalar>(
    a: &BandedSymmetricMatrix<T>,
    mode: FactorMode,
) -> Result<(CholeskyFactor<T>, FactorStats)> {
    factor_storage(a.storage().clone(), mode)
}

/// Factor `A = L L^T`, consuming `A` and reusing its storage for `L`.
///
/// This keeps peak memory at one band (about 1 GiB at `N = 512`).
pub fn factor_into<T: Scalar>(
    a: BandedSymmetricMatrix<T>,
    mode: FactorMode,
) -> Result<(CholeskyFactor<T>, FactorStats)> {
    factor_storage(a.into_storage(), mode)
}

fn factor_storage<T: Scalar>(
    mut band: BandStorage<T>,
    mode: FactorMode,
) -> Result<(CholeskyFactor<T>, FactorStats)> {
    let n = band.n();
    let bw = band.bandwidth();
    let stride = bw + 1;
    let flush = mode == FactorMode::FlushToZero;
    let min_normal = T::min_positive_normal();

    // fill envelope of A, recorded before the values are overwritten
    let first_col: Vec<usize> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(bw);
            let row = &band.row(i)[lo + bw - i..];
            row.iter()
                .position(|&v| v != T::zero())
                .map_or(i, |p| lo + p)
        })
        .collect();

    let start = Instant::now();
    for j in 0..n {
        let lo = j.saturating_sub(bw);
        let off_j = lo + bw - j;

        // pivot: l(j,j) = sqrt(a(j,j) - sum_k l(j,k)^2)
        let (head, tail) = band.split_after_row(j);
        let row_j = &head[j * stride..(j + 1) * stride];
        let prefix = &row_j[off_j..bw];
        let pivot = row_j[bw] - dot(prefix, prefix);
        if !(pivot > T::zero()) {
            return Err(Error::NotPositiveDefinite { column: j });
        }
        let ljj = pivot.sqrt();
        head[j * stride + bw] = ljj;
        let row_j = &head[j * stride..(j + 1) * stride];

        // column below the pivot: rows j+1 ..= min(j+bw, n-1)
        let last = (j + bw).min(n - 1);
        for i in (j + 1)..=last {
            let row_i = &mut tail[(i - j - 1) * stride..(i - j) * stride];
            let lo_i = i.saturating_sub(bw);
            let len_i = j - lo_i;
            let off_i = lo_i + bw - i;
            // both slices cover columns lo_i .. j
            let skip = lo_i - lo;
            let s = dot(
                &row_i[off_i..off_i + len_i],
                &row_j[off_j + skip..off_j + skip + len_i],
            );
            let slot = bw + j - i;
            let mut v = (row_i[slot] - s) / ljj;
            if flush && v.abs() < min_normal {
                v = T::zero();
            }
            row_i[slot] = v;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();

    let factor = CholeskyFactor { storage: band };
    let stats = census(&factor, &first_col, mode, elapsed);
    Ok((factor, stats))
}

#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    // left-to-right accumulation; no reassociation, no fused multiply-add
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn census<T: Scalar>(
    factor: &CholeskyFactor<T>,
    first_col: &[usize],
    mode: FactorMode,
    elapsed: f64,
) -> FactorStats {
    let bw = factor.bandwidth();
    let mut nonzeros = 0u64;
    let mut subnormals = 0u64;
    let mut underflow_zeros = 0u64;
    let min_normal = T::min_positive_normal();
    for (i, j, o) in lower_positions(factor.n(), bw) {
        let v = factor.storage.row(i)[o];
        let mag = v.abs();
        if mag == T::zero() {
            if j >= first_col[i] {
                underflow_zeros += 1;
            }
        } else {
            nonzeros += 1;
            if mag < min_normal {
                subnormals += 1;
            }
        }
    }
    FactorStats {
        n: factor.n() as u64,
        bandwidth: bw as u64,
        mode,
        nonzeros,
        subnormals,
        underflow_zeros,
        elapsed_seconds: elapsed,
    }
}

/// Solve `A x = rhs` given the factor `L`, by forward and back substitution.
pub fn solve<T: Scalar>(l: &CholeskyFactor<T>, rhs: &RightHandSide<T>) -> Result<Vec<T>> {
    if rhs.len() != l.n() {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: factor order {} vs rhs length {}",
            l.n(),
            rhs.len()
        )));
    }
    let n = l.n();
    let bw = l.bandwidth();
    let band = &l.storage;

    // L y = rhs
    let mut y = rhs.values().to_vec();
    for i in 0..n {
        let lo = i.saturating_sub(bw);
        let row = band.row(i);
        let mut s = y[i];
        for j in lo..i {
            s -= row[bw + j - i] * y[j];
        }
        y[i] = s / row[bw];
    }

    // L^T x = y
    let mut x = y;
    for j in (0..n).rev() {
        let hi = (j + bw).min(n - 1);
        let mut s = x[j];
        for i in (j + 1)..=hi {
            s -= band.row(i)[bw + j - i] * x[i];
        }
        x[j] = s / band.row(j)[bw];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble;
    use crate::mesh::uniform_mesh;
    use crate::problem::ProblemSpec;

    fn identity(n: usize, bw: usize) -> BandedSymmetricMatrix<f64> {
        let mut s = BandStorage::new(n, bw, 0.0);
        for i in 0..n {
            s.set(i, i, 1.0);
        }
        BandedSymmetricMatrix::from_storage(s)
    }

    #[test]
    fn identity_factors_to_identity() {
        let a = identity(6, 2);
        let (l, stats) = factor(&a, FactorMode::Ieee).unwrap();
        for i in 0..6 {
            assert_eq!(l.value(i, i), 1.0);
        }
        assert_eq!(stats.nonzeros, 6);
        assert_eq!(stats.subnormals, 0);
        // off-pattern zeros inside the band are structural, not underflow
        assert_eq!(stats.underflow_zeros, 0);
    }

    #[test]
    fn identity_solve_returns_unit_vector() {
        let a = identity(4, 1);
        let (l, _) = factor(&a, FactorMode::Ieee).unwrap();
        let mut e1 = vec![0.0; 4];
        e1[0] = 1.0;
        let x = solve(&l, &RightHandSide::new(e1.clone())).unwrap();
        assert_eq!(x, e1);
    }

    #[test]
    fn indefinite_matrix_reports_column() {
        let mut s = BandStorage::new(3, 1, 0.0);
        s.set(0, 0, 1.0);
        s.set(1, 0, 2.0);
        s.set(1, 1, 1.0); // pivot 1 - 4 < 0 in column 1
        s.set(2, 2, 1.0);
        let a = BandedSymmetricMatrix::from_storage(s);
        match factor(&a, FactorMode::Ieee) {
            Err(Error::NotPositiveDefinite { column }) => assert_eq!(column, 1),
            other => panic!("expected pivot failure, got {other:?}"),
        }
    }

    #[test]
    fn factorization_is_deterministic() {
        let mesh = uniform_mesh::<f64>(12).unwrap();
        let spec = ProblemSpec::builtin("ones", 1e-3, 1.0).unwrap();
        let (a, _) = assemble(&mesh, &mesh, &spec).unwrap();
        let (l1, s1) = factor(&a, FactorMode::Ieee).unwrap();
        let (l2, s2) = factor(&a, FactorMode::Ieee).unwrap();
        assert_eq!(l1.storage().values(), l2.storage().values());
        assert_eq!(s1.nonzeros, s2.nonzeros);
        assert_eq!(s1.subnormals, s2.subnormals);
        assert_eq!(s1.underflow_zeros, s2.underflow_zeros);
    }

    #[test]
    fn factor_into_matches_factor() {
        let mesh = uniform_mesh::<f64>(8).unwrap();
        let spec = ProblemSpec::builtin("ones", 1e-2, 1.0).unwrap();
        let (a, _) = assemble(&mesh, &mesh, &spec).unwrap();
        let (l1, _) = factor(&a, FactorMode::Ieee).unwrap();
        let (l2, _) = factor_into(a, FactorMode::Ieee).unwrap();
        assert_eq!(l1.storage().values(), l2.storage().values());
    }

    #[test]
    fn classify_entry_boundaries() {
        assert_eq!(classify_entry(0.0f64).unwrap(), FpClass::Zero);
        assert_eq!(classify_entry(-0.0f64).unwrap(), FpClass::Zero);
        assert_eq!(
            classify_entry(f64::min_positive_normal()).unwrap(),
            FpClass::Normal
        );
        assert_eq!(
            classify_entry(f64::min_positive_subnormal()).unwrap(),
            FpClass::Subnormal
        );
        assert_eq!(classify_entry(-1e-310f64).unwrap(), FpClass::Subnormal);
        assert_eq!(classify_entry(1.0f64).unwrap(), FpClass::Normal);
        assert!(classify_entry(f64::NAN).is_err());
        assert!(classify_entry(f64::INFINITY).is_err());
    }

    #[test]
    fn solve_rejects_dimension_mismatch() {
        let a = identity(4, 1);
        let (l, _) = factor(&a, FactorMode::Ieee).unwrap();
        let bad = RightHandSide::new(vec![1.0; 5]);
        assert!(matches!(solve(&l, &bad), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn ftz_mode_flushes_stored_subnormals() {
        let mesh = uniform_mesh::<f64>(16).unwrap();
        let spec = ProblemSpec::builtin("ones", 1e-6, 1.0).unwrap();
        let (a, _) = assemble(&mesh, &mesh, &spec).unwrap();
        let (_, ieee) = factor(&a, FactorMode::Ieee).unwrap();
        let (l_ftz, ftz) = factor(&a, FactorMode::FlushToZero).unwrap();
        assert_eq!(ftz.subnormals, 0);
        assert!(ftz.nonzeros <= ieee.nonzeros);
        for (_, _, v) in l_ftz.nonzeros() {
            assert!(v.abs() >= f64::min_positive_normal());
        }
    }

    #[test]
    fn stats_json_has_the_agreed_fields() {
        let a = identity(2, 1);
        let (_, stats) = factor(&a, FactorMode::FlushToZero).unwrap();
        let json = serde_json::to_value(&stats).unwrap();
        let obj = json.as_object().unwrap();
        for key in [
            "n",
            "bandwidth",
            "mode",
            "nonzeros",
            "subnormals",
            "underflow_zeros",
            "elapsed_seconds",
        ] {
            assert!(obj.contains_key(key), "missing {key}");
        }
        assert_eq!(obj.len(), 7);
        assert_eq!(obj["mode"], "ftz");
    }
}
