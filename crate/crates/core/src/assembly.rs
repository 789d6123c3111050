//! Finite-difference assembly of the banded SPD system.
//!
//! Unknowns are the interior grid points in lexicographic order with the
//! x-index fastest, which gives an `m^2 x m^2` matrix of bandwidth `m = N - 1`
//! with at most five nonzeros per row: the diagonal, the west/east neighbors
//! at distance 1 (absent across block boundaries), and the south/north
//! neighbors at distance `m`. Only the lower triangle is stored; stencil legs
//! that reach the boundary move to the right-hand side through the boundary
//! data `g`.

use crate::band::{lower_positions, BandStorage};
use crate::error::{Error, Result};
use crate::mesh::Mesh1D;
use crate::problem::ProblemSpec;
use crate::scalar::Scalar;

/// Symmetric positive definite banded matrix, lower triangle stored.
#[derive(Clone, Debug)]
pub struct BandedSymmetricMatrix<T> {
    storage: BandStorage<T>,
}

impl<T: Scalar> BandedSymmetricMatrix<T> {
    pub(crate) fn from_storage(storage: BandStorage<T>) -> Self {
        Self { storage }
    }

    /// Matrix order `n = m^2`.
    pub fn n(&self) -> usize {
        self.storage.n()
    }

    pub fn bandwidth(&self) -> usize {
        self.storage.bandwidth()
    }

    /// Value at `(i, j)` with symmetric reflection; zero outside the band.
    pub fn value(&self, i: usize, j: usize) -> T {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        self.storage.get(r, c).unwrap_or_else(T::zero)
    }

    /// Stored lower-triangle value at `(i, j)`, `j <= i`; zero outside band.
    pub fn lower(&self, i: usize, j: usize) -> T {
        self.storage.get(i, j).unwrap_or_else(T::zero)
    }

    pub(crate) fn storage(&self) -> &BandStorage<T> {
        &self.storage
    }

    pub(crate) fn into_storage(self) -> BandStorage<T> {
        self.storage
    }

    /// Stored nonzeros of the lower triangle as `(i, j, value)`.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        lower_positions(self.n(), self.bandwidth()).filter_map(move |(i, j, o)| {
            let v = self.storage.row(i)[o];
            (v != T::zero()).then_some((i, j, v))
        })
    }

    /// Multiply by a vector, using the symmetric reflection of the band.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n());
        let mut y = vec![T::zero(); self.n()];
        for (i, j, o) in lower_positions(self.n(), self.bandwidth()) {
            let v = self.storage.row(i)[o];
            if v == T::zero() {
                continue;
            }
            y[i] += v * x[j];
            if i != j {
                y[j] += v * x[i];
            }
        }
        y
    }

    /// Largest absolute value of any stored entry.
    pub fn max_abs(&self) -> T {
        self.storage
            .values()
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }
}

/// Semantic equality: same order and same values everywhere, regardless of
/// the stored bandwidth.
impl<T: Scalar> PartialEq for BandedSymmetricMatrix<T> {
    fn eq(&self, other: &Self) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let bw = self.bandwidth().max(other.bandwidth());
        lower_positions(self.n(), bw).all(|(i, j, _)| self.lower(i, j) == other.lower(i, j))
    }
}

/// Right-hand side of the discrete system.
#[derive(Clone, Debug, PartialEq)]
pub struct RightHandSide<T> {
    values: Vec<T>,
}

impl<T: Scalar> RightHandSide<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// Assemble the system matrix and right-hand side on the tensor grid
/// `mesh_x x mesh_y`.
///
/// Both meshes must have the same interval count `N >= 2`. Fails with a model
/// violation if `b` drops below `beta^2` at any interior grid point.
pub fn assemble<T: Scalar>(
    mesh_x: &Mesh1D<T>,
    mesh_y: &Mesh1D<T>,
    spec: &ProblemSpec<T>,
) -> Result<(BandedSymmetricMatrix<T>, RightHandSide<T>)> {
    let n_int = mesh_x.n_intervals();
    if mesh_y.n_intervals() != n_int {
        return Err(Error::InvalidArgument(format!(
            "mesh interval counts differ: {} vs {}",
            n_int,
            mesh_y.n_intervals()
        )));
    }
    if n_int < 2 {
        return Err(Error::InvalidArgument(format!(
            "assembly requires N >= 2, got {n_int}"
        )));
    }

    let m = n_int - 1;
    let n = m * m;
    let eps = spec.epsilon();
    let eps2 = eps * eps;
    let beta2 = spec.beta() * spec.beta();
    let hx = mesh_x.widths();
    let hy = mesh_y.widths();
    let px = mesh_x.points();
    let py = mesh_y.points();

    let mut a = BandStorage::new(n, m, T::zero());
    let mut rhs = vec![T::zero(); n];

    for iy in 1..=m {
        let y = py[iy];
        let k_lo = hy[iy - 1];
        let k_hi = hy[iy];
        let kbar = mesh_y.averaged_width(iy);
        for ix in 1..=m {
            let x = px[ix];
            let h_lo = hx[ix - 1];
            let h_hi = hx[ix];
            let hbar = mesh_x.averaged_width(ix);
            let row = (iy - 1) * m + (ix - 1);

            let b = spec.b(x, y);
            if b < beta2 {
                return Err(Error::ModelViolation(format!(
                    "b({x}, {y}) = {b} is below beta^2 = {beta2}"
                )));
            }

            let diag = eps2
                * (kbar * (h_lo.recip() + h_hi.recip()) + hbar * (k_lo.recip() + k_hi.recip()))
                + hbar * kbar * b;
            a.set(row, row, diag);

            let west = -(eps2 * kbar / h_lo);
            let east = -(eps2 * kbar / h_hi);
            let south = -(eps2 * hbar / k_lo);
            let north = -(eps2 * hbar / k_hi);

            let mut f = hbar * kbar * spec.f(x, y);
            if ix > 1 {
                a.set(row, row - 1, west);
            } else {
                f -= west * spec.g(T::zero(), y);
            }
            if ix == m {
                f -= east * spec.g(T::one(), y);
            }
            if iy > 1 {
                a.set(row, row - m, south);
            } else {
                f -= south * spec.g(x, T::zero());
            }
            if iy == m {
                f -= north * spec.g(x, T::one());
            }
            rhs[row] = f;
        }
    }

    if let Some(bad) = rhs.iter().position(|v| !v.is_finite()) {
        return Err(Error::ModelViolation(format!(
            "right-hand side entry {bad} is not finite"
        )));
    }

    Ok((
        BandedSymmetricMatrix::from_storage(a),
        RightHandSide::new(rhs),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::uniform_mesh;

    fn ones(eps: f64) -> ProblemSpec<f64> {
        ProblemSpec::builtin("ones", eps, 1.0).unwrap()
    }

    #[test]
    fn single_unknown_system() {
        // N = 2, b = 1, eps = 1: A = [4 eps^2 + h^2 b] = [4.25] with h = 1/2.
        let mesh = uniform_mesh::<f64>(2).unwrap();
        let (a, rhs) = assemble(&mesh, &mesh, &ones(1.0)).unwrap();
        assert_eq!(a.n(), 1);
        assert_eq!(a.value(0, 0), 4.25);
        assert_eq!(rhs.len(), 1);
    }

    #[test]
    fn uniform_offdiagonals_are_exactly_minus_eps_squared() {
        let mesh = uniform_mesh::<f64>(8).unwrap();
        let eps = 1e-2;
        let (a, _) = assemble(&mesh, &mesh, &ones(eps)).unwrap();
        let m = 7;
        for (i, j, v) in a.nonzeros() {
            if i == j {
                let h = 1.0 / 8.0;
                let expect = 4.0 * eps * eps + h * h;
                assert!((v - expect).abs() <= 1e-15 * expect, "diag {v} vs {expect}");
            } else {
                assert_eq!(v, -eps * eps, "off-diagonal at ({i}, {j})");
                assert!(i - j == 1 || i - j == m);
            }
        }
    }

    #[test]
    fn distance_one_entries_absent_across_block_boundaries() {
        let mesh = uniform_mesh::<f64>(5).unwrap();
        let (a, _) = assemble(&mesh, &mesh, &ones(0.1)).unwrap();
        let m = 4;
        for (i, j, _) in a.nonzeros() {
            if i - j == 1 {
                assert_ne!(i % m, 0, "entry ({i}, {j}) crosses a block boundary");
            }
        }
    }

    #[test]
    fn row_sums_keep_maximum_principle_sign_structure() {
        // With boundary legs restored, row sums equal hbar * kbar * b >= beta^2 * hbar * kbar.
        let n = 6;
        let mesh = uniform_mesh::<f64>(n).unwrap();
        let (a, _) = assemble(&mesh, &mesh, &ones(1e-2)).unwrap();
        let m = n - 1;
        let h = 1.0 / n as f64;
        let eps2 = 1e-4;
        for i in 0..a.n() {
            let mut sum = a.value(i, i);
            for j in [i.wrapping_sub(1), i + 1, i.wrapping_sub(m), i + m] {
                if j < a.n() {
                    sum += a.value(i, j);
                }
            }
            // interior rows have all four neighbors present; boundary rows
            // miss some, which only increases the sum
            assert!(sum >= h * h - 1e-15, "row {i} sum {sum}");
            assert!(sum <= h * h + 4.0 * eps2 + 1e-15);
        }
    }

    #[test]
    fn model_violation_is_detected() {
        let mesh = uniform_mesh::<f64>(4).unwrap();
        let bad = ProblemSpec::new(
            "bad",
            1.0,
            1.0,
            std::sync::Arc::new(|x: f64, _y: f64| if x > 0.5 { -1.0 } else { 1.0 }),
            std::sync::Arc::new(|_, _| 1.0),
            std::sync::Arc::new(|_, _| 0.0),
        )
        .unwrap();
        assert!(matches!(
            assemble(&mesh, &mesh, &bad),
            Err(Error::ModelViolation(_))
        ));
    }

    #[test]
    fn mismatched_meshes_are_rejected() {
        let mx = uniform_mesh::<f64>(4).unwrap();
        let my = uniform_mesh::<f64>(8).unwrap();
        assert!(matches!(
            assemble(&mx, &my, &ones(1.0)),
            Err(Error::InvalidArgument(_))
        ));
    }
}
