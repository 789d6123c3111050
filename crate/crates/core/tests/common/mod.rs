//! Shared test oracles, independent of the band implementation paths they
//! check.

#![allow(dead_code)]

use bandchol::assembly::BandedSymmetricMatrix;
use bandchol::mesh::Mesh1D;
use bandchol::problem::ProblemSpec;

/// Textbook dense Cholesky on the expanded matrix; returns the full lower
/// triangle row by row, or the failing column.
pub fn dense_cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, usize> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut sum = 0.0;
        for k in 0..j {
            sum += l[j][k] * l[j][k];
        }
        let pivot = a[j][j] - sum;
        if pivot <= 0.0 {
            return Err(j);
        }
        l[j][j] = pivot.sqrt();
        for i in (j + 1)..n {
            let mut s = 0.0;
            for k in 0..j {
                s += l[i][k] * l[j][k];
            }
            l[i][j] = (a[i][j] - s) / l[j][j];
        }
    }
    Ok(l)
}

/// Expand a band matrix into a dense symmetric one.
pub fn to_dense(a: &BandedSymmetricMatrix<f64>) -> Vec<Vec<f64>> {
    let n = a.n();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = a.value(i, j);
        }
    }
    d
}

/// Independent dense assembly: walks the interior points, evaluates the five
/// stencil coefficients from point-differenced spacings, and fills a full
/// dense matrix (both triangles). Returns `(matrix, rhs)`.
pub fn dense_assembly(
    mesh_x: &Mesh1D<f64>,
    mesh_y: &Mesh1D<f64>,
    spec: &ProblemSpec<f64>,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n_int = mesh_x.n_intervals();
    assert_eq!(n_int, mesh_y.n_intervals());
    let m = n_int - 1;
    let n = m * m;
    let px = mesh_x.points();
    let py = mesh_y.points();
    let eps2 = spec.epsilon() * spec.epsilon();

    let mut a = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];

    for iy in 1..=m {
        for ix in 1..=m {
            let (x, y) = (px[ix], py[iy]);
            let h_w = px[ix] - px[ix - 1];
            let h_e = px[ix + 1] - px[ix];
            let k_s = py[iy] - py[iy - 1];
            let k_n = py[iy + 1] - py[iy];
            let hbar = (px[ix + 1] - px[ix - 1]) / 2.0;
            let kbar = (py[iy + 1] - py[iy - 1]) / 2.0;
            let row = (iy - 1) * m + (ix - 1);

            a[row][row] = eps2 * (kbar * (1.0 / h_w + 1.0 / h_e) + hbar * (1.0 / k_s + 1.0 / k_n))
                + hbar * kbar * spec.b(x, y);

            let west = -(eps2 * kbar / h_w);
            let east = -(eps2 * kbar / h_e);
            let south = -(eps2 * hbar / k_s);
            let north = -(eps2 * hbar / k_n);

            let mut f = hbar * kbar * spec.f(x, y);
            if ix > 1 {
                a[row][row - 1] = west;
            } else {
                f -= west * spec.g(0.0, y);
            }
            if ix < m {
                a[row][row + 1] = east;
            } else {
                f -= east * spec.g(1.0, y);
            }
            if iy > 1 {
                a[row][row - m] = south;
            } else {
                f -= south * spec.g(x, 0.0);
            }
            if iy < m {
                a[row][row + m] = north;
            } else {
                f -= north * spec.g(x, 1.0);
            }
            rhs[row] = f;
        }
    }
    (a, rhs)
}

/// Closed-form fill level of the factor of the uniform-mesh stencil system:
/// `None` for exact zeros, `Some(0)` on the pattern of `A`, `Some(k)` for
/// fill. Positions are 0-based with `j <= i` and `i - j <= m`.
pub fn closed_form_level(i: usize, j: usize, m: usize) -> Option<u32> {
    assert!(j <= i && i - j <= m);
    let (bi, il) = (i / m, i % m);
    let (bj, jl) = (j / m, j % m);
    if bi == bj {
        // diagonal block: bidiagonal in the first block row, full lower
        // triangle with level d + 1 afterwards
        let d = il - jl;
        match d {
            0 | 1 => Some(0),
            _ if bi == 0 => None,
            _ => Some(d as u32 + 1),
        }
    } else {
        // subdiagonal block: upper triangle, level = column offset
        debug_assert_eq!(bi, bj + 1);
        match jl as i64 - il as i64 {
            0 => Some(0),
            lvl if lvl > 0 => Some(lvl as u32),
            _ => unreachable!("outside the band"),
        }
    }
}

/// Distance in units in the last place between two doubles; equal values
/// (including +-0) give 0.
pub fn ulp_diff(a: f64, b: f64) -> u64 {
    if a == b {
        return 0;
    }
    fn key(x: f64) -> u64 {
        let bits = x.to_bits();
        if bits >> 63 == 0 {
            bits | (1 << 63)
        } else {
            !bits
        }
    }
    key(a).abs_diff(key(b))
}

/// Infinity-norm relative residual of `A x = rhs`.
pub fn relative_residual(a: &BandedSymmetricMatrix<f64>, x: &[f64], rhs: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let num = ax
        .iter()
        .zip(rhs)
        .map(|(l, r)| (l - r).abs())
        .fold(0.0f64, f64::max);
    let den = rhs.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    num / den.max(f64::MIN_POSITIVE)
}
