//! 1D tensor meshes on [0, 1]: uniform and piecewise-uniform (Shishkin).
//!
//! A 2D grid is the cross product of two of these meshes. The Shishkin mesh
//! concentrates a quarter of its intervals in a band of width `tau` at each
//! end of the domain, with `tau = min(1/4, (sigma/beta) * epsilon * ln N)`,
//! so the local width near the boundary is `O(epsilon / N)` while the
//! interior stays `O(1 / N)`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Mesh family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshKind {
    Uniform,
    Shishkin,
}

impl fmt::Display for MeshKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshKind::Uniform => write!(f, "uniform"),
            MeshKind::Shishkin => write!(f, "shishkin"),
        }
    }
}

impl std::str::FromStr for MeshKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(MeshKind::Uniform),
            "shishkin" => Ok(MeshKind::Shishkin),
            other => Err(Error::InvalidArgument(format!(
                "unknown mesh kind {other:?} (expected \"uniform\" or \"shishkin\")"
            ))),
        }
    }
}

/// A strictly increasing grid of `N + 1` points on [0, 1].
///
/// `widths` holds the interval lengths `h_i = x_i - x_{i-1}`; they are
/// constructed directly (not differenced from the points), so a Shishkin mesh
/// carries exactly two distinct width values and a uniform mesh exactly one.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh1D<T> {
    points: Vec<T>,
    widths: Vec<T>,
    kind: MeshKind,
}

impl<T: Scalar> Mesh1D<T> {
    fn from_parts(points: Vec<T>, widths: Vec<T>, kind: MeshKind) -> Self {
        debug_assert_eq!(points.len(), widths.len() + 1);
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        Self {
            points,
            widths,
            kind,
        }
    }

    /// Number of intervals `N`.
    pub fn n_intervals(&self) -> usize {
        self.widths.len()
    }

    /// Grid points `x_0 = 0, ..., x_N = 1`.
    pub fn points(&self) -> &[T] {
        &self.points
    }

    /// Interval widths `h_1, ..., h_N` (index `i` holds `h_{i+1}`).
    pub fn widths(&self) -> &[T] {
        &self.widths
    }

    pub fn kind(&self) -> MeshKind {
        self.kind
    }

    /// Averaged width `(h_i + h_{i+1}) / 2` around interior point `i`
    /// (1-based, `1 <= i <= N - 1`).
    pub fn averaged_width(&self, i: usize) -> T {
        let half = T::from_f64(0.5).unwrap();
        (self.widths[i - 1] + self.widths[i]) * half
    }
}

/// Build a uniform mesh with `N >= 2` intervals; every width is `1/N`.
pub fn uniform_mesh<T: Scalar>(n: usize) -> Result<Mesh1D<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "uniform mesh requires N >= 2, got {n}"
        )));
    }
    let nt = T::from_usize(n).unwrap();
    let points = (0..=n).map(|i| T::from_usize(i).unwrap() / nt).collect();
    let widths = vec![T::one() / nt; n];
    Ok(Mesh1D::from_parts(points, widths, MeshKind::Uniform))
}

/// Build a Shishkin mesh with `N` intervals (`N` divisible by 4).
///
/// The transition point is `tau = min(1/4, (sigma * epsilon / beta) * ln N)`;
/// `N/4` equal intervals cover each of `[0, tau]` and `[1 - tau, 1]`, and
/// `N/2` equal intervals cover `[tau, 1 - tau]`. When the formula caps at
/// `tau = 1/4` the mesh degenerates to the uniform one and is returned as
/// such.
pub fn shishkin_mesh<T: Scalar>(n: usize, epsilon: T, beta: T, sigma: T) -> Result<Mesh1D<T>> {
    if n < 4 || n % 4 != 0 {
        return Err(Error::InvalidArgument(format!(
            "Shishkin mesh requires N divisible by 4, got {n}"
        )));
    }
    for (name, v) in [("epsilon", epsilon), ("beta", beta), ("sigma", sigma)] {
        if !(v > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "{name} must be > 0, got {v}"
            )));
        }
    }

    let quarter = T::from_f64(0.25).unwrap();
    let ln_n = T::from_usize(n).unwrap().ln();
    let tau = (sigma * epsilon / beta) * ln_n;
    if tau >= quarter {
        return uniform_mesh(n);
    }

    let nf = n / 4; // intervals in each fine band
    let nc = n / 2; // intervals in the coarse interior
    let fine = tau / T::from_usize(nf).unwrap();
    let two = T::from_f64(2.0).unwrap();
    let coarse = (T::one() - two * tau) / T::from_usize(nc).unwrap();

    // Anchor each band to its nearest domain endpoint so x_0 = 0 and x_N = 1
    // hold exactly.
    let mut points = Vec::with_capacity(n + 1);
    for i in 0..=nf {
        points.push(T::from_usize(i).unwrap() * fine);
    }
    for i in 1..=nc {
        points.push(tau + T::from_usize(i).unwrap() * coarse);
    }
    for i in (0..nf).rev() {
        points.push(T::one() - T::from_usize(i).unwrap() * fine);
    }
    debug_assert_eq!(points.len(), n + 1);

    if !points.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(format!(
            "degenerate Shishkin mesh for N = {n}: points are not strictly increasing"
        )));
    }

    let mut widths = vec![fine; nf];
    widths.extend(std::iter::repeat_n(coarse, nc));
    widths.extend(std::iter::repeat_n(fine, nf));
    Ok(Mesh1D::from_parts(points, widths, MeshKind::Shishkin))
}
