//! Lower-triangle band storage shared by the system matrix and its factor.
//!
//! Row `i` stores the `bandwidth + 1` entries for columns
//! `i - bandwidth ..= i`, padded at the left edge for the first rows. The
//! layout is row-major, so the inner products of the factorization and the
//! substitution sweeps run over contiguous slices.

/// Dense-within-band storage of the lower triangle of a banded matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct BandStorage<E> {
    n: usize,
    bandwidth: usize,
    values: Vec<E>,
}

impl<E: Copy> BandStorage<E> {
    /// Allocate an `n x n` band with the given bandwidth, filled with `fill`.
    pub fn new(n: usize, bandwidth: usize, fill: E) -> Self {
        assert!(n > 0, "band storage requires n > 0");
        let stride = bandwidth + 1;
        Self {
            n,
            bandwidth,
            values: vec![fill; n * stride],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    fn stride(&self) -> usize {
        self.bandwidth + 1
    }

    /// Slice of row `i`: entry at offset `o` is column `i - bandwidth + o`.
    pub fn row(&self, i: usize) -> &[E] {
        let s = self.stride();
        &self.values[i * s..(i + 1) * s]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [E] {
        let s = self.stride();
        &mut self.values[i * s..(i + 1) * s]
    }

    /// Offset of column `j` within row `i`; caller guarantees
    /// `j <= i <= j + bandwidth`.
    #[inline]
    pub fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bandwidth);
        self.bandwidth + j - i
    }

    /// Stored value at `(i, j)` of the lower triangle, or `None` outside the
    /// band or above the diagonal.
    pub fn get(&self, i: usize, j: usize) -> Option<E> {
        if i >= self.n || j > i || i - j > self.bandwidth {
            return None;
        }
        Some(self.row(i)[self.offset(i, j)])
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: E) {
        let o = self.offset(i, j);
        self.row_mut(i)[o] = value;
    }

    /// Split into rows `0..=j` and rows `j+1..`, for updating a column from
    /// its pivot row.
    pub fn split_after_row(&mut self, j: usize) -> (&mut [E], &mut [E]) {
        let s = self.stride();
        self.values.split_at_mut((j + 1) * s)
    }

    pub fn values(&self) -> &[E] {
        &self.values
    }
}

/// Positions of the lower triangle inside the band, row by row:
/// `(i, j, offset)` with `max(0, i - bandwidth) <= j <= i`.
pub fn lower_positions(n: usize, bandwidth: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |i| {
        let lo = i.saturating_sub(bandwidth);
        (lo..=i).map(move |j| (i, j, bandwidth + j - i))
    })
}
